//! Spectrum analysis: symmetric-pair structure, zero modes, smallest positive
//! eigenvalues, power-law level fits, large-eigenvalue scaling, and
//! eigenvector localization at the vacuum.
//!
//! Indexing convention for level fits: positive eigenvalues are indexed by
//! their offset from the spectrum center. Odd-dimension spectra have a
//! central zero mode, so their positive levels sit at integer offsets
//! `1, 2, ...`; even-dimension spectra have no central level and theirs sit
//! at half-integer offsets `1/2, 3/2, ...`. With this convention a single
//! power law `E = alpha j^gamma` describes both parities and their
//! interleaving with one exponent.

use crate::error::{Error, Result};
use crate::operators::JacobiMatrix;
use crate::tridiag;
use serde::{Deserialize, Serialize};

/// Relative threshold below which an eigenvalue counts as a zero mode.
///
/// The computed zero mode of an odd-dimension zero-diagonal Jacobi matrix
/// lands within a few hundred ulps of `max |lambda|`, while the smallest
/// genuine eigenvalue stays O(sqrt(n!)) even as `max |lambda|` grows like
/// `(n dim)^{n/2}`; at n = 6, dim = 1000 a 1e-9 relative cut would already
/// swallow the genuine +-25.9 pair, so the cut sits at 1e-12.
pub const ZERO_EIGENVALUE_REL_THRESHOLD: f64 = 1e-12;

/// Default fit window (in center-offset index), calibrated at dim 1000/1001
/// to reproduce the reference exponents for n = 1..4; see `fit_power_law`.
pub const DEFAULT_FIT_WINDOW: (usize, usize) = (12, 55);

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub dim: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    vectors: Option<tridiag::EigenDecomposition>,
}

impl SpectrumResult {
    /// Wrap an externally obtained (e.g. parsed) ascending eigenvalue list.
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Self {
        SpectrumResult {
            dim: eigenvalues.len(),
            eigenvalues,
            vectors: None,
        }
    }

    pub fn has_vectors(&self) -> bool {
        self.vectors.is_some()
    }

    pub fn vector(&self, k: usize) -> Result<&[f64]> {
        self.vectors
            .as_ref()
            .map(|d| d.vector(k))
            .ok_or(Error::VectorsAbsent)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
    }

    /// Indices of eigenvalues within the zero threshold.
    pub fn zero_mode_indices(&self) -> Vec<usize> {
        let thr = ZERO_EIGENVALUE_REL_THRESHOLD * self.max_abs_eigenvalue();
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &v)| v.abs() <= thr)
            .map(|(i, _)| i)
            .collect()
    }

    /// Strictly positive eigenvalues (above the zero threshold), ascending.
    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        let thr = ZERO_EIGENVALUE_REL_THRESHOLD * self.max_abs_eigenvalue();
        self.eigenvalues
            .iter()
            .copied()
            .filter(|&v| v > thr)
            .collect()
    }
}

/// Eigenvalues (and optionally eigenvectors) of a Jacobi matrix.
pub fn spectrum(h: &JacobiMatrix, want_vectors: bool) -> Result<SpectrumResult> {
    if want_vectors {
        let dec = tridiag::eigen_decompose(&h.diag, &h.offdiag)?;
        Ok(SpectrumResult {
            dim: h.dim(),
            eigenvalues: dec.values.clone(),
            vectors: Some(dec),
        })
    } else {
        Ok(SpectrumResult {
            dim: h.dim(),
            eigenvalues: tridiag::eigenvalues(&h.diag, &h.offdiag)?,
            vectors: None,
        })
    }
}

/// Maximum pairing defect `|lambda_k + lambda_{dim-1-k}|`, normalized by
/// `max |lambda|`. Zero-diagonal Jacobi matrices have exactly symmetric
/// spectra; a Kerr diagonal breaks the symmetry.
pub fn symmetry_defect(s: &SpectrumResult) -> f64 {
    let n = s.eigenvalues.len();
    let scale = s.max_abs_eigenvalue();
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for k in 0..n.div_ceil(2) {
        worst = worst.max((s.eigenvalues[k] + s.eigenvalues[n - 1 - k]).abs());
    }
    worst / scale
}

/// Smallest eigenvalue above the zero threshold.
pub fn smallest_positive(s: &SpectrumResult) -> Result<f64> {
    s.positive_eigenvalues()
        .first()
        .copied()
        .ok_or(Error::NoPositiveEigenvalue)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub gamma: f64,
    pub r_squared: f64,
    /// The `(j_min, j_max)` window the fit was requested with.
    pub index_range: (usize, usize),
}

fn loglog_least_squares(xs: &[f64], ys: &[f64], index_range: (usize, usize)) -> PowerLawFit {
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    let denom = n * sxx - sx * sx;
    let gamma = (n * sxy - sx * sy) / denom;
    let alpha = ((sy - gamma * sx) / n).exp();
    let var = (n * syy - sy * sy).max(f64::MIN_POSITIVE);
    let r_squared = ((n * sxy - sx * sy) * (n * sxy - sx * sy) / (denom * var)).min(1.0);
    PowerLawFit {
        alpha,
        gamma,
        r_squared,
        index_range,
    }
}

/// Least-squares straight line in `(log j, log E_j)` over positive levels
/// with center-offset index in `[j_min, j_max]` (offsets are shifted by 1/2
/// for even-dimension spectra; see the module docs).
pub fn fit_power_law(s: &SpectrumResult, j_min: usize, j_max: usize) -> Result<PowerLawFit> {
    if j_min < 1 {
        return Err(Error::InvalidSpec("fit window must start at index >= 1".into()));
    }
    let pos = s.positive_eigenvalues();
    let offset = if s.dim % 2 == 0 { -0.5 } else { 0.0 };
    let j_hi = j_max.min(pos.len());
    if j_hi < j_min || j_hi - j_min + 1 < 8 {
        return Err(Error::FitTooFewPoints {
            got: j_hi.saturating_sub(j_min) + 1,
            need: 8,
        });
    }
    let xs: Vec<f64> = (j_min..=j_hi).map(|j| j as f64 + offset).collect();
    let ys: Vec<f64> = (j_min..=j_hi).map(|j| pos[j - 1]).collect();
    Ok(loglog_least_squares(&xs, &ys, (j_min, j_max)))
}

/// Merge the non-negative levels of an even/odd spectrum pair in ascending
/// (alternating) order and fit one power law across both, with merged index
/// `k` mapped to center offset `k/2`.
pub fn interleaved_fit(
    even: &SpectrumResult,
    odd: &SpectrumResult,
    j_min: usize,
    j_max: usize,
) -> Result<PowerLawFit> {
    if even.dim % 2 != 0 || odd.dim % 2 != 1 || even.dim.abs_diff(odd.dim) != 1 {
        return Err(Error::DimensionMismatch(format!(
            "interleaved fit needs adjacent even/odd dims, got {} and {}",
            even.dim, odd.dim
        )));
    }
    let thr_even = ZERO_EIGENVALUE_REL_THRESHOLD * even.max_abs_eigenvalue();
    let thr_odd = ZERO_EIGENVALUE_REL_THRESHOLD * odd.max_abs_eigenvalue();
    let mut merged: Vec<f64> = even
        .eigenvalues
        .iter()
        .copied()
        .filter(|&v| v > thr_even)
        .chain(odd.eigenvalues.iter().copied().filter(|&v| v >= -thr_odd))
        .collect();
    merged.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // merged index k: odd's zero mode at k=0, center offset x = k/2
    let lo = 2 * j_min - 1; // first k with x >= j_min - 1/2
    let hi = 2 * j_max;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in lo..=hi.min(merged.len().saturating_sub(1)) {
        let v = merged[k];
        if v > thr_odd.max(thr_even) {
            xs.push(k as f64 / 2.0);
            ys.push(v);
        }
    }
    if xs.len() < 8 {
        return Err(Error::FitTooFewPoints {
            got: xs.len(),
            need: 8,
        });
    }
    Ok(loglog_least_squares(&xs, &ys, (j_min, j_max)))
}

/// Large-eigenvalue growth with truncation size, for the index tracks
/// `dim-1`, `3 dim/4`, and `11 dim/20` (0-based, ascending order).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub dims: Vec<usize>,
    /// Fit of the largest eigenvalue against dim.
    pub top: PowerLawFit,
    pub three_quarter_slope: f64,
    pub eleven_twentieth_slope: f64,
}

/// For each (even) dim, compute the three tracked eigenvalues by Sturm
/// bisection and fit `log(eigenvalue)` vs `log(dim)` per track.
pub fn largest_eigenvalue_scaling(n: u32, dims: &[usize]) -> Result<ScalingReport> {
    if dims.len() < 2 {
        return Err(Error::FitTooFewPoints {
            got: dims.len(),
            need: 2,
        });
    }
    for w in dims.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidSpec("dims must be strictly ascending".into()));
        }
    }
    if let Some(d) = dims.iter().find(|&&d| d % 2 != 0) {
        return Err(Error::InvalidSpec(format!(
            "large-eigenvalue scaling uses even dims only, got {d}"
        )));
    }
    let spec_for = |dim: usize| crate::operators::TruncationSpec::new(n, dim, None).unwrap();
    let mut top = Vec::new();
    let mut three_q = Vec::new();
    let mut eleven_20 = Vec::new();
    for &dim in dims {
        let h = crate::operators::build_hamiltonian(&spec_for(dim));
        top.push(tridiag::eigenvalue_by_index(&h.diag, &h.offdiag, dim - 1));
        three_q.push(tridiag::eigenvalue_by_index(
            &h.diag,
            &h.offdiag,
            3 * dim / 4,
        ));
        eleven_20.push(tridiag::eigenvalue_by_index(
            &h.diag,
            &h.offdiag,
            11 * dim / 20,
        ));
    }
    let xs: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let range = (dims[0], dims[dims.len() - 1]);
    let top_fit = loglog_least_squares(&xs, &top, range);
    let tq = loglog_least_squares(&xs, &three_q, range);
    let et = loglog_least_squares(&xs, &eleven_20, range);
    Ok(ScalingReport {
        dims: dims.to_vec(),
        top: top_fit,
        three_quarter_slope: tq.gamma,
        eleven_twentieth_slope: et.gamma,
    })
}

/// Squared vacuum overlaps `|<e_0|v_k>|^2` for eigenvectors in a window of
/// half-width `half_width` around the spectrum center. The overlaps over the
/// full spectrum sum to 1 (checked to 1e-10).
pub fn vacuum_overlap_profile(s: &SpectrumResult, half_width: usize) -> Result<Vec<f64>> {
    let dec = s.vectors.as_ref().ok_or(Error::VectorsAbsent)?;
    let weights = dec.vacuum_weights();
    let total: f64 = weights.iter().map(|c| c * c).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpec(format!(
            "vacuum overlaps sum to {total}, expected 1"
        )));
    }
    let center = (s.dim - 1) / 2;
    let lo = center.saturating_sub(half_width);
    let hi = (center + half_width).min(s.dim - 1);
    Ok(weights[lo..=hi].iter().map(|c| c * c).collect())
}

/// Extrapolation of the smallest positive eigenvalue to infinite truncation:
/// a straight-line fit of `log(lambda_min(N) - lambda_inf)` against `log N`,
/// with `lambda_inf` chosen by a scan maximizing r^2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub dims: Vec<usize>,
    pub lambda_min: Vec<f64>,
    pub lambda_inf: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn smallest_positive_extrapolation(n: u32, dims: &[usize]) -> Result<ExtrapolationReport> {
    if dims.len() < 4 {
        return Err(Error::FitTooFewPoints {
            got: dims.len(),
            need: 4,
        });
    }
    let mut lam = Vec::new();
    for &dim in dims {
        if dim % 2 != 0 {
            return Err(Error::InvalidSpec(
                "extrapolation uses even dims (no zero mode)".into(),
            ));
        }
        let spec = crate::operators::TruncationSpec::new(n, dim, None)?;
        let h = crate::operators::build_hamiltonian(&spec);
        // smallest positive of an even symmetric spectrum is index dim/2
        lam.push(tridiag::eigenvalue_by_index(&h.diag, &h.offdiag, dim / 2));
    }
    let xs: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let floor = lam.iter().cloned().fold(f64::INFINITY, f64::min);

    let fit_at = |linf: f64| -> Option<(f64, f64)> {
        let ys: Vec<f64> = lam.iter().map(|&l| l - linf).collect();
        if ys.iter().any(|&y| y <= 0.0) {
            return None;
        }
        let f = loglog_least_squares(&xs, &ys, (dims[0], dims[dims.len() - 1]));
        Some((f.gamma, f.r_squared))
    };

    // dense scan of lambda_inf in [0, floor), then a local refinement
    let mut best = (0.0_f64, f64::NEG_INFINITY, 0.0_f64); // (linf, r2, slope)
    let scan = 400;
    for i in 0..scan {
        let linf = floor * i as f64 / scan as f64;
        if let Some((slope, r2)) = fit_at(linf) {
            if r2 > best.1 {
                best = (linf, r2, slope);
            }
        }
    }
    let step = floor / scan as f64;
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(floor * 0.999999));
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let r1 = fit_at(m1).map(|f| f.1).unwrap_or(f64::NEG_INFINITY);
        let r2 = fit_at(m2).map(|f| f.1).unwrap_or(f64::NEG_INFINITY);
        if r1 < r2 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let linf = 0.5 * (lo + hi);
    if let Some((slope, r2)) = fit_at(linf) {
        if r2 > best.1 {
            best = (linf, r2, slope);
        }
    }
    Ok(ExtrapolationReport {
        dims: dims.to_vec(),
        lambda_min: lam,
        lambda_inf: best.0,
        slope: best.2,
        r_squared: best.1,
    })
}
