//! Vacuum-state evolution across a squeezing-parameter grid.
//!
//! All methods evaluate `psi(r_k) = exp(-i T r_k) e_0` on the grid
//! `r_k = k dr` and record the photon-number expectation and the norm drift
//! per grid point. They agree with each other (and with a dense-exponential
//! oracle) on their shared validity ranges; see the integration tests.

use crate::chebyshev::{ChebyshevStep, Scratch};
use crate::error::{Error, Result};
use crate::expm::{expm, CMatrix};
use crate::operators::{JacobiMatrix, TruncationSpec};
use crate::tridiag;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Dimension above which a dense one-step propagator is refused.
pub const POWERING_MAX_DIM: usize = 8192;
/// `auto` switches from the spectral to the Chebyshev propagator here.
pub const AUTO_SPECTRAL_MAX_DIM: usize = 4096;
/// Default cap on Chebyshev terms per step.
pub const DEFAULT_CHEBYSHEV_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Chebyshev,
    Powering,
    Auto,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "chebyshev" => Ok(Method::Chebyshev),
            "powering" => Ok(Method::Powering),
            "auto" => Ok(Method::Auto),
            other => Err(Error::InvalidSpec(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropagationConfig {
    /// Final squeezing parameter; a negative value evolves backward.
    pub r_max: f64,
    /// Grid step (> 0). The grid is `k * dr` for integer `k`.
    pub dr: f64,
    pub method: Method,
    pub record_states: bool,
    /// Per-step series cap for the Chebyshev method.
    pub max_chebyshev_terms: usize,
}

impl PropagationConfig {
    pub fn new(r_max: f64, dr: f64, method: Method) -> Result<Self> {
        if !(dr > 0.0) {
            return Err(Error::InvalidSpec(format!("dr must be > 0, got {dr}")));
        }
        if r_max == 0.0 || !r_max.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "r_max must be finite and nonzero, got {r_max}"
            )));
        }
        let steps = r_max.abs() / dr;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::InvalidSpec(format!(
                "r_max/dr = {steps} is not an integer; the grid uses integer multiples of dr"
            )));
        }
        Ok(PropagationConfig {
            r_max,
            dr,
            method,
            record_states: false,
            max_chebyshev_terms: DEFAULT_CHEBYSHEV_CAP,
        })
    }

    pub fn with_states(mut self) -> Self {
        self.record_states = true;
        self
    }

    fn steps(&self) -> usize {
        (self.r_max.abs() / self.dr).round() as usize
    }

    /// Signed step: negative `r_max` evolves toward negative r.
    fn signed_dr(&self) -> f64 {
        if self.r_max < 0.0 {
            -self.dr
        } else {
            self.dr
        }
    }
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            r_max: 2.0,
            dr: 0.01,
            method: Method::Auto,
            record_states: false,
            max_chebyshev_terms: DEFAULT_CHEBYSHEV_CAP,
        }
    }
}

/// Photon-number trajectory of the evolved vacuum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub r_grid: Vec<f64>,
    pub photon_number: Vec<f64>,
    pub norm_drift: Vec<f64>,
    #[serde(skip)]
    pub states: Option<Vec<Vec<Complex64>>>,
}

impl Trajectory {
    pub fn max_photon(&self) -> f64 {
        self.photon_number.iter().fold(0.0_f64, |a, &p| a.max(p))
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().fold(0.0_f64, |a, &d| a.max(d))
    }
}

/// Sup distance between two photon-number series on a common grid.
pub fn sup_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    a.photon_number
        .iter()
        .zip(&b.photon_number)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0_f64, f64::max)
}

/// Photon-number expectation `sum_j (n j) |psi_j|^2` of a normalized state
/// on the invariant subspace of squeezing order `n`.
pub fn photon_number(state: &[Complex64], n: u32) -> Result<f64> {
    let norm_sq: f64 = state.iter().map(|c| c.norm_sqr()).sum();
    let deviation = (norm_sq.sqrt() - 1.0).abs();
    if deviation > 1e-6 {
        return Err(Error::NormDeviation {
            deviation,
            limit: 1e-6,
        });
    }
    Ok(state
        .iter()
        .enumerate()
        .map(|(j, c)| n as f64 * j as f64 * c.norm_sqr())
        .sum())
}

/// Evolve the vacuum under `h` across the grid and collect observables.
pub fn propagate_vacuum(
    h: &JacobiMatrix,
    spec: &TruncationSpec,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    if h.dim() != spec.dim {
        return Err(Error::DimensionMismatch(format!(
            "matrix dim {} vs spec dim {}",
            h.dim(),
            spec.dim
        )));
    }
    let method = match cfg.method {
        Method::Auto => {
            if spec.dim <= AUTO_SPECTRAL_MAX_DIM {
                Method::Spectral
            } else {
                Method::Chebyshev
            }
        }
        m => m,
    };
    match method {
        Method::Spectral => propagate_spectral(h, spec, cfg),
        Method::Chebyshev => propagate_chebyshev(h, spec, cfg),
        Method::Powering => propagate_powering(h, spec, cfg),
        Method::Auto => unreachable!(),
    }
}

fn observables(
    spec: &TruncationSpec,
    re: &[f64],
    im: &[f64],
) -> (f64, f64) {
    let n = spec.n as f64;
    let mut norm_sq = 0.0;
    let mut photons = 0.0;
    for j in 0..re.len() {
        let w = re[j] * re[j] + im[j] * im[j];
        norm_sq += w;
        photons += n * j as f64 * w;
    }
    (photons, (norm_sq.sqrt() - 1.0).abs())
}

fn pack_state(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter()
        .zip(im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect()
}

/// Full eigendecomposition route: `psi(r) = Q e^{-i Lambda r} Q^T e_0`.
fn propagate_spectral(
    h: &JacobiMatrix,
    spec: &TruncationSpec,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    let n = h.dim();
    let dec = tridiag::eigen_decompose(&h.diag, &h.offdiag)?;
    let weights = dec.vacuum_weights();
    let steps = cfg.steps();
    let dr = cfg.signed_dr();

    let points: Vec<(f64, f64, f64, Option<Vec<Complex64>>)> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let r = k as f64 * dr;
            let mut re = vec![0.0_f64; n];
            let mut im = vec![0.0_f64; n];
            if k == 0 {
                // identity evolution, exactly
                re[0] = 1.0;
                let state = cfg.record_states.then(|| pack_state(&re, &im));
                return (r, 0.0, 0.0, state);
            }
            for (i, &c) in weights.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let phase = dec.values[i] * r;
                let (s, co) = phase.sin_cos();
                let wr = c * co;
                let wi = -c * s;
                let v = dec.vector(i);
                for j in 0..n {
                    re[j] += wr * v[j];
                    im[j] += wi * v[j];
                }
            }
            let (photons, drift) = observables(spec, &re, &im);
            let state = cfg.record_states.then(|| pack_state(&re, &im));
            (r, photons, drift, state)
        })
        .collect();

    Ok(assemble(points))
}

fn assemble(points: Vec<(f64, f64, f64, Option<Vec<Complex64>>)>) -> Trajectory {
    let mut r_grid = Vec::with_capacity(points.len());
    let mut photon_number = Vec::with_capacity(points.len());
    let mut norm_drift = Vec::with_capacity(points.len());
    let mut states = Vec::new();
    let mut any_state = false;
    for (r, p, d, s) in points {
        r_grid.push(r);
        photon_number.push(p);
        norm_drift.push(d);
        if let Some(s) = s {
            any_state = true;
            states.push(s);
        }
    }
    Trajectory {
        r_grid,
        photon_number,
        norm_drift,
        states: any_state.then_some(states),
    }
}

/// Chebyshev-expanded one-step propagator applied sequentially.
fn propagate_chebyshev(
    h: &JacobiMatrix,
    spec: &TruncationSpec,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    let n = h.dim();
    let step = ChebyshevStep::new(h, cfg.signed_dr(), cfg.max_chebyshev_terms)?;
    let mut scratch = Scratch::new(n);
    let mut re = vec![0.0_f64; n];
    let mut im = vec![0.0_f64; n];
    re[0] = 1.0;
    let steps = cfg.steps();
    let dr = cfg.signed_dr();

    let mut points = Vec::with_capacity(steps + 1);
    let (p0, d0) = observables(spec, &re, &im);
    points.push((0.0, p0, d0, cfg.record_states.then(|| pack_state(&re, &im))));
    for k in 1..=steps {
        step.apply(h, &mut re, &mut im, &mut scratch);
        let (p, d) = observables(spec, &re, &im);
        points.push((
            k as f64 * dr,
            p,
            d,
            cfg.record_states.then(|| pack_state(&re, &im)),
        ));
    }
    Ok(assemble(points))
}

/// Paper-faithful mode: build `U(dr)` densely once, then apply it per step.
fn propagate_powering(
    h: &JacobiMatrix,
    spec: &TruncationSpec,
    cfg: &PropagationConfig,
) -> Result<Trajectory> {
    let n = h.dim();
    if n > POWERING_MAX_DIM {
        return Err(Error::PoweringRefused {
            dim: n,
            max: POWERING_MAX_DIM,
        });
    }
    let dr = cfg.signed_dr();
    // A = -i dr T on the gauged (real symmetric) matrix
    let mut a = CMatrix::zeros(n);
    for j in 0..n {
        a.set(j, j, Complex64::new(0.0, -dr * h.diag[j]));
        if j + 1 < n {
            let v = Complex64::new(0.0, -dr * h.offdiag[j]);
            a.set(j, j + 1, v);
            a.set(j + 1, j, v);
        }
    }
    let u = expm(&a);

    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[0] = Complex64::new(1.0, 0.0);
    let mut next = psi.clone();
    let steps = cfg.steps();

    let mut points = Vec::with_capacity(steps + 1);
    let split = |s: &[Complex64]| -> (Vec<f64>, Vec<f64>) {
        (s.iter().map(|c| c.re).collect(), s.iter().map(|c| c.im).collect())
    };
    let (re, im) = split(&psi);
    let (p0, d0) = observables(spec, &re, &im);
    points.push((0.0, p0, d0, cfg.record_states.then(|| psi.clone())));
    for k in 1..=steps {
        u.apply(&psi, &mut next);
        std::mem::swap(&mut psi, &mut next);
        let (re, im) = split(&psi);
        let (p, d) = observables(spec, &re, &im);
        points.push((k as f64 * dr, p, d, cfg.record_states.then(|| psi.clone())));
    }
    Ok(assemble(points))
}
