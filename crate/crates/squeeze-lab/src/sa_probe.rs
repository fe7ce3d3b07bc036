//! Numerical limit-point / limit-circle classification of the infinite
//! Jacobi operators behind each truncation family.
//!
//! The Weyl alternative for half-line Jacobi matrices reduces essential
//! self-adjointness to square-summability of the solution of
//! `t_{j-1} psi_{j-1} + d_j psi_j + t_j psi_{j+1} = z psi_j` (with the j = 0
//! row built in) at non-real `z`: an l^2 solution means limit circle, i.e.
//! not essentially self-adjoint. The recurrence is run forward from
//! `psi_0 = 1` in a rescaled representation so that super-exponentially
//! growing or decaying solutions never leave floating-point range, and the
//! verdict is read off geometric-block partial sums of `|psi_j|^2`.

use crate::error::{Error, Result};
use crate::operators::{coupling, kerr_diagonal, KerrSpec, TruncationSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Geometric blocks start at this index and double in length.
const FIRST_BLOCK_END: usize = 64;
/// Block-sum ratio below which the tail counts as converging.
const CONVERGENCE_RATIO: f64 = 0.95;
/// Number of trailing block ratios that must agree for a verdict.
const VERDICT_RATIOS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Essentially self-adjoint.
    LimitPoint,
    /// Not essentially self-adjoint.
    LimitCircle,
    Inconclusive,
}

impl Verdict {
    pub fn describe(&self) -> &'static str {
        match self {
            Verdict::LimitPoint => "limit_point (essentially self-adjoint)",
            Verdict::LimitCircle => "limit_circle (not essentially self-adjoint)",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Classification evidence for one operator family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaClassification {
    pub verdict: Verdict,
    /// Fitted `p` in `|psi_j| ~ j^{-p}` over the deep tail; negative values
    /// mean the solution grows (the fit then reports the growth rate in the
    /// same log-log sense).
    pub decay_exponent: f64,
    /// Partial sums of `|psi_j|^2` up to geometrically spaced depths;
    /// saturates to infinity once past floating-point range.
    pub tail_norms: Vec<f64>,
    pub probe_depth: usize,
    pub note: Option<String>,
}

/// Deficiency-equation solution in log-magnitude/phase form.
#[derive(Debug, Clone)]
pub struct DeficiencySolution {
    pub z: Complex64,
    /// Natural log of `|psi_j|`, j = 0..=depth.
    pub log_abs: Vec<f64>,
    pub phase: Vec<f64>,
}

impl DeficiencySolution {
    pub fn depth(&self) -> usize {
        self.log_abs.len() - 1
    }

    /// The solution value, when representable in f64.
    pub fn value(&self, j: usize) -> Complex64 {
        let m = self.log_abs[j].exp();
        Complex64::from_polar(m, self.phase[j])
    }
}

fn infinite_coefficients(spec: &TruncationSpec) -> (u32, Option<KerrSpec>) {
    (spec.n, spec.kerr)
}

/// Solve the deficiency equation forward from `psi_0 = 1`.
pub fn deficiency_solution(
    spec: &TruncationSpec,
    z: Complex64,
    depth: usize,
) -> Result<DeficiencySolution> {
    if z.im == 0.0 {
        return Err(Error::InvalidSpec("probe point must have Im z != 0".into()));
    }
    if depth < 1000 {
        return Err(Error::InvalidSpec(format!(
            "probe depth must be >= 1000, got {depth}"
        )));
    }
    let (n, kerr) = infinite_coefficients(spec);
    let mut log_abs = vec![f64::NEG_INFINITY; depth + 1];
    let mut phase = vec![0.0_f64; depth + 1];

    // psi_0 = 1; the j = 0 row gives t_0 psi_1 = (z - d_0) psi_0
    let mut prev = Complex64::new(1.0, 0.0);
    log_abs[0] = 0.0;
    let d0 = kerr_diagonal(0, kerr);
    let t0 = coupling(n, 0);
    let mut cur = (z - d0) / t0;
    log_abs[1] = cur.norm().ln();
    phase[1] = cur.arg();

    let mut scale_log = 0.0_f64;
    let mut t_prev = t0;
    for j in 1..depth {
        let d = kerr_diagonal(n as u64 * j as u64, kerr);
        let t = coupling(n, j);
        let next = ((z - d) * cur - t_prev * prev) / t;
        let mag = next.norm();
        log_abs[j + 1] = mag.ln() + scale_log;
        phase[j + 1] = next.arg();
        prev = cur;
        cur = next;
        t_prev = t;
        if !(1e-100..=1e100).contains(&mag) && mag > 0.0 {
            scale_log += mag.ln();
            let inv = 1.0 / mag;
            cur *= inv;
            prev *= inv;
        }
    }
    Ok(DeficiencySolution { z, log_abs, phase })
}

/// Backward (Miller-style) pass from the probe depth with two independent
/// trial tails, rescaled to the forward solution at the midpoint. Returns
/// the log-magnitudes of the first tail and the worst log-disagreement of
/// the two tails over the leading quarter, which measures how sharply a
/// minimal solution is defined (small values mean a strong dichotomy).
pub fn backward_minimal(
    spec: &TruncationSpec,
    z: Complex64,
    depth: usize,
    forward: &DeficiencySolution,
) -> (Vec<f64>, f64) {
    let (n, kerr) = infinite_coefficients(spec);
    let run = |seed: (Complex64, Complex64)| -> Vec<f64> {
        let mut log_abs = vec![f64::NEG_INFINITY; depth + 1];
        let mut upper = seed.0; // psi_{j+1}
        let mut cur = seed.1; // psi_j
        let mut scale_log = 0.0_f64;
        log_abs[depth] = cur.norm().ln();
        let mut j = depth;
        while j > 0 {
            // t_{j-1} psi_{j-1} = (z - d_j) psi_j - t_j psi_{j+1}
            let d = kerr_diagonal(n as u64 * j as u64, kerr);
            let t_lower = coupling(n, j - 1);
            let t_upper = coupling(n, j);
            let lower = ((z - d) * cur - t_upper * upper) / t_lower;
            j -= 1;
            let mag = lower.norm();
            log_abs[j] = mag.ln() + scale_log;
            upper = cur;
            cur = lower;
            if !(1e-100..=1e100).contains(&mag) && mag > 0.0 {
                scale_log += mag.ln();
                let inv = 1.0 / mag;
                cur *= inv;
                upper *= inv;
            }
        }
        log_abs
    };
    let one = Complex64::new(1.0, 0.0);
    let a = run((Complex64::new(0.0, 0.0), one));
    let b = run((one, one));
    // rescale both to match the forward solution at the midpoint
    let mid = depth / 2;
    let shift_a = forward.log_abs[mid] - a[mid];
    let shift_b = forward.log_abs[mid] - b[mid];
    let mut disagreement = 0.0_f64;
    for j in 0..depth / 4 {
        let da = a[j] + shift_a;
        let db = b[j] + shift_b;
        if da.is_finite() && db.is_finite() {
            disagreement = disagreement.max((da - db).abs());
        }
    }
    let scaled: Vec<f64> = a.iter().map(|&v| v + shift_a).collect();
    (scaled, disagreement)
}

/// Geometric block boundaries anchored at `depth`: `..., depth/4, depth/2,
/// depth`. Anchoring keeps every block full (ratios between consecutive
/// blocks are meaningful) and makes the halved-depth verdict exactly "the
/// same evidence minus the deepest block".
fn block_ends(depth: usize) -> Vec<usize> {
    let mut ends = Vec::new();
    let mut e = depth;
    while e >= 2 * FIRST_BLOCK_END {
        ends.push(e);
        e /= 2;
    }
    ends.reverse();
    ends
}

/// log of `sum_{j in [lo, hi)} |psi_j|^2` via a shifted sum.
fn log_block_sum(log_abs: &[f64], lo: usize, hi: usize) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    for j in lo..hi {
        peak = peak.max(2.0 * log_abs[j]);
    }
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0_f64;
    for j in lo..hi {
        acc += (2.0 * log_abs[j] - peak).exp();
    }
    peak + acc.ln()
}

struct BlockEvidence {
    ends: Vec<usize>,
    log_sums: Vec<f64>,
    /// cumulative partial sums (saturating)
    tail_norms: Vec<f64>,
}

fn block_evidence(log_abs: &[f64], depth: usize) -> BlockEvidence {
    let ends = block_ends(depth);
    let mut log_sums = Vec::with_capacity(ends.len());
    let mut lo = 0usize;
    for &hi in &ends {
        log_sums.push(log_block_sum(log_abs, lo, hi));
        lo = hi;
    }
    // cumulative sums in log domain
    let mut tail_norms = Vec::with_capacity(ends.len());
    let mut cum = f64::NEG_INFINITY;
    for &ls in &log_sums {
        cum = if cum == f64::NEG_INFINITY {
            ls
        } else {
            let m = cum.max(ls);
            m + ((cum - m).exp() + (ls - m).exp()).ln()
        };
        tail_norms.push(cum.exp());
    }
    BlockEvidence {
        ends,
        log_sums,
        tail_norms,
    }
}

/// Verdict from the trailing block ratios of `log_sums[..n_blocks]`.
fn verdict_from_blocks(log_sums: &[f64], n_blocks: usize) -> Verdict {
    if n_blocks < VERDICT_RATIOS + 2 {
        return Verdict::Inconclusive;
    }
    let ratios: Vec<f64> = log_sums[..n_blocks]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let tail = &ratios[ratios.len() - VERDICT_RATIOS..];
    let conv = CONVERGENCE_RATIO.ln();
    if tail.iter().all(|&r| r < conv) {
        Verdict::LimitCircle
    } else if tail.iter().all(|&r| r >= conv) {
        Verdict::LimitPoint
    } else {
        Verdict::Inconclusive
    }
}

/// Fit of `log(block RMS)` against `log(block center)` over the deep tail;
/// returns `p` with `|psi_j| ~ j^{-p}`.
fn decay_exponent(ev: &BlockEvidence) -> f64 {
    let skip = 3.min(ev.ends.len().saturating_sub(4));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lo = 0usize;
    for (k, &hi) in ev.ends.iter().enumerate() {
        if k >= skip && ev.log_sums[k].is_finite() {
            let center = 0.5 * (lo as f64 + hi as f64);
            let rms_log = 0.5 * (ev.log_sums[k] - ((hi - lo) as f64).ln());
            xs.push(center.ln());
            ys.push(rms_log);
        }
        lo = hi;
    }
    if xs.len() < 3 {
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    -slope
}

/// Classify essential self-adjointness of the infinite operator family of
/// `spec` (its `dim` is ignored). Probes at `z = +i` and `z = -i` must agree
/// and the verdict must be stable when the depth is halved; otherwise the
/// result is inconclusive with a diagnostic note.
pub fn classify(spec: &TruncationSpec, depth: usize) -> Result<SaClassification> {
    let plus = deficiency_solution(spec, Complex64::new(0.0, 1.0), depth)?;
    let minus = deficiency_solution(spec, Complex64::new(0.0, -1.0), depth)?;

    let ev_plus = block_evidence(&plus.log_abs, depth);
    let ev_minus = block_evidence(&minus.log_abs, depth);
    let nb = ev_plus.log_sums.len();
    let v_plus = verdict_from_blocks(&ev_plus.log_sums, nb);
    let v_minus = verdict_from_blocks(&ev_minus.log_sums, ev_minus.log_sums.len());
    let v_half = verdict_from_blocks(&ev_plus.log_sums, nb - 1);

    let mut note = None;
    let verdict = if v_plus != v_minus {
        note = Some(format!(
            "probes disagree: z=+i gives {:?}, z=-i gives {:?}",
            v_plus, v_minus
        ));
        Verdict::Inconclusive
    } else if v_plus != v_half && v_half != Verdict::Inconclusive {
        note = Some(format!(
            "verdict unstable under depth halving: {:?} at {} vs {:?} at {}",
            v_plus,
            depth,
            v_half,
            depth / 2
        ));
        Verdict::Inconclusive
    } else {
        v_plus
    };

    let mut p = decay_exponent(&ev_plus);
    if verdict == Verdict::LimitPoint && p < 0.0 {
        // strong growth; check the backward minimal solution for a clean
        // dichotomy and report it in the note
        let (_minimal, disagreement) = backward_minimal(spec, plus.z, depth.min(100_000), &plus);
        if disagreement < 1e-6 {
            note.get_or_insert_with(|| {
                format!(
                    "dominant solution grows; backward minimal solution well-conditioned \
                     (tail disagreement {disagreement:.1e})"
                )
            });
        }
    }
    if !p.is_finite() {
        p = 0.0;
    }
    Ok(SaClassification {
        verdict,
        decay_exponent: p,
        tail_norms: ev_plus.tail_norms,
        probe_depth: depth,
        note,
    })
}

/// Classifications across a Kerr-strength grid at the squeezing/Kerr balance
/// point `n = 2h`.
pub fn critical_scan(
    n: u32,
    order: u32,
    strengths: &[f64],
    depth: usize,
) -> Result<Vec<SaClassification>> {
    let h = KerrSpec::new(order, 0.0)?.order.as_u32();
    if n != 2 * h {
        return Err(Error::InvalidSpec(format!(
            "critical scan needs n = 2h, got n={n}, h={h}"
        )));
    }
    for w in strengths.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidSpec(
                "strengths must be strictly increasing".into(),
            ));
        }
    }
    strengths
        .iter()
        .map(|&k| {
            let spec = TruncationSpec::new(n, 2, Some(KerrSpec::new(order, k)?))?;
            classify(&spec, depth)
        })
        .collect()
}

/// The bracketing `(K_limit_circle, K_limit_point)` pair around the verdict
/// flip, if the scan contains one.
pub fn verdict_flip_bracket(
    strengths: &[f64],
    classifications: &[SaClassification],
) -> Option<(f64, f64)> {
    for i in 0..classifications.len().saturating_sub(1) {
        if classifications[i].verdict == Verdict::LimitCircle
            && classifications[i + 1].verdict == Verdict::LimitPoint
        {
            return Some((strengths[i], strengths[i + 1]));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, kerr: Option<KerrSpec>) -> TruncationSpec {
        TruncationSpec::new(n, 2, kerr).unwrap()
    }

    #[test]
    fn probe_rejects_real_z_and_shallow_depth() {
        let s = spec(3, None);
        assert!(deficiency_solution(&s, Complex64::new(1.0, 0.0), 10_000).is_err());
        assert!(deficiency_solution(&s, Complex64::new(0.0, 1.0), 10).is_err());
    }

    #[test]
    fn forward_solution_satisfies_recurrence() {
        let s = spec(3, Some(KerrSpec::new(2, 0.3).unwrap()));
        let z = Complex64::new(0.0, 1.0);
        let sol = deficiency_solution(&s, z, 2000).unwrap();
        for j in 1..50usize {
            let d = kerr_diagonal(3 * j as u64, s.kerr);
            let lhs = coupling(3, j - 1) * sol.value(j - 1)
                + d * sol.value(j)
                + coupling(3, j) * sol.value(j + 1);
            let rhs = z * sol.value(j);
            assert!((lhs - rhs).norm() < 1e-9 * sol.value(j).norm().max(1e-30), "j={j}");
        }
    }

    #[test]
    fn conjugate_probes_have_equal_magnitudes() {
        let s = spec(4, None);
        let a = deficiency_solution(&s, Complex64::new(0.0, 1.0), 5000).unwrap();
        let b = deficiency_solution(&s, Complex64::new(0.0, -1.0), 5000).unwrap();
        for j in (0..5000).step_by(37) {
            assert!((a.log_abs[j] - b.log_abs[j]).abs() < 1e-10 * a.log_abs[j].abs().max(1.0));
        }
    }

    #[test]
    fn kzero_decay_exponent_tracks_n_over_4() {
        for n in 3..=6u32 {
            let c = classify(&spec(n, None), 200_000).unwrap();
            assert_eq!(c.verdict, Verdict::LimitCircle, "n={n}");
            let expect = n as f64 / 4.0;
            assert!(
                (c.decay_exponent - expect).abs() < 0.05,
                "n={n}: p={} expected {expect}",
                c.decay_exponent
            );
        }
    }

    #[test]
    fn low_orders_are_limit_point() {
        for n in [1u32, 2] {
            let c = classify(&spec(n, None), 200_000).unwrap();
            assert_eq!(c.verdict, Verdict::LimitPoint, "n={n}");
        }
    }

    #[test]
    fn kerr_flips_verdicts_per_theory() {
        // n < 2h: essentially self-adjoint
        let c = classify(&spec(3, Some(KerrSpec::new(2, 0.5).unwrap())), 100_000).unwrap();
        assert_eq!(c.verdict, Verdict::LimitPoint);
        // n = 2h: K below/above 2
        let c = classify(&spec(4, Some(KerrSpec::new(2, 1.0).unwrap())), 100_000).unwrap();
        assert_eq!(c.verdict, Verdict::LimitCircle);
        let c = classify(&spec(4, Some(KerrSpec::new(2, 3.0).unwrap())), 100_000).unwrap();
        assert_eq!(c.verdict, Verdict::LimitPoint);
        // n > 2h stays limit circle even with a Kerr term
        let c = classify(&spec(6, Some(KerrSpec::new(2, 5.0).unwrap())), 100_000).unwrap();
        assert_eq!(c.verdict, Verdict::LimitCircle);
    }

    #[test]
    fn critical_scan_brackets_k_equals_two() {
        let ks = [1.0, 1.5, 1.9, 2.1, 2.5, 3.0];
        let cls = critical_scan(4, 2, &ks, 100_000).unwrap();
        let bracket = verdict_flip_bracket(&ks, &cls).unwrap();
        assert_eq!(bracket, (1.9, 2.1));
    }

    #[test]
    fn scan_rejects_wrong_order_or_balance() {
        assert!(critical_scan(6, 3, &[1.0], 10_000).is_err()); // order not in {2,4}
        assert!(critical_scan(3, 2, &[1.0], 10_000).is_err()); // n != 2h
    }

    #[test]
    fn backward_pass_pins_the_minimal_solution_under_dichotomy() {
        // K > 2 at n = 2h: the defining solution grows exponentially while
        // the backward pass recovers a decaying branch, independent of the
        // trial tail
        let s = spec(4, Some(KerrSpec::new(2, 3.0).unwrap()));
        let z = Complex64::new(0.0, 1.0);
        let depth = 20_000;
        let forward = deficiency_solution(&s, z, depth).unwrap();
        assert!(forward.log_abs[depth] > forward.log_abs[depth / 2]);
        let (minimal, disagreement) = backward_minimal(&s, z, depth, &forward);
        assert!(disagreement < 1e-8, "tail disagreement {disagreement:e}");
        assert!(minimal[depth / 4] > minimal[depth / 2]);
    }

    #[test]
    fn tail_norms_monotone_and_saturating() {
        let c = classify(&spec(4, Some(KerrSpec::new(2, 3.0).unwrap())), 100_000).unwrap();
        for w in c.tail_norms.windows(2) {
            assert!(w[1] >= w[0]);
        }
        // exponential growth overflows the partial sums eventually
        assert!(c.tail_norms.last().unwrap().is_infinite());
    }
}
