//! Experiment-level behavior: sweep monotonicity, dominance calibration,
//! variable-K panel trends, and the full-size parity comparison (ignored by
//! default; run with --ignored).

use squeeze_lab::experiments::{
    agreement_range, kerr_sweep, oscillation_metrics, parity_experiment, variable_k_panel,
};
use squeeze_lab::propagate::{Method, PropagationConfig};

fn cfg() -> PropagationConfig {
    PropagationConfig::new(2.0, 0.01, Method::Spectral).unwrap()
}

#[test]
fn regulated_verdicts_monotone_in_strength() {
    // once a sweep regulates, stronger Kerr keeps it regulated
    let strengths = [0.005, 0.02, 0.08, 0.3, 1.0, 4.0];
    for (n, order) in [(3u32, 2u32), (3, 4)] {
        let scaled: Vec<f64> = if order == 4 {
            strengths.iter().map(|k| k * 1e-4).collect()
        } else {
            strengths.to_vec()
        };
        let rep = kerr_sweep(n, order, &scaled, &[200, 201], &cfg()).unwrap();
        let first_regulated = rep.regulated.iter().position(|&r| r);
        if let Some(first) = first_regulated {
            assert!(
                rep.regulated[first..].iter().all(|&r| r),
                "n={n} order={order}: verdicts {:?}",
                rep.regulated
            );
        }
    }
}

#[test]
fn regulated_configs_sit_above_quarter_dominance() {
    // calibration of the order-of-magnitude rule: regulated => dominance
    // ratio at the smaller dim within a factor 4 of 1
    let rep = kerr_sweep(3, 2, &[0.005, 0.02, 0.08, 0.3, 1.0], &[200, 201], &cfg()).unwrap();
    for (s, &regulated) in rep.regulated.iter().enumerate() {
        if regulated {
            let dom = rep.dominance[s][0];
            assert!(dom >= 0.25, "K={} regulated with dominance {dom}", rep.strengths[s]);
        }
    }
}

#[test]
fn variable_k_panel_trends_for_n4_quadratic() {
    // moving away from the critical point K = 2, amplitude and first-peak
    // location both decrease with K; the first step off criticality
    // (2.2 -> 2.3) still carries the near-critical enhancement, so strict
    // monotonicity is asserted from 2.3 on, with an overall decrease across
    // the whole range
    let strengths: Vec<f64> = (2..=9).map(|k| 2.0 + k as f64 / 10.0).collect();
    let rep = variable_k_panel(4, 2, &strengths, 1000, &cfg()).unwrap();
    let metrics: Vec<(f64, f64)> = rep
        .trajectories
        .iter()
        .map(|row| {
            let (amp, peak) = oscillation_metrics(&row[0]);
            (amp, peak.expect("oscillation has a first peak"))
        })
        .collect();
    for w in metrics[1..].windows(2) {
        assert!(w[1].0 < w[0].0, "amplitudes not decreasing: {metrics:?}");
        assert!(w[1].1 <= w[0].1 + 1e-9, "peaks not advancing: {metrics:?}");
    }
    assert!(metrics.last().unwrap().0 < metrics[0].0);
    assert!(metrics.last().unwrap().1 < metrics[0].1);
}

#[test]
fn detected_thresholds_track_the_dominance_estimate_at_dim_1000() {
    let cfg = cfg();
    // quadratic: estimate (3*1000)^{-1/2} ~ 0.0183; geometric grid, flip
    // within one grid step of the estimate
    let ks = [0.012, 0.018, 0.027, 0.0405, 0.0607];
    let rep = kerr_sweep(3, 2, &ks, &[1000, 1001], &cfg).unwrap();
    let th = squeeze_lab::experiments::threshold_detect(&rep).unwrap();
    assert!(
        th.bracket.0 / 1.5 <= th.analytic_estimate && th.analytic_estimate <= th.bracket.1,
        "quadratic flip {:?} vs estimate {}",
        th.bracket,
        th.analytic_estimate
    );

    // quartic: estimate 4!*(3*1000)^{-5/2} ~ 4.9e-8; flip within a factor 4
    let ks = [1e-8, 3e-8, 1e-7, 3e-7];
    let rep = kerr_sweep(3, 4, &ks, &[1000, 1001], &cfg).unwrap();
    let th = squeeze_lab::experiments::threshold_detect(&rep).unwrap();
    assert!(
        th.bracket.0 <= 4.0 * th.analytic_estimate && th.bracket.1 >= th.analytic_estimate / 4.0,
        "quartic flip {:?} vs estimate {:e}",
        th.bracket,
        th.analytic_estimate
    );
}

#[test]
fn strongly_different_trajectories_across_k_range() {
    // K = 0.2 vs 0.9 at n=3 produce strongly different oscillations
    let strengths = [0.2, 0.9];
    let rep = variable_k_panel(3, 2, &strengths, 1000, &cfg()).unwrap();
    let a = &rep.trajectories[0][0];
    let b = &rep.trajectories[1][0];
    let d = squeeze_lab::propagate::sup_distance(a, b);
    let max = a.max_photon().max(b.max_photon());
    assert!(d > 0.1 * max, "sup distance {d} vs max {max}");
}

#[test]
fn agreement_range_monotone_in_tolerance() {
    let rep = kerr_sweep(3, 2, &[0.01, 0.02], &[200, 201], &cfg()).unwrap();
    let a = &rep.trajectories[0][0];
    let b = &rep.trajectories[0][1];
    let r1 = agreement_range(a, b, 1e-3);
    let r2 = agreement_range(a, b, 1e-1);
    assert!(r1 <= r2);
    assert!(agreement_range(a, a, 1e-12) >= a.r_grid[a.r_grid.len() - 1]);
}

/// Full-size parity comparison (dims 1000/1001 vs 10^4/10^4+1) as in the
/// original panels; takes several minutes of large eigendecompositions.
#[test]
#[ignore]
fn parity_agreement_at_full_scale() {
    for n in [5u32, 6] {
        let rep = parity_experiment(n, 1000, 10, None, &cfg()).unwrap();
        assert!(
            rep.even_even < 0.05 * rep.even_track_max(),
            "n={n}: even-even {} vs max {}",
            rep.even_even,
            rep.even_track_max()
        );
        assert!(
            rep.odd_odd < 0.05 * rep.odd_track_max(),
            "n={n}: odd-odd {} vs max {}",
            rep.odd_odd,
            rep.odd_track_max()
        );
        assert!(rep.even_odd > 0.5 * rep.even_track_max(), "n={n}");
    }
}

/// The borderline-regulated case agrees only up to a finite squeezing
/// parameter at full size (quoted around r = 0.7 for K = 1e-2, n = 3 at
/// dims 10^4/10^4+1); run with --ignored.
#[test]
#[ignore]
fn borderline_regulation_loses_agreement_midway_at_full_scale() {
    let rep = kerr_sweep(3, 2, &[1e-2], &[10_000, 10_001], &cfg()).unwrap();
    let a = &rep.trajectories[0][0];
    let b = &rep.trajectories[0][1];
    let max = a.max_photon().max(b.max_photon());
    let crossing = agreement_range(a, b, 0.01 * max);
    assert!(
        crossing > 0.3 && crossing < 1.2,
        "agreement holds to r = {crossing}, expected to fail near 0.7"
    );
}
