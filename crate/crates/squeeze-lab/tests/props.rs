//! Property tests for structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use squeeze_lab::io::{parse_trajectory_csv, trajectory_csv};
use squeeze_lab::propagate::{photon_number, Trajectory};
use squeeze_lab::tridiag::{eigenvalues, sturm_count};

fn finite_f64() -> impl Strategy<Value = f64> {
    // representative magnitudes incl. subnormal-ish and large values
    prop_oneof![
        -1e12..1e12_f64,
        -1.0..1.0_f64,
        Just(0.0),
        Just(-0.0),
        -1e-300..1e-300_f64,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectory_csv_round_trips_byte_identically(
        rows in prop::collection::vec((finite_f64(), finite_f64(), finite_f64()), 0..40)
    ) {
        let t = Trajectory {
            r_grid: rows.iter().map(|r| r.0).collect(),
            photon_number: rows.iter().map(|r| r.1).collect(),
            norm_drift: rows.iter().map(|r| r.2).collect(),
            states: None,
        };
        let csv = trajectory_csv(&t);
        let parsed = parse_trajectory_csv(&csv, "prop").unwrap();
        prop_assert_eq!(trajectory_csv(&parsed), csv);
    }

    #[test]
    fn photon_number_bounded_by_subspace(
        raw in prop::collection::vec((-1.0..1.0_f64, -1.0..1.0_f64), 1..50),
        n in 1u32..7
    ) {
        let norm: f64 = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let state: Vec<Complex64> =
            raw.iter().map(|&(a, b)| Complex64::new(a / norm, b / norm)).collect();
        let p = photon_number(&state, n).unwrap();
        let cap = n as f64 * (state.len() as f64 - 1.0);
        prop_assert!(p >= 0.0 && p <= cap + 1e-9);
    }

    #[test]
    fn sturm_count_is_monotone_and_complete(
        couplings in prop::collection::vec(0.05..50.0_f64, 1..40),
        probes in prop::collection::vec(-200.0..200.0_f64, 2..6)
    ) {
        let dim = couplings.len() + 1;
        let diag = vec![0.0; dim];
        let mut sorted = probes.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = 0usize;
        for (i, &x) in sorted.iter().enumerate() {
            let c = sturm_count(&diag, &couplings, x);
            if i > 0 {
                prop_assert!(c >= prev);
            }
            prev = c;
        }
        prop_assert_eq!(sturm_count(&diag, &couplings, 1e9), dim);
        prop_assert_eq!(sturm_count(&diag, &couplings, -1e9), 0);
    }

    #[test]
    fn zero_diagonal_spectra_pair_symmetrically(
        couplings in prop::collection::vec(0.1..100.0_f64, 1..60)
    ) {
        let dim = couplings.len() + 1;
        let vals = eigenvalues(&vec![0.0; dim], &couplings).unwrap();
        let scale = vals.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
        for k in 0..dim {
            let defect = (vals[k] + vals[dim - 1 - k]).abs();
            prop_assert!(defect <= 1e-12 * scale,
                "k={} defect {:e} scale {:e}", k, defect, scale);
        }
        if dim % 2 == 1 {
            prop_assert!(vals[(dim - 1) / 2].abs() <= 1e-12 * scale);
        }
    }
}
