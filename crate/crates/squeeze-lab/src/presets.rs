//! Per-figure reproduction presets.
//!
//! Each preset expands to the parameter grid of one figure panel set and
//! emits one CSV per curve plus JSON reports, all registered in a combined
//! run manifest. Desk-scale dims keep the default suite fast; `full` runs
//! the original sizes (the big-dim trajectory runs take tens of minutes).

use crate::error::{Error, Result};
use crate::experiments::{
    kerr_sweep, oscillation_metrics, parity_experiment, threshold_detect, variable_k_panel,
};
use crate::io::{report_json, spectrum_csv, trajectory_csv, OutputRecorder};
use crate::operators::{build_hamiltonian, TruncationSpec};
use crate::propagate::{Method, PropagationConfig};
use crate::spectral::{
    fit_power_law, interleaved_fit, largest_eigenvalue_scaling, smallest_positive_extrapolation,
    spectrum, DEFAULT_FIT_WINDOW,
};
use crate::tridiag;
use serde::Serialize;

pub const ALL_FIGURES: [&str; 9] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
];

/// Scale of the second dim pair in parity-style runs.
fn pair_multiplier(full: bool) -> usize {
    if full {
        10
    } else {
        4
    }
}

fn sweep_dims(full: bool) -> Vec<usize> {
    let m = pair_multiplier(full);
    vec![1000, 1001, 1000 * m, 1000 * m + 1]
}

fn even_dim_track(full: bool) -> Vec<usize> {
    let mut dims = vec![200, 400, 600, 800, 1200, 1600, 2400, 3200];
    if full {
        dims.extend([4800, 6400, 9600]);
    }
    dims
}

fn scaling_dims(full: bool) -> Vec<usize> {
    let mut dims = vec![200, 400, 800, 1600, 3200];
    if full {
        dims.push(6400);
    }
    dims
}

fn traj_cfg(r_max: f64) -> PropagationConfig {
    // spectral throughout: at the full 10^4 sizes the Chebyshev series for
    // n >= 4 would exceed any practical length, and auto would pick it
    let mut cfg = PropagationConfig::new(r_max, 0.01, Method::Spectral).expect("valid grid");
    cfg.record_states = false;
    cfg
}

/// Human-readable plan of a preset, for `--dry-run` style introspection.
pub fn plan(figure: &str, full: bool) -> Result<Vec<String>> {
    let mut runs = Vec::new();
    match figure {
        "fig1" => {
            for n in 3..=6u32 {
                for dim in sweep_dims(full) {
                    runs.push(format!("trajectory n={n} dim={dim} r in [0,2], K=0"));
                }
            }
        }
        "fig2" => {
            for n in 1..=4u32 {
                for dim in [1000usize, 1001] {
                    runs.push(format!("spectrum n={n} dim={dim}"));
                }
                runs.push(format!("power-law fits n={n} (even, odd, interleaved)"));
            }
        }
        "fig3" => runs.push("kerr sweep n=3 order=2 K in {1e-2,1e-1,1,10}".into()),
        "fig4" => runs.push("kerr sweep n=3 order=4 K4 in {1e-8,1e-7,1e-6,1e-5}".into()),
        "fig5" => runs.push("kerr sweep n=4 order=2 K in {1.5,1.9,2.0,2.1,2.5} + threshold".into()),
        "fig6" => {
            runs.push("variable-K panels: (n=3,h=2) (n=3,h=4) (n=4,h=4) (n=4,h=2)".into());
        }
        "fig7" => {
            for n in 1..=4u32 {
                runs.push(format!("smallest positive eigenvalue vs dim, n={n} + extrapolation"));
            }
        }
        "fig8" => {
            for n in 1..=4u32 {
                runs.push(format!("large-eigenvalue scaling n={n}"));
            }
        }
        "fig9" => {
            for n in 1..=4u32 {
                runs.push(format!("ten smallest positive eigenvalues vs dim, n={n}"));
            }
        }
        other => return Err(Error::UnknownFigure(other.to_string())),
    }
    Ok(runs)
}

/// Execute a preset, emitting files under `<figure>/` in the recorder root.
pub fn execute(figure: &str, full: bool, rec: &mut OutputRecorder) -> Result<()> {
    match figure {
        "fig1" => fig1(full, rec),
        "fig2" => fig2(rec),
        "fig3" => kerr_figure(rec, "fig3", 3, 2, &[1e-2, 1e-1, 1.0, 10.0], full, false),
        "fig4" => kerr_figure(rec, "fig4", 3, 4, &[1e-8, 1e-7, 1e-6, 1e-5], full, false),
        "fig5" => kerr_figure(rec, "fig5", 4, 2, &[1.5, 1.9, 2.0, 2.1, 2.5], full, true),
        "fig6" => fig6(rec),
        "fig7" => fig7(full, rec),
        "fig8" => fig8(full, rec),
        "fig9" => fig9(full, rec),
        other => Err(Error::UnknownFigure(other.to_string())),
    }
}

fn fig1(full: bool, rec: &mut OutputRecorder) -> Result<()> {
    #[derive(Serialize)]
    struct Panel {
        n: u32,
        dims: [usize; 4],
        max_photon: [f64; 4],
        even_even: f64,
        odd_odd: f64,
        even_odd: f64,
    }
    let mut panels = Vec::new();
    for n in 3..=6u32 {
        let rep = parity_experiment(n, 1000, pair_multiplier(full), None, &traj_cfg(2.0))?;
        for (i, traj) in rep.trajectories.iter().enumerate() {
            rec.write(
                format!("fig1/traj_n{}_dim{}.csv", n, rep.dims[i]),
                trajectory_csv(traj).as_bytes(),
            )?;
        }
        panels.push(Panel {
            n,
            dims: rep.dims,
            max_photon: rep.max_photon,
            even_even: rep.even_even,
            odd_odd: rep.odd_odd,
            even_odd: rep.even_odd,
        });
    }
    rec.write(
        "fig1/parity_report.json",
        report_json("parity_panels", &panels).as_bytes(),
    )?;
    Ok(())
}

fn fig2(rec: &mut OutputRecorder) -> Result<()> {
    #[derive(Serialize)]
    struct Fits {
        n: u32,
        window: (usize, usize),
        even: crate::spectral::PowerLawFit,
        odd: crate::spectral::PowerLawFit,
        interleaved: crate::spectral::PowerLawFit,
    }
    let (j_min, j_max) = DEFAULT_FIT_WINDOW;
    let mut fits = Vec::new();
    for n in 1..=4u32 {
        let mut spectra = Vec::new();
        for dim in [1000usize, 1001] {
            let spec = TruncationSpec::new(n, dim, None)?;
            let h = build_hamiltonian(&spec);
            let s = spectrum(&h, false)?;
            rec.write(
                format!("fig2/spectrum_n{n}_dim{dim}.csv"),
                spectrum_csv(&s).as_bytes(),
            )?;
            spectra.push(s);
        }
        fits.push(Fits {
            n,
            window: (j_min, j_max),
            even: fit_power_law(&spectra[0], j_min, j_max)?,
            odd: fit_power_law(&spectra[1], j_min, j_max)?,
            interleaved: interleaved_fit(&spectra[0], &spectra[1], j_min, j_max)?,
        });
    }
    rec.write("fig2/fits.json", report_json("power_law_fits", &fits).as_bytes())?;
    Ok(())
}

fn kerr_figure(
    rec: &mut OutputRecorder,
    name: &str,
    n: u32,
    order: u32,
    strengths: &[f64],
    full: bool,
    with_threshold: bool,
) -> Result<()> {
    let dims = sweep_dims(full);
    let report = kerr_sweep(n, order, strengths, &dims, &traj_cfg(2.0))?;
    for (s, row) in report.trajectories.iter().enumerate() {
        for (d, traj) in row.iter().enumerate() {
            rec.write(
                format!(
                    "{name}/traj_K{}_dim{}.csv",
                    format_strength(strengths[s]),
                    dims[d]
                ),
                trajectory_csv(traj).as_bytes(),
            )?;
        }
    }
    rec.write(
        format!("{name}/sweep_report.json"),
        report_json("kerr_sweep", &report).as_bytes(),
    )?;
    if with_threshold {
        let th = threshold_detect(&report)?;
        rec.write(
            format!("{name}/threshold.json"),
            report_json("threshold", &th).as_bytes(),
        )?;
    }
    Ok(())
}

fn format_strength(k: f64) -> String {
    format!("{k:e}").replace('-', "m")
}

fn fig6(rec: &mut OutputRecorder) -> Result<()> {
    #[derive(Serialize)]
    struct PanelMetrics {
        n: u32,
        kerr_order: u32,
        strength: f64,
        amplitude: f64,
        first_peak_r: Option<f64>,
    }
    let panels: [(u32, u32, Vec<f64>); 4] = [
        (3, 2, (2..=9).map(|k| k as f64 / 10.0).collect()),
        (3, 4, (2..=9).map(|k| k as f64 * 1e-6).collect()),
        (4, 4, (2..=9).map(|k| k as f64 * 1e-5).collect()),
        (4, 2, (2..=9).map(|k| 2.0 + k as f64 / 10.0).collect()),
    ];
    let mut metrics = Vec::new();
    for (n, order, strengths) in &panels {
        let rep = variable_k_panel(*n, *order, strengths, 1000, &traj_cfg(2.0))?;
        for (s, row) in rep.trajectories.iter().enumerate() {
            rec.write(
                format!(
                    "fig6/traj_n{}_h{}_K{}.csv",
                    n,
                    order,
                    format_strength(strengths[s])
                ),
                trajectory_csv(&row[0]).as_bytes(),
            )?;
            let (amplitude, first_peak_r) = oscillation_metrics(&row[0]);
            metrics.push(PanelMetrics {
                n: *n,
                kerr_order: *order,
                strength: strengths[s],
                amplitude,
                first_peak_r,
            });
        }
    }
    rec.write(
        "fig6/metrics.json",
        report_json("variable_k_metrics", &metrics).as_bytes(),
    )?;
    Ok(())
}

fn fig7(full: bool, rec: &mut OutputRecorder) -> Result<()> {
    let dims = even_dim_track(full);
    let mut reports = Vec::new();
    for n in 1..=4u32 {
        let rep = smallest_positive_extrapolation(n, &dims)?;
        let mut csv = String::from("dim,lambda_min\n");
        for (d, l) in rep.dims.iter().zip(&rep.lambda_min) {
            csv.push_str(&format!("{d},{l}\n"));
        }
        rec.write(format!("fig7/smallest_positive_n{n}.csv"), csv.as_bytes())?;
        reports.push((n, rep));
    }
    rec.write(
        "fig7/extrapolation.json",
        report_json("smallest_positive_extrapolation", &reports).as_bytes(),
    )?;
    Ok(())
}

fn fig8(full: bool, rec: &mut OutputRecorder) -> Result<()> {
    let dims = scaling_dims(full);
    let mut reports = Vec::new();
    for n in 1..=4u32 {
        let rep = largest_eigenvalue_scaling(n, &dims)?;
        reports.push((n, rep));
    }
    rec.write(
        "fig8/scaling.json",
        report_json("large_eigenvalue_scaling", &reports).as_bytes(),
    )?;
    Ok(())
}

fn fig9(full: bool, rec: &mut OutputRecorder) -> Result<()> {
    let dims = even_dim_track(full);
    for n in 1..=4u32 {
        let mut csv = String::from("dim");
        for k in 1..=10 {
            csv.push_str(&format!(",lambda_{k}"));
        }
        csv.push('\n');
        for &dim in &dims {
            let spec = TruncationSpec::new(n, dim, None)?;
            let h = build_hamiltonian(&spec);
            csv.push_str(&format!("{dim}"));
            // smallest positive eigenvalues sit at indices dim/2 .. in the
            // symmetric ascending spectrum
            for k in 0..10 {
                let lam = tridiag::eigenvalue_by_index(&h.diag, &h.offdiag, dim / 2 + k);
                csv.push_str(&format!(",{lam}"));
            }
            csv.push('\n');
        }
        rec.write(format!("fig9/ten_smallest_n{n}.csv"), csv.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_exist_for_all_figures() {
        for fig in ALL_FIGURES {
            let p = plan(fig, false).unwrap();
            assert!(!p.is_empty(), "{fig}");
        }
        assert!(matches!(
            plan("fig10", false),
            Err(Error::UnknownFigure(_))
        ));
    }

    #[test]
    fn fig2_plan_counts_runs_and_fits() {
        let p = plan("fig2", false).unwrap();
        let spectra = p.iter().filter(|s| s.starts_with("spectrum")).count();
        let fits = p.iter().filter(|s| s.contains("fits")).count();
        assert_eq!(spectra, 8);
        assert_eq!(fits, 4);
    }
}
