//! Command-line front end.
//!
//! Subcommands: `propagate`, `spectrum`, `fit`, `parity`, `sweep`,
//! `probe-sa`, `preset`. Every run writes its outputs through a recorder and
//! finishes with a manifest listing each emitted file and its SHA-256.
//! Options can also come from a flat `KEY=VALUE` config file (`--config`);
//! explicit flags win. The `SQUEEZE_LAB_OUT_DIR` environment variable
//! overrides the output root. Exit codes: 0 success, 2 usage error,
//! 1 computation error.

use crate::error::{Error, Result};
use crate::experiments::{kerr_sweep, parity_experiment, threshold_detect};
use crate::io::{
    parse_spectrum_csv, report_json, resolve_out_root, spectrum_csv, trajectory_csv,
    OutputRecorder, RunManifest,
};
use crate::operators::{build_hamiltonian, dominance_ratio, KerrSpec, TruncationSpec};
use crate::presets;
use crate::propagate::{propagate_vacuum, Method, PropagationConfig};
use crate::sa_probe;
use crate::spectral::{self, fit_power_law, interleaved_fit, DEFAULT_FIT_WINDOW};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "squeeze-lab",
    version,
    about = "Generalized n-photon squeezing in truncated Fock spaces: dynamics, spectra, and self-adjointness probes"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat KEY=VALUE config file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output root directory (SQUEEZE_LAB_OUT_DIR overrides).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Worker threads for sweep jobs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Default, Clone)]
struct ModelOpts {
    /// Squeezing order (photons created per group).
    #[arg(long)]
    n: Option<u32>,

    /// Truncated subspace dimension.
    #[arg(long)]
    dim: Option<usize>,

    /// Kerr order h in (a^dag)^h a^h; 2 or 4.
    #[arg(long)]
    kerr_order: Option<u32>,

    /// Kerr strength (K for order 2, K4 for order 4).
    #[arg(long)]
    kerr: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
struct GridOpts {
    /// Final squeezing parameter.
    #[arg(long)]
    r_max: Option<f64>,

    /// Grid step.
    #[arg(long)]
    dr: Option<f64>,

    /// Propagation method: spectral | chebyshev | powering | auto.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the vacuum state and write the photon-number trajectory CSV.
    Propagate {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        grid: GridOpts,
        /// Output CSV path (relative to the output root).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the spectrum and write `index,eigenvalue` rows.
    Spectrum {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-law fit of mid-spectrum positive eigenvalues.
    Fit {
        #[command(flatten)]
        model: ModelOpts,
        /// Lower fit index (center offset).
        #[arg(long)]
        j_min: Option<usize>,
        /// Upper fit index (center offset).
        #[arg(long)]
        j_max: Option<usize>,
        /// Also fit the interleaved even/odd spectrum pair (dim, dim+1).
        #[arg(long)]
        interleave: bool,
        /// Fit an existing spectrum CSV instead of recomputing.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Even/odd truncation comparison at dims {N, N+1, mN, mN+1}.
    Parity {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        grid: GridOpts,
        /// Use the full-size dim pair (10x) instead of the desk-scale 4x.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kerr-strength sweep with regulation verdicts per strength.
    Sweep {
        #[command(flatten)]
        model: ModelOpts,
        #[command(flatten)]
        grid: GridOpts,
        /// Comma-separated strengths, ascending (e.g. 1e-2,1e-1,1).
        #[arg(long)]
        strengths: Option<String>,
        /// Comma-separated dims (default 1000,1001,4000,4001).
        #[arg(long)]
        dims: Option<String>,
        /// Detect and report the regulation threshold.
        #[arg(long)]
        threshold: bool,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit-point/limit-circle probe of the infinite operator.
    ProbeSa {
        #[command(flatten)]
        model: ModelOpts,
        /// Probe depth (accepts scientific notation, e.g. 1e6).
        #[arg(long)]
        depth: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce one figure's parameter grid (fig1..fig9).
    Preset {
        /// Figure id: fig1..fig9.
        figure: String,
        /// Run the original (large) truncation sizes.
        #[arg(long)]
        full: bool,
        /// Print the planned runs without executing.
        #[arg(long)]
        dry_run: bool,
    },
}

/// Flat KEY=VALUE configuration, lowest precedence.
#[derive(Debug, Default)]
struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigMap::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                msg: "expected KEY=VALUE".to_string(),
            })?;
            map.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        Ok(ConfigMap(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidSpec(format!("config key {key} has unparsable value {raw:?}"))
            }),
        }
    }
}

fn required<T>(flag: Option<T>, cfg: Result<Option<T>>, name: &str) -> Result<T> {
    flag.map(Ok)
        .or_else(|| cfg.transpose())
        .transpose()?
        .ok_or_else(|| Error::InvalidSpec(format!("missing required option --{name}")))
}

fn optional<T>(flag: Option<T>, cfg: Result<Option<T>>, default: T) -> Result<T> {
    Ok(flag.map(Ok).or_else(|| cfg.transpose()).transpose()?.unwrap_or(default))
}

fn kerr_from(model: &ModelOpts, cfg: &ConfigMap) -> Result<Option<KerrSpec>> {
    let order: Option<u32> = match model.kerr_order {
        Some(v) => Some(v),
        None => cfg.get("kerr_order")?,
    };
    let strength: Option<f64> = match model.kerr {
        Some(v) => Some(v),
        None => cfg.get("kerr")?,
    };
    match (order, strength) {
        (None, None) => Ok(None),
        (Some(h), Some(k)) => Ok(Some(KerrSpec::new(h, k)?)),
        (Some(_), None) => Err(Error::InvalidSpec(
            "--kerr-order given without --kerr".into(),
        )),
        (None, Some(_)) => Err(Error::InvalidSpec(
            "--kerr given without --kerr-order".into(),
        )),
    }
}

fn grid_config(grid: &GridOpts, cfg: &ConfigMap) -> Result<PropagationConfig> {
    let r_max = optional(grid.r_max, cfg.get("r_max"), 2.0)?;
    let dr = optional(grid.dr, cfg.get("dr"), 0.01)?;
    let method: String = optional(grid.method.clone(), cfg.get("method"), "auto".into())?;
    PropagationConfig::new(r_max, dr, method.parse::<Method>()?)
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidSpec(format!("bad {what} entry {s:?}")))
        })
        .collect()
}

/// Entry point used by `main`; returns the process exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors, 0 for --help/--version
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = ConfigMap::load(cli.config.as_deref())?;
    let root = resolve_out_root(cli.out_dir.as_deref());
    let mut rec = OutputRecorder::new(&root);
    match &cli.command {
        Command::Propagate { model, grid, out } => {
            let n = required(model.n, cfg.get("n"), "n")?;
            let dim = required(model.dim, cfg.get("dim"), "dim")?;
            let kerr = kerr_from(model, &cfg)?;
            let pcfg = grid_config(grid, &cfg)?;
            let out = optional(out.clone(), cfg.get("out"), PathBuf::from("traj.csv"))?;

            let mut manifest = RunManifest::start("propagate");
            record_model(&mut manifest, n, Some(dim), &kerr);
            manifest.param("r_max", pcfg.r_max);
            manifest.param("dr", pcfg.dr);
            manifest.param("method", format!("{:?}", pcfg.method).to_lowercase());

            let spec = TruncationSpec::new(n, dim, kerr)?;
            let h = build_hamiltonian(&spec);
            let traj = propagate_vacuum(&h, &spec, &pcfg)?;
            rec.write(&out, trajectory_csv(&traj).as_bytes())?;
            finish(manifest, &mut rec, &out)
        }
        Command::Spectrum { model, out } => {
            let n = required(model.n, cfg.get("n"), "n")?;
            let dim = required(model.dim, cfg.get("dim"), "dim")?;
            let kerr = kerr_from(model, &cfg)?;
            let out = optional(out.clone(), cfg.get("out"), PathBuf::from("spectrum.csv"))?;

            let mut manifest = RunManifest::start("spectrum");
            record_model(&mut manifest, n, Some(dim), &kerr);

            let spec = TruncationSpec::new(n, dim, kerr)?;
            let h = build_hamiltonian(&spec);
            let s = spectral::spectrum(&h, false)?;
            rec.write(&out, spectrum_csv(&s).as_bytes())?;
            finish(manifest, &mut rec, &out)
        }
        Command::Fit {
            model,
            j_min,
            j_max,
            interleave,
            input,
            out,
        } => {
            let (j_min, j_max) = (
                optional(*j_min, cfg.get("j_min"), DEFAULT_FIT_WINDOW.0)?,
                optional(*j_max, cfg.get("j_max"), DEFAULT_FIT_WINDOW.1)?,
            );
            let out = optional(out.clone(), cfg.get("out"), PathBuf::from("fit.json"))?;
            let mut manifest = RunManifest::start("fit");
            manifest.param("j_min", j_min);
            manifest.param("j_max", j_max);

            let fit_report = if let Some(input) = input {
                let text = std::fs::read_to_string(input)
                    .map_err(|e| Error::io(format!("reading {}", input.display()), e))?;
                let eigenvalues = parse_spectrum_csv(&text, &input.display().to_string())?;
                let s = spectral::SpectrumResult::from_eigenvalues(eigenvalues);
                vec![("input".to_string(), fit_power_law(&s, j_min, j_max)?)]
            } else {
                let n = required(model.n, cfg.get("n"), "n")?;
                let dim = required(model.dim, cfg.get("dim"), "dim")?;
                record_model(&mut manifest, n, Some(dim), &None);
                let make = |d: usize| -> Result<spectral::SpectrumResult> {
                    let spec = TruncationSpec::new(n, d, None)?;
                    spectral::spectrum(&build_hamiltonian(&spec), false)
                };
                let s = make(dim)?;
                let mut fits = vec![(format!("dim{dim}"), fit_power_law(&s, j_min, j_max)?)];
                if *interleave {
                    if dim % 2 != 0 {
                        return Err(Error::InvalidSpec(
                            "--interleave needs an even --dim (pairs dim with dim+1)".into(),
                        ));
                    }
                    let odd = make(dim + 1)?;
                    fits.push((
                        format!("dim{}", dim + 1),
                        fit_power_law(&odd, j_min, j_max)?,
                    ));
                    fits.push((
                        "interleaved".to_string(),
                        interleaved_fit(&s, &odd, j_min, j_max)?,
                    ));
                }
                fits
            };
            rec.write(&out, report_json("power_law_fit", &fit_report).as_bytes())?;
            finish(manifest, &mut rec, &out)
        }
        Command::Parity {
            model,
            grid,
            full,
            out,
        } => {
            let n = required(model.n, cfg.get("n"), "n")?;
            let base = optional(model.dim, cfg.get("dim"), 1000)?;
            let kerr = kerr_from(model, &cfg)?;
            let pcfg = grid_config(grid, &cfg)?;
            let out = optional(out.clone(), cfg.get("out"), PathBuf::from("parity.json"))?;
            let multiplier = if *full { 10 } else { 4 };

            let mut manifest = RunManifest::start("parity");
            record_model(&mut manifest, n, Some(base), &kerr);
            manifest.param("multiplier", multiplier);

            let rep = parity_experiment(n, base, multiplier, kerr, &pcfg)?;
            for (i, traj) in rep.trajectories.iter().enumerate() {
                rec.write(
                    format!("parity_n{}_dim{}.csv", n, rep.dims[i]),
                    trajectory_csv(traj).as_bytes(),
                )?;
            }
            rec.write(&out, report_json("parity", &rep).as_bytes())?;
            finish(manifest, &mut rec, &out)
        }
        Command::Sweep {
            model,
            grid,
            strengths,
            dims,
            threshold,
            full,
            out,
        } => {
            let n = required(model.n, cfg.get("n"), "n")?;
            let order = required(model.kerr_order, cfg.get("kerr_order"), "kerr-order")?;
            let strengths_raw: String = required(strengths.clone(), cfg.get("strengths"), "strengths")?;
            let strengths = parse_list::<f64>(&strengths_raw, "strength")?;
            let default_dims = if *full {
                "1000,1001,10000,10001"
            } else {
                "1000,1001,4000,4001"
            };
            let dims_raw: String = optional(dims.clone(), cfg.get("dims"), default_dims.into())?;
            let dims = parse_list::<usize>(&dims_raw, "dim")?;
            let pcfg = grid_config(grid, &cfg)?;
            let out = optional(out.clone(), cfg.get("out"), PathBuf::from("sweep.json"))?;

            let mut manifest = RunManifest::start("sweep");
            record_model(&mut manifest, n, None, &None);
            manifest.param("kerr_order", order);
            manifest.param("strengths", &strengths_raw);
            manifest.param("dims", &dims_raw);

            let rep = kerr_sweep(n, order, &strengths, &dims, &pcfg)?;
            for (s, row) in rep.trajectories.iter().enumerate() {
                for (d, traj) in row.iter().enumerate() {
                    rec.write(
                        format!("sweep_K{:e}_dim{}.csv", strengths[s], dims[d]),
                        trajectory_csv(traj).as_bytes(),
                    )?;
                }
            }
            rec.write(&out, report_json("kerr_sweep", &rep).as_bytes())?;
            if *threshold {
                let th = threshold_detect(&rep)?;
                println!(
                    "threshold bracket ({}, {}), midpoint {}, dominance estimate {}",
                    th.bracket.0, th.bracket.1, th.midpoint, th.analytic_estimate
                );
                rec.write("threshold.json", report_json("threshold", &th).as_bytes())?;
            }
            finish(manifest, &mut rec, &out)
        }
        Command::ProbeSa { model, depth, out } => {
            let n = required(model.n, cfg.get("n"), "n")?;
            let kerr = kerr_from(model, &cfg)?;
            let depth_raw: String = optional(depth.clone(), cfg.get("depth"), "1e6".into())?;
            let depth = depth_raw
                .parse::<f64>()
                .ok()
                .filter(|d| d.is_finite() && *d >= 1.0)
                .map(|d| d as usize)
                .ok_or_else(|| Error::InvalidSpec(format!("bad --depth {depth_raw:?}")))?;

            let mut manifest = RunManifest::start("probe-sa");
            record_model(&mut manifest, n, None, &kerr);
            manifest.param("depth", depth);

            let spec = TruncationSpec::new(n, 2, kerr)?;
            let cls = sa_probe::classify(&spec, depth)?;
            println!("{}", cls.verdict.describe());
            println!(
                "decay exponent {:.4}; probe depth {}; tail norms at geometric depths: {:?}",
                cls.decay_exponent, cls.probe_depth, cls.tail_norms
            );
            if let Some(note) = &cls.note {
                println!("note: {note}");
            }
            if let Some(kerr) = kerr {
                let dom = dominance_ratio(&TruncationSpec::new(n, 1000, Some(kerr))?, )?;
                println!("dominance ratio at dim 1000: {dom:.4}");
            }
            if let Some(out) = out {
                rec.write(out, report_json("sa_classification", &cls).as_bytes())?;
                return finish(manifest, &mut rec, out);
            }
            finish(manifest, &mut rec, Path::new("probe-sa"))
        }
        Command::Preset {
            figure,
            full,
            dry_run,
        } => {
            let runs = presets::plan(figure, *full)?;
            if *dry_run {
                for r in &runs {
                    println!("{r}");
                }
                return Ok(());
            }
            let mut manifest = RunManifest::start("preset");
            manifest.param("figure", figure);
            manifest.param("full", full);
            manifest.param("planned_runs", runs.len());
            presets::execute(figure, *full, &mut rec)?;
            manifest.finish(&mut rec, &format!("{figure}/manifest.json"))?;
            Ok(())
        }
    }
}

fn record_model(manifest: &mut RunManifest, n: u32, dim: Option<usize>, kerr: &Option<KerrSpec>) {
    manifest.param("n", n);
    if let Some(dim) = dim {
        manifest.param("dim", dim);
    }
    if let Some(k) = kerr {
        manifest.param("kerr_order", k.order.as_u32());
        manifest.param("kerr", k.strength);
    }
}

fn finish(manifest: RunManifest, rec: &mut OutputRecorder, out: &Path) -> Result<()> {
    let stem = out.to_string_lossy();
    manifest.finish(rec, &format!("{stem}.manifest.json"))?;
    Ok(())
}
