//! Experiment driver behind the `wpfc` binary.

mod config;

pub use config::{parse_config, Experiment, ExperimentConfig, PartialConfig, SnapshotFormat};

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::advection::{run_advection, AdvectionSetup};
use crate::dispersion::{self, DispersionPoint};
use crate::engine::Scheme;
use crate::error::{Error, Result};
use crate::rotation::{run_rotation, write_rotation_csv, RotationResult, RotationSetup};
use crate::vlasov::{self, Problem, VlasovRun, VlasovSetup};

/// `log(e_{i-1}/e_i) / log(N_i/N_{i-1})` for consecutive pairs.
pub fn convergence_order(errors: &[f64], resolutions: &[usize]) -> Result<Vec<f64>> {
    if errors.len() != resolutions.len() || errors.len() < 2 {
        return Err(Error::Config(format!(
            "need matched lists of at least two entries, got {} errors and {} resolutions",
            errors.len(),
            resolutions.len()
        )));
    }
    if let Some(&bad) = errors.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::NonPositiveError(bad));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("resolutions must increase: {resolutions:?}")));
    }
    Ok(errors
        .windows(2)
        .zip(resolutions.windows(2))
        .map(|(e, n)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect())
}

/// Files written and a printable summary.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub table: String,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    fs::create_dir_all(&cfg.out)?;
    let body = || match cfg.experiment {
        Experiment::Advect1dGaussian | Experiment::Advect1dSine => run_convergence(cfg),
        Experiment::Advect1dComposite => run_composite(cfg),
        Experiment::Rotation3d => run_rotation_sweep(cfg),
        Experiment::Dispersion => run_dispersion(cfg),
        Experiment::TwoStream | Experiment::BumpOnTail | Experiment::Landau => run_plasma(cfg),
    };
    match cfg.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}

fn csv_file(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

fn order_cell(o: Option<f64>) -> String {
    o.map_or_else(|| "-".into(), |o| format!("{o:.2}"))
}

#[derive(Serialize)]
struct ConvergenceRow {
    scheme: &'static str,
    n: usize,
    #[serde(rename = "L1")]
    l1: f64,
    #[serde(rename = "L1_order")]
    l1_order: Option<f64>,
    #[serde(rename = "Linf")]
    linf: f64,
    #[serde(rename = "Linf_order")]
    linf_order: Option<f64>,
    steps: usize,
    min_value: f64,
}

fn advection_setup(cfg: &ExperimentConfig, n: usize, scheme: Scheme) -> AdvectionSetup {
    let mut s = match cfg.experiment {
        Experiment::Advect1dGaussian => AdvectionSetup::gaussian(n, scheme),
        Experiment::Advect1dSine => AdvectionSetup::sine(n, scheme),
        _ => AdvectionSetup { n_cells: n, ..AdvectionSetup::composite(scheme) },
    };
    s.params = cfg.params;
    if let Some(t) = cfg.t_end {
        s.t_end = t;
    }
    s
}

fn run_convergence(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let path = cfg.out.join(format!("{}.csv", cfg.experiment));
    let mut w = csv_file(&path)?;
    let mut table = format!("{:<14} {:>5} {:>11} {:>6} {:>11} {:>6}\n", "scheme", "N", "L1", "order", "Linf", "order");
    for &scheme in &cfg.schemes {
        let mut prev: Option<(usize, f64, f64)> = None;
        for &n in &cfg.resolutions {
            let r = run_advection(&advection_setup(cfg, n, scheme))?;
            let (l1, linf) = (r.norms.l1, r.norms.linf);
            let orders = prev.and_then(|(pn, pl1, plinf)| {
                let a = convergence_order(&[pl1, l1], &[pn, n]).ok()?;
                let b = convergence_order(&[plinf, linf], &[pn, n]).ok()?;
                Some((a[0], b[0]))
            });
            w.serialize(ConvergenceRow {
                scheme: scheme.name(),
                n,
                l1,
                l1_order: orders.map(|o| o.0),
                linf,
                linf_order: orders.map(|o| o.1),
                steps: r.steps,
                min_value: r.min_value,
            })?;
            w.flush()?;
            let _ = writeln!(
                table,
                "{:<14} {:>5} {:>11.3e} {:>6} {:>11.3e} {:>6}",
                scheme.name(),
                n,
                l1,
                order_cell(orders.map(|o| o.0)),
                linf,
                order_cell(orders.map(|o| o.1))
            );
            prev = Some((n, l1, linf));
        }
    }
    Ok(RunSummary { files: vec![path], table })
}

#[derive(Serialize)]
struct ProfileRow {
    scheme: &'static str,
    x: f64,
    numeric: f64,
    exact: f64,
}

fn run_composite(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let path = cfg.out.join("advect1d_composite.csv");
    let profile_path = cfg.out.join("advect1d_composite_profile.csv");
    let mut w = csv_file(&path)?;
    let mut wp = csv_file(&profile_path)?;
    let mut table = format!("{:<14} {:>5} {:>11} {:>11} {:>11}\n", "scheme", "N", "L1", "Linf", "min");
    for &scheme in &cfg.schemes {
        for &n in &cfg.resolutions {
            let r = run_advection(&advection_setup(cfg, n, scheme))?;
            w.serialize(ConvergenceRow {
                scheme: scheme.name(),
                n,
                l1: r.norms.l1,
                l1_order: None,
                linf: r.norms.linf,
                linf_order: None,
                steps: r.steps,
                min_value: r.min_value,
            })?;
            let grid = r.numeric.grid;
            for (j, (&a, &b)) in r.numeric.values.iter().zip(&r.exact.values).enumerate() {
                wp.serialize(ProfileRow { scheme: scheme.name(), x: grid.center(j), numeric: a, exact: b })?;
            }
            w.flush()?;
            wp.flush()?;
            let _ = writeln!(
                table,
                "{:<14} {:>5} {:>11.3e} {:>11.3e} {:>11.3e}",
                scheme.name(),
                n,
                r.norms.l1,
                r.norms.linf,
                r.min_value
            );
        }
    }
    Ok(RunSummary { files: vec![path, profile_path], table })
}

fn run_rotation_sweep(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let path = cfg.out.join("rotation3d.csv");
    let mut results: Vec<RotationResult> = Vec::new();
    let mut table = format!(
        "{:<14} {:>5} {:>11} {:>6} {:>11} {:>6} {:>9}\n",
        "scheme", "N", "L1", "order", "Linf", "order", "seconds"
    );
    for &scheme in &cfg.schemes {
        let mut prev: Option<&RotationResult> = None;
        let start = results.len();
        for &n in &cfg.resolutions {
            let mut setup = RotationSetup::new(n, scheme, cfg.dt_rule);
            setup.params = cfg.params;
            let r = run_rotation(&setup)?;
            let orders = prev.and_then(|p| {
                let a = convergence_order(&[p.l1, r.l1], &[p.n, n]).ok()?;
                let b = convergence_order(&[p.linf, r.linf], &[p.n, n]).ok()?;
                Some((a[0], b[0]))
            });
            let _ = writeln!(
                table,
                "{:<14} {:>5} {:>11.3e} {:>6} {:>11.3e} {:>6} {:>9.1}",
                scheme.name(),
                n,
                r.l1,
                order_cell(orders.map(|o| o.0)),
                r.linf,
                order_cell(orders.map(|o| o.1)),
                r.runtime_seconds
            );
            results.push(r);
            // rewrite so that a later failure leaves the finished rows behind
            write_rotation_csv(BufWriter::new(File::create(&path)?), &results)?;
            prev = results[start..].last();
        }
    }
    Ok(RunSummary { files: vec![path], table })
}

/// Largest `k` below which the scan's dissipation error stays under that of
/// the linear fifth-order scheme.
pub fn dissipation_crossover(points: &[DispersionPoint]) -> f64 {
    points
        .iter()
        .find(|p| p.k_star_im.abs() > dispersion::linear5_reference(p.k).k_star_im.abs())
        .map_or(std::f64::consts::PI, |p| p.k)
}

fn run_dispersion(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let path = cfg.out.join("dispersion.csv");
    let file = BufWriter::new(File::create(&path)?);
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    out.write_record(["scheme", "k", "k_star_re", "k_star_im"])?;
    let mut table = format!("{:<16} {:>6} {:>12} {:>10}\n", "scheme", "cells", "max Im k*", "crossover");
    let mut emit = |name: &str, pts: &[DispersionPoint]| -> Result<()> {
        for p in pts {
            out.serialize((name, p.k, p.k_star_re, p.k_star_im))?;
        }
        out.flush()?;
        Ok(())
    };
    for &n in &cfg.resolutions {
        let ks = dispersion::scan_wavenumbers(cfg.scan_points, n);
        for &scheme in &cfg.schemes {
            let pts = dispersion::dispersion_scan(scheme, &ks, n, &cfg.params)?;
            emit(scheme.name(), &pts)?;
            let max_im = pts.iter().map(|p| p.k_star_im).fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(
                table,
                "{:<16} {:>6} {:>12.3e} {:>10.3}",
                scheme.name(),
                n,
                max_im,
                dissipation_crossover(&pts)
            );
        }
        let lin: Vec<_> = ks.iter().map(|&k| dispersion::linear5_reference(k)).collect();
        let up7: Vec<_> = ks.iter().map(|&k| dispersion::seventh_order_reference(k)).collect();
        emit("linear5_symbol", &lin)?;
        emit("upwind7_symbol", &up7)?;
    }
    Ok(RunSummary { files: vec![path], table })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlasmaSummary {
    pub scheme: Scheme,
    pub nv: usize,
    /// `max_t |W(t) - W(0)| / W(0)`.
    pub energy_drift: f64,
    /// `max_t |S(t) - S(0)| / S(0)`.
    pub entropy_change: f64,
    /// `(S(t_end) - S(0)) / S(0)`.
    pub entropy_final_change: f64,
    pub max_gauss_residual: f64,
    pub max_mass_drift: f64,
    pub min_f: f64,
    pub steps: usize,
}

impl PlasmaSummary {
    pub fn of(run: &VlasovRun, scheme: Scheme, nv: usize) -> Self {
        let d0 = run.series[0];
        let rel = |a: f64, b: f64| (a - b) / b;
        let last = run.series.last().copied().unwrap_or(d0);
        Self {
            scheme,
            nv,
            energy_drift: run.series.iter().map(|d| rel(d.energy, d0.energy).abs()).fold(0.0, f64::max),
            entropy_change: run.series.iter().map(|d| rel(d.entropy, d0.entropy).abs()).fold(0.0, f64::max),
            entropy_final_change: rel(last.entropy, d0.entropy),
            max_gauss_residual: run.max_gauss_residual,
            max_mass_drift: run.max_mass_drift,
            min_f: run.min_f,
            steps: run.steps,
        }
    }
}

/// Paper-default Vlasov setup with the config's overrides applied.
pub fn plasma_setup(cfg: &ExperimentConfig, problem: Problem, nv: usize, scheme: Scheme) -> VlasovSetup {
    let mut s = VlasovSetup::new(problem, nv, scheme);
    s.dt = cfg.dt;
    s.step.params = cfg.params;
    s.v_boundary = cfg.v_boundary;
    s.diag_every = cfg.diag_every;
    if let Some(t) = cfg.t_end {
        s.t_end = t;
    }
    if let Some(every) = cfg.snapshot_every {
        let count = (s.t_end / every + 1e-9).floor() as usize;
        s.snapshot_times = (0..=count).map(|i| i as f64 * every).collect();
    }
    s
}

fn run_plasma(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let problem = cfg.experiment.problem().expect("plasma experiment");
    let name = problem.name();
    let summary_path = cfg.out.join(format!("{name}_summary.csv"));
    let mut ws = csv_file(&summary_path)?;
    let mut files = vec![summary_path];
    let mut table = format!(
        "{:<14} {:>5} {:>11} {:>11} {:>11} {:>10} {:>10} {:>10}\n",
        "scheme", "Nv", "energy", "entropy", "S_end", "gauss", "mass", "min f"
    );
    for &scheme in &cfg.schemes {
        for &nv in &cfg.resolutions {
            let setup = plasma_setup(cfg, problem, nv, scheme);
            let run = vlasov::run_vlasov(&setup)?;
            let stem = format!("{name}_{}_nv{nv}", scheme.name());

            let diag = cfg.out.join(format!("{stem}.csv"));
            vlasov::write_diagnostics_csv(BufWriter::new(File::create(&diag)?), &run.series)?;
            let modes = cfg.out.join(format!("{stem}_modes.csv"));
            write_modes_csv(&modes, &run)?;
            files.extend([diag, modes]);
            for snap in &run.snapshots {
                let base = format!("{stem}_t{:08.2}", snap.time);
                let path = match cfg.snapshot_format {
                    SnapshotFormat::Binary => {
                        let p = cfg.out.join(format!("{base}.bin"));
                        vlasov::write_snapshot_bin(&p, &snap.state, snap.time)?;
                        p
                    }
                    SnapshotFormat::Csv => {
                        let p = cfg.out.join(format!("{base}.csv"));
                        vlasov::write_snapshot_csv(BufWriter::new(File::create(&p)?), &snap.state)?;
                        p
                    }
                };
                files.push(path);
            }

            let s = PlasmaSummary::of(&run, scheme, nv);
            ws.serialize(s)?;
            ws.flush()?;
            let _ = writeln!(
                table,
                "{:<14} {:>5} {:>11.3e} {:>11.3e} {:>11.3e} {:>10.1e} {:>10.1e} {:>10.1e}",
                scheme.name(),
                nv,
                s.energy_drift,
                s.entropy_change,
                s.entropy_final_change,
                s.max_gauss_residual,
                s.max_mass_drift,
                s.min_f
            );
        }
    }
    Ok(RunSummary { files, table })
}

fn write_modes_csv(path: &Path, run: &VlasovRun) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(File::create(path)?));
    let count = run.modes.first().map_or(0, Vec::len);
    let header: Vec<String> =
        std::iter::once("time".to_string()).chain((1..=count).map(|k| format!("mode_{k}"))).collect();
    w.write_record(&header)?;
    for (d, m) in run.series.iter().zip(&run.modes) {
        let row: Vec<String> = std::iter::once(d.time).chain(m.iter().copied()).map(|x| x.to_string()).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
