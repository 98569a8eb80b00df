//! 1D1V electrostatic Vlasov–Ampère solver.
//!
//! `f(x, v)` is advanced by operator splitting: a velocity sweep of every
//! x-column under the cell-centred field, then a spatial sweep of every
//! v-row. The spatial face transfers give the current, and Ampère's law
//! advances the face-centred field `E_{j+1/2}`. Because the current is built
//! from the very fluxes that move the density, the discrete Gauss law holds
//! at every step once it holds initially.

mod output;
mod problems;

pub use output::{
    read_snapshot_bin, write_diagnostics_csv, write_snapshot_bin, write_snapshot_csv, SnapshotMeta,
};
pub use problems::{init_bump_on_tail, init_landau, init_two_stream, Problem};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{LineSweeper, Scheme};
use crate::error::{Error, Result};
use crate::kernel::{Boundary, UniformGrid1D};
use crate::wpfc::WeightParams;

/// Normalized plasma constants. The defaults describe electrons in units of
/// the plasma frequency and the Debye length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlasmaParams {
    pub q: f64,
    pub m: f64,
    pub v_t: f64,
    pub omega_pe: f64,
    pub d_e: f64,
}

impl Default for PlasmaParams {
    fn default() -> Self {
        Self { q: -1.0, m: 1.0, v_t: 1.0, omega_pe: 1.0, d_e: 1.0 }
    }
}

impl PlasmaParams {
    /// Coupling constant of the field equations (`4π` in Gaussian units),
    /// fixed by `ω_pe² = κ n q² / m` at unit density.
    pub fn kappa(&self) -> f64 {
        self.omega_pe * self.omega_pe * self.m / (self.q * self.q)
    }
}

/// Distribution `f[m * nx + j]` at `(x_j, v_m)`; rows of constant `v` are
/// contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpace {
    pub f: Vec<f64>,
    pub x_grid: UniformGrid1D,
    pub v_grid: UniformGrid1D,
}

impl PhaseSpace {
    pub fn from_fn(x_grid: UniformGrid1D, v_grid: UniformGrid1D, init: impl Fn(f64, f64) -> f64) -> Self {
        let mut f = Vec::with_capacity(x_grid.n_cells * v_grid.n_cells);
        for m in 0..v_grid.n_cells {
            let v = v_grid.center(m);
            f.extend((0..x_grid.n_cells).map(|j| init(x_grid.center(j), v)));
        }
        Self { f, x_grid, v_grid }
    }

    pub fn nx(&self) -> usize {
        self.x_grid.n_cells
    }

    pub fn nv(&self) -> usize {
        self.v_grid.n_cells
    }

    pub fn at(&self, j: usize, m: usize) -> f64 {
        self.f[m * self.nx() + j]
    }

    /// `∫ f dv` per x-cell, summed in row order.
    pub fn density(&self) -> Vec<f64> {
        let nx = self.nx();
        let mut rho = vec![0.0; nx];
        for row in self.f.chunks_exact(nx) {
            for (r, &v) in rho.iter_mut().zip(row) {
                *r += v;
            }
        }
        rho.iter_mut().for_each(|r| *r *= self.v_grid.dx);
        rho
    }

    pub fn mass(&self) -> f64 {
        self.f.iter().sum::<f64>() * self.x_grid.dx * self.v_grid.dx
    }

    pub fn min_value(&self) -> f64 {
        self.f.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Electric field on the faces, `e[j] = E_{j+1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub e: Vec<f64>,
    /// Charge current removed from Ampère's law (a uniform beam drift).
    pub background_current: f64,
    pub ion_density: f64,
}

impl FieldState {
    /// Cell-centred field, the mean of the two adjacent faces.
    pub fn centered(&self) -> Vec<f64> {
        let n = self.e.len();
        (0..n).map(|j| 0.5 * (self.e[(j + n - 1) % n] + self.e[j])).collect()
    }
}

/// Field satisfying the discrete Gauss law for `ps`, with zero mean.
/// `ion_density: None` neutralizes the mean electron density exactly.
pub fn initial_field_from_gauss(
    ps: &PhaseSpace,
    plasma: &PlasmaParams,
    ion_density: Option<f64>,
    background_current: f64,
) -> Result<FieldState> {
    let rho = ps.density();
    let nx = rho.len();
    let mean = rho.iter().sum::<f64>() / nx as f64;
    let ion_density = match ion_density {
        Some(n_i) if (n_i - mean).abs() > 1e-10 * n_i.abs().max(1.0) => {
            return Err(Error::NonNeutral(plasma.q * (mean - n_i)));
        }
        Some(n_i) => n_i,
        None => mean,
    };
    let kappa = plasma.kappa();
    let dx = ps.x_grid.dx;
    let mut e = Vec::with_capacity(nx);
    let mut acc = 0.0;
    for &r in &rho {
        acc += dx * kappa * charge(plasma.q, ion_density, r);
        e.push(acc);
    }
    let shift = e.iter().sum::<f64>() / nx as f64;
    e.iter_mut().for_each(|x| *x -= shift);
    Ok(FieldState { e, background_current, ion_density })
}

fn charge(q: f64, ion_density: f64, rho: f64) -> f64 {
    q * (rho - ion_density)
}

/// `max_j |(E_{j+1/2} - E_{j-1/2})/Δx - κ ρ_charge,j|`.
pub fn gauss_residual(ps: &PhaseSpace, field: &FieldState, plasma: &PlasmaParams) -> f64 {
    let rho = ps.density();
    let n = rho.len();
    let kappa = plasma.kappa();
    (0..n)
        .map(|j| {
            let div = (field.e[j] - field.e[(j + n - 1) % n]) / ps.x_grid.dx;
            (div - kappa * charge(plasma.q, field.ion_density, rho[j])).abs()
        })
        .fold(0.0, f64::max)
}

pub fn field_energy(field: &FieldState, dx: f64, plasma: &PlasmaParams) -> f64 {
    field.e.iter().map(|e| e * e).sum::<f64>() * dx / (2.0 * plasma.kappa())
}

pub fn kinetic_energy(ps: &PhaseSpace, plasma: &PlasmaParams) -> f64 {
    let nx = ps.nx();
    let mut total = 0.0;
    for (m, row) in ps.f.chunks_exact(nx).enumerate() {
        let v = ps.v_grid.center(m);
        total += 0.5 * plasma.m * v * v * row.iter().sum::<f64>();
    }
    total * ps.x_grid.dx * ps.v_grid.dx
}

pub fn diag_energy(ps: &PhaseSpace, field: &FieldState, plasma: &PlasmaParams) -> f64 {
    kinetic_energy(ps, plasma) + field_energy(field, ps.x_grid.dx, plasma)
}

/// `∫∫ f (1 - f) dx dv`.
pub fn diag_entropy(ps: &PhaseSpace) -> f64 {
    ps.f.iter().map(|&f| f * (1.0 - f)).sum::<f64>() * ps.x_grid.dx * ps.v_grid.dx
}

/// Energy of Fourier mode `mode` of the face field, normalized so that the
/// modes sum to the field energy.
pub fn mode_energy(field: &FieldState, dx: f64, plasma: &PlasmaParams, mode: usize) -> f64 {
    let n = field.e.len();
    let (mut c, mut s) = (0.0, 0.0);
    for (j, &e) in field.e.iter().enumerate() {
        let ph = 2.0 * std::f64::consts::PI * (mode * j) as f64 / n as f64;
        c += e * ph.cos();
        s += e * ph.sin();
    }
    let power = (c * c + s * s) / n as f64;
    // ±mode pair, except for the mean and the Nyquist mode
    let pair = if mode == 0 || 2 * mode == n { 1.0 } else { 2.0 };
    pair * power * dx / (2.0 * plasma.kappa())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub time: f64,
    pub energy: f64,
    pub entropy: f64,
    pub mass: f64,
    pub field_energy: f64,
    pub gauss_residual_max: f64,
}

pub fn diagnostics(time: f64, ps: &PhaseSpace, field: &FieldState, plasma: &PlasmaParams) -> Diagnostics {
    let field_energy = field_energy(field, ps.x_grid.dx, plasma);
    Diagnostics {
        time,
        energy: kinetic_energy(ps, plasma) + field_energy,
        entropy: diag_entropy(ps),
        mass: ps.mass(),
        field_energy,
        gauss_residual_max: gauss_residual(ps, field, plasma),
    }
}

/// Scheme choices and boundary treatment of one split step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub scheme_v: Scheme,
    pub scheme_x: Scheme,
    pub params: WeightParams,
    pub plasma: PlasmaParams,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            scheme_v: Scheme::Wpfc5,
            scheme_x: Scheme::Pfc3Compact,
            params: WeightParams::default(),
            plasma: PlasmaParams::default(),
        }
    }
}

/// Scratch buffers reused across steps.
#[derive(Clone, Debug, Default)]
pub struct SplitWorkspace {
    columns: Vec<f64>,
    row_faces: Vec<f64>,
    current: Vec<f64>,
}

impl SplitWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Current `J_{j+1/2}` of the last step, background removed.
    pub fn current(&self) -> &[f64] {
        &self.current
    }
}

fn check_cfl(what: &'static str, value: f64) -> Result<()> {
    if value.abs() > 1.0 {
        return Err(Error::Cfl { what, value: value.abs(), limit: 1.0 });
    }
    Ok(())
}

/// Velocity sweep of every x-column over `dt` under `e_center`.
pub fn velocity_sweep(ps: &mut PhaseSpace, e_center: &[f64], dt: f64, cfg: &StepConfig, ws: &mut SplitWorkspace) -> Result<()> {
    let (nx, nv) = (ps.nx(), ps.nv());
    let scale = cfg.plasma.q * dt / (cfg.plasma.m * ps.v_grid.dx);
    let xi_max = e_center.iter().fold(0.0f64, |a, e| a.max((e * scale).abs()));
    check_cfl("v-displacement", xi_max)?;
    if !xi_max.is_finite() {
        return Err(Error::Cfl { what: "v-displacement", value: xi_max, limit: 1.0 });
    }

    transpose(&ps.f, nv, nx, &mut ws.columns);
    let boundary = ps.v_grid.boundary;
    ws.columns.par_chunks_mut(nv).enumerate().for_each_init(LineSweeper::new, |sw, (j, col)| {
        sw.sweep(col, e_center[j] * scale, boundary, cfg.scheme_v, &cfg.params);
    });
    transpose(&ws.columns, nx, nv, &mut ps.f);
    Ok(())
}

/// Spatial sweep of every v-row over `dt`; leaves the transfer through the
/// right face of each cell, summed over rows, in `ws.current` (as charge
/// current, background not yet removed).
pub fn spatial_sweep(ps: &mut PhaseSpace, dt: f64, cfg: &StepConfig, ws: &mut SplitWorkspace) -> Result<()> {
    let (nx, nv) = (ps.nx(), ps.nv());
    let dx = ps.x_grid.dx;
    let v_edge = ps.v_grid.x_min.abs().max(ps.v_grid.x_max.abs());
    check_cfl("x-displacement", v_edge * dt / dx)?;

    ws.row_faces.resize(nx * nv, 0.0);
    let v_grid = ps.v_grid;
    let boundary = ps.x_grid.boundary;
    ps.f.par_chunks_mut(nx)
        .zip(ws.row_faces.par_chunks_mut(nx))
        .enumerate()
        .for_each_init(LineSweeper::new, |sw, (m, (row, out))| {
            sw.sweep(row, v_grid.center(m) * dt / dx, boundary, cfg.scheme_x, &cfg.params);
            out.copy_from_slice(&sw.faces()[1..=nx]);
        });

    ws.current.clear();
    ws.current.resize(nx, 0.0);
    for row in ws.row_faces.chunks_exact(nx) {
        for (c, &t) in ws.current.iter_mut().zip(row) {
            *c += t;
        }
    }
    let scale = cfg.plasma.q * dx * ps.v_grid.dx / dt;
    ws.current.iter_mut().for_each(|c| *c *= scale);
    Ok(())
}

/// One step: velocity sweep under the current field, spatial sweep, then
/// Ampère's law with the deposited current.
pub fn split_step(
    ps: &mut PhaseSpace,
    field: &mut FieldState,
    dt: f64,
    cfg: &StepConfig,
    ws: &mut SplitWorkspace,
) -> Result<()> {
    velocity_sweep(ps, &field.centered(), dt, cfg, ws)?;
    spatial_sweep(ps, dt, cfg, ws)?;
    let kappa = cfg.plasma.kappa();
    for (e, c) in field.e.iter_mut().zip(ws.current.iter_mut()) {
        *c -= field.background_current;
        *e -= kappa * dt * *c;
    }
    Ok(())
}

fn transpose(src: &[f64], rows: usize, cols: usize, dst: &mut Vec<f64>) {
    dst.resize(rows * cols, 0.0);
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VlasovSetup {
    pub problem: Problem,
    pub nx: usize,
    pub nv: usize,
    pub dt: f64,
    pub t_end: f64,
    pub step: StepConfig,
    /// Velocity box edge boundary.
    pub v_boundary: Boundary,
    /// Record diagnostics every this many steps.
    pub diag_every: usize,
    /// Times at which phase-space snapshots are kept.
    pub snapshot_times: Vec<f64>,
    /// Field modes tracked in the time series, `1..=n`.
    pub tracked_modes: usize,
}

impl VlasovSetup {
    /// Paper-default grid and duration for `problem` at `nv` velocity cells.
    pub fn new(problem: Problem, nv: usize, scheme_v: Scheme) -> Self {
        Self {
            problem,
            nx: problem.default_nx(),
            nv,
            dt: 0.01,
            t_end: problem.default_t_end(),
            step: StepConfig { scheme_v, ..StepConfig::default() },
            v_boundary: Boundary::ZeroFlux,
            diag_every: 10,
            snapshot_times: Vec::new(),
            tracked_modes: 8,
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub state: PhaseSpace,
}

#[derive(Clone, Debug)]
pub struct VlasovRun {
    pub series: Vec<Diagnostics>,
    /// `modes[i][k]` is the energy of field mode `k + 1` at `series[i].time`.
    pub modes: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: PhaseSpace,
    pub final_field: FieldState,
    /// Extremes over every step, not only the recorded ones.
    pub max_gauss_residual: f64,
    pub max_mass_drift: f64,
    pub min_f: f64,
    pub steps: usize,
    pub runtime_seconds: f64,
}

/// Initial state of `setup`, field from the Gauss law.
pub fn initial_state(setup: &VlasovSetup) -> Result<(PhaseSpace, FieldState)> {
    let (mut ps, field) = match setup.problem {
        Problem::TwoStream => init_two_stream(setup.nx, setup.nv, &setup.step.plasma)?,
        Problem::BumpOnTail => init_bump_on_tail(setup.nx, setup.nv, &setup.step.plasma)?,
        Problem::Landau => init_landau(setup.nx, setup.nv, &setup.step.plasma)?,
    };
    ps.v_grid.boundary = setup.v_boundary;
    Ok((ps, field))
}

/// Full run: Gauss-consistent start, a backward half velocity step that puts
/// `f` at `t = -dt/2` in velocity, then `split_step` to `t_end`.
pub fn run_vlasov(setup: &VlasovSetup) -> Result<VlasovRun> {
    if !(setup.dt > 0.0) || setup.diag_every == 0 || setup.nv < 5 || setup.nx < 5 {
        return Err(Error::Config(format!(
            "dt {} / diag_every {} / grid {}x{}",
            setup.dt, setup.diag_every, setup.nx, setup.nv
        )));
    }
    let start = std::time::Instant::now();
    let (mut ps, mut field) = initial_state(setup)?;
    let cfg = setup.step;
    let plasma = cfg.plasma;
    let mut ws = SplitWorkspace::new();

    let d0 = diagnostics(0.0, &ps, &field, &plasma);
    let mut series = vec![d0];
    let mut modes = vec![tracked(&field, ps.x_grid.dx, &plasma, setup.tracked_modes)];
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = setup.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    let mut pending = pending.into_iter().peekable();
    while let Some(&t) = pending.peek() {
        if t > 0.5 * setup.dt {
            break;
        }
        snapshots.push(Snapshot { time: 0.0, state: ps.clone() });
        pending.next();
    }

    velocity_sweep(&mut ps, &field.centered(), -0.5 * setup.dt, &cfg, &mut ws)?;

    let mut max_gauss = d0.gauss_residual_max;
    let mut max_drift: f64 = 0.0;
    let mut min_f = ps.min_value();
    let steps = setup.steps();
    for n in 1..=steps {
        split_step(&mut ps, &mut field, setup.dt, &cfg, &mut ws)?;
        let time = n as f64 * setup.dt;
        let mass = ps.mass();
        if !mass.is_finite() || field.e.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite { step: n });
        }
        max_drift = max_drift.max(((mass - d0.mass) / d0.mass).abs());
        min_f = min_f.min(ps.min_value());
        let record = n % setup.diag_every == 0 || n == steps;
        if record {
            let d = diagnostics(time, &ps, &field, &plasma);
            max_gauss = max_gauss.max(d.gauss_residual_max);
            series.push(d);
            modes.push(tracked(&field, ps.x_grid.dx, &plasma, setup.tracked_modes));
        } else {
            max_gauss = max_gauss.max(gauss_residual(&ps, &field, &plasma));
        }
        while let Some(&t) = pending.peek() {
            if t > time + 0.5 * setup.dt {
                break;
            }
            snapshots.push(Snapshot { time, state: ps.clone() });
            pending.next();
        }
    }

    Ok(VlasovRun {
        series,
        modes,
        snapshots,
        final_state: ps,
        final_field: field,
        max_gauss_residual: max_gauss,
        max_mass_drift: max_drift,
        min_f,
        steps,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn tracked(field: &FieldState, dx: f64, plasma: &PlasmaParams, count: usize) -> Vec<f64> {
    (1..=count).map(|k| mode_energy(field, dx, plasma, k)).collect()
}
