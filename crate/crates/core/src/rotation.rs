//! Solid-body rotation of a 3D Gaussian by dimensional splitting.
//!
//! The rotation velocity `u = r × Ω` has no component along the axis it is
//! differentiated on (`u_x` depends on `y, z` only, and so on), so each sweep
//! is a set of constant-coefficient 1D advections, one per grid line.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{LineSweeper, Scheme};
use crate::error::{Error, Result};
use crate::kernel::{Boundary, UniformGrid1D};
use crate::wpfc::WeightParams;

/// Rotation vector with `|Ω| = 2π`: one revolution per unit time.
pub fn default_omega() -> [f64; 3] {
    [2.0 * PI / 6f64.sqrt(), 2.0 * PI / 3f64.sqrt(), 2.0 * PI / 2f64.sqrt()]
}

pub const GAUSSIAN_WIDTHS: [f64; 3] = [0.06, 0.08, 0.1];

#[derive(Clone, Debug, PartialEq)]
pub struct Field3D {
    pub n: usize,
    /// `values[(ix * n + iy) * n + iz]`.
    pub values: Vec<f64>,
    pub grid: UniformGrid1D,
    pub omega: [f64; 3],
}

impl Field3D {
    pub fn from_fn(n: usize, omega: [f64; 3], f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let grid = UniformGrid1D::new(n, -0.5, 0.5, Boundary::Open)?;
        let c: Vec<f64> = grid.centers().collect();
        let mut values = Vec::with_capacity(n * n * n);
        for &x in &c {
            for &y in &c {
                for &z in &c {
                    values.push(f(x, y, z));
                }
            }
        }
        Ok(Self { n, values, grid, omega })
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    pub fn cell_volume(&self) -> f64 {
        self.grid.dx.powi(3)
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Point samples of `exp(-x²/2sx² - y²/2sy² - z²/2sz²)` at cell centres.
pub fn init_gaussian3d(n: usize) -> Result<Field3D> {
    let [sx, sy, sz] = GAUSSIAN_WIDTHS;
    Field3D::from_fn(n, default_omega(), |x, y, z| {
        (-(x * x) / (2.0 * sx * sx) - (y * y) / (2.0 * sy * sy) - (z * z) / (2.0 * sz * sz)).exp()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    X,
    Y,
    Z,
}

/// Velocity along `axis` for the line through transverse centres `(a, b)`:
/// `(y, z)` for x-lines, `(x, z)` for y-lines, `(x, y)` for z-lines.
#[inline]
fn line_velocity(axis: Axis, omega: &[f64; 3], a: f64, b: f64) -> f64 {
    let [ox, oy, oz] = *omega;
    match axis {
        Axis::X => a * oz - b * oy,
        Axis::Y => b * ox - a * oz,
        Axis::Z => a * oy - b * ox,
    }
}

/// Largest `|u| dt / dx` over all lines of all three sweeps for a full step.
pub fn max_cfl(field: &Field3D, dt: f64) -> f64 {
    let c: Vec<f64> = field.grid.centers().collect();
    let mut m = 0.0f64;
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for &a in &c {
            for &b in &c {
                m = m.max(line_velocity(axis, &field.omega, a, b).abs());
            }
        }
    }
    m * dt / field.grid.dx
}

/// Sweeps every line along `axis` by `h`. Returns the mass that left through
/// the open faces.
fn sweep_axis(field: &mut Field3D, axis: Axis, h: f64, scheme: Scheme, params: &WeightParams) -> f64 {
    let n = field.n;
    let dx = field.grid.dx;
    let boundary = field.grid.boundary;
    let omega = field.omega;
    let centers: Vec<f64> = field.grid.centers().collect();
    let xi_of = |a: usize, b: usize| line_velocity(axis, &omega, centers[a], centers[b]) * h / dx;
    let net_out = |faces: &[f64]| faces[n] - faces[0];

    let outflow: Vec<f64> = match axis {
        Axis::Z => field
            .values
            .par_chunks_mut(n)
            .enumerate()
            .map_init(LineSweeper::new, |sw, (line, v)| {
                sw.sweep(v, xi_of(line / n, line % n), boundary, scheme, params);
                net_out(sw.faces())
            })
            .collect(),
        Axis::Y => field
            .values
            .par_chunks_mut(n * n)
            .enumerate()
            .map_init(
                || (LineSweeper::new(), vec![0.0; n]),
                |(sw, buf), (ix, plane)| {
                    let mut out = 0.0;
                    for iz in 0..n {
                        for iy in 0..n {
                            buf[iy] = plane[iy * n + iz];
                        }
                        sw.sweep(buf, xi_of(ix, iz), boundary, scheme, params);
                        out += net_out(sw.faces());
                        for iy in 0..n {
                            plane[iy * n + iz] = buf[iy];
                        }
                    }
                    out
                },
            )
            .collect(),
        Axis::X => {
            let values = &field.values;
            // slab[ix * n + iz] for one iy
            let slabs: Vec<(Vec<f64>, f64)> = (0..n)
                .into_par_iter()
                .map_init(
                    || (LineSweeper::new(), vec![0.0; n]),
                    |(sw, buf), iy| {
                        let mut slab = vec![0.0; n * n];
                        let mut out = 0.0;
                        for iz in 0..n {
                            for ix in 0..n {
                                buf[ix] = values[(ix * n + iy) * n + iz];
                            }
                            sw.sweep(buf, xi_of(iy, iz), boundary, scheme, params);
                            out += net_out(sw.faces());
                            for ix in 0..n {
                                slab[ix * n + iz] = buf[ix];
                            }
                        }
                        (slab, out)
                    },
                )
                .collect();
            let mut out = Vec::with_capacity(n);
            for (iy, (slab, o)) in slabs.into_iter().enumerate() {
                for ix in 0..n {
                    let dst = (ix * n + iy) * n;
                    field.values[dst..dst + n].copy_from_slice(&slab[ix * n..ix * n + n]);
                }
                out.push(o);
            }
            out
        }
    };
    outflow.iter().sum::<f64>() * dx.powi(3)
}

/// One Strang step `x(dt/2) y(dt/2) z(dt) y(dt/2) x(dt/2)`. Returns the mass
/// that left through the domain boundary.
pub fn rotation_split_step(field: &mut Field3D, dt: f64, scheme: Scheme, params: &WeightParams) -> Result<f64> {
    let cfl = max_cfl(field, dt);
    if cfl > 1.0 {
        return Err(Error::Cfl { what: "rotation line CFL", value: cfl, limit: 1.0 });
    }
    let half = 0.5 * dt;
    let mut out = 0.0;
    for (axis, h) in [(Axis::X, half), (Axis::Y, half), (Axis::Z, dt), (Axis::Y, half), (Axis::X, half)] {
        out += sweep_axis(field, axis, h, scheme, params);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtRule {
    /// `dt = 1/(10 N)`.
    Paper,
    /// `dt ∝ dx^2.5`, equal to the paper step at `N = 32`.
    Refined,
}

impl DtRule {
    pub fn name(&self) -> &'static str {
        match self {
            DtRule::Paper => "paper",
            DtRule::Refined => "refined",
        }
    }

    pub fn nominal_dt(&self, n: usize) -> f64 {
        let base = 1.0 / (10.0 * n as f64);
        match self {
            DtRule::Paper => base,
            DtRule::Refined => (1.0 / 320.0) * (32.0 / n as f64).powf(2.5),
        }
    }
}

/// How "ten rotations" maps to a run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationReading {
    /// Full periods about `Ω`: `T = count · 2π/|Ω|`.
    #[default]
    AxisPeriods,
    /// Periods of the fastest component: `T = count · 2π/max Ω_i`.
    FastestComponent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSetup {
    pub n: usize,
    pub scheme: Scheme,
    pub dt_rule: DtRule,
    pub rotations: f64,
    pub reading: RotationReading,
    pub params: WeightParams,
}

impl RotationSetup {
    pub fn new(n: usize, scheme: Scheme, dt_rule: DtRule) -> Self {
        Self {
            n,
            scheme,
            dt_rule,
            rotations: 10.0,
            reading: RotationReading::AxisPeriods,
            params: WeightParams::default(),
        }
    }

    pub fn end_time(&self, omega: &[f64; 3]) -> f64 {
        let period = match self.reading {
            RotationReading::AxisPeriods => 2.0 * PI / omega.iter().map(|o| o * o).sum::<f64>().sqrt(),
            RotationReading::FastestComponent => 2.0 * PI / omega.iter().cloned().fold(0.0, f64::max),
        };
        self.rotations * period
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationResult {
    pub n: usize,
    pub scheme: Scheme,
    pub dt_rule: DtRule,
    pub dt: f64,
    pub steps: usize,
    pub l1: f64,
    pub linf: f64,
    pub min_value: f64,
    /// `|m_end + outflow - m_0| / m_0`.
    pub mass_balance_error: f64,
    pub runtime_seconds: f64,
}

/// Rotates the Gaussian for the configured time and measures the error
/// against the initial field. The step is shrunk so an integer number of
/// steps lands on the end time.
pub fn run_rotation(setup: &RotationSetup) -> Result<RotationResult> {
    let start = Instant::now();
    let mut field = init_gaussian3d(setup.n)?;
    let initial = field.values.clone();
    let t_end = setup.end_time(&field.omega);
    let nominal = setup.dt_rule.nominal_dt(setup.n);
    let steps = (t_end / nominal * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;

    let m0 = field.mass();
    let mut outflow = 0.0;
    let mut min_value = field.min_value();
    for _ in 0..steps {
        outflow += rotation_split_step(&mut field, dt, setup.scheme, &setup.params)?;
        min_value = min_value.min(field.min_value());
    }
    let (sum, linf) = field
        .values
        .iter()
        .zip(&initial)
        .map(|(a, b)| (a - b).abs())
        .fold((0.0, 0.0f64), |(s, m), e| (s + e, m.max(e)));
    let l1 = sum / field.values.len() as f64;
    Ok(RotationResult {
        n: setup.n,
        scheme: setup.scheme,
        dt_rule: setup.dt_rule,
        dt,
        steps,
        l1,
        linf,
        min_value,
        mass_balance_error: (field.mass() + outflow - m0).abs() / m0,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Serialize)]
struct Row<'a> {
    n: usize,
    scheme: &'a str,
    dt_rule: &'a str,
    #[serde(rename = "L1")]
    l1: f64,
    #[serde(rename = "Linf")]
    linf: f64,
    runtime_seconds: f64,
}

pub fn write_rotation_csv<W: Write>(out: W, results: &[RotationResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(Row {
            n: r.n,
            scheme: r.scheme.name(),
            dt_rule: r.dt_rule.name(),
            l1: r.l1,
            linf: r.linf,
            runtime_seconds: r.runtime_seconds,
        })?;
    }
    w.flush()?;
    Ok(())
}
