//! Initial conditions of the electrostatic benchmarks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{initial_field_from_gauss, FieldState, PhaseSpace, PlasmaParams};
use crate::error::Result;
use crate::kernel::{Boundary, UniformGrid1D};

/// Velocity box half-width in thermal velocities.
pub const V_MAX: f64 = 7.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    TwoStream,
    BumpOnTail,
    Landau,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::TwoStream, Problem::BumpOnTail, Problem::Landau];

    pub fn name(&self) -> &'static str {
        match self {
            Problem::TwoStream => "two_stream",
            Problem::BumpOnTail => "bump_on_tail",
            Problem::Landau => "landau",
        }
    }

    pub fn default_nx(&self) -> usize {
        match self {
            Problem::TwoStream | Problem::BumpOnTail => 256,
            Problem::Landau => 128,
        }
    }

    pub fn default_t_end(&self) -> f64 {
        match self {
            Problem::TwoStream => 800.0,
            Problem::BumpOnTail => 450.0,
            Problem::Landau => 100.0,
        }
    }

    /// Domain length in Debye lengths.
    pub fn length(&self) -> f64 {
        match self {
            Problem::TwoStream => 16.0 * PI,
            Problem::BumpOnTail => 40.0 * PI,
            Problem::Landau => 4.0 * PI,
        }
    }

    /// Wavenumber of the seeded perturbation.
    pub fn wavenumber(&self) -> f64 {
        match self {
            Problem::TwoStream | Problem::Landau => 0.5,
            Problem::BumpOnTail => 0.3,
        }
    }

    /// Mode number of the seeded perturbation on the periodic box.
    pub fn seeded_mode(&self) -> usize {
        (self.wavenumber() * self.length() / (2.0 * PI)).round() as usize
    }
}

fn grids(problem: Problem, nx: usize, nv: usize, plasma: &PlasmaParams) -> Result<(UniformGrid1D, UniformGrid1D)> {
    let l = problem.length() * plasma.d_e;
    let v = V_MAX * plasma.v_t;
    Ok((
        UniformGrid1D::new(nx, 0.0, l, Boundary::Periodic)?,
        UniformGrid1D::new(nv, -v, v, Boundary::ZeroFlux)?,
    ))
}

fn gaussian(v: f64, center: f64, width: f64) -> f64 {
    let z = (v - center) / width;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * width)
}

/// `(1 + 0.05 cos kx) (v/v_t)² M(v)` on `[0, 16π]`.
pub fn init_two_stream(nx: usize, nv: usize, plasma: &PlasmaParams) -> Result<(PhaseSpace, FieldState)> {
    let (xg, vg) = grids(Problem::TwoStream, nx, nv, plasma)?;
    let (k, vt) = (Problem::TwoStream.wavenumber() / plasma.d_e, plasma.v_t);
    let ps = PhaseSpace::from_fn(xg, vg, |x, v| {
        (1.0 + 0.05 * (k * x).cos()) * (v / vt) * (v / vt) * gaussian(v, 0.0, vt)
    });
    let field = initial_field_from_gauss(&ps, plasma, None, 0.0)?;
    Ok((ps, field))
}

/// Core density.
pub const BUMP_CORE: f64 = 0.97;
/// Beam density, drift and thermal speed.
pub const BUMP_BEAM: (f64, f64, f64) = (0.03, 4.5, 0.5);

/// Core plus beam with a 0.05 density ripple at `k = 0.3` on `[0, 40π]`. The
/// beam's uniform current is stored for subtraction.
pub fn init_bump_on_tail(nx: usize, nv: usize, plasma: &PlasmaParams) -> Result<(PhaseSpace, FieldState)> {
    let (xg, vg) = grids(Problem::BumpOnTail, nx, nv, plasma)?;
    let (k, vt) = (Problem::BumpOnTail.wavenumber() / plasma.d_e, plasma.v_t);
    let (n_b, v_b, vt_b) = (BUMP_BEAM.0, BUMP_BEAM.1 * vt, BUMP_BEAM.2 * vt);
    let ps = PhaseSpace::from_fn(xg, vg, |x, v| {
        (1.0 + 0.05 * (k * x).cos()) * (BUMP_CORE * gaussian(v, 0.0, vt) + n_b * gaussian(v, v_b, vt_b))
    });
    let field = initial_field_from_gauss(&ps, plasma, None, plasma.q * n_b * v_b)?;
    Ok((ps, field))
}

/// `(1 + 0.5 cos kx) M(v)` on `[0, 4π]`.
pub fn init_landau(nx: usize, nv: usize, plasma: &PlasmaParams) -> Result<(PhaseSpace, FieldState)> {
    let (xg, vg) = grids(Problem::Landau, nx, nv, plasma)?;
    let (k, vt) = (Problem::Landau.wavenumber() / plasma.d_e, plasma.v_t);
    let ps = PhaseSpace::from_fn(xg, vg, |x, v| (1.0 + 0.5 * (k * x).cos()) * gaussian(v, 0.0, vt));
    let field = initial_field_from_gauss(&ps, plasma, None, 0.0)?;
    Ok((ps, field))
}
