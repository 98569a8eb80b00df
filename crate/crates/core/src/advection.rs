//! 1D periodic linear advection benchmarks.

use serde::{Deserialize, Serialize};

use crate::engine::{error_norms_with, ErrorNorms, L1Convention, LineSweeper, Scheme};
use crate::error::{Error, Result};
use crate::kernel::{Boundary, CellAverages, UniformGrid1D};
use crate::wpfc::WeightParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `exp(-x²/2s²)`.
    Gaussian { s: f64 },
    /// `(3 + sin 4πx)/4`.
    Sine,
    /// Gaussian pulse, square, triangle and half-ellipse side by side.
    Composite,
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { s } => (-x * x / (2.0 * s * s)).exp(),
            Profile::Sine => (3.0 + (4.0 * std::f64::consts::PI * x).sin()) / 4.0,
            Profile::Composite => composite(x),
        }
    }
}

fn composite(x: f64) -> f64 {
    const DELTA: f64 = 0.005;
    let g = |z: f64| {
        let beta = std::f64::consts::LN_2 / (36.0 * DELTA * DELTA);
        (-beta * (x - z) * (x - z)).exp()
    };
    let e = |a: f64| {
        let alpha = 10.0;
        (1.0 - alpha * alpha * (x - a) * (x - a)).max(0.0).sqrt()
    };
    if (-0.8..=-0.6).contains(&x) {
        let z = -0.7;
        (g(z - DELTA) + g(z + DELTA) + 4.0 * g(z)) / 6.0
    } else if (-0.4..=-0.2).contains(&x) {
        1.0
    } else if (0.0..=0.2).contains(&x) {
        1.0 - (10.0 * (x - 0.1)).abs()
    } else if (0.4..=0.6).contains(&x) {
        let a = 0.5;
        (e(a - DELTA) + e(a + DELTA) + 4.0 * e(a)) / 6.0
    } else {
        0.0
    }
}

/// How initial and reference data are discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Point values at cell centers.
    #[default]
    Point,
    /// Cell means by five-point Gauss–Legendre quadrature.
    CellMean,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

pub fn discretize(grid: &UniformGrid1D, sampling: Sampling, f: impl Fn(f64) -> f64) -> CellAverages {
    match sampling {
        Sampling::Point => CellAverages::from_fn(*grid, f),
        Sampling::CellMean => {
            let h = 0.5 * grid.dx;
            let values = grid
                .centers()
                .map(|c| GL5.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * 0.5)
                .collect();
            CellAverages { values, grid: *grid }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvectionSetup {
    pub profile: Profile,
    pub n_cells: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub velocity: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub params: WeightParams,
    pub sampling: Sampling,
    pub l1: L1Convention,
}

impl AdvectionSetup {
    /// Periodic `[-1, 1]`, unit velocity, CFL 0.4, two crossings.
    pub fn standard(profile: Profile, n_cells: usize, scheme: Scheme) -> Self {
        Self {
            profile,
            n_cells,
            x_min: -1.0,
            x_max: 1.0,
            velocity: 1.0,
            cfl: 0.4,
            t_end: 4.0,
            scheme,
            params: WeightParams::default(),
            sampling: Sampling::Point,
            l1: L1Convention::Mean,
        }
    }

    pub fn gaussian(n_cells: usize, scheme: Scheme) -> Self {
        Self::standard(Profile::Gaussian { s: 1.0 / 16.0 }, n_cells, scheme)
    }

    pub fn sine(n_cells: usize, scheme: Scheme) -> Self {
        Self::standard(Profile::Sine, n_cells, scheme)
    }

    /// 200 cells, ten crossings.
    pub fn composite(scheme: Scheme) -> Self {
        Self { t_end: 20.0, ..Self::standard(Profile::Composite, 200, scheme) }
    }
}

#[derive(Clone, Debug)]
pub struct AdvectionResult {
    pub numeric: CellAverages,
    pub exact: CellAverages,
    pub norms: ErrorNorms,
    pub steps: usize,
    pub min_value: f64,
}

/// Runs to `t_end`, shrinking the last step to land on it exactly.
pub fn run_advection(setup: &AdvectionSetup) -> Result<AdvectionResult> {
    if !(setup.cfl > 0.0) || !setup.t_end.is_finite() || setup.t_end < 0.0 {
        return Err(Error::Config(format!("cfl {} / t_end {}", setup.cfl, setup.t_end)));
    }
    let grid = UniformGrid1D::new(setup.n_cells, setup.x_min, setup.x_max, Boundary::Periodic)?;
    let mut f = discretize(&grid, setup.sampling, |x| setup.profile.eval(x));
    let speed = setup.velocity.abs();
    let dt = if speed > 0.0 { setup.cfl * grid.dx / speed } else { setup.t_end.max(1.0) };

    let mut sweeper = LineSweeper::new();
    let mut t = 0.0;
    let mut steps = 0;
    let mut min_value = f.values.iter().cloned().fold(f64::INFINITY, f64::min);
    while t < setup.t_end {
        let remaining = setup.t_end - t;
        // absorb roundoff so an integer number of steps stays integer
        let h = if remaining < dt * (1.0 + 1e-9) { remaining } else { dt };
        let xi = setup.velocity * h / grid.dx;
        sweeper.sweep(&mut f.values, xi, grid.boundary, setup.scheme, &setup.params);
        t = if h == remaining { setup.t_end } else { t + h };
        steps += 1;
        min_value = f.values.iter().cloned().fold(min_value, f64::min);
    }

    let length = grid.length();
    let shift = setup.velocity * setup.t_end;
    let exact = discretize(&grid, setup.sampling, |x| {
        let y = (x - shift - setup.x_min).rem_euclid(length) + setup.x_min;
        setup.profile.eval(y)
    });
    let norms = error_norms_with(&f, &exact, setup.l1)?;
    Ok(AdvectionResult { numeric: f, exact, norms, steps, min_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn composite_shapes() {
        assert_eq!(composite(-0.3), 1.0);
        assert_eq!(composite(0.1), 1.0);
        assert_relative_eq!(composite(0.5), 1.0, epsilon = 1e-3);
        assert!(composite(-0.7) > 0.99);
        assert_eq!(composite(0.8), 0.0);
    }

    #[test]
    fn cell_mean_of_polynomial_is_exact() {
        let grid = UniformGrid1D::new(8, 0.0, 1.0, Boundary::Periodic).unwrap();
        let f = discretize(&grid, Sampling::CellMean, |x| x.powi(4));
        for (j, v) in f.values.iter().enumerate() {
            let (a, b) = (j as f64 / 8.0, (j + 1) as f64 / 8.0);
            assert_relative_eq!(*v, (b.powi(5) - a.powi(5)) / 5.0 * 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn partial_final_step_lands_on_t_end() {
        let mut s = AdvectionSetup::gaussian(32, Scheme::Linear5);
        s.t_end = 0.1;
        let r = run_advection(&s).unwrap();
        // dt = 0.025
        assert_eq!(r.steps, 4);
        s.t_end = 0.11;
        assert_eq!(run_advection(&s).unwrap().steps, 5);
    }

    #[test]
    fn zero_time_is_exact() {
        let mut s = AdvectionSetup::sine(32, Scheme::Wpfc5);
        s.t_end = 0.0;
        let r = run_advection(&s).unwrap();
        assert_eq!(r.steps, 0);
        assert_eq!(r.norms.l1, 0.0);
    }
}
