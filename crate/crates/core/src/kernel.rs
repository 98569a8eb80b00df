//! Shared value types and numeric primitives.
//!
//! Reconstructions live in the local cell coordinate `x ∈ [-1/2, 1/2]` with the
//! cell center at 0. Every polynomial carries an offset so that its integral
//! over the cell equals the cell average.

use crate::error::{Error, Result};

/// Minimum number of cells; a five-point stencil must fit after ghost filling.
pub const MIN_CELLS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Indices wrap around.
    Periodic,
    /// Ghost cells copy the edge value outward; mass may leave or enter
    /// through the two edge faces.
    Open,
    /// Same ghosts as `Open`, but the two edge faces carry no flux.
    ZeroFlux,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid1D {
    pub n_cells: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub boundary: Boundary,
}

impl UniformGrid1D {
    pub fn new(n_cells: usize, x_min: f64, x_max: f64, boundary: Boundary) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "n_cells = {n_cells} < {MIN_CELLS}"
            )));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "domain [{x_min}, {x_max}] gives dx = {dx}"
            )));
        }
        Ok(Self { n_cells, x_min, x_max, dx, boundary })
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Center of cell `j`.
    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |j| self.center(j))
    }
}

/// Cell-averaged values `f_j` on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAverages {
    pub values: Vec<f64>,
    pub grid: UniformGrid1D,
}

impl CellAverages {
    pub fn new(values: Vec<f64>, grid: UniformGrid1D) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-cell grid",
                values.len(),
                grid.n_cells
            )));
        }
        Ok(Self { values, grid })
    }

    /// Point samples of `f` at the cell centers.
    pub fn from_fn(grid: UniformGrid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.centers().map(f).collect();
        Self { values, grid }
    }

    /// `Σ f_j Δx`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx
    }
}

/// Normalized travel distance of one sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement {
    pub xi: f64,
}

impl Displacement {
    pub fn new(xi: f64) -> Self {
        Self { xi }
    }

    /// +1 for rightward transport, -1 otherwise (`v <= 0` maps to -1).
    #[inline]
    pub fn velocity_sign(&self) -> i8 {
        if self.xi > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Splits `|xi|` into a whole-cell shift and a remainder in `(0, 1]`.
    /// Displacements with `|xi| <= 1` are left whole (shift 0).
    #[inline]
    pub fn split(&self) -> (usize, f64) {
        let a = self.xi.abs();
        if a <= 1.0 {
            (0, a)
        } else {
            let shift = a.ceil() - 1.0;
            (shift as usize, a - shift)
        }
    }
}

/// `F(x) = f_mean - a2/12 + a1 x + a2 x²`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct QuadraticRecon {
    pub f_mean: f64,
    pub a1: f64,
    pub a2: f64,
}

impl QuadraticRecon {
    pub fn new(f_mean: f64, a1: f64, a2: f64) -> Self {
        Self { f_mean, a1, a2 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        eval_quadratic(self, x)
    }

    /// Exact integral of the polynomial over `[lo, hi]`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let c0 = self.f_mean - self.a2 / 12.0;
        let prim = |x: f64| c0 * x + 0.5 * self.a1 * x * x + self.a2 * x * x * x / 3.0;
        prim(hi) - prim(lo)
    }
}

/// `F(x) = f_mean - a2/12 - a4/80 + a1 x + a2 x² + a3 x³ + a4 x⁴`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct QuarticRecon {
    pub f_mean: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl QuarticRecon {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        eval_quartic(self, x)
    }

    /// Exact integral of the polynomial over `[lo, hi]`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let c0 = self.f_mean - self.a2 / 12.0 - self.a4 / 80.0;
        let prim = |x: f64| {
            let x2 = x * x;
            c0 * x
                + self.a1 * x2 / 2.0
                + self.a2 * x2 * x / 3.0
                + self.a3 * x2 * x2 / 4.0
                + self.a4 * x2 * x2 * x / 5.0
        };
        prim(hi) - prim(lo)
    }
}

#[inline(always)]
pub fn eval_quadratic(poly: &QuadraticRecon, x: f64) -> f64 {
    poly.f_mean - poly.a2 / 12.0 + x * (poly.a1 + poly.a2 * x)
}

#[inline(always)]
pub fn eval_quartic(poly: &QuarticRecon, x: f64) -> f64 {
    poly.f_mean - poly.a2 / 12.0 - poly.a4 / 80.0
        + x * (poly.a1 + x * (poly.a2 + x * (poly.a3 + x * poly.a4)))
}

/// Middle value of three.
/// Branch-free min/max for finite data. Unlike `f64::min`, these lower to a
/// plain compare-and-select, which the loop vectorizer accepts.
pub(crate) trait FastMinMax {
    fn fmin(self, o: Self) -> Self;
    fn fmax(self, o: Self) -> Self;
}

impl FastMinMax for f64 {
    #[inline(always)]
    fn fmin(self, o: f64) -> f64 {
        if self < o {
            self
        } else {
            o
        }
    }

    #[inline(always)]
    fn fmax(self, o: f64) -> f64 {
        if self > o {
            self
        } else {
            o
        }
    }
}

#[inline(always)]
pub fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.fmin(b).fmax(a.fmax(b).fmin(c))
}

/// Copies `values` into `ext[ghosts..ghosts + n]` and fills `ghosts` cells on
/// each side according to `boundary`. `ext` is resized as needed.
pub fn fill_ghosts(values: &[f64], ghosts: usize, boundary: Boundary, ext: &mut Vec<f64>) {
    let n = values.len();
    ext.clear();
    ext.resize(n + 2 * ghosts, 0.0);
    ext[ghosts..ghosts + n].copy_from_slice(values);
    match boundary {
        Boundary::Periodic => {
            for g in 0..ghosts {
                // cell index -(g+1) and n+g, wrapped
                ext[ghosts - 1 - g] = values[(n - 1 - g % n) % n];
                ext[ghosts + n + g] = values[g % n];
            }
        }
        Boundary::Open | Boundary::ZeroFlux => {
            let (lo, hi) = (values[0], values[n - 1]);
            ext[..ghosts].fill(lo);
            ext[ghosts + n..].fill(hi);
        }
    }
}
