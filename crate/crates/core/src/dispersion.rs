//! Approximate dispersion relation of the interface reconstruction.
//!
//! A Fourier mode is fed through the scheme at zero displacement and the
//! resulting interface-value difference is compared with the exact
//! derivative `ik f`. Nonlinear schemes cannot act on complex data, so the
//! real operator is applied to `c + cos` and `c + sin` channels and the two
//! outputs are recombined. The offset cancels in the difference; it must
//! keep the data clear of the limiter's zero floor.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{reconstruct_cell, Scheme};
use crate::error::{Error, Result};
use crate::wpfc::WeightParams;

pub const DEFAULT_SCAN_CELLS: usize = 1024;

/// Channel offset. With 1 the minima sit on the zero floor and get flattened.
pub const CHANNEL_OFFSET: f64 = 2.0;

/// Interface weights of the linear fifth-order scheme at zero displacement,
/// on cells `j-2..=j+2`.
pub const LINEAR5_INTERFACE: [f64; 5] = [2.0 / 60.0, -13.0 / 60.0, 47.0 / 60.0, 27.0 / 60.0, -3.0 / 60.0];

/// Upwind seventh-order interface weights on cells `j-3..=j+3`.
pub const UPWIND7_INTERFACE: [f64; 7] = [
    -3.0 / 420.0,
    25.0 / 420.0,
    -101.0 / 420.0,
    319.0 / 420.0,
    214.0 / 420.0,
    -38.0 / 420.0,
    4.0 / 420.0,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub k_star_re: f64,
    pub k_star_im: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    fn cis(t: f64) -> Self {
        Self::new(t.cos(), t.sin())
    }

    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }

    fn div(self, o: Self) -> Self {
        let d = o.re * o.re + o.im * o.im;
        Self::new((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)
    }

    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

/// `k*` of a linear interface stencil with weights on cells
/// `j - offset ..`, from its Fourier symbol.
fn linear_symbol(k: f64, weights: &[f64], offset: usize) -> DispersionPoint {
    let s = weights.iter().enumerate().fold(C64::default(), |acc, (m, &c)| {
        let e = C64::cis(k * (m as f64 - offset as f64));
        C64::new(acc.re + c * e.re, acc.im + c * e.im)
    });
    // (S - S e^{-ik}) / i
    let z = s.sub(s.mul(C64::cis(-k))).div(C64::new(0.0, 1.0));
    DispersionPoint { k, k_star_re: z.re, k_star_im: z.im }
}

pub fn linear5_reference(k: f64) -> DispersionPoint {
    linear_symbol(k, &LINEAR5_INTERFACE, 2)
}

pub fn seventh_order_reference(k: f64) -> DispersionPoint {
    linear_symbol(k, &UPWIND7_INTERFACE, 3)
}

fn check_k(k: f64, n_cells: usize) -> Result<()> {
    let m = k * n_cells as f64 / (2.0 * PI);
    if !(k > 0.0 && k <= PI * (1.0 + 1e-12)) || (m - m.round()).abs() > 1e-9 {
        return Err(Error::NonCommensurate { k, n_cells });
    }
    Ok(())
}

pub fn modified_wavenumber(scheme: Scheme, k: f64, n_cells: usize, params: &WeightParams) -> Result<DispersionPoint> {
    modified_wavenumber_with(scheme, k, n_cells, 0.0, CHANNEL_OFFSET, params)
}

/// As [`modified_wavenumber`] with the test mode shifted by `phase` and a
/// given channel offset.
pub fn modified_wavenumber_with(
    scheme: Scheme,
    k: f64,
    n_cells: usize,
    phase: f64,
    offset: f64,
    params: &WeightParams,
) -> Result<DispersionPoint> {
    check_k(k, n_cells)?;
    if n_cells < 5 {
        return Err(Error::InvalidGrid(format!("{n_cells} cells")));
    }
    let n = n_cells as isize;
    let cos: Vec<f64> = (0..n).map(|j| offset + (k * j as f64 + phase).cos()).collect();
    let sin: Vec<f64> = (0..n).map(|j| offset + (k * j as f64 + phase).sin()).collect();
    let stencil = |v: &[f64], j: isize| {
        let at = |o: isize| v[(j + o).rem_euclid(n) as usize];
        [at(-2), at(-1), at(0), at(1), at(2)]
    };
    let interface = |j: isize| -> Result<C64> {
        let re = reconstruct_cell(scheme, &stencil(&cos, j), 0.0, 1, params)?.eval(0.5);
        let im = reconstruct_cell(scheme, &stencil(&sin, j), 0.0, 1, params)?.eval(0.5);
        Ok(C64::new(re, im))
    };
    let values = (0..n).map(interface).collect::<Result<Vec<_>>>()?;
    let i = C64::new(0.0, 1.0);
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..n {
        let prev = values[(j - 1).rem_euclid(n) as usize];
        let f = C64::cis(k * j as f64 + phase);
        let z = values[j as usize].sub(prev).div(i.mul(f));
        re += z.re;
        im += z.im;
    }
    Ok(DispersionPoint { k, k_star_re: re / n as f64, k_star_im: im / n as f64 })
}

/// `count` distinct wavenumbers in `(0, π]` that fit a whole number of
/// wavelengths in `n_cells` cells.
pub fn scan_wavenumbers(count: usize, n_cells: usize) -> Vec<f64> {
    let max_mode = n_cells / 2;
    let count = count.min(max_mode);
    let mut modes: Vec<usize> = (1..=count)
        .map(|i| ((i as f64 * max_mode as f64 / count as f64).round() as usize).max(1))
        .collect();
    modes.dedup();
    modes.into_iter().map(|m| 2.0 * PI * m as f64 / n_cells as f64).collect()
}

pub fn dispersion_scan(scheme: Scheme, ks: &[f64], n_cells: usize, params: &WeightParams) -> Result<Vec<DispersionPoint>> {
    ks.par_iter().map(|&k| modified_wavenumber(scheme, k, n_cells, params)).collect()
}

#[derive(Serialize)]
struct Row<'a> {
    scheme: &'a str,
    k: f64,
    k_star_re: f64,
    k_star_im: f64,
}

pub fn write_scan_csv<W: Write>(out: W, scheme_name: &str, points: &[DispersionPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(Row { scheme: scheme_name, k: p.k, k_star_re: p.k_star_re, k_star_im: p.k_star_im })?;
    }
    w.flush()?;
    Ok(())
}
