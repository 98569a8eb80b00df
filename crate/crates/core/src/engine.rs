//! Conservative semi-Lagrangian update.
//!
//! One sweep moves mass across cell faces: the flux leaving cell `j` is the
//! integral of its reconstruction over the part of the cell that crosses the
//! downstream face during the step, and
//! `f_j^{n+1} = f_j^n - Φ_j + Φ_{j - sgn(v)}`.
//! Displacements larger than one cell are split into a whole-cell shift plus
//! a remainder, so the reconstruction itself only ever sees `|ξ| <= 1`.

use crate::error::{Error, Result};
use crate::kernel::{fill_ghosts, Boundary, CellAverages, Displacement, QuadraticRecon};
use crate::pfc::{self, BoundsMode};
use crate::wpfc::{self, WeightParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Pfc3Extended,
    Pfc3Compact,
    Wpfc5,
    Linear5,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Pfc3Extended, Scheme::Pfc3Compact, Scheme::Wpfc5, Scheme::Linear5];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Pfc3Extended => "pfc3_extended",
            Scheme::Pfc3Compact => "pfc3_compact",
            Scheme::Wpfc5 => "wpfc5",
            Scheme::Linear5 => "linear5",
        }
    }

    /// Whether the scheme guarantees non-negative, bounded reconstructions.
    pub fn is_limited(&self) -> bool {
        !matches!(self, Scheme::Linear5)
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// Net transfer through each cell face during one sweep, in units of cell
/// averages (mass / Δx), positive to the right.
///
/// `faces[i]` belongs to the left face of cell `i`. Periodic lines store `n`
/// faces (face `n` is face `0`); open lines store `n + 1`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FluxRecord {
    pub faces: Vec<f64>,
}

/// Simpson integral of `poly` over the part of the cell that leaves through
/// the downstream face, with `xi_abs` in `[0, 1]`.
#[inline(always)]
fn simpson_outflow(poly: &QuadraticRecon, xi_abs: f64, positive: bool) -> f64 {
    let h = if positive { 0.5 } else { -0.5 };
    let e0 = poly.eval(h);
    let e1 = poly.eval(h * (1.0 - xi_abs));
    let e2 = poly.eval(h * (1.0 - 2.0 * xi_abs));
    xi_abs * (e0 + 4.0 * e1 + e2) / 6.0
}

/// Outgoing flux `Φ` of a cell for displacement `xi`.
pub fn outgoing_flux(poly: &QuadraticRecon, xi: f64, velocity_sign: i8) -> Result<f64> {
    if !(xi.abs() <= 1.0) {
        return Err(Error::DisplacementTooLarge(xi));
    }
    Ok(simpson_outflow(poly, xi.abs(), velocity_sign > 0))
}

/// Linear fifth-order reconstruction: optimal substencil quadratics blended
/// with the optimal weights, no limiting.
pub fn linear5_reconstruct(stencil: &[f64; 5], xi: f64, velocity_sign: i8) -> Result<QuadraticRecon> {
    let d = wpfc::optimal_weights(xi, velocity_sign)?;
    Ok(wpfc::blended_linear(stencil, &d))
}

/// Reconstruction of one cell under `scheme`. `d` are the optimal weights for
/// the current displacement (ignored by PFC).
#[inline(always)]
fn reconstruct(scheme: Scheme, s: &[f64; 5], d: &[f64; 3], params: &WeightParams) -> QuadraticRecon {
    match scheme {
        Scheme::Pfc3Extended => pfc::reconstruct_pfc(s, BoundsMode::Extended, params.eps),
        Scheme::Pfc3Compact => pfc::reconstruct_pfc(s, BoundsMode::Compact, params.eps),
        Scheme::Wpfc5 => wpfc::blended_wpfc(s, d, BoundsMode::Extended, params),
        Scheme::Linear5 => wpfc::blended_linear(s, d),
    }
}

/// Reconstruction used by [`advect_step`] for a single cell and displacement.
pub fn reconstruct_cell(
    scheme: Scheme,
    stencil: &[f64; 5],
    xi: f64,
    velocity_sign: i8,
    params: &WeightParams,
) -> Result<QuadraticRecon> {
    let d = wpfc::optimal_weights(xi, velocity_sign)?;
    Ok(reconstruct(scheme, stencil, &d, params))
}

#[inline(always)]
fn stencil_at(ext: &[f64], i: usize) -> [f64; 5] {
    [ext[i - 2], ext[i - 1], ext[i], ext[i + 1], ext[i + 2]]
}

/// Reusable scratch space for constant-displacement sweeps of 1D lines.
#[derive(Clone, Debug, Default)]
pub struct LineSweeper {
    ext: Vec<f64>,
    faces: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
}

impl LineSweeper {
    pub fn new() -> Self {
        Self::default()
    }

    /// Face transfers of the last sweep (`n + 1` entries, left faces of cells
    /// `0..n` plus the right face of the last cell).
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Advances `values` in place by one sweep with uniform displacement `xi`.
    pub fn sweep(
        &mut self,
        values: &mut [f64],
        xi: f64,
        boundary: Boundary,
        scheme: Scheme,
        params: &WeightParams,
    ) {
        match scheme {
            Scheme::Pfc3Extended => self.sweep_with(values, xi, boundary, &Pfc(BoundsMode::Extended, params.eps)),
            Scheme::Pfc3Compact => self.sweep_with(values, xi, boundary, &Pfc(BoundsMode::Compact, params.eps)),
            Scheme::Wpfc5 if params.p == 0.5 => self.sweep_with(values, xi, boundary, &Wpfc::<true>(*params)),
            Scheme::Wpfc5 => self.sweep_with(values, xi, boundary, &Wpfc::<false>(*params)),
            Scheme::Linear5 => self.sweep_with(values, xi, boundary, &Linear),
        }
    }

    #[inline(always)]
    fn sweep_with<R: CellRecon>(&mut self, values: &mut [f64], xi: f64, boundary: Boundary, recon: &R) {
        let n = values.len();
        self.faces.clear();
        self.faces.resize(n + 1, 0.0);
        if xi == 0.0 || n == 0 {
            return;
        }
        let (shift, theta) = Displacement::new(xi).split();
        let positive = xi > 0.0;
        let g = 3 + shift;
        fill_ghosts(values, g, boundary, &mut self.ext);
        let d = wpfc::optimal_weights_abs(theta, positive);

        // face i takes the outflow of cell `first + i` (ext indexing)
        let first = if positive { g - 1 - shift } else { g + shift };
        self.a1.resize(n + 1, 0.0);
        self.a2.resize(n + 1, 0.0);
        reconstruct_run(&self.ext[first - 2..first + n + 3], &d, recon, &mut self.a1, &mut self.a2);

        let ext = &self.ext;
        let faces = &mut self.faces;
        if positive {
            // plus every whole cell between the source and the face
            let mut whole: f64 = (0..shift).map(|m| ext[g - 1 - m]).sum();
            for i in 0..=n {
                let poly = QuadraticRecon::new(ext[first + i], self.a1[i], self.a2[i]);
                faces[i] = simpson_outflow(&poly, theta, true) + whole;
                if shift > 0 {
                    whole += ext[g + i] - ext[g + i - shift];
                }
            }
        } else {
            let mut whole: f64 = (0..shift).map(|m| ext[g + m]).sum();
            for i in 0..=n {
                let poly = QuadraticRecon::new(ext[first + i], self.a1[i], self.a2[i]);
                faces[i] = -(simpson_outflow(&poly, theta, false) + whole);
                if shift > 0 {
                    whole += ext[g + i + shift] - ext[g + i];
                }
            }
        }

        if boundary == Boundary::ZeroFlux {
            faces[0] = 0.0;
            faces[n] = 0.0;
        }
        for (j, v) in values.iter_mut().enumerate() {
            *v = *v - faces[j + 1] + faces[j];
        }
    }
}

/// Per-cell reconstruction used inside the sweep loop.
trait CellRecon {
    fn recon(&self, s: &[f64; 5], d: &[f64; 3]) -> QuadraticRecon;
}

struct Pfc(BoundsMode, f64);
struct Wpfc<const SQRT: bool>(WeightParams);
struct Linear;

impl CellRecon for Pfc {
    #[inline(always)]
    fn recon(&self, s: &[f64; 5], _: &[f64; 3]) -> QuadraticRecon {
        pfc::reconstruct_pfc(s, self.0, self.1)
    }
}

impl<const SQRT: bool> CellRecon for Wpfc<SQRT> {
    #[inline(always)]
    fn recon(&self, s: &[f64; 5], d: &[f64; 3]) -> QuadraticRecon {
        wpfc::blended_wpfc_impl::<SQRT>(s, d, BoundsMode::Extended, &self.0)
    }
}

impl CellRecon for Linear {
    #[inline(always)]
    fn recon(&self, s: &[f64; 5], d: &[f64; 3]) -> QuadraticRecon {
        wpfc::blended_linear(s, d)
    }
}

/// Reconstructs every cell of `ext[2..len-2]` into `a1`, `a2`. Kept free of
/// loop-carried state so it vectorizes; on x86-64 an AVX2 build is picked at
/// run time. No fused multiply-adds are introduced, so both paths round
/// identically.
#[inline(always)]
fn reconstruct_run<R: CellRecon>(ext: &[f64], d: &[f64; 3], recon: &R, a1: &mut [f64], a2: &mut [f64]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the required CPU feature was detected above.
            unsafe { reconstruct_run_avx2(ext, d, recon, a1, a2) };
            return;
        }
    }
    reconstruct_run_generic(ext, d, recon, a1, a2)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn reconstruct_run_avx2<R: CellRecon>(ext: &[f64], d: &[f64; 3], recon: &R, a1: &mut [f64], a2: &mut [f64]) {
    reconstruct_run_generic(ext, d, recon, a1, a2)
}

#[inline(always)]
fn reconstruct_run_generic<R: CellRecon>(ext: &[f64], d: &[f64; 3], recon: &R, a1: &mut [f64], a2: &mut [f64]) {
    let m = ext.len() - 4;
    let (a1, a2) = (&mut a1[..m], &mut a2[..m]);
    let (s0, s1, s2, s3, s4) = (&ext[..m], &ext[1..m + 1], &ext[2..m + 2], &ext[3..m + 3], &ext[4..m + 4]);
    for i in 0..m {
        let p = recon.recon(&[s0[i], s1[i], s2[i], s3[i], s4[i]], d);
        a1[i] = p.a1;
        a2[i] = p.a2;
    }
}

/// One conservative sweep of `f`.
///
/// `xi[j]` is the displacement carried by the flux leaving cell `j`. All
/// non-zero entries must share one sign. When every entry is equal the sweep
/// accepts `|ξ| > 1` (whole-cell shift plus remainder); otherwise each entry
/// must satisfy `|ξ_j| <= 1`.
pub fn advect_step(
    f: &CellAverages,
    xi: &[f64],
    scheme: Scheme,
    params: &WeightParams,
) -> Result<(CellAverages, FluxRecord)> {
    let n = f.values.len();
    if xi.len() != n {
        return Err(Error::GridMismatch(format!("{} displacements for {n} cells", xi.len())));
    }
    let positive = check_single_sign(xi)?;
    let boundary = f.grid.boundary;
    let mut out = f.clone();

    let faces = if xi.iter().all(|&x| x == xi[0]) {
        let mut sw = LineSweeper::new();
        sw.sweep(&mut out.values, xi[0], boundary, scheme, params);
        sw.faces
    } else {
        if let Some(&bad) = xi.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(Error::DisplacementTooLarge(bad));
        }
        let mut ext = Vec::new();
        fill_ghosts(&f.values, 3, boundary, &mut ext);
        let xi_of = |c: isize| xi[c.clamp(0, n as isize - 1) as usize];
        let mut faces = vec![0.0; n + 1];
        for (i, face) in faces.iter_mut().enumerate() {
            // upstream cell of face i
            let c = if positive { i as isize - 1 } else { i as isize };
            let x = match boundary {
                Boundary::Periodic => xi[c.rem_euclid(n as isize) as usize],
                _ => xi_of(c),
            };
            let a = x.abs();
            let d = wpfc::optimal_weights_abs(a, positive);
            let poly = reconstruct(scheme, &stencil_at(&ext, (c + 3) as usize), &d, params);
            let phi = simpson_outflow(&poly, a, positive);
            *face = if positive { phi } else { -phi };
        }
        if boundary == Boundary::ZeroFlux {
            faces[0] = 0.0;
            faces[n] = 0.0;
        }
        for (j, v) in out.values.iter_mut().enumerate() {
            *v = *v - faces[j + 1] + faces[j];
        }
        faces
    };

    let mut faces = faces;
    if boundary == Boundary::Periodic {
        faces.truncate(n);
    }
    Ok((out, FluxRecord { faces }))
}

/// Returns `true` for rightward transport; zeros are neutral.
fn check_single_sign(xi: &[f64]) -> Result<bool> {
    let mut sign = 0i8;
    for (cell, &x) in xi.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::DisplacementTooLarge(x));
        }
        let s = if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            continue;
        };
        if sign != 0 && s != sign {
            return Err(Error::MixedSign { cell });
        }
        sign = s;
    }
    Ok(sign > 0)
}

/// How the L¹ error is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum L1Convention {
    /// `Σ|Δ| Δx / L`, the mean absolute error.
    #[default]
    Mean,
    /// `Σ|Δ| Δx`.
    Integral,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ErrorNorms {
    pub l1: f64,
    pub linf: f64,
}

pub fn error_norms(numeric: &CellAverages, exact: &CellAverages) -> Result<ErrorNorms> {
    error_norms_with(numeric, exact, L1Convention::Mean)
}

pub fn error_norms_with(numeric: &CellAverages, exact: &CellAverages, conv: L1Convention) -> Result<ErrorNorms> {
    if numeric.grid != exact.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", numeric.grid, exact.grid)));
    }
    let (sum, linf) = numeric
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).abs())
        .fold((0.0, 0.0f64), |(s, m), e| (s + e, m.max(e)));
    let integral = sum * numeric.grid.dx;
    let l1 = match conv {
        L1Convention::Mean => integral / numeric.grid.length(),
        L1Convention::Integral => integral,
    };
    Ok(ErrorNorms { l1, linf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::UniformGrid1D;
    use crate::wpfc::quartic_fit;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> WeightParams {
        WeightParams::default()
    }

    fn line(values: Vec<f64>, boundary: Boundary) -> CellAverages {
        let n = values.len();
        CellAverages::new(values, UniformGrid1D::new(n, 0.0, n as f64, boundary).unwrap()).unwrap()
    }

    #[test]
    fn flux_examples() {
        let c = QuadraticRecon::new(2.0, 0.0, 0.0);
        assert_relative_eq!(outgoing_flux(&c, 0.4, 1).unwrap(), 0.8);
        assert_relative_eq!(outgoing_flux(&c, -0.4, -1).unwrap(), 0.8);
        let lin = QuadraticRecon::new(0.0, 1.0, 0.0);
        assert_relative_eq!(outgoing_flux(&lin, 0.5, 1).unwrap(), 0.125);
        assert_relative_eq!(outgoing_flux(&lin, -0.5, -1).unwrap(), -0.125);
        assert!(outgoing_flux(&lin, 1.2, 1).is_err());
    }

    proptest! {
        #[test]
        fn simpson_matches_antiderivative(
            f in -5.0..5.0f64, a1 in -5.0..5.0f64, a2 in -5.0..5.0f64, xi in -1.0..1.0f64,
        ) {
            let p = QuadraticRecon::new(f, a1, a2);
            let sign = if xi > 0.0 { 1 } else { -1 };
            let got = outgoing_flux(&p, xi, sign).unwrap();
            let exact = if xi > 0.0 { p.integral(0.5 - xi, 0.5) } else { p.integral(-0.5, -0.5 - xi) };
            prop_assert!((got - exact).abs() <= 1e-14 * (1.0 + f.abs() + a1.abs() + a2.abs()));
        }

        #[test]
        fn linear5_flux_equals_quartic_flux(s in prop::array::uniform5(-2.0..2.0f64), xi in -1.0..1.0f64) {
            let sign = if xi > 0.0 { 1 } else { -1 };
            let lin = linear5_reconstruct(&s, xi, sign).unwrap();
            let q = quartic_fit(&s);
            let got = outgoing_flux(&lin, xi, sign).unwrap();
            let exact = if xi > 0.0 { q.integral(0.5 - xi, 0.5) } else { q.integral(-0.5, -0.5 - xi) };
            prop_assert!((got - exact).abs() <= 1e-12);
        }

        #[test]
        fn sweep_conserves_and_preserves_positivity(
            v in prop::collection::vec(0.0..1.0f64, 8..40),
            xi in -1.0..1.0f64,
            which in 0usize..3,
        ) {
            let scheme = [Scheme::Pfc3Extended, Scheme::Pfc3Compact, Scheme::Wpfc5][which];
            let f = line(v.clone(), Boundary::Periodic);
            let (g, flux) = advect_step(&f, &vec![xi; v.len()], scheme, &params()).unwrap();
            prop_assert_eq!(flux.faces.len(), v.len());
            let m0: f64 = v.iter().sum();
            let m1: f64 = g.values.iter().sum();
            prop_assert!((m1 - m0).abs() <= 1e-12 * m0.max(1e-300));
            for &x in &g.values {
                prop_assert!(x >= -1e-12);
            }
        }

        #[test]
        fn large_shift_equals_repeated_unit_shift(
            v in prop::collection::vec(0.0..1.0f64, 8..20),
            whole in 1usize..4,
            frac in 0.05..0.95f64,
            neg in any::<bool>(),
        ) {
            // ξ = whole + frac equals frac after shifting by `whole` cells
            let s = if neg { -1.0 } else { 1.0 };
            let n = v.len();
            let f = line(v.clone(), Boundary::Periodic);
            let (big, _) = advect_step(&f, &vec![s * (whole as f64 + frac); n], Scheme::Wpfc5, &params()).unwrap();
            let (small, _) = advect_step(&f, &vec![s * frac; n], Scheme::Wpfc5, &params()).unwrap();
            for j in 0..n {
                let src = if neg { (j + whole) % n } else { (j + n - whole % n) % n };
                prop_assert!((big.values[j] - small.values[src]).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn zero_displacement_is_identity() {
        let f = line(vec![0.1, 0.5, 0.9, 0.2, 0.3, 0.7], Boundary::Periodic);
        for scheme in Scheme::ALL {
            let (g, flux) = advect_step(&f, &[0.0; 6], scheme, &params()).unwrap();
            assert_eq!(g, f);
            assert!(flux.faces.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn unit_displacement_shifts_by_one_cell() {
        let v = vec![0.1, 0.5, 0.9, 0.2, 0.3, 0.7];
        let f = line(v.clone(), Boundary::Periodic);
        for scheme in Scheme::ALL {
            let (g, _) = advect_step(&f, &[1.0; 6], scheme, &params()).unwrap();
            for j in 0..6 {
                assert_relative_eq!(g.values[j], v[(j + 5) % 6], epsilon = 1e-14);
            }
            let (g, _) = advect_step(&f, &[-1.0; 6], scheme, &params()).unwrap();
            for j in 0..6 {
                assert_relative_eq!(g.values[j], v[(j + 1) % 6], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn mixed_signs_rejected() {
        let f = line(vec![1.0; 6], Boundary::Periodic);
        let xi = [0.1, 0.2, -0.1, 0.0, 0.1, 0.1];
        assert!(matches!(advect_step(&f, &xi, Scheme::Wpfc5, &params()), Err(Error::MixedSign { cell: 2 })));
        let xi = [0.1, 0.2, 1.5, 0.0, 0.1, 0.1];
        assert!(matches!(
            advect_step(&f, &xi, Scheme::Wpfc5, &params()),
            Err(Error::DisplacementTooLarge(_))
        ));
    }

    #[test]
    fn per_cell_path_matches_uniform_sweep() {
        // same ξ everywhere, forced through the per-cell branch by a zero entry
        // in a region with zero flux contribution
        let v: Vec<f64> = (0..12).map(|j| (0.4 * j as f64).sin() + 1.5).collect();
        let f = line(v, Boundary::Open);
        let (a, fa) = advect_step(&f, &[0.3; 12], Scheme::Wpfc5, &params()).unwrap();
        let mut xi = [0.3; 12];
        xi[11] = 0.3f64.next_up();
        let (b, fb) = advect_step(&f, &xi, Scheme::Wpfc5, &params()).unwrap();
        assert_eq!(fa.faces.len(), 13);
        for j in 0..12 {
            assert_relative_eq!(a.values[j], b.values[j], epsilon = 1e-15);
        }
        for j in 0..13 {
            assert_relative_eq!(fa.faces[j], fb.faces[j], epsilon = 1e-15);
        }
    }

    #[test]
    fn open_boundary_balances_with_edge_faces() {
        let v: Vec<f64> = (0..10).map(|j| 1.0 + j as f64).collect();
        for (boundary, xi) in [(Boundary::Open, 0.6), (Boundary::Open, -0.6), (Boundary::ZeroFlux, 0.6)] {
            let f = line(v.clone(), boundary);
            let (g, flux) = advect_step(&f, &[xi; 10], Scheme::Pfc3Extended, &params()).unwrap();
            let lost = flux.faces[10] - flux.faces[0];
            assert_relative_eq!(g.values.iter().sum::<f64>() + lost, v.iter().sum::<f64>(), epsilon = 1e-12);
            if boundary == Boundary::ZeroFlux {
                assert_eq!(lost, 0.0);
            } else {
                assert!(lost.abs() > 0.0);
            }
        }
    }

    #[test]
    fn norms() {
        let grid = UniformGrid1D::new(8, -1.0, 1.0, Boundary::Periodic).unwrap();
        let a = CellAverages::from_fn(grid, |x| x * x);
        assert_eq!(error_norms(&a, &a).unwrap(), ErrorNorms { l1: 0.0, linf: 0.0 });
        let b = CellAverages::from_fn(grid, |x| x * x + 0.25);
        let e = error_norms(&b, &a).unwrap();
        assert_relative_eq!(e.l1, 0.25);
        assert_relative_eq!(e.linf, 0.25);
        let e = error_norms_with(&b, &a, L1Convention::Integral).unwrap();
        assert_relative_eq!(e.l1, 0.5);
        let other = CellAverages::from_fn(UniformGrid1D::new(9, -1.0, 1.0, Boundary::Periodic).unwrap(), |x| x);
        assert!(error_norms(&a, &other).is_err());
    }
}
