//! Fifth-order weighted PFC reconstruction.
//!
//! The five-point stencil `S_j = [j-2, j+2]` is split into three substencils
//! `[j-2, j]`, `[j-1, j+1]` and `[j, j+2]`. Each carries a PFC-limited quadratic
//! with mean `f_j`; the cell reconstruction is their convex combination. The
//! weights start from the ξ-dependent optimal weights (which make the blend
//! reproduce the fifth-order flux) and are tilted towards substencils with a
//! larger L² increment, i.e. steeper ones, to counter numerical diffusion.

use crate::error::{Error, Result};
use crate::kernel::{median3, FastMinMax, QuadraticRecon, QuarticRecon};
use crate::pfc::{self, BoundsMode, SlopeBounds};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightParams {
    /// Additive constant in the weight numerator.
    pub c: f64,
    /// Exponent applied to the L² increment ratio.
    pub p: f64,
    /// Guard shared by the α-optimization and the weight ratio.
    pub eps: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self { c: 0.5, p: 0.5, eps: pfc::DEFAULT_EPS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SubstencilCoeffs {
    pub a1: f64,
    pub a2: f64,
}

impl SubstencilCoeffs {
    pub fn new(a1: f64, a2: f64) -> Self {
        Self { a1, a2 }
    }
}

/// Unlimited coefficients of the three substencil quadratics.
#[inline(always)]
pub fn substencil_optimal_coeffs(s: &[f64; 5]) -> [SubstencilCoeffs; 3] {
    let [fm2, fm1, f0, fp1, fp2] = *s;
    [
        SubstencilCoeffs::new(0.5 * (3.0 * f0 - 4.0 * fm1 + fm2), 0.5 * (f0 - 2.0 * fm1 + fm2)),
        SubstencilCoeffs::new(0.5 * (fp1 - fm1), 0.5 * (fp1 - 2.0 * f0 + fm1)),
        SubstencilCoeffs::new(0.5 * (-fp2 + 4.0 * fp1 - 3.0 * f0), 0.5 * (fp2 - 2.0 * fp1 + f0)),
    ]
}

/// Applies the PFC slope corrector to each substencil. The cell bounds are
/// shared; `α±` is optimized separately per substencil from its own slopes.
pub fn correct_substencils(
    coeffs: &[SubstencilCoeffs; 3],
    s: &[f64; 5],
    mode: BoundsMode,
    eps: f64,
) -> [SubstencilCoeffs; 3] {
    let (f_min, f_max) = pfc::stencil_bounds(s, mode);
    let slopes = pfc::slope_range_clamped(s[2], f_min, f_max);
    coeffs.map(|c| {
        let alphas = pfc::alpha_weights(c.a1 + c.a2, c.a1 - c.a2, &slopes, eps);
        let (a1, a2) = pfc::corrected_coeffs(c.a1, c.a2, &alphas, &slopes);
        SubstencilCoeffs::new(a1, a2)
    })
}

/// Optimal linear weights `(d0, d1, d2)` for a displacement `xi` (`|xi| <= 1`).
pub fn optimal_weights(xi: f64, velocity_sign: i8) -> Result<[f64; 3]> {
    if !(xi.abs() <= 1.0) {
        return Err(Error::DisplacementTooLarge(xi));
    }
    Ok(optimal_weights_abs(xi.abs(), velocity_sign > 0))
}

#[inline(always)]
pub(crate) fn optimal_weights_abs(a: f64, positive: bool) -> [f64; 3] {
    let a2 = a * a;
    // `far`: the substencil reaching furthest upstream
    let far = (2.0 + 3.0 * a + a2) / 20.0;
    let center = (6.0 + a - a2) / 10.0;
    let near = (6.0 - 5.0 * a + a2) / 20.0;
    if positive {
        [far, center, near]
    } else {
        [near, center, far]
    }
}

/// Quartic whose cell means match the five-point stencil.
#[inline(always)]
pub fn quartic_fit(s: &[f64; 5]) -> QuarticRecon {
    let [fm2, fm1, f0, fp1, fp2] = *s;
    QuarticRecon {
        f_mean: f0,
        a1: (-5.0 * fp2 + 34.0 * fp1 - 34.0 * fm1 + 5.0 * fm2) / 48.0,
        a2: (-fp2 + 12.0 * fp1 - 22.0 * f0 + 12.0 * fm1 - fm2) / 16.0,
        a3: (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / 12.0,
        a4: (fp2 - 4.0 * fp1 + 6.0 * f0 - 4.0 * fm1 + fm2) / 24.0,
    }
}

#[inline(always)]
fn quadratic_increment(a1: f64, a2: f64) -> f64 {
    a1 * a1 / 12.0 + a2 * a2 / 180.0
}

/// Excess of the cell L² norm over `f_j²` for each substencil quadratic and
/// for the full quartic.
pub fn l2_increments(sub: &[SubstencilCoeffs; 3], q: &QuarticRecon) -> ([f64; 3], f64) {
    let per_sub = sub.map(|c| quadratic_increment(c.a1, c.a2));
    (per_sub, quartic_increment(q))
}

#[inline(always)]
fn quartic_increment(q: &QuarticRecon) -> f64 {
    quadratic_increment(q.a1, q.a2)
        + q.a3 * q.a3 / 448.0
        + q.a4 * q.a4 / 3600.0
        + q.a1 * q.a3 / 40.0
        + q.a2 * q.a4 / 420.0
}

/// `w_k ∝ d_k [C + ((ΔL²_k + ε)/(ΔL² + ε))^p]`.
#[inline(always)]
pub fn nonlinear_weights(d: &[f64; 3], dl2_sub: &[f64; 3], dl2_full: f64, params: &WeightParams) -> [f64; 3] {
    if params.p == 0.5 {
        nonlinear_weights_impl::<true>(d, dl2_sub, dl2_full, params)
    } else {
        nonlinear_weights_impl::<false>(d, dl2_sub, dl2_full, params)
    }
}

/// `SQRT` selects the `p = 1/2` fast path without a branch in the cell loop.
#[inline(always)]
fn nonlinear_weights_impl<const SQRT: bool>(
    d: &[f64; 3],
    dl2_sub: &[f64; 3],
    dl2_full: f64,
    params: &WeightParams,
) -> [f64; 3] {
    let inv = 1.0 / (dl2_full + params.eps);
    let ratio_pow = |x: f64| {
        let r = (x + params.eps) * inv;
        if SQRT {
            r.sqrt()
        } else {
            r.powf(params.p)
        }
    };
    let g = [
        d[0] * (params.c + ratio_pow(dl2_sub[0])),
        d[1] * (params.c + ratio_pow(dl2_sub[1])),
        d[2] * (params.c + ratio_pow(dl2_sub[2])),
    ];
    let norm = 1.0 / (g[0] + g[1] + g[2]);
    [g[0] * norm, g[1] * norm, g[2] * norm]
}

/// The three limited substencil quadratics and their nonlinear weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WpfcRecon {
    pub polys: [QuadraticRecon; 3],
    pub weights: [f64; 3],
}

impl WpfcRecon {
    /// The convex combination; a weighted sum of quadratics is a quadratic.
    pub fn blend(&self) -> QuadraticRecon {
        let w = &self.weights;
        let p = &self.polys;
        QuadraticRecon::new(
            p[0].f_mean,
            w[0] * p[0].a1 + w[1] * p[1].a1 + w[2] * p[2].a1,
            w[0] * p[0].a2 + w[1] * p[1].a2 + w[2] * p[2].a2,
        )
    }
}

pub fn reconstruct_wpfc(
    s: &[f64; 5],
    xi: f64,
    velocity_sign: i8,
    mode: BoundsMode,
    params: &WeightParams,
) -> Result<WpfcRecon> {
    let d = optimal_weights(xi, velocity_sign)?;
    let sub = correct_substencils(&substencil_optimal_coeffs(s), s, mode, params.eps);
    let (dl2_sub, dl2_full) = l2_increments(&sub, &quartic_fit(s));
    let weights = nonlinear_weights(&d, &dl2_sub, dl2_full, params);
    Ok(WpfcRecon {
        polys: sub.map(|c| QuadraticRecon::new(s[2], c.a1, c.a2)),
        weights,
    })
}

/// Blended reconstruction for a given optimal-weight vector. Same arithmetic as
/// [`reconstruct_wpfc`] with the per-cell divisions shared between substencils.
#[inline(always)]
pub(crate) fn blended_wpfc(s: &[f64; 5], d: &[f64; 3], mode: BoundsMode, params: &WeightParams) -> QuadraticRecon {
    if params.p == 0.5 {
        blended_wpfc_impl::<true>(s, d, mode, params)
    } else {
        blended_wpfc_impl::<false>(s, d, mode, params)
    }
}

#[inline(always)]
pub(crate) fn blended_wpfc_impl<const SQRT: bool>(
    s: &[f64; 5],
    d: &[f64; 3],
    mode: BoundsMode,
    params: &WeightParams,
) -> QuadraticRecon {
    let eps = params.eps;
    let f0 = s[2];
    let (f_min, f_max) = pfc::stencil_bounds(s, mode);
    let SlopeBounds { f_min_plus, f_max_plus, f_min_minus, f_max_minus, .. } =
        pfc::slope_range_clamped(f0, f_min, f_max);
    let inv_hi_p = 1.0 / (f_max_plus + eps);
    let inv_lo_p = 1.0 / (f_min_plus - eps);
    let inv_hi_m = 1.0 / (f_max_minus + eps);
    let inv_lo_m = 1.0 / (f_min_minus - eps);
    let beta = |s: f64, inv_lo: f64, inv_hi: f64| {
        let b = if s > 0.0 { s * inv_hi } else { s * inv_lo };
        (b + eps).fmin(1.0)
    };

    let opt = substencil_optimal_coeffs(s);
    let mut a1 = [0.0; 3];
    let mut a2 = [0.0; 3];
    let mut dl2 = [0.0; 3];
    for k in 0..3 {
        let sp = opt[k].a1 + opt[k].a2;
        let sm = opt[k].a1 - opt[k].a2;
        let bp = beta(sp, inv_lo_p, inv_hi_p);
        let bm = beta(sm, inv_lo_m, inv_hi_m);
        let inv = 1.0 / (bp + bm);
        let (ap, am) = (bp * inv, bm * inv);
        let cp = median3(sp, ap * f_min_plus, ap * f_max_plus);
        let cm = median3(sm, am * f_min_minus, am * f_max_minus);
        a1[k] = 0.5 * (cp + cm);
        a2[k] = 0.5 * (cp - cm);
        dl2[k] = quadratic_increment(a1[k], a2[k]);
    }
    let w = nonlinear_weights_impl::<SQRT>(d, &dl2, quartic_increment(&quartic_fit(s)), params);
    QuadraticRecon::new(
        f0,
        w[0] * a1[0] + w[1] * a1[1] + w[2] * a1[2],
        w[0] * a2[0] + w[1] * a2[1] + w[2] * a2[2],
    )
}

/// Unlimited blend of the optimal substencil quadratics with `w = d`.
#[inline(always)]
pub(crate) fn blended_linear(s: &[f64; 5], d: &[f64; 3]) -> QuadraticRecon {
    let c = substencil_optimal_coeffs(s);
    QuadraticRecon::new(
        s[2],
        d[0] * c[0].a1 + d[1] * c[1].a1 + d[2] * c[2].a1,
        d[0] * c[0].a2 + d[1] * c[1].a2 + d[2] * c[2].a2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn squares() -> [f64; 5] {
        [4.0, 1.0, 0.0, 1.0, 4.0]
    }

    #[test]
    fn substencil_examples() {
        for c in substencil_optimal_coeffs(&[2.5; 5]) {
            assert_eq!((c.a1, c.a2), (0.0, 0.0));
        }
        for c in substencil_optimal_coeffs(&[0.0, 1.0, 2.0, 3.0, 4.0]) {
            assert_eq!((c.a1, c.a2), (1.0, 0.0));
        }
        // f = j² sampled as cell data: every substencil sees the same parabola
        for c in substencil_optimal_coeffs(&squares()) {
            assert_eq!((c.a1, c.a2), (0.0, 1.0));
        }
    }

    #[test]
    fn correction_examples() {
        let flat = [1.5; 5];
        let c = correct_substencils(&substencil_optimal_coeffs(&flat), &flat, BoundsMode::Extended, 1e-7);
        assert!(c.iter().all(|c| c.a1 == 0.0 && c.a2 == 0.0));

        let ramp = [0.0, 1.0, 2.0, 3.0, 4.0];
        let c = correct_substencils(&substencil_optimal_coeffs(&ramp), &ramp, BoundsMode::Extended, 1e-7);
        for c in c {
            assert_relative_eq!(c.a1, 1.0, epsilon = 1e-14);
            assert_relative_eq!(c.a2, 0.0, epsilon = 1e-14);
        }

        let spike = [0.0, 0.0, 1.0, 0.0, 0.0];
        let (f_min, f_max) = pfc::stencil_bounds(&spike, BoundsMode::Extended);
        let c = correct_substencils(&substencil_optimal_coeffs(&spike), &spike, BoundsMode::Extended, 1e-7);
        for c in c {
            let p = QuadraticRecon::new(1.0, c.a1, c.a2);
            for i in 0..=1000 {
                let v = p.eval(-0.5 + i as f64 / 1000.0);
                assert!(v >= f_min - 1e-12 && v <= f_max + 1e-12);
            }
        }
    }

    #[test]
    fn optimal_weight_examples() {
        let d = optimal_weights(0.0, 1).unwrap();
        assert_relative_eq!(d[0], 0.1);
        assert_relative_eq!(d[1], 0.6);
        assert_relative_eq!(d[2], 0.3);
        let d = optimal_weights(1.0, 1).unwrap();
        assert_relative_eq!(d[0], 0.3);
        assert_relative_eq!(d[1], 0.6);
        assert_relative_eq!(d[2], 0.1);
        let d = optimal_weights(-0.3, -1).unwrap();
        assert_eq!(d, optimal_weights_abs(0.3, false));
        assert_relative_eq!(d[2], (2.0 + 0.9 + 0.09) / 20.0);
        assert_relative_eq!(d[0], (6.0 - 1.5 + 0.09) / 20.0);
        assert!(optimal_weights(1.01, 1).is_err());
        assert!(optimal_weights(f64::NAN, 1).is_err());
    }

    #[test]
    fn optimal_weights_sum_to_one() {
        for i in 0..=100 {
            let xi = -1.0 + 2.0 * i as f64 / 100.0;
            let sign = if xi > 0.0 { 1 } else { -1 };
            let d = optimal_weights(xi, sign).unwrap();
            assert!((d.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
            assert!(d.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn quartic_examples() {
        let q = quartic_fit(&[0.7; 5]);
        assert!([q.a1, q.a2, q.a3, q.a4].iter().all(|a| a.abs() < 1e-15));
        let q = quartic_fit(&squares());
        assert_eq!([q.a1, q.a2, q.a3, q.a4], [0.0, 1.0, 0.0, 0.0]);
        let q = quartic_fit(&[16.0, 1.0, 0.0, 1.0, 16.0]);
        assert_eq!(q.a4, 1.0);
    }

    #[test]
    fn quartic_matches_cell_means() {
        // Oracle: the quartic integrated over each neighbour cell (shifted
        // coordinate) must give back the stencil value.
        let s = [0.3, 1.7, -0.4, 2.2, 0.9];
        let q = quartic_fit(&s);
        for (i, &v) in s.iter().enumerate() {
            let off = i as f64 - 2.0;
            assert_relative_eq!(q.integral(off - 0.5, off + 0.5), v, epsilon = 1e-13);
        }
    }

    #[test]
    fn quartic_increment_matches_quadrature() {
        let q = quartic_fit(&[0.3, 1.7, -0.4, 2.2, 0.9]);
        // Simpson with many panels on a degree-8 integrand
        let n = 2000;
        let h = 1.0 / n as f64;
        let g = |x: f64| q.eval(x).powi(2);
        let mut s = g(-0.5) + g(0.5);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(-0.5 + i as f64 * h);
        }
        let l2 = s * h / 3.0;
        assert_relative_eq!(l2 - q.f_mean * q.f_mean, quartic_increment(&q), epsilon = 1e-10);
    }

    #[test]
    fn l2_increment_examples() {
        let zero = [SubstencilCoeffs::default(); 3];
        let (sub, full) = l2_increments(&zero, &QuarticRecon::default());
        assert_eq!((sub, full), ([0.0; 3], 0.0));
        let one = [SubstencilCoeffs::new(0.0, 1.0); 3];
        let q = QuarticRecon { a2: 1.0, ..Default::default() };
        let (sub, full) = l2_increments(&one, &q);
        assert_relative_eq!(sub[0], 1.0 / 180.0);
        assert_relative_eq!(full, 1.0 / 180.0);
    }

    #[test]
    fn nonlinear_weight_examples() {
        let params = WeightParams::default();
        let d = [0.1, 0.6, 0.3];
        let w = nonlinear_weights(&d, &[0.0; 3], 0.0, &params);
        for k in 0..3 {
            assert_relative_eq!(w[k], d[k], epsilon = 1e-15);
        }

        let w = nonlinear_weights(&d, &[4.0, 1.0, 1.0], 1.0, &params);
        assert!(w.iter().all(|&x| x >= 0.0));
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(w[0] / d[0] > w[1] / d[1]);
        // hand evaluation: γ = d·(1/2 + sqrt ratio) with ratios ≈ 4, 1, 1
        let g0 = 0.1 * (0.5 + ((4.0 + 1e-7) / (1.0 + 1e-7f64)).sqrt());
        let g1 = 0.6 * 1.5;
        let g2 = 0.3 * 1.5;
        assert_relative_eq!(w[0], g0 / (g0 + g1 + g2), epsilon = 1e-14);
    }

    #[test]
    fn reconstruct_examples() {
        let params = WeightParams::default();
        let r = reconstruct_wpfc(&[0.8; 5], 0.4, 1, BoundsMode::Extended, &params).unwrap();
        assert_eq!(r.blend(), QuadraticRecon::new(0.8, 0.0, 0.0));
        let d = optimal_weights(0.4, 1).unwrap();
        for k in 0..3 {
            assert_relative_eq!(r.weights[k], d[k], epsilon = 1e-15);
        }

        // a zero-mean cell with zero floor is forced flat
        let r = reconstruct_wpfc(&squares(), 0.0, 1, BoundsMode::Extended, &params).unwrap();
        assert_eq!(r.blend().a2, 0.0);
        let lifted = squares().map(|v| v + 1.0);
        let r = reconstruct_wpfc(&lifted, 0.0, 1, BoundsMode::Extended, &params).unwrap();
        let b = r.blend();
        assert_relative_eq!(b.a1, 0.0, epsilon = 1e-15);
        assert_relative_eq!(b.a2, 1.0, epsilon = 1e-15);
        assert!(reconstruct_wpfc(&squares(), 1.5, 1, BoundsMode::Extended, &params).is_err());
    }

    proptest! {
        #[test]
        fn fast_path_matches_public_pipeline(
            s in prop::array::uniform5(0.0..1.0f64),
            xi in -1.0..1.0f64,
            compact in any::<bool>(),
        ) {
            let mode = if compact { BoundsMode::Compact } else { BoundsMode::Extended };
            let sign = if xi > 0.0 { 1 } else { -1 };
            let params = WeightParams::default();
            let slow = reconstruct_wpfc(&s, xi, sign, mode, &params).unwrap().blend();
            let fast = blended_wpfc(&s, &optimal_weights_abs(xi.abs(), xi > 0.0), mode, &params);
            prop_assert!((slow.a1 - fast.a1).abs() <= 1e-14);
            prop_assert!((slow.a2 - fast.a2).abs() <= 1e-14);
        }

        #[test]
        fn blend_is_bounded_and_positive(s in prop::array::uniform5(0.0..1.0f64), xi in -1.0..1.0f64) {
            let sign = if xi > 0.0 { 1 } else { -1 };
            let r = reconstruct_wpfc(&s, xi, sign, BoundsMode::Extended, &WeightParams::default()).unwrap();
            prop_assert!(r.weights.iter().all(|&w| w >= 0.0));
            prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
            let (f_min, f_max) = pfc::stencil_bounds(&s, BoundsMode::Extended);
            let b = r.blend();
            for i in 0..=1000 {
                let v = b.eval(-0.5 + i as f64 / 1000.0);
                prop_assert!(v >= f_min - 1e-12 && v <= f_max + 1e-12);
                prop_assert!(v >= -1e-12);
            }
        }
    }
}
