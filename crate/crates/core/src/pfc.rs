//! Third-order positive and flux conservative (PFC) reconstruction.
//!
//! A cell's quadratic is built from the centered optimal coefficients and then
//! the two one-sided slopes `a1 ± a2` are clipped into ranges derived from the
//! cell bounds `[f_min, f_max]`. The clip is scaled by `α±`, which are chosen
//! per cell from how much of the admissible range the optimal slopes need.

use crate::error::{Error, Result};
use crate::kernel::{median3, FastMinMax, QuadraticRecon};

/// Guard added to the α-optimization denominators and ratios.
pub const DEFAULT_EPS: f64 = 1e-7;

/// Weight of the upwind difference in the interface estimates of the
/// extended bounds. 2/3 is the value implied by a quadratic.
pub const EXTENDED_R: f64 = 2.0 / 3.0;

/// Roundoff allowance for a cell value sitting just outside its bounds.
pub const BOUNDS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// Five-point bounds built from extrapolated interface estimates.
    Extended,
    /// Three-point bounds.
    Compact,
}

/// Cell bounds and the admissible ranges of `a1 + a2` (plus) and `a1 - a2`
/// (minus) that keep the quadratic inside them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeBounds {
    pub f_min: f64,
    pub f_max: f64,
    pub f_min_plus: f64,
    pub f_max_plus: f64,
    pub f_min_minus: f64,
    pub f_max_minus: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaPair {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

/// Centered coefficients that make the quadratic exact for quadratic data.
#[inline(always)]
pub fn optimal_coeffs_centered(f_m1: f64, f_0: f64, f_p1: f64) -> (f64, f64) {
    (0.5 * (f_p1 - f_m1), 0.5 * (f_p1 - 2.0 * f_0 + f_m1))
}

/// Extended positivity-preserving, non-oscillatory cell bounds on the five-point
/// stencil `[f_{j-2}, .., f_{j+2}]`.
#[inline(always)]
pub fn extended_bounds(s: &[f64; 5], r: f64) -> (f64, f64) {
    let [fm2, fm1, f0, fp1, fp2] = *s;
    let q = 1.0 - r;
    // interface j-1/2
    let l_lo = fm1 + r * (fm1 - fm2) + q * (f0 - fm1);
    let r_lo = f0 + r * (f0 - fp1) + q * (fm1 - f0);
    // interface j+1/2
    let l_hi = f0 + r * (f0 - fm1) + q * (fp1 - f0);
    let r_hi = fp1 + r * (fp1 - fp2) + q * (f0 - fp1);

    let max_lo = fm1.fmax(f0).fmax(l_lo.fmin(r_lo));
    let min_lo = fm1.fmin(f0).fmin(l_lo.fmax(r_lo));
    let max_hi = f0.fmax(fp1).fmax(l_hi.fmin(r_hi));
    let min_hi = f0.fmin(fp1).fmin(l_hi.fmax(r_hi));

    (min_lo.fmin(min_hi).fmax(0.0), max_lo.fmax(max_hi))
}

/// Compact three-point bounds.
#[inline(always)]
pub fn compact_bounds(f_m1: f64, f_0: f64, f_p1: f64) -> (f64, f64) {
    let ext_m = 2.0 * f_0 - f_m1;
    let ext_p = 2.0 * f_0 - f_p1;
    let f_max = f_m1.fmax(f_p1).fmax(ext_m.fmin(ext_p));
    let f_min = f_m1.fmin(f_p1).fmin(ext_m.fmax(ext_p)).fmax(0.0);
    (f_min, f_max)
}

#[inline(always)]
pub fn stencil_bounds(s: &[f64; 5], mode: BoundsMode) -> (f64, f64) {
    match mode {
        BoundsMode::Extended => extended_bounds(s, EXTENDED_R),
        BoundsMode::Compact => compact_bounds(s[1], s[2], s[3]),
    }
}

/// Slope limits for a cell mean `f_0` inside `[f_min, f_max]`.
///
/// Values outside the bounds by more than [`BOUNDS_TOL`] are reported; smaller
/// excursions are clamped.
pub fn slope_range(f_0: f64, bounds: (f64, f64)) -> Result<SlopeBounds> {
    let (f_min, f_max) = bounds;
    if f_0 < f_min - BOUNDS_TOL || f_0 > f_max + BOUNDS_TOL || f_min > f_max {
        return Err(Error::OutOfBounds { value: f_0, min: f_min, max: f_max });
    }
    Ok(slope_range_clamped(f_0, f_min, f_max))
}

/// Infallible variant used on the hot path. A mean outside its bounds (only
/// possible for a negative cell under the zero floor) is clamped, which
/// collapses the slope ranges and forces a flat reconstruction.
#[inline(always)]
pub fn slope_range_clamped(f_0: f64, f_min: f64, f_max: f64) -> SlopeBounds {
    let f_0 = f_0.fmax(f_min).fmin(f_max);
    let f_min_plus = 3.0 * (2.0 * (f_0 - f_max)).fmax(f_min - f_0);
    let f_max_plus = 3.0 * (2.0 * (f_0 - f_min)).fmin(f_max - f_0);
    SlopeBounds {
        f_min,
        f_max,
        f_min_plus,
        f_max_plus,
        f_min_minus: -f_max_plus,
        f_max_minus: -f_min_plus,
    }
}

#[inline(always)]
fn beta(s: f64, lo: f64, hi: f64, eps: f64) -> f64 {
    let b = if s > 0.0 { s / (hi + eps) } else { s / (lo - eps) };
    (b + eps).fmin(1.0)
}

/// Optimized `α±`: each side gets a share of the admissible range in
/// proportion to how much of it the unlimited slope would use.
#[inline(always)]
pub fn alpha_weights(a1pa2: f64, a1ma2: f64, slopes: &SlopeBounds, eps: f64) -> AlphaPair {
    let bp = beta(a1pa2, slopes.f_min_plus, slopes.f_max_plus, eps);
    let bm = beta(a1ma2, slopes.f_min_minus, slopes.f_max_minus, eps);
    let inv = 1.0 / (bp + bm);
    AlphaPair { alpha_plus: bp * inv, alpha_minus: bm * inv }
}

/// Median-clips `a1 ± a2` into `[α± f_min±, α± f_max±]` and returns the
/// recombined `(a1, a2)`.
#[inline(always)]
pub fn corrected_coeffs(a1_opt: f64, a2_opt: f64, alphas: &AlphaPair, slopes: &SlopeBounds) -> (f64, f64) {
    let sp = median3(
        a1_opt + a2_opt,
        alphas.alpha_plus * slopes.f_min_plus,
        alphas.alpha_plus * slopes.f_max_plus,
    );
    let sm = median3(
        a1_opt - a2_opt,
        alphas.alpha_minus * slopes.f_min_minus,
        alphas.alpha_minus * slopes.f_max_minus,
    );
    (0.5 * (sp + sm), 0.5 * (sp - sm))
}

/// Full PFC pipeline for the cell at the center of `stencil`.
#[inline(always)]
pub fn reconstruct_pfc(stencil: &[f64; 5], mode: BoundsMode, eps: f64) -> QuadraticRecon {
    let f0 = stencil[2];
    let (a1, a2) = optimal_coeffs_centered(stencil[1], f0, stencil[3]);
    let (f_min, f_max) = stencil_bounds(stencil, mode);
    let slopes = slope_range_clamped(f0, f_min, f_max);
    let alphas = alpha_weights(a1 + a2, a1 - a2, &slopes, eps);
    let (a1, a2) = corrected_coeffs(a1, a2, &alphas, &slopes);
    QuadraticRecon::new(f0, a1, a2)
}

/// PFC with a fixed `α+ = α- = alpha`; 1/3 recovers the original slope
/// corrector. Only used to compare against the optimized rule.
#[cfg(test)]
pub(crate) fn reconstruct_pfc_fixed_alpha(stencil: &[f64; 5], mode: BoundsMode, alpha: f64) -> QuadraticRecon {
    let f0 = stencil[2];
    let (a1, a2) = optimal_coeffs_centered(stencil[1], f0, stencil[3]);
    let (f_min, f_max) = stencil_bounds(stencil, mode);
    let slopes = slope_range_clamped(f0, f_min, f_max);
    let alphas = AlphaPair { alpha_plus: alpha, alpha_minus: alpha };
    let (a1, a2) = corrected_coeffs(a1, a2, &alphas, &slopes);
    QuadraticRecon::new(f0, a1, a2)
}
