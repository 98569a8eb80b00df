//! Checks shared by the property suite and the acceptance run. Each returns
//! a one-line description of the worst case seen, or the first violation.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wpfc::engine::{linear5_reconstruct, outgoing_flux, reconstruct_cell};
use wpfc::pfc::{stencil_bounds, BoundsMode};
use wpfc::wpfc::{optimal_weights, quartic_fit, reconstruct_wpfc};
use wpfc::{QuadraticRecon, Scheme, WeightParams};

pub type Check = Result<String, String>;

/// Smooth, random, spiky and near-constant non-negative stencils over a
/// wide range of magnitudes.
pub fn random_stencil(rng: &mut ChaCha8Rng) -> [f64; 5] {
    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
    let mut s = [0.0; 5];
    match rng.gen_range(0..4) {
        0 => {
            let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.3));
            for (i, v) in s.iter_mut().enumerate() {
                let x = i as f64 - 2.0;
                *v = (1.0 + a * (b * x + c).sin()).max(0.0);
            }
        }
        1 => s.iter_mut().for_each(|v| *v = rng.gen_range(0.0..1.0)),
        2 => s.iter_mut().for_each(|v| *v = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) }),
        _ => {
            let base = rng.gen_range(0.1..1.0);
            s.iter_mut().for_each(|v| *v = base * (1.0 + 1e-6 * rng.gen_range(-1.0..1.0)));
        }
    }
    s.map(|v| v * scale)
}

/// Extremes of the quadratic over the cell.
pub fn range_on_cell(p: &QuadraticRecon) -> (f64, f64) {
    let mut lo = p.eval(-0.5).min(p.eval(0.5));
    let mut hi = p.eval(-0.5).max(p.eval(0.5));
    if p.a2 != 0.0 {
        let x = -p.a1 / (2.0 * p.a2);
        if x.abs() < 0.5 {
            lo = lo.min(p.eval(x));
            hi = hi.max(p.eval(x));
        }
    }
    (lo, hi)
}

fn bounds_mode(scheme: Scheme) -> BoundsMode {
    match scheme {
        Scheme::Pfc3Compact => BoundsMode::Compact,
        _ => BoundsMode::Extended,
    }
}

/// Limited reconstructions stay within their cell bounds (hence ≥ 0) and
/// keep the cell mean.
pub fn reconstruction_properties(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = WeightParams::default();
    let (mut worst_bound, mut worst_mean) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let s = random_stencil(&mut rng);
        let xi = rng.gen_range(-1.0..=1.0);
        let sign = if xi < 0.0 { -1 } else { 1 };
        let scale = s.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for scheme in [Scheme::Pfc3Extended, Scheme::Pfc3Compact, Scheme::Wpfc5] {
            let p = reconstruct_cell(scheme, &s, xi, sign, &params).map_err(|e| e.to_string())?;
            let (f_min, f_max) = stencil_bounds(&s, bounds_mode(scheme));
            let (lo, hi) = range_on_cell(&p);
            let excess = ((f_min - lo).max(hi - f_max).max(-lo)) / scale;
            let mean_err = (p.integral(-0.5, 0.5) - s[2]).abs() / scale;
            if excess > 1e-12 || mean_err > 1e-14 {
                return Err(format!(
                    "{scheme} at {s:?}, xi {xi}: range [{lo:e}, {hi:e}] vs [{f_min:e}, {f_max:e}], mean error {mean_err:e}"
                ));
            }
            worst_bound = worst_bound.max(excess);
            worst_mean = worst_mean.max(mean_err);
        }
    }
    Ok(format!("{samples} stencils, worst bound excess {worst_bound:.1e}, worst mean error {worst_mean:.1e}"))
}

/// Simpson's rule on the outgoing segment equals the exact integral.
pub fn simpson_matches_antiderivative(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = QuadraticRecon::new(rng.gen_range(0.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let xi: f64 = rng.gen_range(-1.0..=1.0);
        let sign = if xi < 0.0 { -1 } else { 1 };
        let flux = outgoing_flux(&p, xi, sign).map_err(|e| e.to_string())?;
        let exact = if sign > 0 { p.integral(0.5 - xi, 0.5) } else { p.integral(-0.5, -0.5 - xi) };
        let err = (flux - exact).abs();
        if err > 1e-14 {
            return Err(format!("{p:?} xi {xi}: Simpson {flux} vs {exact}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("{samples} quadratics, worst |Simpson - exact| {worst:.1e}"))
}

/// The unlimited blend reproduces the outflow of the quartic through the
/// five cell means.
pub fn linear5_equals_quartic_flux(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let s: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let xi: f64 = rng.gen_range(-1.0..=1.0);
        let sign = if xi < 0.0 { -1 } else { 1 };
        let p = linear5_reconstruct(&s, xi, sign).map_err(|e| e.to_string())?;
        let flux = outgoing_flux(&p, xi, sign).map_err(|e| e.to_string())?;
        let q = quartic_fit(&s);
        let exact = if sign > 0 { q.integral(0.5 - xi, 0.5) } else { q.integral(-0.5, -0.5 - xi) };
        let err = (flux - exact).abs();
        if err > 1e-12 {
            return Err(format!("{s:?} xi {xi}: blend {flux} vs quartic {exact}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("{samples} stencils, worst flux mismatch {worst:.1e}"))
}

/// Constant data make every substencil increment equal, so the nonlinear
/// weights collapse onto the optimal ones.
pub fn weights_equal_optimal_on_constants(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = WeightParams::default();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let c = 10f64.powf(rng.gen_range(-3.0..3.0));
        let xi: f64 = rng.gen_range(-1.0..=1.0);
        let sign = if xi < 0.0 { -1 } else { 1 };
        let r = reconstruct_wpfc(&[c; 5], xi, sign, BoundsMode::Extended, &params).map_err(|e| e.to_string())?;
        let d = optimal_weights(xi, sign).map_err(|e| e.to_string())?;
        let err = r.weights.iter().zip(&d).map(|(w, d)| (w - d).abs()).fold(0.0, f64::max);
        if err > 1e-14 {
            return Err(format!("c {c} xi {xi}: w {:?} vs d {d:?}", r.weights));
        }
        worst = worst.max(err);
    }
    Ok(format!("{samples} constant stencils, worst |w - d| {worst:.1e}"))
}

/// Optimal weights sum to one and are non-negative for every displacement.
pub fn optimal_weights_partition_unity(points: usize) -> Check {
    let mut worst = 0.0f64;
    for i in 0..=points {
        let xi = -1.0 + 2.0 * i as f64 / points as f64;
        let sign = if xi < 0.0 { -1 } else { 1 };
        let d = optimal_weights(xi, sign).map_err(|e| e.to_string())?;
        let err = (d.iter().sum::<f64>() - 1.0).abs();
        if err > 1e-14 || d.iter().any(|&x| x < 0.0) {
            return Err(format!("xi {xi}: d {d:?}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("{} displacements, worst |Σd - 1| {worst:.1e}", points + 1))
}
