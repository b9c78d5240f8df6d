//! Analytic partials of the on-barrier Lie derivative and the implicit slope
//! functions against finite differences of the plain function value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shieldnn_core::{bisect_root, LieContext};
use std::f64::consts::PI;

const POINTS: usize = 1000;
const REL_TOL: f64 = 1e-6;

/// Richardson-extrapolated central difference, fourth order.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * c(h / 2.0) - c(h)) / 3.0
}

fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * c(h / 2.0) - c(h)) / 3.0
}

/// `β` on the level set of `L` through `(xi, beta)`, evaluated at `xi + dx`.
fn level_curve(ctx: &LieContext, xi: f64, beta: f64, dx: f64) -> f64 {
    let c = ctx.lie(xi, beta);
    let f = |b: f64| ctx.lie(xi + dx, b) - c;
    let mut w = 1e-4;
    while f(beta - w).signum() == f(beta + w).signum() {
        w *= 2.0;
        assert!(w < 1.0, "no level crossing near ({xi}, {beta})");
    }
    bisect_root(f, beta - w, beta + w, 0.0).unwrap()
}

fn contexts() -> Vec<LieContext> {
    use shieldnn_core::{BarrierParams, VehicleParams};
    vec![
        LieContext::reference(),
        LieContext::new(VehicleParams::new(1.5, 1.5, 0.6, 15.0).unwrap(), BarrierParams::new(3.0, 0.7, None).unwrap()),
    ]
}

/// Largest `|analytic - fd| / max(|analytic|, floor)` over random points.
fn worst(ctx: &LieContext, seed: u64, floor: f64, pair: impl Fn(&LieContext, f64, f64) -> Option<(f64, f64)>) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bm = ctx.beta_max();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < POINTS {
        let xi = rng.random_range(-PI..PI);
        let beta = rng.random_range(-bm..bm);
        let Some((a, fd)) = pair(ctx, xi, beta) else { continue };
        n += 1;
        worst = worst.max((a - fd).abs() / a.abs().max(floor));
    }
    worst
}

/// Magnitude below which a partial counts as zero: relative error is measured
/// against this instead.
fn floor(ctx: &LieContext) -> f64 {
    let rho = 1.0 / ctx.barrier.r_bar();
    1e-3 * rho * rho
}

#[test]
fn first_partials() {
    for (k, ctx) in contexts().iter().enumerate() {
        let fl = floor(ctx);
        let e = worst(ctx, 10 + k as u64, fl, |c, x, b| Some((c.lie_d_xi(x, b), d1(|t| c.lie(t, b), x, 1e-3))));
        assert!(e < REL_TOL, "dL/dxi rel err {e}");
        let e = worst(ctx, 20 + k as u64, fl, |c, x, b| Some((c.lie_d_beta(x, b), d1(|t| c.lie(x, t), b, 1e-3))));
        assert!(e < REL_TOL, "dL/dbeta rel err {e}");
    }
}

#[test]
fn second_partials() {
    for (k, ctx) in contexts().iter().enumerate() {
        let fl = floor(ctx);
        let e = worst(ctx, 30 + k as u64, fl, |c, x, b| Some((c.lie_d2_xi(x, b), d2(|t| c.lie(t, b), x, 1e-2))));
        assert!(e < REL_TOL, "d2L/dxi2 rel err {e}");
        let e = worst(ctx, 40 + k as u64, fl, |c, x, b| Some((c.lie_d2_beta(x, b), d2(|t| c.lie(x, t), b, 1e-2))));
        assert!(e < REL_TOL, "d2L/dbeta2 rel err {e}");
        let e = worst(ctx, 50 + k as u64, fl, |c, x, b| {
            Some((c.lie_d2_xibeta(x, b), d1(|t| d1(|s| c.lie(t, s), b, 1e-3), x, 1e-3)))
        });
        assert!(e < REL_TOL, "d2L/dxi dbeta rel err {e}");
    }
}

/// Points where the level set is a graph over `xi` with slope at most 1,
/// away from stationary points of `L`.
fn well_conditioned(ctx: &LieContext, xi: f64, beta: f64) -> bool {
    let lb = ctx.lie_d_beta(xi, beta).abs();
    let lx = ctx.lie_d_xi(xi, beta).abs();
    lb > lx.max(floor(ctx) * 100.0) && xi.abs() < PI - 0.05
}

#[test]
fn implicit_slope() {
    for (k, ctx) in contexts().iter().enumerate() {
        let e = worst(ctx, 60 + k as u64, 1e-3, |c, x, b| {
            if !well_conditioned(c, x, b) {
                return None;
            }
            let fd = d1(|t| level_curve(c, x, b, t - x), x, 3e-4);
            Some((c.gamma_prime(x, b).unwrap(), fd))
        });
        assert!(e < REL_TOL, "gamma' rel err {e}");
    }
}

#[test]
fn implicit_curvature() {
    for (k, ctx) in contexts().iter().enumerate() {
        let e = worst(ctx, 70 + k as u64, 1e-2, |c, x, b| {
            if !well_conditioned(c, x, b) {
                return None;
            }
            let fd = d2(|t| level_curve(c, x, b, t - x), x, 2e-3);
            Some((c.gamma_second(x, b).unwrap(), fd))
        });
        assert!(e < REL_TOL, "gamma'' rel err {e}");
    }
}
