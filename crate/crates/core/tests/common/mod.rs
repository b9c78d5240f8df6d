#![allow(dead_code)]

use shieldnn_core::synthesis::{synthesize, Synthesis, SynthesisConfig};
use shieldnn_core::{verify, LieContext, VerificationCertificate, VerifyConfig};

pub fn reference() -> (LieContext, VerificationCertificate, Synthesis) {
    let ctx = LieContext::reference();
    let cert = verify(&ctx, &VerifyConfig::default()).unwrap();
    assert!(cert.is_verified());
    let syn = synthesize(&cert, &SynthesisConfig::default()).unwrap();
    (ctx, cert, syn)
}

/// Root of `L(xi, ·)` on `[-β_max, β_max]` by plain bisection, written
/// independently of the library's trace.
pub fn boundary_oracle(ctx: &LieContext, xi: f64) -> f64 {
    let bm = ctx.beta_max();
    let (mut lo, mut hi) = (-bm, bm);
    let f_lo = ctx.lie(xi, lo);
    if f_lo >= 0.0 {
        return lo;
    }
    assert!(ctx.lie(xi, hi) > 0.0, "no boundary at xi = {xi}");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ctx.lie(xi, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `max(-β_max, l(xi))` extended by `-β_max` where no boundary exists.
pub fn lower_envelope(ctx: &LieContext, xi0: f64, xi: f64) -> f64 {
    if xi >= xi0 {
        boundary_oracle(ctx, xi).max(-ctx.beta_max())
    } else {
        -ctx.beta_max()
    }
}

/// `min(β_max, u(xi))` with `u(xi) = -l(-xi)`.
pub fn upper_envelope(ctx: &LieContext, xi0: f64, xi: f64) -> f64 {
    -lower_envelope(ctx, xi0, -xi)
}

pub fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}
