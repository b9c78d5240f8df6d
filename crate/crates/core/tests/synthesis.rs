mod common;

use common::{boundary_oracle, linspace, lower_envelope, reference, upper_envelope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shieldnn_core::synthesis::{build_tangent_pwl, export_relu, synthesize, trace_boundary, SynthesisConfig};
use shieldnn_core::verifier::Status;
use shieldnn_core::Error;
use std::f64::consts::PI;

const TRACE_TOL: f64 = 1e-9;
const SANDWICH_TOL: f64 = 1e-6;

#[test]
fn trace_endpoints_and_residuals() {
    let (ctx, cert, syn) = reference();
    let s = &syn.trace.samples;
    assert_eq!(s.len(), 512);
    assert_eq!(s[0].xi, cert.xi0);
    assert_eq!(s[0].beta, -ctx.beta_max());
    assert_eq!(s[511].xi, PI);
    assert!((s[511].beta - cert.beta0_pi.unwrap()).abs() < 1e-9);
    for p in s {
        assert!(ctx.lie(p.xi, p.beta).abs() <= TRACE_TOL);
        assert!((p.beta - boundary_oracle(&ctx, p.xi)).abs() < 1e-9);
    }
}

#[test]
fn trace_slopes_match_neighbor_differences() {
    let (_, _, syn) = reference();
    let s = &syn.trace.samples;
    for w in s.windows(3) {
        let fd = (w[2].beta - w[0].beta) / (w[2].xi - w[0].xi);
        assert!((fd - w[1].slope).abs() < 1e-3, "at xi = {}: {fd} vs {}", w[1].xi, w[1].slope);
    }
}

#[test]
fn traced_boundary_is_concave() {
    let (_, _, syn) = reference();
    for w in syn.trace.samples.windows(3) {
        let h = w[1].xi - w[0].xi;
        let second = (w[2].beta - 2.0 * w[1].beta + w[0].beta) / (h * h);
        assert!(second <= 1e-6, "second difference {second} at xi = {}", w[1].xi);
    }
}

#[test]
fn tangents_touch_and_overapproximate() {
    let (ctx, cert, syn) = reference();
    let g = &syn.filter.tangents;
    assert_eq!(g.lines.len(), 32);
    for l in &g.lines {
        // the tangency point is where the line meets the trace
        let p = syn
            .trace
            .samples
            .iter()
            .find(|p| (l.eval(p.xi) - p.beta).abs() < 1e-12 && (l.slope - p.slope).abs() < 1e-12)
            .expect("tangent line has a tangency sample");
        assert!((g.eval(p.xi) - p.beta).abs() <= TRACE_TOL);
    }
    for xi in linspace(cert.xi0, PI, 10_000) {
        let gap = g.eval(xi) - boundary_oracle(&ctx, xi);
        assert!(gap >= -TRACE_TOL, "tangent envelope below the boundary by {gap} at {xi}");
    }
}

#[test]
fn doubling_tangents_quarters_the_gap() {
    let (ctx, cert, syn) = reference();
    let xs: Vec<f64> = linspace(cert.xi0, PI, 4000).collect();
    let truth: Vec<f64> = xs.iter().map(|&x| boundary_oracle(&ctx, x)).collect();
    let gap = |k: usize| {
        let g = build_tangent_pwl(&syn.trace, k).unwrap();
        xs.iter().zip(&truth).map(|(&x, t)| g.eval(x) - t).fold(0.0, f64::max)
    };
    let (g16, g32, g64) = (gap(16), gap(32), gap(64));
    for (a, b) in [(g16, g32), (g32, g64)] {
        let ratio = a / b;
        assert!((3.0..=5.0).contains(&ratio), "gap ratio {ratio} ({g16}, {g32}, {g64})");
    }
}

#[test]
fn sandwich_condition() {
    let (ctx, cert, syn) = reference();
    let f = &syn.filter;
    assert!(f.margin > 0.0);
    for xi in linspace(-PI, PI, 10_000) {
        let lo = lower_envelope(&ctx, cert.xi0, xi);
        let hi = upper_envelope(&ctx, cert.xi0, xi);
        for (name, v) in [("lower", f.lower_at(xi)), ("upper", f.upper_at(xi))] {
            assert!(lo - SANDWICH_TOL <= v && v <= hi + SANDWICH_TOL, "{name}({xi}) = {v} outside [{lo}, {hi}]");
        }
        assert!(f.lower_at(xi) <= f.upper_at(xi));
    }
}

#[test]
fn breakpoint_margin_is_the_true_minimum() {
    let (_, _, syn) = reference();
    let f = &syn.filter;
    let sampled = linspace(-PI, PI, 100_000)
        .map(|x| f.upper_at(x) - f.lower_at(x))
        .fold(f64::INFINITY, f64::min);
    assert!(sampled >= f.margin - 1e-12, "sampled {sampled} below margin {}", f.margin);
    assert!(sampled - f.margin < 1e-3, "margin {} far below sampled minimum {sampled}", f.margin);
}

#[test]
fn explicit_bounds_agree_with_envelopes() {
    let (_, _, syn) = reference();
    let f = &syn.filter;
    for xi in linspace(-PI, PI, 10_000) {
        assert!((f.lower.eval(xi) - f.lower_at(xi)).abs() < 1e-12);
        assert!((f.upper.eval(xi) - f.upper_at(xi)).abs() < 1e-12);
    }
}

#[test]
fn overrides_are_safe_on_the_barrier() {
    let (ctx, _, syn) = reference();
    let f = &syn.filter;
    for xi in linspace(-PI, PI, 4096) {
        let lo = ctx.lie_on_barrier(xi, f.lower_at(xi), 1.0);
        let hi = ctx.lie_on_barrier(xi, f.upper_at(xi), 1.0);
        assert!(lo >= -1e-6 && hi >= -1e-6, "xi = {xi}: {lo}, {hi}");
    }
}

#[test]
fn relu_export_is_equivalent_and_reflects() {
    let (ctx, _, syn) = reference();
    let f = &syn.filter;
    let net = export_relu(f);
    net.validate().unwrap();
    let bm = ctx.beta_max();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let xi = rng.random_range(-PI..PI);
        let beta = rng.random_range(-1.2 * bm..1.2 * bm);
        let y = net.eval_filter(xi, beta);
        assert!((y - f.clamp(xi, beta)).abs() <= 1e-9, "({xi}, {beta})");
        assert!((net.eval_filter(-xi, -beta) + y).abs() <= 1e-9, "reflection at ({xi}, {beta})");
    }
}

#[test]
fn relu_worst_case_override() {
    let (ctx, cert, syn) = reference();
    let net = export_relu(&syn.filter);
    let y = net.eval_filter(PI, -ctx.beta_max());
    assert!(y >= cert.beta0_pi.unwrap() - TRACE_TOL);
    assert!((y - syn.filter.lower_at(PI)).abs() < 1e-9);
}

#[test]
fn pass_through_is_exact() {
    let (ctx, _, syn) = reference();
    let f = &syn.filter;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let bm = ctx.beta_max();
    let mut hits = 0;
    for _ in 0..10_000 {
        let xi = rng.random_range(-PI..PI);
        let beta = rng.random_range(-bm..bm);
        if f.lower_at(xi) <= beta && beta <= f.upper_at(xi) {
            assert_eq!(f.clamp(xi, beta).to_bits(), beta.to_bits());
            hits += 1;
        }
    }
    assert!(hits > 1000);
}

#[test]
fn synthesis_rejects_bad_inputs() {
    let (_, cert, syn) = reference();
    assert!(matches!(build_tangent_pwl(&syn.trace, 1), Err(Error::Config(_))));
    let cfg = SynthesisConfig { k_tangents: 1, ..SynthesisConfig::default() };
    assert!(matches!(synthesize(&cert, &cfg), Err(Error::Config(_))));
    let mut failed = cert.clone();
    failed.status = Status::Failed(shieldnn_core::verifier::PropertyId::P3);
    assert!(matches!(trace_boundary(&failed, 512, TRACE_TOL), Err(Error::NotVerified)));
}

#[test]
fn coarse_request_still_yields_positive_margin() {
    let (_, cert, _) = reference();
    let cfg = SynthesisConfig { k_tangents: 2, ..SynthesisConfig::default() };
    let syn = synthesize(&cert, &cfg).unwrap();
    assert!(syn.filter.margin > 0.0);
    assert!(syn.filter.tangents.lines.len() >= 2);
}
