//! Filter synthesis from a verified certificate.
//!
//! The lower boundary `l` on `[xi0, π]` is traced numerically, bounded from
//! above by the minimum of its tangent lines (they lie above a concave `l`, so
//! the clamp only ever shrinks the safe set), and clipped to the steering
//! range. The upper bound is the point reflection of the lower one.
//! The resulting clamp is exported as an exact ReLU network.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::barrier::LieContext;
use crate::certify::bisect_root;
use crate::error::{Error, Result};
use crate::verifier::VerificationCertificate;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceSample {
    pub xi: f64,
    pub beta: f64,
    /// `dl/dxi` from the implicit function theorem.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryTrace {
    pub xi0: f64,
    pub samples: Vec<TraceSample>,
}

/// `l(xi)` for `xi` in `[xi0, π]`: the root of `L(xi, ·)` on `[-β_max, β_max]`.
pub fn lower_boundary_at(ctx: &LieContext, xi: f64, tol: f64) -> Result<f64> {
    let bm = ctx.beta_max();
    let beta = bisect_root(|b| ctx.lie(xi, b), -bm, bm, 0.0)?;
    let residual = ctx.lie(xi, beta);
    if !(residual.abs() <= tol) {
        return Err(Error::Trace {
            xi,
            reason: format!("residual {residual} exceeds {tol}"),
        });
    }
    Ok(beta)
}

/// Samples `l` at `n` uniformly spaced points of `[xi0, π]`.
pub fn trace_boundary(cert: &VerificationCertificate, n: usize, tol: f64) -> Result<BoundaryTrace> {
    if !cert.is_verified() {
        return Err(Error::NotVerified);
    }
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 trace samples, got {n}")));
    }
    let ctx = &cert.ctx;
    let bm = ctx.beta_max();
    let xi0 = cert.xi0;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let xi = if i + 1 == n {
            PI
        } else {
            xi0 + (PI - xi0) * (i as f64) / ((n - 1) as f64)
        };
        let beta = if i == 0 {
            let residual = ctx.lie(xi, -bm);
            if !(residual.abs() <= tol) {
                return Err(Error::Trace {
                    xi,
                    reason: format!("residual {residual} at the lower corner exceeds {tol}"),
                });
            }
            -bm
        } else {
            lower_boundary_at(ctx, xi, tol)?
        };
        let slope = ctx.gamma_prime(xi, beta)?;
        samples.push(TraceSample { xi, beta, slope });
    }
    Ok(BoundaryTrace { xi0, samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn through(x: f64, y: f64, slope: f64) -> Self {
        Self {
            slope,
            intercept: y - slope * x,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Combiner {
    MinOfLines,
    MaxOfLines,
    Explicit,
}

/// Continuous piecewise-linear function of one variable.
///
/// `MinOfLines`/`MaxOfLines` evaluate the envelope of `lines`; `Explicit`
/// interpolates `breakpoints` and extends the end segments linearly. For the
/// envelope kinds `breakpoints` lists the envelope's kinks over the build
/// domain, endpoints included.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PwlFunction {
    pub combiner: Combiner,
    pub lines: Vec<Line>,
    pub breakpoints: Vec<(f64, f64)>,
}

impl PwlFunction {
    pub fn min_of_lines(lines: Vec<Line>, lo: f64, hi: f64) -> Result<Self> {
        let xs = envelope_kinks(&lines, lo, hi, false)?;
        let mut f = Self {
            combiner: Combiner::MinOfLines,
            lines,
            breakpoints: Vec::new(),
        };
        f.breakpoints = xs.into_iter().map(|x| (x, f.eval(x))).collect();
        Ok(f)
    }

    pub fn max_of_lines(lines: Vec<Line>, lo: f64, hi: f64) -> Result<Self> {
        let xs = envelope_kinks(&lines, lo, hi, true)?;
        let mut f = Self {
            combiner: Combiner::MaxOfLines,
            lines,
            breakpoints: Vec::new(),
        };
        f.breakpoints = xs.into_iter().map(|x| (x, f.eval(x))).collect();
        Ok(f)
    }

    pub fn explicit(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Config("an explicit PWL function needs two breakpoints".into()));
        }
        if breakpoints.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Config("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
        Ok(Self {
            combiner: Combiner::Explicit,
            lines: Vec::new(),
            breakpoints,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.combiner {
            Combiner::MinOfLines => self.lines.iter().map(|l| l.eval(x)).fold(f64::INFINITY, f64::min),
            Combiner::MaxOfLines => self.lines.iter().map(|l| l.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            Combiner::Explicit => {
                let bp = &self.breakpoints;
                let i = bp.partition_point(|&(bx, _)| bx <= x).clamp(1, bp.len() - 1);
                let (x0, y0) = bp[i - 1];
                let (x1, y1) = bp[i];
                if x == x0 {
                    return y0;
                }
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn breakpoint_xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.iter().map(|&(x, _)| x)
    }
}

/// Kinks of the lower (or upper) envelope of `lines` on `[lo, hi]`,
/// endpoints included.
fn envelope_kinks(lines: &[Line], lo: f64, hi: f64, upper: bool) -> Result<Vec<f64>> {
    if lines.is_empty() {
        return Err(Error::Config("envelope of zero lines".into()));
    }
    if !(lo < hi) {
        return Err(Error::Config(format!("empty envelope domain [{lo}, {hi}]")));
    }
    // the upper envelope of lines is the negated lower envelope of negated lines
    let s = if upper { -1.0 } else { 1.0 };
    let m = |l: &Line| s * l.slope;
    let at = |l: &Line, x: f64| s * l.eval(x);
    let better = |a: &Line, b: &Line, x: f64| {
        let (va, vb) = (at(a, x), at(b, x));
        va < vb || (va == vb && m(a) < m(b))
    };

    let mut active = 0;
    for (j, l) in lines.iter().enumerate() {
        if better(l, &lines[active], lo) {
            active = j;
        }
    }
    let mut xs = vec![lo];
    let mut x = lo;
    loop {
        let a = &lines[active];
        let mut next: Option<(f64, usize)> = None;
        for (j, l) in lines.iter().enumerate() {
            if m(l) >= m(a) {
                continue;
            }
            let cross = (at(l, 0.0) - at(a, 0.0)) / (m(a) - m(l));
            if !(cross > x && cross < hi) {
                continue;
            }
            let take = match next {
                None => true,
                Some((cx, cj)) => cross < cx || (cross == cx && m(l) < m(&lines[cj])),
            };
            if take {
                next = Some((cross, j));
            }
        }
        match next {
            Some((cx, j)) => {
                xs.push(cx);
                x = cx;
                active = j;
            }
            None => break,
        }
    }
    xs.push(hi);
    Ok(xs)
}

/// Minimum of `k` tangent lines to the trace, placed at equally spaced sample
/// indices (first and last included).
pub fn build_tangent_pwl(trace: &BoundaryTrace, k: usize) -> Result<PwlFunction> {
    let n = trace.samples.len();
    if k < 2 || k > n {
        return Err(Error::Config(format!(
            "tangent count must lie in [2, {n}], got {k}"
        )));
    }
    let lines = (0..k)
        .map(|i| {
            let idx = (i * (n - 1) + (k - 1) / 2) / (k - 1);
            let s = trace.samples[idx];
            Line::through(s.xi, s.beta, s.slope)
        })
        .collect();
    PwlFunction::min_of_lines(lines, -PI, PI)
}

/// The synthesized safety filter: steering is clamped into
/// `[lower(xi), upper(xi)]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterNetwork {
    pub beta_max: f64,
    /// Minimum of tangent lines, before clipping to `-β_max`.
    pub tangents: PwlFunction,
    /// `max(-β_max, tangents)` on `[-π, π]`.
    pub lower: PwlFunction,
    /// `-lower(-xi)` on `[-π, π]`.
    pub upper: PwlFunction,
    /// `min (upper - lower)` over `[-π, π]`.
    pub margin: f64,
}

impl FilterNetwork {
    #[inline]
    pub fn lower_at(&self, xi: f64) -> f64 {
        libm::fmax(-self.beta_max, self.tangents.eval(xi))
    }

    #[inline]
    pub fn upper_at(&self, xi: f64) -> f64 {
        -self.lower_at(-xi)
    }

    /// `min(upper, max(lower, beta))`.
    #[inline]
    pub fn clamp(&self, xi: f64, beta: f64) -> f64 {
        libm::fmin(self.upper_at(xi), libm::fmax(self.lower_at(xi), beta))
    }
}

/// Clips `tangents` to `-β_max`, mirrors it, and checks the two bounds never
/// cross.
pub fn assemble_filter(tangents: PwlFunction, beta_max: f64) -> Result<FilterNetwork> {
    if !(beta_max > 0.0) {
        return Err(Error::Domain {
            what: "beta_max",
            value: beta_max,
        });
    }
    let mut xs: Vec<f64> = tangents.breakpoint_xs().collect();
    if xs.first() != Some(&-PI) || xs.last() != Some(&PI) {
        return Err(Error::Config("tangent envelope must span [-pi, pi]".into()));
    }
    // crossings with the clip level
    let mut extra = Vec::new();
    for w in xs.windows(2) {
        let (g0, g1) = (tangents.eval(w[0]) + beta_max, tangents.eval(w[1]) + beta_max);
        if (g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0) {
            let x = w[0] + (w[1] - w[0]) * g0 / (g0 - g1);
            if x > w[0] && x < w[1] {
                extra.push(x);
            }
        }
    }
    xs.extend(extra);
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let lower_at = |x: f64| libm::fmax(-beta_max, tangents.eval(x));
    let lower = PwlFunction::explicit(xs.iter().map(|&x| (x, lower_at(x))).collect())?;
    let upper = PwlFunction::explicit(xs.iter().rev().map(|&x| (-x, -lower_at(x))).collect())?;

    let mut filter = FilterNetwork {
        beta_max,
        tangents,
        lower,
        upper,
        margin: f64::INFINITY,
    };
    // both bounds are linear between points of this set
    let mut probe: Vec<f64> = xs.iter().flat_map(|&x| [x, -x]).collect();
    probe.sort_by(f64::total_cmp);
    probe.dedup();
    filter.margin = probe
        .iter()
        .map(|&x| filter.upper_at(x) - filter.lower_at(x))
        .fold(f64::INFINITY, f64::min);
    if !(filter.margin > 0.0) {
        return Err(Error::Synthesis {
            margin: filter.margin,
            k_tangents: filter.tangents.lines.len(),
        });
    }
    Ok(filter)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SynthesisConfig {
    pub k_tangents: usize,
    pub n_samples: usize,
    pub trace_tol: f64,
    /// Doubling `k_tangents` on a non-positive margin stops past this.
    pub max_tangents: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            k_tangents: 32,
            n_samples: 512,
            trace_tol: 1e-9,
            max_tangents: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Synthesis {
    pub trace: BoundaryTrace,
    pub filter: FilterNetwork,
}

pub fn synthesize(cert: &VerificationCertificate, config: &SynthesisConfig) -> Result<Synthesis> {
    let mut n = config.n_samples;
    let mut trace = trace_boundary(cert, n, config.trace_tol)?;
    let mut k = config.k_tangents;
    loop {
        if k > n {
            n = k;
            trace = trace_boundary(cert, n, config.trace_tol)?;
        }
        let tangents = build_tangent_pwl(&trace, k)?;
        match assemble_filter(tangents, cert.ctx.beta_max()) {
            Ok(filter) => return Ok(Synthesis { trace, filter }),
            Err(Error::Synthesis { .. }) if k * 2 <= config.max_tangents => k *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Activation {
    Relu,
    Identity,
}

/// Dense layer `y = act(W x + b)` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

/// Feed-forward network; the filter export maps `(xi, beta)` to the filtered
/// `beta`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReluNetwork {
    pub layers: Vec<Layer>,
}

impl ReluNetwork {
    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.cols)
    }

    pub fn validate(&self) -> Result<()> {
        let mut width = self.input_dim();
        for (i, l) in self.layers.iter().enumerate() {
            if l.cols != width || l.weights.len() != l.rows * l.cols || l.bias.len() != l.rows {
                return Err(Error::Config(format!("layer {i} has inconsistent shape")));
            }
            width = l.rows;
        }
        Ok(())
    }

    /// # Panics
    /// If `input` does not match the first layer's width.
    pub fn eval(&self, input: &[f64]) -> Vec<f64> {
        let mut x = input.to_vec();
        for l in &self.layers {
            assert_eq!(x.len(), l.cols, "input width mismatch");
            let y = l
                .weights
                .chunks_exact(l.cols)
                .zip(&l.bias)
                .map(|(row, b)| {
                    let s = row.iter().zip(&x).fold(*b, |acc, (w, v)| acc + w * v);
                    match l.activation {
                        Activation::Relu => libm::fmax(s, 0.0),
                        Activation::Identity => s,
                    }
                })
                .collect();
            x = y;
        }
        x
    }

    pub fn eval_filter(&self, xi: f64, beta: f64) -> f64 {
        self.eval(&[xi, beta])[0]
    }
}

#[derive(Clone)]
struct Affine {
    w: Vec<f64>,
    b: f64,
}

impl Affine {
    fn unit(i: usize, width: usize) -> Self {
        let mut w = vec![0.0; width];
        w[i] = 1.0;
        Self { w, b: 0.0 }
    }

    fn combine(&self, sa: f64, other: &Self, sb: f64) -> Self {
        Self {
            w: self.w.iter().zip(&other.w).map(|(a, b)| sa * a + sb * b).collect(),
            b: sa * self.b + sb * other.b,
        }
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            w: self.w.iter().map(|a| s * a).collect(),
            b: s * self.b,
        }
    }

    fn shift(mut self, c: f64) -> Self {
        self.b += c;
        self
    }
}

/// A value to be reconstructed after the next ReLU layer from the units it
/// occupies.
enum Pending {
    /// `relu(x) - relu(-x)`.
    Carry(usize),
    /// `relu(a) - relu(-a) - relu(a - b)`.
    Min(usize),
    /// `relu(a) - relu(-a) + relu(b - a)`.
    Max(usize),
}

#[derive(Default)]
struct Builder {
    layers: Vec<Layer>,
    units: Vec<Affine>,
}

impl Builder {
    fn push_unit(&mut self, a: Affine) -> usize {
        self.units.push(a);
        self.units.len() - 1
    }

    fn carry(&mut self, x: &Affine) -> Pending {
        let i = self.push_unit(x.clone());
        self.push_unit(x.scale(-1.0));
        Pending::Carry(i)
    }

    fn min(&mut self, a: &Affine, b: &Affine) -> Pending {
        let i = self.push_unit(a.clone());
        self.push_unit(a.scale(-1.0));
        self.push_unit(a.combine(1.0, b, -1.0));
        Pending::Min(i)
    }

    fn max(&mut self, a: &Affine, b: &Affine) -> Pending {
        let i = self.push_unit(a.clone());
        self.push_unit(a.scale(-1.0));
        self.push_unit(b.combine(1.0, a, -1.0));
        Pending::Max(i)
    }

    /// Emits the staged units as one ReLU layer and returns the pending
    /// values as affine functions of its outputs.
    fn flush(&mut self, pending: &[Pending]) -> Vec<Affine> {
        let units = core::mem::take(&mut self.units);
        let cols = units[0].w.len();
        let width = units.len();
        self.layers.push(Layer {
            rows: width,
            cols,
            weights: units.iter().flat_map(|u| u.w.iter().copied()).collect(),
            bias: units.iter().map(|u| u.b).collect(),
            activation: Activation::Relu,
        });
        let u = |i| Affine::unit(i, width);
        pending
            .iter()
            .map(|p| match *p {
                Pending::Carry(i) => u(i).combine(1.0, &u(i + 1), -1.0),
                Pending::Min(i) => u(i).combine(1.0, &u(i + 1), -1.0).combine(1.0, &u(i + 2), -1.0),
                Pending::Max(i) => u(i).combine(1.0, &u(i + 1), -1.0).combine(1.0, &u(i + 2), 1.0),
            })
            .collect()
    }

    fn finish(mut self, outputs: &[Affine]) -> ReluNetwork {
        let cols = outputs[0].w.len();
        self.layers.push(Layer {
            rows: outputs.len(),
            cols,
            weights: outputs.iter().flat_map(|u| u.w.iter().copied()).collect(),
            bias: outputs.iter().map(|u| u.b).collect(),
            activation: Activation::Identity,
        });
        ReluNetwork { layers: self.layers }
    }
}

/// Exports the filter clamp as a ReLU network of input `(xi, beta)`, exact up
/// to floating-point summation order.
pub fn export_relu(filter: &FilterNetwork) -> ReluNetwork {
    let bm = filter.beta_max;
    let xi = Affine::unit(0, 2);
    let mut beta = Affine::unit(1, 2);
    // lower envelope candidates t_i(xi) and their reflections -t_i(-xi)
    let mut lows: Vec<Affine> = filter
        .tangents
        .lines
        .iter()
        .map(|l| xi.scale(l.slope).shift(l.intercept))
        .collect();
    let mut ups: Vec<Affine> = filter
        .tangents
        .lines
        .iter()
        .map(|l| xi.scale(l.slope).shift(-l.intercept))
        .collect();

    let mut b = Builder::default();
    while lows.len() > 1 || ups.len() > 1 {
        let mut pending = Vec::new();
        let (nl, nu) = (lows.len(), ups.len());
        for pair in lows.chunks(2) {
            pending.push(match pair {
                [a, c] => b.min(a, c),
                [a] => b.carry(a),
                _ => unreachable!(),
            });
        }
        for pair in ups.chunks(2) {
            pending.push(match pair {
                [a, c] => b.max(a, c),
                [a] => b.carry(a),
                _ => unreachable!(),
            });
        }
        pending.push(b.carry(&beta));
        let mut out = b.flush(&pending);
        beta = out.pop().expect("beta carried");
        let nl2 = nl.div_ceil(2);
        ups = out.split_off(nl2);
        lows = out;
        debug_assert_eq!(ups.len(), nu.div_ceil(2));
    }
    let (g, big_u) = (lows.pop().expect("one lower"), ups.pop().expect("one upper"));

    // lower = -bm + relu(g + bm), upper = bm - relu(bm - U)
    let i_lo = b.push_unit(g.shift(bm));
    let i_up = b.push_unit(big_u.scale(-1.0).shift(bm));
    let p_beta = b.carry(&beta);
    let mut out = b.flush(&[p_beta]);
    let width = b.layers.last().expect("layer").rows;
    let lower = Affine::unit(i_lo, width).shift(-bm);
    let upper = Affine::unit(i_up, width).scale(-1.0).shift(bm);
    let beta = out.pop().expect("beta");

    // x = max(lower, beta) = lower + relu(beta - lower)
    let p_x = b.max(&lower, &beta);
    let p_up = b.carry(&upper);
    let out = b.flush(&[p_x, p_up]);
    let (x, upper) = (&out[0], &out[1]);

    // min(upper, x) = upper - relu(upper - x)
    let p = b.min(upper, x);
    let out = b.flush(&[p]);
    b.finish(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_of_two_lines() {
        let f = PwlFunction::min_of_lines(
            vec![Line { slope: 1.0, intercept: 0.0 }, Line { slope: -1.0, intercept: 0.0 }],
            -1.0,
            1.0,
        )
        .unwrap();
        assert_eq!(f.breakpoint_xs().collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(f.eval(0.5), -0.5);
        let g = PwlFunction::max_of_lines(f.lines.clone(), -1.0, 1.0).unwrap();
        assert_eq!(g.eval(-0.5), 0.5);
        assert_eq!(g.breakpoint_xs().count(), 3);
    }

    #[test]
    fn envelope_skips_dominated_lines() {
        let lines = vec![
            Line { slope: 0.0, intercept: 5.0 },
            Line { slope: 1.0, intercept: 0.0 },
            Line { slope: -1.0, intercept: 0.0 },
        ];
        let f = PwlFunction::min_of_lines(lines, -2.0, 2.0).unwrap();
        assert_eq!(f.breakpoints, vec![(-2.0, -2.0), (0.0, 0.0), (2.0, -2.0)]);
    }

    #[test]
    fn explicit_interpolation() {
        let f = PwlFunction::explicit(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(1.5), 1.0);
        assert_eq!(f.eval(3.0), -2.0);
        assert!(PwlFunction::explicit(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn relu_of_hand_built_filter() {
        let tangents = PwlFunction::min_of_lines(
            vec![Line { slope: 0.5, intercept: -1.0 }, Line { slope: -0.2, intercept: 0.3 }],
            -PI,
            PI,
        )
        .unwrap();
        let filter = assemble_filter(tangents, 0.4636).unwrap();
        let net = export_relu(&filter);
        net.validate().unwrap();
        for i in 0..=40 {
            for j in 0..=10 {
                let xi = -PI + TAU_STEP * i as f64;
                let beta = -0.6 + 0.12 * j as f64;
                let a = filter.clamp(xi, beta);
                let b = net.eval_filter(xi, beta);
                assert!((a - b).abs() < 1e-12, "{xi} {beta}: {a} vs {b}");
            }
        }
    }

    const TAU_STEP: f64 = 2.0 * PI / 40.0;
}
