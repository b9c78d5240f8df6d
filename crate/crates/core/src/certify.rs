//! Sound sign certification of smooth functions over rectangles.
//!
//! A cell is accepted when the center value, evaluated in outward-rounded
//! interval arithmetic, dominates the largest change the function can make
//! inside the cell. That change is bounded by the mean value theorem using an
//! interval enclosure of the gradient over the whole closed cell:
//!
//! ```text
//! |f(x) - f(c)| <= sup|∂f/∂xi| · w_xi/2 + sup|∂f/∂beta| · w_beta/2
//! ```
//!
//! Cells that cannot be accepted are split (locally, into 4 or into 2 on a
//! degenerate edge) until `max_depth`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// A scalar function of `(xi, beta)` with interval extensions of its value
/// and gradient.
pub trait CertFunction {
    fn value(&self, xi: Interval, beta: Interval) -> Interval;
    fn gradient(&self, xi: Interval, beta: Interval) -> (Interval, Interval);
}

impl<F: CertFunction + ?Sized> CertFunction for &F {
    fn value(&self, xi: Interval, beta: Interval) -> Interval {
        (**self).value(xi, beta)
    }
    fn gradient(&self, xi: Interval, beta: Interval) -> (Interval, Interval) {
        (**self).gradient(xi, beta)
    }
}

/// Closed domain `[xi_lo, xi_hi] × [beta_lo, beta_hi]`; one side may be
/// degenerate, not both.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
}

impl Rect {
    pub fn new(xi_lo: f64, xi_hi: f64, beta_lo: f64, beta_hi: f64) -> Result<Self> {
        let r = Self {
            xi_lo,
            xi_hi,
            beta_lo,
            beta_hi,
        };
        if [xi_lo, xi_hi, beta_lo, beta_hi].iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(alloc::format!("non-finite domain {r:?}")));
        }
        if xi_lo > xi_hi || beta_lo > beta_hi {
            return Err(Error::Config(alloc::format!("inverted domain {r:?}")));
        }
        if xi_lo == xi_hi && beta_lo == beta_hi {
            return Err(Error::Config(alloc::format!(
                "domain {r:?} is a single point; use certify_point"
            )));
        }
        Ok(r)
    }

    /// Segment `[xi_lo, xi_hi] × {beta}`.
    pub fn xi_segment(xi_lo: f64, xi_hi: f64, beta: f64) -> Result<Self> {
        Self::new(xi_lo, xi_hi, beta, beta)
    }

    /// Segment `{xi} × [beta_lo, beta_hi]`.
    pub fn beta_segment(xi: f64, beta_lo: f64, beta_hi: f64) -> Result<Self> {
        Self::new(xi, xi, beta_lo, beta_hi)
    }

    fn xi(&self) -> Interval {
        Interval::new(self.xi_lo, self.xi_hi)
    }

    fn beta(&self) -> Interval {
        Interval::new(self.beta_lo, self.beta_hi)
    }

    fn center(&self) -> (f64, f64) {
        (
            0.5 * self.xi_lo + 0.5 * self.xi_hi,
            0.5 * self.beta_lo + 0.5 * self.beta_hi,
        )
    }

    fn size(&self) -> f64 {
        libm::fmax(self.xi_hi - self.xi_lo, self.beta_hi - self.beta_lo)
    }

    fn split(&self) -> Vec<Rect> {
        let (xm, bm) = self.center();
        let xs: Vec<(f64, f64)> = if self.xi_lo < self.xi_hi {
            alloc::vec![(self.xi_lo, xm), (xm, self.xi_hi)]
        } else {
            alloc::vec![(self.xi_lo, self.xi_hi)]
        };
        let bs: Vec<(f64, f64)> = if self.beta_lo < self.beta_hi {
            alloc::vec![(self.beta_lo, bm), (bm, self.beta_hi)]
        } else {
            alloc::vec![(self.beta_lo, self.beta_hi)]
        };
        let mut out = Vec::with_capacity(xs.len() * bs.len());
        for &(xi_lo, xi_hi) in &xs {
            for &(beta_lo, beta_hi) in &bs {
                out.push(Rect {
                    xi_lo,
                    xi_hi,
                    beta_lo,
                    beta_hi,
                });
            }
        }
        out
    }

    /// Uniform grid of cells no wider than `grid`, in row-major order.
    fn tiles(&self, grid: f64) -> Vec<Rect> {
        let count = |w: f64| {
            if w > 0.0 {
                libm::ceil(w / grid).max(1.0) as usize
            } else {
                1
            }
        };
        let nx = count(self.xi_hi - self.xi_lo);
        let nb = count(self.beta_hi - self.beta_lo);
        let at = |lo: f64, hi: f64, i: usize, n: usize| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        };
        let mut out = Vec::with_capacity(nx * nb);
        for i in 0..nx {
            for j in 0..nb {
                out.push(Rect {
                    xi_lo: at(self.xi_lo, self.xi_hi, i, nx),
                    xi_hi: at(self.xi_lo, self.xi_hi, i + 1, nx),
                    beta_lo: at(self.beta_lo, self.beta_hi, j, nb),
                    beta_hi: at(self.beta_lo, self.beta_hi, j + 1, nb),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn apply(self, x: Interval) -> Interval {
        match self {
            Sign::Positive => x,
            Sign::Negative => -x,
        }
    }
}

pub struct CertTarget<F> {
    pub function: F,
    pub domain: Rect,
    pub sign: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Refinement {
    /// Split only the cells that fail, quad-tree style.
    Local,
    /// Rescan the whole domain on a 10× finer grid whenever any cell fails.
    GlobalRestart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CertConfig {
    pub initial_grid: f64,
    pub max_depth: u32,
    /// Required slack: a cell passes when `sign·f(center) > bound + margin`.
    pub margin: f64,
    pub refinement: Refinement,
    pub max_cells: u64,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            initial_grid: 0.05,
            max_depth: 12,
            margin: 0.0,
            refinement: Refinement::Local,
            max_cells: 4_000_000,
        }
    }
}

impl CertConfig {
    fn validate(&self) -> Result<()> {
        if !(self.initial_grid > 0.0 && self.initial_grid.is_finite()) {
            return Err(Error::Config(alloc::format!(
                "initial_grid must be positive, got {}",
                self.initial_grid
            )));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::Config(alloc::format!(
                "margin must be non-negative, got {}",
                self.margin
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum Verdict {
    Certified,
    /// `sign·f(xi, beta) < 0`, proven by interval evaluation at the point.
    Refuted { xi: f64, beta: f64, value: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertResult {
    pub verdict: Verdict,
    pub cells_checked: u64,
    pub finest_grid: f64,
    pub refinement_depth: u32,
}

impl CertResult {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

enum CellOutcome {
    Accepted,
    Refuted(Verdict),
    Marginal,
}

fn check_cell<F: CertFunction>(f: &F, cell: &Rect, sign: Sign, margin: f64) -> Result<CellOutcome> {
    let (xc, bc) = cell.center();
    let center = f.value(Interval::point(xc), Interval::point(bc));
    if !center.is_finite() {
        return Err(Error::Config(alloc::format!(
            "function is not evaluable at ({xc}, {bc})"
        )));
    }
    let signed = sign.apply(center);
    if signed.hi() < 0.0 {
        return Ok(CellOutcome::Refuted(Verdict::Refuted {
            xi: xc,
            beta: bc,
            value: center.mid(),
        }));
    }
    let (g_xi, g_beta) = f.gradient(cell.xi(), cell.beta());
    let half_w_xi = Interval::point(cell.xi_hi - cell.xi_lo) * Interval::point(0.5);
    let half_w_beta = Interval::point(cell.beta_hi - cell.beta_lo) * Interval::point(0.5);
    let bound = Interval::point(g_xi.mag()) * half_w_xi
        + Interval::point(g_beta.mag()) * half_w_beta
        + Interval::point(margin);
    // NaN bounds compare false and fall through to Marginal
    if signed.lo() > bound.hi() {
        Ok(CellOutcome::Accepted)
    } else {
        Ok(CellOutcome::Marginal)
    }
}

/// Certifies `sign·f > 0` over the target domain.
pub fn certify_min<F: CertFunction>(target: &CertTarget<F>, config: &CertConfig) -> Result<CertResult> {
    config.validate()?;
    // a cheap witness search first, so that a violation elsewhere is not
    // masked by an undecidable cell met earlier in the refinement
    let (witness, probes) = scan_for_witness(target, config)?;
    if let Some(verdict) = witness {
        return Ok(CertResult {
            verdict,
            cells_checked: probes,
            finest_grid: target.domain.size().min(config.initial_grid),
            refinement_depth: 0,
        });
    }
    let mut result = match config.refinement {
        Refinement::Local => certify_local(target, config)?,
        Refinement::GlobalRestart => certify_global(target, config)?,
    };
    result.cells_checked += probes;
    Ok(result)
}

/// Evaluates the sign at the domain corners and at every initial cell center.
fn scan_for_witness<F: CertFunction>(target: &CertTarget<F>, config: &CertConfig) -> Result<(Option<Verdict>, u64)> {
    let d = &target.domain;
    let corners = [
        (d.xi_lo, d.beta_lo),
        (d.xi_lo, d.beta_hi),
        (d.xi_hi, d.beta_lo),
        (d.xi_hi, d.beta_hi),
    ];
    let centers = d.tiles(config.initial_grid).into_iter().map(|c| c.center());
    let mut probes = 0;
    for (xi, beta) in corners.into_iter().chain(centers) {
        probes += 1;
        let verdict = certify_point(&target.function, xi, beta, target.sign)?.verdict;
        if let Verdict::Refuted { .. } = verdict {
            return Ok((Some(verdict), probes));
        }
    }
    Ok((None, probes))
}

fn certify_local<F: CertFunction>(target: &CertTarget<F>, config: &CertConfig) -> Result<CertResult> {
    let mut stack: Vec<(Rect, u32)> = target
        .domain
        .tiles(config.initial_grid)
        .into_iter()
        .rev()
        .map(|c| (c, 0))
        .collect();
    let mut result = CertResult {
        verdict: Verdict::Certified,
        cells_checked: 0,
        finest_grid: target.domain.size().min(config.initial_grid),
        refinement_depth: 0,
    };
    while let Some((cell, depth)) = stack.pop() {
        result.cells_checked += 1;
        result.refinement_depth = result.refinement_depth.max(depth);
        result.finest_grid = result.finest_grid.min(cell.size());
        match check_cell(&target.function, &cell, target.sign, config.margin)? {
            CellOutcome::Accepted => {}
            CellOutcome::Refuted(v) => {
                result.verdict = v;
                return Ok(result);
            }
            CellOutcome::Marginal => {
                if depth >= config.max_depth || result.cells_checked >= config.max_cells {
                    result.verdict = Verdict::Inconclusive;
                    return Ok(result);
                }
                stack.extend(cell.split().into_iter().rev().map(|c| (c, depth + 1)));
            }
        }
    }
    Ok(result)
}

fn certify_global<F: CertFunction>(target: &CertTarget<F>, config: &CertConfig) -> Result<CertResult> {
    let mut grid = config.initial_grid;
    let mut result = CertResult {
        verdict: Verdict::Inconclusive,
        cells_checked: 0,
        finest_grid: grid,
        refinement_depth: 0,
    };
    for depth in 0..=config.max_depth {
        result.refinement_depth = depth;
        result.finest_grid = grid;
        let mut refine = false;
        for cell in target.domain.tiles(grid) {
            result.cells_checked += 1;
            match check_cell(&target.function, &cell, target.sign, config.margin)? {
                CellOutcome::Accepted => {}
                CellOutcome::Refuted(v) => {
                    result.verdict = v;
                    return Ok(result);
                }
                CellOutcome::Marginal => {
                    refine = true;
                    break;
                }
            }
            if result.cells_checked >= config.max_cells {
                return Ok(result);
            }
        }
        if !refine {
            result.verdict = Verdict::Certified;
            return Ok(result);
        }
        grid /= 10.0;
    }
    Ok(result)
}

/// Sign check of `f` at a single point, in interval arithmetic.
pub fn certify_point<F: CertFunction>(f: &F, xi: f64, beta: f64, sign: Sign) -> Result<CertResult> {
    let value = f.value(Interval::point(xi), Interval::point(beta));
    if !value.is_finite() {
        return Err(Error::Config(alloc::format!(
            "function is not evaluable at ({xi}, {beta})"
        )));
    }
    let signed = sign.apply(value);
    let verdict = if signed.lo() > 0.0 {
        Verdict::Certified
    } else if signed.hi() < 0.0 {
        Verdict::Refuted {
            xi,
            beta,
            value: value.mid(),
        }
    } else {
        Verdict::Inconclusive
    };
    Ok(CertResult {
        verdict,
        cells_checked: 1,
        finest_grid: 0.0,
        refinement_depth: 0,
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to interval width `tol`
/// (or until the bracket cannot shrink in floating point).
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let a_positive = fa > 0.0;
    while b - a > tol {
        let m = 0.5 * a + 0.5 * b;
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == a_positive {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * a + 0.5 * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    struct Constant;
    impl CertFunction for Constant {
        fn value(&self, _: Interval, _: Interval) -> Interval {
            Interval::point(1.0)
        }
        fn gradient(&self, _: Interval, _: Interval) -> (Interval, Interval) {
            (Interval::point(0.0), Interval::point(0.0))
        }
    }

    struct SinXi;
    impl CertFunction for SinXi {
        fn value(&self, xi: Interval, _: Interval) -> Interval {
            xi.sin()
        }
        fn gradient(&self, xi: Interval, _: Interval) -> (Interval, Interval) {
            (xi.cos(), Interval::point(0.0))
        }
    }

    struct CosXi;
    impl CertFunction for CosXi {
        fn value(&self, xi: Interval, _: Interval) -> Interval {
            xi.cos()
        }
        fn gradient(&self, xi: Interval, _: Interval) -> (Interval, Interval) {
            (-xi.sin(), Interval::point(0.0))
        }
    }

    #[test]
    fn constant_certified_at_depth_zero() {
        let t = CertTarget {
            function: Constant,
            domain: Rect::new(-1.0, 1.0, -0.5, 0.5).unwrap(),
            sign: Sign::Positive,
        };
        let r = certify_min(&t, &CertConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.refinement_depth, 0);
    }

    #[test]
    fn sine_refuted_on_negative_side() {
        let t = CertTarget {
            function: SinXi,
            domain: Rect::xi_segment(-PI, PI, 0.0).unwrap(),
            sign: Sign::Positive,
        };
        match certify_min(&t, &CertConfig::default()).unwrap().verdict {
            Verdict::Refuted { xi, value, .. } => {
                assert!(xi < 0.0);
                assert!(libm::sin(xi) < 0.0 && value < 0.0);
            }
            v => panic!("expected refutation, got {v:?}"),
        }
    }

    #[test]
    fn cosine_certified_quickly() {
        let t = CertTarget {
            function: CosXi,
            domain: Rect::xi_segment(-1.0, 1.0, 0.0).unwrap(),
            sign: Sign::Positive,
        };
        for refinement in [Refinement::Local, Refinement::GlobalRestart] {
            let cfg = CertConfig {
                refinement,
                ..CertConfig::default()
            };
            let r = certify_min(&t, &cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Certified);
            assert!(r.refinement_depth <= 2);
        }
    }

    #[test]
    fn touching_zero_is_inconclusive_not_certified() {
        // cos has a zero at π/2, the right endpoint
        let t = CertTarget {
            function: CosXi,
            domain: Rect::xi_segment(0.0, FRAC_PI_2, 0.0).unwrap(),
            sign: Sign::Positive,
        };
        let r = certify_min(
            &t,
            &CertConfig {
                max_depth: 6,
                ..CertConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn negative_sign_targets() {
        let t = CertTarget {
            function: SinXi,
            domain: Rect::xi_segment(-3.0, -0.2, 0.0).unwrap(),
            sign: Sign::Negative,
        };
        assert!(certify_min(&t, &CertConfig::default()).unwrap().is_certified());
    }

    #[test]
    fn point_checks() {
        assert!(certify_point(&CosXi, 0.3, 0.0, Sign::Positive).unwrap().is_certified());
        assert!(matches!(
            certify_point(&CosXi, 3.0, 0.0, Sign::Positive).unwrap().verdict,
            Verdict::Refuted { .. }
        ));
    }

    #[test]
    fn bad_domains_rejected() {
        assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(Rect::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        let t = CertTarget {
            function: Constant,
            domain: Rect::new(0.0, 1.0, 0.0, 1.0).unwrap(),
            sign: Sign::Positive,
        };
        let cfg = CertConfig {
            initial_grid: 0.0,
            ..CertConfig::default()
        };
        assert!(matches!(certify_min(&t, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn bisection_examples() {
        let x = bisect_root(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(x.abs() <= 1e-12);
        let x = bisect_root(libm::cos, 0.0, PI, 1e-12).unwrap();
        assert!((x - FRAC_PI_2).abs() <= 1e-12);
        assert!(matches!(
            bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9),
            Err(Error::Bracket { .. })
        ));
    }
}
