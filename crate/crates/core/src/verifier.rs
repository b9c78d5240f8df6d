//! Verification that a barrier candidate yields, at every on-barrier state, a
//! safe steering set of the form `[max(-β_max, l(xi)), min(β_max, u(xi))]`
//! with `l` concave on `[xi0, π]` and `u(xi) = -l(-xi)`.
//!
//! Writing `L(xi, beta)` for the normalized on-barrier Lie derivative, the
//! checks are:
//!
//! | id     | claim                                                           |
//! |--------|-----------------------------------------------------------------|
//! | P1a    | `L(·, -β_max) > 0` on `[-π, xi0 - ε]`                           |
//! | P1b    | `L(xi0 - ε, -β_max) > 0` and `L(π, -β_max) < 0`                 |
//! | P1c    | `∂²L/∂xi²(·, -β_max) > 0` on `[xi0 - ε, π]` (single crossing)   |
//! | P2i    | `∂L/∂xi(xi0, -β_max) < 0`                                       |
//! | P2ii   | `∂L/∂beta > 0` on `[xi0 - ε, π] × [-β_max, β_max]`              |
//! | P2iii  | `L(π, ·) < 0` on `[-β_max, β0 - ε]` and `L(π, β_max) > 0`       |
//! | P2band | `L > 0` on `[-xi0 + ε, xi0 - ε] × [-β_max, β_max]`              |
//! | P3     | `γ'' < 0` on `[xi0, π] × [-β_max, β_max]`                       |
//!
//! P2ii makes every vertical slice through `[xi0 - ε, π]` cross zero at most
//! once and upward, so the zero set there is the graph of `l`; P2band rules out
//! any boundary around `xi = 0`; the mirror half follows from
//! `L(-xi, -beta) = L(xi, beta)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::barrier::LieContext;
use crate::certify::{bisect_root, certify_min, certify_point, CertConfig, CertFunction, CertResult, CertTarget, Rect, Sign, Verdict};
use crate::error::Result;
use crate::interval::Interval;

/// Quantities derived from `L` that the verifier certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieQuantity {
    Lie,
    DXi,
    DBeta,
    D2Xi,
    GammaSecond,
}

/// A [`LieQuantity`] bound to a context, as a [`CertFunction`].
#[derive(Debug, Clone, Copy)]
pub struct LieFunction<'a> {
    pub ctx: &'a LieContext,
    pub quantity: LieQuantity,
}

impl<'a> LieFunction<'a> {
    pub fn new(ctx: &'a LieContext, quantity: LieQuantity) -> Self {
        Self { ctx, quantity }
    }
}

impl CertFunction for LieFunction<'_> {
    fn value(&self, xi: Interval, beta: Interval) -> Interval {
        let jet = self.ctx.jet(xi, beta);
        match self.quantity {
            LieQuantity::Lie => jet.partial(0, 0),
            LieQuantity::DXi => jet.partial(1, 0),
            LieQuantity::DBeta => jet.partial(0, 1),
            LieQuantity::D2Xi => jet.partial(2, 0),
            LieQuantity::GammaSecond => jet.gamma_second(),
        }
    }

    fn gradient(&self, xi: Interval, beta: Interval) -> (Interval, Interval) {
        let jet = self.ctx.jet(xi, beta);
        match self.quantity {
            LieQuantity::Lie => (jet.partial(1, 0), jet.partial(0, 1)),
            LieQuantity::DXi => (jet.partial(2, 0), jet.partial(1, 1)),
            LieQuantity::DBeta => (jet.partial(1, 1), jet.partial(0, 2)),
            LieQuantity::D2Xi => (jet.partial(3, 0), jet.partial(2, 1)),
            LieQuantity::GammaSecond => jet.gamma_second_gradient(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PropertyId {
    P1a,
    P1b,
    P1c,
    P2i,
    P2ii,
    P2iii,
    P2band,
    P3,
}

impl PropertyId {
    pub const ALL: [PropertyId; 8] = [
        PropertyId::P1a,
        PropertyId::P1b,
        PropertyId::P1c,
        PropertyId::P2i,
        PropertyId::P2ii,
        PropertyId::P2iii,
        PropertyId::P2band,
        PropertyId::P3,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", content = "property", rename_all = "lowercase"))]
pub enum Status {
    Verified,
    Failed(PropertyId),
    Inconclusive(PropertyId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropertyResult {
    pub property: PropertyId,
    pub result: CertResult,
}

/// Outcome of the sufficient analytic conditions for a barrier to exist.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Precheck {
    /// `β_max <= π/2`.
    pub condition_i: bool,
    /// Left side of condition (ii); the condition holds when it is `>= 2`.
    pub condition_ii_lhs: f64,
    pub condition_ii: bool,
    pub analytic_guarantee: bool,
    /// `2 (l_r/r̄) / (sin β_max · sin(π/4 + β_max/2))`; any σ above it
    /// satisfies (ii).
    pub sigma_bound: f64,
    /// `sigma_bound` when it lies in `(0, 1)`.
    pub sigma_lower_bound: Option<f64>,
}

pub fn existence_precheck(ctx: &LieContext) -> Precheck {
    existence_precheck_raw(
        ctx.beta_max(),
        ctx.vehicle.l_r(),
        ctx.barrier.r_bar(),
        ctx.barrier.sigma(),
    )
}

/// [`existence_precheck`] on bare numbers, so configurations outside the
/// vehicle model's admissible range can still be examined.
pub fn existence_precheck_raw(beta_max: f64, l_r: f64, r_bar: f64, sigma: f64) -> Precheck {
    let s = libm::sin(FRAC_PI_4 + 0.5 * beta_max) * libm::sin(beta_max);
    let condition_i = beta_max <= FRAC_PI_2;
    let condition_ii_lhs = (sigma * (1.0 - sigma) * l_r + sigma * r_bar) / l_r * s;
    let condition_ii = condition_ii_lhs >= 2.0;
    let sigma_bound = 2.0 * (l_r / r_bar) / s;
    Precheck {
        condition_i,
        condition_ii_lhs,
        condition_ii,
        analytic_guarantee: condition_i && condition_ii,
        sigma_bound,
        sigma_lower_bound: (sigma_bound > 0.0 && sigma_bound < 1.0).then_some(sigma_bound),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct VerifyConfig {
    pub cert: CertConfig,
    /// Exclusion radius around the located roots.
    pub epsilon: f64,
    /// Bisection tolerance for `xi0` and `β0`.
    pub root_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            cert: CertConfig::default(),
            epsilon: 1e-3,
            root_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationCertificate {
    pub ctx: LieContext,
    pub config: VerifyConfig,
    pub precheck: Precheck,
    /// Where the boundary meets `beta = -β_max`.
    pub xi0: f64,
    /// Boundary value on the `xi = π` edge, once Property 2 got that far.
    pub beta0_pi: Option<f64>,
    pub epsilon: f64,
    pub property_results: Vec<PropertyResult>,
    pub status: Status,
}

impl VerificationCertificate {
    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn result(&self, id: PropertyId) -> Option<&CertResult> {
        self.property_results
            .iter()
            .find(|p| p.property == id)
            .map(|p| &p.result)
    }
}

#[derive(Default)]
struct Ledger {
    results: Vec<PropertyResult>,
}

impl Ledger {
    /// Records a result; returns the failing status if it is not certified.
    fn push(&mut self, property: PropertyId, result: CertResult) -> Option<Status> {
        self.results.push(PropertyResult { property, result });
        match result.verdict {
            Verdict::Certified => None,
            Verdict::Refuted { .. } => Some(Status::Failed(property)),
            Verdict::Inconclusive => Some(Status::Inconclusive(property)),
        }
    }
}

/// Both results must hold; the first one that does not is reported.
fn both(a: CertResult, b: CertResult) -> CertResult {
    let merged = |verdict| CertResult {
        verdict,
        cells_checked: a.cells_checked + b.cells_checked,
        finest_grid: if a.finest_grid == 0.0 {
            b.finest_grid
        } else if b.finest_grid == 0.0 {
            a.finest_grid
        } else {
            libm::fmin(a.finest_grid, b.finest_grid)
        },
        refinement_depth: a.refinement_depth.max(b.refinement_depth),
    };
    match (a.verdict, b.verdict) {
        (Verdict::Certified, v) => merged(v),
        (v, _) => merged(v),
    }
}

fn vacuous() -> CertResult {
    CertResult {
        verdict: Verdict::Certified,
        cells_checked: 0,
        finest_grid: 0.0,
        refinement_depth: 0,
    }
}

fn certify(
    ctx: &LieContext,
    quantity: LieQuantity,
    domain: Rect,
    sign: Sign,
    config: &CertConfig,
) -> Result<CertResult> {
    let target = CertTarget {
        function: LieFunction::new(ctx, quantity),
        domain,
        sign,
    };
    certify_min(&target, config)
}

fn point(ctx: &LieContext, quantity: LieQuantity, xi: f64, beta: f64, sign: Sign) -> Result<CertResult> {
    certify_point(&LieFunction::new(ctx, quantity), xi, beta, sign)
}

/// Outcome of the Property-1 stage.
#[derive(Debug, Clone)]
pub struct Property1 {
    pub xi0: f64,
    pub results: Vec<PropertyResult>,
    pub failure: Option<Status>,
    /// `L(·, -β_max) > 0` on the whole edge: no unsafe steering anywhere.
    pub no_crossing: bool,
}

/// Locates `xi0` on the lower steering edge and proves it is the only root.
pub fn verify_property1(ctx: &LieContext, config: &VerifyConfig) -> Result<Property1> {
    let bm = ctx.beta_max();
    let eps = config.epsilon;
    let mut ledger = Ledger::default();
    let edge = |xi: f64| ctx.lie(xi, -bm);

    let (f_lo, f_hi) = (edge(-PI), edge(PI));
    if f_lo > 0.0 && f_hi > 0.0 {
        // every steering command is safe: verify that outright
        let r = certify(ctx, LieQuantity::Lie, Rect::new(-PI, PI, -bm, bm)?, Sign::Positive, &config.cert)?;
        let failure = ledger.push(PropertyId::P1a, r);
        return Ok(Property1 {
            xi0: PI,
            results: ledger.results,
            failure,
            no_crossing: true,
        });
    }
    if !(f_lo > 0.0 && f_hi < 0.0) {
        let at = if f_lo <= 0.0 { -PI } else { PI };
        let sign = if at < 0.0 { Sign::Positive } else { Sign::Negative };
        let r = point(ctx, LieQuantity::Lie, at, -bm, sign)?;
        let failure = ledger.push(PropertyId::P1a, r).or(Some(Status::Failed(PropertyId::P1a)));
        return Ok(Property1 {
            xi0: at,
            results: ledger.results,
            failure,
            no_crossing: false,
        });
    }

    let xi0 = bisect_root(edge, -PI, PI, config.root_tol)?;
    let left = xi0 - eps;

    let p1a = if left > -PI {
        certify(ctx, LieQuantity::Lie, Rect::xi_segment(-PI, left, -bm)?, Sign::Positive, &config.cert)?
    } else {
        vacuous()
    };
    let mut failure = ledger.push(PropertyId::P1a, p1a);
    if failure.is_none() {
        let p1b = both(
            point(ctx, LieQuantity::Lie, left, -bm, Sign::Positive)?,
            point(ctx, LieQuantity::Lie, PI, -bm, Sign::Negative)?,
        );
        failure = ledger.push(PropertyId::P1b, p1b);
    }
    if failure.is_none() {
        let p1c = certify(
            ctx,
            LieQuantity::D2Xi,
            Rect::xi_segment(left.max(-PI), PI, -bm)?,
            Sign::Positive,
            &config.cert,
        )?;
        failure = ledger.push(PropertyId::P1c, p1c);
    }
    Ok(Property1 {
        xi0,
        results: ledger.results,
        failure,
        no_crossing: false,
    })
}

#[derive(Debug, Clone)]
pub struct Property2 {
    pub beta0_pi: Option<f64>,
    pub results: Vec<PropertyResult>,
    pub failure: Option<Status>,
}

/// Proves that the zero set over `[xi0, π]` is the graph of a function and
/// that there is none around `xi = 0`.
pub fn verify_property2(ctx: &LieContext, xi0: f64, config: &VerifyConfig) -> Result<Property2> {
    let bm = ctx.beta_max();
    let eps = config.epsilon;
    let left = (xi0 - eps).max(-PI);
    let mut ledger = Ledger::default();
    let mut beta0_pi = None;

    let mut failure = ledger.push(
        PropertyId::P2i,
        point(ctx, LieQuantity::DXi, xi0, -bm, Sign::Negative)?,
    );
    if failure.is_none() {
        let r = certify(ctx, LieQuantity::DBeta, Rect::new(left, PI, -bm, bm)?, Sign::Positive, &config.cert)?;
        failure = ledger.push(PropertyId::P2ii, r);
    }
    if failure.is_none() {
        let top = point(ctx, LieQuantity::Lie, PI, bm, Sign::Positive)?;
        let r = if top.is_certified() {
            let root = bisect_root(|b| ctx.lie(PI, b), -bm, bm, config.root_tol)?;
            beta0_pi = Some(root);
            let below = root - eps;
            let edge = if below > -bm {
                certify(ctx, LieQuantity::Lie, Rect::beta_segment(PI, -bm, below)?, Sign::Negative, &config.cert)?
            } else {
                vacuous()
            };
            both(top, edge)
        } else {
            top
        };
        failure = ledger.push(PropertyId::P2iii, r);
    }
    if failure.is_none() {
        let half = xi0 - eps;
        let r = if half > 0.0 {
            certify(ctx, LieQuantity::Lie, Rect::new(-half, half, -bm, bm)?, Sign::Positive, &config.cert)?
        } else {
            // the two boundary branches would overlap around xi = 0
            CertResult {
                verdict: Verdict::Inconclusive,
                ..vacuous()
            }
        };
        failure = ledger.push(PropertyId::P2band, r);
    }
    Ok(Property2 {
        beta0_pi,
        results: ledger.results,
        failure,
    })
}

/// Proves concavity of the lower boundary via `γ'' < 0` on the rectangle.
pub fn verify_property3(ctx: &LieContext, xi0: f64, config: &VerifyConfig) -> Result<CertResult> {
    let bm = ctx.beta_max();
    certify(
        ctx,
        LieQuantity::GammaSecond,
        Rect::new(xi0, PI, -bm, bm)?,
        Sign::Negative,
        &config.cert,
    )
}

/// Runs the pre-check and Properties 1 → 2 → 3, stopping at the first
/// property that is not certified.
pub fn verify(ctx: &LieContext, config: &VerifyConfig) -> Result<VerificationCertificate> {
    let p1 = verify_property1(ctx, config)?;
    let mut cert = VerificationCertificate {
        ctx: *ctx,
        config: *config,
        precheck: existence_precheck(ctx),
        xi0: p1.xi0,
        beta0_pi: None,
        epsilon: config.epsilon,
        property_results: p1.results,
        status: Status::Verified,
    };
    if let Some(status) = p1.failure {
        cert.status = status;
        return Ok(cert);
    }
    if p1.no_crossing {
        cert.beta0_pi = Some(-ctx.beta_max());
        for id in PropertyId::ALL.into_iter().skip(1) {
            cert.property_results.push(PropertyResult {
                property: id,
                result: vacuous(),
            });
        }
        return Ok(cert);
    }

    let p2 = verify_property2(ctx, p1.xi0, config)?;
    cert.beta0_pi = p2.beta0_pi;
    cert.property_results.extend(p2.results);
    if let Some(status) = p2.failure {
        cert.status = status;
        return Ok(cert);
    }

    let p3 = verify_property3(ctx, p1.xi0, config)?;
    cert.property_results.push(PropertyResult {
        property: PropertyId::P3,
        result: p3,
    });
    cert.status = match p3.verdict {
        Verdict::Certified => Status::Verified,
        Verdict::Refuted { .. } => Status::Failed(PropertyId::P3),
        Verdict::Inconclusive => Status::Inconclusive(PropertyId::P3),
    };
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::BarrierParams;
    use crate::kbm::VehicleParams;

    #[test]
    fn precheck_reference_is_conservative() {
        let p = existence_precheck(&LieContext::reference());
        assert!(p.condition_i);
        assert!(!p.condition_ii);
        assert!(!p.analytic_guarantee);
        assert!((p.sigma_bound - 2.6286555605956683).abs() < 1e-9);
        assert_eq!(p.sigma_lower_bound, None);
    }

    #[test]
    fn precheck_large_radius() {
        // (0.5·0.5·1 + 0.5·100)/1 · sin(π/2) · sin(π/2) = 50.25
        let p = existence_precheck_raw(FRAC_PI_2, 1.0, 100.0, 0.5);
        assert!((p.condition_ii_lhs - 50.25).abs() < 1e-12);
        assert!(p.analytic_guarantee);
        assert!((p.sigma_lower_bound.unwrap() - 0.02).abs() < 1e-12);
    }

    #[test]
    fn precheck_condition_i() {
        let p = existence_precheck_raw(1.7, 1.0, 100.0, 0.5);
        assert!(!p.condition_i);
        assert!(!p.analytic_guarantee);
    }

    #[test]
    fn reference_verifies() {
        let cert = verify(&LieContext::reference(), &VerifyConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Verified, "{:#?}", cert.property_results);
        assert_eq!(cert.property_results.len(), PropertyId::ALL.len());
        assert!(cert.xi0 > 0.0 && cert.xi0 < PI);
        assert!(cert.beta0_pi.unwrap().abs() <= LieContext::reference().beta_max());
    }

    #[test]
    fn extreme_sigma_is_rejected() {
        let ctx = LieContext::new(
            VehicleParams::reference(),
            BarrierParams::new(4.0, 0.999, None).unwrap(),
        );
        let cert = verify(&ctx, &VerifyConfig::default()).unwrap();
        assert_ne!(cert.status, Status::Verified);
    }
}
