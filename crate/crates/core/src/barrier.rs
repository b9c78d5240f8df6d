//! The barrier family `h(r, xi) = (σ cos(xi/2) + 1 - σ)/r̄ - 1/r`, its linear
//! class-K function, and the Lie derivative along the bicycle dynamics.
//!
//! On the barrier (`r = r_min(xi)`) the Lie derivative divided by `v` is
//!
//! ```text
//! L(xi, beta) = A(xi) sin(xi - beta) + B(xi) sin(beta) + C(xi) cos(xi - beta)
//! A = σ/(2 r̄) · sin(xi/2) · ρ(xi),   B = σ/(2 r̄ l_r) · sin(xi/2),   C = ρ(xi)²
//! ρ(xi) = 1/r_min(xi) = (σ cos(xi/2) + 1 - σ)/r̄
//! ```
//!
//! Since `A`, `B` and `C` depend on `xi` only, every mixed partial
//! `∂^i_xi ∂^j_beta L` has a closed form by the Leibniz rule over the products
//! `A · sin(xi - beta)` and `C · cos(xi - beta)`. [`LieJet`] evaluates these on
//! any [`Real`], so the same expressions serve point evaluation and interval
//! enclosures for certification.

use alloc::format;

use crate::error::{Error, Result};
use crate::kbm::{RelState, VehicleParams};
use crate::math::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "BarrierParamsRepr", into = "BarrierParamsRepr"))]
pub struct BarrierParams {
    r_bar: f64,
    sigma: f64,
    k: f64,
}

impl BarrierParams {
    /// `k = None` selects the smallest admissible gain, [`k_min`].
    pub fn new(r_bar: f64, sigma: f64, k: Option<f64>) -> Result<Self> {
        if !(r_bar > 0.0 && r_bar.is_finite()) {
            return Err(Error::InvalidParams(format!("r_bar must be positive, got {r_bar}")));
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidParams(format!("sigma must lie in (0, 1), got {sigma}")));
        }
        let k_lo = k_min(r_bar, sigma);
        let k = k.unwrap_or(k_lo);
        if !(k >= k_lo && k.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "class-K gain k = {k} is below the monotonicity bound {k_lo}"
            )));
        }
        Ok(Self { r_bar, sigma, k })
    }

    pub fn r_bar(&self) -> f64 {
        self.r_bar
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn k(&self) -> f64 {
        self.k
    }
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct BarrierParamsRepr {
    r_bar: f64,
    sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<BarrierParamsRepr> for BarrierParams {
    type Error = Error;
    fn try_from(r: BarrierParamsRepr) -> Result<Self> {
        Self::new(r.r_bar, r.sigma, r.k)
    }
}

#[cfg(feature = "serde")]
impl From<BarrierParams> for BarrierParamsRepr {
    fn from(p: BarrierParams) -> Self {
        Self {
            r_bar: p.r_bar,
            sigma: p.sigma,
            k: Some(p.k),
        }
    }
}

/// Smallest class-K gain for which the barrier condition grows monotonically
/// in `r`: `max(1, 1/r̄) · (σ/(2 r̄) + 2)`.
pub fn k_min(r_bar: f64, sigma: f64) -> f64 {
    libm::fmax(1.0, 1.0 / r_bar) * (sigma / (2.0 * r_bar) + 2.0)
}

/// Vehicle and barrier constants together; everything the Lie derivative needs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LieContext {
    pub vehicle: VehicleParams,
    pub barrier: BarrierParams,
}

impl LieContext {
    pub fn new(vehicle: VehicleParams, barrier: BarrierParams) -> Self {
        Self { vehicle, barrier }
    }

    /// Reference vehicle with `r̄ = 4 m`, `σ = 0.48`, `K = k_min`.
    pub fn reference() -> Self {
        Self::new(
            VehicleParams::reference(),
            BarrierParams::new(4.0, 0.48, None).expect("reference barrier"),
        )
    }

    pub fn beta_max(&self) -> f64 {
        self.vehicle.beta_max()
    }

    pub fn k_min(&self) -> f64 {
        k_min(self.barrier.r_bar, self.barrier.sigma)
    }

    pub fn h(&self, state: &RelState) -> f64 {
        self.inv_r_min(state.xi) - 1.0 / state.r
    }

    fn inv_r_min(&self, xi: f64) -> f64 {
        let BarrierParams { r_bar, sigma, .. } = self.barrier;
        (sigma * libm::cos(0.5 * xi) + 1.0 - sigma) / r_bar
    }

    /// Zero contour of the barrier; `r_min(0) = r̄`, `r_min(±π) = r̄/(1-σ)`.
    pub fn r_min(&self, xi: f64) -> f64 {
        1.0 / self.inv_r_min(xi)
    }

    pub fn alpha(&self, x: f64) -> f64 {
        self.barrier.k * self.vehicle.v_max() * x
    }

    /// `∇h · f` at an arbitrary state (the acceleration drops out).
    pub fn lie_general(&self, state: &RelState, beta: f64) -> f64 {
        let BarrierParams { r_bar, sigma, .. } = self.barrier;
        let RelState { r, xi, v } = *state;
        let s_half = libm::sin(0.5 * xi);
        let u = xi - beta;
        v * (sigma / (2.0 * r_bar * r) * s_half * libm::sin(u)
            + sigma / (2.0 * r_bar * self.vehicle.l_r()) * s_half * libm::sin(beta)
            + libm::cos(u) / (r * r))
    }

    /// Lie derivative at the on-barrier state `(r_min(xi), xi, v)`.
    pub fn lie_on_barrier(&self, xi: f64, beta: f64, v: f64) -> f64 {
        v * self.lie(xi, beta)
    }

    /// Barrier condition `∇h · f + α(h)`; `beta` is admissible for safety iff
    /// this is non-negative.
    pub fn lie_plus_alpha(&self, state: &RelState, beta: f64) -> f64 {
        self.lie_general(state, beta) + self.alpha(self.h(state))
    }

    /// On-barrier Lie derivative with the speed factor removed.
    pub fn lie(&self, xi: f64, beta: f64) -> f64 {
        self.jet(xi, beta).partial(0, 0)
    }

    pub fn lie_d_xi(&self, xi: f64, beta: f64) -> f64 {
        self.jet(xi, beta).partial(1, 0)
    }

    pub fn lie_d_beta(&self, xi: f64, beta: f64) -> f64 {
        self.jet(xi, beta).partial(0, 1)
    }

    pub fn lie_d2_xi(&self, xi: f64, beta: f64) -> f64 {
        self.jet(xi, beta).partial(2, 0)
    }

    pub fn lie_d2_beta(&self, xi: f64, beta: f64) -> f64 {
        self.jet(xi, beta).partial(0, 2)
    }

    pub fn lie_d2_xibeta(&self, xi: f64, beta: f64) -> f64 {
        self.jet(xi, beta).partial(1, 1)
    }

    /// Slope of the implicit curve `L(xi, beta) = 0` through `(xi, beta)`.
    pub fn gamma_prime(&self, xi: f64, beta: f64) -> Result<f64> {
        let jet = self.jet(xi, beta);
        let d_beta = jet.partial(0, 1);
        if libm::fabs(d_beta) < DEGENERATE_SLOPE {
            return Err(Error::DegenerateSlope { xi, beta, d_beta });
        }
        Ok(-jet.partial(1, 0) / d_beta)
    }

    /// Second derivative of the implicit curve `L(xi, beta) = 0`.
    pub fn gamma_second(&self, xi: f64, beta: f64) -> Result<f64> {
        let jet = self.jet(xi, beta);
        let d_beta = jet.partial(0, 1);
        if libm::fabs(d_beta) < DEGENERATE_SLOPE {
            return Err(Error::DegenerateSlope { xi, beta, d_beta });
        }
        Ok(jet.gamma_second())
    }

    pub fn jet<T: Real>(&self, xi: T, beta: T) -> LieJet<T> {
        LieJet::new(self, xi, beta)
    }
}

const DEGENERATE_SLOPE: f64 = 1e-12;

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Highest total derivative order a [`LieJet`] supports in `xi`.
pub const MAX_ORDER: usize = 4;

#[inline]
fn sin_d<T: Real>(n: usize, s: T, c: T) -> T {
    match n % 4 {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

#[inline]
fn cos_d<T: Real>(n: usize, s: T, c: T) -> T {
    match n % 4 {
        0 => c,
        1 => -s,
        2 => -c,
        _ => s,
    }
}

/// All partial derivatives of the normalized on-barrier Lie derivative at
/// one point (or over one box, when `T` is an interval).
#[derive(Clone, Copy, Debug)]
pub struct LieJet<T> {
    a: [T; MAX_ORDER + 1],
    b: [T; MAX_ORDER + 1],
    c: [T; MAX_ORDER + 1],
    sin_u: T,
    cos_u: T,
    sin_beta: T,
    cos_beta: T,
}

impl<T: Real> LieJet<T> {
    fn new(ctx: &LieContext, xi: T, beta: T) -> Self {
        let sigma = T::cst(ctx.barrier.sigma);
        let r_bar = T::cst(ctx.barrier.r_bar);
        let l_r = T::cst(ctx.vehicle.l_r());
        let two = T::cst(2.0);
        let half_xi = xi * T::cst(0.5);
        let (sh, ch) = (half_xi.sin(), half_xi.cos());

        // d^n/dxi^n of sin(xi/2) and cos(xi/2)
        let mut sd = [sh; MAX_ORDER + 1];
        let mut cd = [ch; MAX_ORDER + 1];
        let mut scale = 1.0;
        for n in 0..=MAX_ORDER {
            sd[n] = T::cst(scale) * sin_d(n, sh, ch);
            cd[n] = T::cst(scale) * cos_d(n, sh, ch);
            scale *= 0.5;
        }

        let mut rho = [ch; MAX_ORDER + 1];
        rho[0] = (sigma * ch + T::cst(1.0) - sigma) / r_bar;
        for n in 1..=MAX_ORDER {
            rho[n] = sigma * cd[n] / r_bar;
        }

        let k_a = sigma / (two * r_bar);
        let k_b = sigma / (two * r_bar * l_r);
        let mut a = rho;
        let mut b = rho;
        let mut c = rho;
        for n in 0..=MAX_ORDER {
            let mut acc_a = T::cst(0.0);
            let mut acc_c = T::cst(0.0);
            for m in 0..=n {
                let w = T::cst(BINOM[n][m]);
                acc_a = acc_a + w * sd[m] * rho[n - m];
                acc_c = acc_c + w * rho[m] * rho[n - m];
            }
            a[n] = k_a * acc_a;
            b[n] = k_b * sd[n];
            c[n] = acc_c;
        }

        let u = xi - beta;
        Self {
            a,
            b,
            c,
            sin_u: u.sin(),
            cos_u: u.cos(),
            sin_beta: beta.sin(),
            cos_beta: beta.cos(),
        }
    }

    /// `∂^i/∂xi^i ∂^j/∂beta^j L`, for `i <= MAX_ORDER`.
    pub fn partial(&self, i: usize, j: usize) -> T {
        assert!(i <= MAX_ORDER, "xi-derivative order {i} exceeds {MAX_ORDER}");
        // each beta-derivative of a function of (xi - beta) flips the sign
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut shifted = T::cst(0.0);
        for (k, &binom) in BINOM[i].iter().enumerate().take(i + 1) {
            let w = T::cst(binom);
            shifted = shifted
                + w * (self.a[i - k] * sin_d(k + j, self.sin_u, self.cos_u)
                    + self.c[i - k] * cos_d(k + j, self.sin_u, self.cos_u));
        }
        T::cst(sign) * shifted + self.b[i] * sin_d(j, self.sin_beta, self.cos_beta)
    }

    /// `γ'' = -(L_xx L_b² - 2 L_x L_b L_xb + L_x² L_bb) / L_b³`.
    pub fn gamma_second(&self) -> T {
        let (n, d) = self.curvature_parts();
        -n / d
    }

    fn curvature_parts(&self) -> (T, T) {
        let lx = self.partial(1, 0);
        let lb = self.partial(0, 1);
        let lxx = self.partial(2, 0);
        let lxb = self.partial(1, 1);
        let lbb = self.partial(0, 2);
        let two = T::cst(2.0);
        let n = lxx * lb * lb - two * lx * lb * lxb + lx * lx * lbb;
        (n, lb * lb * lb)
    }

    /// Gradient `(∂γ''/∂xi, ∂γ''/∂beta)`, by the quotient rule on
    /// `γ'' = -N / L_b³` with `N` as in [`Self::gamma_second`].
    pub fn gamma_second_gradient(&self) -> (T, T) {
        let lx = self.partial(1, 0);
        let lb = self.partial(0, 1);
        let lxx = self.partial(2, 0);
        let lxb = self.partial(1, 1);
        let lbb = self.partial(0, 2);
        let (n, _) = self.curvature_parts();
        let two = T::cst(2.0);
        let three = T::cst(3.0);
        let lb4 = lb * lb * lb * lb;

        // derivative of N along one coordinate, given the derivatives of its
        // five ingredients along that coordinate
        let d_n = |d_lx: T, d_lb: T, d_lxx: T, d_lxb: T, d_lbb: T| {
            d_lxx * lb * lb + two * lxx * lb * d_lb
                - two * (d_lx * lb * lxb + lx * d_lb * lxb + lx * lb * d_lxb)
                + two * lx * d_lx * lbb
                + lx * lx * d_lbb
        };
        let d_gamma = |dn: T, d_lb: T| -(dn * lb - three * n * d_lb) / lb4;

        let dn_xi = d_n(lxx, lxb, self.partial(3, 0), self.partial(2, 1), self.partial(1, 2));
        let dn_beta = d_n(lxb, lbb, self.partial(2, 1), self.partial(1, 2), self.partial(0, 3));
        (d_gamma(dn_xi, lxb), d_gamma(dn_beta, lbb))
    }
}
