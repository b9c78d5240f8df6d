//! Kinematic bicycle model in obstacle-relative coordinates.
//!
//! The state is `(r, xi, v)`: distance to the obstacle center, orientation of
//! the vehicle relative to the obstacle direction (`xi = π` points straight at
//! the obstacle, `xi = 0` straight away), and speed. The steering input is the
//! slip angle `beta`, which is in bijection with the front-wheel angle.

use alloc::format;
use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::math::{clamp, wrap_angle};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "VehicleParamsRepr", into = "VehicleParamsRepr"))]
pub struct VehicleParams {
    l_f: f64,
    l_r: f64,
    delta_f_max: f64,
    v_max: f64,
    beta_max: f64,
}

impl VehicleParams {
    pub fn new(l_f: f64, l_r: f64, delta_f_max: f64, v_max: f64) -> Result<Self> {
        if !(l_r > 0.0 && l_r.is_finite()) {
            return Err(Error::InvalidParams(format!("l_r must be positive, got {l_r}")));
        }
        if l_f != l_r {
            return Err(Error::InvalidParams(format!(
                "the model assumes l_f = l_r, got l_f = {l_f}, l_r = {l_r}"
            )));
        }
        if !(delta_f_max > 0.0 && delta_f_max < FRAC_PI_2) {
            return Err(Error::InvalidParams(format!(
                "delta_f_max must lie in (0, pi/2), got {delta_f_max}"
            )));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(Error::InvalidParams(format!("v_max must be positive, got {v_max}")));
        }
        let beta_max = libm::atan(l_r / (l_f + l_r) * libm::tan(delta_f_max));
        Ok(Self {
            l_f,
            l_r,
            delta_f_max,
            v_max,
            beta_max,
        })
    }

    /// `l_f = l_r = 2 m`, `delta_f_max = π/4`, `v_max = 20 m/s`.
    pub fn reference() -> Self {
        Self::new(2.0, 2.0, core::f64::consts::FRAC_PI_4, 20.0).expect("reference vehicle")
    }

    pub fn l_f(&self) -> f64 {
        self.l_f
    }
    pub fn l_r(&self) -> f64 {
        self.l_r
    }
    pub fn delta_f_max(&self) -> f64 {
        self.delta_f_max
    }
    pub fn v_max(&self) -> f64 {
        self.v_max
    }
    /// Steering bound in slip-angle space.
    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    fn ratio(&self) -> f64 {
        self.l_r / (self.l_f + self.l_r)
    }
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleParamsRepr {
    l_f: f64,
    l_r: f64,
    delta_f_max: f64,
    v_max: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<VehicleParamsRepr> for VehicleParams {
    type Error = Error;
    fn try_from(r: VehicleParamsRepr) -> Result<Self> {
        Self::new(r.l_f, r.l_r, r.delta_f_max, r.v_max)
    }
}

#[cfg(feature = "serde")]
impl From<VehicleParams> for VehicleParamsRepr {
    fn from(p: VehicleParams) -> Self {
        Self {
            l_f: p.l_f,
            l_r: p.l_r,
            delta_f_max: p.delta_f_max,
            v_max: p.v_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelState {
    pub r: f64,
    pub xi: f64,
    pub v: f64,
}

impl RelState {
    pub fn new(r: f64, xi: f64, v: f64) -> Self {
        Self { r, xi, v }
    }

    pub fn validate(&self, params: &VehicleParams) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::Singularity { r: self.r });
        }
        if !(-core::f64::consts::PI..=core::f64::consts::PI).contains(&self.xi) {
            return Err(Error::Domain { what: "xi", value: self.xi });
        }
        if !(0.0..=params.v_max).contains(&self.v) {
            return Err(Error::Domain { what: "v", value: self.v });
        }
        Ok(())
    }
}

/// Time derivative of a [`RelState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRate {
    pub r_dot: f64,
    pub xi_dot: f64,
    pub v_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Control {
    /// Longitudinal acceleration (m/s²).
    pub a: f64,
    /// Steering slip angle (rad).
    pub beta: f64,
}

impl Control {
    pub fn new(a: f64, beta: f64) -> Self {
        Self { a, beta }
    }

    pub fn is_admissible(&self, params: &VehicleParams) -> bool {
        self.a.is_finite() && libm::fabs(self.beta) <= params.beta_max
    }
}

pub fn beta_from_delta(delta_f: f64, params: &VehicleParams) -> Result<f64> {
    if !(libm::fabs(delta_f) <= params.delta_f_max) {
        return Err(Error::Domain { what: "delta_f", value: delta_f });
    }
    Ok(libm::atan(params.ratio() * libm::tan(delta_f)))
}

pub fn delta_from_beta(beta: f64, params: &VehicleParams) -> Result<f64> {
    if !(libm::fabs(beta) <= params.beta_max) {
        return Err(Error::Domain { what: "beta", value: beta });
    }
    Ok(libm::atan(libm::tan(beta) / params.ratio()))
}

pub fn dynamics(state: &RelState, control: &Control, params: &VehicleParams) -> Result<StateRate> {
    if !(state.r > 0.0) {
        return Err(Error::Singularity { r: state.r });
    }
    let heading = state.xi - control.beta;
    Ok(StateRate {
        r_dot: state.v * libm::cos(heading),
        xi_dot: -state.v / state.r * libm::sin(heading)
            - state.v / params.l_r * libm::sin(control.beta),
        v_dot: control.a,
    })
}

/// One classical RK4 step with the control held over `dt`. The result has
/// `xi` wrapped to `[-π, π)` and `v` clamped to `[0, v_max]`.
pub fn integrate_step(
    state: &RelState,
    control: &Control,
    params: &VehicleParams,
    dt: f64,
) -> Result<RelState> {
    if !(dt > 0.0) {
        return Err(Error::Domain { what: "dt", value: dt });
    }
    let shifted = |k: &StateRate, h: f64| RelState {
        r: state.r + h * k.r_dot,
        xi: state.xi + h * k.xi_dot,
        v: state.v + h * k.v_dot,
    };
    let k1 = dynamics(state, control, params)?;
    let k2 = dynamics(&shifted(&k1, 0.5 * dt), control, params)?;
    let k3 = dynamics(&shifted(&k2, 0.5 * dt), control, params)?;
    let k4 = dynamics(&shifted(&k3, dt), control, params)?;
    let w = dt / 6.0;
    let r = state.r + w * (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot);
    if !(r > 0.0) {
        return Err(Error::Singularity { r });
    }
    let xi = state.xi + w * (k1.xi_dot + 2.0 * k2.xi_dot + 2.0 * k3.xi_dot + k4.xi_dot);
    let v = state.v + w * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
    Ok(RelState {
        r,
        xi: wrap_angle(xi),
        v: clamp(v, 0.0, params.v_max),
    })
}
