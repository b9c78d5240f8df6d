//! Runtime application of a synthesized filter to a nominal control.

use crate::barrier::LieContext;
use crate::error::Result;
use crate::kbm::{beta_from_delta, delta_from_beta, Control, RelState, VehicleParams};
use crate::synthesis::FilterNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ActiveBound {
    None,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterDecision {
    pub input_beta: f64,
    pub output_beta: f64,
    pub intervened: bool,
    pub active_bound: ActiveBound,
}

/// Clamps the steering of `control` into the filter's interval at
/// `state.xi`. Acceleration passes through unchanged.
pub fn apply_filter(filter: &FilterNetwork, state: &RelState, control: &Control) -> (Control, FilterDecision) {
    let lower = filter.lower_at(state.xi);
    let upper = filter.upper_at(state.xi);
    let out = libm::fmin(upper, libm::fmax(lower, control.beta));
    let active_bound = if out == control.beta {
        ActiveBound::None
    } else if out == upper {
        ActiveBound::Upper
    } else {
        ActiveBound::Lower
    };
    let decision = FilterDecision {
        input_beta: control.beta,
        output_beta: out,
        intervened: active_bound != ActiveBound::None,
        active_bound,
    };
    (Control::new(control.a, out), decision)
}

/// [`apply_filter`] for a front-wheel steering command; returns the filtered
/// front-wheel angle.
pub fn apply_filter_delta(
    filter: &FilterNetwork,
    params: &VehicleParams,
    state: &RelState,
    a: f64,
    delta_f: f64,
) -> Result<(f64, FilterDecision)> {
    let beta = beta_from_delta(delta_f, params)?;
    let (out, decision) = apply_filter(filter, state, &Control::new(a, beta));
    let delta = if decision.intervened {
        delta_from_beta(out.beta, params)?
    } else {
        delta_f
    };
    Ok((delta, decision))
}

/// Whether `control` keeps the barrier condition `dh/dt + α(h) >= 0` at
/// `state`.
pub fn is_in_r(state: &RelState, control: &Control, ctx: &LieContext) -> bool {
    ctx.lie_plus_alpha(state, control.beta) >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{assemble_filter, Line, PwlFunction};
    use core::f64::consts::PI;

    fn toy() -> FilterNetwork {
        let tangents = PwlFunction::min_of_lines(
            alloc::vec![Line { slope: 0.3, intercept: -0.6 }],
            -PI,
            PI,
        )
        .unwrap();
        assert_eq!(tangents.lines.len(), 1);
        assemble_filter(tangents, 0.4636476090008061).unwrap()
    }

    #[test]
    fn interior_command_passes() {
        let f = toy();
        let s = RelState::new(10.0, 0.0, 5.0);
        let (c, d) = apply_filter(&f, &s, &Control::new(1.5, 0.0));
        assert_eq!(c, Control::new(1.5, 0.0));
        assert!(!d.intervened);
        assert_eq!(d.active_bound, ActiveBound::None);
    }

    #[test]
    fn bounds_are_reported() {
        let f = toy();
        let s = RelState::new(10.0, 1.5, 5.0);
        let lower = f.lower_at(1.5);
        let (c, d) = apply_filter(&f, &s, &Control::new(0.0, -0.46));
        assert_eq!(c.beta, lower);
        assert_eq!(d.active_bound, ActiveBound::Lower);
        let s = RelState::new(10.0, -1.5, 5.0);
        let (c, d) = apply_filter(&f, &s, &Control::new(0.0, 0.46));
        assert_eq!(c.beta, f.upper_at(-1.5));
        assert_eq!(d.active_bound, ActiveBound::Upper);
    }

    #[test]
    fn delta_wrapper_round_trips() {
        let f = toy();
        let p = VehicleParams::reference();
        let s = RelState::new(10.0, 1.5, 5.0);
        let (d, dec) = apply_filter_delta(&f, &p, &s, 0.0, -0.7).unwrap();
        assert!(dec.intervened);
        assert!((beta_from_delta(d, &p).unwrap() - dec.output_beta).abs() < 1e-12);
        let (d, dec) = apply_filter_delta(&f, &p, &RelState::new(10.0, 0.0, 5.0), 0.0, 0.1).unwrap();
        assert!(!dec.intervened);
        assert_eq!(d, 0.1);
    }
}
