//! Closed-loop simulation with zero-order-hold control and RK4 integration.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::barrier::LieContext;
use crate::error::{Error, Result};
use crate::filter::apply_filter;
use crate::kbm::{integrate_step, Control, RelState};
use crate::math::{clamp, wrap_angle};
use crate::synthesis::FilterNetwork;

/// Nominal controllers. All of them saturate steering at `±β_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields))]
pub enum ControllerSpec {
    /// Steers toward the obstacle center (`xi → π`) at full acceleration.
    Adversarial { gain: f64, a: f64 },
    /// Uniform steering and acceleration, redrawn every step.
    Random { a_max: f64 },
    /// Tracks a fixed relative heading at constant acceleration.
    Waypoint { target_xi: f64, gain: f64, a: f64 },
}

impl ControllerSpec {
    pub fn adversarial() -> Self {
        Self::Adversarial { gain: 4.0, a: 4.0 }
    }
}

/// Stateful instance of a [`ControllerSpec`].
#[derive(Debug, Clone)]
pub struct Controller {
    spec: ControllerSpec,
    beta_max: f64,
    rng: ChaCha8Rng,
}

impl Controller {
    pub fn new(spec: ControllerSpec, beta_max: f64, seed: u64) -> Self {
        Self {
            spec,
            beta_max,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de_0000_0001),
        }
    }

    pub fn control(&mut self, state: &RelState) -> Control {
        let bm = self.beta_max;
        match self.spec {
            ControllerSpec::Adversarial { gain, a } => {
                Control::new(a, clamp(gain * wrap_angle(state.xi - PI), -bm, bm))
            }
            ControllerSpec::Random { a_max } => {
                let beta = self.rng.random_range(-bm..=bm);
                let a = if a_max > 0.0 {
                    self.rng.random_range(-a_max..=a_max)
                } else {
                    0.0
                };
                Control::new(a, beta)
            }
            ControllerSpec::Waypoint { target_xi, gain, a } => {
                Control::new(a, clamp(gain * wrap_angle(state.xi - target_xi), -bm, bm))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Episodes end once `r` exceeds this many `r̄`.
    pub escape_factor: f64,
    /// Episodes end once `r` drops below this many `r̄`.
    pub crash_factor: f64,
    /// Record every `n`-th step; `0` records nothing.
    pub trajectory_stride: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 60.0,
            escape_factor: 20.0,
            crash_factor: 0.1,
            trajectory_stride: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectorySample {
    pub t: f64,
    pub state: RelState,
    pub nominal: Control,
    pub applied: Control,
    pub intervened: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Termination {
    Timeout,
    Escaped,
    Crashed,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeResult {
    pub min_r: f64,
    pub min_h: f64,
    /// `min_r <= r̄`.
    pub collided: bool,
    pub interventions: u64,
    pub steps: u64,
    pub termination: Termination,
    pub final_state: RelState,
    pub trajectory: Vec<TrajectorySample>,
}

/// Runs one episode from `initial`. With `filter` set, every nominal command
/// passes through it before being applied.
pub fn run_episode(
    ctx: &LieContext,
    initial: RelState,
    controller: &mut Controller,
    filter: Option<&FilterNetwork>,
    config: &SimConfig,
) -> Result<EpisodeResult> {
    if !(config.dt > 0.0 && config.t_max > 0.0) {
        return Err(Error::Config(alloc::format!(
            "dt and t_max must be positive, got {} and {}",
            config.dt,
            config.t_max
        )));
    }
    initial.validate(&ctx.vehicle)?;
    let r_bar = ctx.barrier.r_bar();
    let r_escape = config.escape_factor * r_bar;
    let r_crash = config.crash_factor * r_bar;
    let max_steps = libm::ceil(config.t_max / config.dt - 1e-9) as u64;

    let mut state = initial;
    let mut min_r = state.r;
    let mut min_h = ctx.h(&state);
    let mut interventions = 0;
    let mut steps = 0;
    let mut trajectory = Vec::new();
    let mut termination = Termination::Timeout;

    while steps < max_steps {
        let nominal = controller.control(&state);
        let (applied, intervened) = match filter {
            Some(f) => {
                let (c, d) = apply_filter(f, &state, &nominal);
                (c, d.intervened)
            }
            None => (nominal, false),
        };
        if config.trajectory_stride > 0 && steps % config.trajectory_stride as u64 == 0 {
            trajectory.push(TrajectorySample {
                t: steps as f64 * config.dt,
                state,
                nominal,
                applied,
                intervened,
            });
        }
        interventions += u64::from(intervened);
        steps += 1;
        match integrate_step(&state, &applied, &ctx.vehicle, config.dt) {
            Ok(next) => state = next,
            Err(Error::Singularity { .. }) => {
                min_r = 0.0;
                termination = Termination::Crashed;
                break;
            }
            Err(e) => return Err(e),
        }
        min_r = min_r.min(state.r);
        min_h = min_h.min(ctx.h(&state));
        if state.r <= r_crash {
            termination = Termination::Crashed;
            break;
        }
        if state.r >= r_escape {
            termination = Termination::Escaped;
            break;
        }
    }
    Ok(EpisodeResult {
        min_r,
        min_h,
        collided: min_r <= r_bar,
        interventions,
        steps,
        termination,
        final_state: state,
        trajectory,
    })
}

/// Region initial states are drawn from: `r` uniform between just outside the
/// barrier's zero level and `r_max`, `xi` uniform, `v` uniform in `[v_lo, v_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SpawnRegion {
    /// Lower `r` bound is `1 / (1/r_min(xi) - start_margin)`, i.e. `h >= start_margin`.
    pub start_margin: f64,
    /// Upper `r` bound as a multiple of `r̄`.
    pub r_max_factor: f64,
    pub v_lo: f64,
    /// `None` means `v_max`.
    pub v_hi: Option<f64>,
}

impl Default for SpawnRegion {
    fn default() -> Self {
        Self {
            start_margin: 0.0,
            r_max_factor: 5.0,
            v_lo: 0.0,
            v_hi: None,
        }
    }
}

impl SpawnRegion {
    pub fn sample(&self, ctx: &LieContext, seed: u64) -> Result<RelState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = rng.random_range(-PI..PI);
        let inv = 1.0 / ctx.r_min(xi) - self.start_margin;
        let r_lo = if inv > 0.0 { 1.0 / inv } else { f64::INFINITY };
        let r_hi = self.r_max_factor * ctx.barrier.r_bar();
        if !(r_lo < r_hi) {
            return Err(Error::Config(alloc::format!(
                "empty spawn interval r in [{r_lo}, {r_hi}] at xi = {xi}"
            )));
        }
        let v_hi = self.v_hi.unwrap_or(ctx.vehicle.v_max());
        if !(0.0 <= self.v_lo && self.v_lo <= v_hi && v_hi <= ctx.vehicle.v_max()) {
            return Err(Error::Config(alloc::format!(
                "spawn speed range [{}, {v_hi}] is not within [0, v_max]",
                self.v_lo
            )));
        }
        let r = rng.random_range(r_lo..=r_hi);
        let v = rng.random_range(self.v_lo..=v_hi);
        Ok(RelState::new(r, xi, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CampaignSpec {
    pub episodes: usize,
    pub base_seed: u64,
    pub controller: ControllerSpec,
    pub filter_on: bool,
    #[cfg_attr(feature = "serde", serde(default))]
    pub spawn: SpawnRegion,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sim: SimConfig,
}

impl CampaignSpec {
    /// Seed of episode `i`; decorrelated from its neighbors by SplitMix64.
    pub fn episode_seed(&self, i: usize) -> u64 {
        let mut z = self.base_seed.wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeRecord {
    pub index: usize,
    pub seed: u64,
    pub initial: RelState,
    pub result: EpisodeResult,
}

/// Runs episode `index` of a campaign. Independent of every other episode, so
/// callers may schedule episodes in any order or in parallel.
pub fn run_campaign_episode(
    ctx: &LieContext,
    spec: &CampaignSpec,
    filter: Option<&FilterNetwork>,
    index: usize,
) -> Result<EpisodeRecord> {
    let seed = spec.episode_seed(index);
    let initial = spec.spawn.sample(ctx, seed)?;
    let mut controller = Controller::new(spec.controller, ctx.beta_max(), seed);
    let filter = if spec.filter_on {
        Some(filter.ok_or_else(|| Error::Config("filter_on requires a filter".into()))?)
    } else {
        None
    };
    let result = run_episode(ctx, initial, &mut controller, filter, &spec.sim)?;
    Ok(EpisodeRecord {
        index,
        seed,
        initial,
        result,
    })
}

pub fn run_campaign(ctx: &LieContext, spec: &CampaignSpec, filter: Option<&FilterNetwork>) -> Result<Vec<EpisodeRecord>> {
    (0..spec.episodes)
        .map(|i| run_campaign_episode(ctx, spec, filter, i))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub lo: f64,
    pub bin_width: f64,
    /// The last bin also counts everything above its upper edge.
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Self {
            lo,
            bin_width: (hi - lo) / bins as f64,
            counts: vec![0; bins],
        }
    }

    pub fn add(&mut self, x: f64) {
        let last = self.counts.len() - 1;
        let i = if x <= self.lo {
            0
        } else {
            ((x - self.lo) / self.bin_width) as usize
        };
        self.counts[i.min(last)] += 1;
    }

    pub fn edges(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.counts.len()).map(|i| {
            let a = self.lo + i as f64 * self.bin_width;
            (a, a + self.bin_width)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CampaignSummary {
    pub episodes: usize,
    pub collisions: usize,
    pub collision_rate: f64,
    pub min_r: f64,
    pub min_h: f64,
    pub interventions: u64,
    pub steps: u64,
    /// Interventions per applied control step.
    pub intervention_rate: f64,
    pub min_r_histogram: Histogram,
    /// Obstacle radius, drawn as a reference line on the histogram.
    pub r_bar: f64,
    /// Closest point of the barrier's zero level, `r_min(π)`.
    pub r_min_pi: f64,
}

/// Aggregates records in index order, so the result does not depend on the
/// order episodes finished in.
pub fn summarize(ctx: &LieContext, spec: &CampaignSpec, records: &[EpisodeRecord]) -> CampaignSummary {
    let mut sorted: Vec<&EpisodeRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.index);
    let r_bar = ctx.barrier.r_bar();
    let mut hist = Histogram::new(0.0, spec.spawn.r_max_factor * r_bar, 40);
    let mut collisions = 0;
    let mut min_r = f64::INFINITY;
    let mut min_h = f64::INFINITY;
    let mut interventions = 0;
    let mut steps = 0;
    for rec in &sorted {
        let res = &rec.result;
        hist.add(res.min_r);
        collisions += usize::from(res.collided);
        min_r = min_r.min(res.min_r);
        min_h = min_h.min(res.min_h);
        interventions += res.interventions;
        steps += res.steps;
    }
    let n = sorted.len();
    CampaignSummary {
        episodes: n,
        collisions,
        collision_rate: if n == 0 { 0.0 } else { collisions as f64 / n as f64 },
        min_r,
        min_h,
        interventions,
        steps,
        intervention_rate: if steps == 0 { 0.0 } else { interventions as f64 / steps as f64 },
        min_r_histogram: hist,
        r_bar,
        r_min_pi: ctx.r_min(PI),
    }
}
