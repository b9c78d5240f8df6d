//! Parallel campaign execution and CSV output.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shieldnn_core::sim::{run_campaign_episode, summarize, CampaignSpec, CampaignSummary, ControllerSpec, EpisodeRecord};
use shieldnn_core::{FilterNetwork, LieContext};

use crate::error::{CliError, Result};

/// Builds a rayon pool capped at `threads` (`None`: rayon's default).
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}

/// Runs every episode of `spec` on `pool`. Records come back in index order
/// regardless of scheduling.
pub fn run_parallel(
    pool: &rayon::ThreadPool,
    ctx: &LieContext,
    spec: &CampaignSpec,
    filter: Option<&FilterNetwork>,
) -> Result<Vec<EpisodeRecord>> {
    let records: shieldnn_core::Result<Vec<_>> = pool.install(|| {
        (0..spec.episodes)
            .into_par_iter()
            .map(|i| run_campaign_episode(ctx, spec, filter, i))
            .collect()
    });
    Ok(records?)
}

pub fn controller_name(c: &ControllerSpec) -> &'static str {
    match c {
        ControllerSpec::Adversarial { .. } => "adversarial",
        ControllerSpec::Random { .. } => "random",
        ControllerSpec::Waypoint { .. } => "waypoint",
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EpisodeRow {
    pub episode: usize,
    pub seed: u64,
    pub controller: String,
    pub filter_on: bool,
    pub min_r: f64,
    pub min_h: f64,
    pub collided: bool,
    pub interventions: u64,
    pub steps: u64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub r: f64,
    pub xi: f64,
    pub v: f64,
    pub a: f64,
    pub beta_in: f64,
    pub beta_out: f64,
    pub intervened: bool,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_owned(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_owned(),
        source,
    }
}

pub fn write_episodes_csv(path: &Path, spec: &CampaignSpec, records: &[EpisodeRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for rec in records {
        w.serialize(EpisodeRow {
            episode: rec.index,
            seed: rec.seed,
            controller: controller_name(&spec.controller).to_owned(),
            filter_on: spec.filter_on,
            min_r: rec.result.min_r,
            min_h: rec.result.min_h,
            collided: rec.result.collided,
            interventions: rec.result.interventions,
            steps: rec.result.steps,
        })
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_trajectory_csv(path: &Path, record: &EpisodeRecord) -> Result<()> {
    let mut w = csv_writer(path)?;
    for s in &record.result.trajectory {
        w.serialize(TrajectoryRow {
            t: s.t,
            r: s.state.r,
            xi: s.state.xi,
            v: s.state.v,
            a: s.applied.a,
            beta_in: s.nominal.beta,
            beta_out: s.applied.beta,
            intervened: s.intervened,
        })
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// One campaign's outcome as stored in the summary artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub spec: CampaignSpec,
    pub summary: CampaignSummary,
}

pub fn report(ctx: &LieContext, spec: &CampaignSpec, records: &[EpisodeRecord]) -> CampaignReport {
    CampaignReport {
        spec: *spec,
        summary: summarize(ctx, spec, records),
    }
}
