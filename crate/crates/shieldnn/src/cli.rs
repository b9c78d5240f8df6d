//! Subcommand definitions and their implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use shieldnn_core::sim::{run_campaign_episode, CampaignSpec, ControllerSpec};
use shieldnn_core::synthesis::{export_relu, synthesize, SynthesisConfig};
use shieldnn_core::verifier::{existence_precheck, Precheck, Status};
use shieldnn_core::{verify, FilterNetwork, LieContext, Verdict, VerificationCertificate};

use crate::artifact::{self, FilterFile, Loaded, CAMPAIGN_SCHEMA, CERTIFICATE_SCHEMA, FILTER_SCHEMA};
use crate::campaign::{self, CampaignReport};
use crate::config::ToolConfig;
use crate::error::{CliError, ExitCode, Result};
use crate::region;

#[derive(Debug, Parser)]
#[command(name = "shieldnn", version, about = "Barrier verification, safety-filter synthesis and closed-loop simulation for the kinematic bicycle model")]
pub struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "SHIELDNN_THREADS")]
    pub threads: Option<usize>,
    /// Refuse artifacts whose content or provenance hash does not match.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the effective configuration (defaults filled in).
    Config(ConfigArg),
    /// Evaluate the sufficient analytic conditions for a barrier to exist.
    Precheck(ConfigArg),
    /// Soundly verify the barrier and write a certificate.
    Verify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the safety filter from a verified certificate.
    Synthesize {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        k_tangents: Option<usize>,
    },
    /// Write the safe/unsafe steering grid and the boundary polylines as CSV.
    Region {
        #[command(flatten)]
        config: ConfigArg,
        /// Use the context and boundary of an existing certificate.
        #[arg(long, conflicts_with = "config")]
        cert: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        boundary: Option<PathBuf>,
        #[arg(long, default_value_t = 181)]
        grid_xi: usize,
        #[arg(long, default_value_t = 61)]
        grid_beta: usize,
    },
    /// Run a seeded simulation campaign with and/or without the filter.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Tool configuration JSON; the reference configuration when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<ToolConfig> {
        match &self.config {
            Some(p) => ToolConfig::load(p),
            None => Ok(ToolConfig::reference()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ControllerKind {
    Adversarial,
    Random,
    Waypoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterMode {
    On,
    Off,
    Both,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Filter artifact; required unless `--mode off`.
    #[arg(long)]
    pub filter: Option<PathBuf>,
    /// Certificate the filter must have been synthesized from.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub episodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ControllerKind::Adversarial)]
    pub controller: ControllerKind,
    #[arg(long, value_enum, default_value_t = FilterMode::Both)]
    pub mode: FilterMode,
    /// Steering gain of the adversarial and waypoint controllers.
    #[arg(long, default_value_t = 4.0)]
    pub gain: f64,
    /// Acceleration (adversarial, waypoint) or its bound (random).
    #[arg(long, default_value_t = 4.0)]
    pub accel: f64,
    /// Heading held by the waypoint controller.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub target_xi: f64,
    /// Dump trajectories of the first N episodes.
    #[arg(long, default_value_t = 0)]
    pub trajectories: usize,
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
}

/// Parses `args` and runs the command, writing human-readable output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Usage } else { ExitCode::Success };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::Success,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<ExitCode> {
    match &cli.command {
        Command::Config(c) => {
            let cfg = c.load()?;
            say(out, &cfg.to_json())?;
            Ok(ExitCode::Success)
        }
        Command::Precheck(c) => cmd_precheck(&c.load()?, out),
        Command::Verify { config, out: path } => cmd_verify(&config.load()?, path, out),
        Command::Synthesize { cert, out: path, k_tangents } => cmd_synthesize(cli, cert, path, *k_tangents, out),
        Command::Region {
            config,
            cert,
            out: path,
            boundary,
            grid_xi,
            grid_beta,
        } => {
            let source = match cert {
                Some(p) => RegionSource::Certificate(load_certificate(cli, p)?.body),
                None => RegionSource::Config(config.load()?),
            };
            cmd_region(source, path, boundary.as_deref(), *grid_xi, *grid_beta, out)
        }
        Command::Simulate(args) => cmd_simulate(cli, args, out),
    }
}

fn say(out: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(out, "{line}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// One-line verdict of the analytic pre-check.
pub fn precheck_message(p: &Precheck) -> String {
    if !p.condition_i {
        return "condition (i) fails: beta_max exceeds pi/2; no analytic guarantee; proceed to sound verification".into();
    }
    if p.analytic_guarantee {
        return format!(
            "analytic guarantee holds (condition (ii) left side {:.4} >= 2)",
            p.condition_ii_lhs
        );
    }
    match p.sigma_lower_bound {
        Some(b) => format!(
            "no analytic guarantee; sigma >= {b:.4} would satisfy condition (ii); proceed to sound verification"
        ),
        None => format!(
            "no analytic guarantee (bound {:.2} > 1); proceed to sound verification",
            p.sigma_bound
        ),
    }
}

pub fn cmd_precheck(cfg: &ToolConfig, out: &mut dyn Write) -> Result<ExitCode> {
    let p = existence_precheck(&cfg.context());
    say(out, &format!("condition (i)  beta_max <= pi/2: {}", p.condition_i))?;
    say(
        out,
        &format!("condition (ii) left side = {:.6} (needs >= 2): {}", p.condition_ii_lhs, p.condition_ii),
    )?;
    say(out, &format!("sigma bound = {:.6}", p.sigma_bound))?;
    say(out, &precheck_message(&p))?;
    Ok(ExitCode::Success)
}

fn describe_status(s: &Status) -> String {
    match s {
        Status::Verified => "Verified".into(),
        Status::Failed(p) => format!("Failed({p:?})"),
        Status::Inconclusive(p) => format!("Inconclusive({p:?})"),
    }
}

pub fn cmd_verify(cfg: &ToolConfig, path: &Path, out: &mut dyn Write) -> Result<ExitCode> {
    let ctx = cfg.context();
    let cert = verify(&ctx, &cfg.verify)?;
    for r in &cert.property_results {
        let verdict = match r.result.verdict {
            Verdict::Certified => "certified".to_owned(),
            Verdict::Refuted { xi, beta, value } => format!("refuted at xi = {xi}, beta = {beta} (value {value:e})"),
            Verdict::Inconclusive => "inconclusive".to_owned(),
        };
        say(
            out,
            &format!(
                "{:<7} {verdict} ({} cells, depth {})",
                format!("{:?}", r.property),
                r.result.cells_checked,
                r.result.refinement_depth
            ),
        )?;
    }
    let hash = artifact::write(path, CERTIFICATE_SCHEMA, &cert)?;
    say(out, &format!("xi0 = {}", cert.xi0))?;
    if let Some(b) = cert.beta0_pi {
        say(out, &format!("beta0(pi) = {b}"))?;
    }
    say(out, &format!("status: {}", describe_status(&cert.status)))?;
    say(out, &format!("certificate {} {hash}", path.display()))?;
    Ok(if cert.is_verified() { ExitCode::Success } else { ExitCode::Domain })
}

/// Reads a certificate, enforcing its content hash in strict mode.
fn load_certificate(cli: &Cli, path: &Path) -> Result<Loaded<VerificationCertificate>> {
    let cert = artifact::read_certificate(path)?;
    check_content_hash(cli, path, &cert)?;
    Ok(cert)
}

fn check_content_hash<T>(cli: &Cli, path: &Path, loaded: &Loaded<T>) -> Result<()> {
    if loaded.hash_matches() {
        return Ok(());
    }
    let msg = format!(
        "{}: content hash {} does not match recorded {}",
        path.display(),
        loaded.hash,
        loaded.recorded_hash
    );
    if cli.strict {
        return Err(CliError::Provenance(msg));
    }
    eprintln!("warning: {msg}");
    Ok(())
}

pub fn cmd_synthesize(
    cli: &Cli,
    cert_path: &Path,
    path: &Path,
    k_tangents: Option<usize>,
    out: &mut dyn Write,
) -> Result<ExitCode> {
    let cert = load_certificate(cli, cert_path)?;
    if !cert.body.is_verified() {
        return Err(CliError::Domain(format!(
            "{}: certificate status is {}, not Verified",
            cert_path.display(),
            describe_status(&cert.body.status)
        )));
    }
    let mut config = SynthesisConfig::default();
    if let Some(k) = k_tangents {
        config.k_tangents = k;
    }
    let syn = synthesize(&cert.body, &config)?;
    let relu = export_relu(&syn.filter);
    let file = FilterFile {
        context: cert.body.ctx,
        certificate_hash: cert.hash.clone(),
        synthesis: config,
        xi0: cert.body.xi0,
        trace: syn.trace,
        filter: syn.filter,
        relu,
    };
    let hash = artifact::write(path, FILTER_SCHEMA, &file)?;
    say(out, &format!("tangents = {}", file.filter.tangents.lines.len()))?;
    say(out, &format!("margin = {}", file.filter.margin))?;
    say(out, &format!("relu layers = {}", file.relu.layers.len()))?;
    say(out, &format!("filter {} {hash}", path.display()))?;
    Ok(ExitCode::Success)
}

pub enum RegionSource {
    Config(ToolConfig),
    Certificate(VerificationCertificate),
}

pub fn cmd_region(
    source: RegionSource,
    path: &Path,
    boundary: Option<&Path>,
    grid_xi: usize,
    grid_beta: usize,
    out: &mut dyn Write,
) -> Result<ExitCode> {
    let (cert, synthesis) = match source {
        RegionSource::Config(cfg) => (verify(&cfg.context(), &cfg.verify)?, cfg.synthesis),
        RegionSource::Certificate(c) => (c, SynthesisConfig::default()),
    };
    let cells = region::sign_grid(&cert.ctx, grid_xi, grid_beta)?;
    region::write_csv(path, &cells)?;
    let safe = cells.iter().filter(|c| c.safe).count();
    say(out, &format!("grid {} cells, {} safe", cells.len(), safe))?;
    let Some(bpath) = boundary else {
        return Ok(ExitCode::Success);
    };
    if !cert.is_verified() {
        say(out, &format!("status: {}; no boundary written", describe_status(&cert.status)))?;
        return Ok(ExitCode::Domain);
    }
    let trace = shieldnn_core::synthesis::trace_boundary(&cert, synthesis.n_samples, synthesis.trace_tol)?;
    region::write_csv(bpath, &region::boundary_polylines(&trace))?;
    say(out, &format!("xi0 = {}", cert.xi0))?;
    say(out, &format!("boundary {} ({} points per branch)", bpath.display(), trace.samples.len()))?;
    Ok(ExitCode::Success)
}

fn controller_spec(args: &SimulateArgs) -> ControllerSpec {
    match args.controller {
        ControllerKind::Adversarial => ControllerSpec::Adversarial {
            gain: args.gain,
            a: args.accel,
        },
        ControllerKind::Random => ControllerSpec::Random { a_max: args.accel },
        ControllerKind::Waypoint => ControllerSpec::Waypoint {
            target_xi: args.target_xi,
            gain: args.gain,
            a: args.accel,
        },
    }
}

/// Loads the filter and checks it belongs to `ctx` (and, in strict mode, to
/// the supplied certificate).
fn load_filter(cli: &Cli, args: &SimulateArgs, ctx: &LieContext) -> Result<Option<FilterNetwork>> {
    let Some(path) = &args.filter else {
        if args.mode == FilterMode::Off {
            return Ok(None);
        }
        return Err(CliError::Usage("--filter is required unless --mode off".into()));
    };
    let file = artifact::read_filter(path)?;
    check_content_hash(cli, path, &file)?;
    if file.body.context != *ctx {
        return Err(CliError::Domain(format!(
            "{} was synthesized for different vehicle/barrier parameters than the configuration",
            path.display()
        )));
    }
    if let Some(cpath) = &args.cert {
        let cert = load_certificate(cli, cpath)?;
        if cert.hash != file.body.certificate_hash {
            let msg = format!(
                "{} records certificate {}, but {} hashes to {}",
                path.display(),
                file.body.certificate_hash,
                cpath.display(),
                cert.hash
            );
            if cli.strict {
                return Err(CliError::Provenance(msg));
            }
            eprintln!("warning: {msg}");
        }
    } else if cli.strict {
        return Err(CliError::Usage("--strict needs --cert to check the filter's provenance".into()));
    }
    Ok(Some(file.body.filter))
}

pub fn cmd_simulate(cli: &Cli, args: &SimulateArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let cfg = args.config.load()?;
    let ctx = cfg.context();
    if args.episodes == 0 {
        return Err(CliError::Usage("--episodes must be at least 1".into()));
    }
    if args.trajectories > 0 && args.stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    let filter = load_filter(cli, args, &ctx)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|source| CliError::Io {
        path: args.out_dir.clone(),
        source,
    })?;
    let pool = campaign::thread_pool(cli.threads)?;
    let modes: &[bool] = match args.mode {
        FilterMode::On => &[true],
        FilterMode::Off => &[false],
        FilterMode::Both => &[true, false],
    };
    let mut reports: Vec<CampaignReport> = Vec::new();
    for &filter_on in modes {
        let spec = CampaignSpec {
            episodes: args.episodes,
            base_seed: args.seed,
            controller: controller_spec(args),
            filter_on,
            spawn: cfg.spawn,
            sim: cfg.sim,
        };
        let records = campaign::run_parallel(&pool, &ctx, &spec, filter.as_ref())?;
        let tag = if filter_on { "on" } else { "off" };
        campaign::write_episodes_csv(&args.out_dir.join(format!("episodes_{tag}.csv")), &spec, &records)?;

        let mut traced = spec;
        traced.sim.trajectory_stride = args.stride;
        for i in 0..args.trajectories.min(args.episodes) {
            let rec = run_campaign_episode(&ctx, &traced, filter.as_ref(), i)?;
            campaign::write_trajectory_csv(&args.out_dir.join(format!("trajectory_{tag}_{i}.csv")), &rec)?;
        }

        let rep = campaign::report(&ctx, &spec, &records);
        let s = &rep.summary;
        say(
            out,
            &format!(
                "filter {tag:>3}: {}/{} collisions (rate {:.4}), min r = {:.6}, min h = {:.6e}, intervention rate = {:.4}",
                s.collisions, s.episodes, s.collision_rate, s.min_r, s.min_h, s.intervention_rate
            ),
        )?;
        reports.push(rep);
    }
    let summary_path = args.out_dir.join("summary.json");
    artifact::write(&summary_path, CAMPAIGN_SCHEMA, &reports)?;
    say(out, &format!("summary {}", summary_path.display()))?;
    Ok(ExitCode::Success)
}
