//! Command-line front end: `synthesize`, `simulate`, `analyze` and `sweep`.
//!
//! Every run writes into one output directory and finishes with a
//! `manifest.json` listing the config hash, seed, tool version and the
//! SHA-256 of every artifact. Output bytes depend only on the config and
//! the seed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    classify_changes, condition_profile, matrix_from_pairs, mean_toward_from_pairs, Aggregation,
    AttitudeMatrix, ChangeClass, ChangeReport, ConditionProfile,
};
use crate::config::{load_config, RunConfig, CONFIG_VERSION};
use crate::error::{Error, Result};
use crate::io::{
    fmt_f64, fmt_opt, indicators_csv, label, population_csv, read_indicators, read_population,
    sha256_hex, to_json_bytes, trace_csv, write_atomic, CsvTable,
};
use crate::model::{AcceptanceSegment, Grid, ModelParams, WorldviewId, Worldviews};
use crate::pairwise::PairwiseAttitudes;
use crate::population::{Kind, Population};
use crate::rng::{stream, Stream};
use crate::synthesis::{build_population, compute_indicators, fit};
use crate::threat::{run_scenario, ScenarioResult};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "CULTURE_THREAT_OUT";

const DEFAULT_OUT_ROOT: &str = "runs";

#[derive(Debug, Parser)]
#[command(name = "culture-threat", version, about = "Cultural identities under terrorist threat messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed of all random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit prototypes to a reference indicator matrix and write the best populations.
    Synthesize {
        #[command(flatten)]
        common: Common,
        /// Reference indicator CSV (overrides `synthesize.reference`).
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Broadcast threat messages to a population and record every snapshot.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Analyse the output directory of a `simulate` run.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Output directory of `simulate` (overrides `analyze.input`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Vary one group's inclusive fraction and simulate every value.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synthesize { .. } => "synthesize",
            Command::Simulate { .. } => "simulate",
            Command::Analyze { .. } => "analyze",
            Command::Sweep { .. } => "sweep",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Synthesize { common, .. }
            | Command::Simulate { common }
            | Command::Analyze { common, .. }
            | Command::Sweep { common } => common,
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            println!("{}", out.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: &Command) -> Result<PathBuf> {
    let common = command.common();
    let mut cfg = match &common.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    let out = output_dir(command.name(), common.out.as_deref(), &cfg);
    match command {
        Command::Synthesize { reference, .. } => {
            if let Some(r) = reference {
                if !r.exists() {
                    return Err(Error::Config(format!("reference {} does not exist", r.display())));
                }
                cfg.synthesize.reference = Some(r.clone());
            }
            synthesize(&cfg, &out)?
        }
        Command::Simulate { .. } => simulate(&cfg, &out)?,
        Command::Analyze { input, .. } => {
            if input.is_some() {
                cfg.analyze.input = input.clone();
            }
            analyze(&cfg, &out)?
        }
        Command::Sweep { .. } => sweep(&cfg, &out)?,
    }
    Ok(out)
}

fn output_dir(command: &str, flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    if let Some(p) = flag.or(cfg.out.as_deref()) {
        return p.to_path_buf();
    }
    let root = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT));
    let seed = cfg.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    root.join(format!("{command}-seed{seed}"))
}

#[derive(Serialize)]
struct ArtifactEntry {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_version: u32,
    command: &'a str,
    seed: Option<u64>,
    config_sha256: String,
    artifacts: Vec<ArtifactEntry>,
}

/// Collects the artifacts of one run.
struct RunDir {
    root: PathBuf,
    artifacts: Vec<ArtifactEntry>,
}

impl RunDir {
    fn new(root: &Path) -> Self {
        RunDir {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.root.join(name), bytes)?;
        self.artifacts.push(ArtifactEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    fn finish(mut self, command: &str, cfg: &RunConfig, seed: Option<u64>) -> Result<()> {
        let canonical = cfg.canonical_toml()?;
        self.write("config.toml", canonical.as_bytes())?;
        self.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_version: CONFIG_VERSION,
            command,
            seed,
            config_sha256: sha256_hex(canonical.as_bytes()),
            artifacts: self.artifacts,
        };
        write_atomic(&self.root.join("manifest.json"), &to_json_bytes(&manifest)?)
    }
}

fn setup(cfg: &RunConfig) -> Result<(ModelParams, Grid)> {
    cfg.model.validate()?;
    Ok((cfg.model, cfg.model.grid()?))
}

/// Loads or builds the initial population; returns it with the seed used.
fn initial_population(cfg: &RunConfig) -> Result<(Population, Option<u64>)> {
    let (pop, seed) = match &cfg.population.file {
        Some(path) => (read_population(path)?, cfg.seed),
        None => {
            let seed = if cfg.population_is_stochastic() {
                Some(cfg.require_seed("population jitter")?)
            } else {
                cfg.seed
            };
            (build_population(&cfg.population_spec(seed.unwrap_or(0))?, &cfg.model)?, seed)
        }
    };
    if pop.worldviews() != &cfg.worldviews()? {
        return Err(Error::Config(format!(
            "population worldviews {:?} differ from config worldviews {:?}",
            pop.worldviews().labels(),
            cfg.worldviews
        )));
    }
    pop.validate_agents(cfg.model.epsilon)?;
    Ok((pop, seed))
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    worldviews: Worldviews,
    params: ModelParams,
    n_messages: usize,
    terrorist_main_worldview: String,
    terrorist_identity: Vec<AcceptanceSegment>,
    all_worldviews: bool,
    snapshots: Vec<String>,
}

#[derive(Serialize)]
struct SimulationSummary {
    seed: Option<u64>,
    agents: usize,
    n_messages: usize,
    /// Agents that reacted to each message.
    reacting: Vec<usize>,
    /// Mean attitude of all agents toward each group, per snapshot.
    mean_attitude: Vec<GroupSeries>,
    /// `group_means[t][g][h]`.
    group_means: Vec<Vec<Vec<Option<f64>>>>,
}

#[derive(Serialize)]
struct GroupSeries {
    group: String,
    values: Vec<Option<f64>>,
}

fn snapshot_name(t: usize) -> String {
    format!("population_t{t:03}.csv")
}

/// Attitude matrix and the mean attitude toward every group, per snapshot.
fn snapshot_stats(
    snapshots: &[Population],
    grid: &Grid,
    params: &ModelParams,
) -> Result<(Vec<AttitudeMatrix>, Vec<Vec<Option<f64>>>)> {
    let mut matrices = Vec::new();
    let mut toward = Vec::new();
    for p in snapshots {
        let pairs = PairwiseAttitudes::compute(p, grid, params)?;
        matrices.push(matrix_from_pairs(p, &pairs));
        toward.push(
            p.worldviews()
                .ids()
                .map(|h| mean_toward_from_pairs(p, &pairs, h))
                .collect(),
        );
    }
    Ok((matrices, toward))
}

fn matrix_csv(worldviews: &Worldviews, matrices: &[AttitudeMatrix]) -> Result<Vec<u8>> {
    let mut t = CsvTable::new(["t", "observer_group", "target_group", "target_kind", "mean"])?;
    for (step, m) in matrices.iter().enumerate() {
        for g in worldviews.ids() {
            for h in worldviews.ids() {
                let (gl, hl) = (worldviews.label(g), worldviews.label(h));
                t.row([step.to_string(), gl.into(), hl.into(), "all".into(), fmt_opt(m.group[g.0][h.0])])?;
                for (k, v) in Kind::ALL.iter().zip(m.by_kind[g.0][h.0]) {
                    t.row([step.to_string(), gl.into(), hl.into(), k.to_string(), fmt_opt(v)])?;
                }
            }
        }
    }
    t.into_bytes()
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (params, grid) = setup(cfg)?;
    let (pop, seed) = initial_population(cfg)?;
    let spec = cfg.scenario_spec()?;
    let result = run_scenario(&pop, &spec, &grid, &params)?;
    let wv = pop.worldviews().clone();
    let mut dir = RunDir::new(out);

    let mut names = Vec::new();
    for (t, p) in result.snapshots.iter().enumerate() {
        let name = snapshot_name(t);
        dir.write(&name, &population_csv(p)?)?;
        names.push(name);
    }
    dir.write("trace.csv", &trace_csv(&wv, result.traces.iter().flatten())?)?;

    let (matrices, toward) = snapshot_stats(&result.snapshots, &grid, &params)?;
    let mut header = vec!["t".to_string()];
    header.extend(wv.labels().iter().map(|l| format!("toward_{l}")));
    let mut series = CsvTable::new(&header)?;
    for (t, row) in toward.iter().enumerate() {
        series.row(std::iter::once(t.to_string()).chain(row.iter().map(|v| fmt_opt(*v))))?;
    }
    dir.write("mean_attitude.csv", &series.into_bytes()?)?;
    dir.write("group_matrix.csv", &matrix_csv(&wv, &matrices)?)?;

    let scenario = ScenarioFile {
        worldviews: wv.clone(),
        params,
        n_messages: spec.n_messages,
        terrorist_main_worldview: wv.label(spec.terrorist.main_worldview()).to_string(),
        terrorist_identity: spec.terrorist.identity().segments().to_vec(),
        all_worldviews: spec.all_worldviews,
        snapshots: names,
    };
    dir.write("scenario.json", &to_json_bytes(&scenario)?)?;
    let summary = SimulationSummary {
        seed,
        agents: pop.len(),
        n_messages: spec.n_messages,
        reacting: result.summaries.iter().skip(1).map(|s| s.reacting).collect(),
        mean_attitude: wv
            .ids()
            .map(|h| GroupSeries {
                group: wv.label(h).to_string(),
                values: toward.iter().map(|r| r[h.0]).collect(),
            })
            .collect(),
        group_means: result.summaries.iter().map(|s| s.group_means.clone()).collect(),
    };
    dir.write("summary.json", &to_json_bytes(&summary)?)?;
    dir.finish("simulate", cfg, seed)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct AnalysisBundle<'a> {
    target: String,
    tau: f64,
    mean_attitude: Vec<f64>,
    attitude_matrices: &'a [AttitudeMatrix],
    changes: &'a ChangeReport,
    condition_profile: &'a ConditionProfile,
}

fn load_scenario(input: &Path) -> Result<(ScenarioFile, ScenarioResult)> {
    let path = input.join("scenario.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let file: ScenarioFile = serde_json::from_str(&text)?;
    let snapshots = file
        .snapshots
        .iter()
        .map(|name| read_population(&input.join(name)))
        .collect::<Result<Vec<_>>>()?;
    if snapshots.is_empty() {
        return Err(Error::data(&path, "no snapshots listed"));
    }
    let result = ScenarioResult {
        snapshots,
        traces: Vec::new(),
        summaries: Vec::new(),
    };
    Ok((file, result))
}

fn distribution_csv(worldviews: &Worldviews, report: &ChangeReport) -> Result<Vec<u8>> {
    let mut t = CsvTable::new(["aggregation", "observer_group", "observer_kind", "class", "count", "percent"])?;
    for d in &report.distributions {
        for row in &d.rows {
            let kind = row.kind.map(|k| k.to_string()).unwrap_or_else(|| "all".into());
            for (i, c) in ChangeClass::ALL.iter().enumerate() {
                t.row([
                    d.aggregation.as_str().to_string(),
                    label(worldviews, row.group),
                    kind.clone(),
                    c.to_string(),
                    row.counts[i].to_string(),
                    fmt_f64(row.percent(*c)),
                ])?;
            }
        }
    }
    t.into_bytes()
}

fn changes_csv(worldviews: &Worldviews, report: &ChangeReport) -> Result<Vec<u8>> {
    let mut t = CsvTable::new(["agent_id", "group", "kind", "delta_inclusive", "delta_exclusive", "class"])?;
    for a in &report.agents {
        t.row([
            a.agent_id.to_string(),
            worldviews.label(a.group).to_string(),
            a.kind.to_string(),
            fmt_opt(a.delta_inclusive),
            fmt_opt(a.delta_exclusive),
            a.class.to_string(),
        ])?;
    }
    t.into_bytes()
}

fn profile_csv(p: &ConditionProfile) -> Result<Vec<u8>> {
    let mut t = CsvTable::new([
        "group",
        "agents",
        "position",
        "lower_width",
        "upper_width",
        "attitude_to_target",
        "upper_width_condition",
        "lower_width_condition",
        "position_condition",
    ])?;
    let stats_row = |name: String, s: &crate::analysis::MarginStats| {
        vec![
            name,
            s.agents.to_string(),
            fmt_f64(s.position),
            fmt_f64(s.lower_width),
            fmt_f64(s.upper_width),
            fmt_opt(s.attitude_to_target),
        ]
    };
    for g in &p.groups {
        let mut row = stats_row(p.worldviews.label(g.group).to_string(), &g.stats);
        row.extend([g.flags.upper_width, g.flags.lower_width, g.flags.position].map(|b| b.to_string()));
        t.row(row)?;
    }
    let mut row = stats_row("all".into(), &p.population);
    row.extend(["", "", ""].map(String::from));
    t.row(row)?;
    t.into_bytes()
}

fn analyze(cfg: &RunConfig, out: &Path) -> Result<()> {
    let input = cfg
        .analyze
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("analyze needs an input directory (--input or analyze.input)".into()))?;
    if !input.is_dir() {
        return Err(Error::Config(format!("analyze input {} is not a directory", input.display())));
    }
    let (scenario, result) = load_scenario(input)?;
    let params = scenario.params;
    params.validate()?;
    let grid = params.grid()?;
    let wv = scenario.worldviews.clone();
    let target_label = cfg.analyze.target.as_deref().unwrap_or(&scenario.terrorist_main_worldview);
    let target: WorldviewId = wv.id(target_label)?;
    let tau = cfg.analyze.tau;

    let (matrices, toward) = snapshot_stats(&result.snapshots, &grid, &params)?;
    let series = toward
        .iter()
        .map(|r| r[target.0].ok_or_else(|| Error::EmptyGroup(target_label.to_string())))
        .collect::<Result<Vec<f64>>>()?;
    let report = classify_changes(&result, target, tau, &grid, &params)?;
    let profile = condition_profile(&result.snapshots[0], target, &grid, &params)?;

    let mut dir = RunDir::new(out);
    dir.write("attitude_matrix.csv", &matrix_csv(&wv, &matrices)?)?;
    let mut t = CsvTable::new(["t", "value"])?;
    for (step, v) in series.iter().enumerate() {
        t.row([step.to_string(), fmt_f64(*v)])?;
    }
    dir.write("mean_attitude.csv", &t.into_bytes()?)?;
    dir.write("change_classes.csv", &changes_csv(&wv, &report)?)?;
    dir.write("change_distribution.csv", &distribution_csv(&wv, &report)?)?;
    dir.write("condition_profile.csv", &profile_csv(&profile)?)?;
    let bundle = AnalysisBundle {
        target: target_label.to_string(),
        tau,
        mean_attitude: series,
        attitude_matrices: &matrices,
        changes: &report,
        condition_profile: &profile,
    };
    dir.write("analysis.json", &to_json_bytes(&bundle)?)?;
    dir.finish("analyze", cfg, cfg.seed)
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Serialize)]
struct SweepRow {
    x: f64,
    population_seed: Option<u64>,
    agents: usize,
    mean_attitude_initial: f64,
    mean_attitude_final: f64,
    reacting_first_message: usize,
    /// Final-vs-initial class percentages, in [`ChangeClass::ALL`] order.
    class_percent: [f64; 5],
}

fn sweep(cfg: &RunConfig, out: &Path) -> Result<()> {
    if cfg.population.file.is_some() {
        return Err(Error::Config("sweep builds populations from a spec; remove population.file".into()));
    }
    let (params, grid) = setup(cfg)?;
    let wv = cfg.worldviews()?;
    let g = wv.id(&cfg.sweep.group)?;
    let stochastic = cfg.population_is_stochastic();
    let master = if stochastic { Some(cfg.require_seed("sweep with population jitter")?) } else { cfg.seed };
    let spec = cfg.scenario_spec()?;
    let spec = crate::threat::ScenarioSpec {
        record_trace: false,
        ..spec
    };
    let target = spec.terrorist.main_worldview();

    let mut rows = Vec::new();
    for (i, &x) in cfg.sweep.values.iter().enumerate() {
        let seed = master.filter(|_| stochastic).map(|m| stream(m, Stream::Sweep, i as u64).random::<u64>());
        let mut pspec = cfg.population_spec(seed.unwrap_or(0))?;
        pspec.inclusive_fraction[g.0] = x;
        let pop = build_population(&pspec, &params)?;
        let result = run_scenario(&pop, &spec, &grid, &params)?;
        let first = result.snapshots.first().expect("initial snapshot");
        let last = result.snapshots.last().expect("final snapshot");
        let mean = |p: &Population| {
            let pairs = PairwiseAttitudes::compute(p, &grid, &params)?;
            mean_toward_from_pairs(p, &pairs, target).ok_or_else(|| Error::EmptyGroup(wv.label(target).to_string()))
        };
        let class_percent = if result.snapshots.len() >= 2 {
            classify_changes(&result, target, cfg.analyze.tau, &grid, &params)?
                .distribution(Aggregation::FinalVsInitial)
                .overall()
                .percentages()
        } else {
            [0.0, 0.0, 0.0, 0.0, 100.0]
        };
        rows.push(SweepRow {
            x,
            population_seed: seed,
            agents: pop.len(),
            mean_attitude_initial: mean(first)?,
            mean_attitude_final: mean(last)?,
            reacting_first_message: result.summaries.get(1).map_or(0, |s| s.reacting),
            class_percent,
        });
    }

    let mut header = vec![
        format!("x_{}", wv.label(g)),
        "agents".into(),
        "mean_attitude_initial".into(),
        "mean_attitude_final".into(),
        "delta".into(),
        "reacting_first_message".into(),
    ];
    header.extend(ChangeClass::ALL.iter().map(|c| format!("{c}_percent")));
    let mut t = CsvTable::new(&header)?;
    for r in &rows {
        let mut row = vec![
            fmt_f64(r.x),
            r.agents.to_string(),
            fmt_f64(r.mean_attitude_initial),
            fmt_f64(r.mean_attitude_final),
            fmt_f64(r.mean_attitude_final - r.mean_attitude_initial),
            r.reacting_first_message.to_string(),
        ];
        row.extend(r.class_percent.iter().map(|p| fmt_f64(*p)));
        t.row(row)?;
    }
    let mut dir = RunDir::new(out);
    dir.write("sweep.csv", &t.into_bytes()?)?;
    dir.write("sweep.json", &to_json_bytes(&rows)?)?;
    dir.finish("sweep", cfg, master)
}

// ---------------------------------------------------------------------------
// synthesize

#[derive(Serialize)]
struct FitSummaryRow {
    rank: usize,
    l1: f64,
    avg_rel: f64,
    max_rel: f64,
    inclusive_fraction: Vec<f64>,
}

fn synthesize(cfg: &RunConfig, out: &Path) -> Result<()> {
    let seed = cfg.require_seed("synthesize")?;
    let (params, grid) = setup(cfg)?;
    let ref_path = cfg
        .synthesize
        .reference
        .as_deref()
        .ok_or_else(|| Error::Config("synthesize needs a reference (--reference or synthesize.reference)".into()))?;
    let reference = read_indicators(ref_path)?;
    reference.validate_reference()?;
    let s = &cfg.synthesize;
    let result = fit(&reference, &s.fit, &grid, &params, seed)?;
    let best = result
        .best()
        .ok_or_else(|| Error::InvalidParameter("the fit produced no candidate (n_starts = 0?)".into()))?;

    let mut dir = RunDir::new(out);
    let fit_toml = toml::to_string(&result).map_err(|e| Error::Config(e.to_string()))?;
    dir.write("fit_result.toml", fit_toml.as_bytes())?;

    let expand = |spec: &crate::synthesis::PopulationSpec| {
        let mut e = spec.clone();
        e.n = s.expand_n;
        e.jitter = s.expand_jitter;
        e.seed = seed;
        e
    };
    let best_spec = expand(&best.spec);
    let spec_toml = toml::to_string(&best_spec).map_err(|e| Error::Config(e.to_string()))?;
    dir.write("best_spec.toml", spec_toml.as_bytes())?;
    let fit_pop = build_population(&best.spec, &params)?;
    dir.write("best_indicators.csv", &indicators_csv(&compute_indicators(&fit_pop, &grid, &params)?)?)?;

    let mut t = CsvTable::new(
        ["rank", "l1", "avg_rel", "max_rel"]
            .into_iter()
            .map(String::from)
            .chain(reference.worldviews.labels().iter().map(|l| format!("x_{l}"))),
    )?;
    let mut summary = Vec::new();
    for (rank, c) in result.candidates.iter().enumerate() {
        let mut row = vec![
            (rank + 1).to_string(),
            fmt_f64(c.objective.l1),
            fmt_f64(c.objective.avg_rel),
            fmt_f64(c.objective.max_rel),
        ];
        row.extend(c.spec.inclusive_fraction.iter().map(|x| fmt_f64(*x)));
        t.row(row)?;
        summary.push(FitSummaryRow {
            rank: rank + 1,
            l1: c.objective.l1,
            avg_rel: c.objective.avg_rel,
            max_rel: c.objective.max_rel,
            inclusive_fraction: c.spec.inclusive_fraction.clone(),
        });
    }
    dir.write("fit_summary.csv", &t.into_bytes()?)?;
    dir.write("summary.json", &to_json_bytes(&summary)?)?;

    for (rank, c) in result.candidates.iter().take(s.write_populations).enumerate() {
        let pop = build_population(&expand(&c.spec), &params)?;
        dir.write(&format!("populations/population_{:03}.csv", rank + 1), &population_csv(&pop)?)?;
    }
    dir.finish("synthesize", cfg, Some(seed))
}
