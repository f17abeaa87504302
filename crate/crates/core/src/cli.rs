//! Command-line entry point shared by the `delstream` binary and tests.

use std::collections::{HashMap, HashSet};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::coord::{detect_coordination, CoordinationOptions, DEFAULT_MIN_COMPONENT, DEFAULT_MIN_UNLIKES};
use crate::estimator::{
    compare_timelines, estimate_from_sampled_tweets, CompareOptions, SampledTweet, DEFAULT_ESTIMATE_FLOOR,
    DEFAULT_PERMUTATIONS,
};
use crate::flood::{detect, profile_violators, FloodingViolation, ViolationFilter, DEFAULT_DAILY_LIMIT};
use crate::ingest::{
    aggregate_daily_sharded, aggregate_unlikes, build_timelines, AccountTimeline, DailyDeletionRecord, UnlikeRecord,
    DEFAULT_INCLUSION_THRESHOLD,
};
use crate::io::{self, IoError, Manifest};
use crate::model::{AccountId, AccountStatus};
use crate::stats::{
    bot_score_buckets, default_stopwords, frequency_buckets, median_age_ccdf, profile_terms, rank_slice,
    suspension_stats, summarize, Category, FrequencyBucket, DEFAULT_WINDOW_DAYS,
};
use crate::synth::{generate, PopulationSpec, SynthError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(IoError::Missing(_)) => 2,
            CliError::Schema(_) | CliError::Io(IoError::Schema { .. }) => 3,
            _ => 1,
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InvalidSpec(_) => CliError::Usage(e.to_string()),
            SynthError::Parse(_) => CliError::Schema(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "delstream", version, about = "Deletion-stream analytics")]
pub struct Cli {
    /// TOML file with default thresholds; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate raw notices into daily deletion records, unlike pairs and timelines.
    Aggregate(AggregateArgs),
    /// Compare count-based deletion estimates with actual deletions.
    Estimate(EstimateArgs),
    /// Behavioral summaries, buckets, CCDFs, suspension rates and profile terms.
    Stats(StatsArgs),
    /// Find account-days posting beyond the daily limit.
    DetectFlooding(FloodArgs),
    /// Extract coordinated like/unlike components.
    DetectCoordination(CoordArgs),
    /// Generate a labeled synthetic population.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<u64>,
    #[arg(long)]
    pub shards: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Timelines file, or a directory containing timelines.jsonl.
    #[arg(long)]
    pub timelines: PathBuf,
    #[arg(long)]
    pub floor: Option<u64>,
    #[arg(long)]
    pub per_account_median: bool,
    #[arg(long)]
    pub exclude_gaps: bool,
    /// Label permutations for the KS p-value; 0 skips it.
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV of account_id,observed_at,statuses_count.
    #[arg(long)]
    pub sampled_tweets: Option<PathBuf>,
    /// Report file; pairs and CCDFs are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub timelines: PathBuf,
    #[arg(long)]
    pub violations: Option<PathBuf>,
    /// CSV of account_id,bot_score.
    #[arg(long)]
    pub bot_scores: Option<PathBuf>,
    /// CSV of account_id,status.
    #[arg(long)]
    pub final_statuses: Option<PathBuf>,
    #[arg(long)]
    pub window_days: Option<u32>,
    #[arg(long, default_value_t = 20)]
    pub top_terms: usize,
    /// Fraction of a category ranked by mean daily deletions for term slices.
    #[arg(long, default_value_t = 0.1)]
    pub slice_fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FloodArgs {
    #[arg(long)]
    pub timelines: PathBuf,
    #[arg(long)]
    pub limit: Option<u64>,
    /// One account ID per line.
    #[arg(long)]
    pub allowlist: Option<PathBuf>,
    #[arg(long)]
    pub exclude_stale: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoordArgs {
    /// Daily deletion records with tweet IDs, or the aggregate output directory.
    #[arg(long)]
    pub deletions: PathBuf,
    #[arg(long)]
    pub unlikes: PathBuf,
    #[arg(long)]
    pub min_unlikes: Option<u64>,
    #[arg(long)]
    pub min_component: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Population spec, TOML or JSON by extension.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Values read from `--config`; any missing key falls back to its default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub inclusion_threshold: Option<u64>,
    pub daily_limit: Option<u64>,
    pub min_unlikes: Option<u64>,
    pub min_component: Option<usize>,
    pub estimate_floor: Option<u64>,
    pub window_days: Option<u32>,
    pub permutations: Option<usize>,
    pub shards: Option<usize>,
    pub seed: Option<u64>,
}

/// Effective thresholds for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inclusion_threshold: u64,
    pub daily_limit: u64,
    pub min_unlikes: u64,
    pub min_component: usize,
    pub estimate_floor: u64,
    pub window_days: u32,
    pub permutations: usize,
    pub shards: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inclusion_threshold: DEFAULT_INCLUSION_THRESHOLD,
            daily_limit: DEFAULT_DAILY_LIMIT,
            min_unlikes: DEFAULT_MIN_UNLIKES,
            min_component: DEFAULT_MIN_COMPONENT,
            estimate_floor: DEFAULT_ESTIMATE_FLOOR,
            window_days: DEFAULT_WINDOW_DAYS,
            permutations: DEFAULT_PERMUTATIONS,
            shards: 1,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_file(file: &FileConfig) -> Self {
        let d = Self::default();
        Self {
            inclusion_threshold: file.inclusion_threshold.unwrap_or(d.inclusion_threshold),
            daily_limit: file.daily_limit.unwrap_or(d.daily_limit),
            min_unlikes: file.min_unlikes.unwrap_or(d.min_unlikes),
            min_component: file.min_component.unwrap_or(d.min_component),
            estimate_floor: file.estimate_floor.unwrap_or(d.estimate_floor),
            window_days: file.window_days.unwrap_or(d.window_days),
            permutations: file.permutations.unwrap_or(d.permutations),
            shards: file.shards.unwrap_or(d.shards),
            seed: file.seed.unwrap_or(d.seed),
        }
    }

    fn apply_flags(&mut self, command: &Command) {
        fn set<T: Copy>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        match command {
            Command::Aggregate(a) => {
                set(&mut self.inclusion_threshold, a.threshold);
                set(&mut self.shards, a.shards);
            }
            Command::Estimate(a) => {
                set(&mut self.estimate_floor, a.floor);
                set(&mut self.permutations, a.permutations);
                set(&mut self.seed, a.seed);
            }
            Command::Stats(a) => set(&mut self.window_days, a.window_days),
            Command::DetectFlooding(a) => set(&mut self.daily_limit, a.limit),
            Command::DetectCoordination(a) => {
                set(&mut self.min_unlikes, a.min_unlikes);
                set(&mut self.min_component, a.min_component);
            }
            Command::Generate(a) => set(&mut self.seed, a.seed),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("inclusion threshold", self.inclusion_threshold as u128),
            ("daily limit", self.daily_limit as u128),
            ("min unlikes", self.min_unlikes as u128),
            ("min component", self.min_component as u128),
            ("estimate floor", self.estimate_floor as u128),
            ("window days", self.window_days as u128),
            ("shards", self.shards as u128),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("delstream: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => CliError::Io(IoError::Missing(path.clone())),
                _ => CliError::Other(format!("{}: {e}", path.display())),
            })?;
            toml::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig::from_file(&file);
    cfg.apply_flags(&cli.command);
    cfg.validate()?;
    match &cli.command {
        Command::Aggregate(a) => cmd_aggregate(a, &cfg),
        Command::Estimate(a) => cmd_estimate(a, &cfg),
        Command::Stats(a) => cmd_stats(a, &cfg),
        Command::DetectFlooding(a) => cmd_flood(a, &cfg),
        Command::DetectCoordination(a) => cmd_coord(a, &cfg),
        Command::Generate(a) => cmd_generate(a, &cfg),
    }
}

fn resolve(path: &Path, default_name: &str) -> PathBuf {
    if path.is_dir() {
        path.join(default_name)
    } else {
        path.to_path_buf()
    }
}

fn sidecar_dir(file: &Path) -> PathBuf {
    match file.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn sidecar_manifest(manifest: &Manifest, out: &Path) -> Result<(), CliError> {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    io::write_json(&sidecar_dir(out).join(format!("{stem}.manifest.json")), manifest)?;
    Ok(())
}

fn read_timelines(path: &Path) -> Result<Vec<AccountTimeline>, CliError> {
    Ok(io::read_jsonl(&resolve(path, "timelines.jsonl"))?)
}

fn cmd_aggregate(a: &AggregateArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (notices, skipped) = io::read_notices(&a.events)?;
    let snapshots = match &a.snapshots {
        Some(p) => io::read_snapshots(p)?,
        None => Vec::new(),
    };
    let records = aggregate_daily_sharded(&notices, cfg.inclusion_threshold, cfg.shards);
    let unlikes = aggregate_unlikes(&notices);
    log::info!("{} notices, {} skipped, {} deletion days", notices.len(), skipped, records.len());

    let mut manifest = Manifest::new(
        "aggregate",
        json!({ "inclusion_threshold": cfg.inclusion_threshold, "shards": cfg.shards }),
    );
    manifest.add_input(&a.events)?;
    io::write_jsonl(&a.out.join("daily_deletions.jsonl"), &records)?;
    io::write_jsonl(&a.out.join("unlikes.jsonl"), &unlikes)?;
    manifest.outputs = vec!["daily_deletions.jsonl".into(), "unlikes.jsonl".into()];
    if let Some(p) = &a.snapshots {
        manifest.add_input(p)?;
        let timelines: Vec<AccountTimeline> = build_timelines(snapshots, records)
            .map_err(|e| CliError::Schema(e.to_string()))?
            .into_iter()
            .map(AccountTimeline::without_tweet_ids)
            .collect();
        io::write_jsonl(&a.out.join("timelines.jsonl"), &timelines)?;
        manifest.outputs.push("timelines.jsonl".into());
    }
    manifest.parameters["skipped_records"] = json!(skipped);
    manifest.write(&a.out)?;
    Ok(())
}

#[derive(Serialize)]
struct CcdfRow {
    value: f64,
    fraction: f64,
}

fn ccdf_rows(points: &[(f64, f64)]) -> Vec<CcdfRow> {
    points.iter().map(|&(value, fraction)| CcdfRow { value, fraction }).collect()
}

#[derive(Serialize)]
struct SampledRow {
    account_id: AccountId,
    estimate: Option<u64>,
}

fn cmd_estimate(a: &EstimateArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let path = resolve(&a.timelines, "timelines.jsonl");
    let timelines = read_timelines(&a.timelines)?;
    let options = CompareOptions {
        floor: cfg.estimate_floor,
        per_account_median: a.per_account_median,
        exclude_gaps: a.exclude_gaps,
        permutations: (cfg.permutations > 0).then_some(cfg.permutations),
        seed: cfg.seed,
    };
    let report = compare_timelines(&timelines, &options);
    let dir = sidecar_dir(&a.out);
    let stem = a.out.file_stem().and_then(|s| s.to_str()).unwrap_or("report").to_string();
    let mut manifest = Manifest::new("estimate", json!({ "options": options }));
    manifest.add_input(&path)?;

    io::write_json(&a.out, &report)?;
    io::write_csv(&dir.join(format!("{stem}_pairs.csv")), &report.paired)?;
    let (actual, estimated) = report
        .stats
        .as_ref()
        .map(|s| (ccdf_rows(&s.ccdf_actual), ccdf_rows(&s.ccdf_estimated)))
        .unwrap_or_default();
    write_ccdf(&dir.join(format!("{stem}_ccdf_actual.csv")), &actual)?;
    write_ccdf(&dir.join(format!("{stem}_ccdf_estimated.csv")), &estimated)?;
    manifest.outputs = vec![
        a.out.display().to_string(),
        format!("{stem}_pairs.csv"),
        format!("{stem}_ccdf_actual.csv"),
        format!("{stem}_ccdf_estimated.csv"),
    ];
    if let Some(p) = &a.sampled_tweets {
        manifest.add_input(p)?;
        let tweets: Vec<SampledTweet> = io::read_csv(p)?;
        let rows: Vec<SampledRow> = estimate_from_sampled_tweets(&tweets)
            .into_iter()
            .map(|(account_id, estimate)| SampledRow { account_id, estimate })
            .collect();
        io::write_csv_records(
            &dir.join(format!("{stem}_sampled.csv")),
            &["account_id", "estimate"],
            &rows
                .iter()
                .map(|r| vec![r.account_id.to_string(), r.estimate.map(|e| e.to_string()).unwrap_or_default()])
                .collect::<Vec<_>>(),
        )?;
        manifest.outputs.push(format!("{stem}_sampled.csv"));
    }
    sidecar_manifest(&manifest, &a.out)
}

fn write_ccdf(path: &Path, rows: &[CcdfRow]) -> Result<(), CliError> {
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.value.to_string(), r.fraction.to_string()])
        .collect();
    io::write_csv_records(path, &["value", "fraction"], &records)?;
    Ok(())
}

#[derive(Deserialize)]
struct BotScoreRow {
    account_id: AccountId,
    bot_score: f64,
}

#[derive(Deserialize)]
struct StatusRow {
    account_id: AccountId,
    status: String,
}

#[derive(Serialize)]
struct SummaryRow {
    account_id: AccountId,
    deleting_days: u32,
    total_deletions: u64,
    mean_daily_deletions: f64,
    median_deleted_age_days: Option<u32>,
    category: &'static str,
    bot_score: Option<f64>,
}

#[derive(Serialize)]
struct BucketRow {
    deleting_days: u32,
    accounts: usize,
    min: Option<f64>,
    q1: Option<f64>,
    median: Option<f64>,
    q3: Option<f64>,
    max: Option<f64>,
}

fn bucket_rows(buckets: &[FrequencyBucket]) -> Vec<BucketRow> {
    buckets
        .iter()
        .map(|b| {
            let d = b.distribution.as_ref();
            BucketRow {
                deleting_days: b.deleting_days,
                accounts: b.accounts,
                min: d.map(|d| d.min),
                q1: d.map(|d| d.q1),
                median: d.map(|d| d.median),
                q3: d.map(|d| d.q3),
                max: d.map(|d| d.max),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct TermRow<'a> {
    slice: &'a str,
    term: String,
    count: u64,
}

fn cmd_stats(a: &StatsArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let mut manifest = Manifest::new(
        "stats",
        json!({ "window_days": cfg.window_days, "top_terms": a.top_terms, "slice_fraction": a.slice_fraction }),
    );
    let tl_path = resolve(&a.timelines, "timelines.jsonl");
    let timelines = read_timelines(&a.timelines)?;
    manifest.add_input(&tl_path)?;
    let violations: Vec<FloodingViolation> = match &a.violations {
        Some(p) => {
            manifest.add_input(p)?;
            io::read_csv(p)?
        }
        None => Vec::new(),
    };
    let bot_scores: Option<HashMap<AccountId, f64>> = match &a.bot_scores {
        Some(p) => {
            manifest.add_input(p)?;
            let rows: Vec<BotScoreRow> = io::read_csv(p)?;
            Some(rows.into_iter().map(|r| (r.account_id, r.bot_score)).collect())
        }
        None => None,
    };
    let summaries = summarize(&timelines, &violations, cfg.window_days, bot_scores.as_ref());
    let out = &a.out;

    let rows: Vec<SummaryRow> = summaries
        .iter()
        .map(|s| SummaryRow {
            account_id: s.account_id,
            deleting_days: s.deleting_days,
            total_deletions: s.total_deletions,
            mean_daily_deletions: s.mean_daily_deletions,
            median_deleted_age_days: s.median_deleted_age_days,
            category: s.category.as_str(),
            bot_score: s.bot_score,
        })
        .collect();
    io::write_csv(&out.join("summaries.csv"), &rows)?;
    io::write_csv(&out.join("frequency_buckets.csv"), &bucket_rows(&frequency_buckets(&summaries, cfg.window_days)))?;
    manifest.outputs = vec!["summaries.csv".into(), "frequency_buckets.csv".into()];
    if bot_scores.is_some() {
        io::write_csv(
            &out.join("bot_score_buckets.csv"),
            &bucket_rows(&bot_score_buckets(&summaries, cfg.window_days)),
        )?;
        manifest.outputs.push("bot_score_buckets.csv".into());
    }
    for c in Category::ALL {
        let name = format!("median_age_ccdf_{}.csv", c.as_str());
        write_ccdf(&out.join(&name), &ccdf_rows(&median_age_ccdf(&summaries, c)))?;
        manifest.outputs.push(name);
    }

    let mut per_day: std::collections::BTreeMap<chrono::NaiveDate, (usize, u64)> = Default::default();
    for t in &timelines {
        for r in &t.deletion_days {
            let e = per_day.entry(r.day).or_default();
            e.0 += 1;
            e.1 += r.deletion_count;
        }
    }
    io::write_csv_records(
        &out.join("daily_totals.csv"),
        &["day", "accounts", "deletions"],
        &per_day
            .iter()
            .map(|(d, (a, n))| vec![d.to_string(), a.to_string(), n.to_string()])
            .collect::<Vec<_>>(),
    )?;
    manifest.outputs.push("daily_totals.csv".into());

    if let Some(p) = &a.final_statuses {
        manifest.add_input(p)?;
        let rows: Vec<StatusRow> = io::read_csv(p)?;
        let mut statuses = HashMap::new();
        for r in rows {
            let status = AccountStatus::parse(&r.status)
                .ok_or_else(|| CliError::Schema(format!("{}: unknown status {:?}", p.display(), r.status)))?;
            statuses.insert(r.account_id, status);
        }
        io::write_csv(&out.join("suspension.csv"), &suspension_stats(&summaries, &statuses).rows)?;
        manifest.outputs.push("suspension.csv".into());
    }

    let descriptions: HashMap<AccountId, &str> = timelines
        .iter()
        .filter_map(|t| t.description().map(|d| (t.account_id, d)))
        .collect();
    let stopwords = default_stopwords();
    let mut terms = Vec::new();
    let mut terms_for = |slice: &'static str, ids: Vec<AccountId>| {
        let texts = ids.iter().filter_map(|id| descriptions.get(id).copied());
        for (term, count) in profile_terms(texts, a.top_terms.max(1), &stopwords) {
            terms.push(TermRow { slice, term, count });
        }
    };
    for c in Category::ALL {
        let ids: Vec<AccountId> = summaries.iter().filter(|s| s.category == c).map(|s| s.account_id).collect();
        terms_for(c.as_str(), ids);
    }
    terms_for("thirty_day_top", rank_slice(&summaries, Category::ThirtyDay, a.slice_fraction, true));
    terms_for("thirty_day_bottom", rank_slice(&summaries, Category::ThirtyDay, a.slice_fraction, false));
    io::write_csv_records(
        &out.join("profile_terms.csv"),
        &["slice", "term", "count"],
        &terms
            .iter()
            .map(|t| vec![t.slice.to_string(), t.term.clone(), t.count.to_string()])
            .collect::<Vec<_>>(),
    )?;
    manifest.outputs.push("profile_terms.csv".into());
    manifest.write(out)?;
    Ok(())
}

fn cmd_flood(a: &FloodArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let path = resolve(&a.timelines, "timelines.jsonl");
    let timelines = read_timelines(&a.timelines)?;
    let mut manifest = Manifest::new(
        "detect-flooding",
        json!({ "daily_limit": cfg.daily_limit, "exclude_stale": a.exclude_stale }),
    );
    manifest.add_input(&path)?;
    let mut filter = ViolationFilter {
        exclude_stale: a.exclude_stale,
        ..Default::default()
    };
    if let Some(p) = &a.allowlist {
        manifest.add_input(p)?;
        filter.allowlist = read_allowlist(p)?;
    }
    let violations = filter.apply(detect(&timelines, cfg.daily_limit));
    write_violations(&a.out, &violations)?;

    let stem = a.out.file_stem().and_then(|s| s.to_str()).unwrap_or("violations").to_string();
    let profiles: Vec<Vec<String>> = profile_violators(&violations)
        .iter()
        .map(|p| {
            vec![
                p.account_id.to_string(),
                p.violation_days.len().to_string(),
                p.repeat.to_string(),
                p.violation_days.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
            ]
        })
        .collect();
    io::write_csv_records(
        &sidecar_dir(&a.out).join(format!("{stem}_violators.csv")),
        &["account_id", "violation_days", "repeat", "days"],
        &profiles,
    )?;
    manifest.outputs = vec![a.out.display().to_string(), format!("{stem}_violators.csv")];
    sidecar_manifest(&manifest, &a.out)
}

const VIOLATION_HEADER: [&str; 6] = ["account_id", "day", "count_diff", "deletions", "total_posted", "stale_suspect"];

fn write_violations(path: &Path, violations: &[FloodingViolation]) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = violations
        .iter()
        .map(|v| {
            vec![
                v.account_id.to_string(),
                v.day.to_string(),
                v.count_diff.to_string(),
                v.deletions.to_string(),
                v.total_posted.to_string(),
                v.stale_suspect.to_string(),
            ]
        })
        .collect();
    io::write_csv_records(path, &VIOLATION_HEADER, &rows)?;
    Ok(())
}

fn read_allowlist(path: &Path) -> Result<HashSet<AccountId>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Io(IoError::Missing(path.to_path_buf())),
        _ => CliError::Other(format!("{}: {e}", path.display())),
    })?;
    let mut out = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "account_id" {
            continue;
        }
        let id: u64 = line
            .parse()
            .map_err(|_| CliError::Schema(format!("{}: line {}: not an account id", path.display(), i + 1)))?;
        out.insert(AccountId(id));
    }
    Ok(out)
}

fn cmd_coord(a: &CoordArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let del_path = resolve(&a.deletions, "daily_deletions.jsonl");
    let unl_path = resolve(&a.unlikes, "unlikes.jsonl");
    let deletions: Vec<DailyDeletionRecord> = io::read_jsonl(&del_path)?;
    let unlikes: Vec<UnlikeRecord> = io::read_jsonl(&unl_path)?;
    let options = CoordinationOptions {
        min_unlikes: cfg.min_unlikes,
        min_component: cfg.min_component,
    };
    let mut manifest = Manifest::new("detect-coordination", json!({ "options": options }));
    manifest.add_input(&del_path)?;
    manifest.add_input(&unl_path)?;
    let report = detect_coordination(&deletions, &unlikes, &options);
    let g = &report.graph;
    let out = &a.out;

    io::write_csv_records(
        &out.join("edges.csv"),
        &["source", "target"],
        &g.edges.iter().map(|(s, t)| vec![s.to_string(), t.to_string()]).collect::<Vec<_>>(),
    )?;
    io::write_csv_records(
        &out.join("nodes.csv"),
        &["account_id", "unlike_total", "deletion_total", "role_ratio", "raw_ratio", "in_degree", "component_id"],
        &g.nodes
            .iter()
            .map(|(id, n)| {
                vec![
                    id.to_string(),
                    n.unlike_total.to_string(),
                    n.deletion_total.to_string(),
                    n.role_ratio().to_string(),
                    n.raw_ratio().map(|r| r.to_string()).unwrap_or_default(),
                    n.in_degree.to_string(),
                    n.component_id.to_string(),
                ]
            })
            .collect::<Vec<_>>(),
    )?;
    io::write_csv_records(
        &out.join("components.csv"),
        &["component_id", "nodes", "edges", "members"],
        &g.components
            .iter()
            .map(|c| {
                vec![
                    c.id.to_string(),
                    c.members.len().to_string(),
                    c.edge_count.to_string(),
                    c.members.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";"),
                ]
            })
            .collect::<Vec<_>>(),
    )?;
    io::write_json(
        &out.join("summary.json"),
        &json!({
            "unliker_filter": report.unliker_filter,
            "liker_removal_fraction": report.unliker_filter.liker_removal_fraction(),
            "components_before_filter": report.components_before_filter,
            "components": g.components.len(),
            "nodes": g.nodes.len(),
            "edges": g.edges.len(),
        }),
    )?;
    manifest.outputs = ["edges.csv", "nodes.csv", "components.csv", "summary.json"]
        .map(String::from)
        .to_vec();
    manifest.write(out)?;
    Ok(())
}

fn cmd_generate(a: &GenerateArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Io(IoError::Missing(a.spec.clone())),
        _ => CliError::Other(format!("{}: {e}", a.spec.display())),
    })?;
    let spec = if a.spec.extension().is_some_and(|e| e == "json") {
        PopulationSpec::from_json(&text)?
    } else {
        PopulationSpec::from_toml(&text)?
    };
    let data = generate(&spec, cfg.seed)?;
    let mut manifest = Manifest::new("generate", json!({ "seed": cfg.seed }));
    manifest.add_input(&a.spec)?;
    let out = &a.out;
    io::write_notices(&out.join("events.jsonl"), &data.notices)?;
    io::write_snapshots(&out.join("snapshots.jsonl"), &data.snapshots)?;
    io::write_json(&out.join("ground_truth.json"), &data.truth)?;
    io::write_csv_records(
        &out.join("final_statuses.csv"),
        &["account_id", "status"],
        &data
            .truth
            .accounts
            .iter()
            .map(|t| vec![t.account_id.to_string(), t.final_status.as_str().to_string()])
            .collect::<Vec<_>>(),
    )?;
    manifest.outputs = ["events.jsonl", "snapshots.jsonl", "ground_truth.json", "final_statuses.csv"]
        .map(String::from)
        .to_vec();
    manifest.write(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_pipeline_constants() {
        let c = RunConfig::default();
        assert_eq!(
            (c.inclusion_threshold, c.daily_limit, c.min_unlikes, c.min_component, c.estimate_floor),
            (10, 2400, 5, 10, 10)
        );
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("daily_limit = 3000\nmin_unlikes = 2").unwrap();
        let cli = Cli::try_parse_from(["delstream", "detect-flooding", "--timelines", "t", "--limit", "2500", "--out", "o"]).unwrap();
        let mut cfg = RunConfig::from_file(&file);
        cfg.apply_flags(&cli.command);
        assert_eq!(cfg.daily_limit, 2500);
        assert_eq!(cfg.min_unlikes, 2);
    }

    #[test]
    fn zero_threshold_is_usage_error() {
        let cfg = RunConfig { min_component: 0, ..RunConfig::default() };
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("limit = 1").is_err());
    }
}
