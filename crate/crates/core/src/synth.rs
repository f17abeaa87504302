//! Seeded generator of labeled event streams and daily snapshots.
//!
//! Every account is simulated day by day: posts, deletions of old and fresh
//! tweets, suspended days and (for like farms) repeated unlikes of tweets
//! that the hub later deletes. End-of-day snapshot counts equal the running
//! total of posts minus deletions, so ground truth is exact by construction.

use std::collections::{BTreeSet, HashSet};

use chrono::{DateTime, Days, NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flood::DEFAULT_DAILY_LIMIT;
use crate::ingest::DEFAULT_INCLUSION_THRESHOLD;
use crate::model::{
    AccountId, AccountSnapshot, AccountStatus, ComplianceNotice, NoticeKind, SnowflakeDecoder,
    TweetId, FIRST_SNOWFLAKE_ID,
};
use crate::stats::Category;

const MS_PER_DAY: i64 = 86_400_000;
const FIRST_ACCOUNT_ID: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("invalid population spec: {0}")]
    InvalidSpec(String),
    #[error("cannot parse population spec: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorKind {
    NormalDeleter,
    MassDeleter,
    Flooder,
    LikeFarmHub,
    /// Created alongside each hub; not declared on its own.
    LikeFarmSpoke,
    /// Unlikes a few deleted tweets of other accounts fewer than five times.
    CasualUnliker,
    Idle,
}

/// Optional per-profile overrides; unset fields take the kind's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub daily_posts: Option<f64>,
    pub initial_count: Option<u64>,
    /// Days in the window with at least the inclusion threshold of deletions.
    /// Unset draws a count skewed toward a single day.
    pub deletion_days: Option<u32>,
    pub deletions_median: Option<f64>,
    pub deletions_sigma: Option<f64>,
    pub max_daily_deletions: Option<u64>,
    /// Chance per other day of a few sub-threshold deletions.
    pub stray_deletion_prob: Option<f64>,
    pub age_median_days: Option<f64>,
    pub age_sigma: Option<f64>,
    pub flood_days: Option<u32>,
    pub cycles: Option<u64>,
    pub cycle_posts: Option<u64>,
    /// Whether the last posting cycle of a flood day is also purged.
    pub purge_last_cycle: Option<bool>,
    /// Explicit totals for a flood day; override the cycle model.
    pub flood_posts: Option<u64>,
    pub flood_deletions: Option<u64>,
    pub farm_spokes: Option<u32>,
    pub unlikes_per_spoke: Option<u64>,
    pub farm_tweets: Option<u32>,
    pub tweets_unliked: Option<u32>,
    pub max_casual_unlikes: Option<u64>,
    pub suspended_day_prob: Option<f64>,
    pub final_suspended_prob: Option<f64>,
    /// Chance per day that the reported count repeats the previous one.
    pub stale_count_prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: BehaviorKind,
    pub count: i64,
    #[serde(default)]
    pub params: ProfileParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    #[serde(default = "default_days")]
    pub days: u32,
    #[serde(default = "default_start")]
    pub start_date: NaiveDate,
    #[serde(default = "default_threshold")]
    pub inclusion_threshold: u64,
    #[serde(default = "default_limit")]
    pub daily_limit: u64,
    #[serde(default)]
    pub profiles: Vec<ProfileSpec>,
}

fn default_days() -> u32 {
    30
}
fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 4, 26).expect("valid date")
}
fn default_threshold() -> u64 {
    DEFAULT_INCLUSION_THRESHOLD
}
fn default_limit() -> u64 {
    DEFAULT_DAILY_LIMIT
}

impl Default for PopulationSpec {
    fn default() -> Self {
        Self {
            days: default_days(),
            start_date: default_start(),
            inclusion_threshold: default_threshold(),
            daily_limit: default_limit(),
            profiles: Vec::new(),
        }
    }
}

impl PopulationSpec {
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        serde_json::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))
    }

    pub fn with_profile(mut self, kind: BehaviorKind, count: i64, params: ProfileParams) -> Self {
        self.profiles.push(ProfileSpec { kind, count, params });
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if self.days == 0 {
            return bad("days must be at least 1".into());
        }
        if self.inclusion_threshold == 0 || self.daily_limit == 0 {
            return bad("thresholds must be positive".into());
        }
        for (i, p) in self.profiles.iter().enumerate() {
            if p.count < 0 {
                return bad(format!("profile {i}: negative count {}", p.count));
            }
            if p.kind == BehaviorKind::LikeFarmSpoke {
                return bad(format!(
                    "profile {i}: like_farm_spoke accounts are created by like_farm_hub entries"
                ));
            }
            let r = Resolved::new(p.kind, &p.params, self);
            for (name, v) in [
                ("stray_deletion_prob", r.stray_deletion_prob),
                ("suspended_day_prob", r.suspended_day_prob),
                ("final_suspended_prob", r.final_suspended_prob),
                ("stale_count_prob", r.stale_count_prob),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return bad(format!("profile {i}: {name} must lie in [0, 1]"));
                }
            }
            if r.daily_posts < 0.0 || r.deletions_median <= 0.0 || r.age_median_days <= 0.0 {
                return bad(format!("profile {i}: rates and medians must be positive"));
            }
            if r.deletions_sigma < 0.0 || r.age_sigma < 0.0 {
                return bad(format!("profile {i}: sigmas must be non-negative"));
            }
            if let Some(d) = r.deletion_days {
                if d > self.days {
                    return bad(format!("profile {i}: deletion_days exceeds window"));
                }
            }
            if p.kind == BehaviorKind::Flooder {
                if r.flood_days >= self.days {
                    return bad(format!("profile {i}: flood_days must be below the window length"));
                }
                if r.flood_deletions > r.flood_posts + r.initial_count {
                    return bad(format!("profile {i}: flood deletions exceed available tweets"));
                }
            }
            if p.kind == BehaviorKind::LikeFarmHub && r.farm_tweets == 0 {
                return bad(format!("profile {i}: farm_tweets must be positive"));
            }
        }
        Ok(())
    }
}

/// Parameters with kind defaults applied.
#[derive(Debug, Clone)]
struct Resolved {
    daily_posts: f64,
    initial_count: u64,
    deletion_days: Option<u32>,
    deletions_median: f64,
    deletions_sigma: f64,
    max_daily_deletions: u64,
    stray_deletion_prob: f64,
    age_median_days: f64,
    age_sigma: f64,
    flood_days: u32,
    flood_posts: u64,
    flood_deletions: u64,
    farm_spokes: u32,
    unlikes_per_spoke: u64,
    farm_tweets: u32,
    tweets_unliked: u32,
    max_casual_unlikes: u64,
    suspended_day_prob: f64,
    final_suspended_prob: f64,
    stale_count_prob: f64,
}

impl Resolved {
    fn new(kind: BehaviorKind, p: &ProfileParams, spec: &PopulationSpec) -> Self {
        use BehaviorKind::*;
        let (posts, median, max_del, age, deletion_days) = match kind {
            NormalDeleter => (8.0, 16.0, 3_200, 375.0, None),
            MassDeleter => (2.0, 3_200.0, 3_200, 375.0, Some(1)),
            Flooder => (40.0, 60.0, 3_200, 57.0, Some(0)),
            LikeFarmHub => (10.0, 16.0, 3_200, 39.0, Some(0)),
            LikeFarmSpoke | CasualUnliker | Idle => (3.0, 16.0, 3_200, 375.0, Some(0)),
        };
        let cycles = p.cycles.unwrap_or(6);
        let cycle_posts = p.cycle_posts.unwrap_or(spec.daily_limit);
        let purged = if p.purge_last_cycle.unwrap_or(false) { cycles } else { cycles.saturating_sub(1) };
        let flood_posts = p.flood_posts.unwrap_or(cycles * cycle_posts);
        let flood_deletions = p.flood_deletions.unwrap_or(purged * cycle_posts);
        Self {
            daily_posts: p.daily_posts.unwrap_or(posts),
            initial_count: p.initial_count.unwrap_or(match kind {
                MassDeleter => 6_000,
                Flooder => 50_000,
                _ => 2_000,
            }),
            deletion_days: match p.deletion_days {
                Some(d) => Some(d),
                None => deletion_days,
            },
            deletions_median: p.deletions_median.unwrap_or(median),
            deletions_sigma: p.deletions_sigma.unwrap_or(if kind == MassDeleter { 0.0 } else { 1.0 }),
            max_daily_deletions: p.max_daily_deletions.unwrap_or(max_del),
            stray_deletion_prob: p.stray_deletion_prob.unwrap_or(match kind {
                NormalDeleter => 0.1,
                _ => 0.0,
            }),
            age_median_days: p.age_median_days.unwrap_or(age),
            age_sigma: p.age_sigma.unwrap_or(1.0),
            flood_days: p.flood_days.unwrap_or(if kind == Flooder { 1 } else { 0 }),
            flood_posts,
            flood_deletions,
            farm_spokes: p.farm_spokes.unwrap_or(12),
            unlikes_per_spoke: p.unlikes_per_spoke.unwrap_or(6),
            farm_tweets: p.farm_tweets.unwrap_or(3),
            tweets_unliked: p.tweets_unliked.unwrap_or(3),
            max_casual_unlikes: p.max_casual_unlikes.unwrap_or(4),
            suspended_day_prob: p.suspended_day_prob.unwrap_or(0.0),
            final_suspended_prob: p.final_suspended_prob.unwrap_or(0.0),
            stale_count_prob: p.stale_count_prob.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountTruth {
    pub account_id: AccountId,
    pub kind: BehaviorKind,
    /// Category implied by true behavior at the spec's threshold and limit.
    pub category: Option<Category>,
    /// True posts and deletions per window day.
    pub posts: Vec<u64>,
    pub deletions: Vec<u64>,
    pub flood_days: Vec<NaiveDate>,
    pub suspended_days: Vec<NaiveDate>,
    pub stale_days: Vec<NaiveDate>,
    pub final_status: AccountStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub farm_hub: Option<AccountId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedFarm {
    pub hub: AccountId,
    pub spokes: Vec<AccountId>,
    pub unlikes_per_spoke: u64,
    pub tweets: Vec<TweetId>,
    pub day: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub start_date: NaiveDate,
    pub days: u32,
    pub inclusion_threshold: u64,
    pub daily_limit: u64,
    pub accounts: Vec<AccountTruth>,
    pub farms: Vec<PlantedFarm>,
}

impl GroundTruth {
    pub fn day(&self, index: usize) -> NaiveDate {
        self.start_date + Days::new(index as u64)
    }

    pub fn flooders(&self) -> BTreeSet<AccountId> {
        self.accounts
            .iter()
            .filter(|a| !a.flood_days.is_empty())
            .map(|a| a.account_id)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    /// Sorted by time, then kind, actor and object.
    pub notices: Vec<ComplianceNotice>,
    /// Sorted by day, then account.
    pub snapshots: Vec<AccountSnapshot>,
    pub truth: GroundTruth,
}

struct Planned {
    id: AccountId,
    kind: BehaviorKind,
    params: Resolved,
    stream: u64,
    hub: Option<AccountId>,
}

/// Allocates unique tweet IDs consistent with a creation time.
struct IdAllocator {
    used: HashSet<u64>,
    decoder: SnowflakeDecoder,
}

impl IdAllocator {
    fn alloc(&mut self, created_ms: i64, rng: &mut ChaCha8Rng) -> TweetId {
        loop {
            let id = match self.decoder.encode(created_ms, rng.random::<u64>()) {
                Some(id) => id.0,
                None => rng.random_range(1..FIRST_SNOWFLAKE_ID),
            };
            if self.used.insert(id) {
                return TweetId(id);
            }
        }
    }
}

const DESCRIPTIONS: &[(BehaviorKind, &[&str])] = &[
    (BehaviorKind::NormalDeleter, &["coffee music travel", "love my dog", "photography and hiking", ""]),
    (BehaviorKind::MassDeleter, &["fresh start", "privacy matters", ""]),
    (BehaviorKind::Flooder, &["promo follow backup account", "follow train promo", "backup account follow back"]),
    (BehaviorKind::LikeFarmHub, &["fashion advertisement promo", "get 100 followers fast"]),
    (BehaviorKind::LikeFarmSpoke, &["follow back", "likes for likes"]),
    (BehaviorKind::CasualUnliker, &["news and sports", ""]),
    (BehaviorKind::Idle, &["", "just here"]),
];

fn description(kind: BehaviorKind, rng: &mut ChaCha8Rng) -> String {
    let pool = DESCRIPTIONS
        .iter()
        .find(|(k, _)| *k == kind)
        .map(|(_, p)| *p)
        .unwrap_or(&[""]);
    pool[rng.random_range(0..pool.len())].to_string()
}

struct DayPlan {
    suspended: Vec<bool>,
    stale: Vec<bool>,
    flood: Vec<bool>,
    deleting: Vec<bool>,
    farm_day: Option<usize>,
}

fn choose_days(rng: &mut ChaCha8Rng, candidates: &[usize], k: usize) -> Vec<usize> {
    let mut pool = candidates.to_vec();
    let k = k.min(pool.len());
    for i in 0..k {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    pool
}

fn plan_days(p: &Planned, days: usize, rng: &mut ChaCha8Rng) -> DayPlan {
    let r = &p.params;
    let mut suspended: Vec<bool> = (0..days).map(|_| rng.random_bool(r.suspended_day_prob)).collect();
    let mut stale: Vec<bool> = (0..days).map(|d| d > 0 && rng.random_bool(r.stale_count_prob)).collect();

    let mut flood = vec![false; days];
    if p.kind == BehaviorKind::Flooder {
        let candidates: Vec<usize> = (1..days).collect();
        for d in choose_days(rng, &candidates, r.flood_days as usize) {
            flood[d] = true;
            // consecutive counts on both sides keep flood days observable
            for x in [d - 1, d] {
                suspended[x] = false;
                stale[x] = false;
            }
        }
    }

    let farm_day = (p.kind == BehaviorKind::LikeFarmHub).then(|| rng.random_range(0..days));

    let all: Vec<usize> = (0..days).filter(|&d| !flood[d] && Some(d) != farm_day).collect();
    let n_deleting = match r.deletion_days {
        Some(n) => n as usize,
        None => {
            // most deleters delete on one day only
            if rng.random_bool(0.6) {
                1
            } else {
                rng.random_range(2..=days.max(2))
            }
        }
    };
    let mut deleting = vec![false; days];
    for d in choose_days(rng, &all, n_deleting) {
        deleting[d] = true;
    }
    DayPlan {
        suspended,
        stale,
        flood,
        deleting,
        farm_day,
    }
}

struct AccountRun {
    notices: Vec<ComplianceNotice>,
    snapshots: Vec<AccountSnapshot>,
    truth: AccountTruth,
    /// (tweet, deletion time) of every deleted tweet.
    deleted: Vec<(TweetId, i64)>,
    farm: Option<PlantedFarm>,
    /// Farm tweets with creation times, and the time the hub deletes them.
    farm_window: Option<(Vec<(TweetId, i64)>, i64)>,
}

fn day_start_ms(spec: &PopulationSpec, d: usize) -> i64 {
    (spec.start_date + Days::new(d as u64))
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp_millis()
}

fn ts(ms: i64) -> DateTime<Utc> {
    Utc.timestamp_millis_opt(ms).single().expect("timestamp in range")
}

fn notice(kind: NoticeKind, actor: AccountId, tweet: TweetId, ms: i64) -> ComplianceNotice {
    ComplianceNotice {
        kind,
        actor_id: actor,
        object_id: tweet,
        observed_at: ts(ms),
    }
}

fn simulate(
    p: &Planned,
    spec: &PopulationSpec,
    seed: u64,
    ids: &mut IdAllocator,
) -> AccountRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p.stream);
    let r = &p.params;
    let days = spec.days as usize;
    let plan = plan_days(p, days, &mut rng);
    let posts_dist = Poisson::new(r.daily_posts.max(1e-9)).expect("positive rate");
    let del_dist = LogNormal::new(r.deletions_median.ln(), r.deletions_sigma).expect("valid lognormal");
    let age_dist = LogNormal::new(r.age_median_days.ln(), r.age_sigma).expect("valid lognormal");

    let desc = description(p.kind, &mut rng);
    let created_at = ts(day_start_ms(spec, 0) - rng.random_range(30..4_000) * MS_PER_DAY);
    let mut count = r.initial_count;
    let mut reported = count;
    let mut run = AccountRun {
        notices: Vec::new(),
        snapshots: Vec::with_capacity(days),
        truth: AccountTruth {
            account_id: p.id,
            kind: p.kind,
            category: None,
            posts: Vec::with_capacity(days),
            deletions: Vec::with_capacity(days),
            flood_days: Vec::new(),
            suspended_days: Vec::new(),
            stale_days: Vec::new(),
            final_status: AccountStatus::Active,
            farm_hub: p.hub,
        },
        deleted: Vec::new(),
        farm: None,
        farm_window: None,
    };

    for d in 0..days {
        let start = day_start_ms(spec, d);
        let day = spec.start_date + Days::new(d as u64);
        let mut posts = (posts_dist.sample(&mut rng) as u64).min(spec.daily_limit);
        let mut old = 0u64;
        let mut fresh = 0u64;
        if plan.flood[d] {
            posts = r.flood_posts;
            fresh = r.flood_deletions.min(posts);
            old = r.flood_deletions - fresh;
            run.truth.flood_days.push(day);
        } else if plan.deleting[d] {
            let draw = del_dist.sample(&mut rng).round() as u64;
            old = draw.clamp(spec.inclusion_threshold, r.max_daily_deletions);
        } else if spec.inclusion_threshold > 1 && rng.random_bool(r.stray_deletion_prob) {
            old = rng.random_range(1..spec.inclusion_threshold);
        }
        old = old.min(count);

        for _ in 0..old {
            let del_ms = start + rng.random_range(0..MS_PER_DAY);
            let age_ms = (age_dist.sample(&mut rng) * MS_PER_DAY as f64) as i64;
            let id = ids.alloc(del_ms - age_ms, &mut rng);
            run.notices.push(notice(NoticeKind::TweetDelete, p.id, id, del_ms));
            run.deleted.push((id, del_ms));
        }
        for _ in 0..fresh {
            let del_ms = start + rng.random_range(1..MS_PER_DAY);
            let created = start + rng.random_range(0..del_ms - start);
            let id = ids.alloc(created, &mut rng);
            run.notices.push(notice(NoticeKind::TweetDelete, p.id, id, del_ms));
            run.deleted.push((id, del_ms));
        }

        let mut farm_deleted = 0;
        if plan.farm_day == Some(d) {
            // farm tweets posted in the morning, purged in the evening
            let del_ms = start + 20 * 3_600_000 + rng.random_range(0..3_600_000);
            let mut tweets = Vec::new();
            for _ in 0..r.farm_tweets {
                let created = start + rng.random_range(0..6 * 3_600_000);
                let id = ids.alloc(created, &mut rng);
                tweets.push((id, created));
                run.notices.push(notice(NoticeKind::TweetDelete, p.id, id, del_ms));
                run.deleted.push((id, del_ms));
            }
            posts += r.farm_tweets as u64;
            farm_deleted = r.farm_tweets as u64;
            // filler deletions keep the hub above the inclusion threshold
            let filler = spec
                .inclusion_threshold
                .saturating_sub(farm_deleted + old)
                .min(count - old);
            for _ in 0..filler {
                let age_ms = (age_dist.sample(&mut rng) * MS_PER_DAY as f64) as i64;
                let id = ids.alloc(del_ms - age_ms, &mut rng);
                run.notices.push(notice(NoticeKind::TweetDelete, p.id, id, del_ms));
                run.deleted.push((id, del_ms));
            }
            old += filler;
            run.farm = Some(PlantedFarm {
                hub: p.id,
                spokes: Vec::new(),
                unlikes_per_spoke: r.unlikes_per_spoke,
                tweets: tweets.iter().map(|&(id, _)| id).collect(),
                day,
            });
            run.farm_window = Some((tweets, del_ms));
        }

        let deletions = old + fresh + farm_deleted;
        count = count + posts - deletions;
        run.truth.posts.push(posts);
        run.truth.deletions.push(deletions);

        let queried_at = Some(ts(start + MS_PER_DAY + rng.random_range(0..4 * 3_600_000)));
        let snapshot = if plan.suspended[d] {
            run.truth.suspended_days.push(day);
            AccountSnapshot {
                account_id: p.id,
                snapshot_day: day,
                statuses_count: None,
                status: AccountStatus::Suspended,
                description: desc.clone(),
                created_at: Some(created_at),
                queried_at,
            }
        } else {
            if plan.stale[d] {
                run.truth.stale_days.push(day);
            } else {
                reported = count;
            }
            AccountSnapshot {
                account_id: p.id,
                snapshot_day: day,
                statuses_count: Some(reported),
                status: AccountStatus::Active,
                description: desc.clone(),
                created_at: Some(created_at),
                queried_at,
            }
        };
        run.snapshots.push(snapshot);
    }

    if rng.random_bool(r.final_suspended_prob) {
        run.truth.final_status = AccountStatus::Suspended;
    }
    let deleting_days = run
        .truth
        .deletions
        .iter()
        .filter(|&&n| n >= spec.inclusion_threshold)
        .count() as u32;
    let violated = run.truth.posts.iter().any(|&n| n > spec.daily_limit);
    run.truth.category = (deleting_days > 0 || violated)
        .then(|| Category::classify(deleting_days, spec.days, violated));
    run
}

/// Generates the event stream, snapshots and ground truth for `spec`.
/// The same spec and seed always produce identical output.
pub fn generate(spec: &PopulationSpec, seed: u64) -> Result<SyntheticDataset, SynthError> {
    spec.validate()?;

    let mut planned = Vec::new();
    let mut next_id = FIRST_ACCOUNT_ID;
    for profile in &spec.profiles {
        let params = Resolved::new(profile.kind, &profile.params, spec);
        for _ in 0..profile.count {
            let hub = AccountId(next_id);
            next_id += 1;
            planned.push(Planned {
                id: hub,
                kind: profile.kind,
                params: params.clone(),
                stream: planned.len() as u64,
                hub: None,
            });
            if profile.kind == BehaviorKind::LikeFarmHub {
                for _ in 0..params.farm_spokes {
                    planned.push(Planned {
                        id: AccountId(next_id),
                        kind: BehaviorKind::LikeFarmSpoke,
                        params: params.clone(),
                        stream: planned.len() as u64,
                        hub: Some(hub),
                    });
                    next_id += 1;
                }
            }
        }
    }

    let mut ids = IdAllocator {
        used: HashSet::new(),
        decoder: SnowflakeDecoder::default(),
    };
    let mut notices = Vec::new();
    let mut snapshots = Vec::new();
    let mut accounts = Vec::with_capacity(planned.len());
    let mut farms = Vec::new();
    let mut pool: Vec<(TweetId, i64)> = Vec::new();
    let mut windows: Vec<(AccountId, Vec<(TweetId, i64)>, i64)> = Vec::new();

    for p in &planned {
        let mut run = simulate_account(p, spec, seed, &mut ids);
        notices.append(&mut run.notices);
        snapshots.append(&mut run.snapshots);
        pool.extend(run.deleted.iter().copied());
        if let Some(f) = run.farm.take() {
            farms.push(f);
        }
        if let Some((tweets, del_ms)) = run.farm_window.take() {
            windows.push((p.id, tweets, del_ms));
        }
        accounts.push(run.truth);
    }

    // unlike notices, drawn from each unliker's own stream after its day loop
    for p in &planned {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_11ce);
        rng.set_stream(p.stream);
        match p.kind {
            BehaviorKind::LikeFarmSpoke => {
                let hub = p.hub.expect("spoke has a hub");
                let (_, tweets, del_ms) = windows
                    .iter()
                    .find(|(h, _, _)| *h == hub)
                    .expect("hub simulated before spokes");
                for &(tweet, created) in tweets {
                    for _ in 0..p.params.unlikes_per_spoke {
                        let at = rng.random_range(created + 1..*del_ms);
                        notices.push(notice(NoticeKind::Unlike, p.id, tweet, at));
                    }
                }
                if let Some(f) = farms.iter_mut().find(|f| f.hub == hub) {
                    f.spokes.push(p.id);
                }
            }
            BehaviorKind::CasualUnliker if !pool.is_empty() => {
                let window_start = day_start_ms(spec, 0);
                for _ in 0..p.params.tweets_unliked {
                    let (tweet, del_ms) = pool[rng.random_range(0..pool.len())];
                    let times = rng.random_range(1..=p.params.max_casual_unlikes.max(1));
                    let earliest = (del_ms - MS_PER_DAY).max(window_start);
                    for _ in 0..times {
                        let at = if del_ms > earliest { rng.random_range(earliest..del_ms) } else { del_ms };
                        notices.push(notice(NoticeKind::Unlike, p.id, tweet, at));
                    }
                }
            }
            _ => {}
        }
    }

    notices.sort_unstable_by_key(|n| (n.observed_at, n.kind, n.actor_id, n.object_id));
    snapshots.sort_by_key(|s| (s.snapshot_day, s.account_id));
    Ok(SyntheticDataset {
        notices,
        snapshots,
        truth: GroundTruth {
            seed,
            start_date: spec.start_date,
            days: spec.days,
            inclusion_threshold: spec.inclusion_threshold,
            daily_limit: spec.daily_limit,
            accounts,
            farms,
        },
    })
}

fn simulate_account(p: &Planned, spec: &PopulationSpec, seed: u64, ids: &mut IdAllocator) -> AccountRun {
    match p.kind {
        BehaviorKind::LikeFarmSpoke | BehaviorKind::CasualUnliker | BehaviorKind::Idle => {
            // posters that never delete
            let mut quiet = Planned {
                id: p.id,
                kind: p.kind,
                params: p.params.clone(),
                stream: p.stream,
                hub: p.hub,
            };
            quiet.params.deletion_days = Some(0);
            quiet.params.stray_deletion_prob = 0.0;
            quiet.params.flood_days = 0;
            simulate(&quiet, spec, seed, ids)
        }
        _ => simulate(p, spec, seed, ids),
    }
}

/// Fast uniform stream for throughput measurements: random accounts, days
/// and times, mostly deletions with time-encoded tweet IDs.
pub fn uniform_notice_stream(events: usize, accounts: u64, days: u32, seed: u64) -> Vec<ComplianceNotice> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = default_start()
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp_millis();
    let decoder = SnowflakeDecoder::default();
    (0..events)
        .map(|_| {
            let ms = start + rng.random_range(0..days as i64 * MS_PER_DAY);
            let created = ms - rng.random_range(0..400 * MS_PER_DAY);
            let kind = if rng.random_bool(0.9) { NoticeKind::TweetDelete } else { NoticeKind::Unlike };
            let tweet = decoder.encode(created, rng.random()).unwrap_or(TweetId(1));
            notice(kind, AccountId(rng.random_range(1..=accounts)), tweet, ms)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> PopulationSpec {
        PopulationSpec { days: 10, ..PopulationSpec::default() }
    }

    #[test]
    fn six_cycle_flooder_posts_fourteen_thousand_four_hundred() {
        let s = spec().with_profile(BehaviorKind::Flooder, 1, ProfileParams::default());
        let data = generate(&s, 1).unwrap();
        let a = &data.truth.accounts[0];
        assert_eq!(a.flood_days.len(), 1);
        let d = (a.flood_days[0] - s.start_date).num_days() as usize;
        assert_eq!(a.posts[d], 14_400);
        assert_eq!(a.deletions[d], 12_000);
        assert_eq!(a.category, Some(Category::Suspicious));
    }

    #[test]
    fn idle_population_has_no_deletions() {
        let s = spec().with_profile(BehaviorKind::Idle, 5, ProfileParams::default());
        let data = generate(&s, 3).unwrap();
        assert!(data.notices.is_empty());
        assert_eq!(data.snapshots.len(), 50);
        assert!(data.truth.accounts.iter().all(|a| a.category.is_none()));
    }

    #[test]
    fn negative_counts_rejected() {
        let s = spec().with_profile(BehaviorKind::NormalDeleter, -1, ProfileParams::default());
        assert!(matches!(generate(&s, 0), Err(SynthError::InvalidSpec(_))));
        let s = spec().with_profile(BehaviorKind::LikeFarmSpoke, 1, ProfileParams::default());
        assert!(generate(&s, 0).is_err());
        let s = PopulationSpec { days: 0, ..spec() };
        assert!(generate(&s, 0).is_err());
    }

    #[test]
    fn snapshots_track_posts_minus_deletions() {
        let params = ProfileParams { suspended_day_prob: Some(0.2), ..Default::default() };
        let s = spec()
            .with_profile(BehaviorKind::NormalDeleter, 20, params)
            .with_profile(BehaviorKind::MassDeleter, 5, ProfileParams::default());
        let data = generate(&s, 11).unwrap();
        for a in &data.truth.accounts {
            let mut snaps: Vec<_> = data.snapshots.iter().filter(|x| x.account_id == a.account_id).collect();
            snaps.sort_by_key(|x| x.snapshot_day);
            let mut prev: Option<u64> = None;
            for (d, s) in snaps.iter().enumerate() {
                if let (Some(p), Some(c)) = (prev, s.statuses_count) {
                    assert_eq!(c as i64 - p as i64 + a.deletions[d] as i64, a.posts[d] as i64);
                }
                prev = s.statuses_count;
            }
            let emitted = data
                .notices
                .iter()
                .filter(|n| n.kind == NoticeKind::TweetDelete && n.actor_id == a.account_id)
                .count() as u64;
            assert_eq!(emitted, a.deletions.iter().sum::<u64>());
        }
    }

    #[test]
    fn same_seed_same_output() {
        let s = spec()
            .with_profile(BehaviorKind::NormalDeleter, 10, ProfileParams::default())
            .with_profile(BehaviorKind::LikeFarmHub, 1, ProfileParams::default())
            .with_profile(BehaviorKind::CasualUnliker, 5, ProfileParams::default());
        let a = generate(&s, 5).unwrap();
        let b = generate(&s, 5).unwrap();
        assert_eq!(a.notices, b.notices);
        assert_eq!(a.snapshots, b.snapshots);
        assert_eq!(a.truth, b.truth);
        let c = generate(&s, 6).unwrap();
        assert_ne!(a.notices, c.notices);
    }

    #[test]
    fn farms_plant_repeated_unlikes_before_deletion() {
        let params = ProfileParams { farm_spokes: Some(4), unlikes_per_spoke: Some(7), farm_tweets: Some(2), ..Default::default() };
        let s = spec().with_profile(BehaviorKind::LikeFarmHub, 1, params);
        let data = generate(&s, 2).unwrap();
        let farm = &data.truth.farms[0];
        assert_eq!(farm.spokes.len(), 4);
        let unlikes: Vec<_> = data.notices.iter().filter(|n| n.kind == NoticeKind::Unlike).collect();
        assert_eq!(unlikes.len(), 4 * 7 * 2);
        for u in unlikes {
            let del = data
                .notices
                .iter()
                .find(|n| n.kind == NoticeKind::TweetDelete && n.object_id == u.object_id)
                .unwrap();
            assert_eq!(del.actor_id, farm.hub);
            assert!(u.observed_at < del.observed_at);
        }
        let hub = &data.truth.accounts[0];
        assert!(hub.deletions.iter().any(|&n| n >= 10));
    }

    #[test]
    fn spec_files_parse() {
        let toml = r#"
            days = 30
            [[profiles]]
            kind = "flooder"
            count = 2
            params = { flood_posts = 26000, flood_deletions = 25000, initial_count = 60000 }
            [[profiles]]
            kind = "idle"
            count = 3
        "#;
        let s = PopulationSpec::from_toml(toml).unwrap();
        assert_eq!(s.profiles.len(), 2);
        assert_eq!(s.profiles[0].params.flood_posts, Some(26_000));
        assert!(PopulationSpec::from_toml("days = 3\nbogus = 1").is_err());
    }
}
