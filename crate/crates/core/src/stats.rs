//! Behavioral characterization of deleting accounts: deletion frequency and
//! volume, deleted-content age, category labels, suspension rates and profile
//! term frequencies.

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::estimator::ccdf;
use crate::flood::FloodingViolation;
use crate::ingest::{AccountTimeline, DailyDeletionRecord};
use crate::model::{AccountId, AccountStatus};

pub const DEFAULT_WINDOW_DAYS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    OneDay,
    ThirtyDay,
    Suspicious,
    Other,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::OneDay,
        Category::ThirtyDay,
        Category::Suspicious,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::OneDay => "one_day",
            Category::ThirtyDay => "thirty_day",
            Category::Suspicious => "suspicious",
            Category::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// Any limit violation makes an account suspicious regardless of how often
    /// it deletes.
    pub fn classify(deleting_days: u32, window_days: u32, has_violation: bool) -> Self {
        if has_violation {
            Category::Suspicious
        } else if deleting_days == 1 {
            Category::OneDay
        } else if deleting_days == window_days {
            Category::ThirtyDay
        } else {
            Category::Other
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountBehaviorSummary {
    pub account_id: AccountId,
    pub deleting_days: u32,
    pub total_deletions: u64,
    pub mean_daily_deletions: f64,
    pub median_deleted_age_days: Option<u32>,
    pub category: Category,
    pub bot_score: Option<f64>,
}

/// Lower median, so the result stays a whole number of days.
pub fn lower_median(sorted: &[u32]) -> Option<u32> {
    if sorted.is_empty() {
        None
    } else {
        Some(sorted[(sorted.len() - 1) / 2])
    }
}

/// One summary per account with at least one deletion day, in account order.
pub fn summarize(
    timelines: &[AccountTimeline],
    violations: &[FloodingViolation],
    window_days: u32,
    bot_scores: Option<&HashMap<AccountId, f64>>,
) -> Vec<AccountBehaviorSummary> {
    let violators: HashSet<AccountId> = violations.iter().map(|v| v.account_id).collect();
    let mut out: Vec<AccountBehaviorSummary> = timelines
        .iter()
        .filter(|t| !t.deletion_days.is_empty())
        .map(|t| {
            let deleting_days = t.deletion_days.len() as u32;
            let total: u64 = t.deletion_days.iter().map(|r| r.deletion_count).sum();
            let mut ages: Vec<u32> = t
                .deletion_days
                .iter()
                .flat_map(|r| r.deleted_ages_days.iter().copied())
                .collect();
            ages.sort_unstable();
            AccountBehaviorSummary {
                account_id: t.account_id,
                deleting_days,
                total_deletions: total,
                mean_daily_deletions: total as f64 / deleting_days as f64,
                median_deleted_age_days: lower_median(&ages),
                category: Category::classify(
                    deleting_days,
                    window_days,
                    violators.contains(&t.account_id),
                ),
                bot_score: bot_scores.and_then(|m| m.get(&t.account_id).copied()),
            }
        })
        .collect();
    out.sort_by_key(|s| s.account_id);
    out
}

/// Five-number summary. Quartiles interpolate linearly between order
/// statistics at rank `p * (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let rank = p * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

impl Distribution {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            count: v.len(),
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBucket {
    pub deleting_days: u32,
    pub accounts: usize,
    pub distribution: Option<Distribution>,
}

/// Distribution of mean daily deletions for each deletion frequency
/// `1..=window_days`. Empty buckets are still reported.
pub fn frequency_buckets(summaries: &[AccountBehaviorSummary], window_days: u32) -> Vec<FrequencyBucket> {
    bucket_by_frequency(summaries, window_days, |s| Some(s.mean_daily_deletions))
}

/// Bot-score distribution per deletion frequency, over accounts with a score.
pub fn bot_score_buckets(summaries: &[AccountBehaviorSummary], window_days: u32) -> Vec<FrequencyBucket> {
    bucket_by_frequency(summaries, window_days, |s| s.bot_score)
}

fn bucket_by_frequency(
    summaries: &[AccountBehaviorSummary],
    window_days: u32,
    value: impl Fn(&AccountBehaviorSummary) -> Option<f64>,
) -> Vec<FrequencyBucket> {
    let mut groups: BTreeMap<u32, Vec<f64>> = (1..=window_days).map(|d| (d, Vec::new())).collect();
    for s in summaries {
        if let (Some(g), Some(v)) = (groups.get_mut(&s.deleting_days), value(s)) {
            g.push(v);
        }
    }
    groups
        .into_iter()
        .map(|(deleting_days, values)| FrequencyBucket {
            deleting_days,
            accounts: values.len(),
            distribution: Distribution::from_values(&values),
        })
        .collect()
}

/// CCDF of per-account median deleted-content age within one category.
pub fn median_age_ccdf(summaries: &[AccountBehaviorSummary], category: Category) -> Vec<(f64, f64)> {
    let ages: Vec<f64> = summaries
        .iter()
        .filter(|s| s.category == category)
        .filter_map(|s| s.median_deleted_age_days.map(f64::from))
        .collect();
    ccdf(&ages).unwrap_or_default()
}

/// CCDF of per-account deletion counts on one day.
pub fn daily_volume_ccdf(records: &[DailyDeletionRecord], day: NaiveDate) -> Vec<(f64, f64)> {
    let counts: Vec<f64> = records
        .iter()
        .filter(|r| r.day == day)
        .map(|r| r.deletion_count as f64)
        .collect();
    ccdf(&counts).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionRow {
    pub group: String,
    pub suspended: usize,
    pub total: usize,
    /// Accounts counted in `total` whose final status is unknown.
    pub unknown: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionTable {
    pub rows: Vec<SuspensionRow>,
}

pub fn suspension_row<'a>(
    group: &str,
    accounts: impl IntoIterator<Item = &'a AccountId>,
    final_statuses: &HashMap<AccountId, AccountStatus>,
) -> SuspensionRow {
    let (mut suspended, mut total, mut unknown) = (0, 0, 0);
    for a in accounts {
        total += 1;
        match final_statuses.get(a) {
            Some(AccountStatus::Suspended) => suspended += 1,
            Some(_) => {}
            None => unknown += 1,
        }
    }
    SuspensionRow {
        group: group.to_string(),
        suspended,
        total,
        unknown,
        fraction: if total == 0 { 0.0 } else { suspended as f64 / total as f64 },
    }
}

/// One row per category, in [`Category::ALL`] order.
pub fn suspension_stats(
    summaries: &[AccountBehaviorSummary],
    final_statuses: &HashMap<AccountId, AccountStatus>,
) -> SuspensionTable {
    let rows = Category::ALL
        .into_iter()
        .map(|c| {
            let ids: Vec<AccountId> = summaries
                .iter()
                .filter(|s| s.category == c)
                .map(|s| s.account_id)
                .collect();
            suspension_row(c.as_str(), &ids, final_statuses)
        })
        .collect();
    SuspensionTable { rows }
}

pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "all", "am", "an", "and", "are", "as", "at", "be", "been", "but", "by", "can",
    "do", "for", "from", "get", "has", "have", "he", "her", "his", "i", "if", "in", "into", "is",
    "it", "its", "just", "me", "my", "no", "not", "of", "on", "or", "our", "she", "so", "than",
    "that", "the", "their", "them", "they", "this", "to", "up", "us", "was", "we", "were", "what",
    "when", "who", "will", "with", "you", "your",
];

pub fn default_stopwords() -> HashSet<String> {
    DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect()
}

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Most frequent profile terms, ties broken lexicographically.
pub fn profile_terms<'a, I>(descriptions: I, top_k: usize, stopwords: &HashSet<String>) -> Vec<(String, u64)>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for d in descriptions {
        for tok in tokenize(d) {
            if !stopwords.contains(&tok) {
                *counts.entry(tok).or_default() += 1;
            }
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_k);
    ranked
}

/// Accounts of `category` in the top (or bottom) `fraction` by mean daily
/// deletions, at least one account when the category is non-empty.
pub fn rank_slice(
    summaries: &[AccountBehaviorSummary],
    category: Category,
    fraction: f64,
    top: bool,
) -> Vec<AccountId> {
    let mut members: Vec<&AccountBehaviorSummary> =
        summaries.iter().filter(|s| s.category == category).collect();
    members.sort_by(|a, b| {
        a.mean_daily_deletions
            .total_cmp(&b.mean_daily_deletions)
            .then(a.account_id.cmp(&b.account_id))
    });
    if top {
        members.reverse();
    }
    let n = ((members.len() as f64 * fraction).ceil() as usize).min(members.len());
    members.into_iter().take(n).map(|s| s.account_id).collect()
}
