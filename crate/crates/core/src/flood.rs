//! Detection of accounts that post beyond the daily tweet limit by
//! interleaving posting with mass deletion.
//!
//! The day-over-day change in tweet count `N = n(t) - n(t-1)` plus the actual
//! deletions during day `t` equals the number of tweets posted that day,
//! whatever the age of the deleted tweets.

use std::collections::{BTreeMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ingest::AccountTimeline;
use crate::model::AccountId;

pub const DEFAULT_DAILY_LIMIT: u64 = 2_400;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FloodingViolation {
    pub account_id: AccountId,
    pub day: NaiveDate,
    pub count_diff: i64,
    pub deletions: u64,
    pub total_posted: i64,
    /// Deletions alone exceed the limit while the count did not drop, which
    /// points at a stale tweet count rather than real posting.
    pub stale_suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolatorProfile {
    pub account_id: AccountId,
    pub violation_days: Vec<NaiveDate>,
    pub repeat: bool,
}

/// Tweets posted between two consecutive daily counts given the deletions in
/// the same interval.
pub fn total_posted(n_prev: u64, n_curr: u64, deletions: u64) -> i64 {
    n_curr as i64 - n_prev as i64 + deletions as i64
}

/// Emits a violation for every account-day whose total posting exceeds
/// `limit`. Only days with counts on both that day and the previous one are
/// evaluated; days without a deletion record contribute zero deletions.
/// Output is ordered by (account, day).
pub fn detect(timelines: &[AccountTimeline], limit: u64) -> Vec<FloodingViolation> {
    let mut out = Vec::new();
    for tl in timelines {
        let counts: Vec<(NaiveDate, u64)> = tl.counts().collect();
        for w in counts.windows(2) {
            let ((prev_day, n_prev), (day, n_curr)) = (w[0], w[1]);
            if (day - prev_day).num_days() != 1 {
                continue;
            }
            let deletions = tl.deletions_on(day).map_or(0, |r| r.deletion_count);
            let total = total_posted(n_prev, n_curr, deletions);
            if total > limit as i64 {
                let count_diff = n_curr as i64 - n_prev as i64;
                out.push(FloodingViolation {
                    account_id: tl.account_id,
                    day,
                    count_diff,
                    deletions,
                    total_posted: total,
                    stale_suspect: deletions > limit && count_diff >= 0,
                });
            }
        }
    }
    out.sort();
    out
}

/// Post-detection filters.
#[derive(Debug, Clone, Default)]
pub struct ViolationFilter {
    /// Accounts sanctioned to exceed the limit.
    pub allowlist: HashSet<AccountId>,
    pub exclude_stale: bool,
}

impl ViolationFilter {
    pub fn apply(&self, violations: Vec<FloodingViolation>) -> Vec<FloodingViolation> {
        violations
            .into_iter()
            .filter(|v| !self.allowlist.contains(&v.account_id))
            .filter(|v| !(self.exclude_stale && v.stale_suspect))
            .collect()
    }
}

pub fn profile_violators(violations: &[FloodingViolation]) -> Vec<ViolatorProfile> {
    let mut by_account: BTreeMap<AccountId, Vec<NaiveDate>> = BTreeMap::new();
    for v in violations {
        by_account.entry(v.account_id).or_default().push(v.day);
    }
    by_account
        .into_iter()
        .map(|(account_id, mut violation_days)| {
            violation_days.sort();
            violation_days.dedup();
            let repeat = violation_days.len() >= 2;
            ViolatorProfile {
                account_id,
                violation_days,
                repeat,
            }
        })
        .collect()
}
