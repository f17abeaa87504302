//! Per-account daily aggregation of deletion notices, per-pair unlike counts,
//! and the merge of snapshots with deletion days into account timelines.

use std::collections::{BTreeMap, HashMap};
use std::thread;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AccountId, AccountSnapshot, AccountStatus, ComplianceNotice, NoticeKind, SnowflakeDecoder,
    TweetId,
};

/// Minimum deletions per account-day for inclusion.
pub const DEFAULT_INCLUSION_THRESHOLD: u64 = 10;

const MS_PER_DAY: i64 = 86_400_000;

/// Deletions by one account on one UTC day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyDeletionRecord {
    pub account_id: AccountId,
    pub day: NaiveDate,
    pub deletion_count: u64,
    /// Whole-day ages of the deleted tweets at the start of `day`, ascending.
    /// Tweets with undecodable IDs are absent.
    pub deleted_ages_days: Vec<u32>,
    /// IDs of the deleted tweets, ascending. Omitted from timeline files.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tweet_ids: Vec<TweetId>,
}

/// Total unlike notices for one liker-tweet pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnlikeRecord {
    pub liker_id: AccountId,
    pub tweet_id: TweetId,
    pub unlike_count: u64,
}

/// Streaming accumulator for both deletion days and unlike pairs.
#[derive(Debug, Default)]
pub struct DailyAggregator {
    groups: HashMap<(AccountId, NaiveDate), Vec<TweetId>>,
    unlikes: HashMap<(AccountId, TweetId), u64>,
    tweet_deletes: u64,
}

impl DailyAggregator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, notice: &ComplianceNotice) {
        match notice.kind {
            NoticeKind::TweetDelete => {
                self.tweet_deletes += 1;
                self.groups
                    .entry((notice.actor_id, notice.day()))
                    .or_default()
                    .push(notice.object_id);
            }
            NoticeKind::Unlike => {
                *self
                    .unlikes
                    .entry((notice.actor_id, notice.object_id))
                    .or_default() += 1;
            }
        }
    }

    /// Number of `tweet_delete` notices seen so far.
    pub fn tweet_deletes(&self) -> u64 {
        self.tweet_deletes
    }

    pub fn merge(&mut self, other: DailyAggregator) {
        self.tweet_deletes += other.tweet_deletes;
        for (key, ids) in other.groups {
            self.groups.entry(key).or_default().extend(ids);
        }
        for (key, count) in other.unlikes {
            *self.unlikes.entry(key).or_default() += count;
        }
    }

    /// Sorted daily records with at least `threshold` deletions.
    pub fn daily_records(&self, threshold: u64, decoder: &SnowflakeDecoder) -> Vec<DailyDeletionRecord> {
        let mut out: Vec<_> = self
            .groups
            .iter()
            .filter(|(_, ids)| ids.len() as u64 >= threshold)
            .map(|(&(account_id, day), ids)| make_record(account_id, day, ids.clone(), decoder))
            .collect();
        out.sort_unstable_by_key(|r| (r.account_id, r.day));
        out
    }

    fn into_daily_records(self, threshold: u64, decoder: &SnowflakeDecoder) -> Vec<DailyDeletionRecord> {
        let mut out: Vec<_> = self
            .groups
            .into_iter()
            .filter(|(_, ids)| ids.len() as u64 >= threshold)
            .map(|((account_id, day), ids)| make_record(account_id, day, ids, decoder))
            .collect();
        out.sort_unstable_by_key(|r| (r.account_id, r.day));
        out
    }

    pub fn unlike_records(&self) -> Vec<UnlikeRecord> {
        let mut out: Vec<_> = self
            .unlikes
            .iter()
            .map(|(&(liker_id, tweet_id), &unlike_count)| UnlikeRecord {
                liker_id,
                tweet_id,
                unlike_count,
            })
            .collect();
        out.sort_unstable();
        out
    }
}

fn make_record(
    account_id: AccountId,
    day: NaiveDate,
    mut tweet_ids: Vec<TweetId>,
    decoder: &SnowflakeDecoder,
) -> DailyDeletionRecord {
    tweet_ids.sort_unstable();
    let day_start_ms = day
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp_millis();
    let mut ages: Vec<u32> = tweet_ids
        .iter()
        .filter_map(|&id| decoder.decode_millis(id))
        .map(|created| age_in_days(day_start_ms, created))
        .collect();
    ages.sort_unstable();
    DailyDeletionRecord {
        account_id,
        day,
        deletion_count: tweet_ids.len() as u64,
        deleted_ages_days: ages,
        tweet_ids,
    }
}

/// Whole days between creation and the start of the deletion day, clamped at 0.
pub fn age_in_days(day_start_ms: i64, created_ms: i64) -> u32 {
    let delta = day_start_ms - created_ms;
    if delta <= 0 {
        0
    } else {
        u32::try_from(delta.div_euclid(MS_PER_DAY)).unwrap_or(u32::MAX)
    }
}

/// Groups `tweet_delete` notices by account and UTC day, keeping groups with
/// at least `threshold` deletions. Output is sorted by (account, day).
pub fn aggregate_daily<'a, I>(notices: I, threshold: u64) -> Vec<DailyDeletionRecord>
where
    I: IntoIterator<Item = &'a ComplianceNotice>,
{
    let mut agg = DailyAggregator::new();
    for n in notices {
        if n.kind == NoticeKind::TweetDelete {
            agg.push(n);
        }
    }
    agg.into_daily_records(threshold, &SnowflakeDecoder::default())
}

/// Counts unlike notices per (liker, tweet). Output is sorted.
pub fn aggregate_unlikes<'a, I>(notices: I) -> Vec<UnlikeRecord>
where
    I: IntoIterator<Item = &'a ComplianceNotice>,
{
    let mut agg = DailyAggregator::new();
    for n in notices {
        if n.kind == NoticeKind::Unlike {
            agg.push(n);
        }
    }
    agg.unlike_records()
}

fn shard_of(account: AccountId, shards: usize) -> usize {
    // Fibonacci hashing; stable across runs and platforms.
    (account.0.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 32) as usize % shards
}

/// Same result as [`aggregate_daily`], computed on `shards` threads. Notices
/// are partitioned by account so shards never share a group.
pub fn aggregate_daily_sharded(
    notices: &[ComplianceNotice],
    threshold: u64,
    shards: usize,
) -> Vec<DailyDeletionRecord> {
    let shards = shards.max(1);
    if shards == 1 {
        return aggregate_daily(notices, threshold);
    }
    let decoder = SnowflakeDecoder::default();
    let chunk_len = notices.len().div_ceil(shards).max(1);

    // Phase 1: each thread bins its chunk by destination shard.
    let binned: Vec<Vec<Vec<&ComplianceNotice>>> = thread::scope(|s| {
        let handles: Vec<_> = notices
            .chunks(chunk_len)
            .map(|chunk| {
                s.spawn(move || {
                    let mut bins = vec![Vec::with_capacity(chunk.len() / shards + 1); shards];
                    for n in chunk.iter().filter(|n| n.kind == NoticeKind::TweetDelete) {
                        bins[shard_of(n.actor_id, shards)].push(n);
                    }
                    bins
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("binning thread panicked")).collect()
    });

    // Phase 2: each shard aggregates its bins from every chunk.
    let binned = &binned;
    let mut parts: Vec<Vec<DailyDeletionRecord>> = thread::scope(|s| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                s.spawn(move || {
                    let mut agg = DailyAggregator::new();
                    for bins in binned {
                        for n in &bins[shard] {
                            agg.push(n);
                        }
                    }
                    agg.into_daily_records(threshold, &decoder)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard thread panicked")).collect()
    });

    let mut out = Vec::with_capacity(parts.iter().map(Vec::len).sum());
    for part in parts.iter_mut() {
        out.append(part);
    }
    out.sort_unstable_by_key(|r| (r.account_id, r.day));
    out
}

/// Snapshots and deletion days of one account, both ordered by day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountTimeline {
    pub account_id: AccountId,
    pub snapshots: Vec<AccountSnapshot>,
    pub deletion_days: Vec<DailyDeletionRecord>,
}

impl AccountTimeline {
    pub fn active_days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.days_with_status(AccountStatus::Active)
    }

    pub fn suspended_days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.days_with_status(AccountStatus::Suspended)
    }

    fn days_with_status(&self, status: AccountStatus) -> impl Iterator<Item = NaiveDate> + '_ {
        self.snapshots
            .iter()
            .filter(move |s| s.status == status)
            .map(|s| s.snapshot_day)
    }

    pub fn snapshot_on(&self, day: NaiveDate) -> Option<&AccountSnapshot> {
        self.snapshots
            .binary_search_by_key(&day, |s| s.snapshot_day)
            .ok()
            .map(|i| &self.snapshots[i])
    }

    pub fn deletions_on(&self, day: NaiveDate) -> Option<&DailyDeletionRecord> {
        self.deletion_days
            .binary_search_by_key(&day, |r| r.day)
            .ok()
            .map(|i| &self.deletion_days[i])
    }

    /// Days with an observed tweet count, paired with that count.
    pub fn counts(&self) -> impl Iterator<Item = (NaiveDate, u64)> + '_ {
        self.snapshots
            .iter()
            .filter_map(|s| s.statuses_count.map(|c| (s.snapshot_day, c)))
    }

    /// Status in the latest snapshot, if any.
    pub fn last_status(&self) -> Option<AccountStatus> {
        self.snapshots.last().map(|s| s.status)
    }

    /// Latest non-empty profile description.
    pub fn description(&self) -> Option<&str> {
        self.snapshots
            .iter()
            .rev()
            .map(|s| s.description.as_str())
            .find(|d| !d.is_empty())
    }

    /// Drops per-tweet IDs so the timeline serializes compactly.
    pub fn without_tweet_ids(mut self) -> Self {
        for r in &mut self.deletion_days {
            r.tweet_ids = Vec::new();
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimelineError {
    #[error("duplicate snapshot for account {account} on {day}")]
    DuplicateSnapshot { account: AccountId, day: NaiveDate },
    #[error("duplicate deletion record for account {account} on {day}")]
    DuplicateDeletionDay { account: AccountId, day: NaiveDate },
}

/// Outer-joins snapshots and deletion days per account. Accounts with any
/// `deleted` snapshot are discarded. Output is sorted by account.
pub fn build_timelines<S, D>(snapshots: S, records: D) -> Result<Vec<AccountTimeline>, TimelineError>
where
    S: IntoIterator<Item = AccountSnapshot>,
    D: IntoIterator<Item = DailyDeletionRecord>,
{
    let mut by_account: BTreeMap<AccountId, (Vec<AccountSnapshot>, Vec<DailyDeletionRecord>)> =
        BTreeMap::new();
    for s in snapshots {
        by_account.entry(s.account_id).or_default().0.push(s);
    }
    for r in records {
        by_account.entry(r.account_id).or_default().1.push(r);
    }

    let mut out = Vec::with_capacity(by_account.len());
    for (account_id, (mut snapshots, mut deletion_days)) in by_account {
        snapshots.sort_by_key(|s| s.snapshot_day);
        if let Some(w) = snapshots.windows(2).find(|w| w[0].snapshot_day == w[1].snapshot_day) {
            return Err(TimelineError::DuplicateSnapshot {
                account: account_id,
                day: w[0].snapshot_day,
            });
        }
        deletion_days.sort_by_key(|r| r.day);
        if let Some(w) = deletion_days.windows(2).find(|w| w[0].day == w[1].day) {
            return Err(TimelineError::DuplicateDeletionDay {
                account: account_id,
                day: w[0].day,
            });
        }
        if snapshots.iter().any(|s| s.status == AccountStatus::Deleted) {
            continue;
        }
        out.push(AccountTimeline {
            account_id,
            snapshots,
            deletion_days,
        });
    }
    Ok(out)
}
