//! Deletion-count estimators built from public tweet counts, and the
//! machinery that compares them against actual deletion counts.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AccountTimeline, DailyDeletionRecord};
use crate::model::AccountId;

/// Estimates below this are excluded from comparisons by default.
pub const DEFAULT_ESTIMATE_FLOOR: u64 = 10;
pub const DEFAULT_PERMUTATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimatorError {
    #[error("interval end {end} is not after start {start}")]
    EmptyInterval { start: NaiveDate, end: NaiveDate },
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains NaN")]
    NanSample,
}

/// Deleted tweets implied by a count drop between consecutive days. `None`
/// when the count held or rose, since no deletion can be inferred.
pub fn estimate_consecutive(n_t: u64, n_next: u64) -> Option<u64> {
    (n_next < n_t).then(|| n_t - n_next)
}

/// Average daily deletions implied by a count drop over `start..end`, where
/// `start` is the last day with a count and `end` the first day with both a
/// count and an actual deletion record.
pub fn estimate_gap(
    n_start: u64,
    n_end: u64,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<Option<f64>, EstimatorError> {
    let days = (end - start).num_days();
    if days <= 0 {
        return Err(EstimatorError::EmptyInterval { start, end });
    }
    Ok((n_end < n_start).then(|| (n_start - n_end) as f64 / days as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeletionEstimate {
    pub account_id: AccountId,
    pub interval_start: NaiveDate,
    pub interval_end: NaiveDate,
    pub estimated_daily: f64,
    pub is_gap: bool,
}

impl DeletionEstimate {
    pub fn covers(&self, day: NaiveDate) -> bool {
        self.interval_start < day && day <= self.interval_end
    }
}

/// Walks an account's counts in day order and emits one estimate for every
/// interval that ends on a day with both a count and an actual deletion
/// record and shows a count decrease.
pub fn estimate_timeline(timeline: &AccountTimeline) -> Vec<DeletionEstimate> {
    let mut out = Vec::new();
    let mut last: Option<(NaiveDate, u64)> = None;
    for (day, count) in timeline.counts() {
        if let Some((start, n_start)) = last {
            if timeline.deletions_on(day).is_some() {
                if let Ok(Some(rate)) = estimate_gap(n_start, count, start, day) {
                    out.push(DeletionEstimate {
                        account_id: timeline.account_id,
                        interval_start: start,
                        interval_end: day,
                        estimated_daily: rate,
                        is_gap: (day - start).num_days() > 1,
                    });
                }
            }
        }
        last = Some((day, count));
    }
    out
}

pub fn estimate_timelines(timelines: &[AccountTimeline]) -> Vec<DeletionEstimate> {
    timelines.iter().flat_map(estimate_timeline).collect()
}

/// A tweet seen in a sample stream, carrying its author's tweet count at
/// posting time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTweet {
    pub account_id: AccountId,
    pub observed_at: DateTime<Utc>,
    pub statuses_count: u64,
}

/// Applies the consecutive-count estimate to each account's chronologically
/// first and last sampled tweet. Accounts with one tweet get `None`.
pub fn estimate_from_sampled_tweets(tweets: &[SampledTweet]) -> Vec<(AccountId, Option<u64>)> {
    let mut by_account: BTreeMap<AccountId, Vec<(DateTime<Utc>, u64)>> = BTreeMap::new();
    for t in tweets {
        by_account
            .entry(t.account_id)
            .or_default()
            .push((t.observed_at, t.statuses_count));
    }
    by_account
        .into_iter()
        .map(|(account, obs)| {
            if obs.len() < 2 {
                return (account, None);
            }
            // ties on timestamp broken by count so the result is order-free
            let first = obs.iter().min().expect("non-empty");
            let last = obs.iter().max().expect("non-empty");
            (account, estimate_consecutive(first.1, last.1))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedObservation {
    pub account_id: AccountId,
    /// Actual deletion day, or the latest paired day under median aggregation.
    pub day: NaiveDate,
    pub estimated: f64,
    pub actual: f64,
    pub is_gap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub floor: u64,
    /// Reduce each account to the median of its estimates and actuals.
    pub per_account_median: bool,
    pub exclude_gaps: bool,
    /// Label permutations for the KS p-value; `None` skips it.
    pub permutations: Option<usize>,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            floor: DEFAULT_ESTIMATE_FLOOR,
            per_account_median: false,
            exclude_gaps: false,
            permutations: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub pairs: usize,
    pub mean_actual: f64,
    pub mean_estimated: f64,
    pub underestimation_fraction: f64,
    pub ks_statistic: f64,
    pub ks_p_value: Option<f64>,
    pub ccdf_actual: Vec<(f64, f64)>,
    pub ccdf_estimated: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub options: CompareOptions,
    pub paired: Vec<PairedObservation>,
    /// Pairs dropped because the estimate fell below the floor.
    pub below_floor: usize,
    /// `None` when nothing could be paired.
    pub stats: Option<ComparisonStats>,
}

impl ComparisonReport {
    pub fn is_empty(&self) -> bool {
        self.stats.is_none()
    }
}

pub fn underestimation_fraction(mean_actual: f64, mean_estimated: f64) -> f64 {
    (mean_actual - mean_estimated) / mean_actual
}

/// Pairs each actual deletion day with the estimate interval enclosing it,
/// keeps pairs whose estimate reaches `options.floor`, and summarizes the two
/// distributions.
pub fn compare(
    estimates: &[DeletionEstimate],
    actuals: &[DailyDeletionRecord],
    options: &CompareOptions,
) -> ComparisonReport {
    let mut by_account: BTreeMap<AccountId, Vec<&DeletionEstimate>> = BTreeMap::new();
    for e in estimates {
        if options.exclude_gaps && e.is_gap {
            continue;
        }
        by_account.entry(e.account_id).or_default().push(e);
    }
    for list in by_account.values_mut() {
        list.sort_by_key(|e| e.interval_end);
    }

    let floor = options.floor as f64;
    let mut paired = Vec::new();
    let mut below_floor = 0;
    for actual in actuals {
        let Some(list) = by_account.get(&actual.account_id) else {
            continue;
        };
        let idx = list.partition_point(|e| e.interval_end < actual.day);
        let Some(est) = list.get(idx).filter(|e| e.covers(actual.day)) else {
            continue;
        };
        if est.estimated_daily < floor {
            below_floor += 1;
            continue;
        }
        paired.push(PairedObservation {
            account_id: actual.account_id,
            day: actual.day,
            estimated: est.estimated_daily,
            actual: actual.deletion_count as f64,
            is_gap: est.is_gap,
        });
    }
    paired.sort_by(|a, b| (a.account_id, a.day).cmp(&(b.account_id, b.day)));
    if options.per_account_median {
        paired = median_per_account(paired);
    }

    let stats = summarize_pairs(&paired, options);
    ComparisonReport {
        options: options.clone(),
        paired,
        below_floor,
        stats,
    }
}

/// Builds the comparison straight from timelines.
pub fn compare_timelines(timelines: &[AccountTimeline], options: &CompareOptions) -> ComparisonReport {
    let estimates = estimate_timelines(timelines);
    let actuals: Vec<DailyDeletionRecord> = timelines
        .iter()
        .flat_map(|t| t.deletion_days.iter().cloned())
        .collect();
    compare(&estimates, &actuals, options)
}

fn median_per_account(paired: Vec<PairedObservation>) -> Vec<PairedObservation> {
    let mut groups: BTreeMap<AccountId, Vec<PairedObservation>> = BTreeMap::new();
    for p in paired {
        groups.entry(p.account_id).or_default().push(p);
    }
    groups
        .into_iter()
        .map(|(account_id, obs)| {
            let est: Vec<f64> = obs.iter().map(|p| p.estimated).collect();
            let act: Vec<f64> = obs.iter().map(|p| p.actual).collect();
            PairedObservation {
                account_id,
                day: obs.iter().map(|p| p.day).max().expect("non-empty group"),
                estimated: median(&est),
                actual: median(&act),
                is_gap: obs.iter().any(|p| p.is_gap),
            }
        })
        .collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn summarize_pairs(paired: &[PairedObservation], options: &CompareOptions) -> Option<ComparisonStats> {
    if paired.is_empty() {
        return None;
    }
    let actual: Vec<f64> = paired.iter().map(|p| p.actual).collect();
    let estimated: Vec<f64> = paired.iter().map(|p| p.estimated).collect();
    let n = paired.len() as f64;
    let mean_actual = actual.iter().sum::<f64>() / n;
    let mean_estimated = estimated.iter().sum::<f64>() / n;
    let (ks_statistic, ks_p_value) = match options.permutations {
        Some(perms) => {
            let t = ks_permutation_test(&actual, &estimated, perms, options.seed).ok()?;
            (t.statistic, Some(t.p_value))
        }
        None => (ks_two_sample(&actual, &estimated).ok()?, None),
    };
    Some(ComparisonStats {
        pairs: paired.len(),
        mean_actual,
        mean_estimated,
        underestimation_fraction: underestimation_fraction(mean_actual, mean_estimated),
        ks_statistic,
        ks_p_value,
        ccdf_actual: ccdf(&actual).ok()?,
        ccdf_estimated: ccdf(&estimated).ok()?,
    })
}

fn sorted_sample(sample: &[f64]) -> Result<Vec<f64>, EstimatorError> {
    if sample.is_empty() {
        return Err(EstimatorError::EmptySample);
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(EstimatorError::NanSample);
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov-Smirnov statistic: the largest gap between the two
/// empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64, EstimatorError> {
    let a = sorted_sample(a)?;
    let b = sorted_sample(b)?;
    Ok(ks_sorted(&a, &b))
}

fn ks_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = match a[i].partial_cmp(&b[j]) {
            Some(Ordering::Greater) => b[j],
            _ => a[i],
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
    pub permutations: usize,
}

/// KS statistic with a label-permutation p-value, `(hits + 1) / (perms + 1)`.
pub fn ks_permutation_test(
    a: &[f64],
    b: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<KsTest, EstimatorError> {
    let sa = sorted_sample(a)?;
    let sb = sorted_sample(b)?;
    let observed = ks_sorted(&sa, &sb);

    let mut pooled: Vec<f64> = sa.iter().chain(sb.iter()).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut left, mut right) = (Vec::with_capacity(sa.len()), Vec::with_capacity(sb.len()));
    let mut hits = 0usize;
    for _ in 0..permutations {
        pooled.shuffle(&mut rng);
        left.clear();
        right.clear();
        left.extend_from_slice(&pooled[..sa.len()]);
        right.extend_from_slice(&pooled[sa.len()..]);
        left.sort_by(f64::total_cmp);
        right.sort_by(f64::total_cmp);
        if ks_sorted(&left, &right) >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok(KsTest {
        statistic: observed,
        p_value: (hits + 1) as f64 / (permutations + 1) as f64,
        permutations,
    })
}

/// Complementary CDF evaluated at each distinct sample value: the fraction of
/// the sample at or above that value.
pub fn ccdf(samples: &[f64]) -> Result<Vec<(f64, f64)>, EstimatorError> {
    let v = sorted_sample(samples)?;
    let n = v.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let x = v[i];
        out.push((x, (v.len() - i) as f64 / n));
        while i < v.len() && v[i] == x {
            i += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AccountSnapshot, AccountStatus};
    use proptest::prelude::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2021, 4, 26).unwrap() + chrono::Days::new(d as u64)
    }

    /// Largest |F_a - F_b| over every observed value, by direct counting.
    fn brute_force_ks(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b.iter())
            .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn consecutive_worked_example() {
        assert_eq!(estimate_consecutive(500, 400), Some(100));
        assert_eq!(estimate_consecutive(100, 100), None);
        assert_eq!(estimate_consecutive(50, 80), None);
    }

    #[test]
    fn gap_estimate_is_daily_average() {
        assert_eq!(estimate_gap(1000, 700, day(0), day(3)).unwrap(), Some(100.0));
        assert_eq!(estimate_gap(700, 700, day(0), day(3)).unwrap(), None);
        assert_eq!(
            estimate_gap(1000, 700, day(3), day(3)),
            Err(EstimatorError::EmptyInterval { start: day(3), end: day(3) })
        );
    }

    #[test]
    fn sampled_tweets_use_endpoints() {
        let t = |acc: u64, secs: i64, count: u64| SampledTweet {
            account_id: AccountId(acc),
            observed_at: DateTime::from_timestamp(1_639_612_800 + secs, 0).unwrap(),
            statuses_count: count,
        };
        let out = estimate_from_sampled_tweets(&[t(1, 50, 4950), t(1, 0, 5000), t(1, 90, 4900), t(2, 0, 10)]);
        assert_eq!(out, vec![(AccountId(1), Some(100)), (AccountId(2), None)]);
    }

    #[test]
    fn ks_identity_and_disjoint() {
        assert_eq!(ks_two_sample(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[], &[1.0]), Err(EstimatorError::EmptySample));
    }

    #[test]
    fn ks_matches_brute_force_on_shifted_sample() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 3.0, 4.0, 5.0];
        assert_eq!(brute_force_ks(&a, &b), 0.25);
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 0.25);
    }

    #[test]
    fn permutation_p_value_is_seeded() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 + 25.0).collect();
        let t1 = ks_permutation_test(&a, &b, 500, 9).unwrap();
        let t2 = ks_permutation_test(&a, &b, 500, 9).unwrap();
        assert_eq!(t1, t2);
        assert!(t1.p_value < 0.01);
        let same = ks_permutation_test(&a, &a, 200, 1).unwrap();
        assert_eq!(same.p_value, 1.0);
    }

    #[test]
    fn ccdf_counts_at_or_above() {
        assert_eq!(ccdf(&[5.0]).unwrap(), vec![(5.0, 1.0)]);
        assert_eq!(
            ccdf(&[3.0, 1.0, 2.0]).unwrap(),
            vec![(1.0, 1.0), (2.0, 2.0 / 3.0), (3.0, 1.0 / 3.0)]
        );
        assert_eq!(ccdf(&[2.0, 2.0, 7.0]).unwrap(), vec![(2.0, 1.0), (7.0, 1.0 / 3.0)]);
        assert!(ccdf(&[]).is_err());
    }

    #[test]
    fn underestimation_of_reported_means() {
        assert!((underestimation_fraction(171.0, 94.0) - 0.45).abs() < 0.005);
    }

    fn rec(account: u64, d: u32, count: u64) -> DailyDeletionRecord {
        DailyDeletionRecord {
            account_id: AccountId(account),
            day: day(d),
            deletion_count: count,
            deleted_ages_days: Vec::new(),
            tweet_ids: Vec::new(),
        }
    }

    fn est(account: u64, start: u32, end: u32, rate: f64) -> DeletionEstimate {
        DeletionEstimate {
            account_id: AccountId(account),
            interval_start: day(start),
            interval_end: day(end),
            estimated_daily: rate,
            is_gap: end - start > 1,
        }
    }

    #[test]
    fn compare_identical_and_disjoint() {
        let actuals = vec![rec(1, 1, 20), rec(1, 2, 30), rec(2, 1, 40)];
        let estimates = vec![est(1, 0, 1, 20.0), est(1, 1, 2, 30.0), est(2, 0, 1, 40.0)];
        let r = compare(&estimates, &actuals, &CompareOptions::default());
        let s = r.stats.unwrap();
        assert_eq!(s.ks_statistic, 0.0);
        assert_eq!(s.underestimation_fraction, 0.0);

        let actuals = vec![rec(1, 1, 10), rec(1, 2, 10), rec(1, 3, 10)];
        let estimates = vec![est(1, 0, 1, 100.0), est(1, 1, 2, 100.0), est(1, 2, 3, 100.0)];
        let s = compare(&estimates, &actuals, &CompareOptions::default()).stats.unwrap();
        assert_eq!(s.ks_statistic, 1.0);
    }

    #[test]
    fn compare_reports_injected_means() {
        let r = compare(&[est(1, 0, 1, 94.0)], &[rec(1, 1, 171)], &CompareOptions::default());
        let s = r.stats.unwrap();
        assert_eq!((s.mean_actual, s.mean_estimated), (171.0, 94.0));
        assert!((s.underestimation_fraction - 0.45).abs() < 0.005);
    }

    #[test]
    fn compare_pairs_gap_days_and_applies_floor() {
        // gap interval (0, 3] encloses actual days 2 and 3; day 5 has no estimate
        let estimates = vec![est(1, 0, 3, 50.0), est(1, 3, 4, 5.0)];
        let actuals = vec![rec(1, 2, 60), rec(1, 3, 70), rec(1, 4, 12), rec(1, 5, 80)];
        let r = compare(&estimates, &actuals, &CompareOptions::default());
        assert_eq!(r.paired.len(), 2);
        assert!(r.paired.iter().all(|p| p.is_gap && p.estimated == 50.0));
        assert_eq!(r.below_floor, 1);

        let no_gaps = CompareOptions { exclude_gaps: true, ..CompareOptions::default() };
        assert!(compare(&estimates, &actuals, &no_gaps).is_empty());
    }

    #[test]
    fn compare_median_per_account() {
        let estimates = vec![est(1, 0, 1, 10.0), est(1, 1, 2, 20.0), est(1, 2, 3, 60.0)];
        let actuals = vec![rec(1, 1, 15), rec(1, 2, 25), rec(1, 3, 100)];
        let opts = CompareOptions { per_account_median: true, ..CompareOptions::default() };
        let r = compare(&estimates, &actuals, &opts);
        assert_eq!(r.paired.len(), 1);
        assert_eq!((r.paired[0].estimated, r.paired[0].actual), (20.0, 25.0));
    }

    #[test]
    fn empty_pairing_has_no_stats() {
        let r = compare(&[], &[rec(1, 1, 20)], &CompareOptions::default());
        assert!(r.is_empty());
    }

    fn snap(d: u32, count: Option<u64>) -> AccountSnapshot {
        AccountSnapshot {
            account_id: AccountId(1),
            snapshot_day: day(d),
            statuses_count: count,
            status: if count.is_some() { AccountStatus::Active } else { AccountStatus::Suspended },
            description: String::new(),
            created_at: None,
            queried_at: None,
        }
    }

    #[test]
    fn timeline_estimates_skip_rises_and_bridge_suspensions() {
        let tl = AccountTimeline {
            account_id: AccountId(1),
            snapshots: vec![
                snap(0, Some(1000)),
                snap(1, Some(900)),
                snap(2, Some(950)),
                snap(3, None),
                snap(4, None),
                snap(5, Some(650)),
            ],
            deletion_days: vec![rec(1, 1, 120), rec(1, 2, 10), rec(1, 4, 40), rec(1, 5, 300)],
        };
        let e = estimate_timeline(&tl);
        assert_eq!(e, vec![est(1, 0, 1, 100.0), est(1, 2, 5, 100.0)]);
        let r = compare_timelines(&[tl], &CompareOptions::default());
        // day 2 rose (no estimate); days 4 and 5 share the gap estimate
        assert_eq!(
            r.paired.iter().map(|p| (p.day, p.actual)).collect::<Vec<_>>(),
            vec![(day(1), 120.0), (day(4), 40.0), (day(5), 300.0)]
        );
    }

    proptest! {
        #[test]
        fn ks_symmetric_and_bounded(
            a in prop::collection::vec(0u32..50, 1..60),
            b in prop::collection::vec(0u32..50, 1..60),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let d = ks_two_sample(&a, &b).unwrap();
            prop_assert_eq!(d, ks_two_sample(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert!((d - brute_force_ks(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn consecutive_estimate_is_lower_bound(start in 10_000u64..100_000, posts in 0u64..500, extra in 1u64..500) {
            let deletions = posts + extra;
            let end = start + posts - deletions;
            let e = estimate_consecutive(start, end).unwrap();
            prop_assert_eq!(e, deletions - posts);
            prop_assert!(e < deletions || posts == 0);
        }

        #[test]
        fn unit_gap_equals_consecutive(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let gap = estimate_gap(a, b, day(0), day(1)).unwrap();
            let cons = estimate_consecutive(a, b).map(|v| v as f64);
            prop_assert_eq!(gap.map(f64::to_bits), cons.map(f64::to_bits));
        }

        #[test]
        fn ccdf_monotone_and_matches_counting(sample in prop::collection::vec(0u32..200, 1..300)) {
            let s: Vec<f64> = sample.into_iter().map(f64::from).collect();
            let c = ccdf(&s).unwrap();
            prop_assert_eq!(c[0].1, 1.0);
            for w in c.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
            }
            for &(x, f) in &c {
                let brute = s.iter().filter(|&&v| v >= x).count() as f64 / s.len() as f64;
                prop_assert_eq!(f, brute);
            }
        }
    }
}
