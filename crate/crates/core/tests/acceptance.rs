//! Exit criteria. Each test prints one `criterion N ... PASS|FAIL` line.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use delstream::coord::{detect_coordination, CoordinationOptions};
use delstream::estimator::{
    compare, compare_timelines, estimate_consecutive, ks_two_sample, CompareOptions, DeletionEstimate,
};
use delstream::flood::{detect, total_posted, DEFAULT_DAILY_LIMIT};
use delstream::ingest::{
    aggregate_daily, aggregate_daily_sharded, aggregate_unlikes, build_timelines, AccountTimeline,
    DailyDeletionRecord, UnlikeRecord,
};
use delstream::model::{AccountId, ComplianceNotice, AccountSnapshot, AccountStatus, TweetId};
use delstream::stats::{summarize, DEFAULT_WINDOW_DAYS};
use delstream::synth::{generate, uniform_notice_stream, BehaviorKind, PopulationSpec, ProfileParams, SyntheticDataset};

fn verdict(id: &str, name: &str, pass: bool, detail: String) {
    println!("criterion {id} {name} ... {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn timelines_of(data: &SyntheticDataset, threshold: u64) -> Vec<AccountTimeline> {
    let records = aggregate_daily(&data.notices, threshold);
    build_timelines(data.snapshots.clone(), records).unwrap()
}

fn day_index(data: &SyntheticDataset, day: NaiveDate) -> usize {
    (day - data.truth.start_date).num_days() as usize
}

#[test]
fn criterion_1_consecutive_estimate_fixed_point() {
    let start = Instant::now();
    let ok = estimate_consecutive(500, 400) == Some(100)
        && estimate_consecutive(100, 100).is_none()
        && estimate_consecutive(50, 80).is_none();
    verdict("1", "consecutive estimate", ok, format!("{:?}", start.elapsed()));
}

#[test]
fn criterion_2_underestimation() {
    let start = Instant::now();
    let spec = PopulationSpec::default().with_profile(
        BehaviorKind::NormalDeleter,
        400,
        ProfileParams { daily_posts: Some(20.0), deletion_days: Some(10), ..Default::default() },
    );
    let data = generate(&spec, 21).unwrap();
    let report = compare_timelines(&timelines_of(&data, 10), &CompareOptions::default());
    let stats = report.stats.expect("population yields pairs");
    let synthetic = stats.mean_estimated < stats.mean_actual;

    let day = NaiveDate::from_ymd_opt(2021, 5, 1).unwrap();
    let estimate = DeletionEstimate {
        account_id: AccountId(1),
        interval_start: day - Days::new(1),
        interval_end: day,
        estimated_daily: 94.0,
        is_gap: false,
    };
    let actual = DailyDeletionRecord {
        account_id: AccountId(1),
        day,
        deletion_count: 171,
        deleted_ages_days: Vec::new(),
        tweet_ids: Vec::new(),
    };
    let injected = compare(&[estimate], &[actual], &CompareOptions::default());
    let frac = injected.stats.unwrap().underestimation_fraction;
    let elapsed = start.elapsed();
    verdict(
        "2",
        "underestimation",
        synthetic && (frac - 0.45).abs() <= 0.005 && elapsed < Duration::from_secs(1),
        format!(
            "synthetic means actual {:.2} estimated {:.2}; injected fraction {frac:.4}; {elapsed:?}",
            stats.mean_actual, stats.mean_estimated
        ),
    );
}

fn flooding_population() -> PopulationSpec {
    let flood = |flood_days, extra: ProfileParams| ProfileParams { flood_days: Some(flood_days), ..extra };
    PopulationSpec::default()
        .with_profile(
            BehaviorKind::NormalDeleter,
            7000,
            ProfileParams { suspended_day_prob: Some(0.02), ..Default::default() },
        )
        .with_profile(BehaviorKind::NormalDeleter, 500, ProfileParams { deletion_days: Some(30), ..Default::default() })
        .with_profile(BehaviorKind::MassDeleter, 200, ProfileParams::default())
        .with_profile(BehaviorKind::Flooder, 20, flood(1, ProfileParams::default()))
        .with_profile(BehaviorKind::Flooder, 10, flood(3, ProfileParams::default()))
        .with_profile(
            BehaviorKind::Flooder,
            10,
            flood(
                2,
                ProfileParams {
                    flood_posts: Some(26_000),
                    flood_deletions: Some(25_000),
                    initial_count: Some(60_000),
                    ..Default::default()
                },
            ),
        )
        .with_profile(BehaviorKind::Flooder, 10, flood(1, ProfileParams { purge_last_cycle: Some(true), ..Default::default() }))
        .with_profile(BehaviorKind::Idle, 2250, ProfileParams::default())
}

fn boundary_timeline(account: u64, posted: u64) -> AccountTimeline {
    let day = NaiveDate::from_ymd_opt(2021, 4, 26).unwrap();
    let snap = |d: u64, c: u64| AccountSnapshot {
        account_id: AccountId(account),
        snapshot_day: day + Days::new(d),
        statuses_count: Some(c),
        status: AccountStatus::Active,
        description: String::new(),
        created_at: None,
        queried_at: None,
    };
    AccountTimeline {
        account_id: AccountId(account),
        snapshots: vec![snap(0, 1_000), snap(1, 1_000 + posted - 500)],
        deletion_days: vec![DailyDeletionRecord {
            account_id: AccountId(account),
            day: day + Days::new(1),
            deletion_count: 500,
            deleted_ages_days: Vec::new(),
            tweet_ids: Vec::new(),
        }],
    }
}

#[test]
fn criterion_3_flooding_oracle() {
    let start = Instant::now();
    let spec = flooding_population();
    let data = generate(&spec, 3).unwrap();
    let timelines = timelines_of(&data, spec.inclusion_threshold);
    let violations = detect(&timelines, DEFAULT_DAILY_LIMIT);
    let elapsed = start.elapsed();

    let detected: BTreeSet<AccountId> = violations.iter().map(|v| v.account_id).collect();
    let truth = data.truth.flooders();
    let tp = detected.intersection(&truth).count() as f64;
    let precision = if detected.is_empty() { 0.0 } else { tp / detected.len() as f64 };
    let recall = tp / truth.len() as f64;
    let magnitudes: BTreeSet<i64> = violations.iter().map(|v| v.total_posted).collect();
    let scenarios = magnitudes.contains(&14_400) && magnitudes.contains(&26_000);

    let boundary = detect(&[boundary_timeline(1, 2_400), boundary_timeline(2, 2_401)], DEFAULT_DAILY_LIMIT);
    let boundary_ok = boundary.len() == 1 && boundary[0].account_id == AccountId(2) && boundary[0].total_posted == 2_401;

    verdict(
        "3",
        "flooding oracle",
        data.truth.accounts.len() == 10_000
            && truth.len() == 50
            && precision == 1.0
            && recall == 1.0
            && scenarios
            && boundary_ok
            && elapsed < Duration::from_secs(10),
        format!(
            "{} accounts, {} planted, precision {precision}, recall {recall}, magnitudes {:?}, boundary {boundary_ok}, {elapsed:?}",
            data.truth.accounts.len(),
            truth.len(),
            magnitudes
        ),
    );
}

#[test]
fn criterion_4_total_posted_exact() {
    let spec = PopulationSpec::default()
        .with_profile(BehaviorKind::NormalDeleter, 300, ProfileParams { suspended_day_prob: Some(0.05), ..Default::default() })
        .with_profile(BehaviorKind::MassDeleter, 40, ProfileParams { deletion_days: Some(3), ..Default::default() })
        .with_profile(BehaviorKind::Flooder, 10, ProfileParams::default());
    let data = generate(&spec, 4).unwrap();
    let truth: HashMap<AccountId, _> = data.truth.accounts.iter().map(|a| (a.account_id, a)).collect();
    // every deletion day recorded, so d_a is the full daily count
    let timelines = timelines_of(&data, 1);

    let mut candidates = Vec::new();
    for tl in &timelines {
        let counts: Vec<(NaiveDate, u64)> = tl.counts().collect();
        for w in counts.windows(2) {
            if (w[1].0 - w[0].0).num_days() == 1 {
                candidates.push((tl, w[0].1, w[1].0, w[1].1));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut mismatches = 0;
    let mut negative = 0;
    for _ in 0..1_000 {
        let (tl, n_prev, day, n_curr) = candidates[rng.random_range(0..candidates.len())];
        let d_a = tl.deletions_on(day).map_or(0, |r| r.deletion_count);
        if n_curr < n_prev {
            negative += 1;
        }
        let expected = truth[&tl.account_id].posts[day_index(&data, day)] as i64;
        if total_posted(n_prev, n_curr, d_a) != expected {
            mismatches += 1;
        }
    }
    verdict(
        "4",
        "total_posted exactness",
        mismatches == 0 && negative > 0,
        format!("1000 account-days, {mismatches} mismatches, {negative} with falling counts"),
    );
}

/// Independent union-find over the filtered liker-deleter relation.
fn oracle_components(records: &[DailyDeletionRecord], unlikes: &[UnlikeRecord], min_unlikes: u64, min_nodes: usize) -> BTreeSet<Vec<AccountId>> {
    let mut deleters: HashMap<TweetId, Vec<AccountId>> = HashMap::new();
    for r in records {
        for &t in &r.tweet_ids {
            deleters.entry(t).or_default().push(r.account_id);
        }
    }
    let mut counts: HashMap<(AccountId, TweetId), u64> = HashMap::new();
    for u in unlikes {
        *counts.entry((u.liker_id, u.tweet_id)).or_default() += u.unlike_count;
    }
    let mut parent: BTreeMap<AccountId, AccountId> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<AccountId, AccountId>, x: AccountId) -> AccountId {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let root = find(parent, p);
        parent.insert(x, root);
        root
    }
    for (&(liker, tweet), &n) in &counts {
        if n < min_unlikes {
            continue;
        }
        if let Some(ds) = deleters.get(&tweet) {
            for &d in ds {
                let (a, b) = (find(&mut parent, liker), find(&mut parent, d));
                if a != b {
                    parent.insert(a.max(b), a.min(b));
                }
            }
        }
    }
    let nodes: Vec<AccountId> = parent.keys().copied().collect();
    let mut groups: BTreeMap<AccountId, Vec<AccountId>> = BTreeMap::new();
    for n in nodes {
        let r = find(&mut parent, n);
        groups.entry(r).or_default().push(n);
    }
    groups.into_values().filter(|g| g.len() >= min_nodes).collect()
}

#[test]
fn criterion_5_coordination_oracle() {
    let mut spec = PopulationSpec::default()
        .with_profile(BehaviorKind::NormalDeleter, 500, ProfileParams::default())
        .with_profile(BehaviorKind::CasualUnliker, 400, ProfileParams { tweets_unliked: Some(5), ..Default::default() });
    for k in [8u32, 9, 10, 25] {
        for u in [4u64, 5, 20] {
            spec = spec.with_profile(
                BehaviorKind::LikeFarmHub,
                1,
                ProfileParams { farm_spokes: Some(k), unlikes_per_spoke: Some(u), ..Default::default() },
            );
        }
    }
    let data = generate(&spec, 5).unwrap();
    let records = aggregate_daily(&data.notices, 10);
    let unlikes = aggregate_unlikes(&data.notices);
    let options = CoordinationOptions::default();
    let report = detect_coordination(&records, &unlikes, &options);

    let recovered: BTreeSet<Vec<AccountId>> = report.graph.components.iter().map(|c| c.members.clone()).collect();
    let expected: BTreeSet<Vec<AccountId>> = data
        .truth
        .farms
        .iter()
        .filter(|f| f.spokes.len() + 1 >= options.min_component && f.unlikes_per_spoke >= options.min_unlikes)
        .map(|f| {
            let mut m: Vec<AccountId> = f.spokes.clone();
            m.push(f.hub);
            m.sort();
            m
        })
        .collect();
    let oracle = oracle_components(&records, &unlikes, options.min_unlikes, options.min_component);

    // 100K-edge projection
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let day = NaiveDate::from_ymd_opt(2021, 5, 1).unwrap();
    let mut big_records = Vec::new();
    let mut big_unlikes = Vec::new();
    let mut tweet = 1u64;
    for deleter in 1..=20_000u64 {
        let tweet_ids: Vec<TweetId> = (0..5).map(|i| TweetId(tweet + i)).collect();
        for &t in &tweet_ids {
            big_unlikes.push(UnlikeRecord {
                liker_id: AccountId(1_000_000 + rng.random_range(0..200_000)),
                tweet_id: t,
                unlike_count: 5,
            });
        }
        tweet += 5;
        big_records.push(DailyDeletionRecord {
            account_id: AccountId(deleter),
            day,
            deletion_count: 5,
            deleted_ages_days: Vec::new(),
            tweet_ids,
        });
    }
    let start = Instant::now();
    let big = detect_coordination(&big_records, &big_unlikes, &CoordinationOptions { min_unlikes: 5, min_component: 1 });
    let elapsed = start.elapsed();
    let big_oracle = oracle_components(&big_records, &big_unlikes, 5, 1);
    let big_match = big.graph.components.iter().map(|c| c.members.clone()).collect::<BTreeSet<_>>() == big_oracle;

    verdict(
        "5",
        "coordination oracle",
        recovered == expected && recovered == oracle && big.graph.edges.len() >= 99_000 && big_match && elapsed < Duration::from_secs(10),
        format!(
            "{} of {} farms expected, {} recovered, oracle agrees {}; {} edges in {elapsed:?}, oracle agrees {big_match}",
            expected.len(),
            data.truth.farms.len(),
            recovered.len(),
            recovered == oracle,
            big.graph.edges.len()
        ),
    );
}

fn brute_force_ks(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter().chain(b.iter()).map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
}

#[test]
fn criterion_6_ks_statistic() {
    let same = [3.0, 1.0, 4.0, 1.0, 5.0];
    let identical = ks_two_sample(&same, &same).unwrap() == 0.0;
    let disjoint = ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap() == 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=1000);
        let m = rng.random_range(1..=1000);
        // integer-valued draws exercise ties
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..200) as f64).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(0..200) as f64 + rng.random_range(0..3) as f64 * 0.5).collect();
        worst = worst.max((ks_two_sample(&a, &b).unwrap() - brute_force_ks(&a, &b)).abs());
    }
    verdict(
        "6",
        "KS statistic",
        identical && disjoint && worst <= 1e-12,
        format!("identical {identical}, disjoint {disjoint}, max deviation {worst:e}"),
    );
}

#[test]
fn criterion_7_category_labels() {
    let spec = PopulationSpec::default()
        .with_profile(BehaviorKind::NormalDeleter, 1500, ProfileParams { suspended_day_prob: Some(0.03), ..Default::default() })
        .with_profile(BehaviorKind::NormalDeleter, 200, ProfileParams { deletion_days: Some(1), ..Default::default() })
        .with_profile(BehaviorKind::NormalDeleter, 200, ProfileParams { deletion_days: Some(30), ..Default::default() })
        .with_profile(BehaviorKind::MassDeleter, 50, ProfileParams::default())
        .with_profile(BehaviorKind::Flooder, 20, ProfileParams { deletion_days: Some(28), flood_days: Some(2), ..Default::default() })
        .with_profile(BehaviorKind::Flooder, 20, ProfileParams::default())
        .with_profile(BehaviorKind::LikeFarmHub, 5, ProfileParams::default());
    let data = generate(&spec, 7).unwrap();
    let timelines = timelines_of(&data, spec.inclusion_threshold);
    let violations = detect(&timelines, spec.daily_limit);
    let summaries = summarize(&timelines, &violations, DEFAULT_WINDOW_DAYS, None);

    let labeled: BTreeMap<AccountId, _> = summaries.iter().map(|s| (s.account_id, s.category)).collect();
    let truth: BTreeMap<AccountId, _> = data
        .truth
        .accounts
        .iter()
        .filter_map(|a| a.category.map(|c| (a.account_id, c)))
        .collect();
    let mismatches = truth.iter().filter(|(id, c)| labeled.get(id) != Some(c)).count()
        + labeled.keys().filter(|id| !truth.contains_key(id)).count();
    let precedence = data
        .truth
        .accounts
        .iter()
        .filter(|a| !a.flood_days.is_empty() && a.deletions.iter().all(|&d| d >= spec.inclusion_threshold))
        .all(|a| labeled.get(&a.account_id) == Some(&delstream::stats::Category::Suspicious));
    let mut per_category: BTreeMap<&str, usize> = BTreeMap::new();
    for c in labeled.values() {
        *per_category.entry(c.as_str()).or_default() += 1;
    }
    verdict(
        "7",
        "category labels",
        mismatches == 0 && precedence && per_category.len() == 4,
        format!("{} labeled, {mismatches} mismatches, counts {per_category:?}", labeled.len()),
    );
}

fn run_cli(dir: &Path, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_delstream"))
        .args(args)
        .current_dir(dir)
        .status()
        .unwrap();
    assert!(status.success(), "{args:?} exited with {status}");
}

fn collect_files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_8_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = r#"
        days = 30
        [[profiles]]
        kind = "normal_deleter"
        count = 300
        params = { suspended_day_prob = 0.05, final_suspended_prob = 0.1 }
        [[profiles]]
        kind = "flooder"
        count = 3
        [[profiles]]
        kind = "like_farm_hub"
        count = 2
        [[profiles]]
        kind = "casual_unliker"
        count = 50
    "#;
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("population.toml"), spec).unwrap();
        run_cli(&dir, &["generate", "--spec", "population.toml", "--seed", "8", "--out", "gen"]);
        run_cli(&dir, &["aggregate", "--events", "gen/events.jsonl", "--snapshots", "gen/snapshots.jsonl", "--shards", "3", "--out", "agg"]);
        run_cli(&dir, &["detect-flooding", "--timelines", "agg", "--out", "flood/violations.csv"]);
        run_cli(&dir, &["detect-coordination", "--deletions", "agg", "--unlikes", "agg", "--out", "graph"]);
        run_cli(&dir, &["estimate", "--timelines", "agg", "--permutations", "200", "--out", "est/report.json"]);
        run_cli(&dir, &[
            "stats", "--timelines", "agg", "--violations", "flood/violations.csv",
            "--final-statuses", "gen/final_statuses.csv", "--out", "stats",
        ]);
        runs.push(collect_files(&dir));
    }
    let differing: Vec<&String> = runs[0]
        .iter()
        .filter(|(k, v)| runs[1].get(*k) != Some(v))
        .map(|(k, _)| k)
        .collect();
    verdict(
        "8",
        "determinism",
        differing.is_empty() && runs[0].len() == runs[1].len() && runs[0].len() > 20,
        format!("{} files compared, differing {differing:?}", runs[0].len()),
    );
}

fn throughput_stream() -> &'static [ComplianceNotice] {
    static EVENTS: OnceLock<Vec<ComplianceNotice>> = OnceLock::new();
    EVENTS.get_or_init(|| uniform_notice_stream(10_000_000, 200_000, 30, 9))
}

#[test]
fn criterion_9a_single_thread_throughput() {
    let events = throughput_stream();
    let start = Instant::now();
    let records = aggregate_daily(events, 10);
    let elapsed = start.elapsed();
    let rate = events.len() as f64 / elapsed.as_secs_f64();
    verdict(
        "9a",
        "single-thread throughput",
        rate >= 100_000.0 && !records.is_empty(),
        format!("{rate:.0} events/s over {} events", events.len()),
    );
}

#[test]
fn criterion_9b_four_shard_scaling() {
    let events = throughput_stream();
    let start = Instant::now();
    let single = aggregate_daily(events, 10);
    let t1 = start.elapsed();
    let start = Instant::now();
    let sharded = aggregate_daily_sharded(events, 10, 4);
    let t4 = start.elapsed();
    let speedup = t1.as_secs_f64() / t4.as_secs_f64();
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    assert_eq!(single, sharded);
    verdict(
        "9b",
        "four-shard scaling",
        speedup >= 2.5,
        format!("{speedup:.2}x ({t1:?} vs {t4:?}) on {cpus} available cpus"),
    );
}
