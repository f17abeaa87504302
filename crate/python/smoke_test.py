"""Smoke test for the delstream extension module.

Run after making the compiled module importable, for example:

    cargo build --release -p delstream-py --features extension-module
    cp target/release/libdelstream.so python/delstream.so
    python3 python/smoke_test.py
"""

import json
import tempfile
from pathlib import Path

import delstream

SPEC = """
days = 10

[[profiles]]
kind = "normal_deleter"
count = 50

[[profiles]]
kind = "flooder"
count = 3
params = { flood_days = 1 }

[[profiles]]
kind = "like_farm_hub"
count = 1

[[profiles]]
kind = "idle"
count = 5
"""


def check_scalars():
    assert delstream.estimate_consecutive(500, 400) == 100
    assert delstream.estimate_consecutive(400, 500) is None
    assert delstream.estimate_gap(500, 300, "2021-04-26", "2021-04-28") == 100.0
    assert delstream.total_posted(1000, 1100, 2500) == 2600
    assert delstream.ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    stat, p = delstream.ks_permutation_test([1.0, 2.0, 3.0, 4.0], [10.0, 11.0, 12.0, 13.0], 200, 1)
    assert stat == 1.0 and 0.0 < p < 0.1
    assert delstream.ccdf([1.0, 2.0])[0] == (1.0, 1.0)
    assert delstream.role_ratio(0, 5) == 0.0
    assert delstream.decode_creation_time(1000) is None
    assert delstream.decode_creation_time(1386324029286723585).startswith("2021-04-25")
    n = delstream.ComplianceNotice.from_json(
        '{"kind":"tweet_delete","actor_id":7,"object_id":1386324029286723585,"observed_at":"2021-04-26T10:00:00Z"}'
    )
    assert n.kind == "tweet_delete" and n.day == "2021-04-26"
    assert json.loads(n.to_json())["actor_id"] == 7


def check_pipeline():
    data = delstream.generate(SPEC, 3)
    truth = data.ground_truth()
    records = delstream.aggregate_daily(data.notices)
    unlikes = delstream.aggregate_unlikes(data.notices)
    timelines = delstream.build_timelines(data.snapshots, records)
    assert len(timelines) == len(truth["accounts"])

    violations = delstream.detect_flooding(timelines)
    planted = {a["account_id"] for a in truth["accounts"] if a["flood_days"]}
    assert {v.account_id for v in violations} == planted
    assert all(v.total_posted > 2400 for v in violations)

    report = delstream.compare_timelines(timelines, permutations=100)
    assert 0.0 <= report["stats"]["ks_statistic"] <= 1.0
    summaries = delstream.summarize(timelines, violations, 10)
    assert {s["account_id"] for s in summaries} == {t.account_id for t in timelines if t.deletion_days}

    graph = delstream.detect_coordination(records, unlikes)
    farm = truth["farms"][0]
    assert len(graph["components"]) == 1
    assert graph["components"][0]["id"] == min([farm["hub"]] + farm["spokes"])

    with tempfile.TemporaryDirectory() as tmp:
        data.write(tmp)
        assert (Path(tmp) / "events.jsonl").stat().st_size > 0
        assert (Path(tmp) / "snapshots.jsonl").stat().st_size > 0


if __name__ == "__main__":
    check_scalars()
    check_pipeline()
    print("smoke test ok")
