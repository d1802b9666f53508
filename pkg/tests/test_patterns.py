"""Pattern store: counters, demotion, blending, chains, replay."""

import random

import pytest

from pipeforge.patterns import ExecutionTrace, PatternStore


def trace(ms="svc-a", stage="data_cleaning", outcome="success", user="u1",
          pipeline="p1", position=1, ts="2024-01-01T00:00:00Z"):
    return ExecutionTrace(user_id=user, pipeline_id=pipeline, stage=stage,
                          microservice_id=ms, outcome=outcome, timestamp=ts,
                          position=position)


def test_success_counter_identity():
    store = PatternStore()
    for i in range(7):
        store.record(trace(pipeline=f"p{i}"))
    assert store.global_stats("svc-a", "data_cleaning").success_count == 7


def test_demotion_formula():
    store = PatternStore(demotion_factor=0.5)
    store.record(trace(outcome="success"))
    store.record(trace(outcome="failure"))
    assert store.effective("svc-a", "data_cleaning") == 0.5


def test_effective_never_negative():
    store = PatternStore(demotion_factor=0.5)
    for _ in range(4):
        store.record(trace(outcome="failure"))
    assert store.effective("svc-a", "data_cleaning") == 0.0


def test_user_and_global_both_incremented():
    store = PatternStore()
    store.record(trace(user="alice"))
    assert store.global_stats("svc-a", "data_cleaning").success_count == 1
    assert store.user_stats("alice", "svc-a", "data_cleaning").success_count == 1
    assert store.user_stats("bob", "svc-a", "data_cleaning").success_count == 0


def test_blend_arithmetic():
    store = PatternStore(user_blend=0.7)
    for i in range(10):
        store.record(trace(user="u1", pipeline=f"p{i}"))
    # user u1 has 10, global has 10: 0.7*10 + 0.3*10 = 10
    assert store.effective("svc-a", "data_cleaning", user_id="u1") == pytest.approx(10.0)


def test_blend_no_user_history():
    store = PatternStore(user_blend=0.7)
    for i in range(10):
        store.record(trace(user="someone-else", pipeline=f"p{i}"))
    got = store.effective("svc-a", "data_cleaning", user_id="newcomer")
    assert got == pytest.approx(0.3 * 10)


def test_blend_beta_zero_is_pure_global():
    store = PatternStore(user_blend=0.0)
    for i in range(5):
        store.record(trace(user="u1", pipeline=f"p{i}"))
    assert store.effective("svc-a", "data_cleaning", user_id="u2") == pytest.approx(5.0)


def test_no_user_argument_is_global():
    store = PatternStore(user_blend=0.7)
    for i in range(4):
        store.record(trace(user="u1", pipeline=f"p{i}"))
    assert store.effective("svc-a", "data_cleaning") == 4.0


# --- chains -------------------------------------------------------------------

def run_pipeline(store, pipeline, steps, user="u1"):
    for pos, ms in enumerate(steps, start=1):
        store.record(trace(ms=ms, stage="s", pipeline=pipeline, position=pos, user=user))


def test_chain_counting_oracle():
    store = PatternStore()
    for i in range(3):
        run_pipeline(store, f"ab{i}", ["A", "B"])
    run_pipeline(store, "ac", ["A", "C"])
    assert store.top_chains("A", k=5) == [("B", 3), ("C", 1)]


def test_chain_unknown_from():
    assert PatternStore().top_chains("ghost", k=3) == []


def test_chain_k_one():
    store = PatternStore()
    run_pipeline(store, "p1", ["A", "B"])
    run_pipeline(store, "p2", ["A", "B"])
    run_pipeline(store, "p3", ["A", "C"])
    assert store.top_chains("A", k=1) == [("B", 2)]


def test_chain_requires_consecutive_success():
    store = PatternStore()
    store.record(trace(ms="A", pipeline="p", position=1))
    store.record(trace(ms="B", pipeline="p", position=2, outcome="failure"))
    store.record(trace(ms="C", pipeline="p", position=3))
    # A->B never succeeded; A->C is not consecutive.
    assert store.top_chains("A", k=5) == []


def test_chain_tie_lexicographic():
    store = PatternStore()
    run_pipeline(store, "p1", ["A", "Z"])
    run_pipeline(store, "p2", ["A", "B"])
    assert store.top_chains("A", k=5) == [("B", 1), ("Z", 1)]


# --- replay -------------------------------------------------------------------

def test_replay_reproduces_stats():
    rng = random.Random(17)
    store = PatternStore()
    services = ["svc-a", "svc-b", "svc-c"]
    stages = ["data_cleaning", "model_training"]
    for i in range(200):
        store.record(trace(
            ms=rng.choice(services), stage=rng.choice(stages),
            outcome=rng.choice(["success", "failure"]),
            user=rng.choice(["u1", "u2"]), pipeline=f"p{i % 20}",
            position=rng.randint(1, 4)))
    replayed = PatternStore.replay(store.traces())
    assert replayed.snapshot() == store.snapshot()


def test_replay_from_log_file(tmp_path):
    log = tmp_path / "traces.ndjson"
    store = PatternStore(log_path=log)
    run_pipeline(store, "p1", ["A", "B", "C"])
    store.record(trace(ms="B", stage="s", outcome="failure", pipeline="p2"))
    replayed = PatternStore.replay_log(log)
    assert replayed.snapshot() == store.snapshot()


def test_score_pattern_monotonicity():
    store = PatternStore()
    previous = 0.0
    for i in range(120):
        store.record(trace(pipeline=f"p{i}"))
        eff = store.effective("svc-a", "data_cleaning")
        score = min(eff / 100, 1.0)
        assert score >= previous
        previous = score
    assert previous == 1.0
