"""Gateway: engine composition, HTTP surface, persistence, CLI."""

import io
import json
import threading
import time

import pytest

import service_fixtures as fx
from pipeforge.catalog import MicroserviceSubmission
from pipeforge.errors import IllegalStateTransition, PipeforgeError
from pipeforge.gateway.engine import Engine, EngineConfig

CSV_DATA = b"f1,f2,churn\n" + b"\n".join(
    f"{i % 13},{(i * 7) % 31},{i % 2}".encode() for i in range(120)) + b"\n"

TRAINER_CODE = b'''
import argparse
import csv
import json
from collections import Counter


def train_majority(rows, target):
    """Majority-vote classification model training."""
    counts = Counter(r[target] for r in rows if r.get(target) not in ("", None))
    return counts.most_common(1)[0][0] if counts else ""


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--input")
    parser.add_argument("--output")
    parser.add_argument("--params")
    args = parser.parse_args()
    params = json.load(open(args.params))
    target = params.get("target_column")
    with open(args.input, newline="") as f:
        reader = csv.DictReader(f)
        rows = list(reader)
        columns = list(reader.fieldnames)
    prediction = train_majority(rows, target) if target else ""
    for r in rows:
        r["prediction"] = prediction
    with open(args.output, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns + ["prediction"])
        writer.writeheader()
        writer.writerows(rows)


main()
'''

EVALUATOR_CODE = b'''
import argparse
import csv
import json


def evaluate_accuracy(rows, target):
    """Model evaluation: accuracy of the prediction column."""
    scored = [r for r in rows if r.get(target) not in ("", None)]
    if not scored:
        return 0.0
    hits = sum(1 for r in scored if r.get("prediction") == r.get(target))
    return hits / len(scored)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--input")
    parser.add_argument("--output")
    parser.add_argument("--params")
    args = parser.parse_args()
    params = json.load(open(args.params))
    target = params.get("target_column")
    with open(args.input, newline="") as f:
        rows = list(csv.DictReader(f))
    accuracy = evaluate_accuracy(rows, target)
    with open(args.output, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["metric", "value"])
        writer.writerow(["accuracy", accuracy])


main()
'''

REPORTER_CODE = b'''
import argparse
import csv


def summarize_report(rows):
    """Reporting: write a summary of the incoming table."""
    return [["rows", len(rows)]]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--input")
    parser.add_argument("--output")
    parser.add_argument("--params")
    args = parser.parse_args()
    with open(args.input, newline="") as f:
        rows = list(csv.reader(f))
    summary = summarize_report(rows[1:])
    with open(args.output, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["item", "value"])
        writer.writerows(summary)


main()
'''


def submission(name, code, description="", category="modeling", keywords=()):
    return MicroserviceSubmission(
        name=name, user_description=description or f"user docs for {name}",
        python_version="3.10", category=category, keywords=tuple(keywords),
        code=code, requirements=b"# none\n")


def make_engine(tmp_path, **overrides) -> Engine:
    defaults = dict(store_dir=tmp_path / "store", step_timeout=20.0,
                    retry_base_delay=0.0, selection_timeout=2.0)
    defaults.update(overrides)
    return Engine(EngineConfig(**defaults))


def seed_catalog(engine):
    ids = {}
    for name, code, category in [
        ("classification model training majority", TRAINER_CODE, "modeling"),
        ("model evaluation accuracy metrics", EVALUATOR_CODE, "evaluation"),
        ("reporting summary writer", REPORTER_CODE, "visualization"),
    ]:
        ms = engine.upload(submission(name, code, category=category), auto_publish=True)
        assert ms.state == "indexed", (name, ms.state,
                                       ms.to_dict().get("validation"))
        ids[name] = ms.id
    return ids


# --- engine -----------------------------------------------------------------

def test_upload_validates_and_analyzes(tmp_path):
    engine = make_engine(tmp_path)
    ms = engine.upload(submission("trainer", TRAINER_CODE))
    assert ms.state == "analyzed"
    assert "model training" in ms.analysis.capabilities
    assert "requires-target" in ms.analysis.capabilities
    assert "csv" in ms.analysis.input_formats


def test_upload_rejected_stays_out_of_index(tmp_path):
    engine = make_engine(tmp_path)
    bad = submission("bad", b"x=1\n")
    bad = MicroserviceSubmission(**{**bad.__dict__, "requirements": b"pandas\n"})
    ms = engine.upload(bad)
    assert ms.state == "rejected"
    assert engine.catalog.indexed() == []


def test_run_end_to_end_completes(tmp_path):
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    record = engine.run_end_to_end(CSV_DATA, "predict customer churn")
    assert record.final_status == "completed"
    assert record.selection_mode == "autonomous"
    pipeline = engine.get_pipeline(record.pipeline_id)
    assert pipeline.status == "completed"
    assert [s.stage for s in pipeline.steps] == ["model_training", "evaluation", "reporting"]


def test_run_end_to_end_error_attributed_to_profiler(tmp_path):
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    with pytest.raises(PipeforgeError) as excinfo:
        engine.run_end_to_end(b"\x00\xff\x00garbage", "predict churn")
    assert excinfo.value.agent == "profiler"


def test_run_end_to_end_error_attributed_to_intent(tmp_path):
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    with pytest.raises(PipeforgeError) as excinfo:
        engine.run_end_to_end(CSV_DATA, "make me a sandwich")
    assert excinfo.value.agent == "intent"


def test_interactive_timeout_falls_back_autonomous(tmp_path):
    engine = make_engine(tmp_path, selection_timeout=0.3)
    seed_catalog(engine)
    record = engine.run_end_to_end(CSV_DATA, "predict customer churn",
                                   mode="interactive")
    assert record.final_status == "completed"
    assert record.selection_mode == "autonomous_fallback"


def test_interactive_choices_applied(tmp_path):
    engine = make_engine(tmp_path, selection_timeout=10.0)
    ids = seed_catalog(engine)
    dataset_id, _ = engine.add_dataset("churn.csv", CSV_DATA)
    pipeline, validation, recs = engine.create_pipeline(
        dataset_id, "predict customer churn", mode="interactive")
    assert engine.awaiting_selection(pipeline.id)
    assert pipeline.status == "draft"
    # Pick the rank-2 candidate for evaluation.
    eval_rec = recs["evaluation"]
    second = eval_rec.candidates[1][0]
    rebuilt = engine.submit_selections(pipeline.id, {"evaluation": second})
    assert rebuilt.status == "ready"
    step = next(s for s in rebuilt.steps if s.stage == "evaluation")
    assert step.microservice_id == second


def test_interactive_selection_from_other_thread(tmp_path):
    engine = make_engine(tmp_path, selection_timeout=5.0)
    seed_catalog(engine)

    def chooser():
        deadline = time.monotonic() + 4.0
        while time.monotonic() < deadline:
            awaiting = [pid for pid in list(engine._awaiting)
                        if engine.awaiting_selection(pid)]
            if awaiting:
                engine.submit_selections(awaiting[0], {})
                return
            time.sleep(0.02)

    t = threading.Thread(target=chooser)
    t.start()
    record = engine.run_end_to_end(CSV_DATA, "predict customer churn",
                                   mode="interactive")
    t.join()
    assert record.final_status == "completed"
    assert record.selection_mode == "interactive"


def test_selections_rejected_when_not_awaiting(tmp_path):
    from pipeforge.errors import InvalidChoice
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    dataset_id, _ = engine.add_dataset("churn.csv", CSV_DATA)
    pipeline, _, _ = engine.create_pipeline(dataset_id, "predict customer churn")
    with pytest.raises(InvalidChoice):
        engine.submit_selections(pipeline.id, {"evaluation": "anything"})


def test_execute_job_lifecycle(tmp_path):
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    dataset_id, _ = engine.add_dataset("churn.csv", CSV_DATA)
    pipeline, validation, _ = engine.create_pipeline(dataset_id, "predict customer churn")
    assert pipeline.status == "ready"
    job = engine.execute_pipeline(pipeline.id, background=False)
    assert job["state"] == "done"
    runs = engine.runs_for(pipeline.id)
    assert len(runs) == 1
    assert runs[0]["final_status"] == "completed"


def test_concurrent_execute_is_illegal(tmp_path):
    import service_fixtures as fx
    engine = make_engine(tmp_path)
    # A trainer that sleeps ~1s holds the pipeline in running state.
    engine.upload(submission("classification model training slowpoke",
                             fx.SLOW_PASSTHROUGH), auto_publish=True)
    engine.upload(submission("model evaluation accuracy metrics",
                             EVALUATOR_CODE, category="evaluation"), auto_publish=True)
    engine.upload(submission("reporting summary writer",
                             REPORTER_CODE, category="visualization"), auto_publish=True)
    dataset_id, _ = engine.add_dataset("churn.csv", CSV_DATA)
    pipeline, _, _ = engine.create_pipeline(dataset_id, "predict customer churn")
    job = engine.execute_pipeline(pipeline.id, background=True)
    time.sleep(0.15)  # let the worker claim the pipeline
    with pytest.raises(IllegalStateTransition):
        engine.execute_pipeline(pipeline.id)
    for _ in range(400):
        if engine.get_job(job["id"])["state"] in ("done", "error"):
            break
        time.sleep(0.05)
    assert engine.get_job(job["id"])["state"] == "done"


def test_execute_draft_pipeline_is_illegal(tmp_path):
    engine = make_engine(tmp_path, selection_timeout=60.0)
    seed_catalog(engine)
    dataset_id, _ = engine.add_dataset("churn.csv", CSV_DATA)
    pipeline, _, _ = engine.create_pipeline(dataset_id, "predict customer churn",
                                            mode="interactive")
    with pytest.raises(IllegalStateTransition):
        engine.execute_pipeline(pipeline.id)


def test_restart_preserves_terminal_state(tmp_path):
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    record = engine.run_end_to_end(CSV_DATA, "predict customer churn")
    pid = record.pipeline_id
    engine.storage.close()

    reborn = make_engine(tmp_path)  # same store dir
    assert len(reborn.catalog.indexed()) == 3
    assert reborn.get_pipeline(pid).status == "completed"
    assert reborn.runs_for(pid)[0]["final_status"] == "completed"
    # Pattern history replayed from the trace log.
    assert len(reborn.patterns.traces()) == len(engine.patterns.traces()) > 0


def test_patterns_summary(tmp_path):
    engine = make_engine(tmp_path)
    seed_catalog(engine)
    engine.run_end_to_end(CSV_DATA, "predict customer churn")
    summary = engine.patterns_summary()
    assert summary["trace_count"] == 3
    assert any(v["successes"] == 1 for v in summary["global"].values())


# --- HTTP surface -----------------------------------------------------------------

@pytest.fixture
def client(tmp_path):
    from fastapi.testclient import TestClient
    from pipeforge.gateway.http import create_app
    engine = make_engine(tmp_path)
    app = create_app(engine)
    return TestClient(app), engine


def _upload_service(client, name, code, category="modeling"):
    resp = client.post("/microservices", data={
        "name": name, "user_description": f"docs for {name}",
        "category": category, "keywords": "test", "publish": "true"},
        files={"code": ("main.py", io.BytesIO(code), "text/x-python"),
               "requirements": ("requirements.txt", io.BytesIO(b"# none\n"), "text/plain")})
    assert resp.status_code == 200, resp.text
    return resp.json()


def _seed_http(client):
    for name, code, cat in [
            ("classification model training majority", TRAINER_CODE, "modeling"),
            ("model evaluation accuracy metrics", EVALUATOR_CODE, "evaluation"),
            ("reporting summary writer", REPORTER_CODE, "visualization")]:
        body = _upload_service(client, name, code, cat)
        assert body["state"] == "indexed"


def test_http_upload_and_search(client):
    http, engine = client
    _seed_http(http)
    resp = http.get("/microservices", params={"query": "evaluate model accuracy"})
    assert resp.status_code == 200
    results = resp.json()
    assert results[0]["submission"]["name"] == "model evaluation accuracy metrics"


def test_http_upload_unpinned_requirements_rejected(client):
    http, _ = client
    resp = http.post("/microservices", data={
        "name": "bad", "user_description": "d", "category": "x", "keywords": ""},
        files={"code": ("main.py", io.BytesIO(b"x=1\n"), "text/x-python"),
               "requirements": ("requirements.txt", io.BytesIO(b"pandas\n"), "text/plain")})
    assert resp.status_code == 200
    body = resp.json()
    assert body["state"] == "rejected"
    assert any(f["check"] == "pinning" for f in body["validation"])


def test_http_full_flow_with_polling(client):
    http, engine = client
    _seed_http(http)

    resp = http.post("/datasets", files={"file": ("churn.csv", io.BytesIO(CSV_DATA), "text/csv")})
    assert resp.status_code == 200
    dataset_id = resp.json()["dataset_id"]
    assert resp.json()["profile"]["best_target"] == "churn"

    resp = http.post("/intents", json={"dataset_id": dataset_id,
                                       "goal": "predict customer churn"})
    assert resp.status_code == 200
    assert resp.json()["intent"]["task_type"] == "classification"

    resp = http.post("/recommendations", json={"dataset_id": dataset_id,
                                               "goal": "predict customer churn"})
    assert resp.status_code == 200
    stages = resp.json()["stages"]
    assert set(stages) == {"model_training", "evaluation", "reporting"}

    resp = http.post("/pipelines", json={"dataset_id": dataset_id,
                                         "goal": "predict customer churn"})
    assert resp.status_code == 200
    pipeline_id = resp.json()["pipeline"]["id"]
    assert resp.json()["pipeline"]["status"] == "ready"

    resp = http.post(f"/pipelines/{pipeline_id}/execute")
    assert resp.status_code == 200
    job_id = resp.json()["id"]

    # Poll the job and the live pipeline until done.
    for _ in range(400):
        job = http.get(f"/jobs/{job_id}").json()
        if job["state"] in ("done", "error"):
            break
        live = http.get(f"/pipelines/{pipeline_id}").json()["pipeline"]
        assert live["status"] in ("ready", "running", "completed", "failed")
        time.sleep(0.02)
    assert job["state"] == "done"

    live = http.get(f"/pipelines/{pipeline_id}").json()["pipeline"]
    assert live["status"] == "completed"
    assert all(s["status"] == "succeeded" for s in live["steps"])

    runs = http.get(f"/pipelines/{pipeline_id}/runs").json()
    assert runs[0]["final_status"] == "completed"

    artifact = http.get(f"/pipelines/{pipeline_id}/artifact")
    assert artifact.status_code == 200
    assert b"item,value" in artifact.content or b"rows" in artifact.content


def test_http_execute_draft_is_409(client):
    http, engine = client
    _seed_http(http)
    resp = http.post("/datasets", files={"file": ("churn.csv", io.BytesIO(CSV_DATA), "text/csv")})
    dataset_id = resp.json()["dataset_id"]
    resp = http.post("/pipelines", json={"dataset_id": dataset_id,
                                         "goal": "predict customer churn",
                                         "mode": "interactive"})
    pipeline_id = resp.json()["pipeline"]["id"]
    assert resp.json()["awaiting_selection"] is True
    resp = http.post(f"/pipelines/{pipeline_id}/execute")
    assert resp.status_code == 409


def test_http_unknown_ids_are_404(client):
    http, _ = client
    assert http.get("/jobs/nope").status_code == 404
    assert http.get("/pipelines/nope").status_code == 404
    assert http.get("/microservices/nope").status_code == 404


def test_http_selection_for_unknown_stage_is_400(client):
    http, engine = client
    _seed_http(http)
    resp = http.post("/datasets", files={"file": ("churn.csv", io.BytesIO(CSV_DATA), "text/csv")})
    dataset_id = resp.json()["dataset_id"]
    resp = http.post("/pipelines", json={"dataset_id": dataset_id,
                                         "goal": "predict customer churn",
                                         "mode": "interactive"})
    pipeline_id = resp.json()["pipeline"]["id"]
    resp = http.post(f"/pipelines/{pipeline_id}/selections",
                     json={"choices": {"nonexistent_stage": "x"}})
    assert resp.status_code == 400


def test_http_api_token(tmp_path):
    from fastapi.testclient import TestClient
    from pipeforge.gateway.http import create_app
    engine = make_engine(tmp_path / "tok", api_token="hunter2")
    http = TestClient(create_app(engine))
    assert http.get("/patterns/summary").status_code == 401
    assert http.get("/patterns/summary",
                    headers={"X-API-Token": "hunter2"}).status_code == 200


# --- CLI ---------------------------------------------------------------------------

def test_cli_profile_json(tmp_path):
    from click.testing import CliRunner
    from pipeforge.cli import main
    data_file = tmp_path / "d.csv"
    data_file.write_bytes(CSV_DATA)
    runner = CliRunner()
    result = runner.invoke(main, ["--store", str(tmp_path / "s"),
                                  "profile", str(data_file), "--json"])
    assert result.exit_code == 0, result.output
    prof = json.loads(result.output)
    assert prof["best_target"] == "churn"


def test_cli_run_json(tmp_path):
    from click.testing import CliRunner
    from pipeforge.cli import main
    store = tmp_path / "s"
    engine = Engine(EngineConfig(store_dir=store, retry_base_delay=0.0))
    seed_catalog(engine)
    engine.storage.close()
    data_file = tmp_path / "d.csv"
    data_file.write_bytes(CSV_DATA)
    runner = CliRunner()
    result = runner.invoke(main, ["--store", str(store), "run", str(data_file),
                                  "--goal", "predict customer churn", "--json"])
    assert result.exit_code == 0, result.output
    record = json.loads(result.output)
    assert record["final_status"] == "completed"


def test_cli_invalid_weights(tmp_path):
    from click.testing import CliRunner
    from pipeforge.cli import main
    data_file = tmp_path / "d.csv"
    data_file.write_bytes(CSV_DATA)
    runner = CliRunner()
    result = runner.invoke(main, ["--store", str(tmp_path / "s"), "run",
                                  str(data_file), "--goal", "predict churn",
                                  "--weights", "0.5,0.5,0.5,0.5"])
    assert result.exit_code != 0
    assert "sum to 1" in result.output


def test_cli_upload_and_catalog(tmp_path):
    from click.testing import CliRunner
    from pipeforge.catalog import CatalogStore, save_bundle, stage
    from pipeforge.cli import main
    store = CatalogStore()
    ms = stage(store, submission("bundle trainer", TRAINER_CODE))
    bundle_dir = tmp_path / "bundle"
    save_bundle(ms, bundle_dir)

    runner = CliRunner()
    result = runner.invoke(main, ["--store", str(tmp_path / "s"), "upload",
                                  str(bundle_dir), "--publish"])
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert body["state"] == "indexed"

    result = runner.invoke(main, ["--store", str(tmp_path / "s"), "catalog", "list"])
    assert result.exit_code == 0
    assert "bundle trainer" in result.output
