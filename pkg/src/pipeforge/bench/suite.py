"""Deterministic evaluation suite: 30 runnable services, 25 tasks.

Category proportions mirror a realistic component mix (preprocessing 11,
modeling 9, evaluation 5, visualization 3, utility 2) and the task mix spans
classification 6 / regression 6 / clustering 5 / dim reduction 3 / eda 5,
including one intentionally unsolvable negative control. Five services are
designated zero-history for cold-start splits, and roughly 30% of author
descriptions are misleading; neither affects code-grounded analysis. The
whole suite is a pure function of the seed.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from ..catalog import MicroserviceSubmission
from ..intent import derive_stages, parse_goal
from ..profiler import profile
from . import services as svc

FIXED_TS = "2024-01-01T00:00:00Z"

REQUIREMENTS = b"# stdlib only\n"


@dataclass(frozen=True)
class ServiceSpec:
    id: str
    name: str
    category: str
    keywords: tuple
    code: bytes
    behavior: str          # accurate one-line behavior summary
    natural_stage: str     # the stage this service is built for
    zero_history: bool = False
    misleading_docs: bool = False
    doc_summary: str = ""  # what the author docs claim (may be misleading)
    popular: bool = False  # reference services: heavier seeded usage

    def user_description(self) -> str:
        summary = self.doc_summary or self.behavior
        return (
            f"{summary}\n"
            "\n"
            "Parameters:\n"
            f"  input_format: csv table with a header row\n"
            f"  notes: configured through the step params json for {self.natural_stage}\n"
            "\n"
            "Usage:\n"
            "  python main.py --input data.csv --output out.csv --params params.json\n"
            "\n"
            "Caveats: expects well-formed utf-8 csv; large files are processed in memory"
        )

    def submission(self, severity: str = "none") -> MicroserviceSubmission:
        return MicroserviceSubmission(
            name=self.name,
            user_description=degrade_description(self.user_description(), severity),
            python_version="3.10",
            category=self.category,
            keywords=self.keywords,
            code=self.code,
            requirements=REQUIREMENTS,
        )


def degrade_description(text: str, severity: str) -> str:
    """Documentation degradation levels: mild strips usage examples and
    caveats, moderate also strips parameter docs, severe leaves nothing."""
    if severity == "none":
        return text
    if severity == "mild":
        return text.split("\nUsage:")[0].rstrip()
    if severity == "moderate":
        return text.split("\nParameters:")[0].rstrip()
    if severity == "severe":
        return ""
    raise ValueError(f"unknown degradation severity: {severity}")


@dataclass
class BenchTask:
    id: str
    category: str  # classification | regression | clustering | dim_reduction | eda
    goal: str
    dataset: bytes
    cohort: int    # 1..5
    reference_pipeline: Dict[str, str]  # stage -> service id
    needs_cold: bool = False
    negative_control: bool = False


@dataclass
class Suite:
    seed: int
    services: List[ServiceSpec]
    tasks: List[BenchTask]

    def service(self, service_id: str) -> ServiceSpec:
        return next(s for s in self.services if s.id == service_id)


# ---------------------------------------------------------------------------
# Service catalog (30)
# ---------------------------------------------------------------------------

ZERO_HISTORY_IDS = frozenset({
    "svc-pca-projector",       # dim-reduction reference: cold tasks hit it
    "svc-csv-profiler",        # eda reference: cold tasks hit it
    "svc-stump-classifier",
    "svc-median-regressor",
    "svc-bucket-clusterer",
})


def _service_specs() -> List[ServiceSpec]:
    # Names are the kind of terse product labels authors actually pick; the
    # discriminative vocabulary lives in the source and in the author docs,
    # which is exactly the split the degradation protocol manipulates.
    rows = [
        # id, name, category, keywords, code, behavior, natural stage
        ("svc-dedup-cleaner", "dupsweep", "preprocessing",
         ("tables",), svc.DEDUP_CLEANER,
         "Data cleaning step that removes exact duplicate rows from a csv table.",
         "data_cleaning"),
        ("svc-median-imputer", "medianfill", "preprocessing",
         ("tables",), svc.imputer("median"),
         "Data cleaning step that fills missing numeric cells with the column median.",
         "data_cleaning"),
        ("svc-mean-imputer", "meanfill", "preprocessing",
         ("tables",), svc.imputer("mean"),
         "Data cleaning step that fills missing numeric cells with the column mean.",
         "data_cleaning"),
        ("svc-outlier-clipper", "fencetrim", "preprocessing",
         ("tables",), svc.OUTLIER_CLIPPER,
         "Data cleaning step that clips numeric outliers to the interquartile fence.",
         "data_cleaning"),
        ("svc-whitespace-trimmer", "tidycell", "preprocessing",
         ("tables",), svc.WHITESPACE_TRIMMER,
         "Data cleaning step that strips stray whitespace from every cell.",
         "data_cleaning"),
        ("svc-schema-validator", "rowmend", "preprocessing",
         ("tables",), svc.SCHEMA_VALIDATOR,
         "Data cleaning step that pads or trims ragged rows to the header width.",
         "data_cleaning"),
        ("svc-minmax-scaler", "rangefit", "preprocessing",
         ("tables",), svc.scaler("minmax"),
         "Feature engineering step that rescales numeric columns to the unit interval.",
         "feature_engineering"),
        ("svc-standard-scaler", "zerocenter", "preprocessing",
         ("tables",), svc.scaler("standard"),
         "Feature engineering step that standardizes numeric columns.",
         "feature_engineering"),
        ("svc-onehot-encoder", "hotcode", "preprocessing",
         ("tables",), svc.encoder("onehot"),
         "Feature engineering step that one-hot encodes categorical text columns.",
         "feature_engineering"),
        ("svc-label-encoder", "codemap", "preprocessing",
         ("tables",), svc.encoder("label"),
         "Feature engineering step that maps text categories to integer codes.",
         "feature_engineering"),
        ("svc-constant-dropper", "flatdrop", "preprocessing",
         ("tables",), svc.CONSTANT_DROPPER,
         "Feature engineering step that drops zero-variance columns.",
         "feature_engineering"),

        ("svc-majority-classifier", "votecast", "modeling",
         ("models",), svc.classifier("majority"),
         "Classification model training on the target column using a majority vote.",
         "model_training"),
        ("svc-stump-classifier", "splitpick", "modeling",
         ("models",), svc.classifier("stump"),
         "Classification model training with a single-split decision stump.",
         "model_training"),
        ("svc-mean-regressor", "steadycast", "modeling",
         ("models",), svc.regressor("fmean"),
         "Regression model training that predicts the running mean of the target.",
         "model_training"),
        ("svc-median-regressor", "midcast", "modeling",
         ("models",), svc.regressor("median"),
         "Regression model training that predicts the median of the target.",
         "model_training"),
        ("svc-centroid-clusterer", "twinsplit", "modeling",
         ("models",), svc.clusterer("centroid"),
         "Clustering step that assigns rows to two centroid-based clusters.",
         "clustering"),
        ("svc-bucket-clusterer", "rangesplit", "modeling",
         ("models",), svc.clusterer("bucket"),
         "Clustering step that buckets rows into three equal ranges.",
         "clustering"),
        ("svc-pca-projector", "axisfold", "modeling",
         ("models",), svc.projector("pca"),
         "Dim reduction step projecting the table onto its two highest-variance axes.",
         "dim_reduction"),
        ("svc-zscore-detector", "sigmaflag", "modeling",
         ("models",), svc.anomaly_detector("zscore"),
         "Anomaly detection step flagging rows with z-score above three.",
         "anomaly_detection"),
        ("svc-iqr-detector", "fenceflag", "modeling",
         ("models",), svc.anomaly_detector("iqr"),
         "Anomaly detection step flagging rows outside the interquartile fence.",
         "anomaly_detection"),

        ("svc-accuracy-evaluator", "hitcheck", "evaluation",
         ("metrics",), svc.evaluator("accuracy"),
         "Evaluation step scoring classification prediction accuracy vs the target.",
         "evaluation"),
        ("svc-rmse-evaluator", "errcheck", "evaluation",
         ("metrics",), svc.evaluator("rmse"),
         "Evaluation step computing regression rmse of predictions vs the target.",
         "evaluation"),
        ("svc-cluster-evaluator", "groupcheck", "evaluation",
         ("metrics",), svc.evaluator("cluster"),
         "Evaluation step reporting clustering cluster count and balance.",
         "evaluation"),
        ("svc-anomaly-evaluator", "flagcheck", "evaluation",
         ("metrics",), svc.evaluator("anomaly"),
         "Evaluation step reporting the flagged anomaly detection rate.",
         "evaluation"),
        ("svc-generic-evaluator", "shapecheck", "evaluation",
         ("metrics",), svc.evaluator("generic"),
         "Evaluation step reporting generic shape metrics for any table.",
         "evaluation"),

        ("svc-summary-reporter", "tablebrief", "visualization",
         ("reports",), svc.reporter("summary"),
         "Reporting step writing a summary of shape and fill rates.",
         "reporting"),
        ("svc-histogram-reporter", "bincount", "visualization",
         ("reports",), svc.reporter("histogram"),
         "Reporting step writing histogram counts for the leading column.",
         "reporting"),
        ("svc-correlation-reporter", "pairline", "visualization",
         ("reports",), svc.reporter("correlation"),
         "Reporting step on the correlation of the first two numeric columns.",
         "reporting"),

        ("svc-csv-profiler", "colscan", "utility",
         ("tables",), svc.CSV_PROFILER,
         "Profiling step describing each column with cardinality and fill counts.",
         "profiling"),
        ("svc-csv-exporter", "tablecopy", "utility",
         ("tables",), svc.CSV_EXPORTER,
         "Utility step passing the table through unchanged as a checkpoint.",
         "profiling"),
    ]
    return [
        ServiceSpec(id=i, name=n, category=c, keywords=tuple(k), code=code,
                    behavior=b, natural_stage=stage,
                    zero_history=i in ZERO_HISTORY_IDS)
        for (i, n, c, k, code, b, stage) in rows
    ]


# ---------------------------------------------------------------------------
# Reference pipelines
# ---------------------------------------------------------------------------

_REFERENCE = {
    "data_cleaning": "svc-dedup-cleaner",
    "feature_engineering": "svc-onehot-encoder",
    "clustering": "svc-centroid-clusterer",
    "dim_reduction": "svc-pca-projector",
    "anomaly_detection": "svc-zscore-detector",
    "profiling": "svc-csv-profiler",
    "reporting": "svc-summary-reporter",
}

_MODEL_REFERENCE = {"classification": "svc-majority-classifier",
                    "regression": "svc-mean-regressor"}
_EVAL_REFERENCE = {"classification": "svc-accuracy-evaluator",
                   "regression": "svc-rmse-evaluator",
                   "clustering": "svc-cluster-evaluator"}


def reference_for(stages: List[str], category: str) -> Dict[str, str]:
    ref = {}
    for stage in stages:
        if stage == "model_training":
            ref[stage] = _MODEL_REFERENCE[category]
        elif stage == "evaluation":
            ref[stage] = _EVAL_REFERENCE.get(category, "svc-generic-evaluator")
        else:
            ref[stage] = _REFERENCE[stage]
    return ref


# ---------------------------------------------------------------------------
# Dataset generators
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _csv(header: List[str], rows: List[List[str]]) -> bytes:
    lines = [",".join(header)]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _classification_data(rng: random.Random, dirty: bool, categorical: bool,
                         target: str) -> bytes:
    n = rng.randint(110, 150)
    header = ["f1", "f2"]
    if categorical:
        header.append("plan")
    header.append(target)
    rows = []
    for i in range(n):
        label = rng.randint(0, 1)
        f1 = _fmt(rng.gauss(2.0 * label, 1.0))
        f2 = _fmt(rng.gauss(-1.5 * label, 1.2))
        row = [f1, f2]
        if categorical:
            row.append(rng.choice(["basic", "plus", "pro"]))
        row.append(str(label))
        rows.append(row)
    if dirty:
        for row in rows:
            if rng.random() < 0.7:
                row[0] = ""
            if rng.random() < 0.7:
                row[1] = ""
        rows.extend([list(r) for r in rows])  # full duplication halves uniqueness
    return _csv(header, rows)


def _regression_data(rng: random.Random, dirty: bool, categorical: bool,
                     target: str) -> bytes:
    n = rng.randint(110, 150)
    header = ["f1", "f2"]
    if categorical:
        header.append("region")
    header.append(target)
    rows = []
    for i in range(n):
        f1 = rng.gauss(0, 1)
        f2 = rng.gauss(5, 2)
        row = [_fmt(f1), _fmt(f2)]
        if categorical:
            row.append(rng.choice(["north", "south", "east", "west"]))
        row.append(_fmt(3.5 * f1 - 1.2 * f2 + rng.gauss(0, 0.5) + 100.0))
        rows.append(row)
    if dirty:
        for row in rows:
            if rng.random() < 0.7:
                row[0] = ""
            if rng.random() < 0.7:
                row[1] = ""
        rows.extend([list(r) for r in rows])
    return _csv(header, rows)


def _clustering_data(rng: random.Random, categorical: bool) -> bytes:
    n = rng.randint(100, 140)
    header = ["x1", "x2", "x3"] + (["segment_hint"] if categorical else [])
    rows = []
    for i in range(n):
        blob = rng.randint(0, 1)
        rows.append([
            _fmt(rng.gauss(4.0 * blob, 0.8)),
            _fmt(rng.gauss(-3.0 * blob, 0.9)),
            _fmt(rng.gauss(1.0, 0.5)),
        ] + (["alpha" if blob else "beta"] if categorical else []))
    return _csv(header, rows)


def _dim_reduction_data(rng: random.Random) -> bytes:
    n = rng.randint(90, 130)
    header = [f"v{i}" for i in range(1, 6)]
    rows = [[_fmt(rng.gauss(0, i)) for i in range(1, 6)] for _ in range(n)]
    return _csv(header, rows)


def _eda_data(rng: random.Random, rows_count: Optional[int] = None) -> bytes:
    n = rows_count or rng.randint(80, 120)
    header = ["amount", "count", "kind"]
    rows = [[_fmt(rng.gauss(50, 10)), str(rng.randint(0, 9)),
             rng.choice(["a", "b", "c"])] for _ in range(n)]
    return _csv(header, rows)


# ---------------------------------------------------------------------------
# Suite assembly
# ---------------------------------------------------------------------------

_TASK_PLAN = [
    # (category, goal, dirty, categorical, target)
    ("classification", "predict customer churn", False, True, "churn"),
    ("classification", "classify churn for subscriber accounts", False, False, "churn"),
    ("classification", "predict the outcome column", True, False, "outcome"),
    ("classification", "predict churn risk", False, True, "churn"),
    ("classification", "classify the outcome for each row", True, True, "outcome"),
    ("classification", "predict customer churn from usage", False, False, "churn"),
    ("regression", "forecast the price column", False, False, "price"),
    ("regression", "predict demand for items", False, True, "demand"),
    ("regression", "estimate price from the features", True, False, "price"),
    ("regression", "forecast demand levels", False, False, "demand"),
    ("regression", "predict the price of listings", True, True, "price"),
    ("regression", "estimate demand for planning", False, False, "demand"),
    ("clustering", "identify customer clusters", False, False, None),
    ("clustering", "segment the transactions", False, False, None),
    ("clustering", "group similar rows into clusters", False, True, None),
    ("clustering", "cluster the records by behavior", False, False, None),
    ("clustering", "segment users into groups", False, False, None),
    ("dim_reduction", "visualize the main dimensions", False, False, None),
    ("dim_reduction", "reduce the feature space", False, False, None),
    ("dim_reduction", "project the data for visualization", False, False, None),
    ("eda", "explore the dataset", False, False, None),
    ("eda", "profile the data quality", False, False, None),
    ("eda", "analyze column distributions", False, False, None),  # negative control slot
    ("eda", "summarize the table contents", False, False, None),
    ("eda", "describe the dataset columns", False, False, None),
]

NEGATIVE_CONTROL_INDEX = 22  # 8-row dataset: fails minimum-size validation


def generate_suite(seed: int) -> Suite:
    """Deterministic suite; identical seed, identical bytes."""
    rng = random.Random(seed)
    services = _service_specs()

    # ~30% of services carry misleading author docs: the summary of a
    # different, randomly chosen service. Code-grounded analysis ignores it.
    # Reference services keep accurate docs (they model the well-maintained
    # core of a catalog); the rot lives in the long tail.
    reference_ids = set(_REFERENCE.values()) | set(_MODEL_REFERENCE.values()) \
        | set(_EVAL_REFERENCE.values()) | {"svc-generic-evaluator"}
    eligible = sorted(s.id for s in services if s.id not in reference_ids)
    rng.shuffle(eligible)
    misleading = set(eligible[: round(0.3 * len(services))])
    behaviors = {s.id: s.behavior for s in services}
    final_services = []
    for s in services:
        doc_summary = s.behavior
        if s.id in misleading:
            doc_summary = rng.choice([b for sid, b in sorted(behaviors.items())
                                      if sid != s.id])
        final_services.append(ServiceSpec(
            id=s.id, name=s.name, category=s.category, keywords=s.keywords,
            code=s.code, behavior=s.behavior, natural_stage=s.natural_stage,
            zero_history=s.zero_history, misleading_docs=s.id in misleading,
            doc_summary=doc_summary, popular=s.id in reference_ids))

    tasks = []
    cohort_cycle = [1, 2, 3, 4, 5]
    for idx, (category, goal, dirty, categorical, target) in enumerate(_TASK_PLAN):
        negative = idx == NEGATIVE_CONTROL_INDEX
        if category == "classification":
            data = _classification_data(rng, dirty, categorical, target)
        elif category == "regression":
            data = _regression_data(rng, dirty, categorical, target)
        elif category == "clustering":
            data = _clustering_data(rng, categorical)
        elif category == "dim_reduction":
            data = _dim_reduction_data(rng)
        else:
            data = _eda_data(rng, rows_count=8 if negative else None)

        prof = profile(data, f"task-{idx:02d}.csv")
        if dirty:
            assert prof.quality.overall < 0.7, (idx, prof.quality)
        intent = parse_goal(goal, prof)
        stages = intent.required_stages
        reference = reference_for(stages, category)
        needs_cold = any(services_id in ZERO_HISTORY_IDS
                         for services_id in reference.values())
        tasks.append(BenchTask(
            id=f"task-{idx:02d}",
            category=category,
            goal=goal,
            dataset=data,
            cohort=cohort_cycle[idx % 5],
            reference_pipeline=reference,
            needs_cold=needs_cold,
            negative_control=negative,
        ))
    return Suite(seed=seed, services=final_services, tasks=tasks)


def suite_digest(suite: Suite) -> str:
    """Stable content hash over services and tasks."""
    payload = {
        "seed": suite.seed,
        "services": [
            {"id": s.id, "name": s.name, "category": s.category,
             "keywords": list(s.keywords),
             "code": hashlib.sha256(s.code).hexdigest(),
             "docs": s.user_description(),
             "zero_history": s.zero_history,
             "misleading": s.misleading_docs}
            for s in suite.services
        ],
        "tasks": [
            {"id": t.id, "category": t.category, "goal": t.goal,
             "dataset": hashlib.sha256(t.dataset).hexdigest(),
             "cohort": t.cohort, "reference": t.reference_pipeline,
             "needs_cold": t.needs_cold, "negative_control": t.negative_control}
            for t in suite.tasks
        ],
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def materialize_suite(suite: Suite, directory) -> Path:
    """Write the suite to disk for inspection: bundles, datasets, manifest."""
    directory = Path(directory)
    (directory / "services").mkdir(parents=True, exist_ok=True)
    (directory / "tasks").mkdir(parents=True, exist_ok=True)
    for s in suite.services:
        bundle = directory / "services" / s.id
        bundle.mkdir(exist_ok=True)
        manifest = {
            "id": s.id, "name": s.name, "category": s.category,
            "keywords": list(s.keywords), "user_description": s.user_description(),
            "python_version": "3.10", "created_at": FIXED_TS,
            "zero_history": s.zero_history, "misleading_docs": s.misleading_docs,
        }
        (bundle / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (bundle / "main.py").write_bytes(s.code)
        (bundle / "requirements.txt").write_bytes(REQUIREMENTS)
    for t in suite.tasks:
        (directory / "tasks" / f"{t.id}.csv").write_bytes(t.dataset)
    manifest = {
        "seed": suite.seed,
        "digest": suite_digest(suite),
        "tasks": [
            {"id": t.id, "category": t.category, "goal": t.goal,
             "cohort": t.cohort, "reference": t.reference_pipeline,
             "needs_cold": t.needs_cold, "negative_control": t.negative_control}
            for t in suite.tasks
        ],
    }
    (directory / "suite.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return directory
