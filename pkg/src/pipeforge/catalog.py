"""Microservice catalog: staged upload, validation, code-grounded analysis.

A submission moves staged -> validated -> analyzed -> indexed (or -> rejected
from the first two states). Validation runs four checks: source syntax,
dependency version pinning, size limits and a security pattern scan. Analysis
derives a semantic description, capabilities and I/O format tags from the
source code itself — the author's description is stored and displayed but
never trusted for retrieval. The composite text that gets embedded is built
exclusively from code-grounded fields plus author-chosen name/category/
keywords, which makes retrieval invariant to documentation quality.
"""

from __future__ import annotations

import io
import json
import re
import threading
import tokenize
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, List, Optional

from .errors import (
    EmptyField,
    IllegalStateTransition,
    IndexWriteFailed,
    ProviderMalformedOutput,
    ProviderUnavailable,
)

STATES = ("staged", "validated", "analyzed", "indexed", "rejected")

MAX_CODE_BYTES = 1 * 1024 * 1024
MAX_REQUIREMENTS_BYTES = 64 * 1024

# Exact version pins only: "name==1.2.3", optionally with extras. Comments and
# blank lines are allowed in the requirements file.
_PIN_RE = re.compile(
    r"^\s*[A-Za-z0-9][A-Za-z0-9._-]*(\[[A-Za-z0-9,._ -]+\])?==[A-Za-z0-9.+!*_-]+\s*(#.*)?$")

_PATTERNS_PATH = Path(__file__).parent / "data" / "security_patterns.json"


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class MicroserviceSubmission:
    name: str
    user_description: str
    python_version: str
    category: str
    keywords: tuple
    code: bytes
    requirements: bytes


@dataclass(frozen=True)
class SecurityFlag:
    pattern: str
    location: str
    severity: str


@dataclass(frozen=True)
class CodeAnalysis:
    semantic_description: str
    capabilities: tuple
    input_formats: tuple
    output_formats: tuple
    example_use_cases: tuple
    security_flags: tuple
    analyzer_id: str
    analyzed_at: str


@dataclass(frozen=True)
class Finding:
    check: str  # syntax | pinning | size | security
    level: str  # error | warning
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple

    @property
    def errors(self) -> tuple:
        return tuple(f for f in self.findings if f.level == "error")

    @property
    def passed(self) -> bool:
        return not self.errors


@dataclass
class Microservice:
    id: str
    submission: MicroserviceSubmission
    state: str
    created_at: str
    analysis: Optional[CodeAnalysis] = None
    composite_text: str = ""
    embedding_ref: Optional[str] = None
    validation: Optional[ValidationReport] = None

    def to_dict(self) -> dict:
        import base64
        return {
            "id": self.id,
            "state": self.state,
            "created_at": self.created_at,
            "composite_text": self.composite_text,
            "embedding_ref": self.embedding_ref,
            "submission": {
                "name": self.submission.name,
                "user_description": self.submission.user_description,
                "python_version": self.submission.python_version,
                "category": self.submission.category,
                "keywords": list(self.submission.keywords),
                "code_b64": base64.b64encode(self.submission.code).decode("ascii"),
                "requirements_b64": base64.b64encode(self.submission.requirements).decode("ascii"),
            },
            "analysis": None if self.analysis is None else {
                "semantic_description": self.analysis.semantic_description,
                "capabilities": list(self.analysis.capabilities),
                "input_formats": list(self.analysis.input_formats),
                "output_formats": list(self.analysis.output_formats),
                "example_use_cases": list(self.analysis.example_use_cases),
                "security_flags": [
                    {"pattern": f.pattern, "location": f.location, "severity": f.severity}
                    for f in self.analysis.security_flags],
                "analyzer_id": self.analysis.analyzer_id,
                "analyzed_at": self.analysis.analyzed_at,
            },
            "validation": None if self.validation is None else [
                {"check": f.check, "level": f.level, "message": f.message}
                for f in self.validation.findings],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Microservice":
        import base64
        sub = d["submission"]
        submission = MicroserviceSubmission(
            name=sub["name"],
            user_description=sub["user_description"],
            python_version=sub["python_version"],
            category=sub["category"],
            keywords=tuple(sub["keywords"]),
            code=base64.b64decode(sub["code_b64"]),
            requirements=base64.b64decode(sub["requirements_b64"]),
        )
        analysis = None
        if d.get("analysis"):
            a = d["analysis"]
            analysis = CodeAnalysis(
                semantic_description=a["semantic_description"],
                capabilities=tuple(a["capabilities"]),
                input_formats=tuple(a["input_formats"]),
                output_formats=tuple(a["output_formats"]),
                example_use_cases=tuple(a["example_use_cases"]),
                security_flags=tuple(
                    SecurityFlag(f["pattern"], f["location"], f["severity"])
                    for f in a["security_flags"]),
                analyzer_id=a["analyzer_id"],
                analyzed_at=a["analyzed_at"],
            )
        validation = None
        if d.get("validation") is not None:
            validation = ValidationReport(findings=tuple(
                Finding(f["check"], f["level"], f["message"]) for f in d["validation"]))
        return cls(
            id=d["id"],
            submission=submission,
            state=d["state"],
            created_at=d["created_at"],
            analysis=analysis,
            composite_text=d.get("composite_text", ""),
            embedding_ref=d.get("embedding_ref"),
            validation=validation,
        )


# ---------------------------------------------------------------------------
# Security pattern table
# ---------------------------------------------------------------------------

class SecurityPatternTable:
    def __init__(self, path: Path = _PATTERNS_PATH):
        raw = json.loads(path.read_text(encoding="utf-8"))
        self.patterns = [
            (p["id"], re.compile(p["regex"], re.MULTILINE), p["phase"],
             p["severity"], p["message"])
            for p in raw["patterns"]
        ]

    def scan(self, code: str, phase: str) -> List[SecurityFlag]:
        flags = []
        for pid, regex, p_phase, severity, message in self.patterns:
            if p_phase != phase:
                continue
            for match in regex.finditer(code):
                line = code.count("\n", 0, match.start()) + 1
                flags.append(SecurityFlag(pattern=pid, location=f"line {line}",
                                          severity=severity))
                break  # one flag per pattern is enough for the report
        return flags


_default_table = None


def security_table() -> SecurityPatternTable:
    global _default_table
    if _default_table is None:
        _default_table = SecurityPatternTable()
    return _default_table


# ---------------------------------------------------------------------------
# Syntax checking (pluggable)
# ---------------------------------------------------------------------------

class PythonTokenizeChecker:
    """Conservative tokenizer-level syntax check for Python sources.

    Tokenizing catches unterminated strings, bad indentation and stray bytes
    without tying validation to the host interpreter's exact grammar version.
    """

    checker_id = "python-tokenize/1"

    def check(self, code: bytes) -> Optional[str]:
        try:
            list(tokenize.tokenize(io.BytesIO(code).readline))
        except (tokenize.TokenError, IndentationError, SyntaxError, ValueError) as exc:
            return str(exc)
        return None


# ---------------------------------------------------------------------------
# Analysis providers
# ---------------------------------------------------------------------------

# Identifier / literal keywords mapped to capability tags. Scanned over code
# tokens, so they hold whether the author documented anything or not.
KEYWORD_CAPABILITIES = (
    (("impute", "imputation", "fillna", "missing"), "missing-value imputation"),
    (("outlier", "outliers"), "outlier removal"),
    (("clean", "cleaning", "dedup", "deduplicate", "duplicate", "duplicates"), "data cleaning"),
    (("scale", "scaler", "scaling", "normalize", "standardize"), "feature scaling"),
    (("encode", "encoder", "encoding", "onehot"), "categorical encoding"),
    (("feature", "features", "engineering"), "feature engineering"),
    (("train", "fit", "classifier", "regressor", "logistic"), "model training"),
    (("classification", "classify", "classifier"), "classification"),
    (("regression", "regressor", "forecast"), "regression"),
    (("predict", "prediction"), "prediction"),
    (("cluster", "clusters", "clustering", "kmeans", "centroid"), "clustering"),
    (("pca", "projection", "reduce"), "dimensionality reduction"),
    (("anomaly", "anomalies", "isolation", "zscore"), "anomaly detection"),
    (("evaluate", "evaluation", "accuracy", "rmse", "f1", "silhouette", "metric", "metrics"), "model evaluation"),
    (("report", "reports", "reporting", "summary", "summarize"), "reporting"),
    (("profile", "profiling", "describe"), "data profiling"),
    (("visualize", "plot", "chart", "histogram"), "visualization"),
    (("export", "exporter", "notify"), "utility"),
    (("memory_intensive", "high_memory"), "high-memory"),
    (("target", "label"), "requires-target"),
)

_FORMAT_INPUT_RE = {
    "csv": re.compile(r"read_csv|csv\.reader|csv\.DictReader|--input[^\n]*csv|input[_. ]csv", re.IGNORECASE),
    # json.load of the step-params file is calling-convention plumbing, not a
    # data input; require a non-params source.
    "json": re.compile(r"json\.loads?\((?!open\(args\.params\))|read_json", re.IGNORECASE),
}
_FORMAT_OUTPUT_RE = {
    "csv": re.compile(r"to_csv|csv\.writer|csv\.DictWriter|output[^\n]*\.csv", re.IGNORECASE),
    "json": re.compile(r"json\.dump\b|json\.dumps\b|to_json", re.IGNORECASE),
}
_FORMAT_GENERIC_RE = {
    "csv": re.compile(r"\.csv\b", re.IGNORECASE),
    "json": re.compile(r"\.json\b", re.IGNORECASE),
}


def _code_tokens(code: str) -> set:
    words = set()
    try:
        for tok in tokenize.generate_tokens(io.StringIO(code).readline):
            if tok.type == tokenize.NAME:
                words.add(tok.string.lower())
                words.update(part for part in tok.string.lower().split("_") if part)
            elif tok.type == tokenize.STRING:
                words.update(re.findall(r"[a-z0-9_]+", tok.string.lower()))
    except (tokenize.TokenError, IndentationError):
        words.update(re.findall(r"[a-z0-9_]+", code.lower()))
    return words


def _lead_docstring(code: str, scan_limit: int = 40) -> str:
    """First prose-like string literal's first line (docstrings qualify,
    short data literals are skipped)."""
    seen = 0
    try:
        for tok in tokenize.generate_tokens(io.StringIO(code).readline):
            if tok.type != tokenize.STRING:
                continue
            seen += 1
            if seen > scan_limit:
                break
            raw = tok.string.strip()
            raw = re.sub(r"^[rbuf]*['\"]{1,3}", "", raw, flags=re.IGNORECASE)
            raw = re.sub(r"['\"]{1,3}$", "", raw)
            line = raw.strip().splitlines()[0].strip() if raw.strip() else ""
            if len(line.split()) >= 4 and re.search(r"[a-zA-Z]{3,}", line):
                return line[:140]
    except (tokenize.TokenError, IndentationError):
        pass
    return ""


class StaticAnalyzer:
    """Deterministic code-grounded analysis: identifiers, calls and literals
    mapped through a keyword table into capabilities and I/O format tags."""

    provider_id = "static-analyzer/1"

    def __init__(self, clock: Callable[[], str] = _utc_now_iso):
        self._clock = clock

    def analyze(self, code_excerpt: str, submission: MicroserviceSubmission) -> CodeAnalysis:
        tokens = _code_tokens(code_excerpt)
        capabilities = []
        for keywords, capability in KEYWORD_CAPABILITIES:
            if any(kw in tokens for kw in keywords) and capability not in capabilities:
                capabilities.append(capability)

        input_formats = [fmt for fmt, rx in _FORMAT_INPUT_RE.items() if rx.search(code_excerpt)]
        output_formats = [fmt for fmt, rx in _FORMAT_OUTPUT_RE.items() if rx.search(code_excerpt)]
        for fmt, rx in _FORMAT_GENERIC_RE.items():
            if rx.search(code_excerpt):
                if fmt not in input_formats:
                    input_formats.append(fmt)
                if fmt not in output_formats:
                    output_formats.append(fmt)
        input_formats.sort()
        output_formats.sort()

        described = [c for c in capabilities if c not in ("requires-target", "high-memory")]
        lead = _lead_docstring(code_excerpt)
        if described:
            first = f"Performs {', '.join(described[:3])} on tabular data."
        else:
            first = "Performs a generic transformation on tabular data."
        if input_formats or output_formats:
            second = (f"Reads {'/'.join(input_formats) or 'unspecified'} input and "
                      f"writes {'/'.join(output_formats) or 'unspecified'} output.")
        else:
            second = "Input and output formats could not be inferred from the code."
        description = f"{lead} {first} {second}".strip()

        use_cases = tuple(
            f"Pipeline step for {cap}." for cap in described[:2]
        )
        return CodeAnalysis(
            semantic_description=description,
            capabilities=tuple(capabilities),
            input_formats=tuple(input_formats),
            output_formats=tuple(output_formats),
            example_use_cases=use_cases,
            security_flags=(),
            analyzer_id=self.provider_id,
            analyzed_at=self._clock(),
        )


class DocOnlyAnalyzer:
    """Documentation-based stand-in: trusts the author's description verbatim.

    Used by the bench harness to contrast code-grounded analysis against
    documentation-only discovery; never reads the source.
    """

    provider_id = "doc-only/1"

    def __init__(self, clock: Callable[[], str] = _utc_now_iso):
        self._clock = clock

    def analyze(self, code_excerpt: str, submission: MicroserviceSubmission) -> CodeAnalysis:
        text = submission.user_description.strip()
        words = set(re.findall(r"[a-z0-9_]+", text.lower()))
        capabilities = []
        for keywords, capability in KEYWORD_CAPABILITIES:
            if any(kw in words for kw in keywords) and capability not in capabilities:
                capabilities.append(capability)
        input_formats = tuple(
            fmt for fmt in ("csv", "json") if re.search(rf"\b{fmt}\b", text, re.IGNORECASE))
        return CodeAnalysis(
            semantic_description=text,
            capabilities=tuple(capabilities),
            input_formats=input_formats,
            output_formats=input_formats,
            example_use_cases=(),
            security_flags=(),
            analyzer_id=self.provider_id,
            analyzed_at=self._clock(),
        )


class RemoteAnalysisProvider:
    """Adapter for a hosted language-model analysis endpoint.

    Expects a JSON API that accepts {"code": ..., "metadata": ...} and returns
    the CodeAnalysis fields. Temperature is pinned at 0.3 so repeated analyses
    of the same source stay comparable.
    """

    def __init__(self, endpoint: str, api_key: str, model: str = "default",
                 timeout: float = 30.0, clock: Callable[[], str] = _utc_now_iso):
        self.endpoint = endpoint
        self.api_key = api_key
        self.model = model
        self.temperature = 0.3
        self.timeout = timeout
        self._clock = clock
        self.provider_id = f"remote/{model}"

    def analyze(self, code_excerpt: str, submission: MicroserviceSubmission) -> CodeAnalysis:
        import urllib.error
        import urllib.request

        payload = json.dumps({
            "model": self.model,
            "temperature": self.temperature,
            "code": code_excerpt,
            "metadata": {
                "name": submission.name,
                "category": submission.category,
                "keywords": list(submission.keywords),
            },
        }).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint, data=payload,
            headers={"Content-Type": "application/json",
                     "Authorization": f"Bearer {self.api_key}"})
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                body = resp.read().decode("utf-8")
        except (urllib.error.URLError, OSError) as exc:
            raise ProviderUnavailable(str(exc)) from exc
        try:
            data = json.loads(body)
            return CodeAnalysis(
                semantic_description=data["semantic_description"],
                capabilities=tuple(data["capabilities"]),
                input_formats=tuple(data["input_formats"]),
                output_formats=tuple(data["output_formats"]),
                example_use_cases=tuple(data.get("example_use_cases", ())),
                security_flags=(),
                analyzer_id=self.provider_id,
                analyzed_at=self._clock(),
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ProviderMalformedOutput(str(exc)) from exc


# ---------------------------------------------------------------------------
# Catalog store + lifecycle operations
# ---------------------------------------------------------------------------

class CatalogStore:
    """In-memory registry with atomic state transitions."""

    def __init__(self, clock: Callable[[], str] = _utc_now_iso):
        self._lock = threading.RLock()
        self._items: dict = {}
        self.clock = clock

    def add(self, ms: Microservice) -> None:
        with self._lock:
            self._items[ms.id] = ms

    def get(self, ms_id: str) -> Microservice:
        with self._lock:
            if ms_id not in self._items:
                raise KeyError(ms_id)
            return self._items[ms_id]

    def list(self, state: Optional[str] = None) -> List[Microservice]:
        with self._lock:
            items = sorted(self._items.values(), key=lambda m: m.id)
        if state is None:
            return items
        return [m for m in items if m.state == state]

    def indexed(self) -> List[Microservice]:
        return self.list(state="indexed")

    def transition(self, ms_id: str, from_state: str, to_state: str, **updates) -> Microservice:
        """Compare-and-swap state change; refuses to move backwards."""
        with self._lock:
            ms = self.get(ms_id)
            if ms.state != from_state:
                raise IllegalStateTransition(
                    f"{ms_id}: expected state {from_state}, found {ms.state}")
            if STATES.index(to_state) < STATES.index(from_state) and to_state != "rejected":
                raise IllegalStateTransition(f"{ms_id}: {from_state} -> {to_state}")
            for key, value in updates.items():
                setattr(ms, key, value)
            ms.state = to_state
            return ms


def stage(store: CatalogStore, sub: MicroserviceSubmission,
          ms_id: Optional[str] = None) -> Microservice:
    """Persist a submission in the staging area; invisible to recommendation."""
    if not sub.name.strip():
        raise EmptyField("submission name is empty")
    if not sub.code:
        raise EmptyField("submission code is empty")
    ms = Microservice(
        id=ms_id or uuid.uuid4().hex[:12],
        submission=sub,
        state="staged",
        created_at=store.clock(),
    )
    store.add(ms)
    return ms


def validate(store: CatalogStore, ms: Microservice,
             syntax_checker=None,
             table: Optional[SecurityPatternTable] = None) -> ValidationReport:
    """Run the four validation checks and commit validated/rejected."""
    if ms.state != "staged":
        raise IllegalStateTransition(f"{ms.id}: validate requires staged, found {ms.state}")
    checker = syntax_checker or PythonTokenizeChecker()
    table = table or security_table()
    findings: List[Finding] = []

    syntax_error = checker.check(ms.submission.code)
    if syntax_error:
        findings.append(Finding("syntax", "error", f"source does not tokenize: {syntax_error}"))

    req_text = ms.submission.requirements.decode("utf-8", errors="replace")
    for lineno, line in enumerate(req_text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if not _PIN_RE.match(line):
            findings.append(Finding(
                "pinning", "error",
                f"requirements line {lineno} is not an exact pin: {line.strip()!r}"))

    if len(ms.submission.code) > MAX_CODE_BYTES:
        findings.append(Finding("size", "error",
                                f"code exceeds {MAX_CODE_BYTES} bytes"))
    if len(ms.submission.requirements) > MAX_REQUIREMENTS_BYTES:
        findings.append(Finding("size", "error",
                                f"requirements exceed {MAX_REQUIREMENTS_BYTES} bytes"))

    code_text = ms.submission.code.decode("utf-8", errors="replace")
    for flag in table.scan(code_text, phase="validate"):
        findings.append(Finding("security", "error",
                                f"{flag.pattern} at {flag.location}"))

    report = ValidationReport(findings=tuple(findings))
    target = "validated" if report.passed else "rejected"
    store.transition(ms.id, "staged", target, validation=report)
    return report


def analysis_excerpt(code: str, limit: int = 10_000) -> str:
    """First min(len, limit) characters, never below min(len, 3000)."""
    limit = max(min(len(code), 3_000), min(limit, 10_000))
    return code[:limit]


def analyze(store: CatalogStore, ms: Microservice, provider=None,
            fallback: Optional[StaticAnalyzer] = None,
            table: Optional[SecurityPatternTable] = None) -> CodeAnalysis:
    """Produce a CodeAnalysis via the provider, with deterministic fallback.

    ProviderUnavailable falls straight back; ProviderMalformedOutput earns one
    retry before falling back. The security scan runs locally either way and
    is merged into the returned analysis.
    """
    if ms.state != "validated":
        raise IllegalStateTransition(f"{ms.id}: analyze requires validated, found {ms.state}")
    fallback = fallback or StaticAnalyzer(clock=store.clock)
    provider = provider or fallback
    code_text = ms.submission.code.decode("utf-8", errors="replace")
    excerpt = analysis_excerpt(code_text)

    analysis = None
    try:
        analysis = provider.analyze(excerpt, ms.submission)
    except ProviderUnavailable:
        analysis = fallback.analyze(excerpt, ms.submission)
    except ProviderMalformedOutput:
        try:
            analysis = provider.analyze(excerpt, ms.submission)
        except (ProviderMalformedOutput, ProviderUnavailable):
            analysis = fallback.analyze(excerpt, ms.submission)

    table = table or security_table()
    flags = tuple(table.scan(code_text, phase="analyze"))
    analysis = replace(analysis, security_flags=flags)
    store.transition(ms.id, "validated", "analyzed", analysis=analysis)
    return analysis


def build_composite_text(ms: Microservice) -> str:
    """Fixed-order concatenation: name, derived description, category,
    capabilities, keywords. The author's free-form description is excluded so
    retrieval stays invariant to documentation quality."""
    if ms.analysis is None:
        raise IllegalStateTransition(f"{ms.id}: composite text requires an analysis")
    parts = [
        ms.submission.name,
        ms.analysis.semantic_description,
        ms.submission.category,
        ", ".join(ms.analysis.capabilities),
        ", ".join(ms.submission.keywords),
    ]
    return "\n".join(p for p in parts if p)


def publish(store: CatalogStore, ms: Microservice, index) -> Microservice:
    """Embed the composite text, register it in the index, mark indexed."""
    if ms.state == "indexed":
        return ms  # idempotent
    if ms.state != "analyzed":
        raise IllegalStateTransition(f"{ms.id}: publish requires analyzed, found {ms.state}")
    composite = build_composite_text(ms)
    try:
        index.upsert(ms.id, composite)
    except Exception as exc:  # state stays analyzed; caller may retry
        raise IndexWriteFailed(str(exc)) from exc
    return store.transition(ms.id, "analyzed", "indexed",
                            composite_text=composite, embedding_ref=ms.id)


def reanalyze(store: CatalogStore, ms: Microservice, index, provider=None) -> Microservice:
    """Administrative re-analysis of an indexed microservice (e.g. after a
    provider upgrade); refreshes analysis, composite text and embedding."""
    if ms.state != "indexed":
        raise IllegalStateTransition(f"{ms.id}: reanalyze requires indexed, found {ms.state}")
    with store._lock:
        ms.state = "validated"
    analyze(store, ms, provider=provider)
    return publish(store, ms, index)


# ---------------------------------------------------------------------------
# Bundle-on-disk format
# ---------------------------------------------------------------------------

def save_bundle(ms: Microservice, directory) -> Path:
    """Write the upload bundle: manifest.json + main.py + requirements.txt."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "id": ms.id,
        "name": ms.submission.name,
        "user_description": ms.submission.user_description,
        "python_version": ms.submission.python_version,
        "category": ms.submission.category,
        "keywords": list(ms.submission.keywords),
        "created_at": ms.created_at,
    }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (directory / "main.py").write_bytes(ms.submission.code)
    (directory / "requirements.txt").write_bytes(ms.submission.requirements)
    return directory


def load_bundle(directory) -> tuple:
    """Read a bundle directory back to (id, MicroserviceSubmission, created_at)."""
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    sub = MicroserviceSubmission(
        name=manifest["name"],
        user_description=manifest["user_description"],
        python_version=manifest["python_version"],
        category=manifest["category"],
        keywords=tuple(manifest["keywords"]),
        code=(directory / "main.py").read_bytes(),
        requirements=(directory / "requirements.txt").read_bytes(),
    )
    return manifest["id"], sub, manifest.get("created_at", "")
