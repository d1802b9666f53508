"""Dataset profiler: ingest a tabular file and emit a deterministic profile.

The profile bundles schema (storage + semantic types), per-column summary
statistics, a three-axis quality score combined by a weighted harmonic mean,
a Pearson correlation matrix over numeric columns, and a ranked list of
target-column candidates. The whole thing is a pure function of the input
bytes: identical bytes always produce byte-identical profile JSON.

Supported inputs: CSV (RFC 4180 plus sniffed delimiter variants), TSV and
JSON array-of-records. Datetime parsing covers ISO-8601 and a small fixed
format list; anything fancier stays text.
"""

from __future__ import annotations

import csv
import io
import json
import re
import statistics
from dataclasses import dataclass, field
from datetime import datetime, date
from typing import Optional

from .errors import DuplicateColumnName, EmptyDataset, UnparseableFormat

PROFILE_VERSION = "1"

STORAGE_TYPES = ("integer", "float", "text", "boolean", "datetime")
SEMANTIC_TYPES = (
    "numeric", "categorical", "identifier", "email", "geo_code",
    "datetime", "free_text", "unknown",
)
FORMATS = ("csv", "tsv", "json_records")

# Values treated as nulls when parsing delimited text.
NULL_MARKERS = frozenset({"", "na", "n/a", "null", "nan", "none"})

EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")

# ISO-3166 alpha-2 and alpha-3 codes (uppercase), used for geo_code detection.
_ALPHA2 = (
    "AD AE AF AG AI AL AM AO AQ AR AS AT AU AW AX AZ BA BB BD BE BF BG BH BI "
    "BJ BL BM BN BO BQ BR BS BT BV BW BY BZ CA CC CD CF CG CH CI CK CL CM CN "
    "CO CR CU CV CW CX CY CZ DE DJ DK DM DO DZ EC EE EG EH ER ES ET FI FJ FK "
    "FM FO FR GA GB GD GE GF GG GH GI GL GM GN GP GQ GR GS GT GU GW GY HK HM "
    "HN HR HT HU ID IE IL IM IN IO IQ IR IS IT JE JM JO JP KE KG KH KI KM KN "
    "KP KR KW KY KZ LA LB LC LI LK LR LS LT LU LV LY MA MC MD ME MF MG MH MK "
    "ML MM MN MO MP MQ MR MS MT MU MV MW MX MY MZ NA NC NE NF NG NI NL NO NP "
    "NR NU NZ OM PA PE PF PG PH PK PL PM PN PR PS PT PW PY QA RE RO RS RU RW "
    "SA SB SC SD SE SG SH SI SJ SK SL SM SN SO SR SS ST SV SX SY SZ TC TD TF "
    "TG TH TJ TK TL TM TN TO TR TT TV TW TZ UA UG UM US UY UZ VA VC VE VG VI "
    "VN VU WF WS YE YT ZA ZM ZW"
)
_ALPHA3 = (
    "AND ARE AFG ATG AIA ALB ARM AGO ATA ARG ASM AUT AUS ABW ALA AZE BIH BRB "
    "BGD BEL BFA BGR BHR BDI BEN BLM BMU BRN BOL BES BRA BHS BTN BVT BWA BLR "
    "BLZ CAN CCK COD CAF COG CHE CIV COK CHL CMR CHN COL CRI CUB CPV CUW CXR "
    "CYP CZE DEU DJI DNK DMA DOM DZA ECU EST EGY ESH ERI ESP ETH FIN FJI FLK "
    "FSM FRO FRA GAB GBR GRD GEO GUF GGY GHA GIB GRL GMB GIN GLP GNQ GRC SGS "
    "GTM GUM GNB GUY HKG HMD HND HRV HTI HUN IDN IRL ISR IMN IND IOT IRQ IRN "
    "ISL ITA JEY JAM JOR JPN KEN KGZ KHM KIR COM KNA PRK KOR KWT CYM KAZ LAO "
    "LBN LCA LIE LKA LBR LSO LTU LUX LVA LBY MAR MCO MDA MNE MAF MDG MHL MKD "
    "MLI MMR MNG MAC MNP MTQ MRT MSR MLT MUS MDV MWI MEX MYS MOZ NAM NCL NER "
    "NFK NGA NIC NLD NOR NPL NRU NIU NZL OMN PAN PER PYF PNG PHL PAK POL SPM "
    "PCN PRI PSE PRT PLW PRY QAT REU ROU SRB RUS RWA SAU SLB SYC SDN SWE SGP "
    "SHN SVN SJM SVK SLE SMR SEN SOM SUR SSD STP SLV SXM SYR SWZ TCA TCD ATF "
    "TGO THA TJK TKL TLS TKM TUN TON TUR TTO TUV TWN TZA UKR UGA UMI USA URY "
    "UZB VAT VCT VEN VGB VIR VNM VUT WLF WSM YEM MYT ZAF ZMB ZWE"
)
GEO_CODES = frozenset(_ALPHA2.split()) | frozenset(_ALPHA3.split())

# Keywords for the target-name signal. Exact match scores 1.0; a substring
# match scores 0.6 except for "y", which is too short to be meaningful as a
# substring and only matches exactly.
TARGET_KEYWORDS = ("target", "label", "class", "outcome", "churn")
TARGET_KEYWORDS_EXACT_ONLY = ("y",)

_DATETIME_FORMATS = (
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d",
    "%Y/%m/%d",
    "%d/%m/%Y",
    "%m/%d/%Y",
)


@dataclass(frozen=True)
class ProfilerConfig:
    """Tunable weights and thresholds for profiling heuristics."""

    target_lambdas: tuple = (0.5, 0.3, 0.2)  # name, distribution, temporal
    quality_weights: tuple = (1 / 3, 1 / 3, 1 / 3)  # completeness, consistency, uniqueness
    consistency_iqr_multiplier: float = 3.0
    identifier_cardinality_ratio: float = 0.95
    categorical_max_cardinality: int = 20


@dataclass(frozen=True)
class Column:
    """One parsed column: name plus typed values (None marks a null)."""

    name: str
    values: tuple
    storage_type: str


@dataclass(frozen=True)
class Dataset:
    rows: int
    columns: tuple
    source_name: str
    byte_size: int
    format: str

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    storage_type: str
    semantic_type: str
    position: int


@dataclass(frozen=True)
class ColumnStats:
    mean: Optional[float]
    std: Optional[float]
    min: Optional[float]
    max: Optional[float]
    cardinality: int
    null_fraction: float


@dataclass(frozen=True)
class QualityScore:
    completeness: float
    consistency: float
    uniqueness: float
    overall: float
    weights: tuple


@dataclass(frozen=True)
class TargetCandidate:
    column: str
    score: float
    name_signal: float
    distribution_signal: float
    temporal_signal: float


@dataclass
class DataProfile:
    schema: list
    stats: dict
    quality: QualityScore
    correlations: dict
    target_candidates: list
    best_target: Optional[str]
    row_count: int
    column_count: int
    format: str
    source_name: str = ""

    def to_dict(self) -> dict:
        return {
            "profile_version": PROFILE_VERSION,
            "source_name": self.source_name,
            "format": self.format,
            "row_count": self.row_count,
            "column_count": self.column_count,
            "schema": [
                {
                    "name": s.name,
                    "storage_type": s.storage_type,
                    "semantic_type": s.semantic_type,
                    "position": s.position,
                }
                for s in self.schema
            ],
            "stats": {
                name: {
                    "mean": st.mean,
                    "std": st.std,
                    "min": st.min,
                    "max": st.max,
                    "cardinality": st.cardinality,
                    "null_fraction": st.null_fraction,
                }
                for name, st in self.stats.items()
            },
            "quality": {
                "completeness": self.quality.completeness,
                "consistency": self.quality.consistency,
                "uniqueness": self.quality.uniqueness,
                "overall": self.quality.overall,
                "weights": list(self.quality.weights),
            },
            "correlations": self.correlations,
            "target_candidates": [
                {
                    "column": t.column,
                    "score": t.score,
                    "name_signal": t.name_signal,
                    "distribution_signal": t.distribution_signal,
                    "temporal_signal": t.temporal_signal,
                }
                for t in self.target_candidates
            ],
            "best_target": self.best_target,
        }

    def to_json(self) -> str:
        """Canonical serialization: sorted keys, shortest-round-trip floats, LF."""
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False,
                          separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "DataProfile":
        return cls(
            schema=[ColumnSchema(s["name"], s["storage_type"], s["semantic_type"], s["position"])
                    for s in d["schema"]],
            stats={name: ColumnStats(st["mean"], st["std"], st["min"], st["max"],
                                     st["cardinality"], st["null_fraction"])
                   for name, st in d["stats"].items()},
            quality=QualityScore(
                d["quality"]["completeness"], d["quality"]["consistency"],
                d["quality"]["uniqueness"], d["quality"]["overall"],
                tuple(d["quality"]["weights"]),
            ),
            correlations=d["correlations"],
            target_candidates=[
                TargetCandidate(t["column"], t["score"], t["name_signal"],
                                t["distribution_signal"], t["temporal_signal"])
                for t in d["target_candidates"]
            ],
            best_target=d["best_target"],
            row_count=d["row_count"],
            column_count=d["column_count"],
            format=d["format"],
            source_name=d.get("source_name", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "DataProfile":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

_DELIMITER_PRIORITY = (",", "\t", ";", "|")


def sniff_delimiter(text: str, max_lines: int = 50) -> Optional[str]:
    """Pick the delimiter that yields a consistent multi-field parse.

    A candidate qualifies when csv.reader splits every sampled line into the
    same number of fields (> 1). The qualifying candidate with the most fields
    wins; ties fall back to the priority order comma, tab, semicolon, pipe.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()][:max_lines]
    if not lines:
        return None
    best = None
    best_fields = 1
    for cand in _DELIMITER_PRIORITY:
        try:
            counts = [len(row) for row in csv.reader(lines, delimiter=cand)]
        except csv.Error:
            continue
        if len(counts) != len(lines):
            continue
        if len(set(counts)) == 1 and counts[0] > best_fields:
            best = cand
            best_fields = counts[0]
    return best


def _parse_datetime(raw: str):
    s = raw.strip()
    if not s:
        return None
    try:
        return datetime.fromisoformat(s.replace("Z", "+00:00"))
    except ValueError:
        pass
    for fmt in _DATETIME_FORMATS:
        try:
            return datetime.strptime(s, fmt)
        except ValueError:
            continue
    return None


def _type_text_column(raw_values: list) -> Column:
    """Decide a storage type for one column of raw strings and coerce values."""
    non_null = [v for v in raw_values if v is not None]
    if not non_null:
        return ("text", [None] * len(raw_values))

    def all_match(pred) -> bool:
        return all(pred(v) for v in non_null)

    def is_int(v: str) -> bool:
        try:
            int(v)
            return True
        except ValueError:
            return False

    def is_float(v: str) -> bool:
        try:
            f = float(v)
        except ValueError:
            return False
        return f == f and abs(f) != float("inf")  # exclude nan/inf spellings

    if all_match(lambda v: v.lower() in ("true", "false")):
        return ("boolean", [None if v is None else v.lower() == "true" for v in raw_values])
    if all_match(is_int):
        return ("integer", [None if v is None else int(v) for v in raw_values])
    if all_match(is_float):
        return ("float", [None if v is None else float(v) for v in raw_values])
    if all_match(lambda v: _parse_datetime(v) is not None):
        return ("datetime", [None if v is None else _parse_datetime(v) for v in raw_values])
    return ("text", [None if v is None else str(v) for v in raw_values])


def _columns_from_text_rows(header: list, rows: list) -> list:
    n = len(header)
    columns = []
    for i, name in enumerate(header):
        raw = []
        for row in rows:
            cell = row[i] if i < len(row) else None
            if cell is not None and cell.strip().lower() in NULL_MARKERS:
                cell = None
            raw.append(cell)
        storage, values = _type_text_column(raw)
        columns.append(Column(name=name, values=tuple(values), storage_type=storage))
    assert len(columns) == n
    return columns


def _columns_from_records(records: list) -> list:
    names: list = []
    for rec in records:
        for k in rec:
            if k not in names:
                names.append(k)
    columns = []
    for name in names:
        vals = [rec.get(name) for rec in records]
        non_null = [v for v in vals if v is not None]
        if non_null and all(isinstance(v, bool) for v in non_null):
            storage = "boolean"
        elif non_null and all(isinstance(v, int) and not isinstance(v, bool) for v in non_null):
            storage = "integer"
        elif non_null and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in non_null):
            storage = "float"
            vals = [None if v is None else float(v) for v in vals]
        elif non_null and all(isinstance(v, str) for v in non_null):
            storage, vals = _type_text_column([None if v is None else v for v in vals])
        else:
            storage = "text"
            vals = [None if v is None else str(v) for v in vals]
        columns.append(Column(name=name, values=tuple(vals), storage_type=storage))
    return columns


def _normalize_header(header: list) -> list:
    names = []
    for i, cell in enumerate(header):
        name = (cell or "").strip()
        names.append(name if name else f"column_{i + 1}")
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateColumnName(f"duplicate column name: {name!r}")
        seen.add(name)
    return names


def ingest(data: bytes, name: str) -> Dataset:
    """Parse raw bytes into a typed Dataset, detecting the format.

    The file extension is a hint; content inspection decides. A leading '['
    means JSON array-of-records; otherwise the delimiter is sniffed and the
    input parsed as a delimited table with a required header row.
    """
    if not data or not data.strip():
        raise EmptyDataset(f"{name}: empty input")
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise UnparseableFormat(f"{name}: not valid UTF-8") from exc

    stripped = text.lstrip()
    looks_json = stripped.startswith("[") or name.lower().endswith(".json")
    if looks_json:
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UnparseableFormat(f"{name}: invalid JSON: {exc}") from exc
        if not isinstance(records, list) or not all(isinstance(r, dict) for r in records):
            raise UnparseableFormat(f"{name}: JSON input must be an array of objects")
        if not records:
            raise EmptyDataset(f"{name}: zero records")
        columns = _columns_from_records(records)
        if not columns:
            raise EmptyDataset(f"{name}: records carry no fields")
        return Dataset(rows=len(records), columns=tuple(columns), source_name=name,
                       byte_size=len(data), format="json_records")

    delimiter = sniff_delimiter(text)
    if delimiter is None:
        # Single-column table: every line is one field.
        delimiter = ","
        if any(ch in text for ch in "\x00"):
            raise UnparseableFormat(f"{name}: no dialect matches")
    parsed = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    parsed = [row for row in parsed if any(cell.strip() for cell in row)]
    if not parsed:
        raise EmptyDataset(f"{name}: no rows")
    header = _normalize_header(parsed[0])
    body = parsed[1:]
    if not body:
        raise EmptyDataset(f"{name}: header only, zero data rows")
    for row in body:
        if len(row) > len(header):
            raise UnparseableFormat(
                f"{name}: row has {len(row)} fields, header has {len(header)}")
    columns = _columns_from_text_rows(header, body)
    fmt = "tsv" if delimiter == "\t" else "csv"
    return Dataset(rows=len(body), columns=tuple(columns), source_name=name,
                   byte_size=len(data), format=fmt)


# ---------------------------------------------------------------------------
# Schema inference
# ---------------------------------------------------------------------------

def _fraction_matching(values: list, pred) -> float:
    non_null = [v for v in values if v is not None]
    if not non_null:
        return 0.0
    return sum(1 for v in non_null if pred(v)) / len(non_null)


def infer_schema(dataset: Dataset, config: ProfilerConfig = ProfilerConfig()) -> list:
    """Assign semantic types with a fixed rule priority; first match wins.

    Priority: email > geo_code > datetime > identifier > numeric > categorical
    > free_text. Email and geo checks apply to text columns; the identifier
    check applies to integer columns and to token-like text columns (no
    whitespace) with near-unique values, so unique free prose stays free_text.
    """
    token_re = re.compile(r"^[A-Za-z0-9_.:-]+$")
    schema = []
    for pos, col in enumerate(dataset.columns):
        storage = col.storage_type
        non_null = [v for v in col.values if v is not None]
        cardinality = len(set(non_null))
        card_ratio = cardinality / len(non_null) if non_null else 0.0
        token_like = storage == "integer" or (
            storage == "text" and all(token_re.match(v) for v in non_null))

        semantic = "unknown"
        if not non_null:
            semantic = "unknown"
        elif storage == "text" and _fraction_matching(col.values, lambda v: bool(EMAIL_RE.match(v))) >= 0.9:
            semantic = "email"
        elif storage == "text" and _fraction_matching(col.values, lambda v: v.strip().upper() in GEO_CODES) >= 0.9:
            semantic = "geo_code"
        elif storage == "datetime":
            semantic = "datetime"
        elif token_like and card_ratio > config.identifier_cardinality_ratio:
            semantic = "identifier"
        elif storage in ("integer", "float"):
            semantic = "numeric"
        elif cardinality <= config.categorical_max_cardinality:
            semantic = "categorical"
        elif storage == "text":
            semantic = "free_text"
        schema.append(ColumnSchema(name=col.name, storage_type=storage,
                                   semantic_type=semantic, position=pos))
    return schema


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

def compute_stats(dataset: Dataset) -> dict:
    """Per-column summary stats; moments only for numeric storage types."""
    out = {}
    for col in dataset.columns:
        non_null = [v for v in col.values if v is not None]
        nulls = len(col.values) - len(non_null)
        cardinality = len(set(non_null))
        null_fraction = nulls / len(col.values) if col.values else 0.0
        mean = std = mn = mx = None
        if col.storage_type in ("integer", "float") and non_null:
            nums = [float(v) for v in non_null]
            mean = float(statistics.fmean(nums))
            std = float(statistics.stdev(nums)) if len(nums) >= 2 else None
            mn = float(min(nums))
            mx = float(max(nums))
        out[col.name] = ColumnStats(mean=mean, std=std, min=mn, max=mx,
                                    cardinality=cardinality, null_fraction=null_fraction)
    return out


def harmonic_mean(values, weights) -> float:
    """Weighted harmonic mean; zero in any component annihilates the result."""
    if any(v == 0 for v in values):
        return 0.0
    total_w = sum(weights)
    return total_w / sum(w / v for v, w in zip(values, weights))


def assess_quality(dataset: Dataset, config: ProfilerConfig = ProfilerConfig()) -> QualityScore:
    """Completeness, consistency and uniqueness combined harmonically.

    Consistency counts numeric values inside [Q1 - k*IQR, Q3 + k*IQR] per
    column (inclusive quartiles); columns with fewer than 4 numeric values
    contribute all values as consistent.
    """
    total_cells = dataset.rows * len(dataset.columns)
    non_null_cells = sum(
        sum(1 for v in col.values if v is not None) for col in dataset.columns)
    completeness = non_null_cells / total_cells if total_cells else 0.0

    row_tuples = set()
    for i in range(dataset.rows):
        row_tuples.add(tuple(col.values[i] for col in dataset.columns))
    uniqueness = len(row_tuples) / dataset.rows if dataset.rows else 0.0

    numeric_total = 0
    numeric_ok = 0
    for col in dataset.columns:
        if col.storage_type not in ("integer", "float"):
            continue
        nums = [float(v) for v in col.values if v is not None]
        if not nums:
            continue
        numeric_total += len(nums)
        if len(nums) < 4:
            numeric_ok += len(nums)
            continue
        q1, _, q3 = statistics.quantiles(nums, n=4, method="inclusive")
        iqr = q3 - q1
        lo = q1 - config.consistency_iqr_multiplier * iqr
        hi = q3 + config.consistency_iqr_multiplier * iqr
        numeric_ok += sum(1 for v in nums if lo <= v <= hi)
    consistency = numeric_ok / numeric_total if numeric_total else 1.0

    overall = harmonic_mean(
        (completeness, consistency, uniqueness), config.quality_weights)
    return QualityScore(completeness=completeness, consistency=consistency,
                        uniqueness=uniqueness, overall=overall,
                        weights=tuple(config.quality_weights))


def compute_correlations(dataset: Dataset) -> dict:
    """Pearson correlation per numeric column pair over pairwise-complete rows.

    Pairs with fewer than 3 complete rows or zero variance are omitted, which
    keeps the matrix JSON free of NaN. Returned as a symmetric nested mapping
    with a unit diagonal.
    """
    numeric = [c for c in dataset.columns if c.storage_type in ("integer", "float")]
    out: dict = {}
    if len(numeric) < 2:
        return out

    def put(a: str, b: str, value: float) -> None:
        out.setdefault(a, {})[b] = value

    for i, ci in enumerate(numeric):
        for cj in numeric[i:]:
            pairs = [
                (float(a), float(b))
                for a, b in zip(ci.values, cj.values)
                if a is not None and b is not None
            ]
            if len(pairs) < 3:
                continue
            xs = [p[0] for p in pairs]
            ys = [p[1] for p in pairs]
            if len(set(xs)) < 2 or len(set(ys)) < 2:
                continue
            if ci.name == cj.name:
                put(ci.name, ci.name, 1.0)
                continue
            rho = statistics.correlation(xs, ys)
            put(ci.name, cj.name, rho)
            put(cj.name, ci.name, rho)
    return out


# ---------------------------------------------------------------------------
# Target detection
# ---------------------------------------------------------------------------

def _name_signal(name: str) -> float:
    lowered = name.strip().lower()
    if lowered in TARGET_KEYWORDS or lowered in TARGET_KEYWORDS_EXACT_ONLY:
        return 1.0
    if any(kw in lowered for kw in TARGET_KEYWORDS):
        return 0.6
    return 0.0


def _distribution_signal(schema: ColumnSchema, stats: ColumnStats,
                         config: ProfilerConfig) -> float:
    if stats.cardinality == 2:
        return 1.0
    low_card = stats.cardinality <= config.categorical_max_cardinality
    if schema.semantic_type == "categorical" or (schema.semantic_type == "numeric" and low_card):
        return 0.8
    if schema.semantic_type == "numeric":
        return 0.6
    return 0.0


def detect_target(dataset: Dataset, schema: list, stats: dict,
                  config: ProfilerConfig = ProfilerConfig()):
    """Score every non-identifier column as a prediction-target candidate.

    score = l1*name + l2*distribution + l3*temporal. The temporal signal fires
    only for the last column when some other column is a datetime. Returns the
    candidates ranked by descending score (ties broken by column name) and the
    best target, absent when every score is zero.
    """
    l1, l2, l3 = config.target_lambdas
    datetime_positions = {s.position for s in schema if s.semantic_type == "datetime"}
    last_position = len(schema) - 1
    candidates = []
    for col_schema in schema:
        if col_schema.semantic_type == "identifier":
            continue
        st = stats[col_schema.name]
        name_sig = _name_signal(col_schema.name)
        dist_sig = _distribution_signal(col_schema, st, config)
        temporal_sig = 1.0 if (
            col_schema.position == last_position
            and bool(datetime_positions - {col_schema.position})
        ) else 0.0
        score = l1 * name_sig + l2 * dist_sig + l3 * temporal_sig
        candidates.append(TargetCandidate(
            column=col_schema.name, score=score, name_signal=name_sig,
            distribution_signal=dist_sig, temporal_signal=temporal_sig))
    candidates.sort(key=lambda c: (-c.score, c.column))
    best = candidates[0].column if candidates and candidates[0].score > 0 else None
    return candidates, best


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def profile(data: bytes, name: str, config: ProfilerConfig = ProfilerConfig()) -> DataProfile:
    """Full pipeline: ingest, type, summarize, score quality, rank targets."""
    dataset = ingest(data, name)
    schema = infer_schema(dataset, config)
    stats = compute_stats(dataset)
    quality = assess_quality(dataset, config)
    correlations = compute_correlations(dataset)
    candidates, best = detect_target(dataset, schema, stats, config)
    return DataProfile(
        schema=schema,
        stats=stats,
        quality=quality,
        correlations=correlations,
        target_candidates=candidates,
        best_target=best,
        row_count=dataset.rows,
        column_count=len(dataset.columns),
        format=dataset.format,
        source_name=name,
    )
