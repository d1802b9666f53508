"""Desk-scale evaluation harness: synthetic suite, protocols, reports."""

from .protocols import BENCH_CONFIGS, BenchConfig, BenchReport, run_protocol  # noqa: F401
from .suite import BenchTask, generate_suite, materialize_suite, suite_digest  # noqa: F401
