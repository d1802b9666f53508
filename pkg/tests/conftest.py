"""Shared fixture helpers: synthetic catalogs, services and profiles."""

import pytest

from pipeforge.catalog import CatalogStore, CodeAnalysis, Microservice, MicroserviceSubmission, publish
from pipeforge.patterns import PatternStore
from pipeforge.profiler import profile
from pipeforge.recommender import Recommender
from pipeforge.semindex import VectorIndex

FIXED_TS = "2024-01-01T00:00:00Z"


def make_service(ms_id, name, description, capabilities=(), input_formats=("csv",),
                 output_formats=("csv",), category="preprocessing", keywords=(),
                 code=b"x = 1\n"):
    """Construct an analyzed microservice directly (no provider round-trip)."""
    sub = MicroserviceSubmission(
        name=name, user_description=f"user docs for {name}", python_version="3.10",
        category=category, keywords=tuple(keywords), code=code,
        requirements=b"# none\n")
    analysis = CodeAnalysis(
        semantic_description=description, capabilities=tuple(capabilities),
        input_formats=tuple(input_formats), output_formats=tuple(output_formats),
        example_use_cases=(), security_flags=(), analyzer_id="static-analyzer/1",
        analyzed_at=FIXED_TS)
    return Microservice(id=ms_id, submission=sub, state="analyzed",
                        created_at=FIXED_TS, analysis=analysis)


def publish_services(services):
    """Index a list of analyzed services; returns (catalog, index)."""
    store = CatalogStore(clock=lambda: FIXED_TS)
    index = VectorIndex()
    for ms in services:
        store.add(ms)
        publish(store, ms, index)
    return store, index


@pytest.fixture
def churn_profile():
    body = "\n".join(
        f"{30 + i % 40},{50000 + 173 * (i % 37)},{'basic' if i % 3 else 'plus'},{i % 2}"
        for i in range(120))
    return profile(f"age,income,plan,churn\n{body}\n".encode(), "churn.csv")


def make_recommender(services, weights=(0.3, 0.3, 0.2, 0.2), patterns=None):
    store, index = publish_services(services)
    patterns = patterns or PatternStore()
    return Recommender(store, index, patterns, weights=weights), store, index, patterns
