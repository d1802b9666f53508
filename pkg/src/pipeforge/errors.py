"""Shared exception hierarchy.

Every module raises subclasses of PipeforgeError so callers (gateway, CLI,
bench harness) can attribute a failure to the stage that produced it.
"""

from __future__ import annotations


class PipeforgeError(Exception):
    """Base class for all engine errors."""

    agent = "engine"


# --- profiler ---------------------------------------------------------------

class ProfilerError(PipeforgeError):
    agent = "profiler"


class UnparseableFormat(ProfilerError):
    """No known dialect (csv/tsv/json records) matches the input bytes."""


class EmptyDataset(ProfilerError):
    """Input parsed but contains zero rows or zero columns."""


class DuplicateColumnName(ProfilerError):
    """Header contains the same column name twice."""


# --- catalog ----------------------------------------------------------------

class CatalogError(PipeforgeError):
    agent = "catalog"


class EmptyField(CatalogError):
    """A required submission field (name, code) is empty."""


class IllegalStateTransition(CatalogError):
    """Lifecycle moved backwards or out of an allowed edge."""


class ProviderUnavailable(CatalogError):
    """A remote analysis/intent/param provider could not be reached."""


class ProviderMalformedOutput(CatalogError):
    """Provider returned output that does not parse against its schema."""


class IndexWriteFailed(CatalogError):
    """Vector index rejected a write; catalog state left unchanged."""


# --- semindex ---------------------------------------------------------------

class SemIndexError(PipeforgeError):
    agent = "semindex"


class EmptyText(SemIndexError):
    """Text is empty after whitespace normalization."""


class DimensionMismatch(SemIndexError):
    """Two embeddings with different dimensions were compared."""


class ZeroVector(SemIndexError):
    """Cosine similarity is undefined for a zero-length vector."""


# --- intent -----------------------------------------------------------------

class IntentError(PipeforgeError):
    agent = "intent"


class UnsupportedGoal(IntentError):
    """No supported task type scores above the provider's confidence floor."""


# --- recommender ------------------------------------------------------------

class RecommenderError(PipeforgeError):
    agent = "recommender"


class EmptyCatalog(RecommenderError):
    """Recommendation requested but no microservice is indexed."""


# --- builder ----------------------------------------------------------------

class BuilderError(PipeforgeError):
    agent = "builder"


class MissingCandidates(BuilderError):
    """A required stage has no recommendation candidates."""


class InvalidChoice(BuilderError):
    """Interactive choice names a microservice absent from the stage's candidates."""


class IncompleteSelection(BuilderError):
    """Selection does not cover every required stage."""


# --- executor ---------------------------------------------------------------

class ExecutorError(PipeforgeError):
    agent = "executor"


class WorkspaceCreationFailed(ExecutorError):
    """Could not create the isolated workspace directory."""


# --- bench ------------------------------------------------------------------

class BenchError(PipeforgeError):
    agent = "bench"


class UnknownProtocol(BenchError):
    """Protocol name is not one of the supported evaluation protocols."""
