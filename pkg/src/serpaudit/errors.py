"""Exception hierarchy for the audit harness.

Everything raised on purpose derives from SerpAuditError so callers can
catch harness failures without swallowing programming errors.
"""


class SerpAuditError(Exception):
    """Base class for all harness errors."""


class InvalidInputError(SerpAuditError, ValueError):
    """A metric or operation received input violating its preconditions."""


class InvalidDepthError(InvalidInputError):
    """Requested agreement depth exceeds one of the compared rankings."""


class InvalidParamsError(InvalidInputError):
    """Parameter object (persistence, depth, mode, k, permutation count) is out of range."""


class UnsupportedEngineError(SerpAuditError, KeyError):
    """No extractor rules registered for the requested engine."""


class UrlNormalizationError(SerpAuditError, ValueError):
    """Raw string could not be normalized into an absolute http(s) URL."""

    def __init__(self, raw: str, reason: str = "not a parseable URL"):
        super().__init__(f"{reason}: {raw!r}")
        self.raw = raw


class PageGapError(SerpAuditError, ValueError):
    """Multi-page capture set has missing page indices."""

    def __init__(self, missing: list[int]):
        super().__init__(f"missing page indices: {missing}")
        self.missing = missing


class PlanError(SerpAuditError, ValueError):
    """Fleet configuration cannot be planned (duplicate slots, empty fleet)."""


class HygieneError(SerpAuditError, RuntimeError):
    """Browser state survived a cleaning step; the agent must be quarantined."""

    def __init__(self, leftover: list[str]):
        super().__init__(f"state keys survived cleaning: {leftover}")
        self.leftover = leftover


class UnknownQueryError(SerpAuditError, KeyError):
    """Simulated engine has no pool for the requested query."""


class PoolInfeasibleError(SerpAuditError, ValueError):
    """Requested pairwise pool overlaps cannot be satisfied."""


class InsufficientAgentsError(SerpAuditError, ValueError):
    """Pairwise comparison needs at least two ranked lists."""


class InsufficientGroupsError(SerpAuditError, ValueError):
    """Effect test needs at least two groups with at least two records each."""


class ConfigError(SerpAuditError, ValueError):
    """Fleet or analysis configuration is invalid; message is location-anchored."""
