"""Error hierarchy for the lab.

Parameter-shaped errors also subclass ValueError so callers that only
know about ValueError keep working.
"""
from typing import Dict, List, Optional


class TVLabError(Exception):
    """Base class for every error raised by the lab"""

    def to_record(self) -> Dict:
        """Machine-readable error record written by the CLI and the API"""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "violations": [],
        }


class EmptySet(TVLabError, ValueError):
    pass


class BadWeights(TVLabError, ValueError):
    pass


class BadParams(TVLabError, ValueError):
    pass


class BadIndex(TVLabError, ValueError):
    pass


class TooLarge(TVLabError, ValueError):
    pass


class MassUnderflow(TVLabError, ValueError):
    pass


class DegenerateEta(TVLabError, ValueError):
    pass


class EmptyList(TVLabError, ValueError):
    pass


class EmptySample(TVLabError, ValueError):
    pass


class SubsetBlowup(TVLabError):
    pass


class InsufficientSample(TVLabError, ValueError):
    pass


class BadMessage(TVLabError, ValueError):
    pass


class EmptyClass(TVLabError, ValueError):
    pass


class ConfigError(TVLabError, ValueError):
    """Raised with every violation found in an experiment config"""

    def __init__(self, violations: List[str], message: Optional[str] = None):
        self.violations = list(violations)
        super().__init__(message or "; ".join(self.violations) or "invalid config")

    def to_record(self) -> Dict:
        record = super().to_record()
        record["violations"] = self.violations
        return record
