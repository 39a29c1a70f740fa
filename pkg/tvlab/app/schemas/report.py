from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

CSV_COLUMNS = ["trial", "n", "output_label", "error_num", "error_den", "error_decimal", "success", "micros"]


def decimal_text(value: Fraction) -> str:
    """Fixed-precision rendering of an exact rational for the CSV"""
    return f"{float(value):.12f}"


class TrialReport(BaseModel):
    trial: int
    n: int
    output_label: str
    error_num: int
    error_den: int
    error_decimal: str
    success: bool
    micros: int = 0
    trace: Optional[Dict[str, Any]] = Field(default=None, exclude=True)

    @classmethod
    def build(cls, trial: int, n: int, output_label: str, error: Fraction, success: bool,
              micros: int = 0, trace: Optional[Dict[str, Any]] = None) -> "TrialReport":
        return cls(
            trial=trial,
            n=n,
            output_label=output_label,
            error_num=error.numerator,
            error_den=error.denominator,
            error_decimal=decimal_text(error),
            success=success,
            micros=micros,
            trace=trace,
        )

    @property
    def error(self) -> Fraction:
        return Fraction(self.error_num, self.error_den)

    def csv_row(self) -> Dict[str, Any]:
        return {
            "trial": self.trial,
            "n": self.n,
            "output_label": self.output_label,
            "error_num": self.error_num,
            "error_den": self.error_den,
            "error_decimal": self.error_decimal,
            "success": "true" if self.success else "false",
            "micros": self.micros,
        }


class TrialSummary(BaseModel):
    """One block of trials sharing a source, a target and a learner"""
    learner: str
    target_label: str
    source_label: str
    n: int
    trial_start: int
    trials: int
    threshold: Optional[str] = None
    failures: int
    failure_rate: str
    mean_error: str
    max_error: str
    wilson_low: float
    wilson_high: float
    recomputable: bool = True
    learner_parameters: Dict[str, Any] = Field(default_factory=dict)
    notes: Dict[str, Any] = Field(default_factory=dict)
    reports: List[TrialReport] = Field(default_factory=list, exclude=True)

    @property
    def successes(self) -> int:
        return self.trials - self.failures

    @property
    def trial_end(self) -> int:
        return self.trial_start + self.trials


class Acceptance(BaseModel):
    holds: bool
    predicate: str
    details: List[str] = Field(default_factory=list)


class ExperimentSummary(BaseModel):
    name: str
    kind: str
    seed: int
    trials: int
    desk_scale: bool
    config: Dict[str, Any]
    blocks: List[TrialSummary]
    label_table: Dict[str, str]
    acceptance: Acceptance
    flags: Dict[str, Any] = Field(default_factory=dict)
    files: Dict[str, str] = Field(default_factory=dict)
    elapsed_seconds: Optional[float] = None


class ExperimentInfo(BaseModel):
    kind: str
    description: str
    acceptance: str


class ExperimentListResponse(BaseModel):
    experiments: List[ExperimentInfo]


class ConfigText(BaseModel):
    text: str = Field(..., examples=["[experiment]\nkind = realizable-qg\n\n[learner]\nepsilon = 1/2\ndelta = 1/10\n"])
    write_files: bool = False


class VerifyResult(BaseModel):
    rows: int
    checked: int
    skipped: int
    mismatches: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches
