from fractions import Fraction
from typing import Annotated, Any, Literal, Optional, Tuple, get_args

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    WithJsonSchema,
    field_validator,
    model_validator,
)

from ..core.config import settings
from ..core.exceptions import TVLabError
from ..models.distribution import Dist, format_dist_atoms, parse_dist_atoms
from ..services.families import GrowthFn

ExperimentKind = Literal[
    "realizable-qg",
    "subtractive-attack",
    "additive-huber",
    "yatracos-finite",
    "eta-grid",
    "compression-roundtrip",
    "dp-histogram",
    "dp-qg",
    "cover-select",
]

EXPERIMENT_KINDS = get_args(ExperimentKind)


def parse_rational(value: Any) -> Fraction:
    """Exact rational from 'p/q', an integer or a finite decimal ('0.1' is 1/10)"""
    if isinstance(value, bool):
        raise ValueError("expected a rational, got a boolean")
    if isinstance(value, float):
        value = repr(value)
    try:
        return Fraction(value.strip() if isinstance(value, str) else value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"expected a rational such as 3/16, got {value!r}") from e


def parse_index_range(value: Any) -> Tuple[int, ...]:
    """'1..15' or '1,5,9' (or a single integer)"""
    if isinstance(value, int) and not isinstance(value, bool):
        return (value,)
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    text = str(value).strip()
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split(".."))
            if high < low:
                raise ValueError(f"empty range {text!r}")
            return tuple(range(low, high + 1))
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ValueError(f"expected a range like 1..15 or 1,5,9, got {text!r}") from e


def _parse_growth(value: Any) -> GrowthFn:
    if isinstance(value, GrowthFn):
        return value
    try:
        return GrowthFn.parse(str(value))
    except TVLabError as e:
        raise ValueError(str(e)) from e


def _parse_dist(value: Any) -> Dist:
    if isinstance(value, Dist):
        return value
    try:
        return parse_dist_atoms(str(value))
    except TVLabError as e:
        raise ValueError(str(e)) from e


def _parse_members(value: Any) -> Tuple[Dist, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(_parse_dist(v) for v in value)
    return tuple(_parse_dist(part) for part in str(value).split(";") if part.strip())


_STRING = WithJsonSchema({"type": "string"})

Rational = Annotated[Fraction, PlainValidator(parse_rational), PlainSerializer(str, when_used="json"), _STRING]
IndexRange = Annotated[Tuple[int, ...], PlainValidator(parse_index_range)]
Growth = Annotated[GrowthFn, PlainValidator(_parse_growth), PlainSerializer(str, when_used="json"), _STRING]
DistAtoms = Annotated[Dist, PlainValidator(_parse_dist), PlainSerializer(format_dist_atoms, when_used="json"), _STRING]
Members = Annotated[
    Tuple[Dist, ...],
    PlainValidator(_parse_members),
    PlainSerializer(lambda ms: "; ".join(format_dist_atoms(m) for m in ms), when_used="json"),
    _STRING,
]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)


def _unit_open(name: str, value: Optional[Fraction]) -> None:
    if value is not None and not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


class ExperimentSection(_Section):
    kind: ExperimentKind
    name: Optional[str] = None
    trials: int = Field(default=100, ge=1)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2 ** 64)
    scale: Rational = Fraction(1)
    workers: int = Field(default=0, ge=0)  # 0 means settings.workers
    timing: bool = True
    out: str = Field(default_factory=lambda: settings.OUTPUT_DIR)

    @field_validator("scale")
    @classmethod
    def _positive_scale(cls, value: Fraction) -> Fraction:
        if value <= 0:
            raise ValueError(f"scale must be positive, got {value}")
        return value

    @property
    def run_name(self) -> str:
        return self.name or self.kind


class FamilySection(_Section):
    type: Literal["qg", "packing", "explicit"] = "qg"
    growth: Growth = Field(default_factory=GrowthFn.square)
    i: IndexRange = (1,)
    j: IndexRange = (1,)
    gamma: Optional[Rational] = None
    k: int = Field(default=1, ge=1)
    members: Members = ()
    labels: Optional[str] = None
    target: Optional[str] = None
    cap: Optional[int] = Field(default=None, ge=1)

    @field_validator("i", "j")
    @classmethod
    def _positive_indices(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("index range is empty")
        if min(value) < 1:
            raise ValueError(f"indices start at 1, got {min(value)}")
        return value

    @model_validator(mode="after")
    def _type_fields(self) -> "FamilySection":
        if self.type == "packing":
            if self.gamma is None:
                raise ValueError("a packing family needs gamma")
            _unit_open("gamma", self.gamma)
        if self.type == "explicit" and not self.members:
            raise ValueError("an explicit family needs members")
        return self

    @property
    def label_list(self) -> Optional[Tuple[str, ...]]:
        if not self.labels:
            return None
        return tuple(label.strip() for label in self.labels.split(";"))


class AdversarySection(_Section):
    kind: Literal["none", "huber", "subtractive", "general"] = "none"
    eta: Rational = Fraction(0)
    eta_remove: Rational = Fraction(0)
    add: Optional[DistAtoms] = None
    remove: Optional[DistAtoms] = None

    @field_validator("eta", "eta_remove")
    @classmethod
    def _eta_range(cls, value: Fraction) -> Fraction:
        if not 0 <= value < 1:
            raise ValueError(f"eta must satisfy 0 <= eta < 1, got {value}")
        return value

    @model_validator(mode="after")
    def _components(self) -> "AdversarySection":
        if self.kind in ("huber", "general") and self.add is None:
            raise ValueError(f"{self.kind} contamination needs an 'add' distribution")
        if self.kind == "general" and self.eta + self.eta_remove >= 1:
            raise ValueError("eta + eta_remove must stay below 1")
        return self


class LearnerSection(_Section):
    epsilon: Optional[Rational] = None
    delta: Optional[Rational] = None
    alpha: Optional[Rational] = None
    beta: Optional[Rational] = None
    n: Optional[int] = Field(default=None, ge=0)
    n1: Optional[int] = Field(default=None, ge=0)
    n2: Optional[int] = Field(default=None, ge=1)
    subset_floor: Optional[int] = Field(default=None, ge=0)
    subset_cap: Optional[int] = Field(default=None, ge=1)
    eta_budget: Optional[Rational] = None
    tolerance: Optional[Rational] = None
    min_success: Optional[Rational] = None
    eps_dp: Optional[Rational] = None
    delta_dp: Optional[Rational] = None
    construction: Literal["standard", "known_eta"] = "standard"
    level_learner: Literal["realizable", "robust"] = "realizable"

    @model_validator(mode="after")
    def _ranges(self) -> "LearnerSection":
        for name in ("epsilon", "delta", "beta"):
            _unit_open(name, getattr(self, name))
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.eps_dp is not None and self.eps_dp <= 0:
            raise ValueError(f"eps_dp must be positive, got {self.eps_dp}")
        if self.delta_dp is not None and not 0 <= self.delta_dp < 1:
            raise ValueError(f"delta_dp must lie in [0, 1), got {self.delta_dp}")
        if self.min_success is not None and not 0 <= self.min_success <= 1:
            raise ValueError(f"min_success must lie in [0, 1], got {self.min_success}")
        if (self.n1 is None) != (self.n2 is None):
            raise ValueError("n1 and n2 must be given together")
        return self


# Keys each experiment needs in [learner]
REQUIRED_LEARNER_KEYS = {
    "realizable-qg": ("epsilon", "delta"),
    "subtractive-attack": ("epsilon", "alpha"),
    "additive-huber": ("epsilon", "delta"),
    "yatracos-finite": ("epsilon", "delta"),
    "eta-grid": ("epsilon", "delta", "alpha"),
    "compression-roundtrip": ("epsilon",),
    "dp-histogram": ("alpha", "beta", "eps_dp", "delta_dp"),
    "dp-qg": ("alpha", "beta", "eps_dp", "delta_dp"),
    "cover-select": ("alpha", "beta"),
}


class ExperimentConfig(_Section):
    experiment: ExperimentSection
    family: FamilySection = Field(default_factory=FamilySection)
    adversary: AdversarySection = Field(default_factory=AdversarySection)
    learner: LearnerSection = Field(default_factory=LearnerSection)

    @model_validator(mode="after")
    def _experiment_needs(self) -> "ExperimentConfig":
        missing = [
            key for key in REQUIRED_LEARNER_KEYS[self.experiment.kind]
            if getattr(self.learner, key) is None
        ]
        if missing:
            raise ValueError(f"{self.experiment.kind} needs [learner] " + ", ".join(missing))
        return self
