"""
Subset-enumeration robustification.

Split the sample into S1 and S2, run the inner learner on every subset of
S1 (down to a size floor), and pick among the resulting hypotheses with
Yatracos selection on S2. With a realizable inner learner this is the
additive (Huber) 2-robust learner; with an alpha-subtractive-robust inner
learner the same recipe gives the (2 alpha + 4)-robust lift.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Optional, Tuple

from ..core.config import settings
from ..core.exceptions import BadParams, EmptyList, InsufficientSample, SubsetBlowup, TVLabError
from ..models.distribution import Dist, as_prob
from ..models.sample import Sample, Seed
from ..services.selection import SelectionTrace, build_yatracos, select_min
from ..utils.bounds import split_sizes
from .base_learner import BaseLearner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitPlan:
    n1: int
    n2: int
    subset_floor: int = 0
    subset_cap: int = field(default_factory=lambda: settings.SUBSET_CAP)
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 1:
            raise BadParams(f"split plan needs n1 >= 0 and n2 >= 1, got n1={self.n1}, n2={self.n2}")
        if not 0 <= self.subset_floor <= self.n1:
            raise BadParams(f"subset floor {self.subset_floor} must lie in [0, n1={self.n1}]")

    @property
    def total(self) -> int:
        return self.n1 + self.n2

    @property
    def desk_scale(self) -> bool:
        return self.scale < 1

    @property
    def subset_count(self) -> int:
        return sum(math.comb(self.n1, k) for k in range(self.subset_floor, self.n1 + 1))


@dataclass
class RobustifyTrace:
    n1: int
    n2: int
    subset_floor: int
    subsets: int
    failed_subsets: int
    hypotheses: int
    guarantee_factor: Optional[Fraction]
    desk_scale: bool
    selection: SelectionTrace

    def to_dict(self) -> Dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "subset_floor": self.subset_floor,
            "subsets": self.subsets,
            "failed_subsets": self.failed_subsets,
            "hypotheses": self.hypotheses,
            "guarantee_factor": None if self.guarantee_factor is None else str(self.guarantee_factor),
            "desk_scale": self.desk_scale,
            "selection": self.selection.to_dict(),
        }


def robust_guarantee_factor(inner_kind: str, alpha=None) -> Fraction:
    """2 for a realizable inner learner, 2 alpha + 4 for an alpha-subtractive-robust one"""
    if inner_kind == "realizable":
        return Fraction(2)
    if inner_kind == "subtractive":
        if alpha is None:
            raise BadParams("the subtractive lift needs the inner robustness factor alpha")
        return 2 * as_prob(alpha) + 4
    raise BadParams(f"unknown inner learner kind {inner_kind!r}")


def clean_subset_floor(n1: int, eta, eps) -> int:
    """ceil((1 - eta - 2 eps / 9) n1), clamped to [0, n1]"""
    floor = math.ceil((1 - as_prob(eta) - 2 * as_prob(eps) / 9) * n1)
    return min(max(floor, 0), n1)


def additive_split_plan(
    eps,
    delta,
    inner_size: Callable[[object, object], int],
    scale=1,
    subset_cap: Optional[int] = None,
    eta_budget=None,
) -> SplitPlan:
    eps, delta, scale = as_prob(eps), as_prob(delta), as_prob(scale)
    n1, n2 = split_sizes(eps, delta, inner_size(eps / 9, delta / 5), scale)
    floor = 0 if eta_budget is None else clean_subset_floor(n1, eta_budget, eps)
    if scale < 1:
        logger.info("desk-scale split plan (scale=%s): n1=%d n2=%d", scale, n1, n2)
    return SplitPlan(n1, n2, floor, subset_cap or settings.SUBSET_CAP, scale)


def robustify(
    inner: BaseLearner,
    s: Sample,
    eps,
    delta,
    plan: SplitPlan,
    seed: Seed,
    guarantee_factor: Optional[Fraction] = None,
) -> Tuple[Dist, RobustifyTrace]:
    if len(s) != plan.total:
        raise BadParams(f"robustify expects n1 + n2 = {plan.total} points, got {len(s)}")
    subsets = plan.subset_count
    if subsets > plan.subset_cap:
        raise SubsetBlowup(f"{subsets} subsets of S1 exceed the cap of {plan.subset_cap}")

    s1, s2 = s.shuffled(seed.derive(0)).split(plan.n1, plan.n2, names=("S1", "S2"))
    inner_seed = seed.derive(1)
    hypotheses: Dict[Dist, None] = {}
    failed = 0
    for size in range(plan.subset_floor, plan.n1 + 1):
        for subset in combinations(s1.points, size):
            try:
                hypotheses.setdefault(inner.learn(Sample(subset, "S1-subset"), inner_seed))
            except TVLabError as e:
                failed += 1
                logger.debug("inner learner failed on a subset of size %d: %s", size, e)
    if not hypotheses:
        raise EmptyList(f"inner learner failed on all {subsets} subsets")

    sets = build_yatracos(hypotheses)
    chosen, selection = select_min(sets, s2)
    trace = RobustifyTrace(
        n1=plan.n1,
        n2=plan.n2,
        subset_floor=plan.subset_floor,
        subsets=subsets,
        failed_subsets=failed,
        hypotheses=len(sets),
        guarantee_factor=guarantee_factor,
        desk_scale=plan.desk_scale,
        selection=selection,
    )
    return chosen, trace


class RobustLearner(BaseLearner):
    """
    Learner form of robustify

    With a fixed plan the S1 size and subset floor are kept and S2 takes the
    rest of whatever sample is supplied.
    """

    def __init__(
        self,
        inner: BaseLearner,
        eps,
        delta,
        plan: Optional[SplitPlan] = None,
        scale=1,
        inner_kind: str = "realizable",
        alpha=None,
    ):
        super().__init__("ROBUSTIFY")
        self.inner = inner
        self.eps = as_prob(eps)
        self.delta = as_prob(delta)
        self.plan = plan
        self.scale = as_prob(scale)
        self.inner_kind = inner_kind
        self.guarantee_factor = robust_guarantee_factor(inner_kind, alpha)
        self.parameters = {
            "inner": inner.get_learner_name(),
            "inner_kind": inner_kind,
            "guarantee_factor": str(self.guarantee_factor),
            "plan": None if plan is None else {"n1": plan.n1, "n2": plan.n2, "subset_floor": plan.subset_floor},
        }

    def get_learner_name(self) -> str:
        return f"ROBUSTIFY_{self.inner.get_learner_name()}"

    def _plan(self, eps=None, delta=None) -> SplitPlan:
        if self.plan is not None:
            return self.plan
        return additive_split_plan(eps or self.eps, delta or self.delta, self.inner.sample_size, self.scale)

    def _plan_for(self, size: int) -> SplitPlan:
        plan = self._plan()
        if size == plan.total:
            return plan
        if size <= plan.n1:
            raise InsufficientSample(f"need more than n1 = {plan.n1} points, got {size}")
        return replace(plan, n2=size - plan.n1)

    def sample_size(self, eps, delta) -> int:
        return self._plan(eps, delta).total

    def scaled_sample_size(self, eps, delta, scale=1) -> int:
        # the split plan is already scaled
        return self.sample_size(eps, delta)

    def learn_with_trace(self, sample: Sample, seed: Optional[Seed] = None) -> Tuple[Dist, Optional[Dict]]:
        chosen, trace = robustify(
            self.inner, sample, self.eps, self.delta, self._plan_for(len(sample)),
            seed or Seed(settings.DEFAULT_SEED), self.guarantee_factor,
        )
        return chosen, trace.to_dict()

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return self.learn_with_trace(sample, seed)[0]
