from typing import Optional

from ..models.distribution import Dist, dirac
from ..models.sample import Sample, Seed
from ..services.families import ORIGIN, GrowthFn, indicator_level, is_indicator, make_qg_member
from ..utils.bounds import realizable_sample_size
from .base_learner import BaseLearner


def realizable_qg_learn(s: Sample, g: GrowthFn) -> Dist:
    """
    Realizable learner for Q_g.

    The first indicator (i, 2j+2) in sample order names the member
    q_{i,j,g(j)}; with no indicator the answer is delta_(0,0).
    """
    for x in s:
        if is_indicator(x):
            return make_qg_member(x.a, indicator_level(x), g)
    return dirac(ORIGIN)


class RealizableQgLearner(BaseLearner):
    """
    Indicator-scan learner for Q_g

    Succeeds in the realizable case with ln(1/delta) * g(1/eps) samples and
    fails exactly under subtraction of the indicator atom.
    """

    def __init__(self, growth: GrowthFn):
        super().__init__("REALIZABLE_QG")
        self.growth = growth
        self.parameters = {"growth": str(growth)}

    def get_learner_name(self) -> str:
        return f"REALIZABLE_QG_{self.growth}"

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return realizable_qg_learn(sample, self.growth)

    def sample_size(self, eps, delta) -> int:
        return realizable_sample_size(eps, delta, self.growth)
