from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from ..core.config import settings
from ..core.exceptions import EmptyClass
from ..models.distribution import Dist, as_prob
from ..models.sample import Sample, Seed
from ..services.families import GrowthFn
from ..services.privacy import (
    DpParams,
    cover_select_sample_size,
    cover_then_select_with_trace,
    dp_qg_learn,
    dp_qg_sample_size,
)
from .base_learner import BaseLearner


class DpQgLearner(BaseLearner):
    """(eps_dp, delta_dp)-private learner for Q_g at accuracy alpha"""

    def __init__(self, growth: GrowthFn, alpha, beta, params: DpParams):
        super().__init__("DP_QG")
        self.growth = growth
        self.alpha = as_prob(alpha)
        self.beta = as_prob(beta)
        self.params = params
        self.parameters = {
            "growth": str(growth),
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "eps_dp": str(params.eps_dp),
            "delta_dp": str(params.delta_dp),
        }

    def get_learner_name(self) -> str:
        return f"DP_QG_{self.growth}"

    def sample_size(self, eps=None, delta=None) -> int:
        """Sized by the learner's own (alpha, beta); eps and delta are ignored"""
        return dp_qg_sample_size(self.alpha, self.beta, self.params, self.growth)

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return dp_qg_learn(
            sample, self.growth, self.alpha, self.params,
            seed or Seed(settings.DEFAULT_SEED), beta=self.beta,
        )


class CoverSelectLearner(BaseLearner):
    """Yatracos selection over the alpha/6 greedy packing-cover of an explicit class"""

    def __init__(self, members: Sequence[Dist], alpha, beta, labels: Optional[Sequence[str]] = None):
        super().__init__("COVER_SELECT")
        if not members:
            raise EmptyClass("cover-then-select needs at least one member")
        self.members = list(members)
        self.labels = list(labels) if labels is not None else None
        self.alpha = as_prob(alpha)
        self.beta = as_prob(beta)
        self.parameters = {"class_size": len(self.members), "radius": str(self.alpha / 6)}

    def get_learner_name(self) -> str:
        return f"COVER_SELECT_{len(self.members)}"

    def sample_size(self, eps=None, delta=None) -> int:
        return cover_select_sample_size(self.members, self.alpha, self.beta)

    @property
    def radius(self) -> Fraction:
        return self.alpha / 6

    def learn_with_trace(self, sample: Sample, seed: Optional[Seed] = None) -> Tuple[Dist, Optional[Dict]]:
        chosen, trace = cover_then_select_with_trace(self.members, self.alpha, self.beta, sample, self.labels)
        return chosen, trace.to_dict()

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return self.learn_with_trace(sample, seed)[0]
