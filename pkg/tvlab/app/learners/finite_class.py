from typing import Dict, Optional, Sequence, Tuple

from ..core.exceptions import EmptyClass
from ..models.distribution import Dist, as_prob
from ..models.sample import Sample, Seed
from ..services.selection import build_yatracos, select_min
from ..utils.bounds import yatracos_sample_size
from .base_learner import BaseLearner


class FiniteClassLearner(BaseLearner):
    """
    Yatracos minimum-distance learner over an explicit finite class

    Output error is at most 3 * (distance from the source to the class) + eps
    with probability 1 - delta once the sample reaches
    yatracos_sample_size(|class|, eps, delta).
    """

    def __init__(self, members: Sequence[Dist], eps, delta, labels: Optional[Sequence[str]] = None):
        super().__init__("FINITE_CLASS")
        if not members:
            raise EmptyClass("finite-class learner needs at least one member")
        self.sets = build_yatracos(members)
        self.labels = list(labels) if labels is not None else None
        self.eps = as_prob(eps)
        self.delta = as_prob(delta)
        self.parameters = {"class_size": len(self.sets)}

    def get_learner_name(self) -> str:
        return f"FINITE_CLASS_{len(self.sets)}"

    def sample_size(self, eps, delta) -> int:
        return yatracos_sample_size(len(self.sets), eps, delta)

    def learn_with_trace(self, sample: Sample, seed: Optional[Seed] = None) -> Tuple[Dist, Optional[Dict]]:
        labels = self.labels if self.labels and len(self.labels) == len(self.sets) else None
        chosen, trace = select_min(self.sets, sample, labels)
        return chosen, trace.to_dict()

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return self.learn_with_trace(sample, seed)[0]
