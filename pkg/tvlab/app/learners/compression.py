from typing import Dict, Optional, Tuple

from ..models.distribution import Dist
from ..models.sample import Sample, Seed
from ..services.compression import MESSAGE_BITS, MESSAGE_POINTS, fallback_outside_sample, qg_decode, qg_encode
from ..services.families import GrowthFn
from ..utils.bounds import compression_sample_size
from .base_learner import BaseLearner


class CompressionLearner(BaseLearner):
    """decode(encode(S)) as a learner, so round trips run through the trial harness"""

    def __init__(self, growth: GrowthFn):
        super().__init__("QG_COMPRESSION")
        self.growth = growth
        self.parameters = {"growth": str(growth), "points": MESSAGE_POINTS, "bits": MESSAGE_BITS}

    def get_learner_name(self) -> str:
        return f"QG_COMPRESSION_{self.growth}"

    def sample_size(self, eps, delta=None) -> int:
        return compression_sample_size(eps, self.growth)

    def learn_with_trace(self, sample: Sample, seed: Optional[Seed] = None) -> Tuple[Dist, Optional[Dict]]:
        message = qg_encode(sample)
        trace = {"message": str(message), "fallback_outside_sample": fallback_outside_sample(message, sample)}
        return qg_decode(message, self.growth), trace

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return qg_decode(qg_encode(sample), self.growth)
