import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Dict, Optional, Tuple

from ..models.distribution import Dist
from ..models.sample import Sample, Seed


class BaseLearner(ABC):
    """Abstract base class for all distribution learners"""

    def __init__(self, name: str):
        self.name = name
        self.parameters = {}

    @abstractmethod
    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        """
        Map a sample to a hypothesis distribution

        Args:
            sample: i.i.d. draws from the (possibly corrupted) source
            seed: randomness for learners that split or noise their input

        Returns:
            The learned distribution; the same (sample, seed) gives the same output
        """
        pass

    @abstractmethod
    def sample_size(self, eps, delta) -> int:
        """Number of samples that suffices for accuracy eps with confidence 1 - delta"""
        pass

    @abstractmethod
    def get_learner_name(self) -> str:
        """Return the learner name"""
        pass

    def learn_with_trace(self, sample: Sample, seed: Optional[Seed] = None) -> Tuple[Dist, Optional[Dict]]:
        """Learn and return a JSON-ready selection trace when the learner has one"""
        return self.learn(sample, seed), None

    def scaled_sample_size(self, eps, delta, scale=1) -> int:
        """sample_size multiplied by a desk scale"""
        return math.ceil(Fraction(scale) * self.sample_size(eps, delta))

    def get_parameters(self) -> Dict:
        """Return learner parameters"""
        return self.parameters


class FixedLearner(BaseLearner):
    """Ignores its input and returns one distribution; a baseline and a test double"""

    def __init__(self, output: Dist, label: str = "fixed", size: int = 0):
        super().__init__("FIXED")
        self.output = output
        self.label = label
        self.size = size
        self.parameters = {"label": label}

    def get_learner_name(self) -> str:
        return f"FIXED_{self.label}"

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return self.output

    def sample_size(self, eps, delta) -> int:
        return self.size
