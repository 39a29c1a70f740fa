"""
Known-corruption reduction.

Level i runs a learner tuned for corruption eta_i = i * eps / (8 alpha),
i = 0..ceil(8 alpha / eps), each on its own slice of the sample. The
candidates are then compared by Yatracos selection on a held-out slice S0,
which gives a 3 alpha-robust learner without knowing eta.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..core.config import settings
from ..core.exceptions import BadParams, InsufficientSample
from ..models.distribution import Dist, as_prob
from ..models.sample import Sample, Seed
from ..services.selection import SelectionTrace, build_yatracos, select_min
from ..utils.bounds import yatracos_sample_size
from .base_learner import BaseLearner

logger = logging.getLogger(__name__)

LevelLearners = Union[Sequence[BaseLearner], Callable[[int], BaseLearner]]


def level_count(alpha, eps) -> int:
    """Number of grid levels, ceil(8 alpha / eps) + 1"""
    return math.ceil(8 * as_prob(alpha) / as_prob(eps)) + 1


def level_eta(index: int, alpha, eps) -> Fraction:
    return index * as_prob(eps) / (8 * as_prob(alpha))


@dataclass
class EtaGridTrace:
    etas: List[Fraction]
    slice_sizes: List[int]
    candidates: List[int]
    selection: SelectionTrace
    desk_scale: bool

    def to_dict(self) -> Dict:
        return {
            "etas": [str(eta) for eta in self.etas],
            "slice_sizes": self.slice_sizes,
            "candidates": self.candidates,
            "desk_scale": self.desk_scale,
            "selection": self.selection.to_dict(),
        }


def eta_grid_sizes(level_learners: LevelLearners, alpha, eps, delta, scale=1) -> Tuple[int, List[int]]:
    """(|S0|, [n_i]) with every calculated size multiplied by scale once"""
    alpha, eps, delta, scale = (as_prob(v) for v in (alpha, eps, delta, scale))
    if alpha < 1:
        raise BadParams(f"the eta grid needs alpha >= 1, got {alpha}")
    levels = level_count(alpha, eps)
    s0 = math.ceil(scale * yatracos_sample_size(levels, eps / 4, delta / 2))
    level_eps, level_delta = eps / (8 * alpha), delta / 2
    sizes = [
        _learner_at(level_learners, i).scaled_sample_size(level_eps, level_delta, scale)
        for i in range(levels)
    ]
    return s0, sizes


def _learner_at(level_learners: LevelLearners, index: int) -> BaseLearner:
    if callable(level_learners):
        return level_learners(index)
    return level_learners[index]


def eta_grid_reduce(
    level_learners: LevelLearners,
    alpha,
    s: Sample,
    eps,
    delta,
    seed: Seed,
    scale=1,
) -> Tuple[Dist, EtaGridTrace]:
    alpha, eps = as_prob(alpha), as_prob(eps)
    s0_size, sizes = eta_grid_sizes(level_learners, alpha, eps, delta, scale)
    needed = s0_size + sum(sizes)
    if len(s) < needed:
        raise InsufficientSample(f"eta grid needs {needed} points, got {len(s)}")

    slices = s.split(s0_size, *sizes, names=("S0",) + tuple(f"S{i + 1}" for i in range(len(sizes))))
    held_out, level_slices = slices[0], slices[1:]
    candidates = [
        _learner_at(level_learners, i).learn(piece, seed.derive(i))
        for i, piece in enumerate(level_slices)
    ]
    sets = build_yatracos(candidates)
    chosen, selection = select_min(sets, held_out)
    position = {dist: k for k, dist in enumerate(sets.hypotheses)}
    trace = EtaGridTrace(
        etas=[level_eta(i, alpha, eps) for i in range(len(sizes))],
        slice_sizes=[s0_size] + sizes,
        candidates=[position[c] for c in candidates],
        selection=selection,
        desk_scale=as_prob(scale) < 1,
    )
    return chosen, trace


class EtaGridLearner(BaseLearner):
    """Learner form of eta_grid_reduce over a fixed list of level learners"""

    def __init__(self, level_learners: Sequence[BaseLearner], alpha, eps, delta, scale=1):
        super().__init__("ETA_GRID")
        self.level_learners = list(level_learners)
        self.alpha = as_prob(alpha)
        self.eps = as_prob(eps)
        self.delta = as_prob(delta)
        self.scale = as_prob(scale)
        if len(self.level_learners) != level_count(self.alpha, self.eps):
            raise BadParams(
                f"expected {level_count(self.alpha, self.eps)} level learners, got {len(self.level_learners)}"
            )
        self.parameters = {"alpha": str(self.alpha), "levels": len(self.level_learners)}

    def get_learner_name(self) -> str:
        return f"ETA_GRID_{len(self.level_learners)}"

    def sample_size(self, eps, delta) -> int:
        s0, sizes = eta_grid_sizes(self.level_learners, self.alpha, eps, delta, self.scale)
        return s0 + sum(sizes)

    def learn_with_trace(self, sample: Sample, seed: Optional[Seed] = None) -> Tuple[Dist, Optional[Dict]]:
        chosen, trace = eta_grid_reduce(
            self.level_learners, self.alpha, sample, self.eps, self.delta,
            seed or Seed(settings.DEFAULT_SEED), self.scale,
        )
        return chosen, trace.to_dict()

    def learn(self, sample: Sample, seed: Optional[Seed] = None) -> Dist:
        return self.learn_with_trace(sample, seed)[0]
