"""
Yatracos-set hypothesis selection over a finite hypothesis list.

A_{i,j} = {x : q_i(x) >= q_j(x)}. Points outside every hypothesis support
satisfy 0 >= 0, so each set carries the outside flag and the union of
supports as its reference.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from ..core.exceptions import EmptyList, EmptySample
from ..models.distribution import DomainPoint, Dist, YatracosSet, mass_of
from ..models.sample import Sample
from ..utils.bounds import yatracos_sample_size

logger = logging.getLogger(__name__)

__all__ = [
    "HypothesisList", "SelectionTrace", "build_yatracos", "a_distance",
    "empirical_a_distance", "select_min", "yatracos_sample_size",
]


@dataclass(frozen=True)
class HypothesisList:
    hypotheses: Tuple[Dist, ...]
    yatracos: Dict[Tuple[int, int], YatracosSet] = field(hash=False)
    reference_support: FrozenSet[DomainPoint] = frozenset()

    def __len__(self) -> int:
        return len(self.hypotheses)

    @property
    def sets(self) -> List[YatracosSet]:
        return list(self.yatracos.values())


@dataclass
class SelectionTrace:
    scores: List[Fraction]
    chosen: int
    labels: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "chosen": self.chosen,
            "scores": [str(score) for score in self.scores],
            "labels": self.labels,
        }


def build_yatracos(hyps: Iterable[Dist]) -> HypothesisList:
    hypotheses = tuple(dict.fromkeys(hyps))
    if not hypotheses:
        raise EmptyList("cannot build Yatracos sets over an empty hypothesis list")
    reference = frozenset(x for q in hypotheses for x in q.support)
    ordered_reference = sorted(reference)
    yatracos = {}
    for i, qi in enumerate(hypotheses):
        for j, qj in enumerate(hypotheses):
            if i == j:
                continue
            listed = frozenset(x for x in ordered_reference if qi[x] >= qj[x])
            yatracos[(i, j)] = YatracosSet(listed, outside_flag=True, reference_support=reference)
    return HypothesisList(hypotheses, yatracos, reference)


def a_distance(p: Dist, q: Dist, sets: HypothesisList) -> Fraction:
    return max((abs(mass_of(p, b) - mass_of(q, b)) for b in sets.sets), default=Fraction(0))


class _EmpiricalMasses:
    """Sample frequencies of Yatracos sets, computed once per sample"""

    def __init__(self, s: Sample, sets: HypothesisList):
        if len(s) == 0:
            raise EmptySample("empirical A-distance needs a nonempty sample")
        counts = s.counts()
        size = len(s)
        outside = sum(c for x, c in counts.items() if x not in sets.reference_support)
        self.masses = {}
        for key, b in sets.yatracos.items():
            inside = sum(counts.get(x, 0) for x in b.listed)
            self.masses[key] = Fraction(inside + (outside if b.outside_flag else 0), size)


def _score(q: Dist, sets: HypothesisList, empirical: _EmpiricalMasses) -> Fraction:
    return max(
        (abs(mass_of(q, b) - empirical.masses[key]) for key, b in sets.yatracos.items()),
        default=Fraction(0),
    )


def empirical_a_distance(q: Dist, s: Sample, sets: HypothesisList) -> Fraction:
    return _score(q, sets, _EmpiricalMasses(s, sets))


def select_min(
    sets: HypothesisList,
    s: Sample,
    labels: Optional[Sequence[str]] = None,
) -> Tuple[Dist, SelectionTrace]:
    """Minimize the empirical A-distance; the first hypothesis wins ties"""
    if not sets.hypotheses:
        raise EmptyList("no hypotheses to select from")
    empirical = _EmpiricalMasses(s, sets)
    scores = [_score(q, sets, empirical) for q in sets.hypotheses]
    chosen = min(range(len(scores)), key=lambda k: (scores[k], k))
    trace = SelectionTrace(scores=scores, chosen=chosen, labels=list(labels or []))
    return sets.hypotheses[chosen], trace
