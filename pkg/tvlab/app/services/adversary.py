"""
Non-adaptive contamination: every adversary maps distributions to
distributions and commits before any sample is drawn.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core.exceptions import BadParams, DegenerateEta, MassUnderflow
from ..models.distribution import Dist, as_prob, mix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorruptionLevel:
    eta: Fraction

    def __post_init__(self):
        eta = as_prob(self.eta)
        if eta < 0:
            raise BadParams(f"corruption level must be >= 0, got {eta}")
        if eta >= 1:
            raise DegenerateEta(f"corruption level must be < 1, got {eta}")
        object.__setattr__(self, "eta", eta)


def as_level(eta) -> CorruptionLevel:
    return eta if isinstance(eta, CorruptionLevel) else CorruptionLevel(eta)


@dataclass(frozen=True)
class CorruptedSource:
    """A sampling distribution plus the bookkeeping needed for error accounting"""
    dist: Dist
    base: Dist
    kind: str
    eta_add: Fraction = Fraction(0)
    eta_remove: Fraction = Fraction(0)
    added: Optional[Dist] = None
    removed: Optional[Dist] = None

    @property
    def displacement_bound(self) -> Fraction:
        return self.eta_add + self.eta_remove


def huber_contaminate(p: Dist, r: Dist, eta) -> Dist:
    return huber_source(p, r, eta).dist


def huber_source(p: Dist, r: Dist, eta) -> CorruptedSource:
    eta = as_level(eta).eta
    corrupted = mix([(eta, r), (1 - eta, p)])
    return CorruptedSource(corrupted, base=p, kind="huber", eta_add=eta, added=r)


def subtract_component(q: Dist, removed: Dist, eta) -> Dist:
    """Return p with eta * removed + (1 - eta) * p == q"""
    eta = as_level(eta).eta
    if eta == 0:
        return q
    for x, w in removed.items():
        if eta * w > q[x]:
            raise MassUnderflow(f"removing {eta * w} at {x} exceeds available mass {q[x]}")
    return Dist({x: (w - eta * removed[x]) / (1 - eta) for x, w in q.items()})


def subtract_source(q: Dist, removed: Dist, eta) -> CorruptedSource:
    p = subtract_component(q, removed, eta)
    return CorruptedSource(p, base=q, kind="subtract", eta_remove=as_prob(eta), removed=removed)


def general_corrupt(q: Dist, add: Dist, remove: Dist, eta_add, eta_remove) -> Dist:
    return general_source(q, add, remove, eta_add, eta_remove).dist


def general_source(q: Dist, add: Dist, remove: Dist, eta_add, eta_remove) -> CorruptedSource:
    eta_add = as_level(eta_add).eta
    eta_remove = as_prob(eta_remove)
    corrupted = huber_contaminate(subtract_component(q, remove, eta_remove), add, eta_add)
    logger.debug("general corruption with eta_add=%s eta_remove=%s", eta_add, eta_remove)
    return CorruptedSource(
        corrupted, base=q, kind="general",
        eta_add=eta_add, eta_remove=eta_remove, added=add, removed=remove,
    )
