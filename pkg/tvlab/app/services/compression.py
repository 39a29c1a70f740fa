"""
Size-one sample compression for Q_g.

The encoder keeps the first indicator point of the sample (or (0,0) when
there is none) and no bits; the decoder maps an indicator (i, 2j+2) back
to q_{i,j,g(j)}.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from ..core.exceptions import BadMessage, BadParams, EmptySample
from ..models.distribution import DomainPoint, Dist, as_prob, dirac, sample, tv_distance
from ..models.sample import Sample, Seed
from ..utils.bounds import compression_sample_size, wilson_interval
from .families import ORIGIN, GrowthFn, indicator_level, is_indicator, make_qg_member

logger = logging.getLogger(__name__)

MESSAGE_POINTS = 1
MESSAGE_BITS = 0


@dataclass(frozen=True)
class CompressionMessage:
    points: Tuple[DomainPoint, ...]
    bits: Tuple[bool, ...] = ()

    def __str__(self) -> str:
        text = " ".join(str(x) for x in self.points)
        if self.bits:
            text += "|" + "".join("1" if bit else "0" for bit in self.bits)
        return text


def qg_encode(s: Sample) -> CompressionMessage:
    if len(s) == 0:
        raise EmptySample("cannot compress an empty sample")
    for x in s:
        if is_indicator(x):
            return CompressionMessage((x,))
    return CompressionMessage((ORIGIN,))


def qg_decode(m: CompressionMessage, g: GrowthFn) -> Dist:
    if len(m.points) != MESSAGE_POINTS:
        raise BadMessage(f"Q_g messages carry exactly one point, got {len(m.points)}")
    x = m.points[0]
    if is_indicator(x):
        return make_qg_member(x.a, indicator_level(x), g)
    return dirac(ORIGIN)


def fallback_outside_sample(m: CompressionMessage, s: Sample) -> bool:
    """True when the message uses the (0,0) fallback although (0,0) was never drawn"""
    return any(x not in s.points for x in m.points)


def qg_member_index(q: Dist, g: GrowthFn) -> Tuple[int, int]:
    """(i, j) of a Q_g member, read off its indicator atom"""
    indicators = [x for x in q.support if is_indicator(x)]
    if len(indicators) == 1:
        x = indicators[0]
        i, j = x.a, indicator_level(x)
        if make_qg_member(i, j, g) == q:
            return i, j
    raise BadParams(f"{q!r} is not a member of Q_g for g = {g}")


@dataclass
class RoundTripSummary:
    successes: int
    trials: int
    n: int
    fallback_outside: int
    interval: Tuple[float, float]

    @property
    def rate(self) -> Fraction:
        return Fraction(self.successes, self.trials)

    def to_dict(self) -> Dict:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "n": self.n,
            "rate": str(self.rate),
            "fallback_outside_sample": self.fallback_outside,
            "wilson_95": list(self.interval),
        }


def compression_round_trip(
    q: Dist,
    g: GrowthFn,
    eps,
    trials: int,
    seed: Seed,
    n: Optional[int] = None,
) -> RoundTripSummary:
    """Draw, encode, decode; success iff the decoded distribution is within eps of q"""
    if trials < 1:
        raise BadParams(f"round trip needs at least one trial, got {trials}")
    eps = as_prob(eps)
    qg_member_index(q, g)
    n = compression_sample_size(eps, g) if n is None else n
    successes = fallback = 0
    for t in range(trials):
        s = sample(q, n, seed.derive(t))
        message = qg_encode(s)
        fallback += fallback_outside_sample(message, s)
        successes += tv_distance(qg_decode(message, g), q) <= eps
    logger.info("compression round trip: %d/%d successes at n=%d", successes, trials, n)
    return RoundTripSummary(successes, trials, n, fallback, wilson_interval(successes, trials))
