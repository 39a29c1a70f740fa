"""
Differentially private building blocks.

stability_histogram is the (eps, delta)-DP singleton-bin frequency
estimator: Laplace(2/eps) noise on nonempty bins, release above
1 + (2/eps) ln(2/delta). dp_qg_learn thresholds its indicator bins.
greedy_packing and cover_then_select give the finite-cover learner that
the pure-DP argument runs Yatracos selection over.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.exceptions import BadParams, EmptyClass, EmptySample, InsufficientSample
from ..models.distribution import DomainPoint, Dist, as_prob, dirac, tv_distance
from ..models.sample import Sample, Seed
from ..utils import bounds
from .families import ORIGIN, GrowthFn, indicator_level, is_indicator, make_qg_member
from .selection import SelectionTrace, build_yatracos, select_min

logger = logging.getLogger(__name__)

# Constant in the indicator-detection term 32 ln(2/beta) g(ceil(1/alpha))
DETECTION_CONSTANT = 32


@dataclass(frozen=True)
class DpParams:
    eps_dp: Fraction
    delta_dp: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "eps_dp", as_prob(self.eps_dp))
        object.__setattr__(self, "delta_dp", as_prob(self.delta_dp))
        if self.eps_dp <= 0:
            raise BadParams(f"eps_dp must be positive, got {self.eps_dp}")
        if not 0 <= self.delta_dp < 1:
            raise BadParams(f"delta_dp must lie in [0, 1), got {self.delta_dp}")

    @property
    def pure(self) -> bool:
        return self.delta_dp == 0

    @property
    def noise_scale(self) -> float:
        return 2 / float(self.eps_dp)

    @property
    def threshold(self) -> float:
        if self.pure:
            raise BadParams("the stability histogram needs delta_dp > 0")
        return 1 + self.noise_scale * math.log(2 / float(self.delta_dp))


@dataclass
class BinFrequencies:
    """Released bin frequencies; bins that were suppressed estimate 0"""
    released: Dict[DomainPoint, float]
    n: int
    suppressed: int = 0

    def __getitem__(self, x: DomainPoint) -> float:
        return self.released.get(x, 0.0)

    def __contains__(self, x) -> bool:
        return x in self.released

    def max_error(self, s: Sample) -> Fraction:
        """Largest gap between an estimate and the sample frequency of its bin, exact in the released floats"""
        counts = s.counts()
        bins = set(counts) | set(self.released)
        return max(
            (abs(Fraction(self[x]) - Fraction(counts.get(x, 0), len(s))) for x in bins),
            default=Fraction(0),
        )

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "suppressed": self.suppressed,
            "released": {str(x): f for x, f in sorted(self.released.items())},
        }


def histogram_sample_size(alpha, beta, params: DpParams) -> int:
    return bounds.histogram_sample_size(alpha, beta, params.eps_dp, params.delta_dp)


def stability_histogram(s: Sample, params: DpParams, alpha, beta, seed: Seed) -> BinFrequencies:
    if params.pure:
        raise BadParams("the stability histogram needs delta_dp > 0")
    needed = histogram_sample_size(alpha, beta, params)
    if len(s) < needed:
        raise InsufficientSample(f"stability histogram needs {needed} points at alpha={alpha}, got {len(s)}")

    counts = s.counts()
    bins = sorted(counts)
    noise = seed.rng().laplace(0.0, params.noise_scale, size=len(bins))
    threshold = params.threshold
    released = {}
    for x, z in zip(bins, noise.tolist()):
        noisy = counts[x] + z
        if noisy > threshold:
            released[x] = min(max(noisy / len(s), 0.0), 1.0)
    return BinFrequencies(released, len(s), suppressed=len(bins) - len(released))


def bin_count_sensitivity(s: Sample, s_prime: Sample) -> int:
    """Largest change of any pre-noise bin count between two datasets"""
    counts, other = s.counts(), s_prime.counts()
    return max((abs(counts.get(x, 0) - other.get(x, 0)) for x in set(counts) | set(other)), default=0)


def detection_scale(alpha, g: GrowthFn) -> int:
    """g(ceil(1/alpha))"""
    return g(math.ceil(1 / as_prob(alpha)))


def dp_qg_sample_size(alpha, beta, params: DpParams, g: GrowthFn) -> int:
    big_g = detection_scale(alpha, g)
    return (
        histogram_sample_size(Fraction(1, 4 * big_g), beta, params)
        + math.ceil(DETECTION_CONSTANT * math.log(2 / float(as_prob(beta))) * big_g)
    )


def dp_qg_learn(s: Sample, g: GrowthFn, alpha, params: DpParams, seed: Seed, beta=Fraction(1, 10)) -> Dist:
    """
    Private learner for Q_g.

    Runs the stability histogram at accuracy 1/(4G), G = g(ceil(1/alpha)),
    and returns q_{i,j,g(j)} for the first released indicator bin whose
    frequency reaches 1/(2G); otherwise delta_(0,0). Samples shorter than
    dp_qg_sample_size raise InsufficientSample.
    """
    if len(s) == 0:
        raise EmptySample("the private Q_g learner needs a nonempty sample")
    needed = dp_qg_sample_size(alpha, beta, params, g)
    if len(s) < needed:
        raise InsufficientSample(f"private Q_g learner needs {needed} points at alpha={alpha}, got {len(s)}")
    big_g = detection_scale(alpha, g)
    frequencies = stability_histogram(s, params, Fraction(1, 4 * big_g), beta, seed)
    cutoff = 1 / (2 * big_g)
    for x in sorted(frequencies.released):
        if is_indicator(x) and frequencies[x] >= cutoff:
            return make_qg_member(x.a, indicator_level(x), g)
    return dirac(ORIGIN)


def greedy_packing(members: Sequence[Dist], radius) -> List[Dist]:
    """Maximal packing in list order; it is also a cover at the same radius"""
    if not members:
        raise EmptyClass("cannot pack an empty class")
    radius = as_prob(radius)
    packing: List[Dist] = []
    for q in members:
        if all(tv_distance(q, p) > radius for p in packing):
            packing.append(q)
    return packing


def packing_holds(packing: Sequence[Dist], radius) -> bool:
    radius = as_prob(radius)
    return all(
        tv_distance(packing[a], packing[b]) > radius
        for a in range(len(packing))
        for b in range(a + 1, len(packing))
    )


def cover_radius(members: Sequence[Dist], packing: Sequence[Dist]) -> Fraction:
    """Largest distance from a class member to its nearest packing element"""
    if not packing:
        raise EmptyClass("cover radius of an empty packing is undefined")
    return max((min(tv_distance(q, p) for p in packing) for q in members), default=Fraction(0))


@dataclass
class CoverSelectTrace:
    packing_size: int
    radius: Fraction
    selection: SelectionTrace
    packed: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "packing_size": self.packing_size,
            "radius": str(self.radius),
            "packed": self.packed,
            "selection": self.selection.to_dict(),
        }


def cover_select_sample_size(members: Sequence[Dist], alpha, beta) -> int:
    alpha = as_prob(alpha)
    return bounds.yatracos_sample_size(len(greedy_packing(members, alpha / 6)), alpha / 2, beta)


def cover_then_select_with_trace(
    members: Sequence[Dist],
    alpha,
    beta,
    s: Sample,
    labels: Optional[Sequence[str]] = None,
) -> Tuple[Dist, CoverSelectTrace]:
    alpha = as_prob(alpha)
    packing = greedy_packing(members, alpha / 6)
    needed = bounds.yatracos_sample_size(len(packing), alpha / 2, beta)
    if len(s) < needed:
        raise InsufficientSample(f"cover-then-select needs {needed} points, got {len(s)}")
    position = {q: k for k, q in enumerate(members)}
    packed = [position[q] for q in packing]
    packed_labels = [labels[k] for k in packed] if labels else None
    chosen, selection = select_min(build_yatracos(packing), s, packed_labels)
    return chosen, CoverSelectTrace(len(packing), alpha / 6, selection, packed)


def cover_then_select(members: Sequence[Dist], alpha, beta, s: Sample) -> Dist:
    """Yatracos selection over the alpha/6 greedy cover; error <= 3 dist(p, class) + alpha"""
    return cover_then_select_with_trace(members, alpha, beta, s)[0]
