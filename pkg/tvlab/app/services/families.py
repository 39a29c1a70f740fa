"""
Distribution classes built on N x N.

q_{i,j,k} puts mass 1 - 1/j on (0,0), spreads 1/j - 1/k uniformly over
A_i x {2j+1} and keeps 1/k on the indicator atom (i, 2j+2). Q_g collects
q_{i,j,g(j)}; the packing class fixes the uniform level at gamma.
"""
import enum
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from ..core.config import settings
from ..core.exceptions import BadIndex, BadParams, TooLarge
from ..models.distribution import DomainPoint, Dist, as_prob, dirac, mix, uniform

logger = logging.getLogger(__name__)

ORIGIN = DomainPoint(0, 0)


class GrowthKind(str, enum.Enum):
    SQUARE = "square"
    SCALED_SQUARE = "scaled_square"
    TABLE = "table"


@dataclass(frozen=True)
class GrowthFn:
    """Growth function g: N -> N used to size the indicator mass 1/g(j)"""
    kind: GrowthKind = GrowthKind.SQUARE
    alpha: Optional[Fraction] = None
    table: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def square(cls) -> "GrowthFn":
        return cls(GrowthKind.SQUARE)

    @classmethod
    def scaled_square(cls, alpha) -> "GrowthFn":
        alpha = as_prob(alpha)
        if alpha <= 0:
            raise BadParams(f"scaled_square needs alpha > 0, got {alpha}")
        return cls(GrowthKind.SCALED_SQUARE, alpha=alpha)

    @classmethod
    def from_table(cls, mapping: Dict[int, int]) -> "GrowthFn":
        if not mapping:
            raise BadParams("growth table is empty")
        return cls(GrowthKind.TABLE, table=tuple(sorted((int(t), int(v)) for t, v in mapping.items())))

    def __call__(self, t: int) -> int:
        if self.kind is GrowthKind.SQUARE:
            return t * t
        if self.kind is GrowthKind.SCALED_SQUARE:
            return math.ceil(32 * self.alpha * t * t)
        values = dict(self.table)
        if t not in values:
            raise BadParams(f"growth table has no entry for t={t}")
        return values[t]

    def certify(self, j: int) -> int:
        """Return g(j) after checking g(j) >= j"""
        value = self(j)
        if value < j:
            raise BadParams(f"growth function gives g({j}) = {value} < {j}")
        return value

    def __str__(self) -> str:
        if self.kind is GrowthKind.SQUARE:
            return "square"
        if self.kind is GrowthKind.SCALED_SQUARE:
            return f"scaled_square({self.alpha})"
        return "table(" + ",".join(f"{t}:{v}" for t, v in self.table) + ")"

    @classmethod
    def parse(cls, text: str) -> "GrowthFn":
        text = text.strip().lower()
        if text == "square":
            return cls.square()
        match = re.fullmatch(r"scaled_square\(([^)]+)\)", text)
        if match:
            try:
                return cls.scaled_square(Fraction(match.group(1).strip()))
            except (ValueError, ZeroDivisionError) as e:
                raise BadParams(f"bad alpha in {text!r}") from e
        match = re.fullmatch(r"table\(([^)]*)\)", text)
        if match:
            try:
                pairs = [entry.split(":") for entry in match.group(1).split(",") if entry.strip()]
                return cls.from_table({int(t): int(v) for t, v in pairs})
            except ValueError as e:
                raise BadParams(f"bad growth table {text!r}") from e
        raise BadParams(f"unknown growth function {text!r}")


# Subset enumeration: A_i = {b + 1 : bit b of i is set}

def decode_subset(i: int) -> FrozenSet[int]:
    if i < 0:
        raise BadIndex(f"subset index must be nonnegative, got {i}")
    return frozenset(b + 1 for b in range(i.bit_length()) if (i >> b) & 1)


def encode_subset(subset: Iterable[int]) -> int:
    index = 0
    for element in set(subset):
        if element < 1:
            raise BadIndex(f"subset elements start at 1, got {element}")
        index |= 1 << (element - 1)
    return index


def is_indicator(x: DomainPoint) -> bool:
    """(a, 2j+2) with a >= 1 and j >= 1"""
    return x.a >= 1 and x.b >= 4 and x.b % 2 == 0


def indicator_level(x: DomainPoint) -> int:
    return (x.b - 2) // 2


@lru_cache(maxsize=65536)
def make_qijk(i: int, j: int, k: int) -> Dist:
    if j < 1 or k < j:
        raise BadParams(f"q_(i,j,k) needs k >= j >= 1, got j={j}, k={k}")
    spread = Fraction(1, j) - Fraction(1, k)
    components = [(1 - Fraction(1, j), dirac(ORIGIN)), (Fraction(1, k), dirac((i, 2 * j + 2)))]
    if spread > 0:
        subset = decode_subset(i)
        if not subset:
            raise BadIndex(f"index {i} decodes to the empty set")
        components.insert(1, (spread, uniform((a, 2 * j + 1) for a in subset)))
    return mix(components)


def make_qg_member(i: int, j: int, g: GrowthFn) -> Dist:
    return make_qijk(i, j, g.certify(j))


def make_q_prime(i: int, j: int, g: GrowthFn) -> Dist:
    """q_{i,j,g(j)} with its indicator atom removed and the rest renormalized"""
    k = g(j)
    if k <= 1:
        raise BadParams(f"q' needs g(j) > 1, got g({j}) = {k}")
    g.certify(j)
    scale = 1 / (1 - Fraction(1, k))
    spread = Fraction(1, j) - Fraction(1, k)
    components = [(scale * (1 - Fraction(1, j)), dirac(ORIGIN))]
    if spread > 0:
        subset = decode_subset(i)
        if not subset:
            raise BadIndex(f"index {i} decodes to the empty set")
        components.append((scale * spread, uniform((a, 2 * j + 1) for a in subset)))
    return mix(components)


def make_q_prime_known_eta(i: int, j: int) -> Dist:
    """(1 - 1/j) delta_(0,0) + (1/j) U_{A_i x {2j+1}}, the known-eta variant"""
    if j < 1:
        raise BadParams(f"j must be >= 1, got {j}")
    subset = decode_subset(i)
    if not subset:
        raise BadIndex(f"index {i} decodes to the empty set")
    return mix([
        (1 - Fraction(1, j), dirac(ORIGIN)),
        (Fraction(1, j), uniform((a, 2 * j + 1) for a in subset)),
    ])


def make_packing_member(subset: Iterable[int], gamma, j: int) -> Dist:
    subset = frozenset(subset)
    gamma = as_prob(gamma)
    if not subset:
        raise BadParams("packing members need a nonempty subset")
    if not 0 < gamma < 1:
        raise BadParams(f"gamma must lie in (0, 1), got {gamma}")
    return mix([
        (1 - gamma, dirac(ORIGIN)),
        (gamma, uniform((a, 2 * j + 1) for a in subset)),
    ])


def gamma_of(j: int, g: GrowthFn) -> Fraction:
    k = g(j)
    if k <= 1:
        raise BadParams(f"gamma(j) needs g(j) > 1, got g({j}) = {k}")
    return (Fraction(1, j) - Fraction(1, k)) / (8 * (1 - Fraction(1, k)))


def gamma_exceeds_threshold(j: int, g: GrowthFn, alpha) -> bool:
    """gamma(j) > alpha/g(j) + 1/g(j)"""
    k = g(j)
    return gamma_of(j, g) > (as_prob(alpha) + 1) / k


def threshold_inequality(j: int, g: GrowthFn, alpha) -> bool:
    """8(alpha+2)/g(j) - 8(alpha+1)/g(j)^2 < 1/j, sufficient for gamma_exceeds_threshold"""
    alpha = as_prob(alpha)
    k = Fraction(g(j))
    return 8 * (alpha + 2) / k - 8 * (alpha + 1) / (k * k) < Fraction(1, j)


# Family specs

@dataclass(frozen=True)
class QgFamily:
    growth: GrowthFn
    i_values: Tuple[int, ...]
    j_values: Tuple[int, ...]


@dataclass(frozen=True)
class PackingFamily:
    gamma: Fraction
    k: int
    j: int

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise BadParams(f"packing gamma must lie in (0, 1), got {self.gamma}")
        if self.k < 1:
            raise BadParams(f"packing k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class ExplicitFamily:
    members: Tuple[Dist, ...] = field(default_factory=tuple)
    labels: Tuple[str, ...] = ()


FamilyDescriptor = Union[QgFamily, PackingFamily, ExplicitFamily]


def qg_label(i: int, j: int) -> str:
    return f"q[i={i},j={j}]"


def q_prime_label(i: int, j: int) -> str:
    return f"qprime[i={i},j={j}]"


def packing_label(subset: Iterable[int]) -> str:
    return "packing[A={" + ",".join(str(a) for a in sorted(subset)) + "}]"


def family_size(family: FamilyDescriptor) -> int:
    if isinstance(family, QgFamily):
        return len(set(family.i_values)) * len(set(family.j_values))
    if isinstance(family, PackingFamily):
        return 2 ** (4 * family.k) - 1
    return len(family.members)


def enumerate_family(family: FamilyDescriptor, cap: Optional[int] = None) -> List[Tuple[str, Dist]]:
    """Deterministic, duplicate-free listing of a finite family slice"""
    cap = cap or settings.FAMILY_CAP
    size = family_size(family)
    if size > cap:
        raise TooLarge(f"family listing has {size} members, cap is {cap}")

    if isinstance(family, QgFamily):
        listing = [
            (qg_label(i, j), make_qg_member(i, j, family.growth))
            for i, j in product(sorted(set(family.i_values)), sorted(set(family.j_values)))
        ]
    elif isinstance(family, PackingFamily):
        listing = []
        for index in range(1, 2 ** (4 * family.k)):
            subset = decode_subset(index)
            listing.append((packing_label(subset), make_packing_member(subset, family.gamma, family.j)))
    else:
        labels = family.labels or tuple(f"member[{k}]" for k in range(len(family.members)))
        if len(labels) != len(family.members):
            raise BadParams("explicit family needs one label per member")
        listing = list(zip(labels, family.members))

    seen = set()
    unique = []
    for label, dist in listing:
        if dist in seen:
            logger.debug("dropping duplicate family member %s", label)
            continue
        seen.add(dist)
        unique.append((label, dist))
    return unique
