"""
Exact finite-support distributions over N x N.

Weights are Fractions end to end. Supports are kept in lexicographic
order so iteration, sampling and serialization are deterministic.
"""
from bisect import bisect_right
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from math import lcm
from numbers import Rational
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Tuple, Union

import numpy as np

from ..core.exceptions import BadParams, BadWeights, EmptySet
from .sample import Sample, Seed


class DomainPoint(namedtuple("DomainPoint", ["a", "b"])):
    """A point (a, b) of N x N; tuples compare lexicographically"""
    __slots__ = ()

    def __new__(cls, a: int, b: int):
        if isinstance(a, bool) or isinstance(b, bool) or int(a) != a or int(b) != b or a < 0 or b < 0:
            raise BadParams(f"domain points are pairs of naturals, got ({a!r}, {b!r})")
        return super().__new__(cls, int(a), int(b))

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


PointLike = Union[DomainPoint, Tuple[int, int]]


def as_point(x: PointLike) -> DomainPoint:
    return x if isinstance(x, DomainPoint) else DomainPoint(*x)


def as_prob(value) -> Fraction:
    """Coerce an exact rational; floats are refused"""
    if isinstance(value, bool) or not isinstance(value, (Rational, str)):
        raise BadWeights(f"weights must be exact rationals, got {value!r}")
    return Fraction(value)


class Dist:
    """Immutable probability distribution with exact weights"""
    __slots__ = ("_atoms", "_weights", "_hash")

    def __init__(self, weights: Union[Mapping[PointLike, object], Iterable[Tuple[PointLike, object]]]):
        items = weights.items() if isinstance(weights, Mapping) else weights
        merged: Dict[DomainPoint, Fraction] = {}
        for x, w in items:
            w = as_prob(w)
            if w < 0:
                raise BadWeights(f"negative weight {w} at {x}")
            x = as_point(x)
            merged[x] = merged.get(x, Fraction(0)) + w
        total = sum(merged.values(), Fraction(0))
        if total != 1:
            raise BadWeights(f"weights sum to {total}, not 1")
        self._atoms: Tuple[Tuple[DomainPoint, Fraction], ...] = tuple(
            (x, w) for x, w in sorted(merged.items()) if w > 0
        )
        self._weights = dict(self._atoms)
        self._hash = hash(self._atoms)

    def __reduce__(self):
        return (Dist, (self._atoms,))

    # Mapping-like access

    def __getitem__(self, x: PointLike) -> Fraction:
        return self._weights.get(x, Fraction(0))

    def __contains__(self, x) -> bool:
        return x in self._weights

    def __iter__(self) -> Iterator[DomainPoint]:
        return (x for x, _ in self._atoms)

    def __len__(self) -> int:
        return len(self._atoms)

    def items(self) -> Tuple[Tuple[DomainPoint, Fraction], ...]:
        return self._atoms

    @property
    def support(self) -> Tuple[DomainPoint, ...]:
        return tuple(x for x, _ in self._atoms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return self._hash == other._hash and self._atoms == other._atoms

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{x}: {w}" for x, w in self._atoms)
        return f"Dist({{{body}}})"

    # Canonical text form: one "a b num/den" line per atom, lexicographic

    def to_text(self) -> str:
        return "".join(f"{x.a} {x.b} {w.numerator}/{w.denominator}\n" for x, w in self._atoms)

    @classmethod
    def from_text(cls, text: str) -> "Dist":
        atoms = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise BadParams(f"line {lineno}: expected 'a b num/den', got {line!r}")
            try:
                atoms.append(((int(parts[0]), int(parts[1])), Fraction(parts[2])))
            except ValueError as e:
                raise BadParams(f"line {lineno}: {e}") from e
        return cls(atoms)


@dataclass(frozen=True)
class YatracosSet:
    """
    A possibly infinite event over N x N.

    Denotes `listed` plus, when `outside_flag` is on, every point outside
    `reference_support`.
    """
    listed: FrozenSet[DomainPoint]
    outside_flag: bool = False
    reference_support: FrozenSet[DomainPoint] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "listed", frozenset(as_point(x) for x in self.listed))
        object.__setattr__(self, "reference_support", frozenset(as_point(x) for x in self.reference_support))
        if not self.listed <= self.reference_support and self.outside_flag:
            raise BadParams("listed points must lie inside the reference support")

    def __contains__(self, x) -> bool:
        if x in self.listed:
            return True
        return self.outside_flag and x not in self.reference_support


def dirac(x: PointLike) -> Dist:
    return Dist({as_point(x): 1})


def uniform(points: Iterable[PointLike]) -> Dist:
    points = {as_point(x) for x in points}
    if not points:
        raise EmptySet("uniform distribution over an empty set")
    w = Fraction(1, len(points))
    return Dist({x: w for x in points})


def mix(components: Iterable[Tuple[object, Dist]]) -> Dist:
    """Exact convex combination; weights must be nonnegative and sum to 1"""
    components = [(as_prob(w), p) for w, p in components]
    if any(w < 0 for w, _ in components):
        raise BadWeights("mixture weights must be nonnegative")
    total = sum((w for w, _ in components), Fraction(0))
    if total != 1:
        raise BadWeights(f"mixture weights sum to {total}, not 1")
    merged: Dict[DomainPoint, Fraction] = {}
    for w, p in components:
        if w == 0:
            continue
        for x, px in p.items():
            merged[x] = merged.get(x, Fraction(0)) + w * px
    return Dist(merged)


def tv_distance(p: Dist, q: Dist) -> Fraction:
    union = set(p.support) | set(q.support)
    return sum((abs(p[x] - q[x]) for x in union), Fraction(0)) / 2


def mass_of(p: Dist, event: YatracosSet) -> Fraction:
    total = Fraction(0)
    for x, w in p.items():
        if x in event:
            total += w
    return total


def _cumulative(p: Dist) -> Tuple[List[int], int]:
    """Integer cumulative numerators over a common denominator"""
    den = lcm(*(w.denominator for _, w in p.items()))
    return list(accumulate(w.numerator * (den // w.denominator) for _, w in p.items())), den


def sample(p: Dist, n: int, seed: Seed) -> Sample:
    """n i.i.d. draws by exact inverse CDF over the lexicographic support"""
    if n < 0:
        raise BadParams(f"sample size must be nonnegative, got {n}")
    support = p.support
    if n == 0:
        return Sample((), "S")
    cumulative, den = _cumulative(p)
    rng = seed.rng()
    if den < 2 ** 63:
        draws = rng.integers(0, den, size=n, dtype=np.int64)
        index = np.searchsorted(np.asarray(cumulative, dtype=np.int64), draws, side="right")
        return Sample(tuple(support[k] for k in index.tolist()), "S")
    # Denominators beyond int64: concatenate 62-bit words and bisect on exact integers
    bits = den.bit_length() + 64
    words = (bits + 61) // 62
    points = []
    for _ in range(n):
        u = 0
        for chunk in rng.integers(0, 2 ** 62, size=words, dtype=np.int64).tolist():
            u = (u << 62) | chunk
        points.append(support[bisect_right(cumulative, u % den)])
    return Sample(tuple(points), "S")


def parse_point(text: str) -> DomainPoint:
    """Parse 'a,b' (parentheses optional)"""
    body = text.strip().strip("()")
    try:
        a, b = (int(part) for part in body.split(","))
    except ValueError as e:
        raise BadParams(f"expected a point 'a,b', got {text!r}") from e
    return DomainPoint(a, b)


def parse_dist_atoms(text: str) -> Dist:
    """Parse the compact config form 'a,b=w a,b=w'"""
    atoms = []
    for token in text.split():
        point, _, weight = token.partition("=")
        if not weight:
            raise BadParams(f"expected 'a,b=w', got {token!r}")
        x = parse_point(point)
        try:
            atoms.append((x, Fraction(weight)))
        except (ValueError, ZeroDivisionError) as e:
            raise BadParams(f"bad weight in {token!r}: {e}") from e
    return Dist(atoms)


def format_dist_atoms(p: Dist) -> str:
    """Inverse of parse_dist_atoms"""
    return " ".join(f"{x.a},{x.b}={w}" for x, w in p.items())
