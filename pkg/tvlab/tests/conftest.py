"""Shared fixtures and brute-force oracles"""
from fractions import Fraction
from itertools import chain, combinations
from typing import Iterable, List, Sequence

import pytest
from hypothesis import strategies as st

from app.models.distribution import DomainPoint, Dist
from app.models.sample import Sample


def powerset(points: Sequence) -> Iterable[tuple]:
    return chain.from_iterable(combinations(points, r) for r in range(len(points) + 1))


def brute_tv(p: Dist, q: Dist) -> Fraction:
    """max over every event A of p(A) - q(A)"""
    union = sorted(set(p.support) | set(q.support))
    return max(sum((p[x] - q[x] for x in event), Fraction(0)) for event in powerset(union))


def brute_empirical_a_distance(q: Dist, points: List[DomainPoint], hyps: Sequence[Dist]) -> Fraction:
    """A-distance between q and the empirical measure of points, Yatracos events built pointwise"""
    universe = sorted(set(points) | {x for h in hyps for x in h.support} | set(q.support))
    n = len(points)
    best = Fraction(0)
    for a, ha in enumerate(hyps):
        for b, hb in enumerate(hyps):
            if a == b:
                continue
            event = {x for x in universe if ha[x] >= hb[x]}
            model = sum((q[x] for x in event), Fraction(0))
            empirical = Fraction(sum(1 for x in points if x in event), n)
            best = max(best, abs(model - empirical))
    return best


@st.composite
def dists(draw, max_atoms: int = 6, grid: int = 4):
    """Small distributions on a grid x grid corner of N x N with random exact weights"""
    points = draw(st.lists(
        st.tuples(st.integers(0, grid - 1), st.integers(0, grid - 1)),
        min_size=1, max_size=max_atoms, unique=True,
    ))
    raw = draw(st.lists(st.integers(1, 20), min_size=len(points), max_size=len(points)))
    total = sum(raw)
    return Dist({x: Fraction(w, total) for x, w in zip(points, raw)})


def sample_of(*points) -> Sample:
    return Sample(tuple(DomainPoint(*x) for x in points))


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "reports"


@pytest.fixture
def config_text(out_dir):
    """Build a config document with a small, serial, untimed [experiment] section"""

    def build(kind: str, body: str, trials: int = 20, seed: int = 7, name: str = None) -> str:
        header = [
            "[experiment]",
            f"kind = {kind}",
            f"trials = {trials}",
            f"seed = {seed}",
            "workers = 1",
            "timing = false",
            f"out = {out_dir}",
        ]
        if name:
            header.append(f"name = {name}")
        return "\n".join(header) + "\n\n" + body.strip() + "\n"

    return build
