from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import EmptyList, EmptySample
from app.models.distribution import DomainPoint, Dist, dirac, sample, tv_distance
from app.models.sample import Sample, Seed
from app.services.selection import a_distance, build_yatracos, empirical_a_distance, select_min
from tests.conftest import brute_empirical_a_distance, dists, sample_of


def _hyps():
    return [
        Dist({(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}),
        Dist({(0, 0): Fraction(1, 4), (1, 1): Fraction(3, 4)}),
        Dist({(0, 0): Fraction(1, 2), (2, 2): Fraction(1, 2)}),
    ]


class TestBuild:
    def test_one_set_per_ordered_pair(self):
        sets = build_yatracos(_hyps())
        assert len(sets) == 3
        assert len(sets.sets) == 6
        assert all(b.outside_flag for b in sets.sets)
        assert sets.reference_support == {DomainPoint(0, 0), DomainPoint(1, 1), DomainPoint(2, 2)}

    def test_duplicates_collapse(self):
        h = _hyps()
        assert len(build_yatracos([h[0], h[1], h[0]])) == 2

    def test_empty(self):
        with pytest.raises(EmptyList):
            build_yatracos([])

    def test_single_hypothesis_has_no_sets(self):
        sets = build_yatracos([dirac((0, 0))])
        assert sets.sets == []
        assert a_distance(dirac((0, 0)), dirac((1, 1)), sets) == 0


class TestADistance:
    @given(st.lists(dists(), min_size=2, max_size=4))
    def test_realizes_tv_between_listed_hypotheses(self, hyps):
        sets = build_yatracos(hyps)
        for p in sets.hypotheses:
            for q in sets.hypotheses:
                assert a_distance(p, q, sets) == tv_distance(p, q)

    @given(st.lists(dists(), min_size=2, max_size=4), dists())
    def test_never_exceeds_tv(self, hyps, p):
        sets = build_yatracos(hyps)
        assert a_distance(p, sets.hypotheses[0], sets) <= tv_distance(p, sets.hypotheses[0])

    @settings(deadline=None)
    @given(st.lists(dists(), min_size=2, max_size=4), st.lists(
        st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=30,
    ))
    def test_empirical_matches_brute_force(self, hyps, raw_points):
        sets = build_yatracos(hyps)
        points = [DomainPoint(*x) for x in raw_points]
        for q in sets.hypotheses:
            expected = brute_empirical_a_distance(q, points, sets.hypotheses)
            assert empirical_a_distance(q, Sample(tuple(points)), sets) == expected


class TestSelectMin:
    def test_exact_frequencies_pick_the_matching_hypothesis(self):
        sets = build_yatracos(_hyps())
        s = sample_of((0, 0), (1, 1), (1, 1), (1, 1))
        chosen, trace = select_min(sets, s)
        assert chosen == _hyps()[1]
        assert trace.chosen == 1
        assert trace.scores[1] == 0

    def test_ties_go_to_the_lowest_index(self):
        sets = build_yatracos([dirac((0, 0)), dirac((1, 1))])
        chosen, trace = select_min(sets, sample_of((0, 0), (1, 1)))
        assert trace.scores[0] == trace.scores[1]
        assert chosen == dirac((0, 0))

    def test_points_outside_every_support_count(self):
        sets = build_yatracos([dirac((0, 0)), dirac((1, 1))])
        _, trace = select_min(sets, sample_of((5, 5), (5, 5), (1, 1)))
        # (5,5) lands in both outside-flagged sets
        assert trace.scores == [Fraction(1), Fraction(2, 3)]

    def test_labels_travel_with_the_trace(self):
        sets = build_yatracos(_hyps())
        _, trace = select_min(sets, sample_of((2, 2)), labels=["a", "b", "c"])
        assert trace.to_dict()["labels"] == ["a", "b", "c"]
        assert trace.to_dict()["chosen"] == 2

    def test_empty_sample(self):
        with pytest.raises(EmptySample):
            select_min(build_yatracos(_hyps()), Sample(()))

    def test_large_sample_finds_the_source(self):
        hyps = _hyps()
        s = sample(hyps[2], 2000, Seed(9))
        chosen, _ = select_min(build_yatracos(hyps), s)
        assert chosen == hyps[2]


class TestYatracosGeometry:
    @given(st.lists(dists(max_atoms=4, grid=4), min_size=2, max_size=4))
    def test_opposite_sets_cover_the_domain(self, hyps):
        sets = build_yatracos(hyps)
        # the 6 x 6 grid reaches past every reference support
        grid = [DomainPoint(a, b) for a in range(6) for b in range(6)]
        for (i, j), b_ij in sets.yatracos.items():
            b_ji = sets.yatracos[(j, i)]
            assert all(x in b_ij or x in b_ji for x in grid)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(dists(max_atoms=4, grid=3), min_size=1, max_size=4),
        st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=12),
        st.integers(2, 4),
    )
    def test_duplicating_the_sample_keeps_the_choice(self, hyps, points, k):
        sets = build_yatracos(hyps)
        s = sample_of(*points)
        repeated = sample_of(*(x for x in points for _ in range(k)))
        chosen, trace = select_min(sets, s)
        again, trace_again = select_min(sets, repeated)
        assert again == chosen
        assert trace_again.scores == trace.scores
