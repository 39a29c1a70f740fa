from fractions import Fraction

import pytest

from app.core.exceptions import BadParams, EmptyClass, InsufficientSample, SubsetBlowup
from app.learners import (
    LEARNER_NAMES,
    EtaGridLearner,
    FiniteClassLearner,
    FixedLearner,
    RealizableQgLearner,
    RobustLearner,
    SplitPlan,
    additive_split_plan,
    eta_grid_reduce,
    get_learner,
    realizable_qg_learn,
    robustify,
)
from app.learners.eta_grid import eta_grid_sizes, level_count, level_eta
from app.learners.robust import clean_subset_floor, robust_guarantee_factor
from app.models.distribution import Dist, dirac, mix, sample, tv_distance
from app.models.sample import Seed
from app.services.families import ORIGIN, GrowthFn, make_q_prime, make_qg_member
from app.services.privacy import DpParams
from app.utils.bounds import yatracos_sample_size
from tests.conftest import sample_of

SQUARE = GrowthFn.square()
P = Dist({(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})
Q = Dist({(0, 0): Fraction(1, 8), (1, 1): Fraction(7, 8)})


class TestRealizable:
    def test_indicator_names_the_member(self):
        s = sample_of((0, 0), (1, 9), (5, 10))
        assert realizable_qg_learn(s, SQUARE) == make_qg_member(5, 4, SQUARE)

    def test_first_indicator_wins(self):
        s = sample_of((1, 4), (5, 10))
        assert realizable_qg_learn(s, SQUARE) == make_qg_member(1, 1, SQUARE)

    def test_no_indicator_gives_origin(self):
        assert realizable_qg_learn(sample_of((0, 0), (3, 9), (0, 4)), SQUARE) == dirac(ORIGIN)

    def test_fails_exactly_on_q_prime(self):
        learner = RealizableQgLearner(SQUARE)
        q_prime = make_q_prime(5, 4, SQUARE)
        for t in range(5):
            output = learner.learn(sample(q_prime, 300, Seed(1).derive(t)))
            assert tv_distance(output, q_prime) == Fraction(1, 5)

    def test_sample_size(self):
        assert RealizableQgLearner(SQUARE).sample_size(Fraction(1, 2), Fraction(1, 10)) == 10


class TestRobustify:
    def test_all_indicator_sample_selects_the_member(self):
        q = make_qg_member(2, 2, SQUARE)
        plan = SplitPlan(4, 20)
        s = sample_of(*[(2, 6)] * 24)
        chosen, trace = robustify(RealizableQgLearner(SQUARE), s, Fraction(1, 10), Fraction(1, 10), plan, Seed(3))
        assert chosen == q
        assert trace.subsets == 16
        assert trace.hypotheses == 2
        assert trace.failed_subsets == 0

    def test_subset_floor_limits_enumeration(self):
        plan = SplitPlan(4, 10, subset_floor=3)
        assert plan.subset_count == 5

    def test_failed_subsets_are_counted(self):
        inner = FiniteClassLearner([P, Q], Fraction(1, 2), Fraction(1, 2))
        s = sample(P, 13, Seed(4))
        _, trace = robustify(inner, s, Fraction(1, 2), Fraction(1, 2), SplitPlan(3, 10), Seed(5))
        # the empty subset of S1 is the only failure
        assert trace.failed_subsets == 1

    def test_sample_length_must_match_plan(self):
        with pytest.raises(BadParams):
            robustify(RealizableQgLearner(SQUARE), sample_of((0, 0)), Fraction(1, 10), Fraction(1, 10),
                      SplitPlan(4, 20), Seed(1))

    def test_subset_cap(self):
        s = sample(P, 24, Seed(1))
        with pytest.raises(SubsetBlowup):
            robustify(RealizableQgLearner(SQUARE), s, Fraction(1, 10), Fraction(1, 10),
                      SplitPlan(4, 20, subset_cap=8), Seed(1))

    def test_plan_validation(self):
        with pytest.raises(BadParams):
            SplitPlan(4, 10, subset_floor=5)
        with pytest.raises(BadParams):
            SplitPlan(4, 0)

    def test_clean_subset_floor(self):
        assert clean_subset_floor(12, Fraction(1, 10), Fraction(1, 10)) == 11
        assert clean_subset_floor(12, Fraction(9, 10), Fraction(9, 10)) == 0

    def test_guarantee_factor(self):
        assert robust_guarantee_factor("realizable") == 2
        assert robust_guarantee_factor("subtractive", 1) == 6
        with pytest.raises(BadParams):
            robust_guarantee_factor("subtractive")
        with pytest.raises(BadParams):
            robust_guarantee_factor("oracle")

    def test_learner_stretches_s2_to_the_sample(self):
        learner = RobustLearner(RealizableQgLearner(SQUARE), Fraction(1, 10), Fraction(1, 10), plan=SplitPlan(4, 20))
        output, trace = learner.learn_with_trace(sample_of(*[(2, 6)] * 30), Seed(2))
        assert output == make_qg_member(2, 2, SQUARE)
        assert trace["n2"] == 26
        assert trace["guarantee_factor"] == "2"
        with pytest.raises(InsufficientSample):
            learner.learn(sample_of((2, 6)), Seed(2))

    def test_huber_contamination_is_tolerated(self):
        p = make_qg_member(2, 2, SQUARE)
        source = mix([(Fraction(1, 10), dirac((3, 6))), (Fraction(9, 10), p)])
        learner = RobustLearner(RealizableQgLearner(SQUARE), Fraction(1, 10), Fraction(1, 10), plan=SplitPlan(10, 300))
        successes = sum(
            tv_distance(learner.learn(sample(source, 310, Seed(8).derive(t)), Seed(9).derive(t)), p)
            <= Fraction(7, 20)
            for t in range(20)
        )
        assert successes >= 14


class TestEtaGrid:
    def test_grid(self):
        assert level_count(1, Fraction(1, 2)) == 17
        assert level_eta(2, 1, Fraction(1, 2)) == Fraction(1, 8)

    def test_reduce_selects_the_source(self):
        alpha, eps, delta = 1, Fraction(1, 2), Fraction(1, 10)
        learners = [FixedLearner(P if i == 3 else Q, size=5) for i in range(level_count(alpha, eps))]
        s0, sizes = eta_grid_sizes(learners, alpha, eps, delta)
        assert sizes == [5] * 17
        s = sample(P, s0 + sum(sizes), Seed(6))
        chosen, trace = eta_grid_reduce(learners, alpha, s, eps, delta, Seed(7))
        assert chosen == P
        assert trace.slice_sizes == [s0] + sizes
        assert len(set(trace.candidates)) == 2

    def test_callable_level_learners(self):
        alpha, eps, delta = 1, Fraction(1, 2), Fraction(1, 10)
        s0, sizes = eta_grid_sizes(lambda i: FixedLearner(P, size=i), alpha, eps, delta)
        assert sizes == list(range(17))

    def test_scale_applies_once_to_level_sizes(self):
        alpha, eps, delta = 1, Fraction(1, 2), Fraction(1, 10)
        learners = [FixedLearner(P, size=300)] * 17
        s0, sizes = eta_grid_sizes(learners, alpha, eps, delta, Fraction(1, 100))
        assert sizes == [3] * 17
        assert s0 == -(-yatracos_sample_size(17, eps / 4, delta / 2) // 100)

    def test_scaled_robust_levels_keep_their_plan(self):
        alpha, eps, delta = 1, Fraction(1, 2), Fraction(1, 10)
        level_eps, level_delta = eps / 8, delta / 2
        inner = RealizableQgLearner(SQUARE)
        plan = additive_split_plan(level_eps, level_delta, inner.sample_size, Fraction(1, 1000))
        level = RobustLearner(inner, level_eps, level_delta, plan=plan, scale=Fraction(1, 1000))
        _, sizes = eta_grid_sizes([level] * 17, alpha, eps, delta, Fraction(1, 1000))
        assert sizes == [plan.total] * 17

    def test_alpha_below_one(self):
        with pytest.raises(BadParams):
            eta_grid_sizes([FixedLearner(P)], Fraction(1, 2), Fraction(1, 2), Fraction(1, 10))

    def test_insufficient_sample(self):
        learners = [FixedLearner(P, size=5)] * 17
        with pytest.raises(InsufficientSample):
            eta_grid_reduce(learners, 1, sample_of((0, 0)), Fraction(1, 2), Fraction(1, 10), Seed(1))

    def test_learner_checks_level_count(self):
        with pytest.raises(BadParams):
            EtaGridLearner([FixedLearner(P)], 1, Fraction(1, 2), Fraction(1, 10))


class TestFiniteClass:
    def test_empty_class(self):
        with pytest.raises(EmptyClass):
            FiniteClassLearner([], Fraction(1, 5), Fraction(1, 10))

    def test_selects_with_labels(self):
        learner = FiniteClassLearner([P, Q], Fraction(1, 5), Fraction(1, 10), labels=["p", "q"])
        output, trace = learner.learn_with_trace(sample(Q, 500, Seed(2)))
        assert output == Q
        assert trace["labels"] == ["p", "q"]
        assert learner.sample_size(Fraction(1, 5), Fraction(1, 10)) == yatracos_sample_size(2, Fraction(1, 5), Fraction(1, 10))


class TestFactory:
    def test_every_name_builds(self):
        parameters = {
            "growth": SQUARE,
            "inner": RealizableQgLearner(SQUARE),
            "eps": Fraction(1, 2),
            "delta": Fraction(1, 10),
            "level_learners": [FixedLearner(P)] * 17,
            "alpha": 1,
            "beta": Fraction(1, 10),
            "members": [P, Q],
            "params": DpParams(1, Fraction(1, 1000)),
            "output": P,
        }
        for name in LEARNER_NAMES:
            learner = get_learner(name.lower(), parameters)
            assert learner.name == name

    def test_unknown_name(self):
        with pytest.raises(BadParams, match="Unknown learner"):
            get_learner("bogus")
