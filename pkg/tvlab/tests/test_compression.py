from fractions import Fraction

import pytest

from app.core.exceptions import BadMessage, BadParams, EmptySample
from app.learners import CompressionLearner
from app.models.distribution import DomainPoint, dirac, sample
from app.models.sample import Seed
from app.services.compression import (
    CompressionMessage,
    compression_round_trip,
    fallback_outside_sample,
    qg_decode,
    qg_encode,
    qg_member_index,
)
from app.services.families import ORIGIN, GrowthFn, make_qg_member
from tests.conftest import sample_of

SQUARE = GrowthFn.square()


def test_encoder_keeps_the_indicator():
    message = qg_encode(sample_of((0, 0), (5, 6), (1, 5)))
    assert message.points == (DomainPoint(5, 6),)
    assert message.bits == ()
    assert str(message) == "(5,6)"


def test_encoder_falls_back_to_origin():
    s = sample_of((1, 3), (2, 5))
    message = qg_encode(s)
    assert message.points == (ORIGIN,)
    assert fallback_outside_sample(message, s)
    assert not fallback_outside_sample(qg_encode(sample_of((0, 0))), sample_of((0, 0)))


def test_empty_sample():
    with pytest.raises(EmptySample):
        qg_encode(sample_of())


def test_decoder_checks_message_size():
    with pytest.raises(BadMessage):
        qg_decode(CompressionMessage((ORIGIN, ORIGIN)), SQUARE)
    assert qg_decode(CompressionMessage((ORIGIN,)), SQUARE) == dirac(ORIGIN)


def test_round_trip_recovers_the_generator():
    q = make_qg_member(9, 3, SQUARE)
    s = sample(q, 400, Seed(12))
    assert DomainPoint(9, 8) in s.points
    assert qg_decode(qg_encode(s), SQUARE) == q


def test_member_index():
    assert qg_member_index(make_qg_member(6, 2, SQUARE), SQUARE) == (6, 2)
    with pytest.raises(BadParams):
        qg_member_index(dirac((0, 0)), SQUARE)
    with pytest.raises(BadParams):
        qg_member_index(make_qg_member(6, 2, GrowthFn.scaled_square(1)), SQUARE)


def test_round_trip_success_rate():
    summary = compression_round_trip(make_qg_member(1, 2, SQUARE), SQUARE, Fraction(1, 3), 200, Seed(4))
    assert summary.n == 90
    assert summary.rate >= Fraction(2, 3)
    assert 0.9 < summary.interval[0] < summary.interval[1]
    assert summary.to_dict()["trials"] == 200


def test_round_trip_needs_trials():
    with pytest.raises(BadParams):
        compression_round_trip(make_qg_member(1, 2, SQUARE), SQUARE, Fraction(1, 3), 0, Seed(4))


def test_learner_trace():
    learner = CompressionLearner(SQUARE)
    output, trace = learner.learn_with_trace(sample_of((3, 6), (0, 0)))
    assert output == make_qg_member(3, 2, SQUARE)
    assert trace == {"message": "(3,6)", "fallback_outside_sample": False}
    assert learner.sample_size(Fraction(1, 3)) == 90
