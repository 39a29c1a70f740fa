from fractions import Fraction
from pathlib import Path

import pandas as pd
import pytest

from app.core.exceptions import ConfigError, TooLarge
from app.learners import FixedLearner
from app.models.distribution import dirac
from app.models.sample import Seed
from app.schemas.experiment import EXPERIMENT_KINDS
from app.schemas.report import CSV_COLUMNS
from app.services.config_loader import load_config, validate_config
from app.services.evaluation import Labeler, SuccessRule, evaluate_learner
from app.services.experiment_runner import list_experiments, run_experiment
from app.services.families import GrowthFn, make_qg_member
from app.services.reports import verify_report

REALIZABLE = """
[family]
type = qg
i = 1,5
j = 1,2

[learner]
epsilon = 1/2
delta = 1/10
n = 10
"""

CONFIG_DIR = Path(__file__).parent.parent / "configs"

def _run(config_text, kind, body, **kwargs):
    return run_experiment(validate_config(config_text(kind, body, **kwargs)))


class TestLabeler:
    def test_registered_labels_are_reused(self):
        labeler = Labeler({"origin": dirac((0, 0))})
        assert labeler.register("again", dirac((0, 0))) == "origin"
        assert labeler.label(dirac((0, 0))) == "origin"

    def test_label_collisions_get_a_suffix(self):
        labeler = Labeler()
        assert labeler.register("x", dirac((0, 0))) == "x"
        assert labeler.register("x", dirac((1, 1))) == "x#2"
        assert labeler.table == {"x": "0 0 1/1\n", "x#2": "1 1 1/1\n"}

    def test_unregistered_distributions_get_a_content_hash(self):
        label = Labeler().label(dirac((4, 4)))
        assert label.startswith("dist-") and len(label) == 17


class TestEvaluate:
    def test_fixed_learner_scores_exactly(self):
        q = make_qg_member(1, 2, GrowthFn.square())
        block = evaluate_learner(FixedLearner(dirac((0, 0))), q, q, 5, 3, Fraction(1, 4), Seed(1), timing=False)
        assert block.failures == 5
        assert block.max_error == "1/2"
        assert [r.trial for r in block.reports] == [0, 1, 2, 3, 4]
        assert all(r.micros == 0 for r in block.reports)
        assert block.learner_parameters == {"label": "fixed"}

    def test_allowed_outputs_rule(self):
        rule = SuccessRule(allowed=(dirac((0, 0)),))
        assert rule(dirac((0, 0)), Fraction(1))
        assert not rule(dirac((1, 1)), Fraction(0))
        assert rule.describe() == "output in 1 allowed distributions"


class TestRuns:
    def test_registry_covers_every_kind(self):
        assert {info.kind for info in list_experiments()} == set(EXPERIMENT_KINDS)

    def test_realizable_run_writes_verifiable_reports(self, config_text, out_dir):
        result = _run(config_text, "realizable-qg", REALIZABLE, trials=50)
        assert result.accepted
        assert result.exit_code == 0
        frame = pd.read_csv(out_dir / "realizable-qg.csv", dtype=str)
        assert list(frame.columns) == CSV_COLUMNS
        assert len(frame) == 200
        assert (frame["micros"] == "0").all()
        assert [b.trial_start for b in result.summary.blocks] == [0, 50, 100, 150]
        report = verify_report(out_dir / "realizable-qg.csv")
        assert report.ok and report.checked == 200

    def test_reruns_are_byte_identical(self, config_text, out_dir):
        _run(config_text, "realizable-qg", REALIZABLE, name="first")
        _run(config_text, "realizable-qg", REALIZABLE, name="second")
        assert (out_dir / "first.csv").read_bytes() == (out_dir / "second.csv").read_bytes()

    def test_worker_pool_matches_serial_run(self, config_text, out_dir):
        serial = config_text("realizable-qg", REALIZABLE, name="serial")
        pooled = serial.replace("workers = 1", "workers = 2").replace("name = serial", "name = pooled")
        run_experiment(validate_config(serial))
        run_experiment(validate_config(pooled))
        assert (out_dir / "serial.csv").read_bytes() == (out_dir / "pooled.csv").read_bytes()

    def test_failed_acceptance(self, config_text):
        result = _run(config_text, "realizable-qg", REALIZABLE.replace("n = 10", "n = 0"))
        assert not result.accepted
        assert result.exit_code == 1

    def test_tampered_report_is_caught(self, config_text, out_dir):
        _run(config_text, "realizable-qg", REALIZABLE, trials=5)
        path = out_dir / "realizable-qg.csv"
        frame = pd.read_csv(path, dtype=str)
        frame.loc[0, "error_num"] = "7"
        frame.to_csv(path, index=False, lineterminator="\n")
        report = verify_report(path)
        assert not report.ok
        assert report.mismatches[0].startswith("trial 0: logged error")

    def test_subtractive_attack_error_is_exact(self, config_text):
        result = _run(config_text, "subtractive-attack", """
[family]
i = 5
j = 4
[learner]
alpha = 1
epsilon = 1/10
""", trials=10)
        assert result.accepted
        block = result.summary.blocks[0]
        assert {r.error for r in block.reports} == {Fraction(1, 5)}
        assert block.notes["bound"] == "13/80"
        assert result.summary.flags["exceeds_robust_bound"]

    def test_known_eta_construction(self, config_text):
        result = _run(config_text, "subtractive-attack", """
[family]
i = 5
j = 2
[learner]
construction = known_eta
alpha = 1
epsilon = 1/10
n = 50
""", trials=5)
        assert result.accepted
        block = result.summary.blocks[0]
        assert block.target_label == "qprime_known_eta[i=5,j=2]"
        assert block.notes == {"expected_error": "1/2", "eta": "1/64", "bound": "3/64"}

    def test_additive_huber(self, config_text):
        result = _run(config_text, "additive-huber", """
[family]
i = 1..4
j = 1,2
target = q[i=2,j=2]
[adversary]
kind = huber
eta = 1/10
add = 3,6=1
[learner]
epsilon = 1/10
delta = 1/10
n1 = 6
n2 = 120
tolerance = 3/20
min_success = 1/2
""", trials=20)
        assert result.accepted
        assert result.summary.flags["subsets"] == 64
        assert result.summary.flags["guarantee_factor"] == "2"
        assert "source[huber]" in result.summary.label_table

    def test_yatracos_finite(self, config_text):
        result = _run(config_text, "yatracos-finite", """
[family]
type = explicit
members = 0,0=1/2 1,1=1/2; 0,0=1/4 1,1=3/4; 0,0=1/2 2,2=1/2
target = member[1]
[learner]
epsilon = 1/5
delta = 1/10
n = 400
""", trials=30)
        assert result.accepted
        assert result.summary.flags["distance_to_class"] == "0"

    def test_eta_grid(self, config_text):
        result = _run(config_text, "eta-grid", """
[family]
i = 1,2
j = 2
target = q[i=1,j=2]
[learner]
alpha = 1
epsilon = 1/2
delta = 1/10
""", trials=5)
        assert result.accepted
        assert result.summary.flags["levels"] == 17

    def test_eta_grid_needs_alpha_at_least_one(self, config_text):
        with pytest.raises(ConfigError):
            _run(config_text, "eta-grid", """
[family]
i = 1
j = 2
[learner]
alpha = 1/2
epsilon = 1/2
delta = 1/10
""")

    def test_compression_roundtrip(self, config_text):
        result = _run(config_text, "compression-roundtrip", """
[family]
i = 1,3
j = 2,4
[learner]
epsilon = 1/3
""", trials=30)
        assert result.accepted
        assert all(block.n == 90 for block in result.summary.blocks)
        assert "fallback_outside_sample" in result.summary.flags

    def test_dp_histogram_blocks_are_counted_not_recomputed(self, config_text, out_dir):
        result = _run(config_text, "dp-histogram", """
[family]
type = explicit
members = 0,0=1/5 1,0=1/5 2,0=1/5 3,0=1/5 4,0=1/5
[learner]
alpha = 1/10
beta = 1/10
eps_dp = 1
delta_dp = 1/1000
""", trials=20)
        assert result.accepted
        assert result.summary.flags["max_sensitivity"] == 1
        report = verify_report(out_dir / "dp-histogram.csv")
        assert report.ok and report.skipped == 20 and report.checked == 0

    def test_dp_qg(self, config_text):
        result = _run(config_text, "dp-qg", """
[family]
i = 1
j = 1,2
[learner]
alpha = 1/2
beta = 1/10
eps_dp = 1
delta_dp = 1/1000
""", trials=10)
        assert result.accepted
        assert len(result.summary.blocks) == 2

    def test_cover_select(self, config_text):
        result = _run(config_text, "cover-select", """
[family]
type = explicit
members = 0,0=1/2 1,1=1/2; 0,0=51/100 1,1=49/100; 0,0=1
target = member[1]
[learner]
alpha = 3/10
beta = 1/10
""", trials=10)
        assert result.accepted
        assert result.summary.flags["packing_size"] == 2
        assert result.summary.flags["cover_radius"] == "1/100"

    def test_target_required_for_many_members(self, config_text):
        with pytest.raises(ConfigError, match="target"):
            _run(config_text, "yatracos-finite", """
[family]
i = 1,2
[learner]
epsilon = 1/5
delta = 1/10
""")

    def test_qg_only_experiments(self, config_text):
        with pytest.raises(ConfigError, match="qg family"):
            _run(config_text, "compression-roundtrip", """
[family]
type = explicit
members = 0,0=1
[learner]
epsilon = 1/3
""")

    def test_family_cap(self, config_text):
        with pytest.raises(TooLarge):
            _run(config_text, "yatracos-finite", """
[family]
i = 1..20
j = 1..20
cap = 10
target = q[i=1,j=1]
[learner]
epsilon = 1/5
delta = 1/10
""")


def _bundled(path, out_dir, name):
    config = load_config(path)
    section = config.experiment.model_copy(update={"out": str(out_dir), "timing": False, "name": name})
    return config.model_copy(update={"experiment": section})


@pytest.mark.slow
@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.ini")), ids=lambda p: p.stem)
def test_bundled_config_meets_acceptance(path, tmp_path):
    first = run_experiment(_bundled(path, tmp_path, "first"))
    assert first.accepted, first.summary.acceptance.details

    run_experiment(_bundled(path, tmp_path, "second"))
    assert (tmp_path / "first.csv").read_bytes() == (tmp_path / "second.csv").read_bytes()
