"""
Monte Carlo trial engine.

Trial t of a run draws from Seed(master, 0).derive(t): child 0 of that
seed drives sampling and child 1 is handed to the learner. Trials run in
a process pool when more than one worker is configured; outcomes are
reduced in trial-index order so reports never depend on scheduling.
"""
import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

from ..core.exceptions import BadParams
from ..learners.base_learner import BaseLearner
from ..models.distribution import DomainPoint, Dist, sample, tv_distance
from ..models.sample import Sample, Seed
from ..schemas.report import TrialReport, TrialSummary
from ..utils.bounds import wilson_interval
from .privacy import DpParams, bin_count_sensitivity, stability_histogram

logger = logging.getLogger(__name__)


class Labeler:
    """Stable names for distributions; the table maps each name to canonical text"""

    def __init__(self, known: Optional[Mapping[str, Dist]] = None):
        self._by_dist: Dict[Dist, str] = {}
        self._table: Dict[str, str] = {}
        for label, dist in (known or {}).items():
            self.register(label, dist)

    def register(self, label: str, dist: Dist) -> str:
        existing = self._by_dist.get(dist)
        if existing is not None:
            return existing
        base, suffix = label, 1
        while label in self._table:
            suffix += 1
            label = f"{base}#{suffix}"
        self._by_dist[dist] = label
        self._table[label] = dist.to_text()
        return label

    def label(self, dist: Dist) -> str:
        existing = self._by_dist.get(dist)
        if existing is not None:
            return existing
        text = dist.to_text()
        return self.register("dist-" + hashlib.sha256(text.encode()).hexdigest()[:12], dist)

    @property
    def table(self) -> Dict[str, str]:
        return dict(sorted(self._table.items()))


@dataclass(frozen=True)
class SuccessRule:
    """A trial succeeds when its error is at most max_error, or its output is one of allowed"""
    max_error: Optional[Fraction] = None
    allowed: Tuple[Dist, ...] = ()

    def __call__(self, output: Optional[Dist], error: Fraction) -> bool:
        if self.allowed:
            return output in self.allowed
        return self.max_error is None or error <= self.max_error

    def describe(self) -> str:
        if self.allowed:
            return f"output in {len(self.allowed)} allowed distributions"
        return "always" if self.max_error is None else f"error <= {self.max_error}"


@dataclass
class TrialOutcome:
    trial: int
    n: int
    output: Optional[Dist]
    error: Fraction
    success: bool
    micros: int
    trace: Optional[Dict[str, Any]] = None
    output_label: Optional[str] = None


@dataclass(frozen=True)
class LearnerTrials:
    learner: BaseLearner
    truth: Dist
    target: Dist
    n: int
    rule: SuccessRule
    seed: Seed
    timing: bool = True

    def run_trial(self, t: int) -> TrialOutcome:
        trial_seed = self.seed.derive(t)
        s = sample(self.truth, self.n, trial_seed.derive(0))
        started = time.perf_counter_ns()
        output, trace = self.learner.learn_with_trace(s, trial_seed.derive(1))
        micros = (time.perf_counter_ns() - started) // 1000 if self.timing else 0
        error = tv_distance(output, self.target)
        return TrialOutcome(t, self.n, output, error, self.rule(output, error), micros, trace)


@dataclass(frozen=True)
class HistogramTrials:
    """Stability-histogram accuracy trials; error is the largest bin deviation"""
    truth: Dist
    params: DpParams
    alpha: Fraction
    beta: Fraction
    n: int
    seed: Seed
    timing: bool = True

    def run_trial(self, t: int) -> TrialOutcome:
        trial_seed = self.seed.derive(t)
        s = sample(self.truth, self.n, trial_seed.derive(0))
        started = time.perf_counter_ns()
        frequencies = stability_histogram(s, self.params, self.alpha, self.beta, trial_seed.derive(1))
        micros = (time.perf_counter_ns() - started) // 1000 if self.timing else 0
        error = frequencies.max_error(s)
        neighbor = _neighbor(s)
        trace = {
            "released": len(frequencies.released),
            "suppressed": frequencies.suppressed,
            "sensitivity": bin_count_sensitivity(s, neighbor),
            "changed_bins": _changed_bins(s, neighbor),
        }
        label = f"histogram[released={len(frequencies.released)}]"
        return TrialOutcome(t, self.n, None, error, error <= self.alpha, micros, trace, label)


def _neighbor(s: Sample) -> Sample:
    """s with its first point replaced by a point outside the sample"""
    if len(s) == 0:
        return s
    fresh = DomainPoint(max(x.a for x in s) + 1, 0)
    return Sample((fresh,) + tuple(s.points[1:]), "S~neighbor")


def _changed_bins(s: Sample, s_prime: Sample) -> int:
    counts, other = s.counts(), s_prime.counts()
    return sum(1 for x in set(counts) | set(other) if counts.get(x, 0) != other.get(x, 0))


_ACTIVE = None


def _install(trials) -> None:
    global _ACTIVE
    _ACTIVE = trials


def _run_installed(t: int) -> TrialOutcome:
    return _ACTIVE.run_trial(t)


def run_trials(trials, indices: range, workers: int = 1) -> List[TrialOutcome]:
    """Run trial objects over the given indices, results in index order"""
    if workers <= 1 or len(indices) <= 1:
        return [trials.run_trial(t) for t in indices]
    chunksize = max(1, len(indices) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers, initializer=_install, initargs=(trials,)) as executor:
        return list(executor.map(_run_installed, indices, chunksize=chunksize))


def summarize(
    outcomes: List[TrialOutcome],
    labeler: Labeler,
    *,
    learner: str,
    target_label: str,
    source_label: str,
    n: int,
    trial_start: int,
    threshold: Optional[str] = None,
    recomputable: bool = True,
) -> TrialSummary:
    reports = [
        TrialReport.build(
            o.trial, o.n,
            o.output_label if o.output is None else labeler.label(o.output),
            o.error, o.success, o.micros, o.trace,
        )
        for o in outcomes
    ]
    errors = [o.error for o in outcomes]
    failures = sum(1 for o in outcomes if not o.success)
    low, high = wilson_interval(failures, len(outcomes))
    return TrialSummary(
        learner=learner,
        target_label=target_label,
        source_label=source_label,
        n=n,
        trial_start=trial_start,
        trials=len(outcomes),
        threshold=threshold,
        failures=failures,
        failure_rate=str(Fraction(failures, len(outcomes))),
        mean_error=str(sum(errors, Fraction(0)) / len(errors)),
        max_error=str(max(errors)),
        wilson_low=low,
        wilson_high=high,
        recomputable=recomputable,
        reports=reports,
    )


def evaluate_learner(
    learner: BaseLearner,
    truth: Dist,
    target: Dist,
    trials: int,
    n: int,
    eps,
    seed: Seed,
    *,
    rule: Optional[SuccessRule] = None,
    labeler: Optional[Labeler] = None,
    trial_start: int = 0,
    workers: int = 1,
    timing: bool = True,
) -> TrialSummary:
    """
    Run independent trials of a learner.

    Each trial samples n points from truth, runs the learner and scores the
    exact tv distance to target; a trial fails when the error exceeds eps
    (or when the supplied rule rejects it).
    """
    if trials < 1:
        raise BadParams(f"need at least one trial, got {trials}")
    rule = rule or SuccessRule(max_error=Fraction(eps))
    labeler = labeler or Labeler()
    job = LearnerTrials(learner, truth, target, n, rule, seed, timing)
    outcomes = run_trials(job, range(trial_start, trial_start + trials), workers)
    summary = summarize(
        outcomes, labeler,
        learner=learner.get_learner_name(),
        target_label=labeler.label(target),
        source_label=labeler.label(truth),
        n=n,
        trial_start=trial_start,
        threshold=rule.describe(),
    )
    summary.learner_parameters = dict(learner.get_parameters())
    logger.info(
        "%s: %d/%d failures (n=%d, %s)",
        summary.learner, summary.failures, summary.trials, n, summary.threshold,
    )
    return summary


def evaluate_histogram(
    truth: Dist,
    params: DpParams,
    alpha,
    beta,
    trials: int,
    n: int,
    seed: Seed,
    *,
    labeler: Optional[Labeler] = None,
    trial_start: int = 0,
    workers: int = 1,
    timing: bool = True,
) -> TrialSummary:
    if trials < 1:
        raise BadParams(f"need at least one trial, got {trials}")
    labeler = labeler or Labeler()
    job = HistogramTrials(truth, params, Fraction(alpha), Fraction(beta), n, seed, timing)
    outcomes = run_trials(job, range(trial_start, trial_start + trials), workers)
    return summarize(
        outcomes, labeler,
        learner="STABILITY_HISTOGRAM",
        target_label=labeler.label(truth),
        source_label=labeler.label(truth),
        n=n,
        trial_start=trial_start,
        threshold=f"max bin error <= {alpha}",
        recomputable=False,
    )
