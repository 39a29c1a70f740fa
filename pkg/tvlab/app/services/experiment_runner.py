"""
Experiment runner.

Each experiment kind turns a validated ExperimentConfig into blocks of
seeded trials and an acceptance verdict. All blocks of a run share one
trial counter, so trial t always draws from Seed(seed, 0).derive(t).
"""
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from ..core.config import settings
from ..core.exceptions import ConfigError
from ..learners import (
    BaseLearner,
    CompressionLearner,
    CoverSelectLearner,
    DpQgLearner,
    EtaGridLearner,
    FiniteClassLearner,
    RealizableQgLearner,
    RobustLearner,
    SplitPlan,
    additive_split_plan,
)
from ..learners.eta_grid import level_count, level_eta
from ..learners.robust import clean_subset_floor
from ..models.distribution import Dist, dirac, parse_dist_atoms, tv_distance
from ..models.sample import Seed
from ..schemas.experiment import ExperimentConfig
from ..schemas.report import Acceptance, ExperimentInfo, ExperimentSummary, TrialSummary
from ..utils.bounds import (
    binomial_margin,
    compression_sample_size,
    realizable_sample_size,
    yatracos_sample_size,
)
from .adversary import CorruptedSource, general_source, huber_source, subtract_source
from .compression import qg_member_index
from .evaluation import Labeler, SuccessRule, evaluate_histogram, evaluate_learner
from .families import (
    ORIGIN,
    ExplicitFamily,
    GrowthFn,
    PackingFamily,
    QgFamily,
    enumerate_family,
    make_q_prime,
    make_qg_member,
    make_q_prime_known_eta,
    q_prime_label,
    qg_label,
)
from .privacy import DpParams, cover_radius, greedy_packing, histogram_sample_size, packing_holds
from .reports import write_reports

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    config: ExperimentConfig
    labeler: Labeler
    seed: Seed
    workers: int
    blocks: List[TrialSummary] = field(default_factory=list)
    flags: Dict = field(default_factory=dict)
    cursor: int = 0

    @property
    def learner_cfg(self):
        return self.config.learner

    @property
    def scale(self) -> Fraction:
        return self.config.experiment.scale

    def listing(self) -> List[Tuple[str, Dist]]:
        """Enumerate the configured family and register its labels"""
        items = family_listing(self.config)
        for label, dist in items:
            self.labeler.register(label, dist)
        return items

    def sample_size(self, computed: Callable[[], int]) -> int:
        """Configured n, else the calculator's size times scale"""
        if self.learner_cfg.n is not None:
            return self.learner_cfg.n
        return math.ceil(self.scale * computed())

    def evaluate(self, learner: BaseLearner, truth: Dist, target: Dist, n: int, rule: SuccessRule) -> TrialSummary:
        block = evaluate_learner(
            learner, truth, target, self.config.experiment.trials, n, rule.max_error or 0, self.seed,
            rule=rule,
            labeler=self.labeler,
            trial_start=self.cursor,
            workers=self.workers,
            timing=self.config.experiment.timing,
        )
        return self._add(block)

    def _add(self, block: TrialSummary) -> TrialSummary:
        self.blocks.append(block)
        self.cursor += block.trials
        return block


@dataclass
class ExperimentResult:
    summary: ExperimentSummary
    files: Dict[str, str] = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.summary.acceptance.holds

    @property
    def exit_code(self) -> int:
        return 0 if self.accepted else 1


@dataclass(frozen=True)
class RegisteredExperiment:
    kind: str
    description: str
    acceptance: str
    handler: Callable[[RunContext], Acceptance]


EXPERIMENTS: Dict[str, RegisteredExperiment] = {}


def experiment(kind: str, description: str, acceptance: str):
    def register(handler: Callable[[RunContext], Acceptance]):
        EXPERIMENTS[kind] = RegisteredExperiment(kind, description, acceptance, handler)
        return handler
    return register


def list_experiments() -> List[ExperimentInfo]:
    return [
        ExperimentInfo(kind=entry.kind, description=entry.description, acceptance=entry.acceptance)
        for entry in EXPERIMENTS.values()
    ]


# Config resolution

def family_listing(config: ExperimentConfig) -> List[Tuple[str, Dist]]:
    family = config.family
    if family.type == "qg":
        descriptor = QgFamily(family.growth, family.i, family.j)
    elif family.type == "packing":
        descriptor = PackingFamily(family.gamma, family.k, family.j[0])
    else:
        descriptor = ExplicitFamily(family.members, family.label_list or ())
    return enumerate_family(descriptor, family.cap)


def resolve_target(config: ExperimentConfig, listing: List[Tuple[str, Dist]], labeler: Labeler) -> Tuple[str, Dist]:
    text = config.family.target
    if text is None:
        if len(listing) == 1:
            return listing[0]
        raise ConfigError(["[family] target: required when the family has more than one member"])
    text = text.strip()
    for label, dist in listing:
        if label == text:
            return label, dist
    if "=" in text:
        dist = parse_dist_atoms(text)
        return labeler.register("target", dist), dist
    raise ConfigError([f"[family] target: {text!r} is not a family label"])


def corrupt(config: ExperimentConfig, target: Dist) -> CorruptedSource:
    adversary = config.adversary
    if adversary.kind == "huber":
        return huber_source(target, adversary.add, adversary.eta)
    if adversary.kind == "subtractive":
        if adversary.remove is None:
            raise ConfigError(["[adversary] remove: subtractive contamination needs a 'remove' distribution"])
        return subtract_source(target, adversary.remove, adversary.eta)
    if adversary.kind == "general":
        remove = adversary.remove or target
        return general_source(target, adversary.add, remove, adversary.eta, adversary.eta_remove)
    return CorruptedSource(target, base=target, kind="none")


def _require_qg(config: ExperimentConfig) -> GrowthFn:
    if config.family.type != "qg":
        raise ConfigError([f"[family] type: {config.experiment.kind} runs on a qg family"])
    return config.family.growth


def _source_label(ctx: RunContext, source: CorruptedSource) -> None:
    if source.kind != "none":
        ctx.labeler.register(f"source[{source.kind}]", source.dist)


def _distance_to_class(source: Dist, members: List[Dist]) -> Fraction:
    return min(tv_distance(source, m) for m in members)


def _failure_rate_within(blocks: List[TrialSummary], delta: Fraction, trials: int) -> Tuple[bool, float, List[str]]:
    margin = float(delta) + binomial_margin(float(delta), trials)
    details = [
        f"{block.target_label}: failure rate {block.failure_rate} (margin {margin:.4f})"
        for block in blocks
    ]
    holds = all(Fraction(block.failures, block.trials) <= margin for block in blocks)
    return holds, margin, details


def _success_rate_at_least(blocks: List[TrialSummary], rate: Fraction, trials: int) -> Tuple[bool, float, List[str]]:
    floor = float(rate) - binomial_margin(float(rate), trials)
    details = [
        f"{block.target_label}: success rate {Fraction(block.successes, block.trials)} (floor {floor:.4f})"
        for block in blocks
    ]
    holds = all(Fraction(block.successes, block.trials) >= floor for block in blocks)
    return holds, floor, details


# Experiments

@experiment(
    "realizable-qg",
    "Realizable Q_g learner on clean samples from every listed member",
    "failure rate <= delta + 3 sigma for every member",
)
def _realizable_qg(ctx: RunContext) -> Acceptance:
    g = _require_qg(ctx.config)
    eps, delta = ctx.learner_cfg.epsilon, ctx.learner_cfg.delta
    learner = RealizableQgLearner(g)
    n = ctx.sample_size(lambda: learner.sample_size(eps, delta))
    for _, p in ctx.listing():
        source = corrupt(ctx.config, p)
        _source_label(ctx, source)
        ctx.evaluate(learner, source.dist, p, n, SuccessRule(max_error=eps))
    holds, _, details = _failure_rate_within(ctx.blocks, delta, ctx.config.experiment.trials)
    return Acceptance(holds=holds, predicate=f"failure rate <= {delta} + 3 sigma", details=details)


@experiment(
    "subtractive-attack",
    "Realizable Q_g learner on q' (indicator removed): exact error versus the robust bound",
    "every trial error equals the closed form and exceeds alpha * eta + eps",
)
def _subtractive_attack(ctx: RunContext) -> Acceptance:
    g = _require_qg(ctx.config)
    cfg = ctx.learner_cfg
    alpha, eps = cfg.alpha, cfg.epsilon
    known_eta = cfg.construction == "known_eta"
    if known_eta:
        g = GrowthFn.scaled_square(alpha)
    learner = RealizableQgLearner(g)
    n = ctx.sample_size(lambda: realizable_sample_size(eps, cfg.delta or Fraction(1, 10), g))

    holds = True
    details, exceeded = [], []
    for i in ctx.config.family.i:
        for j in ctx.config.family.j:
            k = g(j)
            if known_eta:
                truth = make_q_prime_known_eta(i, j)
                label = ctx.labeler.register(f"qprime_known_eta[i={i},j={j}]", truth)
                eta, eps_used = Fraction(j, k), Fraction(1, 16 * j)
                expected = Fraction(1, j)
            else:
                truth = make_q_prime(i, j, g)
                label = ctx.labeler.register(q_prime_label(i, j), truth)
                eta, eps_used = Fraction(1, k), eps
                expected = (Fraction(1, j) - Fraction(1, k)) / (1 - Fraction(1, k))
            bound = alpha * eta + eps_used
            block = ctx.evaluate(learner, truth, truth, n, SuccessRule(max_error=bound))
            block.notes.update({"expected_error": str(expected), "eta": str(eta), "bound": str(bound)})
            exact = all(report.error == expected for report in block.reports)
            separated = expected > bound
            holds = holds and exact and separated
            details.append(
                f"{label}: error {'==' if exact else '!='} {expected} in every trial, "
                f"{expected} {'>' if separated else '<='} alpha*eta + eps = {bound}"
            )
            if separated:
                exceeded.append(f"{label}: exceeds alpha*eta + eps for alpha={alpha}, eps={eps_used}, eta={eta}")
    ctx.flags["exceeds_robust_bound"] = exceeded
    ctx.flags["construction"] = cfg.construction
    return Acceptance(holds=holds, predicate="error == closed form > alpha * eta + eps", details=details)


@experiment(
    "additive-huber",
    "Subset-enumeration robust learner under Huber contamination",
    "success rate (error <= factor * eta + tolerance) >= min_success",
)
def _additive_huber(ctx: RunContext) -> Acceptance:
    g = _require_qg(ctx.config)
    cfg = ctx.learner_cfg
    listing = ctx.listing()
    label, p = resolve_target(ctx.config, listing, ctx.labeler)
    source = corrupt(ctx.config, p)
    _source_label(ctx, source)

    inner = RealizableQgLearner(g)
    subset_cap = cfg.subset_cap or settings.SUBSET_CAP
    if cfg.n1 is not None:
        floor = cfg.subset_floor
        if floor is None:
            floor = clean_subset_floor(cfg.n1, cfg.eta_budget, cfg.epsilon) if cfg.eta_budget is not None else 0
        plan = SplitPlan(cfg.n1, cfg.n2, floor, subset_cap, ctx.scale)
    else:
        plan = additive_split_plan(cfg.epsilon, cfg.delta, inner.sample_size, ctx.scale, subset_cap, cfg.eta_budget)
    learner = RobustLearner(inner, cfg.epsilon, cfg.delta, plan=plan, scale=ctx.scale)

    eta = source.displacement_bound
    tolerance = cfg.tolerance if cfg.tolerance is not None else cfg.epsilon
    threshold = learner.guarantee_factor * eta + tolerance
    block = ctx.evaluate(learner, source.dist, p, plan.total, SuccessRule(max_error=threshold))

    min_success = cfg.min_success if cfg.min_success is not None else 1 - cfg.delta
    rate = Fraction(block.successes, block.trials)
    ctx.flags.update({
        "guarantee_factor": str(learner.guarantee_factor),
        "n1": plan.n1,
        "n2": plan.n2,
        "subset_floor": plan.subset_floor,
        "subsets": plan.subset_count,
    })
    return Acceptance(
        holds=rate >= min_success,
        predicate=f"success rate (error <= {threshold}) >= {min_success}",
        details=[f"{label}: success rate {rate}"],
    )


@experiment(
    "yatracos-finite",
    "Yatracos minimum-distance selection over an explicit finite class",
    "failure rate (error > 3 * opt + eps) <= delta + 3 sigma",
)
def _yatracos_finite(ctx: RunContext) -> Acceptance:
    cfg = ctx.learner_cfg
    listing = ctx.listing()
    members = [dist for _, dist in listing]
    _, p = resolve_target(ctx.config, listing, ctx.labeler)
    source = corrupt(ctx.config, p)
    _source_label(ctx, source)

    learner = FiniteClassLearner(members, cfg.epsilon, cfg.delta, [label for label, _ in listing])
    n = ctx.sample_size(lambda: yatracos_sample_size(len(members), cfg.epsilon, cfg.delta))
    opt = _distance_to_class(source.dist, members)
    ctx.evaluate(learner, source.dist, source.dist, n, SuccessRule(max_error=3 * opt + cfg.epsilon))
    ctx.flags["distance_to_class"] = str(opt)
    holds, _, details = _failure_rate_within(ctx.blocks, cfg.delta, ctx.config.experiment.trials)
    return Acceptance(holds=holds, predicate=f"failure rate <= {cfg.delta} + 3 sigma", details=details)


@experiment(
    "eta-grid",
    "Known-corruption grid reduction: per-level learners plus Yatracos selection",
    "failure rate (error > 3 alpha * opt + eps) <= delta + 3 sigma",
)
def _eta_grid(ctx: RunContext) -> Acceptance:
    g = _require_qg(ctx.config)
    cfg = ctx.learner_cfg
    listing = ctx.listing()
    _, p = resolve_target(ctx.config, listing, ctx.labeler)
    source = corrupt(ctx.config, p)
    _source_label(ctx, source)

    alpha, eps, delta = cfg.alpha, cfg.epsilon, cfg.delta
    if alpha < 1:
        raise ConfigError([f"[learner] alpha: the eta grid needs alpha >= 1, got {alpha}"])
    levels = level_count(alpha, eps)
    level_eps, level_delta = eps / (8 * alpha), delta / 2
    inner = RealizableQgLearner(g)
    if cfg.level_learner == "robust":
        level_learners = [
            RobustLearner(
                inner, level_eps, level_delta,
                plan=additive_split_plan(
                    level_eps, level_delta, inner.sample_size, ctx.scale,
                    cfg.subset_cap, eta_budget=level_eta(i, alpha, eps),
                ),
                scale=ctx.scale,
            )
            for i in range(levels)
        ]
    else:
        level_learners = [inner] * levels
    learner = EtaGridLearner(level_learners, alpha, eps, delta, scale=ctx.scale)
    n = cfg.n if cfg.n is not None else learner.sample_size(eps, delta)

    opt = _distance_to_class(source.dist, [dist for _, dist in listing])
    ctx.evaluate(learner, source.dist, source.dist, n, SuccessRule(max_error=3 * alpha * opt + eps))
    ctx.flags.update({"levels": levels, "distance_to_class": str(opt), "level_learner": cfg.level_learner})
    holds, _, details = _failure_rate_within(ctx.blocks, delta, ctx.config.experiment.trials)
    return Acceptance(holds=holds, predicate=f"failure rate <= {delta} + 3 sigma", details=details)


@experiment(
    "compression-roundtrip",
    "Size-one compression scheme for Q_g: encode, decode, score",
    "success rate >= 2/3 - 3 sigma for every member",
)
def _compression_roundtrip(ctx: RunContext) -> Acceptance:
    g = _require_qg(ctx.config)
    eps = ctx.learner_cfg.epsilon
    learner = CompressionLearner(g)
    n = ctx.sample_size(lambda: compression_sample_size(eps, g))
    for _, q in ctx.listing():
        qg_member_index(q, g)
        ctx.evaluate(learner, q, q, n, SuccessRule(max_error=eps))
    fallback = sum(
        1 for block in ctx.blocks for report in block.reports
        if report.trace and report.trace.get("fallback_outside_sample")
    )
    ctx.flags["fallback_outside_sample"] = fallback
    holds, _, details = _success_rate_at_least(ctx.blocks, Fraction(2, 3), ctx.config.experiment.trials)
    return Acceptance(holds=holds, predicate="success rate >= 2/3 - 3 sigma", details=details)


@experiment(
    "dp-histogram",
    "Stability-based private histogram: accuracy and pre-noise sensitivity",
    "all bins within alpha in >= 1 - beta - 3 sigma of trials and sensitivity <= 1",
)
def _dp_histogram(ctx: RunContext) -> Acceptance:
    cfg = ctx.learner_cfg
    listing = ctx.listing()
    _, p = resolve_target(ctx.config, listing, ctx.labeler)
    params = DpParams(cfg.eps_dp, cfg.delta_dp)
    n = ctx.sample_size(lambda: histogram_sample_size(cfg.alpha, cfg.beta, params))
    block = evaluate_histogram(
        p, params, cfg.alpha, cfg.beta, ctx.config.experiment.trials, n, ctx.seed,
        labeler=ctx.labeler,
        trial_start=ctx.cursor,
        workers=ctx.workers,
        timing=ctx.config.experiment.timing,
    )
    ctx._add(block)

    sensitivity = max(report.trace["sensitivity"] for report in block.reports)
    changed = max(report.trace["changed_bins"] for report in block.reports)
    ctx.flags.update({"max_sensitivity": sensitivity, "max_changed_bins": changed})
    holds, _, details = _success_rate_at_least(ctx.blocks, 1 - cfg.beta, ctx.config.experiment.trials)
    sensitivity_ok = sensitivity <= 1 and changed <= 2
    details.append(f"pre-noise sensitivity {sensitivity} over {changed} bins")
    return Acceptance(
        holds=holds and sensitivity_ok,
        predicate="success rate >= 1 - beta - 3 sigma and sensitivity <= 1",
        details=details,
    )


@experiment(
    "dp-qg",
    "Private Q_g learner built on the stability histogram",
    "output in {delta_(0,0), truth} when 1/j <= alpha, else truth, in >= 1 - beta - 3 sigma of trials",
)
def _dp_qg(ctx: RunContext) -> Acceptance:
    g = _require_qg(ctx.config)
    cfg = ctx.learner_cfg
    params = DpParams(cfg.eps_dp, cfg.delta_dp)
    learner = DpQgLearner(g, cfg.alpha, cfg.beta, params)
    n = ctx.sample_size(learner.sample_size)
    origin = dirac(ORIGIN)
    for i in ctx.config.family.i:
        for j in ctx.config.family.j:
            p = make_qg_member(i, j, g)
            ctx.labeler.register(qg_label(i, j), p)
            allowed = (origin, p) if Fraction(1, j) <= cfg.alpha else (p,)
            ctx.evaluate(learner, p, p, n, SuccessRule(allowed=allowed))
    holds, _, details = _success_rate_at_least(ctx.blocks, 1 - cfg.beta, ctx.config.experiment.trials)
    return Acceptance(holds=holds, predicate="success rate >= 1 - beta - 3 sigma", details=details)


@experiment(
    "cover-select",
    "Greedy alpha/6 packing-cover followed by Yatracos selection",
    "failure rate (error > 3 * opt + alpha) <= beta + 3 sigma, packing and cover hold exactly",
)
def _cover_select(ctx: RunContext) -> Acceptance:
    cfg = ctx.learner_cfg
    listing = ctx.listing()
    members = [dist for _, dist in listing]
    _, p = resolve_target(ctx.config, listing, ctx.labeler)
    source = corrupt(ctx.config, p)
    _source_label(ctx, source)

    learner = CoverSelectLearner(members, cfg.alpha, cfg.beta, [label for label, _ in listing])
    n = ctx.sample_size(learner.sample_size)
    opt = _distance_to_class(source.dist, members)
    ctx.evaluate(learner, source.dist, source.dist, n, SuccessRule(max_error=3 * opt + cfg.alpha))

    packing = greedy_packing(members, learner.radius)
    packed_ok = packing_holds(packing, learner.radius)
    covered = cover_radius(members, packing)
    ctx.flags.update({
        "packing_size": len(packing),
        "radius": str(learner.radius),
        "cover_radius": str(covered),
        "distance_to_class": str(opt),
    })
    holds, _, details = _failure_rate_within(ctx.blocks, cfg.beta, ctx.config.experiment.trials)
    details.append(f"packing {'holds' if packed_ok else 'fails'}, cover radius {covered} <= {learner.radius}")
    return Acceptance(
        holds=holds and packed_ok and covered <= learner.radius,
        predicate=f"failure rate <= {cfg.beta} + 3 sigma, packing and cover exact",
        details=details,
    )


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run one configured experiment and write its reports"""
    kind = EXPERIMENTS.get(config.experiment.kind)
    if kind is None:
        raise ConfigError([f"[experiment] kind: unknown experiment {config.experiment.kind!r}"])
    exp = config.experiment
    workers = exp.workers or settings.workers
    desk_scale = exp.scale < 1
    logger.info("starting %s (%s): trials=%d seed=%d workers=%d", exp.run_name, exp.kind, exp.trials, exp.seed, workers)
    if desk_scale:
        logger.warning("desk-scale run: calculated sample sizes are multiplied by %s", exp.scale)

    started = time.perf_counter()
    labeler = Labeler({"delta[(0,0)]": dirac(ORIGIN)})
    ctx = RunContext(config=config, labeler=labeler, seed=Seed(exp.seed, 0), workers=workers)
    acceptance = kind.handler(ctx)
    elapsed = time.perf_counter() - started

    ctx.flags["desk_scale"] = desk_scale
    summary = ExperimentSummary(
        name=exp.run_name,
        kind=exp.kind,
        seed=exp.seed,
        trials=ctx.cursor,
        desk_scale=desk_scale,
        config=config.model_dump(mode="json"),
        blocks=ctx.blocks,
        label_table=ctx.labeler.table,
        acceptance=acceptance,
        flags=ctx.flags,
        elapsed_seconds=round(elapsed, 3) if exp.timing else None,
    )
    result = ExperimentResult(summary)
    if write:
        result.files = write_reports(summary, exp.out)
    log = logger.info if acceptance.holds else logger.warning
    log("%s: acceptance %s (%s)", exp.run_name, "holds" if acceptance.holds else "FAILS", acceptance.predicate)
    return result
