"""Abstraction mining: from a single failed run (partial-proof abstractions)
and from the solved problems of a domain (domain abstractions)."""

from __future__ import annotations

import csv
import enum
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .abstraction import (
    Abstraction,
    WeightFactor,
    WeightMode,
    as_fraction,
    compatible,
    to_definitional_axiom,
    with_weights,
)
from .completion import Cost, Limits, Proof, complete, extract_lemmas, proof_terms
from .compressor import DEFAULT_MAX_ARITY, DEFAULT_TOP_N, compress
from .kbo import KBO
from .problem import Problem
from .terms import Equation, Symbol, size, variables


class AugmentationMode(enum.Enum):
    WEIGHTED_ABSTRACTIONS = "WeightedAbstractions"
    DEFINITIONAL_AXIOMS = "DefinitionalAxioms"


class CostProxy(enum.Enum):
    WALL_CLOCK = "WallClock"
    SELECTED_CPS = "SelectedCPs"


DEFAULT_WEIGHT_FACTORS = (Fraction(0), Fraction(1, 5), Fraction(1, 2), Fraction(7, 10))


@dataclass(frozen=True)
class Strategy:
    """One grid point; ``weight_mode`` defaults to ``WeightFactor(weight_factor)``."""

    augmentation_mode: AugmentationMode
    weight_factor: Fraction = Fraction(1, 5)
    weight_mode: Optional[WeightMode] = None

    def __post_init__(self):
        object.__setattr__(self, "weight_factor", as_fraction(self.weight_factor))
        if self.weight_factor < 0:
            raise ValueError("weight factor must be non-negative")
        if self.weight_mode is None:
            object.__setattr__(self, "weight_mode", WeightFactor(self.weight_factor))


def default_strategies(factors: Iterable = DEFAULT_WEIGHT_FACTORS) -> List[Strategy]:
    return [Strategy(mode, k) for mode in AugmentationMode for k in factors]


@dataclass(frozen=True)
class MiningConfig:
    """Mining parameters.

    ``limits`` bounds every base and augmented prover run; ``partial_budget``
    bounds the partial run that feeds lemma mining.
    """

    tau: Fraction = Fraction(1, 5)
    top_n: int = DEFAULT_TOP_N
    max_arity: int = DEFAULT_MAX_ARITY
    top_k_lemmas: int = 50
    partial_budget: Limits = Limits(wall_seconds=150.0)
    final_compress: bool = True
    cost_proxy: CostProxy = CostProxy.SELECTED_CPS
    limits: Limits = Limits(wall_seconds=60.0)
    order: Optional[KBO] = None

    def __post_init__(self):
        object.__setattr__(self, "tau", as_fraction(self.tau))
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.top_n < 1 or self.max_arity < 1 or self.top_k_lemmas < 1:
            raise ValueError("top_n, max_arity and top_k_lemmas must be positive")


@dataclass(frozen=True)
class MiningRun:
    problem_id: str
    strategy: Strategy
    abstractions: Tuple[Abstraction, ...]
    base_cost: Cost
    augmented_cost: Optional[Cost]
    em: Fraction


# --------------------------------------------------------------------------
# lemma scoring and partial-proof abstractions

def interestingness(lemma: Equation, proof: Proof) -> Fraction:
    """Total size of the proof's terms over the squared size of the statement."""
    corpus = sum(size(t) for t in proof_terms(proof))
    return Fraction(corpus, size(lemma) ** 2)


def _compress_terms(terms, config: MiningConfig) -> List[Abstraction]:
    corpus = sorted(terms, key=str)
    return [s.abstraction for s in compress(corpus, config.top_n, config.max_arity)]


def partial_proof_abstractions(p: Problem, config: MiningConfig = MiningConfig()) -> List[Abstraction]:
    """Compress the proofs of the most interesting lemmas of a budgeted run."""
    out = complete(p, (), config.partial_budget, config.order)
    if out.proved:
        return _compress_terms(proof_terms(out.proof), config)
    lemmas = extract_lemmas(out.state)
    # extract_lemmas is ordered by id, so the stable sort breaks ties by id
    ranked = sorted(lemmas, key=lambda lp: -interestingness(lp[0], lp[1]))
    terms = set()
    for _eq, proof in ranked[:config.top_k_lemmas]:
        terms |= proof_terms(proof)
    if not terms:
        return []
    return _compress_terms(terms, config)


# --------------------------------------------------------------------------
# effect metric and local abstractions

_MIN_SECONDS = Fraction(1, 10**6)


def effect_metric(base: Cost, augmented: Optional[Cost],
                  proxy: CostProxy = CostProxy.SELECTED_CPS) -> Fraction:
    """``base / augmented`` in the chosen proxy; 0 if the augmented run failed.

    Selected-pair counts are clamped to at least 1 and wall times to at least
    one microsecond, so a run that needs no selections still has a ratio.
    """
    if augmented is None:
        return Fraction(0)
    if proxy is CostProxy.SELECTED_CPS:
        return Fraction(max(base.selected_cps, 1), max(augmented.selected_cps, 1))
    b = max(as_fraction(base.wall_seconds), _MIN_SECONDS)
    a = max(as_fraction(augmented.wall_seconds), _MIN_SECONDS)
    return b / a


def fresh_symbols(absts: Sequence[Abstraction], taken: Iterable[Symbol]) -> List[Symbol]:
    """``abs_<n>`` symbols, one per abstraction, avoiding every name in ``taken``."""
    names = {s.name for s in taken}
    out = []
    n = 0
    for a in absts:
        while f"abs_{n}" in names:
            n += 1
        out.append(Symbol(f"abs_{n}", len(variables(a.pattern))))
        n += 1
    return out


def augment(p: Problem, absts: Sequence[Abstraction], strat: Strategy):
    """The problem and abstraction list to run for ``strat``."""
    if strat.augmentation_mode is AugmentationMode.WEIGHTED_ABSTRACTIONS:
        return p, with_weights(absts, strat.weight_mode)
    syms = fresh_symbols(absts, p.signature)
    defs = [to_definitional_axiom(a, s, p.signature) for a, s in zip(absts, syms)]
    return p.with_axioms(defs, [f"def_{s.name}" for s in syms]), []


def _augmented_run(p: Problem, base, absts, strat: Strategy, config: MiningConfig) -> MiningRun:
    q, weighted = augment(p, absts, strat)
    aug = complete(q, weighted, config.limits, config.order)
    aug_cost = aug.cost if aug.proved else None
    em = effect_metric(base.cost, aug_cost, config.cost_proxy)
    return MiningRun(p.name, strat, absts, base.cost, aug_cost, em)


def local_abstractions(p: Problem, strat: Strategy,
                       config: MiningConfig = MiningConfig()) -> Optional[MiningRun]:
    """Mine one solved problem and measure the effect of its abstractions.

    Returns None when the unaugmented run does not prove the goal.
    """
    base = complete(p, (), config.limits, config.order)
    if not base.proved:
        return None
    absts = tuple(_compress_terms(proof_terms(base.proof), config))
    return _augmented_run(p, base, absts, strat, config)


# --------------------------------------------------------------------------
# domain abstractions

@dataclass(frozen=True)
class GridResult:
    problem_id: str
    strategy_index: int
    strategy: Strategy
    run: Optional[MiningRun]
    base_cost: Cost


def _problem_job(args) -> List[GridResult]:
    # the unaugmented run does not depend on the strategy, so it is shared
    p, strategies, config = args
    base = complete(p, (), config.limits, config.order)
    absts = tuple(_compress_terms(proof_terms(base.proof), config)) if base.proved else ()
    out = []
    for si, strat in enumerate(strategies):
        run = _augmented_run(p, base, absts, strat, config) if base.proved else None
        out.append(GridResult(p.name, si, strat, run, base.cost))
    return out


def run_grid(domain: Sequence[Problem], strategies: Sequence[Strategy],
             config: MiningConfig = MiningConfig(), jobs: int = 1) -> List[GridResult]:
    """Every (problem, strategy) combination, sorted by problem id then strategy index."""
    tasks = [(p, list(strategies), config) for p in domain]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_problem_job, tasks))
    else:
        batches = [_problem_job(t) for t in tasks]
    results = [r for b in batches for r in b]
    return sorted(results, key=lambda r: (r.problem_id, r.strategy_index))


def good_abstractions(results: Iterable[GridResult], tau) -> List[Abstraction]:
    """Deduplicated abstractions of every run whose effect reaches ``tau``."""
    tau = as_fraction(tau)
    seen = set()
    out = []
    for r in results:
        if r.run is None or r.run.em < tau:
            continue
        for a in r.run.abstractions:
            b = Abstraction.of(a.pattern, a.resonator)
            if b not in seen:
                seen.add(b)
                out.append(b)
    return out


def filter_for_target(absts: Iterable[Abstraction], target: Problem) -> List[Abstraction]:
    """Keep the abstractions whose symbols all occur in the target's signature."""
    return [a for a in absts if compatible(a, target.signature)]


def finish_domain(good: Sequence[Abstraction], config: MiningConfig,
                  target: Optional[Problem] = None) -> List[Abstraction]:
    if target is not None:
        good = filter_for_target(good, target)
    if not config.final_compress:
        return list(good)
    return _compress_terms([a.pattern for a in good], config)


def domain_abstractions(domain: Sequence[Problem], strategies: Optional[Sequence[Strategy]] = None,
                        config: MiningConfig = MiningConfig(), target: Optional[Problem] = None,
                        jobs: int = 1) -> List[Abstraction]:
    """Abstractions that helped on some domain problem, optionally compressed again."""
    return mine_domain(domain, strategies, config, target, jobs)[0]


def mine_domain(domain: Sequence[Problem], strategies: Optional[Sequence[Strategy]] = None,
                config: MiningConfig = MiningConfig(), target: Optional[Problem] = None,
                jobs: int = 1) -> Tuple[List[Abstraction], List[GridResult]]:
    """Like :func:`domain_abstractions` but also returns the per-run results."""
    strategies = default_strategies() if strategies is None else list(strategies)
    results = run_grid(domain, strategies, config, jobs)
    good = good_abstractions(results, config.tau)
    return finish_domain(good, config, target), results


# --------------------------------------------------------------------------
# CSV

CSV_COLUMNS = ("problem_id", "strategy_mode", "weight_factor", "em", "n_abstractions",
               "base_cost_cps", "base_cost_s", "aug_cost_cps", "aug_cost_s")


def _num(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{float(x):.6g}"


def results_csv(results: Iterable[GridResult]) -> str:
    """CSV text; a run whose base proof failed has empty em and augmented columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(results, key=lambda r: (r.problem_id, r.strategy_index)):
        run = r.run
        aug = run.augmented_cost if run else None
        w.writerow([
            r.problem_id,
            r.strategy.augmentation_mode.value,
            _num(r.strategy.weight_factor),
            _num(run.em) if run else "",
            len(run.abstractions) if run else 0,
            r.base_cost.selected_cps,
            f"{r.base_cost.wall_seconds:.6f}",
            aug.selected_cps if aug else "",
            f"{aug.wall_seconds:.6f}" if aug else "",
        ])
    return buf.getvalue()
