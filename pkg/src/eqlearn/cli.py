"""Command-line entry points: prove, mine-partial, mine-domain, compress."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from .abstraction import ConstantWeight, WeightFactor, as_fraction
from .completion import Limits, Outcome, Status, UEQError, complete
from .compressor import compress
from .kbo import KBO
from .lambda_io import to_lambda
from .miner import (
    AugmentationMode,
    CostProxy,
    DEFAULT_WEIGHT_FACTORS,
    MiningConfig,
    Strategy,
    augment,
    mine_domain,
    partial_proof_abstractions,
    results_csv,
)
from .problem import Problem
from .tptp import (
    TPTPError,
    load_problem,
    parse_abstractions,
    parse_term,
    render_abstractions,
    render_outcome,
)

EXIT_PROVED, EXIT_SATURATED, EXIT_RESOURCE_OUT, EXIT_INPUT = 0, 1, 2, 3
PROBLEM_SUFFIXES = (".p", ".tptp", ".ueq")

_MODES = {"abstractions": AugmentationMode.WEIGHTED_ABSTRACTIONS,
          "axioms": AugmentationMode.DEFINITIONAL_AXIOMS}
_PROXIES = {"cps": CostProxy.SELECTED_CPS, "wall": CostProxy.WALL_CLOCK}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors, so they use exit status 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    time_limit_s: Fraction = Fraction(60)
    cp_limit: Optional[int] = None
    weight_factor: Fraction = Fraction(1, 5)
    weight_mode: str = "factor"
    augmentation_mode: str = "abstractions"
    abstraction_file: Optional[Path] = None

    def __post_init__(self):
        if self.time_limit_s <= 0 or (self.cp_limit is not None and self.cp_limit <= 0):
            raise InputError("limits must be positive")

    @property
    def limits(self) -> Limits:
        return Limits(float(self.time_limit_s), self.cp_limit)

    @property
    def mode(self):
        if self.weight_mode == "constant":
            return ConstantWeight(self.weight_factor)
        return WeightFactor(self.weight_factor)


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text}")


def _order(args) -> Optional[KBO]:
    weights = {}
    for item in args.symbol_weight or []:
        name, _, w = item.partition("=")
        if not name or not w.isdigit():
            raise InputError(f"--symbol-weight expects NAME=INT, got {item!r}")
        weights[name] = int(w)
    prec = [s for s in (args.precedence or "").split(",") if s]
    if not weights and not prec:
        return None
    try:
        return KBO(weights, prec)
    except ValueError as e:
        raise InputError(str(e))


def _run_config(args) -> RunConfig:
    return RunConfig(
        time_limit_s=args.time_limit,
        cp_limit=args.cp_limit,
        weight_factor=args.weight_factor,
        weight_mode=args.weight_mode,
        augmentation_mode=args.augmentation_mode,
        abstraction_file=args.abstractions,
    )


def _load(path: str, include_dir: Optional[str]) -> Problem:
    try:
        return load_problem(path, include_dir)
    except TPTPError as e:
        raise InputError(f"{path}: {e}")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}")


def _exit_code(outcome: Outcome) -> int:
    return {Status.PROVED: EXIT_PROVED, Status.SATURATED: EXIT_SATURATED,
            Status.RESOURCE_OUT: EXIT_RESOURCE_OUT}[outcome.status]


def _report(outcome: Outcome, name: str, out) -> int:
    out.write(render_outcome(outcome, name))
    out.write(f"% selected critical pairs: {outcome.cost.selected_cps}\n")
    out.write(f"% wall time: {outcome.cost.wall_seconds:.3f} s\n")
    return _exit_code(outcome)


def _prove_with(problem: Problem, absts, cfg: RunConfig, order, limits: Limits, out) -> int:
    strat = Strategy(_MODES[cfg.augmentation_mode], cfg.weight_factor, cfg.mode)
    q, weighted = augment(problem, absts, strat)
    try:
        outcome = complete(q, weighted, limits, order)
    except UEQError as e:
        raise InputError(str(e))
    return _report(outcome, problem.name, out)


# --------------------------------------------------------------------------
# commands

def cmd_prove(args, out=sys.stdout) -> int:
    cfg = _run_config(args)
    problem = _load(args.problem, args.include_dir)
    absts = []
    if cfg.abstraction_file is not None:
        try:
            text = Path(cfg.abstraction_file).read_text()
            absts = parse_abstractions(text, problem.signature)
        except OSError as e:
            raise InputError(f"{cfg.abstraction_file}: {e.strerror or e}")
        except TPTPError as e:
            raise InputError(f"{cfg.abstraction_file}: {e}")
    return _prove_with(problem, absts, cfg, _order(args), cfg.limits, out)


def _mining_config(args, order) -> MiningConfig:
    return MiningConfig(
        tau=args.tau,
        top_n=args.top_n,
        max_arity=args.max_arity,
        top_k_lemmas=args.top_k_lemmas,
        partial_budget=Limits(float(args.t_par), args.partial_cp_limit),
        final_compress=not args.no_final_compress,
        cost_proxy=_PROXIES[args.cost_proxy],
        limits=Limits(float(args.time_limit), args.cp_limit),
        order=order,
    )


def cmd_mine_partial(args, out=sys.stdout) -> int:
    cfg = _run_config(args)
    order = _order(args)
    problem = _load(args.problem, args.include_dir)
    mcfg = _mining_config(args, order)
    start = time.perf_counter()
    absts = partial_proof_abstractions(problem, mcfg)
    out.write(f"% partial-proof abstractions ({len(absts)}):\n")
    for a in absts:
        out.write(f"%   {a}\n")
    if args.output:
        Path(args.output).write_text(render_abstractions(absts))
    remaining = float(cfg.time_limit_s) - (time.perf_counter() - start)
    if remaining <= 0:
        out.write("% no time left after the partial run\n")
        out.write(f"% SZS status Timeout for {problem.name}\n")
        return EXIT_RESOURCE_OUT
    return _prove_with(problem, absts, cfg, order, Limits(remaining, cfg.cp_limit), out)


def _problem_files(directory: str) -> List[Path]:
    d = Path(directory)
    try:
        entries = sorted(d.iterdir())
    except OSError as e:
        raise InputError(f"{directory}: {e.strerror or e}")
    return [p for p in entries if p.is_file() and p.suffix in PROBLEM_SUFFIXES]


def cmd_mine_domain(args, out=sys.stdout) -> int:
    files = _problem_files(args.directory)
    if not files:
        sys.stderr.write(f"no problem files in {args.directory}\n")
        return 1
    order = _order(args)
    domain = [_load(str(f), args.include_dir) for f in files]
    target = _load(args.target, args.include_dir) if args.target else None
    factors = args.weight_factor or list(DEFAULT_WEIGHT_FACTORS)
    modes = [_MODES[m] for m in (args.augmentation_mode or list(_MODES))]
    strategies = []
    for m in modes:
        for k in factors:
            wm = ConstantWeight(k) if args.weight_mode == "constant" else WeightFactor(k)
            strategies.append(Strategy(m, k, wm))
    mcfg = _mining_config(args, order)
    absts, results = mine_domain(domain, strategies, mcfg, target, args.jobs)
    outdir = Path(args.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "domain.absts").write_text(render_abstractions(absts))
        (outdir / "mining.csv").write_text(results_csv(results))
    except OSError as e:
        raise InputError(f"{outdir}: {e.strerror or e}")
    out.write(f"% {len(domain)} problems, {len(strategies)} strategies, "
              f"{len(absts)} abstractions written to {outdir / 'domain.absts'}\n")
    return 0


def cmd_compress(args, out=sys.stdout) -> int:
    try:
        lines = Path(args.file).read_text().splitlines()
    except OSError as e:
        raise InputError(f"{args.file}: {e.strerror or e}")
    terms = []
    for i, raw in enumerate(lines, 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        try:
            terms.append(parse_term(line))
        except TPTPError as e:
            raise InputError(f"{args.file}:{i}: {e}")
    for sp in compress(terms, args.top_n, args.max_arity):
        text = to_lambda(sp.pattern) if args.use_lambda else str(sp.abstraction)
        out.write(f"{text}  % utility={sp.utility} matches={sp.match_count} gain={sp.gain}\n")
    return 0


# --------------------------------------------------------------------------
# parser

def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="eqlearn", description="Equational prover with learned abstractions.")
    sub = parser.add_subparsers(dest="command", required=True)

    prover = argparse.ArgumentParser(add_help=False)
    prover.add_argument("--time-limit", type=_rational, default=Fraction(60),
                        help="wall-clock seconds per prover run (default 60)")
    prover.add_argument("--cp-limit", type=_positive_int, default=None,
                        help="maximum number of selected critical pairs per run")
    prover.add_argument("--include-dir", default=None,
                        help="base directory for TPTP include() directives")
    prover.add_argument("--symbol-weight", action="append", metavar="NAME=W",
                        help="KBO weight for a symbol (default 1); repeatable")
    prover.add_argument("--precedence", default=None, metavar="F,G,...",
                        help="KBO precedence, greatest first")
    prover.add_argument("--weight-mode", choices=("factor", "constant"), default="factor")

    single = argparse.ArgumentParser(add_help=False)
    single.add_argument("problem")
    single.add_argument("--weight-factor", type=_rational, default=Fraction(1, 5))
    single.add_argument("--augmentation-mode", choices=tuple(_MODES), default="abstractions")

    mining = argparse.ArgumentParser(add_help=False)
    mining.add_argument("--tau", type=_rational, default=Fraction(1, 5))
    mining.add_argument("--top-n", type=_positive_int, default=10)
    mining.add_argument("--max-arity", type=_positive_int, default=5)
    mining.add_argument("--top-k-lemmas", type=_positive_int, default=50)
    mining.add_argument("--t-par", type=_rational, default=Fraction(150),
                        help="wall-clock budget of the partial run (default 150)")
    mining.add_argument("--partial-cp-limit", type=_positive_int, default=None)
    mining.add_argument("--cost-proxy", choices=tuple(_PROXIES), default="cps")
    mining.add_argument("--no-final-compress", action="store_true")

    p = sub.add_parser("prove", parents=[prover, single], help="run the prover on one problem")
    p.add_argument("--abstractions", default=None, help="abstraction file")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("mine-partial", parents=[prover, single, mining],
                       help="mine abstractions from a partial run, then prove")
    p.add_argument("--output", default=None, help="write the mined abstractions here")
    p.set_defaults(func=cmd_mine_partial, abstractions=None)

    p = sub.add_parser("mine-domain", parents=[prover, mining],
                       help="mine domain abstractions from a directory of problems")
    p.add_argument("directory")
    p.add_argument("--output-dir", default=".")
    p.add_argument("--target", default=None, help="keep only abstractions over this problem's signature")
    p.add_argument("--weight-factor", type=_rational, action="append",
                   help="grid weight factor; repeatable (default 0, 0.2, 0.5, 0.7)")
    p.add_argument("--augmentation-mode", choices=tuple(_MODES), action="append",
                   help="grid augmentation mode; repeatable (default both)")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_mine_domain)

    p = sub.add_parser("compress", help="compress a file of terms, one per line")
    p.add_argument("file")
    p.add_argument("--top-n", type=_positive_int, default=10)
    p.add_argument("--max-arity", type=_positive_int, default=5)
    p.add_argument("--lambda", dest="use_lambda", action="store_true",
                   help="print patterns in the s-expression format")
    p.set_defaults(func=cmd_compress)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except InputError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
