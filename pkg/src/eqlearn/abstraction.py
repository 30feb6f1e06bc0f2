"""Abstractions: term patterns that discount the heuristic weight of matching subterms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .terms import (
    App,
    Equation,
    Symbol,
    Term,
    Var,
    alpha_normalize,
    match_term,
    symbols,
    variables,
)


def as_fraction(x) -> Fraction:
    """Exact rational from an int, float, str or Fraction (0.2 -> 1/5)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(unsafe_hash=True)
class Abstraction:
    pattern: Term
    resonator: bool = False
    assigned_weight: Optional[Fraction] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if isinstance(self.pattern, Var):
            raise ValueError("an abstraction pattern cannot be a bare variable")
        normal = alpha_normalize(self.pattern)
        if normal != self.pattern:
            raise ValueError(f"pattern {self.pattern} is not alpha-normalized")

    @classmethod
    def of(cls, pattern: Term, resonator: bool = False, weight=None) -> "Abstraction":
        """Build from any pattern, alpha-normalizing it first."""
        if isinstance(pattern, Var):
            raise ValueError("an abstraction pattern cannot be a bare variable")
        w = None if weight is None else as_fraction(weight)
        return cls(alpha_normalize(pattern), resonator, w)

    def __str__(self):
        prefix = "resonator: " if self.resonator else ""
        return f"{prefix}{self.pattern}"


@dataclass(frozen=True)
class ConstantWeight:
    k: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k", as_fraction(self.k))
        if self.k < 0:
            raise ValueError("weight constant must be non-negative")


@dataclass(frozen=True)
class WeightFactor:
    k: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k", as_fraction(self.k))
        if self.k < 0:
            raise ValueError("weight factor must be non-negative")


WeightMode = Union[ConstantWeight, WeightFactor]


def skeleton_weight(a: Union[Abstraction, Term]) -> int:
    """Weight of the pattern with every variable counted as 0."""
    t = a.pattern if isinstance(a, Abstraction) else a
    if isinstance(t, Var):
        return 0
    return 1 + sum(skeleton_weight(x) for x in t.args)


def abstraction_weight(a: Abstraction, mode: WeightMode) -> Fraction:
    """Compute w_A for ``mode`` and store it on the abstraction."""
    if isinstance(mode, ConstantWeight):
        w = mode.k
    elif isinstance(mode, WeightFactor):
        w = skeleton_weight(a) * mode.k
    else:
        raise TypeError(f"unknown weight mode {mode!r}")
    a.assigned_weight = w
    return w


def with_weights(absts: Iterable[Abstraction], mode: WeightMode) -> List[Abstraction]:
    """Fresh copies of ``absts`` with weights assigned under ``mode``."""
    out = []
    for a in absts:
        b = Abstraction(a.pattern, a.resonator)
        abstraction_weight(b, mode)
        out.append(b)
    return out


def resonator_matches(a: Abstraction, t: Term) -> bool:
    sigma = match_term(a.pattern, t)
    return sigma is not None and all(isinstance(v, Var) for v in sigma.values())


class WeightFunction:
    """Abstraction-aware weight, memoised per instance.

    The weight of a subterm is the minimum over reading it plainly
    (1 + weights of the arguments) and reading it as an instance ``A·s`` of
    an abstraction (w_A + the weight of each bound subterm, once per
    variable).
    """

    def __init__(self, abstractions: Sequence[Abstraction]):
        by_head: Dict[tuple, List[Abstraction]] = {}
        for a in abstractions:
            if a.assigned_weight is None:
                raise ValueError(f"abstraction {a.pattern} has no assigned weight")
            by_head.setdefault(a.pattern.head, []).append(a)
        self.by_head = by_head
        self.memo: Dict[Term, Fraction] = {}

    def __call__(self, t: Union[Term, Equation]):
        if isinstance(t, Equation):
            return self(t.lhs) + self(t.rhs)
        if not self.by_head:
            return Fraction(t.weight)
        return self._best(t)

    def _best(self, t: Term) -> Fraction:
        if isinstance(t, Var):
            return Fraction(1)
        cached = self.memo.get(t)
        if cached is not None:
            return cached
        best = 1 + sum((self._best(a) for a in t.args), Fraction(0))
        for a in self.by_head.get(t.head, ()):
            sigma = match_term(a.pattern, t)
            if sigma is None:
                continue
            if a.resonator and not all(isinstance(v, Var) for v in sigma.values()):
                continue
            cand = a.assigned_weight + sum((self._best(v) for v in sigma.values()), Fraction(0))
            if cand < best:
                best = cand
        self.memo[t] = best
        return best


def abstracted_weight(t: Union[Term, Equation], abstractions: Sequence[Abstraction]) -> Fraction:
    return WeightFunction(abstractions)(t)


def to_definitional_axiom(a: Abstraction, fresh: Symbol,
                          signature: Optional[Iterable[Symbol]] = None) -> Equation:
    """``fresh(X0, ..., Xn-1) = pattern``, variables in first-occurrence order."""
    vs = variables(a.pattern)
    if fresh.arity != len(vs):
        raise ValueError(
            f"arity mismatch: {fresh} for a pattern with {len(vs)} variables")
    names = {s.name for s in symbols(a.pattern)}
    if signature is not None:
        names |= {s.name for s in signature}
    if fresh.name in names:
        raise ValueError(f"symbol clash: {fresh.name} already in use")
    return Equation(App(fresh.name, tuple(Var(v) for v in vs)), a.pattern)


def compatible(a: Abstraction, signature: Iterable[Symbol]) -> bool:
    """True iff every symbol of the pattern occurs in ``signature`` with the same arity."""
    sig = set(signature)
    return all(s in sig for s in symbols(a.pattern))
