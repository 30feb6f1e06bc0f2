"""Knuth-Bendix ordering.

The default ordering gives every symbol and every variable weight 1.
Precedence puts symbols of larger arity above smaller ones; within an arity,
names earlier in lexicographic order are greater.  :class:`KBO` accepts
explicit symbol weights and an explicit precedence list when a problem needs
a different orientation (e.g. group theory with a weight-0 inverse).
"""

from __future__ import annotations

import enum
from typing import Dict, Mapping, Optional, Sequence

from .terms import App, Term, Var, occurs, var_occurrences


class Order(enum.Enum):
    GT = ">"
    LT = "<"
    EQ = "="
    INCOMPARABLE = "?"


def _var_dominates(a: dict, b: dict) -> bool:
    return all(a.get(v, 0) >= n for v, n in b.items())


class KBO:
    """A Knuth-Bendix ordering with variable weight 1.

    ``weights`` maps symbol names to non-negative integer weights (default 1);
    constants must weigh at least 1 and only a unary symbol may weigh 0, in
    which case it must be maximal in ``precedence``.  ``precedence`` lists
    names from greatest to least; unlisted symbols fall below all listed ones
    and are ranked by arity, then name.
    """

    def __init__(self, weights: Optional[Mapping[str, int]] = None,
                 precedence: Optional[Sequence[str]] = None):
        self.weights: Dict[str, int] = dict(weights or {})
        self.precedence = list(precedence or [])
        self._rank = {name: i for i, name in enumerate(self.precedence)}
        zero = [n for n, w in self.weights.items() if w == 0]
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("symbol weights must be non-negative")
        if len(zero) > 1:
            raise ValueError("at most one symbol may have weight 0")
        if zero and (not self.precedence or self.precedence[0] != zero[0]):
            raise ValueError(f"weight-0 symbol {zero[0]} must be greatest in the precedence")
        self.unit = all(w == 1 for w in self.weights.values())
        self._wcache: Dict[Term, int] = {}

    def weight(self, t: Term) -> int:
        if self.unit:
            return t.weight
        if isinstance(t, Var):
            return 1
        w = self._wcache.get(t)
        if w is None:
            w = self.weights.get(t.name, 1) + sum(self.weight(a) for a in t.args)
            if not t.args and w < 1:
                raise ValueError(f"constant {t.name} must have weight >= 1")
            self._wcache[t] = w
        return w

    def precedence_greater(self, f: App, g: App) -> bool:
        rf, rg = self._rank.get(f.name), self._rank.get(g.name)
        if rf is not None or rg is not None:
            if rf is None:
                return False
            if rg is None:
                return True
            if rf != rg:
                return rf < rg
        fa, ga = len(f.args), len(g.args)
        if fa != ga:
            return fa > ga
        return f.name < g.name

    def compare(self, s: Term, t: Term) -> Order:
        if s == t:
            return Order.EQ
        if isinstance(t, Var):
            return Order.GT if occurs(t.id, s) else Order.INCOMPARABLE
        if isinstance(s, Var):
            return Order.LT if occurs(s.id, t) else Order.INCOMPARABLE
        vs, vt = var_occurrences(s), var_occurrences(t)
        s_ok = _var_dominates(vs, vt)
        t_ok = _var_dominates(vt, vs)
        if not s_ok and not t_ok:
            return Order.INCOMPARABLE
        ws, wt = self.weight(s), self.weight(t)
        if ws != wt:
            if ws > wt:
                return Order.GT if s_ok else Order.INCOMPARABLE
            return Order.LT if t_ok else Order.INCOMPARABLE
        if s.name != t.name or len(s.args) != len(t.args):
            if self.precedence_greater(s, t):
                return Order.GT if s_ok else Order.INCOMPARABLE
            return Order.LT if t_ok else Order.INCOMPARABLE
        for a, b in zip(s.args, t.args):
            if a == b:
                continue
            c = self.compare(a, b)
            if c is Order.GT:
                return Order.GT if s_ok else Order.INCOMPARABLE
            if c is Order.LT:
                return Order.LT if t_ok else Order.INCOMPARABLE
            return Order.INCOMPARABLE
        return Order.EQ

    def greater(self, s: Term, t: Term) -> bool:
        return self.compare(s, t) is Order.GT


DEFAULT_KBO = KBO()


def kbo_compare(s: Term, t: Term, order: Optional[KBO] = None) -> Order:
    return (order or DEFAULT_KBO).compare(s, t)


def kbo_greater(s: Term, t: Term, order: Optional[KBO] = None) -> bool:
    return kbo_compare(s, t, order) is Order.GT
