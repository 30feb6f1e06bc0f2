from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Tuple

from .terms import Equation, Symbol, symbols


def signature_of(equations: Iterable[Equation]) -> FrozenSet[Symbol]:
    out = set()
    for e in equations:
        out |= symbols(e.lhs)
        out |= symbols(e.rhs)
    return frozenset(out)


@dataclass(frozen=True)
class Problem:
    """A unit-equality problem: axioms and one ground goal equation."""

    name: str
    axioms: Tuple[Equation, ...]
    goal: Equation
    signature: FrozenSet[Symbol] = field(default=None)
    axiom_names: Tuple[str, ...] = ()
    goal_name: str = "goal"

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        if self.signature is None:
            object.__setattr__(
                self, "signature", signature_of(list(self.axioms) + [self.goal]))
        if not self.axiom_names:
            object.__setattr__(
                self, "axiom_names", tuple(f"ax{i}" for i in range(len(self.axioms))))

    def with_axioms(self, extra: Iterable[Equation], names: Iterable[str] = ()) -> "Problem":
        extra = list(extra)
        names = list(names) or [f"def{i}" for i in range(len(extra))]
        axioms = self.axioms + tuple(extra)
        return Problem(
            self.name,
            axioms,
            self.goal,
            frozenset(self.signature | signature_of(extra)),
            self.axiom_names + tuple(names),
            self.goal_name,
        )
