"""Discovery of compressive first-order patterns in a term corpus.

A pattern's *gain* on a corpus is the drop in total corpus weight when every
match site is replaced by a fresh symbol applied to the variable images
(:func:`rewrite_with`).  :func:`compress` repeatedly picks the pattern of
largest gain, rewrites the corpus with it, and continues on the rewritten
corpus.  Variables occurring in corpus terms are rigid atoms: a pattern
variable may bind them, but patterns never mention them.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .abstraction import Abstraction, skeleton_weight
from .terms import (
    App,
    Symbol,
    Term,
    Var,
    alpha_normalize,
    match_term,
    subterms,
    substitute,
    symbols,
    var_occurrences,
    variables,
)

DEFAULT_TOP_N = 10
DEFAULT_MAX_ARITY = 5


@dataclass(frozen=True)
class Corpus:
    """A multiset of alpha-normalized terms."""

    terms: Tuple[Term, ...] = ()

    @classmethod
    def of(cls, terms: Iterable[Term]) -> "Corpus":
        return cls(tuple(alpha_normalize(t) for t in terms))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def weight(self) -> int:
        return sum(t.weight for t in self.terms)


def _terms(c) -> Tuple[Term, ...]:
    return c.terms if isinstance(c, Corpus) else tuple(c)


@dataclass(frozen=True)
class ScoredPattern:
    """One discovered pattern.

    ``utility`` is skeleton weight times non-overlapping match count on the
    corpus the pattern was found in; ``gain`` is the corpus weight saved by
    rewriting with it, which is what the search maximizes.  ``found`` is the
    pattern as found, possibly mentioning symbols introduced by earlier
    rounds; ``abstraction`` has those symbols inlined.
    """

    abstraction: Abstraction
    utility: int
    match_count: int
    gain: int = 0
    found: Optional[Term] = field(default=None, compare=False)

    @property
    def pattern(self) -> Term:
        return self.abstraction.pattern


def _check_pattern(pattern: Term) -> None:
    if isinstance(pattern, Var):
        raise ValueError("a bare variable is not a pattern")


def match_sites(pattern: Term, c) -> int:
    """Non-overlapping match count, outermost sites first."""
    _check_pattern(pattern)

    def count(t: Term) -> int:
        if match_term(pattern, t) is not None:
            return 1
        if isinstance(t, App):
            return sum(count(a) for a in t.args)
        return 0

    return sum(count(t) for t in _terms(c))


def _rewriter(pattern: Term, fresh: str):
    vs = variables(pattern)
    memo: Dict[Term, Term] = {}

    def rw(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        hit = memo.get(t)
        if hit is not None:
            return hit
        sigma = match_term(pattern, t)
        if sigma is not None:
            out = App(fresh, tuple(rw(sigma[v]) for v in vs))
        elif t.args:
            out = App(t.name, tuple(rw(a) for a in t.args))
        else:
            out = t
        memo[t] = out
        return out

    return rw


def rewrite_with(c, pattern: Term, fresh: Symbol):
    """Replace every match site by ``fresh`` applied to the variable images.

    Sites are taken outermost first; the images are rewritten as well.
    Returns the same container type that was passed in (Corpus or tuple).
    """
    _check_pattern(pattern)
    nv = len(variables(pattern))
    if fresh.arity != nv:
        raise ValueError(f"arity mismatch: {fresh} for a pattern with {nv} variables")
    rw = _rewriter(pattern, fresh.name)
    out = tuple(rw(t) for t in _terms(c))
    return Corpus(out) if isinstance(c, Corpus) else out


def inline(t: Term, definitions: Dict[str, Term]) -> Term:
    """Expand applications of defined symbols by their (possibly nested) bodies."""
    if isinstance(t, Var):
        return t
    args = tuple(inline(a, definitions) for a in t.args)
    body = definitions.get(t.name)
    if body is None:
        return App(t.name, args) if args else t
    vs = variables(body)
    if len(vs) != len(args):
        raise ValueError(f"{t.name} applied to {len(args)} arguments, defined with {len(vs)}")
    return substitute(body, dict(zip(vs, args)))


def corpus_gain(c, pattern: Term) -> int:
    """Weight saved on ``c`` by :func:`rewrite_with`."""
    rw = _rewriter(pattern, "\0fresh")
    return sum(t.weight - rw(t).weight for t in _terms(c))


def _eligible(pattern: Term, sites: int) -> bool:
    return sites >= 2 or any(n > 1 for n in var_occurrences(pattern).values())


# --------------------------------------------------------------------------
# search
#
# A partial pattern is a preorder list of decisions: ("s", name, arity) puts a
# symbol at the next open hole, ("v", j) closes it with variable j.  Every
# location (a distinct corpus subterm and its multiplicity) still matching
# carries the stack of subterms under its open holes and the images of the
# variables decided so far.


def _build(decisions) -> Term:
    it = iter(decisions)

    def go():
        d = next(it)
        if d[0] == "v":
            return Var(d[1])
        return App(d[1], tuple(go() for _ in range(d[2])))

    return go()


class _Search:
    def __init__(self, terms: Sequence[Term], max_arity: int):
        self.terms = terms
        self.max_arity = max_arity
        occ: Counter = Counter()
        for t in terms:
            for _pos, s in subterms(t):
                occ[s] += 1
        self.locations = [(s, n, (s,), ()) for s, n in occ.items() if isinstance(s, App)]
        self.best_gain = 0
        self.best: Optional[Tuple[str, Term]] = None

    @staticmethod
    def _bound(locs) -> int:
        total = 0
        for s, n, _stack, images in locs:
            total += n * (s.weight - 1 - sum(i.weight for i in images))
        return total

    def _children(self, decisions, locs, nvars):
        by_head: Dict[Tuple[str, int], list] = {}
        new_var = []
        reuse = [[] for _ in range(nvars)]
        for s, n, stack, images in locs:
            h = stack[-1]
            rest = stack[:-1]
            if isinstance(h, App):
                by_head.setdefault(h.head, []).append(
                    (s, n, rest + tuple(reversed(h.args)), images))
            if decisions:
                new_var.append((s, n, rest, images + (h,)))
                for j in range(nvars):
                    if images[j] == h:
                        reuse[j].append((s, n, rest, images))
        out = []
        for (name, arity), ls in by_head.items():
            out.append((("s", name, arity), ls, nvars))
        if decisions and nvars < self.max_arity:
            out.append((("v", nvars), new_var, nvars + 1))
        for j in range(nvars):
            if reuse[j]:
                out.append((("v", j), reuse[j], nvars))
        return out

    def _leaf(self, decisions, locs) -> None:
        pattern = _build(decisions)
        if self._bound(locs) < self.best_gain:
            return
        gain = corpus_gain(self.terms, pattern)
        if gain <= 0 or gain < self.best_gain:
            return
        if not _eligible(pattern, match_sites(pattern, self.terms)):
            return
        key = str(pattern)
        if gain > self.best_gain or self.best is None or key < self.best[0]:
            self.best_gain = gain
            self.best = (key, pattern)

    def _visit(self, decisions, locs, nvars) -> None:
        if not locs[0][2]:
            self._leaf(decisions, locs)
            return
        kids = []
        for d, ls, nv in self._children(decisions, locs, nvars):
            ub = self._bound(ls)
            if ub > 0 and ub >= self.best_gain:
                kids.append((-ub, d, ls, nv))
        kids.sort(key=lambda k: (k[0], k[1]))
        for neg_ub, d, ls, nv in kids:
            if -neg_ub < self.best_gain:
                continue
            self._visit(decisions + (d,), ls, nv)

    def run(self) -> Optional[Term]:
        if self.locations:
            self._visit((), self.locations, 0)
        return None if self.best is None else self.best[1]


def best_pattern(c, max_arity: int = DEFAULT_MAX_ARITY) -> Optional[Term]:
    """The eligible pattern of largest positive gain (ties: smallest text), if any."""
    return _Search(_terms(c), max_arity).run()


def compress(c, top_n: int = DEFAULT_TOP_N, max_arity: int = DEFAULT_MAX_ARITY
             ) -> List[ScoredPattern]:
    """Greedy iterative compression; patterns are returned in discovery order."""
    if top_n < 1 or max_arity < 1:
        raise ValueError("top_n and max_arity must be at least 1")
    terms = _terms(c)
    original = set()
    for t in terms:
        original |= {s.name for s in symbols(t)}
    definitions: Dict[str, Term] = {}
    out: List[ScoredPattern] = []
    counter = itertools.count()
    for _ in range(top_n):
        pattern = best_pattern(terms, max_arity)
        if pattern is None:
            break
        gain = corpus_gain(terms, pattern)
        sites = match_sites(pattern, terms)
        name = _fresh_name(original, counter)
        expanded = alpha_normalize(inline(pattern, definitions))
        if all(s.name in original for s in symbols(expanded)):
            a = Abstraction(expanded)
            out.append(ScoredPattern(a, skeleton_weight(expanded) * sites, sites, gain, pattern))
        terms = rewrite_with(terms, pattern, Symbol(name, len(variables(pattern))))
        definitions[name] = pattern
    return out


def _fresh_name(taken, counter) -> str:
    while True:
        name = f"$c{next(counter)}"
        if name not in taken:
            return name

