"""Unfailing Knuth-Bendix completion with abstraction-weighted pair selection.

The prover keeps an active set of rewrite rules (plus unorientable
equations used by ordered rewriting) and a passive queue of critical pairs
ordered by abstracted weight.  Every equation it derives carries a proof:
a chain of single rewrite steps, each citing an axiom or an earlier lemma.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from .abstraction import Abstraction, WeightFunction
from .kbo import KBO, Order, kbo_compare
from .problem import Problem
from .terms import (
    App,
    Equation,
    Position,
    Term,
    Var,
    alpha_normalize,
    canonical_renaming,
    match_term,
    max_var,
    replace_at,
    shift_vars,
    substitute,
    subterm_at,
    subterms,
    unify,
    variables,
)


# --------------------------------------------------------------------------
# proofs

@dataclass(frozen=True)
class Justification:
    """One rewrite step: lemma ``rule`` instantiated by ``subst`` at ``position``.

    ``forward`` means the lemma was used left-to-right as stored.
    """

    rule: int
    position: Position
    subst: Tuple[Tuple[int, Term], ...]
    forward: bool = True

    def substitution(self) -> Dict[int, Term]:
        return dict(self.subst)

    def reversed(self) -> "Justification":
        return Justification(self.rule, self.position, self.subst, not self.forward)


@dataclass(frozen=True, eq=False)
class Proof:
    """An equational chain ``conclusion.lhs = t1 = ... = conclusion.rhs``.

    ``lemmas`` maps every cited id to the equation it names.  Cited ids that
    are not axioms have their own proof in ``sub_lemmas``.
    """

    conclusion: Equation
    terms: Tuple[Term, ...]
    steps: Tuple[Justification, ...]
    lemmas: Mapping[int, Equation]
    sub_lemmas: Mapping[int, "Proof"] = field(default_factory=dict)

    @property
    def chain(self) -> List[Tuple[Term, Optional[Justification]]]:
        return list(zip(self.terms, (None,) + self.steps))

    def cited(self) -> List[int]:
        return sorted({s.rule for s in self.steps})

    def axioms_cited(self) -> List[int]:
        return [i for i in self.cited() if i not in self.sub_lemmas]


class ReplayError(ValueError):
    pass


def _check_step(before: Term, after: Term, eq: Equation, j: Justification) -> None:
    sigma = j.substitution()
    l, r = eq.as_pair() if j.forward else (eq.rhs, eq.lhs)
    try:
        here = subterm_at(before, j.position)
    except (AttributeError, IndexError):
        raise ReplayError(f"position {j.position} not in {before}")
    if substitute(l, sigma) != here:
        raise ReplayError(f"{l} under {sigma} does not match {here}")
    expected = replace_at(before, j.position, substitute(r, sigma))
    if expected != after:
        raise ReplayError(f"step by lemma {j.rule} yields {expected}, chain has {after}")


def replay_proof(proof: Proof, axioms: Optional[Mapping[int, Equation]] = None,
                 _done: Optional[Set[int]] = None) -> None:
    """Check every step of ``proof`` and, recursively, of its sub-lemmas.

    If ``axioms`` is given, every cited id without a sub-proof must name one
    of these equations exactly.  Raises :class:`ReplayError` on failure.
    """
    done = set() if _done is None else _done
    if id(proof) in done:
        return
    if len(proof.terms) != len(proof.steps) + 1:
        raise ReplayError("chain/step length mismatch")
    if proof.terms[0] != proof.conclusion.lhs or proof.terms[-1] != proof.conclusion.rhs:
        raise ReplayError(f"chain does not connect {proof.conclusion}")
    for before, after, j in zip(proof.terms, proof.terms[1:], proof.steps):
        eq = proof.lemmas.get(j.rule)
        if eq is None:
            raise ReplayError(f"lemma {j.rule} not declared")
        _check_step(before, after, eq, j)
    for rid in proof.cited():
        eq = proof.lemmas[rid]
        sub = proof.sub_lemmas.get(rid)
        if sub is None:
            if axioms is not None:
                ax = axioms.get(rid)
                if ax is None or ax.as_pair() != eq.as_pair():
                    raise ReplayError(f"lemma {rid} has no proof and is not an axiom")
        else:
            if sub.conclusion.as_pair() != eq.as_pair():
                raise ReplayError(f"sub-proof of {rid} concludes {sub.conclusion}, not {eq}")
            replay_proof(sub, axioms, done)
    done.add(id(proof))


def proof_terms(p: Proof) -> Set[Term]:
    """All terms of the chain and of every sub-lemma proof, alpha-normalized."""
    out: Set[Term] = set()
    seen: Set[int] = set()
    stack = [p]
    while stack:
        q = stack.pop()
        if id(q) in seen:
            continue
        seen.add(id(q))
        out.update(alpha_normalize(t) for t in q.terms)
        stack.extend(q.sub_lemmas.values())
    return out


def _reverse_chain(terms: List[Term], steps: List[Justification]):
    return list(reversed(terms)), [s.reversed() for s in reversed(steps)]


# --------------------------------------------------------------------------
# rules and critical pairs

@dataclass(frozen=True)
class Rule:
    """An active rewrite rule or unorientable equation.

    ``id`` names the lemma this rule comes from; ``flipped`` records that
    ``lhs`` is the lemma's right-hand side.
    """

    lhs: Term
    rhs: Term
    oriented: bool
    id: int = 0
    flipped: bool = False

    @property
    def equation(self) -> Equation:
        return Equation(self.lhs, self.rhs)

    @property
    def trivial(self) -> bool:
        return self.lhs == self.rhs

    def views(self):
        """``(lhs, rhs, forward)`` directions usable for rewriting and overlaps."""
        out = []
        if not isinstance(self.lhs, Var):
            out.append((self.lhs, self.rhs, not self.flipped))
        if not self.oriented and not isinstance(self.rhs, Var) and self.lhs != self.rhs:
            out.append((self.rhs, self.lhs, self.flipped))
        return out

    def __str__(self):
        arrow = "->" if self.oriented else "="
        return f"{self.lhs} {arrow} {self.rhs}"


def orient(e: Equation, id: int = 0, order: Optional[KBO] = None) -> Rule:
    c = kbo_compare(e.lhs, e.rhs, order)
    if c is Order.GT:
        return Rule(e.lhs, e.rhs, True, id, False)
    if c is Order.LT:
        return Rule(e.rhs, e.lhs, True, id, True)
    return Rule(e.lhs, e.rhs, False, id, False)


@dataclass(frozen=True)
class Overlap:
    """A critical pair together with the peak it came from.

    ``left = outer_rhs·s`` and ``right = peak[position <- inner_rhs·s]``,
    where ``peak = outer_lhs·s``.
    """

    outer: int
    outer_forward: bool
    outer_subst: Tuple[Tuple[int, Term], ...]
    inner: int
    inner_forward: bool
    inner_subst: Tuple[Tuple[int, Term], ...]
    position: Position
    peak: Term
    left: Term
    right: Term

    @property
    def equation(self) -> Equation:
        return Equation(self.left, self.right)


def _allowed(l: Term, r: Term, oriented: bool, order: Optional[KBO]) -> bool:
    return oriented or kbo_compare(r, l, order) is not Order.GT


def overlaps(r1: Rule, r2: Rule, order: Optional[KBO] = None) -> List[Overlap]:
    """Overlaps of ``r2``'s left side into non-variable positions of ``r1``'s.

    ``r2`` is renamed apart internally.  Unoriented equations contribute
    both directions, subject to the ordered-rewriting side condition.
    """
    offset = max(max_var(r1.lhs), max_var(r1.rhs)) + 1
    r2_vars = set(variables(r2.lhs)) | set(variables(r2.rhs))
    out = []
    for l1, rr1, f1 in r1.views():
        vars1 = set(variables(l1)) | set(variables(rr1))
        for l2, rr2, f2 in r2.views():
            l2s, r2s = shift_vars(l2, offset), shift_vars(rr2, offset)
            for pos, sub in subterms(l1):
                if isinstance(sub, Var) or sub.head != l2s.head:
                    continue
                sigma = unify(sub, l2s)
                if sigma is None:
                    continue
                peak = substitute(l1, sigma)
                left = substitute(rr1, sigma)
                inner_l = substitute(l2s, sigma)
                inner_r = substitute(r2s, sigma)
                if not _allowed(peak, left, r1.oriented, order):
                    continue
                if not _allowed(inner_l, inner_r, r2.oriented, order):
                    continue
                right = replace_at(peak, pos, inner_r)
                s1 = tuple(sorted((v, sigma.get(v, Var(v))) for v in vars1))
                s2 = tuple(sorted((v, sigma.get(v + offset, Var(v + offset))) for v in r2_vars))
                out.append(Overlap(r1.id, f1, s1, r2.id, f2, s2, pos, peak, left, right))
    return out


def critical_pairs(r1: Rule, r2: Rule, order: Optional[KBO] = None) -> List[Equation]:
    return [o.equation for o in overlaps(r1, r2, order)]


# --------------------------------------------------------------------------
# prover state

class Status(enum.Enum):
    PROVED = "Proved"
    SATURATED = "Saturated"
    RESOURCE_OUT = "ResourceOut"


@dataclass(frozen=True)
class Limits:
    wall_seconds: Optional[float] = 60.0
    max_selected: Optional[int] = None


@dataclass(frozen=True)
class Cost:
    wall_seconds: float
    selected_cps: int


@dataclass
class Outcome:
    status: Status
    cost: Cost
    proof: Optional[Proof] = None
    state: Optional["ProverState"] = None
    reason: str = ""

    @property
    def proved(self) -> bool:
        return self.status is Status.PROVED


class UEQError(ValueError):
    pass


@dataclass(frozen=True)
class _Pending:
    """A passive entry that is an already-proved equation (axiom or demoted rule)."""

    lemma: int


class ProverState:
    def __init__(self, problem: Problem, abstractions: Sequence[Abstraction] = (),
                 order: Optional[KBO] = None):
        self.problem = problem
        self.order = order
        self.abstractions = list(abstractions)
        self.score = WeightFunction(self.abstractions)
        self.lemmas: Dict[int, Equation] = {}
        self.proofs: Dict[int, Proof] = {}
        self.axiom_ids: List[int] = []
        self.active: Dict[int, Rule] = {}
        self.index: Dict[tuple, List[Tuple[int, Term, Term, bool]]] = {}
        self.keys: Dict[Tuple[str, str], int] = {}
        self.dead: Set[int] = set()
        # old rule id -> id of its rhs-simplified replacement
        self.alias: Dict[int, int] = {}
        self.passive: list = []
        self.seq = itertools.count()
        self.next_id = 0
        self.selected = 0
        self.generated = 0
        self.goal_proof: Optional[Proof] = None
        for ax in problem.axioms:
            lid = self._new_lemma(ax, None)
            self.axiom_ids.append(lid)

    # -- bookkeeping -------------------------------------------------------

    def _new_lemma(self, eq: Equation, proof: Optional[Proof]) -> int:
        lid = self.next_id
        self.next_id += 1
        self.lemmas[lid] = eq
        if proof is not None:
            self.proofs[lid] = proof
        return lid

    def is_axiom(self, lid: int) -> bool:
        return lid not in self.proofs

    def rules(self) -> List[Rule]:
        return [self.active[k] for k in sorted(self.active)]

    def _push(self, score, item):
        heapq.heappush(self.passive, (score, next(self.seq), item))
        self.generated += 1

    def _activate(self, rule: Rule) -> None:
        self.active[rule.id] = rule
        self.keys[rule.equation.key()] = rule.id
        for l, r, fwd in rule.views():
            self.index.setdefault(l.head, []).append((rule.id, l, r, fwd))

    def _deactivate(self, rid: int) -> None:
        rule = self.active.pop(rid)
        self.keys.pop(rule.equation.key(), None)
        for l, _r, _f in rule.views():
            bucket = self.index[l.head]
            bucket[:] = [e for e in bucket if e[0] != rid]

    def _proof_for(self, eq: Equation, terms, steps) -> Proof:
        cited = {s.rule for s in steps}
        return Proof(
            eq,
            tuple(terms),
            tuple(steps),
            {i: self.lemmas[i] for i in cited},
            {i: self.proofs[i] for i in cited if i in self.proofs},
        )

    # -- rewriting -----------------------------------------------------------

    def _rewrite_root(self, t: Term):
        if isinstance(t, Var):
            return None
        for rid, l, r, fwd in self.index.get(t.head, ()):
            sigma = match_term(l, t)
            if sigma is None:
                continue
            rule = self.active[rid]
            if not rule.oriented:
                if any(v not in sigma for v in variables(r)):
                    continue
                result = substitute(r, sigma)
                if kbo_compare(t, result, self.order) is not Order.GT:
                    continue
            else:
                result = substitute(r, sigma)
            return rid, fwd, sigma, result
        return None

    def _norm(self, t: Term, pos: Position, trace: list) -> Term:
        if isinstance(t, App) and t.args:
            new_args = [self._norm(a, pos + (i,), trace) for i, a in enumerate(t.args)]
            if any(x is not y for x, y in zip(new_args, t.args)):
                t = App(t.name, tuple(new_args))
        hit = self._rewrite_root(t)
        if hit is None:
            return t
        rid, fwd, sigma, result = hit
        eq = self.lemmas[rid]
        vs = set(variables(eq.lhs)) | set(variables(eq.rhs))
        subst = tuple(sorted((v, sigma.get(v, Var(v))) for v in vs))
        trace.append((Justification(rid, pos, subst, fwd), result))
        return self._norm(result, pos, trace)

    def normalize(self, t: Term) -> Tuple[Term, List[Tuple[Term, Justification]]]:
        """Normal form of ``t`` and the full-term trace ``[(term_after, step), ...]``."""
        local: list = []
        nf = self._norm(t, (), local)
        trace = []
        cur = t
        for j, sub in local:
            cur = replace_at(cur, j.position, sub)
            trace.append((cur, j))
        return nf, trace

    def _reducible_by(self, t: Term, rule: Rule) -> bool:
        views = rule.views()
        for _pos, sub in subterms(t):
            if isinstance(sub, Var):
                continue
            for l, r, _f in views:
                if l.head != sub.head:
                    continue
                sigma = match_term(l, sub)
                if sigma is None:
                    continue
                if rule.oriented:
                    return True
                if any(v not in sigma for v in variables(r)):
                    continue
                if kbo_compare(sub, substitute(r, sigma), self.order) is Order.GT:
                    return True
        return False

    # -- main steps --------------------------------------------------------

    def _chain_of(self, item) -> Tuple[List[Term], List[Justification]]:
        if isinstance(item, _Pending):
            eq = self.lemmas[item.lemma]
            vs = set(variables(eq.lhs)) | set(variables(eq.rhs))
            subst = tuple(sorted((v, Var(v)) for v in vs))
            return [eq.lhs, eq.rhs], [Justification(item.lemma, (), subst, True)]
        o: Overlap = item
        return (
            [o.left, o.peak, o.right],
            [
                Justification(o.outer, (), o.outer_subst, not o.outer_forward),
                Justification(o.inner, o.position, o.inner_subst, o.inner_forward),
            ],
        )

    def _endpoints(self, item) -> Tuple[Term, Term]:
        if isinstance(item, _Pending):
            return self.lemmas[item.lemma].as_pair()
        return item.left, item.right

    def process(self, item) -> Optional[Rule]:
        """Simplify a passive entry and, unless redundant, add it as a rule."""
        left, right = self._endpoints(item)
        nl, tl = self.normalize(left)
        nr, tr = self.normalize(right)
        if nl == nr:
            return None
        eq = Equation(nl, nr)
        if eq.key() in self.keys:
            return None
        if (isinstance(item, _Pending) and not tl and not tr
                and item.lemma in self.lemmas and item.lemma not in self.dead):
            # unchanged axiom or demoted rule: keep its own id
            rid = item.lemma
            base = self.lemmas[rid]
            rule = orient(base, rid, self.order)
        else:
            terms, steps = self._chain_of(item)
            back_terms = [left] + [t for t, _ in tl]
            back_terms, back_steps = _reverse_chain(back_terms, [j for _, j in tl])
            terms = back_terms[:-1] + terms + [t for t, _ in tr]
            steps = back_steps + steps + [j for _, j in tr]
            # alpha-normalize the whole chain, conclusion variables first
            mapping = canonical_renaming([nl, nr] + terms)
            ren = {k: Var(v) for k, v in mapping.items()}
            terms = [substitute(t, ren) for t in terms]
            steps = [
                Justification(j.rule, j.position,
                              tuple((v, substitute(im, ren)) for v, im in j.subst),
                              j.forward)
                for j in steps
            ]
            l2, r2 = terms[0], terms[-1]
            rule = orient(Equation(l2, r2), 0, self.order)
            if rule.flipped:
                terms, steps = _reverse_chain(terms, steps)
                l2, r2 = r2, l2
            concl = Equation(l2, r2)
            rid = self._new_lemma(concl, self._proof_for(concl, terms, steps))
            rule = Rule(l2, r2, rule.oriented, rid, False)
        self._interreduce(rule)
        self._activate(rule)
        return rule

    def _interreduce(self, new: Rule) -> None:
        for rid in sorted(self.active):
            old = self.active[rid]
            lhs_red = self._reducible_by(old.lhs, new)
            if not old.oriented:
                lhs_red = lhs_red or self._reducible_by(old.rhs, new)
            if lhs_red:
                self._deactivate(rid)
                self.dead.add(rid)
                self._push(self.score(old.equation), _Pending(rid))
                continue
            if old.oriented and self._reducible_by(old.rhs, new):
                self._simplify_rhs(old, new)

    def _simplify_rhs(self, old: Rule, new: Rule) -> None:
        self._deactivate(old.id)
        self._activate(new)  # temporarily, so normalization can use it
        nr, trace = self.normalize(old.rhs)
        self._deactivate(new.id)
        base = self.lemmas[old.id]
        vs = set(variables(base.lhs)) | set(variables(base.rhs))
        first = Justification(old.id, (), tuple(sorted((v, Var(v)) for v in vs)),
                              not old.flipped)
        terms = [old.lhs, old.rhs] + [t for t, _ in trace]
        steps = [first] + [j for _, j in trace]
        concl = Equation(old.lhs, nr)
        lid = self._new_lemma(concl, self._proof_for(concl, terms, steps))
        # the replacement inherits the old rule's overlaps
        self.alias[old.id] = lid
        replacement = Rule(old.lhs, nr, True, lid, False)
        if replacement.equation.key() not in self.keys:
            self._activate(replacement)

    def load_axioms(self) -> None:
        """Activate the axioms (interreduced) and queue their critical pairs."""
        for lid in self.axiom_ids:
            rule = self.process(_Pending(lid))
            if rule is not None:
                self.add_pairs(rule)

    def add_pairs(self, rule: Rule) -> None:
        for rid in sorted(self.active):
            other = self.active[rid]
            found = overlaps(rule, other, self.order)
            if other.id != rule.id:
                found += overlaps(other, rule, self.order)
            for o in found:
                if o.left == o.right:
                    continue
                if o.outer == o.inner and not o.position and o.outer_forward == o.inner_forward:
                    continue
                self._push(self.score(o.equation), o)

    def alive(self, lid: int) -> bool:
        while lid in self.alias:
            lid = self.alias[lid]
        return lid in self.active

    def check_goal(self) -> Optional[Proof]:
        goal = self.problem.goal
        nl, tl = self.normalize(goal.lhs)
        nr, tr = self.normalize(goal.rhs)
        if nl != nr:
            return None
        terms = [goal.lhs] + [t for t, _ in tl]
        steps = [j for _, j in tl]
        rterms, rsteps = _reverse_chain([goal.rhs] + [t for t, _ in tr], [j for _, j in tr])
        terms += rterms[1:]
        steps += rsteps
        return self._proof_for(goal, terms, steps)


def _check_problem(problem: Problem) -> None:
    if not problem.goal.lhs.ground or not problem.goal.rhs.ground:
        raise UEQError("goal must be ground (Skolemize goal variables first)")


def complete(problem: Problem, abstractions: Sequence[Abstraction] = (),
             limits: Limits = Limits(), order: Optional[KBO] = None) -> Outcome:
    """Run unfailing completion until the goal is proved, the passive queue
    empties, or a limit is hit.  ``order`` defaults to the unit-weight KBO."""
    _check_problem(problem)
    start = time.perf_counter()
    state = ProverState(problem, abstractions, order)

    def cost():
        return Cost(time.perf_counter() - start, state.selected)

    def proved(proof):
        state.goal_proof = proof
        return Outcome(Status.PROVED, cost(), proof, state)

    state.load_axioms()
    proof = state.check_goal()
    if proof is not None:
        return proved(proof)

    while state.passive:
        if limits.max_selected is not None and state.selected >= limits.max_selected:
            return Outcome(Status.RESOURCE_OUT, cost(), None, state, "selected-pair limit")
        if limits.wall_seconds is not None and time.perf_counter() - start > limits.wall_seconds:
            return Outcome(Status.RESOURCE_OUT, cost(), None, state, "time limit")
        _score, _seq, item = heapq.heappop(state.passive)
        if isinstance(item, Overlap) and not (state.alive(item.outer) and state.alive(item.inner)):
            continue
        state.selected += 1
        rule = state.process(item)
        if rule is None:
            continue
        state.add_pairs(rule)
        proof = state.check_goal()
        if proof is not None:
            return proved(proof)
    return Outcome(Status.SATURATED, cost(), None, state)


def extract_lemmas(state: ProverState) -> List[Tuple[Equation, Proof]]:
    """Non-axiom active rules with their proofs, by ascending id."""
    out = []
    for rid in sorted(state.active):
        if rid in state.proofs:
            out.append((state.lemmas[rid], state.proofs[rid]))
    return out


def normalize(t: Term, state: ProverState) -> Tuple[Term, List[Tuple[Term, Justification]]]:
    """Normal form of ``t`` under ``state``'s rules, with the rewrite trace."""
    return state.normalize(t)
