"""Independent brute-force references used by the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, List, Optional

from eqlearn.terms import App, Term, Var


# -- terms ------------------------------------------------------------------

def tsize(t: Term) -> int:
    return 1 if isinstance(t, Var) else 1 + sum(tsize(a) for a in t.args)


def naive_match(p: Term, t: Term, env: Optional[dict] = None) -> Optional[dict]:
    env = {} if env is None else env
    if isinstance(p, Var):
        if p.id in env:
            return env if env[p.id] == t else None
        env[p.id] = t
        return env
    if not isinstance(t, App) or t.name != p.name or len(t.args) != len(p.args):
        return None
    for a, b in zip(p.args, t.args):
        if naive_match(a, b, env) is None:
            return None
    return env


def first_vars(t: Term, acc=None) -> List[int]:
    acc = [] if acc is None else acc
    if isinstance(t, Var):
        if t.id not in acc:
            acc.append(t.id)
    else:
        for a in t.args:
            first_vars(a, acc)
    return acc


def random_term(rng: random.Random, sig, max_nodes: int, nvars: int = 0) -> Term:
    """Random term over ``sig`` (list of (name, arity)) with at most ``max_nodes`` nodes."""
    def go(budget):
        leaves = [s for s in sig if s[1] == 0]
        choices = [s for s in sig if 1 + s[1] <= budget]
        if nvars and rng.random() < 0.3:
            return Var(rng.randrange(nvars)), 1
        if budget <= 1 or not [s for s in choices if s[1] > 0] or rng.random() < 0.3:
            if nvars and (not leaves or rng.random() < 0.5):
                return Var(rng.randrange(nvars)), 1
            name = rng.choice(leaves)[0]
            return App(name, ()), 1
        name, ar = rng.choice([s for s in choices if s[1] > 0])
        used = 1
        args = []
        for i in range(ar):
            left = budget - used - (ar - i - 1)
            a, n = go(max(1, left))
            args.append(a)
            used += n
        return App(name, tuple(args)), used
    return go(max_nodes)[0]


# -- compressor ---------------------------------------------------------------

def naive_rewrite(t: Term, p: Term, fresh: str) -> Term:
    if isinstance(t, Var):
        return t
    env = naive_match(p, t)
    if env is not None:
        return App(fresh, tuple(naive_rewrite(env[v], p, fresh) for v in first_vars(p)))
    return App(t.name, tuple(naive_rewrite(a, p, fresh) for a in t.args))


def naive_sites(t: Term, p: Term) -> int:
    if naive_match(p, t) is not None:
        return 1
    if isinstance(t, Var):
        return 0
    return sum(naive_sites(a, p) for a in t.args)


def naive_gain(corpus, p: Term) -> int:
    return sum(tsize(t) - tsize(naive_rewrite(t, p, "#fresh")) for t in corpus)


def _cuts(t: Term, root: bool):
    """All ways to cut ``t`` into a skeleton with holes: (skeleton, holes)."""
    out = []
    if not root:
        out.append(("HOLE", [t]))
    if isinstance(t, App):
        for combo in itertools.product(*[_cuts(a, False) for a in t.args]):
            holes = [h for _, hs in combo for h in hs]
            out.append(((t.name, tuple(s for s, _ in combo)), holes))
    return out


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def all_generalizations(t: Term, max_arity: int):
    """Every pattern (not a bare variable) that matches ``t``."""
    for skel, holes in _cuts(t, True):
        groups: Dict[Term, List[int]] = {}
        for i, h in enumerate(holes):
            groups.setdefault(h, []).append(i)
        per_group = [list(_set_partitions(idx)) for idx in groups.values()]
        for choice in itertools.product(*per_group):
            blocks = [b for parts in choice for b in parts]
            if len(blocks) > max_arity:
                continue
            var_of = {}
            for k, b in enumerate(blocks):
                for i in b:
                    var_of[i] = k
            counter = itertools.count()

            def build(s):
                if s == "HOLE":
                    return Var(var_of[next(counter)])
                name, kids = s
                return App(name, tuple(build(k) for k in kids))

            yield build(skel)


def brute_force_best_gain(corpus, max_arity: int) -> int:
    """Largest gain of an eligible pattern (0 if none is positive)."""
    subs = set()

    def walk(t):
        if isinstance(t, App):
            subs.add(t)
            for a in t.args:
                walk(a)

    for t in corpus:
        walk(t)
    best = 0
    seen = set()
    for u in subs:
        for p in all_generalizations(u, max_arity):
            key = str(p)
            if key in seen:
                continue
            seen.add(key)
            g = naive_gain(corpus, p)
            if g <= best:
                continue
            occ = {}
            for v in _var_list(p):
                occ[v] = occ.get(v, 0) + 1
            sites = sum(naive_sites(t, p) for t in corpus)
            if sites >= 2 or any(n > 1 for n in occ.values()):
                best = g
    return best


def _var_list(t: Term):
    if isinstance(t, Var):
        return [t.id]
    return [v for a in t.args for v in _var_list(a)]


# -- abstracted weight --------------------------------------------------------

def interpretation_weights(t: Term, abstractions) -> set:
    """The weight of every interpretation tree of ``t`` (no pruning, no memo)."""
    if isinstance(t, Var):
        return {Fraction(1)}
    out = set()
    for combo in itertools.product(*[interpretation_weights(a, abstractions) for a in t.args]):
        out.add(1 + sum(combo, Fraction(0)))
    for a in abstractions:
        env = naive_match(a.pattern, t)
        if env is None:
            continue
        if a.resonator and not all(isinstance(v, Var) for v in env.values()):
            continue
        images = [env[v] for v in sorted(env)]
        for combo in itertools.product(*[interpretation_weights(x, abstractions) for x in images]):
            out.add(a.assigned_weight + sum(combo, Fraction(0)))
    return out


def brute_force_abstracted_weight(t: Term, abstractions) -> Fraction:
    return min(interpretation_weights(t, abstractions))


TWO_SYMBOL_SIGNATURES = ([("f", 2), ("a", 0)], [("g", 1), ("a", 0)], [("f", 2), ("g", 1)])


def random_small_corpus(rng: random.Random, max_weight: int = 20) -> List[Term]:
    """Random corpus of total weight at most ``max_weight`` over a 2-symbol signature."""
    sig = rng.choice(TWO_SYMBOL_SIGNATURES)
    nvars = 2 if all(a > 0 for _, a in sig) else rng.choice([0, 0, 2])
    corpus, total = [], 0
    while True:
        t = random_term(rng, sig, rng.randint(1, 9), nvars)
        if total + t.weight > max_weight:
            return corpus
        corpus.append(t)
        total += t.weight


# -- joinability --------------------------------------------------------------

def _positions(t: Term, pos=()):
    yield pos, t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from _positions(a, pos + (i,))


def _put(t: Term, pos, new: Term) -> Term:
    if not pos:
        return new
    args = list(t.args)
    args[pos[0]] = _put(args[pos[0]], pos[1:], new)
    return App(t.name, tuple(args))


def _inst(t: Term, env: dict) -> Term:
    if isinstance(t, Var):
        return _inst(env[t.id], env) if t.id in env else t
    return App(t.name, tuple(_inst(a, env) for a in t.args))


def _apply(t: Term, env: dict) -> Term:
    if isinstance(t, Var):
        return env.get(t.id, t)
    return App(t.name, tuple(_apply(a, env) for a in t.args))


def _offset(t: Term, k: int) -> Term:
    if isinstance(t, Var):
        return Var(t.id + k)
    return App(t.name, tuple(_offset(a, k) for a in t.args))


def _bind(env: dict, s: Term, t: Term) -> bool:
    """Robinson unification by recursive descent, extending ``env`` in place."""
    s, t = _inst(s, env), _inst(t, env)
    if s == t:
        return True
    if isinstance(t, Var):
        s, t = t, s
    if isinstance(s, Var):
        if any(isinstance(u, Var) and u.id == s.id for _, u in _positions(t)):
            return False
        env[s.id] = t
        return True
    if s.name != t.name or len(s.args) != len(t.args):
        return False
    return all(_bind(env, a, b) for a, b in zip(s.args, t.args))


def naive_normal_form(t: Term, rules) -> Term:
    """Rewrite with oriented ``(lhs, rhs)`` rules, leftmost-outermost, until stuck."""
    while True:
        for pos, sub in _positions(t):
            hit = next(((l, r, env) for l, r in rules
                        for env in [naive_match(l, sub)] if env is not None), None)
            if hit is not None:
                l, r, env = hit
                t = _put(t, pos, _apply(r, env))
                break
        else:
            return t


def naive_critical_pairs(rules):
    """Every critical pair between oriented rules, found by unifying at each position."""
    out = []
    for l1, r1 in rules:
        for l2, r2 in rules:
            k = 1 + max([v for t in (l1, r1) for v in first_vars(t)] + [0])
            l2s, r2s = _offset(l2, k), _offset(r2, k)
            for pos, sub in _positions(l1):
                if isinstance(sub, Var) or (not pos and (l1, r1) == (l2, r2)):
                    continue
                env = {}
                if _bind(env, sub, l2s):
                    out.append((_inst(r1, env), _inst(_put(l1, pos, r2s), env)))
    return out


def unjoinable_pairs(rules):
    return [(s, t) for s, t in naive_critical_pairs(rules)
            if naive_normal_form(s, rules) != naive_normal_form(t, rules)]
