import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eqlearn.abstraction import Abstraction, ConstantWeight, WeightFactor, with_weights  # noqa: E402
from eqlearn.completion import Limits, ReplayError, complete, orient, overlaps, replay_proof  # noqa: E402
from eqlearn.kbo import KBO  # noqa: E402
from eqlearn.miner import MiningConfig  # noqa: E402
from eqlearn.terms import (  # noqa: E402
    App, Equation, Var, match_term, replace_at, substitute, subterms, variables)
from eqlearn.tptp import TPTPError, check_proof_text, load_problem, parse_problem, render_proof  # noqa: E402

from oracles import random_term  # noqa: E402

DATA = Path(__file__).parent / "data"

GROUP_AXIOMS = """
cnf(left_identity, axiom, mult(e,X) = X).
cnf(left_inverse, axiom, mult(inv(X),X) = e).
cnf(associativity, axiom, mult(mult(X,Y),Z) = mult(X,mult(Y,Z))).
"""

# inverse of weight 0 on top of the precedence: the textbook orientation
# inv(x*y) -> inv(y)*inv(x), under which group completion terminates
GROUP_ORDER = KBO({"inv": 0}, ["inv", "mult", "e"])


def group_problem(goal: str = "mult(inv(a),mult(a,b)) != b"):
    return parse_problem(GROUP_AXIOMS + f"cnf(goal, negated_conjecture, {goal}).", name="group")


@pytest.fixture
def group():
    return group_problem()


_criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n = marker.args[0]
    ok = call.excinfo is None
    prev = _criteria.get(n, True)
    _criteria[n] = prev and ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if _criteria[n] else 'FAIL'}")


# the four proof-fragment terms of the worked compression example
PROOF_FRAGMENTS = (
    "f(X, f(Y, f(f(Z,f(X,X)), f(Z,f(X,X)))))",
    "f(X, f(Y, f(f(Z,f(X,X)), f(f(X,X),Z))))",
    "f(X, f(Y, f(f(f(X,X),Z), f(f(X,X),Z))))",
    "f(f(f(X,X),f(X,X)), f(Y, f(f(f(X,X),Z), f(f(X,X),Z))))",
)


def corpus_files():
    """The hand-written TPTP corpus with the expectation line of each file."""
    out = []
    for f in sorted((DATA / "tptp").glob("*.p")):
        head = f.read_text().splitlines()[0]
        kind, _, expect = head.lstrip("% ").partition(": ")
        out.append((f, kind, expect))
    return out


def check_corpus_file(path, kind, expect):
    """None if ``path`` parses (or fails) as its header says, else a message."""
    try:
        p = load_problem(path)
    except TPTPError as e:
        if kind == "expect-error" and expect in str(e):
            return None
        return f"{path.name}: unexpected error {e}"
    if kind == "expect-error":
        return f"{path.name}: accepted, expected error {expect!r}"
    got = f"axioms={len(p.axioms)} goal={p.goal}"
    return None if got == expect else f"{path.name}: got {got!r}, expected {expect!r}"


def all_test_problems():
    out = []
    for f in sorted((DATA / "tptp").glob("*.p")) + sorted((DATA / "negation_domain").glob("*.p")):
        try:
            out.append(load_problem(f))
        except TPTPError:
            pass
    return out + [group_problem(), group_problem("mult(a,inv(a)) != e")]


def replay_failures(limits=None):
    """Prove every corpus problem; return (number proved, list of replay failures)."""
    proved, failures = 0, []
    for p in all_test_problems():
        out = complete(p, limits=limits or Limits(10.0, 5000))
        if not out.proved:
            continue
        proved += 1
        try:
            replay_proof(out.proof, dict(zip(out.state.axiom_ids, p.axioms)))
            check_proof_text(render_proof(out.proof, p.name), p)
        except ReplayError as e:
            failures.append(f"{p.name}: {e}")
    return proved, failures


def negation_domain():
    """The five-problem group domain with inverse written f(x,x); the last is held out."""
    return [load_problem(f) for f in sorted((DATA / "negation_domain").glob("NEG*.p"))]


def negation_config(**kw):
    return MiningConfig(**{"tau": 0.2, "limits": Limits(60.0, 2000), **kw})


def _generalize(rng, s, root=True):
    if not root and rng.random() < 0.3:
        return Var(rng.randrange(2))
    if isinstance(s, Var):
        return s
    return App(s.name, tuple(_generalize(rng, x, False) for x in s.args))


def random_weight_case(rng):
    """A term of at most 10 nodes and 1-3 weighted abstractions generalizing its subterms."""
    t = random_term(rng, [("f", 2), ("g", 1), ("a", 0)], 10, 2)
    while isinstance(t, Var):
        t = random_term(rng, [("f", 2), ("g", 1), ("a", 0)], 10, 2)
    subs = [s for _, s in subterms(t) if isinstance(s, App)]
    absts = [Abstraction.of(_generalize(rng, rng.choice(subs)), rng.random() < 0.2)
             for _ in range(rng.randint(1, 3))]
    mode = rng.choice([ConstantWeight(rng.choice([0, 1, 2])),
                       WeightFactor(rng.choice([0, 0.2, 0.5, 1]))])
    return t, with_weights(absts, mode)


def _one_step(t, l, r):
    """All one-step rewrites of ``t`` by ``l -> r`` (plain matching, no order)."""
    out = set()
    for pos, sub in subterms(t):
        sigma = match_term(l, sub)
        if sigma is not None:
            out.add(replace_at(t, pos, substitute(r, sigma)))
    return out


def _directions(rule):
    ds = [(rule.lhs, rule.rhs)]
    if not rule.oriented:
        ds.append((rule.rhs, rule.lhs))
    return ds


def random_rule(rng, sig, rid):
    while True:
        l = random_term(rng, sig, 8, 3)
        r = random_term(rng, sig, 8, 3)
        if l == r:
            continue
        rule = orient(Equation(l, r), rid)
        if isinstance(rule.lhs, Var):
            continue
        lv, rv = set(variables(rule.lhs)), set(variables(rule.rhs))
        if rule.oriented and rv <= lv or not rule.oriented and lv == rv and not isinstance(rule.rhs, Var):
            return rule


def check_cp_soundness(n_pairs, seed):
    rng = random.Random(seed)
    sig = [("f", 2), ("g", 1), ("a", 0)]
    emitted = 0
    for i in range(n_pairs):
        r1, r2 = random_rule(rng, sig, 0), random_rule(rng, sig, 1)
        for o in overlaps(r1, r2):
            emitted += 1
            ones1 = set().union(*(_one_step(o.peak, l, r) for l, r in _directions(r1)))
            ones2 = set().union(*(_one_step(o.peak, l, r) for l, r in _directions(r2)))
            assert o.left in ones1 and o.right in ones2, (r1, r2, o)
    return emitted
