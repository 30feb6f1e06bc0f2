from fractions import Fraction

import pytest

from eqlearn.abstraction import Abstraction, WeightFactor, with_weights
from eqlearn.completion import Cost, Justification, Limits, Proof, complete
from eqlearn.miner import (
    CSV_COLUMNS,
    AugmentationMode,
    CostProxy,
    GridResult,
    MiningConfig,
    MiningRun,
    Strategy,
    augment,
    default_strategies,
    domain_abstractions,
    effect_metric,
    filter_for_target,
    fresh_symbols,
    good_abstractions,
    interestingness,
    local_abstractions,
    mine_domain,
    partial_proof_abstractions,
    results_csv,
)
from eqlearn.terms import Equation, Symbol
from eqlearn.tptp import parse_problem, parse_term

from conftest import negation_config, negation_domain

T = parse_term
WA = AugmentationMode.WEIGHTED_ABSTRACTIONS
DA = AugmentationMode.DEFINITIONAL_AXIOMS
NEG_AXIOMS = """
cnf(left_identity, axiom, mult(e,X) = X).
cnf(left_inverse, axiom, mult(f(X,X),X) = e).
cnf(associativity, axiom, mult(mult(X,Y),Z) = mult(X,mult(Y,Z))).
"""
UNPROVABLE = parse_problem(NEG_AXIOMS + "cnf(g, negated_conjecture, mult(a,b) != mult(b,a)).", name="comm")
TRIVIAL = parse_problem("cnf(a, axiom, a = b). cnf(g, negated_conjecture, a != b).", name="trv")


def chain_proof(*texts):
    terms = tuple(T(s) for s in texts)
    steps = tuple(Justification(0, (), ()) for _ in terms[1:])
    return Proof(Equation(terms[0], terms[-1]), terms, steps, {0: Equation(terms[0], terms[-1])})


def test_interestingness_examples():
    assert interestingness(Equation(T("a"), T("b")), chain_proof("a", "b")) == Fraction(1, 2)
    lemma = Equation(T("g(g(a))"), T("g(g(b))"))
    proof = chain_proof("g(g(a))", "h(" + ",".join(["a"] * 53) + ")", "g(g(b))")
    assert interestingness(lemma, proof) == Fraction(60, 36)


def test_smaller_statement_scores_higher():
    proof = chain_proof("f(a,a)", "f(b,b)")
    assert interestingness(Equation(T("a"), T("b")), proof) > interestingness(
        Equation(T("f(a,a)"), T("f(b,b)")), proof)


def test_interestingness_ignores_variable_names():
    p1 = chain_proof("f(X,Y)", "f(Y,X)")
    assert interestingness(Equation(T("f(X,Y)"), T("f(Y,X)")), p1) == \
        interestingness(Equation(T("f(Z,W)"), T("f(W,Z)")), p1)


def test_effect_metric_examples():
    wall = CostProxy.WALL_CLOCK
    assert effect_metric(Cost(250.0, 0), Cost(10.0, 0), wall) == 25
    assert effect_metric(Cost(250.0, 7), None, wall) == 0
    assert effect_metric(Cost(3.0, 40), Cost(3.0, 40)) == 1
    assert effect_metric(Cost(1.0, 40), Cost(1.0, 10)) == 4
    assert effect_metric(Cost(1.0, 0), Cost(1.0, 0)) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        MiningConfig(tau=-1)
    with pytest.raises(ValueError):
        MiningConfig(top_k_lemmas=0)
    with pytest.raises(ValueError):
        Strategy(WA, -0.5)
    assert len(default_strategies()) == 8
    assert Strategy(WA, 0.2).weight_mode == WeightFactor(Fraction(1, 5))


def test_partial_proof_abstractions():
    assert partial_proof_abstractions(TRIVIAL) == []
    quiet = parse_problem("cnf(a, axiom, f(a) = b). cnf(g, negated_conjecture, c != d).")
    assert partial_proof_abstractions(quiet, MiningConfig(partial_budget=Limits(1.0))) == []
    got = partial_proof_abstractions(UNPROVABLE, MiningConfig(partial_budget=Limits(None, 100)))
    assert got[0].pattern == T("f(X,X)")


def test_partial_run_that_proves_uses_the_proof():
    p = negation_domain()[2]
    got = partial_proof_abstractions(p, MiningConfig(partial_budget=Limits(10.0)))
    assert Abstraction.of(T("f(X,X)")) in got


def test_local_abstractions():
    config = MiningConfig(limits=Limits(None, 20))
    assert local_abstractions(UNPROVABLE, Strategy(WA), config) is None
    run = local_abstractions(TRIVIAL, Strategy(WA))
    assert run.abstractions == () and run.em == 1
    run = local_abstractions(negation_domain()[2], Strategy(WA), negation_config())
    assert Abstraction.of(T("f(X,X)")) in run.abstractions and run.em > 0


def test_definitional_augmentation():
    absts = [Abstraction.of(T("f(X,X)")), Abstraction.of(T("mult(X,f(X,X))"))]
    p = parse_problem(NEG_AXIOMS + "cnf(x, axiom, abs_0 = e). cnf(g, negated_conjecture, a != b).")
    syms = fresh_symbols(absts, p.signature)
    assert syms == [Symbol("abs_1", 1), Symbol("abs_2", 1)]
    q, weighted = augment(p, absts, Strategy(DA))
    assert weighted == [] and len(q.axioms) == len(p.axioms) + 2
    assert str(q.axioms[-2]) == "abs_1(X0) = f(X0,X0)"
    q, weighted = augment(p, absts, Strategy(WA, 0.5))
    assert q is p and [w.assigned_weight for w in weighted] == [Fraction(1, 2), Fraction(1)]


def test_filter_for_target():
    target = negation_domain()[4]
    ok = [Abstraction.of(T("f(X,X)")), Abstraction.of(T("mult(e,X)"))]
    assert filter_for_target(ok, target) == ok
    assert filter_for_target(ok + [Abstraction.of(T("inv(X)"))], target) == ok
    assert filter_for_target([], target) == []


def _fake_result(name, em, patterns):
    absts = tuple(Abstraction.of(T(s)) for s in patterns)
    run = MiningRun(name, Strategy(WA), absts, Cost(1.0, 10), Cost(1.0, 5), Fraction(em))
    return GridResult(name, 0, Strategy(WA), run, Cost(1.0, 10))


def test_good_set_threshold_and_dedup():
    results = [_fake_result("p", "1/2", ["f(X,X)", "g(Y)"]),
               _fake_result("q", "3", ["f(Z,Z)", "h(X,Y)"]),
               GridResult("r", 0, Strategy(WA), None, Cost(1.0, 0))]
    assert [str(a) for a in good_abstractions(results, 0)] == ["f(X0,X0)", "g(X0)", "h(X0,X1)"]
    sizes = [len(good_abstractions(results, tau)) for tau in (0, Fraction(1, 2), 1, 3, 4)]
    assert sizes == sorted(sizes, reverse=True) and sizes[-1] == 0


def test_domain_without_proofs_is_empty():
    config = MiningConfig(limits=Limits(None, 5))
    assert domain_abstractions([UNPROVABLE], [Strategy(WA)], config) == []
    assert domain_abstractions([], [Strategy(WA)], config) == []


def test_tau_zero_without_final_compress_is_union():
    domain = negation_domain()[:2]
    config = negation_config(tau=0, final_compress=False)
    strategies = [Strategy(WA, 0.2), Strategy(DA, 0.2)]
    got, results = mine_domain(domain, strategies, config)
    union = []
    for r in results:
        for a in r.run.abstractions:
            if a not in union:
                union.append(a)
    assert got == union


def test_domain_pipeline_on_negation_family():
    domain = negation_domain()
    train, held_out = domain[:4], domain[4]
    config = negation_config()
    absts = domain_abstractions(train, [Strategy(WA, 0.2)], config, target=held_out)
    assert Abstraction.of(T("f(X,X)")) in absts
    assert all(filter_for_target([a], held_out) for a in absts)
    assert absts == domain_abstractions(train, [Strategy(WA, 0.2)], config, target=held_out, jobs=2)
    weighted = with_weights(absts, WeightFactor(Fraction(1, 5)))
    drops = 0
    for p in domain:
        base = complete(p, limits=config.limits)
        aug = complete(p, weighted, config.limits)
        assert aug.proved and aug.cost.selected_cps <= base.cost.selected_cps
        drops += aug.cost.selected_cps < base.cost.selected_cps
    assert drops >= 1


def test_results_csv():
    results = [_fake_result("p", "1/2", ["f(X,X)"]),
               GridResult("r", 1, Strategy(DA, 0.7), None, Cost(2.5, 0))]
    lines = results_csv(results).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("p,WeightedAbstractions,0.2,0.5,1,10,")
    assert lines[2] == "r,DefinitionalAxioms,0.7,,0,0,2.500000,,"
