"""
Completion for group theory
===========================

Prove a cancellation law from the three group axioms, print the replayable
proof, then run completion to saturation and check the result is confluent.
"""

from eqlearn.completion import Limits, complete, critical_pairs, normalize
from eqlearn.kbo import KBO
from eqlearn.tptp import parse_problem, render_outcome

AXIOMS = """
cnf(left_identity, axiom, mult(e,X) = X).
cnf(left_inverse, axiom, mult(inv(X),X) = e).
cnf(associativity, axiom, mult(mult(X,Y),Z) = mult(X,mult(Y,Z))).
"""

# inv gets weight 0 and tops the precedence, the classic ordering under
# which the group axioms complete to a finite system.
order = KBO({"inv": 0}, ["inv", "mult", "e"])

problem = parse_problem(AXIOMS + "cnf(goal, negated_conjecture, mult(inv(a),mult(a,b)) != b).",
                        name="cancel")
outcome = complete(problem, order=order)
print(render_outcome(outcome, problem.name))
print("selected critical pairs:", outcome.cost.selected_cps)

# Commutativity does not follow, so the prover saturates instead.
open_goal = parse_problem(AXIOMS + "cnf(goal, negated_conjecture, mult(a,b) != mult(b,a)).",
                          name="comm")
sat = complete(open_goal, limits=Limits(10.0), order=order)
print("\nstatus:", sat.status.value)
for rule in sat.state.rules():
    print("  ", rule)

# Every critical pair of the final system joins: the system is confluent.
rules = sat.state.rules()
pairs = [cp for r1 in rules for r2 in rules for cp in critical_pairs(r1, r2, order)]
joined = sum(normalize(cp.lhs, sat.state)[0] == normalize(cp.rhs, sat.state)[0] for cp in pairs)
print(f"\n{joined} of {len(pairs)} critical pairs join")
