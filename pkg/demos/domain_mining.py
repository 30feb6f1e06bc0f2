"""
Mining abstractions from a problem domain
=========================================

Five group-theory problems write the inverse of x as f(x,x).  Mining the
first four should surface f(X,X), and steering the prover with the mined
abstractions should make the fifth problem cheaper.
"""

from fractions import Fraction
from pathlib import Path

from eqlearn.abstraction import WeightFactor, with_weights
from eqlearn.completion import Limits, complete
from eqlearn.miner import AugmentationMode, MiningConfig, Strategy, mine_domain, results_csv
from eqlearn.tptp import load_problem, render_abstractions

DATA = Path(__file__).resolve().parents[1] / "tests" / "data" / "negation_domain"
domain = [load_problem(f) for f in sorted(DATA.glob("NEG*.p"))]
train, held_out = domain[:4], domain[4]
print("held out:", held_out.goal)

# Selected critical pairs are a deterministic cost, so reruns agree exactly.
config = MiningConfig(tau=Fraction(1, 5), limits=Limits(60.0, 2000))
strategy = Strategy(AugmentationMode.WEIGHTED_ABSTRACTIONS, Fraction(1, 5))
absts, results = mine_domain(train, [strategy], config, target=held_out)

print("\nper-problem runs:")
print(results_csv(results))
print("domain abstractions:")
print(render_abstractions(absts))

# Compare the held-out problem with and without the mined abstractions.
base = complete(held_out, limits=config.limits)
aug = complete(held_out, with_weights(absts, WeightFactor(Fraction(1, 5))), config.limits)
drop = 1 - aug.cost.selected_cps / base.cost.selected_cps
print(f"selected pairs: {base.cost.selected_cps} -> {aug.cost.selected_cps} ({drop:.0%} fewer)")
