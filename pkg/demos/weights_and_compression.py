"""
Abstracted weights and pattern compression
==========================================

A small tour of how abstractions discount term weight and how the
compressor finds them in a pile of proof terms.
"""

from eqlearn.abstraction import Abstraction, ConstantWeight, WeightFactor, abstracted_weight, with_weights
from eqlearn.compressor import compress, rewrite_with
from eqlearn.lambda_io import parse_external_abstraction, to_lambda
from eqlearn.terms import Equation, Symbol
from eqlearn.tptp import parse_term

# An equation whose left side repeats the distributivity shape twice over.
eq = Equation(parse_term("times(c, plus(times(g(f(a),b), f(x)), times(g(f(a),b), g(y,z))))"),
              parse_term("g(a,b)"))
print("plain weight:", abstracted_weight(eq, []))

# Treat plus(times(X,Y),times(X,Z)) as a single unit of weight 1.  The
# subterm it covers now costs 1 plus the weight of each distinct image.
distrib = Abstraction.of(parse_term("plus(times(X,Y),times(X,Z))"))
print("with the distributivity abstraction:", abstracted_weight(eq, with_weights([distrib], ConstantWeight(1))))

# Weight-factor mode scales the discount by the pattern's skeleton size.
for k in (0, 0.2, 0.7, 1):
    absts = with_weights([distrib], WeightFactor(k))
    print(f"  weight factor {k}: {abstracted_weight(eq, absts)}")

# Four terms from an equational proof.  Almost every subterm is f(t,t).
fragments = [parse_term(s) for s in (
    "f(X, f(Y, f(f(Z,f(X,X)), f(Z,f(X,X)))))",
    "f(X, f(Y, f(f(Z,f(X,X)), f(f(X,X),Z))))",
    "f(X, f(Y, f(f(f(X,X),Z), f(f(X,X),Z))))",
    "f(f(f(X,X),f(X,X)), f(Y, f(f(f(X,X),Z), f(f(X,X),Z))))",
)]
print("\ncorpus weight:", sum(t.weight for t in fragments))
for sp in compress(fragments, top_n=4):
    print(f"  {str(sp.pattern):40} utility={sp.utility:3} matches={sp.match_count:2} saves={sp.gain}")

# Rewriting with the winner shows the abbreviation at work.
g = Symbol("g", 1)
print("\nabbreviated:", rewrite_with(fragments[:1], parse_term("f(X,X)"), g)[0])

# Patterns travel to and from external tools as s-expressions.
print("\nas a closed lambda term:", to_lambda(fragments[0]))
print("external '(f #0 #0)':", parse_external_abstraction("(f #0 #0)"))
print("external '(#0 a)' is higher-order:", parse_external_abstraction("(#0 a)"))
