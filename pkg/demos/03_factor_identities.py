"""Symbolic transfer-factor identities, checked by rewriting and by sampling.

Run: python3 demos/03_factor_identities.py
"""

from endotransfer.factors import CONTEXTS, define_factor, parse, prove_equal, theorem_suite
from endotransfer.factors.sampler import instantiate_random

ctx = CONTEXTS[0]
primed = define_factor("Δ′", ctx)
renorm = define_factor("Δ_D", ctx)
print("Δ′(p;q)  =", primed.text())
print("Δ_D(p;q) =", renorm.text())

proof = prove_equal(parse("conj(`Δ′`(p;q))", ctx), renorm, ctx)
print("\nconjugating Δ′ gives Δ_D on bounded data:")
print(proof.text())

print("\nproduct Δ′·Δ_D sampled at random unimodular values:",
      [round(abs(instantiate_random(primed * renorm, ctx, seed) - 1), 15) for seed in range(3)])

whittaker = next(c for c in CONTEXTS if c.whittaker and c.detV_sign == -1 and not c.twisted)
report = theorem_suite(seed=0, n=1000, contexts=[whittaker], names=["whittaker-constant"])
print("\n" + report.text())

full = theorem_suite(seed=0, n=1000)
print("\n" + full.text().splitlines()[0])
