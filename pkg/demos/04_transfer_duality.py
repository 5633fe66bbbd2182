"""Finite toy models of transfer: matching with Δ′ forces matching with Δ_D.

Run: python3 demos/04_transfer_duality.py
"""

from endotransfer.harness import (apply, conj_vec, dualize, match_geometric, match_renormalized,
                                  random_function, random_model, run_harness, transfer)

m = random_model(2024, max_size=4)
f = random_function(m, 2024)
print(f"model: {len(m.gamma_classes)} stable classes x {len(m.delta_classes)} twisted classes, c = {m.c}")

# Start from a function whose conjugate has a Δ′-matching partner ...
f1 = transfer(m, conj_vec(f))
print("classical matching for conj f:", match_geometric(m, conj_vec(f), f1))
# ... conjugate back and scale by c: that partner matches f for Δ_D = c·conj(Δ′).
f1d = dualize(m, f1)
print("renormalized matching for f:  ", match_renormalized(m, f, f1d))
print("first entries, exact:", f1d[0], "=", apply(m.d_factor_matrix, f)[0])

print()
print(run_harness(500, 6).text())
print(run_harness(20, 6, corrupt=True).text())
