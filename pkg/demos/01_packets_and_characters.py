"""Packets for the split rank-one group and what renormalization does to them.

Run: python3 demos/01_packets_and_characters.py
"""

from endotransfer.catalog import find_entry, load_catalog
from endotransfer.lattice import CplxVector
from endotransfer.packets import (normalized_stable_data, opposite_representative, renormalize_parameter,
                                  build_packet, stable_character_data, stable_value)
from endotransfer.torus import enumerate_presentations

entry = find_entry(load_catalog(), "a1-split")
p = entry.parameter(CplxVector.of([2]))
classical, renormalized = entry.packet(p), entry.packet(p, renormalized=True)

print(f"parameter mu = 2 on {entry.name}: {len(classical)} members")
for m in classical.members:
    print(f"  {m.label:3} character data nu = {[str(d.nu.re[0]) for d in m.char_data]}")
print("renormalized packet: every exponent is negated")
for m in renormalized.members:
    print(f"  {m.label:5} nu = {[str(d.nu.re[0]) for d in m.char_data]}")

# Two other routes to the same renormalized data.
opp = build_packet(opposite_representative(p))
print("opposite-orientation representative gives the same data:",
      stable_character_data(opp) == stable_character_data(renormalized))
ren = build_packet(renormalize_parameter(p))
print("renormalized parameter agrees once the rho-shift is undone:",
      normalized_stable_data(ren) == normalized_stable_data(renormalized))

# Stable characters of the two packets are complex conjugates pointwise.
points = enumerate_presentations(p.frame.torus(), max_denominator=4, bound=1)
worst = max(abs(stable_value(renormalized, z) - stable_value(classical, z).conjugate()) for z in points)
print(f"stable values conjugate at {len(points)} torus points, max deviation {worst:.1e}")
