"""Component groups and Whittaker-normalized pairing tables.

Run: python3 demos/02_pairing_tables.py
"""

from endotransfer.catalog import find_entry, load_catalog
from endotransfer.components import (AD, check_dual_relation, component_group, renormalized_table,
                                     whittaker_table)
from endotransfer.lattice import CplxVector

catalog = load_catalog()


def show(table, title):
    print(title)
    for row in table.csv_rows():
        print("   " + "".join(f"{c:>9}" for c in row))


for name, mu in (("a1-split", [2]), ("c2-type", [2, 1])):
    entry = find_entry(catalog, name)
    p = entry.parameter(CplxVector.of(mu))
    cg = component_group(p, AD)
    generic = entry.whittaker.generic()
    pk, pd = entry.packet(p), entry.packet(p, renormalized=True)
    print(f"\n{name}, mu = {mu}: component group {cg.describe()}, {len(pk)} members")
    table = whittaker_table(cg, pk, "lambda", generic)
    show(table, "  classical table, generic member for lambda has the trivial column:")
    show(renormalized_table(table), "  same values on the conjugate members:")
    d_table = whittaker_table(cg, pd, "lambda", generic)
    bar = whittaker_table(cg, pk, "lambda_bar", generic)
    print("  renormalized lambda table equals the classical lambda-bar table on conjugates:",
          check_dual_relation(d_table, bar))
