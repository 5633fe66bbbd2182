"""The seven acceptance criteria, each with its tolerance and time budget.

Every test records one ``ACCEPTANCE n ... PASS|FAIL`` line, shown in the
pytest summary and printed when this file is run as a script.
"""

import time
from collections import Counter
from fractions import Fraction
from itertools import product

import pytest

from conftest import ACCEPTANCE_LINES
from endotransfer.catalog import find_entry, load_catalog, parse_catalog, serialize
from endotransfer.cli import run
from endotransfer.components import (AD, FULL, SC, TorsionElement, check_dual_relation, component_group,
                                     is_perfect, renormalized_table, whittaker_table)
from endotransfer.factors.theorems import CONTEXTS, TOLERANCE, load_fixtures, theorem_suite
from endotransfer.harness import run_harness
from endotransfer.lattice import CplxVector
from endotransfer.packets import (build_packet, conjugate_member, kappa_membership, normalized_stable_data,
                                  opposite_representative, renormalize_parameter, stable_character_data,
                                  stable_value)
from endotransfer.torus import (CharacterData, check_character_congruence, consistent_on_overlaps,
                                d_character, enumerate_presentations, overlap_classes, same_character)
from oracles import oracle_ad, oracle_full, oracle_sc, same_ad

CATALOG = load_catalog()


def record(number, title, ok, detail, elapsed, budget=None):
    timing = f"{elapsed:.2f} s" + (f" (budget {budget} s)" if budget else "")
    line = f"ACCEPTANCE {number} {title}: {'PASS' if ok else 'FAIL'} - {detail}; {timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def catalog_parameters():
    return [(e, p) for e in CATALOG for p in e.sample_parameters()]


# ---------------------------------------------------------------------- 1

def test_identity_suite():
    start = time.perf_counter()
    report = theorem_suite(seed=0, n=1000, abort=False)
    elapsed = time.perf_counter() - start
    checks = [c for r in report.results for c in r.checks]
    names = {f.name for f in load_fixtures()}
    every_fixture_checked = {r.name for r in report.results if r.status == "pass"} == names
    ok = (report.passed and every_fixture_checked and elapsed < 10
          and all(c.proved and c.instantiations >= 1000 and c.max_error <= TOLERANCE for c in checks))
    worst = max(c.max_error for c in checks)
    record(1, "identity suite", ok,
           f"{len(names)} fixtures, {len(checks)} fixture-contexts over {len(CONTEXTS)} contexts, "
           f"all proved symbolically, >= 1000 instantiations each, max error {worst:.1e}", elapsed, 10)
    assert ok, report.text()


# ---------------------------------------------------------------------- 2

def _grid(rank):
    if rank == 1:
        vals = sorted({Fraction(k, q) for q in (1, 2, 4) for k in range(-q, q + 1)})
    else:
        vals = sorted({Fraction(k, q) for q in (1, 2) for k in range(-q, q + 1)})
    return list(product(vals, repeat=rank))


def _tori():
    out = {}
    for e in CATALOG:
        out.setdefault(e.involution.matrix, (e, e.frame.torus()))
    return list(out.values())


def test_character_well_definedness():
    start = time.perf_counter()
    agree = tested = congruent = mutations = detected = 0
    for entry, torus in _tori():
        points = enumerate_presentations(torus, max_denominator=4, bound=1)
        classes = overlap_classes(points)
        grid = _grid(torus.rank)
        for nu in grid:
            for lam in grid:
                data = CharacterData(CplxVector.of(nu), lam)
                ok = check_character_congruence(data, torus.sigma)
                tested += 1
                congruent += ok
                agree += consistent_on_overlaps(data, classes) == ok
        # lambda mutated by vectors outside the submodule must be caught
        shifts = [v for v in _grid(torus.rank) if not kappa_membership(v, entry.frame)]
        for p in entry.sample_parameters():
            base = build_packet(p).members[0].char_data[0]
            for v in shifts:
                mutated = CharacterData(base.nu, tuple(a + b for a, b in zip(base.lam, v)))
                mutations += 1
                detected += (not consistent_on_overlaps(mutated, classes)
                             or not same_character(base, mutated, points))
    elapsed = time.perf_counter() - start
    ok = agree == tested and 0 < congruent < tested and detected == mutations > 0 and elapsed < 5
    record(2, "character well-definedness", ok,
           f"{agree}/{tested} candidate characters on {len(_tori())} catalog tori ({congruent} congruent) agree "
           f"with the congruence on all overlaps (denominators <= 4, coordinates in [-1, 1]); {detected}/{mutations} lambda mutations outside the "
           f"submodule detected", elapsed, 5)
    assert ok


# ---------------------------------------------------------------------- 3

def test_conjugation_and_renormalization():
    start = time.perf_counter()
    params = catalog_parameters()
    exact_ok = value_ok = 0
    points_checked = 0
    worst = 0.0
    for entry, p in params:
        pk, pd = entry.packet(p), entry.packet(p, renormalized=True)
        d_data = stable_character_data(pd)
        same = (Counter(d_data) == Counter(d_character(d) for d in stable_character_data(pk))
                and stable_character_data(build_packet(opposite_representative(p))) == d_data
                and normalized_stable_data(build_packet(renormalize_parameter(p))) == normalized_stable_data(pd))
        exact_ok += same
        good = True
        if p.bounded:
            for pt in enumerate_presentations(p.frame.torus(), max_denominator=4, bound=1):
                err = abs(stable_value(pd, pt) - stable_value(pk, pt).conjugate())
                worst = max(worst, err)
                points_checked += 1
                good = good and err <= 1e-12
        value_ok += good
    elapsed = time.perf_counter() - start
    ok = exact_ok == value_ok == len(params) and elapsed < 5
    record(3, "conjugation/renormalization", ok,
           f"{exact_ok}/{len(params)} catalog parameters with equal stable multisets (D-packet, renormalized "
           f"parameter, opposite representative); {points_checked} stable values conjugate, max error "
           f"{worst:.1e}", elapsed, 5)
    assert ok


# ---------------------------------------------------------------------- 4

ORACLES = {AD: oracle_ad, FULL: oracle_full}


def test_component_group_oracle():
    start = time.perf_counter()
    compared = agree = 0
    elementary = True
    for e in CATALOG:
        frame = e.frame
        if frame.rank > 3:
            continue
        for iso in sorted(set(e.isogenies) | {AD}):
            cg = component_group(frame, iso)
            if iso == SC:
                reps = oracle_sc(frame, 4)
                ker = [x for x in reps if same_ad(frame.rd, x, (0,) * frame.rank)]
                extra = len(cg.kernel) == len(ker)
            else:
                reps = ORACLES[iso](frame, 4)
                extra = True
            coords = {cg.coords(TorsionElement(q)) for q in reps}
            compared += 1
            agree += cg.order == len(reps) == len(coords) and extra
            if iso == AD:
                elementary = elementary and (cg.order == 1 or cg.is_elementary_two)
    elapsed = time.perf_counter() - start
    ok = agree == compared and elementary and elapsed < 10
    record(4, "component-group oracle", ok,
           f"{agree}/{compared} (frame, isogeny) pairs match brute-force torsion enumeration at denominator 4; "
           f"adjoint groups elementary abelian 2: {'yes' if elementary else 'no'}", elapsed, 10)
    assert ok


# ---------------------------------------------------------------------- 5

def test_pairing_structure():
    start = time.perf_counter()
    entry = find_entry(CATALOG, "a1-split")
    generic = entry.whittaker.generic()
    results = []
    for p in entry.sample_parameters():
        pk, pd = entry.packet(p), entry.packet(p, renormalized=True)
        cg = component_group(p, AD)
        t = whittaker_table(cg, pk, "lambda", generic)
        bar = whittaker_table(cg, pk, "lambda_bar", generic)
        r = renormalized_table(t)
        relation = all(r.column(j) == t.column(j) and r.columns[j] == conjugate_member(t.columns[j])
                       for j in range(len(pk)))
        d = whittaker_table(cg, pd, "lambda", generic)
        results.append(
            cg.describe() == "Z/2" and len(pk) == 2 and is_perfect(t, cg)
            and all(v == 0 for v in t.column(t.base_column))
            and t.signs() == [[1, 1], [1, -1]]
            and relation
            and all(v == 0 for v in d.column(d.base_column))
            and check_dual_relation(d, bar))
    elapsed = time.perf_counter() - start
    ok = all(results)
    record(5, "pairing structure", ok,
           f"a1-split, {sum(results)}/{len(results)} parameters: component group Z/2, packet size 2, Whittaker "
           f"table perfect with trivial base column, renormalized table relation, D-base column trivial",
           elapsed)
    assert ok


# ---------------------------------------------------------------------- 6

def test_transfer_duality_toys():
    start = time.perf_counter()
    report = run_harness(500, 6)
    elapsed = time.perf_counter() - start
    ok = report.passed and report.verified == 500 and elapsed < 10
    record(6, "transfer-duality toys", ok,
           f"{report.verified}/500 exact models (sizes <= 6), classical and renormalized matching imply each "
           f"other, {len(report.counterexamples)} counterexamples", elapsed, 10)
    assert ok


# ---------------------------------------------------------------------- 7

def test_determinism_and_round_trip():
    from importlib import resources
    start = time.perf_counter()
    text = resources.files("endotransfer").joinpath("data/catalog.json").read_text("utf-8")
    round_trip = serialize(parse_catalog(text)).encode("utf-8") == text.encode("utf-8")
    commands = [
        ["--seed", "7", "--json", "identities", "--instantiations", "300"],
        ["--seed", "7", "--json", "harness", "--seeds", "100"],
        ["--seed", "7", "--json", "packet", "c2-type", "--mu", "4,3"],
        ["--seed", "7", "--json", "pairing", "c2-type", "--mu", "2,1", "--whittaker", "lambda"],
        ["--seed", "7", "--json", "catalog"],
    ]
    same = 0
    for argv in commands:
        first, second = run(argv), run(argv)
        same += first[0] == second[0] and first[1].render(True) == second[1].render(True)
    elapsed = time.perf_counter() - start
    ok = round_trip and same == len(commands)
    record(7, "determinism/round-trip", ok,
           f"bundled catalog round-trips byte-exact: {'yes' if round_trip else 'no'}; "
           f"{same}/{len(commands)} commands reproduce identical reports", elapsed)
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
