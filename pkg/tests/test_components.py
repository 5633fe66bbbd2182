from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from endotransfer.components import (
    AD, FULL, SC, ConsistencyError, TorsionElement, UnsupportedError, ValidityError,
    check_dual_relation, component_group, endoscopic_roots, grading_vector, is_perfect,
    pairing_from_signs, renormalized_table, surjection, tn_pairing_oracle, whittaker_table,
)
from endotransfer.lattice import BasedRootDatum, CplxVector, Involution, dot, weyl_group
from endotransfer.packets import (
    RENORMALIZED, DualGroupFrame, build_packet, build_packet_D, conjugate_member, validate_parameter,
)
from endotransfer.torus import DomainError
from oracles import oracle_ad, oracle_full, oracle_sc, same_ad

A1 = BasedRootDatum(1, ((1,),), ((2,),))
PGL2 = BasedRootDatum(1, ((2,),), ((1,),))
A1A1 = BasedRootDatum(2, ((1, 0), (0, 1)), ((2, 0), (0, 2)))
A2 = BasedRootDatum(2, ((2, -1), (-1, 2)), ((1, 0), (0, 1)))
B2 = BasedRootDatum(2, ((1, -1), (0, 1)), ((1, -1), (0, 2)))
GL2 = BasedRootDatum(2, ((1, -1),), ((1, -1),))


def ds(rd):
    return DualGroupFrame(rd, Involution.scalar(rd.rank, -1, "discrete-series"))


FRAMES = {
    "a1": ds(A1), "pgl2": ds(PGL2), "a1a1": ds(A1A1), "a2": ds(A2), "b2": ds(B2),
    "gl2": DualGroupFrame(GL2, Involution(((0, 1), (1, 0)), "discrete-series")),
    "split-torus": DualGroupFrame(BasedRootDatum(1), Involution.scalar(1, 1)),
}
DEN = 12


@pytest.mark.parametrize("name", FRAMES)
def test_ad_matches_oracle(name):
    frame = FRAMES[name]
    cg = component_group(frame, AD)
    reps = oracle_ad(frame, DEN)
    assert cg.order == len(reps)
    coords = [cg.coords(TorsionElement(q)) for q in reps]
    assert len(set(coords)) == len(reps)


@pytest.mark.parametrize("name", FRAMES)
def test_full_matches_oracle(name):
    frame = FRAMES[name]
    cg = component_group(frame, FULL)
    reps = oracle_full(frame, DEN)
    assert cg.order == len(reps)
    assert len({cg.coords(TorsionElement(q)) for q in reps}) == len(reps)


@pytest.mark.parametrize("name", FRAMES)
def test_sc_matches_oracle(name):
    frame = FRAMES[name]
    cg = component_group(frame, SC)
    xs = oracle_sc(frame, DEN)
    assert cg.order == len(xs)
    assert len({cg.coords(TorsionElement(x)) for x in xs}) == len(xs)
    # the kernel of sc -> ad is the set of classes pairing integrally with every root
    ker = [x for x in xs if same_ad(frame.rd, x, (0,) * frame.rank)]
    assert len(cg.kernel) == len(ker)
    ad = component_group(frame, AD)
    images = surjection(cg, ad)
    assert set(images.values()) == {ad.coords(e) for e in ad.elements}
    zero_ad = ad.coords(ad.identity())
    assert {cg.coords(k) for k in cg.kernel} == {c for c, a in images.items() if a == zero_ad}


def test_component_examples():
    assert component_group(FRAMES["a1"], AD).divisors == (2,)
    assert component_group(FRAMES["a1"], SC).divisors == (4,)
    assert component_group(FRAMES["split-torus"], FULL).order == 1
    assert component_group(FRAMES["pgl2"], AD).order == 1
    b2 = component_group(FRAMES["b2"], AD)
    assert b2.divisors == (2, 2)
    assert component_group(FRAMES["b2"], SC).order == 8


def test_group_law():
    cg = component_group(FRAMES["a2"], SC)
    for a in cg.elements:
        for b in cg.elements:
            c = cg.add(a, b)
            assert cg.coords(c) == tuple((x + y) % d for x, y, d in
                                         zip(cg.coords(a), cg.coords(b), cg.divisors))
            assert cg.coords(TorsionElement(tuple(x + y for x, y in zip(a.q, b.q)))) == cg.coords(c)


def test_non_regular_rejected():
    from endotransfer.packets import DiscreteParameter
    frame = FRAMES["a1"]
    p = DiscreteParameter(CplxVector.of([0]), (Fraction(0),), frame)
    with pytest.raises(UnsupportedError):
        component_group(p)


def test_endoscopic_examples():
    a1 = FRAMES["a1"]
    assert endoscopic_roots(TorsionElement((Fraction(1, 2),)), a1).roots_fixed == ()
    assert len(endoscopic_roots(TorsionElement((0,)), a1).roots_fixed) == 2
    b2 = FRAMES["b2"]
    e = endoscopic_roots(TorsionElement((Fraction(1, 2), Fraction(1, 2))), b2)
    # two orthogonal root pairs: A1 x A1
    assert sorted(e.roots_fixed) == sorted([(1, -1), (-1, 1), (1, 1), (-1, -1)])
    assert e.rank == 2 and dot((1, -1), (1, 1)) == 0
    f = endoscopic_roots(TorsionElement((Fraction(1, 2), 0)), b2)
    assert sorted(f.roots_fixed) == [(0, -1), (0, 1)]


def test_well_positioned():
    b2 = FRAMES["b2"]
    s = TorsionElement((Fraction(1, 2), Fraction(1, 2)))
    assert endoscopic_roots(s, b2, CplxVector.of([2, 1])).well_positioned
    # a Weyl conjugate that is negative on a fixed positive root
    assert not endoscopic_roots(s, b2, CplxVector.of([1, -2])).well_positioned
    # still well positioned when it only fails off the subsystem
    assert endoscopic_roots(s, b2, CplxVector.of([2, -1])).well_positioned


def test_tn_oracle():
    assert tn_pairing_oracle((1,), TorsionElement((Fraction(1, 2),))) == -1
    assert tn_pairing_oracle((2,), TorsionElement((Fraction(1, 2),))) == 1
    with pytest.raises(DomainError):
        tn_pairing_oracle((1,), TorsionElement((Fraction(1, 4),)))


def a1_packet(k=2):
    return build_packet(validate_parameter(CplxVector.of([k]), [0], FRAMES["a1"]))


def c2_packet():
    p = validate_parameter(CplxVector.of([2, 1]), [0, 0], FRAMES["b2"])
    w = weyl_group(B2)
    return build_packet(p, w.closure([w.from_word((0,))]))


def test_a1_table():
    pk = a1_packet()
    cg = component_group(pk.parameter, AD)
    t = pairing_from_signs(cg, pk, 0)
    assert t.signs() == [[1, 1], [1, -1]]
    assert is_perfect(t, cg)


def test_c2_table_perfect():
    pk = c2_packet()
    cg = component_group(pk.parameter, AD)
    t = pairing_from_signs(cg, pk, 0)
    assert len(pk) == 4 and is_perfect(t, cg)
    sc = component_group(pk.parameter, SC)
    t_sc = pairing_from_signs(sc, pk, 0)
    for j in range(len(pk)):
        for k in sc.kernel:
            assert t_sc.column(j)[sc.elements.index(k)] == 0


def test_grading_rejects_inconsistent_subgroup():
    w = weyl_group(B2)
    with pytest.raises(ValidityError):
        grading_vector(B2, w.closure([w.from_word((1,))]))
    # quasi-split grading is rho
    assert grading_vector(A1, [w0 for w0 in weyl_group(A1) if w0.length == 0]) == (Fraction(1, 2),)


def test_corrupted_signs_raise():
    pk = a1_packet()
    cg = component_group(pk.parameter, AD)
    good = {}
    for s in cg.elements:
        for a in pk.members:
            for b in pk.members:
                good[(cg.coords(s), a.label, b.label)] = 0 if a == b or cg.coords(s) == (0,) else Fraction(1, 2)
    pairing_from_signs(cg, pk, 0, rel_signs=good)
    bad = dict(good)
    bad[((1,), "1", "s1")] = 0
    with pytest.raises(ConsistencyError):
        pairing_from_signs(cg, pk, 0, rel_signs=bad)


def test_zeta_must_be_character():
    pk = a1_packet()
    cg = component_group(pk.parameter, SC)
    with pytest.raises(ValidityError):
        pairing_from_signs(cg, pk, 0, zeta=lambda s: Fraction(1, 2) if cg.coords(s) == (1,) else 0)
    with pytest.raises(ValidityError):
        pairing_from_signs(cg, pk, 0, zeta=lambda s: Fraction(cg.coords(s)[0], 4), zeta_order_two=True)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_pairing_properties(data):
    pk = data.draw(st.sampled_from([a1_packet(1), a1_packet(3), c2_packet()]))
    iso = data.draw(st.sampled_from([AD, SC]))
    cg = component_group(pk.parameter, iso)
    exps = [data.draw(st.integers(0, d - 1)) for d in cg.divisors]

    def zeta(s):
        return sum((Fraction(e * c, d) for e, c, d in zip(exps, cg.coords(s), cg.divisors)), Fraction(0)) % 1
    base = data.draw(st.integers(0, len(pk) - 1))
    kernel_ok = all(zeta(k) == 0 for k in cg.kernel)
    t = pairing_from_signs(cg, pk, base, zeta=zeta)
    assert t.column(base) == tuple(zeta(s) for s in cg.elements)
    for j in range(len(pk)):
        for i, s in enumerate(cg.elements):
            # quotient rule against the base column
            assert (t.values[i][j] - t.values[i][base]) % 1 == (
                t.values[i][j] - zeta(s)) % 1
        for k in cg.kernel:
            assert t.column(j)[cg.elements.index(k)] == zeta(k)
    if kernel_ok:
        assert {t.column(j) for j in range(len(pk))} <= {
            tuple((zeta(s) + c) % 1 for s, c in zip(cg.elements, col)) for col in _ad_characters(cg)}
    r = renormalized_table(t)
    assert r.values == t.values and r.flavor == RENORMALIZED
    assert [conjugate_member(m) for m in r.columns] == list(t.columns)
    assert renormalized_table(r) == t


def _ad_characters(cg):
    out = set()
    for exps in product(*[range(d) for d in cg.divisors]):
        col = tuple(sum((Fraction(e * c, d) for e, c, d in zip(exps, cg.coords(s), cg.divisors)),
                        Fraction(0)) % 1 for s in cg.elements)
        if all(col[cg.elements.index(k)] == 0 for k in cg.kernel):
            out.add(col)
    return out


@pytest.mark.parametrize("pk,generic", [(a1_packet(), {"lambda": 0, "lambda_bar": 1}),
                                        (c2_packet(), {"lambda": 0, "lambda_bar": 3})])
def test_whittaker(pk, generic):
    cg = component_group(pk.parameter, AD)
    t = whittaker_table(cg, pk, "lambda", generic)
    assert all(v == 1 for v in [row[generic["lambda"]] for row in t.signs()])
    bar = whittaker_table(cg, pk, "lambda_bar", generic)
    pd = build_packet_D(pk.parameter, pk.omega_R)
    d = whittaker_table(cg, pd, "lambda", generic)
    assert check_dual_relation(d, bar)
    assert pd.members[d.base_column] == conjugate_member(pk.members[generic["lambda_bar"]])
    if pk.parameter.frame.rank == 1:
        assert t.signs() == [[1, 1], [1, -1]]


def test_whittaker_requires_adjoint():
    pk = a1_packet()
    with pytest.raises(ValidityError):
        whittaker_table(component_group(pk.parameter, SC), pk, "lambda", {"lambda": 0, "lambda_bar": 1})
