from collections import Counter
from fractions import Fraction

import pytest

from endotransfer.lattice import BasedRootDatum, CplxVector, Involution, weyl_group
from endotransfer.packets import (
    CLASSICAL, OPPOSITE, RENORMALIZED, DualGroupFrame, ParameterError, build_packet,
    build_packet_D, conjugate_member, kappa_membership, normalized_stable_data,
    opposite_representative, packet_central_values, renormalize_parameter,
    stable_character_data, stable_value, validate_parameter,
)
from endotransfer.torus import (
    CharacterData, TorusPoint, check_character_congruence, d_character, enumerate_presentations,
)

A1 = BasedRootDatum(1, ((1,),), ((2,),))
A2 = BasedRootDatum(2, ((2, -1), (-1, 2)), ((1, 0), (0, 1)))
B2 = BasedRootDatum(2, ((1, -1), (0, 1)), ((1, -1), (0, 2)))
GL2 = BasedRootDatum(2, ((1, -1),), ((1, -1),))


def ds(rd):
    return DualGroupFrame(rd, Involution.scalar(rd.rank, -1, "discrete-series"))


F_A1, F_A2, F_B2 = ds(A1), ds(A2), ds(B2)
F_GL2 = DualGroupFrame(GL2, Involution(((0, 1), (1, 0)), "discrete-series"))
F_TORUS = DualGroupFrame(BasedRootDatum(1), Involution.scalar(1, 1))


def mu(*xs):
    return CplxVector.of([Fraction(x) for x in xs])


def pid(p):
    return f"rank{p.frame.rank}-mu" + ",".join(str(x) for x in p.mu.re)


def catalog_parameters():
    out = [validate_parameter(mu(k), [0], F_A1) for k in range(1, 5)]
    out += [validate_parameter(mu(a, b), [0, 0], F_A2) for a, b in [(1, 1), (2, 3), (3, 4)]]
    out += [validate_parameter(mu(a, b), [0, 0], F_B2) for a, b in [(2, 1), (3, 1), (4, 3)]]
    out += [validate_parameter(mu(Fraction(k, 2), Fraction(-k, 2)), [Fraction(k - 1, 2), 0], F_GL2)
            for k in (1, 2, 3)]
    out.append(validate_parameter(CplxVector.of([0], [Fraction(3, 2)]), [Fraction(1, 2)], F_TORUS))
    return out


def test_kappa_membership():
    assert kappa_membership([3], F_TORUS)
    assert not kappa_membership([Fraction(1, 2)], F_TORUS)
    assert kappa_membership([Fraction(1, 3)], F_A1)
    assert kappa_membership([Fraction(1, 2), Fraction(-1, 2)], F_GL2)
    assert not kappa_membership([Fraction(1, 2), 0], F_GL2)


def test_validate_examples():
    for k in range(1, 6):
        p = validate_parameter(mu(k), [0], F_A1)
        assert p.bounded
    with pytest.raises(ParameterError):
        validate_parameter(mu(Fraction(5, 2)), [0], F_A1)
    with pytest.raises(ParameterError):
        validate_parameter(mu(0), [0], F_A1)
    with pytest.raises(ParameterError):
        validate_parameter(mu(Fraction(1, 2), Fraction(1, 2)), [0, 0], F_B2)
    # GL2: wrong lambda breaks the congruence
    with pytest.raises(ParameterError):
        validate_parameter(mu(Fraction(1, 2), Fraction(-1, 2)), [Fraction(1, 2), 0], F_GL2)
    # anisotropic center: lambda is normalized away
    assert validate_parameter(mu(2), [Fraction(1, 3)], F_A1).lam == (0,)


def test_unbounded_flag():
    p = validate_parameter(mu(Fraction(1, 2) + 1, Fraction(-1, 2) + 1), [0, 0], F_GL2)
    assert not p.bounded


def test_renormalize_examples():
    for k in range(1, 5):
        assert renormalize_parameter(validate_parameter(mu(k), [0], F_A1)).mu == mu(k)
    assert renormalize_parameter(validate_parameter(mu(2, 3), [0, 0], F_A2)).mu == mu(3, 2)


def test_packet_sizes():
    p = validate_parameter(mu(2), [0], F_A1)
    assert len(build_packet(p)) == 2
    assert len(build_packet(p, weyl_group(A1))) == 1
    t = validate_parameter(CplxVector.of([0], [1]), [0], F_TORUS)
    assert len(build_packet(t)) == 1
    pb = validate_parameter(mu(2, 1), [0, 0], F_B2)
    omega_r = weyl_group(B2).closure([weyl_group(B2).from_word((0,))])
    assert len(build_packet(pb, omega_r)) == 4
    with pytest.raises(ValueError):
        build_packet(pb, [weyl_group(B2).from_word((0,))])


def test_stable_data_a1():
    p = validate_parameter(mu(2), [0], F_A1)
    nus = sorted(d.nu.re[0] for d in stable_character_data(build_packet(p)))
    assert nus == [-3, 1]
    nus_d = sorted(d.nu.re[0] for d in stable_character_data(build_packet_D(p)))
    assert nus_d == [-1, 3]


@pytest.mark.parametrize("p", catalog_parameters(), ids=pid)
def test_renormalization_consistency(p):
    group = weyl_group(p.frame.datum)
    d_packet = build_packet_D(p)
    renorm = build_packet(renormalize_parameter(p))
    opp = build_packet(opposite_representative(p))
    assert opp.parameter.frame.orientation == OPPOSITE
    # the opposite representative reproduces the D-data exactly
    assert stable_character_data(opp) == stable_character_data(d_packet)
    # across frames the rho-shift is undone before comparing
    assert normalized_stable_data(renorm) == normalized_stable_data(d_packet)
    assert Counter(stable_character_data(d_packet)) == Counter(
        d_character(d) for d in stable_character_data(build_packet(p)))
    assert len(group) == len(stable_character_data(d_packet))


@pytest.mark.parametrize("p", catalog_parameters(), ids=pid)
def test_every_twist_passes_congruence(p):
    for w in weyl_group(p.frame.datum):
        d = CharacterData(w.act_cplx(p.mu) - CplxVector.of(p.frame.iota), p.lam)
        assert check_character_congruence(d, p.frame.sigma_bar)


@pytest.mark.parametrize("p", catalog_parameters(), ids=pid)
def test_conjugate_member_bijection(p):
    pk, pd = build_packet(p), build_packet_D(p)
    images = [conjugate_member(m) for m in pk.members]
    assert images == list(pd.members)
    assert all(m.flavor == RENORMALIZED for m in images)
    assert [conjugate_member(m) for m in images] == list(pk.members)
    assert all(m.flavor == CLASSICAL for m in pk.members)


@pytest.mark.parametrize("p", [q for q in catalog_parameters() if q.bounded], ids=pid)
def test_stable_values_conjugate(p):
    pk, pd = build_packet(p), build_packet_D(p)
    pts = enumerate_presentations(p.frame.torus(), max_denominator=4, bound=1)
    for pt in pts[:: max(1, len(pts) // 60)]:
        assert abs(stable_value(pd, pt) - stable_value(pk, pt).conjugate()) < 1e-12


def test_central_character_constant_gl2():
    minus_one = TorusPoint(F_GL2.torus(), CplxVector.of([0, 0]), (1, 1))
    for k in (1, 2, 3, 4):
        p = validate_parameter(mu(Fraction(k, 2), Fraction(-k, 2)), [Fraction(k - 1, 2), 0], F_GL2)
        vals = packet_central_values(build_packet(p), minus_one)
        assert len({v.phase for v in vals}) == 1
        assert vals[0].phase == (0 if k % 2 else Fraction(1, 2))
        dvals = packet_central_values(build_packet_D(p), minus_one)
        assert dvals[0].agrees(vals[0].conj())
