import cmath
import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from endotransfer.lattice import BasedRootDatum, CplxVector, Involution
from endotransfer.torus import (
    CharacterData, DomainError, RealTorusDatum, TorusPoint, UnitValue, central_value,
    check_character_congruence, consistent_on_overlaps, d_character, enumerate_presentations,
    eval_character, overlap_classes, same_character,
)

COMPACT1 = RealTorusDatum(1, Involution.scalar(1, -1))
SPLIT1 = RealTorusDatum(1, Involution.scalar(1, 1))
SWAP2 = RealTorusDatum(2, Involution(((0, 1), (1, 0))))
COMPACT2 = RealTorusDatum(2, Involution.scalar(2, -1))
TORI = [COMPACT1, SPLIT1, SWAP2, COMPACT2]


def cd(nu, lam, nu_im=None):
    return CharacterData(CplxVector.of(nu, nu_im), lam)


def oracle_value(data, p):
    """Direct complex evaluation, with H's imaginary part rescaled by pi."""
    h = [complex(float(a), math.pi * float(b)) for a, b in zip(p.H.re, p.H.im)]
    nu = [complex(float(a), float(b)) for a, b in zip(data.nu.re, data.nu.im)]
    ex = sum(x * y for x, y in zip(nu, h))
    return cmath.exp(ex) * cmath.exp(2j * math.pi * float(sum(Fraction(a) * b for a, b in zip(data.lam, p.torsion))))


def test_congruence_examples():
    sig = Involution.scalar(1, -1)
    assert check_character_congruence(cd([0], [0]), sig)
    for k in range(-3, 6):
        assert check_character_congruence(cd([k - 1], [0]), sig)
    assert not check_character_congruence(cd([Fraction(1, 2)], [0]), sig)


def test_eval_examples():
    assert eval_character(cd([3], [0]), TorusPoint.identity(COMPACT1)).agrees(UnitValue.exact(0, 0))
    p = TorusPoint(COMPACT1, CplxVector.of([0], [Fraction(1, 2)]), (0,))
    v = eval_character(cd([1], [0]), p)
    assert v.is_exact and v.phase == Fraction(1, 4)
    assert abs(v.approx - 1j) < 1e-15
    q = TorusPoint(SPLIT1, CplxVector.of([0]), (1,))
    w = eval_character(cd([0], [Fraction(1, 2)]), q)
    assert w.phase == Fraction(1, 2) and abs(w.approx + 1) < 1e-15


def test_d_character_examples():
    assert d_character(cd([0], [0])) == cd([0], [0])
    assert d_character(cd([4], [0])) == cd([-4], [0])
    assert d_character(cd([1], [Fraction(1, 2)])) == cd([-1], [Fraction(-1, 2)])


def test_point_invariants_enforced():
    with pytest.raises(DomainError):
        TorusPoint(COMPACT1, CplxVector.of([1]), (0,))
    with pytest.raises(DomainError):
        TorusPoint(COMPACT1, CplxVector.of([0]), (1,))
    with pytest.raises(DomainError):
        TorusPoint(SPLIT1, CplxVector.of([0], [1]), (0,))


def analytic_overlaps(p, box=2):
    """Every k in a box gives another presentation of the same point."""
    s = p.datum
    out = []
    for k in product(range(-box, box + 1), repeat=s.rank):
        sk = s.act_cochar(k)
        h = CplxVector(p.H.re, tuple(a + b - c for a, b, c in zip(p.H.im, k, sk)))
        t = tuple(int(a + b + c) for a, b, c in zip(p.torsion, k, sk))
        out.append(TorusPoint(s, h, t))
    return out


@pytest.mark.parametrize("datum", TORI)
def test_enumerated_overlaps_contain_analytic_ones(datum):
    pts = enumerate_presentations(datum)
    keys = {p.key() for p in pts}
    for p in pts[:: max(1, len(pts) // 40)]:
        for q in analytic_overlaps(p, 1):
            assert q.same_point(p)
            if q in set(pts):
                assert q.key() in keys


def rational_grid(n, denoms=(1, 2, 4), span=1):
    vals = sorted({Fraction(k, q) for q in denoms for k in range(-span * q, span * q + 1)})
    return list(product(vals, repeat=n))


@pytest.mark.parametrize("datum", TORI)
def test_well_definedness_iff_congruence(datum):
    classes = overlap_classes(enumerate_presentations(datum))
    grid = rational_grid(datum.rank, span=1) if datum.rank == 1 else rational_grid(datum.rank, (1, 2), 1)
    seen = {True: 0, False: 0}
    for nu in grid:
        for lam in grid[:: 3 if datum.rank > 1 else 1]:
            data = cd(nu, lam)
            ok = check_character_congruence(data, datum.sigma)
            assert consistent_on_overlaps(data, classes) == ok, (nu, lam)
            seen[ok] += 1
    assert seen[True] and seen[False]


def test_imaginary_exponent_breaks_congruence():
    data = cd([0], [0], [Fraction(1, 2)])
    assert not check_character_congruence(data, COMPACT1.sigma)
    classes = overlap_classes(enumerate_presentations(COMPACT1))
    assert not consistent_on_overlaps(data, classes)


@settings(max_examples=60, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(1, 4), st.integers(-3, 3))
def test_eval_matches_oracle(a, b, q, t):
    data = cd([Fraction(a, q), Fraction(-a, q)], [Fraction(b, q), 0])
    p = TorusPoint(SWAP2, CplxVector.of([Fraction(t, 2)] * 2, [Fraction(b, 4), Fraction(-b, 4)]), (t, t))
    v = eval_character(data, p)
    assert abs(v.approx - oracle_value(data, p)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.integers(-8, 8), st.integers(-8, 8), st.integers(-2, 2), st.integers(-2, 2))
def test_multiplicative(k, x, y, s, t):
    data = cd([k], [0])
    p = TorusPoint(COMPACT1, CplxVector.of([0], [Fraction(x, 4)]), (0,))
    q = TorusPoint(COMPACT1, CplxVector.of([0], [Fraction(y, 4)]), (0,))
    assert eval_character(data, p * q).agrees(eval_character(data, p) * eval_character(data, q))
    d2 = cd([0, 0], [Fraction(k, 2), 0])
    u = TorusPoint(SWAP2, CplxVector.of([x, x]), (s, s))
    w = TorusPoint(SWAP2, CplxVector.of([y, y]), (t, t))
    assert eval_character(d2, u * w).agrees(eval_character(d2, u) * eval_character(d2, w))


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.integers(-8, 8))
def test_conjugation_law(k, x):
    data = cd([k], [0])
    p = TorusPoint(COMPACT1, CplxVector.of([0], [Fraction(x, 4)]), (0,))
    v = eval_character(data, p)
    assert abs(v.modulus - 1) < 1e-12
    assert eval_character(d_character(data), p).agrees(v.conj())


def test_kappa_shift_preserves_values():
    # sigma = +1: integer shifts lie in the submodule, half shifts do not
    pts = enumerate_presentations(SPLIT1)
    base = cd([0], [0])
    assert same_character(base, cd([0], [1]), pts)
    mutated = cd([0], [Fraction(1, 2)])
    assert check_character_congruence(mutated, SPLIT1.sigma)
    assert not same_character(base, mutated, pts)
    # sigma = -1: every shift is in the (-1)-eigenspace
    pts = enumerate_presentations(COMPACT1)
    assert same_character(cd([2], [0]), cd([2], [Fraction(1, 3)]), pts)


A1 = BasedRootDatum(1, ((1,),), ((2,),))
GL2 = BasedRootDatum(2, ((1, -1),), ((1, -1),))


def test_central_value():
    one = central_value(CplxVector.of([3]), [0], TorusPoint.identity(COMPACT1), A1)
    assert one.agrees(UnitValue.exact())
    with pytest.raises(DomainError):
        central_value(CplxVector.of([3]), [0], TorusPoint(COMPACT1, CplxVector.of([0], [1]), (0,)), A1)
    minus_one = TorusPoint(SWAP2, CplxVector.of([0, 0]), (1, 1))
    for k in range(1, 7):
        mu = CplxVector.of([Fraction(k, 2), Fraction(-k, 2)])
        lam = [Fraction(k - 1, 2), 0]
        v = central_value(mu, lam, minus_one, GL2)
        assert v.phase == (Fraction(1, 2) if k % 2 == 0 else 0)
