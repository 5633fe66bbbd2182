"""Brute-force component groups: enumerate torsion points on a rational
grid and group them into classes by direct membership tests."""

from fractions import Fraction
from itertools import product

from endotransfer.lattice import dot, mat_vec


def grid(n, den):
    return [tuple(Fraction(k, den) for k in ks) for ks in product(range(den), repeat=n)]


def fixed_points(frame, den):
    s = frame.sigma_bar.matrix
    out = []
    for q in grid(frame.rank, den):
        sq = mat_vec(s, q)
        if all((a - b).denominator == 1 for a, b in zip(sq, q)):
            out.append(q)
    return out


def same_ad(rd, a, b):
    return all((dot(r, a) - dot(r, b)).denominator == 1 for r in rd.simple_roots)


def classes(points, same):
    reps = []
    for p in points:
        if not any(same(p, r) for r in reps):
            reps.append(p)
    return reps


def oracle_ad(frame, den):
    return classes(fixed_points(frame, den), lambda a, b: same_ad(frame.rd, a, b))


def in_image(frame, d):
    # is (S - 1) d in (S - 1) Z^n ?  search a small box
    n = frame.rank
    s = frame.sigma_bar.matrix
    target = tuple(x - y for x, y in zip(mat_vec(s, d), d))
    for l in product(range(-2, 3), repeat=n):
        img = tuple(x - y for x, y in zip(mat_vec(s, l), l))
        if img == target:
            return True
    return False


def oracle_full(frame, den):
    return classes(fixed_points(frame, den), lambda a, b: in_image(frame, tuple(x - y for x, y in zip(a, b))))


def oracle_sc(frame, den):
    rd = frame.rd
    k = rd.semisimple_rank
    fixed = fixed_points(frame, den)
    out = []
    for c in grid(k, den):
        x = tuple(sum((c[j] * rd.simple_coroots[j][r] for j in range(k)), Fraction(0)) for r in range(rd.rank))
        if any(same_ad(rd, x, q) for q in fixed):
            out.append(x)
    return out
