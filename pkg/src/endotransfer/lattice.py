"""Exact lattice arithmetic: vectors, based root data, Weyl groups, involutions
and finite quotients of lattices.

All coordinates live in ``Z^n`` (or ``Q^n``) and the character and cocharacter
lattices are paired by the ordinary dot product. Nothing in this module uses
floating point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

import sympy
from sympy.matrices.normalforms import smith_normal_decomp

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]
Matrix = tuple[tuple[int, ...], ...]

WEYL_CAP = 10**6
ROOT_CAP = 10**4


class InvalidDatumError(ValueError):
    """Root datum or involution violates a structural invariant."""


class ContainmentError(ValueError):
    """A sublattice is not contained in its ambient lattice."""


# ---------------------------------------------------------------- vectors

def ivec(values: Iterable) -> IntVector:
    out = []
    for v in values:
        f = Fraction(v)
        if f.denominator != 1:
            raise ValueError(f"non-integral coordinate {v!r}")
        out.append(int(f))
    return tuple(out)


def rvec(values: Iterable) -> RatVector:
    return tuple(Fraction(v) for v in values)


def zero(n: int) -> RatVector:
    return (Fraction(0),) * n


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"rank mismatch: {len(a)} vs {len(b)}")
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


def vadd(a: Sequence, b: Sequence) -> RatVector:
    return tuple(Fraction(x) + y for x, y in zip(a, b, strict=True))


def vsub(a: Sequence, b: Sequence) -> RatVector:
    return tuple(Fraction(x) - y for x, y in zip(a, b, strict=True))


def vneg(a: Sequence) -> RatVector:
    return tuple(-Fraction(x) for x in a)


def vscale(c, a: Sequence) -> RatVector:
    c = Fraction(c)
    return tuple(c * x for x in a)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


@dataclass(frozen=True)
class CplxVector:
    """Vector with exact complex-rational coordinates ``re + i*im``."""

    re: RatVector
    im: RatVector

    def __post_init__(self):
        object.__setattr__(self, "re", rvec(self.re))
        object.__setattr__(self, "im", rvec(self.im))
        if len(self.re) != len(self.im):
            raise ValueError("real and imaginary parts differ in length")

    @classmethod
    def of(cls, re: Iterable, im: Iterable | None = None) -> "CplxVector":
        re = rvec(re)
        return cls(re, rvec(im) if im is not None else zero(len(re)))

    @property
    def rank(self) -> int:
        return len(self.re)

    @property
    def is_real(self) -> bool:
        return not any(self.im)

    def __add__(self, other: "CplxVector") -> "CplxVector":
        return CplxVector(vadd(self.re, other.re), vadd(self.im, other.im))

    def __sub__(self, other: "CplxVector") -> "CplxVector":
        return CplxVector(vsub(self.re, other.re), vsub(self.im, other.im))

    def __neg__(self) -> "CplxVector":
        return CplxVector(vneg(self.re), vneg(self.im))

    def scale(self, c) -> "CplxVector":
        return CplxVector(vscale(c, self.re), vscale(c, self.im))

    def conj(self) -> "CplxVector":
        return CplxVector(self.re, vneg(self.im))

    def apply(self, m: Matrix) -> "CplxVector":
        return CplxVector(mat_vec(m, self.re), mat_vec(m, self.im))

    def pair(self, x: Sequence) -> tuple[Fraction, Fraction]:
        """Pair with a real vector; returns (real part, imaginary part)."""
        return dot(x, self.re), dot(x, self.im)

    def pair_cplx(self, other: "CplxVector") -> tuple[Fraction, Fraction]:
        a, b = self.pair(other.re)
        c, d = self.pair(other.im)
        return a - d, b + c


# --------------------------------------------------------------- matrices

def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(ivec(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_vec(m: Matrix, v: Sequence) -> tuple:
    return tuple(sum((a * x for a, x in zip(row, v, strict=True)), Fraction(0)) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def to_sympy(rows: Sequence[Sequence]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator)
                          for x in row] for row in rows])


def from_sympy(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def rational_nullspace(rows: Sequence[Sequence], ncols: int) -> list[RatVector]:
    """Basis of ``{v in Q^n : M v = 0}`` for the matrix with the given rows."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    return [tuple(from_sympy(x) for x in v) for v in to_sympy(rows).nullspace()]


def rational_rank(rows: Sequence[Sequence]) -> int:
    return to_sympy(rows).rank() if rows else 0


def solve_rational(rows: Sequence[Sequence], rhs: Sequence) -> RatVector | None:
    """Some solution of ``M x = rhs`` over Q, or None when inconsistent."""
    m = to_sympy(rows)
    b = to_sympy([[x] for x in rhs])
    try:
        sol, params = m.gauss_jordan_solve(b)
    except ValueError:
        return None
    sol = sol.subs({p: 0 for p in params})
    return tuple(from_sympy(x) for x in sol)


# ------------------------------------------------------------- root data

@dataclass(frozen=True)
class BasedRootDatum:
    """Based root datum on ``Z^n`` with the dot product as the pairing.

    ``simple_roots`` live in the character lattice and ``simple_coroots`` in
    the cocharacter lattice; both are given in the same coordinates.
    """

    rank: int
    simple_roots: tuple[IntVector, ...] = ()
    simple_coroots: tuple[IntVector, ...] = ()

    def __post_init__(self):
        roots = tuple(ivec(r) for r in self.simple_roots)
        coroots = tuple(ivec(c) for c in self.simple_coroots)
        object.__setattr__(self, "simple_roots", roots)
        object.__setattr__(self, "simple_coroots", coroots)
        if len(roots) != len(coroots):
            raise InvalidDatumError("simple roots and coroots differ in number")
        for v in roots + coroots:
            if len(v) != self.rank:
                raise InvalidDatumError(f"vector {v} does not have rank {self.rank}")
        c = self.cartan_matrix
        for i in range(len(roots)):
            if c[i][i] != 2:
                raise InvalidDatumError(f"<alpha_{i}, alpha_{i}^v> = {c[i][i]}, expected 2")
            for j in range(len(roots)):
                if i != j and (c[i][j] > 0 or (c[i][j] == 0) != (c[j][i] == 0)):
                    raise InvalidDatumError(f"Cartan entry ({i},{j}) = {c[i][j]} is not admissible")
        if roots and to_sympy(c).det() == 0:
            raise InvalidDatumError("singular Cartan matrix: the Weyl group is infinite")

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    @cached_property
    def cartan_matrix(self) -> Matrix:
        return tuple(tuple(int(dot(a, c)) for c in self.simple_coroots) for a in self.simple_roots)

    def reflection(self, i: int) -> Matrix:
        """Matrix of ``v -> v - <alpha_i, v> alpha_i^v`` on cocharacters."""
        a, c = self.simple_roots[i], self.simple_coroots[i]
        n = self.rank
        return tuple(tuple(int(r == k) - c[r] * a[k] for k in range(n)) for r in range(n))

    @cached_property
    def height_vector(self) -> RatVector:
        # cocharacter pairing to 1 with every simple root
        k = self.semisimple_rank
        if k == 0:
            return zero(self.rank)
        coeffs = to_sympy(self.cartan_matrix).solve(sympy.Matrix([1] * k))
        coeffs = [from_sympy(x) for x in coeffs]
        return tuple(sum((coeffs[j] * self.simple_coroots[j][r] for j in range(k)), Fraction(0))
                     for r in range(self.rank))

    @cached_property
    def root_pairs(self) -> tuple[tuple[IntVector, IntVector], ...]:
        """All (root, coroot) pairs, positive ones first, in a fixed order."""
        seen = {}
        queue = deque(zip(self.simple_roots, self.simple_coroots))
        while queue:
            x, v = queue.popleft()
            if x in seen:
                continue
            seen[x] = v
            if len(seen) > ROOT_CAP:
                raise InvalidDatumError("root system is not finite")
            for a, c in zip(self.simple_roots, self.simple_coroots):
                px, pv = int(dot(x, c)), int(dot(a, v))
                queue.append((tuple(xi - px * ai for xi, ai in zip(x, a)),
                              tuple(vi - pv * ci for vi, ci in zip(v, c))))
        h = self.height_vector
        pairs = sorted(seen.items(), key=lambda p: (-dot(p[0], h) > 0, p[0]))
        return tuple(pairs)

    @property
    def roots(self) -> tuple[IntVector, ...]:
        return tuple(x for x, _ in self.root_pairs)

    @property
    def coroots(self) -> tuple[IntVector, ...]:
        return tuple(v for _, v in self.root_pairs)

    def is_positive(self, root: Sequence) -> bool:
        return dot(root, self.height_vector) > 0

    @property
    def positive_pairs(self) -> tuple[tuple[IntVector, IntVector], ...]:
        return tuple(p for p in self.root_pairs if self.is_positive(p[0]))

    def restrict(self, levi: Iterable[int]) -> "BasedRootDatum":
        idx = sorted(set(levi))
        for i in idx:
            if not 0 <= i < self.semisimple_rank:
                raise InvalidDatumError(f"levi index {i} out of range")
        return BasedRootDatum(self.rank, tuple(self.simple_roots[i] for i in idx),
                              tuple(self.simple_coroots[i] for i in idx))


# ------------------------------------------------------------ Weyl groups

@dataclass(frozen=True)
class WeylElement:
    """Weyl group element acting on cocharacters; ``word`` is reduced."""

    matrix: Matrix
    word: tuple[int, ...] = field(default=(), compare=False)
    inverse_matrix: Matrix = field(default=(), compare=False, repr=False)

    @property
    def length(self) -> int:
        return len(self.word)

    def act(self, v: Sequence) -> RatVector:
        return mat_vec(self.matrix, v)

    def act_cplx(self, v: CplxVector) -> CplxVector:
        return v.apply(self.matrix)

    def act_root(self, x: Sequence) -> RatVector:
        """Contragredient action on characters, preserving the pairing."""
        return mat_vec(transpose(self.inverse_matrix), x)


class WeylGroup:
    """Finite Weyl group with elements indexed by their matrices."""

    def __init__(self, rd: BasedRootDatum):
        self.datum = rd
        n = rd.rank
        rd.root_pairs  # a finite Weyl group needs a finite root system; fails fast
        gens = [rd.reflection(i) for i in range(rd.semisimple_rank)]
        start = identity(n)
        elements = {start: WeylElement(start, (), start)}
        queue = deque([start])
        while queue:
            m = queue.popleft()
            el = elements[m]
            for i, g in enumerate(gens):
                nm = mat_mul(m, g)
                if nm not in elements:
                    elements[nm] = WeylElement(nm, el.word + (i,), mat_mul(g, el.inverse_matrix))
                    if len(elements) > WEYL_CAP:
                        raise InvalidDatumError("Weyl group closure exceeded the element cap")
                    queue.append(nm)
        self._elements = elements

    def __iter__(self) -> Iterator[WeylElement]:
        return iter(self._elements.values())

    def __len__(self) -> int:
        return len(self._elements)

    def __contains__(self, w: WeylElement) -> bool:
        return w.matrix in self._elements

    @property
    def identity(self) -> WeylElement:
        return self._elements[identity(self.datum.rank)]

    def element(self, matrix: Matrix) -> WeylElement:
        try:
            return self._elements[tuple(tuple(r) for r in matrix)]
        except KeyError:
            raise ValueError("matrix is not in the Weyl group") from None

    def from_word(self, word: Iterable[int]) -> WeylElement:
        m = identity(self.datum.rank)
        for i in word:
            m = mat_mul(m, self.datum.reflection(i))
        return self.element(m)

    def multiply(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return self.element(mat_mul(a.matrix, b.matrix))

    def inverse(self, a: WeylElement) -> WeylElement:
        return self.element(a.inverse_matrix)

    def closure(self, gens: Iterable[WeylElement]) -> frozenset[WeylElement]:
        """Subgroup generated by ``gens``."""
        out = {self.identity}
        queue = deque(out)
        gens = list(gens)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.multiply(x, g)
                if y not in out:
                    out.add(y)
                    queue.append(y)
        return frozenset(out)

    def is_subgroup(self, subset: Iterable[WeylElement]) -> bool:
        s = set(subset)
        if self.identity not in s or not all(x in self for x in s):
            return False
        return all(self.multiply(a, self.inverse(b)) in s for a in s for b in s)


@lru_cache(maxsize=None)
def weyl_group(rd: BasedRootDatum) -> WeylGroup:
    return WeylGroup(rd)


def longest_element(rd: BasedRootDatum) -> WeylElement:
    w = max(weyl_group(rd), key=lambda e: e.length)
    for a in rd.simple_roots:
        if rd.is_positive(w.act_root(a)):
            raise InvalidDatumError("longest element does not negate the simple roots")
    return w


def half_sum_coroots(rd: BasedRootDatum, levi: Iterable[int] | None = None) -> RatVector:
    sub = rd if levi is None else rd.restrict(levi)
    total = zero(rd.rank)
    for _, c in sub.positive_pairs:
        total = vadd(total, c)
    return vscale(Fraction(1, 2), total)


def is_integral_regular_dominant(mu: CplxVector, rd: BasedRootDatum) -> bool:
    """Integral: every root pairs to an integer. Regular dominant: simple
    roots pair positively and no root pairs to zero."""
    for x in rd.roots:
        re, im = mu.pair(x)
        if im != 0 or re.denominator != 1 or re == 0:
            return False
    return all(mu.pair(a)[0] > 0 for a in rd.simple_roots)


# ------------------------------------------------------------ involutions

@dataclass(frozen=True)
class Involution:
    """Order-two automorphism of the cocharacter lattice.

    The dual action on characters is the transpose, which preserves the
    pairing because the matrix is its own inverse.
    """

    matrix: Matrix
    tag: str = "general"

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if any(len(r) != len(m) for r in m):
            raise InvalidDatumError("involution matrix is not square")
        if mat_mul(m, m) != identity(len(m)):
            raise InvalidDatumError("involution matrix does not square to the identity")
        if self.tag not in ("general", "discrete-series"):
            raise InvalidDatumError(f"unknown involution tag {self.tag!r}")

    @classmethod
    def scalar(cls, n: int, sign: int, tag: str = "general") -> "Involution":
        return cls(tuple(tuple(sign * int(i == j) for j in range(n)) for i in range(n)), tag)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def act(self, v: Sequence) -> RatVector:
        return mat_vec(self.matrix, v)

    def act_dual(self, x: Sequence) -> RatVector:
        return mat_vec(transpose(self.matrix), x)

    def validate_for(self, rd: BasedRootDatum, levi: Iterable[int] | None = None) -> None:
        sub = rd if levi is None else rd.restrict(levi)
        if self.rank != rd.rank:
            raise InvalidDatumError("involution rank differs from the datum rank")
        coroots = set(sub.coroots)
        roots = set(sub.roots)
        for v in coroots:
            img = ivec(self.act(v))
            if img not in coroots and ivec(vneg(img)) not in coroots:
                raise InvalidDatumError(f"involution sends coroot {v} outside the coroots")
        for x in roots:
            img = ivec(self.act_dual(x))
            if img not in roots and ivec(vneg(img)) not in roots:
                raise InvalidDatumError(f"involution sends root {x} outside the roots")
        if self.tag == "discrete-series":
            for c in sub.simple_coroots:
                if self.act(c) != vneg(c):
                    raise InvalidDatumError(f"discrete-series involution does not negate {c}")


# --------------------------------------------------------------- quotients

@dataclass(frozen=True)
class QuotientGroup:
    """Finitely generated abelian group ``ambient / sub``.

    ``divisors`` are the nontrivial torsion invariant factors and
    ``generators[i]`` represents a class of order ``divisors[i]``. Free
    summands are counted by ``free_rank`` with representatives in
    ``free_generators``.
    """

    divisors: tuple[int, ...]
    generators: tuple[RatVector, ...]
    free_rank: int = 0
    free_generators: tuple[RatVector, ...] = ()
    dim: int = 0
    _denom: int = field(default=1, repr=False, compare=False)
    _ambient_v: Matrix = field(default=(), repr=False, compare=False)
    _ambient_d: tuple[tuple[int, int], ...] = field(default=(), repr=False, compare=False)
    _sub_v: Matrix = field(default=(), repr=False, compare=False)
    _sub_e: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("quotient has a free part")
        out = 1
        for d in self.divisors:
            out *= d
        return out

    def _basis_coords(self, v: Sequence) -> list[int]:
        w = vscale(self._denom, v)
        if len(w) != self.dim or not is_integral(w):
            raise ContainmentError(f"{tuple(v)} is not in the ambient lattice")
        if not self._ambient_v:
            if any(w):
                raise ContainmentError(f"{tuple(v)} is not in the ambient lattice")
            return []
        wv = mat_vec(transpose(self._ambient_v), w)
        used = {i for i, _ in self._ambient_d}
        if any(wv[i] for i in range(len(wv)) if i not in used):
            raise ContainmentError(f"{tuple(v)} is not in the ambient lattice")
        out = []
        for i, d in self._ambient_d:
            q = wv[i] / d
            if q.denominator != 1:
                raise ContainmentError(f"{tuple(v)} is not in the ambient lattice")
            out.append(int(q))
        return out

    def coordinates(self, v: Sequence) -> tuple[int, ...]:
        """Class of ``v``: torsion residues followed by free coordinates."""
        x = self._basis_coords(v)
        y = mat_vec(transpose(self._sub_v), x) if x else ()
        tors = [int(yi) % e for yi, e in zip(y, self._sub_e) if e > 1]
        free = [int(yi) for yi, e in zip(y, self._sub_e) if e == 0]
        return tuple(tors + free)

    def is_zero(self, v: Sequence) -> bool:
        return not any(self.coordinates(v))

    def elements(self) -> list[RatVector]:
        """One representative per class (finite groups only)."""
        if not self.is_finite:
            raise ValueError("quotient has a free part")
        reps = [zero(self.dim)]
        for g, d in zip(self.generators, self.divisors):
            reps = [vadd(r, vscale(k, g)) for r in reps for k in range(d)]
        return reps


def _snf(rows: list[list[int]]):
    d, _, v = smith_normal_decomp(sympy.Matrix(rows))
    diag = [abs(int(d[i, i])) for i in range(min(d.shape))]
    vm = tuple(tuple(int(x) for x in v.row(i)) for i in range(v.rows))
    return diag, vm


def _int_inverse(m: Matrix) -> Matrix:
    inv = sympy.Matrix(m).inv()
    return tuple(tuple(int(x) for x in inv.row(i)) for i in range(inv.rows))


def smith_quotient(sub: Sequence[Sequence], ambient: Sequence[Sequence],
                   dim: int | None = None) -> QuotientGroup:
    """Decompose ``span_Z(ambient) / span_Z(sub)`` via Smith normal form.

    Both arguments are lists of generating vectors with rational entries;
    ``dim`` is only needed when ``ambient`` is empty. Raises ContainmentError
    when some generator of ``sub`` lies outside the ambient lattice.
    """
    sub = [rvec(v) for v in sub]
    ambient = [rvec(v) for v in ambient]
    n = len(ambient[0]) if ambient else (len(sub[0]) if sub else (dim or 0))
    denom = 1
    for v in sub + ambient:
        for x in v:
            denom = denom * x.denominator // gcd(denom, x.denominator)
    if ambient:
        diag, vmat = _snf([[int(x * denom) for x in v] for v in ambient])
    else:
        diag, vmat = [], ()
    pivots = tuple((i, x) for i, x in enumerate(diag) if x)
    r = len(pivots)
    shell = QuotientGroup((), (), 0, (), n, denom, vmat, pivots, identity(r), (1,) * r)
    coeffs = [shell._basis_coords(v) for v in sub]
    if r == 0:
        return shell

    vinv = _int_inverse(vmat)
    basis = [tuple(d * x for x in vinv[i]) for i, d in pivots]
    if any(any(row) for row in coeffs):
        ediag, v2 = _snf(coeffs)
    else:
        ediag, v2 = [], identity(r)
    e = [ediag[i] if i < len(ediag) else 0 for i in range(r)]
    v2inv = _int_inverse(v2)

    def ambient_vec(row: Sequence[int]) -> RatVector:
        return tuple(Fraction(sum(row[i] * basis[i][k] for i in range(r)), denom) for k in range(n))

    tors = [(e[i], ambient_vec(v2inv[i])) for i in range(r) if e[i] > 1]
    free = [ambient_vec(v2inv[i]) for i in range(r) if e[i] == 0]
    return QuotientGroup(
        tuple(x for x, _ in tors), tuple(g for _, g in tors), len(free), tuple(free), n,
        denom, vmat, pivots, v2, tuple(e),
    )
