"""Points of a real torus, characters on them, and the character congruence.

A point is presented as ``exp(H) * exp(i*pi*tv)`` with ``H`` in the complex
Lie algebra and ``tv`` an integer vector fixed by the real structure. To
keep phases exact, the imaginary part of ``H`` is stored in units of pi, so
``H = re + i*pi*im``.

Coordinates: characters and the dual-side cocharacters share ``Z^n``. The
real structure acts on characters by the involution matrix and on
cocharacters by its transpose.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import (
    BasedRootDatum, ContainmentError, CplxVector, IntVector, Involution, RatVector, dot,
    ivec, rvec, smith_quotient, vadd, vneg, weyl_group,
)

TOL = 1e-12


class DomainError(ValueError):
    """Input lies outside the domain where the operation is defined."""


@dataclass(frozen=True)
class UnitValue:
    """``exp(log_real) * exp(2*pi*i*phase)`` with exact rational parts when
    available, always accompanied by a complex approximation."""

    log_real: Fraction | None
    phase: Fraction | None
    approx: complex
    authoritative: bool = True

    @classmethod
    def exact(cls, log_real=0, phase=0, authoritative: bool = True) -> "UnitValue":
        log_real, phase = Fraction(log_real), Fraction(phase) % 1
        z = math.exp(log_real) * cmath.exp(2j * math.pi * phase)
        return cls(log_real, phase, z, authoritative)

    @classmethod
    def inexact(cls, z: complex, authoritative: bool = True) -> "UnitValue":
        return cls(None, None, complex(z), authoritative)

    @property
    def is_exact(self) -> bool:
        return self.phase is not None and self.log_real is not None

    def __mul__(self, other: "UnitValue") -> "UnitValue":
        ok = self.authoritative and other.authoritative
        if self.is_exact and other.is_exact:
            return UnitValue.exact(self.log_real + other.log_real, self.phase + other.phase, ok)
        return UnitValue.inexact(self.approx * other.approx, ok)

    def conj(self) -> "UnitValue":
        if self.is_exact:
            return UnitValue.exact(self.log_real, -self.phase, self.authoritative)
        return UnitValue.inexact(self.approx.conjugate(), self.authoritative)

    def agrees(self, other: "UnitValue", tol: float = TOL) -> bool:
        if self.is_exact and other.is_exact:
            return self.log_real == other.log_real and self.phase == other.phase
        return abs(self.approx - other.approx) <= tol

    @property
    def modulus(self) -> float:
        return abs(self.approx)


@dataclass(frozen=True)
class RealTorusDatum:
    rank: int
    sigma: Involution

    def __post_init__(self):
        if self.sigma.rank != self.rank:
            raise ValueError("involution rank differs from torus rank")

    def act_cochar(self, v: Sequence) -> RatVector:
        return self.sigma.act_dual(v)

    def is_twisted_invariant(self, h: CplxVector) -> bool:
        # sigma(conj H) = H, with conj flipping the imaginary part
        return (self.act_cochar(h.re) == h.re
                and self.act_cochar(h.im) == vneg(h.im))

    def invariant_torsion(self, bound: int) -> list[IntVector]:
        """Fixed integer vectors with entries in ``[-bound, bound]``."""
        from itertools import product
        out = []
        for v in product(range(-bound, bound + 1), repeat=self.rank):
            if self.act_cochar(v) == rvec(v):
                out.append(v)
        return out


@dataclass(frozen=True)
class TorusPoint:
    """Presentation ``(H, tv)`` of a point of the real torus."""

    datum: RealTorusDatum
    H: CplxVector
    torsion: IntVector

    def __post_init__(self):
        object.__setattr__(self, "torsion", ivec(self.torsion))
        if self.H.rank != self.datum.rank or len(self.torsion) != self.datum.rank:
            raise ValueError("point coordinates do not match the torus rank")
        if not self.datum.is_twisted_invariant(self.H):
            raise DomainError(f"H = {self.H} is not fixed by the twisted real structure")
        if self.datum.act_cochar(self.torsion) != rvec(self.torsion):
            raise DomainError(f"torsion vector {self.torsion} is not fixed by the real structure")

    @classmethod
    def identity(cls, datum: RealTorusDatum) -> "TorusPoint":
        return cls(datum, CplxVector.of([0] * datum.rank), (0,) * datum.rank)

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(self.datum, self.H + other.H,
                          tuple(a + b for a, b in zip(self.torsion, other.torsion)))

    def key(self) -> tuple:
        """Equal for two presentations exactly when they name the same point."""
        angle = tuple((a + b) % 2 for a, b in zip(self.H.im, self.torsion))
        return self.H.re, angle

    def same_point(self, other: "TorusPoint") -> bool:
        return self.key() == other.key()


@dataclass(frozen=True)
class CharacterData:
    """Exponent ``nu`` and coset representative ``lam`` of a character."""

    nu: CplxVector
    lam: RatVector

    def __post_init__(self):
        object.__setattr__(self, "lam", rvec(self.lam))
        if self.nu.rank != len(self.lam):
            raise ValueError("nu and lam differ in rank")

    def sort_key(self) -> tuple:
        return self.nu.re, self.nu.im, self.lam

    def __repr__(self) -> str:
        def fmt(v):
            return "(" + ", ".join(str(x) for x in v) + ")"
        nu = fmt(self.nu.re) if self.nu.is_real else f"{fmt(self.nu.re)}+i{fmt(self.nu.im)}"
        return f"CharacterData(nu={nu}, lam={fmt(self.lam)})"


def lattice_contains(gens: Iterable[Sequence] | None, v: Sequence) -> bool:
    """Membership in the lattice spanned by ``gens`` (default: ``Z^n``)."""
    if gens is None:
        return all(Fraction(x).denominator == 1 for x in v)
    q = smith_quotient([], list(gens), dim=len(v))
    try:
        q.coordinates(v)
    except ContainmentError:
        return False
    return True


def congruence_vector(data: CharacterData, sigma: Involution) -> CplxVector:
    nu = data.nu
    half = (nu - nu.apply(sigma.matrix)).scale(Fraction(1, 2))
    lam_sum = vadd(data.lam, sigma.act(data.lam))
    return half - CplxVector.of(lam_sum)


def check_character_congruence(data: CharacterData, sigma: Involution,
                               lattice: Iterable[Sequence] | None = None) -> bool:
    v = congruence_vector(data, sigma)
    return v.is_real and lattice_contains(lattice, v.re)


def eval_character(data: CharacterData, p: TorusPoint) -> UnitValue:
    """``exp(<nu, H>) * exp(2*pi*i*<lam, tv>)``.

    The result is exact whenever ``<nu, H>`` has no cross terms with pi; it
    is flagged non-authoritative when the data fail the congruence.
    """
    return _evaluate(data, p, check_character_congruence(data, p.datum.sigma))


def _evaluate(data: CharacterData, p: TorusPoint, ok: bool = True) -> UnitValue:
    nu, h = data.nu, p.H
    torsion_turns = _dot(data.lam, p.torsion)
    cross_re = _dot(nu.im, h.im)   # multiplies -pi in the real part
    cross_im = _dot(nu.im, h.re)   # imaginary part without a factor of pi
    if not cross_re and not cross_im:
        log_real = _dot(nu.re, h.re)
        phase = _dot(nu.re, h.im) / 2 + torsion_turns
        return UnitValue.exact(log_real, phase, ok)
    exponent = complex(float(_dot(nu.re, h.re)) - math.pi * float(cross_re),
                       float(cross_im) + math.pi * float(_dot(nu.re, h.im)))
    z = cmath.exp(exponent) * cmath.exp(2j * math.pi * float(torsion_turns))
    return UnitValue.inexact(z, ok)


def _dot(a, b) -> Fraction:
    total = 0
    for x, y in zip(a, b):
        if x and y:
            total += x * y
    return Fraction(total)


def _exact_key(data: CharacterData, p: TorusPoint):
    """``(log_real, phase mod 1)`` when the value is exact, else None."""
    nu, h = data.nu, p.H
    if _dot(nu.im, h.im) or _dot(nu.im, h.re):
        return None
    return _dot(nu.re, h.re), (_dot(nu.re, h.im) / 2 + _dot(data.lam, p.torsion)) % 1


def _same_value(a: CharacterData, p: TorusPoint, b: CharacterData, q: TorusPoint) -> bool:
    ka, kb = _exact_key(a, p), _exact_key(b, q)
    if ka is not None and kb is not None:
        return ka == kb
    return _evaluate(a, p).agrees(_evaluate(b, q))


def d_character(data: CharacterData) -> CharacterData:
    return CharacterData(-data.nu, vneg(data.lam))


def central_value(mu: CplxVector, lam: Sequence, z: TorusPoint, rd: BasedRootDatum) -> UnitValue:
    """Central character at ``z``; ``rd`` is the dual-side datum, so the roots
    of the group itself are its coroots.

    Raises DomainError unless ``H`` is killed by every root of the group and
    the torsion part is central too. The value is computed for every Weyl
    twist of ``mu`` and required to be the same.
    """
    for c in rd.coroots:
        if any(z.H.pair(c)):
            raise DomainError(f"H is not central: root {c} pairs to {z.H.pair(c)}")
        if dot(c, z.torsion) % 2 != 0:
            raise DomainError(f"torsion part is not central: root {c}")
    lam = rvec(lam)
    values = []
    for w in weyl_group(rd):
        twisted = CharacterData(w.act_cplx(mu), lam)
        values.append(_raw_value(twisted, z))
    first = values[0]
    if not all(first.agrees(v) for v in values[1:]):
        raise AssertionError("central value depends on the Weyl twist")
    return first


def _raw_value(data: CharacterData, z: TorusPoint) -> UnitValue:
    return _evaluate(data, z)


# ------------------------------------------------------ overlap enumeration

def enumerate_presentations(datum: RealTorusDatum, max_denominator: int = 4,
                            bound: int = 2, real_parts: Iterable[Sequence] = ((),)
                            ) -> list[TorusPoint]:
    """All presentations whose ``H`` has zero real part (or one of
    ``real_parts``), imaginary coordinates ``k/q`` with ``q <= max_denominator``
    and ``|k/q| <= bound``, and torsion entries in ``[-bound, bound]``."""
    from itertools import product
    n = datum.rank
    grid = sorted({Fraction(k, q) for q in range(1, max_denominator + 1)
                   for k in range(-bound * q, bound * q + 1)})
    torsions = datum.invariant_torsion(bound)
    reals = [rvec(r) if r else (Fraction(0),) * n for r in real_parts]
    out = []
    for re in reals:
        if datum.act_cochar(re) != re:
            continue
        for im in product(grid, repeat=n):
            if datum.act_cochar(im) != vneg(im):
                continue
            h = CplxVector(re, im)
            for t in torsions:
                out.append(TorusPoint(datum, h, t))
    return out


def overlap_classes(points: Iterable[TorusPoint]) -> list[list[TorusPoint]]:
    """Group presentations naming the same point; keep groups of size > 1."""
    groups: dict = {}
    for p in points:
        groups.setdefault(p.key(), []).append(p)
    return [g for g in groups.values() if len(g) > 1]


def consistent_on_overlaps(data: CharacterData, classes: Iterable[list[TorusPoint]]) -> bool:
    for group in classes:
        if not all(_same_value(data, group[0], data, q) for q in group[1:]):
            return False
    return True


def same_character(a: CharacterData, b: CharacterData, points: Iterable[TorusPoint]) -> bool:
    return all(_same_value(a, p, b, p) for p in points)


__all__ = [
    "CharacterData", "DomainError", "RealTorusDatum", "TorusPoint", "UnitValue",
    "central_value", "check_character_congruence", "congruence_vector", "consistent_on_overlaps",
    "d_character", "enumerate_presentations", "eval_character", "lattice_contains",
    "overlap_classes", "same_character",
]
