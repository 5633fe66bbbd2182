"""Discrete-series parameters and their packets at the level of character data.

A parameter is a pair ``(mu, lam)`` in a dual-group frame. Packet members
are left cosets of a subgroup ``omega_R`` of the Weyl group, and a member
carries the character data ``{(w^-1 mu - iota, lam) : w in coset}``. The
renormalized packet uses the same cosets with every datum negated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import (
    BasedRootDatum, CplxVector, InvalidDatumError, Involution, RatVector, WeylElement,
    half_sum_coroots, identity, is_integral_regular_dominant, longest_element, rvec, vadd,
    vneg, vscale, weyl_group,
)
from .torus import (
    CharacterData, RealTorusDatum, TorusPoint, UnitValue, central_value,
    check_character_congruence, d_character, eval_character, lattice_contains,
)

STANDARD = "standard"
OPPOSITE = "opposite"
CLASSICAL = "classical"
RENORMALIZED = "renormalized"


class ParameterError(ValueError):
    """Parameter data fail integrality, regularity, dominance or congruence."""


@dataclass(frozen=True)
class DualGroupFrame:
    """Dual-group root datum with a splitting orientation, the real
    structure ``sigma_bar`` and a Levi tag (``None`` means the whole group)."""

    rd: BasedRootDatum
    sigma_bar: Involution
    orientation: str = STANDARD
    levi: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.orientation not in (STANDARD, OPPOSITE):
            raise InvalidDatumError(f"unknown orientation {self.orientation!r}")
        if self.levi is not None:
            object.__setattr__(self, "levi", tuple(sorted(set(self.levi))))
        self.sigma_bar.validate_for(self.rd, self.levi)

    @property
    def rank(self) -> int:
        return self.rd.rank

    @property
    def datum(self) -> BasedRootDatum:
        """Levi datum, with simple roots negated in the opposite orientation."""
        sub = self.rd if self.levi is None else self.rd.restrict(self.levi)
        if self.orientation == STANDARD:
            return sub
        return BasedRootDatum(sub.rank, tuple(vneg(a) for a in sub.simple_roots),
                              tuple(vneg(c) for c in sub.simple_coroots))

    @property
    def iota(self) -> RatVector:
        return half_sum_coroots(self.datum)

    @property
    def is_anisotropic(self) -> bool:
        n = self.rank
        return self.sigma_bar.matrix == tuple(tuple(-int(i == j) for j in range(n)) for i in range(n))

    def flipped(self) -> "DualGroupFrame":
        other = OPPOSITE if self.orientation == STANDARD else STANDARD
        return DualGroupFrame(self.rd, self.sigma_bar, other, self.levi)

    def torus(self) -> RealTorusDatum:
        return RealTorusDatum(self.rank, self.sigma_bar)


@dataclass(frozen=True)
class DiscreteParameter:
    mu: CplxVector
    lam: RatVector
    frame: DualGroupFrame
    bounded: bool = True


def kappa_membership(v: Sequence, frame: DualGroupFrame) -> bool:
    """Is ``v`` in the span of the cocharacter lattice and the rational
    (-1)-eigenspace of ``sigma_bar``?

    Projecting along that eigenspace with ``(1 + sigma_bar) / 2`` reduces
    this to membership of the image in the image of ``Z^n``.
    """
    v = rvec(v)
    s = frame.sigma_bar

    def proj(x):
        return vscale(Fraction(1, 2), vadd(x, s.act(x)))

    gens = [proj(e) for e in identity(frame.rank)]
    if not any(any(g) for g in gens):
        return True
    return lattice_contains(gens, proj(v))


def parameter_defect(mu: CplxVector, lam: Sequence, frame: DualGroupFrame) -> CplxVector:
    """``(mu - sigma_bar mu)/2 - iota - (lam + sigma_bar lam)``; valid data make
    this a real integral vector."""
    s = frame.sigma_bar
    lam = rvec(lam)
    half = (mu - mu.apply(s.matrix)).scale(Fraction(1, 2))
    return half - CplxVector.of(vadd(frame.iota, vadd(lam, s.act(lam))))


def validate_parameter(mu: CplxVector, lam: Sequence, frame: DualGroupFrame) -> DiscreteParameter:
    lam = rvec(lam)
    if mu.rank != frame.rank or len(lam) != frame.rank:
        raise ParameterError("parameter rank does not match the frame")
    if not is_integral_regular_dominant(mu, frame.datum):
        raise ParameterError(f"mu = {mu.re}+i{mu.im} is not integral regular dominant")
    defect = parameter_defect(mu, lam, frame)
    if not defect.is_real or any(x.denominator != 1 for x in defect.re):
        raise ParameterError(f"congruence fails: defect {defect.re}+i{defect.im} is not integral")
    if frame.is_anisotropic:
        if any(x.denominator != 1 for x in vadd(mu.re, vneg(frame.iota))) or not mu.is_real:
            raise ParameterError("mu - iota is not a cocharacter")
        lam = (Fraction(0),) * frame.rank
    bounded = not any(vadd(mu.re, frame.sigma_bar.act(mu.re)))
    return DiscreteParameter(mu, lam, frame, bounded)


def renormalize_parameter(p: DiscreteParameter) -> DiscreteParameter:
    """``(mu, lam) -> (-w0 mu, -lam)`` in the same frame."""
    w0 = longest_element(p.frame.datum)
    return validate_parameter(-w0.act_cplx(p.mu), vneg(p.lam), p.frame)


def opposite_representative(p: DiscreteParameter) -> DiscreteParameter:
    return validate_parameter(-p.mu, vneg(p.lam), p.frame.flipped())


# ------------------------------------------------------------------ packets

@dataclass(frozen=True)
class PacketMember:
    representative: WeylElement
    coset: frozenset[WeylElement] = field(repr=False)
    char_data: tuple[CharacterData, ...]
    flavor: str = CLASSICAL

    @property
    def label(self) -> str:
        word = "".join(f"s{i + 1}" for i in self.representative.word) or "1"
        return word if self.flavor == CLASSICAL else f"{word}_D"


@dataclass(frozen=True)
class Packet:
    parameter: DiscreteParameter
    members: tuple[PacketMember, ...]
    omega_R: frozenset[WeylElement] = field(repr=False)
    flavor: str = CLASSICAL

    @property
    def frame_iota(self) -> RatVector:
        # renormalized data are rho-shifted in the opposite frame
        iota = self.parameter.frame.iota
        return iota if self.flavor == CLASSICAL else vneg(iota)

    def __len__(self) -> int:
        return len(self.members)

    def member(self, rep: WeylElement) -> PacketMember:
        for m in self.members:
            if rep in m.coset:
                return m
        raise KeyError(rep)


def _element_key(w: WeylElement) -> tuple:
    return (w.length, w.word)


def left_cosets(weyl: Iterable[WeylElement], sub: frozenset[WeylElement], group) -> list[frozenset]:
    remaining = sorted(weyl, key=_element_key)
    seen: set = set()
    out = []
    for w in remaining:
        if w in seen:
            continue
        coset = frozenset(group.multiply(w, x) for x in sub)
        seen |= coset
        out.append(coset)
    return out


def _coset_data(p: DiscreteParameter, coset: Iterable[WeylElement]) -> tuple[CharacterData, ...]:
    iota = CplxVector.of(p.frame.iota)
    data = []
    for w in coset:
        data.append(CharacterData(p.mu.apply(w.inverse_matrix) - iota, p.lam))
    return tuple(sorted(data, key=CharacterData.sort_key))


def build_packet(p: DiscreteParameter, omega_R: Iterable[WeylElement] | None = None) -> Packet:
    """One member per left coset of ``omega_R`` (default: trivial subgroup)."""
    group = weyl_group(p.frame.datum)
    sub = frozenset(omega_R) if omega_R is not None else frozenset({group.identity})
    if not group.is_subgroup(sub):
        raise ValueError("omega_R is not a subgroup of the Weyl group")
    members = []
    for coset in left_cosets(group, sub, group):
        data = _coset_data(p, coset)
        for d in data:
            if not check_character_congruence(d, p.frame.sigma_bar):
                raise AssertionError(f"character datum {d} fails the congruence")
        rep = min(coset, key=_element_key)
        members.append(PacketMember(rep, coset, data, CLASSICAL))
    return Packet(p, tuple(members), sub, CLASSICAL)


def conjugate_member(m: PacketMember) -> PacketMember:
    """Same coset, negated data, opposite flavor."""
    flavor = RENORMALIZED if m.flavor == CLASSICAL else CLASSICAL
    data = tuple(sorted((d_character(d) for d in m.char_data), key=CharacterData.sort_key))
    return PacketMember(m.representative, m.coset, data, flavor)


def build_packet_D(p: DiscreteParameter, omega_R: Iterable[WeylElement] | None = None) -> Packet:
    classical = build_packet(p, omega_R)
    members = tuple(conjugate_member(m) for m in classical.members)
    return Packet(p, members, classical.omega_R, RENORMALIZED)


def stable_character_data(pk: Packet) -> tuple[CharacterData, ...]:
    out = [d for m in pk.members for d in m.char_data]
    return tuple(sorted(out, key=CharacterData.sort_key))


def normalized_stable_data(pk: Packet) -> tuple[CharacterData, ...]:
    """Stable data with the frame's rho-shift undone: ``(nu + iota, lam)``.

    Packets from different frames are compared on this form.
    """
    shift = CplxVector.of(pk.frame_iota)
    out = [CharacterData(d.nu + shift, d.lam) for d in stable_character_data(pk)]
    return tuple(sorted(out, key=CharacterData.sort_key))


def stable_value(pk: Packet, point: TorusPoint) -> complex:
    """Sum over the stable data of the character values at ``point``."""
    return sum((eval_character(d, point).approx for d in stable_character_data(pk)), 0j)


def packet_central_values(pk: Packet, z: TorusPoint) -> list[UnitValue]:
    """Central character of each member, read off from its own data.

    Raises AssertionError if the data of one member disagree at ``z``.
    """
    p = pk.parameter
    sign = 1 if pk.flavor == CLASSICAL else -1
    expected = central_value(p.mu.scale(sign), vscale(sign, p.lam), z, p.frame.datum)
    out = []
    for m in pk.members:
        vals = [eval_character(d, z) for d in m.char_data]
        if not all(vals[0].agrees(v) for v in vals[1:]) or not vals[0].agrees(expected):
            raise AssertionError(f"member {m.label} has a non-constant central character")
        out.append(vals[0])
    return out
