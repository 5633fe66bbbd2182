"""Component groups of centralizers of regular parameters, their endoscopic
root subsystems, and pairing tables between component groups and packets.

For a regular parameter the centralizer in the dual group is the fixed torus
of ``sigma_bar``. Writing ``L`` for the cocharacter lattice and ``S`` for
``sigma_bar``, its fixed points are ``exp(2 pi i q)`` with ``(S - 1) q in L``
(the set ``M``), and the identity component comes from ``K = ker(S - 1)``.

* ``full``: ``pi_0`` of the fixed torus itself, ``M / (L + K)``.
* ``ad``: its image in the adjoint torus, whose cocharacter lattice is the
  coweight lattice ``P`` inside the coroot span: ``(p(M) + P) / (P + W)``
  with ``p`` the projection killing central directions and ``W = p(K)``.
* ``sc``: the preimage in the simply connected torus, whose cocharacter
  lattice is the coroot lattice ``Q``: ``(p(M) + P + W) / (Q + W)``.

Quotients by the rational subspace ``W`` are handled by first applying a
rational map with kernel exactly ``W``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import sympy

from .lattice import (
    BasedRootDatum, QuotientGroup, RatVector, dot, from_sympy, mat_vec,
    rational_nullspace, rational_rank, rvec, smith_quotient, solve_rational, to_sympy, transpose, vadd, vsub,
    weyl_group,
    zero,
)
from .packets import (
    CLASSICAL, RENORMALIZED, DiscreteParameter, DualGroupFrame, Packet, PacketMember,
    conjugate_member,
)
from .torus import DomainError

AD, SC, FULL = "ad", "sc", "full"


class UnsupportedError(ValueError):
    """The parameter is outside the regular setting."""


class ConsistencyError(ValueError):
    """Relative signs violate transitivity."""


class ValidityError(ValueError):
    """A pairing table fails a structural requirement."""


@dataclass(frozen=True)
class TorsionElement:
    """The torus point ``exp(2 pi i q)``; ``q`` is a rational cocharacter."""

    q: RatVector

    def __post_init__(self):
        object.__setattr__(self, "q", rvec(self.q))


@dataclass(frozen=True)
class ComponentGroup:
    isogeny: str
    quotient: QuotientGroup
    elements: tuple[TorsionElement, ...]
    generators: tuple[TorsionElement, ...]
    kernel: tuple[TorsionElement, ...] = ()
    _reduce: tuple[tuple[Fraction, ...], ...] = field(default=(), repr=False, compare=False)

    def coords(self, s: TorsionElement) -> tuple[int, ...]:
        v = mat_vec(self._reduce, s.q) if self._reduce else s.q
        return self.quotient.coordinates(v)

    @property
    def order(self) -> int:
        return self.quotient.order

    @property
    def divisors(self) -> tuple[int, ...]:
        return self.quotient.divisors

    def element(self, coords: Sequence[int]) -> TorsionElement:
        target = tuple(c % d for c, d in zip(coords, self.divisors))
        for e in self.elements:
            if self.coords(e) == target:
                return e
        raise KeyError(coords)

    def add(self, a: TorsionElement, b: TorsionElement) -> TorsionElement:
        return self.element(tuple(x + y for x, y in zip(self.coords(a), self.coords(b))))

    def identity(self) -> TorsionElement:
        return self.element((0,) * len(self.divisors))

    def label(self, s: TorsionElement) -> str:
        return "s(" + ",".join(str(c) for c in self.coords(s)) + ")" if self.divisors else "s()"

    def describe(self) -> str:
        if not self.divisors:
            return "trivial"
        return " x ".join(f"Z/{d}" for d in self.divisors)

    @property
    def is_elementary_two(self) -> bool:
        return all(d == 2 for d in self.divisors)


def _central_projection(rd: BasedRootDatum) -> Callable[[Sequence], RatVector]:
    """Map onto the coroot span along the annihilator of the roots."""
    k = rd.semisimple_rank
    if k == 0:
        return lambda v: zero(rd.rank)
    cinv = to_sympy(rd.cartan_matrix).inv()
    cinv = [[from_sympy(cinv[i, j]) for j in range(k)] for i in range(k)]

    def proj(v):
        pairs = [dot(a, v) for a in rd.simple_roots]
        coeffs = [sum((cinv[j][i] * pairs[i] for i in range(k)), Fraction(0)) for j in range(k)]
        return tuple(sum((coeffs[j] * rd.simple_coroots[j][r] for j in range(k)), Fraction(0))
                     for r in range(rd.rank))
    return proj


def coweight_basis(rd: BasedRootDatum) -> list[RatVector]:
    k = rd.semisimple_rank
    if k == 0:
        return []
    cinv = to_sympy(rd.cartan_matrix).inv()
    out = []
    for i in range(k):
        coeffs = [from_sympy(cinv[j, i]) for j in range(k)]
        out.append(tuple(sum((coeffs[j] * rd.simple_coroots[j][r] for j in range(k)), Fraction(0))
                         for r in range(rd.rank)))
    return out


def fixed_lattice_generators(sigma_matrix) -> tuple[list[RatVector], list[RatVector]]:
    """Generators of ``M`` modulo ``K`` and a basis of ``K``, for the
    matrix ``S`` acting on ``Z^n``."""
    from sympy.matrices.normalforms import smith_normal_decomp
    n = len(sigma_matrix)
    a = [[sigma_matrix[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    kernel = rational_nullspace(a, n)
    if n == 0:
        return [], []
    d, _, v = smith_normal_decomp(sympy.Matrix(a))
    gens = []
    for i in range(n):
        di = abs(int(d[i, i])) if i < min(d.shape) else 0
        col = [int(v[r, i]) for r in range(n)]
        if di:
            gens.append(tuple(Fraction(x, di) for x in col))
    # L itself is needed when S - 1 has full rank only through the columns
    gens += [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return gens, kernel


def _annihilator_map(subspace: list[RatVector], n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Rational matrix whose kernel is exactly ``span(subspace)``."""
    if not subspace:
        return ()
    rows = rational_nullspace(subspace, n)
    return tuple(tuple(r) for r in rows)


def _apply(m, v):
    return mat_vec(m, v) if m else rvec(v)


def _is_regular(p: DiscreteParameter) -> bool:
    return all(any(p.mu.pair(a)) for a in p.frame.rd.roots)


def component_group(p: DiscreteParameter | DualGroupFrame, isogeny: str = AD) -> ComponentGroup:
    """Component group of the fixed torus at the requested isogeny.

    Accepts a parameter (checked for regularity) or a bare frame.
    """
    if isinstance(p, DiscreteParameter):
        if not _is_regular(p):
            raise UnsupportedError("non-regular parameter: the centralizer is not a torus")
        frame = p.frame
    else:
        frame = p
    rd = frame.rd
    n = rd.rank
    m_gens, kernel = fixed_lattice_generators(frame.sigma_bar.matrix)
    lattice = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]

    if isogeny == FULL:
        reduce = _annihilator_map(kernel, n)
        top = [_apply(reduce, g) for g in m_gens]
        bottom = [_apply(reduce, g) for g in lattice]
        q = smith_quotient(bottom, top, dim=len(reduce) if reduce else n)
        return _finish(FULL, q, reduce, m_gens, (), n)

    proj = _central_projection(rd)
    pm = [proj(g) for g in m_gens]
    w = [proj(k) for k in kernel]
    w = [x for x in w if any(x)]
    reduce = _annihilator_map(w, n)
    coweights = coweight_basis(rd)
    top_q = pm + coweights
    dim = len(reduce) if reduce else n
    if isogeny == AD:
        bottom_q = coweights
    elif isogeny == SC:
        bottom_q = [rvec(c) for c in rd.simple_coroots]
    else:
        raise ValueError(f"unknown isogeny {isogeny!r}")
    q = smith_quotient([_apply(reduce, g) for g in bottom_q], [_apply(reduce, g) for g in top_q], dim=dim)
    kern = ()
    if isogeny == SC:
        kern = tuple(TorsionElement(c) for c in coweights)
    return _finish(isogeny, q, reduce, top_q, kern, n)


def _finish(isogeny, quotient, reduce, gens_q, kernel_gens, n) -> ComponentGroup:
    if not quotient.is_finite:
        raise AssertionError("component group came out infinite")

    def coords(v):
        return quotient.coordinates(_apply(reduce, v))

    reps = {coords(zero(n)): zero(n)}
    queue = deque([zero(n)])
    while queue:
        v = queue.popleft()
        for g in gens_q:
            u = vadd(v, g)
            c = coords(u)
            if c not in reps:
                reps[c] = u
                queue.append(u)
    if len(reps) != quotient.order:
        raise AssertionError("generator closure does not match the quotient order")
    elements = tuple(TorsionElement(reps[c]) for c in sorted(reps))
    gens = []
    for i, d in enumerate(quotient.divisors):
        target = tuple(int(j == i) for j in range(len(quotient.divisors)))
        gens.append(TorsionElement(reps[target]))
    cg = ComponentGroup(isogeny, quotient, elements, tuple(gens), (), reduce)
    if isogeny == SC:
        kclasses = {cg.coords(k) for k in kernel_gens}
        closure = set()
        frontier = [(0,) * len(quotient.divisors)]
        while frontier:
            c = frontier.pop()
            if c in closure:
                continue
            closure.add(c)
            for k in kclasses:
                frontier.append(tuple((a + b) % d for a, b, d in zip(c, k, quotient.divisors)))
        kernel = tuple(cg.element(c) for c in sorted(closure))
        cg = ComponentGroup(isogeny, quotient, elements, tuple(gens), kernel, reduce)
    return cg


def surjection(sc: ComponentGroup, ad: ComponentGroup) -> dict:
    """Class map from the simply connected to the adjoint component group."""
    return {sc.coords(e): ad.coords(e) for e in sc.elements}


# ---------------------------------------------------------- endoscopy data

@dataclass(frozen=True)
class EndoscopicAssignment:
    s: TorsionElement
    roots_fixed: tuple[tuple[int, ...], ...]
    well_positioned: bool | None = None

    @property
    def rank(self) -> int:
        return rational_rank([list(r) for r in self.roots_fixed]) if self.roots_fixed else 0


def endoscopic_roots(s: TorsionElement, frame: DualGroupFrame,
                     mu=None) -> EndoscopicAssignment:
    """Roots of the dual group that are trivial on ``s``; with ``mu`` given,
    also report whether ``mu`` is dominant (the well-positioned test)."""
    rd = frame.datum
    fixed = tuple(a for a in rd.roots if dot(a, s.q).denominator == 1)
    wp = None
    if mu is not None:
        # the subsystem inherits its positive roots from the frame
        wp = all(mu.pair(a)[0] > 0 for a in fixed if rd.is_positive(a))
    return EndoscopicAssignment(s, fixed, wp)


# ----------------------------------------------------------------- pairings

def tn_pairing_oracle(lam_class: Sequence, s: TorsionElement) -> int:
    """``exp(2 pi i <lam_class, q>)``, required to be a sign."""
    t = dot(lam_class, s.q) % 1
    if t == 0:
        return 1
    if t == Fraction(1, 2):
        return -1
    raise DomainError(f"pairing value exp(2 pi i {t}) is not a sign")


def grading_vector(rd: BasedRootDatum, omega_R: Iterable) -> RatVector:
    """Rational character ``h`` in the root span with ``<coroot_i, h> = 1``
    for noncompact simple roots and ``0`` for compact ones; a simple root is
    compact when its reflection lies in ``omega_R``.

    Raises ValidityError unless the reflections of the roots that ``h``
    grades as compact generate exactly ``omega_R``.
    """
    group = weyl_group(rd)
    sub = frozenset(omega_R)
    k = rd.semisimple_rank
    eps = [0 if group.from_word((i,)) in sub else 1 for i in range(k)]
    if k == 0:
        return zero(rd.rank)
    coeffs = solve_rational(transpose(rd.cartan_matrix), eps)
    h = tuple(sum((coeffs[j] * rd.simple_roots[j][r] for j in range(k)), Fraction(0))
              for r in range(rd.rank))
    compact = [group.element(_reflection(rd, a, c)) for a, c in rd.positive_pairs
               if dot(c, h) % 2 == 0]
    if group.closure(compact) != sub:
        raise ValidityError("omega_R is not the Weyl group of the compact roots of a grading")
    return h


def _reflection(rd, root, coroot):
    n = rd.rank
    return tuple(tuple(int(i == j) - coroot[i] * root[j] for j in range(n)) for i in range(n))


def member_class(m: PacketMember, h: Sequence) -> RatVector:
    """Tate-Nakayama class of a member relative to the base member:
    ``w h - h`` for the coset representative ``w`` acting on characters."""
    return vsub(m.representative.act_root(h), h)


def default_rel_signs(packet: Packet) -> Callable:
    h = grading_vector(packet.parameter.frame.datum, packet.omega_R)

    def rel(s: TorsionElement, a: PacketMember, b: PacketMember) -> Fraction:
        diff = vsub(member_class(a, h), member_class(b, h))
        return Fraction(0) if tn_pairing_oracle(diff, s) == 1 else Fraction(1, 2)
    return rel


def turns_to_str(t: Fraction) -> str:
    t = Fraction(t) % 1
    named = {Fraction(0): "1", Fraction(1, 2): "-1", Fraction(1, 4): "i", Fraction(3, 4): "-i"}
    return named.get(t, f"e({t})")


@dataclass(frozen=True)
class PairingTable:
    """Values ``<s, pi>`` stored as turns (``exp(2 pi i t)``)."""

    rows: tuple[TorsionElement, ...]
    row_labels: tuple[str, ...]
    columns: tuple[PacketMember, ...]
    values: tuple[tuple[Fraction, ...], ...]
    base_column: int
    zeta: tuple[Fraction, ...]
    isogeny: str = AD
    flavor: str = CLASSICAL
    orientation: str | None = None

    @property
    def column_labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.columns)

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.values)

    def signs(self) -> list[list[int]]:
        out = []
        for row in self.values:
            if any(v not in (0, Fraction(1, 2)) for v in row):
                raise ValidityError("table has values other than signs")
            out.append([1 if v == 0 else -1 for v in row])
        return out

    def csv_rows(self) -> list[list[str]]:
        """Header of s-labels, then one row per member."""
        header = ["member"] + list(self.row_labels)
        body = [[self.column_labels[j]] + [turns_to_str(v) for v in self.column(j)]
                for j in range(len(self.columns))]
        return [header] + body


RelSigns = Callable[[TorsionElement, PacketMember, PacketMember], Fraction] | Mapping


def _rel(rel_signs, s, a, b, cg) -> Fraction:
    if callable(rel_signs):
        return Fraction(rel_signs(s, a, b)) % 1
    return Fraction(rel_signs[(cg.coords(s), a.label, b.label)]) % 1


def check_rel_consistency(cg: ComponentGroup, members: Sequence[PacketMember], rel_signs) -> None:
    for s in cg.elements:
        for a in members:
            if _rel(rel_signs, s, a, a, cg) != 0:
                raise ConsistencyError(f"relative sign of {a.label} with itself is not 1")
            for b in members:
                ab = _rel(rel_signs, s, a, b, cg)
                for c in members:
                    if (ab + _rel(rel_signs, s, b, c, cg) - _rel(rel_signs, s, a, c, cg)) % 1:
                        raise ConsistencyError(
                            f"transitivity fails at {cg.label(s)}: {a.label}, {b.label}, {c.label}")


def _check_character(cg: ComponentGroup, col: Mapping) -> bool:
    return all((col[cg.coords(a)] + col[cg.coords(b)] - col[cg.coords(cg.add(a, b))]) % 1 == 0
               for a in cg.elements for b in cg.elements)


def pairing_from_signs(cg: ComponentGroup, packet: Packet, base: int, zeta=None,
                       rel_signs=None, zeta_order_two: bool = False,
                       ad_group: ComponentGroup | None = None) -> PairingTable:
    """Table with ``<s, base> = zeta(s)`` and quotients given by ``rel_signs``.

    ``zeta`` maps an element to turns (default trivial). ``rel_signs`` is a
    callable ``(s, member, member) -> turns`` or a mapping keyed by
    ``(coords, label, label)``; the default is the Tate-Nakayama recipe.
    """
    members = packet.members
    if rel_signs is None:
        rel_signs = default_rel_signs(packet)
    zeta_fn = zeta if zeta is not None else (lambda s: Fraction(0))
    zvals = tuple(Fraction(zeta_fn(s)) % 1 for s in cg.elements)
    if zeta_order_two and any(2 * z % 1 for z in zvals):
        raise ValidityError("zeta must have order one or two")
    check_rel_consistency(cg, members, rel_signs)
    values = []
    for i, s in enumerate(cg.elements):
        values.append(tuple((zvals[i] + _rel(rel_signs, s, m, members[base], cg)) % 1 for m in members))
    table = PairingTable(cg.elements, tuple(cg.label(s) for s in cg.elements), tuple(members),
                         tuple(values), base, zvals, cg.isogeny, packet.flavor)
    zmap = {cg.coords(s): z for s, z in zip(cg.elements, zvals)}
    if not _check_character(cg, zmap):
        raise ValidityError("zeta is not a character")
    for j in range(len(members)):
        col = {cg.coords(s): v for s, v in zip(cg.elements, table.column(j))}
        if not _check_character(cg, col):
            raise ValidityError(f"column {members[j].label} is not a character")
        for k in cg.kernel:
            if (col[cg.coords(k)] - zmap[cg.coords(k)]) % 1:
                raise ValidityError(f"column {members[j].label} is not zeta times a character of the adjoint group")
    return table


def is_perfect(table: PairingTable, cg: ComponentGroup) -> bool:
    cols = {table.column(j) for j in range(len(table.columns))}
    return len(cols) == len(table.columns) == cg.order


def renormalized_table(t: PairingTable) -> PairingTable:
    """Same values, columns replaced by their conjugates."""
    flavor = RENORMALIZED if t.flavor == CLASSICAL else CLASSICAL
    return PairingTable(t.rows, t.row_labels, tuple(conjugate_member(m) for m in t.columns),
                        t.values, t.base_column, t.zeta, t.isogeny, flavor, t.orientation)


LAMBDA, LAMBDA_BAR = "lambda", "lambda_bar"


def whittaker_table(cg: ComponentGroup, packet: Packet, orientation: str,
                    generic: Mapping[str, int], rel_signs=None) -> PairingTable:
    """Whittaker-normalized table on the adjoint component group.

    ``generic`` gives the index of the generic member of the classical packet
    for each orientation. A renormalized packet's generic member for an
    orientation is the conjugate of the classical generic member for the
    other orientation.
    """
    if cg.isogeny != AD:
        raise ValidityError("Whittaker tables live on the adjoint component group")
    if orientation not in (LAMBDA, LAMBDA_BAR):
        raise ValueError(f"unknown orientation {orientation!r}")
    if packet.flavor == CLASSICAL:
        base = generic[orientation]
    else:
        base = generic[LAMBDA_BAR if orientation == LAMBDA else LAMBDA]
    table = pairing_from_signs(cg, packet, base, None, rel_signs)
    table = PairingTable(table.rows, table.row_labels, table.columns, table.values, table.base_column,
                         table.zeta, table.isogeny, table.flavor, orientation)
    table.signs()
    if any(v != 0 for v in table.column(base)):
        raise ValidityError("base column is not trivial")
    if not is_perfect(table, cg):
        raise ValidityError("Whittaker pairing is not perfect")
    return table


def check_dual_relation(d_table: PairingTable, bar_table: PairingTable) -> bool:
    """``<s, pi_D>_{lambda, D} = <s, conj pi_D>_{lambda bar}`` entrywise."""
    if d_table.flavor != RENORMALIZED or bar_table.flavor != CLASSICAL:
        raise ValueError("expects a renormalized table and a classical one")
    index = {m.representative: j for j, m in enumerate(bar_table.columns)}
    for j, m in enumerate(d_table.columns):
        if d_table.column(j) != bar_table.column(index[conjugate_member(m).representative]):
            return False
    return True


__all__ = [
    "AD", "SC", "FULL", "ComponentGroup", "ConsistencyError", "EndoscopicAssignment",
    "PairingTable", "TorsionElement", "UnsupportedError", "ValidityError", "check_dual_relation",
    "component_group", "coweight_basis", "default_rel_signs", "endoscopic_roots", "grading_vector",
    "is_perfect",
    "pairing_from_signs", "renormalized_table", "surjection", "tn_pairing_oracle",
    "whittaker_table",
]
