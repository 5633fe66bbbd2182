"""Finite toy models of transfer duality, in exact Gaussian-rational arithmetic.

Test functions appear only through their orbital-integral (or trace) value
vectors. A model carries an absolute primed factor matrix, rows indexed by
stable classes of the endoscopic group and columns by twisted classes of the
group, together with the twisting character on representative changes and the
constant relating the two normalizations. The renormalized matrix is
``c * conj(primed)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sympy import QQ_I

Gauss = type(QQ_I(0, 0))
ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)
Vector = tuple
Matrix = tuple


class IndexMismatch(ValueError):
    """A vector does not match the index set of a model."""


def conj(z: Gauss) -> Gauss:
    return QQ_I(z.x, -z.y)


def conj_vec(v: Sequence[Gauss]) -> Vector:
    return tuple(conj(z) for z in v)


def scale(c: Gauss, v: Sequence[Gauss]) -> Vector:
    return tuple(c * z for z in v)


def is_unit(z: Gauss) -> bool:
    return z * conj(z) == ONE


def apply(matrix: Matrix, v: Sequence[Gauss]) -> Vector:
    out = []
    for row in matrix:
        acc = ZERO
        for a, b in zip(row, v):
            acc += a * b
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class ToyModel:
    delta_classes: tuple[str, ...]
    gamma_classes: tuple[str, ...]
    factor_matrix: Matrix
    twist_values: tuple[Gauss, ...]
    c: Gauss
    central_values: tuple[Gauss, ...] = field(default=())

    def __post_init__(self):
        if len(self.factor_matrix) != len(self.gamma_classes):
            raise IndexMismatch("factor matrix needs one row per stable class")
        for row in self.factor_matrix:
            if len(row) != len(self.delta_classes):
                raise IndexMismatch("factor matrix needs one column per twisted class")
            if any(z != ZERO and not is_unit(z) for z in row):
                raise ValueError("factor values must be zero or of absolute value one")
        if len(self.twist_values) != len(self.delta_classes) or not all(map(is_unit, self.twist_values)):
            raise ValueError("one unit twist value per twisted class is required")
        if not is_unit(self.c):
            raise ValueError("the normalizing constant must have absolute value one")
        if self.central_values and (len(self.central_values) != len(self.gamma_classes)
                                    or not all(map(is_unit, self.central_values))):
            raise ValueError("one unit central value per stable class is required")

    @property
    def d_factor_matrix(self) -> Matrix:
        return tuple(tuple(self.c * conj(z) for z in row) for row in self.factor_matrix)

    @property
    def d_twist_values(self) -> tuple[Gauss, ...]:
        return conj_vec(self.twist_values)


def _check(vec: Sequence, n: int, what: str) -> None:
    if len(vec) != n:
        raise IndexMismatch(f"{what} has length {len(vec)}, expected {n}")


def transfer(m: ToyModel, f: Sequence[Gauss]) -> Vector:
    """The transfer assignment of the model: stable values of the matching function."""
    _check(f, len(m.delta_classes), "orbital-integral vector")
    return apply(m.factor_matrix, f)


def match_geometric(m: ToyModel, f: Sequence[Gauss], f1: Sequence[Gauss],
                    factor_matrix: Optional[Matrix] = None) -> bool:
    """Do the stable values ``f1`` match the orbital integrals ``f`` through the factor?"""
    _check(f, len(m.delta_classes), "orbital-integral vector")
    _check(f1, len(m.gamma_classes), "stable vector")
    matrix = m.factor_matrix if factor_matrix is None else factor_matrix
    return tuple(f1) == apply(matrix, f)


def match_renormalized(m: ToyModel, f: Sequence[Gauss], f1d: Sequence[Gauss]) -> bool:
    return match_geometric(m, f, f1d, m.d_factor_matrix)


def dualize(m: ToyModel, f1: Sequence[Gauss]) -> Vector:
    """``c * conj(f1)``, where ``f1`` is the transfer of the conjugated function."""
    _check(f1, len(m.gamma_classes), "stable vector")
    return scale(m.c, conj_vec(f1))


def undualize(m: ToyModel, f1d: Sequence[Gauss]) -> Vector:
    """Inverse of :func:`dualize`."""
    _check(f1d, len(m.gamma_classes), "stable vector")
    return conj_vec(scale(conj(m.c), f1d))


def change_representatives(m: ToyModel, f: Sequence[Gauss], renormalized: bool = False):
    """Move every class to a new representative, twisting by the model's character.

    Factor columns pick up the character value and orbital integrals its
    inverse, so matching is unaffected. Returns (column-scaled matrix, new f).
    """
    twist = m.d_twist_values if renormalized else m.twist_values
    base = m.d_factor_matrix if renormalized else m.factor_matrix
    matrix = tuple(tuple(z * t for z, t in zip(row, twist)) for row in base)
    moved = tuple(z * conj(t) for z, t in zip(f, twist))
    return matrix, moved


def translate_rows(values: Sequence[Gauss], f1: Sequence[Gauss]) -> Vector:
    """Stable values at centrally translated classes, given the per-row multipliers."""
    return tuple(a * b for a, b in zip(values, f1))


# ------------------------------------------------------------------ spectral

@dataclass(frozen=True)
class SpectralToy:
    """Packet-level toy: ``traces[label]`` holds trace values over the members
    and ``traces["~" + label]`` those of the conjugated function."""

    members: tuple[str, ...]
    endo_members: tuple[str, ...]
    factor_matrix: Matrix
    c: Gauss
    traces: dict = field(default_factory=dict)
    stable: dict = field(default_factory=dict)
    d_factor_matrix: Optional[Matrix] = None

    def renormalized_factor(self) -> Matrix:
        if self.d_factor_matrix is not None:
            return self.d_factor_matrix
        return tuple(tuple(self.c * conj(z) for z in row) for row in self.factor_matrix)


def match_spectral(st: SpectralToy, label: str, renormalized: bool = False) -> bool:
    """Stable traces against traces; the renormalized identity is derived by conjugation."""
    for key in (label, "~" + label) if renormalized else (label,):
        if key not in st.traces or key not in st.stable:
            raise IndexMismatch(f"no trace data for {key!r}")
    if not renormalized:
        t, s = st.traces[label], st.stable[label]
        _check(t, len(st.members), "trace vector")
        _check(s, len(st.endo_members), "stable trace vector")
        return tuple(s) == apply(st.factor_matrix, t)
    # traces of conjugate members against f are conjugate traces against conj f
    t_d = conj_vec(st.traces["~" + label])
    s_d = scale(st.c, conj_vec(st.stable["~" + label]))
    _check(t_d, len(st.members), "trace vector")
    _check(s_d, len(st.endo_members), "stable trace vector")
    return s_d == apply(st.renormalized_factor(), t_d)


# ------------------------------------------------------------- random models

def unit_rational(rng: random.Random) -> Gauss:
    """A random point on the unit circle with rational coordinates."""
    k = rng.randrange(6)
    if k < 4:
        return [QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1)][k]
    a, b = rng.randint(1, 9), rng.randint(1, 9)
    t = QQ_I(a, 0) / QQ_I(b, 0)
    z = (ONE - t * t + QQ_I(0, 2) * t) / (ONE + t * t)
    return z if k == 4 else -z


def gaussian_rational(rng: random.Random) -> Gauss:
    return QQ_I(rng.randint(-9, 9), rng.randint(-9, 9)) / QQ_I(rng.randint(1, 5), 0)


def random_model(seed: int, max_size: int = 6) -> ToyModel:
    rng = random.Random(seed)
    nd, ng = rng.randint(1, max_size), rng.randint(1, max_size)
    rows = []
    for _ in range(ng):
        related = [rng.random() < 0.7 for _ in range(nd)]
        related[rng.randrange(nd)] = True
        rows.append(tuple(unit_rational(rng) if r else ZERO for r in related))
    return ToyModel(tuple(f"d{i}" for i in range(nd)), tuple(f"g{i}" for i in range(ng)), tuple(rows),
                    tuple(unit_rational(rng) for _ in range(nd)), unit_rational(rng),
                    tuple(unit_rational(rng) for _ in range(ng)))


def random_function(m: ToyModel, seed: int) -> Vector:
    rng = random.Random(seed ^ 0x5F3759DF)
    f = [gaussian_rational(rng) for _ in m.delta_classes]
    if all(z == ZERO for z in f):
        f[0] = ONE
    return tuple(f)


def spectral_toy_for(m: ToyModel, f: Sequence[Gauss], c: Optional[Gauss] = None) -> SpectralToy:
    """A spectral toy sharing the model's matrix; traces of ``f`` and ``conj f``."""
    g = random_function(m, len(f) + 17)
    st = SpectralToy(m.delta_classes, m.gamma_classes, m.factor_matrix, m.c if c is None else c,
                     {"f": tuple(f), "~f": g},
                     {"f": apply(m.factor_matrix, f), "~f": apply(m.factor_matrix, g)},
                     m.d_factor_matrix)
    return st


@dataclass(frozen=True)
class Counterexample:
    seed: int
    check: str
    sizes: tuple[int, int]


@dataclass(frozen=True)
class HarnessReport:
    models: int
    verified: int
    counterexamples: tuple[Counterexample, ...]
    max_size: int
    corrupt: bool

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def text(self) -> str:
        head = (f"transfer harness: {self.verified}/{self.models} models verified "
                f"(sizes <= {self.max_size}{', corrupted' if self.corrupt else ''}), "
                f"{len(self.counterexamples)} counterexample(s)")
        if not self.counterexamples:
            return head
        first = self.counterexamples[0]
        return head + f"\n  first: seed {first.seed}, sizes {first.sizes}, failed check {first.check}"

    def summary(self) -> dict:
        return {"models": self.models, "verified": self.verified, "max_size": self.max_size,
                "corrupt": self.corrupt, "counterexamples": len(self.counterexamples),
                "first": None if not self.counterexamples else
                {"seed": self.counterexamples[0].seed, "check": self.counterexamples[0].check,
                 "sizes": list(self.counterexamples[0].sizes)}}


def check_model(m: ToyModel, f: Vector, corrupt: bool = False) -> Optional[str]:
    """Run every duality check on one model; returns the first failing check's name."""
    c_used = -m.c if corrupt else m.c
    dual = ToyModel(m.delta_classes, m.gamma_classes, m.factor_matrix, m.twist_values, c_used,
                    m.central_values)
    # classical matching for conj f, then dualize
    f1 = transfer(m, conj_vec(f))
    if not match_geometric(m, conj_vec(f), f1):
        return "classical-matching"
    f1d = dualize(dual, f1)
    if not match_renormalized(m, f, f1d):
        return "classical-implies-renormalized"
    # conversely, from renormalized matching back to classical matching
    g1d = apply(m.d_factor_matrix, f)
    if not match_geometric(m, conj_vec(f), undualize(dual, g1d)):
        return "renormalized-implies-classical"
    # new representatives: the twisting character and its renormalized version
    for renormalized, stable in ((False, f1), (True, f1d)):
        start = conj_vec(f) if not renormalized else f
        matrix, moved = change_representatives(m, start, renormalized)
        if apply(matrix, moved) != tuple(stable):
            return "representative-change"
    # central translation commutes with dualize (renormalized character is the inverse)
    if m.central_values:
        inv = tuple(conj(z) for z in m.central_values)
        if dualize(dual, translate_rows(inv, f1)) != translate_rows(m.central_values, f1d):
            return "central-translation"
    st = spectral_toy_for(m, f, c_used)
    if not (match_spectral(st, "f") and match_spectral(st, "f", renormalized=True)):
        return "spectral"
    return None


def run_harness(seeds: int = 500, max_size: int = 6, corrupt: bool = False, start: int = 0) -> HarnessReport:
    verified = 0
    bad = []
    for seed in range(start, start + seeds):
        m = random_model(seed, max_size)
        failure = check_model(m, random_function(m, seed), corrupt)
        if failure is None:
            verified += 1
        else:
            bad.append(Counterexample(seed, failure, (len(m.gamma_classes), len(m.delta_classes))))
    return HarnessReport(seeds, verified, tuple(bad), max_size, corrupt)
