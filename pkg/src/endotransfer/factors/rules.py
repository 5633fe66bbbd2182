"""Rewrite rules and the normalizer for factor expressions.

Every rule is a value identity between atoms, so a rule may fire on a
conjugated atom: the replacement is conjugated as well. Rules fire in a fixed
priority order by default. Any other order reaches the same normal form,
which the tests check by shuffling.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .atoms import REF, Atom, Context, FactorExpression, ONE, atom

Replacement = Optional[FactorExpression]


class NormalizationError(RuntimeError):
    """The rewrite loop exceeded its step budget."""


# ------------------------------------------------------------ classification

_RELATIVE_GEOMETRIC = {"DI", "DII", "DIII", "DIII1", "DIII2"}


def is_sign(a: Atom, ctx: Context) -> bool:
    if a.kind in ("zeta", "aSign", "detV"):
        return True
    if a.side == "spectral":
        return a.kind in ("DI", "DIII") or (a.kind == "DII" and len(a.args) == 2)
    if a.side == "compat":
        return a.kind in ("DI", "DIII")
    return ctx.archimedean and a.kind in ("DI", "DIII1") and a.normalization == "classical"


def is_fourth_root(a: Atom, ctx: Context) -> bool:
    return a.side == "spectral" and a.kind == "DII" and len(a.args) == 1


def is_unit(a: Atom, ctx: Context) -> bool:
    """Unit modulus is known: Tate-Nakayama terms always, the rest when bounded."""
    if is_sign(a, ctx) or is_fourth_root(a, ctx) or a.side != "geometric":
        return True
    if a.kind in ("DI", "DIII1", "epsL"):
        return True
    if a.kind == "pair" and a.normalization == "tn":
        return True
    return ctx.bounded


def _split(label: str):
    """Return (marker, head, rest) for ``z.x`` / ``h:x`` labels, else None."""
    for marker in (".", ":"):
        head, sep, rest = label.partition(marker)
        if sep and head and rest:
            return marker, head, rest
    return None


def _unbar(label: str) -> str:
    return label[1:] if label.startswith("~") else label


# ------------------------------------------------------------------ rules

def _s_inversion(a: Atom, ctx: Context) -> Replacement:
    if a.s == "s_inv":
        return FactorExpression.of(replace(a, s="s", exponent=-1))
    return None


def _star(a: Atom, ctx: Context) -> Replacement:
    if a.kind in ("DI", "DIII") and a.normalization == "star":
        return FactorExpression.of(replace(a, normalization="classical", exponent=-1))
    return None


def pairing_step(a: Atom) -> tuple[Replacement, str]:
    """One compatibility step for a pairing atom (exponent 1, unconjugated)."""
    if a.kind != "pair":
        return None, ""
    n, m = a.normalization, a.morphism
    if n == "classical" and m == "j":
        return FactorExpression.of(replace(a, normalization="D", morphism="i_hat", exponent=-1)), "pull-j"
    if n == "classical" and m == "j_hat":
        return FactorExpression.of(replace(a, normalization="tn", morphism="i")), "pull-j-hat"
    if n == "star" and m == "j":
        return FactorExpression.of(replace(a, normalization="classical", morphism="i_hat", exponent=-1)), "star-pull-j"
    if n == "star" and m == "j_hat":
        return FactorExpression.of(replace(a, normalization="tn", morphism="i", exponent=-1)), "star-pull-j-hat"
    return None, ""


def _pairing(a: Atom, ctx: Context) -> Replacement:
    out, _ = pairing_step(a)
    if out is not None:
        return out
    if a.kind == "pair" and a.normalization == "D" and a.morphism in ("id", "i_hat"):
        return FactorExpression.of(replace(a, normalization="classical", exponent=-1))
    return None


def _renormalized(a: Atom, ctx: Context) -> Replacement:
    if a.side != "geometric" or a.normalization != "D":
        return None
    if a.kind in ("DIII2", "varpi", "lamH1", "DII"):
        return FactorExpression.of(replace(a, normalization="classical", exponent=-1))
    return None


def _conjugate_pair(a: Atom, ctx: Context) -> Replacement:
    if a.side == "spectral":
        moving = [x for x in a.args if x != REF]
    elif a.side == "compat":
        moving = list(a.args[:1])
    else:
        return None
    if not moving or not all(x.startswith("~") for x in moving):
        return None
    args = tuple(_unbar(x) if x in moving else x for x in a.args)
    if a.kind in ("DI", "DIII") and a.normalization == "classical":
        return FactorExpression.of(replace(a, args=args))
    if a.kind == "DII" and a.normalization == "D":
        return FactorExpression.of(replace(a, args=args, normalization="classical", exponent=-1))
    return None


def _translation(a: Atom, ctx: Context) -> Replacement:
    if a.side != "geometric" or a.kind not in _RELATIVE_GEOMETRIC | {"aSign"}:
        return None
    for pos, label in enumerate(a.args):
        parts = _split(label)
        if parts is None:
            continue
        marker, head, rest = parts
        args = a.args[:pos] + (rest,) + a.args[pos + 1:]
        out = FactorExpression.of(replace(a, args=args))
        sign = 1 if pos == 0 else -1
        if (a.normalization in ("D", "star")) != (a.s == "s_inv"):
            sign = -sign
        if marker == "." and (a.kind == "DIII2" and not ctx.twisted):
            out = out * atom("lamH1", head) ** (-sign)
        elif marker == "." and (a.kind == "DIII" and ctx.twisted):
            out = out * atom("lamH1", head) ** sign
        elif marker == ":" and (a.kind == "DIII" and ctx.twisted):
            out = out * atom("varpi", head) ** (-sign)
        return out
    return None


def _chi(a: Atom, ctx: Context) -> Replacement:
    if a.chi != "chi_inv" or a.side != "geometric" or a.normalization != "classical" or a.s != "s":
        return None
    plain = replace(a, chi="chi")
    if a.kind == "DII":
        return FactorExpression.of(replace(plain, exponent=-1))
    # the product of the DII term with the third term does not see chi
    power = 2 if a.kind == "DIII2" else -2
    out = FactorExpression.of(plain)
    for pos, label in enumerate(a.args):
        out = out * atom("DII", label) ** (power if pos == 0 else -power)
    return out


def _a_data(a: Atom, ctx: Context) -> Replacement:
    if a.a_data != "-a":
        return None
    return FactorExpression.of(replace(a, a_data="a")) * atom("aSign", *a.args, side=a.side)


def _relative(a: Atom, ctx: Context) -> Replacement:
    if len(a.args) != 2 or a.kind not in _RELATIVE_GEOMETRIC | {"aSign"}:
        return None
    x, y = a.args
    if a.side == "geometric":
        if x == y:
            return ONE
        return FactorExpression.of(replace(a, args=(x,)), replace(a, args=(y,), exponent=-1))
    if a.side == "spectral" and y != REF:
        if x == y:
            return ONE
        return FactorExpression.of(replace(a, args=(x, REF)), replace(a, args=(y, REF), exponent=-1))
    return None


def _conjugation(a: Atom, ctx: Context) -> Replacement:
    if not a.conjugated:
        return None
    plain = replace(a, conjugated=False)
    if a.kind in ("detV",) or is_sign(plain, ctx):
        return FactorExpression.of(plain)
    if is_unit(plain, ctx):
        return FactorExpression.of(replace(plain, exponent=-a.exponent))
    return None


def _whittaker_constant(a: Atom, ctx: Context) -> Replacement:
    if a.kind == "c" and not a.args and ctx.whittaker:
        return atom("detV")
    return None


def _psi_twist(a: Atom, ctx: Context) -> Replacement:
    if a.kind == "epsL" and a.psi == "psi_-1":
        return FactorExpression.of(replace(a, psi="psi")) * atom("detV")
    return None


def _epsilon_square(a: Atom, ctx: Context) -> Replacement:
    if a.kind != "epsL" or a.conjugated or a.exponent in (0, 1) or a.psi != "psi":
        return None
    e = a.exponent
    out = atom("epsL", *a.args) ** (e % 2) if e % 2 else ONE
    return out * atom("detV") ** (e // 2)


def _sign_reduction(a: Atom, ctx: Context) -> Replacement:
    if a.conjugated:
        return None
    mod = 2 if is_sign(a, ctx) else 4 if is_fourth_root(a, ctx) else None
    if mod is None or 0 <= a.exponent < mod and a.exponent != 0:
        return None
    e = a.exponent % mod
    return FactorExpression.of(a.with_exponent(e)) if e else ONE


# Rules marked "exact" see the whole atom; the others act on the base atom
# and are raised to the exponent and conjugated by the engine.
RULES: tuple[tuple[str, Callable, bool], ...] = (
    ("s-inversion", _s_inversion, False),
    ("star-inversion", _star, False),
    ("pairing-compatibility", _pairing, False),
    ("renormalized-inverse", _renormalized, False),
    ("conjugate-pair", _conjugate_pair, False),
    ("central-translation", _translation, False),
    ("chi-inversion", _chi, False),
    ("a-data", _a_data, False),
    ("relative-quotient", _relative, False),
    ("conjugation", _conjugation, True),
    ("whittaker-constant", _whittaker_constant, False),
    ("psi-twist", _psi_twist, False),
    ("epsilon-square", _epsilon_square, True),
    ("sign-reduction", _sign_reduction, True),
)
RULE_NAMES = tuple(r[0] for r in RULES)


@lru_cache(maxsize=1 << 16)
def _apply(rule: Callable, exact: bool, a: Atom, ctx: Context) -> Replacement:
    if exact:
        return rule(a, ctx)
    base = replace(a, exponent=1, conjugated=False)
    out = rule(base, ctx)
    if out is None:
        return None
    out = out ** a.exponent
    return out.conj() if a.conjugated else out


@dataclass(frozen=True)
class TraceStep:
    rule: str
    before: str
    after: str

    def text(self) -> str:
        return f"{self.rule}: {self.before} -> {self.after}"


def normalize_with_trace(e: FactorExpression, ctx: Context, order: Optional[list[str]] = None,
                         shuffle_seed: Optional[int] = None, max_steps: int = 10000):
    """Rewrite to the normal form; returns (normal form, list of TraceStep)."""
    rules = list(RULES) if order is None else [r for name in order for r in RULES if r[0] == name]
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    trace: list[TraceStep] = []
    current = e
    for _ in range(max_steps):
        atoms = list(current.atoms)
        if rng is not None:
            rng.shuffle(atoms)
        fired = False
        for name, rule, exact in rules:
            for a in atoms:
                out = _apply(rule, exact, a, ctx)
                if out is None:
                    continue
                current = current / FactorExpression.of(a) * out
                trace.append(TraceStep(name, a.text(), out.text()))
                fired = True
                break
            if fired:
                break
        if not fired:
            return current, trace
    raise NormalizationError(f"no normal form within {max_steps} steps for {e.text()}")


def normalize(e: FactorExpression, ctx: Context, order: Optional[list[str]] = None,
              shuffle_seed: Optional[int] = None) -> FactorExpression:
    return normalize_with_trace(e, ctx, order, shuffle_seed)[0]


@dataclass(frozen=True)
class Proof:
    proved: bool
    lhs: FactorExpression
    rhs: FactorExpression
    residual: FactorExpression
    trace: tuple[TraceStep, ...]

    def text(self) -> str:
        head = "proved" if self.proved else f"not proved; residual {self.residual.text()}"
        return "\n".join([head] + ["  " + s.text() for s in self.trace])


def prove_equal(e1: FactorExpression, e2: FactorExpression, ctx: Context) -> Proof:
    n1, t1 = normalize_with_trace(e1, ctx)
    n2, t2 = normalize_with_trace(e2, ctx)
    residual = normalize(n1 / n2, ctx)
    return Proof(n1 == n2, n1, n2, residual, tuple(t1 + t2))


@dataclass(frozen=True)
class PairingRewrite:
    result: FactorExpression
    applied: tuple[str, ...]
    unmatched: tuple[str, ...]

    @property
    def flagged(self) -> bool:
        return bool(self.unmatched)


def pairing_rewrite(e: FactorExpression) -> PairingRewrite:
    """Apply the four pairing compatibilities once to every pairing atom."""
    out = ONE
    applied, unmatched = [], []
    for a in e.atoms:
        if a.kind != "pair":
            out = out * FactorExpression.of(a)
            continue
        step, name = pairing_step(replace(a, exponent=1, conjugated=False))
        if step is None:
            unmatched.append(a.text())
            out = out * FactorExpression.of(a)
            continue
        step = step ** a.exponent
        out = out * (step.conj() if a.conjugated else step)
        applied.append(name)
    return PairingRewrite(out, tuple(applied), tuple(unmatched))
