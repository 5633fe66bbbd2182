"""Random numerical models of the factor atoms.

Free atoms get independent random values; every other atom is computed from
free ones through the value-level relations the atoms are known to satisfy.
This module never calls the rewrite rules, so agreement between evaluated
and normalized expressions is a genuine check of the rule set.
"""

from __future__ import annotations

import zlib
from dataclasses import replace

import numpy as np

from .atoms import REF, Atom, Context, FactorExpression
from .rules import is_fourth_root, is_sign, is_unit


def _split(label: str):
    for marker in (".", ":"):
        head, sep, rest = label.partition(marker)
        if sep and head and rest:
            return marker, head, rest
    return None


class Instantiation:
    """One batch of ``n`` joint random instantiations; values are cached per atom."""

    def __init__(self, ctx: Context, seed: int = 0, n: int = 1):
        self.ctx = ctx
        self.seed = seed
        self.n = n
        self._cache: dict[Atom, np.ndarray] = {}

    # -------------------------------------------------------------- draws
    def _rng(self, a: Atom) -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(a.text().encode())])

    def _free(self, a: Atom) -> np.ndarray:
        rng = self._rng(a)
        n = self.n
        if a.kind == "detV":
            return np.full(n, complex(self.ctx.detV_sign))
        if a.kind == "epsL":
            root = 1.0 if self.ctx.detV_sign == 1 else 1j
            return root * rng.choice([-1.0, 1.0], size=n).astype(complex)
        if is_sign(a, self.ctx):
            return rng.choice([-1.0, 1.0], size=n).astype(complex)
        if is_fourth_root(a, self.ctx):
            return (1j) ** rng.integers(0, 4, size=n)
        phase = np.exp(2j * np.pi * rng.random(n))
        if is_unit(a, self.ctx):
            return phase
        return phase * np.exp(rng.normal(0.0, 0.5, size=n))

    # ------------------------------------------------------------- values
    def value(self, a: Atom) -> np.ndarray:
        """Value of ``a`` including its exponent and conjugation flag."""
        base = replace(a, exponent=1, conjugated=False)
        v = self._cache.get(base)
        if v is None:
            v = self._derive(base)
            self._cache[base] = v
        if a.conjugated:
            v = np.conj(v)
        return v ** a.exponent

    def _v(self, a: Atom, e: int = 1) -> np.ndarray:
        return self.value(replace(a, exponent=e))

    def _derive(self, a: Atom) -> np.ndarray:
        ctx = self.ctx
        if a.s == "s_inv":
            return self._v(replace(a, s="s"), -1)
        if a.kind in ("DI", "DIII") and a.normalization == "star":
            return self._v(replace(a, normalization="classical"), -1)
        if a.kind == "pair":
            return self._pairing(a)
        if a.side == "geometric" and a.normalization == "D" and a.kind in ("DIII2", "varpi", "lamH1", "DII"):
            return self._v(replace(a, normalization="classical"), -1)
        if a.side in ("spectral", "compat"):
            moving = [x for x in a.args if x != REF] if a.side == "spectral" else list(a.args[:1])
            if moving and all(x.startswith("~") for x in moving):
                args = tuple(x[1:] if x in moving else x for x in a.args)
                if a.kind in ("DI", "DIII") and a.normalization == "classical":
                    return self._v(replace(a, args=args))
                if a.kind == "DII" and a.normalization == "D":
                    return self._v(replace(a, args=args, normalization="classical"), -1)
        if a.side == "geometric" and a.kind in ("DI", "DII", "DIII", "DIII1", "DIII2", "aSign"):
            shifted = self._translated(a)
            if shifted is not None:
                return shifted
        if a.chi == "chi_inv" and a.side == "geometric" and a.normalization == "classical":
            plain = replace(a, chi="chi")
            if a.kind == "DII":
                return self._v(plain, -1)
            power = 2 if a.kind == "DIII2" else -2
            v = self._v(plain)
            for pos, label in enumerate(a.args):
                v = v * self._v(Atom("DII", (label,)), power if pos == 0 else -power)
            return v
        if a.a_data == "-a":
            return self._v(replace(a, a_data="a")) * self._v(Atom("aSign", a.args, side=a.side))
        if len(a.args) == 2 and a.kind in ("DI", "DII", "DIII", "DIII1", "DIII2", "aSign"):
            x, y = a.args
            if a.side == "geometric":
                if x == y:
                    return np.ones(self.n, complex)
                return self._v(replace(a, args=(x,))) / self._v(replace(a, args=(y,)))
            if a.side == "spectral" and y != REF:
                if x == y:
                    return np.ones(self.n, complex)
                return self._v(replace(a, args=(x, REF))) / self._v(replace(a, args=(y, REF)))
        if a.kind == "c" and not a.args and ctx.whittaker:
            return np.full(self.n, complex(ctx.detV_sign))
        if a.kind == "epsL" and a.psi == "psi_-1":
            return self._v(replace(a, psi="psi")) * ctx.detV_sign
        return self._free(a)

    def _translated(self, a: Atom):
        ctx = self.ctx
        for pos, label in enumerate(a.args):
            parts = _split(label)
            if parts is None:
                continue
            marker, head, rest = parts
            v = self._v(replace(a, args=a.args[:pos] + (rest,) + a.args[pos + 1:]))
            # the third term moves by the central or twisting character; a quotient
            # in the second slot moves the other way
            e = 1 if pos == 0 else -1
            if a.normalization in ("D", "star"):
                e = -e
            if a.s == "s_inv":
                e = -e
            if marker == "." and a.kind == "DIII2" and not ctx.twisted:
                v = v * self._v(Atom("lamH1", (head,)), -e)
            elif marker == "." and a.kind == "DIII" and ctx.twisted:
                v = v * self._v(Atom("lamH1", (head,)), e)
            elif marker == ":" and a.kind == "DIII" and ctx.twisted:
                v = v * self._v(Atom("varpi", (head,)), -e)
            return v
        return None

    def _pairing(self, a: Atom) -> np.ndarray:
        n, m = a.normalization, a.morphism
        if n == "classical" and m == "j":
            return self._v(replace(a, normalization="D", morphism="i_hat"), -1)
        if n == "classical" and m == "j_hat":
            return self._v(replace(a, normalization="tn", morphism="i"))
        if n == "star" and m == "j":
            return self._v(replace(a, normalization="classical", morphism="i_hat"), -1)
        if n == "star" and m == "j_hat":
            return self._v(replace(a, normalization="tn", morphism="i"), -1)
        if n == "D" and m in ("id", "i_hat"):
            return self._v(replace(a, normalization="classical"), -1)
        return self._free(a)

    def evaluate(self, e: FactorExpression) -> np.ndarray:
        out = np.ones(self.n, complex)
        for a in e.atoms:
            out = out * self.value(a)
        return out


def instantiate_random(e: FactorExpression, ctx: Context, seed: int = 0) -> complex:
    """One deterministic instantiation: the same atom gets the same value for a given seed."""
    return complex(Instantiation(ctx, seed, 1).evaluate(e)[0])


def instantiate_batch(e: FactorExpression, ctx: Context, seed: int = 0, n: int = 1000) -> np.ndarray:
    return Instantiation(ctx, seed, n).evaluate(e)
