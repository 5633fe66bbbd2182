"""Formal products of opaque transfer-factor atoms.

An atom is a symbol such as ``DII[chi=chi_inv](p)`` raised to an integer
power, possibly complex-conjugated. Expressions are finite products of atoms
and are stored with like atoms merged, so multiplication, inversion and
conjugation are exact bookkeeping operations.

Pair labels are plain identifiers. Three prefixes carry meaning:
``~x`` is the conjugate (renormalized) pair attached to ``x``, ``z.x`` is
``x`` translated by the central element ``z`` and ``h:x`` is ``x`` with its
second coordinate conjugated by ``h``. The label ``*`` is the fixed reference
pair used for canonical relative atoms.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace

KINDS = ("DI", "DII", "DIII", "DIII1", "DIII2", "epsL", "varpi", "lamH1", "c", "detV",
         "pair", "zeta", "aSign")
DISPLAY = {"DI": "ΔI", "DII": "ΔII", "DIII": "ΔIII", "DIII1": "ΔIII1", "DIII2": "ΔIII2",
           "epsL": "εL", "varpi": "ϖ", "lamH1": "λH1", "c": "c", "detV": "detV",
           "pair": "⟨⟩", "zeta": "ζ", "aSign": "εa"}
SIDES = ("geometric", "spectral", "compat")
NORMALIZATIONS = ("classical", "D", "tn", "star")
MORPHISMS = ("id", "i", "j", "i_hat", "j_hat")
REF = "*"

_CHI_KINDS = {"DII", "DIII", "DIII2"}
_A_KINDS = {"DI", "DII"}
_S_KINDS = {"DI", "DIII1", "DIII"}
_NORMALIZED_KINDS = {"DI", "DII", "DIII", "DIII2", "varpi", "lamH1", "pair"}


class ExpressionError(ValueError):
    """Malformed atom or expression text."""


class ContextError(ValueError):
    """Inconsistent context flags, or a factor requested in the wrong context."""


@dataclass(frozen=True)
class Atom:
    kind: str
    args: tuple[str, ...] = ()
    exponent: int = 1
    conjugated: bool = False
    chi: str = "chi"
    a_data: str = "a"
    s: str = "s"
    side: str = "geometric"
    normalization: str = "classical"
    morphism: str = "id"
    psi: str = "psi"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExpressionError(f"unknown atom kind {self.kind!r}")
        if self.exponent == 0:
            raise ExpressionError("atoms carry a nonzero exponent")
        if self.side not in SIDES:
            raise ExpressionError(f"unknown side {self.side!r}")
        if self.normalization not in NORMALIZATIONS or self.morphism not in MORPHISMS:
            raise ExpressionError("unknown normalization or morphism")
        if self.chi not in ("chi", "chi_inv") or (self.chi != "chi" and self.kind not in _CHI_KINDS):
            raise ExpressionError(f"chi orientation does not apply to {self.kind}")
        if self.a_data not in ("a", "-a") or (self.a_data != "a" and self.kind not in _A_KINDS):
            raise ExpressionError(f"a-data orientation does not apply to {self.kind}")
        if self.s not in ("s", "s_inv") or (self.s != "s" and self.kind not in _S_KINDS):
            raise ExpressionError(f"s orientation does not apply to {self.kind}")
        if self.psi not in ("psi", "psi_-1") or (self.psi != "psi" and self.kind != "epsL"):
            raise ExpressionError("psi orientation only applies to epsL")
        if self.normalization != "classical" and self.kind not in _NORMALIZED_KINDS:
            raise ExpressionError(f"normalization does not apply to {self.kind}")
        if self.morphism != "id" and self.kind != "pair":
            raise ExpressionError("morphisms only apply to pairing atoms")

    @property
    def base(self) -> "Atom":
        return self if self.exponent == 1 else replace(self, exponent=1)

    def with_exponent(self, e: int) -> "Atom":
        return replace(self, exponent=e)

    def sort_key(self) -> tuple:
        return (self.kind, self.side, self.args, self.conjugated, self.chi, self.a_data, self.s,
                self.normalization, self.morphism, self.psi, self.exponent)

    def text(self) -> str:
        opts = []
        defaults = Atom.__dataclass_fields__
        for name in ("chi", "a_data", "s", "side", "normalization", "morphism", "psi"):
            v = getattr(self, name)
            if v != defaults[name].default:
                opts.append(f"{name}={v}")
        s = self.kind + (f"[{','.join(opts)}]" if opts else "")
        s += f"({';'.join(self.args)})" if self.args else ""
        if self.conjugated:
            s = f"conj({s})"
        if self.exponent != 1:
            s += f"^{self.exponent}"
        return s

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class FactorExpression:
    """Product of atoms, merged by base atom; the empty product is 1."""

    atoms: tuple[Atom, ...] = ()

    @staticmethod
    def of(*atoms: Atom) -> "FactorExpression":
        counts: Counter = Counter()
        for a in atoms:
            counts[a.base] += a.exponent
        return FactorExpression._from_counts(counts)

    @staticmethod
    def _from_counts(counts) -> "FactorExpression":
        merged = [b.with_exponent(e) for b, e in counts.items() if e]
        return FactorExpression(tuple(sorted(merged, key=Atom.sort_key)))

    @property
    def counts(self) -> Counter:
        return Counter({a.base: a.exponent for a in self.atoms})

    def __mul__(self, other: "FactorExpression") -> "FactorExpression":
        c = self.counts
        for a in other.atoms:
            c[a.base] += a.exponent
        return FactorExpression._from_counts(c)

    def __truediv__(self, other: "FactorExpression") -> "FactorExpression":
        return self * other.inverse()

    def __pow__(self, n: int) -> "FactorExpression":
        if n == 0:
            return ONE
        return FactorExpression.of(*(a.with_exponent(a.exponent * n) for a in self.atoms))

    def inverse(self) -> "FactorExpression":
        return self ** -1

    def conj(self) -> "FactorExpression":
        return FactorExpression.of(*(replace(a, conjugated=not a.conjugated) for a in self.atoms))

    def is_one(self) -> bool:
        return not self.atoms

    def labels(self) -> set[str]:
        return {x for a in self.atoms for x in a.args}

    def text(self) -> str:
        return " * ".join(a.text() for a in self.atoms) if self.atoms else "1"

    def __str__(self) -> str:
        return self.text()


ONE = FactorExpression()


def atom(kind: str, *args: str, **opts) -> FactorExpression:
    return FactorExpression.of(Atom(kind, tuple(args), **opts))


@dataclass(frozen=True)
class Context:
    """Flags describing the endoscopic and Whittaker setting."""

    bounded: bool = True
    s_orientation: str = "s"
    z_pair: str = "z"
    archimedean: bool = False
    twisted: bool = False
    spectral: bool = False
    whittaker: bool = False
    orientation: str = "lambda"
    psi: str = "psi"
    detV_sign: int = 1
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.s_orientation not in ("s", "s_inv"):
            raise ContextError("s orientation must be s or s_inv")
        if self.orientation not in ("lambda", "lambda_bar") or self.psi not in ("psi", "psi_-1"):
            raise ContextError("unknown Whittaker orientation")
        if self.detV_sign not in (1, -1):
            raise ContextError("detV_sign must be 1 or -1")
        if self.spectral and (not self.archimedean or self.twisted):
            raise ContextError("the spectral side is archimedean standard endoscopy")
        if self.spectral and not self.bounded:
            raise ContextError("spectral factors are attached to bounded parameters")

    def label(self) -> str:
        if self.name:
            return self.name
        bits = ["twisted" if self.twisted else "standard"]
        if self.archimedean:
            bits.append("real")
        if self.spectral:
            bits.append("spectral")
        if not self.bounded:
            bits.append("unbounded")
        if self.whittaker:
            bits.append(f"whittaker{'+' if self.detV_sign == 1 else '-'}")
        return "-".join(bits)


# ------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(`[^`]*`)|(\^-?\d+)|([A-Za-z][A-Za-z0-9_]*)|(\[[^\]]*\])|(\([^()]*\))|(.))")


def _split_args(s: str) -> tuple[str, ...]:
    inner = s[1:-1].strip()
    return tuple(x.strip() for x in inner.split(";")) if inner else ()


def _parse_opts(s: str) -> dict:
    out = {}
    for part in s[1:-1].split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ExpressionError(f"option {part!r} is not key=value")
        k, v = (x.strip() for x in part.split("=", 1))
        out[k] = v
    return out


def parse_expression(text: str, resolver=None) -> FactorExpression:
    """Parse ``a * b / c^2``, ``inv(...)``, ``conj(...)``, atoms written as
    ``KIND[opt=value,...](arg;arg)`` and named factors written in backticks,
    ```name|opt=value`(args)``; named factors go through ``resolver``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        kinds = ("name", "pow", "word", "opts", "args", "sym")
        for k, v in zip(kinds, m.groups()):
            if v is not None:
                if k == "sym" and v.isspace():
                    break
                tokens.append((k, v))
                break
    p = _Parser(tokens, resolver)
    e = p.expr()
    if p.i != len(tokens):
        raise ExpressionError(f"trailing input in {text!r}")
    return e


class _Parser:
    def __init__(self, tokens, resolver):
        self.t = tokens
        self.i = 0
        self.resolver = resolver

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> FactorExpression:
        e = self.term()
        while self.peek() in (("sym", "*"), ("sym", "/")):
            _, op = self.take()
            rhs = self.term()
            e = e * rhs if op == "*" else e / rhs
        return e

    def term(self) -> FactorExpression:
        e = self.unary()
        if self.peek()[0] == "pow":
            e = e ** int(self.take()[1][1:])
        return e

    def unary(self) -> FactorExpression:
        k, v = self.take()
        if k == "sym" and v == "1":
            return ONE
        if k == "word" and v in ("inv", "conj"):
            inner = self._group()
            return inner.inverse() if v == "inv" else inner.conj()
        if k == "sym" and v == "(":
            e = self.expr()
            if self.take() != ("sym", ")"):
                raise ExpressionError("unbalanced parentheses")
            return e
        if k == "args":
            return parse_expression(v[1:-1], self.resolver)
        if k == "name":
            body = v[1:-1]
            name, _, optstr = body.partition("|")
            opts = _parse_opts(f"[{optstr}]") if optstr else {}
            args = None
            if self.peek()[0] == "args":
                args = _split_args(self.take()[1])
            if self.resolver is None:
                raise ExpressionError(f"no resolver for named factor {name!r}")
            return self.resolver(name, args, opts)
        if k == "word":
            opts = {}
            if self.peek()[0] == "opts":
                opts = _parse_opts(self.take()[1])
            args = ()
            if self.peek()[0] == "args":
                args = _split_args(self.take()[1])
            return FactorExpression.of(Atom(v, args, **opts))
        raise ExpressionError(f"unexpected token {v!r}")

    def _group(self) -> FactorExpression:
        k, v = self.peek()
        if k == "args":
            self.take()
            return parse_expression(v[1:-1], self.resolver)
        if (k, v) != ("sym", "("):
            raise ExpressionError("expected a parenthesised argument")
        self.take()
        e = self.expr()
        if self.take() != ("sym", ")"):
            raise ExpressionError("unbalanced parentheses")
        return e
