"""Catalogued transfer factors as products of atoms."""

from __future__ import annotations

from typing import Optional, Sequence

from .atoms import ONE, Atom, Context, ContextError, FactorExpression, atom, parse_expression

GEOMETRIC_RELATIVE = ("Δ", "Δ′", "Δ_D", "Δ_D(χ⁻¹)")
GEOMETRIC_ABSOLUTE = ("Δ_0", "Δ_0′", "Δ_{0,D}", "Δ′_abs", "Δ_D,abs")
WHITTAKER = ("Δ_λ′", "Δ_{λ,D}", "Δ_λ̄′", "Δ_{λ̄,D}")
SPECTRAL = ("Δ_spec", "Δ_D,spec", "Δ′_compat", "Δ_D,compat")
SPECTRAL_WHITTAKER = ("Δ_λ,spec", "Δ_{λ,D},spec", "Δ_λ̄,spec", "Δ_{λ̄,D},spec")
FACTOR_NAMES = GEOMETRIC_RELATIVE + GEOMETRIC_ABSOLUTE + WHITTAKER + SPECTRAL + SPECTRAL_WHITTAKER

BASE_PAIR = "p0"
WHITTAKER_PAIR = "w"


def _args(args: Optional[Sequence[str]], default: tuple[str, ...]) -> tuple[str, ...]:
    if args is None:
        return default
    args = tuple(args)
    if len(args) != len(default):
        raise ContextError(f"expected {len(default)} pair labels, got {len(args)}")
    return args


def _geometric(name: str, ctx: Context, labels: tuple[str, ...], s: str) -> FactorExpression:
    """Terms of the geometric factors; one label is absolute, two are relative."""

    def quot(kind, **kw):
        e = atom(kind, labels[0], **kw)
        return e / atom(kind, labels[1], **kw) if len(labels) == 2 else e

    def genuine(kind, **kw):
        return atom(kind, *labels, **kw)

    tn1 = quot("DI", s=s)
    tn2 = quot("DII")
    if ctx.twisted:
        third = genuine("DIII", s=s)
        table = {
            "Δ": tn1 * tn2 * third,
            "Δ′": tn1.inverse() * tn2 * third.inverse(),
            "Δ_D": tn1 * tn2.inverse() * third,
            "Δ_D(χ⁻¹)": tn1 * tn2 * genuine("DIII", s=s, chi="chi_inv"),
        }
    else:
        t31 = genuine("DIII1", s=s)
        t32 = quot("DIII2")
        table = {
            "Δ": tn1 * tn2 * t31 * t32,
            "Δ′": tn1.inverse() * tn2 * t31.inverse() * t32,
            "Δ_D": tn1 * tn2.inverse() * t31 * quot("DIII2", normalization="D"),
            "Δ_D(χ⁻¹)": tn1 * tn2 * t31 * quot("DIII2", normalization="D", chi="chi_inv"),
        }
    return table[name]


def define_factor(name: str, ctx: Context, args: Optional[Sequence[str]] = None,
                  opts: Optional[dict] = None) -> FactorExpression:
    """Expression for a catalogued factor. ``opts`` may override ``s``."""
    opts = dict(opts or {})
    s = opts.pop("s", ctx.s_orientation)
    if opts:
        raise ContextError(f"unknown factor options {sorted(opts)}")
    if s not in ("s", "s_inv"):
        raise ContextError(f"bad s orientation {s!r}")
    if name not in FACTOR_NAMES:
        raise ContextError(f"unknown factor {name!r}")
    if name in SPECTRAL + SPECTRAL_WHITTAKER and not ctx.spectral:
        raise ContextError(f"{name} needs a spectral context")
    if name in WHITTAKER + SPECTRAL_WHITTAKER and not ctx.whittaker:
        raise ContextError(f"{name} needs a Whittaker context")

    if name in GEOMETRIC_RELATIVE:
        # one label gives the absolute form of the same product
        labels = _args(args, ("p",)) if args is not None and len(args) == 1 else _args(args, ("p", "q"))
        return _geometric(name, ctx, labels, s)
    if name in ("Δ_0", "Δ_0′", "Δ_{0,D}"):
        (p,) = _args(args, ("p",))
        target = {"Δ_0": "Δ", "Δ_0′": "Δ′", "Δ_{0,D}": "Δ_D"}[name]
        return _geometric(target, ctx, (p,), s)
    if name == "Δ′_abs":
        (p,) = _args(args, ("p",))
        return _geometric("Δ′", ctx, (p, BASE_PAIR), s) * atom("c", "N'")
    if name == "Δ_D,abs":
        (p,) = _args(args, ("p",))
        return _geometric("Δ_D", ctx, (p, BASE_PAIR), s) * atom("c", "N_D")
    if name in WHITTAKER:
        (p,) = _args(args, ("p",))
        psi = "psi_-1" if "λ̄" in name else "psi"
        target = "Δ′" if name.endswith("′") else "Δ_D"
        return atom("epsL", psi=psi) * _geometric(target, ctx, (p,), s)
    if name == "Δ_spec":
        P, Q = _args(args, ("P", "Q"))
        return atom("DI", P, Q, side="spectral", s=s) * atom("DII", P, Q, side="spectral") \
            * atom("DIII", P, Q, side="spectral", s=s)
    if name == "Δ_D,spec":
        P, Q = _args(args, ("P", "Q"))
        return atom("DI", P, Q, side="spectral", s=s) * atom("DII", P, Q, side="spectral", normalization="D") \
            * atom("DIII", P, Q, side="spectral", s=s)
    if name in ("Δ′_compat", "Δ_D,compat"):
        P, p = _args(args, ("P", "p"))
        norm = "D" if name == "Δ_D,compat" else "classical"
        return (atom("DI", P, side="spectral", s=s) / atom("DI", p, s=s)
                * atom("DII", P, side="spectral", normalization=norm) / atom("DII", p, normalization=norm)
                * atom("DIII", P, p, side="compat", s=s))
    # spectral Whittaker factors are compatible with the geometric ones at a base pair
    (P,) = _args(args, ("P",))
    w = WHITTAKER_PAIR
    dual = ",D}" in name
    compat = define_factor("Δ_D,compat" if dual else "Δ′_compat", ctx, (P, w), {"s": s})
    geometric = name.replace(",spec", "")
    geometric = {"Δ_λ": "Δ_λ′", "Δ_λ̄": "Δ_λ̄′"}.get(geometric, geometric)
    return compat * define_factor(geometric, ctx, (w,), {"s": s})


def resolver(ctx: Context):
    def resolve(name, args, opts):
        return define_factor(name, ctx, args, opts)
    return resolve


def parse(text: str, ctx: Context) -> FactorExpression:
    """Parse expression text, resolving backticked factor names in ``ctx``."""
    return parse_expression(text, resolver(ctx))


__all__ = ["FACTOR_NAMES", "define_factor", "parse", "resolver", "ONE", "Atom"]
