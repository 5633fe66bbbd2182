"""Identity fixtures: symbolic proof plus randomized numerical validation."""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .atoms import Context, FactorExpression
from .definitions import parse
from .rules import normalize, normalize_with_trace, prove_equal
from .sampler import Instantiation

TOLERANCE = 1e-12
DEFAULT_INSTANTIATIONS = 1000

CONTEXTS: tuple[Context, ...] = (
    Context(name="standard"),
    Context(name="standard-real", archimedean=True),
    Context(name="standard-unbounded", bounded=False),
    Context(name="standard-whittaker+", whittaker=True),
    Context(name="standard-whittaker-", whittaker=True, detV_sign=-1),
    Context(name="twisted", twisted=True),
    Context(name="twisted-unbounded", twisted=True, bounded=False),
    Context(name="twisted-whittaker-", twisted=True, whittaker=True, detV_sign=-1),
    Context(name="spectral+", archimedean=True, spectral=True, whittaker=True),
    Context(name="spectral-", archimedean=True, spectral=True, whittaker=True, detV_sign=-1),
)


class IdentityFailure(AssertionError):
    def __init__(self, result: "FixtureResult"):
        super().__init__(result.text(verbose=True))
        self.result = result


@dataclass(frozen=True)
class Fixture:
    name: str
    statement: str
    lhs: str
    rhs: str
    requires: dict = field(default_factory=dict)
    kind: str = "equal"
    vary: tuple[str, ...] = ()
    expect: Optional[str] = None

    def mismatch(self, ctx: Context) -> Optional[str]:
        """Why ``ctx`` does not apply, or None."""
        for key, want in sorted(self.requires.items()):
            if getattr(ctx, key) != want:
                return f"needs {key}={want}"
        return None


def load_fixtures(path: Optional[Path] = None) -> list[Fixture]:
    if path is None:
        text = resources.files("endotransfer").joinpath("data/fixtures.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    records = json.loads(text)["fixtures"]
    out = []
    seen = set()
    for r in records:
        if r["name"] in seen:
            raise ValueError(f"duplicate fixture {r['name']!r}")
        seen.add(r["name"])
        out.append(Fixture(r["name"], r["statement"], r["lhs"], r["rhs"], dict(r.get("requires", {})),
                           r.get("kind", "equal"), tuple(r.get("vary", ())), r.get("expect")))
    return out


def relabel(e: FactorExpression, old: str, new: str) -> FactorExpression:
    """Rename a pair label everywhere, including inside prefixed labels."""

    def sub(label: str) -> str:
        for marker in (".", ":"):
            head, sep, rest = label.partition(marker)
            if sep and rest == old:
                return head + sep + new
        if label == old:
            return new
        if label == "~" + old:
            return "~" + new
        return label

    return FactorExpression.of(*(replace(a, args=tuple(sub(x) for x in a.args)) for a in e.atoms))


@dataclass(frozen=True)
class ContextCheck:
    context: str
    proved: bool
    instantiations: int
    max_error: float
    soundness_error: float
    constant: Optional[str]
    trace: tuple[str, ...]
    residual: str

    @property
    def passed(self) -> bool:
        return self.proved and self.max_error <= TOLERANCE and self.soundness_error <= TOLERANCE


@dataclass(frozen=True)
class FixtureResult:
    name: str
    statement: str
    status: str  # pass | fail | skip
    checks: tuple[ContextCheck, ...]
    reason: str = ""

    def text(self, verbose: bool = False) -> str:
        lines = [f"{self.status.upper():4} {self.name}: {self.statement}"]
        if self.reason:
            lines.append(f"     skipped: {self.reason}")
        for c in self.checks:
            flag = "ok" if c.passed else "FAILED"
            extra = f" constant {c.constant}" if c.constant else ""
            lines.append(f"     [{c.context}] {flag} symbolic={'yes' if c.proved else 'no'} "
                         f"n={c.instantiations} max_err={c.max_error:.1e}{extra}")
            if not c.proved:
                lines.append(f"       residual: {c.residual}")
            if verbose or not c.passed:
                lines.extend("       " + t for t in c.trace)
        return "\n".join(lines)


@dataclass(frozen=True)
class SuiteReport:
    results: tuple[FixtureResult, ...]
    seed: int
    instantiations: int

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for r in self.results:
            out[r.status] += 1
        return out

    def text(self, verbose: bool = False) -> str:
        c = self.counts()
        head = (f"identity suite: {c['pass']} passed, {c['fail']} failed, {c['skip']} skipped "
                f"(seed {self.seed}, {self.instantiations} instantiations per context)")
        return "\n".join([head] + [r.text(verbose) for r in self.results])

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "instantiations": self.instantiations,
            "counts": self.counts(),
            "fixtures": [
                {"name": r.name, "status": r.status, "reason": r.reason,
                 "contexts": [{"context": c.context, "proved": c.proved, "instantiations": c.instantiations,
                               "max_error": c.max_error, "constant": c.constant} for c in r.checks]}
                for r in self.results
            ],
        }


def _seed(seed: int, *parts: str) -> int:
    return (seed * 1_000_003 + zlib.crc32("|".join(parts).encode())) % (2 ** 63)


def _max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def check_fixture(fx: Fixture, ctx: Context, seed: int = 0, n: int = DEFAULT_INSTANTIATIONS) -> ContextCheck:
    lhs, rhs = parse(fx.lhs, ctx), parse(fx.rhs, ctx)
    inst = Instantiation(ctx, _seed(seed, fx.name, ctx.label()), n)
    vl, vr = inst.evaluate(lhs), inst.evaluate(rhs)
    constant = None
    if fx.kind == "equal":
        proof = prove_equal(lhs, rhs, ctx)
        proved = proof.proved
        trace = tuple(s.text() for s in proof.trace)
        residual = proof.residual.text()
        err = _max_abs(vl - vr)
        sound = max(_max_abs(inst.evaluate(proof.lhs) - vl), _max_abs(inst.evaluate(proof.rhs) - vr))
    elif fx.kind == "constant":
        old, new = fx.vary
        quotient, steps = normalize_with_trace(lhs / rhs, ctx)
        labels = quotient.labels()
        proved = not any(old in x or new in x for x in labels)
        if fx.expect is not None:
            proved = proved and quotient == normalize(parse(fx.expect, ctx), ctx)
        trace = tuple(s.text() for s in steps)
        residual = quotient.text()
        ratio = vl / vr
        moved = inst.evaluate(relabel(lhs, old, new)) / inst.evaluate(relabel(rhs, old, new))
        err = _max_abs(ratio - moved)
        if fx.expect is not None:
            err = max(err, _max_abs(ratio - inst.evaluate(parse(fx.expect, ctx))))
            constant = f"{fx.expect} = {ctx.detV_sign if fx.expect == 'detV' else 'free'}"
        else:
            constant = quotient.text()
        sound = _max_abs(inst.evaluate(quotient) - ratio)
    else:
        raise ValueError(f"unknown fixture kind {fx.kind!r}")
    return ContextCheck(ctx.label(), proved, n, err, sound, constant, trace, residual)


def theorem_suite(seed: int = 0, n: int = DEFAULT_INSTANTIATIONS, contexts: Optional[Sequence[Context]] = None,
                  names: Optional[Sequence[str]] = None, fixtures: Optional[Sequence[Fixture]] = None,
                  abort: bool = True) -> SuiteReport:
    """Prove and sample every fixture in every applicable context.

    With ``abort`` a failing fixture raises :class:`IdentityFailure`; otherwise
    failures are part of the report.
    """
    fixtures = list(fixtures) if fixtures is not None else load_fixtures()
    if names:
        known = {f.name for f in fixtures}
        missing = [x for x in names if x not in known]
        if missing:
            raise KeyError(f"unknown fixture(s): {', '.join(missing)}")
        fixtures = [f for f in fixtures if f.name in names]
    contexts = list(contexts) if contexts is not None else list(CONTEXTS)
    results = []
    for fx in sorted(fixtures, key=lambda f: f.name):
        usable = [c for c in contexts if fx.mismatch(c) is None]
        if not usable:
            reasons = sorted({fx.mismatch(c) for c in contexts})
            results.append(FixtureResult(fx.name, fx.statement, "skip", (), "; ".join(reasons)))
            continue
        checks = tuple(check_fixture(fx, c, seed, n) for c in usable)
        status = "pass" if all(c.passed for c in checks) else "fail"
        result = FixtureResult(fx.name, fx.statement, status, checks)
        if status == "fail" and abort:
            raise IdentityFailure(result)
        results.append(result)
    return SuiteReport(tuple(results), seed, n)
