"""Command-line driver: ``endotransfer catalog|packet|pairing|identities|harness``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse and validation errors (reported on standard error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .catalog import CatalogEntry, CatalogError, find_entry, load_catalog, parse_catalog, serialize
from .components import (AD, LAMBDA, LAMBDA_BAR, UnsupportedError, ValidityError, component_group,
                         is_perfect, pairing_from_signs, renormalized_table, whittaker_table)
from .factors.theorems import CONTEXTS, DEFAULT_INSTANTIATIONS, theorem_suite
from .harness import run_harness
from .lattice import CplxVector
from .packets import (Packet, packet_central_values, stable_character_data)

HARNESS_SIZE_CAP = 6
_NUMBER = re.compile(r"^-?\d+(?:/\d+)?$")


class UsageError(Exception):
    """Bad arguments or data; exit code 2."""


@dataclass
class Report:
    command: list[str]
    seed: int
    passed: bool
    results: dict
    lines: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"command": self.command, "seed": self.seed, "passed": self.passed, "results": self.results}

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        return "\n".join(self.lines)


# ----------------------------------------------------------------- parsing

def parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """``3/2``, ``1+2i``, ``-i`` or ``1/2-3/2i`` as exact (re, im)."""
    t = text.strip().replace(" ", "")
    try:
        if not t.endswith("i"):
            return _rational(t), Fraction(0)
        body = t[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        re_, im = (body[:cut], body[cut:]) if cut > 0 else ("0", body)
        if im in ("", "+", "-"):
            im += "1"
        return _rational(re_), _rational(im.lstrip("+"))
    except ValueError:
        raise UsageError(f"cannot read {text!r} as a complex rational") from None


def _rational(t: str) -> Fraction:
    if not _NUMBER.match(t):
        raise ValueError(t)
    return Fraction(t)


def parse_vector(text: str) -> CplxVector:
    parts = [parse_complex(x) for x in text.split(",")]
    return CplxVector(tuple(p[0] for p in parts), tuple(p[1] for p in parts))


def fmt_rational(x: Fraction) -> str:
    return str(Fraction(x))


def fmt_vector(v: CplxVector | Sequence) -> str:
    if isinstance(v, CplxVector):
        items = []
        for r, i in zip(v.re, v.im):
            if i == 0:
                items.append(fmt_rational(r))
            else:
                sign = "+" if i > 0 else "-"
                items.append(f"{fmt_rational(r)}{sign}{fmt_rational(abs(i))}i")
        return "(" + ", ".join(items) + ")"
    return "(" + ", ".join(fmt_rational(x) for x in v) + ")"


def _word(w) -> str:
    return "".join(f"s{i + 1}" for i in w.word) or "1"


# ---------------------------------------------------------------- commands

def _entry(args) -> CatalogEntry:
    entries = load_catalog(args.catalog)
    try:
        return find_entry(entries, args.group)
    except KeyError as e:
        raise UsageError(e.args[0]) from None


def _parameter(entry: CatalogEntry, args):
    mu = parse_vector(args.mu)
    lam = None
    if args.lam is not None:
        v = parse_vector(args.lam)
        if not v.is_real:
            raise UsageError("lambda must be real")
        lam = v.re
    try:
        return entry.parameter(mu, lam)
    except ValueError as e:
        raise UsageError(f"invalid parameter for {entry.name}: {e}") from None


def cmd_catalog(args) -> Report:
    entries = load_catalog(args.catalog)
    text = serialize(entries)
    round_trip = serialize(parse_catalog(text)) == text
    rows = []
    for e in sorted(entries, key=lambda x: x.name):
        rows.append({
            "name": e.name,
            "rank": e.datum.rank,
            "semisimple_rank": e.datum.semisimple_rank,
            "quasi_split": e.quasi_split,
            "omega_R_order": len(e.omega_R_group()),
            "component_group": component_group(e.frame, AD).describe(),
            "isogenies": list(e.isogenies),
            "parameters": [fmt_vector(p.mu) for p in e.parameters],
            "whittaker": e.whittaker.generic() if e.whittaker else None,
        })
    lines = [f"catalog: {len(entries)} entries, round-trip {'ok' if round_trip else 'FAILED'}"]
    for r in rows:
        form = "quasi-split" if r["quasi_split"] else "not quasi-split"
        lines.append(f"  {r['name']}: rank {r['rank']}, {form}, |Omega_R| = {r['omega_R_order']}, "
                     f"adjoint component group {r['component_group']}, parameters {' '.join(r['parameters'])}")
    if args.dump:
        lines = [text.rstrip("\n")]
    return Report(["catalog"], args.seed, round_trip, {"entries": rows, "round_trip": round_trip}, lines)


def _packet_results(entry: CatalogEntry, pk: Packet) -> tuple[dict, list[str], bool]:
    members = []
    for m in pk.members:
        members.append({
            "label": m.label,
            "coset": sorted(_word(w) for w in m.coset),
            "data": [{"nu": fmt_vector(d.nu), "lam": fmt_vector(d.lam)} for d in m.char_data],
        })
    central = []
    ok = True
    for i, z in enumerate(entry.points()):
        try:
            vals = packet_central_values(pk, z)
            central.append({"point": i, "phases": [fmt_rational(v.phase) for v in vals]})
        except AssertionError as e:
            ok = False
            central.append({"point": i, "error": str(e)})
    stable = [fmt_vector(d.nu) for d in stable_character_data(pk)]
    lines = [f"packet ({pk.flavor}) for {entry.name}, mu = {fmt_vector(pk.parameter.mu)}, "
             f"lambda = {fmt_vector(pk.parameter.lam)}: {len(pk)} member(s), "
             f"{'bounded' if pk.parameter.bounded else 'unbounded'}"]
    for m in members:
        data = "; ".join(f"nu={d['nu']} lam={d['lam']}" for d in m["data"])
        lines.append(f"  {m['label']}: coset {{{', '.join(m['coset'])}}}  {data}")
    for c in central:
        if "error" in c:
            lines.append(f"  central point {c['point']}: FAILED {c['error']}")
        else:
            lines.append(f"  central point {c['point']}: phases (turns) {', '.join(c['phases'])}")
    lines.append(f"  stable data: {{{', '.join(stable)}}}")
    return {"members": members, "central": central, "stable": stable, "size": len(pk)}, lines, ok


def cmd_packet(args) -> Report:
    entry = _entry(args)
    p = _parameter(entry, args)
    pk = entry.packet(p, renormalized=args.flavor == "D")
    results, lines, ok = _packet_results(entry, pk)
    results.update({"group": entry.name, "flavor": pk.flavor})
    return Report(["packet", entry.name, args.mu, args.flavor], args.seed, ok, results, lines)


def _render_table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    return ["  " + "  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]


def cmd_pairing(args) -> Report:
    entry = _entry(args)
    p = _parameter(entry, args)
    if args.whittaker:
        if not entry.quasi_split or entry.whittaker is None:
            raise UsageError(f"{entry.name} is not quasi-split: no Whittaker normalization")
        if args.isogeny != AD:
            raise UsageError("Whittaker tables live on the adjoint component group")
    try:
        cg = component_group(p, args.isogeny)
    except UnsupportedError as e:
        raise UsageError(str(e)) from None
    pk = entry.packet(p)
    try:
        if args.whittaker:
            orientation = LAMBDA if args.whittaker == "lambda" else LAMBDA_BAR
            source = entry.packet(p, renormalized=True) if args.renormalized else pk
            table = whittaker_table(cg, source, orientation, entry.whittaker.generic())
        else:
            table = pairing_from_signs(cg, pk, 0)
            if args.renormalized:
                table = renormalized_table(table)
    except ValidityError as e:
        return Report(["pairing", entry.name, args.mu], args.seed, False,
                      {"group": entry.name, "error": str(e)}, [f"pairing for {entry.name}: FAILED {e}"])
    perfect = is_perfect(table, cg)
    rows = table.csv_rows()
    if args.csv:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        if args.csv == "-":
            sys.stdout.write(buf.getvalue())
        else:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
    results = {
        "group": entry.name,
        "isogeny": args.isogeny,
        "component_group": cg.describe(),
        "order": cg.order,
        "packet_size": len(pk),
        "flavor": table.flavor,
        "orientation": args.whittaker,
        "table": rows,
        "perfect": perfect,
        "base_column": table.column_labels[table.base_column],
    }
    lines = [f"pairing for {entry.name}, mu = {fmt_vector(p.mu)}: component group {cg.describe()} "
             f"({args.isogeny}), packet size {len(pk)}, {table.flavor}"
             + (f", Whittaker {args.whittaker}" if args.whittaker else "")]
    lines += _render_table(rows)
    lines.append(f"  perfect: {'yes' if perfect else 'no'}; base member {results['base_column']}")
    return Report(["pairing", entry.name, args.mu], args.seed, perfect, results, lines)


def cmd_identities(args) -> Report:
    contexts = CONTEXTS
    if args.context:
        known = {c.label(): c for c in CONTEXTS}
        missing = [c for c in args.context if c not in known]
        if missing:
            raise UsageError(f"unknown context(s): {', '.join(missing)}; known: {', '.join(known)}")
        contexts = tuple(known[c] for c in args.context)
    try:
        report = theorem_suite(args.seed, args.instantiations, contexts, args.fixture or None, abort=False)
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    command = ["identities"] + [f"--fixture={x}" for x in args.fixture or ()]
    return Report(command, args.seed, report.passed, report.summary(),
                  report.text(args.verbose).splitlines())


def cmd_harness(args) -> Report:
    if not 1 <= args.max_size <= HARNESS_SIZE_CAP:
        raise UsageError(f"--max-size must lie in 1..{HARNESS_SIZE_CAP}")
    if args.seeds < 1:
        raise UsageError("--seeds must be positive")
    report = run_harness(args.seeds, args.max_size, args.corrupt, start=args.seed)
    return Report(["harness", str(args.seeds), str(args.max_size)] + (["--corrupt"] if args.corrupt else []),
                  args.seed, report.passed, report.summary(), report.text().splitlines())


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", default=argparse.SUPPRESS, help="catalog JSON file "
                        "(default: $ENDOTRANSFER_CATALOG, else the bundled catalog)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit the report as JSON")

    parser = argparse.ArgumentParser(prog="endotransfer", parents=[common],
                                     description="Packets, pairings, factor identities and transfer toys.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="list and check the group catalog")
    p.add_argument("--dump", action="store_true", help="print the canonical serialization")
    p.set_defaults(func=cmd_catalog)

    def parameter_args(q):
        q.add_argument("group", help="catalog entry name")
        q.add_argument("--mu", required=True, help="comma-separated entries, e.g. 2 or 1/2,-1/2 or 0+3/2i")
        q.add_argument("--lam", help="comma-separated rationals (default zeros)")

    p = sub.add_parser("packet", parents=[common], help="build a packet and its character data")
    parameter_args(p)
    p.add_argument("--flavor", choices=("classical", "D"), default="classical")
    p.set_defaults(func=cmd_packet)

    p = sub.add_parser("pairing", parents=[common], help="component group and pairing table")
    parameter_args(p)
    p.add_argument("--isogeny", choices=("ad", "sc"), default="ad")
    p.add_argument("--whittaker", choices=("lambda", "lambda_bar"))
    p.add_argument("--renormalized", action="store_true", help="table for the renormalized packet")
    p.add_argument("--csv", metavar="PATH", help="write the table as CSV ('-' for standard output)")
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("identities", parents=[common], help="prove and sample the factor identities")
    p.add_argument("--fixture", action="append", help="run only this fixture (repeatable)")
    p.add_argument("--context", action="append", help="run only in this context (repeatable)")
    p.add_argument("--instantiations", type=int, default=DEFAULT_INSTANTIATIONS)
    p.add_argument("--verbose", action="store_true", help="include every proof trace")
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("harness", parents=[common], help="random transfer-duality toy models")
    p.add_argument("--seeds", type=int, default=500, help="number of models")
    p.add_argument("--max-size", type=int, default=HARNESS_SIZE_CAP)
    p.add_argument("--corrupt", action="store_true", help="use the wrong constant when dualizing")
    p.set_defaults(func=cmd_harness)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, Optional[Report]]:
    """Parse and execute; returns the exit code and the report (if any)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("catalog", None), ("seed", 0), ("json", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        report = args.func(args)
    except (UsageError, CatalogError, OSError) as e:
        print(f"endotransfer: error: {e}", file=sys.stderr)
        return 2, None
    if not (args.command == "pairing" and args.csv == "-"):
        print(report.render(args.json))
    return (0 if report.passed else 1), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        code, _ = run(argv)
    except SystemExit as e:  # argparse usage errors
        return int(e.code or 0)
    return code


if __name__ == "__main__":
    sys.exit(main())
