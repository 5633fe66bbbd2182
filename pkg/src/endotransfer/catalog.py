"""Group catalog: JSON entries describing dual-group frames, their real
forms and sample parameters, validated at load time.

Numbers are stored as JSON integers or ``"p/q"`` strings; a complex rational
is a two-element array ``[re, im]``. ``serialize(load_catalog(path))``
reproduces a canonically written file byte for byte.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence

from .components import AD, FULL, SC
from .lattice import BasedRootDatum, CplxVector, InvalidDatumError, Involution, weyl_group
from .packets import DiscreteParameter, DualGroupFrame, Packet, build_packet, build_packet_D, validate_parameter
from .torus import DomainError, TorusPoint, central_value

CATALOG_ENV = "ENDOTRANSFER_CATALOG"
ISOGENIES = (AD, SC, FULL)
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class CatalogError(ValueError):
    """Malformed or invalid catalog content; the message names the location."""


@dataclass(frozen=True)
class WhittakerFixture:
    """Index of the generic member for each Whittaker orientation."""

    generic_lambda: int
    generic_lambda_bar: int
    detV_sign: int = 1

    def generic(self) -> dict[str, int]:
        return {"lambda": self.generic_lambda, "lambda_bar": self.generic_lambda_bar}


@dataclass(frozen=True)
class ParameterSpec:
    mu: CplxVector
    lam: tuple[Fraction, ...]


@dataclass(frozen=True)
class CentralPoint:
    H: CplxVector
    torsion: tuple[int, ...]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    datum: BasedRootDatum
    isogenies: tuple[str, ...]
    involution: Involution
    omega_R: tuple[tuple[int, ...], ...]
    quasi_split: bool
    whittaker: Optional[WhittakerFixture]
    parameters: tuple[ParameterSpec, ...]
    central_points: tuple[CentralPoint, ...]

    @property
    def frame(self) -> DualGroupFrame:
        return DualGroupFrame(self.datum, self.involution)

    def omega_R_group(self) -> frozenset:
        w = weyl_group(self.frame.datum)
        return w.closure([w.from_word(word) for word in self.omega_R])

    def parameter(self, mu: CplxVector, lam: Optional[Sequence] = None) -> DiscreteParameter:
        lam = tuple(lam) if lam is not None else (Fraction(0),) * self.datum.rank
        return validate_parameter(mu, lam, self.frame)

    def sample_parameters(self) -> list[DiscreteParameter]:
        return [self.parameter(p.mu, p.lam) for p in self.parameters]

    def packet(self, p: DiscreteParameter, renormalized: bool = False) -> Packet:
        build = build_packet_D if renormalized else build_packet
        return build(p, self.omega_R_group())

    def points(self) -> list[TorusPoint]:
        torus = self.frame.torus()
        return [TorusPoint(torus, c.H, c.torsion) for c in self.central_points]


# ---------------------------------------------------------------- decoding

def _where(entry: str, path: str) -> str:
    return f"entry {entry!r}, field {path}"


def _rational(x: Any, where: str) -> Fraction:
    if isinstance(x, bool):
        raise CatalogError(f"{where}: expected a rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.match(x):
        value = Fraction(x)
        if x != _encode_rational(value):
            raise CatalogError(f"{where}: rational {x!r} is not in lowest terms")
        return value
    raise CatalogError(f"{where}: expected an integer or a 'p/q' string, got {x!r}")


def _integer(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise CatalogError(f"{where}: expected an integer, got {x!r}")
    return x


def _list(x: Any, where: str) -> list:
    if not isinstance(x, list):
        raise CatalogError(f"{where}: expected a list, got {type(x).__name__}")
    return x


def _cplx_vector(xs: Any, where: str) -> CplxVector:
    re_, im_ = [], []
    for i, x in enumerate(_list(xs, where)):
        if isinstance(x, list):
            if len(x) != 2:
                raise CatalogError(f"{where}[{i}]: a complex rational needs two entries")
            re_.append(_rational(x[0], f"{where}[{i}][0]"))
            im_.append(_rational(x[1], f"{where}[{i}][1]"))
        else:
            re_.append(_rational(x, f"{where}[{i}]"))
            im_.append(Fraction(0))
    return CplxVector(tuple(re_), tuple(im_))


def _int_rows(xs: Any, where: str) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(_integer(v, f"{where}[{i}][{j}]") for j, v in enumerate(_list(row, f"{where}[{i}]")))
                 for i, row in enumerate(_list(xs, where)))


_KEYS = ("name", "description", "rank", "simple_roots", "simple_coroots", "isogenies", "involution",
         "omega_R", "quasi_split", "whittaker", "parameters", "central_points")


def _decode_entry(raw: Any, index: int) -> CatalogEntry:
    if not isinstance(raw, dict):
        raise CatalogError(f"entry {index}: expected an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise CatalogError(f"entry {index}: missing or empty 'name'")
    unknown = sorted(set(raw) - set(_KEYS))
    if unknown:
        raise CatalogError(f"{_where(name, unknown[0])}: unknown field")
    missing = [k for k in _KEYS if k not in raw]
    if missing:
        raise CatalogError(f"{_where(name, missing[0])}: missing field")

    def at(path):
        return _where(name, path)

    try:
        rank = _integer(raw["rank"], at("rank"))
        datum = BasedRootDatum(rank, _int_rows(raw["simple_roots"], at("simple_roots")),
                               _int_rows(raw["simple_coroots"], at("simple_coroots")))
    except InvalidDatumError as e:
        raise CatalogError(f"{at('simple_roots')}: {e}") from None
    isogenies = tuple(_list(raw["isogenies"], at("isogenies")))
    for i, iso in enumerate(isogenies):
        if iso not in ISOGENIES:
            raise CatalogError(f"{at(f'isogenies[{i}]')}: unknown isogeny {iso!r}")
    inv = raw["involution"]
    if not isinstance(inv, dict) or set(inv) != {"matrix", "tag"}:
        raise CatalogError(f"{at('involution')}: expected an object with 'matrix' and 'tag'")
    try:
        involution = Involution(_int_rows(inv["matrix"], at("involution.matrix")), inv["tag"])
        frame = DualGroupFrame(datum, involution)
    except InvalidDatumError as e:
        raise CatalogError(f"{at('involution')}: {e}") from None
    omega = _int_rows(raw["omega_R"], at("omega_R"))
    for i, word in enumerate(omega):
        if any(not 0 <= g < datum.semisimple_rank for g in word):
            raise CatalogError(f"{at(f'omega_R[{i}]')}: generator index out of range")
    quasi_split = raw["quasi_split"]
    if not isinstance(quasi_split, bool):
        raise CatalogError(f"{at('quasi_split')}: expected true or false")
    whittaker = None
    if raw["whittaker"] is not None:
        w = raw["whittaker"]
        if not isinstance(w, dict) or set(w) != {"lambda", "lambda_bar", "detV_sign"}:
            raise CatalogError(f"{at('whittaker')}: expected lambda, lambda_bar and detV_sign")
        if not quasi_split:
            raise CatalogError(f"{at('whittaker')}: Whittaker data need a quasi-split form")
        sign = _integer(w["detV_sign"], at("whittaker.detV_sign"))
        if sign not in (1, -1):
            raise CatalogError(f"{at('whittaker.detV_sign')}: expected 1 or -1")
        whittaker = WhittakerFixture(_integer(w["lambda"], at("whittaker.lambda")),
                                     _integer(w["lambda_bar"], at("whittaker.lambda_bar")), sign)
    params = []
    for i, p in enumerate(_list(raw["parameters"], at("parameters"))):
        if not isinstance(p, dict) or set(p) != {"mu", "lam"}:
            raise CatalogError(f"{at(f'parameters[{i}]')}: expected an object with 'mu' and 'lam'")
        mu = _cplx_vector(p["mu"], at(f"parameters[{i}].mu"))
        lam = tuple(_rational(x, at(f"parameters[{i}].lam[{j}]"))
                    for j, x in enumerate(_list(p["lam"], at(f"parameters[{i}].lam"))))
        params.append(ParameterSpec(mu, lam))
    points = []
    for i, c in enumerate(_list(raw["central_points"], at("central_points"))):
        if not isinstance(c, dict) or set(c) != {"H", "torsion"}:
            raise CatalogError(f"{at(f'central_points[{i}]')}: expected an object with 'H' and 'torsion'")
        points.append(CentralPoint(_cplx_vector(c["H"], at(f"central_points[{i}].H")),
                                   tuple(_integer(t, at(f"central_points[{i}].torsion"))
                                         for t in _list(c["torsion"], at(f"central_points[{i}].torsion")))))
    description = raw["description"]
    if not isinstance(description, str):
        raise CatalogError(f"{at('description')}: expected a string")
    entry = CatalogEntry(name, description, datum, isogenies, involution, omega,
                         quasi_split, whittaker, tuple(params), tuple(points))
    _validate(entry, frame)
    return entry


def _validate(entry: CatalogEntry, frame: DualGroupFrame) -> None:
    at = lambda path: _where(entry.name, path)  # noqa: E731
    entry.omega_R_group()
    for i, spec in enumerate(entry.parameters):
        try:
            p = validate_parameter(spec.mu, spec.lam, frame)
        except ValueError as e:
            raise CatalogError(f"{at(f'parameters[{i}]')}: {e}") from None
        size = len(entry.packet(p))
        if entry.whittaker and max(entry.whittaker.generic_lambda, entry.whittaker.generic_lambda_bar) >= size:
            raise CatalogError(f"{at('whittaker')}: generic index outside a packet of size {size}")
        for j, c in enumerate(entry.central_points):
            try:
                central_value(p.mu, p.lam, TorusPoint(frame.torus(), c.H, c.torsion), frame.datum)
            except (DomainError, ValueError) as e:
                raise CatalogError(f"{at(f'central_points[{j}]')}: {e}") from None


def parse_catalog(text: str, source: str = "<catalog>") -> list[CatalogEntry]:
    if not text.strip():
        return []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise CatalogError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(raw, dict) or set(raw) != {"entries"}:
        raise CatalogError(f"{source}: top level must be an object with a single 'entries' list")
    entries = []
    seen = set()
    for i, r in enumerate(_list(raw["entries"], "entries")):
        e = _decode_entry(r, i)
        if e.name in seen:
            raise CatalogError(f"{source}: duplicate entry name {e.name!r}")
        seen.add(e.name)
        entries.append(e)
    return entries


def default_catalog_text() -> tuple[str, str]:
    """Text and source name of the default catalog, honoring the environment override."""
    override = os.environ.get(CATALOG_ENV)
    if override:
        return Path(override).read_text("utf-8"), override
    return resources.files("endotransfer").joinpath("data/catalog.json").read_text("utf-8"), "bundled catalog"


def load_catalog(path: Optional[str | Path] = None) -> list[CatalogEntry]:
    if path is None:
        text, source = default_catalog_text()
    else:
        text, source = Path(path).read_text("utf-8"), str(path)
    return parse_catalog(text, source)


def find_entry(entries: Sequence[CatalogEntry], name: str) -> CatalogEntry:
    for e in entries:
        if e.name == name:
            return e
    raise KeyError(f"no catalog entry named {name!r}; known: {', '.join(e.name for e in entries)}")


# ---------------------------------------------------------------- encoding

def _encode_rational(x: Fraction) -> Any:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _encode_cplx(v: CplxVector) -> list:
    return [_encode_rational(r) if i == 0 else [_encode_rational(r), _encode_rational(i)]
            for r, i in zip(v.re, v.im)]


def encode_entry(e: CatalogEntry) -> dict:
    return {
        "name": e.name,
        "description": e.description,
        "rank": e.datum.rank,
        "simple_roots": [list(r) for r in e.datum.simple_roots],
        "simple_coroots": [list(c) for c in e.datum.simple_coroots],
        "isogenies": list(e.isogenies),
        "involution": {"matrix": [list(r) for r in e.involution.matrix], "tag": e.involution.tag},
        "omega_R": [list(w) for w in e.omega_R],
        "quasi_split": e.quasi_split,
        "whittaker": None if e.whittaker is None else {
            "lambda": e.whittaker.generic_lambda, "lambda_bar": e.whittaker.generic_lambda_bar,
            "detV_sign": e.whittaker.detV_sign},
        "parameters": [{"mu": _encode_cplx(p.mu), "lam": [_encode_rational(x) for x in p.lam]}
                       for p in e.parameters],
        "central_points": [{"H": _encode_cplx(c.H), "torsion": list(c.torsion)} for c in e.central_points],
    }


def _dump(value: Any, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}  {json.dumps(k, ensure_ascii=False)}: {_dump(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, list) and any(isinstance(v, dict) for v in value):
        items = [f"{pad}  {_dump(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(value, ensure_ascii=False, separators=(", ", ": "))


def serialize(entries: Sequence[CatalogEntry]) -> str:
    """Canonical catalog text; ``parse_catalog`` inverts it exactly."""
    if not entries:
        return ""
    return _dump({"entries": [encode_entry(e) for e in entries]}, 0) + "\n"


__all__ = [
    "CATALOG_ENV", "CatalogEntry", "CatalogError", "CentralPoint", "ParameterSpec", "WhittakerFixture",
    "default_catalog_text", "encode_entry", "find_entry", "load_catalog", "parse_catalog", "serialize",
]
