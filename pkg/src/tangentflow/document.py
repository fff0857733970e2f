"""Exact JSON documents for series, vector fields and diffeomorphisms.

A document looks like::

    {
      "format_version": 1,
      "kind": "diffeo",
      "m": 1,
      "n": 2,
      "trunc": 4,
      "components": [
        [
          {"exponents": [2], "coefficient": "1"}
        ]
      ]
    }

``kind`` is ``series`` (with a flat ``terms`` list and no ``n``), ``field``
or ``diffeo``. Coefficients are strings ``"p"`` or ``"p/q"``, never floats.
Diffeo documents store the displacement ``F - id``, whose components must
have order >= n. Terms are written in graded-lexicographic order, so
serialization is canonical.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Union

from .errors import DocumentError, TangentFlowError
from .exp_log import Diffeo
from .series import Series
from .vector_field import VectorField

FORMAT_VERSION = 1
KINDS = ("series", "field", "diffeo")

_RATIONAL = re.compile(r"^-?[0-9]+(/[0-9]+)?$")

Document = Union[Series, VectorField, Diffeo]


def _terms_out(f: Series) -> list:
    return [{"exponents": list(alpha), "coefficient": str(c)} for alpha, c in f.terms()]


def to_dict(obj: Document) -> dict:
    if isinstance(obj, Series):
        return {"format_version": FORMAT_VERSION, "kind": "series",
                "m": obj.m, "trunc": obj.trunc, "terms": _terms_out(obj)}
    if isinstance(obj, VectorField):
        kind, n, comps = "field", obj.n, obj.components
    elif isinstance(obj, Diffeo):
        kind, n, comps = "diffeo", obj.n, obj.displacement
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return {"format_version": FORMAT_VERSION, "kind": kind, "m": obj.m, "n": n,
            "trunc": obj.trunc, "components": [_terms_out(c) for c in comps]}


def _term_lines(terms: list, indent: str) -> str:
    if not terms:
        return "[]"
    inner = ",\n".join(indent + "  " + json.dumps(t) for t in terms)
    return "[\n" + inner + "\n" + indent + "]"


def serialize(obj: Document) -> str:
    """Canonical text: header fields one per line, then one term per line."""
    d = to_dict(obj)
    body = d.pop("terms", None)
    comps = d.pop("components", None)
    lines = [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in d.items()]
    if comps is None:
        lines.append('  "terms": ' + _term_lines(body, "  "))
    else:
        lists = ",\n".join("    " + _term_lines(c, "    ") for c in comps)
        lines.append('  "components": [\n' + lists + "\n  ]")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def parse_coefficient(text) -> Fraction:
    if not isinstance(text, str) or not _RATIONAL.match(text):
        raise DocumentError(f"coefficient {text!r} is not an exact rational string 'p' or 'p/q'")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise DocumentError(f"coefficient {text!r} has zero denominator")
    return Fraction(text)


def _int_field(doc: dict, key: str, minimum: int) -> int:
    if key not in doc:
        raise DocumentError(f"missing field {key!r}")
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise DocumentError(f"field {key!r} must be an integer >= {minimum}, got {v!r}")
    return v


def _series_in(terms, m: int, trunc: int, where: str) -> Series:
    if not isinstance(terms, list):
        raise DocumentError(f"{where}: terms must be a list")
    seen = {}
    for i, term in enumerate(terms):
        loc = f"{where}, term {i}"
        if not isinstance(term, dict) or set(term) != {"exponents", "coefficient"}:
            raise DocumentError(f"{loc}: a term has exactly the keys 'exponents' and 'coefficient'")
        alpha = term["exponents"]
        if (not isinstance(alpha, list) or len(alpha) != m
                or any(not isinstance(e, int) or isinstance(e, bool) or e < 0 for e in alpha)):
            raise DocumentError(f"{loc}: exponents must be {m} nonnegative integers, got {alpha!r}")
        alpha = tuple(alpha)
        if sum(alpha) > trunc:
            raise DocumentError(f"{loc}: degree {sum(alpha)} exceeds trunc {trunc}")
        if alpha in seen:
            raise DocumentError(f"{loc}: duplicate exponents {list(alpha)}")
        c = parse_coefficient(term["coefficient"])
        if c == 0:
            raise DocumentError(f"{loc}: zero coefficients are not stored")
        seen[alpha] = c
    return Series(m, trunc, seen)


def from_dict(doc) -> Document:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"kind must be one of {KINDS}, got {kind!r}")
    m = _int_field(doc, "m", 1)
    trunc = _int_field(doc, "trunc", 0)
    if kind == "series":
        extra = set(doc) - {"format_version", "kind", "m", "trunc", "terms"}
        if extra:
            raise DocumentError(f"unexpected fields {sorted(extra)}")
        return _series_in(doc.get("terms"), m, trunc, "terms")
    extra = set(doc) - {"format_version", "kind", "m", "n", "trunc", "components"}
    if extra:
        raise DocumentError(f"unexpected fields {sorted(extra)}")
    n = _int_field(doc, "n", 2)
    comps = doc.get("components")
    if not isinstance(comps, list) or len(comps) != m:
        raise DocumentError(f"components must be a list of {m} term lists")
    series = [_series_in(c, m, trunc, f"component {i + 1}") for i, c in enumerate(comps)]
    try:
        if kind == "field":
            return VectorField(series, n)
        return Diffeo(series, n - 1)
    except TangentFlowError as exc:
        what = "field order >= n" if kind == "field" else "displacement order >= n"
        raise DocumentError(f"invariant violated ({what}): {exc}") from exc


def parse_document(text: str) -> Document:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_dict(doc)


def load(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise DocumentError(f"{path} is not valid UTF-8") from exc
    return parse_document(text)


def dump(obj: Document, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj))
