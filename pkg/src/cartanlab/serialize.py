"""JSON wire formats: scalars, matrices, groups, presentations.

Scalars serialize as strings so rationals round-trip exactly:
"num/den" (or just "num") for rationals, "a+b*sqrt(r)" with rational
a, b for quadratic-field elements, and IEEE-754 decimal text (repr) for
floating values.  Matrix files carry a field descriptor, a group
descriptor, and a list of matrices; presentation files add named
generators, structure, optional relators, and an optional bending block.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

import numpy as np

from .cartan import GroupDesc, GroupElement
from .errors import PreconditionError, UnsupportedFieldError
from .fields import COMPLEX, REAL, FieldDesc, QuadElement, padic, quadratic
from .wordgroups import (
    AmalgamStructure,
    FreeStructure,
    HnnStructure,
    Presentation,
    parse_word,
)

_QUAD_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+(?:/\d+)?)\s*(?P<sign>[+-])\s*"
    r"(?P<b>\d+(?:/\d+)?)\s*\*\s*sqrt\((?P<r>\d+)\)\s*$"
)
_QUAD_PURE_RE = re.compile(
    r"^\s*(?P<b>[+-]?\d+(?:/\d+)?)\s*\*\s*sqrt\((?P<r>\d+)\)\s*$"
)


def scalar_to_str(x) -> str:
    if isinstance(x, QuadElement):
        b = x.b
        sign = "+" if b >= 0 else "-"
        return f"{x.a}{sign}{abs(b)}*sqrt({x.r})"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, complex):
        return repr(x)
    return repr(float(x))


def scalar_from_str(text: str, field: FieldDesc):
    text = text.strip()
    if field.kind == "quadratic":
        m = _QUAD_RE.match(text)
        if m:
            a = Fraction(m.group("a"))
            b = Fraction(m.group("b"))
            if m.group("sign") == "-":
                b = -b
        else:
            m = _QUAD_PURE_RE.match(text)
            if m:
                a, b = Fraction(0), Fraction(m.group("b"))
            else:
                return Fraction(text)
        r = int(m.group("r"))
        if r != field.r:
            raise PreconditionError(
                f"scalar lives in sqrt({r}) but the field is sqrt({field.r})"
            )
        return QuadElement(a, b, field.r)
    if field.kind == "padic":
        return Fraction(text)
    floating = any(ch in text for ch in ".eEjJ") or text in ("inf", "-inf", "nan")
    if field.kind == "complex":
        if floating:
            return complex(text.replace(" ", ""))
        return Fraction(text)
    # real: integer/rational text stays exact, decimal text becomes float
    if floating:
        return float(text)
    return Fraction(text)


def field_from_json(obj) -> FieldDesc:
    kind = obj.get("kind")
    if kind == "real":
        return REAL
    if kind == "complex":
        return COMPLEX
    if kind == "padic":
        return padic(int(obj["p"]))
    if kind == "quadratic":
        return quadratic(int(obj["r"]))
    if kind == "laurent":
        return FieldDesc("laurent")  # raises with the scoping message
    raise UnsupportedFieldError(f"unknown field kind {kind!r}")


def field_to_json(field: FieldDesc) -> dict:
    out = {"kind": field.kind}
    if field.p is not None:
        out["p"] = field.p
    if field.r is not None:
        out["r"] = field.r
    return out


def group_from_json(obj, field: FieldDesc) -> GroupDesc:
    family = obj.get("family")
    if family == "SL":
        return GroupDesc("SL", field, n=int(obj["n"]))
    if family in ("SO", "U"):
        form = obj.get("form")
        form_scalars = (
            tuple(scalar_from_str(s, field) for s in form) if form else ()
        )
        return GroupDesc(
            family, field, p=int(obj["p"]), q=int(obj["q"]), form=form_scalars
        )
    raise PreconditionError(f"unknown group family {family!r}")


def matrix_from_json(rows, field: FieldDesc):
    return [[scalar_from_str(str(x), field) for x in row] for row in rows]


def matrix_to_json(matrix):
    if isinstance(matrix, np.ndarray):
        return [[scalar_to_str(x) for x in row] for row in matrix.tolist()]
    return [[scalar_to_str(x) for x in row] for row in matrix]


def load_matrix_document(obj):
    """(field, group, [(id, GroupElement)]) from a parsed matrix file."""
    field = field_from_json(obj["field"])
    group = group_from_json(obj["group"], field)
    matrices = obj.get("matrices", [])
    ids = obj.get("ids") or [f"m{i}" for i in range(len(matrices))]
    if len(ids) != len(matrices):
        raise PreconditionError("ids and matrices must have equal length")
    out = []
    for name, rows in zip(ids, matrices):
        out.append((name, GroupElement(matrix_from_json(rows, field), group)))
    return field, group, out


def load_presentation_document(obj):
    """(field, group, Presentation, bending-block-or-None)."""
    field = field_from_json(obj["field"])
    group = group_from_json(obj["group"], field)
    gens = obj.get("generators")
    if not gens:
        raise PreconditionError("presentation file needs a generators object")
    symbols = list(gens.keys())
    matrices = [matrix_from_json(gens[s], field) for s in symbols]
    sobj = obj.get("structure", {"type": "free"})
    stype = sobj.get("type", "free")
    index = {s: i for i, s in enumerate(symbols)}

    def words(pairs):
        return tuple(
            (parse_word(w1, symbols), parse_word(w2, symbols)) for w1, w2 in pairs
        )

    if stype == "free":
        structure = FreeStructure()
    elif stype == "amalgam":
        structure = AmalgamStructure(
            side1=tuple(index[s] for s in sobj["side1"]),
            side2=tuple(index[s] for s in sobj["side2"]),
            gamma0_pairs=words(sobj.get("gamma0", [])),
        )
    elif stype == "hnn":
        structure = HnnStructure(
            base=tuple(index[s] for s in sobj["base"]),
            stable=index[sobj["stable"]],
            pairings=words(sobj.get("pairings", [])),
        )
    else:
        raise PreconditionError(f"unknown structure type {stype!r}")
    relators = tuple(parse_word(w, symbols) for w in obj.get("relators", []))
    pres = Presentation(symbols, matrices, group, structure=structure,
                        relators=relators)
    bending = obj.get("bending")
    if bending is not None and "Y" in bending:
        bending = dict(bending)
        bending["Y"] = matrix_from_json(bending["Y"], field)
    return field, group, pres, bending


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
