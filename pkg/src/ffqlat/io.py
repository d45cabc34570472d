"""JSON loading and saving for forms, fields and F_q-form systems.

Polynomials are little-endian lists of integers; text such as ``"t^2+1"``
is also accepted for prime fields.
"""

from __future__ import annotations

import json
import os
import tempfile

from .algebra import GF, Poly
from .algebra.poly import parse_poly
from .qform import GramLattice


def field_from(d=None, q=None, modulus=None):
    """Field from a JSON dict, else from the order q (and optional modulus)."""
    if d is not None:
        return GF.from_json(d)
    if q is None:
        raise ValueError("no field given: pass --q or include a field in the JSON")
    return GF.from_order(q, modulus)


def poly_from(F, x) -> Poly:
    if isinstance(x, str):
        return parse_poly(F, x)
    if isinstance(x, int):
        return Poly.const(F, F.from_int(x))
    return Poly.from_ints(F, list(x))


def form_from_json(d, F=None) -> GramLattice:
    if isinstance(d, list):
        d = {"gram": d}
    if "field" in d:
        F = GF.from_json(d["field"])
    if F is None:
        raise ValueError("form JSON has no field and none was given")
    return GramLattice(F, [[poly_from(F, e) for e in r] for r in d["gram"]])


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def load_form(path, F=None) -> GramLattice:
    return form_from_json(load_json(path), F)


def atomic_write(path, text):
    """Write text to path through a temporary file and a rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def dump_form(L: GramLattice, path):
    atomic_write(path, json.dumps(L.to_json(), sort_keys=True) + "\n")


def systems_from_json(d, F):
    """A pair of systems: ``{"a": [...], "b": [...]}`` or ``[[...], [...]]``,
    each a list of symmetric matrices over F_q (entries as field ints)."""
    from .fieldsums import QFSystem

    if isinstance(d, dict):
        if "field" in d:
            F = GF.from_json(d["field"])
        pair = [d["a"], d["b"]]
    else:
        pair = d
    if len(pair) != 2:
        raise ValueError("expected exactly two systems")
    return F, [QFSystem(F, [[[int(x) for x in r] for r in M] for M in s]) for s in pair]
