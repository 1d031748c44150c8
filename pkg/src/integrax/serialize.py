"""JSON encodings shared by the command-line front end.

Rationals are strings (``"4/3"``, ``"-1"``), polynomials are coefficient
lists with the constant term first, complex numbers are ``[re, im]`` pairs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

import numpy as np

from .errors import InputError
from .matcore import IntegralExtension, JordanSpec, RatMatrix
from .polycore import FactoredPoly, MultiplicitySignature, RatPoly, as_rat


def rat_to_json(x: Fraction) -> str:
    return str(Fraction(x))


def rat_from_json(value: Any) -> Fraction:
    if isinstance(value, bool) or value is None:
        raise InputError(f"expected a rational, got {value!r}")
    if isinstance(value, float):
        raise InputError(f"rationals must be given as strings or integers, got float {value!r}")
    try:
        return as_rat(Fraction(value) if isinstance(value, str) else value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"cannot read {value!r} as a rational") from exc


def poly_to_json(p: RatPoly) -> list[str]:
    return [rat_to_json(c) for c in p.coeffs]


def poly_from_json(value: Any) -> RatPoly:
    if not isinstance(value, list):
        raise InputError("a polynomial is a list of coefficients, constant term first")
    return RatPoly(rat_from_json(c) for c in value)


def matrix_to_json(A: RatMatrix) -> list[list[str]]:
    return [[rat_to_json(x) for x in row] for row in A.entries]


def matrix_from_json(value: Any) -> RatMatrix:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise InputError("a matrix is a list of rows")
    return RatMatrix([[rat_from_json(x) for x in row] for row in value])


def jordan_to_json(spec: JordanSpec) -> list[dict]:
    return [{"eigenvalue": rat_to_json(ev), "cells": list(cells)} for ev, cells in spec.blocks]


def jordan_from_json(value: Any) -> JordanSpec:
    if not isinstance(value, list) or not value:
        raise InputError("Jordan data is a nonempty list of {eigenvalue, cells} objects")
    blocks = []
    for item in value:
        if not isinstance(item, dict) or "eigenvalue" not in item or "cells" not in item:
            raise InputError("each Jordan block needs 'eigenvalue' and 'cells'")
        cells = item["cells"]
        if not isinstance(cells, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in cells):
            raise InputError("cells must be a list of integers")
        blocks.append((rat_from_json(item["eigenvalue"]), tuple(cells)))
    return JordanSpec(tuple(blocks))


def extension_to_json(A: IntegralExtension) -> dict:
    return {
        "matrix": matrix_to_json(A.matrix()),
        "u": [rat_to_json(x) for x in A.u],
        "v": [rat_to_json(x) for x in A.v],
        "b": rat_to_json(A.b),
    }


def factored_from_json(value: Any) -> FactoredPoly:
    """``{"roots": [[root, mult], ...], "leading": "1"}``; roots may also be ``{"root", "mult"}`` objects."""
    if not isinstance(value, dict) or "roots" not in value:
        raise InputError("a factored polynomial needs a 'roots' list")
    roots = []
    for item in value["roots"]:
        if isinstance(item, dict):
            r, k = item.get("root"), item.get("mult")
        elif isinstance(item, list) and len(item) == 2:
            r, k = item
        else:
            raise InputError(f"cannot read root entry {item!r}")
        if not isinstance(k, int) or isinstance(k, bool):
            raise InputError(f"multiplicity must be an integer, got {k!r}")
        roots.append((rat_from_json(r), k))
    return FactoredPoly(tuple(roots), rat_from_json(value.get("leading", 1)))


def signature_from_json(value: Any) -> MultiplicitySignature:
    if not isinstance(value, dict):
        raise InputError("a signature is an object with 'alphas' and 'betas'")
    alphas = value.get("alphas", value.get("alpha", []))
    betas = value.get("betas", value.get("beta", []))
    for seq in (alphas, betas):
        if not isinstance(seq, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in seq):
            raise InputError("alphas and betas must be lists of integers")
    return MultiplicitySignature(tuple(alphas), tuple(betas))


def signature_to_json(sig: MultiplicitySignature) -> dict:
    return {"alphas": list(sig.alphas), "betas": list(sig.betas), "n": sig.n, "M": sig.M, "m": sig.m, "k": sig.k}


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complexes_to_json(values) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(values).ravel()]
