"""``integrax`` command line: JSON in, JSON out.

Exit codes: 0 success, 2 input error, 3 regime violation, 4 solver failure.
On failure a JSON error object goes to stderr and nothing to stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import drawfuns, kernels
from .errors import ConvergenceError, InputError, RegimeError
from .matcore import (
    JordanSpec,
    RatMatrix,
    char_poly,
    conjugate_integral,
    construct_integral,
    is_integrable,
    jordan_matrix,
    min_poly,
    multiple_locus,
    verify_integral,
)
from .polycore import antiderivative, classify_signature, divrem, evaluate, rational_roots, sfull_integral
from .serialize import (
    complex_to_json,
    complexes_to_json,
    extension_to_json,
    factored_from_json,
    jordan_from_json,
    matrix_from_json,
    poly_to_json,
    rat_from_json,
    rat_to_json,
    signature_from_json,
    signature_to_json,
)
from .trees import (
    PlaneTree,
    bicolored_from_partitions,
    bicolored_with_white_prefix,
    decode,
    encode,
    to_adjacency,
    tree_from_partition,
)

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_SOLVER = 0, 2, 3, 4
DEFAULT_TOL = drawfuns.DEFAULT_TOL

log = logging.getLogger("integrax")


def _read_source(source: str | None) -> str:
    if source is None or source == "-":
        return sys.stdin.read()
    path = Path(source)
    try:
        if path.is_file():
            return path.read_text()
    except OSError:
        pass
    return source


def _parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON input: {exc}") from exc


def jordan_cells_of_matrix(B: RatMatrix) -> list[tuple[Fraction, int, int]] | None:
    """``(eigenvalue, offset, size)`` of each cell if ``B`` is already in Jordan form, else ``None``."""
    n = B.rows
    for i in range(n):
        for j in range(n):
            if j == i or j == i + 1:
                continue
            if B[i, j] != 0:
                return None
    cells, start = [], 0
    for i in range(n):
        link = B[i, i + 1] if i + 1 < n else Fraction(0)
        if link not in (0, 1):
            return None
        if link == 1 and B[i, i] != B[i + 1, i + 1]:
            return None
        if link == 0:
            cells.append((B[start, start], start, i + 1 - start))
            start = i + 1
    return cells


def _spec_and_permutation(B: RatMatrix, cells) -> tuple[JordanSpec, RatMatrix]:
    """Jordan data of ``B`` and a permutation ``X`` with ``B = X J X^-1``."""
    grouped: dict[Fraction, list[int]] = {}
    for ev, _off, k in cells:
        grouped.setdefault(ev, []).append(k)
    spec = JordanSpec(tuple((ev, tuple(ks)) for ev, ks in grouped.items()))
    unused = list(cells)
    n = B.rows
    X = [[Fraction(0)] * n for _ in range(n)]
    for _, ev, off, k in spec.cell_layout():
        match = next(c for c in unused if c[0] == ev and c[2] == k)
        unused.remove(match)
        for i in range(k):
            X[match[1] + i][off + i] = Fraction(1)
    return spec, RatMatrix(X)


def _obstruction(pB, h) -> dict:
    F = antiderivative(pB, 0)
    rem = divrem(F, h)[1]
    roots = rational_roots(h)
    out: dict[str, Any] = {"antiderivative": poly_to_json(F), "remainder": poly_to_json(rem)}
    if roots:
        base = roots[0]
        out["values"] = [{"s": rat_to_json(s), "F": rat_to_json(evaluate(F, s))} for s in roots]
        out["differences"] = [
            {"s": rat_to_json(s), "s0": rat_to_json(base), "value": rat_to_json(evaluate(F, s) - evaluate(F, base))}
            for s in roots[1:]
        ]
    return out


def cmd_analyze(data: Any) -> dict:
    """Characteristic/minimal polynomials, locus and integrability; builds an integral for Jordan input."""
    if isinstance(data, dict) and "jordan" in data:
        spec = jordan_from_json(data["jordan"])
        B, X = jordan_matrix(spec), None
    elif isinstance(data, list) and data and isinstance(data[0], dict):
        spec = jordan_from_json(data)
        B, X = jordan_matrix(spec), None
    else:
        B = matrix_from_json(data["matrix"] if isinstance(data, dict) and "matrix" in data else data)
        if not B.is_square or B.rows < 1:
            raise InputError(f"matrix must be square and nonempty, got shape {B.shape}")
        cells = jordan_cells_of_matrix(B)
        spec, X = _spec_and_permutation(B, cells) if cells is not None else (None, None)
    pB, h = char_poly(B), multiple_locus(B)
    ok = is_integrable(B)
    report: dict[str, Any] = {
        "n": B.rows,
        "char_poly": poly_to_json(pB),
        "min_poly": poly_to_json(min_poly(B)),
        "locus": poly_to_json(h),
        "integrable": ok,
        "integral": None,
        "verification": None,
    }
    if ok and spec is not None:
        A = construct_integral(spec)
        if X is not None:
            A = conjugate_integral(A, X)
        report["integral"] = extension_to_json(A)
        report["verification"] = verify_integral(B, A.matrix())
    if not ok:
        report["obstruction"] = _obstruction(pB, h)
    return report


def cmd_sfull(data: Any) -> dict:
    if not isinstance(data, dict):
        raise InputError("sfull input is an object with 'f' (factored polynomial) and 'S'")
    f = factored_from_json(data.get("f", data))
    S = data.get("S", [])
    if not isinstance(S, list):
        raise InputError("S must be a list")
    F = sfull_integral(f, [rat_from_json(s) for s in S])
    return {"exists": F is not None, "F": None if F is None else poly_to_json(F)}


def cmd_classify(data: Any) -> dict:
    sig = signature_from_json(data)
    return {"signature": signature_to_json(sig), "verdict": classify_signature(sig).value}


def shabat_to_json(w: drawfuns.ShabatWitness) -> dict:
    return {
        "type": "shabat",
        "tree": encode(w.tree),
        "white_vertices": list(w.white_vertices),
        "white_roots": complexes_to_json(w.white_roots),
        "alpha": [int(a) for a in w.alpha],
        "black_vertices": list(w.black_vertices),
        "black_roots": complexes_to_json(w.black_roots),
        "beta": [int(b) for b in w.beta],
        "scale": complex_to_json(w.scale),
        "coeffs": complexes_to_json(w.coeffs()),
        "residual": w.residual,
        "attempts": w.attempts,
    }


def conservative_to_json(w: drawfuns.ConservativeWitness) -> dict:
    crit_s, coeffs_s = w.monic_derivative_form()
    return {
        "type": "conservative",
        "tree": encode(w.tree),
        "white_vertices": list(w.white_vertices),
        "critical_points": complexes_to_json(w.critical_points),
        "gamma": [int(g) for g in w.gamma],
        "scale": w.scale,
        "coeffs": complexes_to_json(w.coeffs),
        "repelling_points": complexes_to_json(w.repelling_points),
        "monic_derivative_form": {
            "critical_points": complexes_to_json(crit_s),
            "coeffs": complexes_to_json(coeffs_s),
        },
        "residual": w.residual,
        "attempts": w.attempts,
    }


def cmd_witness(data: Any, kind: str, tol: float, seed: int, check_tol: float = drawfuns.CHECK_TOL) -> dict:
    sig = signature_from_json(data)
    if kind == "integrable":
        wit = drawfuns.shabat_witness_for_signature(sig, tol, seed, check_tol)
        source = shabat_to_json(wit.source)
    elif kind == "nonintegrable":
        if sig.m < 2:
            raise RegimeError(f"with m = {sig.m} < 2 every polynomial has an S-full integral")
        wit = drawfuns.conservative_witness_for_signature(sig, tol, seed, check_tol)
        source = conservative_to_json(wit.source)
    else:
        raise InputError(f"unknown witness kind {kind!r}")
    return {
        "kind": wit.kind,
        "signature": signature_to_json(sig),
        "verdict": classify_signature(sig).value,
        "tree": source["tree"],
        "f": {
            "roots": complexes_to_json(wit.f.roots),
            "mults": [int(k) for k in wit.f.mults],
            "leading": complex_to_json(wit.f.leading),
        },
        "S": complexes_to_json(wit.S),
        "sfull_check": wit.sfull_check,
        "check_tol": check_tol,
        "residual": source["residual"],
        "source": source,
        "backend": kernels.BACKEND,
    }


def cmd_tree(data: Any, l: int | None = None) -> dict:
    """Tree from ``{"partition": [...], "l": ...}`` or ``{"white": [...], "black": [...]}``."""
    if isinstance(data, list):
        data = {"partition": data}
    if not isinstance(data, dict):
        raise InputError("tree input is a partition list or an object")
    if "white" in data or "black" in data:
        t = bicolored_from_partitions(_int_list(data.get("white")), _int_list(data.get("black")))
    elif "partition" in data:
        gamma = _int_list(data["partition"])
        l = data.get("l", l) if l is None else l
        t = tree_from_partition(gamma) if l is None else bicolored_with_white_prefix(gamma, int(l))
    else:
        raise InputError("tree input needs 'partition' or 'white'/'black'")
    return {"encoding": encode(t), "tree": to_adjacency(t)}


def _int_list(value: Any) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise InputError(f"expected a list of integers, got {value!r}")
    return value


def cmd_solve_tree(text: str, conservative: bool, tol: float, seed: int) -> dict:
    t = _tree_from_text(text)
    if conservative:
        return conservative_to_json(drawfuns.conservative_solve(t, tol, seed))
    return shabat_to_json(drawfuns.shabat_solve(t, tol, seed))


def _tree_from_text(text: str) -> PlaneTree:
    stripped = text.strip()
    if stripped.startswith(("{", "\"")):
        data = _parse_json(stripped)
        stripped = data.get("tree", "") if isinstance(data, dict) else str(data)
    return decode(stripped)


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("INTEGRAX_SEED")
    try:
        default_seed = int(env_seed) if env_seed not in (None, "") else 0
    except ValueError:
        default_seed = 0
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="input file path or inline JSON (default: stdin)")
    common.add_argument("-o", "--output", help="write the JSON result here instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="solver residual tolerance")
    common.add_argument("--seed", type=int, default=default_seed, help="restart seed (env INTEGRAX_SEED)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="integrax", description="Matrix integrals, S-full integrals and tree witnesses.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="integrability of a matrix or Jordan data")
    sub.add_parser("sfull", parents=[common], help="S-full integral of a factored polynomial")
    sub.add_parser("classify", parents=[common], help="verdict for a multiplicity signature")
    w = sub.add_parser("witness", parents=[common], help="numerical witness polynomial for a signature")
    w.add_argument("--kind", choices=["integrable", "nonintegrable"], default="integrable")
    w.add_argument("--check-tol", type=float, default=drawfuns.CHECK_TOL)
    t = sub.add_parser("tree", parents=[common], help="plane tree from valency data")
    t.add_argument("--l", type=int, default=None, help="number of leading parts forced white")
    s = sub.add_parser("solve-tree", parents=[common], help="Shabat or conservative polynomial of a tree")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--shabat", action="store_true", default=True)
    mode.add_argument("--conservative", action="store_true")
    return p


def run(args: argparse.Namespace) -> dict:
    text = _read_source(args.input)
    if args.command == "solve-tree":
        return cmd_solve_tree(text, args.conservative, args.tol, args.seed)
    data = _parse_json(text)
    if args.command == "analyze":
        return cmd_analyze(data)
    if args.command == "sfull":
        return cmd_sfull(data)
    if args.command == "classify":
        return cmd_classify(data)
    if args.command == "witness":
        return cmd_witness(data, args.kind, args.tol, args.seed, args.check_tol)
    return cmd_tree(data, args.l)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        result = run(args)
    except RegimeError as exc:
        return _fail(EXIT_REGIME, "regime", str(exc))
    except InputError as exc:
        return _fail(EXIT_INPUT, "input", str(exc))
    except ConvergenceError as exc:
        return _fail(EXIT_SOLVER, "solver", str(exc), best_residual=exc.best_residual)
    except (KeyError, TypeError, AttributeError) as exc:
        return _fail(EXIT_INPUT, "input", f"malformed input: {exc!r}")
    payload = json.dumps(result, indent=2)
    if args.output:
        Path(args.output).write_text(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")
    return EXIT_OK


def _fail(code: int, kind: str, message: str, **extra) -> int:
    err = {"error": kind, "message": message, "exit_code": code}
    for key, val in extra.items():
        err[key] = val if val is None or val == val and abs(val) != float("inf") else str(val)
    sys.stderr.write(json.dumps(err) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
