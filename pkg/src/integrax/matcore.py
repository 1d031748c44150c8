"""Exact matrices, characteristic data and matrix integrals.

A matrix ``A`` of size n+1 is an *integral* of ``B`` (size n) when ``B`` is
its top-left block and ``char_poly(A)' == (n+1) * char_poly(B)``.  This module
decides integrability for any rational matrix and builds explicit integrals
for matrices given by rational Jordan data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import InputError
from .polycore import (
    RatPoly,
    antiderivative,
    as_rat,
    constant_on_roots,
    divrem,
    evaluate,
    derivative,
    expand,
    FactoredPoly,
    poly_gcd,
    squarefree_part,
    taylor_shift,
)


class RatMatrix:
    """Dense immutable matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, data: Sequence[Sequence]):
        rows = [tuple(as_rat(x) for x in row) for row in data]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise InputError("ragged matrix rows")
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        self.entries: tuple[tuple[Fraction, ...], ...] = tuple(rows)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, values: Iterable) -> "RatMatrix":
        vals = list(values)
        n = len(vals)
        return cls([[vals[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch in matrix addition")
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch in matrix subtraction")
        return RatMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __mul__(self, scalar) -> "RatMatrix":
        scalar = as_rat(scalar)
        return RatMatrix([[a * scalar for a in r] for r in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return RatMatrix([[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.entries])

    def apply(self, vec: Sequence) -> list[Fraction]:
        return [sum((a * as_rat(x) for a, x in zip(r, vec)), Fraction(0)) for r in self.entries]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(list(zip(*self.entries)) if self.rows else [])

    def trace(self) -> Fraction:
        return sum((self.entries[i][i] for i in range(min(self.shape))), Fraction(0))

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "RatMatrix":
        return RatMatrix([row[c0:c1] for row in self.entries[r0:r1]])

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"RatMatrix[{body}]"


def _require_square(B: RatMatrix) -> int:
    if not B.is_square():
        raise InputError(f"expected a square matrix, got shape {B.shape}")
    return B.rows


def det(M: RatMatrix) -> Fraction:
    """Determinant by fraction Gaussian elimination."""
    n = _require_square(M)
    a = M.tolist()
    sign, out = 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        out *= p
        for r in range(c + 1, n):
            f = a[r][c] / p
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return sign * out


def rank(M: RatMatrix) -> int:
    a = M.tolist()
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            f = a[i][c] / a[r][c]
            if f:
                for k in range(c, cols):
                    a[i][k] -= f * a[r][k]
        r += 1
        if r == rows:
            break
    return r


def inverse(M: RatMatrix) -> RatMatrix:
    n = _require_square(M)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.entries)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise InputError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return RatMatrix([row[n:] for row in a])


def char_poly(B: RatMatrix) -> RatPoly:
    """``det(xI - B)`` by the Faddeev-LeVerrier recursion.

    The matrix is first scaled to integers, which keeps every intermediate
    exact with only integer divisions by 1..n.
    """
    n = _require_square(B)
    d = 1
    for row in B.entries:
        for x in row:
            d = lcm(d, x.denominator)
    A = [[int(x * d) for x in row] for row in B.entries]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    Mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        prod = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        Mk = prod
        tr = sum(sum(A[i][t] * Mk[t][i] for t in range(n)) for i in range(n))
        coeffs[n - k] = -tr // k
    # det(xI - dA) = d^n det((x/d) I - A): undo the scaling
    return RatPoly(Fraction(c, d ** (n - i)) for i, c in enumerate(coeffs))


def _krylov_annihilator(B: RatMatrix, v: list[Fraction]) -> RatPoly:
    """Monic minimal polynomial of ``v`` under ``B``."""
    basis: list[tuple[int, list[Fraction], RatPoly]] = []  # pivot, reduced vector, poly
    power = list(v)
    j = 0
    while True:
        w = list(power)
        combo = RatPoly.linear_power(0, j)
        for piv, vec, poly in basis:
            f = w[piv]
            if f:
                w = [a - f * b for a, b in zip(w, vec)]
                combo = combo - poly * f
        piv = next((i for i, a in enumerate(w) if a != 0), None)
        if piv is None:
            return combo
        scale = w[piv]
        basis.append((piv, [a / scale for a in w], combo * (1 / scale)))
        power = B.apply(power)
        j += 1


def min_poly(B: RatMatrix) -> RatPoly:
    """Least common multiple of the Krylov annihilators of the basis vectors."""
    n = _require_square(B)
    result = RatPoly((1,))
    for i in range(n):
        e = [Fraction(int(i == j)) for j in range(n)]
        ann = _krylov_annihilator(B, e)
        g = poly_gcd(result, ann)
        result = (result * divrem(ann, g)[0]).monic()
    return result


def multiple_locus(B: RatMatrix) -> RatPoly:
    """Monic squarefree ``h`` whose roots are the eigenvalues with several Jordan cells."""
    _require_square(B)
    q, r = divrem(char_poly(B), min_poly(B))
    assert r.is_zero()
    if q.degree == 0:
        return RatPoly((1,))
    return squarefree_part(q)


def is_integrable(B: RatMatrix) -> bool:
    n = _require_square(B)
    if n < 1:
        raise InputError("integrability needs n >= 1")
    return constant_on_roots(antiderivative(char_poly(B), 0), multiple_locus(B))


@dataclass(frozen=True)
class JordanSpec:
    """Rational Jordan data: ``(eigenvalue, cell sizes)`` per distinct eigenvalue.

    Cell sizes are kept sorted non-increasingly; block order is preserved.
    """

    blocks: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def __post_init__(self):
        norm = []
        seen = set()
        for ev, cells in self.blocks:
            ev = as_rat(ev)
            if ev in seen:
                raise InputError(f"duplicate eigenvalue {ev} in Jordan data")
            seen.add(ev)
            cells = tuple(sorted((int(c) for c in cells), reverse=True))
            if not cells or any(c < 1 for c in cells):
                raise InputError(f"cell sizes for {ev} must be a nonempty list of positive integers")
            norm.append((ev, cells))
        object.__setattr__(self, "blocks", tuple(norm))

    @classmethod
    def of(cls, *blocks) -> "JordanSpec":
        return cls(tuple(blocks))

    @property
    def n(self) -> int:
        return sum(sum(cells) for _, cells in self.blocks)

    @property
    def eigenvalues(self) -> tuple[Fraction, ...]:
        return tuple(ev for ev, _ in self.blocks)

    def algebraic_multiplicity(self, ev) -> int:
        ev = as_rat(ev)
        return next((sum(c) for e, c in self.blocks if e == ev), 0)

    def locus(self) -> frozenset[Fraction]:
        """Eigenvalues carrying more than one cell."""
        return frozenset(ev for ev, cells in self.blocks if len(cells) > 1)

    def char_poly_factored(self) -> FactoredPoly:
        return FactoredPoly(tuple((ev, sum(cells)) for ev, cells in self.blocks))

    def cell_layout(self) -> list[tuple[int, Fraction, int, int]]:
        """``(block index, eigenvalue, offset, size)`` of every cell in matrix order."""
        out, off = [], 0
        for bi, (ev, cells) in enumerate(self.blocks):
            for k in cells:
                out.append((bi, ev, off, k))
                off += k
        return out


def jordan_matrix(spec: JordanSpec) -> RatMatrix:
    n = spec.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for _, ev, off, k in spec.cell_layout():
        for i in range(k):
            rows[off + i][off + i] = ev
            if i + 1 < k:
                rows[off + i][off + i + 1] = Fraction(1)
    return RatMatrix(rows)


@dataclass(frozen=True)
class IntegralExtension:
    """Bordered matrix ``[[B, u^T], [v, b]]``; not necessarily an integral of ``B``."""

    B: RatMatrix
    u: tuple[Fraction, ...]
    v: tuple[Fraction, ...]
    b: Fraction

    def __post_init__(self):
        n = _require_square(self.B)
        u = tuple(as_rat(x) for x in self.u)
        v = tuple(as_rat(x) for x in self.v)
        if len(u) != n or len(v) != n:
            raise InputError(f"border vectors must have length {n}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "b", as_rat(self.b))

    @property
    def n(self) -> int:
        return self.B.rows

    def matrix(self) -> RatMatrix:
        rows = [list(r) + [self.u[i]] for i, r in enumerate(self.B.entries)]
        rows.append(list(self.v) + [self.b])
        return RatMatrix(rows)

    @classmethod
    def from_matrix(cls, A: RatMatrix) -> "IntegralExtension":
        m = _require_square(A)
        if m < 2:
            raise InputError("an integral extension has size at least 2")
        n = m - 1
        return cls(
            A.block(0, n, 0, n),
            tuple(A[i, n] for i in range(n)),
            tuple(A[n, j] for j in range(n)),
            A[n, n],
        )


def _slices(spec: JordanSpec, vec: Sequence[Fraction]):
    for bi, ev, off, k in spec.cell_layout():
        yield bi, ev, off, k, list(vec[off:off + k])


def _toeplitz_apply_row(v: Sequence[Fraction], h: RatPoly, k: int) -> list[Fraction]:
    """``v . h(J_k)`` for a row vector ``v``."""
    hc = list(h.coeffs) + [Fraction(0)] * k
    return [sum((v[i] * hc[j - i] for i in range(j + 1)), Fraction(0)) for j in range(k)]


def _toeplitz_apply_col(h: RatPoly, u: Sequence[Fraction], k: int) -> list[Fraction]:
    """``h(J_k) . u`` for a column vector ``u``."""
    hc = list(h.coeffs) + [Fraction(0)] * k
    return [sum((hc[j - i] * u[j] for j in range(i, k)), Fraction(0)) for i in range(k)]


def _series_inverse(h: RatPoly, k: int) -> RatPoly:
    """``1/h mod x^k``; needs ``h(0) != 0``."""
    hc = list(h.coeffs) + [Fraction(0)] * k
    g = [Fraction(0)] * k
    g[0] = 1 / hc[0]
    for j in range(1, k):
        g[j] = -sum((hc[i] * g[j - i] for i in range(1, j + 1)), Fraction(0)) / hc[0]
    return RatPoly(g)


def solve_tail_annihilator(v: Sequence) -> RatPoly:
    """Polynomial ``h`` with ``v . h(J_k)`` the unit vector at ``v``'s first nonzero slot.

    Forward substitution on the triangular system; ``deg h <= k - r - 1`` where
    ``r`` is the index of that slot.
    """
    v = [as_rat(x) for x in v]
    k = len(v)
    r = next((i for i, x in enumerate(v) if x != 0), None)
    if r is None:
        raise InputError("zero vector has no normalising polynomial")
    c = [Fraction(0)] * (k - r)
    c[0] = 1 / v[r]
    for j in range(1, k - r):
        c[j] = -sum((v[r + i] * c[j - i] for i in range(1, j + 1)), Fraction(0)) / v[r]
    return RatPoly(c)


def _check_against_spec(A: IntegralExtension, spec: JordanSpec) -> None:
    if A.n != spec.n:
        raise InputError(f"extension has size {A.n}, Jordan data has size {spec.n}")
    if A.B != jordan_matrix(spec):
        raise InputError("extension's B is not the Jordan matrix of the given data")


def normalize_extension(A: IntegralExtension, spec: JordanSpec) -> IntegralExtension:
    """Conjugate by a block-Toeplitz matrix commuting with B so each v-slice is a unit vector or zero."""
    _check_against_spec(A, spec)
    u, v = list(A.u), list(A.v)
    for _, _, off, k, vs in _slices(spec, A.v):
        if all(x == 0 for x in vs):
            continue
        h = solve_tail_annihilator(vs)
        v[off:off + k] = _toeplitz_apply_row(vs, h, k)
        u[off:off + k] = _toeplitz_apply_col(_series_inverse(h, k), A.u[off:off + k], k)
    return IntegralExtension(A.B, tuple(u), tuple(v), A.b)


def _slice_offset(vs: Sequence[Fraction]) -> int:
    """Offset ``r`` of a normalized slice: index of its single 1, or its length if zero."""
    nz = [i for i, x in enumerate(vs) if x != 0]
    if not nz:
        return len(vs)
    if len(nz) != 1 or vs[nz[0]] != 1:
        raise InputError(f"v-slice {[str(x) for x in vs]} is not normalized")
    return nz[0]


def is_normalized(spec: JordanSpec, v: Sequence) -> bool:
    try:
        for *_, vs in _slices(spec, [as_rat(x) for x in v]):
            _slice_offset(vs)
    except InputError:
        return False
    return True


def extension_char_poly(spec: JordanSpec, u: Sequence, v: Sequence, b) -> RatPoly:
    """Closed-form characteristic polynomial of a normalized extension of ``jordan_matrix(spec)``."""
    u = [as_rat(x) for x in u]
    v = [as_rat(x) for x in v]
    if len(u) != spec.n or len(v) != spec.n:
        raise InputError(f"border vectors must have length {spec.n}")
    pB = expand(spec.char_poly_factored())
    out = RatPoly((-as_rat(b), 1)) * pB
    for bi, ev, off, k, vs in _slices(spec, v):
        r = _slice_offset(vs)
        alpha = spec.algebraic_multiplicity(ev)
        rest = divrem(pB, RatPoly.linear_power(ev, alpha))[0]
        for t in range(1, k - r + 1):
            coef = u[off + t + r - 1]
            if coef:
                out = out - rest * RatPoly.linear_power(ev, alpha - t) * coef
    return out


def solve_taylor_match(f: RatPoly, F: RatPoly, t, count: int) -> RatPoly:
    """``h`` of degree < ``count`` with ``(f*h)^(i)(t) == F^(i)(t)`` for ``i < count``.

    Works on Taylor coefficients about ``t``, where the system is lower
    triangular with diagonal ``f(t)``.
    """
    t = as_rat(t)
    if count < 1:
        raise InputError("count must be >= 1")
    fs = list(taylor_shift(f, t).coeffs) + [Fraction(0)] * count
    Fs = list(taylor_shift(F, t).coeffs) + [Fraction(0)] * count
    if fs[0] == 0:
        raise InputError(f"f vanishes at t = {t}")
    w = [Fraction(0)] * count
    for j in range(count):
        w[j] = (Fs[j] - sum((fs[j - i] * w[i] for i in range(j)), Fraction(0))) / fs[0]
    return taylor_shift(RatPoly(w), -t)


def construct_integral(spec: JordanSpec) -> IntegralExtension | None:
    """Explicit integral of ``jordan_matrix(spec)``, or ``None`` if it is not integrable."""
    n = spec.n
    if n < 1:
        raise InputError("empty Jordan data")
    B = jordan_matrix(spec)
    pB = expand(spec.char_poly_factored())
    S = sorted(spec.locus())
    F = antiderivative(pB * (n + 1), 0)
    if S:
        F = F - evaluate(F, S[0])
        if any(evaluate(F, s) != 0 for s in S[1:]):
            return None
    u = [Fraction(0)] * n
    v = [Fraction(0)] * n
    for ev, cells in spec.blocks:
        if len(cells) > 1:
            continue
        alpha = cells[0]
        off = next(o for _, e, o, _k in spec.cell_layout() if e == ev)
        f = divrem(pB, RatPoly.linear_power(ev, alpha))[0]
        h0 = solve_taylor_match(f, F, ev, alpha)
        w = list(taylor_shift(h0, ev).coeffs) + [Fraction(0)] * alpha
        v[off] = Fraction(1)
        # p_A is congruent to -f*h modulo (x - ev)^alpha, hence the sign
        for t in range(1, alpha + 1):
            u[off + t - 1] = -w[alpha - t]
        # with a zero column slice the row slice never enters p_A; drop it
        if not any(u[off:off + alpha]):
            v[off] = Fraction(0)
    return IntegralExtension(B, tuple(u), tuple(v), B.trace() / n)


def verify_integral(B: RatMatrix, A: RatMatrix) -> bool:
    n = _require_square(B)
    if A.shape != (n + 1, n + 1):
        raise InputError(f"integral of an {n}x{n} matrix must be {n + 1}x{n + 1}, got {A.shape}")
    if A.block(0, n, 0, n) != B:
        raise InputError("top-left block of A differs from B")
    return derivative(char_poly(A)) == char_poly(B) * (n + 1)


def conjugate_integral(A: IntegralExtension, X: RatMatrix) -> IntegralExtension:
    """``diag(X, 1) A diag(X^-1, 1)``; an integral of B becomes one of ``X B X^-1``."""
    if X.shape != A.B.shape:
        raise InputError("conjugating matrix has the wrong size")
    Xi = inverse(X)
    return IntegralExtension(
        X @ A.B @ Xi,
        tuple(X.apply(A.u)),
        tuple(Xi.transpose().apply(A.v)),
        A.b,
    )


def transport_integral(spec_diag: JordanSpec, A: IntegralExtension, spec_target: JordanSpec) -> IntegralExtension:
    """Move the border of a diagonalizable integral onto another matrix with the same spectrum.

    Blocks of ``spec_target`` are reordered to follow ``spec_diag`` so the
    nonzero border coordinates sit on the same (simple) eigenvalues.
    """
    if any(c != 1 for _, cells in spec_diag.blocks for c in cells):
        raise InputError("source Jordan data must be diagonal (all cells of size 1)")
    _check_against_spec(A, spec_diag)
    if spec_diag.char_poly_factored().roots != tuple(
        (ev, spec_target.algebraic_multiplicity(ev)) for ev in spec_diag.eigenvalues
    ) or spec_diag.n != spec_target.n:
        raise InputError("source and target have different characteristic polynomials")
    if not is_normalized(spec_diag, A.v):
        raise InputError("source extension is not normalized")
    for _, ev, off, k, _vs in _slices(spec_diag, A.v):
        if spec_diag.algebraic_multiplicity(ev) > 1 and (A.u[off] != 0 or A.v[off] != 0):
            raise InputError(f"border must vanish on the multiple eigenvalue {ev}")
    if not verify_integral(A.B, A.matrix()):
        raise InputError("source extension is not an integral of its matrix")
    order = {ev: i for i, ev in enumerate(spec_diag.eigenvalues)}
    target = JordanSpec(tuple(sorted(spec_target.blocks, key=lambda blk: order[blk[0]])))
    return IntegralExtension(jordan_matrix(target), A.u, A.v, A.b)
