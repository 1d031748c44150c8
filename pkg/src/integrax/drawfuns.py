"""Shabat and conservative polynomials of bicolored plane trees, numerically.

Both solvers run damped Newton on a square polynomial system whose start
point comes from an equiangular drawing of the tree, with seeded random
restarts.  Results are accepted by residual alone: the polynomial found may
belong to another tree with the same valency data, which is all the witness
constructions need.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .errors import ConvergenceError, InputError, RegimeError
from .polycore import MultiplicitySignature
from .trees import BLACK, WHITE, PlaneTree, bicolored_from_partitions, bicolored_with_white_prefix, encode

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
CHECK_TOL = 1e-8
MAX_RESTARTS = 32
MAX_ITER = 80
CLUSTER_RADIUS = 1e-6


@dataclass(frozen=True)
class FactoredCPoly:
    """``leading * prod (x - roots[i])**mults[i]`` over the complex numbers."""

    roots: np.ndarray
    mults: np.ndarray
    leading: complex = 1.0

    def coeffs(self) -> np.ndarray:
        return self.leading * kernels.np_poly_from_roots(kernels.as_roots(self.roots), kernels.as_mults(self.mults))

    @property
    def degree(self) -> int:
        return int(np.sum(self.mults))


@dataclass(frozen=True)
class ShabatWitness:
    """``P = c * prod (x - a)**alpha`` with ``P - 1 = c * prod (x - b)**beta``.

    ``white_roots[0] == 0`` and ``black_roots[0] == 1``; ``white_vertices`` and
    ``black_vertices`` map the roots back to tree vertices.
    """

    tree: PlaneTree
    white_vertices: tuple[int, ...]
    white_roots: np.ndarray
    alpha: np.ndarray
    black_vertices: tuple[int, ...]
    black_roots: np.ndarray
    beta: np.ndarray
    scale: complex
    residual: float
    attempts: int = 1

    def coeffs(self) -> np.ndarray:
        return self.scale * kernels.np_poly_from_roots(self.white_roots, self.alpha)

    def position(self, v: int) -> complex:
        if v in self.white_vertices:
            return complex(self.white_roots[self.white_vertices.index(v)])
        return complex(self.black_roots[self.black_vertices.index(v)])

    def critical_values(self) -> np.ndarray:
        """``P`` at the zeros of ``P'``; these cluster at 0 and 1."""
        pts = np.concatenate([self.white_roots[self.alpha > 1], self.black_roots[self.beta > 1]])
        return npoly.polyval(pts, self.coeffs())


@dataclass(frozen=True)
class ConservativeWitness:
    """Normalized conservative ``C`` (monic, ``C(0) = 0``) with ``C' = scale * prod (x - c)**gamma``.

    The tree root sits at 0: as a critical point if it is white, as a
    repelling fixed point otherwise.
    """

    tree: PlaneTree
    white_vertices: tuple[int, ...]
    critical_points: np.ndarray
    gamma: np.ndarray
    scale: float
    coeffs: np.ndarray
    residual: float
    repelling_points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    attempts: int = 1

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def monic_derivative_form(self) -> tuple[np.ndarray, np.ndarray]:
        """Conjugate by ``x -> s*x`` so the derivative becomes monic.

        Returns ``(critical points, coefficients)`` of ``C(s x) / s`` with
        ``s**n = 1/(n+1)``, n the number of edges.
        """
        n = self.degree - 1
        s = (n + 1.0) ** (-1.0 / n)
        powers = s ** np.arange(len(self.coeffs))
        return self.critical_points / s, self.coeffs * powers / s


@dataclass(frozen=True)
class SignatureWitness:
    """Polynomial ``f`` with the requested root multiplicities and the point set ``S``."""

    kind: str
    signature: MultiplicitySignature
    f: FactoredCPoly
    S: np.ndarray
    sfull_check: bool
    source: ShabatWitness | ConservativeWitness


def tree_layout(t: PlaneTree) -> np.ndarray:
    """Unit-edge drawing where each vertex spreads its edges at equal angles in rotation order."""
    pos = np.zeros(t.n_vertices, dtype=np.complex128)
    heading = np.zeros(t.n_vertices)  # direction back towards the parent
    order = [t.root]
    for v in order:
        d = t.valency(v)
        ch = t.children[v]
        for k, w in enumerate(ch):
            if v == t.root:
                theta = 2 * np.pi * k / d
            else:
                theta = heading[v] + 2 * np.pi * (k + 1) / d
            pos[w] = pos[v] + np.exp(1j * theta)
            heading[w] = theta + np.pi
            order.append(w)
    return pos


def _min_separation(points: np.ndarray) -> float:
    if len(points) < 2:
        return np.inf
    diff = np.abs(points[:, None] - points[None, :])
    return float(np.min(diff[np.triu_indices(len(points), 1)]))


def _newton(system, z0: np.ndarray, tol: float, max_iter: int = MAX_ITER):
    """Damped Newton on ``system(z) -> (residual, jacobian)``; returns ``(z, max|residual|)``."""
    z = z0.copy()
    r, J = system(z)
    norm = float(np.max(np.abs(r))) if len(r) else 0.0
    polish = 2
    for _ in range(max_iter):
        if not np.isfinite(norm):
            break
        if norm < tol:
            if polish == 0:
                break
            polish -= 1
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        accepted = False
        while lam >= 1.0 / 1024:
            zn = z + lam * step
            rn, Jn = system(zn)
            nn = float(np.max(np.abs(rn)))
            if np.isfinite(nn) and nn < norm:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
        z, r, J, norm = zn, rn, Jn, nn
    return z, norm


def shabat_solve(t: PlaneTree, tol: float = DEFAULT_TOL, seed: int = 0, max_restarts: int = MAX_RESTARTS) -> ShabatWitness:
    """Shabat polynomial with white vertices over 0 and black vertices over 1.

    Unknowns are every white/black position except the first white (pinned at
    0) and first black (pinned at 1), plus the scale ``c``.
    """
    n = t.n_edges
    if n < 1:
        raise InputError("tree must have at least one edge")
    whites, blacks = t.vertices_of(WHITE), t.vertices_of(BLACK)
    vals = t.valencies()
    alpha = kernels.as_mults([vals[v] for v in whites])
    beta = kernels.as_mults([vals[v] for v in blacks])
    p, q = len(whites), len(blacks)

    layout = tree_layout(t)
    layout = (layout - layout[whites[0]]) / (layout[blacks[0]] - layout[whites[0]])
    base = np.concatenate([layout[whites], layout[blacks]])
    diameter = max(float(np.max(np.abs(base[:, None] - base[None, :]))), 1.0)
    free = np.r_[1:p, p + 1:p + q, p + q]

    def unpack(z):
        full = np.empty(p + q + 1, dtype=np.complex128)
        full[0], full[p] = 0.0, 1.0
        full[free] = z
        return full

    def system(z):
        full = unpack(z)
        res, jac = kernels.shabat_system(full[:p], alpha, full[p:p + q], beta, full[p + q])
        return res, jac[:, free]

    def initial_scale(roots):
        # P(b_1) = 1 at the pinned black vertex
        return 1.0 / np.prod((1.0 - roots[:p]) ** alpha)

    rng = np.random.default_rng(seed)
    best = np.inf
    for attempt in range(max_restarts + 1):
        roots = base.copy()
        if attempt:
            noise = rng.standard_normal(p + q) + 1j * rng.standard_normal(p + q)
            noise[0] = noise[p] = 0
            roots = roots + 0.1 * diameter * noise
        z0 = np.concatenate([roots, [initial_scale(roots)]])[free]
        z, resid = _newton(system, z0, tol)
        best = min(best, resid)
        full = unpack(z)
        if resid < tol and abs(full[p + q]) > 0 and _min_separation(full[:p + q]) > CLUSTER_RADIUS * diameter:
            log.debug("shabat: %s converged on attempt %d (residual %.2e)", encode(t), attempt, resid)
            return ShabatWitness(
                t, tuple(whites), full[:p].copy(), alpha, tuple(blacks), full[p:p + q].copy(), beta,
                complex(full[p + q]), resid, attempt + 1,
            )
    raise ConvergenceError(f"Shabat system for {encode(t)} did not converge (best residual {best:.3e})", best)


def _shift(coeffs: np.ndarray, s: complex) -> np.ndarray:
    """Coefficients of ``p(x + s)``."""
    cs = np.array(coeffs, dtype=np.complex128)
    n = len(cs)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            cs[j] += s * cs[j + 1]
    return cs


def conservative_solve(t: PlaneTree, tol: float = DEFAULT_TOL, seed: int = 0, max_restarts: int = MAX_RESTARTS) -> ConservativeWitness:
    """Normalized conservative polynomial of degree ``n+1`` for a tree with n edges.

    Critical points correspond to white vertices with multiplicities equal to
    their valencies.  A white vertex is pinned at 0 while solving; when the
    root is black, the result is conjugated by a translation so the repelling
    fixed point closest to the root's drawn position lands on 0.
    """
    n = t.n_edges
    if n < 1:
        raise InputError("tree must have at least one edge")
    whites = t.vertices_of(WHITE)
    vals = t.valencies()
    gamma = kernels.as_mults([vals[v] for v in whites])
    l = len(whites)
    scale = float(n + 1)
    pinned = whites.index(t.root) if t.colors[t.root] == WHITE else 0

    layout = tree_layout(t)
    layout = layout - layout[whites[pinned]]
    base = layout[whites]
    diameter = max(float(np.max(np.abs(layout[:, None] - layout[None, :]))), 1.0)
    free = np.array([i for i in range(l) if i != pinned], dtype=np.int64)

    def unpack(z):
        full = np.zeros(l, dtype=np.complex128)
        full[free] = z
        return full

    def system(z):
        # Two critical points merging solve the raw system spuriously (the
        # equations coincide), so equation j is divided by its distance to the
        # pinned point and to every earlier free point.
        res, jac = kernels.conservative_system(unpack(z), gamma, scale)
        res, jac = res[free], jac[np.ix_(free, free)]
        k = len(z)
        out_r = np.empty(k, dtype=np.complex128)
        out_j = np.empty((k, k), dtype=np.complex128)
        for j in range(k):
            diffs = z[j] - np.r_[0.0, z[:j]]
            q = np.prod(diffs)
            out_r[j] = res[j] / q
            dlog = np.zeros(k, dtype=np.complex128)
            dlog[j] = np.sum(1.0 / diffs)
            dlog[:j] = -1.0 / diffs[1:]
            out_j[j] = jac[j] / q - out_r[j] * dlog
        return out_r, out_j

    rng = np.random.default_rng(seed)
    best = np.inf
    for attempt in range(max_restarts + 1):
        start = base.copy()
        if attempt:
            start = start + 0.1 * diameter * (rng.standard_normal(l) + 1j * rng.standard_normal(l))
        if len(free):
            z, resid = _newton(system, start[free], tol)
        else:
            z, resid = start[free], 0.0
        best = min(best, resid)
        crit = unpack(z)
        if not (resid < tol and _min_separation(crit) > CLUSTER_RADIUS * diameter):
            continue
        C = npoly.polyint(scale * kernels.np_poly_from_roots(crit, gamma))
        fixed = npoly.polyroots(C - np.r_[0, 1, np.zeros(len(C) - 2)])
        near_crit = np.min(np.abs(fixed[:, None] - crit[None, :]), axis=1) < CLUSTER_RADIUS * diameter * 10
        repelling = fixed[~near_crit]
        if len(repelling) != n + 1 - l:
            continue
        if t.colors[t.root] == BLACK:
            shift = repelling[np.argmin(np.abs(repelling - layout[t.root]))]
            C = _shift(C, shift)
            C[0] -= shift
            C[0] = 0.0
            crit = crit - shift
            repelling = repelling - shift
        vals_at = npoly.polyval(crit, C) - crit
        deriv_err = np.max(np.abs(npoly.polyder(C) - scale * kernels.np_poly_from_roots(crit, gamma)))
        residual = float(max(np.max(np.abs(vals_at)), deriv_err))
        log.debug("conservative: %s converged on attempt %d (residual %.2e)", encode(t), attempt, residual)
        return ConservativeWitness(t, tuple(whites), crit, gamma, scale, C, residual, repelling, attempt + 1)
    raise ConvergenceError(f"conservative system for {encode(t)} did not converge (best residual {best:.3e})", best)


def check_sfull_numeric(f: FactoredCPoly, S: Sequence[complex], tol: float = CHECK_TOL) -> bool:
    """Numerical S-full integrability test.

    Integrates ``f`` with the constant chosen so ``F(S[0]) = 0`` and accepts
    when ``max |F(s)|`` over ``S`` is below ``tol`` times the largest
    coefficient of ``F``.
    """
    S = np.asarray(S, dtype=np.complex128)
    if len(S) == 0:
        return True
    roots = np.asarray(f.roots, dtype=np.complex128)
    mults = np.asarray(f.mults)
    multiple = roots[mults >= 2]
    for s in S:
        if len(multiple) == 0 or np.min(np.abs(multiple - s)) > CLUSTER_RADIUS * max(1.0, abs(s)):
            raise InputError(f"{s} is not a multiple root of f")
    F = npoly.polyint(f.coeffs())
    F[0] -= npoly.polyval(S[0], F)
    scale = float(np.max(np.abs(F)))
    return bool(np.max(np.abs(npoly.polyval(S, F))) < tol * scale)


def chebyshev_reference(n: int) -> np.ndarray:
    """``(T_n + 1) / 2``: Chebyshev polynomial moved to critical values {0, 1}."""
    if n < 1:
        raise InputError("Chebyshev degree must be >= 1")
    prev, cur = np.array([1.0]), np.array([0.0, 1.0])
    for _ in range(n - 1):
        nxt = np.zeros(len(cur) + 1)
        nxt[1:] = 2 * cur
        nxt[:len(prev)] -= prev
        prev, cur = cur, nxt
    out = cur.astype(np.complex128) / 2
    out[0] += 0.5
    return out


def assign_root_clusters(coeffs: np.ndarray, designated: np.ndarray, mults: np.ndarray, radius: float = CLUSTER_RADIUS) -> None:
    """Check that the roots of ``coeffs`` cluster on ``designated`` with the given multiplicities.

    Each numerical root is assigned to the nearest designated point; a
    cluster must have the right size and a centroid within ``radius``.
    Raises :class:`ConvergenceError` otherwise.
    """
    found = npoly.polyroots(coeffs)
    if len(found) != int(np.sum(mults)):
        raise ConvergenceError(f"expected {int(np.sum(mults))} roots, found {len(found)}")
    nearest = np.argmin(np.abs(found[:, None] - designated[None, :]), axis=1)
    for i, (pt, m) in enumerate(zip(designated, mults)):
        members = found[nearest == i]
        if len(members) != m:
            raise ConvergenceError(f"root cluster near {pt:.6g} has {len(members)} members, expected {m}")
        gap = abs(np.mean(members) - pt)
        if gap > radius * max(1.0, abs(pt)):
            raise ConvergenceError(f"root cluster near {pt:.6g} is off by {gap:.2e}")


def shabat_partition(sig: MultiplicitySignature) -> list[int]:
    """Valencies ``(alpha+1, ..., beta+1, ..., 1, ..., 1)`` of a tree with n+1 edges."""
    n, m, k = sig.n, sig.m, sig.k
    return [a + 1 for a in sig.alphas] + [b + 1 for b in sig.betas] + [1] * (n - m - k + 2)


def shabat_witness_for_signature(
    sig: MultiplicitySignature, tol: float = DEFAULT_TOL, seed: int = 0, check_tol: float = CHECK_TOL
) -> SignatureWitness:
    """Polynomial with the signature's multiplicities that *has* an S-full integral.

    ``S`` is the set of alpha-roots.  Requires ``2 <= m <= n - M + 1``.
    """
    n, M, m = sig.n, sig.M, sig.m
    if not 2 <= m <= n - M + 1:
        raise RegimeError(f"integrable witness needs 2 <= m <= n - M + 1; got m={m}, n={n}, M={M}")
    gamma = shabat_partition(sig)
    tree = bicolored_with_white_prefix(gamma, m)
    w = shabat_solve(tree, tol, seed)
    exps = np.array([g - 1 for g in gamma])
    carriers = [v for v in range(len(gamma)) if exps[v] >= 1]
    roots = np.array([w.position(v) for v in carriers], dtype=np.complex128)
    mults = kernels.as_mults(exps[carriers])
    assign_root_clusters(npoly.polyder(w.coeffs()), roots, mults)
    f = FactoredCPoly(roots, mults, 1.0)
    S = roots[:m]
    ok = check_sfull_numeric(f, S, check_tol)
    if not ok:
        raise ConvergenceError("Shabat witness failed the S-full check", w.residual)
    return SignatureWitness("integrable", sig, f, S, ok, w)


def conservative_witness_for_signature(
    sig: MultiplicitySignature, tol: float = DEFAULT_TOL, seed: int = 0, check_tol: float = CHECK_TOL
) -> SignatureWitness:
    """Polynomial with the signature's multiplicities whose integral separates the alpha-roots.

    ``f = C'/(n+1)`` for a conservative ``C``, so any antiderivative equals
    ``c_i/(n+1) + const`` at the critical points; with ``m >= 2`` no S-full
    integral exists.
    """
    n, m = sig.n, sig.m
    gamma = list(sig.alphas) + list(sig.betas)
    l = len(gamma)
    if l < 1:
        raise RegimeError("signature has no roots")
    tree = bicolored_from_partitions(gamma, [l] + [1] * (n - l))
    w = conservative_solve(tree, tol, seed)
    f = FactoredCPoly(w.critical_points.copy(), kernels.as_mults(gamma), 1.0)
    S = f.roots[:m]
    ok = check_sfull_numeric(f, S, check_tol)
    if m >= 2 and ok:
        raise ConvergenceError("conservative witness unexpectedly passed the S-full check", w.residual)
    return SignatureWitness("nonintegrable", sig, f, S, ok, w)
