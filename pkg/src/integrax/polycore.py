"""Exact univariate polynomials over the rationals and S-full integrals.

Coefficients are :class:`fractions.Fraction` values stored densely, constant
term first.  Everything here is exact; nothing touches floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as igcd
from math import isqrt
from typing import Iterable

from .errors import InputError

Rat = Fraction


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and strings such as ``"-8/3"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise InputError(f"refusing inexact float {value!r}; pass a string or Fraction")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {value!r}") from exc


class RatPoly:
    """Dense polynomial with rational coefficients, immutable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "RatPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls((c,))

    @classmethod
    def linear_power(cls, root, k: int) -> "RatPoly":
        """``(x - root)**k``."""
        return cls((-as_rat(root), 1)) ** k

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def monic(self) -> "RatPoly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        return RatPoly(c / lc for c in self.coeffs)

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RatPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> "RatPoly":
        return RatPoly(-c for c in self.coeffs)

    def __add__(self, other) -> "RatPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RatPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "RatPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "RatPoly":
        if isinstance(other, (int, Fraction)):
            return RatPoly(c * other for c in self.coeffs)
        if not isinstance(other, RatPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RatPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RatPoly":
        if k < 0:
            raise ValueError("negative power")
        result, base = RatPoly((1,)), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other) -> tuple["RatPoly", "RatPoly"]:
        return divrem(self, _coerce(other))

    def __floordiv__(self, other) -> "RatPoly":
        return divrem(self, _coerce(other))[0]

    def __mod__(self, other) -> "RatPoly":
        return divrem(self, _coerce(other))[1]

    def __repr__(self) -> str:
        return f"RatPoly([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _coerce(value) -> RatPoly | None:
    if isinstance(value, RatPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return RatPoly((value,))
    return None


def derivative(p: RatPoly) -> RatPoly:
    return RatPoly(i * c for i, c in enumerate(p.coeffs) if i)


def antiderivative(p: RatPoly, c0=0) -> RatPoly:
    """Antiderivative ``P`` with ``P' = p`` and ``P(0) = c0``."""
    return RatPoly([as_rat(c0)] + [c / (i + 1) for i, c in enumerate(p.coeffs)])


def evaluate(p: RatPoly, x) -> Fraction:
    x = as_rat(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def divrem(p: RatPoly, q: RatPoly) -> tuple[RatPoly, RatPoly]:
    if q is None or q.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p.coeffs)
    dq = q.degree
    if len(rem) - 1 < dq:
        return RatPoly(), p
    lead = q.coeffs[-1]
    quot = [Fraction(0)] * (len(rem) - dq)
    for k in range(len(rem) - 1 - dq, -1, -1):
        c = rem[k + dq] / lead
        quot[k] = c
        if c:
            for j, qc in enumerate(q.coeffs):
                rem[k + j] -= c * qc
    return RatPoly(quot), RatPoly(rem[:dq])


def poly_gcd(p: RatPoly, q: RatPoly) -> RatPoly:
    """Monic gcd via the monic Euclidean remainder sequence."""
    if p.is_zero() and q.is_zero():
        raise InputError("gcd(0, 0) is undefined")
    a, b = p.monic(), q.monic()
    while not b.is_zero():
        a, b = b, divrem(a, b)[1].monic()
    return a


gcd = poly_gcd


def squarefree_part(p: RatPoly) -> RatPoly:
    if p.is_zero():
        raise InputError("squarefree part of the zero polynomial")
    g = poly_gcd(p, derivative(p))
    return divrem(p, g)[0].monic()


def is_squarefree(p: RatPoly) -> bool:
    return poly_gcd(p, derivative(p)).degree == 0


def taylor_shift(p: RatPoly, t) -> RatPoly:
    """Coefficients of ``p(x + t)``, i.e. the Taylor expansion of ``p`` about ``t``."""
    t = as_rat(t)
    cs = list(p.coeffs)
    n = len(cs)
    # repeated synthetic division
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            cs[j] += t * cs[j + 1]
    return RatPoly(cs)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def rational_roots(p: RatPoly) -> list[Fraction]:
    """Distinct rational roots of ``p`` in increasing order (rational root test)."""
    if p.is_zero():
        raise InputError("the zero polynomial has every number as a root")
    roots = []
    cs = list(p.coeffs)
    if cs[0] == 0:
        roots.append(Fraction(0))
        while cs and cs[0] == 0:
            cs.pop(0)
    den = 1
    for c in cs:
        den = den * c.denominator // igcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    q = RatPoly(ints)
    if q.degree >= 1:
        for num in _divisors(ints[0]):
            for dd in _divisors(ints[-1]):
                for cand in (Fraction(num, dd), Fraction(-num, dd)):
                    if cand not in roots and evaluate(q, cand) == 0:
                        roots.append(cand)
    return sorted(roots)


@dataclass(frozen=True)
class FactoredPoly:
    """``leading * prod (x - root)**mult`` with pairwise distinct rational roots."""

    roots: tuple[tuple[Fraction, int], ...]
    leading: Fraction = Fraction(1)

    def __post_init__(self):
        norm = tuple((as_rat(r), int(k)) for r, k in self.roots)
        seen = set()
        for r, k in norm:
            if k < 1:
                raise InputError(f"multiplicity of root {r} must be >= 1, got {k}")
            if r in seen:
                raise InputError(f"duplicate root {r}")
            seen.add(r)
        lead = as_rat(self.leading)
        if lead == 0:
            raise InputError("leading coefficient must be nonzero")
        object.__setattr__(self, "roots", norm)
        object.__setattr__(self, "leading", lead)

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.roots)

    def multiplicity(self, root) -> int:
        root = as_rat(root)
        for r, k in self.roots:
            if r == root:
                return k
        return 0

    def multiple_roots(self) -> frozenset[Fraction]:
        """The set of zeros of multiplicity at least two."""
        return frozenset(r for r, k in self.roots if k >= 2)


def expand(f: FactoredPoly) -> RatPoly:
    out = RatPoly((f.leading,))
    for r, k in f.roots:
        out = out * RatPoly.linear_power(r, k)
    return out


def sfull_integral(f: FactoredPoly, S: Iterable = ()) -> RatPoly | None:
    """Return the S-full integral of ``f`` if one exists, else ``None``.

    The free constant is fixed by ``F(min S) = 0`` (``F(0) = 0`` when ``S`` is
    empty); every other element of ``S`` must then be a zero of ``F`` too.
    """
    S = sorted({as_rat(s) for s in S})
    bad = [s for s in S if f.multiplicity(s) < 2]
    if bad:
        raise InputError(
            f"S must consist of roots of multiplicity >= 2; offending: {[str(s) for s in bad]}"
        )
    P = antiderivative(expand(f), 0)
    if not S:
        return P
    F = P - evaluate(P, S[0])
    if all(evaluate(F, s) == 0 for s in S[1:]):
        return F
    return None


def constant_on_roots(F: RatPoly, h: RatPoly) -> bool:
    """Whether ``F`` takes one value on every complex root of squarefree ``h``.

    For squarefree ``h`` this is equivalent to ``F mod h`` being constant, so no
    root extraction is needed.
    """
    if h.is_zero():
        raise InputError("locus polynomial must be nonzero")
    if h.degree <= 1:
        return True
    if not is_squarefree(h):
        raise InputError("locus polynomial must be squarefree")
    return divrem(F, h)[1].degree <= 0


class Verdict(str, enum.Enum):
    ALL_INTEGRABLE = "AllIntegrable"
    MIXED = "Mixed"
    NONE_INTEGRABLE = "NoneIntegrable"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MultiplicitySignature:
    """Root multiplicities: ``alphas`` for the multiple zeros in S, ``betas`` for the rest."""

    alphas: tuple[int, ...] = ()
    betas: tuple[int, ...] = ()

    def __post_init__(self):
        alphas = tuple(int(a) for a in self.alphas)
        betas = tuple(int(b) for b in self.betas)
        if any(a < 2 for a in alphas):
            raise InputError(f"every alpha must be >= 2, got {alphas}")
        if any(b < 1 for b in betas):
            raise InputError(f"every beta must be >= 1, got {betas}")
        if sum(alphas) + sum(betas) < 1:
            raise InputError("signature must have total degree n >= 1")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @property
    def n(self) -> int:
        return sum(self.alphas) + sum(self.betas)

    @property
    def M(self) -> int:
        return sum(self.alphas)

    @property
    def m(self) -> int:
        return len(self.alphas)

    @property
    def k(self) -> int:
        return len(self.betas)


def classify_signature(sig: MultiplicitySignature) -> Verdict:
    if sig.m <= 1:
        return Verdict.ALL_INTEGRABLE
    if sig.m <= sig.n - sig.M + 1:
        return Verdict.MIXED
    return Verdict.NONE_INTEGRABLE


def affine_transport(f: FactoredPoly, S: Iterable, a, b) -> tuple[FactoredPoly, frozenset[Fraction]]:
    """Pull ``f`` and ``S`` back along ``mu(x) = a*x + b``.

    Returns ``f o mu`` in factored form together with ``mu^-1(S)``; ``f`` has an
    S-full integral iff the transported pair does.
    """
    a, b = as_rat(a), as_rat(b)
    if a == 0:
        raise InputError("affine map must be non-constant (a != 0)")
    roots = tuple(((r - b) / a, k) for r, k in f.roots)
    leading = f.leading * a ** f.degree
    return FactoredPoly(roots, leading), frozenset((as_rat(s) - b) / a for s in S)
