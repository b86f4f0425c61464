"""Exact Bernoulli numbers, Bernoulli polynomials, and the two-parameter
difference family B_{p,q}.

Conventions, fixed once and used everywhere:

  * Bernoulli numbers follow the B_1 = -1/2 convention, i.e. the recurrence
    sum_{i=0}^{k} C(k+1, i) B_i = 0 with B_0 = 1.  This is the convention
    forced by requiring B_{0,0}(x) = B_1(x) - B_1 = x.
  * B_k(x) = sum_{i=0}^{k} C(k, i) B_i x^{k-i}, so B_k(0) = B_k and
    B_k(x+1) - B_k(x) = k x^{k-1}.
  * B_{p,q}(x) is the unique polynomial with B_{p,q}(x+1) - B_{p,q}(x) =
    (x+1)^p x^q and B_{p,q}(0) = 0.  It has degree p+q+1 and is built from
    the closed form B_{p,q} = sum_i C(p, i) B_{0,q+i} with
    B_{0,m} = (B_{m+1}(x) - B_{m+1}) / (m+1); both defining conditions are
    re-checked exactly on every construction.
  * The homogenization of B_{p,q} is z^{p+q+1} B_{p,q}(x/z), a bivariate
    homogeneous polynomial in one coordinate and z.
"""

from __future__ import annotations

import threading
from functools import cache
from math import comb
from typing import Iterable

from .polyring import PolyRing, Polynomial, Rat, _coerce_scalar

_ZERO = Rat(0)
_ONE = Rat(1)


class UnivariatePoly:
    """Dense univariate polynomial over exact rationals.

    Coefficients are stored ascending by degree with a nonzero top
    coefficient (the zero polynomial is the empty tuple).  Instances are
    immutable; calling one evaluates it, on a rational or on another
    polynomial (composition), via Horner's rule.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_coerce_scalar(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UnivariatePoly is immutable")

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, UnivariatePoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, UnivariatePoly):
            other = UnivariatePoly((other,))
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UnivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, UnivariatePoly):
            other = UnivariatePoly((other,))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UnivariatePoly):
            c = _coerce_scalar(other)
            return UnivariatePoly(tuple(a * c for a in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UnivariatePoly()
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return UnivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = UnivariatePoly((1,))
        for _ in range(n):
            result = result * self
        return result

    def __call__(self, value):
        """Evaluate at a rational, or compose with another polynomial."""
        if isinstance(value, UnivariatePoly):
            acc = UnivariatePoly()
            for c in reversed(self.coeffs):
                acc = acc * value + c
            return acc
        acc = _ZERO
        value = _coerce_scalar(value)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
            num, den = c.numerator, c.denominator
            mag = f"{abs(num)}" if den == 1 else f"{abs(num)}/{den}"
            if mono and mag == "1":
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = mag
            parts.append(("-" if num < 0 else "+", body))
        sign, body = parts[0]
        out = [body if sign == "+" else f"-{body}"]
        out.extend(f" {s} {b}" for s, b in parts[1:])
        return "".join(out)

    def __repr__(self):
        return f"UnivariatePoly({self!s})"


X = UnivariatePoly((0, 1))
X_PLUS_1 = UnivariatePoly((1, 1))
MINUS_X = UnivariatePoly((0, -1))


# Bernoulli numbers are shared across every phi_j construction; the memo is
# append-only under the lock (write-once per index, safe concurrent reads).
DEFAULT_CACHE_CAP = 64
_cache_cap = DEFAULT_CACHE_CAP
_numbers: list = [_ONE]
_numbers_lock = threading.Lock()


def set_bernoulli_cache_cap(cap: int) -> None:
    """Cap how many Bernoulli numbers stay memoized (values, not correctness)."""
    global _cache_cap
    if cap < 1:
        raise ValueError("cache cap must be at least 1")
    _cache_cap = cap


def bernoulli_number(k: int):
    """k-th Bernoulli number, B_1 = -1/2 convention, exact."""
    if k < 0:
        raise ValueError("Bernoulli numbers need k >= 0")
    if k < len(_numbers):
        return _numbers[k]
    with _numbers_lock:
        known = list(_numbers)
        for m in range(len(known), k + 1):
            # sum_{i=0}^{m} C(m+1, i) B_i = 0  solved for B_m
            s = _ZERO
            for i in range(m):
                s += comb(m + 1, i) * known[i]
            known.append(-s / (m + 1))
        keep = min(k + 1, _cache_cap)
        if len(_numbers) < keep:
            _numbers.extend(known[len(_numbers):keep])
        return known[k]


@cache
def bernoulli_poly(k: int) -> UnivariatePoly:
    """B_k(x) = sum_i C(k, i) B_i x^{k-i}; satisfies the difference identity
    B_k(x+1) - B_k(x) = k x^{k-1} and B_k(0) = B_k."""
    if k < 0:
        raise ValueError("Bernoulli polynomials need k >= 0")
    coeffs = [_ZERO] * (k + 1)
    for i in range(k + 1):
        coeffs[k - i] = comb(k, i) * bernoulli_number(i)
    return UnivariatePoly(coeffs)


def _b0(m: int) -> UnivariatePoly:
    # B_{0,m}(x) = (B_{m+1}(x) - B_{m+1}) / (m+1)
    b = bernoulli_poly(m + 1)
    return (b - bernoulli_number(m + 1)) * Rat(1, m + 1)


@cache
def bpq(p: int, q: int) -> UnivariatePoly:
    """The unique polynomial with B(x+1) - B(x) = (x+1)^p x^q and B(0) = 0.

    Built from the closed form sum_i C(p, i) B_{0,q+i}(x); both defining
    conditions are then asserted exactly, so a wrong result cannot escape.
    """
    if p < 0 or q < 0:
        raise ValueError("bpq needs p, q >= 0")
    b = UnivariatePoly()
    for i in range(p + 1):
        b = b + comb(p, i) * _b0(q + i)
    difference = b(X_PLUS_1) - b
    target = X_PLUS_1**p * X**q
    if difference != target or b(0) != 0:
        raise ArithmeticError(f"closed form for B_{{{p},{q}}} violates its defining conditions")
    return b


def bpq_homogenized(p: int, q: int, i: int, ell: int) -> Polynomial:
    """Homogenization z^{p+q+1} B_{p,q}(x_i / z) in the rank-ell ring."""
    if ell < 1:
        raise ValueError("rank must be at least 1")
    if not 1 <= i <= ell + 1:
        raise IndexError(f"coordinate index {i} out of range 1..{ell + 1}")
    ring = PolyRing(ell + 2)
    b = bpq(p, q)
    n = p + q + 1
    exps = [0] * ring.nvars
    terms = {}
    for k, c in enumerate(b.coeffs):
        if not c:
            continue
        exps[i - 1] = k
        exps[-1] = n - k
        terms[ring.pack(exps)] = c
    return Polynomial(ring, terms)


def univariate_to_poly(u: UnivariatePoly) -> Polynomial:
    """Bridge to the canonical encoding: a 1-variable ring context."""
    ring = PolyRing(1)
    return Polynomial(ring, {ring.pack((k,)): c for k, c in enumerate(u.coeffs) if c})
