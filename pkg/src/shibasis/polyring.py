"""Exact sparse multivariate polynomial arithmetic over arbitrary-precision rationals.

The ring context is the number of variables.  For a rank-``ell`` cone the
context has ``ell + 2`` variables, ordered x1, ..., x_{ell+1}, z.  Monomials
are packed into a single integer: each variable's exponent occupies a fixed
12-bit field, with x1 in the most significant position and z in the least.
Consequences used throughout:

  * monomial multiplication is integer addition of packed keys,
  * integer comparison of packed keys is lexicographic comparison of
    exponent vectors with x1 weighted highest (the canonical term order).

All values are immutable after construction and all operations are pure.
Coefficients are gmpy2.mpq when available, fractions.Fraction otherwise;
both are always reduced with positive denominator.
"""

from __future__ import annotations

import heapq
import json
import math
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Rat = Fraction

_ZERO = Rat(0)
_ONE = Rat(1)

VAR_BITS = 12
# One addition of two valid exponents must not overflow a 12-bit field.
MAX_EXPONENT = (1 << (VAR_BITS - 1)) - 1


class ContextError(ValueError):
    """Operands live in different ring contexts."""


class ShapeError(ValueError):
    """Matrix input has the wrong shape."""


class DegenerateDivisorError(ValueError):
    """Divisibility test against the zero form or a non-linear form."""


class ExactDivisionError(ArithmeticError):
    """A division that must be exact left a remainder (internal invariant)."""


def rational_from_str(s: str):
    """Parse 'num/den' or 'num' into an always-reduced rational."""
    num, _, den = s.partition("/")
    return Rat(int(num), int(den)) if den else Rat(int(num))


def rational_to_str(c) -> str:
    """Canonical 'num/den' string, denominator always explicit."""
    return "%d/%d" % (c.numerator, c.denominator)


def _coerce_scalar(value):
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not supported; use exact rationals")
    if isinstance(value, int):
        return Rat(value)
    if isinstance(value, (Fraction, type(_ONE))):
        return Rat(value)
    raise TypeError(f"cannot use {type(value).__name__} as a rational coefficient")


class PolyRing:
    """Ring context: variable count plus the packed-monomial geometry.

    Instances are flyweights; ``PolyRing(n) is PolyRing(n)`` holds, so context
    checks are identity checks.  There is no silent promotion between
    contexts: mixing them raises ContextError.
    """

    _instances: dict[int, "PolyRing"] = {}

    nvars: int
    names: tuple[str, ...]

    def __new__(cls, nvars: int) -> "PolyRing":
        inst = cls._instances.get(nvars)
        if inst is not None:
            return inst
        if nvars < 1:
            raise ValueError(f"ring needs at least one variable, got {nvars}")
        inst = super().__new__(cls)
        inst.nvars = nvars
        inst._shifts = tuple(VAR_BITS * (nvars - 1 - i) for i in range(nvars))
        if nvars == 1:
            inst.names = ("x",)
        else:
            inst.names = tuple(f"x{i}" for i in range(1, nvars)) + ("z",)
        inst._zero = None
        inst._one = None
        cls._instances[nvars] = inst
        return inst

    @property
    def ell(self) -> int:
        return self.nvars - 2

    def pack(self, exponents: Sequence[int]) -> int:
        if len(exponents) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {len(exponents)}")
        key = 0
        for e, s in zip(exponents, self._shifts):
            if not 0 <= e <= MAX_EXPONENT:
                raise ValueError(f"exponent {e} outside [0, {MAX_EXPONENT}]")
            key |= e << s
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        mask = (1 << VAR_BITS) - 1
        return tuple((key >> s) & mask for s in self._shifts)

    def total_degree_of_key(self, key: int) -> int:
        mask = (1 << VAR_BITS) - 1
        return sum((key >> s) & mask for s in self._shifts)

    # -- constructors -------------------------------------------------

    @property
    def zero(self) -> "Polynomial":
        if self._zero is None:
            self._zero = Polynomial(self, {})
        return self._zero

    @property
    def one(self) -> "Polynomial":
        if self._one is None:
            self._one = Polynomial(self, {0: _ONE})
        return self._one

    def const(self, value) -> "Polynomial":
        c = _coerce_scalar(value)
        return Polynomial(self, {0: c} if c else {})

    def var(self, position: int) -> "Polynomial":
        """Variable at 0-based position (z is the last position)."""
        if not 0 <= position < self.nvars:
            raise IndexError(f"variable position {position} out of range for {self.nvars} variables")
        return Polynomial(self, {1 << self._shifts[position]: _ONE})

    def x(self, i: int) -> "Polynomial":
        """Coordinate x_i, 1-based, i in 1..nvars-1."""
        if not 1 <= i <= self.nvars - 1:
            raise IndexError(f"x index {i} out of range 1..{self.nvars - 1}")
        return self.var(i - 1)

    @property
    def z(self) -> "Polynomial":
        if self.nvars < 2:
            raise IndexError("univariate context has no z variable")
        return self.var(self.nvars - 1)

    def from_terms(self, terms: Mapping[Sequence[int], object]) -> "Polynomial":
        acc: dict[int, object] = {}
        for exps, coeff in terms.items():
            c = _coerce_scalar(coeff)
            if not c:
                continue
            key = self.pack(exps)
            cur = acc.get(key)
            c = c if cur is None else cur + c
            if c:
                acc[key] = c
            else:
                del acc[key]
        return Polynomial(self, acc)

    def monomial(self, exponents: Sequence[int], coeff=1) -> "Polynomial":
        c = _coerce_scalar(coeff)
        return Polynomial(self, {self.pack(exponents): c} if c else {})

    def __repr__(self) -> str:
        return f"PolyRing({self.nvars})"


class Polynomial:
    """Immutable sparse polynomial: packed-monomial -> nonzero rational."""

    __slots__ = ("ring", "_terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self._terms = terms

    # -- inspection ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        deg = self.ring.total_degree_of_key
        return max(deg(k) for k in self._terms)

    def is_homogeneous(self) -> bool:
        if not self._terms:
            return True
        deg = self.ring.total_degree_of_key
        it = iter(self._terms)
        d0 = deg(next(it))
        return all(deg(k) == d0 for k in it)

    def terms(self) -> Iterator[tuple[tuple[int, ...], object]]:
        """(exponent vector, coefficient) pairs in canonical descending order."""
        unpack = self.ring.unpack
        for key in sorted(self._terms, reverse=True):
            yield unpack(key), self._terms[key]

    def leading(self) -> tuple[tuple[int, ...], object]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        key = max(self._terms)
        return self.ring.unpack(key), self._terms[key]

    def coefficient(self, exponents: Sequence[int]):
        return self._terms.get(self.ring.pack(exponents), _ZERO)

    def constant_term(self):
        return self._terms.get(0, _ZERO)

    # -- ring operations ----------------------------------------------

    def _check_context(self, other: "Polynomial") -> None:
        if self.ring is not other.ring:
            raise ContextError(
                f"mixed ring contexts: {self.ring.nvars} vs {other.ring.nvars} variables"
            )

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.const(other)
        self._check_context(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            cur = out.get(k)
            if cur is None:
                out[k] = c
            else:
                s = cur + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _coerce_scalar(other)
            if not c:
                return self.ring.zero
            return Polynomial(self.ring, {k: v * c for k, v in self._terms.items()})
        self._check_context(other)
        return Polynomial(self.ring, _dict_mul(self._terms, other._terms))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        c = _coerce_scalar(scalar)
        if not c:
            raise ZeroDivisionError("division of polynomial by zero scalar")
        inv = _ONE / c
        return Polynomial(self.ring, {k: v * inv for k, v in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring is other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction, type(_ONE))):
            return self._terms == self.ring.const(other)._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.nvars, frozenset(self._terms.items())))

    # -- calculus and substitution --------------------------------------

    def diff(self, position: int) -> "Polynomial":
        """Partial derivative with respect to the 0-based variable position."""
        ring = self.ring
        if not 0 <= position < ring.nvars:
            raise IndexError(f"variable position {position} out of range")
        shift = ring._shifts[position]
        mask = (1 << VAR_BITS) - 1
        out: dict[int, object] = {}
        for k, c in self._terms.items():
            e = (k >> shift) & mask
            if e:
                out[k - (1 << shift)] = c * e
        return Polynomial(ring, out)

    def substitute(self, position: int, value) -> "Polynomial":
        """Exact image under variable -> value (a polynomial or scalar)."""
        ring = self.ring
        if not 0 <= position < ring.nvars:
            raise IndexError(f"variable position {position} out of range")
        if not isinstance(value, Polynomial):
            value = ring.const(value)
        self._check_context(value)
        shift = ring._shifts[position]
        mask = (1 << VAR_BITS) - 1
        powers: list[dict] = [{0: _ONE}]
        result: dict[int, object] = {}
        for k, c in self._terms.items():
            e = (k >> shift) & mask
            rest = k - (e << shift)
            while len(powers) <= e:
                powers.append(_dict_mul(powers[-1], value._terms))
            for km, cm in powers[e].items():
                kk = rest + km
                cur = result.get(kk)
                s = c * cm if cur is None else cur + c * cm
                if s:
                    result[kk] = s
                else:
                    del result[kk]
        return Polynomial(ring, result)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Exact quotient self / divisor; raises ExactDivisionError otherwise."""
        if not isinstance(divisor, Polynomial):
            return self / divisor
        self._check_context(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division of polynomial by zero polynomial")
        q = _dict_div_exact(self._terms, divisor._terms, self.ring, integer_coeffs=False)
        return Polynomial(self.ring, q)

    # -- rendering -------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = self.ring.names
        pieces = []
        for exps, coeff in self.terms():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
            )
            num, den = coeff.numerator, coeff.denominator
            sign = "-" if num < 0 else "+"
            mag = f"{abs(num)}" if den == 1 else f"{abs(num)}/{den}"
            if mono and mag == "1":
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = mag
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = [first_body if first_sign == "+" else f"-{first_body}"]
        for sign, body in pieces[1:]:
            out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self.ring.nvars} vars, {self!s})"


# ---------------------------------------------------------------------------
# raw term-dict kernels (hot paths; keys are packed ints)
# ---------------------------------------------------------------------------


def _dict_mul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    bitems = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bitems:
            k = ka + kb
            cur = get(k)
            if cur is None:
                out[k] = ca * cb
            else:
                out[k] = cur + ca * cb
    if any(not v for v in out.values()):
        out = {k: v for k, v in out.items() if v}
    return out


def _dict_mul_sub(base: dict, a: dict, b: dict) -> dict:
    """base - a*b with the product accumulated in place of a fresh dict."""
    out = dict(base)
    get = out.get
    if a and b:
        if len(a) > len(b):
            a, b = b, a
        bitems = list(b.items())
        for ka, ca in a.items():
            for kb, cb in bitems:
                k = ka + kb
                cur = get(k)
                if cur is None:
                    out[k] = -ca * cb
                else:
                    out[k] = cur - ca * cb
    if any(not v for v in out.values()):
        out = {k: v for k, v in out.items() if v}
    return out


def _monomial_quotient(knum: int, kden: int, ring: PolyRing) -> int:
    """Packed quotient key, or -1 when the denominator monomial does not divide."""
    en = ring.unpack(knum)
    ed = ring.unpack(kden)
    if any(a < b for a, b in zip(en, ed)):
        return -1
    return knum - kden


def _dict_div_exact(num: dict, den: dict, ring: PolyRing, *, integer_coeffs: bool) -> dict:
    """Exact quotient of term dicts under the canonical order.

    Division must be exact; any leftover raises ExactDivisionError.  Works for
    rational coefficients always, and for integer coefficients whenever the
    true quotient has integer coefficients (the Bareiss case).
    """
    if not den:
        raise ZeroDivisionError("division by zero polynomial")
    if not num:
        return {}
    if len(den) == 1:
        (kd, cd), = den.items()
        out = {}
        for k, c in num.items():
            kq = _monomial_quotient(k, kd, ring)
            if kq < 0:
                raise ExactDivisionError("monomial divisor does not divide a term")
            if integer_coeffs:
                q, r = divmod(c, cd)
                if r:
                    raise ExactDivisionError("coefficient division left a remainder")
            else:
                q = c / cd
            out[kq] = q
        return out

    kd = max(den)
    cd = den[kd]
    den_items = [(k, c) for k, c in den.items() if k != kd]
    rem = dict(num)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quo: dict = {}
    while heap:
        k = -heapq.heappop(heap)
        c = rem.get(k)
        if not c:
            continue
        kq = _monomial_quotient(k, kd, ring)
        if kq < 0:
            raise ExactDivisionError("leading term not divisible; division is not exact")
        if integer_coeffs:
            cq, r = divmod(c, cd)
            if r:
                raise ExactDivisionError("leading coefficient not divisible; division is not exact")
        else:
            cq = c / cd
        quo[kq] = cq
        del rem[k]
        for k2, c2 in den_items:
            kk = kq + k2
            cur = rem.get(kk)
            if cur is None:
                rem[kk] = -cq * c2
                heapq.heappush(heap, -kk)
            else:
                s = cur - cq * c2
                if s:
                    rem[kk] = s
                else:
                    del rem[kk]
    if rem:
        raise ExactDivisionError("division left a nonzero remainder")
    return quo


# ---------------------------------------------------------------------------
# linear-form divisibility (kernel substitution)
# ---------------------------------------------------------------------------


def _linear_parts(linear: Polynomial) -> list[tuple[int, object]]:
    """(position, coefficient) pairs of a homogeneous linear form."""
    ring = linear.ring
    if linear.is_zero():
        raise DegenerateDivisorError("zero form cannot divide")
    parts = []
    for k, c in linear._terms.items():
        exps = ring.unpack(k)
        if sum(exps) != 1:
            raise DegenerateDivisorError("divisor must be homogeneous of degree 1")
        parts.append((exps.index(1), c))
    parts.sort()
    return parts


def linear_remainder(p: Polynomial, linear: Polynomial) -> Polynomial:
    """Remainder of p modulo a linear form, by kernel substitution.

    Picks the lowest-position variable v with nonzero coefficient c in the
    form L and substitutes v -> v - L/c, i.e. evaluates p on the hyperplane
    L = 0.  The result is zero exactly when L divides p.
    """
    if not isinstance(p, Polynomial) or not isinstance(linear, Polynomial):
        raise TypeError("expected Polynomial arguments")
    p._check_context(linear)
    parts = _linear_parts(linear)
    v, c = parts[0]
    value = p.ring.zero
    for u, cu in parts[1:]:
        value = value - p.ring.var(u) * (cu / c)
    return p.substitute(v, value)


def divisible_by_linear(p: Polynomial, linear: Polynomial) -> bool:
    """True iff the homogeneous linear form divides p exactly."""
    return linear_remainder(p, linear).is_zero()


# ---------------------------------------------------------------------------
# fraction-free determinant
# ---------------------------------------------------------------------------


def _row_to_int_dicts(row: Sequence[Polynomial]) -> tuple[list[dict], int]:
    """Scale one row to integer coefficients; returns (dicts, scale)."""
    scale = 1
    for p in row:
        for c in p._terms.values():
            den = int(c.denominator)
            scale = scale * den // math.gcd(scale, den)
    out = []
    for p in row:
        out.append(
            {k: int(c.numerator) * (scale // int(c.denominator)) for k, c in p._terms.items()}
        )
    return out, scale


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Exact determinant by fraction-free Bareiss elimination.

    Rows are scaled to integer coefficients up front (undone at the end), and
    the pivot at each step is the nonzero candidate with the fewest terms,
    moved into place by sign-tracked row/column swaps.  Every interior
    division is exact; a nonzero remainder is a bug, never valid data, and
    raises ExactDivisionError.
    """
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise ShapeError("determinant needs a non-empty square matrix")
    ring = matrix[0][0].ring
    for row in matrix:
        for entry in row:
            if not isinstance(entry, Polynomial):
                raise TypeError("matrix entries must be Polynomial")
            if entry.ring is not ring:
                raise ContextError("matrix entries in mixed ring contexts")
    if n == 1:
        return matrix[0][0]

    mat = []
    scale = 1
    for row in matrix:
        dicts, s = _row_to_int_dicts(row)
        mat.append(dicts)
        scale *= s

    sign = 1
    prev_pivot: dict | None = None
    for step in range(n - 1):
        best = None
        best_len = None
        for i in range(step, n):
            row = mat[i]
            for j in range(step, n):
                d = row[j]
                if d and (best_len is None or len(d) < best_len):
                    best = (i, j)
                    best_len = len(d)
        if best is None:
            return ring.zero
        bi, bj = best
        if bi != step:
            mat[step], mat[bi] = mat[bi], mat[step]
            sign = -sign
        if bj != step:
            for row in mat:
                row[step], row[bj] = row[bj], row[step]
            sign = -sign
        pivot = mat[step][step]
        pivot_row = mat[step]
        for i in range(step + 1, n):
            row = mat[i]
            head = row[step]
            for j in range(step + 1, n):
                t = _dict_mul_sub(_dict_mul(pivot, row[j]), head, pivot_row[j])
                if prev_pivot is not None:
                    t = _dict_div_exact(t, prev_pivot, ring, integer_coeffs=True)
                row[j] = t
            row[step] = {}
        prev_pivot = pivot

    final = mat[n - 1][n - 1]
    if sign < 0:
        final = {k: -c for k, c in final.items()}
    return Polynomial(ring, {k: Rat(c, scale) for k, c in final.items()})


# ---------------------------------------------------------------------------
# canonical JSON encoding
# ---------------------------------------------------------------------------


def poly_to_json_obj(p: Polynomial) -> dict:
    """Canonical encoding: same polynomial => same object => same bytes."""
    return {
        "ell": p.ring.nvars - 2,
        "terms": [
            {"c": rational_to_str(c), "e": list(e)} for e, c in p.terms()
        ],
    }


def poly_from_json_obj(obj: Mapping) -> Polynomial:
    ell = obj["ell"]
    if not isinstance(ell, int) or ell + 2 < 1:
        raise ValueError(f"bad ring context: ell={ell!r}")
    ring = PolyRing(ell + 2)
    terms: dict[int, object] = {}
    prev_key = None
    for t in obj["terms"]:
        e = t["e"]
        if len(e) != ring.nvars or any(not isinstance(v, int) or v < 0 for v in e):
            raise ValueError(f"bad exponent vector {e!r}")
        c = rational_from_str(t["c"])
        if not c:
            raise ValueError("canonical encoding must not contain zero coefficients")
        key = ring.pack(e)
        if prev_key is not None and key >= prev_key:
            raise ValueError("terms not in canonical descending order")
        prev_key = key
        terms[key] = c
    return Polynomial(ring, terms)


def poly_to_json(p: Polynomial) -> str:
    return json.dumps(poly_to_json_obj(p), separators=(",", ":"))


def poly_from_json(s: str) -> Polynomial:
    return poly_from_json_obj(json.loads(s))
