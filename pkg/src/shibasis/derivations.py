"""Derivations of the polynomial ring and the explicit basis construction.

A derivation is stored as its values on the coordinates: a dense vector of
ell+2 polynomials, positions 0..ell giving the coefficient of d/dx_{i+1} and
the last position the coefficient of d/dz.  phi_j always has a zero d/dz
entry, but the vector stays dense so the Saito matrix assembles uniformly.

The basis of interest:

  eta1 = sum_i d/dx_i                      (degree 0)
  eta2 = z d/dz + sum_i x_i d/dx_i         (degree 1, the Euler derivation)
  phi_j = (x_j - x_{j+1} - z) * sum_i sum_{k1 <= j-1, k2 <= ell-j}
            (-1)^{k1+k2} sigma^{(1)}_{j-1-k1} sigma^{(2)}_{ell-j-k2}
            Bbar_{k1,k2}(x_i, z) d/dx_i    (degree ell+1)

where sigma^{(1)}, sigma^{(2)} are elementary symmetric functions in
x_1..x_{j-1} and x_{j+2}..x_{ell+1} and Bbar is the homogenized difference
polynomial from the bernoulli module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .arrangement import elementary_symmetric, index_subsets
from .bernoulli import bpq_homogenized
from .polyring import ContextError, PolyRing, Polynomial, poly_from_json_obj, poly_to_json_obj


@dataclass(frozen=True)
class Derivation:
    """Dense coefficient vector on (d/dx_1, ..., d/dx_{ell+1}, d/dz)."""

    ring: PolyRing
    coeffs: tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.ring.nvars:
            raise ValueError(
                f"derivation needs {self.ring.nvars} coefficients, got {len(self.coeffs)}"
            )
        for c in self.coeffs:
            if c.ring is not self.ring:
                raise ContextError("derivation coefficients in mixed ring contexts")

    @property
    def ell(self) -> int:
        return self.ring.ell

    def degree(self) -> int:
        """Polynomial degree of the coefficient vector (-1 if identically 0)."""
        return max((c.total_degree() for c in self.coeffs if c), default=-1)

    def is_homogeneous(self) -> bool:
        """All nonzero coefficients homogeneous of one common degree."""
        degrees = {c.total_degree() for c in self.coeffs if c}
        return len(degrees) <= 1 and all(c.is_homogeneous() for c in self.coeffs)

    def __str__(self) -> str:
        names = [f"d{i}" for i in range(1, self.ring.nvars)] + ["dz"]
        parts = []
        for c, name in zip(self.coeffs, names):
            if c.is_zero():
                continue
            if c == 1:
                parts.append(name)
            elif len(c) == 1 and str(c)[0] != "-":
                parts.append(f"{c}*{name}")
            else:
                parts.append(f"({c})*{name}")
        return " + ".join(parts) if parts else "0"


def apply(theta: Derivation, p: Polynomial) -> Polynomial:
    """theta(p) = sum_v coeff_v * dp/dv, exactly."""
    if p.ring is not theta.ring:
        raise ContextError("derivation and polynomial in different ring contexts")
    result = theta.ring.zero
    for position, coeff in enumerate(theta.coeffs):
        if coeff.is_zero():
            continue
        dp = p.diff(position)
        if dp.is_zero():
            continue
        result = result + coeff * dp
    return result


def eta1(ell: int) -> Derivation:
    """sum_i d/dx_i; kills every difference x_p - x_q."""
    ring = _ring(ell)
    one, zero = ring.one, ring.zero
    return Derivation(ring, tuple([one] * (ell + 1) + [zero]))


def eta2(ell: int) -> Derivation:
    """The Euler derivation z d/dz + sum_i x_i d/dx_i."""
    ring = _ring(ell)
    return Derivation(ring, tuple(ring.var(v) for v in range(ring.nvars)))


def phi(j: int, ell: int) -> Derivation:
    """The degree-(ell+1) basis derivation attached to position j."""
    ring = _ring(ell)
    if not 1 <= j <= ell:
        raise ValueError(f"j must lie in 1..{ell}, got {j}")
    i1, i2 = index_subsets(j, ell)
    prefactor = ring.x(j) - ring.x(j + 1) - ring.z

    # sigma factors do not depend on the target coordinate; build them once
    weights = []
    for k1 in range(j):
        s1 = elementary_symmetric(j - 1 - k1, i1, ell)
        for k2 in range(ell - j + 1):
            s2 = elementary_symmetric(ell - j - k2, i2, ell)
            w = s1 * s2
            if (k1 + k2) % 2:
                w = -w
            weights.append((k1, k2, w))

    coeffs = []
    for i in range(1, ell + 2):
        inner = ring.zero
        for k1, k2, w in weights:
            inner = inner + w * bpq_homogenized(k1, k2, i, ell)
        coeffs.append(prefactor * inner)
    coeffs.append(ring.zero)
    return Derivation(ring, tuple(coeffs))


def basis(ell: int) -> list[Derivation]:
    """The candidate basis in fixed report order: eta1, eta2, phi_1..phi_ell."""
    return [eta1(ell), eta2(ell)] + [phi(j, ell) for j in range(1, ell + 1)]


def basis_names(ell: int) -> list[str]:
    return ["eta1", "eta2"] + [f"phi_{j}" for j in range(1, ell + 1)]


def decone(theta: Derivation) -> Derivation:
    """Set z = 0 in every coefficient (the affine shadow of the derivation)."""
    zpos = theta.ring.nvars - 1
    return Derivation(theta.ring, tuple(c.substitute(zpos, 0) for c in theta.coeffs))


def derivation_to_json_obj(name: str, theta: Derivation) -> dict:
    return {
        "name": name,
        "coefficients": [poly_to_json_obj(c) for c in theta.coeffs],
    }


def derivation_from_json_obj(obj: Mapping) -> tuple[str, Derivation]:
    coeffs = tuple(poly_from_json_obj(c) for c in obj["coefficients"])
    if not coeffs:
        raise ValueError("derivation needs at least one coefficient")
    return obj["name"], Derivation(coeffs[0].ring, coeffs)


def _ring(ell: int) -> PolyRing:
    if ell < 1:
        raise ValueError(f"rank must be at least 1, got {ell}")
    return PolyRing(ell + 2)
