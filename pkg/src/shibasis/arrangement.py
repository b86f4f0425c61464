"""The braid arrangement, the Shi arrangement, and its cone.

The cone of rank ell lives in ell+2 coordinates x1, ..., x_{ell+1}, z and
consists of 1 + ell(ell+1) hyperplanes in a fixed order: z first, then the
braid forms x_p - x_q for p < q in lexicographic order on (p, q), then the
shifted forms x_p - x_q - z in the same order.  The order is part of the
contract: it fixes row order in the Saito matrix and makes every emitted
report byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from .polyring import PolyRing, Polynomial


@dataclass(frozen=True)
class ShiCone:
    """Cone over the rank-ell Shi arrangement: ordered hyperplane forms."""

    ell: int
    ring: PolyRing
    hyperplanes: tuple[Polynomial, ...]

    @property
    def size(self) -> int:
        return len(self.hyperplanes)

    def braid_pairs(self) -> list[tuple[int, int]]:
        """(p, q) index pairs, p < q, in the fixed lexicographic order."""
        n = self.ell + 1
        return [(p, q) for p in range(1, n + 1) for q in range(p + 1, n + 1)]


def build_shi_cone(ell: int) -> ShiCone:
    """Hyperplanes of the cone: z, then x_p - x_q, then x_p - x_q - z."""
    if ell < 1:
        raise ValueError(f"rank must be at least 1, got {ell}")
    ring = PolyRing(ell + 2)
    z = ring.z
    pairs = [(p, q) for p in range(1, ell + 2) for q in range(p + 1, ell + 2)]
    braid = [ring.x(p) - ring.x(q) for p, q in pairs]
    shifted = [form - z for form in braid]
    return ShiCone(ell=ell, ring=ring, hyperplanes=(z, *braid, *shifted))


def defining_polynomial(cone: ShiCone) -> Polynomial:
    """Product of all hyperplane forms, degree 1 + ell(ell+1)."""
    return reduce(lambda a, b: a * b, cone.hyperplanes)


def elementary_symmetric(k: int, indices: Iterable[int], ell: int) -> Polynomial:
    """sigma_k over the coordinates {x_i : i in indices}, in the rank-ell ring.

    sigma_0 = 1 and sigma_k = 0 for k > |indices|.  Built by dynamic
    programming, one variable at a time, rather than summing over subsets.
    """
    if k < 0:
        raise ValueError("degree of an elementary symmetric function must be >= 0")
    ring = PolyRing(ell + 2)
    idx = sorted(set(indices))
    for i in idx:
        if not 1 <= i <= ell + 1:
            raise IndexError(f"coordinate index {i} out of range 1..{ell + 1}")
    if k > len(idx):
        return ring.zero
    sigma = [ring.one] + [ring.zero] * k
    for t, i in enumerate(idx, start=1):
        xi = ring.x(i)
        for d in range(min(k, t), 0, -1):
            sigma[d] = sigma[d] + sigma[d - 1] * xi
    return sigma[k]


def index_subsets(j: int, ell: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The two coordinate index blocks attached to position j:
    {1, ..., j-1} and {j+2, ..., ell+1}."""
    if not 1 <= j <= ell:
        raise ValueError(f"j must lie in 1..{ell}, got {j}")
    return tuple(range(1, j)), tuple(range(j + 2, ell + 2))


def lemma_matrix_N(ell: int) -> list[list[Polynomial]]:
    """The ell x ell matrix whose (i, j) entry is the elementary symmetric
    function of degree ell - i in x_1, ..., x_{j-1}, x_{j+2}, ..., x_{ell+1}.

    Its determinant equals
    (-1)^{ell(ell-1)/2} * prod_{1 <= p < q <= ell+1, q-p > 1} (x_p - x_q);
    note the q <= ell+1 upper bound, which the degree count forces.
    """
    if ell < 1:
        raise ValueError(f"rank must be at least 1, got {ell}")
    columns = []
    for j in range(1, ell + 1):
        i1, i2 = index_subsets(j, ell)
        columns.append(i1 + i2)
    return [
        [elementary_symmetric(ell - i, columns[j - 1], ell) for j in range(1, ell + 1)]
        for i in range(1, ell + 1)
    ]


def lemma_det_closed_form(ell: int) -> Polynomial:
    """(-1)^{ell(ell-1)/2} * prod over 1 <= p < q <= ell+1 with q - p > 1."""
    ring = PolyRing(ell + 2)
    sign = -1 if (ell * (ell - 1) // 2) % 2 else 1
    acc = ring.const(sign)
    for p in range(1, ell + 2):
        for q in range(p + 2, ell + 2):
            acc = acc * (ring.x(p) - ring.x(q))
    return acc
