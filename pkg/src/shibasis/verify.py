"""Executable proofs for the basis of the derivation module of the cone.

Every theorem-shaped claim becomes a check that either passes or returns a
concrete witness of failure:

  * membership: each basis derivation sends every hyperplane form to a
    multiple of that form,
  * the determinant identity for the elementary-symmetric matrix N,
  * the factorization P = M D1 Ntilde D2 of the deconed coefficient matrix
    and its determinant closed form,
  * Saito's criterion: det of the full coefficient matrix is a nonzero
    constant multiple of the defining polynomial, whence the basis degrees
    are the exponents and the Poincare polynomial factors,
  * chamber counting, cross-checked by an independent finite-field oracle
    that counts points and interpolates the characteristic polynomial.

The Saito constant has no closed form asserted here for ell >= 2; it is
computed and recorded in the report.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

from .arrangement import (
    ShiCone,
    build_shi_cone,
    defining_polynomial,
    lemma_det_closed_form,
    lemma_matrix_N,
)
from .bernoulli import UnivariatePoly
from .derivations import Derivation, apply, basis, basis_names, decone, phi
from .polyring import (
    ContextError,
    PolyRing,
    Polynomial,
    Rat,
    ShapeError,
    determinant,
    linear_remainder,
    poly_to_json_obj,
    rational_to_str,
)


class BasisNotVerifiedError(RuntimeError):
    """Poincare/chamber data was requested before the basis was verified."""


class DegreeGuardExceeded(RuntimeError):
    """A determinant job was refused by the configured degree guard."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: object = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class MembershipResult:
    passed: bool
    form: Polynomial | None = None
    remainder: Polynomial | None = None


def check_membership(theta: Derivation, cone: ShiCone) -> MembershipResult:
    """Does theta send every hyperplane form of the cone into its ideal?

    Checks all 1 + ell(ell+1) forms in the cone's fixed order; on failure
    returns the first violating form together with the nonzero remainder of
    theta(form) modulo the form.
    """
    if theta.ring is not cone.ring:
        raise ContextError("derivation and cone in different ring contexts")
    for form in cone.hyperplanes:
        image = apply(theta, form)
        if image.is_zero():
            continue
        remainder = linear_remainder(image, form)
        if not remainder.is_zero():
            return MembershipResult(False, form, remainder)
    return MembershipResult(True)


def saito_matrix(derivations: Sequence[Derivation]) -> list[list[Polynomial]]:
    """One row per derivation; columns are the d/dx_1..d/dx_{ell+1}, d/dz
    coefficients."""
    if not derivations:
        raise ShapeError("empty basis")
    ring = derivations[0].ring
    if len(derivations) != ring.nvars:
        raise ShapeError(
            f"need {ring.nvars} derivations for a square matrix, got {len(derivations)}"
        )
    for d in derivations:
        if d.ring is not ring:
            raise ContextError("derivations in mixed ring contexts")
    return [list(d.coeffs) for d in derivations]


@dataclass(frozen=True)
class SaitoCheck:
    ell: int
    passed: bool
    constant: object = None  # nonzero rational when passed
    degrees: tuple[int, ...] = ()
    reason: str | None = None


def check_saito(cone: ShiCone, *, max_degree_guard: int | None = None) -> SaitoCheck:
    """Saito's criterion for the candidate basis eta1, eta2, phi_1..phi_ell.

    Degree precheck first: the basis degrees must be homogeneous and sum to
    the number of hyperplanes (cheap failure before the determinant).  Then
    det(saito_matrix) is computed exactly and tested for equality with c * Q
    for a nonzero rational c, which is returned.
    """
    ell = cone.ell
    ders = basis(ell)
    if not all(d.is_homogeneous() for d in ders):
        return SaitoCheck(ell, False, reason="basis coefficients are not homogeneous")
    degrees = tuple(d.degree() for d in ders)
    if sum(degrees) != cone.size:
        return SaitoCheck(
            ell,
            False,
            degrees=degrees,
            reason=f"degree sum {sum(degrees)} != hyperplane count {cone.size}",
        )
    _degree_guard(cone.size, max_degree_guard, "Saito determinant")
    det = determinant(saito_matrix(ders))
    if det.is_zero():
        return SaitoCheck(ell, False, degrees=degrees, reason="coefficient matrix is singular")
    q_poly = defining_polynomial(cone)
    _, lead_det = det.leading()
    _, lead_q = q_poly.leading()
    c = lead_det / lead_q
    if det == q_poly * c:
        return SaitoCheck(ell, True, constant=c, degrees=degrees)
    return SaitoCheck(
        ell, False, degrees=degrees, reason="determinant is not a constant multiple of Q"
    )


def check_lemma_N(ell: int) -> CheckResult:
    """det N against its closed form, plus the left-row annihilation identity.

    The row identity: for each p <= ell,
      sum_i (-x_p)^{i-1} N[i][j] = prod_{s != j, j+1} (x_s - x_p),
    an exact polynomial identity in the full ring.
    """
    ring = PolyRing(ell + 2)
    n_matrix = lemma_matrix_N(ell)
    det = determinant(n_matrix)
    closed = lemma_det_closed_form(ell)
    if det != closed:
        return CheckResult(
            "lemma_N", False, {"det": str(det), "closed_form": str(closed)}
        )
    for p in range(1, ell + 1):
        xp = ring.x(p)
        row = [(-xp) ** i for i in range(ell)]
        for j in range(1, ell + 1):
            lhs = ring.zero
            for i in range(ell):
                lhs = lhs + row[i] * n_matrix[i][j - 1]
            rhs = ring.one
            for s in range(1, ell + 2):
                if s not in (j, j + 1):
                    rhs = rhs * (ring.x(s) - xp)
            if lhs != rhs:
                return CheckResult(
                    "lemma_N",
                    False,
                    {"row_identity_failed_at": {"p": p, "j": j}, "lhs": str(lhs)},
                )
    return CheckResult("lemma_N", True)


def _diag(ring: PolyRing, entries: Sequence[Polynomial]) -> list[list[Polynomial]]:
    n = len(entries)
    return [[entries[i] if i == j else ring.zero for j in range(n)] for i in range(n)]


def _mat_mul(a, b, ring: PolyRing):
    n, m, k = len(a), len(b[0]), len(b)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ring.zero
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def check_factorization_P(ell: int, *, max_degree_guard: int | None = None) -> CheckResult:
    """The deconed coefficient matrix P factors as M D1 Ntilde D2.

    P has first column all ones and (i, j+1) entry phi_j|_{z=0} applied to
    x_i.  M is the Vandermonde [x_i^{j-1}], D1 = diag(1, 1, -1/2, 1/3, ...),
    Ntilde = [1] + N, D2 = diag(1, x_1 - x_2, ..., x_ell - x_{ell+1}).  Both
    the matrix identity and the determinant closed form
    det P = ((-1)^{ell(ell+1)/2} / ell!) * prod_{p<q} (x_p - x_q)^2
    are verified exactly.
    """
    ring = PolyRing(ell + 2)
    deconed = [decone(phi(j, ell)) for j in range(1, ell + 1)]
    n = ell + 1

    p_matrix = []
    for i in range(1, n + 1):
        xi = ring.x(i)
        row = [ring.one] + [apply(d, xi) for d in deconed]
        p_matrix.append(row)

    m_matrix = [[ring.x(i) ** j for j in range(n)] for i in range(1, n + 1)]
    d1 = _diag(ring, [ring.one] + [ring.const(Rat((-1) ** (k - 1), k)) for k in range(1, n)])
    n_small = lemma_matrix_N(ell)
    ntilde = [[ring.one] + [ring.zero] * ell] + [
        [ring.zero] + n_small[i] for i in range(ell)
    ]
    d2 = _diag(ring, [ring.one] + [ring.x(p) - ring.x(p + 1) for p in range(1, n)])

    product = _mat_mul(_mat_mul(_mat_mul(m_matrix, d1, ring), ntilde, ring), d2, ring)
    for i in range(n):
        for j in range(n):
            if product[i][j] != p_matrix[i][j]:
                return CheckResult(
                    "factorization_P",
                    False,
                    {"entry": [i + 1, j + 1], "product": str(product[i][j]), "P": str(p_matrix[i][j])},
                )

    _degree_guard(ell * (ell + 1), max_degree_guard, "factorization determinant")
    det = determinant(p_matrix)
    sign = -1 if (ell * (ell + 1) // 2) % 2 else 1
    closed = ring.const(Rat(sign, math.factorial(ell)))
    for p in range(1, ell + 2):
        for q in range(p + 1, ell + 2):
            diff = ring.x(p) - ring.x(q)
            closed = closed * diff * diff
    if det != closed:
        return CheckResult("factorization_P", False, {"det": str(det)})
    return CheckResult("factorization_P", True)


def expected_exponents(ell: int) -> list[int]:
    """The exponent multiset {0, 1, ell+1 (ell times)}, sorted."""
    return sorted([0, 1] + [ell + 1] * ell)


def exponents_from_saito(saito: SaitoCheck) -> list[int]:
    if not saito.passed:
        raise BasisNotVerifiedError("exponents are only defined once Saito's criterion passes")
    return sorted(saito.degrees)


def poincare_polynomial(ell: int, saito: SaitoCheck | None = None) -> UnivariatePoly:
    """prod_j (1 + deg(theta_j) t) over the verified basis.

    Demands a passing Saito check (computing one if not supplied): the
    factorization is only meaningful for a genuine basis.
    """
    if saito is None:
        saito = check_saito(build_shi_cone(ell))
    if saito.ell != ell:
        raise ValueError(f"Saito check is for rank {saito.ell}, not {ell}")
    if not saito.passed:
        raise BasisNotVerifiedError(
            "Poincare polynomial requested before Saito's criterion passed"
        )
    pi = UnivariatePoly((1,))
    for d in saito.degrees:
        pi = pi * UnivariatePoly((1, d))
    return pi


def chamber_count(ell: int, saito: SaitoCheck | None = None) -> int:
    """Chambers of the affine arrangement under the cone: pi(1) / 2."""
    pi = poincare_polynomial(ell, saito)
    value = pi(1)
    if value.denominator != 1 or int(value) % 2:
        raise ArithmeticError(f"pi(1) = {value} is not an even integer")
    return int(value) // 2


# ---------------------------------------------------------------------------
# finite-field oracle
# ---------------------------------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def count_complement_points(cone: ShiCone, q: int) -> int:
    """Points of F_q^{ell+2} lying on none of the cone's hyperplanes.

    Plain enumeration of all q^{ell+2} points with an early exit on the first
    vanishing form; no lattice theory involved, so the count is independent
    of everything the verification is trying to establish.
    """
    forms = []
    for h in cone.hyperplanes:
        pairs = []
        for exps, coeff in h.terms():
            if coeff.denominator != 1:
                raise ValueError("hyperplane forms must have integer coefficients")
            pairs.append((exps.index(1), int(coeff) % q))
        forms.append(pairs)
    count = 0
    for point in itertools.product(range(q), repeat=cone.ring.nvars):
        for pairs in forms:
            s = 0
            for pos, c in pairs:
                s += c * point[pos]
            if s % q == 0:
                break
        else:
            count += 1
    return count


def _count_worker(args):
    ell, q = args
    return q, count_complement_points(build_shi_cone(ell), q)


def _thread_cap() -> int:
    raw = os.environ.get("SHI_BASIS_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def charpoly_finite_field(ell: int, primes: Sequence[int]) -> UnivariatePoly:
    """Characteristic polynomial of the cone from finite-field point counts.

    Every count is divisible by q(q-1) (the center is a line and the
    arrangement is central and nonempty), so chi(t) = t(t-1) R(t) with
    deg R = ell.  R is interpolated from the first ell+1 primes and the
    remaining primes must land on it exactly, otherwise the counts are
    inconsistent and an ArithmeticError is raised.
    """
    if ell < 1:
        raise ValueError(f"rank must be at least 1, got {ell}")
    primes = list(primes)
    if len(set(primes)) != len(primes):
        raise ValueError("repeated primes in the oracle prime list")
    if len(primes) < ell + 1:
        raise ValueError(
            f"too few primes for interpolation: need at least {ell + 1}, got {len(primes)}"
        )
    for q in primes:
        if not _is_prime(q):
            raise ValueError(f"{q} is not prime")
        if q <= ell + 1:
            raise ValueError(f"prime {q} must exceed ell + 1 = {ell + 1}")

    cap = _thread_cap()
    if cap > 1 and len(primes) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(cap, len(primes))) as pool:
            counts = dict(pool.map(_count_worker, [(ell, q) for q in primes]))
    else:
        cone = build_shi_cone(ell)
        counts = {q: count_complement_points(cone, q) for q in primes}

    values = {}
    for q in primes:
        n = counts[q]
        base = q * (q - 1)
        if n % base:
            raise ArithmeticError(
                f"count {n} at q={q} is not divisible by q(q-1); enumeration is inconsistent"
            )
        values[q] = n // base

    nodes = primes[: ell + 1]
    r_poly = UnivariatePoly()
    for qi in nodes:
        lagrange = UnivariatePoly((1,))
        for qj in nodes:
            if qj == qi:
                continue
            lagrange = lagrange * UnivariatePoly((Rat(-qj, qi - qj), Rat(1, qi - qj)))
        r_poly = r_poly + values[qi] * lagrange
    for q in primes[ell + 1 :]:
        if r_poly(q) != values[q]:
            raise ArithmeticError(
                f"interpolated polynomial disagrees with the count at q={q}"
            )
    return UnivariatePoly((0, 1)) * UnivariatePoly((-1, 1)) * r_poly


def expected_charpoly(ell: int) -> UnivariatePoly:
    """t (t-1) (t - (ell+1))^ell: the polynomial with roots at the exponents."""
    return (
        UnivariatePoly((0, 1))
        * UnivariatePoly((-1, 1))
        * UnivariatePoly((-(ell + 1), 1)) ** ell
    )


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    ell: int
    checks: list[CheckResult]
    saito_constant: object = None
    poincare: UnivariatePoly | None = None
    chambers: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_obj(self) -> dict:
        return {
            "ell": self.ell,
            "checks": [
                {"name": c.name, "status": c.status, "witness": c.witness}
                for c in self.checks
            ],
            "saito_constant": (
                rational_to_str(self.saito_constant)
                if self.saito_constant is not None
                else None
            ),
            "poincare": (
                [int(c) for c in self.poincare.coeffs] if self.poincare else None
            ),
            "chambers": self.chambers,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    def to_text(self) -> str:
        lines = [f"verification report for the rank-{self.ell} cone"]
        for c in self.checks:
            line = f"{c.status.upper():4s} {c.name}"
            if not c.passed and c.witness is not None:
                line += f"  witness: {json.dumps(c.witness, separators=(',', ':'))}"
            lines.append(line)
        if self.saito_constant is not None:
            lines.append(f"saito constant: {rational_to_str(self.saito_constant)}")
        if self.poincare is not None:
            lines.append(f"poincare: {self.poincare}")
        if self.chambers is not None:
            lines.append(f"chambers: {self.chambers}")
        lines.append(f"RESULT: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)")
        return "\n".join(lines)


def _degree_guard(predicted_degree: int, guard: int | None, job: str) -> None:
    if guard is not None and predicted_degree > guard:
        raise DegreeGuardExceeded(
            f"{job} has predicted degree {predicted_degree} > guard {guard}"
        )


def _membership_witness(result: MembershipResult) -> dict | None:
    if result.passed:
        return None
    return {
        "form": str(result.form),
        "remainder": str(result.remainder),
        "form_json": poly_to_json_obj(result.form),
    }


def run_verification(
    ell: int,
    *,
    skip_saito: bool = False,
    oracle_primes: Sequence[int] | None = None,
    max_degree_guard: int | None = None,
) -> VerificationReport:
    """Run every check at rank ell and assemble the report.

    With skip_saito the determinant-driven checks (and everything that needs
    a verified basis: exponents, Poincare polynomial, chamber count) are
    omitted.  The finite-field oracle runs only when primes are supplied.
    """
    cone = build_shi_cone(ell)
    checks: list[CheckResult] = []

    ders = basis(ell)
    for name, theta in zip(basis_names(ell), ders):
        result = check_membership(theta, cone)
        checks.append(CheckResult(f"membership:{name}", result.passed, _membership_witness(result)))

    checks.append(check_lemma_N(ell))
    checks.append(check_factorization_P(ell, max_degree_guard=max_degree_guard))

    saito_constant = None
    pi = None
    chambers = None
    if not skip_saito:
        saito = check_saito(cone, max_degree_guard=max_degree_guard)
        witness = None if saito.passed else {"reason": saito.reason}
        checks.append(CheckResult("saito_criterion", saito.passed, witness))
        if saito.passed:
            saito_constant = saito.constant
            exps = exponents_from_saito(saito)
            expected = expected_exponents(ell)
            checks.append(
                CheckResult(
                    "exponents",
                    exps == expected,
                    None if exps == expected else {"got": exps, "expected": expected},
                )
            )
            pi = poincare_polynomial(ell, saito)
            closed = UnivariatePoly((1, 1)) * UnivariatePoly((1, ell + 1)) ** ell
            checks.append(
                CheckResult(
                    "poincare_factorization",
                    pi == closed,
                    None if pi == closed else {"got": str(pi), "expected": str(closed)},
                )
            )
            chambers = chamber_count(ell, saito)
            expected_chambers = (ell + 2) ** ell
            checks.append(
                CheckResult(
                    "chamber_count",
                    chambers == expected_chambers,
                    None
                    if chambers == expected_chambers
                    else {"got": chambers, "expected": expected_chambers},
                )
            )

    if oracle_primes:
        try:
            chi = charpoly_finite_field(ell, oracle_primes)
        except ArithmeticError as exc:
            checks.append(CheckResult("charpoly_oracle", False, {"error": str(exc)}))
        else:
            expected = expected_charpoly(ell)
            half = abs(chi(-1)) / 2
            ok = chi == expected and half == (ell + 2) ** ell
            checks.append(
                CheckResult(
                    "charpoly_oracle",
                    ok,
                    None if ok else {"chi": str(chi), "expected": str(expected)},
                )
            )

    return VerificationReport(
        ell=ell,
        checks=checks,
        saito_constant=saito_constant,
        poincare=pi,
        chambers=chambers,
    )
