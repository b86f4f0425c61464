"""Command-line front end: construct the basis, verify it, emit artifacts.

All results go to standard output, diagnostics to standard error.  Output is
byte-deterministic for a given command line: no timestamps, no map-iteration
order leaks.  Exit codes: 0 success / all checks pass, 1 verification failure
or an aborted determinant job, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .arrangement import build_shi_cone, defining_polynomial
from .bernoulli import bpq, univariate_to_poly
from .derivations import (
    Derivation,
    basis,
    basis_names,
    derivation_to_json_obj,
    phi,
)
from .polyring import Polynomial, divisible_by_linear, poly_to_json_obj
from .verify import DegreeGuardExceeded, chamber_count, run_verification

USAGE_ERROR = 2
FAILURE = 1


def _positive_rank(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"rank must be an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"rank must be at least 1, got {value}")
    return value


def _parse_primes(text: str) -> list[int] | None:
    if text.strip().lower() == "none":
        return None
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}; expected e.g. 5,7,11,13")


# ---------------------------------------------------------------------------
# LaTeX rendering
# ---------------------------------------------------------------------------


def poly_to_latex(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    nvars = p.ring.nvars
    out = []
    for exps, coeff in p.terms():
        mono = ""
        for pos, e in enumerate(exps):
            if not e:
                continue
            if nvars == 1:
                name = "x"
            elif pos == nvars - 1:
                name = "z"
            else:
                name = f"x_{{{pos + 1}}}"
            mono += name if e == 1 else f"{name}^{{{e}}}"
        num, den = int(coeff.numerator), int(coeff.denominator)
        mag = str(abs(num)) if den == 1 else rf"\frac{{{abs(num)}}}{{{den}}}"
        if mono and mag == "1":
            body = mono
        else:
            body = f"{mag}{mono}" if mono else mag
        if not out:
            out.append(f"-{body}" if num < 0 else body)
        else:
            out.append(f" - {body}" if num < 0 else f" + {body}")
    return "".join(out)


def common_shift_factor(theta: Derivation) -> Polynomial | None:
    """The form x_a - x_{a+1} - z dividing every coefficient, if one exists."""
    ring = theta.ring
    nonzero = [c for c in theta.coeffs if not c.is_zero()]
    if not nonzero:
        return None
    for a in range(1, ring.ell + 1):
        form = ring.x(a) - ring.x(a + 1) - ring.z
        if all(divisible_by_linear(c, form) for c in nonzero):
            return form
    return None


def emit_latex(theta: Derivation, name: str = "\\theta") -> str:
    """One block per derivation, each d/dx_i coefficient on its own line,
    with a common (x_j - x_{j+1} - z) factor pulled out when present."""
    ring = theta.ring
    partials = [f"\\partial_{{{i}}}" for i in range(1, ring.nvars)] + ["\\partial_z"]
    factor = common_shift_factor(theta)
    if factor is not None:
        coeffs = [
            c if c.is_zero() else c.exact_div(factor) for c in theta.coeffs
        ]
        head = f"{name} = \\left({poly_to_latex(factor)}\\right)\\left("
        tail = "\\right)"
    else:
        coeffs = list(theta.coeffs)
        head = f"{name} ="
        tail = ""

    lines = []
    first = True
    for c, partial in zip(coeffs, partials):
        if c.is_zero():
            continue
        if c == 1:
            body = partial
        elif len(c) == 1:
            body = f"{poly_to_latex(c)}{partial}"
        else:
            body = f"\\left({poly_to_latex(c)}\\right){partial}"
        lines.append(f"  {body}" if first else f"  + {body}")
        first = False
    if not lines:
        lines = ["  0"]
    block = [head] + lines
    if tail:
        block.append(tail)
    return "\n".join(block)


def _latex_name(name: str) -> str:
    if name.startswith("eta"):
        return f"\\eta_{{{name[3:]}}}"
    if name.startswith("phi_"):
        return f"\\varphi_{{{name[4:]}}}"
    return name


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _selected_basis(args) -> tuple[list[str], list[Derivation]]:
    if args.j is not None:
        if not 1 <= args.j <= args.ell:
            raise ValueError(f"--j must lie in 1..{args.ell}, got {args.j}")
        return [f"phi_{args.j}"], [phi(args.j, args.ell)]
    return basis_names(args.ell), basis(args.ell)


def cmd_construct(args) -> int:
    names, ders = _selected_basis(args)
    if args.format == "json":
        doc = {
            "ell": args.ell,
            "derivations": [derivation_to_json_obj(n, d) for n, d in zip(names, ders)],
        }
        print(json.dumps(doc, separators=(",", ":")))
    elif args.format == "latex":
        blocks = [emit_latex(d, _latex_name(n)) for n, d in zip(names, ders)]
        print("\n\n".join(blocks))
    else:
        for n, d in zip(names, ders):
            print(f"{n} = {d}")
    return 0


def cmd_verify(args) -> int:
    report = run_verification(
        args.ell,
        skip_saito=args.skip_saito,
        oracle_primes=args.oracle_primes,
        max_degree_guard=args.max_degree_guard,
    )
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return 0 if report.passed else FAILURE


def cmd_arrangement(args) -> int:
    cone = build_shi_cone(args.ell)
    if args.emit == "hyperplanes":
        doc = {
            "ell": args.ell,
            "hyperplanes": [poly_to_json_obj(h) for h in cone.hyperplanes],
        }
        print(json.dumps(doc, separators=(",", ":")))
    else:
        print(json.dumps(poly_to_json_obj(defining_polynomial(cone)), separators=(",", ":")))
    return 0


def cmd_bernoulli(args) -> int:
    max_p, max_q = args.table
    if max_p < 0 or max_q < 0:
        raise ValueError("table bounds must be non-negative")
    table = []
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            table.append(
                {"p": p, "q": q, "poly": poly_to_json_obj(univariate_to_poly(bpq(p, q)))}
            )
    print(json.dumps({"max_p": max_p, "max_q": max_q, "table": table}, separators=(",", ":")))
    return 0


def cmd_chambers(args) -> int:
    print(chamber_count(args.ell))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shibasis",
        description=(
            "Construct the explicit basis eta1, eta2, phi_1..phi_ell for the "
            "derivation module of the cone over the rank-ell Shi arrangement, "
            "and verify it over exact rationals."
        ),
        epilog="SHI_BASIS_THREADS caps parallelism of the finite-field oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_construct = sub.add_parser("construct", help="emit the basis derivations")
    p_construct.add_argument("--ell", type=_positive_rank, required=True)
    p_construct.add_argument("--j", type=int, default=None, help="emit only phi_j")
    p_construct.add_argument("--format", choices=("json", "latex", "text"), default="text")
    p_construct.set_defaults(func=cmd_construct)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--ell", type=_positive_rank, required=True)
    p_verify.add_argument("--skip-saito", action="store_true")
    p_verify.add_argument(
        "--oracle-primes",
        type=_parse_primes,
        default=None,
        metavar="5,7,11,13",
        help="run the finite-field oracle on these primes ('none' disables)",
    )
    p_verify.add_argument(
        "--max-degree-guard",
        type=int,
        default=None,
        metavar="N",
        help="abort determinant jobs whose predicted degree exceeds N",
    )
    p_verify.add_argument("--format", choices=("json", "text"), default="text")
    p_verify.set_defaults(func=cmd_verify)

    p_arr = sub.add_parser("arrangement", help="emit Q or the hyperplane list")
    p_arr.add_argument("--ell", type=_positive_rank, required=True)
    p_arr.add_argument("--emit", choices=("q", "hyperplanes"), default="q")
    p_arr.set_defaults(func=cmd_arrangement)

    p_bern = sub.add_parser("bernoulli", help="emit a table of B_{p,q} polynomials")
    p_bern.add_argument("--table", type=int, nargs=2, required=True, metavar=("P", "Q"))
    p_bern.set_defaults(func=cmd_bernoulli)

    p_ch = sub.add_parser("chambers", help="chamber count of the rank-ell Shi arrangement")
    p_ch.add_argument("--ell", type=_positive_rank, required=True)
    p_ch.set_defaults(func=cmd_chambers)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegreeGuardExceeded as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
