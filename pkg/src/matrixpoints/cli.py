"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import stat_sweep as ss
from .brute_oracle import DEFAULT_BUDGET, oracle_elliptic, oracle_k3
from .count_engines import (
    ReferencePolynomials,
    elliptic_matrix_count,
    k3_matrix_count,
    k3_supersingular_count,
    supersingular_elliptic_count,
)
from .curve_traces import (
    CM_TABLE,
    HALF_FLYING_LAMBDAS,
    HALF_FLYING_NOTE,
    K3Parameter,
    RationalCurveModel,
    clausen_curve,
    frobenius,
    k3_gamma,
    parse_rational,
    reduce_curve,
)
from .densities import DensityKind
from .errors import FormulaError, MatrixPointsError, NotSupersingular
from .field_arith import require_odd_prime
from .q_combinatorics import ELLIPTIC_DUMP_HEADER, K3_DUMP_HEADER, write_term_dump
from .verify import SUITES, run_suite

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

LEMMA_NOTE = (
    f"|R*| <= {ss.LEMMA_R}/p is the lemma's constant; the theorem's proof quotes {ss.LEMMA_R_PROOF}. "
    "Checks use the lemma's value."
)
K3_NOTE = "star_error is gamma((a/sqrt p)^2 - 1) from the Clausen trace for every n; r_star needs a reference file."


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matrixpoints", description="Matrix point counts on elliptic curves and K3 surfaces.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log skipped primes and progress")
    sub = ap.add_subparsers(dest="command", required=True)

    count = sub.add_parser("count", help="N_n over F_p by formula, closed form or enumeration")
    csub = count.add_subparsers(dest="target", required=True)
    for name in ("elliptic", "k3"):
        c = csub.add_parser(name)
        if name == "elliptic":
            c.add_argument("--curve", required=True, help="a1,a2,a3,a4,a6")
        else:
            c.add_argument("--lambda", dest="lam", required=True, help="NUM/DEN or integer")
        c.add_argument("--p", type=int, required=True)
        c.add_argument("--n", type=_nonneg if name == "k3" else _positive, required=True)
        c.add_argument("--method", choices=("formula", "oracle", "supersingular"), default="formula")
        c.add_argument("--dump-terms", metavar="FILE", help="write per-term CSV (formula and supersingular)")
        c.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="oracle candidate budget")
        c.add_argument("--workers", type=_positive, help="oracle worker processes")

    tr = sub.add_parser("trace", help="trace of Frobenius a_E(p)")
    tr.add_argument("--curve", required=True)
    tr.add_argument("--p", type=int, required=True)
    tr.add_argument("--powers", type=_positive, metavar="K", help="print a_E(p^k) for k = 1..K")

    sw = sub.add_parser("sweep", help="per-prime normalized errors up to X")
    ssub = sw.add_subparsers(dest="target", required=True)
    for name in ("elliptic", "k3"):
        s = ssub.add_parser(name)
        if name == "elliptic":
            s.add_argument("--curve", required=True)
            s.add_argument("--cm-disc", type=int, help="negative discriminant D of the CM field")
            s.add_argument("--verify", action="store_true", help="certify each exact error against the count formula")
        else:
            s.add_argument("--lambda", dest="lam", required=True)
            s.add_argument("--reference", metavar="JSON", help="Q/R polynomial file for the r_star column")
        s.add_argument("--n", type=_positive, required=True)
        s.add_argument("--xmax", type=int, required=True)
        s.add_argument("--out", required=True)
        s.add_argument("--workers", type=_positive)

    h = sub.add_parser("hist", help="histogram and discrepancy of a sweep file")
    h.add_argument("--in", dest="infile", required=True)
    h.add_argument("--bins", type=_positive, required=True)
    h.add_argument("--density", required=True, choices=[k.value for k in DensityKind])
    h.add_argument("--split-only", action="store_true")
    h.add_argument("--grid-points", type=int, default=401, help="interval endpoints for the discrepancy")
    h.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--nmax", type=_positive)
    v.add_argument("--pmax", type=int)
    return ap


# --- subcommands -------------------------------------------------------------


def _dump(path, header, result) -> None:
    if path and result.terms is not None:
        write_term_dump(path, header, result.terms)


def cmd_count_elliptic(args) -> int:
    model = RationalCurveModel.parse(args.curve)
    curve = reduce_curve(model, args.p)
    if args.method == "oracle":
        res = oracle_elliptic(args.n, curve, budget=args.budget, workers=args.workers)
        print(res.value)
        print(f"visited {res.visited} candidates in {res.seconds:.3f} s", file=sys.stderr)
        return EXIT_OK
    frob = frobenius(curve, args.n)
    if args.method == "supersingular":
        if frob.a != 0:
            raise NotSupersingular(f"a_E({args.p}) = {frob.a} is not 0")
        res = supersingular_elliptic_count(args.n, args.p, dump_terms=bool(args.dump_terms))
    else:
        res = elliptic_matrix_count(args.n, frob, dump_terms=bool(args.dump_terms))
    _dump(args.dump_terms, ELLIPTIC_DUMP_HEADER, res)
    print(res.value)
    return EXIT_OK


def cmd_count_k3(args) -> int:
    lam = parse_rational(args.lam)
    p = require_odd_prime(args.p)
    if args.method == "oracle":
        res = oracle_k3(args.n, lam, p, budget=args.budget, workers=args.workers)
        print(res.value)
        print(f"visited {res.visited} candidates in {res.seconds:.3f} s", file=sys.stderr)
        return EXIT_OK
    frob = frobenius(clausen_curve(lam, p), max(args.n, 1))
    gamma = k3_gamma(lam, p)
    if args.method == "supersingular":
        if frob.a != 0:
            raise NotSupersingular(f"Clausen trace at p = {p} is {frob.a}, not 0")
        res = k3_supersingular_count(args.n, gamma, p, dump_terms=bool(args.dump_terms))
    else:
        res = k3_matrix_count(args.n, frob, gamma, dump_terms=bool(args.dump_terms))
    _dump(args.dump_terms, K3_DUMP_HEADER, res)
    print(f"{res.value} {res.verdict.value}")
    return EXIT_OK


def cmd_trace(args) -> int:
    curve = reduce_curve(RationalCurveModel.parse(args.curve), args.p)
    frob = frobenius(curve, args.powers or 1)
    if args.powers:
        print(" ".join(str(frob.power(k)) for k in range(1, args.powers + 1)))
    else:
        print(frob.a)
    return EXIT_OK


def _skips_meta(skipped) -> list[dict]:
    return [{"p": s.p, "reason": s.reason} for s in skipped]


def cmd_sweep(args) -> int:
    skipped: list = []
    if args.target == "elliptic":
        model = RationalCurveModel.parse(args.curve, cm_discriminant=args.cm_disc)
        it = ss.iter_sweep_elliptic(model, args.n, args.xmax, workers=args.workers, skipped=skipped, verify=args.verify)
        meta = {
            "target": "elliptic",
            "curve": str(model),
            "cm_discriminant": args.cm_disc,
            "suggested_density": "arcsine (split primes)" if args.cm_disc else "semicircle",
            "notes": [LEMMA_NOTE],
        }
    else:
        k3 = K3Parameter(parse_rational(args.lam))
        ref = ReferencePolynomials.load(args.reference) if args.reference else None
        it = ss.iter_sweep_k3(k3.lam, args.n, args.xmax, workers=args.workers, skipped=skipped, reference=ref)
        kind, split_only = k3.regime()
        notes = [K3_NOTE]
        if k3.lam in HALF_FLYING_LAMBDAS:
            notes.append(HALF_FLYING_NOTE)
        meta = {
            "target": "k3",
            "lambda": str(k3.lam),
            "cm_discriminant": CM_TABLE.get(k3.lam),
            "suggested_density": kind,
            "split_only": split_only,
            "notes": notes,
        }
    count = ss.write_records(args.out, it)
    meta.update(n=args.n, X=args.xmax, records=count, skipped=_skips_meta(skipped))
    ss.write_metadata(args.out, meta)
    print(f"wrote {count} records to {args.out}")
    return EXIT_OK


def cmd_hist(args) -> int:
    records = ss.read_records(args.infile)
    if args.split_only:
        records = [r for r in records if r.split]
    kind = DensityKind(args.density)
    hist = ss.histogram(records, args.bins, kind=kind)
    grid = ss.default_grid(kind, args.grid_points)
    hist.discrepancy = ss.discrepancy(records, kind, grid)
    meta = ss.read_metadata(args.infile)
    meta.update(split_only=args.split_only, grid_points=args.grid_points)
    hist.metadata = meta
    hist.write_json(args.out)
    print(f"discrepancy {hist.discrepancy:.6f} over {hist.sample_size} records")
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, nmax=args.nmax, pmax=args.pmax)
    print(rep.render())
    return EXIT_OK if rep.ok else EXIT_VERIFY


def dispatch(args) -> int:
    if args.command == "count":
        return cmd_count_elliptic(args) if args.target == "elliptic" else cmd_count_k3(args)
    if args.command == "trace":
        return cmd_trace(args)
    if args.command == "sweep":
        return cmd_sweep(args)
    if args.command == "hist":
        return cmd_hist(args)
    return cmd_verify(args)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return dispatch(args)
    except FormulaError as exc:
        print(f"error: certificate failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except MatrixPointsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
