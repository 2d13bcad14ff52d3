"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line (shown in the terminal summary).
Criterion 8 sweeps every prime up to 10^6 six times and dominates the run.
"""

import math
import re
import time
from fractions import Fraction

import numpy as np
import pytest

from matrixpoints import cli
from matrixpoints import stat_sweep as ss
from matrixpoints.brute_oracle import oracle_elliptic
from matrixpoints.count_engines import (
    elliptic_error,
    elliptic_matrix_count,
    k3_matrix_count,
    k3_supersingular_count,
    supersingular_elliptic_count,
)
from matrixpoints.curve_traces import K3Parameter, frobenius, frobenius_from_trace, reduce_curve
from matrixpoints.densities import DensityKind, density, interval_probability
from matrixpoints.field_arith import prime_pi, primes_up_to
from matrixpoints.q_combinatorics import P_poly
from matrixpoints.verify import CM_CURVE, NON_CM_CURVE, TEST_CURVES, bound_violations, good_primes

X_SWEEP = 10**6
THRESHOLD = 0.05


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def test_criterion_1_n1_identity(acceptance):
    mismatches, checked = [], 0
    with Timer() as t:
        for model in TEST_CURVES:
            for p in good_primes(model, 3, 10**4):
                curve = reduce_curve(model, p)
                a = frobenius(curve).a
                formula = elliptic_matrix_count(1, frobenius_from_trace(a, p)).value
                oracle = oracle_elliptic(1, curve).value
                checked += 1
                if not formula == p - a == oracle:
                    mismatches.append((str(model), p))
    ok = not mismatches and checked > 2400 and t.seconds < 30
    assert acceptance("1", ok, f"{checked} (curve, p) pairs, {len(mismatches)} mismatches, {t.seconds:.1f} s")


def test_criterion_2_n2_oracle(acceptance):
    rows = []
    with Timer() as t:
        for p in (3, 5, 7, 11, 13):
            curve = reduce_curve(CM_CURVE, p)
            rows.append((p, elliptic_matrix_count(2, frobenius(curve, 2)).value, oracle_elliptic(2, curve).value))
    ok = all(f == o for _, f, o in rows) and rows[0][1:] == (99, 99) and t.seconds < 60
    assert acceptance("2", ok, f"(p, formula, oracle) = {rows}, {t.seconds:.1f} s")


def test_criterion_3_supersingular_closed_form(acceptance):
    bad, checked = [], 0
    with Timer() as t:
        for p in primes_up_to(97).tolist()[1:]:
            for n in range(1, 6):
                checked += 1
                if supersingular_elliptic_count(n, p).value != elliptic_matrix_count(n, frobenius_from_trace(0, p, n)).value:
                    bad.append((n, p))
    ok = not bad and checked == 24 * 5 and t.seconds < 10
    assert acceptance("3", ok, f"{checked} (n, p) cases, mismatches {bad}, {t.seconds:.2f} s")


def test_criterion_4_error_term_consistency(acceptance):
    bad, checked = [], 0
    with Timer() as t:
        for model in TEST_CURVES:
            for p in good_primes(model, 3, 50):
                frob = frobenius(reduce_curve(model, p), 4)
                for n in range(1, 5):
                    et = elliptic_error(n, frob, check=False)
                    checked += 1
                    if P_poly(n, 0, p) - et.a_en != elliptic_matrix_count(n, frob).value:
                        bad.append((str(model), n, p))
        at3 = elliptic_error(2, frobenius_from_trace(0, 3, 2))
        hand = (P_poly(2, 0, 3), at3.a_en, elliptic_matrix_count(2, frobenius_from_trace(0, 3, 2)).value)
    ok = not bad and hand == (117, 18, 99) and t.seconds < 10
    assert acceptance("4", ok, f"{checked} cases, mismatches {bad}; (P(2,0), a_E2, N_2) at p=3 = {hand}, {t.seconds:.2f} s")


def test_criterion_5_bound_suites(acceptance):
    with Timer() as t:
        results = {str(m): bound_violations(m, 4, 10**4) for m in TEST_CURVES}
    total = sum(v.total for v in results.values())
    checked = sum(v.checked for v in results.values())
    ok = total == 0 and checked > 9000 and t.seconds < 120
    assert acceptance("5", ok, f"{checked} (curve, p, n) cases, {total} violations, {t.seconds:.1f} s")


def test_criterion_6_k3_supersingular(acceptance):
    bad, checked = [], 0
    with Timer() as t:
        for n in range(0, 5):
            for p in (3, 5, 7, 11, 13):
                for gamma in (1, -1):
                    checked += 1
                    lhs = k3_supersingular_count(n, gamma, p).value
                    rhs = k3_matrix_count(n, frobenius_from_trace(0, p, max(n, 1)), gamma).value
                    if lhs != rhs:
                        bad.append((n, p, gamma))
    ok = not bad and t.seconds < 30
    assert acceptance("6", ok, f"{checked} (n, p, gamma) cases, mismatches {bad}, {t.seconds:.2f} s")


def _k3_rows(text):
    rows = {}
    for line in text.splitlines():
        m = re.match(r"\s*(-?\d+(?:/\d+)?)\s+(\d+)\s+(-?1)\s+(-?\d+)\s+(-?\d+(?:/\d+)?)\s+(\S+)\s+(\d+)\s+(yes|no)$", line)
        if m:
            lam, p, _, _, formula, verdict, oracle, _ = m.groups()
            rows[(Fraction(lam), int(p))] = (Fraction(formula), verdict, int(oracle))
    return rows


def test_criterion_7_k3_oracle_report(acceptance, capsys):
    with Timer() as t:
        code = cli.run(["verify", "--suite", "oracle", "--pmax", "50"])
    out = capsys.readouterr().out
    rows = _k3_rows(out)
    lams = {lam for lam, _ in rows}
    checks = {
        "exit 0": code == 0,
        "all four lambdas": lams == {Fraction(1), Fraction(3), Fraction(5), Fraction(-4)},
        "(1,3) agrees at 0": rows.get((1, 3), (None,) * 3)[0] == 0 and rows[(1, 3)][2] == 0,
        "(1,5) oracle 12": rows.get((1, 5), (None,) * 3)[2] == 12,
        "(1,7) non-integer": rows.get((1, 7), (None,) * 3)[1] == "rational-non-integer",
        "oracle even": all(o % 2 == 0 for _, _, o in rows.values()),
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    assert acceptance("7", ok, f"{len(rows)} per-prime rows, failed checks {failed}, {t.seconds:.1f} s")


def test_criterion_8a_non_cm_semicircle(acceptance):
    with Timer() as t:
        recs = ss.sweep_elliptic(NON_CM_CURVE, 2, X_SWEEP)
        d = ss.discrepancy(recs, DensityKind.SEMICIRCLE)
    bound = ss.effective_bound(11, X_SWEEP)
    lemma_ok = all(abs(r.r_star) <= ss.LEMMA_R / r.p for r in recs)
    ok = d <= THRESHOLD and d <= bound and lemma_ok and len(recs) == prime_pi(X_SWEEP) - 3 and t.seconds <= 600
    assert acceptance(
        "8a",
        ok,
        f"y^2 = x^3 - 432x + 8208, n=2, {len(recs)} primes: discrepancy {d:.4f} (<= {THRESHOLD}; "
        f"explicit bound {bound:.2f} holds trivially), {t.seconds:.0f} s",
    )


def test_criterion_8b_cm_arcsine(acceptance):
    with Timer() as t:
        recs = ss.sweep_elliptic(CM_CURVE, 2, X_SWEEP, cm_disc=-4)
        split = [r for r in recs if r.split]
        d = ss.discrepancy(split, DensityKind.ARCSINE)
    inert = [r for r in recs if r.split is False]
    inert_ok = all(r.a == 0 and abs(r.star_error) <= ss.LEMMA_R / r.p for r in inert)
    ok = d <= THRESHOLD and inert_ok and len(split) + len(inert) == len(recs) and t.seconds <= 600
    assert acceptance(
        "8b",
        ok,
        f"y^2 = x^3 + x, n=2: {len(split)} split primes, discrepancy {d:.4f}; "
        f"{len(inert)} inert primes within 14.1339/p: {inert_ok}, {t.seconds:.0f} s",
    )


@pytest.mark.parametrize(
    "lam, kind",
    [(5, DensityKind.B1), (3, DensityKind.B2), (1, DensityKind.B3), (-4, DensityKind.B4)],
)
def test_criterion_8c_k3_batman(acceptance, lam, kind):
    param = K3Parameter(lam)
    expected_kind, split_only = param.regime()
    with Timer() as t:
        recs = ss.sweep_k3(lam, 2, X_SWEEP)
        used = [r for r in recs if r.split] if split_only else recs
        d = ss.discrepancy(used, kind)
    ok = expected_kind == kind.value and d <= THRESHOLD and t.seconds <= 600
    scope = f"split primes of Q(sqrt({param.cm_discriminant}))" if split_only else "all good primes"
    assert acceptance(
        f"8c[lambda={lam}]",
        ok,
        f"vs {kind.value} over {len(used)} {scope}: discrepancy {d:.4f}, {t.seconds:.0f} s",
    )


def test_criterion_9_density_identities(acceptance):
    with Timer() as t:
        grid = np.linspace(-3, 3, 1000)
        mix1 = float(np.max(np.abs(density("b1", grid) - (density("b2", grid) + density("b2", -grid)) / 2)))
        mix3 = float(np.max(np.abs(density("b3", grid) - (density("b4", grid) + density("b4", -grid)) / 2)))
        mass = {k.value: interval_probability(k, *k.support) for k in DensityKind}
        u = np.linspace(-2, 2, 1001)
        u = u[(u != 0) & (np.abs(u) < 2)]
        tt = u * u - 1
        push = float(np.max(np.abs(density("semicircle", u) / np.abs(u) - density("b2", tt))))
    mass_err = max(abs(v - 1) for v in mass.values())
    ok = mix1 <= 1e-12 and mix3 <= 1e-12 and mass_err <= 1e-6 and push <= 1e-9 and t.seconds < 5
    assert acceptance(
        "9",
        ok,
        f"mixture errors {mix1:.1e}, {mix3:.1e}; max |mass - 1| {mass_err:.1e}; pushforward error {push:.1e}, {t.seconds:.2f} s",
    )


def test_criterion_10_prime_counting(acceptance):
    rows = []
    with Timer() as t:
        for X in (17, 10**2, 10**3, 10**4, 10**5, 10**6):
            lo, hi = ss.prime_count_bounds(X)
            pi = prime_pi(X)
            rows.append((X, pi, lo < pi < hi))
    ok = all(r[2] for r in rows) and t.seconds < 10
    assert acceptance("10", ok, f"(X, pi(X), inside) = {rows}, {t.seconds:.2f} s")
