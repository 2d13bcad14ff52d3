"""Ground-truth matrix point counts by exhaustive enumeration.

For each matrix A the second coordinate B only ranges over the commutant of
A (a kernel computed over F_p), and for the K3 surface the square root C
ranges over the joint commutant of A and B. Matrices are numpy int64 arrays
with entries in [0, p).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .curve_traces import ReducedCurve, check_lambda, clausen_bad_prime
from .errors import BadPrime, BudgetExceeded, DomainError
from .field_arith import require_odd_prime
from .parallel import chunks, worker_count

DEFAULT_BUDGET = 10**9


@dataclass
class OracleCount:
    value: int
    visited: int
    seconds: float


# --- linear algebra over F_p ----------------------------------------------


def nullspace_mod_p(rows, ncols: int, p: int) -> list[list[int]]:
    """Basis of {v : M v = 0} over F_p, M given as a list of rows."""
    m = [[x % p for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc] % p
        basis.append(v)
    return basis


def _commutator_rows(A, n: int):
    """Rows of the linear map X -> AX - XA acting on row-major vec(X)."""
    rows = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            for k in range(n):
                row[k * n + j] += int(A[i][k])
                row[i * n + k] -= int(A[k][j])
            rows.append(row)
    return rows


def commutant_basis(mats, p: int) -> np.ndarray:
    """Basis (d, n, n) of the matrices commuting with every matrix in ``mats``."""
    mats = [np.asarray(M) for M in mats]
    n = mats[0].shape[0]
    rows = []
    for M in mats:
        rows.extend(_commutator_rows(M.tolist(), n))
    basis = nullspace_mod_p(rows, n * n, p)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n, n)


@lru_cache(maxsize=64)
def _coefficient_grid(d: int, p: int) -> np.ndarray:
    """All vectors of F_p^d, shape (p^d, d)."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axes = np.meshgrid(*([np.arange(p, dtype=np.int64)] * d), indexing="ij")
    return np.stack([ax.ravel() for ax in axes], axis=1)


def span_mod_p(basis: np.ndarray, p: int) -> np.ndarray:
    d, n, _ = basis.shape
    coeffs = _coefficient_grid(d, p)
    return (coeffs @ basis.reshape(d, n * n) % p).reshape(-1, n, n)


def commutant(A, p: int) -> np.ndarray:
    """Every B with AB = BA, shape (p^d, n, n)."""
    A = np.asarray(A, dtype=np.int64) % p
    if A.shape[0] > 3:
        raise DomainError("commutant enumeration supports n <= 3")
    return span_mod_p(commutant_basis([A], p), p)


def all_matrices(n: int, p: int, lo: int = 0, hi: int | None = None) -> np.ndarray:
    """Matrices with index in [lo, hi) of the base-p enumeration of F_p^{n x n}."""
    total = p ** (n * n)
    hi = total if hi is None else hi
    idx = np.arange(lo, hi, dtype=np.int64)
    digits = np.empty((idx.size, n * n), dtype=np.int64)
    for k in range(n * n):
        digits[:, k] = idx % p
        idx = idx // p
    return digits.reshape(-1, n, n)


def _mm(X, Y, p):
    return np.einsum("...ij,...jk->...ik", X, Y) % p


def det_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a stack (..., n, n) with n <= 3, reduced mod p."""
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0] % p
    if n == 2:
        return (M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]) % p
    if n == 3:
        a, b, c = M[..., 0, 0], M[..., 0, 1], M[..., 0, 2]
        d, e, f = M[..., 1, 0], M[..., 1, 1], M[..., 1, 2]
        g, h, i = M[..., 2, 0], M[..., 2, 1], M[..., 2, 2]
        return (a * ((e * i - f * h) % p) - b * ((d * i - f * g) % p) + c * ((d * h - e * g) % p)) % p
    raise DomainError("determinant supports n <= 3")


# --- elliptic curves -------------------------------------------------------


def _elliptic_rhs(A, coeffs, p):
    """A^3 + a2 A^2 + a4 A + a6 I in Horner form."""
    _, a2, _, a4, a6 = coeffs
    eye = np.eye(A.shape[0], dtype=np.int64)
    X = (A + a2 * eye) % p
    X = (_mm(X, A, p) + a4 * eye) % p
    return (_mm(X, A, p) + a6 * eye) % p


def _elliptic_chunk(args):
    n, p, coeffs, lo, hi = args
    a1, _, a3, _, _ = coeffs
    count = visited = 0
    for A in all_matrices(n, p, lo, hi):
        rhs = _elliptic_rhs(A, coeffs, p)
        Bs = span_mod_p(commutant_basis([A], p), p)
        lhs = (_mm(Bs, Bs, p) + a1 * _mm(A, Bs, p) + a3 * Bs) % p
        count += int(np.all(lhs == rhs, axis=(1, 2)).sum())
        visited += Bs.shape[0]
    return count, visited


def _elliptic_n1(curve: ReducedCurve):
    """Affine points by enumerating every (x, y); the y-histogram is shared by
    all x with the same coefficient a1 x + a3 of y."""
    p = curve.p
    a1, a2, a3, a4, a6 = curve.coefficients
    xs = np.arange(p, dtype=np.int64)
    ys = xs
    rhs = ((((xs + a2) * xs % p + a4) * xs) % p + a6) % p
    lin = (a1 * xs + a3) % p
    count = visited = 0
    for c in np.unique(lin):
        hist = np.bincount((ys * ys + c * ys) % p, minlength=p)
        sel = lin == c
        count += int(hist[rhs[sel]].sum())
        visited += p * int(sel.sum())
    return count, visited


def estimate_elliptic(n: int, p: int, a1: int = 0) -> int:
    """Rough number of (A, B) candidates: generic commutants have dimension n."""
    if n == 1:
        return p * p if a1 % p else 2 * p
    return p ** (n * n) * (p**n + p)


def oracle_elliptic(n: int, curve: ReducedCurve, budget: int = DEFAULT_BUDGET, workers: int | None = None) -> OracleCount:
    """N_n(E, F_p) by enumerating commuting pairs (A, B)."""
    if n < 1 or n > 3:
        raise DomainError(f"oracle supports 1 <= n <= 3, got {n}")
    p = curve.p
    est = estimate_elliptic(n, p, curve.a1)
    if est > budget:
        raise BudgetExceeded(f"estimated {est} candidate checks exceeds budget {budget}")
    t0 = time.perf_counter()
    if n == 1:
        count, visited = _elliptic_n1(curve)
    else:
        jobs = [(n, p, curve.coefficients, lo, hi) for lo, hi in chunks(p ** (n * n), 4 * worker_count(workers))]
        count, visited = _run(_elliptic_chunk, jobs, workers)
    return OracleCount(count, visited, time.perf_counter() - t0)


def _run(fn, jobs, workers):
    w = worker_count(workers)
    if w == 1 or len(jobs) == 1:
        results = [fn(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=w) as ex:
            results = list(ex.map(fn, jobs))
    return sum(r[0] for r in results), sum(r[1] for r in results)


# --- K3 surfaces -------------------------------------------------------------


def _k3_chunk(args):
    n, p, lam, lo, hi = args
    eye = np.eye(n, dtype=np.int64)
    count = visited = 0
    for A in all_matrices(n, p, lo, hi):
        Bs = span_mod_p(commutant_basis([A], p), p)
        A1 = (A + eye) % p
        for B in Bs:
            # R = A B (A + I)(B + I)(A + lam B)
            R = _mm(_mm(_mm(_mm(A, B, p), A1, p), (B + eye) % p, p), (A + lam * B) % p, p)
            Cs = span_mod_p(commutant_basis([A, B], p), p)
            visited += Cs.shape[0]
            ok = np.all(_mm(Cs, Cs, p) == R, axis=(1, 2)) & (det_mod_p(Cs, p) != 0)
            count += int(ok.sum())
    return count, visited


def _k3_n1(p: int, lam: int):
    roots = np.zeros(p, dtype=np.int64)
    s = np.arange(1, p, dtype=np.int64)
    np.add.at(roots, s * s % p, 1)
    xs = np.arange(p, dtype=np.int64)
    count = 0
    for x in range(p):
        f = x * xs % p * ((x + 1) % p) % p * ((xs + 1) % p) % p * ((x + lam * xs) % p) % p
        count += int(roots[f].sum())
    return count, p * p * (p - 1)


def estimate_k3(n: int, p: int) -> int:
    if n == 1:
        return p * p * (p - 1)
    return p ** (n * n) * (p**n + p) * p**n


def oracle_k3(n: int, lam, p: int, budget: int = DEFAULT_BUDGET, workers: int | None = None) -> OracleCount:
    """N_n(X_lambda, F_p): commuting (A, B, C), C invertible, C^2 = AB(A+I)(B+I)(A+lam B)."""
    if n < 1 or n > 3:
        raise DomainError(f"oracle supports 1 <= n <= 3, got {n}")
    lam = check_lambda(Fraction(lam))
    p = require_odd_prime(p)
    if clausen_bad_prime(lam, p):
        raise BadPrime(f"lambda = {lam} or lambda + 1 degenerates mod {p}")
    lam_p = lam.numerator * pow(lam.denominator, -1, p) % p
    est = estimate_k3(n, p)
    if est > budget:
        raise BudgetExceeded(f"estimated {est} candidate checks exceeds budget {budget}")
    t0 = time.perf_counter()
    if n == 1:
        count, visited = _k3_n1(p, lam_p)
    else:
        jobs = [(n, p, lam_p, lo, hi) for lo, hi in chunks(p ** (n * n), 4 * worker_count(workers))]
        count, visited = _run(_k3_chunk, jobs, workers)
    return OracleCount(count, visited, time.perf_counter() - t0)
