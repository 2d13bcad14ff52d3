"""Prime sweeps, histograms, discrepancies and explicit bounds."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import _kernels
from .count_engines import ReferencePolynomials, elliptic_error, k3_reference_star, k3_star_error
from .curve_traces import (
    CM_TABLE,
    FrobeniusData,
    RationalCurveModel,
    check_hasse,
    check_lambda,
    clausen_bad_prime,
    clausen_parameter,
    k3_gamma,
    prime_power_traces,
)
from .densities import as_kind, cdf_on_grid, default_grid, density
from .errors import DomainError, EmptySample
from .field_arith import prime_pi, primes_up_to
from .parallel import worker_count

log = logging.getLogger(__name__)

# explicit constants
LEMMA_Q = 3.0
LEMMA_S = 11.5247
LEMMA_T = 12.6305
LEMMA_R = 14.1339
LEMMA_R_PROOF = 14.15  # the same constant as quoted inside the proof
POCHHAMMER_LOWER = 0.5601
PNT_UPPER = 1.2551
EFFECTIVE_CONSTANT = 58.44
HOEY_CONSTANT = 58.1
X_INV_SQRT_CONSTANT = 0.2429

RECORD_HEADER = ["p", "a", "supersingular", "split", "star_error", "r_star"]


@dataclass
class SweepRecord:
    p: int
    a: int
    supersingular: bool
    split: Optional[bool]
    star_error: float
    r_star: Optional[float] = None


@dataclass
class Skip:
    p: int
    reason: str


# --- record files ------------------------------------------------------------


def _fmt_float(x: Optional[float]) -> str:
    return "" if x is None else format(x, ".17g")


def _fmt_bool(x: Optional[bool]) -> str:
    return "" if x is None else str(int(x))


def write_records(path, records: Iterable[SweepRecord]) -> int:
    """Stream records to CSV; returns the number written."""
    n = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow(
                [r.p, r.a, _fmt_bool(r.supersingular), _fmt_bool(r.split), _fmt_float(r.star_error), _fmt_float(r.r_star)]
            )
            n += 1
    return n


def read_records(path) -> list[SweepRecord]:
    out = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header != RECORD_HEADER:
            raise DomainError(f"{path}: expected header {','.join(RECORD_HEADER)}, got {header}")
        for row in rd:
            p, a, ss, sp, st, rs = row
            out.append(
                SweepRecord(
                    p=int(p),
                    a=int(a),
                    supersingular=bool(int(ss)),
                    split=None if sp == "" else bool(int(sp)),
                    star_error=float(st),
                    r_star=None if rs == "" else float(rs),
                )
            )
    return out


def metadata_path(path) -> str:
    return f"{path}.meta.json"


def write_metadata(path, meta: dict) -> None:
    with open(metadata_path(path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_metadata(path) -> dict:
    try:
        with open(metadata_path(path)) as fh:
            return json.load(fh)
    except FileNotFoundError:
        return {}


# --- traces over many primes ---------------------------------------------


def traces_for(primes: np.ndarray, b2, b4, b6, workers: int | None = None) -> np.ndarray:
    """Traces of Frobenius for per-prime reduced b-invariants, on a thread pool.

    The compiled kernel releases the GIL, so threads run in parallel.
    """
    primes = np.asarray(primes, dtype=np.int64)
    b2, b4, b6 = (np.asarray(b, dtype=np.int64) for b in (b2, b4, b6))
    w = worker_count(workers)
    if w == 1 or primes.size < 64:
        return _kernels.traces(primes, b2, b4, b6)
    # strided slices balance work: large primes are spread across tasks
    parts = min(8 * w, primes.size)
    out = np.empty(primes.size, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=w) as ex:
        futs = {k: ex.submit(_kernels.traces, primes[k::parts], b2[k::parts], b4[k::parts], b6[k::parts]) for k in range(parts)}
        for k, fut in futs.items():
            out[k::parts] = fut.result()
    return out


def _sweep_primes(X: int) -> np.ndarray:
    if X < 17:
        raise DomainError(f"X must be >= 17, got {X}")
    ps = primes_up_to(X)
    return ps[ps >= 3]


def _split_flag(D: Optional[int], p: int) -> Optional[bool]:
    if D is None or D % p == 0:
        return None
    return pow(D % p, (p - 1) // 2, p) == 1


def _batches(ps: np.ndarray, size: int = 4096) -> Iterator[np.ndarray]:
    for lo in range(0, ps.size, size):
        yield ps[lo : lo + size]


# --- elliptic sweeps ---------------------------------------------------------


def iter_sweep_elliptic(
    model: RationalCurveModel,
    n: int,
    X: int,
    cm_disc: Optional[int] = None,
    workers: int | None = None,
    skipped: Optional[list] = None,
    verify: bool = False,
) -> Iterator[SweepRecord]:
    """Records for every prime 3 <= p <= X of good reduction, ascending.

    ``verify`` additionally certifies each exact error term against the
    eigenvalue count (slow).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    D = cm_disc if cm_disc is not None else model.cm_discriminant
    disc = model.discriminant
    b2, b4, b6, _ = model.b_invariants
    for batch in _batches(_sweep_primes(X)):
        good = [int(p) for p in batch if disc % int(p) != 0]
        for p in batch:
            if disc % int(p) == 0:
                log.info("skipping p=%d: bad reduction", p)
                if skipped is not None:
                    skipped.append(Skip(int(p), "bad reduction"))
        if not good:
            continue
        arr = np.array(good, dtype=np.int64)
        a_vals = traces_for(arr, [b2 % p for p in good], [b4 % p for p in good], [b6 % p for p in good], workers)
        for p, a in zip(good, a_vals.tolist()):
            check_hasse(a, p)
            if n == 1:
                star, rstar = a / math.sqrt(p), 0.0
            else:
                frob = FrobeniusData(p, a, tuple(prime_power_traces(a, p, n)))
                et = elliptic_error(n, frob, check=verify)
                star, rstar = et.a_en_star, et.r_star
            yield SweepRecord(p, a, a == 0, _split_flag(D, p), star, rstar)


def sweep_elliptic(model, n, X, cm_disc=None, workers=None, skipped=None, verify=False) -> list[SweepRecord]:
    return list(iter_sweep_elliptic(model, n, X, cm_disc, workers, skipped, verify))


# --- K3 sweeps -----------------------------------------------------------------


def iter_sweep_k3(
    lam,
    n: int,
    X: int,
    workers: int | None = None,
    skipped: Optional[list] = None,
    reference: Optional[ReferencePolynomials] = None,
) -> Iterator[SweepRecord]:
    """Records for X_lambda: Clausen trace a, gamma = (lambda+1 / p), star_error = A*_lambda(p).

    With ``reference`` the r_star column holds A*_{lambda,n}(p) - A*_lambda(p)
    computed from the supplied expected-value polynomials.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    lam = check_lambda(Fraction(lam))
    D = CM_TABLE.get(lam)
    for batch in _batches(_sweep_primes(X)):
        good, cs, gammas = [], [], []
        for p in batch.tolist():
            if clausen_bad_prime(lam, p):
                log.info("skipping p=%d: lambda degenerates", p)
                if skipped is not None:
                    skipped.append(Skip(p, "bad lambda"))
                continue
            good.append(p)
            cs.append(clausen_parameter(lam, p))
            gammas.append(k3_gamma(lam, p))
        if not good:
            continue
        arr = np.array(good, dtype=np.int64)
        # y^2 = x^3 + x^2 - c x - c:  b2 = 4, b4 = -2c, b6 = -4c
        a_vals = traces_for(arr, [4 % p for p in good], [-2 * c % p for c, p in zip(cs, good)], [-4 * c % p for c, p in zip(cs, good)], workers)
        for p, a, gamma in zip(good, a_vals.tolist(), gammas):
            check_hasse(a, p)
            star = k3_star_error(a, gamma, p)
            rstar = None
            if reference is not None:
                frob = FrobeniusData(p, a, tuple(prime_power_traces(a, p, n)))
                rstar = k3_reference_star(n, frob, gamma, reference) - star
            yield SweepRecord(p, a, a == 0, _split_flag(D, p), star, rstar)


def sweep_k3(lam, n, X, workers=None, skipped=None, reference=None) -> list[SweepRecord]:
    return list(iter_sweep_k3(lam, n, X, workers, skipped, reference))


# --- statistics ------------------------------------------------------------------


def _values(records) -> np.ndarray:
    vals = [r.star_error if isinstance(r, SweepRecord) else float(r) for r in records]
    return np.asarray(vals, dtype=float)


def discrepancy(records, kind, interval_grid: Optional[Sequence[float]] = None) -> float:
    """sup over grid intervals [a, b] (a < b) of |empirical proportion - probability|.

    ``records`` may be SweepRecords or plain floats. The default grid is 401
    equispaced endpoints over the density's support.
    """
    kind = as_kind(kind)
    vals = np.sort(_values(records))
    if vals.size == 0:
        raise EmptySample("no records to compare")
    grid = default_grid(kind) if interval_grid is None else np.sort(np.asarray(interval_grid, dtype=float))
    if grid.size < 2:
        raise DomainError("interval grid needs at least two endpoints")
    F = cdf_on_grid(kind, grid)
    le = np.searchsorted(vals, grid, side="right")
    lt = np.searchsorted(vals, grid, side="left")
    emp = (le[None, :] - lt[:, None]) / vals.size  # [i, j]: share in [g_i, g_j]
    theo = F[None, :] - F[:, None]
    upper = np.triu(np.ones((grid.size, grid.size), dtype=bool), k=1)
    return float(np.abs(emp - theo)[upper].max())


@dataclass
class Histogram:
    kind: Optional[str]
    support: tuple[float, float]
    edges: np.ndarray
    counts: np.ndarray
    heights: np.ndarray
    density_at_center: Optional[np.ndarray]
    sample_size: int
    discrepancy: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def to_dict(self) -> dict:
        bins = []
        for i in range(self.counts.size):
            bins.append(
                {
                    "lo": float(self.edges[i]),
                    "hi": float(self.edges[i + 1]),
                    "count": int(self.counts[i]),
                    "height": float(self.heights[i]),
                    "density_at_center": None
                    if self.density_at_center is None
                    else float(self.density_at_center[i]),
                }
            )
        return {
            "kind": self.kind,
            "support": [float(self.support[0]), float(self.support[1])],
            "bins": bins,
            "discrepancy": self.discrepancy,
            "sample_size": self.sample_size,
            "metadata": self.metadata,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def histogram(records, bins: int, support: Optional[tuple[float, float]] = None, kind=None) -> Histogram:
    """Equal-width bins over ``support`` with heights count / (total * width).

    Values outside the support are left out of every bin but still count
    toward the total. ``support`` defaults to the density's.
    """
    if bins < 1:
        raise DomainError(f"bins must be >= 1, got {bins}")
    vals = _values(records)
    if vals.size == 0:
        raise EmptySample("no records to histogram")
    k = as_kind(kind) if kind is not None else None
    if support is None:
        if k is None:
            raise DomainError("give a support or a density kind")
        support = k.support
    edges = np.linspace(support[0], support[1], bins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    heights = counts / (vals.size * np.diff(edges))
    centers = (edges[:-1] + edges[1:]) / 2
    dens = density(k, centers) if k is not None else None
    return Histogram(k.value if k else None, tuple(support), edges, counts, heights, dens, int(vals.size))


# --- explicit bounds --------------------------------------------------------------


def is_squarefree(N: int) -> bool:
    d = 2
    while d * d <= N:
        if N % (d * d) == 0:
            return False
        d += 1
    return True


def _check_bound_domain(N: int, X: float, X_min: float) -> None:
    if X < X_min:
        raise DomainError(f"X must be >= {X_min}, got {X}")
    if N < 11:
        raise DomainError(f"conductor N must be >= 11, got {N}")
    if not is_squarefree(N):
        raise DomainError(f"conductor N = {N} is not square-free")


def _log_ratio(N: int, X: float) -> float:
    return math.log(N * math.log(X)) / math.sqrt(math.log(X))


def effective_bound(N: int, X: float) -> float:
    """58.44 log(N log X) / sqrt(log X): discrepancy bound for a_{E,n}* (X >= 289)."""
    _check_bound_domain(N, X, 289)
    return EFFECTIVE_CONSTANT * _log_ratio(N, X)


def first_moment_bound(N: int, X: float) -> float:
    """58.1 log(N log X) / sqrt(log X): the same bound for a_E* itself (X >= 3)."""
    _check_bound_domain(N, X, 3)
    return HOEY_CONSTANT * _log_ratio(N, X)


def prime_count_bounds(X: float) -> tuple[float, float]:
    """(X / log X, 1.2551 X / log X), which bracket pi(X) for X >= 17."""
    if X < 17:
        raise DomainError(f"X must be >= 17, got {X}")
    base = X / math.log(X)
    return base, PNT_UPPER * base


def prime_ratio_bound(A: float, X: float) -> float:
    """1.2551 A log X / (X log A), an upper bound for pi(A)/pi(X) when A, X >= 17."""
    if A < 17 or X < 17:
        raise DomainError(f"A and X must be >= 17, got A={A}, X={X}")
    return PNT_UPPER * A * math.log(X) / (X * math.log(A))


def x_inverse_sqrt_bound(N: int, X: float) -> float:
    """0.2429 log(N log X)/sqrt(log X), which dominates X^{-1/2} for X >= 289, N >= 11."""
    _check_bound_domain(N, X, 289)
    return X_INV_SQRT_CONSTANT * _log_ratio(N, X)


def prime_count_check(X: int) -> dict:
    lo, hi = prime_count_bounds(X)
    pi = prime_pi(X)
    return {"X": X, "pi": pi, "lower": lo, "upper": hi, "ok": lo < pi < hi}


def record_dicts(records: Iterable[SweepRecord]) -> list[dict]:
    return [asdict(r) for r in records]
