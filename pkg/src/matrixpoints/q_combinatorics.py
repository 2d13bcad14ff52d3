"""q-Pochhammer symbols, q-multinomials, P(n, k)_p and partition tuples.

Everything here is exact integer or Fraction arithmetic.
"""

from __future__ import annotations

import csv
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .errors import DomainError, NonIntegral, PartsMismatch


@lru_cache(maxsize=4096)
def q_pochhammer(q: int, n: int) -> int:
    """(q;q)_n = prod_{i=1}^n (1 - q^i) at an integer q."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    out = 1
    qi = 1
    for _ in range(n):
        qi *= q
        out *= 1 - qi
    return out


def q_pochhammer_exact(q: Fraction, n: int) -> Fraction:
    """(q;q)_n at a rational q."""
    q = Fraction(q)
    out = Fraction(1)
    for i in range(1, n + 1):
        out *= 1 - q**i
    return out


def q_multinomial(n: int, parts: Sequence[int], q: int) -> int:
    if any(m < 0 for m in parts):
        raise PartsMismatch(f"parts must be nonnegative, got {list(parts)}")
    if sum(parts) != n:
        raise PartsMismatch(f"parts {list(parts)} do not sum to n = {n}")
    den = 1
    for m in parts:
        den *= q_pochhammer(q, m)
    num = q_pochhammer(q, n)
    quo, rem = divmod(num, den)
    if rem:
        raise NonIntegral(f"(q;q)_{n} not divisible by the part symbols at q = {q}")
    return quo


@lru_cache(maxsize=8192)
def P_poly(n: int, k: int, p: int) -> int:
    """P(n, k)_p, the coefficient polynomial of a_E(p^k)/p^k in the error term.

    (-1)^k p^{n(n-k) + k(k+1)/2} sum_s p^{2ks - 2ns + 2s^2}
        (p;p)_n / ((p;p)_s (p;p)_{s+k} (p;p)_{n-2s-k}),   0 <= s <= (n-k)/2.
    """
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    total = Fraction(0)
    for s in range((n - k) // 2 + 1):
        e = 2 * k * s - 2 * n * s + 2 * s * s
        c = Fraction(q_pochhammer(p, n), q_pochhammer(p, s) * q_pochhammer(p, s + k) * q_pochhammer(p, n - 2 * s - k))
        total += c * Fraction(p) ** e
    total *= Fraction(p) ** (n * (n - k) + k * (k + 1) // 2)
    if k % 2:
        total = -total
    if total.denominator != 1:
        raise NonIntegral(f"P({n},{k})_{p} = {total} is not an integer")
    return total.numerator


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(self.parts)
        if any(x <= 0 for x in ps) or any(a < b for a, b in zip(ps, ps[1:])):
            raise DomainError(f"not a partition: {ps}")
        object.__setattr__(self, "parts", ps)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @cached_property
    def multiplicities(self) -> dict[int, int]:
        """part j -> n(lambda, j), for parts that occur."""
        return dict(Counter(self.parts))

    def multiplicity(self, j: int) -> int:
        return self.multiplicities.get(j, 0)

    def __str__(self):
        return "[" + " ".join(map(str, self.parts)) + "]"


def _partitions(r: int, largest: int) -> Iterator[tuple[int, ...]]:
    if r == 0:
        yield ()
        return
    for first in range(min(r, largest), 0, -1):
        for rest in _partitions(r - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partitions_of(r: int) -> tuple[Partition, ...]:
    """All partitions of r, in reverse lexicographic order ([r] first, [1,...,1] last)."""
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    return tuple(Partition(ps) for ps in _partitions(r, r))


def compositions(r: int, slots: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of r into ``slots`` parts, ascending lexicographic."""
    if slots == 1:
        yield (r,)
        return
    for first in range(r + 1):
        for rest in compositions(r - first, slots - 1):
            yield (first,) + rest


def partition_tuples(r: int, count: int = 6) -> Iterator[tuple[Partition, ...]]:
    """Ordered ``count``-tuples of partitions with total size r.

    Order: compositions of r ascending lexicographically, then the
    per-slot partition order of ``partitions_of`` (last slot fastest).
    """
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    for comp in compositions(r, count):
        yield from itertools.product(*(partitions_of(m) for m in comp))


def eta5_coeffs(nmax: int) -> list[int]:
    """Coefficients b_0..b_nmax of prod_{i>=1} (1 - q^i)^5."""
    if nmax < 0:
        raise DomainError(f"nmax must be >= 0, got {nmax}")
    coeffs = [1] + [0] * nmax
    for i in range(1, nmax + 1):
        for _ in range(5):
            # multiply by (1 - q^i), in place from the top
            for d in range(nmax, i - 1, -1):
                coeffs[d] -= coeffs[d - i]
    return coeffs


def partition_count(r: int) -> int:
    return len(partitions_of(r))


# --- term dumps ---------------------------------------------------------

K3_DUMP_HEADER = [
    "r",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "lambda5",
    "lambda6",
    "sign",
    "p_exponent",
    "denominator",
    "gamma_exponent",
    "alpha_exponent",
    "alphabar_exponent",
    "term",
]

ELLIPTIC_DUMP_HEADER = [
    "r",
    "s",
    "u",
    "sign",
    "p_exponent",
    "denominator",
    "alpha_exponent",
    "term",
]


def write_term_dump(path, header: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(header), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: str(row[k]) for k in header})
