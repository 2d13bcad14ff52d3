"""Arithmetic in F_p for odd primes p."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import ContextMismatch, DenominatorVanishes, DomainError, NotInvertible, NotPrime

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_odd_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise NotPrime(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if p < 3 or not is_prime(p):
        raise NotPrime(f"p must be an odd prime (p >= 3), got {p}")
    return p


def primes_up_to(x: int) -> np.ndarray:
    """All primes <= x, ascending, via a sieve of Eratosthenes."""
    x = int(x)
    if x < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(x + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, int(x**0.5) + 1, 2):
        if sieve[i]:
            sieve[i * i :: 2 * i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def prime_pi(x: int) -> int:
    return int(primes_up_to(x).size)


@lru_cache(maxsize=1024)
def _checked_modulus(p: int) -> int:
    return require_odd_prime(p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    p: int

    def __post_init__(self):
        _checked_modulus(self.p)
        if not 0 <= self.value < self.p:
            raise DomainError(f"value {self.value} not reduced mod {self.p}")

    @classmethod
    def of(cls, x: int, p: int) -> FieldElement:
        return cls(int(x) % p, p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ContextMismatch(f"moduli differ: {self.p} vs {other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement((self.value + v) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement((self.value - v) % self.p, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement((v - self.value) % self.p, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value * v % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.p, self.p)

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return self * inverse(FieldElement(v, self.p))

    def __pow__(self, k: int):
        if k < 0:
            return inverse(self) ** (-k)
        return FieldElement(pow(self.value, k, self.p), self.p)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0


def mod_reduce(q, p: int) -> FieldElement:
    """Image of the rational ``q`` in F_p.

    ``q`` may be an int, a Fraction or anything ``Fraction()`` accepts
    (including strings such as ``"-1/64"``).
    """
    p = require_odd_prime(p)
    q = q if isinstance(q, Rational) else Fraction(q)
    num, den = q.numerator, q.denominator
    if den % p == 0:
        raise DenominatorVanishes(f"denominator of {q} vanishes mod {p}")
    return FieldElement(num * pow(den, -1, p) % p, p)


def legendre(a, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    p = require_odd_prime(p)
    a = a.value if isinstance(a, FieldElement) else int(a)
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def inverse(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise NotInvertible(f"0 has no inverse mod {a.p}")
    return FieldElement(pow(a.value, -1, a.p), a.p)
