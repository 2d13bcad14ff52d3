"""Exact arithmetic in Q[alpha] with alpha^2 = a*alpha - p.

alpha and its conjugate abar = a - alpha are the Frobenius eigenvalues of a
curve with trace a at p. Keeping them symbolic means every formula result
carries an exact certificate that its alpha-part vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import ContextMismatch, NonRealResult, NotInvertible


@dataclass(frozen=True)
class QuadOrderElement:
    """x + y*alpha."""

    x: Fraction
    y: Fraction
    a: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def rational(cls, q, a: int, p: int) -> QuadOrderElement:
        return cls(Fraction(q), Fraction(0), a, p)

    @classmethod
    def one(cls, a: int, p: int) -> QuadOrderElement:
        return cls.rational(1, a, p)

    @classmethod
    def alpha(cls, a: int, p: int) -> QuadOrderElement:
        return cls(Fraction(0), Fraction(1), a, p)

    @classmethod
    def alphabar(cls, a: int, p: int) -> QuadOrderElement:
        return cls(Fraction(a), Fraction(-1), a, p)

    def _lift(self, other) -> QuadOrderElement:
        if isinstance(other, QuadOrderElement):
            if (other.a, other.p) != (self.a, self.p):
                raise ContextMismatch(f"(a, p) = {(self.a, self.p)} vs {(other.a, other.p)}")
            return other
        if isinstance(other, Rational):
            return QuadOrderElement(Fraction(other), Fraction(0), self.a, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadOrderElement(self.x + o.x, self.y + o.y, self.a, self.p)

    __radd__ = __add__

    def __neg__(self):
        return QuadOrderElement(-self.x, -self.y, self.a, self.p)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadOrderElement(self.x - o.x, self.y - o.y, self.a, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, Rational):
            return QuadOrderElement(self.x * other, self.y * other, self.a, self.p)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        yy = self.y * o.y
        return QuadOrderElement(
            self.x * o.x - self.p * yy,
            self.x * o.y + self.y * o.x + self.a * yy,
            self.a,
            self.p,
        )

    __rmul__ = __mul__

    def conj(self) -> QuadOrderElement:
        return QuadOrderElement(self.x + self.y * self.a, -self.y, self.a, self.p)

    def norm(self) -> Fraction:
        return self.x * self.x + self.a * self.x * self.y + self.p * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x + self.a * self.y

    def inverse(self) -> QuadOrderElement:
        nm = self.norm()
        if nm == 0:
            raise NotInvertible(f"{self} has norm 0")
        return self.conj() * (1 / nm)

    def __truediv__(self, other):
        if isinstance(other, Rational):
            if other == 0:
                raise NotInvertible("division by zero")
            return self * (1 / Fraction(other))
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, k: int) -> QuadOrderElement:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = QuadOrderElement.one(self.a, self.p)
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def is_rational(self) -> bool:
        return self.y == 0

    def to_rational(self) -> Fraction:
        if self.y != 0:
            raise NonRealResult(f"{self} has nonzero alpha-part")
        return self.x

    def __str__(self):
        return f"{self.x} + {self.y}*alpha"
