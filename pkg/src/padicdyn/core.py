"""Exact arithmetic over Z/p^k, the finite-precision face of the p-adic integers.

Everything downstream works with canonical residues: a value x known mod p^k
stands for the ball x + p^k Z_p. Valuations computed from a residue are exact
only when they are smaller than the precision; a zero residue means "valuation
at least k" and is marked inexact.
"""
from __future__ import annotations

from dataclasses import dataclass


class NonUnitError(ValueError):
    """Inversion was attempted on a residue divisible by p."""


class NotSimpleRootError(ValueError):
    """Newton refinement needs a root where the derivative is a unit."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True, order=True)
class Prime:
    """A validated prime modulus base."""

    value: int

    def __post_init__(self) -> None:
        if not _is_prime(self.value):
            raise ValueError(f"{self.value} is not prime")

    def __index__(self) -> int:
        return self.value


@dataclass(frozen=True, order=True)
class Level:
    """A precision exponent: residues live mod p^level, level >= 1."""

    value: int

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError(f"level must be >= 1, got {self.value}")

    def __index__(self) -> int:
        return self.value


def _as_level(level: int | Level) -> Level:
    return level if isinstance(level, Level) else Level(level)


@dataclass(frozen=True)
class Residue:
    """A canonical residue mod prime**level; arithmetic truncates to the coarser operand."""

    value: int
    prime: Prime
    level: Level

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.modulus)

    @classmethod
    def of(cls, value: int, p: int | Prime, level: int | Level) -> Residue:
        prime = p if isinstance(p, Prime) else Prime(p)
        return cls(value, prime, _as_level(level))

    @property
    def modulus(self) -> int:
        return self.prime.value ** self.level.value

    def reduce_to(self, level: int | Level) -> Residue:
        lv = _as_level(level)
        if lv.value > self.level.value:
            raise ValueError("cannot raise precision of a residue")
        return Residue(self.value, self.prime, lv)

    def _coerce(self, other: Residue | int) -> tuple[int, Level]:
        if isinstance(other, Residue):
            if other.prime != self.prime:
                raise ValueError("mixed primes in residue arithmetic")
            return other.value, Level(min(self.level.value, other.level.value))
        return int(other), self.level

    def __add__(self, other: Residue | int) -> Residue:
        v, lv = self._coerce(other)
        return Residue(self.value + v, self.prime, lv)

    __radd__ = __add__

    def __sub__(self, other: Residue | int) -> Residue:
        v, lv = self._coerce(other)
        return Residue(self.value - v, self.prime, lv)

    def __mul__(self, other: Residue | int) -> Residue:
        v, lv = self._coerce(other)
        return Residue(self.value * v, self.prime, lv)

    __rmul__ = __mul__

    def __neg__(self) -> Residue:
        return Residue(-self.value, self.prime, self.level)


@dataclass(frozen=True, order=True)
class Valuation:
    """p-adic valuation read off a residue.

    exact=True means the valuation is the stated value; exact=False means the
    residue vanished at its precision and the true valuation is >= value.
    """

    exact: bool
    value: int


@dataclass(frozen=True)
class IntPolynomial:
    """A polynomial with integer coefficients, ascending order, trailing zeros stripped."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs:
            coeffs = (0,)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def monomial(cls, exponent: int) -> IntPolynomial:
        if exponent < 1:
            raise ValueError("monomial exponent must be >= 1")
        return cls((0,) * exponent + (1,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def monomial_exponent(self) -> int | None:
        """The m with self == x^m, or None when the polynomial is not of that shape."""
        if self.degree >= 1 and self.coefficients[-1] == 1 and not any(self.coefficients[:-1]):
            return self.degree
        return None

    def derivative(self) -> IntPolynomial:
        if self.degree == 0:
            return IntPolynomial((0,))
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coefficients))[1:])

    def __call__(self, x: int, modulus: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % modulus
        return acc


# ---------------------------------------------------------------------------
# operations


def valuation(x: Residue) -> Valuation:
    """nu_p of a residue; inexact when the residue is 0 at its precision."""
    if x.value == 0:
        return Valuation(False, x.level.value)
    p = x.prime.value
    v, n = x.value, 0
    while v % p == 0:
        v //= p
        n += 1
    return Valuation(True, n)


def mod_pow(base: Residue, exponent: int) -> Residue:
    if exponent < 0:
        raise ValueError("negative exponent; invert explicitly first")
    return Residue(pow(base.value, exponent, base.modulus), base.prime, base.level)


def unit_inverse(x: Residue) -> Residue:
    if x.value % x.prime.value == 0:
        raise NonUnitError(f"{x.value} is not a unit mod {x.prime.value}^{x.level.value}")
    return Residue(pow(x.value, -1, x.modulus), x.prime, x.level)


def eval_poly(f: IntPolynomial, x: Residue) -> Residue:
    return Residue(f(x.value, x.modulus), x.prime, x.level)


def eval_deriv(f: IntPolynomial, x: Residue) -> Residue:
    return Residue(f.derivative()(x.value, x.modulus), x.prime, x.level)


def hensel_lift(f: IntPolynomial, root: Residue, target: int | Level) -> Residue:
    """Refine a simple root mod p to the target precision by Newton doubling."""
    p = root.prime.value
    goal = _as_level(target).value
    if f(root.value, p) % p != 0:
        raise ValueError(f"{root.value} is not a root of the polynomial mod {p}")
    df = f.derivative()
    if df(root.value, p) % p == 0:
        raise NotSimpleRootError("derivative vanishes at the root mod p")
    x, cur = root.value % p, 1
    while cur < goal:
        cur = min(2 * cur, goal)
        mod = p**cur
        x = (x - f(x, mod) * pow(df(x, mod), -1, mod)) % mod
    return Residue.of(x, root.prime, goal)
