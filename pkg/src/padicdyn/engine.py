"""Cycle analysis for x -> f(x) on Z/p^k: enumeration, local data, lifting.

A cycle at level l is a genuine cycle of f acting on residues mod p^l. Its
local data are the multiplier a (product of derivatives along the orbit) and
the displacement b = (f^k(x) - x) / p^l, both read at the canonical base
representative, the smallest point of the cycle, carried at a chosen working
precision. The valuations of a - 1 and b drive the behavior taxonomy and the
splitting forecast.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import (
    IntPolynomial,
    Level,
    Prime,
    Residue,
    Valuation,
    _as_level,
    valuation,
)


class InsufficientPrecisionError(RuntimeError):
    """The working precision left a window too small to decide."""


class NotClosedError(ValueError):
    """The claimed cycle does not close under f at its level."""


class BehaviorTag(Enum):
    STRONGLY_GROWS = "strongly-grows"
    STRONGLY_SPLITS = "strongly-splits"
    WEAKLY_GROWS = "weakly-grows"
    WEAKLY_SPLITS = "weakly-splits"
    GROWS_TAILS = "grows-tails"
    GROWS = "grows"
    SPLITS = "splits"
    PARTIALLY_SPLITS = "partially-splits"


@dataclass(frozen=True)
class Behavior:
    """Classification of a cycle at its level.

    order is set for partially-splits (the multiplicative order of a mod p).
    pre_stable marks p=2 level-1 verdicts whose mod-4 multiplier class can
    still change when the cycle is lifted.
    """

    tag: BehaviorTag
    order: int | None = None
    pre_stable: bool = False


@dataclass(frozen=True)
class Cycle:
    """A verified cycle of f mod p^level, rotated so the smallest point leads."""

    points: tuple[Residue, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("empty cycle")
        first = self.points[0]
        for pt in self.points:
            if pt.prime != first.prime or pt.level != first.level:
                raise ValueError("cycle points at mixed precision")
        if len({pt.value for pt in self.points}) != len(self.points):
            raise ValueError("repeated point in cycle")
        if any(pt.value < first.value for pt in self.points):
            raise ValueError("cycle not in canonical rotation")

    @classmethod
    def close(
        cls, f: IntPolynomial, prime: Prime | int, level: int | Level, values: list[int]
    ) -> Cycle:
        p = prime if isinstance(prime, Prime) else Prime(prime)
        lv = _as_level(level)
        mod = p.value**lv.value
        vals = [v % mod for v in values]
        k = len(vals)
        for i, v in enumerate(vals):
            if f(v, mod) != vals[(i + 1) % k]:
                raise NotClosedError(f"f({v}) != {vals[(i + 1) % k]} mod {p.value}^{lv.value}")
        base = vals.index(min(vals))
        rotated = vals[base:] + vals[:base]
        return cls(tuple(Residue(v, p, lv) for v in rotated))

    @property
    def prime(self) -> Prime:
        return self.points[0].prime

    @property
    def level(self) -> int:
        return self.points[0].level.value

    @property
    def length(self) -> int:
        return len(self.points)

    @property
    def base(self) -> int:
        return self.points[0].value

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(pt.value for pt in self.points)


@dataclass(frozen=True)
class Multiplier:
    """a = prod f'(x_j) along the orbit, with A = nu(a - 1)."""

    a: Residue
    A: Valuation


@dataclass(frozen=True)
class Displacement:
    """b = (f^k(x) - x) / p^l at the base point, with B = nu(b).

    b lives at precision working - level; an inexact B means the window saw
    only zeros.
    """

    b: Residue
    B: Valuation


@dataclass(frozen=True)
class LiftSet:
    """The cycles of f one level up inside the fiber over a cycle."""

    parent: Cycle
    children: tuple[Cycle, ...]


class ForecastKind(Enum):
    GROWS_FOREVER_AT = "grows-forever-at"
    SELF_SIMILAR_PLUS_GROWERS = "self-similar-plus-growers"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Forecast:
    kind: ForecastKind
    level: int | None = None


# ---------------------------------------------------------------------------
# enumeration


def find_cycles(f: IntPolynomial, prime: Prime | int, level: int | Level) -> list[Cycle]:
    """All cycles of f on Z/p^level, sorted by smallest point."""
    if f.degree < 1:
        raise ValueError("dynamics needs a polynomial of degree >= 1")
    p = prime if isinstance(prime, Prime) else Prime(prime)
    mod = p.value ** _as_level(level).value
    state = bytearray(mod)  # 0 unseen, 1 on the active path, 2 retired
    found: list[list[int]] = []
    for start in range(mod):
        if state[start]:
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        x = start
        while state[x] == 0:
            state[x] = 1
            pos[x] = len(path)
            path.append(x)
            x = f(x, mod)
        if state[x] == 1:
            found.append(path[pos[x] :])
        for y in path:
            state[y] = 2
    found.sort(key=min)
    return [Cycle.close(f, p, level, c) for c in found]


# ---------------------------------------------------------------------------
# local data


def _orbit_mod(f: IntPolynomial, cyc: Cycle, modulus: int) -> list[int]:
    xs = [cyc.base % modulus]
    for _ in range(cyc.length - 1):
        xs.append(f(xs[-1], modulus))
    return xs


def multiplier(f: IntPolynomial, cyc: Cycle, working: int | Level) -> Multiplier:
    w = _as_level(working).value
    if w < cyc.level:
        raise ValueError("working precision below cycle level")
    mod = cyc.prime.value**w
    df = f.derivative()
    a = 1
    for x in _orbit_mod(f, cyc, mod):
        a = a * df(x, mod) % mod
    res = Residue.of(a, cyc.prime, w)
    return Multiplier(res, valuation(res - 1))


def displacement(f: IntPolynomial, cyc: Cycle, working: int | Level) -> Displacement:
    w = _as_level(working).value
    l = cyc.level
    if w <= l:
        raise ValueError("working precision must exceed the cycle level")
    p = cyc.prime.value
    mod = p**w
    x0 = cyc.base
    x = x0 % mod
    for _ in range(cyc.length):
        x = f(x, mod)
    diff = (x - x0) % mod
    if diff % p**l != 0:
        raise NotClosedError("f^k does not return to the base point at the cycle level")
    b = Residue.of(diff // p**l, cyc.prime, w - l)
    return Displacement(b, valuation(b))


def _mult_order_mod_p(a: int, p: int) -> int:
    d, acc = 1, a % p
    while acc != 1:
        acc = acc * a % p
        d += 1
    return d


def classify(cyc: Cycle, mult: Multiplier, disp: Displacement) -> Behavior:
    """Behavior of the cycle at its own level from the (a, b) data."""
    p = cyc.prime.value
    a = mult.a
    if a.value % p == 0:
        return Behavior(BehaviorTag.GROWS_TAILS)
    if disp.b.level.value < 1:
        raise InsufficientPrecisionError("displacement window is empty")
    b_unit = disp.b.value % p != 0
    if p == 2:
        if a.level.value < 2:
            raise InsufficientPrecisionError("multiplier needed mod 4")
        strong = a.value % 4 == 1
        if strong:
            tag = BehaviorTag.STRONGLY_GROWS if b_unit else BehaviorTag.STRONGLY_SPLITS
        else:
            tag = BehaviorTag.WEAKLY_GROWS if b_unit else BehaviorTag.WEAKLY_SPLITS
        return Behavior(tag, pre_stable=cyc.level == 1)
    if a.value % p == 1:
        return Behavior(BehaviorTag.GROWS if b_unit else BehaviorTag.SPLITS)
    return Behavior(BehaviorTag.PARTIALLY_SPLITS, order=_mult_order_mod_p(a.value, p))


# ---------------------------------------------------------------------------
# lifting and forecasting


def lift(f: IntPolynomial, cyc: Cycle) -> LiftSet:
    """Cycles of f one level up, restricted to the fiber over cyc.

    Child lengths are multiples of the parent length. When the multiplier is
    a unit the children exactly partition the fiber; a non-unit multiplier
    leaves tail points belonging to no child.
    """
    p = cyc.prime.value
    l = cyc.level
    step = p**l
    mod = step * p
    fiber = [v + j * step for v in cyc.values for j in range(p)]
    succ = {x: f(x, mod) for x in fiber}
    state = {x: 0 for x in fiber}
    found: list[list[int]] = []
    for start in fiber:
        if state[start]:
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        x = start
        while state.get(x, 2) == 0:
            state[x] = 1
            pos[x] = len(path)
            path.append(x)
            x = succ[x]
        if state.get(x) == 1:
            found.append(path[pos[x] :])
        for y in path:
            state[y] = 2
    found.sort(key=min)
    children = tuple(Cycle.close(f, cyc.prime, l + 1, c) for c in found)
    return LiftSet(cyc, children)


def splitting_forecast(mult: Multiplier, disp: Displacement, level: int) -> Forecast:
    """Long-range outcome for a splitting cycle at the given level.

    Decides among: every descendant grows forever from level B+level on; one
    self-similar lift plus growers that surface at level A+level; or splitting
    continues past what the current data can see.
    """
    A, B = mult.A, disp.B
    window = disp.b.level.value
    if B.exact:
        if A.exact:
            if B.value < A.value and B.value < level:
                return Forecast(ForecastKind.GROWS_FOREVER_AT, B.value + level)
            if A.value <= B.value and A.value < level:
                return Forecast(ForecastKind.SELF_SIMILAR_PLUS_GROWERS, A.value + level)
            return Forecast(ForecastKind.UNDECIDED)
        # A is at least the full working precision, which exceeds any exact B
        if B.value < level:
            return Forecast(ForecastKind.GROWS_FOREVER_AT, B.value + level)
        return Forecast(ForecastKind.UNDECIDED)
    if A.exact:
        if A.value <= window:
            if A.value < level:
                return Forecast(ForecastKind.SELF_SIMILAR_PLUS_GROWERS, A.value + level)
            return Forecast(ForecastKind.UNDECIDED)
        raise InsufficientPrecisionError("cannot order the two valuations at this window")
    if window >= level:
        return Forecast(ForecastKind.UNDECIDED)
    raise InsufficientPrecisionError("both valuations saturated a short window")
