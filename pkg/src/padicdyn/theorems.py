"""Closed-form decompositions of x -> x^m on Z_p for p in {2, 3, 5}.

Each congruence class of the exponent selects a structure: the periodic
points, explicit families of minimal components indexed by a depth l and a
shift a < p^(t-1), the attracting basins, and one remainder ball per
unit periodic point absorbing the families too deep for the level budget.
The sharpness parameter t is the valuation of m -+ 1 (or of m -+ i on the
conjectural branch, i being the square root of -1 in Z_5).

Pair families list the partner ball as the forward image c^m of the first
center, which lands on the inverse-centered ball the closed forms describe.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .core import IntPolynomial, Prime, Residue, hensel_lift
from .decomposer import (
    Ball,
    BasinRecord,
    Certificate,
    Decomposition,
    MinimalComponent,
    PeriodicOrbit,
    partition_violations,
)


class UnsupportedPrimeError(ValueError):
    """Closed forms exist only for p in {2, 3, 5}."""


class NoCountError(LookupError):
    """No growing-cycle count is available for this case."""


@dataclass(frozen=True)
class CaseId:
    """Which congruence branch an exponent falls in, with its sharpness t."""

    prime: int
    m: int
    residue: int
    modulus: int
    t: int
    conjectural: bool = False

    @property
    def label(self) -> str:
        return f"m={self.residue} mod {self.modulus}"


@dataclass(frozen=True)
class CycleCountForecast:
    """Growing-cycle counts by length, valid at every level >= start_level."""

    start_level: int
    counts: tuple[tuple[int, int], ...]
    conjectural: bool = False

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)


@dataclass(frozen=True)
class ConjectureReport:
    """Observed growing 4-cycle counts against the conjectured per-level count."""

    m: int
    t: int
    cycle_length: int
    expected_per_level: int
    observed: tuple[tuple[int, int], ...]
    match: bool


def _nu(p: int, x: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def sqrt_minus_one(precision: int) -> int:
    """The square root of -1 in Z_5 that reduces to 2 mod 5."""
    poly = IntPolynomial((1, 0, 1))
    return hensel_lift(poly, Residue.of(2, 5, 1), precision).value


def _conjecture_t(m: int, sign: int) -> int:
    # valuation of m - sign*i, where the other sign gives valuation zero
    prec = 8
    while True:
        i = sqrt_minus_one(prec)
        d = (m - sign * i) % 5**prec
        if d != 0:
            v = _nu(5, d)
            if v < prec:
                return v
        prec *= 2


def classify_case(prime: Prime | int, m: int) -> CaseId:
    p = prime.value if isinstance(prime, Prime) else int(prime)
    if m < 2:
        raise ValueError("exponent must be >= 2")
    if p == 2:
        if m % 2 == 0:
            return CaseId(2, m, 0, 2, _nu(2, m))
        if m % 4 == 1:
            return CaseId(2, m, 1, 4, _nu(2, m - 1))
        return CaseId(2, m, 3, 4, _nu(2, m + 1))
    if p == 3:
        r = m % 6
        if r in (0, 3):
            return CaseId(3, m, r, 6, _nu(3, m))
        if r in (1, 4):
            return CaseId(3, m, r, 6, _nu(3, m - 1))
        return CaseId(3, m, r, 6, _nu(3, m + 1))
    if p == 5:
        r5 = m % 5
        r10 = m % 10
        r20 = m % 20
        if r5 == 0:
            if r10 == 0:
                return CaseId(5, m, 0, 10, _nu(5, m))
            return CaseId(5, m, r20, 20, _nu(5, m))
        if r5 == 1:
            t = _nu(5, m - 1)
            if r20 in (1, 11):
                return CaseId(5, m, r20, 20, t)
            return CaseId(5, m, 6, 10, t)
        if r5 == 4:
            t = _nu(5, m + 1)
            if r20 in (9, 19):
                return CaseId(5, m, r20, 20, t)
            return CaseId(5, m, 4, 10, t)
        if r5 == 2:
            return CaseId(5, m, r10, 10, _conjecture_t(m, +1), conjectural=True)
        return CaseId(5, m, r10, 10, _conjecture_t(m, -1), conjectural=True)
    raise UnsupportedPrimeError(f"no closed forms for p={p}")


# ---------------------------------------------------------------------------
# prediction


class _Pred:
    def __init__(self, case: CaseId, max_level: int):
        self.case = case
        self.p = case.prime
        self.m = case.m
        self.t = case.t
        self.N = max_level
        self.prime = Prime(case.prime)
        self.cert = Certificate.theorem(f"p={case.prime} {case.label}")
        self.orbits: list[PeriodicOrbit] = []
        self.components: list[MinimalComponent] = []
        self.basins: list[BasinRecord] = []
        self.null_region: list[Ball] = []
        self.unresolved: list[Ball] = []

    def ball(self, center: int, level: int) -> Ball:
        return Ball(Residue.of(center, self.prime, level))

    def orbit(self, *values: int) -> PeriodicOrbit:
        vals = [v % self.p**self.N for v in values]
        base = vals.index(min(vals))
        rotated = vals[base:] + vals[:base]
        pts = tuple(Residue.of(v, self.prime, self.N) for v in rotated)
        orb = PeriodicOrbit(pts)
        self.orbits.append(orb)
        return orb

    def basin(self, attractor: PeriodicOrbit | None, centers: list[int]) -> None:
        region = tuple(self.ball(c, 1) for c in sorted(centers))
        if attractor is None:
            self.null_region.extend(region)
        else:
            self.basins.append(BasinRecord(attractor, region))

    def single(self, center: int, level: int) -> None:
        comp = MinimalComponent((self.ball(center, level),), (0,), self.cert, level)
        self.components.append(comp)

    def pair(self, first: int, level: int) -> None:
        mod = self.p**level
        c1 = first % mod
        c2 = pow(c1, self.m, mod)
        if c1 == c2:
            raise RuntimeError("pair family degenerated to a fixed ball")
        lo, hi = sorted((c1, c2))
        comp = MinimalComponent(
            (self.ball(lo, level), self.ball(hi, level)), (0, 1), self.cert, level
        )
        self.components.append(comp)

    def remainder(self, centers: list[int], level: int) -> None:
        for c in centers:
            self.unresolved.append(self.ball(c, level))

    def shifts(self) -> range:
        return range(self.p ** (self.t - 1))

    def family_levels(self, offset: int) -> list[tuple[int, int]]:
        """(l, ball level) pairs with ball level = t + l + offset <= N."""
        out = []
        l = 0
        while self.t + l + offset <= self.N:
            out.append((l, self.t + l + offset))
            l += 1
        return out

    def build(self) -> Decomposition:
        orbits = sorted(self.orbits, key=lambda o: (o.period, o.points[0].value))
        components = sorted(
            self.components, key=lambda c: (c.level, c.balls[0].center.value, len(c.balls))
        )
        basins = sorted(
            self.basins, key=lambda r: (r.attractor.period, r.attractor.points[0].value)
        )
        if self.null_region:
            key = lambda b: (b.level, b.center.value)
            basins.append(BasinRecord(None, tuple(sorted(self.null_region, key=key))))
        unresolved = sorted(self.unresolved, key=lambda b: (b.level, b.center.value))
        dec = Decomposition(
            self.prime,
            IntPolynomial.monomial(self.m),
            self.N,
            tuple(orbits),
            tuple(components),
            tuple(basins),
            tuple(unresolved),
        )
        problems = partition_violations(dec)
        if problems:
            raise RuntimeError("predicted cover is inconsistent: " + "; ".join(problems[:3]))
        return dec


def predict(case: CaseId, max_level: int) -> Decomposition:
    """The closed-form decomposition for this exponent class down to max_level."""
    if case.conjectural:
        raise ValueError("conjectural case has no proved prediction; run conjecture_check")
    if max_level < 2:
        raise ValueError("max_level must be >= 2")
    pr = _Pred(case, max_level)
    builder = {
        (2, 0): _p2_even,
        (2, 1): _p2_near_one,
        (2, 3): _p2_near_minus_one,
        (3, 0): _p3_zero_even,
        (3, 3): _p3_zero_odd,
        (3, 1): _p3_unit_plus,
        (3, 4): _p3_unit_plus,
        (3, 2): _p3_unit_minus,
        (3, 5): _p3_unit_minus,
        (5, 0): _p5_zero,
        (5, 5): _p5_zero,
        (5, 15): _p5_zero,
        (5, 1): _p5_unit_plus,
        (5, 6): _p5_unit_plus,
        (5, 11): _p5_unit_plus,
        (5, 4): _p5_unit_minus,
        (5, 9): _p5_unit_minus,
        (5, 19): _p5_unit_minus,
    }[(case.prime, case.residue)]
    builder(pr)
    return pr.build()


def _p2_even(pr: _Pred) -> None:
    zero = pr.orbit(0)
    one = pr.orbit(1)
    pr.basin(zero, [0])
    pr.basin(one, [1])


def _p2_near_one(pr: _Pred) -> None:
    pr.orbit(0)
    pr.basin(pr.orbits[0], [0])
    pr.orbit(1)
    pr.orbit(-1)
    for l, L in pr.family_levels(2):
        for a in pr.shifts():
            for side in (1, -1):
                pr.single(side + 2 ** (l + 2) + 2 ** (l + 3) * a, L)
    r = max(2, pr.N - pr.t + 1)
    pr.remainder([1, -1], r)


def _p2_near_minus_one(pr: _Pred) -> None:
    pr.orbit(0)
    pr.basin(pr.orbits[0], [0])
    pr.orbit(1)
    pr.orbit(-1)
    for l, L in pr.family_levels(3):
        for a in pr.shifts():
            for side in (1, -1):
                pr.pair(side + 2 ** (l + 2) + 2 ** (l + 4) * a, L)
    r = max(2, pr.N - pr.t)
    pr.remainder([1, -1], r)


def _p3_zero_even(pr: _Pred) -> None:
    zero = pr.orbit(0)
    one = pr.orbit(1)
    pr.basin(zero, [0])
    pr.basin(one, [1, 2])


def _p3_zero_odd(pr: _Pred) -> None:
    zero = pr.orbit(0)
    one = pr.orbit(1)
    minus = pr.orbit(-1)
    pr.basin(zero, [0])
    pr.basin(one, [1])
    pr.basin(minus, [2])


def _p3_unit_plus(pr: _Pred) -> None:
    # m = 1 mod 3: every unit family is centered at a fixed point
    both_sides = pr.case.residue == 1
    zero = pr.orbit(0)
    pr.basin(zero, [0])
    pr.orbit(1)
    if both_sides:
        pr.orbit(-1)
    else:
        pr.basin(None, [2])
    for l, L in pr.family_levels(1):
        for a in pr.shifts():
            for i in (1, 2):
                pr.single(1 + 3 ** (l + 1) * i + 3 ** (l + 2) * a, L)
                if both_sides:
                    pr.single(-1 + 3 ** (l + 1) * i + 3 ** (l + 2) * a, L)
    r = max(1, pr.N - pr.t + 1)
    pr.remainder([1, -1] if both_sides else [1], r)


def _p3_unit_minus(pr: _Pred) -> None:
    # m = 2 mod 3: families pair a ball with its forward (inverse-centered) image
    both_sides = pr.case.residue == 5
    zero = pr.orbit(0)
    pr.basin(zero, [0])
    pr.orbit(1)
    if both_sides:
        pr.orbit(-1)
    else:
        pr.basin(None, [2])
    for l, L in pr.family_levels(1):
        for a in pr.shifts():
            first = 1 + 3 ** (l + 1) + 3 ** (l + 2) * a
            pr.pair(first, L)
            if both_sides:
                pr.pair(-first, L)
    r = max(1, pr.N - pr.t + 1)
    pr.remainder([1, -1] if both_sides else [1], r)


def _p5_zero(pr: _Pred) -> None:
    zero = pr.orbit(0)
    pr.basin(zero, [0])
    if pr.case.residue == 0:
        one = pr.orbit(1)
        pr.basin(one, [1, 2, 3, 4])
        return
    i = sqrt_minus_one(pr.N)
    one = pr.orbit(1)
    minus = pr.orbit(-1)
    pr.basin(one, [1])
    pr.basin(minus, [4])
    if pr.case.residue == 5:
        pi = pr.orbit(i)
        ni = pr.orbit(-i)
        pr.basin(pi, [2])
        pr.basin(ni, [3])
    else:
        pair = pr.orbit(i, -i)
        pr.basin(pair, [2, 3])


def _p5_unit_plus(pr: _Pred) -> None:
    res = pr.case.residue
    zero = pr.orbit(0)
    pr.basin(zero, [0])
    i = sqrt_minus_one(pr.N + pr.t + 2)
    pr.orbit(1)
    spines = [1]
    if res == 1:
        pr.orbit(-1)
        pr.orbit(i)
        pr.orbit(-i)
        spines += [-1, i, -i]
    elif res == 11:
        pr.orbit(-1)
        pr.orbit(i, -i)
        spines += [-1, i, -i]
    else:
        pr.basin(None, [2, 3, 4])
    for l, L in pr.family_levels(1):
        step, fine = 5 ** (l + 1), 5 ** (l + 2)
        for a in pr.shifts():
            for ii in (1, 2, 3, 4):
                if res == 1:
                    for c0 in (1, -1, i, -i):
                        pr.single(c0 + step * ii + fine * a, L)
                elif res == 6:
                    pr.single(1 + step * ii + fine * a, L)
                else:
                    pr.single(1 + step * ii + fine * a, L)
                    pr.single(-1 + step * ii + fine * a, L)
                    pr.pair(i + step * ii + fine * a, L)
    r = max(1, pr.N - pr.t + 1)
    pr.remainder(spines, r)


def _p5_unit_minus(pr: _Pred) -> None:
    res = pr.case.residue
    zero = pr.orbit(0)
    pr.basin(zero, [0])
    i = sqrt_minus_one(pr.N + pr.t + 2)
    pr.orbit(1)
    spines = [1]
    if res == 9:
        pr.orbit(-1)
        pr.orbit(i)
        pr.orbit(-i)
        spines += [-1, i, -i]
    elif res == 19:
        pr.orbit(-1)
        pr.orbit(i, -i)
        spines += [-1, i, -i]
    else:
        pr.basin(None, [2, 3, 4])
    for l, L in pr.family_levels(1):
        step, fine = 5 ** (l + 1), 5 ** (l + 2)
        for a in pr.shifts():
            for ii in (1, 2):
                if res == 4:
                    pr.pair(1 + step * ii + fine * a, L)
                elif res == 9:
                    for c0 in (1, -1, i, -i):
                        pr.pair(c0 + step * ii + fine * a, L)
                else:
                    pr.pair(1 + step * ii + fine * a, L)
                    pr.pair(-1 + step * ii + fine * a, L)
            if res == 19:
                for ii in (1, 2, 3, 4):
                    pr.pair(i + step * ii + fine * a, L)
    r = max(1, pr.N - pr.t + 1)
    pr.remainder(spines, r)


# ---------------------------------------------------------------------------
# counts and the conjectural branch


def growing_cycle_count(case: CaseId) -> CycleCountForecast:
    """Per-level counts of growing cycles by length, from level t+1 on."""
    p, t = case.prime, case.t
    if p == 2:
        raise NoCountError("no closed growing-cycle count at p=2")
    scale = p ** (t - 1) if t >= 1 else 0
    table: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {
        (3, 1): ((1, 4 * scale),),
        (3, 4): ((1, 2 * scale),),
        (3, 2): ((2, scale),),
        (3, 5): ((2, 2 * scale),),
        (5, 1): ((1, 16 * scale),),
        (5, 6): ((1, 4 * scale),),
        (5, 11): ((1, 8 * scale), (2, 4 * scale)),
        (5, 4): ((2, 2 * scale),),
        (5, 9): ((2, 8 * scale),),
        (5, 19): ((2, 8 * scale),),
    }
    if case.conjectural:
        per = scale if case.residue in (2, 8) else 4 * scale
        return CycleCountForecast(t + 1, ((4, per),), conjectural=True)
    key = (p, case.residue)
    if key not in table:
        raise NoCountError(f"no growing cycles in case {case.label}")
    return CycleCountForecast(t + 1, table[key])


def conjecture_check(m: int, max_level: int) -> ConjectureReport:
    """Count growing 4-cycles level by level against the conjectured number."""
    case = classify_case(5, m)
    if not case.conjectural:
        raise ValueError(f"exponent {m} is not in the conjectural branch")
    forecast = growing_cycle_count(case)
    expected = forecast.as_dict()[4]
    f = IntPolynomial.monomial(m)
    observed: list[tuple[int, int]] = []
    for n in range(case.t + 1, max_level + 1):
        w = 2 * n + 8
        count = 0
        for cyc in engine.find_cycles(f, 5, n):
            if cyc.length != 4:
                continue
            mult = engine.multiplier(f, cyc, w)
            disp = engine.displacement(f, cyc, w)
            if engine.classify(cyc, mult, disp).tag is engine.BehaviorTag.GROWS:
                count += 1
        observed.append((n, count))
    match = bool(observed) and all(c == expected for _, c in observed)
    return ConjectureReport(m, case.t, 4, expected, tuple(observed), match)
