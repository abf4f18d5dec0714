"""Minimal decompositions: periodic points, minimal components, basins.

decompose() drives the engine level by level. Each cycle is classified and
either closed out by a structural result (a strongly-growing p=2 cycle, a
splitting forecast, an attracting cycle with its basin), climbed empirically,
or lifted one level and recursed. Whatever the level budget leaves undecided
is reported as unresolved balls, never guessed.

Genuine periodic orbits are certified by Newton refinement of f^k - x the
moment the observed displacement valuation outruns the Hensel bound, and
deduplicated across levels by their point sets at working precision.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .core import IntPolynomial, Prime, Residue, _as_level
from .engine import BehaviorTag, Cycle, ForecastKind


class BudgetExhaustedError(RuntimeError):
    """Strict mode: the level budget ran out with work remaining."""

    def __init__(self, partial: "Decomposition"):
        super().__init__("level budget exhausted with unresolved regions")
        self.partial = partial


class NotMinimalError(RuntimeError):
    """A claimed component failed single-cycle transitivity at some level."""

    def __init__(self, level: int):
        super().__init__(f"component is not a single cycle at level {level}")
        self.level = level


@dataclass(frozen=True)
class Ball:
    """The set center + p^level Z_p, named by its canonical residue."""

    center: Residue

    @property
    def level(self) -> int:
        return self.center.level.value

    @property
    def prime(self) -> Prime:
        return self.center.prime

    def residues(self, at_level: int) -> range:
        if at_level < self.level:
            raise ValueError("cannot expand a ball above its own level")
        step = self.center.modulus
        return range(self.center.value, self.prime.value**at_level, step)


@dataclass(frozen=True)
class Certificate:
    """Why a component is believed minimal, and how strongly."""

    kind: str
    param: int | str | None = None

    THEOREM = "theorem-backed"
    SPLIT_FORECAST = "split-forecast"
    EMPIRICAL = "empirical"

    @classmethod
    def theorem(cls, which: str) -> Certificate:
        return cls(cls.THEOREM, which)

    @classmethod
    def split_forecast(cls, level: int) -> Certificate:
        return cls(cls.SPLIT_FORECAST, level)

    @classmethod
    def empirical(cls, level: int) -> Certificate:
        return cls(cls.EMPIRICAL, level)


@dataclass(frozen=True)
class MinimalComponent:
    """A finite union of balls on which f is topologically transitive."""

    balls: tuple[Ball, ...]
    cycle_order: tuple[int, ...]
    certificate: Certificate
    verified_level: int

    def __post_init__(self) -> None:
        if not self.balls:
            raise ValueError("component with no balls")
        lv = self.balls[0].level
        if any(b.level != lv for b in self.balls):
            raise ValueError("component balls at mixed levels")
        if sorted(self.cycle_order) != list(range(len(self.balls))):
            raise ValueError("cycle_order is not a permutation of the balls")

    @property
    def level(self) -> int:
        return self.balls[0].level


@dataclass(frozen=True)
class PeriodicOrbit:
    """A certified periodic orbit, smallest point first, in forward order."""

    points: tuple[Residue, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("empty orbit")
        if any(pt.value < self.points[0].value for pt in self.points):
            raise ValueError("orbit not in canonical rotation")

    @property
    def period(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class BasinRecord:
    """A region drained by one attracting orbit, or absorbed with no attractor."""

    attractor: PeriodicOrbit | None
    region: tuple[Ball, ...]


@dataclass(frozen=True)
class Decomposition:
    prime: Prime
    polynomial: IntPolynomial
    max_level: int
    periodic_orbits: tuple[PeriodicOrbit, ...]
    components: tuple[MinimalComponent, ...]
    basins: tuple[BasinRecord, ...]
    unresolved: tuple[Ball, ...]


# ---------------------------------------------------------------------------
# the driver


class _Run:
    def __init__(self, f: IntPolynomial, prime: Prime, max_level: int, working: int):
        self.f = f
        self.prime = prime
        self.p = prime.value
        self.N = max_level
        self.W = working
        self.pW = prime.value**working
        self.df = f.derivative()
        self.orbits: dict[frozenset[int], tuple[int, ...]] = {}
        self.components: list[MinimalComponent] = []
        self.gt_regions: dict[frozenset[int], list[Ball]] = {}
        self.null_region: list[Ball] = []
        self.unresolved: list[Ball] = []
        self.route: dict[int, frozenset[int] | None] = {}

    # -- small helpers

    def balls(self, cyc: Cycle) -> list[Ball]:
        return [Ball(pt) for pt in cyc.points]

    def iterate(self, x: int, times: int) -> int:
        for _ in range(times):
            x = self.f(x, self.pW)
        return x

    def register_orbit(self, orbit: tuple[int, ...]) -> frozenset[int]:
        key = frozenset(orbit)
        if key not in self.orbits:
            base = orbit.index(min(orbit))
            self.orbits[key] = orbit[base:] + orbit[:base]
        return key

    def emit(self, cyc: Cycle, certificate: Certificate, verified: int) -> None:
        order = sorted(range(cyc.length), key=lambda i: cyc.points[i].value)
        rank = {orig: slot for slot, orig in enumerate(order)}
        balls = tuple(Ball(cyc.points[i]) for i in order)
        cycle_order = tuple(rank[i] for i in range(cyc.length))
        self.components.append(MinimalComponent(balls, cycle_order, certificate, verified))


def _refine_attractor(run: _Run, cyc: Cycle) -> frozenset[int]:
    """Contract f^k onto the genuine orbit inside a grows-tails cycle."""
    x = cyc.base
    for _ in range(run.W + 2):
        x = run.iterate(x, cyc.length)
    orbit = [x]
    for _ in range(cyc.length - 1):
        orbit.append(run.f(orbit[-1], run.pW))
    if run.f(orbit[-1], run.pW) != x:
        raise RuntimeError("attractor refinement did not close")
    return run.register_orbit(tuple(orbit))


def _certify_orbit(run: _Run, cyc: Cycle) -> None:
    """Newton on g = f^k - x from the base point; quiet no-op outside the regime.

    Convergence at precision P only pins the root modulo p^(P - v), v the
    valuation of g' at the root, so the precision is raised to W + 2v + 2
    before accepting: the reduction mod p^W is then starting-point
    independent and duplicate registrations collapse.
    """
    p = run.p
    x = cyc.base
    k = cyc.length
    prec = run.W
    v_last = None
    for _ in range(4 * (run.W + 8)):
        mod = p**prec
        y = x
        for _ in range(k):
            y = run.f(y, mod)
        gval = (y - x) % mod
        if gval == 0:
            if v_last is None:
                d = 1
                z = x
                for _ in range(k):
                    d = d * run.df(z, mod) % mod
                    z = run.f(z, mod)
                d = (d - 1) % mod
                if d == 0:
                    return
                v_last = 0
                while d % p == 0:
                    d //= p
                    v_last += 1
            if prec >= run.W + 2 * v_last + 2:
                break
            prec = run.W + 2 * v_last + 2
            continue
        d = 1
        z = x
        for _ in range(k):
            d = d * run.df(z, mod) % mod
            z = run.f(z, mod)
        d = (d - 1) % mod
        if d == 0:
            return
        v = 0
        while d % p == 0:
            d //= p
            v += 1
        v_last = v
        vg = 0
        g = gval
        while g % p == 0:
            g //= p
            vg += 1
        if vg <= 2 * v or gval % p**v:
            return
        x = (x - (gval // p**v) * pow(d, -1, mod)) % mod
    else:
        return
    x %= run.pW
    orbit = [x]
    y = run.f(x, run.pW)
    while y != x and len(orbit) <= k:
        orbit.append(y)
        y = run.f(y, run.pW)
    if y != x:
        return
    run.register_orbit(tuple(orbit))


def _empirical_climb(run: _Run, cyc: Cycle) -> None:
    """Verify a growing cycle stays a single cycle up to the level budget."""
    cur = cyc
    while cur.level < run.N:
        ls = engine.lift(run.f, cur)
        if len(ls.children) != 1 or ls.children[0].length != cur.length * run.p:
            for ch in ls.children:
                _process(run, ch)
            return
        cur = ls.children[0]
    run.emit(cyc, Certificate.empirical(run.N), run.N)


def _descend(run: _Run, cyc: Cycle) -> None:
    if cyc.level >= run.N:
        run.unresolved.extend(run.balls(cyc))
        return
    for ch in engine.lift(run.f, cyc).children:
        _process(run, ch)


def _process(run: _Run, cyc: Cycle) -> None:
    l = cyc.level
    mult = engine.multiplier(run.f, cyc, run.W)
    disp = engine.displacement(run.f, cyc, run.W)
    beh = engine.classify(cyc, mult, disp)

    if beh.tag is BehaviorTag.GROWS_TAILS:
        key = _refine_attractor(run, cyc)
        self_balls = run.balls(cyc)
        run.gt_regions.setdefault(key, []).extend(self_balls)
        if l == 1:
            run.route[cyc.base] = key
        return

    if l == 1:
        run.route[cyc.base] = None
    if mult.A.exact and l + disp.B.value > 2 * mult.A.value:
        _certify_orbit(run, cyc)

    if run.p == 2:
        if beh.tag is BehaviorTag.STRONGLY_GROWS and l >= 2:
            run.emit(cyc, Certificate.theorem("strong-growth"), l)
            return
        _descend(run, cyc)
        return

    if beh.tag is BehaviorTag.GROWS:
        _empirical_climb(run, cyc)
        return

    if beh.tag is BehaviorTag.SPLITS:
        fc = engine.splitting_forecast(mult, disp, l)
        if fc.kind is ForecastKind.GROWS_FOREVER_AT:
            n = fc.level
            if n > run.N:
                run.unresolved.extend(run.balls(cyc))
                return
            frontier = [cyc]
            for _ in range(l, n):
                frontier = [ch for c in frontier for ch in engine.lift(run.f, c).children]
            for c in frontier:
                m2 = engine.multiplier(run.f, c, run.W)
                d2 = engine.displacement(run.f, c, run.W)
                if engine.classify(c, m2, d2).tag is BehaviorTag.GROWS:
                    run.emit(c, Certificate.split_forecast(n), n)
                else:
                    _process(run, c)
            return
        _descend(run, cyc)
        return

    # partially-splits, or a splitting spine without a usable forecast
    _descend(run, cyc)


def decompose(
    f: IntPolynomial,
    prime: Prime | int,
    max_level: int,
    working: int | None = None,
    strict: bool = False,
) -> Decomposition:
    """Full analysis of x -> f(x) on Z_p down to the requested level."""
    p = prime if isinstance(prime, Prime) else Prime(prime)
    if f.degree < 1:
        raise ValueError("dynamics needs a polynomial of degree >= 1")
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    if working is not None:
        if working <= max_level:
            raise ValueError("working precision must exceed max_level")
        return _run_once(f, p, max_level, working, strict)
    headroom = 8
    while True:
        try:
            return _run_once(f, p, max_level, max_level + headroom, strict)
        except engine.InsufficientPrecisionError:
            headroom *= 2
            if headroom > 512:
                raise


def _run_once(
    f: IntPolynomial, prime: Prime, max_level: int, working: int, strict: bool
) -> Decomposition:
    run = _Run(f, prime, max_level, working)
    level1 = engine.find_cycles(f, prime, 1)
    for cyc in level1:
        _process(run, cyc)

    member = {v: cyc.base for cyc in level1 for v in cyc.values}
    for r in range(run.p):
        if r in member:
            continue
        x = r
        while x not in member:
            x = f(x, run.p)
        key = run.route[member[x]]
        ball = Ball(Residue(r, prime, _as_level(1)))
        if key is None:
            run.null_region.append(ball)
        else:
            run.gt_regions[key].append(ball)

    return _assemble(run, strict)


def _assemble(run: _Run, strict: bool) -> Decomposition:
    N = run.N
    modN = run.p**N

    by_class: dict[frozenset[int], PeriodicOrbit] = {}
    reduced: dict[frozenset[int], PeriodicOrbit] = {}
    for key, orbit in run.orbits.items():
        vals = [v % modN for v in orbit]
        if len(set(vals)) != len(vals):
            raise RuntimeError("distinct orbit points collide at the analysis level")
        rkey = frozenset(vals)
        if rkey not in by_class:
            base = vals.index(min(vals))
            rotated = vals[base:] + vals[:base]
            by_class[rkey] = PeriodicOrbit(
                tuple(Residue.of(v, run.prime, N) for v in rotated)
            )
        reduced[key] = by_class[rkey]

    orbits = sorted(by_class.values(), key=lambda o: (o.period, o.points[0].value))

    ball_key = lambda b: (b.level, b.center.value)
    components = sorted(
        run.components, key=lambda c: (c.level, c.balls[0].center.value, len(c.balls))
    )

    basins: list[BasinRecord] = []
    for key, region in run.gt_regions.items():
        basins.append(BasinRecord(reduced[key], tuple(sorted(set(region), key=ball_key))))
    basins.sort(key=lambda rec: (rec.attractor.period, rec.attractor.points[0].value))
    if run.null_region:
        basins.append(BasinRecord(None, tuple(sorted(set(run.null_region), key=ball_key))))

    unresolved = tuple(sorted(set(run.unresolved), key=ball_key))

    dec = Decomposition(
        run.prime,
        run.f,
        N,
        tuple(orbits),
        tuple(components),
        tuple(basins),
        unresolved,
    )
    problems = partition_violations(dec)
    if problems:
        raise RuntimeError("internal cover violation: " + "; ".join(problems[:3]))
    if strict and unresolved:
        raise BudgetExhaustedError(dec)
    return dec


# ---------------------------------------------------------------------------
# checks usable on any decomposition


def attractor_refine(f: IntPolynomial, cyc: Cycle, target: int) -> PeriodicOrbit:
    """The genuine attracting orbit inside a grows-tails cycle, at target precision."""
    if target < cyc.level:
        raise ValueError("target precision below the cycle level")
    mult = engine.multiplier(f, cyc, target)
    if mult.a.value % cyc.prime.value != 0:
        raise ValueError("cycle multiplier is a unit; nothing to contract onto")
    mod = cyc.prime.value**target
    x = cyc.base
    for _ in range(target + 2):
        for _ in range(cyc.length):
            x = f(x, mod)
    orbit = [x]
    for _ in range(cyc.length - 1):
        orbit.append(f(orbit[-1], mod))
    if f(orbit[-1], mod) != x:
        raise RuntimeError("attractor refinement did not close")
    base = orbit.index(min(orbit))
    rotated = orbit[base:] + orbit[:base]
    return PeriodicOrbit(tuple(Residue.of(v, cyc.prime, target) for v in rotated))


def minimality_check(f: IntPolynomial, comp: MinimalComponent, up_to: int) -> int:
    """Largest level <= up_to at which the component is one transitive cycle."""
    p = comp.balls[0].prime.value
    if up_to < comp.level:
        raise ValueError("up_to below the component level")
    for j in range(comp.level, up_to + 1):
        mod = p**j
        fiber = {x for ball in comp.balls for x in ball.residues(j)}
        start = min(fiber)
        x = start
        seen = set()
        for _ in range(len(fiber)):
            if x in seen or x not in fiber:
                raise NotMinimalError(j)
            seen.add(x)
            x = f(x, mod)
        if x != start or seen != fiber:
            raise NotMinimalError(j)
    return up_to


def partition_violations(dec: Decomposition, at_level: int | None = None) -> list[str]:
    """Check that points, components, basins, and unresolved balls tile Z_p.

    The check runs at the finest level present (or the given one), treating
    balls finer than that level as deep occupancy marks. Returns messages,
    empty when the cover is exact. Oversized moduli are skipped.
    """
    p = dec.prime.value
    levels = [b.level for c in dec.components for b in c.balls]
    levels += [b.level for rec in dec.basins for b in rec.region]
    levels += [b.level for b in dec.unresolved]
    levels += [orb.points[0].level.value for orb in dec.periodic_orbits]
    n = at_level if at_level is not None else max(levels, default=1)
    mod = p**n
    if mod > 4 * 10**6:
        return []

    pts = {pt.value % mod for orb in dec.periodic_orbits for pt in orb.points}
    full: dict[int, int] = {}
    punctured: dict[int, int] = {}
    deep: set[int] = set()

    def add_ball(ball: Ball) -> None:
        if ball.level > n:
            deep.add(ball.center.value % mod)
            return
        contained = {
            pt.value % mod
            for orb in dec.periodic_orbits
            for pt in orb.points
            if pt.value % p**ball.level == ball.center.value
        }
        for x in ball.residues(n):
            if x in contained:
                punctured[x] = punctured.get(x, 0) + 1
            else:
                full[x] = full.get(x, 0) + 1

    for comp in dec.components:
        for ball in comp.balls:
            add_ball(ball)
    for rec in dec.basins:
        for ball in rec.region:
            add_ball(ball)
    for ball in dec.unresolved:
        add_ball(ball)

    out: list[str] = []
    for x in range(mod):
        e = full.get(x, 0)
        pb = punctured.get(x, 0)
        d = x in deep
        isp = x in pts
        if e > 1 or (e == 1 and (pb or d or isp)):
            out.append(f"residue {x} mod {p}^{n} is covered more than once")
        elif pb > 1 or (pb == 1 and d):
            out.append(f"residue {x} mod {p}^{n} has overlapping punctured cover")
        elif e == 0 and pb == 0 and not d:
            out.append(f"residue {x} mod {p}^{n} is not covered")
        if len(out) >= 20:
            out.append("... cover check truncated")
            break
    return out
