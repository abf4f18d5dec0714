"""Brute-force functional graphs of f on Z/p^n, independent of the engine.

The successor map is computed term by term with modular exponentiation, never
through the engine's Horner path, so graph facts can stand as ground truth
when cross-checking a decomposition. Graph sizes are kept honest by a node
budget (PADIC_NODE_CAP overrides the default).
"""
from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass

from . import engine
from .core import IntPolynomial, Level, Prime, _as_level
from .decomposer import partition_violations

DEFAULT_NODE_CAP = 10**8


class CapExceededError(RuntimeError):
    """The requested graph would exceed the node-step budget."""


class NotACycleError(ValueError):
    """The given points are not a cycle of this graph."""


@dataclass(frozen=True)
class FunctionalGraph:
    """f acting on Z/p^level with cycles labeled and tails measured."""

    prime: Prime
    level: int
    polynomial: IntPolynomial
    succ: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    cycle_id: tuple[int, ...]
    tail_dist: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.succ)


def _node_cap() -> int:
    raw = os.environ.get("PADIC_NODE_CAP")
    if raw is None:
        return DEFAULT_NODE_CAP
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_NODE_CAP


def build_graph(
    f: IntPolynomial, prime: Prime | int, level: int | Level, node_cap: int | None = None
) -> FunctionalGraph:
    p = prime if isinstance(prime, Prime) else Prime(prime)
    n = _as_level(level).value
    mod = p.value**n
    cap = node_cap if node_cap is not None else _node_cap()
    if 3 * mod > cap:
        raise CapExceededError(f"graph on {mod} nodes exceeds the budget of {cap} node-steps")
    terms = [(e, c) for e, c in enumerate(f.coefficients) if c]
    if not terms or f.degree < 1:
        raise ValueError("dynamics needs a polynomial of degree >= 1")
    succ = tuple(sum(c * pow(x, e, mod) for e, c in terms) % mod for x in range(mod))

    state = bytearray(mod)
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
            x = succ[x]
        if state[x] == 1:
            found.append(path[pos[x] :])
        for y in path:
            state[y] = 2
    found.sort(key=min)

    cycle_id = [-1] * mod
    tail_dist = [0] * mod
    for i, cyc in enumerate(found):
        for x in cyc:
            cycle_id[x] = i
    for start in range(mod):
        if cycle_id[start] >= 0:
            continue
        path = []
        x = start
        while cycle_id[x] < 0 and tail_dist[x] == 0:
            path.append(x)
            x = succ[x]
        base = tail_dist[x]
        for j, y in enumerate(reversed(path), start=1):
            tail_dist[y] = base + j
            cycle_id[y] = cycle_id[x]

    return FunctionalGraph(
        p,
        n,
        f,
        succ,
        tuple(tuple(c) for c in found),
        tuple(cycle_id),
        tuple(tail_dist),
    )


def census(
    g: FunctionalGraph,
    behavior: engine.BehaviorTag | None = None,
    working: int | None = None,
) -> dict[int, int]:
    """Cycle counts by length, optionally filtered to one behavior tag.

    The behavior filter leans on the engine's classifier; the raw counts do
    not.
    """
    counts: Counter[int] = Counter()
    w = working if working is not None else 2 * g.level + 8
    for cyc in g.cycles:
        if behavior is not None:
            c = engine.Cycle.close(g.polynomial, g.prime, g.level, list(cyc))
            mult = engine.multiplier(g.polynomial, c, w)
            disp = engine.displacement(g.polynomial, c, w)
            if engine.classify(c, mult, disp).tag is not behavior:
                continue
        counts[len(cyc)] += 1
    return dict(counts)


def basin_of(g: FunctionalGraph, cycle_points: tuple[int, ...] | list[int]) -> frozenset[int]:
    """All nodes whose forward orbit ends on the given cycle (cycle included)."""
    want = frozenset(x % g.size for x in cycle_points)
    cid = None
    for i, cyc in enumerate(g.cycles):
        if frozenset(cyc) == want:
            cid = i
            break
    if cid is None:
        raise NotACycleError(f"{sorted(want)} is not a cycle of this graph")
    return frozenset(x for x in range(g.size) if g.cycle_id[x] == cid)


# ---------------------------------------------------------------------------
# decomposition cross-checking


def _expand(center: int, ball_level: int, p: int, n: int) -> range:
    step = p**ball_level
    return range(center % step, p**n, step)


def crosscheck(dec, g: FunctionalGraph) -> list[str]:
    """Violations of a decomposition against the graph at the graph's level.

    Checks: claimed orbits are graph cycles; every component whose balls are
    at or above the graph level expands to exactly one graph cycle; basin
    regions drain to their attractor (or, for absorbed regions, to a cycle
    outside every basin); and the pieces tile Z/p^n without overlap, with
    finer-than-graph balls tracked as deep occupancy.
    """
    out: list[str] = []
    p = g.prime.value
    n = g.level
    mod = g.size
    if dec.prime != g.prime:
        return ["prime mismatch between decomposition and graph"]

    cycle_index = {frozenset(c): i for i, c in enumerate(g.cycles)}

    for orb in dec.periodic_orbits:
        reduced = frozenset(pt.value % mod for pt in orb.points)
        if reduced not in cycle_index:
            out.append(f"orbit {sorted(reduced)} is not a cycle mod {p}^{n}")

    for comp in dec.components:
        if comp.level > n:
            continue
        region: set[int] = set()
        for ball in comp.balls:
            region.update(_expand(ball.center.value, ball.level, p, n))
        ids = {g.cycle_id[x] for x in region}
        if len(ids) != 1:
            out.append(f"component at level {comp.level} spans {len(ids)} graph cycles mod {p}^{n}")
            continue
        cid = ids.pop()
        if cid < 0 or frozenset(g.cycles[cid]) != frozenset(region):
            out.append(f"component at level {comp.level} is not one transitive cycle mod {p}^{n}")

    banned: set[int] = set()
    for rec in dec.basins:
        for ball in rec.region:
            if ball.level <= n:
                banned.update(_expand(ball.center.value, ball.level, p, n))
    for rec in dec.basins:
        region = set()
        for ball in rec.region:
            if ball.level <= n:
                region.update(_expand(ball.center.value, ball.level, p, n))
        if rec.attractor is not None:
            reduced = frozenset(pt.value % mod for pt in rec.attractor.points)
            cid = cycle_index.get(reduced)
            if cid is None:
                out.append(f"basin attractor {sorted(reduced)} is not a cycle mod {p}^{n}")
                continue
            bad = sum(1 for x in region if g.cycle_id[x] != cid)
            if bad:
                out.append(f"{bad} basin nodes do not drain to {sorted(reduced)} mod {p}^{n}")
        else:
            for x in region:
                target = g.cycles[g.cycle_id[x]]
                if any(t in banned for t in target):
                    out.append(f"absorbed node {x} drains back into a basin region mod {p}^{n}")
                    break

    out.extend(partition_violations(dec, at_level=n))
    return out
