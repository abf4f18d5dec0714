"""Brute-force graphs, censuses, and engine cross-checks."""
from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicdyn.core import IntPolynomial, Prime
from padicdyn.decomposer import decompose
from padicdyn.engine import BehaviorTag, find_cycles
from padicdyn.oracle import (
    CapExceededError,
    NotACycleError,
    basin_of,
    build_graph,
    census,
    crosscheck,
)


def mono(m):
    return IntPolynomial.monomial(m)


def test_square_map_graph_mod_8():
    g = build_graph(mono(2), Prime(2), 3)
    assert g.size == 8
    assert g.succ[3] == 1
    assert sorted(map(sorted, g.cycles)) == [[0], [1]]
    assert g.tail_dist[0] == 0
    assert g.tail_dist[2] == 2  # 2 -> 4 -> 0
    assert g.tail_dist[5] == 1  # 25 = 1 mod 8


def test_census_x7_mod_9_growing_fixed_points():
    g = build_graph(mono(7), Prime(3), 2)
    grown = census(g, behavior=BehaviorTag.GROWS)
    assert grown == {1: 4}


def test_census_x5_mod_9_growing_two_cycles():
    g = build_graph(mono(5), Prime(3), 2)
    grown = census(g, behavior=BehaviorTag.GROWS)
    assert grown == {2: 2}


def test_census_total_mass():
    g = build_graph(mono(3), Prime(5), 3)
    full = census(g)
    on_cycles = sum(k * v for k, v in full.items())
    tails = sum(1 for x in range(g.size) if g.tail_dist[x] > 0)
    assert on_cycles + tails == g.size


def test_node_cap_env(monkeypatch):
    monkeypatch.setenv("PADIC_NODE_CAP", "100")
    with pytest.raises(CapExceededError):
        build_graph(mono(3), Prime(3), 5)
    monkeypatch.setenv("PADIC_NODE_CAP", "100000")
    build_graph(mono(3), Prime(3), 5)


def test_basin_of_square_map():
    g = build_graph(mono(2), Prime(2), 4)
    zero_side = basin_of(g, (0,))
    one_side = basin_of(g, (1,))
    assert zero_side == frozenset(range(0, 16, 2))
    assert one_side == frozenset(range(1, 16, 2))
    with pytest.raises(NotACycleError):
        basin_of(g, (2,))


def test_crosscheck_accepts_good_decomposition():
    f = mono(3)
    dec = decompose(f, Prime(3), 4)
    for n in range(1, 5):
        assert crosscheck(dec, build_graph(f, Prime(3), n)) == []


def test_crosscheck_flags_corrupted_orbit():
    from padicdyn.core import Residue

    f = mono(3)
    dec = decompose(f, Prime(3), 4)
    # 3 is not periodic under cubing mod 81
    bad_orbit = dataclasses.replace(
        dec.periodic_orbits[0], points=(Residue.of(3, 3, 4),)
    )
    corrupted = dataclasses.replace(
        dec,
        periodic_orbits=(bad_orbit,) + dec.periodic_orbits[1:],
    )
    g = build_graph(f, Prime(3), 4)
    assert crosscheck(corrupted, g) != []


def test_crosscheck_flags_fake_component():
    from padicdyn.core import Residue
    from padicdyn.decomposer import Ball, Certificate, MinimalComponent

    f = mono(5)
    dec = decompose(f, Prime(2), 6)
    fake = MinimalComponent(
        (Ball(Residue.of(7, 2, 4)),),
        (0,),
        Certificate.theorem("strong-growth"),
        4,
    )
    corrupted = dataclasses.replace(dec, components=dec.components + (fake,))
    g = build_graph(f, Prime(2), 6)
    assert crosscheck(corrupted, g) != []


@settings(max_examples=50, deadline=None)
@given(
    st.sampled_from([2, 3, 5, 7]),
    st.integers(min_value=2, max_value=50),
    st.integers(min_value=1, max_value=3),
)
def test_graph_cycles_match_engine(p, m, n):
    f, prime = mono(m), Prime(p)
    g = build_graph(f, prime, n)
    eng = {frozenset(c.values) for c in find_cycles(f, prime, n)}
    orc = {frozenset(c) for c in g.cycles}
    assert eng == orc
