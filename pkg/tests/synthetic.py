"""Deterministic synthetic networks and multigraphs for tests.

Every builder is a pure function of its arguments, so fixtures built
from them are reproducible across runs and processes.
"""

from __future__ import annotations

import random

from gca.dcpf import solve_dc
from gca.graph import Multigraph
from gca.model import Branch, Bus, BusType, Generator, Network


def ring_mesh(
    n_buses: int = 200,
    n_chords: int = 45,
    n_gens: int = 10,
    rating_margin: float = 1.3,
    name: str = "ring_mesh",
) -> Network:
    """Meshed test grid: a ring of ``n_buses`` plus ``n_chords`` chords.

    Every edge lies on a cycle (no bridges), loads and generation are
    spread deterministically and balance exactly, and every branch is
    rated at ``rating_margin`` times its worst single-outage flow, which
    makes the case secure against any single outage by construction
    while leaving little headroom for double outages.

    Defaults give 245 branches on 200 buses.
    """
    buses = []
    total_load = 0.0
    for i in range(1, n_buses + 1):
        load = 2.0 * ((3 * i) % 7)
        total_load += load
        bus_type = BusType.SLACK if i == 1 else BusType.PQ
        buses.append(Bus(id=i, base_kv=138.0, bus_type=bus_type, load_mw=load))

    branches = []
    for i in range(n_buses):  # the ring
        x = 0.02 + 0.002 * ((7 * i) % 11)
        branches.append(Branch(i + 1, (i + 1) % n_buses + 1, "1", reactance_pu=x))
    for j in range(n_chords):
        a = (9 * j) % n_buses
        b = (9 * j + 23) % n_buses
        x = 0.04 + 0.002 * ((5 * j) % 13)
        branches.append(Branch(a + 1, b + 1, "1", reactance_pu=x))

    step = n_buses // n_gens
    gen_buses = [1 + step * k for k in range(n_gens)]
    per_gen = total_load / n_gens
    gens = tuple(Generator(bus=b, p_mw=per_gen, p_max_mw=per_gen * 1.5) for b in gen_buses)

    unrated = Network(tuple(buses), tuple(branches), gens, base_mva=100.0, name=name)

    # rate each branch against its worst flow over the base case and all
    # single outages (none of which islands this topology)
    envelope = {key: abs(f) for key, f in solve_dc(unrated).flows_by_key().items()}
    for key in unrated.active_keys:
        flows = solve_dc(unrated, {key}).flows_by_key()
        for other, f in flows.items():
            if abs(f) > envelope[other]:
                envelope[other] = abs(f)
    rated = tuple(
        Branch(
            br.from_bus,
            br.to_bus,
            br.circuit_id,
            br.reactance_pu,
            rating_mva=round(max(envelope[br.key] * rating_margin, 1.0), 3),
            in_service=br.in_service,
        )
        for br in unrated.branches
    )
    return Network(tuple(buses), rated, gens, base_mva=100.0, name=name)


def corridor() -> Network:
    """Two parallel direct lines plus a weak detour path.

    300 MW moves from bus 1 to bus 2. Each direct line survives the loss
    of the other, but losing both dumps everything onto the detour lines
    rated at a third of that, so the unique double-outage overflow is the
    pair of direct lines.
    """
    buses = (
        Bus(1, 138.0, BusType.SLACK),
        Bus(2, 138.0, BusType.PQ, load_mw=300.0),
        Bus(3, 138.0, BusType.PQ),
    )
    branches = (
        Branch(1, 2, "1", 0.05, rating_mva=320.0),
        Branch(1, 2, "2", 0.05, rating_mva=320.0),
        Branch(1, 3, "1", 0.1, rating_mva=100.0),
        Branch(3, 2, "1", 0.1, rating_mva=100.0),
    )
    gens = (Generator(1, 300.0, 400.0),)
    return Network(buses, branches, gens, name="corridor")


def random_multigraph(rng: random.Random, max_nodes: int = 12, max_edges: int = 20) -> Multigraph:
    """Random multigraph, possibly disconnected, with parallel edges."""
    n = rng.randint(2, max_nodes)
    m = rng.randint(1, max_edges)
    edges = []
    for idx in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n)
        while v == u:
            v = rng.randrange(n)
        edges.append((f"e{idx}", u, v))
    return Multigraph(range(n), edges)


def relabel(g: Multigraph, mapping: dict[int, int]) -> Multigraph:
    """Isomorphic copy with nodes renamed by ``mapping``."""
    return Multigraph(
        (mapping[n] for n in g.nodes),
        ((key, mapping[u], mapping[v]) for key, u, v in g.edges),
    )
