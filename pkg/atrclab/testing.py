"""
These are slow reference implementations mainly used for cross-checking the fast code paths in unit tests.
"""

import math

import networkx as nx

from .oracle import coordinatewise


def slow_cluster_count(cfg, bp, d):
    """Cluster count by networkx connected components, with boundary blocks contracted."""
    G = nx.Graph()
    G.add_nodes_from(d.vertices)
    for i, (u, w) in enumerate(d.edges):
        if (cfg >> i) & 1:
            G.add_edge(u, w)
    if bp is not None:
        for block in bp.blocks:
            block = sorted(block)
            for v in block[1:]:
                G.add_edge(block[0], v)
    return nx.number_connected_components(G)


def upsets(states, leq):
    """Every up-set of the finite poset (states, leq), as frozensets. Exponential; tiny posets only."""
    states = sorted(states, key=lambda x: sum(bin(int(v)).count("1") for v in x))
    above = {x: [y for y in states if leq(x, y)] for x in states}
    below = {x: [y for y in states if leq(y, x)] for x in states}
    out = []

    def extend(i, inside, outside):
        if i == len(states):
            out.append(frozenset(inside))
            return
        x = states[i]
        if x in inside or x in outside:
            extend(i + 1, inside, outside)
            return
        if not any(y in outside for y in above[x]):
            extend(i + 1, inside | set(above[x]), outside)
        if not any(y in inside for y in below[x]):
            extend(i + 1, inside, outside | set(below[x]))

    extend(0, set(), set())
    return out


def slow_domination_margin(mu, nu, order=None):
    """min over up-sets U of nu(U) - mu(U); nonnegative iff nu dominates mu."""
    pm = mu.as_dict()
    pn = nu.as_dict()
    leq = order or coordinatewise(mu.widths)
    states = sorted(set(pm) | set(pn))
    return min(math.fsum(pn.get(x, 0.) for x in U) - math.fsum(pm.get(x, 0.) for x in U)
               for U in upsets(states, leq))
