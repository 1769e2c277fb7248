# -*- coding: utf-8 -*-

"""
Configuration-level couplings: spins <-> edges for the six-vertex spin representation, the
modified boundary sampler, cluster spin assignments, loop tracing and the BKW height
construction, and the ATRC duality map. Each randomized coupling has an exact counterpart
(edge_law_from_spins, joint_table, bkw_table) that integrates out the randomness.
"""

import builtins
import itertools
import math

import numpy as np

from . import constants
from .lattice import PRIMAL, BoundaryPartition, UnionFind, Z2Domain, bits, popcount
from .measures import J_LT_U, FKParams, HeightFn, SpinState, p_sd
from .oracle import DistTable, EnumerationCapError, MeasureSpec, dual_mask, enumerate

TAU_TAUTAU = "tau_tautau"
TAU_TAUPRIME = "tau_tauprime"
EVEN_00_11 = "even_00_11"
ODD_11 = "odd_11"


class EdgePair(object):
    """
    A pair of edge configurations on one domain: (omega_tau, omega_tautau') with
    omega_tau contained in omega_tautau' when J<U, or (omega_tau, omega_tau') when J>=U.
    """
    def __init__(self, omega_tau, omega_second, layer_kind=TAU_TAUTAU, domain=None):
        if layer_kind not in (TAU_TAUTAU, TAU_TAUPRIME):
            raise ValueError("ATRC Error: Unknown layer kind '{0}'.".format(layer_kind))
        if layer_kind == TAU_TAUTAU and omega_tau & ~omega_second:
            raise ValueError("ATRC Error: omega_tau must be contained in omega_tautau'.")
        self.omega_tau = int(omega_tau)
        self.omega_second = int(omega_second)
        self.layer_kind = layer_kind
        self.domain = domain

    @classmethod
    def for_regime(cls, omega_tau, omega_second, regime, domain=None):
        return cls(omega_tau, omega_second, TAU_TAUTAU if regime == J_LT_U else TAU_TAUPRIME, domain)

    def __eq__(self, other):
        return (isinstance(other, EdgePair) and self.omega_tau == other.omega_tau
                and self.omega_second == other.omega_second and self.layer_kind == other.layer_kind)

    def __hash__(self):
        return hash((self.omega_tau, self.omega_second, self.layer_kind))

    def __repr__(self):
        return "<EdgePair {0} {1:b} {2:b}>".format(self.layer_kind, self.omega_tau, self.omega_second)


def dual_clusters(omega, d):
    """Union-find over the vertices of Omega* for the dual configuration omega*."""
    dual = d.dual()
    return dual.union_find(dual_mask(omega, d))


def joint_density(sigma, omega_tau, c, variant, d):
    """
    (1/(c-1))^{|omega_tau| + |E_sigma_bullet|} times the compatibility indicators of sigma_bullet
    (on the vertices of d) with omega_tau and of sigma_circ (on Omega*) with omega_tau*.
    """
    dual = d.dual()
    bullet, circ = sigma.sigma_bullet, sigma.sigma_circ
    if variant == EVEN_00_11:
        if any(bullet[v] != 1 for v in d.domain_boundary) or any(circ[a] != 1 for a in dual.boundary):
            return 0.
    elif variant == ODD_11:
        if any(bullet[v] != 1 for v in d.boundary):
            return 0.
    else:
        raise ValueError("ATRC Error: Unknown joint density variant '{0}'.".format(variant))
    disagree = sigma.disagreements(d, "sigma_bullet")
    for i in range(d.num_edges):
        if (omega_tau >> i) & 1:
            if i in disagree:
                return 0.
        else:
            a, b = dual.edges[dual.dual_map[i]]
            if circ[a] != circ[b]:
                return 0.
    return (1. / (c - 1.))**(popcount(omega_tau) + len(disagree))


def _spin_bits(table, column, n):
    S = table.states[:, column]
    return np.array([(S >> j) & 1 for j in range(n)]).T.reshape(len(S), n)


def joint_table(d, c, variant=EVEN_00_11, cap=constants.ENUMERATION_CAP):
    """Exact normalized joint law of (sigma_bullet, sigma_circ, omega_tau); set bits mean spin -1."""
    dual = d.dual()
    if variant == EVEN_00_11:
        fixed_b, fixed_c = d.domain_boundary, dual.boundary
    elif variant == ODD_11:
        fixed_b, fixed_c = d.boundary, frozenset()
    else:
        raise ValueError("ATRC Error: Unknown joint density variant '{0}'.".format(variant))
    free_b = [d.index[v] for v in d.vertices if v not in fixed_b]
    free_c = [dual.index[a] for a in dual.vertices if a not in fixed_c]
    m = d.num_edges
    required = 2**(len(free_b) + len(free_c) + m)
    if required > cap:
        raise EnumerationCapError(required, cap)
    rows = []
    weights = []
    inv = 1. / (c - 1.)
    for fb in range(1 << len(free_b)):
        sb = sum(1 << free_b[j] for j in bits(fb))
        n_dis = sum(1 for u, w in zip(d.edge_u, d.edge_w) if ((sb >> u) ^ (sb >> w)) & 1)
        for fc in range(1 << len(free_c)):
            sc = sum(1 << free_c[j] for j in bits(fc))
            for omega in range(1 << m):
                ok = True
                for i in range(m):
                    if (omega >> i) & 1:
                        if ((sb >> d.edge_u[i]) ^ (sb >> d.edge_w[i])) & 1:
                            ok = False
                            break
                    else:
                        j = dual.dual_map[i]
                        if ((sc >> dual.edge_u[j]) ^ (sc >> dual.edge_w[j])) & 1:
                            ok = False
                            break
                if ok:
                    rows.append((sb, sc, omega))
                    weights.append(inv**(popcount(omega) + n_dis))
    total = math.fsum(weights)
    return DistTable(rows, np.array(weights) / total, math.log(total),
                     ("sigma_bullet", "sigma_circ", "omega_tau"), (d.num_vertices, dual.num_vertices, m))


def assign_spins_to_dual_clusters(omega_tau, d, rng):
    """+1 on the clusters of omega_tau* meeting the boundary of Omega*, fair coins elsewhere."""
    dual = d.dual()
    uf = dual_clusters(omega_tau, d)
    pinned = set(uf.find(dual.index[a]) for a in dual.boundary)
    spin = {}
    circ = {}
    for i, a in builtins.enumerate(dual.vertices):
        r = uf.find(i)
        if r not in spin:
            spin[r] = 1 if r in pinned else (1 if rng.random() < 0.5 else -1)
        circ[a] = spin[r]
    return SpinState(sigma_circ=circ)


def dual_spin_table(omega_tau, d):
    """Exact law of assign_spins_to_dual_clusters: masks over Omega* vertices, set bit = -1."""
    dual = d.dual()
    uf = dual_clusters(omega_tau, d)
    pinned = set(uf.find(dual.index[a]) for a in dual.boundary)
    roots = sorted(set(uf.labels()) - pinned)
    members = {r: [i for i in range(dual.num_vertices) if uf.find(i) == r] for r in roots}
    rows = []
    for choice in range(1 << len(roots)):
        mask = 0
        for j in bits(choice):
            for i in members[roots[j]]:
                mask |= 1 << i
        rows.append(mask)
    return DistTable(rows, np.full(len(rows), 1. / len(rows)), 0., ("sigma_circ",), (dual.num_vertices,))


def edge_open_probabilities(sigma, c, boundary_cb, d):
    """
    Per-edge success probabilities of the spins-to-edges sampler: 1 where sigma_circ disagrees
    across e*, 0 where sigma_bullet disagrees across e, otherwise 1/c, or 1/boundary_cb on the
    domain-boundary edges when boundary_cb is set.
    """
    dual = d.dual()
    on_cycle = d.edge_boundary or frozenset()
    probs = []
    for i, (u, w) in builtins.enumerate(d.edges):
        a, b = dual.edges[dual.dual_map[i]]
        primal = sigma.sigma_bullet[u] != sigma.sigma_bullet[w]
        second = sigma.sigma_circ[a] != sigma.sigma_circ[b]
        if primal and second:
            raise ValueError("ATRC Error: Spins disagree across both edge {0} and its dual.".format(i))
        if second:
            probs.append(1.)
        elif primal:
            probs.append(0.)
        elif boundary_cb is not None and i in on_cycle:
            probs.append(1. / boundary_cb)
        else:
            probs.append(1. / c)
    return probs


def sample_edges_from_spins(sigma, c, boundary_cb, d, rng):
    probs = edge_open_probabilities(sigma, c, boundary_cb, d)
    draws = rng.random(len(probs))
    omega = 0
    for i, p in builtins.enumerate(probs):
        if draws[i] < p:
            omega |= 1 << i
    return omega


def edge_law_from_spins(spin_table, d, c, boundary_cb=None):
    """
    Exact law of sample_edges_from_spins under a SPIN table (columns sigma_bullet, sigma_circ
    over the L- and L*-vertices of the Z^2-domain of d).
    """
    dual = d.dual()
    own, other = (0, 1) if d.lattice == PRIMAL else (1, 0)
    m = d.num_edges
    sb = _spin_bits(spin_table, own, d.num_vertices)
    sc = _spin_bits(spin_table, other, dual.num_vertices)
    on_cycle = d.edge_boundary or frozenset()
    P = np.empty((len(spin_table), m))
    for i in range(m):
        j = dual.dual_map[i]
        dis_p = sb[:, d.edge_u[i]] != sb[:, d.edge_w[i]]
        dis_d = sc[:, dual.edge_u[j]] != sc[:, dual.edge_w[j]]
        if np.any(dis_p & dis_d):
            raise ValueError("ATRC Error: Spins disagree across both edge {0} and its dual.".format(i))
        base = 1. / boundary_cb if (boundary_cb is not None and i in on_cycle) else 1. / c
        P[:, i] = np.where(dis_d, 1., np.where(dis_p, 0., base))
    masks = np.arange(1 << m, dtype=np.int64)
    Q = np.ones((len(spin_table), 1 << m))
    for i in range(m):
        bit = ((masks >> i) & 1).astype(bool)
        Q *= np.where(bit[None, :], P[:, i:i + 1], 1. - P[:, i:i + 1])
    return DistTable(masks, spin_table.probs @ Q, 0., ("omega_tau",), (m,))


def sigma_from_atrc_pair(pair, d, rng):
    """sigma_bullet constant on omega_tautau' clusters: +1 on clusters meeting the domain boundary, fair coins elsewhere."""
    uf = d.union_find(pair.omega_second, BoundaryPartition.wired(d.domain_boundary))
    pinned = set(uf.find(d.index[v]) for v in d.domain_boundary)
    spin = {}
    bullet = {}
    for i, v in builtins.enumerate(d.vertices):
        r = uf.find(i)
        if r not in spin:
            spin[r] = 1 if r in pinned else (1 if rng.random() < 0.5 else -1)
        bullet[v] = spin[r]
    return SpinState(sigma_bullet=bullet)


class LoopSet(object):
    """
    Loops separating the primal clusters of a configuration (domain-boundary edges opened)
    from the clusters of its dual inside the domain.

    Each loop is a cyclic sequence of medial nodes (v, a), v a vertex of the domain and a an
    inside dual vertex adjacent to v in Z^2. Clusters and loops form a tree rooted at the cluster
    of the surrounding cycle; the child of a loop is its cluster farther from the root.
    """
    def __init__(self, loops, separates, child, parent, depth, enclosing, num_primal, num_dual):
        self.loops = loops
        self.separates = separates
        self.child = child
        self.parent = parent
        self.depth = depth
        self.enclosing = enclosing
        self.num_primal = num_primal
        self.num_dual = num_dual

    def __len__(self):
        return len(self.loops)

    def parity(self, vertex, loop):
        """Number of times (mod 2) a path from the boundary to vertex crosses loop."""
        return 1 if loop in self.enclosing[vertex] else 0

    @property
    def crossing_count(self):
        return {(v, l): self.parity(v, l) for v in self.enclosing for l in range(len(self.loops))}

    @property
    def nesting(self):
        """Loop index -> enclosing loop index, None at the outermost level."""
        return dict(builtins.enumerate(self.parent))

    @property
    def euler_consistent(self):
        return len(self.loops) == self.num_primal + self.num_dual - 1

    def dump(self):
        lines = ["loops {0}".format(len(self.loops)),
                 "primal_clusters {0}".format(self.num_primal),
                 "dual_clusters {0}".format(self.num_dual),
                 "max_depth {0}".format(max(self.depth) if self.depth else 0)]
        for i, loop in builtins.enumerate(self.loops):
            parent = "-" if self.parent[i] is None else str(self.parent[i])
            lines.append("loop {0} length {1} depth {2} parent {3}".format(i, len(loop), self.depth[i], parent))
        return "\n".join(lines) + "\n"


def trace_loops(eta, d):
    if not d.is_cycle_domain:
        raise ValueError("ATRC Error: Loops are traced on cycle-domains only.")
    z = Z2Domain(d)
    dual = d.dual()
    inside = z.inside_dual
    eta = eta | d.edge_boundary_mask

    uf = d.union_find(eta)
    plabel = {v: ("p", uf.find(d.index[v])) for v in d.vertices}
    duf = UnionFind(dual.num_vertices)
    for i in range(d.num_edges):
        if not (eta >> i) & 1:
            j = dual.dual_map[i]
            duf.union(int(dual.edge_u[j]), int(dual.edge_w[j]))
    dlabel = {a: ("d", duf.find(dual.index[a])) for a in inside}

    adj = {}

    def link(x, y):
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)

    for i, (u, w, a, b) in builtins.enumerate(z.tiles):
        if (eta >> i) & 1:
            for c in (a, b):
                if c in inside:
                    link((u, c), (w, c))
        else:
            link((u, a), (u, b))
            link((w, a), (w, b))

    loops = []
    separates = []
    seen = set()
    for start in sorted(adj):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = start, adj[start][0]
        while cur != start:
            if len(adj[cur]) != 2:
                raise RuntimeError("ATRC Error: Medial node {0} has degree {1}.".format(cur, len(adj[cur])))
            loop.append(cur)
            seen.add(cur)
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            prev, cur = cur, nxt
        pairs = set((plabel[v], dlabel[a]) for v, a in loop)
        if len(pairs) != 1:
            raise RuntimeError("ATRC Error: Loop touches more than one pair of clusters.")
        loops.append(tuple(loop))
        separates.append(pairs.pop())

    root = plabel[d.cycle[0]]
    touching = {}
    for l, (p, q) in builtins.enumerate(separates):
        touching.setdefault(p, []).append((q, l))
        touching.setdefault(q, []).append((p, l))
    child = [None] * len(loops)
    parent = [None] * len(loops)
    depth = [0] * len(loops)
    into = {root: None}
    level = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for cl in frontier:
            for other, l in touching.get(cl, []):
                if child[l] is not None or other == cl:
                    continue
                if other in into:
                    raise RuntimeError("ATRC Error: Loops do not form a tree.")
                child[l] = other
                parent[l] = into[cl]
                depth[l] = level[cl] + 1
                into[other] = l
                level[other] = level[cl] + 1
                nxt.append(other)
        frontier = nxt
    num_primal = uf.num_components
    num_dual = len(set(dlabel.values()))
    if len(into) != num_primal + num_dual:
        raise RuntimeError("ATRC Error: Some cluster is not reached from the boundary.")

    enclosing = {}
    labels = dict(plabel)
    labels.update(dlabel)
    for v, cl in labels.items():
        path = []
        l = into[cl]
        while l is not None:
            path.append(l)
            l = parent[l]
        enclosing[v] = tuple(reversed(path))
    return LoopSet(loops, separates, child, parent, depth, enclosing, num_primal, num_dual)


def _bkw_setup(d, sv):
    z = Z2Domain(d)
    root = 0 if z.parity == "even" else 1
    sign = 1 if z.parity == "even" else -1
    up = math.exp(sv.lam) / math.sqrt(sv.q)
    return z, root, sign, up


def bkw_heights(eta, sv, parity, d, rng):
    """
    Heights from a configuration eta and one coin per loop: 0 on the L-part and 1 on the
    L*-part of the boundary; crossing a loop inwards moves the height by +1 with probability
    e^lambda/sqrt(q) (even domains) or by -1 with that probability (odd domains).
    """
    z, root, sign, up = _bkw_setup(d, sv)
    if parity != z.parity:
        raise ValueError("ATRC Error: Domain parity is {0}, not {1}.".format(z.parity, parity))
    ls = trace_loops(eta, d)
    coins = np.where(rng.random(len(ls)) < up, sign, -sign)
    h = {}
    for v in z.vertices:
        if v in ls.enclosing:
            h[v] = root + int(sum(coins[l] for l in ls.enclosing[v]))
        else:
            h[v] = 1 - root
    return HeightFn(h, z)


def bkw_table(d, sv, cap=constants.ENUMERATION_CAP):
    """Exact law of bkw_heights with eta drawn from FK wired on the domain boundary at p_sd(q)."""
    z, root, sign, up = _bkw_setup(d, sv)
    fk = enumerate(MeasureSpec("FK", FKParams(p_sd(sv.q), sv.q), d, BoundaryPartition.wired(d.domain_boundary), cap))
    items = []
    count = 0
    for (eta,), p in zip(fk.states, fk.probs):
        if p == 0.:
            continue
        ls = trace_loops(int(eta), d)
        L = len(ls)
        count += 1 << L
        if count > cap:
            raise EnumerationCapError(count, cap)
        C = np.zeros((len(z.vertices), L))
        base = np.full(len(z.vertices), 1 - root)
        for j, v in builtins.enumerate(z.vertices):
            if v in ls.enclosing:
                base[j] = root
                for l in ls.enclosing[v]:
                    C[j, l] = 1.
        coins = np.array(list(itertools.product((sign, -sign), repeat=L)), dtype=float).reshape(1 << L, L)
        weights = np.prod(np.where(coins == sign, up, 1. - up), axis=1) * p
        H = base[None, :] + coins @ C.T
        for row, wgt in zip(H, weights):
            items.append((tuple(int(round(x)) for x in row), wgt))
    names = ["h({0},{1})".format(v.x, v.y) for v in z.vertices]
    return DistTable.from_items(items, names, None)


def dual_atrc_config(pair, d=None):
    """
    (omega_tautau'*, omega_tau*) when J<U, (omega_tau*, omega_tau'*) when J>=U, as an EdgePair on
    Omega*.
    """
    d = pair.domain if d is None else d
    if d is None:
        raise ValueError("ATRC Error: dual_atrc_config needs the domain of the pair.")
    dual = d.dual()
    first = dual_mask(pair.omega_tau, d)
    second = dual_mask(pair.omega_second, d)
    if pair.layer_kind == TAU_TAUTAU:
        return EdgePair(second, first, TAU_TAUTAU, dual)
    return EdgePair(first, second, TAU_TAUPRIME, dual)


def euler_constant(d):
    """
    k^1(omega) - k(omega*) - |omega*| over all omega on Omega* (wired on its boundary), with
    omega* on Omega counted free. Returns the common value; raises if it is not constant.
    """
    dual = d.dual()
    back = dual.dual()
    wired = BoundaryPartition.wired(dual.boundary)
    values = set()
    for omega in range(1 << dual.num_edges):
        star = dual_mask(omega, dual)
        values.add(dual.count_clusters(omega, wired) - back.count_clusters(star) - popcount(star))
    if len(values) != 1:
        raise RuntimeError("ATRC Error: Euler identity fails, values {0}.".format(sorted(values)))
    return values.pop()


