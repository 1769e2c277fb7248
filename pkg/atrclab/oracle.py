# -*- coding: utf-8 -*-

"""
Exact enumeration of the measures of atrclab.measures on tiny domains, and the checks built on
the resulting tables: expectations, pushforwards, total variation, stochastic domination,
GKS margins, the spin/cluster coupling identity and the Holley monotonicity scan.
"""

import builtins
import csv
import math
from collections import namedtuple

import networkx as nx
import numpy as np
from scipy import special

from . import constants
from .lattice import PRIMAL, BoundaryPartition, bits, point
from .measures import J_LT_U, STATES, ATParams, FKParams, atrc_weights, edge_conditional, fk_dual_p, p_sd

families = {"AT": 0, "ATRC": 1, "FK": 2, "HF": 3, "SPIN": 4}


class EnumerationCapError(ValueError):
    def __init__(self, required, cap):
        self.required = required
        self.cap = cap
        super(EnumerationCapError, self).__init__("ATRC Error: Enumeration needs {0} states, cap is {1}.".format(required, cap))


class DistTable(object):
    """
    Exact finite distribution.

    Arguments
    ---------
    states : array_like of int, shape (N, columns)
        One configuration per row. Edge and spin configurations are bit-vector ints.
    probs : array_like of float, shape (N,)
        Probabilities; renormalized with math.fsum and checked against 1.
    log_Z : float
        Log partition function of the unnormalized weights, when the table comes from enumerate.
    columns : sequence of str
        Component names.
    widths : sequence of int or None
        Bit width of each component for key rendering; None renders the integer itself.
    """
    def __init__(self, states, probs, log_Z=0., columns=None, widths=None):
        states = np.asarray(states, dtype=np.int64)
        if states.ndim == 1:
            states = states.reshape(-1, 1)
        probs = np.asarray(probs, dtype=float)
        if len(probs) != len(states):
            raise ValueError("ATRC Error: {0} states but {1} probabilities.".format(len(states), len(probs)))
        if len(probs) and probs.min() < 0.:
            raise ValueError("ATRC Error: Negative probability in table.")
        total = math.fsum(probs)
        if not total > 0.:
            raise ValueError("ATRC Error: Table has zero total mass.")
        if abs(total - 1.) > 1e-6:
            raise ValueError("ATRC Error: Table mass {0:.17g} is not 1.".format(total))
        self.states = states
        self.probs = probs / total
        self.log_Z = float(log_Z)
        ncol = states.shape[1]
        self.columns = tuple(columns) if columns is not None else tuple("c{0}".format(i) for i in range(ncol))
        self.widths = tuple(widths) if widths is not None else (None,) * ncol
        if len(self.columns) != ncol or len(self.widths) != ncol:
            raise ValueError("ATRC Error: Column names or widths do not match the state shape.")

    @classmethod
    def from_items(cls, items, columns=None, widths=None, log_Z=0.):
        """Table from (row tuple, mass) pairs; masses of equal rows are summed."""
        merged = {}
        for row, p in items:
            merged.setdefault(tuple(row), []).append(p)
        rows = sorted(merged)
        probs = [math.fsum(merged[r]) for r in rows]
        return cls(np.array(rows, dtype=np.int64).reshape(len(rows), -1), probs, log_Z, columns, widths)

    def __len__(self):
        return len(self.probs)

    def column(self, name):
        return self.states[:, self.columns.index(name)]

    def key(self, i):
        parts = []
        for value, width in zip(self.states[i], self.widths):
            value = int(value)
            if width is None:
                parts.append(str(value))
            else:
                parts.append("".join(str((value >> j) & 1) for j in range(width)))
        return "|".join(parts)

    def keys(self):
        return [self.key(i) for i in range(len(self))]

    def as_dict(self):
        return {tuple(int(x) for x in row): float(p) for row, p in zip(self.states, self.probs)}

    def check(self):
        if abs(math.fsum(self.probs) - 1.) > constants.NORMALIZATION_TOL:
            raise ValueError("ATRC Error: Table is not normalized.")
        if len(np.unique(self.states, axis=0)) != len(self.states):
            raise ValueError("ATRC Error: Table has repeated states.")
        return True

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("key", "probability"))
            writer.writerows((self.key(i), "{0:.17g}".format(self.probs[i])) for i in range(len(self)))

    def __repr__(self):
        return "<DistTable {0} states, columns {1}>".format(len(self), ",".join(self.columns))


class MeasureSpec(object):
    """
    What to enumerate.

    Arguments
    ---------
    family : str
        "AT", "ATRC", "FK", "HF" or "SPIN".
    params : record
        ATParams, ATRCWeights, FKParams or SixVParams.
    domain : Domain or Z2Domain
        Z2Domain for HF and SPIN.
    boundary :
        AT: "plus" or "free". ATRC: pair of BoundaryPartitions. FK: one BoundaryPartition.
        HF/SPIN: dict vertex -> height on the boundary of the Z^2-domain (default 0 on L, 1 on L*).
    cap : int
        Maximum number of states.
    """
    def __init__(self, family, params, domain, boundary=None, cap=constants.ENUMERATION_CAP):
        if family not in families:
            raise ValueError("ATRC Error: Unknown measure family '{0}'.".format(family))
        self.family = family
        self.params = params
        self.domain = domain
        self.cap = cap
        if family == "AT":
            boundary = "plus" if boundary is None else boundary
            if boundary not in ("plus", "free"):
                raise ValueError("ATRC Error: AT boundary condition must be 'plus' or 'free'.")
        elif family == "ATRC":
            if boundary is None or len(boundary) != 2 or not all(isinstance(b, BoundaryPartition) for b in boundary):
                raise ValueError("ATRC Error: ATRC needs one BoundaryPartition per layer.")
        elif family == "FK":
            if boundary is not None and not isinstance(boundary, BoundaryPartition):
                raise ValueError("ATRC Error: FK needs a BoundaryPartition.")
        else:
            if not hasattr(domain, "primal_part"):
                raise ValueError("ATRC Error: {0} measures live on a Z^2-domain.".format(family))
            boundary = domain.boundary_heights() if boundary is None else {point(v): int(h) for v, h in boundary.items()}
            if set(boundary) != set(domain.boundary):
                raise ValueError("ATRC Error: Height boundary values must cover the boundary exactly.")
        self.boundary = boundary


def _counts(d, bp):
    m = d.num_edges
    return np.array([d.count_clusters(mask, bp) for mask in range(1 << m)], dtype=np.int64)


def _bit(x, i):
    return (x >> i) & 1


def _parity(x):
    x = x.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> shift
    return x & 1


def _finish(states, logw, columns, widths):
    log_Z = special.logsumexp(logw)
    with np.errstate(under="ignore"):
        probs = np.exp(logw - log_Z)
    return DistTable(states, probs, log_Z, columns, widths)


def _enumerate_atrc(spec):
    w, d = spec.params, spec.domain
    bp1, bp2 = spec.boundary
    m = d.num_edges
    required = 3**m if w.regime == J_LT_U else 4**m
    if required > spec.cap:
        raise EnumerationCapError(required, spec.cap)
    if w.regime == J_LT_U:
        t = np.zeros(1, dtype=np.int64)
        s = np.zeros(1, dtype=np.int64)
        for e in range(m):
            b = 1 << e
            t = np.concatenate([t, t, t | b])
            s = np.concatenate([s, s | b, s | b])
    else:
        t = np.repeat(np.arange(1 << m, dtype=np.int64), 1 << m)
        s = np.tile(np.arange(1 << m, dtype=np.int64), 1 << m)
    k1 = _counts(d, bp1)
    k2 = _counts(d, bp2)
    factors = np.array(w.log_factors(m)).reshape(4, m)
    logw = (k1[t] + k2[s]) * math.log(2.)
    for e in range(m):
        logw = logw + factors[2 * _bit(t, e) + _bit(s, e), e]
    return _finish(np.column_stack([t, s]), logw, ("omega_tau", "omega_second"), (m, m))


def _enumerate_fk(spec):
    fk, d = spec.params, spec.domain
    m = d.num_edges
    if (1 << m) > spec.cap:
        raise EnumerationCapError(1 << m, spec.cap)
    masks = np.arange(1 << m, dtype=np.int64)
    n_open = np.array([bin(x).count("1") for x in range(1 << m)], dtype=float)
    k = _counts(d, spec.boundary)
    logw = special.xlogy(n_open, fk.p) + special.xlogy(m - n_open, 1. - fk.p) + k * math.log(fk.q)
    return _finish(masks, logw, ("omega",), (m,))


def _enumerate_at(spec):
    p, d = spec.params, spec.domain
    frozen = d.boundary if spec.boundary == "plus" else frozenset()
    free = [d.index[v] for v in d.vertices if v not in frozen]
    f = len(free)
    if 4**f > spec.cap:
        raise EnumerationCapError(4**f, spec.cap)
    combos = np.arange(4**f, dtype=np.int64)
    lo = combos % (1 << f)
    hi = combos // (1 << f)
    t = np.zeros_like(combos)
    s = np.zeros_like(combos)
    for j, v in builtins.enumerate(free):
        t |= _bit(lo, j) << v
        s |= _bit(hi, j) << v
    energy = np.zeros(len(combos))
    for u, w in zip(d.edge_u, d.edge_w):
        tt = 1 - 2 * (_bit(t, u) ^ _bit(t, w))
        ss = 1 - 2 * (_bit(s, u) ^ _bit(s, w))
        energy = energy + p.J * (tt + ss) + p.U * tt * ss
    return _finish(np.column_stack([t, s]), p.beta * energy, ("tau", "tau_prime"), (d.num_vertices, d.num_vertices))


def height_bounds(z, t):
    """Pointwise bounds max_b(t_b - dist) <= h <= min_b(t_b + dist) from the boundary values."""
    lo = {v: -math.inf for v in z.vertices}
    hi = {v: math.inf for v in z.vertices}
    for v, h in t.items():
        lo[v] = hi[v] = h
    changed = True
    while changed:
        changed = False
        for v, a in z.edges:
            for x, y in ((v, a), (a, v)):
                if lo[x] - 1 > lo[y]:
                    lo[y] = lo[x] - 1
                    changed = True
                if hi[x] + 1 < hi[y]:
                    hi[y] = hi[x] + 1
                    changed = True
    for v in z.vertices:
        if math.isinf(lo[v]):
            raise ValueError("ATRC Error: Vertex {0} is not connected to the boundary.".format(tuple(v)))
    return lo, hi


def enumerate_heights(z, t, cap=constants.ENUMERATION_CAP):
    """All height functions on z equal to t on the boundary, rows in z.vertices order."""
    lo, hi = height_bounds(z, t)
    nbrs = {v: [z.vertices[j] for j in z.neighbours[z.index[v]]] for v in z.vertices}
    order = []
    seen = set(t)
    frontier = sorted(t)
    while frontier:
        nxt = []
        for v in frontier:
            for n in nbrs[v]:
                if n not in seen:
                    seen.add(n)
                    order.append(n)
                    nxt.append(n)
        frontier = nxt
    vals = dict(t)
    rows = []

    def extend(i):
        if i == len(order):
            rows.append(tuple(vals[v] for v in z.vertices))
            if len(rows) > cap:
                raise EnumerationCapError(len(rows), cap)
            return
        v = order[i]
        cands = None
        for n in nbrs[v]:
            if n in vals:
                c = {vals[n] - 1, vals[n] + 1}
                cands = c if cands is None else cands & c
        for h in sorted(cands):
            if lo[v] <= h <= hi[v]:
                vals[v] = h
                extend(i + 1)
                del vals[v]

    extend(0)
    return rows


def _enumerate_hf(spec):
    z, sv = spec.domain, spec.params
    rows = enumerate_heights(z, spec.boundary, spec.cap)
    H = np.array(rows, dtype=np.int64).reshape(len(rows), len(z.vertices))
    on_cycle = z.primal_part.edge_boundary
    n_i = np.zeros(len(rows))
    n_b = np.zeros(len(rows))
    for i, (u, w, a, b) in builtins.enumerate(z.tiles):
        iu, iw, ia, ib = z.index[u], z.index[w], z.index[a], z.index[b]
        frozen = (H[:, iu] == H[:, iw]) & (H[:, ia] == H[:, ib])
        if i in on_cycle:
            n_b += frozen
        else:
            n_i += frozen
    logw = n_i * math.log(sv.c) + n_b * math.log(sv.c_b)
    names = ["h({0},{1})".format(v.x, v.y) for v in z.vertices]
    return _finish(H, logw, names, None)


def spin_masks(z, H):
    """(sigma_bullet mask, sigma_circ mask) per height row; a set bit means spin -1."""
    bullet = [j for j, v in builtins.enumerate(z.vertices) if v.parity == PRIMAL]
    circ = [j for j, v in builtins.enumerate(z.vertices) if v.parity != PRIMAL]
    minus = (np.mod(H, 4) >= 2).astype(np.int64)
    sb = np.zeros(len(H), dtype=np.int64)
    sc = np.zeros(len(H), dtype=np.int64)
    for pos, j in builtins.enumerate(bullet):
        sb |= minus[:, j] << pos
    for pos, j in builtins.enumerate(circ):
        sc |= minus[:, j] << pos
    return np.column_stack([sb, sc])


def _enumerate_spin(spec):
    z = spec.domain
    hf = _enumerate_hf(spec)
    nb = sum(1 for v in z.vertices if v.parity == PRIMAL)
    table = pushforward(hf, lambda H: spin_masks(z, H), vectorized=True,
                        columns=("sigma_bullet", "sigma_circ"), widths=(nb, len(z.vertices) - nb))
    table.log_Z = hf.log_Z
    return table


_dispatch = {"AT": _enumerate_at, "ATRC": _enumerate_atrc, "FK": _enumerate_fk, "HF": _enumerate_hf, "SPIN": _enumerate_spin}


def enumerate(spec):
    """Exact normalized table of the measure described by spec."""
    return _dispatch[spec.family](spec)


def expectation(t, f, vectorized=False):
    """
    Sum of f * p. f is an array of values per state, a function of the states array
    (vectorized=True) or a function of one row tuple.
    """
    if callable(f):
        if vectorized:
            values = np.asarray(f(t.states), dtype=float)
        else:
            values = np.array([f(tuple(int(x) for x in row)) for row in t.states], dtype=float)
    else:
        values = np.asarray(f, dtype=float)
    return math.fsum(values * t.probs)


def pushforward(t, fn, vectorized=False, columns=None, widths=None):
    """Image of t under fn, fibers merged; rows of the image are sorted."""
    if vectorized:
        image = np.asarray(fn(t.states), dtype=np.int64)
    else:
        image = np.array([fn(tuple(int(x) for x in row)) for row in t.states], dtype=np.int64)
    if image.ndim == 1:
        image = image.reshape(-1, 1)
    rows, inverse = np.unique(image, axis=0, return_inverse=True)
    probs = np.bincount(inverse.reshape(-1), weights=t.probs, minlength=len(rows))
    return DistTable(rows, probs, t.log_Z, columns, widths)


def marginal(t, column):
    j = t.columns.index(column) if not isinstance(column, int) else column
    return pushforward(t, lambda S: S[:, j], vectorized=True, columns=(t.columns[j],), widths=(t.widths[j],))


def tv_distance(a, b, strict=True):
    """Half the L1 distance. With strict=False a state missing from one table has probability 0 there."""
    da = a.as_dict()
    db = b.as_dict()
    if strict and set(da) != set(db):
        raise ValueError("ATRC Error: Tables live on different state spaces ({0} vs {1} states).".format(len(da), len(db)))
    keys = set(da) | set(db)
    return 0.5 * math.fsum(abs(da.get(k, 0.) - db.get(k, 0.)) for k in keys)


def coordinatewise(widths):
    """Partial order on rows: bit containment on bit columns, <= on integer columns."""
    def leq(x, y):
        for a, b, width in zip(x, y, widths):
            if width is None:
                if a > b:
                    return False
            elif a & ~b:
                return False
        return True
    return leq


Domination = namedtuple("Domination", ["dominated", "coupling", "witness", "margin"])


def check_domination(mu, nu, order=None):
    """
    Decide whether nu stochastically dominates mu by Strassen's theorem: a max-flow from mu's
    states to the nu-states above them must saturate mu. On failure the witness is an up-set U with
    mu(U) > nu(U), and margin is mu(U) - nu(U).
    """
    pm = mu.as_dict()
    pn = nu.as_dict()
    states = sorted(set(pm) | set(pn))
    if len(states) > constants.FLOW_CAP:
        raise ValueError("ATRC Error: {0} states exceed the flow cap {1}.".format(len(states), constants.FLOW_CAP))
    leq = order or coordinatewise(mu.widths)
    S = constants.FLOW_SCALE
    G = nx.DiGraph()
    G.add_node("s")
    G.add_node("t")
    total = 0
    for i, x in builtins.enumerate(states):
        cm = int(math.floor(pm.get(x, 0.) * S))
        cn = int(math.ceil(pn.get(x, 0.) * S))
        total += cm
        G.add_edge("s", ("mu", i), capacity=cm)
        G.add_edge(("nu", i), "t", capacity=cn)
    for i, x in builtins.enumerate(states):
        if pm.get(x, 0.) <= 0.:
            continue
        for j, y in builtins.enumerate(states):
            if leq(x, y):
                G.add_edge(("mu", i), ("nu", j))
    value, flow = nx.maximum_flow(G, "s", "t")
    if value >= total * (1. - constants.FLOW_RTOL):
        coupling = {}
        for i, x in builtins.enumerate(states):
            for node, f in flow[("mu", i)].items():
                if f > 0:
                    coupling[(x, states[node[1]])] = f / S
        return Domination(True, coupling, None, 0.)
    _, (reach, _) = nx.minimum_cut(G, "s", "t")
    low = [states[node[1]] for node in reach if isinstance(node, tuple) and node[0] == "mu"]
    up = [y for y in states if any(leq(x, y) for x in low)]
    margin = math.fsum(pm.get(y, 0.) for y in up) - math.fsum(pn.get(y, 0.) for y in up)
    return Domination(False, None, up, margin)


def subset_signs(masks, states):
    """(-1)^{|A intersect state|} for every subset mask A (rows) and state (columns)."""
    return np.array([1 - 2 * _parity(states & a) for a in masks], dtype=float)


def check_gks(source, A, B, C, D):
    """
    <tau_A tau'_B tau_C tau'_D> - <tau_A tau'_B><tau_C tau'_D> under an AT measure.
    A..D are vertex collections of the domain of the AT MeasureSpec.
    """
    if not isinstance(source, MeasureSpec) or source.family != "AT":
        raise ValueError("ATRC Error: check_gks needs an AT MeasureSpec.")
    d = source.domain
    t = enumerate(source)
    mA, mB, mC, mD = (d.vertex_mask(X) for X in (A, B, C, D))
    return _gks_margin(t, mA, mB, mC, mD)


def _gks_margin(t, mA, mB, mC, mD):
    tau = t.states[:, 0]
    taup = t.states[:, 1]

    def corr(a, b):
        return expectation(t, (1 - 2 * _parity(tau & a)) * (1 - 2 * _parity(taup & b)))

    return corr(mA ^ mC, mB ^ mD) - corr(mA, mB) * corr(mC, mD)


def gks_scan(spec, vertices=None):
    """Minimum GKS margin over all quadruples of subsets of vertices (default: every vertex)."""
    d = spec.domain
    t = enumerate(spec)
    vertices = d.vertices if vertices is None else [point(v) for v in vertices]
    idx = [d.index[v] for v in vertices]
    masks = np.array([sum(1 << idx[j] for j in bits(a)) for a in range(1 << len(idx))], dtype=np.int64)
    Pt = subset_signs(masks, t.states[:, 0])
    Pp = subset_signs(masks, t.states[:, 1])
    M = (Pt * t.probs) @ Pp.T
    n = len(masks)
    sub = np.arange(n)
    # masks[a ^ c] == masks[a] ^ masks[c]
    x = sub[:, None] ^ sub[None, :]
    joint = M[x[:, None, :, None], x[None, :, None, :]]  # [A,B,C,D] -> M[A^C, B^D]
    margin = joint - M[:, :, None, None] * M[None, None, :, :]
    return float(margin.min())


def connection_flags(d, x, target=None):
    """Boolean array over all edge masks of d: x connected to target (default the boundary)."""
    target = d.boundary if target is None else target
    return np.array([d.connected(mask, x, target) for mask in range(1 << d.num_edges)], dtype=bool)


def connection_probability(t, d, x, column=0, target=None):
    flags = connection_flags(d, x, target)
    return math.fsum(t.probs[flags[t.states[:, column]]])


def coupling_identity_residual(J, U, beta, d, x=(0, 0), cap=constants.ENUMERATION_CAP):
    """
    Exact residuals of <tau_x>^{+,+} = ATRC^{1,1}(x <-> boundary in omega_tau) and of the
    tau tau' identity: omega_tautau' when J < U, both omega_tau and omega_tau' when J >= U.
    """
    x = point(x)
    at = enumerate(MeasureSpec("AT", ATParams.isotropic(J, U, beta), d, "plus", cap))
    ix = d.index[x]
    tau_x = expectation(at, 1 - 2 * _bit(at.states[:, 0], ix))
    tautau_x = expectation(at, (1 - 2 * _bit(at.states[:, 0], ix)) * (1 - 2 * _bit(at.states[:, 1], ix)))
    w = atrc_weights(J, U, beta)
    bp = BoundaryPartition.wired(d.boundary)
    rc = enumerate(MeasureSpec("ATRC", w, d, (bp, bp), cap))
    flags = connection_flags(d, x)
    first = flags[rc.states[:, 0]]
    second = flags[rc.states[:, 1]]
    p_first = math.fsum(rc.probs[first])
    if w.regime == J_LT_U:
        p_second = math.fsum(rc.probs[second])
    else:
        p_second = math.fsum(rc.probs[first & second])
    return abs(tau_x - p_first), abs(tautau_x - p_second)


def _support(regime):
    return ((0, 0), (0, 1), (1, 1)) if regime == J_LT_U else STATES


def _raises(state, regime):
    """States one step above state in the support order."""
    return [s for s in _support(regime) if s != state and s[0] >= state[0] and s[1] >= state[1]
            and (s[0] - state[0]) + (s[1] - state[1]) == 1]


def upset_probs(cond, regime):
    """Probabilities of the nontrivial up-sets of the single-edge support."""
    p00, p01, p10, p11 = cond
    if regime == J_LT_U:
        return (p11, p01 + p11)
    return (p11, p01 + p11, p10 + p11, p01 + p10 + p11)


def check_holley(d, w, bp_first, bp_second, raise_factor=1.5):
    """
    Exhaustive scan of the single-edge conditionals: for every edge e and every configuration of
    the other edges, raising another edge by one step, or raising w_tau(e) (J<U), must not lower
    any up-set probability. Returns the list of violations (empty when monotone).
    """
    m = d.num_edges
    k1 = _counts(d, bp_first)
    k2 = _counts(d, bp_second)
    support = _support(w.regime)
    violations = []

    def up(e, cfg, weights):
        t, s = cfg
        b = 1 << e
        dk1 = k1[t & ~b] - k1[t | b]
        dk2 = k2[s & ~b] - k2[s | b]
        return upset_probs(edge_conditional(weights, e, dk1, dk2), w.regime)

    def configs(others):
        out = [(0, 0)]
        for f in others:
            nxt = []
            for t, s in out:
                for i, j in support:
                    nxt.append((t | (i << f), s | (j << f)))
            out = nxt
        return out

    for e in range(m):
        others = [f for f in range(m) if f != e]
        raised_w = None
        if w.regime == J_LT_U:
            raised_w = w.with_overrides({e: w.w_tau_at(e) * raise_factor})
        for t, s in configs(others):
            base = up(e, (t, s), w)
            for f in others:
                state = ((t >> f) & 1, (s >> f) & 1)
                for i, j in _raises(state, w.regime):
                    t2 = (t & ~(1 << f)) | (i << f)
                    s2 = (s & ~(1 << f)) | (j << f)
                    higher = up(e, (t2, s2), w)
                    if any(h < l - 1e-15 for h, l in zip(higher, base)):
                        violations.append((e, (t, s), (t2, s2)))
            if raised_w is not None:
                higher = up(e, (t, s), raised_w)
                if any(h < l - 1e-15 for h, l in zip(higher, base)):
                    violations.append((e, (t, s), "w_tau"))
    return violations


def dual_mask(mask, d):
    """omega* on Omega*: the dual of edge i is open iff edge i is closed."""
    dual = d.dual()
    out = 0
    for i in range(d.num_edges):
        if not (mask >> i) & 1:
            out |= 1 << dual.dual_map[i]
    return out


def fk_self_duality_tv(d, q, p=None, cap=constants.ENUMERATION_CAP):
    """
    TV distance between the dual image of FK free on Omega and FK on Omega* wired on its boundary
    at the dual edge weight. At p = p_sd(q) (the default) both edge weights coincide.
    """
    p = p_sd(q) if p is None else p
    dual = d.dual()
    primal = enumerate(MeasureSpec("FK", FKParams(p, q), d, None, cap))
    lookup = np.array([dual_mask(mask, d) for mask in range(1 << d.num_edges)], dtype=np.int64)
    image = pushforward(primal, lambda S: lookup[S[:, 0]], vectorized=True, columns=("omega",), widths=(dual.num_edges,))
    target = enumerate(MeasureSpec("FK", FKParams(fk_dual_p(p, q), q), dual, BoundaryPartition.wired(dual.boundary), cap))
    return tv_distance(image, target)
