# -*- coding: utf-8 -*-

"""
Single-site and single-edge Markov chains for the AT, ATRC and FK measures, batch-means
estimates built on them, and the exact derivative/covariance check of connection events.
"""

import builtins
import math
import warnings
import zlib
from collections import namedtuple

import numpy as np
from scipy import stats

from . import constants
from .archive import write_rows
from .couplings import TAU_TAUTAU, EdgePair
from .lattice import BoundaryPartition, point
from .measures import J_LT_U, STATES, ATParams, ATRCWeights, FKParams, atrc_weight_derivatives, atrc_weights, edge_conditional
from .oracle import MeasureSpec, connection_flags, enumerate, expectation
from .tools import layers

chain_families = {"AT": 0, "ATRC": 1, "FK": 2}


def substream(seed, name):
    """Generator for the named substream of a master seed."""
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(key,))))


class ChainState(object):
    """
    Current state of one Markov chain.

    Configurations: AT chains hold a (tau mask, tau' mask) pair over the vertex indices of the
    domain (a set bit is spin -1); ATRC chains hold an EdgePair; FK chains an edge mask.
    Boundary conditions: "plus" or "free" for AT, a pair of BoundaryPartitions for ATRC, a
    BoundaryPartition or None for FK.
    """
    def __init__(self, family, config, domain, params, boundary, seed=0, stream="chain", debug=False):
        if family not in chain_families:
            raise ValueError("ATRC Error: No sampler for family '{0}'.".format(family))
        self.family = family
        self.config = config
        self.domain = domain
        self.params = params
        self.boundary = boundary
        self.sweeps = 0
        self.stream = stream
        self.debug = debug
        self.reseed(seed)
        if family == "AT":
            self.frozen = domain.boundary if boundary == "plus" else frozenset()
        elif family == "ATRC":
            self._blocks = [_block_lookup(domain, bp) for bp in boundary]
        else:
            self._blocks = [_block_lookup(domain, boundary)]

    def reseed(self, seed):
        self.seed = int(seed)
        self.rng = substream(self.seed, self.stream)

    @property
    def spins(self):
        """tau and tau' as +1/-1 arrays over the vertex indices (AT chains)."""
        t, s = self.config
        n = self.domain.num_vertices
        tau = np.array([1 - 2 * ((t >> i) & 1) for i in range(n)])
        taup = np.array([1 - 2 * ((s >> i) & 1) for i in range(n)])
        return tau, taup

    def check_support(self):
        if self.family == "ATRC" and self.config.layer_kind == TAU_TAUTAU:
            if self.config.omega_tau & ~self.config.omega_second:
                raise RuntimeError("ATRC Error: omega_tau left omega_tautau' after sweep {0}.".format(self.sweeps))

    def __repr__(self):
        return "<ChainState {0} on {1}, {2} sweeps, stream {3}>".format(self.family, self.domain, self.sweeps, self.stream)


def new_chain(family, d, params, boundary=None, seed=0, stream="chain", initial=None, debug=False):
    """
    Build a ChainState. The default initial configuration is all plus for AT and all open edges
    for ATRC and FK.
    """
    if family == "AT":
        if not isinstance(params, ATParams):
            raise ValueError("ATRC Error: AT chains need ATParams.")
        boundary = "plus" if boundary is None else boundary
        if boundary not in ("plus", "free"):
            raise ValueError("ATRC Error: AT boundary condition must be 'plus' or 'free'.")
        config = (0, 0) if initial is None else tuple(int(x) for x in initial)
    elif family == "ATRC":
        if not isinstance(params, ATRCWeights):
            raise ValueError("ATRC Error: ATRC chains need ATRCWeights.")
        if boundary is None or len(boundary) != 2:
            raise ValueError("ATRC Error: ATRC needs one BoundaryPartition per layer.")
        if initial is None:
            config = EdgePair.for_regime(d.full_mask, d.full_mask, params.regime, d)
        else:
            config = EdgePair.for_regime(initial[0], initial[1], params.regime, d)
    elif family == "FK":
        if not isinstance(params, FKParams):
            raise ValueError("ATRC Error: FK chains need FKParams.")
        config = d.full_mask if initial is None else int(initial)
    else:
        raise ValueError("ATRC Error: No sampler for family '{0}'.".format(family))
    return ChainState(family, config, d, params, boundary, seed, stream, debug)


def _block_lookup(d, bp):
    """(vertex index -> block id, block id -> member indices) for blocks of two or more vertices."""
    if bp is None:
        return {}, []
    owner = {}
    members = []
    for block in bp.blocks:
        if len(block) < 2:
            continue
        ids = sorted(d.index[v] for v in block)
        for i in ids:
            owner[i] = len(members)
        members.append(ids)
    return owner, members


def _unpack(mask, m):
    """Edge mask -> bytearray of m 0/1 entries."""
    raw = np.frombuffer(int(mask).to_bytes((m + 7) // 8 or 1, "little"), dtype=np.uint8)
    return bytearray(np.unpackbits(raw, bitorder="little")[:m].tobytes())


def _pack(bits):
    if not len(bits):
        return 0
    return int.from_bytes(np.packbits(np.frombuffer(bytes(bits), dtype=np.uint8), bitorder="little").tobytes(), "little")


def _joined(d, is_open, u, w, skip, blocks):
    """
    Whether u and w are joined by open edges other than skip, boundary blocks counting as joined.
    Bidirectional breadth-first search, always growing the smaller frontier, so the cost is
    set by the smaller of the two clusters.
    """
    if u == w:
        return True
    owner, members = blocks
    side = {u: 0, w: 1}
    frontiers = [[u], [w]]
    used = (set(), set())
    while frontiers[0] and frontiers[1]:
        k = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        grown = []
        for v in frontiers[k]:
            reach = [nbr for nbr, f in d.incidence[v] if f != skip and is_open[f]]
            b = owner.get(v)
            if b is not None and b not in used[k]:
                used[k].add(b)
                reach.extend(members[b])
            for x in reach:
                s = side.get(x)
                if s is None:
                    side[x] = k
                    grown.append(x)
                elif s != k:
                    return True
        frontiers[k] = grown
    return False


def delta_k(d, cfg, e, blocks):
    """
    k(cfg with e closed) - k(cfg with e open): 0 if the endpoints of e are joined otherwise, else 1.
    cfg is an edge mask or a sequence of 0/1 edge states.
    """
    if isinstance(cfg, (int, np.integer)):
        cfg = _unpack(cfg, d.num_edges)
    return 0 if _joined(d, cfg, int(d.edge_u[e]), int(d.edge_w[e]), e, blocks) else 1


def _choose(probs, rng):
    u = rng.random()
    acc = 0.
    for i, p in builtins.enumerate(probs):
        acc += p
        if u < acc:
            return i
    return len(probs) - 1


def at_site_heatbath(st, v, rng=None):
    """Resample (tau_v, tau'_v) from its exact conditional given the neighbouring spins."""
    rng = st.rng if rng is None else rng
    d = st.domain
    v = point(v)
    if v in st.frozen:
        warnings.warn("Vertex {0} is frozen by the plus boundary condition; heat-bath update skipped.".format(tuple(v)), RuntimeWarning)
        return st
    _site_update(st, d.index[v], rng)
    return st


def _site_update(st, i, rng):
    p = st.params
    t, s = st.config
    h1 = h2 = h12 = 0
    for nbr, _ in st.domain.incidence[i]:
        a = 1 - 2 * ((t >> nbr) & 1)
        b = 1 - 2 * ((s >> nbr) & 1)
        h1 += a
        h2 += b
        h12 += a * b
    logw = [p.beta * (p.J_tau * x * h1 + p.J_tau_prime * y * h2 + p.U * x * y * h12)
            for x, y in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
    top = max(logw)
    w = [math.exp(l - top) for l in logw]
    total = math.fsum(w)
    k = _choose([x / total for x in w], rng)
    b = 1 << i
    t = (t | b) if k >= 2 else (t & ~b)
    s = (s | b) if k % 2 else (s & ~b)
    st.config = (t, s)


def atrc_edge_heatbath(st, e, rng=None):
    """
    Resample the state of edge e in both layers from its conditional given every other edge:
    weights a_e(i,j) 2^{(1-i) dk_1 + (1-j) dk_2}, with dk the cluster-count change on closing e.
    """
    rng = st.rng if rng is None else rng
    pair = st.config
    m = st.domain.num_edges
    first, second = _unpack(pair.omega_tau, m), _unpack(pair.omega_second, m)
    _atrc_update(st, e, first, second, rng)
    pair.omega_tau, pair.omega_second = _pack(first), _pack(second)
    return st


def _atrc_update(st, e, first, second, rng):
    d = st.domain
    u, w = int(d.edge_u[e]), int(d.edge_w[e])
    dk1 = 0 if _joined(d, first, u, w, e, st._blocks[0]) else 1
    dk2 = 0 if _joined(d, second, u, w, e, st._blocks[1]) else 1
    first[e], second[e] = STATES[_choose(edge_conditional(st.params, e, dk1, dk2), rng)]


def fk_edge_heatbath(st, e, rng=None):
    """Open e with probability p / (p + (1-p) q^dk)."""
    rng = st.rng if rng is None else rng
    is_open = _unpack(st.config, st.domain.num_edges)
    _fk_update(st, e, is_open, rng)
    st.config = _pack(is_open)
    return st


def _fk_update(st, e, is_open, rng):
    d = st.domain
    fk = st.params
    dk = 0 if _joined(d, is_open, int(d.edge_u[e]), int(d.edge_w[e]), e, st._blocks[0]) else 1
    p_open = fk.p / (fk.p + (1. - fk.p) * fk.q**dk)
    is_open[e] = 1 if rng.random() < p_open else 0


def sweep(st):
    """One systematic sweep in index order; frozen vertices are skipped."""
    d = st.domain
    m = d.num_edges
    if st.family == "AT":
        for i, v in builtins.enumerate(d.vertices):
            if v not in st.frozen:
                _site_update(st, i, st.rng)
    elif st.family == "ATRC":
        pair = st.config
        first, second = _unpack(pair.omega_tau, m), _unpack(pair.omega_second, m)
        for e in range(m):
            _atrc_update(st, e, first, second, st.rng)
        pair.omega_tau, pair.omega_second = _pack(first), _pack(second)
    else:
        is_open = _unpack(st.config, m)
        for e in range(m):
            _fk_update(st, e, is_open, st.rng)
        st.config = _pack(is_open)
    st.sweeps += 1
    if st.debug:
        st.check_support()
    return st


class EstimateSeries(object):
    """
    Recorded values of one observable with batch-means error bars.

    The standard error uses constants.N_BATCHES equal batches (a tail shorter than one batch is
    left out of the batches but kept in the mean); the effective sample size is the sample
    variance over the squared standard error. Flags collect "empty" and "unconverged".
    """
    def __init__(self, name, values, sweeps=0, seed=None, label=None):
        self.name = name
        self.values = np.asarray(values, dtype=float)
        self.sweeps = sweeps
        self.seed = seed
        self.label = label
        self.flags = set()
        n = len(self.values)
        if n == 0:
            self.flags.add("empty")
            self.mean = math.nan
            self.batch_means = np.array([])
            self.stderr = math.nan
            self.ess = 0.
            return
        self.mean = float(np.mean(self.values))
        size = n // constants.N_BATCHES
        if size == 0:
            self.batch_means = np.array([])
            self.stderr = math.nan
            self.ess = 0.
        else:
            used = self.values[:size * constants.N_BATCHES]
            self.batch_means = used.reshape(constants.N_BATCHES, size).mean(axis=1)
            self.stderr = float(np.std(self.batch_means, ddof=1) / math.sqrt(constants.N_BATCHES))
            var = float(np.var(self.values, ddof=1)) if n > 1 else 0.
            self.ess = var / self.stderr**2 if self.stderr > 0. else float(n)
        if self.ess < constants.MIN_ESS:
            self.flags.add("unconverged")

    @property
    def reported(self):
        return not self.flags

    def scaled(self, factor, name=None):
        out = EstimateSeries(self.name if name is None else name, self.values * factor, self.sweeps, self.seed, self.label)
        return out

    @classmethod
    def merge(cls, series):
        """Concatenate the values of several series in the given order."""
        series = list(series)
        if not series:
            raise ValueError("ATRC Error: Nothing to merge.")
        values = np.concatenate([s.values for s in series])
        return cls(series[0].name, values, sum(s.sweeps for s in series), series[0].seed, series[0].label)

    def csv_fields(self):
        return [self.name, "" if self.label is None else self.label, self.mean, self.stderr, self.ess, self.sweeps, self.seed]

    def __repr__(self):
        return "<EstimateSeries {0}: {1:.6g} +- {2:.2g}, ess {3:.0f}>".format(self.name, self.mean, self.stderr, self.ess)


csv_header = ["observable", "label", "mean", "stderr", "ess", "sweeps", "seed"]


def to_csv(path, series):
    write_rows(path, csv_header, [s.csv_fields() for s in series])


def run_chain(st, sweeps, burn_in=0, seed=None, observables=None):
    """
    Run sweeps systematic sweeps, recording every observable (name -> function of the state)
    after each sweep past burn_in. Returns name -> EstimateSeries.
    """
    if burn_in < 0 or sweeps < burn_in:
        raise ValueError("ATRC Error: Need sweeps >= burn_in >= 0, got {0} and {1}.".format(sweeps, burn_in))
    if seed is not None:
        st.reseed(seed)
    observables = observables or {}
    values = {name: [] for name in observables}
    for k in range(sweeps):
        sweep(st)
        if k >= burn_in:
            for name, f in observables.items():
                values[name].append(float(f(st)))
    out = {}
    for name in observables:
        out[name] = EstimateSeries(name, values[name], sweeps - burn_in, st.seed)
        if out[name].flags:
            warnings.warn("Series '{0}' is {1}.".format(name, " and ".join(sorted(out[name].flags))), RuntimeWarning)
    return out


def layer_config(st, layer):
    """Edge masks whose intersection is the open set of the requested layer."""
    if st.family == "FK":
        return (st.config,)
    if layer not in layers:
        raise ValueError("ATRC Error: Unknown layer '{0}'.".format(layer))
    pair = st.config
    if layer == "tau":
        return (pair.omega_tau,)
    if layer == "tau_prime":
        if pair.layer_kind == TAU_TAUTAU:
            raise ValueError("ATRC Error: tau' layer exists only when J >= U.")
        return (pair.omega_second,)
    if pair.layer_kind == TAU_TAUTAU:
        return (pair.omega_second,)
    return (pair.omega_tau, pair.omega_second)


def connection_observable(d, x, target=None, layer="tau"):
    x = point(x)
    if x not in d.vertex_set:
        raise ValueError("ATRC Error: Vertex {0} is not in the domain.".format(tuple(x)))
    target = d.boundary if target is None else frozenset(point(v) for v in target)

    def f(st):
        cfgs = layer_config(st, layer)
        return 1. if all(d.connected(c, x, target) for c in cfgs) else 0.
    return f


def estimate_connection(st, x, target=None, layer="tau", sweeps=1000, burn_in=100, seed=None):
    """Batch-means estimate of P(x <-> target), target defaulting to the boundary of the domain."""
    f = connection_observable(st.domain, x, target, layer)
    name = "connection_{0}".format(layer)
    out = run_chain(st, sweeps, burn_in, seed, {name: f})[name]
    out.label = "{0},{1}".format(*point(x))
    return out


def box_sides(d, n):
    """Box vertex indices and its left/right columns; rejects boxes the domain does not contain."""
    side = 2 * n - 1
    box = [point((x, y)) for x in range(side + 1) for y in range(side + 1) if point((x, y)).parity == d.lattice]
    missing = [v for v in box if v not in d.vertex_set]
    if missing:
        raise ValueError("ATRC Error: Box of size {0} does not fit in the domain.".format(n))
    inside = frozenset(d.index[v] for v in box)
    left = [d.index[v] for v in box if v.x == 0]
    right = frozenset(d.index[v] for v in box if v.x == side)
    return inside, left, right


def crosses_horizontally(d, cfg, sides):
    inside, left, right = sides
    seen = set(left)
    stack = list(left)
    while stack:
        v = stack.pop()
        if v in right:
            return True
        for nbr, f in d.incidence[v]:
            if (cfg >> f) & 1 and nbr in inside and nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return False


def estimate_crossing(st, n, layer="tau", sweeps=1000, burn_in=100, seed=None):
    """Batch-means estimate of the probability that [0,2n-1]^2 is crossed horizontally."""
    d = st.domain
    sides = box_sides(d, n)

    def f(st):
        return 1. if all(crosses_horizontally(d, c, sides) for c in layer_config(st, layer)) else 0.
    name = "crossing_{0}".format(layer)
    out = run_chain(st, sweeps, burn_in, seed, {name: f})[name]
    out.label = str(n)
    return out


def estimate_two_point(st, x, y, sweeps=1000, burn_in=100, seed=None, field="tau"):
    """<tau_x tau_y> (or the tau' / tau tau' product fields) from an AT chain."""
    if st.family != "AT":
        raise ValueError("ATRC Error: Two-point functions need an AT chain.")
    d = st.domain
    i, j = d.index[point(x)], d.index[point(y)]

    def spin(t, s, k):
        a = 1 - 2 * ((t >> k) & 1)
        b = 1 - 2 * ((s >> k) & 1)
        return {"tau": a, "tau_prime": b, "tautau": a * b}[field]

    def f(st):
        t, s = st.config
        return float(spin(t, s, i) * spin(t, s, j))
    name = "two_point_{0}".format(field)
    out = run_chain(st, sweeps, burn_in, seed, {name: f})[name]
    out.label = "{0},{1};{2},{3}".format(*(tuple(point(x)) + tuple(point(y))))
    return out


def estimate_phi(beta, S, J, U, method="exact", origin=(0, 0), sweeps=2000, burn_in=200, seed=0, cap=constants.ENUMERATION_CAP):
    """|boundary of S| times the wired/wired ATRC probability that the origin reaches the boundary in omega_tau."""
    origin = point(origin)
    if origin not in S.vertex_set:
        raise ValueError("ATRC Error: phi needs the origin in S.")
    w = atrc_weights(J, U, beta)
    bp = BoundaryPartition.wired(S.boundary)
    size = len(S.boundary)
    if method == "exact":
        t = enumerate(MeasureSpec("ATRC", w, S, (bp, bp), cap))
        flags = connection_flags(S, origin)
        return size * math.fsum(t.probs[flags[t.states[:, 0]]])
    if method == "mcmc":
        st = new_chain("ATRC", S, w, (bp, bp), seed, stream="phi")
        return size * estimate_connection(st, origin, None, "tau", sweeps, burn_in).mean
    raise ValueError("ATRC Error: Unknown phi method '{0}'.".format(method))


def fit_decay_rate(ns, probs):
    """Least-squares slope of -log(prob) against n, with its R^2."""
    ns = np.asarray(ns, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if len(ns) != len(probs) or len(ns) < 3:
        raise ValueError("ATRC Error: Decay fits need at least three (n, prob) points.")
    if np.any(np.diff(ns) <= 0.):
        raise ValueError("ATRC Error: n values must be strictly increasing.")
    if np.any(probs <= 0.):
        raise ValueError("ATRC Error: Decay fits need positive probabilities.")
    fit = stats.linregress(ns, -np.log(probs))
    return float(fit.slope), float(fit.rvalue**2)


DerivativeReport = namedtuple("DerivativeReport",
                              ["margin", "derivative", "covariance", "c", "identity_residual", "identity_passed"])


def _table(J, U, beta, d, cap):
    bp = BoundaryPartition.wired(d.boundary)
    return enumerate(MeasureSpec("ATRC", atrc_weights(J, U, beta), d, (bp, bp), cap))


def _popcounts(masks, m):
    return sum((masks >> e) & 1 for e in range(m)).astype(float)


def derivative_covariance_report(beta, d, A, J, U, h=constants.FD_STEP, cap=constants.ENUMERATION_CAP):
    """
    Central finite difference of ATRC^{1,1}[A] in beta against c times the sum over edges of
    Cov[1_A, omega_1(e)] + Cov[1_A, omega_2(e)]. A maps the (N, 2) states array to indicators.

    c comes from writing d/dbeta log weight as a nonnegative combination of |omega_tau|,
    |omega_2| and one more increasing edge count; identity_residual compares the finite
    difference with the exact Cov[1_A, d/dbeta log weight] and identity_passed holds it to
    constants.DERIVATIVE_TOL.
    """
    t = _table(J, U, beta, d, cap)
    plus = _table(J, U, beta + h, d, cap)
    minus = _table(J, U, beta - h, d, cap)
    derivative = (expectation(plus, A, vectorized=True) - expectation(minus, A, vectorized=True)) / (2. * h)

    m = d.num_edges
    ind = np.asarray(A(t.states), dtype=float)
    first, second = t.states[:, 0], t.states[:, 1]
    pA = expectation(t, ind)

    def cov(x):
        return expectation(t, ind * x) - pA * expectation(t, x)

    n1 = _popcounts(first, m)
    n2 = _popcounts(second, m)
    covariance = cov(n1 + n2)

    dlog = atrc_weight_derivatives(J, U, beta)
    score = np.zeros(len(t))
    for e in range(m):
        code = 2 * ((first >> e) & 1) + ((second >> e) & 1)
        for k, s in builtins.enumerate(STATES):
            if dlog[s] is not None:
                score = score + np.where(code == k, dlog[s], 0.)
    residual = abs(derivative - cov(score))

    base = dlog[(0, 0)]
    if atrc_weights(J, U, beta).regime == J_LT_U:
        c_tau = dlog[(1, 1)] - dlog[(0, 1)]
        c_tt = dlog[(0, 1)] - base
        c = min(c_tau, c_tt)
    else:
        c_one = dlog[(0, 1)] - base
        c_both = dlog[(1, 1)] - base - 2. * c_one
        c = c_one if c_both >= 0. else c_one + c_both
    return DerivativeReport(derivative - c * covariance, derivative, covariance, c, residual, residual <= constants.DERIVATIVE_TOL)


def derivative_covariance_check(beta, d, A, J, U, h=constants.FD_STEP, cap=constants.ENUMERATION_CAP):
    """Signed margin derivative - c * covariance sum; nonnegative up to finite-difference error."""
    return derivative_covariance_report(beta, d, A, J, U, h, cap).margin
