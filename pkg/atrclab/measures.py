# -*- coding: utf-8 -*-

"""
Unnormalized weights of the Ashkin-Teller model, its random-cluster representation (ATRC) in
both regimes, FK-percolation and six-vertex height functions, together with the parameter maps
between them (self-dual beta, dual couplings, six-vertex constants).
"""

import math

import numpy as np
from scipy import optimize

from . import constants
from .lattice import PRIMAL, bits, point, popcount
from .params import Params

J_LT_U = "J_lt_U"
J_GE_U = "J_ge_U"
STATES = ((0, 0), (0, 1), (1, 0), (1, 1))


class ATParams(object):
    """
    Couplings of the isotropic Ashkin-Teller Hamiltonian
    J_tau tau_u tau_v + J_tau' tau'_u tau'_v + U tau_u tau'_u tau_v tau'_v, at inverse temperature beta.
    """
    _fields = ("J_tau", "J_tau_prime", "U", "beta")

    def __init__(self, J_tau, J_tau_prime=None, U=0., beta=1.):
        self.J_tau = float(J_tau)
        self.J_tau_prime = float(J_tau if J_tau_prime is None else J_tau_prime)
        self.U = float(U)
        self.beta = float(beta)
        self._check()

    @classmethod
    def isotropic(cls, J, U, beta=1.):
        return cls(J, J, U, beta)

    def _check(self):
        if self.J_tau != self.J_tau_prime:
            raise ValueError("ATRC Error: Only the isotropic case J_tau = J_tau_prime is supported.")
        if self.J_tau < 0. or self.U < 0.:
            raise ValueError("ATRC Error: Couplings must be ferromagnetic, got J={0}, U={1}.".format(self.J_tau, self.U))
        if self.beta <= 0.:
            raise ValueError("ATRC Error: beta must be positive, got {0}.".format(self.beta))

    @property
    def J(self):
        return self.J_tau

    @property
    def params(self):
        return Params(self)

    def __repr__(self):
        return "<ATParams J={0:.17g} U={1:.17g} beta={2:.17g}>".format(self.J, self.U, self.beta)


class ATRCWeights(object):
    """
    Local weights a(i,j) of the ATRC measure. In the J<U regime the pair is (omega_tau, omega_tautau')
    and a(1,0) = 0; in the J>=U regime the pair is (omega_tau, omega_tau') and a(0,1) = a(1,0).

    Arguments
    ---------
    a00, a01, a10, a11 : float
        Local weights.
    regime : str
        "J_lt_U" or "J_ge_U".
    overrides : dict, optional
        Edge index -> w_tau for that edge (J<U only). State (1,1) on such an edge gets
        weight a00 * w_tau instead of a11.
    """
    _fields = ("a00", "a01", "a10", "a11")

    def __init__(self, a00, a01, a10, a11, regime=J_LT_U, overrides=None, derivatives=None):
        self.a00 = float(a00)
        self.a01 = float(a01)
        self.a10 = float(a10)
        self.a11 = float(a11)
        self.regime = regime
        self.overrides = dict(overrides or {})
        self.derivatives = derivatives  # state -> d/dbeta a(state), when built by atrc_weights
        self._check()

    def _check(self):
        if self.regime not in (J_LT_U, J_GE_U):
            raise ValueError("ATRC Error: Unknown regime '{0}'.".format(self.regime))
        if min(self.a00, self.a01, self.a10, self.a11) < 0.:
            raise ValueError("ATRC Error: ATRC weights must be nonnegative.")
        if self.a00 <= 0.:
            raise ValueError("ATRC Error: a(0,0) must be positive.")
        if self.regime == J_LT_U and self.a10 != 0.:
            raise ValueError("ATRC Error: a(1,0) must vanish when J < U.")
        if self.regime == J_GE_U and abs(self.a01 - self.a10) > 1e-15 * max(1., self.a01):
            raise ValueError("ATRC Error: a(0,1) and a(1,0) must agree when J >= U.")
        if self.overrides and self.regime != J_LT_U:
            raise ValueError("ATRC Error: Per-edge w_tau overrides exist only when J < U.")
        for e, w in self.overrides.items():
            if w < 0.:
                raise ValueError("ATRC Error: Override w_tau on edge {0} is negative.".format(e))

    @property
    def params(self):
        return Params(self)

    @property
    def w_tau(self):
        return self.a11 / self.a00

    @property
    def w_tautau(self):
        return self.a01 / self.a00

    def a(self, state, e=None):
        i, j = state
        if e is not None and (i, j) == (1, 1) and e in self.overrides:
            return self.a00 * self.overrides[e]
        return (self.a00, self.a01, self.a10, self.a11)[2 * i + j]

    def w_tau_at(self, e):
        return self.overrides.get(e, self.w_tau)

    def with_overrides(self, overrides):
        merged = dict(self.overrides)
        merged.update(overrides)
        return ATRCWeights(self.a00, self.a01, self.a10, self.a11, self.regime, merged, self.derivatives)

    def log_factors(self, num_edges):
        """Arrays (L00, L01, L10, L11) of per-edge log a(i,j); -inf where a vanishes."""
        with np.errstate(divide="ignore"):
            out = [np.full(num_edges, np.log(self.a((i, j)))) for i, j in STATES]
        for e, w in self.overrides.items():
            if e < num_edges:
                with np.errstate(divide="ignore"):
                    out[3][e] = np.log(self.a00 * w)
        return out

    def __repr__(self):
        return "<ATRCWeights {0}: a00={1:.6g} a01={2:.6g} a10={3:.6g} a11={4:.6g}>".format(self.regime, self.a00, self.a01, self.a10, self.a11)


class FKParams(object):
    _fields = ("p", "q")

    def __init__(self, p, q):
        self.p = float(p)
        self.q = float(q)
        self._check()

    @classmethod
    def self_dual(cls, q):
        return cls(p_sd(q), q)

    def _check(self):
        if not 0. <= self.p <= 1.:
            raise ValueError("ATRC Error: FK edge weight p must lie in [0,1], got {0}.".format(self.p))
        if self.q <= 0.:
            raise ValueError("ATRC Error: FK cluster weight q must be positive, got {0}.".format(self.q))

    @property
    def params(self):
        return Params(self)

    def __repr__(self):
        return "<FKParams p={0:.17g} q={1:.17g}>".format(self.p, self.q)


class SixVParams(object):
    """
    Six-vertex constants: c (weight of interior type 5/6 edges), c_b (weight on the domain
    boundary), lambda, q and p_sd, tied by c = e^{lambda/2} + e^{-lambda/2},
    sqrt(q) = e^lambda + e^-lambda and p_sd = sqrt(q)/(sqrt(q)+1).
    """
    _fields = ("c", "c_b", "lam", "q", "p_sd")

    def __init__(self, c, c_b, lam, q, p_sd):
        self.c = float(c)
        self.c_b = float(c_b)
        self.lam = float(lam)
        self.q = float(q)
        self.p_sd = float(p_sd)
        self._check()

    @classmethod
    def from_lambda(cls, lam, c_b=None):
        c = math.exp(lam / 2.) + math.exp(-lam / 2.)
        q = (math.exp(lam) + math.exp(-lam))**2
        return cls(c, c if c_b is None else c_b, lam, q, p_sd(q))

    @classmethod
    def from_q(cls, q, c_b=None):
        if q < 4.:
            raise ValueError("ATRC Error: Six-vertex constants need q >= 4, got {0}.".format(q))
        return cls.from_lambda(math.acosh(math.sqrt(q) / 2.), c_b)

    def _check(self):
        if self.c <= 0. or self.c_b <= 0.:
            raise ValueError("ATRC Error: c and c_b must be positive.")
        if self.lam < 0.:
            raise ValueError("ATRC Error: lambda must be nonnegative.")
        if not 0. < self.p_sd < 1.:
            raise ValueError("ATRC Error: p_sd must lie in (0,1).")
        res_c = abs(math.exp(self.lam / 2.) + math.exp(-self.lam / 2.) - self.c)
        res_q = abs(math.exp(self.lam) + math.exp(-self.lam) - math.sqrt(self.q))
        if res_c > 1e-12 * self.c or res_q > 1e-12 * math.sqrt(self.q):
            raise ValueError("ATRC Error: Inconsistent six-vertex constants (residuals {0:.3g}, {1:.3g}).".format(res_c, res_q))

    def bkw(self):
        """Same constants with boundary weight c_b = e^{lambda/2}."""
        return SixVParams(self.c, math.exp(self.lam / 2.), self.lam, self.q, self.p_sd)

    @property
    def params(self):
        return Params(self)

    def __repr__(self):
        return "<SixVParams c={0:.17g} c_b={1:.17g} q={2:.17g}>".format(self.c, self.c_b, self.q)


class SpinState(object):
    """
    Spin fields. AT states carry tau and tau_prime; six-vertex spin states carry sigma_bullet
    (on L) and sigma_circ (on L*). Every field maps vertices to +1 or -1.
    """
    def __init__(self, tau=None, tau_prime=None, sigma_bullet=None, sigma_circ=None):
        self.tau = self._clean(tau)
        self.tau_prime = self._clean(tau_prime)
        self.sigma_bullet = self._clean(sigma_bullet)
        self.sigma_circ = self._clean(sigma_circ)

    @staticmethod
    def _clean(field):
        if field is None:
            return None
        out = {}
        for v, s in field.items():
            if s not in (1, -1):
                raise ValueError("ATRC Error: Spin at {0} must be +1 or -1, got {1}.".format(tuple(v), s))
            out[point(v)] = int(s)
        return out

    def disagreements(self, d, field="sigma_bullet"):
        """Edge indices of d whose endpoints carry different values of field."""
        spins = getattr(self, field)
        out = set()
        for i, (u, w) in enumerate(d.edges):
            if spins[u] != spins[w]:
                out.add(i)
        return out

    def __eq__(self, other):
        return (isinstance(other, SpinState) and self.tau == other.tau and self.tau_prime == other.tau_prime
                and self.sigma_bullet == other.sigma_bullet and self.sigma_circ == other.sigma_circ)


class HeightFn(object):
    """Integer heights on the vertices of a Z^2-domain."""
    def __init__(self, h, z=None):
        self.h = {point(v): int(val) for v, val in h.items()}
        self.z = z

    def __getitem__(self, v):
        return self.h[point(v)]

    def validate(self, z=None):
        z = self.z if z is None else z
        for v in z.vertices:
            if v not in self.h:
                raise ValueError("ATRC Error: Height missing at {0}.".format(tuple(v)))
            if v.parity == PRIMAL and self.h[v] % 2 != 0:
                raise ValueError("ATRC Error: Height at {0} must be even on L, got {1}.".format(tuple(v), self.h[v]))
        for v, a in z.edges:
            if abs(self.h[v] - self.h[a]) != 1:
                raise ValueError("ATRC Error: Ice rule violated on edge {0}-{1}: heights {2}, {3}.".format(tuple(v), tuple(a), self.h[v], self.h[a]))
        return True

    def row(self, z=None):
        z = self.z if z is None else z
        return tuple(self.h[v] for v in z.vertices)

    def __eq__(self, other):
        return isinstance(other, HeightFn) and self.h == other.h


def _rescale(terms, log):
    total = math.fsum(terms)
    return total if log else math.exp(total)


def at_energy(s, p, d):
    J, U = p.J, p.U
    tau, taup = s.tau, s.tau_prime
    energy = []
    for u, w in d.edges:
        try:
            energy.append(J * tau[u] * tau[w] + J * taup[u] * taup[w] + U * tau[u] * taup[u] * tau[w] * taup[w])
        except (KeyError, TypeError):
            raise ValueError("ATRC Error: Spin state is missing a value on edge {0}-{1}.".format(tuple(u), tuple(w)))
    return math.fsum(energy)


def at_weight(s, p, d, log=False):
    """exp(beta * sum of edge energies)."""
    for v in d.vertices:
        if s.tau is None or s.tau_prime is None or v not in s.tau or v not in s.tau_prime:
            raise ValueError("ATRC Error: Spin state is missing a value at {0}.".format(tuple(v)))
    e = p.beta * at_energy(s, p, d)
    return e if log else math.exp(e)


def atrc_weights(J, U, beta=1.):
    """ATRCWeights for the isotropic point (J, U, beta), with its analytic beta-derivatives."""
    ATParams.isotropic(J, U, beta)
    x = math.exp(-2. * beta * (J + U))
    y = math.exp(-4. * beta * J)
    if J < U:
        a = (x, y - x, 0., 1. - y)
        da = {(0, 0): -2. * (J + U) * x,
              (0, 1): -4. * J * y + 2. * (J + U) * x,
              (1, 0): 0.,
              (1, 1): 4. * J * y}
        return ATRCWeights(*a, regime=J_LT_U, derivatives=da)
    a = (y, x - y, x - y, 1. - 2. * x + y)
    da = {(0, 0): -4. * J * y,
          (0, 1): -2. * (J + U) * x + 4. * J * y,
          (1, 0): -2. * (J + U) * x + 4. * J * y,
          (1, 1): 4. * (J + U) * x - 4. * J * y}
    return ATRCWeights(*a, regime=J_GE_U, derivatives=da)


def atrc_weight_derivatives(J, U, beta=1.):
    """d/dbeta log a(i,j) for the states in the support; None where a(i,j) = 0."""
    w = atrc_weights(J, U, beta)
    out = {}
    for s in STATES:
        a = w.a(s)
        out[s] = w.derivatives[s] / a if a > 0. else None
    return out


def atrc_weight(pair, w, bp_tau, bp_tt, d, log=False):
    """
    2^{k(first layer) + k(second layer)} times the product of a(omega_1(e), omega_2(e)),
    with per-edge w_tau overrides. Zero (or -inf with log=True) outside the support.
    """
    first, second = pair.omega_tau, pair.omega_second
    terms = [(d.count_clusters(first, bp_tau) + d.count_clusters(second, bp_tt)) * math.log(2.)]
    use_log = log or d.num_edges > constants.LOG_SPACE_EDGES
    if use_log:
        for e in range(d.num_edges):
            a = w.a(((first >> e) & 1, (second >> e) & 1), e)
            if a == 0.:
                return -math.inf if log else 0.
            terms.append(math.log(a))
        return _rescale(terms, log)
    weight = 2.**(d.count_clusters(first, bp_tau) + d.count_clusters(second, bp_tt))
    for e in range(d.num_edges):
        weight *= w.a(((first >> e) & 1, (second >> e) & 1), e)
    return weight


def atrc_repr_weight(pair, w, bp_tau, bp_tt, d):
    """
    J<U form: 1{omega_tau in omega_tautau'} w_tau^{|omega_tau|} w_tautau'^{|omega_tautau' minus omega_tau|}
    2^{k + k}. Equals atrc_weight / a00^{|E|}.
    """
    first, second = pair.omega_tau, pair.omega_second
    if first & ~second:
        return 0.
    weight = 2.**(d.count_clusters(first, bp_tau) + d.count_clusters(second, bp_tt))
    for e in bits(first):
        weight *= w.w_tau_at(e)
    weight *= w.w_tautau**popcount(second & ~first)
    return weight


def p_sd(q):
    return math.sqrt(q) / (math.sqrt(q) + 1.)


def fk_dual_p(p, q):
    """p* with p p* / ((1-p)(1-p*)) = q."""
    return q * (1. - p) / (q * (1. - p) + p)


def fk_weight(cfg, p, q, bp, d, log=False):
    """p^{|eta|} (1-p)^{|E|-|eta|} q^{k(eta)}."""
    n_open = popcount(cfg)
    n_closed = d.num_edges - n_open
    k = d.count_clusters(cfg, bp)
    if log or d.num_edges > constants.LOG_SPACE_EDGES:
        terms = [k * math.log(q)]
        for count, base in ((n_open, p), (n_closed, 1. - p)):
            if count:
                if base == 0.:
                    return -math.inf if log else 0.
                terms.append(count * math.log(base))
        return _rescale(terms, log)
    return p**n_open * (1. - p)**n_closed * q**k


def hf_counts(h, z):
    """(interior, boundary) numbers of type 5/6 edges: h constant along e and along e*."""
    n_i = 0
    n_b = 0
    on_cycle = z.primal_part.edge_boundary
    for i, (u, w, a, b) in enumerate(z.tiles):
        if h[u] == h[w] and h[a] == h[b]:
            if i in on_cycle:
                n_b += 1
            else:
                n_i += 1
    return n_i, n_b


def hf_weight(h, sv, z, log=False):
    h.validate(z)
    n_i, n_b = hf_counts(h, z)
    terms = [n_i * math.log(sv.c), n_b * math.log(sv.c_b)]
    return _rescale(terms, log)


def spin_of_height(value):
    return 1 if value % 4 in (0, 1) else -1


def spin_from_height(h):
    bullet = {}
    circ = {}
    for v, val in h.h.items():
        if v.parity == PRIMAL:
            bullet[v] = spin_of_height(val)
        else:
            circ[v] = spin_of_height(val)
    return SpinState(sigma_bullet=bullet, sigma_circ=circ)


def sd_residual(J, U, beta=1.):
    return math.sinh(2. * beta * J) * math.exp(2. * beta * U) - 1.


def sd_beta(J, U):
    """
    The beta with sinh(2 beta J) e^{2 beta U} = 1: bisection on the increasing function
    log sinh(2 beta J) + 2 beta U, then one Newton step on the residual.
    """
    if J <= 0. or U <= 0.:
        raise ValueError("ATRC Error: sd_beta needs J > 0 and U > 0, got J={0}, U={1}.".format(J, U))

    def f(b):
        return math.log(math.sinh(2. * b * J)) + 2. * b * U

    lo = hi = 1.
    while f(lo) > 0.:
        lo /= 2.
    while f(hi) < 0.:
        hi *= 2.
    beta = optimize.bisect(f, lo, hi, xtol=1e-15, rtol=4. * np.finfo(float).eps, maxiter=constants.ROOT_MAXITER)
    g = sd_residual(J, U, beta)
    gp = math.exp(2. * beta * U) * (2. * J * math.cosh(2. * beta * J) + 2. * U * math.sinh(2. * beta * J))
    polished = beta - g / gp
    if abs(sd_residual(J, U, polished)) <= abs(g):
        beta = polished
    if abs(sd_residual(J, U, beta)) > constants.SD_TOL:
        raise RuntimeError("ATRC Error: Self-dual root did not converge (residual {0:.3g}).".format(sd_residual(J, U, beta)))
    return beta


def u_sd(J):
    """The U with sinh(2J) = e^{-2U}."""
    s = math.sinh(2. * J)
    if J <= 0. or s >= 1.:
        raise ValueError("ATRC Error: No positive self-dual U for J={0}.".format(J))
    return -0.5 * math.log(s)


def dual_params(J, U):
    """
    (J*, U*) solving e^{2U} sinh(2J) = 1/(e^{2U*} sinh(2J*)) together with
    e^{2U-2J} - 1 = e^{2U} sinh(2J) (e^{2U*-2J*} - 1).
    """
    if J <= 0. or U <= 0.:
        raise ValueError("ATRC Error: dual_params needs J > 0 and U > 0, got J={0}, U={1}.".format(J, U))
    k = math.exp(2. * U) * math.sinh(2. * J)
    A = 1. / k
    B = 1. + math.expm1(2. * U - 2. * J) / k
    if B <= 0.:
        raise ValueError("ATRC Error: (J, U) = ({0}, {1}) has no ferromagnetic dual.".format(J, U))
    Js = 0.25 * math.log1p(2. * A / B)
    Us = 0.5 * (math.log(B) + 2. * Js)
    r1 = k * math.exp(2. * Us) * math.sinh(2. * Js) - 1.
    r2 = math.expm1(2. * U - 2. * J) - k * math.expm1(2. * Us - 2. * Js)
    if abs(r1) > constants.RESIDUAL_TOL or abs(r2) > constants.RESIDUAL_TOL * max(1., abs(math.expm1(2. * U - 2. * J))):
        raise RuntimeError("ATRC Error: Dual parameters failed back-substitution ({0:.3g}, {1:.3g}).".format(r1, r2))
    return Js, Us


def sixv_params_from_at(J, U):
    """Six-vertex constants for a self-dual point with J < U: c = coth(2J), lambda = 2 arccosh(c/2)."""
    if abs(sd_residual(J, U)) > 1e-9:
        raise ValueError("ATRC Error: ({0}, {1}) is not on the self-dual line.".format(J, U))
    c = 1. / math.tanh(2. * J)
    if c < 2. - 1e-12:
        raise ValueError("ATRC Error: c = coth(2J) = {0:.17g} < 2; J >= U on the self-dual line.".format(c))
    if abs(c - 2.) < 1e-12:
        return SixVParams.from_lambda(0.)
    lam = 2. * math.acosh(c / 2.)
    sv = SixVParams.from_lambda(lam)
    if abs(sv.c - c) > 1e-12 * c:
        raise RuntimeError("ATRC Error: lambda does not reproduce c = {0:.17g}.".format(c))
    return sv


def nu_weights(J, U, d):
    """
    ATRC weights at beta=1 for a self-dual point with J<U, with w_tau = 2(c-1)/(e^{lambda/2}-1)
    on the domain-boundary edges of d.
    """
    sv = sixv_params_from_at(J, U)
    if sv.lam <= 0.:
        raise ValueError("ATRC Error: The modified marginal needs lambda > 0.")
    w_b = 2. * (sv.c - 1.) / math.expm1(sv.lam / 2.)
    return atrc_weights(J, U, 1.).with_overrides({e: w_b for e in d.edge_boundary})


def edge_conditional(w, e, dk_first, dk_second):
    """
    Conditional law of the state of edge e given every other edge, over STATES. dk_* is
    k(e closed) - k(e open) in each layer.
    """
    raw = [w.a(s, e) * 2.**((1 - s[0]) * dk_first + (1 - s[1]) * dk_second) for s in STATES]
    total = math.fsum(raw)
    return tuple(r / total for r in raw)


def holley_conditionals(w, e, dk_first, dk_second):
    """(f_e, g_e): conditional probabilities that the first and the second layer are open at e."""
    p00, p01, p10, p11 = edge_conditional(w, e, dk_first, dk_second)
    return p10 + p11, p01 + p11
