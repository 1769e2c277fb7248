import atrclab
from atrclab import data
from atrclab.couplings import (EVEN_00_11, ODD_11, TAU_TAUPRIME, TAU_TAUTAU, EdgePair, assign_spins_to_dual_clusters, bkw_heights,
                               bkw_table, dual_atrc_config, dual_spin_table, edge_law_from_spins, edge_open_probabilities,
                               euler_constant, joint_density, joint_table, sample_edges_from_spins, sigma_from_atrc_pair,
                               trace_loops)
from atrclab.lattice import BoundaryPartition, Z2Domain
from atrclab.measures import SixVParams, SpinState, atrc_weights, nu_weights, sixv_params_from_at
from atrclab.oracle import DistTable, MeasureSpec, marginal, tv_distance
from atrclab.oracle import enumerate as enumerate_measure
from atrclab.simulate import substream
import unittest
import math
import numpy as np


def spin_table(d, sv):
    return enumerate_measure(MeasureSpec("SPIN", sv, Z2Domain(d)))


def omega_tau_marginal(d, w):
    bps = (BoundaryPartition.free(d.domain_boundary), BoundaryPartition.wired(d.domain_boundary))
    return marginal(enumerate_measure(MeasureSpec("ATRC", w, d, bps)), "omega_tau")


class TestEdgePair(unittest.TestCase):
    def test_containment(self):
        with self.assertRaises(ValueError):
            EdgePair(0b011, 0b001)
        EdgePair(0b011, 0b001, TAU_TAUPRIME)
        with self.assertRaises(ValueError):
            EdgePair(0, 0, "other")

    def test_for_regime(self):
        self.assertEqual(EdgePair.for_regime(1, 1, atrc_weights(0.3, 0.2).regime).layer_kind, TAU_TAUPRIME)
        self.assertEqual(EdgePair.for_regime(1, 1, atrc_weights(0.2, 0.5).regime).layer_kind, TAU_TAUTAU)
        self.assertEqual(EdgePair(1, 3), EdgePair(1, 3))
        self.assertEqual(len(set([EdgePair(1, 3), EdgePair(1, 3)])), 1)


class TestSpinsToEdges(unittest.TestCase):
    def setUp(self):
        self.J, self.U = data.sd_point(0.2)
        self.sv = sixv_params_from_at(self.J, self.U)

    def test_marginal_matches_atrc(self):
        for d in (data.diamond(), data.double_diamond()):
            law = edge_law_from_spins(spin_table(d, self.sv), d, self.sv.c)
            target = omega_tau_marginal(d, atrc_weights(self.J, self.U, 1.))
            self.assertLess(tv_distance(law, target, strict=False), 1.e-10)

    def test_modified_boundary(self):
        for d in (data.diamond(), data.double_diamond()):
            law = edge_law_from_spins(spin_table(d, self.sv.bkw()), d, self.sv.c, math.exp(self.sv.lam / 2.))
            target = omega_tau_marginal(d, nu_weights(self.J, self.U, d))
            self.assertLess(tv_distance(law, target, strict=False), 1.e-10)

    def test_open_probabilities(self):
        d = data.diamond()
        dual = d.dual()
        plus = SpinState(sigma_bullet={v: 1 for v in d.vertices}, sigma_circ={a: 1 for a in dual.vertices})
        self.assertEqual(edge_open_probabilities(plus, 3., None, d), [1. / 3.] * 4)
        self.assertEqual(edge_open_probabilities(plus, 3., 2., d), [0.5] * 4)
        circ = dict(plus.sigma_circ)
        circ[(1, 0)] = -1
        flipped = SpinState(sigma_bullet=plus.sigma_bullet, sigma_circ=circ)
        self.assertEqual(edge_open_probabilities(flipped, 3., None, d), [1.] * 4)
        rng = substream(1, "edges")
        self.assertEqual(sample_edges_from_spins(flipped, 3., None, d, rng), d.full_mask)

    def test_incompatible(self):
        d = data.diamond()
        dual = d.dual()
        bullet = {v: 1 for v in d.vertices}
        bullet[(0, 0)] = -1
        circ = {a: 1 for a in dual.vertices}
        circ[(1, 0)] = -1
        with self.assertRaises(ValueError):
            edge_open_probabilities(SpinState(sigma_bullet=bullet, sigma_circ=circ), 3., None, d)

    def test_sampler_frequencies(self):
        d = data.diamond()
        dual = d.dual()
        plus = SpinState(sigma_bullet={v: 1 for v in d.vertices}, sigma_circ={a: 1 for a in dual.vertices})
        rng = substream(7, "edges")
        n = 20000
        counts = np.zeros(d.num_edges)
        for _ in range(n):
            omega = sample_edges_from_spins(plus, 4., None, d, rng)
            counts += [(omega >> i) & 1 for i in range(d.num_edges)]
        for f in counts / n:
            self.assertAlmostEqual(f, 0.25, delta=4. * math.sqrt(0.25 * 0.75 / n) + 0.01)


class TestJointLaw(unittest.TestCase):
    def test_joint_table(self):
        d = data.diamond()
        c = 3.
        t = joint_table(d, c)
        self.assertTrue(t.check())
        self.assertEqual(t.columns, ("sigma_bullet", "sigma_circ", "omega_tau"))
        dual = d.dual()
        for row, p in t.as_dict().items():
            sb, sc, omega = row
            sigma = SpinState(sigma_bullet={v: 1 - 2 * ((sb >> i) & 1) for i, v in enumerate(d.vertices)},
                              sigma_circ={a: 1 - 2 * ((sc >> i) & 1) for i, a in enumerate(dual.vertices)})
            self.assertGreater(joint_density(sigma, omega, c, EVEN_00_11, d), 0.)

    def test_joint_density_zero(self):
        d = data.diamond()
        dual = d.dual()
        bullet = {v: 1 for v in d.vertices}
        circ = {a: 1 for a in dual.vertices}
        bullet[(0, 0)] = -1
        self.assertEqual(joint_density(SpinState(sigma_bullet=bullet, sigma_circ=circ), 0, 3., EVEN_00_11, d), 0.)
        self.assertEqual(joint_density(SpinState(sigma_bullet=bullet, sigma_circ=circ), 0, 3., ODD_11, d), 0.)
        with self.assertRaises(ValueError):
            joint_density(SpinState(sigma_bullet=bullet, sigma_circ=circ), 0, 3., "mixed", d)

    def test_dual_spins(self):
        d = data.diamond()
        closed = dual_spin_table(d.full_mask, d)
        self.assertEqual(len(closed), 2)
        self.assertEqual(len(dual_spin_table(0, d)), 1)
        rng = substream(3, "dual")
        sigma = assign_spins_to_dual_clusters(d.full_mask, d, rng)
        for a in d.dual().boundary:
            self.assertEqual(sigma.sigma_circ[a], 1)

    def test_joint_omega_marginal(self):
        J, U = data.sd_point(0.2)
        sv = sixv_params_from_at(J, U)
        d = data.diamond()
        law = marginal(joint_table(d, sv.c), "omega_tau")
        target = omega_tau_marginal(d, atrc_weights(J, U, 1.))
        self.assertLess(tv_distance(law, target, strict=False), 1.e-10)

    def test_joint_dual_spin_conditional(self):
        d = data.diamond()
        dual = d.dual()
        fibers = {}
        for (sb, sc, omega), p in joint_table(d, 3.).as_dict().items():
            fiber = fibers.setdefault(omega, {})
            fiber[sc] = fiber.get(sc, 0.) + p
        self.assertEqual(len(fibers), 1 << d.num_edges)
        for omega, fiber in fibers.items():
            total = math.fsum(fiber.values())
            rows = sorted(fiber)
            conditional = DistTable(rows, [fiber[r] / total for r in rows], 0., ("sigma_circ",), (dual.num_vertices,))
            self.assertLess(tv_distance(conditional, dual_spin_table(omega, d)), 1.e-10)

    def test_dual_spin_frequencies(self):
        d = data.diamond()
        dual = d.dual()
        rng = substream(9, "dual")
        for omega in (d.full_mask, 0b0101, 0):
            exact = dual_spin_table(omega, d)
            n = 4000
            counts = {}
            for _ in range(n):
                circ = assign_spins_to_dual_clusters(omega, d, rng).sigma_circ
                mask = sum(1 << i for i, a in enumerate(dual.vertices) if circ[a] == -1)
                counts[mask] = counts.get(mask, 0) + 1
            rows = sorted(counts)
            empirical = DistTable(rows, [counts[r] / n for r in rows], 0., ("sigma_circ",), (dual.num_vertices,))
            self.assertLess(tv_distance(empirical, exact, strict=False), 0.03)

    def test_sigma_from_pair(self):
        d = data.double_diamond()
        rng = substream(5, "pair")
        sigma = sigma_from_atrc_pair(EdgePair(0, 0, domain=d), d, rng)
        for v in d.domain_boundary:
            self.assertEqual(sigma.sigma_bullet[v], 1)


class TestLoops(unittest.TestCase):
    def test_diamond(self):
        d = data.diamond()
        for eta in range(1 << d.num_edges):
            ls = trace_loops(eta, d)
            self.assertEqual(len(ls), 1)
            self.assertTrue(ls.euler_consistent)
            self.assertEqual(ls.depth, [1])
            self.assertEqual(len(ls.loops[0]), 4)
        self.assertEqual(ls.parity((1, 0), 0), 1)
        self.assertEqual(ls.nesting, {0: None})
        self.assertIn("loops 1", ls.dump())

    def test_double_diamond(self):
        d = data.double_diamond()
        inner = d.edge_index[atrclab.lattice.edge_key((1, 1), (2, 0))]
        self.assertEqual(len(trace_loops(0, d)), 1)
        ls = trace_loops(1 << inner, d)
        self.assertEqual(len(ls), 2)
        self.assertEqual(ls.depth, [1, 1])
        self.assertTrue(ls.euler_consistent)

    def test_lambda2(self):
        d = atrclab.build_lambda(2)
        rng = substream(11, "loops")
        for _ in range(20):
            eta = int(rng.integers(0, 1 << d.num_edges))
            ls = trace_loops(eta, d)
            self.assertTrue(ls.euler_consistent)
            for l, p in ls.nesting.items():
                if p is not None:
                    self.assertEqual(ls.depth[l], ls.depth[p] + 1)

    def test_needs_cycle(self):
        with self.assertRaises(ValueError):
            trace_loops(0, data.path3())


class TestBKW(unittest.TestCase):
    def test_diamond_center(self):
        sv = SixVParams.from_q(9.).bkw()
        t = bkw_table(data.diamond(), sv)
        up = math.exp(sv.lam) / math.sqrt(sv.q)
        z = Z2Domain(data.diamond())
        j = z.index[atrclab.lattice.point((1, 0))]
        p_up = math.fsum(p for row, p in t.as_dict().items() if row[j] == 1)
        self.assertAlmostEqual(p_up, up, delta=1.e-12)

    def test_matches_heights(self):
        for q in (5., 9.):
            sv = SixVParams.from_q(q).bkw()
            for d in (data.diamond(), data.double_diamond()):
                hf = enumerate_measure(MeasureSpec("HF", sv, Z2Domain(d)))
                self.assertLess(tv_distance(bkw_table(d, sv), hf, strict=False), 1.e-10)

    def test_odd(self):
        sv = SixVParams.from_q(9.).bkw()
        d = data.odd_diamond()
        hf = enumerate_measure(MeasureSpec("HF", sv, Z2Domain(d)))
        self.assertLess(tv_distance(bkw_table(d, sv), hf, strict=False), 1.e-10)

    def test_sampled_heights(self):
        sv = SixVParams.from_q(9.).bkw()
        d = data.double_diamond()
        rng = substream(2, "bkw")
        for eta in range(1 << d.num_edges):
            h = bkw_heights(eta, sv, "even", d, rng)
            self.assertTrue(h.validate())
        with self.assertRaises(ValueError):
            bkw_heights(0, sv, "odd", d, rng)


class TestDuality(unittest.TestCase):
    def test_twice(self):
        d = data.double_diamond()
        for first, second, kind in ((0b0000101, 0b0100111, TAU_TAUTAU), (0b1010101, 0b0110011, TAU_TAUPRIME)):
            pair = EdgePair(first, second, kind, d)
            dual = dual_atrc_config(pair)
            self.assertEqual(dual.domain.num_edges, d.num_edges)
            back = dual_atrc_config(dual)
            self.assertEqual((back.omega_tau, back.omega_second, back.layer_kind), (first, second, kind))

    def test_needs_domain(self):
        with self.assertRaises(ValueError):
            dual_atrc_config(EdgePair(0, 0))

    def test_euler(self):
        self.assertEqual(euler_constant(data.diamond()), -3)
        euler_constant(data.double_diamond())


if __name__ == "__main__":
    unittest.main()
