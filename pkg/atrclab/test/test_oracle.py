import atrclab
from atrclab import data
from atrclab.lattice import BoundaryPartition, build_lambda
from atrclab.measures import ATParams, FKParams, atrc_weights, fk_weight, p_sd, u_sd
from atrclab.oracle import (DistTable, EnumerationCapError, MeasureSpec, check_domination, check_gks, check_holley,
                            connection_probability, coordinatewise, coupling_identity_residual, dual_mask, enumerate,
                            expectation, fk_self_duality_tv, gks_scan, marginal, pushforward, tv_distance, upset_probs)
from atrclab.testing import slow_domination_margin
import unittest
import math
import numpy as np


def atrc_table(J, U, beta, d, wired=True):
    bp = BoundaryPartition.wired(d.boundary) if wired else BoundaryPartition.free(d.boundary)
    return enumerate(MeasureSpec("ATRC", atrc_weights(J, U, beta), d, (bp, bp)))


class TestDistTable(unittest.TestCase):
    def test_normalized(self):
        t = DistTable([0, 1, 2], [0.25, 0.25, 0.5])
        self.assertTrue(t.check())
        self.assertEqual(len(t), 3)
        self.assertEqual(t.columns, ("c0",))

    def test_invalid(self):
        with self.assertRaises(ValueError):
            DistTable([0, 1], [0.5])
        with self.assertRaises(ValueError):
            DistTable([0, 1], [1.5, -0.5])
        with self.assertRaises(ValueError):
            DistTable([0, 1], [0.2, 0.2])

    def test_repeated_states(self):
        t = DistTable([1, 1], [0.5, 0.5])
        with self.assertRaises(ValueError):
            t.check()

    def test_keys(self):
        t = DistTable([[1, 6]], [1.], columns=("a", "b"), widths=(3, None))
        self.assertEqual(t.key(0), "100|6")

    def test_from_items(self):
        t = DistTable.from_items([((1,), 0.25), ((0,), 0.5), ((1,), 0.25)])
        self.assertEqual(t.as_dict(), {(0,): 0.5, (1,): 0.5})

    def test_tv(self):
        a = DistTable([0, 1], [0.5, 0.5])
        b = DistTable([0, 1], [0.25, 0.75])
        c = DistTable([0, 2], [0.5, 0.5])
        self.assertAlmostEqual(tv_distance(a, b), 0.25, delta=1.e-15)
        self.assertEqual(tv_distance(a, a), 0.)
        with self.assertRaises(ValueError):
            tv_distance(a, c)
        self.assertAlmostEqual(tv_distance(a, c, strict=False), 0.5, delta=1.e-15)

    def test_pushforward(self):
        t = DistTable([0, 1, 2, 3], [0.1, 0.2, 0.3, 0.4])
        parity = pushforward(t, lambda S: S[:, 0] & 1, vectorized=True)
        self.assertAlmostEqual(parity.as_dict()[(1,)], 0.6, delta=1.e-15)
        self.assertAlmostEqual(expectation(t, lambda row: row[0]), 2., delta=1.e-15)


class TestEnumerate(unittest.TestCase):
    def test_fk_partition_function(self):
        d = data.diamond()
        p, q = 0.4, 2.
        t = enumerate(MeasureSpec("FK", FKParams(p, q), d))
        Z = math.fsum(fk_weight(mask, p, q, None, d) for mask in range(1 << d.num_edges))
        self.assertAlmostEqual(t.log_Z, math.log(Z), delta=1.e-12)
        self.assertEqual(len(t), 16)
        self.assertTrue(t.check())

    def test_atrc_support(self):
        d = data.path3()
        t = atrc_table(0.2, 0.5, 1., d)
        self.assertEqual(len(t), 27)
        self.assertFalse(np.any(t.states[:, 0] & ~t.states[:, 1]))
        self.assertEqual(len(atrc_table(0.3, 0.2, 1., d)), 64)

    def test_at_plus(self):
        d = data.star()
        t = enumerate(MeasureSpec("AT", ATParams.isotropic(0.2, 0.5), d, "plus"))
        self.assertEqual(len(t), 4)
        free = enumerate(MeasureSpec("AT", ATParams.isotropic(0.2, 0.5), d, "free"))
        self.assertEqual(len(free), 4**5)

    def test_cap(self):
        d = build_lambda(1)
        with self.assertRaises(EnumerationCapError):
            enumerate(MeasureSpec("ATRC", atrc_weights(0.3, 0.2), d, (BoundaryPartition.wired(d.boundary),) * 2, cap=1000))
        with self.assertRaises(EnumerationCapError):
            enumerate(MeasureSpec("FK", FKParams(0.5, 2.), d, None, cap=10))

    def test_spec_validation(self):
        d = data.diamond()
        with self.assertRaises(ValueError):
            MeasureSpec("XY", None, d)
        with self.assertRaises(ValueError):
            MeasureSpec("AT", ATParams.isotropic(0.2, 0.5), d, "minus")
        with self.assertRaises(ValueError):
            MeasureSpec("ATRC", atrc_weights(0.2, 0.5), d, None)
        with self.assertRaises(ValueError):
            MeasureSpec("HF", atrclab.SixVParams.from_q(9.), d)

    def test_heights(self):
        z = atrclab.Z2Domain(data.double_diamond())
        sv = atrclab.SixVParams.from_q(9.)
        t = enumerate(MeasureSpec("HF", sv, z))
        self.assertTrue(t.check())
        spins = enumerate(MeasureSpec("SPIN", sv, z))
        self.assertEqual(spins.columns, ("sigma_bullet", "sigma_circ"))
        self.assertLessEqual(len(spins), len(t))
        self.assertAlmostEqual(spins.log_Z, t.log_Z, delta=1.e-15)

    def test_marginal(self):
        t = atrc_table(0.2, 0.5, 1., data.path3())
        m = marginal(t, "omega_tau")
        self.assertEqual(len(m), 8)
        self.assertEqual(m.widths, (3,))
        self.assertAlmostEqual(math.fsum(m.probs), 1., delta=1.e-14)


class TestCoupling(unittest.TestCase):
    def test_star(self):
        for J, U in ((0.2, 0.5), (0.3, 0.2), (0.25, 0.25)):
            for beta in (0.5, 1., 2.):
                r1, r2 = coupling_identity_residual(J, U, beta, data.star())
                self.assertLess(r1, 1.e-10)
                self.assertLess(r2, 1.e-10)

    def test_lambda1(self):
        J = 0.2
        r1, r2 = coupling_identity_residual(J, u_sd(J), 1., build_lambda(1))
        self.assertLess(max(r1, r2), 1.e-10)

    def test_lambda1_j_ge_u(self):
        J = 0.3
        U = u_sd(J)
        self.assertLess(U, J)
        r1, r2 = coupling_identity_residual(J, U, 1., build_lambda(1))
        self.assertLess(max(r1, r2), 1.e-10)

    def test_two_site(self):
        r1, r2 = coupling_identity_residual(0.3, 0.2, 0.8, data.two_site(), (2, 0))
        self.assertLess(max(r1, r2), 1.e-10)

    def test_connection_probability(self):
        d = data.star()
        t = atrc_table(0.2, 0.5, 1., d)
        p = connection_probability(t, d, (0, 0))
        self.assertGreater(p, 0.)
        self.assertLess(p, 1.)


class TestDomination(unittest.TestCase):
    def test_point_masses(self):
        low = DistTable([0], [1.], widths=(2,))
        high = DistTable([3], [1.], widths=(2,))
        self.assertTrue(check_domination(low, high).dominated)
        result = check_domination(high, low)
        self.assertFalse(result.dominated)
        self.assertAlmostEqual(result.margin, 1., delta=1.e-12)
        self.assertIn((3,), result.witness)

    def test_coupling_marginals(self):
        d = data.path3()
        mu = atrc_table(0.2, 0.5, 1., d, wired=False)
        nu = atrc_table(0.2, 0.5, 1., d, wired=True)
        result = check_domination(mu, nu)
        self.assertTrue(result.dominated)
        leq = coordinatewise(mu.widths)
        pm = mu.as_dict()
        for (x, y), f in result.coupling.items():
            self.assertTrue(leq(x, y))
        first = {}
        for (x, _), f in result.coupling.items():
            first[x] = first.get(x, 0.) + f
        for x, p in pm.items():
            self.assertAlmostEqual(first.get(x, 0.), p, delta=1.e-8)
        self.assertGreaterEqual(slow_domination_margin(mu, nu), -1.e-12)

    def test_monotone_in_beta(self):
        d = data.path3()
        for J, U in ((0.2, 0.5), (0.15, 0.6)):
            self.assertTrue(check_domination(atrc_table(J, U, 1., d), atrc_table(J, U, 1.5, d)).dominated)

    def test_not_dominated(self):
        d = data.path3()
        result = check_domination(atrc_table(0.2, 0.5, 1.5, d), atrc_table(0.2, 0.5, 1., d))
        self.assertFalse(result.dominated)
        self.assertGreater(result.margin, 0.)

    def test_holley(self):
        for d in (data.path3(), data.diamond()):
            for J, U in ((0.2, 0.5), (0.15, 0.6)):
                w = atrc_weights(J, U, 1.)
                for bp in (BoundaryPartition.free(d.boundary), BoundaryPartition.wired(d.boundary)):
                    self.assertEqual(check_holley(d, w, bp, bp), [])

    def test_upsets(self):
        self.assertEqual(upset_probs((0.1, 0.2, 0., 0.7), atrclab.measures.J_LT_U), (0.7, 0.9))


class TestGKS(unittest.TestCase):
    def test_scan(self):
        d = data.path3()
        for J, U in ((0.2, 0.5), (0.3, 0.2)):
            spec = MeasureSpec("AT", ATParams.isotropic(J, U, 1.), d, "free")
            self.assertGreaterEqual(gks_scan(spec), -1.e-12)

    def test_single(self):
        d = data.path3()
        spec = MeasureSpec("AT", ATParams.isotropic(0.2, 0.5, 1.), d, "free")
        margin = check_gks(spec, [(0, 0)], [], [(3, 3)], [])
        self.assertGreaterEqual(margin, -1.e-12)
        with self.assertRaises(ValueError):
            check_gks(MeasureSpec("FK", FKParams(0.5, 2.), d), [], [], [], [])


class TestDuality(unittest.TestCase):
    def test_dual_mask(self):
        d = data.diamond()
        self.assertEqual(dual_mask(0, d), d.dual().full_mask)
        self.assertEqual(dual_mask(d.full_mask, d), 0)

    def test_fk_self_dual(self):
        for d in (data.diamond(), data.double_diamond()):
            for q in (2., 4., 9.):
                self.assertLess(fk_self_duality_tv(d, q), 1.e-10)
            self.assertLess(fk_self_duality_tv(d, 2., 0.3), 1.e-10)


if __name__ == "__main__":
    unittest.main()
