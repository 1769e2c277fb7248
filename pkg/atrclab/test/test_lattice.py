import atrclab
from atrclab import data
from atrclab.lattice import (BoundaryPartition, Domain, UnionFind, Z2Domain, build_lambda, box_domain, cycle_domain,
                             dual_edge, edge_key, even_domain, odd_domain, point, strictly_inside, DUAL, PRIMAL)
from atrclab.testing import slow_cluster_count
import unittest


class TestLattice(unittest.TestCase):
    def setUp(self):
        self.diamond = data.diamond()
        self.lam1 = build_lambda(1)

    def test_parity(self):
        self.assertEqual(point((0, 0)).parity, PRIMAL)
        self.assertEqual(point((1, 0)).parity, DUAL)
        self.assertEqual(point((3, -1)).parity, PRIMAL)

    def test_lambda0(self):
        d = build_lambda(0)
        self.assertEqual(d.num_vertices, 1)
        self.assertEqual(d.num_edges, 0)
        self.assertEqual(d.boundary, frozenset([point((0, 0))]))
        self.assertFalse(d.is_cycle_domain)

    def test_lambda1(self):
        self.assertEqual(self.lam1.num_vertices, 9)
        self.assertEqual(self.lam1.num_edges, 12)
        self.assertEqual(len(self.lam1.boundary), 8)
        self.assertNotIn(point((0, 0)), self.lam1.boundary)
        self.assertEqual(len(self.lam1.domain_boundary), 8)
        self.assertEqual(len(self.lam1.edge_boundary), 8)

    def test_negative_lambda(self):
        with self.assertRaises(ValueError):
            build_lambda(-1)

    def test_diamond(self):
        d = self.diamond
        self.assertEqual(d.num_vertices, 4)
        self.assertEqual(d.num_edges, 4)
        self.assertEqual(d.edge_boundary_mask, d.full_mask)
        self.assertTrue(strictly_inside(d.cycle, (1, 0)))
        self.assertFalse(strictly_inside(d.cycle, (3, 0)))

    def test_double_diamond(self):
        d = data.double_diamond()
        self.assertEqual(d.num_vertices, 6)
        self.assertEqual(d.num_edges, 7)
        self.assertEqual(len(d.edge_boundary), 6)
        self.assertIn(edge_key((1, 1), (2, 0)), d.edge_index)

    def test_dual_of_diamond(self):
        dual = self.diamond.dual()
        self.assertEqual(dual.num_vertices, 5)
        self.assertEqual(dual.num_edges, 4)
        self.assertNotIn(point((1, 0)), dual.boundary)
        self.assertEqual(len(dual.boundary), 4)
        self.assertEqual(sorted(dual.dual_map), [0, 1, 2, 3])

    def test_dual_edge_twice(self):
        for u, w in self.lam1.edges:
            a, b = dual_edge(u, w)
            self.assertEqual(dual_edge(a, b), edge_key(u, w))
            self.assertNotEqual(a.parity, u.parity)

    def test_mixed_parity(self):
        with self.assertRaises(ValueError):
            Domain([(0, 0), (1, 0)])

    def test_not_a_diagonal_edge(self):
        with self.assertRaises(ValueError):
            Domain([(0, 0), (2, 0)], edges=[((0, 0), (2, 0))])

    def test_cycle_not_adjacent(self):
        with self.assertRaises(ValueError):
            cycle_domain([(0, 0), (2, 0), (2, 2), (0, 2)])

    def test_cycle_too_short(self):
        with self.assertRaises(ValueError):
            cycle_domain([(0, 0), (1, 1), (2, 0)])

    def test_text_roundtrip(self):
        d = Domain.from_text(data.double_diamond().to_text())
        self.assertEqual(d, data.double_diamond())
        self.assertEqual(d.edge_boundary, data.double_diamond().edge_boundary)

    def test_box_domain(self):
        d = box_domain(2)
        self.assertEqual(d.num_vertices, 8)
        self.assertEqual(d.n, 2)
        with self.assertRaises(ValueError):
            box_domain(0)


class TestClusters(unittest.TestCase):
    def setUp(self):
        self.d = build_lambda(1)

    def test_union_find(self):
        uf = UnionFind(5)
        self.assertTrue(uf.union(0, 1))
        self.assertFalse(uf.union(1, 0))
        uf.union(3, 4)
        self.assertEqual(uf.num_components, 3)
        self.assertEqual(uf.find(4), uf.find(3))

    def test_counts(self):
        self.assertEqual(self.d.count_clusters(0), 9)
        self.assertEqual(self.d.count_clusters(self.d.full_mask), 1)
        wired = BoundaryPartition.wired(self.d.boundary)
        self.assertEqual(self.d.count_clusters(0, wired), 2)

    def test_counts_match_networkx(self):
        free = BoundaryPartition.free(self.d.boundary)
        wired = BoundaryPartition.wired(self.d.domain_boundary)
        for mask in range(0, 1 << self.d.num_edges, 37):
            for bp in (None, free, wired):
                self.assertEqual(self.d.count_clusters(mask, bp), slow_cluster_count(mask, bp, self.d))

    def test_connected(self):
        d = data.path3()
        self.assertTrue(d.connected(0b011, (0, 0), [(2, 2)]))
        self.assertFalse(d.connected(0b101, (0, 0), [(2, 2)]))
        with self.assertRaises(ValueError):
            d.connected(0, (5, 5), [(0, 0)])

    def test_partition_disjoint(self):
        with self.assertRaises(ValueError):
            BoundaryPartition([[(0, 0), (1, 1)], [(1, 1)]])

    def test_partition_outside(self):
        bp = BoundaryPartition.wired([(10, 10), (0, 0)])
        with self.assertRaises(ValueError):
            self.d.count_clusters(0, bp)

    def test_undefined_boundary(self):
        with self.assertRaises(ValueError):
            BoundaryPartition.wired(data.path3().domain_boundary)


class TestZ2Domain(unittest.TestCase):
    def test_even(self):
        z = Z2Domain(data.diamond())
        self.assertEqual(z.parity, "even")
        self.assertEqual(len(z.vertices), 9)
        self.assertEqual(len(z.boundary), 8)
        self.assertEqual(z.free_vertices, (point((1, 0)),))
        self.assertEqual(len(z.tiles), 4)

    def test_odd(self):
        z = odd_domain(data.odd_diamond())
        self.assertEqual(z.parity, "odd")
        self.assertEqual(z.free_vertices, (point((2, 0)),))
        heights = z.boundary_heights()
        self.assertEqual(heights[point((1, 0))], 1)

    def test_odd_needs_dual_lattice(self):
        with self.assertRaises(ValueError):
            odd_domain(data.diamond())

    def test_needs_cycle_domain(self):
        with self.assertRaises(ValueError):
            Z2Domain(data.path3())

    def test_double_diamond(self):
        z = even_domain(data.double_diamond())
        self.assertEqual(z.inside_dual, frozenset([point((1, 0)), point((2, 1))]))


if __name__ == "__main__":
    unittest.main()
