# -*- coding: utf-8 -*-

"""
The rotated lattice L = {(x,y): x+y even} with diagonal edges, its dual L* = L+(1,0),
boxes, cycle-domains, dual domains, even/odd Z^2-domains and boundary partitions.

Edge configurations are plain Python ints used as bit-vectors: bit i is edge i of the
domain, in the domain's lexicographic edge order.
"""

import math
from collections import namedtuple

import numpy as np

PRIMAL = "primal"
DUAL = "dual"

DIAGONALS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
AXES = ((1, 0), (-1, 0), (0, 1), (0, -1))

kinds = {"box": 0, "cycle": 1, "subgraph": 2}


class LatticePoint(namedtuple("LatticePoint", ["x", "y"])):
    """
    A vertex of L (x+y even, parity "primal") or of L* (x+y odd, parity "dual").
    Compares and hashes like the plain tuple (x, y).
    """
    __slots__ = ()

    @property
    def parity(self):
        return PRIMAL if (self.x + self.y) % 2 == 0 else DUAL

    def shift(self, dx, dy):
        return LatticePoint(self.x + dx, self.y + dy)

    def norm1(self):
        return abs(self.x) + abs(self.y)


def point(p):
    if isinstance(p, LatticePoint):
        return p
    return LatticePoint(int(p[0]), int(p[1]))


def edge_key(u, w):
    u, w = point(u), point(w)
    return (u, w) if u <= w else (w, u)


def popcount(mask):
    return bin(mask).count("1")


def edge_bitmask(indices):
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask):
    """Indices of the set bits of mask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class UnionFind(object):
    """
    Union-find over 0..size-1 with path compression; tracks the number of components.
    """
    def __init__(self, size):
        self.parents = list(range(size))
        self.num_components = size

    def find(self, a):
        p = a
        while p != self.parents[p]:
            p = self.parents[p]
        while a != p:
            nxt = self.parents[a]
            self.parents[a] = p
            a = nxt
        return p

    def union(self, a, b):
        ra = self.find(a)
        rb = self.find(b)
        if ra == rb:
            return False
        self.parents[rb] = ra
        self.num_components -= 1
        return True

    def labels(self):
        return [self.find(i) for i in range(len(self.parents))]


class BoundaryPartition(object):
    """
    A partition of a boundary vertex set into blocks. Vertices in a common block are
    identified when clusters are counted.

    Arguments
    ---------
    blocks : iterable of iterables of vertices
        Disjoint blocks. Empty blocks are dropped.
    """
    def __init__(self, blocks):
        seen = set()
        clean = []
        for block in blocks:
            b = frozenset(point(v) for v in block)
            if not b:
                continue
            if seen & b:
                raise ValueError("ATRC Error: Boundary blocks must be disjoint.")
            seen |= b
            clean.append(b)
        self.blocks = tuple(sorted(clean, key=min))
        self.vertices = frozenset(seen)

    @classmethod
    def free(cls, vertices):
        if vertices is None:
            raise ValueError("ATRC Error: Boundary set undefined for this domain.")
        return cls([[v] for v in vertices])

    @classmethod
    def wired(cls, vertices):
        if vertices is None:
            raise ValueError("ATRC Error: Boundary set undefined for this domain.")
        return cls([list(vertices)])

    @property
    def is_wired(self):
        return len(self.blocks) <= 1

    def covers(self, vertices):
        return self.vertices == frozenset(point(v) for v in vertices)

    def merges(self, index):
        """Vertex-index pairs to union so that every block becomes one class."""
        out = []
        for block in self.blocks:
            members = sorted(index[v] for v in block)
            for j in members[1:]:
                out.append((members[0], j))
        return out

    def __eq__(self, other):
        return isinstance(other, BoundaryPartition) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        if len(self.blocks) == 1 and len(self.vertices) > 1:
            return "<BoundaryPartition wired on {0} vertices>".format(len(self.vertices))
        if all(len(b) == 1 for b in self.blocks):
            return "<BoundaryPartition free on {0} vertices>".format(len(self.vertices))
        return "<BoundaryPartition {0} blocks>".format(len(self.blocks))


def _crosses(poly, px, py):
    """Even-odd ray casting towards +x. All coordinates integer (already scaled)."""
    inside = False
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        if (ay > py) != (by > py):
            dy = by - ay
            lhs = (px - ax) * dy
            rhs = (py - ay) * (bx - ax)
            if (lhs < rhs) if dy > 0 else (lhs > rhs):
                inside = not inside
    return inside


def strictly_inside(cycle, p):
    """True if lattice point p lies strictly inside the polygon through cycle."""
    poly = [(2 * v[0], 2 * v[1]) for v in cycle]
    return _crosses(poly, 2 * p[0], 2 * p[1])


class Domain(object):
    """
    A finite domain of L or L*. Immutable.

    Arguments
    ---------
    vertices : iterable of (x, y)
        All of one parity class.
    edges : iterable of vertex pairs, optional
        Defaults to the subgraph induced by vertices.
    kind : str
        One of "box", "cycle", "subgraph".
    cycle : sequence of vertices, optional
        The surrounding simple cycle, in order, for box and cycle kinds.
    """
    def __init__(self, vertices, edges=None, kind="subgraph", cycle=None):
        if kind not in kinds:
            raise ValueError("ATRC Error: Unknown domain kind '{0}'.".format(kind))
        verts = sorted(set(point(v) for v in vertices))
        parities = set(v.parity for v in verts)
        if len(parities) > 1:
            raise ValueError("ATRC Error: Domain vertices must all lie on L or all on L*.")
        self.lattice = parities.pop() if parities else PRIMAL
        self.kind = kind
        self.vertices = tuple(verts)
        self.vertex_set = frozenset(verts)
        self.index = {v: i for i, v in enumerate(verts)}

        if edges is None:
            keys = set()
            for v in verts:
                for dx, dy in ((1, 1), (1, -1)):
                    w = v.shift(dx, dy)
                    if w in self.vertex_set:
                        keys.add(edge_key(v, w))
        else:
            keys = set()
            for u, w in edges:
                u, w = point(u), point(w)
                if u not in self.vertex_set or w not in self.vertex_set:
                    raise ValueError("ATRC Error: Edge {0}-{1} leaves the domain.".format(tuple(u), tuple(w)))
                if abs(u.x - w.x) != 1 or abs(u.y - w.y) != 1:
                    raise ValueError("ATRC Error: {0}-{1} is not a diagonal edge.".format(tuple(u), tuple(w)))
                keys.add(edge_key(u, w))
        self.edges = tuple(sorted(keys))
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.edge_u = np.array([self.index[u] for u, _ in self.edges], dtype=np.int64)
        self.edge_w = np.array([self.index[w] for _, w in self.edges], dtype=np.int64)

        incidence = [[] for _ in verts]
        for i, (u, w) in enumerate(self.edges):
            incidence[self.index[u]].append((self.index[w], i))
            incidence[self.index[w]].append((self.index[u], i))
        self.incidence = tuple(tuple(row) for row in incidence)

        self.boundary = frozenset(v for v in verts
                                  if any(v.shift(dx, dy) not in self.vertex_set for dx, dy in DIAGONALS))

        if cycle is not None:
            cycle = tuple(point(v) for v in cycle)
            on_cycle = []
            for i in range(len(cycle)):
                key = edge_key(cycle[i], cycle[(i + 1) % len(cycle)])
                if key not in self.edge_index:
                    raise ValueError("ATRC Error: Cycle step {0}-{1} is not an edge of the domain.".format(tuple(key[0]), tuple(key[1])))
                on_cycle.append(self.edge_index[key])
            self.cycle = cycle
            self.domain_boundary = frozenset(cycle)
            self.edge_boundary = frozenset(on_cycle)
        else:
            self.cycle = None
            self.domain_boundary = None
            self.edge_boundary = None
        self._dual = None
        self.dual_map = None    # set on domains built by dual_domain

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def is_cycle_domain(self):
        return self.cycle is not None

    @property
    def full_mask(self):
        return (1 << len(self.edges)) - 1

    @property
    def edge_boundary_mask(self):
        if self.edge_boundary is None:
            return 0
        return edge_bitmask(self.edge_boundary)

    def dual(self):
        """Omega*, built once and cached."""
        if self._dual is None:
            self._dual = dual_domain(self)
        return self._dual

    def vertex_mask(self, vertices):
        mask = 0
        for v in vertices:
            mask |= 1 << self.index[point(v)]
        return mask

    def union_find(self, cfg, bp=None):
        uf = UnionFind(len(self.vertices))
        eu = self.edge_u
        ew = self.edge_w
        for i in bits(cfg):
            uf.union(int(eu[i]), int(ew[i]))
        if bp is not None:
            for a, b in bp.merges(self.index):
                uf.union(a, b)
        return uf

    def count_clusters(self, cfg, bp=None):
        if bp is not None and not bp.vertices <= self.vertex_set:
            raise ValueError("ATRC Error: Boundary partition has vertices outside the domain.")
        return self.union_find(cfg, bp).num_components

    def connected(self, cfg, x, target):
        """True if x reaches a vertex of target through open edges of cfg."""
        x = point(x)
        if x not in self.vertex_set:
            raise ValueError("ATRC Error: Vertex {0} is not in the domain.".format(tuple(x)))
        goal = set(self.index[point(v)] for v in target if point(v) in self.vertex_set)
        start = self.index[x]
        if start in goal:
            return True
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for nbr, e in self.incidence[v]:
                if (cfg >> e) & 1 and nbr not in seen:
                    if nbr in goal:
                        return True
                    seen.add(nbr)
                    stack.append(nbr)
        return False

    def to_text(self):
        lines = ["domain {0} {1}".format(self.kind, self.lattice),
                 "vertices {0}".format(len(self.vertices))]
        lines += ["{0} {1}".format(v.x, v.y) for v in self.vertices]
        lines.append("edges {0}".format(len(self.edges)))
        lines += ["{0} {1} {2} {3} {4}".format(i, u.x, u.y, w.x, w.y) for i, (u, w) in enumerate(self.edges)]
        if self.cycle is not None:
            lines.append("cycle {0}".format(len(self.cycle)))
            lines += ["{0} {1}".format(v.x, v.y) for v in self.cycle]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = [r.split() for r in text.strip().splitlines()]
        if not rows or rows[0][0] != "domain":
            raise ValueError("ATRC Error: Not a domain text block.")
        kind = rows[0][1]
        pos = 1
        nv = int(rows[pos][1])
        vertices = [(int(r[0]), int(r[1])) for r in rows[pos + 1:pos + 1 + nv]]
        pos += 1 + nv
        ne = int(rows[pos][1])
        edges = [((int(r[1]), int(r[2])), (int(r[3]), int(r[4]))) for r in rows[pos + 1:pos + 1 + ne]]
        pos += 1 + ne
        cycle = None
        if pos < len(rows) and rows[pos][0] == "cycle":
            nc = int(rows[pos][1])
            cycle = [(int(r[0]), int(r[1])) for r in rows[pos + 1:pos + 1 + nc]]
        return cls(vertices, edges, kind=kind, cycle=cycle)

    def __eq__(self, other):
        return (isinstance(other, Domain) and self.vertices == other.vertices
                and self.edges == other.edges and self.cycle == other.cycle)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return "<Domain {0} on {1}: {2} vertices, {3} edges>".format(self.kind, self.lattice, len(self.vertices), len(self.edges))


def build_lambda(n):
    """
    The box Lambda_n = {u in L: |u|_1 <= 2n}. For n >= 1 the ring |u|_1 = 2n, ordered by
    angle, is its surrounding cycle; Lambda_0 is the single vertex (0,0).
    """
    if n < 0:
        raise ValueError("ATRC Error: Box size must be nonnegative, got {0}.".format(n))
    r = 2 * n
    verts = [LatticePoint(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
             if (x + y) % 2 == 0 and abs(x) + abs(y) <= r]
    cycle = None
    if n > 0:
        cycle = sorted((v for v in verts if v.norm1() == r), key=lambda v: math.atan2(v.y, v.x))
    d = Domain(verts, kind="box", cycle=cycle)
    d.n = n
    return d


def cycle_domain(cycle):
    """
    The domain enclosed by a simple cycle of L or L*: vertices on or inside the cycle,
    edges on the cycle or with midpoint strictly inside it.
    """
    pts = [point(v) for v in cycle]
    if len(pts) < 4:
        raise ValueError("ATRC Error: A cycle needs at least 4 vertices.")
    if len(set(pts)) != len(pts):
        raise ValueError("ATRC Error: Cycle is not simple.")
    if len(set(p.parity for p in pts)) != 1:
        raise ValueError("ATRC Error: Cycle mixes L and L* vertices.")
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        if abs(a.x - b.x) != 1 or abs(a.y - b.y) != 1:
            raise ValueError("ATRC Error: Cycle vertices {0} and {1} are not adjacent.".format(tuple(a), tuple(b)))
    on_cycle = set(pts)
    poly = [(2 * p.x, 2 * p.y) for p in pts]
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    par = (pts[0].x + pts[0].y) % 2
    verts = [LatticePoint(x, y) for x in range(min(xs), max(xs) + 1) for y in range(min(ys), max(ys) + 1)
             if (x + y) % 2 == par and (LatticePoint(x, y) in on_cycle or _crosses(poly, 2 * x, 2 * y))]
    vset = set(verts)
    cycle_edges = set(edge_key(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts)))
    edges = []
    for v in verts:
        for dx, dy in ((1, 1), (1, -1)):
            w = v.shift(dx, dy)
            if w not in vset:
                continue
            key = edge_key(v, w)
            if key in cycle_edges or _crosses(poly, v.x + w.x, v.y + w.y):
                edges.append(key)
    return Domain(verts, edges, kind="cycle", cycle=pts)


def subgraph_domain(vertices):
    return Domain(vertices, kind="subgraph")


def box_domain(n):
    """L-vertices of the square [0,2n-1]^2 with induced edges (crossing experiments)."""
    if n < 1:
        raise ValueError("ATRC Error: Crossing box needs n >= 1.")
    side = 2 * n - 1
    d = Domain([(x, y) for x in range(side + 1) for y in range(side + 1) if (x + y) % 2 == 0])
    d.n = n
    return d


def dual_edge(u, w):
    """e* is e rotated by 90 degrees about its midpoint."""
    u, w = point(u), point(w)
    # endpoints m +- ((wy-uy)/2, -(wx-ux)/2) with m the midpoint, in integers
    a = LatticePoint((u.x + w.x + w.y - u.y) // 2, (u.y + w.y - w.x + u.x) // 2)
    b = LatticePoint((u.x + w.x - w.y + u.y) // 2, (u.y + w.y + w.x - u.x) // 2)
    return edge_key(a, b)


def dual_domain(d):
    """
    Omega*: the endpoints of all dual edges, with the dual edges. The returned domain
    carries dual_map, where dual_map[i] is the index in Omega* of the dual of edge i of d.
    """
    duals = [dual_edge(u, w) for u, w in d.edges]
    verts = set()
    for a, b in duals:
        verts.add(a)
        verts.add(b)
    out = Domain(verts, duals, kind="subgraph")
    out.dual_map = tuple(out.edge_index[e] for e in duals)
    out.origin = d
    return out


def count_clusters(cfg, bp, d):
    return d.count_clusters(cfg, bp)


class Z2Domain(object):
    """
    The Z^2-domain induced by Omega and Omega*, for a cycle-domain Omega on L (even) or on
    L* (odd). Its boundary is the domain boundary of Omega together with the boundary of Omega*.
    """
    def __init__(self, primal_part):
        d = primal_part
        if not d.is_cycle_domain:
            raise ValueError("ATRC Error: Z^2-domains need a cycle-domain; the domain boundary is undefined.")
        dual = d.dual()
        outside = frozenset(a for a in dual.vertices if not strictly_inside(d.cycle, a))
        if outside != dual.boundary:
            raise ValueError("ATRC Error: Dual boundary of this cycle-domain does not match the outside dual vertices.")
        self.primal_part = d
        self.dual_part = dual
        self.parity = "even" if d.lattice == PRIMAL else "odd"
        self.inside_dual = dual.vertex_set - outside
        self.boundary = d.domain_boundary | dual.boundary
        self.vertices = tuple(sorted(d.vertex_set | dual.vertex_set))
        self.vertex_set = frozenset(self.vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        edges = []
        for v in d.vertices:
            for dx, dy in AXES:
                a = v.shift(dx, dy)
                if a in dual.vertex_set:
                    edges.append((v, a))
        self.edges = tuple(sorted(edges))
        nbrs = [[] for _ in self.vertices]
        for v, a in self.edges:
            nbrs[self.index[v]].append(self.index[a])
            nbrs[self.index[a]].append(self.index[v])
        self.neighbours = tuple(tuple(sorted(row)) for row in nbrs)
        tiles = []
        for i, (u, w) in enumerate(d.edges):
            a, b = dual.edges[dual.dual_map[i]]
            tiles.append((u, w, a, b))
        self.tiles = tuple(tiles)

    @property
    def free_vertices(self):
        return tuple(v for v in self.vertices if v not in self.boundary)

    def boundary_heights(self):
        """Zero on the L-part of the boundary, one on the L*-part."""
        return {v: (0 if v.parity == PRIMAL else 1) for v in self.boundary}

    def __repr__(self):
        return "<Z2Domain {0}: {1} vertices, {2} boundary>".format(self.parity, len(self.vertices), len(self.boundary))


def even_domain(d):
    return Z2Domain(d)


def odd_domain(d):
    if d.lattice != DUAL:
        raise ValueError("ATRC Error: Odd domains are built from cycle-domains on L*.")
    return Z2Domain(d)
