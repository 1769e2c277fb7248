# -*- coding: utf-8 -*-

"""
Domains and parameter points for standard tests

"""

import math

from .lattice import build_lambda, cycle_domain, subgraph_domain
from .measures import u_sd


def diamond():
    """The 4-cycle around the dual vertex (1,0): 4 vertices, 4 edges, one inside dual vertex."""
    return cycle_domain([(0, 0), (1, 1), (2, 0), (1, -1)])


def double_diamond():
    """Two diamonds sharing the edge (1,1)-(2,0): 6 vertices on the cycle, 7 edges."""
    return cycle_domain([(0, 0), (1, 1), (2, 2), (3, 1), (2, 0), (1, -1)])


def odd_diamond():
    """The diamond of L* around the primal vertex (2,0)."""
    return cycle_domain([(1, 0), (2, 1), (3, 0), (2, -1)])


def path3():
    """Three edges in a row."""
    return subgraph_domain([(0, 0), (1, 1), (2, 2), (3, 3)])


def star():
    """(0,0) with its four neighbours; the centre is the only interior vertex."""
    return subgraph_domain([(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)])


def two_site():
    """Two interior vertices (0,0) and (2,0) with their six boundary neighbours."""
    return subgraph_domain([(0, 0), (2, 0), (1, 1), (1, -1), (-1, 1), (-1, -1), (3, 1), (3, -1)])


def lambda1():
    return build_lambda(1)


domains = {"diamond": diamond, "double_diamond": double_diamond, "odd_diamond": odd_diamond,
           "path3": path3, "star": star, "two_site": two_site, "lambda1": lambda1}


def sd_point(J):
    """(J, U) on the self-dual line at beta = 1."""
    return J, u_sd(J)


def sd_points():
    """Two self-dual points with J < U and one with J > U."""
    return [sd_point(0.2), sd_point(0.15), sd_point(0.3)]


POTTS_J = 0.25 * math.log(3.)     # J = U on the self-dual line
