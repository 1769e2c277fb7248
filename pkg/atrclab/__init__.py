# -*- coding: utf-8 -*-
import warnings

# Version
__version__ = "1.0.0"

try:
    from importlib import metadata
    moduleversion = metadata.version("atrc-lab")
    if moduleversion != __version__:
        warnings.warn("WARNING: installed distribution and atrclab module have different version numbers: '%s' vs '%s'.\n" % (moduleversion, __version__), ImportWarning)
except Exception:
    pass    # running from a source checkout

from .lattice import (LatticePoint, BoundaryPartition, Domain, Z2Domain, build_lambda, box_domain, cycle_domain,
                      subgraph_domain, dual_domain, dual_edge, even_domain, odd_domain, count_clusters)
from .measures import (ATParams, ATRCWeights, FKParams, SixVParams, SpinState, HeightFn, at_weight, atrc_weights,
                       atrc_weight, fk_weight, hf_weight, sd_beta, u_sd, dual_params, sixv_params_from_at, nu_weights,
                       edge_conditional, p_sd)
from .oracle import (EnumerationCapError, DistTable, MeasureSpec, expectation, pushforward, marginal, tv_distance,
                     check_domination, check_gks, gks_scan, coupling_identity_residual, check_holley)
from .oracle import enumerate as enumerate_measure
from .couplings import (EdgePair, LoopSet, joint_table, assign_spins_to_dual_clusters, sample_edges_from_spins,
                        edge_law_from_spins, trace_loops, bkw_heights, bkw_table, dual_atrc_config, euler_constant)
from .simulate import (ChainState, EstimateSeries, new_chain, sweep, run_chain, estimate_connection, estimate_crossing,
                       estimate_two_point, estimate_phi, fit_decay_rate, derivative_covariance_check)
from .archive import Tablearchive
from .params import Params
from .tools import install_test

__all__ = ["__version__", "LatticePoint", "BoundaryPartition", "Domain", "Z2Domain", "build_lambda", "box_domain",
           "cycle_domain", "subgraph_domain", "dual_domain", "dual_edge", "even_domain", "odd_domain", "count_clusters",
           "ATParams", "ATRCWeights", "FKParams", "SixVParams", "SpinState", "HeightFn", "at_weight", "atrc_weights",
           "atrc_weight", "fk_weight", "hf_weight", "sd_beta", "u_sd", "dual_params", "sixv_params_from_at",
           "nu_weights", "edge_conditional", "p_sd", "EnumerationCapError", "DistTable", "MeasureSpec",
           "enumerate_measure", "expectation", "pushforward", "marginal", "tv_distance", "check_domination",
           "check_gks", "gks_scan", "coupling_identity_residual", "check_holley", "EdgePair", "LoopSet", "joint_table",
           "assign_spins_to_dual_clusters", "sample_edges_from_spins", "edge_law_from_spins", "trace_loops",
           "bkw_heights", "bkw_table", "dual_atrc_config", "euler_constant", "ChainState", "EstimateSeries",
           "new_chain", "sweep", "run_chain", "estimate_connection", "estimate_crossing", "estimate_two_point",
           "estimate_phi", "fit_decay_rate", "derivative_covariance_check", "Tablearchive", "Params", "install_test"]
