"""
Numerical constants, tolerances and size caps shared by the oracle, the samplers and the command line driver
"""

ENUMERATION_CAP = 2**24     # weight evaluations allowed in one exact enumeration
FLOW_CAP = 10**4            # states allowed in a Strassen flow problem
LOG_SPACE_EDGES = 32        # weights switch to log-space above this many edges

TV_TOL = 1.e-10
RESIDUAL_TOL = 1.e-10
INVOLUTION_TOL = 1.e-9
GKS_TOL = 1.e-12
DERIVATIVE_TOL = 1.e-6
NORMALIZATION_TOL = 1.e-12

SD_TOL = 1.e-12             # |sinh(2 beta J) e^{2 beta U} - 1| at the self-dual beta
ROOT_MAXITER = 200
FD_STEP = 1.e-5             # central finite-difference step in beta

N_BATCHES = 16
MIN_ESS = 100.

FLOW_SCALE = 2.**50         # probabilities are scaled to integers for the max-flow solver
FLOW_RTOL = 1.e-9

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
