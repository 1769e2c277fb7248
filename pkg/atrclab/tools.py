import warnings

layers = {"tau": 0, "tau_prime": 1, "tautau": 2}    # connection layers accepted by the estimators
methods = {"exact": 0, "mcmc": 1}                   # phi evaluation methods

VERIFY_WARNINGS = [
    (False, 1, "ATRC: At least one check exceeded its tolerance."),
    (False, 2, "ATRC: At least one check was skipped because its enumeration exceeds the state cap."),
    (True, 4, "ATRC: No check could run under the configured state cap."),
    (False, 8, "ATRC: At least one estimate series has an effective sample size below the reporting minimum."),
    (False, 16, "ATRC: At least one nonpositive estimate was replaced by a one-sided bound."),
]


def raise_flags(w):
    """Raise RuntimeError for the first major flag set in w; warn for every minor one."""
    for majorerror, value, message in VERIFY_WARNINGS:
        if w & value:
            if majorerror:
                raise RuntimeError(message)
            else:
                warnings.warn(message, RuntimeWarning)


#function to test whether the exact oracle and the coupling identity agree on the smallest domain
def install_test():
    e = None
    try:
        from .data import star
        from .oracle import coupling_identity_residual
    except Exception as e:
        return e
    try:
        r1, r2 = coupling_identity_residual(0.2, 0.5, 1., star())
    except Exception as e:
        return e
    if max(r1, r2) > 1.e-10:
        return 'Coupling identity residual {0:.3g} on the star domain'.format(max(r1, r2))
    return e
