"""Kernel backend selection.

The hot elementwise kernels exist twice: a numba-jitted version
(kernels_numba) and a pure-numpy reference (kernels_numpy).  The active one
is chosen once at import from the MONOMLP_BACKEND environment variable:

    MONOMLP_BACKEND=numpy   force the pure-numpy path
    MONOMLP_BACKEND=numba   require numba (ImportError if unavailable)
    unset                   numba when importable, else numpy

benchmarks/bench_backends.py compares the two.
"""

import os

ENV_VAR = "MONOMLP_BACKEND"


def _resolve():
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        from . import kernels_numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve()

if BACKEND == "numba":
    from .kernels_numba import act_deriv, act_eval, adam_step, sgd_step
else:
    from .kernels_numpy import act_deriv, act_eval, adam_step, sgd_step

__all__ = ["BACKEND", "ENV_VAR", "act_eval", "act_deriv", "adam_step", "sgd_step"]
