"""Numerical laboratory for Reeb flows on S^3 and ST*S^2, their magnetic
and Finsler interpretations, and exact periodic-orbit bookkeeping."""

import os

_threads = os.environ.get("REEB_LAB_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"
