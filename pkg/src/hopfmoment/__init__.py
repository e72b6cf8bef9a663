"""Moment maps on quaternionic projective space and their zero sets, checked numerically."""
import os as _os

__version__ = "0.1.0"

# Thread count for BLAS backends; must be set before numpy is imported.
if _os.environ.get("HOPFMOMENT_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["HOPFMOMENT_THREADS"])
