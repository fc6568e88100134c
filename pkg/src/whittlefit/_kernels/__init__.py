"""Numerical kernel selection: compiled Cython core with a NumPy fallback.

The compiled module is optional.  At import time this package binds the kernel
functions from ``_core`` when it is available (and the environment variable
``WHITTLEFIT_PURE_PYTHON`` is unset), and from the pure-NumPy ``_py`` module
otherwise.  ``use()`` temporarily rebinds them, which is how the benchmark and
the equality tests compare the two implementations in one process.
"""

import os
from contextlib import contextmanager

from . import _py

if os.environ.get("WHITTLEFIT_PURE_PYTHON"):
    _impl = _py
    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = _py
        HAVE_COMPILED = False

ACTIVE = "compiled" if HAVE_COMPILED else "python"

_KERNEL_NAMES = ("matern_acv", "acv_difference", "debias_post", "whittle_terms")

matern_acv = _impl.matern_acv
acv_difference = _impl.acv_difference
debias_post = _impl.debias_post
whittle_terms = _impl.whittle_terms

# NumPy's correlate is already an optimized C implementation of the direct
# O(n^2) summation, so there is no compiled variant of the taper kernel.
taper_kernel_direct = _py.taper_kernel_direct


def implementations():
    """Available implementations as a name -> module map."""
    impls = {"python": _py}
    if HAVE_COMPILED:
        from . import _core

        impls["compiled"] = _core
    return impls


@contextmanager
def use(name):
    """Temporarily bind the kernels of the named implementation."""
    impls = implementations()
    if name not in impls:
        raise ValueError(f"unknown kernel implementation {name!r}; have {sorted(impls)}")
    saved = {k: globals()[k] for k in _KERNEL_NAMES}
    try:
        for k in _KERNEL_NAMES:
            globals()[k] = getattr(impls[name], k)
        yield
    finally:
        globals().update(saved)
