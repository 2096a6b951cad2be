"""Kernel backend selection.

The hot numeric kernels exist twice: a compiled Cython extension
(``skewsphere.kernels._core``) and a pure-Python/numpy fallback
(``skewsphere.kernels._ref``) with identical semantics.  The compiled
extension is preferred when importable; set ``SKEWSPHERE_BACKEND=python``
to force the fallback or ``SKEWSPHERE_BACKEND=compiled`` to insist on the
extension (raising if it is missing).
"""

import os

from . import _ref

_compiled = None
try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("SKEWSPHERE_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    backend = _compiled if _compiled is not None else _ref
elif _requested in ("compiled", "cython"):
    if _compiled is None:
        raise ImportError(
            "SKEWSPHERE_BACKEND=compiled but the extension is not built; "
            "run 'pip install -e . --no-build-isolation'"
        )
    backend = _compiled
elif _requested in ("python", "pure"):
    backend = _ref
else:
    raise ImportError(f"unknown SKEWSPHERE_BACKEND value: {_requested!r}")

BACKEND_NAME = backend.BACKEND_TAG
ETA_FLOOR = backend.ETA_FLOOR

bvn_cdf = backend.bvn_cdf
bvn_cdf_many = backend.bvn_cdf_many
bvn_logpdf = backend.bvn_logpdf
pair_loglik = backend.pair_loglik
pair_loglik_many = backend.pair_loglik_many
cl_accumulate = backend.cl_accumulate


def available_backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name=None):
    """Return a kernel module by name ('compiled' or 'python')."""
    if name is None or name == "auto":
        return backend
    if name in ("compiled", "cython"):
        if _compiled is None:
            raise ImportError("compiled kernel backend is not built")
        return _compiled
    if name in ("python", "pure"):
        return _ref
    raise ValueError(f"unknown backend: {name!r}")
