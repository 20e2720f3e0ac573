"""Backend selection for the tracking kernels.

Two interchangeable backends exist: "numba" compiles the kernels in
``_tracker_impl`` with ``numba.njit`` and "numpy" runs them as plain
Python.  Selection order:

1. explicit ``backend=`` argument,
2. the ``GRIDROOTS_BACKEND`` environment variable,
3. "numba" when importable, else "numpy".

The environment variable is consulted on every call, so tests and the
benchmark can flip backends inside one process.  Each backend gets its
own copy of the implementation module; the numba copy has its functions
rebound to their jitted versions so that cross-calls inside the kernels
resolve to compiled code.
"""

import importlib.util
import os

ENV_VAR = "GRIDROOTS_BACKEND"

# Wrapped in dependency order (only for readability; rebinding is lazy).
_KERNEL_NAMES = [
    "inf_norm",
    "max_imag",
    "vec_is_finite",
    "power_table",
    "eval_packed",
    "eval_jac_packed",
    "system_value",
    "system_jac",
    "newton_homotopy",
    "newton_target",
    "cond_estimate",
    "classify_endpoint",
    "track_path",
]

_cache = {}


def _fresh_impl():
    spec = importlib.util.find_spec("gridroots._tracker_impl")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _build(backend):
    module = _fresh_impl()
    if backend == "numba":
        from numba import njit
        for name in _KERNEL_NAMES:
            setattr(module, name, njit(cache=True, nogil=True)(getattr(module, name)))
    return module


def resolve_backend(backend=None):
    """Return the effective backend name for an optional override."""
    if backend is None:
        backend = os.environ.get(ENV_VAR, "").strip().lower() or None
    if backend is None:
        backend = "numba" if numba_available() else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {backend!r}")
    if backend == "numba" and not numba_available():
        raise ValueError("numba backend requested but numba is not importable")
    return backend


def get_kernels(backend=None):
    """Module-like namespace holding the kernels for the chosen backend."""
    backend = resolve_backend(backend)
    if backend not in _cache:
        _cache[backend] = _build(backend)
    return _cache[backend]
