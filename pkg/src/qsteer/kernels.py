"""Backend selection for the numeric inner loops.

The Cython extension is used when it was built; otherwise the numpy fallback
is loaded. Both expose the same three functions, and :func:`get` returns
either implementation explicitly so tests and benchmarks can compare them.
"""
import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "python"
_impl = BACKENDS[BACKEND]


def get(name: str):
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {sorted(BACKENDS)})") from None


def epr_table(alice, bob, rho, backend=None):
    impl = _impl if backend is None else get(backend)
    return impl.epr_table(
        np.ascontiguousarray(alice, dtype=np.complex128),
        np.ascontiguousarray(bob, dtype=np.complex128),
        np.ascontiguousarray(rho, dtype=np.complex128),
    )


def product_table(factors, backend=None):
    impl = _impl if backend is None else get(backend)
    return impl.product_table(np.ascontiguousarray(factors, dtype=np.float64))


def lhs_values(weights, first, second, responses, fourier, backend=None):
    impl = _impl if backend is None else get(backend)
    return impl.lhs_values(
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(first, dtype=np.int_),
        np.ascontiguousarray(second, dtype=np.int_),
        np.ascontiguousarray(responses, dtype=np.complex128),
        np.ascontiguousarray(fourier, dtype=np.complex128),
    )
