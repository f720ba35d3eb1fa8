"""Array kernels over F_q with a numba backend and a numpy fallback.

The backend is picked once at import: numba unless the environment sets
``PDIVSTATS_DISABLE_NUMBA=1``.  Both backends expose the same functions and
return identical results; ``numpy_backend`` and ``numba_backend`` give
direct access for cross-checking.
"""

from .._accel import HAVE_NUMBA, USE_NUMBA, backend_name
from . import _np as numpy_backend

if HAVE_NUMBA:
    from . import _nb as numba_backend
else:  # pragma: no cover
    numba_backend = None

_impl = numba_backend if USE_NUMBA else numpy_backend

matmul = _impl.matmul
rref = _impl.rref
rank = _impl.rank
stable_rank = _impl.stable_rank
prime_linear = _impl.prime_linear
fixed_dim = _impl.fixed_dim
poly_mul = _impl.poly_mul
poly_divmod = _impl.poly_divmod
poly_pow = _impl.poly_pow
squarefree = _impl.squarefree
cartier_manin = _impl.cartier_manin
curve_invariants = _impl.curve_invariants
frob = _impl.frob

__all__ = [
    "backend_name", "numpy_backend", "numba_backend", "USE_NUMBA",
    "matmul", "rref", "rank", "stable_rank", "prime_linear", "fixed_dim",
    "poly_mul", "poly_divmod", "poly_pow", "squarefree", "cartier_manin",
    "curve_invariants", "frob",
]
