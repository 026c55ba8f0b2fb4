"""Kernel backend selection.

The numba kernels are used when importable; set QAOA_MVC_PURE_NUMPY=1 to force
the pure-numpy fallback.  `benchmarks/bench_kernels.py` compares the two.
"""

import os

_PURE_NUMPY = os.environ.get("QAOA_MVC_PURE_NUMPY", "").strip().lower() not in ("", "0", "false")

if _PURE_NUMPY:
    from . import _kernels_numpy as _impl

    _BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        _BACKEND = "numba"
    except ImportError:
        from . import _kernels_numpy as _impl

        _BACKEND = "numpy"


def kernel_backend() -> str:
    """Name of the active kernel implementation: 'numba' or 'numpy'."""
    return _BACKEND


sv_run = _impl.sv_run
sv_apply_1q = _impl.sv_apply_1q
dm_run = _impl.dm_run
dm_apply_1q = _impl.dm_apply_1q
dm_apply_diag = _impl.dm_apply_diag
dm_thermal_1q = _impl.dm_thermal_1q
dm_depolarize_1q = _impl.dm_depolarize_1q
dm_depolarize_2q = _impl.dm_depolarize_2q
