"""Backend selection for the statevector kernels.

The compiled Cython extension is preferred when importable; otherwise the
numpy implementation is used. Set ``QAOATUNE_KERNELS=numpy`` or
``QAOATUNE_KERNELS=cython`` to force a backend (the latter raises if the
extension is missing). Results agree across backends to ~1e-13; replay is
bit-exact only within one backend, so manifests record which one was active.
"""

from __future__ import annotations

import os

from . import _kernels_np

_FORCED = os.environ.get("QAOATUNE_KERNELS", "").strip().lower()

if _FORCED == "numpy":
    _impl = _kernels_np
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _FORCED == "cython":
            raise ImportError(
                "QAOATUNE_KERNELS=cython but the compiled extension is not "
                "importable; rebuild with `pip install -e . --no-build-isolation`"
            )
        _impl = _kernels_np

BACKEND: str = "numpy" if _impl is _kernels_np else "cython"

cost_diagonal = _impl.cost_diagonal
apply_phase = _impl.apply_phase
apply_mixer = _impl.apply_mixer


def load_backend(name: str):
    """Return a specific kernel module ("numpy" or "cython"), for benchmarks
    and cross-backend tests. Raises ImportError if the compiled backend is
    requested but absent."""
    if name == "numpy":
        return _kernels_np
    if name == "cython":
        from . import _kernels_cy

        return _kernels_cy
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    try:
        load_backend("cython")
    except ImportError:
        return ["numpy"]
    return ["numpy", "cython"]
