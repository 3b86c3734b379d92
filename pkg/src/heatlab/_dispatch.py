"""Select the compiled core when available, the NumPy fallback otherwise.

Set HEATLAB_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the backend-agreement tests).
"""

import os

if os.environ.get("HEATLAB_PURE_PYTHON"):
    from . import _fallback as impl

    CORE = "python"
else:
    try:
        from . import _speedups as impl  # type: ignore[no-redef]

        CORE = "compiled"
    except ImportError:  # pragma: no cover - build-environment dependent
        from . import _fallback as impl  # type: ignore[no-redef]

        CORE = "python"

hermite_image_sums = impl.hermite_image_sums
sine_series_sums = impl.sine_series_sums
fourier_circle_sums = impl.fourier_circle_sums
em_evolve = impl.em_evolve
