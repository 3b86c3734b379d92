"""Build script: compiles the optional Cython core.

The package works without the extension (a NumPy fallback is selected at
import time), so any failure here degrades to a pure-Python install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "heatlab._speedups",
                ["src/heatlab/_speedups.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"heatlab: skipping compiled core ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
