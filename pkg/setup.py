"""Build hook: compile the optional speedup kernels when Cython is available.

The package is fully functional without the extension; any build failure
falls back to the pure-Python kernels selected at import time.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "operad_forge._kernels._speedups",
                ["src/operad_forge/_kernels/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"operad-forge: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
