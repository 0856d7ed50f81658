"""Build the optional compiled steady-state kernel.

The package works without the extension (a vectorized numpy kernel is
selected at import time); the Cython kernel is a drop-in replacement for
the hot inner loop. Build failures therefore only emit a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        Extension(
            "rydrx._kernels_cy",
            ["src/rydrx/_kernels_cy.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"warning: compiled kernel skipped ({exc}); "
                     "falling back to the numpy kernel\n")

setup(ext_modules=ext_modules)
