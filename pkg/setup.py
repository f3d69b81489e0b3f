"""Build script for the optional compiled kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), but the compiled kernel is what makes the large scaling and
lower-bound experiments run in minutes instead of hours.

Build in place with:  python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install still works
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "driftlab._kernels._speedups",
                ["src/driftlab/_kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
