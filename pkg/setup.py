import os

from setuptools import Extension, setup

# The compiled kernels are optional: without Cython (or with
# EXPUCODE_PURE_ONLY=1) the package installs pure-Python only and selects
# the fallback backend at import time.
ext_modules = []
if os.environ.get("EXPUCODE_PURE_ONLY") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "expucode._kernels",
                    ["src/expucode/_kernels.pyx"],
                    # -ffp-contract=off keeps the compiled kernels
                    # bit-identical to the pure-Python fallback
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
