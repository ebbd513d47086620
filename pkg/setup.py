"""Build script for the optional compiled matmul kernel.

The package works without the extension (a pure-numpy fallback is selected
at import time), so the extension is marked optional: a missing compiler or
Cython only costs speed, never correctness.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    # -ffp-contract=off is load-bearing: the kernel guarantees that every
    # multiply and add rounds separately, so results are bit-identical to
    # the pure-numpy fallback. Never add -ffast-math here.
    extensions = cythonize(
        [
            Extension(
                "har_lstm.kernels._gemm",
                ["src/har_lstm/kernels/_gemm.pyx"],
                extra_compile_args=["-O3", "-march=native", "-ffp-contract=off"],
                include_dirs=[numpy.get_include()],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
