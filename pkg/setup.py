"""Build script: compiles the optional fast kernels.

The compiled extension is a performance accelerator only; if Cython or a C
compiler is missing the package installs anyway and falls back to the pure
NumPy kernels at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "latentsample._kernels._core",
                sources=["src/latentsample/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # fp-contract off: an FMA-fused lo + u*(hi - lo) would round
                # differently from the NumPy fallback and break bit parity.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
