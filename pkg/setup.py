"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: fgdkit._kernels
falls back to the pure NumPy implementations when the compiled module is
missing (see benchmarks/bench_kernels.py for the speed difference).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fgdkit._kernels._fast",
                ["src/fgdkit/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
