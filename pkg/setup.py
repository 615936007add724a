"""Build script: compiles the optional Cython cycle kernel.

The package works without the extension (a pure numpy backend is selected at
import time); building it just makes large simulation sweeps much faster.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "bulbnet._kernel._cycle",
                ["src/bulbnet/_kernel/_cycle.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
