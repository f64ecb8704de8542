"""Build script for the compiled kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), but the compiled kernels make tick-rate monitoring cheap.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "cobotcell._kernels._core",
        ["src/cobotcell/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
        },
    )
)
