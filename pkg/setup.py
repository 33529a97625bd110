"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time); building it just makes the hot loops faster.
"""

import numpy
from Cython.Build import cythonize
from setuptools import setup
from setuptools.extension import Extension

compiler_directives = {
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
    "language_level": "3",
}

extensions = [
    Extension(
        "bnit._core",
        ["src/bnit/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives=compiler_directives))
