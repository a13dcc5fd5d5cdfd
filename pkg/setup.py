import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# The compiled flux-differencing kernel is optional: esdg2d.kernels falls back
# to a pure-NumPy implementation if the extension is missing at import time.
extensions = [
    Extension(
        "esdg2d.kernels._fluxdiff",
        ["src/esdg2d/kernels/_fluxdiff.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
)
