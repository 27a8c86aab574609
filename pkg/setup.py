import sys

import numpy as np
from setuptools import Extension, setup

# The compiled kernel core is optional: if Cython (or a C compiler) is
# missing, the package falls back to the pure-NumPy implementation in
# gpmpc._purecore, selected at import time by gpmpc.backend.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "gpmpc._fastcore",
                ["src/gpmpc/_fastcore.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # noqa: BLE001 - any build failure means pure fallback
    print(f"gpmpc: building without compiled core ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
