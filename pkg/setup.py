import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "texthouse.autodiff._convkernels",
                ["src/texthouse/autodiff/_convkernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python conv fallback is selected at import time, so a build
    # without Cython still yields a working package.
    extensions = []

setup(ext_modules=extensions)
