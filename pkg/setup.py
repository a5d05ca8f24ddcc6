import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CLIFFADAPT_NO_EXT", "0") != "1":
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cliffadapt._kernels",
                ["src/cliffadapt/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
