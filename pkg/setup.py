import os

import numpy as np
from setuptools import Extension, setup

# VIBSTAB_NO_EXT=1 skips the compiled core; the package then runs on the
# numpy fallback.
ext_modules = []
if not os.environ.get("VIBSTAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "vibstab._kernels",
                    ["src/vibstab/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
