import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-python install still works; favardlab._kernels falls back to numpy.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "favardlab._core",
                ["src/favardlab/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
