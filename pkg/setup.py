import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "whittlefit._kernels._core",
                ["src/whittlefit/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

# The package works without the extension: whittlefit._kernels falls back to
# the NumPy implementations when the compiled module is absent.
setup(ext_modules=ext_modules)
