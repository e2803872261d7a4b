import os

from setuptools import Extension, setup

# The compiled kernel is optional: without it the package falls back to the
# numpy implementation selected at import time in hyperlab.kernels.
ext_modules = []
if os.environ.get("HYPERLAB_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("hyperlab._fourpoint", ["src/hyperlab/_fourpoint.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
