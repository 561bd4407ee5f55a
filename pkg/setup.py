"""Builds the compiled kernel; the package falls back to pure numpy when the
extension is unavailable, so a failed compile only costs speed."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("carlab._kernels._dpcore",
                   ["src/carlab/_kernels/_dpcore.pyx"],
                   extra_compile_args=["-O3"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
