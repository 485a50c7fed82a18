"""Build shim for the Cython stepping kernel.

The package works without the extension (a numpy fallback is selected at
import time), so failures here only cost speed.
"""
import numpy
from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "rydfac._stepper",
                ["src/rydfac/_stepper.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
