"""Build hooks for the optional compiled jet kernels.

The package is pure Python plus one optional Cython extension holding the
hot convolution kernels.  When Cython or a C compiler is unavailable the
build falls through to the numpy kernels selected at import time, so the
extension is strictly an accelerator, never a requirement.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "finsq._jetcore",
                ["src/finsq/_jetcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=extensions)
