"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so a failed compile only costs speed.
"""

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Carry on with the pure-Python fallback if compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            print(f"WARNING: building the fast kernels failed ({exc}); "
                  "falling back to the pure-Python implementation")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: {ext.name} failed to compile ({exc}); "
                  "falling back to the pure-Python implementation")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    # -ffp-contract=off keeps the compiled arithmetic bit-identical to the
    # pure-Python kernels (no fused multiply-add), which the test suite checks.
    ext = Extension(
        "taxograft._kernels._fast",
        ["src/taxograft/_kernels/_fast.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
