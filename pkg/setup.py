"""Build script: compiles the optional C extension for the hot kernels.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so a missing compiler or Cython
only costs speed, never a failed install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class optional_build_ext(build_ext):
    """build_ext that degrades to a warning instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the capsforge speedup extension failed ({exc}); "
            "falling back to the pure-Python kernels.",
            file=sys.stderr,
        )


extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "capsforge._kernels._speedups",
                ["src/capsforge/_kernels/_speedups.pyx"],
                extra_compile_args=["-O3"] if sys.platform != "win32" else ["/O2"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )

setup(
    ext_modules=extensions,
    cmdclass={"build_ext": optional_build_ext},
)
