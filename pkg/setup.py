"""Build the optional Cython kernels.  Without Cython or a compiler the
package still installs and runs on the numpy fallback."""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler available
            print(f"warning: compiled kernels not built ({exc}); using the pure-Python fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using the pure-Python fallback", file=sys.stderr)


def extensions():
    if os.environ.get("MSIFM_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not found; skipping compiled kernels", file=sys.stderr)
        return []
    from setuptools import Extension

    ext = Extension(
        "msifm._kernels",
        ["src/msifm/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
