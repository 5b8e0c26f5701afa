"""Build the optional compiled kernel extension.

The package works without it (a pure-Python fallback is selected at
import), so a failed extension build degrades to a warning instead of
failing the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            print("warning: compiled kernels skipped (%s); the pure-Python "
                  "fallback will be used" % exc, file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print("warning: building %s failed (%s); the pure-Python "
                  "fallback will be used" % (ext.name, exc), file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython unavailable; compiled kernels skipped",
              file=sys.stderr)
        return []
    return cythonize(
        [Extension("cpt_sense._core._speed",
                   ["src/cpt_sense/_core/_speed.pyx"])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
