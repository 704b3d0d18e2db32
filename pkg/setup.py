"""Build script: compiles the optional truth-table kernel when Cython and a C
toolchain are available.  The package works without it (pure-Python fallback in
dicekit._ttable_py); pip install never fails just because the extension can't
be built."""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        sys.stderr.write("setup.py: Cython not available, skipping compiled kernel\n")
        return []
    return cythonize(
        ["src/dicekit/_ttable.pyx"],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )


class optional_build_ext(build_ext):
    """Swallow compiler failures so the sdist still installs pure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing cc, bad toolchain, ...
            sys.stderr.write(f"setup.py: extension build failed ({exc}), using pure fallback\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(f"setup.py: {ext.name} failed to compile ({exc}), using pure fallback\n")


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
