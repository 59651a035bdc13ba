"""Build script: compiles the optional enumeration kernels.

The package works without the extension (a pure-Python mirror of every
kernel is selected at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Degrade to the pure-Python fallback instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cythonize failed, ...
            print(f"warning: compiled kernels skipped ({exc}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not available; compiled kernels skipped")
        return []
    ext = Extension("mmskit.kernels._ckernels",
                    ["src/mmskit/kernels/_ckernels.pyx"])
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
