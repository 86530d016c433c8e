"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python kernel with the
same semantics is selected at import time), so a failed compile only
costs speed. Set POLYCORR_SKIP_EXT=1 to skip the extension entirely.

-ffp-contract=off keeps the compiled kernel bit-identical to the pure
Python one (no FMA contraction of a*b+c).
"""
import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"WARNING: kernel extension not built ({exc}); "
                  "falling back to the pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: {ext.name} failed to compile ({exc}); "
                  "falling back to the pure-Python kernels")


ext_modules = []
cmdclass = {}
if os.environ.get("POLYCORR_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "polycorr._kernels._core",
                    ["src/polycorr/_kernels/_core.pyx"],
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level="3",
        )
        cmdclass = {"build_ext": optional_build_ext}
    except ImportError:
        print("WARNING: Cython not available; building without the compiled kernels")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
