"""Build script for the optional compiled rank kernel.

The package is pure Python except for one hot loop, the finite-field rank
update used by the innovation-rate experiment. If Cython or a C compiler is
unavailable the build degrades to the numpy fallback implementation and the
installed package keeps working.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Treat extension build failures as a soft degradation, not an error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken toolchain
            warnings.warn(f"skipping compiled kernel, falling back to numpy: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name}, falling back to numpy: {exc}")


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "shardprice._rankkernel",
        ["src/shardprice/_rankkernel.pyx"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
