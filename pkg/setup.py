"""Build the optional compiled kernel.

If Cython, numpy or a C compiler is missing the package still installs and
runs on the pure-Python backend.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Treat a failed compile as 'no kernel' instead of a failed install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - compiler errors vary by platform
            print(f"rremo: compiled kernel not built ({exc}); using the Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"rremo: building {ext.name} failed ({exc}); using the Python backend")


ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    kernel_dir = os.path.join("src", "rremo", "_kernel")
    ext_modules = cythonize(
        [
            Extension(
                "rremo._core",
                sources=[os.path.join("src", "rremo", "_core.pyx"),
                         os.path.join(kernel_dir, "kernel.c")],
                include_dirs=[np.get_include(), kernel_dir],
                extra_compile_args=["-O3", "-std=c99"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError as exc:  # pragma: no cover
    print(f"rremo: building without the compiled kernel ({exc})")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
