"""Build script: compiles the optional search-kernel extension.

The package works without the extension (a pure-Python kernel is selected at
import time); building it just makes the exact searches much faster. Any
failure to cythonize or compile therefore degrades to a pure-Python install
instead of failing the build.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext = Extension(
        "artifact.engine._ckernel",
        ["src/artifact/engine/_ckernel.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"warning: building without compiled search kernel ({exc})")

setup(ext_modules=ext_modules)
