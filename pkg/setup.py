"""Build script: compiles the optional orbit-iteration extension.

The extension is a pure speed-up; the package falls back to
``ergobreak._slowkern`` when the compiled module is missing, so any
build failure here downgrades to a warning instead of aborting the
install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("ergobreak._fastkern", ["src/ergobreak/_fastkern.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"ergobreak: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
