"""Build script: compiles the optional Cython kernels for the GPE solver.

If Cython or a C compiler is unavailable the install proceeds without the
extension; ramsey_lab.gpe.kernels falls back to a NumPy/SciPy implementation
selected at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ramsey_lab/gpe/_kernels.pyx"],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"ramsey-lab: skipping Cython kernels ({exc}); pure-NumPy fallback will be used")

setup(ext_modules=ext_modules)
