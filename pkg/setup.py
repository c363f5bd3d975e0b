"""Build hook for the optional compiled simplex kernel.

If Cython or a C compiler is unavailable the package still installs and
``lipsel.lp`` falls back to the pure-Python kernel.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("lipsel.lp._kernel", ["src/lipsel/lp/_kernel.pyx"], extra_compile_args=["-O2"])],
        compiler_directives={"language_level": "3"},
    )
except Exception:  # pragma: no cover - build environment dependent
    ext_modules = []

setup(ext_modules=ext_modules)
