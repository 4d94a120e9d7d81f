import sys

from setuptools import setup

# The compiled step-function kernel is optional: if Cython or a C compiler is
# missing the package still works through the pure-Python backend.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/mino/_stepfn.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    print(f"mino: building without compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
