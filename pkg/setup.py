import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("H3MAG_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension(
                "h3mag._kernels",
                ["src/h3mag/_kernels.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
