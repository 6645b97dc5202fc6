import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BCENET_PURE"):
    try:
        import numpy  # noqa: F401
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "bcenet._kernels",
                    ["src/bcenet/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
