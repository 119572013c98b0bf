from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [
            Extension(
                "qadic._kernels._speed",
                ["src/qadic/_kernels/_speed.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
)
