from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [Extension("hiersmooth._pushcore", ["src/hiersmooth/_pushcore.pyx"])],
        language_level="3",
    ),
)
