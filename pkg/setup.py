import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CURVERECON_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext = Extension(
            "curverecon._kernels._ckernels",
            ["src/curverecon/_kernels/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
            optional=True,
        )
        ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
