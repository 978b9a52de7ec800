"""Build the pybind11 extension through the project's CMake tree.

setuptools drives a CMake configure/build of the single `_maxhunt` target and
points its output directory at wherever setuptools wants the extension
(`build/lib` for wheels, the source package for editable installs).
"""

import pathlib
import subprocess
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = pathlib.Path(__file__).resolve().parent
        # Directory that must end up containing the .so (…/maxhunt/).
        out_dir = pathlib.Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)
        build_dir = pathlib.Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DMAXHUNT_PY_OUTDIR={out_dir}",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_maxhunt", "-j2"],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("maxhunt._maxhunt")],
    cmdclass={"build_ext": CMakeBuild},
)
