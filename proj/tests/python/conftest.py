"""Make the package importable from a plain CMake build.

When the wheel is installed, `import lqrsyn` just works. Otherwise, load the
compiled module out of the build tree (or $LQRSYN_BUILD_DIR) and register it
under the package name before importing the python layer.
"""

import glob
import importlib.util
import os
import sys
from pathlib import Path

_ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(_ROOT / "python"))

try:
    import lqrsyn  # noqa: F401
except ImportError:
    candidates = []
    build_dir = os.environ.get("LQRSYN_BUILD_DIR")
    if build_dir:
        candidates += glob.glob(os.path.join(build_dir, "_lqrsyn*.so"))
    candidates += glob.glob(str(_ROOT / "build" / "_lqrsyn*.so"))
    if not candidates:
        raise ImportError(
            "lqrsyn is not installed and no built _lqrsyn module was found; "
            "build with cmake or set LQRSYN_BUILD_DIR"
        )
    spec = importlib.util.spec_from_file_location(
        "lqrsyn._lqrsyn", candidates[0]
    )
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    sys.modules["lqrsyn._lqrsyn"] = module
    import lqrsyn  # noqa: F401
