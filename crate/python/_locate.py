"""Import the compiled `tablegraph` extension.

Uses an installed module when there is one, otherwise the library left in
`target/` by `cargo build -p tablegraph-python`.
"""

import importlib.machinery
import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import tablegraph
        return tablegraph
    except ImportError:
        pass
    suffix = {"darwin": "dylib", "win32": "dll"}.get(sys.platform, "so")
    prefix = "" if sys.platform == "win32" else "lib"
    for profile in ("release", "debug"):
        path = ROOT / "target" / profile / f"{prefix}tablegraph.{suffix}"
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("tablegraph", str(path))
            spec = importlib.util.spec_from_file_location("tablegraph", path, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            sys.modules["tablegraph"] = module
            return module
    sys.exit("tablegraph extension not found; run `cargo build -p tablegraph-python` first")
