"""Backend selection for the four-point scan.

The compiled extension is used when it imported cleanly; setting
HYPERLAB_PURE=1 in the environment forces the numpy fallback.  Both
backends produce bit-identical results (same association order, same
tie-breaking), which tests/test_kernels.py pins down.
"""
import os

from . import _fourpoint_py

_compiled = None
if os.environ.get("HYPERLAB_PURE") != "1":
    try:
        from . import _fourpoint as _compiled
    except ImportError:
        _compiled = None


def backend_name():
    return "compiled" if _compiled is not None else "python"


def fourpoint_scan(e):
    """(best, x, y, z) maximizing (E[x,y]-E[x,z])-E[z,y], lex-first."""
    if _compiled is not None:
        return _compiled.scan(e)
    return _fourpoint_py.scan(e)
