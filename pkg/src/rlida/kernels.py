"""Tile kernel selection.

The compiled extension is used when it imports; otherwise, or when
``RLIDA_PURE=1`` is set, the pure-Python twin is used.  Both expose the same
functions and produce identical counters.
"""

import os

from . import _tilecore_py as pure

compiled = None
if os.environ.get("RLIDA_PURE") != "1":
    try:
        from . import _tilecore as compiled
    except ImportError:
        compiled = None

tilecore = compiled if compiled is not None else pure
COMPILED = tilecore is compiled
