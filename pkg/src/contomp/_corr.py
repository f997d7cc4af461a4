"""Backend selection for the correlation core.

Imports the compiled extension when available and falls back to the pure
Python implementation otherwise.  ``BACKEND`` records which one is active;
set ``CONTOMP_FORCE_PYTHON=1`` in the environment to skip the extension.
"""

from __future__ import annotations

import os

from ._corrpy import (  # noqa: F401  (generic paths are always pure Python)
    GAUSSIAN,
    INVERSE_LINEAR,
    LAPLACE,
    eval_batch_generic,
    eval_one_generic,
    golden_max_generic,
)

if os.environ.get("CONTOMP_FORCE_PYTHON") == "1":
    from ._corrpy import eval_batch, eval_one, golden_max

    BACKEND = "python"
else:
    try:
        from ._corrcore import eval_batch, eval_one, golden_max  # type: ignore

        BACKEND = "compiled"
    except ImportError:
        from ._corrpy import eval_batch, eval_one, golden_max

        BACKEND = "python"

__all__ = [
    "BACKEND",
    "LAPLACE",
    "INVERSE_LINEAR",
    "GAUSSIAN",
    "eval_one",
    "eval_batch",
    "golden_max",
    "eval_one_generic",
    "eval_batch_generic",
    "golden_max_generic",
]
