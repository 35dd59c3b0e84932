"""Hot loops of the basis search, in two interchangeable backends.

``numba`` compiles the explicit loops in :mod:`.loops`; ``numpy`` runs the
vectorised equivalents in :mod:`.vectorized`.  Both take the same packed
``uint64`` row words and return identical results.  The backend is chosen by
the ``FAULTBASIS_BACKEND`` environment variable (``numba`` or ``numpy``);
without it numba is used when importable.

Termination codes returned by ``local_search``:
``CONVERGED`` (no improving neighbour), ``STEP_BUDGET`` (``max_steps`` moves
made) and ``ZERO_DIVERSITY`` (early stop at F = 0).
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from . import vectorized

CONVERGED, STEP_BUDGET, ZERO_DIVERSITY = 0, 1, 2
TERMINATION_NAMES = {CONVERGED: "converged", STEP_BUDGET: "step-budget", ZERO_DIVERSITY: "zero-diversity"}

# absolute slack when comparing sums of pairwise Jaccard values
EPS = 1e-10

try:
    from . import loops
except ImportError:  # numba missing
    loops = None

_BACKENDS = {"numpy": SimpleNamespace(name="numpy", greedy_basis=vectorized.greedy_basis,
                                      local_search=vectorized.local_search)}
if loops is not None:
    _BACKENDS["numba"] = SimpleNamespace(name="numba", greedy_basis=loops.greedy_basis,
                                         local_search=loops.local_search)


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None) -> SimpleNamespace:
    if name is None:
        name = os.environ.get("FAULTBASIS_BACKEND", "").strip().lower() or None
    if name is None:
        name = "numba" if "numba" in _BACKENDS else "numpy"
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}") from None
