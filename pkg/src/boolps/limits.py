"""Enumeration caps for exhaustive operations.

All state-space operations in this package are exhaustive by design; the
caps below keep them desk-scale.  The variable cap bounds any operation
that enumerates 2**n subsets of an n-variable table.
"""

import os

from .errors import CapacityError

DEFAULT_VAR_CAP = 20  # 2**20 subsets, about 1M states
DEFAULT_BREADTH_CAP = 10_000  # concurrent branches kept by `evolve`

ENV_VAR_CAP = "BOOLPS_CAP_VARS"


def var_cap(override=None):
    """Effective variable cap: explicit override, else env, else default."""
    if override is not None:
        return int(override)
    return int(os.environ.get(ENV_VAR_CAP, DEFAULT_VAR_CAP))


def check_enumerable(n_vars, cap=None, what="universe"):
    """Raise CapacityError if enumerating 2**n_vars subsets exceeds the cap."""
    limit = var_cap(cap)
    if n_vars > limit:
        raise CapacityError(
            f"{what} has {n_vars} variables; enumeration capped at {limit} "
            f"(set {ENV_VAR_CAP} or pass a cap to raise)"
        )
    return n_vars
