"""Runtime knobs read from the environment."""

from __future__ import annotations

import os

__all__ = ["enumeration_budget", "vertex_threshold", "DEFAULT_BUDGET"]

DEFAULT_BUDGET = 1 << 24


def enumeration_budget(default: int = DEFAULT_BUDGET) -> int:
    """Max number of vectors an exhaustive search may visit (``SHEAFLTC_BUDGET`` overrides)."""
    env = os.environ.get("SHEAFLTC_BUDGET")
    if env:
        return int(float(env))
    return default


def vertex_threshold() -> int:
    """Max vertex count for exhaustive subset scans (20 unless ``SHEAFLTC_BUDGET`` is set)."""
    env = os.environ.get("SHEAFLTC_BUDGET")
    if env:
        return max(1, int(float(env)).bit_length() - 1)
    return 20
