"""Sheaves on simplicial complexes, their cohomology, expansion and codes over prime fields."""

from __future__ import annotations

__version__ = "0.1.0"
