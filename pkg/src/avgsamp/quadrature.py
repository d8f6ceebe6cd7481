"""Gauss-Legendre panel quadrature aligned to breakpoints.

All integrands in this package are piecewise polynomial (or powers of
such), so composite Gauss rules whose panel edges include every
breakpoint integrate them essentially exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureSpec:
    """Per-axis Gauss-Legendre order and panel subdivision factor."""

    order: int = 8
    refine: int = 1

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("quadrature order must be >= 1")
        if self.refine < 1:
            raise ValueError("refine factor must be >= 1")


@lru_cache(maxsize=32)
def _gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_edges(lo: float, hi: float, breaks, refine: int = 1) -> np.ndarray:
    """Sorted panel edges on [lo, hi] containing every interior breakpoint.

    Each interval between consecutive breakpoints is split into `refine`
    equal panels.  Returns an empty array when the interval is degenerate.
    """
    if hi <= lo:
        return np.empty(0)
    knots = np.asarray(breaks, dtype=float)
    knots = knots[(knots > lo) & (knots < hi)]
    knots = np.unique(np.concatenate(([lo], knots, [hi])))
    if refine == 1:
        return knots
    segs = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(knots[:-1], knots[1:])]
    return np.concatenate(segs + [knots[-1:]])


def panel_nodes(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Gauss rule on the given panels."""
    if len(edges) < 2:
        return np.empty(0), np.empty(0)
    x, w = _gauss_rule(order)
    a = edges[:-1]
    h = np.diff(edges)
    nodes = (a[:, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


def axis_rule(lo: float, hi: float, breaks, spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule for one axis: breakpoint-aligned panels, Gauss nodes."""
    edges = panel_edges(lo, hi, breaks, spec.refine)
    return panel_nodes(edges, spec.order)
