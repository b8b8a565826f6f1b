"""Embedded example systems used by the CLI and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .bundles import Potential
from .graphs import build_graph, generate


def two_vertex():
    """Single edge, b = 1, m = 1, scalar w = (0, 1)."""
    g = build_graph([("a", "b", 1.0)])
    return g, Potential.scalar([0.0, 1.0])


def four_cycle():
    """4-cycle with b = m = 1 and zero potential."""
    g = generate("cycle", n=4)
    return g, Potential.scalar(np.zeros(4))


def star5():
    """Star with 5 leaves, zero potential."""
    g = generate("star", leaves=5)
    return g, Potential.scalar(np.zeros(g.n))


def lattice_box_2d():
    """2-dimensional lattice box of side 3, zero potential."""
    g = generate("lattice_box", l=2, side=3)
    return g, Potential.scalar(np.zeros(g.n))


def weyl_path():
    """Path on 3 vertices with m = (1, 2, 3) and w = -ln m.

    The classical partition sum at beta = 1 is sum m(x) = 6.
    """
    g = build_graph(
        [("a", "b", 1.0), ("b", "c", 1.0)],
        measure=[("a", 1.0), ("b", 2.0), ("c", 3.0)],
    )
    return g, Potential.scalar(-np.log(g.measure))


PRESETS = {
    "two_vertex": two_vertex,
    "four_cycle": four_cycle,
    "star": star5,
    "lattice_box": lattice_box_2d,
    "weyl_path": weyl_path,
}
