"""Panelized Gauss-Legendre quadrature helpers.

All integrals in this package are smooth on each panel, so composite
Gauss-Legendre with a modest node count per panel is spectrally accurate.
Oscillatory Airy integrands are handled by shrinking the panel width below
the local oscillation wavelength.
"""
import functools

import numpy as np


@functools.lru_cache(maxsize=32)
def _base_rule(n_nodes):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    return x, w


def panel_rule(a, b, n_panels, n_nodes=12):
    """Nodes and weights for composite Gauss-Legendre on [a, b].

    Returns
    -------
    (nodes, weights) : two 1-D float arrays of length n_panels * n_nodes.
    """
    if not b > a:
        raise ValueError("empty interval")
    x, w = _base_rule(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def rule_for_frequency(a, b, freq, n_nodes=12, max_width=0.5):
    """Composite rule on [a, b] resolving oscillations of angular frequency freq.

    Panel width is kept below roughly half an oscillation period so that
    n_nodes Gauss points per panel integrate the wave to near machine
    precision.
    """
    width = max_width
    if freq > 0.0:
        width = min(max_width, np.pi / freq)
    n_panels = max(1, int(np.ceil((b - a) / width)))
    return panel_rule(a, b, n_panels, n_nodes)


def gauss_hermite_like_window(variance, center=0.0, n_sigma=9.0):
    """Integration window covering a Gaussian factor of given variance."""
    half = n_sigma * np.sqrt(variance)
    return center - half, center + half
