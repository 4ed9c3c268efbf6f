"""Pairwise collective coefficients and the standing-wave Rabi frequency.

The pair formulas take the dimensionless separation ``kr = omega r / c`` and
the angle ``xi`` between the (parallel) dipoles and the separation vector.
Rates come out in the unit of ``gamma``.
"""

import numpy as np

from .params import PairGeometry

# Below this kr the cancelling combination in chi_pair is summed as a series.
_SERIES_CUTOFF = 0.5


def _cos_minus_sin(x):
    """``cos(x)/x**2 - sin(x)/x**3`` without cancellation at small x."""
    if x >= _SERIES_CUTOFF:
        return np.cos(x) / x**2 - np.sin(x) / x**3
    # sum_{m>=1} (-1)^m 2m x^(2m-2) / (2m+1)!
    total, term, m = 0.0, -1.0 / 3.0, 1
    while abs(term) > 1e-18 * max(abs(total), 1e-300):
        total += term
        term *= -x * x * (m + 1) / (m * (2 * m + 2) * (2 * m + 3))
        m += 1
    return total


def chi_pair(g: PairGeometry, gamma=1.0):
    """Collective cross-decay rate chi_jl."""
    x = g.kr
    c2 = np.cos(g.xi) ** 2
    return 1.5 * gamma * ((1 - c2) * np.sin(x) / x + (1 - 3 * c2) * _cos_minus_sin(x))


def omega_pair(g: PairGeometry, gamma=1.0):
    """Collective coherent (dipole-dipole) coupling Omega_jl."""
    x = g.kr
    c2 = np.cos(g.xi) ** 2
    return 0.75 * gamma * ((c2 - 1) * np.cos(x) / x
                           + (1 - 3 * c2) * (np.sin(x) / x**2 + np.cos(x) / x**3))


def chi_pair_expanded(g: PairGeometry, gamma=1.0):
    """Second-order small-kr expansion of :func:`chi_pair`."""
    x = g.kr
    c2 = np.cos(g.xi) ** 2
    return gamma * (1 - 0.2 * x**2 * (1 - 0.5 * c2))


def omega_pair_expanded(g: PairGeometry, gamma=1.0):
    """Small-kr Laurent expansion of :func:`omega_pair` through O(kr)."""
    x = g.kr
    c2 = np.cos(g.xi) ** 2
    return 3 * gamma * ((c2 - 1) * (2 / x - x)
                        + (1 - 3 * c2) * (1 / x - x / 4 + 2 / x**3)) / 8


def static_dd(g: PairGeometry, gamma=1.0):
    """Near-field static dipole-dipole potential, the 1/kr^3 limit of omega_pair."""
    c2 = np.cos(g.xi) ** 2
    return 3 * gamma * (1 - 3 * c2) / (4 * g.kr**3)


def averaged_dd(kr, gamma=1.0):
    """Orientation-averaged dipole-dipole coupling ``-gamma / (2 kr)``."""
    if not kr > 0:
        raise ValueError(f"kr must be positive, got {kr}")
    return -gamma / (2 * kr)


def rabi_at(p, kx):
    """Local Rabi frequency ``Omega cos(n kx)`` at standing-wave phase ``kx``.

    Phases that round to an odd multiple of ``pi/2`` (after multiplying by the
    photon order) return exactly zero, so the float image of a node is a node.
    """
    phase = p.n_photons * np.asarray(kx, dtype=float)
    r = np.mod(phase - 0.5 * np.pi, np.pi)
    off = np.minimum(r, np.pi - r)
    tol = 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(phase))
    out = np.where(off <= tol, 0.0, p.rabi * np.cos(phase))
    return float(out) if out.ndim == 0 else out
