"""Closed-form steady-state collective fluorescence ``<S+ S->``.

The steady state on the symmetric Dicke manifold is a double series in
powers of ``S-`` and ``S+``; only its diagonal coefficients survive the
trace, so the intensity is a ratio of two single sums over ``n = 0..N``::

    I = sum_{k=1..N} a_{k-1} |alpha|^{-2(k-1)} w_k / sum_{n=0..N} a_n |alpha|^{-2n} w_n

with ``a_n = |Gamma(1+n+beta) / Gamma(1+beta)|^2 / (n!)^2`` and the Dicke
trace weights ``w_n = (N+n+1)! (n!)^2 / ((N-n)! (2n+1)!)``. Both sums are
evaluated in log space because ``w_n`` overflows doubles by N ~ 100 and
``|alpha|^{-2n}`` diverges near the field nodes.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .collective import rabi_at
from .gammafn import complex_log_gamma
from .params import EnsembleParams


@dataclass(frozen=True)
class DriveCoefficients:
    alpha: complex
    beta: complex
    delta_tilde: float


def drive_coeffs(p: EnsembleParams, kx) -> DriveCoefficients:
    """Complex drive and detuning coefficients at phase ``kx``."""
    denom = complex(p.gamma, p.dipole_shift)
    delta_tilde = p.detuning + p.dipole_shift
    return DriveCoefficients(
        alpha=1j * rabi_at(p, kx) / denom,
        beta=1j * delta_tilde / denom,
        delta_tilde=delta_tilde,
    )


def log_diag_coeff(n, beta):
    """``ln a_nn`` for index ``n`` (scalar or array) and complex ``beta``."""
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("coefficient index must be nonnegative")
    ratio = complex_log_gamma(1.0 + n + beta) - complex_log_gamma(1.0 + beta)
    out = 2.0 * np.real(ratio) - 2.0 * gammaln(n + 1.0)
    return float(out) if out.ndim == 0 else out


def log_weight(n_atoms, n):
    """``ln[(N+n+1)! (n!)^2 / ((N-n)! (2n+1)!)]`` for ``0 <= n <= N``."""
    n = np.asarray(n)
    if np.any((n < 0) | (n > n_atoms)):
        raise IndexError(f"weight index out of range 0..{n_atoms}")
    out = (gammaln(n_atoms + n + 2.0) + 2.0 * gammaln(n + 1.0)
           - gammaln(n_atoms - n + 1.0) - gammaln(2.0 * n + 2.0))
    return float(out) if out.ndim == 0 else out


def _series_logs(p):
    # Position-independent parts of the log terms: ln a_nn + ln w_n, ln a_{k-1} + ln w_k.
    n = np.arange(p.n_atoms + 1)
    beta = drive_coeffs(p, 0.0).beta
    la = log_diag_coeff(n, beta)
    lw = log_weight(p.n_atoms, n)
    return la + lw, la[:-1] + lw[1:]


def intensity(p: EnsembleParams, kx):
    """Steady-state ``<S+ S->`` at phase(s) ``kx``.

    Returns a float for scalar ``kx`` and an array otherwise. Nodes of the
    drive give exactly 0.
    """
    kx_arr = np.asarray(kx, dtype=float)
    rabi = np.atleast_1d(rabi_at(p, kx_arr))
    den_base, num_base = _series_logs(p)

    out = np.zeros(rabi.shape)
    driven = rabi != 0.0
    if np.any(driven):
        log_alpha = np.log(np.abs(rabi[driven])) - 0.5 * np.log(p.gamma**2 + p.dipole_shift**2)
        n = np.arange(p.n_atoms + 1)
        den = den_base - 2.0 * np.outer(log_alpha, n)
        num = num_base - 2.0 * np.outer(log_alpha, n[:-1])
        shift = np.maximum(den.max(axis=1), num.max(axis=1))[:, None]
        out[driven] = np.exp(num - shift).sum(axis=1) / np.exp(den - shift).sum(axis=1)

    return float(out[0]) if kx_arr.ndim == 0 else out.reshape(kx_arr.shape)
