"""Principal-branch complex log-gamma.

Lanczos approximation (g = 607/128, 15 terms) for ``Re z >= 0.5`` and the
reflection formula below that. Matches the branch convention of
``mpmath.loggamma`` / ``scipy.special.loggamma``: analytic continuation of
the real ``log Gamma`` with a cut along the negative real axis.
"""

import numpy as np

from .errors import PoleError

_G = 607.0 / 128.0
_COEFFS = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)


def _lanczos(z):
    x = z - 1.0
    k = np.arange(1, _COEFFS.size)
    series = _COEFFS[0] + np.sum(_COEFFS[1:] / (x[..., None] + k), axis=-1)
    t = x + _G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * np.log(t) - t + np.log(series)


def _log_sin_pi_upper(z):
    # Continuous branch of log(sin(pi z)) for Im z >= 0. The periodic factor is
    # evaluated at z minus the nearest integer so expm1 sees a small argument
    # next to the poles.
    frac = z - np.round(z.real)
    return -1j * np.pi * z + np.log(-np.expm1(2j * np.pi * frac)) - np.log(2.0) + 0.5j * np.pi


def complex_log_gamma(z):
    """Return ``log Gamma(z)`` on the principal branch.

    Accepts a scalar or array; scalar input gives a Python ``complex``.
    Raises :class:`PoleError` at nonpositive integers.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    re, im = z.real, z.imag
    if np.any((im == 0) & (re <= 0) & (re == np.round(re))):
        raise PoleError("log-gamma pole at a nonpositive integer")

    out = np.empty_like(z)
    right = re >= 0.5
    out[right] = _lanczos(z[right])

    left = ~right
    if np.any(left):
        zl = z[left]
        # Work in the closed upper half plane, conjugate back afterwards.
        flip = zl.imag < 0
        zu = np.where(flip, zl.conj(), zl)
        val = _LOG_PI - _log_sin_pi_upper(zu) - _lanczos(1.0 - zu)
        out[left] = np.where(flip, val.conj(), val)

    return complex(out[0]) if scalar else out.reshape(np.shape(z))
