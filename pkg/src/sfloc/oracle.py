"""Brute-force steady state on the symmetric Dicke manifold.

Dense column-stacked Liouvillian, trace constraint by row replacement and a
direct solve. This is the independent reference for
:func:`sfloc.analytic.intensity`; it is meant for small N only.

Sign convention
---------------
The coherent part is ``-i[H, rho]`` with::

    H = (Delta + Omega_d) S_z + Omega(x) (S+ + S-) + dipole_sign * Omega_d S+ S-

and the dissipator is ``gamma (2 S- rho S+ - S+ S- rho - rho S+ S-)``. The
closed-form intensity is reproduced exactly only for ``dipole_sign = +1``,
which is the default. ``dipole_sign = -1`` is kept so the disagreement of
the opposite sign can be demonstrated; it differs already at N = 1.
"""

from dataclasses import dataclass

import numpy as np

from .collective import rabi_at
from .errors import OracleCapError, SingularSteadyStateError
from .params import EnsembleParams

ORACLE_CAP = 20


@dataclass(frozen=True)
class DickeOperators:
    """Collective spin matrices in the basis ``l = -s, ..., s`` (ascending)."""

    dim: int
    s: float
    s_plus: np.ndarray
    s_minus: np.ndarray
    s_z: np.ndarray


@dataclass
class SteadyStateSolution:
    rho: np.ndarray
    residual_norm: float


def build_operators(n_atoms, cap=ORACLE_CAP) -> DickeOperators:
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    if n_atoms > cap:
        raise OracleCapError(f"N = {n_atoms} exceeds the oracle cap {cap}")
    s = n_atoms / 2.0
    l = np.arange(n_atoms + 1) - s
    sp = np.diag(np.sqrt((s - l[:-1]) * (s + l[:-1] + 1)), k=-1).astype(complex)
    return DickeOperators(dim=n_atoms + 1, s=s, s_plus=sp, s_minus=sp.conj().T,
                          s_z=np.diag(l).astype(complex))


def _spre(a):
    return np.kron(np.eye(a.shape[0]), a)


def _spost(a):
    return np.kron(a.T, np.eye(a.shape[0]))


def build_liouvillian(p: EnsembleParams, kx, dipole_sign=1, cap=ORACLE_CAP):
    """Superoperator ``L`` with ``vec(d rho/dt) = L vec(rho)`` (column stacking)."""
    ops = build_operators(p.n_atoms, cap=cap)
    sp, sm = ops.s_plus, ops.s_minus
    spsm = sp @ sm
    h = ((p.detuning + p.dipole_shift) * ops.s_z + rabi_at(p, kx) * (sp + sm)
         + dipole_sign * p.dipole_shift * spsm)
    coherent = -1j * (_spre(h) - _spost(h))
    dissipative = p.gamma * (2.0 * np.kron(sp.T, sm) - _spre(spsm) - _spost(spsm))
    return coherent + dissipative


def steady_state(liouvillian) -> SteadyStateSolution:
    """Unit-trace null vector of ``liouvillian``."""
    d2 = liouvillian.shape[0]
    d = int(round(np.sqrt(d2)))
    a = np.array(liouvillian, dtype=complex)
    b = np.zeros(d2, dtype=complex)
    a[0, :] = np.eye(d).reshape(-1, order="F")
    b[0] = 1.0
    try:
        vec = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSteadyStateError("degenerate steady-state manifold") from exc
    if not np.all(np.isfinite(vec)):
        raise SingularSteadyStateError("non-finite steady state")
    rho = vec.reshape(d, d, order="F")
    residual = float(np.linalg.norm(liouvillian @ rho.reshape(-1, order="F")))
    return SteadyStateSolution(rho=rho, residual_norm=residual)


def intensity_oracle(p: EnsembleParams, kx, dipole_sign=1, cap=ORACLE_CAP):
    """``Tr(rho_s S+ S-)`` from the brute-force steady state."""
    ops = build_operators(p.n_atoms, cap=cap)
    sol = steady_state(build_liouvillian(p, kx, dipole_sign=dipole_sign, cap=cap))
    value = np.trace(sol.rho @ ops.s_plus @ ops.s_minus)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise SingularSteadyStateError(f"complex expectation value {value}")
    return float(value.real)
