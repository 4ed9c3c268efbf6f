from dataclasses import asdict, dataclass, replace

import numpy as np


@dataclass(frozen=True)
class PairGeometry:
    """Separation ``kr = k * r_jl`` and dipole/separation angle ``xi`` (radians)."""

    kr: float
    xi: float

    def __post_init__(self):
        if not self.kr > 0:
            raise ValueError(f"kr must be positive, got {self.kr}")
        if not np.isfinite(self.xi):
            raise ValueError(f"xi must be finite, got {self.xi}")


@dataclass(frozen=True)
class EnsembleParams:
    """Point-sample ensemble driven by a standing wave.

    All rates are in the same unit as ``gamma`` (the single-atom half decay
    rate); with the default ``gamma = 1`` they read as multiples of gamma.

    Attributes
    ----------
    n_atoms : int
        Number of two-level atoms N.
    rabi : float
        Standing-wave Rabi amplitude at an antinode.
    detuning : float
        Atomic transition minus laser frequency.
    dipole_shift : float
        Pairwise dipole-dipole shift, taken identical for all pairs.
    gamma : float
        Single-atom half decay rate.
    n_photons : int
        Multiphoton order; the spatial period of the drive is ``2 pi / n``.
    """

    n_atoms: int
    rabi: float
    detuning: float = 0.0
    dipole_shift: float = 0.0
    gamma: float = 1.0
    n_photons: int = 1

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        if int(self.n_photons) != self.n_photons or self.n_photons < 1:
            raise ValueError(f"n_photons must be a positive integer, got {self.n_photons}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.rabi >= 0:
            raise ValueError(f"rabi must be nonnegative, got {self.rabi}")
        for name in ("rabi", "detuning", "dipole_shift", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        object.__setattr__(self, "n_photons", int(self.n_photons))

    @classmethod
    def from_scaled(cls, n_atoms, rabi_per_n, detuning_per_n=0.0, dipole_shift=0.0,
                    gamma=1.0, n_photons=1):
        """Build from the scaled axes ``Omega/(N gamma)``, ``Delta/(N gamma)``.

        ``dipole_shift`` is given in units of gamma, unscaled by N.
        """
        ng = n_atoms * gamma
        return cls(n_atoms=n_atoms, rabi=rabi_per_n * ng, detuning=detuning_per_n * ng,
                   dipole_shift=dipole_shift * gamma, gamma=gamma, n_photons=n_photons)

    @property
    def period(self):
        """Spatial period of the Rabi frequency in kx."""
        return 2.0 * np.pi / self.n_photons

    @property
    def node(self):
        """First node of the drive, ``kx = pi / (2 n)``."""
        return np.pi / (2.0 * self.n_photons)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)
