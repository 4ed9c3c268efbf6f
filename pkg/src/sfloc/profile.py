"""Intensity profiles over one standing-wave period and their dip geometry."""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .analytic import intensity
from .errors import NoDipError
from .params import EnsembleParams

DEFAULT_GRID = 2001
AXES = ("detuning", "atoms", "rabi")


def _fmt(v):
    return format(float(v), ".17g")


@dataclass
class IntensityProfile:
    params: EnsembleParams
    kx_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.kx_grid = np.asarray(self.kx_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.kx_grid.shape != self.values.shape or self.kx_grid.size < 3:
            raise ValueError("grid and values must have equal length >= 3")

    @property
    def normalized_values(self):
        return self.values / self.params.n_atoms**2

    @property
    def spacing(self):
        return float(self.kx_grid[1] - self.kx_grid[0])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kx", "intensity", "intensity_per_n2"])
        for row in zip(self.kx_grid, self.values, self.normalized_values):
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({
            "params": self.params.to_dict(),
            "kx": self.kx_grid.tolist(),
            "intensity": self.values.tolist(),
            "intensity_per_n2": self.normalized_values.tolist(),
        }, indent=1)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(EnsembleParams(**d["params"]), d["kx"], d["intensity"])


@dataclass(frozen=True)
class DipFeature:
    center: float
    width: float
    depth: float
    plateau: float
    minimum: float
    slope_max: float


def period_grid(p: EnsembleParams, grid_points=DEFAULT_GRID):
    """Uniform grid of ``grid_points`` spanning one period and containing the node."""
    if grid_points < 3:
        raise ValueError("need at least 3 grid points")
    h = p.period / (grid_points - 1)
    j0 = round((grid_points - 1) / 4)
    offset = p.node - h * j0
    if abs(offset) < 1e-9 * h:
        offset = 0.0
    kx = offset + h * np.arange(grid_points)
    kx[j0] = p.node
    return kx


def evaluate_profile(p: EnsembleParams, grid_points=DEFAULT_GRID) -> IntensityProfile:
    kx = period_grid(p, grid_points)
    return IntensityProfile(p, kx, intensity(p, kx))


def refine_minimum(x, y, i0):
    """Vertex of a least-squares parabola through up to 5 points around ``i0``."""
    lo, hi = max(i0 - 2, 0), min(i0 + 3, len(x))
    if hi - lo < 3:
        return float(x[i0])
    xs = x[lo:hi] - x[i0]
    a, b, _ = np.polyfit(xs, y[lo:hi], 2)
    if a <= 0:
        return float(x[i0])
    vertex = -b / (2 * a)
    if not xs[0] <= vertex <= xs[-1]:
        return float(x[i0])
    return float(x[i0] + vertex)


def _crossing(x0, y0, x1, y1, level):
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def half_depth_crossings(x, y, i0, level):
    """Left and right points where ``y`` rises back to ``level`` around ``i0``."""
    j = i0
    while j > 0 and y[j] < level:
        j -= 1
    if y[j] < level:
        raise NoDipError("dip is not bounded on the left within the grid")
    left = _crossing(x[j], y[j], x[j + 1], y[j + 1], level)
    jl = j
    j = i0
    while j < len(y) - 1 and y[j] < level:
        j += 1
    if y[j] < level:
        raise NoDipError("dip is not bounded on the right within the grid")
    right = _crossing(x[j - 1], y[j - 1], x[j], y[j], level)
    return left, right, jl, j


def is_flat(values, rtol=1e-12):
    top, bottom = float(np.max(values)), float(np.min(values))
    return top - bottom <= rtol * max(abs(top), abs(bottom)) or top <= 0


def dip_feature(profile: IntensityProfile) -> DipFeature:
    """Half-depth geometry of the deepest dip in ``profile``."""
    x, y = profile.kx_grid, profile.values
    if is_flat(y):
        raise NoDipError("profile is flat")
    plateau, minimum = float(y.max()), float(y.min())
    i0 = int(np.argmin(y))
    level = 0.5 * (plateau + minimum)
    left, right, jl, jr = half_depth_crossings(x, y, i0, level)
    seg_x, seg_y = x[jl:jr + 1], y[jl:jr + 1]
    slope = np.abs(np.diff(seg_y) / np.diff(seg_x))
    return DipFeature(
        center=refine_minimum(x, y, i0),
        width=right - left,
        depth=plateau - minimum,
        plateau=plateau,
        minimum=minimum,
        slope_max=float(slope.max()),
    )


def _with_sample(p, axis, sample):
    if axis == "detuning":
        return p.replace(detuning=float(sample))
    if axis == "rabi":
        return p.replace(rabi=float(sample))
    if axis == "atoms":
        return p.replace(n_atoms=int(sample))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")


def sweep_profiles(p_base, axis, samples, grid_points=DEFAULT_GRID):
    """Profiles for each sample along ``axis``, other parameters frozen."""
    if len(samples) == 0:
        raise ValueError("no sweep samples given")
    return [evaluate_profile(_with_sample(p_base, axis, s), grid_points) for s in samples]


def width_map(p_base, axis, samples, grid_points=DEFAULT_GRID):
    """``[(sample, width or None), ...]`` along a parameter axis."""
    out = []
    for s, prof in zip(samples, sweep_profiles(p_base, axis, samples, grid_points)):
        try:
            out.append((s, dip_feature(prof).width))
        except NoDipError:
            out.append((s, None))
    return out


def sweep_to_csv(axis, samples, profiles):
    """Row-major ``kx,<axis>,intensity_per_n2`` table for surface plots."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kx", axis, "intensity_per_n2"])
    for s, prof in zip(samples, profiles):
        for kx, v in zip(prof.kx_grid, prof.normalized_values):
            w.writerow([_fmt(kx), _fmt(s), _fmt(v)])
    return buf.getvalue()
