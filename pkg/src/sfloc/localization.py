"""Position, distance and atom-number estimators built on the dip profile.

Two measurement schemes are covered. In the scanning-dip scheme the sample
sits still while the standing-wave phase is swept, so the recorded trace is
the intensity profile translated by the unknown position. In the single-pass
scheme only one absolute intensity reading is available and the position is
narrowed down to the places where the profile meets that reading.

Synthetic traces use multiplicative Gaussian noise clamped at zero; two
samples in one trace add incoherently.
"""

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytic import intensity
from .errors import DipCountError, NoDipError
from .params import EnsembleParams
from .profile import (DEFAULT_GRID, IntensityProfile, half_depth_crossings, is_flat,
                      refine_minimum, width_map)

DETECTION_SIGMAS = 3.0


@dataclass
class ScanTrace:
    phases: np.ndarray
    intensities: np.ndarray
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        self.intensities = np.asarray(self.intensities, dtype=float)
        if self.phases.shape != self.intensities.shape:
            raise ValueError("phases and intensities differ in length")

    @property
    def spacing(self):
        return float(np.min(np.diff(self.phases)))

    def to_dict(self):
        return {"phases": self.phases.tolist(), "intensities": self.intensities.tolist(),
                "noise_sigma": self.noise_sigma, "seed": self.seed}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["phase", "intensity"])
        for ph, v in zip(self.phases, self.intensities):
            w.writerow([format(ph, ".17g"), format(v, ".17g")])
        return buf.getvalue()


@dataclass(frozen=True)
class PositionEstimate:
    kx_hat: float
    uncertainty: float
    auxiliary: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


@dataclass
class CandidateSet:
    intervals: list
    note: str = ""
    slopes: list = field(default_factory=list)

    @property
    def measure(self):
        """Total length of the candidate intervals."""
        return float(sum(hi - lo for lo, hi in self.intervals))

    def contains(self, kx):
        return any(lo <= kx <= hi for lo, hi in self.intervals)

    def to_dict(self):
        return {"intervals": [list(iv) for iv in self.intervals], "note": self.note,
                "slopes": list(self.slopes)}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls([tuple(iv) for iv in d["intervals"]], d.get("note", ""), d.get("slopes", []))


@dataclass(frozen=True)
class TimescaleCheck:
    passed: bool
    ratio: float
    steady_state_time: float
    flight_time: float


def _noisy(clean, noise_sigma, seed):
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(clean.shape)
    return np.clip(clean * (1.0 + noise_sigma * eps), 0.0, None)


def synthesize_scan(p: EnsembleParams, true_kx, phases, noise_sigma=0.0, seed=0) -> ScanTrace:
    """Trace recorded while the standing wave is shifted by ``phases``."""
    phases = np.asarray(phases, dtype=float)
    clean = intensity(p, true_kx + phases)
    return ScanTrace(phases, _noisy(clean, noise_sigma, seed), noise_sigma, seed)


def synthesize_pair_scan(p: EnsembleParams, kx_a, kx_b, phases, noise_sigma=0.0, seed=0,
                         p_b=None) -> ScanTrace:
    """Trace of two samples whose intensities add (no inter-sample coherence)."""
    phases = np.asarray(phases, dtype=float)
    clean = intensity(p, kx_a + phases) + intensity(p_b or p, kx_b + phases)
    return ScanTrace(phases, _noisy(clean, noise_sigma, seed), noise_sigma, seed)


def _check_detectable(trace):
    y = trace.intensities
    plateau = float(y.max())
    depth = plateau - float(y.min())
    if is_flat(y) or depth <= DETECTION_SIGMAS * trace.noise_sigma * plateau:
        raise NoDipError("no resolvable dip in trace")
    return plateau, depth


def find_dips(trace, min_gap=3):
    """Dips below the half-depth level as ``(i_min, left, right)`` tuples.

    Runs below the level that are closer than ``min_gap`` samples are merged
    (noise near the level can split one dip). Runs touching either end of
    the trace are dropped since their far flank is not observed.
    """
    x, y = trace.phases, trace.intensities
    plateau, _ = _check_detectable(trace)
    level = 0.5 * (plateau + float(y.min()))
    below = np.flatnonzero(y < level)
    runs = []
    for i in below:
        if runs and i - runs[-1][1] <= min_gap:
            runs[-1][1] = i
        else:
            runs.append([i, i])
    dips = []
    for a, b in runs:
        if a == 0 or b == len(y) - 1:
            continue
        i_min = a + int(np.argmin(y[a:b + 1]))
        if plateau - y[i_min] <= DETECTION_SIGMAS * trace.noise_sigma * plateau:
            continue
        left, right, _, _ = half_depth_crossings(x, y, i_min, level)
        dips.append((i_min, left, right))
    return dips


def scan_dip_estimate(trace: ScanTrace, p: EnsembleParams) -> PositionEstimate:
    """Sample position from the phase at which the scanned dip bottoms out.

    The position is returned in ``[0, pi/n)``: the profile repeats every
    ``pi/n`` so positions one node apart are indistinguishable.
    """
    x = trace.phases
    if x[-1] - x[0] < p.period * (1 - 1e-9):
        raise ValueError("trace must span at least one drive period")
    plateau, depth = _check_detectable(trace)
    dips = find_dips(trace)
    if not dips:
        raise NoDipError("no dip fully inside the trace")
    i0, left, right = min(dips, key=lambda d: trace.intensities[d[0]])
    phi_min = refine_minimum(x, trace.intensities, i0)
    half = np.pi / p.n_photons
    kx_hat = float(np.mod(p.node - phi_min, half))
    width = right - left
    uncertainty = trace.spacing
    if trace.noise_sigma > 0:
        snr = depth / (trace.noise_sigma * plateau)
        uncertainty = max(uncertainty, width / np.sqrt(snr))
    return PositionEstimate(kx_hat, float(uncertainty),
                            {"width": float(width), "depth": depth, "plateau": plateau})


def circular_distance(a, b, circumference):
    d = np.mod(a - b, circumference)
    return float(min(d, circumference - d))


def two_sample_distance(trace: ScanTrace, p: EnsembleParams):
    """Phase separation of two samples seen as two distinct dips in one trace.

    Returned as the shorter way round the ``pi/n`` profile period, so it lies
    in ``[0, pi/(2n)]``.
    """
    half = np.pi / p.n_photons
    centers = []
    tol = 4 * trace.spacing
    for i0, _, _ in find_dips(trace):
        c = np.mod(refine_minimum(trace.phases, trace.intensities, i0), half)
        if all(circular_distance(c, other, half) > tol for other in centers):
            centers.append(c)
    if len(centers) != 2:
        raise DipCountError(f"expected 2 resolvable dips, found {len(centers)}")
    return circular_distance(centers[0], centers[1], half)


def infer_atom_number(measured_width, p_known: EnsembleParams, candidates,
                      grid_points=DEFAULT_GRID):
    """Candidate N whose dip width is closest to ``measured_width``.

    ``p_known.n_atoms`` is ignored. Returns ``(n_hat, table)`` with table a
    list of ``(N, width)``; ties go to the smaller N.
    """
    candidates = sorted(int(n) for n in candidates)
    if not candidates:
        raise ValueError("empty candidate range")
    table = width_map(p_known, "atoms", candidates, grid_points)
    best, best_err = None, np.inf
    for n, w in table:
        if w is None:
            continue
        err = abs(w - measured_width)
        if err < best_err:
            best, best_err = n, err
    if best is None:
        best = candidates[0]
    return best, table


def _cross(x0, y0, x1, y1, level):
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def single_pass_candidates(i_measured, sigma_i, profile: IntensityProfile) -> CandidateSet:
    """Positions compatible with one intensity reading ``i_measured +- sigma_i``.

    Grid points inside the band are grouped into runs; each run is widened
    to the band edges by linear interpolation with its outside neighbours.
    Grid steps that jump clean across the band contribute the interpolated
    stretch between the two band edges. An empty set means the band misses
    the profile.
    """
    if i_measured < 0 or sigma_i < 0:
        raise ValueError("intensity and sigma must be nonnegative")
    x, y = profile.kx_grid, profile.values
    lo, hi = i_measured - sigma_i, i_measured + sigma_i
    inside = (y >= lo) & (y <= hi)

    def edge(j_out, j_in):
        level = lo if y[j_out] < lo else hi
        return _cross(x[j_in], y[j_in], x[j_out], y[j_out], level)

    intervals = []
    j, n = 0, len(y)
    while j < n:
        if inside[j]:
            k = j
            while k + 1 < n and inside[k + 1]:
                k += 1
            a = edge(j - 1, j) if j > 0 else x[j]
            b = edge(k + 1, k) if k + 1 < n else x[k]
            intervals.append((float(a), float(b)))
            j = k + 1
        else:
            if j + 1 < n and not inside[j + 1] and (y[j] - lo) * (y[j + 1] - lo) < 0 \
                    and (y[j] - hi) * (y[j + 1] - hi) < 0:
                a = _cross(x[j], y[j], x[j + 1], y[j + 1], lo)
                b = _cross(x[j], y[j], x[j + 1], y[j + 1], hi)
                intervals.append((float(min(a, b)), float(max(a, b))))
            j += 1

    intervals.sort()
    slopes = []
    for a, b in intervals:
        mask = (x >= a - profile.spacing) & (x <= b + profile.spacing)
        xs, ys = x[mask], y[mask]
        slopes.append(float(np.max(np.abs(np.diff(ys) / np.diff(xs)))) if xs.size > 1 else 0.0)
    note = (f"band {i_measured:.6g} +- {sigma_i:.6g}; {len(intervals)} interval(s), "
            f"steeper flanks give narrower intervals (half-width ~ sigma / slope)")
    return CandidateSet(intervals, note, slopes)


def timescale_check(p: EnsembleParams, flight_time, margin=100.0) -> TimescaleCheck:
    """Compare flight time with the collective steady-state time ``1/(N gamma)``.

    ``p.gamma`` must be in inverse seconds here.
    """
    if not flight_time > 0:
        raise ValueError("flight_time must be positive")
    tau_s = 1.0 / (p.n_atoms * p.gamma)
    ratio = flight_time / tau_s
    return TimescaleCheck(ratio >= margin, float(ratio), tau_s, float(flight_time))

