"""Collective resonance fluorescence of a small atomic ensemble in a standing
wave, and sub-wavelength localization schemes built on its intensity dip."""

from .analytic import DriveCoefficients, drive_coeffs, intensity, log_diag_coeff, log_weight
from .collective import (averaged_dd, chi_pair, chi_pair_expanded, omega_pair,
                         omega_pair_expanded, rabi_at, static_dd)
from .errors import (DipCountError, NoDipError, OracleCapError, PoleError,
                     SingularSteadyStateError)
from .gammafn import complex_log_gamma
from .localization import (CandidateSet, PositionEstimate, ScanTrace, infer_atom_number,
                           scan_dip_estimate, single_pass_candidates, synthesize_pair_scan,
                           synthesize_scan, timescale_check, two_sample_distance)
from .oracle import build_liouvillian, build_operators, intensity_oracle, steady_state
from .params import EnsembleParams, PairGeometry
from .profile import DipFeature, IntensityProfile, dip_feature, evaluate_profile, width_map

__version__ = "0.1.0"
