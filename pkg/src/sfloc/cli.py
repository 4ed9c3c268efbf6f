"""Command-line entry point.

Rate-like flags (``--rabi``, ``--detuning``, ``--dipole``) are in units of the
single-atom half decay rate gamma. Phases given as ``--true-pos`` /
``--second-pos`` are in units of pi.

Exit codes: 0 ok, 1 oracle deviation breach, 2 configuration error,
3 numerical failure, 4 estimator failure (no dip / wrong dip count).
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

import numpy as np

from . import collective
from .analytic import intensity
from .errors import DipCountError, NoDipError, OracleCapError, PoleError, SingularSteadyStateError
from .localization import (scan_dip_estimate, single_pass_candidates, synthesize_pair_scan,
                           synthesize_scan, timescale_check, two_sample_distance)
from .oracle import ORACLE_CAP, intensity_oracle
from .params import EnsembleParams, PairGeometry
from .profile import (AXES, DEFAULT_GRID, dip_feature, evaluate_profile, period_grid,
                      sweep_profiles, sweep_to_csv)

ORACLE_RTOL = 1e-8


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(sp, params=True):
    sp.add_argument("--config", help="JSON file with the same keys as the flags")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--out", help="output path (default: stdout)")
    if params:
        sp.add_argument("--atoms", type=int, help="number of atoms N")
        sp.add_argument("--rabi", type=float, help="Rabi amplitude Omega / gamma")
        sp.add_argument("--detuning", type=float, help="detuning Delta / gamma")
        sp.add_argument("--dipole", type=float, help="dipole-dipole shift Omega_d / gamma")
        sp.add_argument("--photons", type=int, help="multiphoton order n (default 1)")


def build_parser():
    parser = _Parser(prog="sfloc", description=__doc__.split("\n\n")[0],
                     argument_default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("profile", help="intensity profile over one period",
                        argument_default=argparse.SUPPRESS)
    _add_common(sp)
    sp.add_argument("--grid", type=int, help=f"grid points per period (default {DEFAULT_GRID})")
    sp.add_argument("--sweep", choices=AXES, help="sweep one parameter (units as its flag)")
    sp.add_argument("--samples", type=float, nargs="+", help="values along the sweep axis")

    sp = sub.add_parser("oracle", help="analytic vs brute-force steady state",
                        argument_default=argparse.SUPPRESS)
    _add_common(sp)
    sp.add_argument("--grid", type=int, help="kx grid points for the per-point table")
    sp.add_argument("--draws", type=int, help="random draws per N (default 50)")
    sp.add_argument("--max-atoms", type=int, help="largest N in the random suite (default 6)")
    sp.add_argument("--seed", type=int, help="RNG seed (default 0)")

    sp = sub.add_parser("scan", help="scanning-dip localization on a synthetic trace",
                        argument_default=argparse.SUPPRESS)
    _add_common(sp)
    sp.add_argument("--true-pos", type=float, help="sample position kx / pi")
    sp.add_argument("--second-pos", type=float, help="second sample position kx / pi")
    sp.add_argument("--noise", type=float, help="relative noise sigma (default 0)")
    sp.add_argument("--seed", type=int, help="RNG seed (default 0)")
    sp.add_argument("--grid", type=int, help=f"phase offsets per period (default {DEFAULT_GRID})")

    sp = sub.add_parser("locate", help="single-pass candidate positions",
                        argument_default=argparse.SUPPRESS)
    _add_common(sp)
    sp.add_argument("--intensity", type=float, help="measured intensity <S+S->")
    sp.add_argument("--sigma", type=float, help="measurement uncertainty (default 0)")
    sp.add_argument("--grid", type=int, help=f"profile grid points (default {DEFAULT_GRID})")
    sp.add_argument("--flight-time", type=float, help="time of flight in seconds")
    sp.add_argument("--gamma-si", type=float, help="gamma in 1/s for the timescale check")

    sp = sub.add_parser("coeffs", help="pairwise collective coefficients",
                        argument_default=argparse.SUPPRESS)
    _add_common(sp, params=False)
    sp.add_argument("--kr", type=float, help="dimensionless separation k r")
    sp.add_argument("--xi", type=float, help="dipole/separation angle in radians (default 0)")
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def load_config(argv):
    """Parse ``argv`` and merge a ``--config`` JSON file underneath the flags."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command", None)
    if command is None:
        raise ConfigError("a subcommand is required")
    cfg = {}
    path = ns.pop("config", None)
    if path is not None:
        allowed = {a.dest for a in _subparser(parser, command)._actions} - {"help", "config"}
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in raw.items():
            key = key.replace("-", "_")
            if key not in allowed:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = value
    cfg.update(ns)
    cfg.setdefault("format", "csv" if command == "profile" else "json")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"bad format {cfg['format']!r}")
    return command, cfg


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ConfigError(f"missing required option(s): {flags}")


def _params(cfg, **defaults):
    for k, v in defaults.items():
        cfg.setdefault(k, v)
    _require(cfg, "atoms", "rabi", "detuning", "dipole")
    try:
        return EnsembleParams(n_atoms=cfg["atoms"], rabi=float(cfg["rabi"]),
                              detuning=float(cfg["detuning"]),
                              dipole_shift=float(cfg["dipole"]),
                              n_photons=cfg.get("photons", 1))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _grid(cfg, default=DEFAULT_GRID):
    g = int(cfg.get("grid", default))
    if g < 3:
        raise ConfigError("--grid must be at least 3")
    return g


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _dumps(obj):
    return json.dumps(obj, indent=1, default=float) + "\n"


def cmd_profile(cfg):
    p = _params(cfg)
    grid = _grid(cfg)
    if "sweep" not in cfg:
        prof = evaluate_profile(p, grid)
        return prof.to_csv() if cfg["format"] == "csv" else prof.to_json() + "\n"
    _require(cfg, "samples")
    axis, samples = cfg["sweep"], list(cfg["samples"])
    if axis not in AXES or not samples:
        raise ConfigError("--sweep needs a known axis and at least one sample")
    try:
        profiles = sweep_profiles(p, axis, samples, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["format"] == "csv":
        return sweep_to_csv(axis, samples, profiles)
    widths = []
    for prof in profiles:
        try:
            widths.append(dip_feature(prof).width)
        except NoDipError:
            widths.append(None)
    return _dumps({
        "params": p.to_dict(), "axis": axis, "samples": samples,
        "kx": profiles[0].kx_grid.tolist(),
        "intensity_per_n2": [prof.normalized_values.tolist() for prof in profiles],
        "widths": widths,
    })


def _rel_dev(a, o):
    return abs(a - o) / max(abs(a), 1e-30)


def random_oracle_cases(max_atoms=6, draws=50, seed=0):
    """Deterministic random parameter tuples for the equivalence suite."""
    rng = np.random.default_rng(seed)
    for n in range(1, max_atoms + 1):
        for _ in range(draws):
            rabi, det, dip, kx = (rng.uniform(0.1, 20.0), rng.uniform(-20.0, 20.0),
                                  rng.uniform(-10.0, 10.0), rng.uniform(0.0, np.pi))
            yield EnsembleParams(n, rabi, det, dip), float(kx)


def cmd_oracle(cfg):
    rows = []
    if "atoms" in cfg:
        if int(cfg["atoms"]) > ORACLE_CAP:
            raise ConfigError(f"--atoms exceeds the oracle cap {ORACLE_CAP}")
        n = int(cfg["atoms"])
        p = _params(cfg, rabi=50.0 * n, detuning=0.0, dipole=-5.0)
        cases = [(p, float(kx)) for kx in period_grid(p, _grid(cfg, 101))]
    else:
        max_atoms = int(cfg.get("max_atoms", 6))
        if max_atoms > ORACLE_CAP or max_atoms < 1:
            raise ConfigError(f"--max-atoms must be in 1..{ORACLE_CAP}")
        cases = random_oracle_cases(max_atoms, int(cfg.get("draws", 50)), int(cfg.get("seed", 0)))
    for p, kx in cases:
        a, o = intensity(p, kx), intensity_oracle(p, kx)
        rows.append((p, kx, a, o, _rel_dev(a, o)))
    worst = max(rows, key=lambda r: r[4])
    print(f"max relative deviation: {worst[4]:.3e} over {len(rows)} cases", file=sys.stderr)
    breach = worst[4] > ORACLE_RTOL
    if breach:
        p, kx = worst[0], worst[1]
        print(f"deviation breach at N={p.n_atoms} rabi={p.rabi!r} detuning={p.detuning!r} "
              f"dipole={p.dipole_shift!r} kx={kx!r}", file=sys.stderr)
    header = ["n_atoms", "rabi", "detuning", "dipole_shift", "kx", "analytic", "oracle", "rel_dev"]
    table = [(p.n_atoms, p.rabi, p.detuning, p.dipole_shift, kx, a, o, d)
             for p, kx, a, o, d in rows]
    if cfg["format"] == "csv":
        text = _table(header, table)
    else:
        text = _dumps({"max_rel_dev": worst[4], "tolerance": ORACLE_RTOL, "passed": not breach,
                       "cases": [dict(zip(header, r)) for r in table]})
    return text, 1 if breach else 0


def cmd_scan(cfg):
    p = _params(cfg)
    _require(cfg, "true_pos")
    noise, seed = float(cfg.get("noise", 0.0)), int(cfg.get("seed", 0))
    if noise < 0:
        raise ConfigError("--noise must be nonnegative")
    phases = np.linspace(0.0, p.period, _grid(cfg))
    true_kx = np.pi * float(cfg["true_pos"])
    result = {"true_kx": true_kx}
    if "second_pos" in cfg:
        second = np.pi * float(cfg["second_pos"])
        trace = synthesize_pair_scan(p, true_kx, second, phases, noise, seed)
        result["second_kx"] = second
        d = two_sample_distance(trace, p)
        result["distance"] = d
        result["distance_over_pi"] = d / np.pi
    else:
        trace = synthesize_scan(p, true_kx, phases, noise, seed)
    est = scan_dip_estimate(trace, p)
    result["estimate"] = est.to_dict()
    result["kx_hat_over_pi"] = est.kx_hat / np.pi
    if cfg["format"] == "csv":
        print(json.dumps(result, default=float), file=sys.stderr)
        return trace.to_csv()
    result["trace"] = trace.to_dict()
    return _dumps(result)


def cmd_locate(cfg):
    p = _params(cfg)
    _require(cfg, "intensity")
    sigma = float(cfg.get("sigma", 0.0))
    try:
        cands = single_pass_candidates(float(cfg["intensity"]), sigma,
                                       evaluate_profile(p, _grid(cfg)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = {"candidates": cands.to_dict(), "measure": cands.measure}
    if "flight_time" in cfg:
        _require(cfg, "gamma_si")
        try:
            check = timescale_check(p.replace(gamma=float(cfg["gamma_si"])),
                                    float(cfg["flight_time"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        result["timescale"] = asdict(check)
    if cfg["format"] == "csv":
        return _table(["kx_low", "kx_high"], [(float(a), float(b)) for a, b in cands.intervals])
    return _dumps(result)


def coefficient_table(kr, xi, gamma=1.0):
    g = PairGeometry(kr, xi)
    return {
        "kr": kr, "xi": xi,
        "chi": collective.chi_pair(g, gamma),
        "omega": collective.omega_pair(g, gamma),
        "chi_expanded": collective.chi_pair_expanded(g, gamma),
        "omega_expanded": collective.omega_pair_expanded(g, gamma),
        "static_dd": collective.static_dd(g, gamma),
        "averaged_dd": collective.averaged_dd(kr, gamma),
    }


def cmd_coeffs(cfg):
    _require(cfg, "kr")
    try:
        table = coefficient_table(float(cfg["kr"]), float(cfg.get("xi", 0.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["format"] == "csv":
        return _table(["quantity", "value"], [(k, float(v)) for k, v in table.items()])
    return _dumps({k: float(v) for k, v in table.items()})


COMMANDS = {"profile": cmd_profile, "oracle": cmd_oracle, "scan": cmd_scan,
            "locate": cmd_locate, "coeffs": cmd_coeffs}


def main(argv=None):
    try:
        command, cfg = load_config(sys.argv[1:] if argv is None else argv)
        out = COMMANDS[command](cfg)
        text, code = out if isinstance(out, tuple) else (out, 0)
    except (ConfigError, OracleCapError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoDipError, DipCountError) as exc:
        print(f"estimator failure: {exc}", file=sys.stderr)
        return 4
    except (SingularSteadyStateError, PoleError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if "out" in cfg:
        with open(cfg["out"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
