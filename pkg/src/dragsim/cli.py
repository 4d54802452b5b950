"""Command-line interface: config ingestion, subcommands, persistence.

Subcommands: model | simulate | sweep | spectrum | fom | repro.
Configuration is a sectioned YAML document (model / pulse / run / sweep)
with explicit units in key names; unknown keys are rejected.  Exit
codes: 0 success, 2 validation failure, 3 numerical failure, 4 I/O
failure.
"""

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from . import __version__, io_utils, lattice, optimizer, propagator, pulses
from . import spectra as spectra_mod
from . import truncation
from .errors import NumericalError, ValidationError

log = logging.getLogger("dragsim")

TWO_PI = 2.0 * math.pi
_INFIDELITY_FLOOR = 1e-10  # log-scale reporting floor; optimizer uses raw values


def _parse_section(data, name, casters):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError(f"section '{name}' must be a mapping")
    unknown = set(data) - set(casters)
    if unknown:
        raise ValidationError(
            f"unknown keys in section '{name}': {', '.join(sorted(unknown))}")
    out = {}
    for key, value in data.items():
        try:
            out[key] = casters[key](value)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad value for {name}.{key}: {exc}") from exc
    return out


def _num(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError("expected a number")
    return float(v)


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError("expected an integer")
    return v


def _bool(v):
    if not isinstance(v, bool):
        raise ValueError("expected true/false")
    return v


def _str(v):
    if not isinstance(v, str):
        raise ValueError("expected a string")
    return v


def _num_or_none(v):
    return None if v is None else _num(v)


def _numlist(v):
    return tuple(_num(x) for x in v)


def _pairs(v):
    return tuple((int(i), int(j)) for i, j in v)


def _windows(v):
    return tuple((_num(a), _num(b)) for a, b in v)


@dataclass
class RunConfig:
    """Validated configuration document."""

    model: dict = field(default_factory=dict)
    pulse: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    _MODEL = {
        "ej_ghz": _num, "ej_over_ec": _num, "grid_sites": _int,
        "phase_min_rad": _num, "phase_max_rad": _num, "dim": _int,
        "n_levels": _int, "zero_couplings": _pairs,
    }
    _PULSE = {
        "family": _str, "tp_ns": _num, "w": _num, "theta_rad": _num,
        "alphas": _numlist, "ax": _num, "ay": _num, "detuning_ghz": _num,
        "optimize": _bool,
    }
    _RUN = {
        "dt_ps": _num_or_none, "sample_dt_ps": _num, "traj_dt_ns": _num_or_none,
        "pad_factor": _int, "out_dir": _str, "jobs": _int,
    }
    _SWEEP = {
        "tp_start_ns": _num, "tp_stop_ns": _num, "tp_step_ns": _num,
        "tp_list_ns": _numlist, "ay_list": _numlist, "w_list": _numlist,
        "optimize": _bool, "delta_bracket_ghz": _num, "ax_bracket": _numlist,
        "tol": _num, "max_rounds": _int, "fom_windows_ns": _windows,
    }

    _MODEL_DEFAULTS = {
        "ej_ghz": 22.05, "ej_over_ec": 100.0, "grid_sites": 100,
        "phase_min_rad": -math.pi, "phase_max_rad": math.pi, "dim": 3,
        "zero_couplings": (),
    }
    _PULSE_DEFAULTS = {
        "family": "gaussian", "tp_ns": 15.0, "w": 1.0, "theta_rad": math.pi,
        "alphas": (-0.5,), "ax": 1.0, "ay": 0.0, "detuning_ghz": 0.0,
        "optimize": False,
    }
    _RUN_DEFAULTS = {
        "dt_ps": None, "sample_dt_ps": 2.0, "traj_dt_ns": None,
        "pad_factor": 8, "jobs": 1,
    }
    _SWEEP_DEFAULTS = {
        "tp_start_ns": 8.0, "tp_stop_ns": 30.0, "tp_step_ns": 1.0,
        "ay_list": (0.0, 1.0, 2.0), "w_list": (1.0,), "optimize": True,
        "delta_bracket_ghz": 0.05, "ax_bracket": (0.9, 1.1), "tol": 1e-8,
        "max_rounds": 50, "fom_windows_ns": ((10.0, 18.0), (17.0, 25.0)),
    }

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as handle:
                raw = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ValidationError(f"cannot parse config: {exc}") from exc
        return cls.from_dict(raw if raw is not None else {})

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ValidationError("config document must be a mapping")
        unknown = set(raw) - {"model", "pulse", "run", "sweep"}
        if unknown:
            raise ValidationError(
                f"unknown config sections: {', '.join(sorted(unknown))}")
        cfg = cls(
            model={**cls._MODEL_DEFAULTS,
                   **_parse_section(raw.get("model"), "model", cls._MODEL)},
            pulse={**cls._PULSE_DEFAULTS,
                   **_parse_section(raw.get("pulse"), "pulse", cls._PULSE)},
            run={**cls._RUN_DEFAULTS,
                 **_parse_section(raw.get("run"), "run", cls._RUN)},
            sweep={**cls._SWEEP_DEFAULTS,
                   **_parse_section(raw.get("sweep"), "sweep", cls._SWEEP)},
        )
        if cfg.model["dim"] < 2:
            raise ValidationError("model.dim must be at least 2")
        if cfg.pulse["family"] not in ("gaussian", "cosine"):
            raise ValidationError("pulse.family must be 'gaussian' or 'cosine'")
        return cfg

    def resolved(self):
        def plain(d):
            return {k: (list(map(list, v)) if k in ("zero_couplings", "fom_windows_ns")
                        else (list(v) if isinstance(v, tuple) else v))
                    for k, v in sorted(d.items())}
        return {"model": plain(self.model), "pulse": plain(self.pulse),
                "run": plain(self.run), "sweep": plain(self.sweep)}


def _build_model(cfg):
    m = cfg.model
    params = lattice.TransmonParams(
        e_j=m["ej_ghz"], ej_over_ec=m["ej_over_ec"], grid_sites=m["grid_sites"],
        phase_min=m["phase_min_rad"], phase_max=m["phase_max_rad"])
    grid = lattice.build_lattice(params)
    n_levels = m.get("n_levels") or max(m["dim"], 4)
    if n_levels < m["dim"]:
        raise ValidationError("model.n_levels must be >= model.dim")
    eigs = lattice.solve_eigensystem(grid, n_levels)
    model = truncation.truncate(eigs, lattice.phase_operator(grid), m["dim"],
                                zero_couplings=m["zero_couplings"])
    return params, grid, eigs, model


def _build_envelope(cfg, t_p=None):
    p = cfg.pulse
    t_p = p["tp_ns"] if t_p is None else t_p
    if p["family"] == "gaussian":
        return pulses.GaussianEnvelope(t_p=t_p, w=p["w"])
    return pulses.CosineEnvelope(t_p=t_p, theta=p["theta_rad"],
                                 alphas=p["alphas"])


def _build_drive(cfg):
    p = cfg.pulse
    return pulses.DriveConfig(envelope=_build_envelope(cfg), a_x=p["ax"],
                              a_y=p["ay"], detuning=TWO_PI * p["detuning_ghz"])


def _opt_config(cfg):
    s = cfg.sweep
    half = TWO_PI * s["delta_bracket_ghz"]
    return optimizer.OptimizeConfig(
        delta_bracket=(-half, half), ax_bracket=tuple(s["ax_bracket"]),
        tol=s["tol"], max_rounds=s["max_rounds"])


def _dt_ns(cfg, args):
    dt_ps = getattr(args, "dt_ps", None)
    if dt_ps is None:
        dt_ps = cfg.run["dt_ps"]
    return None if dt_ps is None else dt_ps * 1e-3


def _out_dir(cfg, args):
    out = args.out or cfg.run.get("out_dir") or os.environ.get("DRAGSIM_OUT")
    return out or "dragsim-out"


def _floor(x):
    return max(float(x), _INFIDELITY_FLOOR)


def cmd_model(args):
    cfg = RunConfig.load(args.config)
    out = _out_dir(cfg, args)
    params, grid, eigs, model = _build_model(cfg)
    tf = lattice.transition_frequencies(eigs)
    header, rows = lattice.wavefunction_rows(eigs, n_states=4)
    io_utils.write_csv(os.path.join(out, "wavefunctions.csv"), header, rows,
                       config=cfg.resolved())
    payload = {
        "dim": model.dim,
        "energies_ghz": ((eigs.energies - eigs.energies[0]) / TWO_PI).tolist(),
        "omega01_ghz": tf.omega01_ghz(),
        "omega12_ghz": tf.omega12_ghz(),
        "delta2_ghz": tf.delta2_ghz(),
        "delta2_over_omega01": tf.delta2 / tf.omega01,
        "analytic_omega01_ghz": lattice.analytic_transmon_estimate(params),
        "lambda_matrix": model.sigma_x.tolist(),
        "lambda_ratio_12": model.lambda_ratio(1, 2) if model.dim > 2 else None,
    }
    io_utils.write_json(os.path.join(out, "model.json"), payload,
                        config=cfg.resolved())
    log.info("model written to %s (omega01 = %.4f GHz)", out, tf.omega01_ghz())
    return 0


def _maybe_optimize(cfg, model, drive, dt):
    if not cfg.pulse["optimize"]:
        return drive, None
    res = optimizer.optimize_pulse(model, drive, cfg=_opt_config(cfg), dt=dt)
    return drive.with_params(a_x=res.a_x, detuning=res.delta), res


def cmd_simulate(args):
    cfg = RunConfig.load(args.config)
    out = _out_dir(cfg, args)
    _, _, _, model = _build_model(cfg)
    dt = _dt_ns(cfg, args)
    drive, opt = _maybe_optimize(cfg, model, _build_drive(cfg), dt)

    traj = propagator.evolve_state(model, drive, dt=dt,
                                   sample_dt=cfg.run["traj_dt_ns"])
    cols = ["t_ns"] + [f"p{j}" for j in range(model.dim)]
    rows = [[t] + list(p) for t, p in zip(traj.times, traj.populations)]
    io_utils.write_csv(os.path.join(out, "trajectory.csv"), cols, rows,
                       config=cfg.resolved())

    sample_dt = cfg.run["sample_dt_ps"] * 1e-3
    times = np.arange(int(drive.t_p / sample_dt) + 1) * sample_dt
    s_x, s_y = pulses.signal_components(times, drive, model)
    io_utils.write_csv(os.path.join(out, "signal.csv"),
                       ["t_ns", "s_x", "s_y", "s"],
                       [[t, a, b, a + b] for t, a, b in zip(times, s_x, s_y)],
                       config=cfg.resolved())

    report = propagator.fidelity_report(model, drive, dt=dt)
    payload = {
        "f_two_state": report.f_two_state,
        "infidelity": _floor(1.0 - report.f_two_state),
        "f_full": report.f_full,
        "gamma2": report.gamma2,
        "gamma2_over_infidelity": report.ratio,
        "detuning_ghz": drive.detuning / TWO_PI,
        "ax": drive.a_x,
        "ay": drive.a_y,
        "dt_ns": traj.dt_used,
        "optimized": cfg.pulse["optimize"],
    }
    if opt is not None:
        payload["optimizer_rounds"] = [float(r) for r in opt.rounds]
        payload["optimizer_evaluations"] = opt.evaluations
    io_utils.write_json(os.path.join(out, "report.json"), payload,
                        config=cfg.resolved())
    log.info("simulation written to %s (1-F' = %.3e)", out,
             1.0 - report.f_two_state)
    return 0


def _tp_grid(cfg):
    s = cfg.sweep
    if s.get("tp_list_ns"):
        return list(s["tp_list_ns"])
    n = int(round((s["tp_stop_ns"] - s["tp_start_ns"]) / s["tp_step_ns"]))
    return [s["tp_start_ns"] + k * s["tp_step_ns"] for k in range(n + 1)]


def _curve_rows(curve):
    slopes = curve.slopes()
    return [[tp, _floor(infid), d / TWO_PI, ax, g, sl]
            for tp, infid, d, ax, g, sl in zip(
                curve.t_p, curve.infidelity, curve.delta, curve.a_x,
                curve.gamma2, slopes)]


def _curves_payload(curves):
    return [{
        "family": c.family, "w": c.w, "ay": c.a_y, "dim": c.dim,
        "optimized": c.optimized,
        "tp_ns": c.t_p.tolist(),
        "infidelity": c.infidelity.tolist(),
        "delta_ghz": (c.delta / TWO_PI).tolist(),
        "ax": c.a_x.tolist(),
        "gamma2": c.gamma2.tolist(),
    } for c in curves]


def _fom_rows(curves, windows):
    rows = []
    for lo, hi in windows:
        for curve in curves:
            fom = optimizer.figure_of_merit(curve, lo, hi)
            rows.append([curve.family,
                         curve.w if curve.w is not None else math.nan,
                         curve.a_y, lo, hi, fom.fom])
    return rows


def cmd_sweep(args):
    cfg = RunConfig.load(args.config)
    out = _out_dir(cfg, args)
    _, _, _, model = _build_model(cfg)
    s = cfg.sweep
    jobs = args.jobs or cfg.run["jobs"]
    family = cfg.pulse["family"]
    w_list = list(s["w_list"]) if family == "gaussian" else [None]
    curves = optimizer.sweep(
        model, _tp_grid(cfg), list(s["ay_list"]), w_list,
        family=family, theta=cfg.pulse["theta_rad"], alphas=cfg.pulse["alphas"],
        optimize=s["optimize"], opt_config=_opt_config(cfg),
        dt=_dt_ns(cfg, args), jobs=jobs)
    cols = ["tp_ns", "infidelity", "delta_ghz", "ax", "gamma2", "slope"]
    for curve in curves:
        io_utils.write_csv(os.path.join(out, f"sweep_{curve.label()}.csv"),
                           cols, _curve_rows(curve), config=cfg.resolved())
    io_utils.write_json(os.path.join(out, "sweep_summary.json"),
                        {"curves": _curves_payload(curves)},
                        config=cfg.resolved())
    if s["fom_windows_ns"]:
        io_utils.write_csv(os.path.join(out, "fom.csv"),
                           ["family", "w", "ay", "tp1_ns", "tp2_ns", "fom"],
                           _fom_rows(curves, s["fom_windows_ns"]),
                           config=cfg.resolved())
    log.info("sweep written to %s (%d curves)", out, len(curves))
    return 0


def _spectrum_rows(spec):
    return [[f, m] for f, m in zip(spec.freqs, spec.magnitude)]


def cmd_spectrum(args):
    cfg = RunConfig.load(args.config)
    out = _out_dir(cfg, args)
    _, _, _, model = _build_model(cfg)
    drive = _build_drive(cfg)
    sample_dt = cfg.run["sample_dt_ps"] * 1e-3
    pad = cfg.run["pad_factor"]
    spec = spectra_mod.power_spectrum(drive, model, sample_dt, pad)
    io_utils.write_csv(os.path.join(out, "spectrum.csv"),
                       ["f_ghz", "magnitude"], _spectrum_rows(spec),
                       config=cfg.resolved())
    if args.pair:
        plain = spectra_mod.power_spectrum(drive.with_params(a_y=0.0), model,
                                           sample_dt, pad)
        io_utils.write_csv(os.path.join(out, "spectrum_plain.csv"),
                           ["f_ghz", "magnitude"], _spectrum_rows(plain),
                           config=cfg.resolved())
        w01 = model.omega01_ghz()
        d2 = model.delta2_ghz()
        window = (w01 - 2.0 * d2, w01 - d2)
        ratio = spectra_mod.spectral_hole_depth(spec, plain, window)
        io_utils.write_json(os.path.join(out, "hole.json"), {
            "window_ghz": list(window),
            "min_ratio": ratio,
        }, config=cfg.resolved())
    log.info("spectrum written to %s", out)
    return 0


def cmd_fom(args):
    cfg = RunConfig.load(args.config)
    out = _out_dir(cfg, args)
    summary = io_utils.read_json(args.sweep_json)
    curves = []
    for item in summary["data"]["curves"]:
        curves.append(optimizer.FidelityCurve(
            t_p=np.asarray(item["tp_ns"]),
            infidelity=np.asarray(item["infidelity"]),
            delta=TWO_PI * np.asarray(item["delta_ghz"]),
            a_x=np.asarray(item["ax"]),
            gamma2=np.asarray(item["gamma2"], dtype=float),
            a_y=item["ay"], w=item["w"], dim=item["dim"],
            family=item["family"], optimized=item["optimized"]))
    io_utils.write_csv(os.path.join(out, "fom.csv"),
                       ["family", "w", "ay", "tp1_ns", "tp2_ns", "fom"],
                       _fom_rows(curves, cfg.sweep["fom_windows_ns"]),
                       config=cfg.resolved())
    log.info("figure-of-merit table written to %s", out)
    return 0


def _bundled_configs():
    root = resources.files("dragsim").joinpath("configs")
    return sorted(p for p in root.iterdir() if p.name.endswith(".yaml"))


def cmd_repro(args):
    out_root = args.out or os.environ.get("DRAGSIM_OUT") or "dragsim-out"
    for entry in _bundled_configs():
        name = entry.name[:-len(".yaml")]
        with resources.as_file(entry) as path:
            cfg = RunConfig.load(str(path))
            sub = cfg.run.get("out_dir") or name
            ns = argparse.Namespace(config=str(path),
                                    out=os.path.join(out_root, sub),
                                    jobs=args.jobs, dt_ps=None, pair=True,
                                    sweep_json=None)
            log.info("repro: %s", name)
            if name.startswith("model"):
                cmd_model(ns)
            elif name.startswith("simulate"):
                cmd_simulate(ns)
            elif name.startswith("spectrum"):
                cmd_spectrum(ns)
            elif name.startswith("sweep"):
                cmd_sweep(ns)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dragsim",
        description="Simulate and calibrate two-quadrature pulses on "
                    "ladder-spectrum qubits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, jobs=False, dt=False):
        p.add_argument("--config", required=True, help="YAML config path")
        p.add_argument("--out", default=None, help="output directory "
                       "(default: run.out_dir, $DRAGSIM_OUT or ./dragsim-out)")
        if jobs:
            p.add_argument("--jobs", type=int, default=None,
                           help="parallel workers for sweep points")
        if dt:
            p.add_argument("--dt-ps", dest="dt_ps", type=float, default=None,
                           help="integrator step override in ps")

    p = sub.add_parser("model", help="solve the lattice; write spectrum "
                       "and wavefunction tables")
    common(p)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("simulate", help="single-pulse propagation: "
                       "trajectory, signal and fidelity report")
    common(p, dt=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="infidelity curves over the pulse-width "
                       "grid; optional FOM table")
    common(p, jobs=True, dt=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="drive power spectrum tables")
    common(p)
    p.add_argument("--pair", action="store_true",
                   help="also emit the matched no-DRAG spectrum and the "
                        "spectral-hole report")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fom", help="figure-of-merit table from a stored sweep")
    common(p)
    p.add_argument("--sweep-json", required=True,
                   help="sweep_summary.json from a previous sweep run")
    p.set_defaults(func=cmd_fom)

    p = sub.add_parser("repro", help="run every bundled reference config")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_repro)

    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s",
                        stream=sys.stderr)
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("validation error: %s", exc)
        return 2
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return 3
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
