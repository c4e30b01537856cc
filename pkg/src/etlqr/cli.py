"""Command-line interface.

    etlqr run --config scenario.ini --out results/ [--strategy all] [--seed 7]
    etlqr certify --config scenario.ini

Configs are INI files with sections [vehicle], [lqr], [etm], [sim] and
[disturbance]; every key is optional and defaults to the benchmark scenario
(see DEFAULTS). Exit codes: 0 success, 2 config parse error, 3 invariant
violation, 4 simulation divergence.
"""
from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import EtlqrError, SimulationDiverged, SynthesisError
from .etm import Strategy
from .model import VehicleParams, build_plant, reconstruct_trajectory
from .sim import Disturbance, SimConfig, SimLog, run
from .synthesis import EtmDesign, LqrWeights, SynthesisResult, synthesize

__all__ = ["ConfigParseError", "ConfigValidationError", "RunManifest",
           "SummaryRow", "load_config", "run_comparison", "emit_certificate",
           "write_log_csv", "read_log_csv", "write_trajectory_csv", "main"]

STRATEGY_NAMES = ("time", "etm-original", "etm-improved")

LOG_COLUMNS = ("t", "beta_tilde", "psidot_tilde", "edot", "e", "delta_tilde",
               "z", "triggered", "xi1", "xi2", "xi3", "xi4")

# benchmark scenario defaults; an empty config runs exactly this
DEFAULTS: dict[str, dict[str, str]] = {
    "vehicle": {
        "m": "1421.0", "mu": "0.6", "vx": "18.0", "iz": "2570.0",
        "cf": "170550.0", "cr": "137844.0", "lf": "1.191", "lr": "1.513",
        "rho": "0.001",
    },
    "lqr": {
        "q_diag": "30 10 1 1", "r": "1000.0", "n_diag": "1 1 1 1",
    },
    "etm": {
        "z_bar": "1.0", "epsilon": "1.0", "theta_l": "8.0", "theta_r": "0.1",
    },
    "sim": {
        "t_end": "15.0", "dt": "0.01", "x0": "0 0 0 0",
        "period": "", "pose": "0 0 0",
    },
    "disturbance": {
        "xi_bar": "3e-4 1e-3 0 0", "decay_rate": "0.3",
        "frequencies": "1 2 0 0", "seed": "0", "g_diag": "1 1 1 1",
    },
}


class ConfigParseError(EtlqrError):
    """Config file unreadable or syntactically invalid (exit code 2)."""


class ConfigValidationError(EtlqrError):
    """Config parsed but violates a parameter invariant (exit code 3)."""


@dataclass
class ConfigBundle:
    """Everything a config file pins down, beyond the public 4-tuple."""

    vehicle: VehicleParams
    weights: LqrWeights
    design: EtmDesign
    sim: SimConfig
    n_mat: np.ndarray
    g: np.ndarray
    pose: tuple[float, float, float]
    period: float


@dataclass
class RunManifest:
    """Execution plan of one comparison: which strategies, which files."""

    config_path: str
    out_dir: str
    strategies: tuple[str, ...]
    seed: int | None = None
    log_files: dict[str, str] = field(default_factory=dict)
    trajectory_files: dict[str, str] = field(default_factory=dict)
    summary_file: str = "summary.csv"

    def __post_init__(self) -> None:
        if not self.strategies:
            raise ValueError("manifest needs at least one strategy")
        for name in self.strategies:
            if name not in STRATEGY_NAMES:
                raise ValueError(f"unknown strategy {name!r}; choose from {STRATEGY_NAMES}")
        if len(set(self.strategies)) != len(self.strategies):
            raise ValueError("duplicate strategy in manifest")
        for name in self.strategies:
            self.log_files.setdefault(name, f"log_{name}.csv")
            self.trajectory_files.setdefault(name, f"traj_{name}.csv")
        paths = [*self.log_files.values(), *self.trajectory_files.values(),
                 self.summary_file]
        if len(set(paths)) != len(paths):
            raise ValueError("output filenames must be unique")


@dataclass
class SummaryRow:
    """One line of the strategy-comparison summary."""

    strategy: str
    n_triggers: int
    min_iet: float      # nan when fewer than two events
    mean_iet: float     # nan when fewer than two events
    tau: float | None   # None for the time-triggered row
    savings_pct: float  # trigger reduction vs the time-triggered baseline


def _parse_floats(raw: str, count: int, where: str) -> list[float]:
    parts = raw.replace(",", " ").split()
    if len(parts) != count:
        raise ConfigParseError(f"{where}: expected {count} numbers, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigParseError(f"{where}: {exc}") from exc


def _read_ini(path: str) -> configparser.ConfigParser:
    if not os.path.isfile(path):
        raise ConfigParseError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh, source=path)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigParseError(str(exc)) from exc
    for section in cp.sections():
        if section not in DEFAULTS:
            raise ConfigParseError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in DEFAULTS[section]:
                raise ConfigParseError(f"unknown key {key!r} in section [{section}]")
    return cp


def _value(cp: configparser.ConfigParser, section: str, key: str) -> str:
    if cp.has_option(section, key):
        return cp.get(section, key)
    return DEFAULTS[section][key]


def _float(cp: configparser.ConfigParser, section: str, key: str) -> float:
    raw = _value(cp, section, key)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] {key}: cannot parse {raw!r} as a number") from exc


def _load_bundle(path: str) -> ConfigBundle:
    cp = _read_ini(path)
    try:
        vehicle = VehicleParams(
            m=_float(cp, "vehicle", "m"), mu=_float(cp, "vehicle", "mu"),
            vx=_float(cp, "vehicle", "vx"), iz=_float(cp, "vehicle", "iz"),
            cf=_float(cp, "vehicle", "cf"), cr=_float(cp, "vehicle", "cr"),
            lf=_float(cp, "vehicle", "lf"), lr=_float(cp, "vehicle", "lr"),
            rho=_float(cp, "vehicle", "rho"),
        )
        q_diag = _parse_floats(_value(cp, "lqr", "q_diag"), 4, "[lqr] q_diag")
        n_diag = _parse_floats(_value(cp, "lqr", "n_diag"), 4, "[lqr] n_diag")
        weights = LqrWeights(Q=np.diag(q_diag), r=_float(cp, "lqr", "r"))
        n_mat = np.diag(n_diag)
        if np.any(np.asarray(n_diag) <= 0.0):
            raise ValueError("n_diag entries must be positive")

        design = EtmDesign(
            z_bar=_float(cp, "etm", "z_bar"), epsilon=_float(cp, "etm", "epsilon"),
            theta_l=_float(cp, "etm", "theta_l"), theta_r=_float(cp, "etm", "theta_r"),
        )

        t_end = _float(cp, "sim", "t_end")
        dt = _float(cp, "sim", "dt")
        x0 = _parse_floats(_value(cp, "sim", "x0"), 4, "[sim] x0")
        pose_vals = _parse_floats(_value(cp, "sim", "pose"), 3, "[sim] pose")

        xi_bar = _parse_floats(_value(cp, "disturbance", "xi_bar"), 4, "[disturbance] xi_bar")
        freqs = _parse_floats(_value(cp, "disturbance", "frequencies"), 4,
                              "[disturbance] frequencies")
        g_diag = _parse_floats(_value(cp, "disturbance", "g_diag"), 4, "[disturbance] g_diag")
        seed_raw = _value(cp, "disturbance", "seed")
        try:
            seed = int(seed_raw)
        except ValueError as exc:
            raise ConfigParseError(
                f"[disturbance] seed: cannot parse {seed_raw!r} as an integer") from exc
        disturbance = Disturbance(
            xi_bar=np.asarray(xi_bar), decay_rate=_float(cp, "disturbance", "decay_rate"),
            frequencies=np.asarray(freqs), seed=seed,
        )

        sim_cfg = SimConfig(t_end=t_end, dt=dt, initial_state=np.asarray(x0),
                            strategy=Strategy.etm(design), disturbance=disturbance)

        # derived after SimConfig so a bad dt is reported as dt, not period
        period_raw = _value(cp, "sim", "period").strip()
        period = float(period_raw) if period_raw else dt
        if not (math.isfinite(period) and period > 0.0):
            raise ValueError(f"period must be positive, got {period!r}")
    except ValueError as exc:
        raise ConfigValidationError(str(exc)) from exc

    return ConfigBundle(vehicle=vehicle, weights=weights, design=design,
                        sim=sim_cfg, n_mat=n_mat, g=np.diag(g_diag),
                        pose=(pose_vals[0], pose_vals[1], pose_vals[2]),
                        period=period)


def load_config(path: str) -> tuple[VehicleParams, LqrWeights, EtmDesign, SimConfig]:
    """Load a scenario config; unset keys fall back to the benchmark defaults.

    Raises ConfigParseError for unreadable or malformed files and
    ConfigValidationError when a value violates a parameter invariant.
    """
    bundle = _load_bundle(path)
    return bundle.vehicle, bundle.weights, bundle.design, bundle.sim


def _fmt(value: float) -> str:
    return f"{value:.16e}"


def write_log_csv(log: SimLog, path: str) -> None:
    """Write one run's sampled history; floats carry 17 significant digits
    so a read_log_csv round trip is bit-exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(LOG_COLUMNS) + "\n")
        for i in range(log.times.size):
            row = [
                _fmt(log.times[i]),
                _fmt(log.states[i, 0]), _fmt(log.states[i, 1]),
                _fmt(log.states[i, 2]), _fmt(log.states[i, 3]),
                _fmt(log.inputs[i]), _fmt(log.clock[i]),
                str(int(log.trigger_flags[i])),
                _fmt(log.disturbances[i, 0]), _fmt(log.disturbances[i, 1]),
                _fmt(log.disturbances[i, 2]), _fmt(log.disturbances[i, 3]),
            ]
            fh.write(",".join(row) + "\n")


def read_log_csv(path: str) -> SimLog:
    """Inverse of write_log_csv."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.split(",") != list(LOG_COLUMNS):
            raise ConfigParseError(f"{path}: unexpected log header {header!r}")
        rows = [line.split(",") for line in fh.read().split("\n") if line]
    data = np.array([[float(v) for v in row] for row in rows])
    flags = data[:, 7].astype(bool)
    return SimLog(
        times=data[:, 0],
        states=np.ascontiguousarray(data[:, 1:5]),
        inputs=data[:, 5],
        clock=data[:, 6],
        triggers=data[flags, 0],
        disturbances=np.ascontiguousarray(data[:, 8:12]),
        trigger_flags=flags,
    )


def write_trajectory_csv(actual: np.ndarray, reference: np.ndarray, path: str) -> None:
    """Write road-plane positions of the vehicle and the reference path."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("X,Y,X_ref,Y_ref\n")
        for i in range(actual.shape[0]):
            fh.write(f"{_fmt(actual[i, 0])},{_fmt(actual[i, 1])},"
                     f"{_fmt(reference[i, 0])},{_fmt(reference[i, 1])}\n")


def _baseline_count(t_end: float, period: float) -> int:
    # periodic updates at 0, p, 2p, ... strictly before t_end
    return int(math.floor(t_end / period - 1e-9)) + 1


def _strategy_setup(name: str, bundle: ConfigBundle, plant) -> tuple[Strategy, SynthesisResult]:
    if name == "time":
        syn = synthesize(plant, bundle.weights, bundle.design, bundle.n_mat)
        return Strategy.time_triggered(bundle.period), syn
    if name == "etm-original":
        design = EtmDesign(z_bar=bundle.design.z_bar, epsilon=bundle.design.epsilon,
                           theta_l=1.0, theta_r=1.0)
    else:
        design = bundle.design
    syn = synthesize(plant, bundle.weights, design, bundle.n_mat)
    return Strategy.etm(design), syn


def run_comparison(manifest: RunManifest) -> list[SummaryRow]:
    """Run every strategy in the manifest on one shared disturbance
    realization, write per-strategy log and trajectory CSVs plus the
    summary CSV, and return the summary rows."""
    bundle = _load_bundle(manifest.config_path)
    if manifest.seed is not None:
        base = bundle.sim.disturbance
        bundle.sim.disturbance = Disturbance(
            xi_bar=base.xi_bar, decay_rate=base.decay_rate,
            frequencies=base.frequencies, seed=manifest.seed,
        )
    plant = build_plant(bundle.vehicle, g=bundle.g)
    os.makedirs(manifest.out_dir, exist_ok=True)

    results: list[tuple[str, SimLog, float | None]] = []
    for name in manifest.strategies:
        strategy, syn = _strategy_setup(name, bundle, plant)
        cfg = SimConfig(t_end=bundle.sim.t_end, dt=bundle.sim.dt,
                        initial_state=bundle.sim.initial_state,
                        strategy=strategy, disturbance=bundle.sim.disturbance)
        log = run(cfg, plant, syn)
        write_log_csv(log, os.path.join(manifest.out_dir, manifest.log_files[name]))
        pair = reconstruct_trajectory(log, bundle.vehicle,
                                      origin=(bundle.pose[0], bundle.pose[1]),
                                      heading=bundle.pose[2])
        write_trajectory_csv(pair.actual, pair.reference,
                             os.path.join(manifest.out_dir, manifest.trajectory_files[name]))
        results.append((name, log, syn.tau if strategy.kind == "etm" else None))

    baseline = next((log.n_triggers for name, log, _ in results if name == "time"),
                    _baseline_count(bundle.sim.t_end, bundle.period))
    rows = []
    for name, log, tau in results:
        gaps = log.inter_event_times()
        rows.append(SummaryRow(
            strategy=name,
            n_triggers=log.n_triggers,
            min_iet=float(gaps.min()) if gaps.size else math.nan,
            mean_iet=float(gaps.mean()) if gaps.size else math.nan,
            tau=tau,
            savings_pct=100.0 * (1.0 - log.n_triggers / baseline),
        ))

    summary_path = os.path.join(manifest.out_dir, manifest.summary_file)
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("strategy,triggers,min_iet,mean_iet,tau,savings_pct\n")
        for row in rows:
            fh.write(",".join([
                row.strategy,
                str(row.n_triggers),
                _fmt(row.min_iet) if math.isfinite(row.min_iet) else "",
                _fmt(row.mean_iet) if math.isfinite(row.mean_iet) else "",
                _fmt(row.tau) if row.tau is not None else "",
                _fmt(row.savings_pct),
            ]) + "\n")
    return rows


def _print_summary(rows: list[SummaryRow]) -> None:
    print(f"{'strategy':<14} {'triggers':>8} {'min IET':>12} {'mean IET':>12} "
          f"{'tau':>12} {'savings':>9}")
    for row in rows:
        min_iet = f"{row.min_iet:.6g}" if math.isfinite(row.min_iet) else "-"
        mean_iet = f"{row.mean_iet:.6g}" if math.isfinite(row.mean_iet) else "-"
        tau = f"{row.tau:.6g}" if row.tau is not None else "-"
        print(f"{row.strategy:<14} {row.n_triggers:>8d} {min_iet:>12} "
              f"{mean_iet:>12} {tau:>12} {row.savings_pct:>8.2f}%")


def emit_certificate(syn: SynthesisResult, d: EtmDesign) -> str:
    """Human-readable synthesis certificate: gain, closed-loop spectrum,
    both residuals, and the trigger constants for the given design."""
    eigs = ", ".join(f"{ev.real:.6g}{ev.imag:+.6g}j" for ev in
                     sorted(syn.closed_loop_eigs, key=lambda v: (v.real, v.imag)))
    k_row = " ".join(_fmt(v) for v in np.asarray(syn.K).reshape(-1))
    lines = [
        "synthesis certificate",
        f"  design: z_bar = {d.z_bar:g}, epsilon = {d.epsilon:g}, "
        f"theta_l = {d.theta_l:g}, theta_r = {d.theta_r:g}",
        f"  K                 = [{k_row}]",
        f"  eig(A - B K)      = {eigs}",
        f"  CARE residual     = {_fmt(syn.care_res)}",
        f"  Lyapunov residual = {_fmt(syn.lyap_res)}",
        f"  lambda_min(M)     = {_fmt(syn.lam_min_m)}",
        f"  lambda_min(N)     = {_fmt(syn.lam_min_n)}",
        f"  |M B K|           = {_fmt(syn.mbk_norm)}",
        f"  sigma             = {_fmt(syn.sigma)}",
        f"  tau               = {_fmt(syn.tau)} s",
    ]
    return "\n".join(lines)


def _cmd_run(args: argparse.Namespace) -> int:
    strategies = STRATEGY_NAMES if args.strategy == "all" else (args.strategy,)
    manifest = RunManifest(config_path=args.config, out_dir=args.out,
                           strategies=tuple(strategies), seed=args.seed)
    rows = run_comparison(manifest)
    _print_summary(rows)
    print(f"wrote {os.path.join(args.out, manifest.summary_file)}")
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    bundle = _load_bundle(args.config)
    plant = build_plant(bundle.vehicle, g=bundle.g)
    syn = synthesize(plant, bundle.weights, bundle.design, bundle.n_mat)
    print(emit_certificate(syn, bundle.design))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="etlqr",
        description="Event-triggered LQR lateral control: simulation and synthesis checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate strategies and write CSV results")
    p_run.add_argument("--config", required=True, help="scenario INI file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--strategy", default="all",
                       choices=[*STRATEGY_NAMES, "all"], help="which strategy to run")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the disturbance seed")
    p_run.set_defaults(func=_cmd_run)

    p_cert = sub.add_parser("certify", help="print the synthesis certificate")
    p_cert.add_argument("--config", required=True, help="scenario INI file")
    p_cert.set_defaults(func=_cmd_certify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConfigValidationError, SynthesisError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 3
    except SimulationDiverged as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
