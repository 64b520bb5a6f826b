"""Command-line workbench.

Subcommands turn a register config plus flags into plot-ready CSV/JSON files:

    spinmux address-map    per-site frequency addresses at a DC current
    spinmux simulate       rabi | ramsey | odmr | pulse curves
    spinmux optimize       synthesize a selective pulse, write pulse + trace
    spinmux crosstalk-map  spatial flip-error maps for a targeted pi-pulse
    spinmux sweep          detuning/amplitude sensitivity grid for a pulse

Exit codes: 0 success, 1 usage error, 2 validation or physics error,
3 optimizer divergence (best-so-far artifacts are still written).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config_io import RegisterConfig, load_config
from .dynamics import PulseProgram, QubitState, evolve, state_error
from .errors import Diverged, SpinmuxError, UnknownKind, UsageError, ValidationError
from .experiments import crosstalk_landscape, simulate_odmr, simulate_rabi, \
    simulate_ramsey
from .fields import WireDrive, address_map, field_sample
from .synthesis import ControlScenario, OptimizerConfig, optimize, sensitivity_sweep
from .pulse_io import read_pulse, write_pulse


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1, not argparse's default 2
        raise UsageError(message)


def _parse_range(spec: str, flag: str):
    """Parse "lo:hi:n" into an evenly spaced list."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"{flag} must look like lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"{flag} must look like lo:hi:n") from None
    if n < 1:
        raise UsageError(f"{flag} needs n >= 1")
    return [lo] if n == 1 else list(np.linspace(lo, hi, n))


def _scenario_from_config(cfg: RegisterConfig, target_id: str, idle_ids):
    """Detunings from the frequency addresses at the configured DC current."""
    addr = {e.site_id: e.omega_plus
            for e in address_map(cfg.environment, cfg.drive, cfg.sites).entries}
    if target_id not in addr:
        raise ValidationError(f"unknown site id {target_id!r}", field="--target-site")
    idle = []
    for site_id in idle_ids:
        if site_id not in addr:
            raise ValidationError(f"unknown site id {site_id!r}", field="--idle-site")
        idle.append(addr[site_id] - addr[target_id])
    return ControlScenario(idle_detunings=tuple(idle), manifold=cfg.manifold)


def cmd_address_map(args) -> int:
    cfg = load_config(args.config)
    drive = WireDrive(i_dc=args.idc_ma * 1e-3, i_ac=cfg.drive.i_ac,
                      carrier=cfg.drive.carrier)
    result = address_map(cfg.environment, drive, cfg.sites)
    _write_csv(args.out, "site,u_um,f_ghz",
               [(e.site_id, e.position_u * 1e6, e.omega_plus * 1e-9)
                for e in result.entries])
    return 0


def _site_epsilons(cfg: RegisterConfig, pulse: PulseProgram):
    """Manifold-averaged departure from |0> per site, at the config carrier."""
    ground = QubitState.ground()
    offsets = cfg.manifold.detuning_offsets
    rows = []
    for site in sorted(cfg.sites, key=lambda s: s.id):
        sample = field_sample(cfg.environment, cfg.drive, site)
        delta = sample.omega_plus - cfg.drive.carrier.omega_mw
        members = [delta] if offsets[2] == 0.0 else list(delta + np.asarray(offsets))
        eps = float(np.mean([state_error(evolve(pulse, d), ground) for d in members]))
        rows.append((site.id, eps))
    return rows


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.kind == "rabi":
        times = np.linspace(0.0, args.t_max_ns * 1e-9, args.points)
        pops = simulate_rabi(args.rabi_mhz * 1e6, args.delta_mhz * 1e6, times)
        _write_csv(args.out, "t_ns,p1", zip(times * 1e9, pops))
    elif args.kind == "ramsey":
        site = cfg.site(args.site) if args.site else cfg.sites[0]
        taus = np.linspace(0.0, args.tau_max_us * 1e-6, args.points)
        signal = simulate_ramsey(args.delta_mhz * 1e6, cfg.manifold,
                                 site.coherence.t2_star, taus)
        _write_csv(args.out, "tau_us,signal", zip(taus * 1e6, signal))
    elif args.kind == "odmr":
        if args.f_min_ghz is None or args.f_max_ghz is None:
            sample = field_sample(cfg.environment, cfg.drive, cfg.sites[0])
            center = sample.omega_plus
            lo, hi = center - 10e6, center + 10e6
        else:
            lo, hi = args.f_min_ghz * 1e9, args.f_max_ghz * 1e9
        scan = np.linspace(lo, hi, args.points)
        contrast = simulate_odmr(cfg.environment, cfg.drive, cfg.sites,
                                 args.probe_rabi_mhz * 1e6, scan,
                                 args.linewidth_mhz * 1e6)
        _write_csv(args.out, "f_ghz,contrast", zip(scan * 1e-9, contrast))
    elif args.kind == "pulse":
        if not args.pulse:
            raise UsageError("simulate pulse requires --pulse")
        pulse = read_pulse(args.pulse)
        _write_csv(args.out, "site,eps", _site_epsilons(cfg, pulse))
    else:
        raise UnknownKind(f"unknown simulation kind {args.kind!r}")
    return 0


def _write_trace(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        for row in trace.rows:
            fh.write(json.dumps({
                "iteration": row.iteration,
                "f": row.f,
                "eps_i": row.eps_i,
                "eps_j": list(row.eps_j),
                "reg": row.reg,
                "step_size": row.step_size,
            }) + "\n")


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if not args.idle_site:
        raise UsageError("need at least one --idle-site")
    scenario = _scenario_from_config(cfg, args.target_site, args.idle_site)
    opt = OptimizerConfig(
        m=args.steps,
        dt=args.duration / args.steps,
        lam=getattr(args, "lambda"),
        seed=args.seed,
        restarts=args.restarts,
    )
    try:
        pulse, trace = optimize(scenario, opt)
    except Diverged as exc:
        if exc.pulse is not None:
            write_pulse(args.out_pulse, exc.pulse)
        if exc.trace is not None:
            _write_trace(args.out_trace, exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        return 3
    write_pulse(args.out_pulse, pulse)
    _write_trace(args.out_trace, trace)
    return 0


def cmd_crosstalk_map(args) -> int:
    cfg = load_config(args.config)
    us = np.linspace(args.u_min_um, args.u_max_um, args.nu) * 1e-6
    vs = np.linspace(args.v_min_um, args.v_max_um, args.nv) * 1e-6
    grid = [np.array([u, v, 0.0]) for u in us for v in vs]
    for idc_ma in args.idc_ma:
        report = crosstalk_landscape(
            cfg.environment, idc_ma * 1e-3, args.target_u_um * 1e-6,
            args.rabi_mhz * 1e6, grid,
        )
        rows = [
            (pos[0] * 1e6, pos[1] * 1e6, entry.epsilon, entry.bound)
            for pos, entry in zip(grid, report.entries)
        ]
        _write_csv(f"{args.out_prefix}_idc{idc_ma:g}ma.csv",
                   "u_um,v_um,epsilon,bound", rows)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not args.idle_site:
        raise UsageError("need at least one --idle-site")
    pulse = read_pulse(args.pulse)
    scenario = _scenario_from_config(cfg, args.target_site, args.idle_site)
    offsets = [x * 1e6 for x in _parse_range(args.delta_range, "--delta-range")]
    scales = _parse_range(args.amp_range, "--amp-range")
    points = sensitivity_sweep(pulse, scenario, offsets, scales)
    rows = [(p.delta_offset * 1e-6, p.amp_scale, p.eps_i, sum(p.eps_j))
            for p in points]
    _write_csv(args.out, "offset_mhz,scale,eps_i,eps_j", rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinmux",
                     description="Frequency-addressed spin-register workbench")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("address-map", parents=[], help="per-site addresses")
    p.add_argument("--config", required=True)
    p.add_argument("--idc-ma", type=float, required=True,
                   help="DC current in milliamperes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_address_map)

    p = sub.add_parser("simulate", help="measurement curves")
    p.add_argument("kind", choices=["rabi", "ramsey", "odmr", "pulse"])
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rabi-mhz", type=float, default=7.5)
    p.add_argument("--delta-mhz", type=float, default=0.0)
    p.add_argument("--t-max-ns", type=float, default=300.0)
    p.add_argument("--tau-max-us", type=float, default=8.0)
    p.add_argument("--points", type=int, default=601)
    p.add_argument("--site", default=None, help="site id (ramsey), default first")
    p.add_argument("--f-min-ghz", type=float, default=None)
    p.add_argument("--f-max-ghz", type=float, default=None)
    p.add_argument("--probe-rabi-mhz", type=float, default=0.2)
    p.add_argument("--linewidth-mhz", type=float, default=0.2)
    p.add_argument("--pulse", default=None, help="pulse CSV (pulse kind)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="synthesize a selective pulse")
    p.add_argument("--config", required=True)
    p.add_argument("--target-site", required=True)
    p.add_argument("--idle-site", action="append", default=[])
    p.add_argument("--lambda", type=float, default=1e-7,
                   help="smoothness weight, 1/Hz")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--duration", type=float, default=10e-6,
                   help="total pulse duration in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--out-pulse", required=True)
    p.add_argument("--out-trace", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("crosstalk-map", help="spatial flip-error maps")
    p.add_argument("--config", required=True)
    p.add_argument("--idc-ma", type=float, action="append", required=True,
                   help="repeatable; one CSV per value")
    p.add_argument("--target-u-um", type=float, required=True)
    p.add_argument("--rabi-mhz", type=float, default=10.0)
    p.add_argument("--u-min-um", type=float, required=True)
    p.add_argument("--u-max-um", type=float, required=True)
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--v-min-um", type=float, default=0.0)
    p.add_argument("--v-max-um", type=float, default=0.0)
    p.add_argument("--nv", type=int, default=1)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_crosstalk_map)

    p = sub.add_parser("sweep", help="pulse sensitivity grid")
    p.add_argument("--config", required=True)
    p.add_argument("--pulse", required=True)
    p.add_argument("--target-site", required=True)
    p.add_argument("--idle-site", action="append", default=[])
    p.add_argument("--delta-range", required=True, help="lo:hi:n in MHz")
    p.add_argument("--amp-range", required=True, help="lo:hi:n scale factors")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpinmuxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
