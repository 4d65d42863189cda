"""Command-line front end: ``qzeno {run-cycle,sweep,predict,print-config}``."""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile
from dataclasses import replace
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .analysis import SweepSpec, leakage_estimate, run_sweep, zeno_survival_estimate
from .config import RunConfig, load_config
from .cycle import CycleParams, MachineMode, run_cycles
from .errors import ConfigurationError, PredictorRangeError, ZenoError
from .propagator import StepParams
from .qho import TrapProtocol, eigenstate, make_grid
from .zeno import ZenoConfig, zeno_stroke

log = logging.getLogger("qzeno")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUN = 3
EXIT_IO = 4
N_POP_COLUMNS = 9


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


class OutputSet:
    """Collects CSV files and publishes them together by atomic rename."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.files: Dict[str, List[str]] = {}

    def add(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        lines = [",".join(header)]
        lines.extend(",".join(fmt(v) for v in row) for row in rows)
        self.files[name] = lines

    def commit(self) -> List[str]:
        try:
            os.makedirs(self.out_dir, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {self.out_dir}: {exc.strerror}") from None
        mask = os.umask(0)
        os.umask(mask)
        staged = []
        try:
            for name, lines in self.files.items():
                fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.out_dir)
                with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write("\n".join(lines) + "\n")
                os.chmod(tmp, 0o666 & ~mask)
                staged.append((tmp, os.path.join(self.out_dir, name)))
        except OSError as exc:
            for tmp, _ in staged:
                os.unlink(tmp)
            raise OSError(f"cannot write to {self.out_dir}: {exc.strerror}") from None
        for tmp, final in staged:
            os.replace(tmp, final)
        return [final for _, final in staged]


def cycle_params_from(cfg: RunConfig, n_cycles=None) -> CycleParams:
    c = cfg.values["cycle"]
    g = cfg.values["grid"]
    M, omega = c["M"], c["Omega"]
    if cfg.was_set("cycle", "Omega"):
        if cfg.was_set("cycle", "M"):
            raise ConfigurationError("set cycle.M or cycle.Omega, not both", key="cycle.Omega")
        M = None
    record = cfg.values["output"]
    strides = []
    for flag, key in (("populations", "population_stride"), ("densities", "density_stride")):
        if record[flag]:
            if record[key] < 1:
                raise ConfigurationError("output strides must be >= 1", key=f"output.{key}")
            strides.append(record[key])
    stride = math.gcd(*strides) if strides else None
    return CycleParams(
        K=c["K"], T=c["T"], M=M, omega=omega, dt=c["dt"],
        n_cycles=n_cycles or c["n_cycles"], machine_mode=c["mode"],
        renorm_mode=c["renorm_mode"], ladder_renorm=c["ladder_renorm"], unit=c["unit"],
        n_max=c["n_max"], grid=make_grid(g["n_points"], g["length"]),
        record_stride=stride, record_density=record["densities"],
    )


def _threads(cfg: RunConfig, flag) -> int:
    if flag is not None:
        return flag
    if "THREADS" in os.environ:
        try:
            return max(1, int(os.environ["THREADS"]))
        except ValueError:
            raise ConfigurationError("THREADS must be an integer", key="THREADS") from None
    return cfg.get("run", "threads")


def cmd_run_cycle(cfg: RunConfig, out: OutputSet) -> int:
    params = cycle_params_from(cfg)
    run = run_cycles(params)
    out.add(
        "cycles.csv",
        ["cycle", "Q_in", "Q_out", "W_compress", "W_expand", "xi_or_eta",
         "survival_1", "survival_2", "norm_end"],
        ([r.index, r.Q_in, r.Q_out, r.W_compress, r.W_expand,
          math.nan if r.performance is None else r.performance,
          r.survival_per_stroke[0], r.survival_per_stroke[1], r.norm_end]
         for r in run.records),
    )
    opts = cfg.values["output"]
    T = params.T
    pop_rows, dens_rows = [], []
    x = params.grid.x
    for r in run.records:
        for s, stroke in enumerate(r.strokes):
            offset = (2 * r.index + s) * T
            for snap_i, snap in enumerate(stroke.population_trace):
                step_i = int(round(snap.t / params.dt))
                if opts["populations"] and (step_i % opts["population_stride"] == 0
                                            or snap_i == len(stroke.population_trace) - 1):
                    pop_rows.append([offset + snap.t, *snap.P[:N_POP_COLUMNS], snap.residual])
            if opts["densities"] and stroke.density_trace is not None:
                last = len(stroke.density_trace) - 1
                for snap_i, (t, dens) in enumerate(stroke.density_trace):
                    step_i = int(round(t / params.dt))
                    if step_i % opts["density_stride"] and snap_i != last:
                        continue
                    for xi, d in zip(x, dens):
                        if opts["compact_density"] and d <= 1e-12:
                            continue
                        dens_rows.append([offset + t, xi, d])
    if opts["populations"]:
        out.add("populations.csv",
                ["t"] + [f"P{n}" for n in range(N_POP_COLUMNS)] + ["residual"], pop_rows)
    if opts["densities"]:
        out.add("densities.csv", ["t", "x", "density"], dens_rows)
    label = "xi" if params.machine_mode is MachineMode.HEAT_PUMP else "eta"
    log.info("%d cycles, mean %s = %.6f (%d excluded, %d failed)",
             len(run.records), label, run.mean, run.n_excluded, run.n_failed)
    return EXIT_OK if run.n_failed == 0 else EXIT_RUN


def sweep_spec_from(cfg: RunConfig) -> SweepSpec:
    s = cfg.values["sweep"]
    template = cycle_params_from(cfg, n_cycles=s["cycles_per_point"])
    template = replace(template, record_stride=None, record_density=False)
    use_omega = cfg.was_set("sweep", "OmegaT_values")
    if use_omega and cfg.was_set("sweep", "M_values"):
        raise ConfigurationError("set sweep.M_values or sweep.OmegaT_values, not both",
                                 key="sweep.OmegaT_values")
    for key in ("K_values", "T_values"):
        if not s[key]:
            raise ConfigurationError(f"sweep.{key} must not be empty", key=f"sweep.{key}")
    kw = {"OmegaT_values": s["OmegaT_values"]} if use_omega else {"M_values": s["M_values"]}
    if not next(iter(kw.values())):
        raise ConfigurationError("measurement list must not be empty", key="sweep.M_values")
    return SweepSpec(s["K_values"], s["T_values"], template,
                     cycles_per_point=s["cycles_per_point"], **kw)


def cmd_sweep(cfg: RunConfig, out: OutputSet, threads: int = 1, reference_cutoff=None) -> int:
    spec = sweep_spec_from(cfg)
    table = run_sweep(spec, threads=threads)
    heat = table.mode is MachineMode.HEAT_PUMP
    perf, opt = ("xi_bar", "xi_opt") if heat else ("eta_bar", "eta_opt")
    header = ["K", "T", "M", "OmegaT", perf, opt, "gap", "mean_survival", "adiab_param",
              "failed_cycles"]
    if reference_cutoff is not None:
        header += ["reference_cutoff", "faster_than_reference"]
    rows = []
    for r in table.rows:
        row = [r.K, r.T, r.M, r.OmegaT, r.mean_perf, r.optimum, r.gap, r.mean_survival,
               r.adiab_param, r.failed_cycles]
        if reference_cutoff is not None:
            row += [reference_cutoff, r.T < reference_cutoff]
        rows.append(row)
        if r.failed:
            log.error("point K=%g T=%g M=%d failed: %s", r.K, r.T, r.M, r.error)
    out.add("sweep.csv", header, rows)
    return EXIT_RUN if any(r.failed for r in table.rows) else EXIT_OK


def cmd_predict(cfg: RunConfig, out: OutputSet) -> int:
    p = cfg.values["predict"]
    if not p["K"] > 0 or not p["T"] > 0:
        raise ConfigurationError("predict needs K > 0 and T > 0", key="predict.K")
    if p["ramp"] not in ("up", "down"):
        raise ConfigurationError("predict.ramp must be 'up' or 'down'", key="predict.ramp")
    if not p["M_values"]:
        raise ConfigurationError("predict.M_values must not be empty", key="predict.M_values")
    f0, f1 = (1.0, p["K"]) if p["ramp"] == "up" else (p["K"], 1.0)
    proto = TrapProtocol(f0, f1, p["T"])
    c = cfg.values["cycle"]
    g = cfg.values["grid"]
    step = StepParams(c["dt"], c["unit"])
    grid = make_grid(g["n_points"], g["length"])
    rows = []
    for M in p["M_values"]:
        if M < 1:
            raise ConfigurationError("predict.M_values entries must be >= 1",
                                     key="predict.M_values")
        leak = leakage_estimate(p["level"], proto, p["T"] / M)
        status = "ok"
        try:
            est = zeno_survival_estimate(p["level"], proto, M)
        except PredictorRangeError:
            est, status = math.nan, "out_of_range"
        sim = ratio = None
        if p["simulate"]:
            psi = eigenstate(grid, p["level"], f0)
            res = zeno_stroke(psi, proto, ZenoConfig(p["level"], M, c["renorm_mode"]), step)
            sim = res.survival
            ratio = (1 - sim) / (1 - est) if status == "ok" and est < 1 else math.nan
        rows.append([M, leak, est, sim, ratio, status])
    out.add("predict.csv",
            ["M", "leakage_per_interval", "survival_estimate", "simulated_survival", "ratio",
             "status"],
            rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="sectioned key = value configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a configuration key (repeatable)")
    common.add_argument("--out-dir", help="directory for CSV outputs")
    common.add_argument("--threads", type=int, help="worker processes for sweeps")
    common.add_argument("--reference-cutoff", type=float,
                        help="externally computed shortcut-to-adiabaticity cut-off time to annotate")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="qzeno",
                                     description="Quantum Zeno engine and heat pump simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run-cycle", parents=[common], help="run a chain of cycles")
    sub.add_parser("sweep", parents=[common], help="sweep (K, T, M) and average performance")
    sub.add_parser("predict", parents=[common], help="analytic Zeno survival predictions")
    sub.add_parser("print-config", parents=[common], help="print the effective configuration")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config, args.overrides)
        if args.out_dir is not None:
            cfg.set(f"output.out_dir={args.out_dir}")
        if args.reference_cutoff is not None:
            cfg.set(f"run.reference_cutoff={args.reference_cutoff!r}")
        if args.command == "print-config":
            sys.stdout.write(cfg.dump())
            return EXIT_OK
        out = OutputSet(cfg.get("output", "out_dir"))
        if args.command == "run-cycle":
            code = cmd_run_cycle(cfg, out)
        elif args.command == "sweep":
            code = cmd_sweep(cfg, out, _threads(cfg, args.threads),
                             cfg.get("run", "reference_cutoff"))
        else:
            code = cmd_predict(cfg, out)
        for path in out.commit():
            log.info("wrote %s", path)
        return code
    except ConfigurationError as exc:
        where = f" [{exc.key}]" if exc.key else ""
        print(f"qzeno: configuration error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qzeno: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ZenoError as exc:
        print(f"qzeno: run failed: {exc}", file=sys.stderr)
        return EXIT_RUN


if __name__ == "__main__":
    sys.exit(main())
