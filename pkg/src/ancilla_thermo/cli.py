"""Command line harness: steady-state sweeps, trajectories and validation."""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import kron, partial_trace, qubit_state, trace_norm
from .correlations import concurrence, eof_from_concurrence, effective_beta, mutual_information
from .dynamics import ATOL, NULL_REL_TOL, RTOL, SteadyStateError, evolve, make_grid, relaxation_time, steady_state
from .model import PARAM_NAMES, ModelParams

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

PRESETS: dict[str, dict] = {
    "fig1": {
        "params": dict(gamma=10.0, big_gamma=1.0, j_y=1.0, j_z=0.0, omega_s=1.0),
        "sweeps": ["omega_a:0.5:2:41", "j_x:0:2:41"],
    },
    # gamma / Gamma = 10 with the slower reading gamma = 1, Gamma = 0.1
    "fig2a": {
        "params": dict(gamma=1.0, big_gamma=0.1, j_x=1.0, j_y=1.0, j_z=0.0, omega_s=1.0, omega_a=1.0),
        "state_s": "g", "state_a": "plus", "pair": ("g", "e"),
    },
    "fig2b": {
        "params": dict(gamma=1.0, big_gamma=0.1, j_x=1.0, j_y=1.0, j_z=0.0, omega_s=1.0, omega_a=1.0),
        "state_s": "plus", "state_a": "plus", "pair": ("plus", "minus"),
    },
    "fig3": {
        "params": dict(gamma=1.0, big_gamma=0.1, j_x=1.0, j_y=1.0, j_z=0.0, omega_s=1.0, omega_a=1.0),
        "state_s": "e", "state_a": "plus", "pair": ("g", "e"),
    },
    "fig4": {
        "params": dict(gamma=1.0, big_gamma=0.1, j_x=1.0, j_y=1.0, j_z=0.0, omega_s=1.0, omega_a=1.0),
        "state_s": "e", "state_a": "plus", "pair": ("g", "e"),
    },
}

_FLAG_TO_PARAM = {
    "omega_s": "omega_s", "omega_a": "omega_a", "jx": "j_x", "jy": "j_y", "jz": "j_z",
    "gamma": "gamma", "Gamma": "big_gamma",
}
_SWEEP_ALIASES = {"jx": "j_x", "jy": "j_y", "jz": "j_z", "Gamma": "big_gamma"}


class ConfigError(ValueError):
    pass


@dataclass
class SweepAxis:
    name: str
    lo: float
    hi: float
    n: int

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"sweep axis {text!r} must look like param:min:max:n")
        name = _SWEEP_ALIASES.get(parts[0], parts[0].replace("-", "_"))
        if name not in PARAM_NAMES:
            raise ConfigError(f"unknown sweep parameter {parts[0]!r}; choose from {', '.join(PARAM_NAMES)}")
        try:
            lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"bad numbers in sweep axis {text!r}") from None
        if n < 1:
            raise ConfigError("sweep axes need at least one point")
        return cls(name, lo, hi, n)

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass
class RunConfig:
    subcommand: str
    params: ModelParams
    state_s: str = "e"
    state_a: str = "plus"
    pair: tuple[str, str] = ("g", "e")
    t_max: float | None = None
    n_steps: int = 4000
    dt: float | None = None
    t_fine: float = 1.0
    dt_fine: float = 1e-3
    sweeps: list[SweepAxis] = field(default_factory=list)
    out: str | None = None
    log_base: str = "2"
    preset: str | None = None
    workers: int = 1
    corrupt_lambda: float = 0.0

    @property
    def log_factor(self) -> float:
        """Divide nats by this to report in the selected base."""
        return math.log(2.0) if self.log_base == "2" else 1.0


# ---------------------------------------------------------------------------
# Argument handling


def _add_common(sp: argparse.ArgumentParser) -> None:
    for flag, dest in [("--omega-s", "omega_s"), ("--omega-a", "omega_a"), ("--jx", "jx"), ("--jy", "jy"),
                       ("--jz", "jz"), ("--gamma", "gamma"), ("--Gamma", "Gamma")]:
        sp.add_argument(flag, dest=dest, type=float, default=None)
    sp.add_argument("--preset", choices=sorted(PRESETS), default=None)
    sp.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    sp.add_argument("--log-base", choices=["2", "e"], default="2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ancilla-thermo", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    sw = sub.add_parser("steady-sweep", help="steady-state correlations over a 2-d parameter grid")
    _add_common(sw)
    sw.add_argument("--sweep", action="append", default=None, metavar="PARAM:MIN:MAX:N")
    sw.add_argument("--workers", type=int, default=1)

    tr = sub.add_parser("trajectory", help="time series of distances, correlations and entropy production")
    _add_common(tr)
    tr.add_argument("--state-s", default=None)
    tr.add_argument("--state-a", default=None)
    tr.add_argument("--pair-s", nargs=2, default=None, metavar=("RHO1", "RHO2"),
                    help="pair of S states for the trace distances")
    tr.add_argument("--t-max", type=float, default=None)
    tr.add_argument("--steps", type=int, default=4000)
    tr.add_argument("--dt", type=float, default=None)
    tr.add_argument("--t-fine", type=float, default=1.0)
    tr.add_argument("--dt-fine", type=float, default=1e-3)

    va = sub.add_parser("validate", help="run the cross-oracle suites")
    _add_common(va)
    va.add_argument("--corrupt-lambda", type=float, default=0.0, help=argparse.SUPPRESS)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    preset = PRESETS.get(ns.preset, {}) if ns.preset else {}
    values = dict(ModelParams().as_dict())
    values.update(preset.get("params", {}))
    for flag, name in _FLAG_TO_PARAM.items():
        v = getattr(ns, flag, None)
        if v is not None:
            values[name] = v
    try:
        params = ModelParams(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg = RunConfig(subcommand=ns.subcommand, params=params, out=ns.out, log_base=ns.log_base, preset=ns.preset)
    if ns.subcommand == "steady-sweep":
        texts = ns.sweep if ns.sweep else preset.get("sweeps", PRESETS["fig1"]["sweeps"])
        if len(texts) > 2:
            raise ConfigError("at most two sweep axes")
        cfg.sweeps = [SweepAxis.parse(s) for s in texts]
        if len(cfg.sweeps) == 2 and cfg.sweeps[0].name == cfg.sweeps[1].name:
            raise ConfigError("sweep axes must differ")
        cfg.workers = max(1, ns.workers)
    elif ns.subcommand == "trajectory":
        cfg.state_s = ns.state_s or preset.get("state_s", "e")
        cfg.state_a = ns.state_a or preset.get("state_a", "plus")
        cfg.pair = tuple(ns.pair_s) if ns.pair_s else preset.get("pair", ("g", "e"))
        for name in (cfg.state_s, cfg.state_a, *cfg.pair):
            try:
                qubit_state(name)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if ns.t_max is not None and ns.t_max <= 0:
            raise ConfigError("--t-max must be positive")
        if ns.steps < 1:
            raise ConfigError("--steps must be positive")
        if ns.dt is not None and ns.dt <= 0:
            raise ConfigError("--dt must be positive")
        cfg.t_max, cfg.n_steps, cfg.dt = ns.t_max, ns.steps, ns.dt
        cfg.t_fine, cfg.dt_fine = ns.t_fine, ns.dt_fine
    else:
        cfg.corrupt_lambda = ns.corrupt_lambda
    return cfg


# ---------------------------------------------------------------------------
# Output


def fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def write_csv(path: str | None, header: list[str], rows) -> None:
    if path is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def write_manifest(cfg: RunConfig, extra: dict) -> Path | None:
    if cfg.out is None:
        return None
    path = Path(str(cfg.out) + ".manifest")
    entries = {
        "artifact_version": __version__,
        "subcommand": cfg.subcommand,
        "preset": cfg.preset or "",
        "log_base": cfg.log_base,
        **{f"param.{k}": v for k, v in cfg.params.as_dict().items()},
        "tol.integrator_rtol": RTOL,
        "tol.integrator_atol": ATOL,
        "tol.null_space_rel": NULL_REL_TOL,
        **extra,
    }
    with open(path, "w") as fh:
        for k, v in entries.items():
            fh.write(f"{k}={fmt(v) if not isinstance(v, str) else v}\n")
    return path


# ---------------------------------------------------------------------------
# steady-sweep


def sweep_point(params: ModelParams) -> dict:
    """Steady-state record of one grid point; failures are returned, not raised."""
    try:
        ss = steady_state(params)
        rho = ss.state
        c = concurrence(rho)
        try:
            b_s = effective_beta(partial_trace(rho, "S"), params.omega_s)
        except ValueError:
            b_s = None
        try:
            b_a = effective_beta(partial_trace(rho, "A"), params.omega_a)
        except ValueError:
            b_a = None
        return dict(eof=eof_from_concurrence(c), mi=mutual_information(rho), beta_s=b_s, beta_a=b_a,
                    null_dim=ss.null_dim, residual=ss.residual, error="")
    except (SteadyStateError, ValueError, np.linalg.LinAlgError) as exc:
        return dict(eof=None, mi=None, beta_s=None, beta_a=None, null_dim=0, residual=None,
                    error=type(exc).__name__ + ": " + str(exc).replace(",", ";"))


def sweep_grid(base: ModelParams, axes: list[SweepAxis]) -> list[tuple[tuple[int, int], ModelParams]]:
    a0 = axes[0]
    a1 = axes[1] if len(axes) > 1 else None
    out = []
    for i, v0 in enumerate(a0.values()):
        vals1 = a1.values() if a1 else [None]
        for j, v1 in enumerate(vals1):
            ch = {a0.name: float(v0)}
            if a1:
                ch[a1.name] = float(v1)
            out.append(((i, j), base.replace(**ch)))
    return out


def run_sweep(cfg: RunConfig) -> list[dict]:
    grid = sweep_grid(cfg.params, cfg.sweeps)
    plist = [p for _, p in grid]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            recs = list(ex.map(sweep_point, plist, chunksize=32))
    else:
        recs = [sweep_point(p) for p in plist]
    rows = []
    for (idx, p), r in zip(grid, recs):
        rows.append({"i": idx[0], "j": idx[1], "params": p, **r})
    rows.sort(key=lambda r: (r["i"], r["j"]))
    return rows


def cmd_steady_sweep(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    rows = run_sweep(cfg)
    f = cfg.log_factor
    header = ["i", "j", *PARAM_NAMES, "eof", "mutual_info", "beta_eff_s", "beta_eff_a", "null_dim",
              "residual", "error"]
    out = []
    for r in rows:
        p = r["params"]
        out.append([r["i"], r["j"], *[getattr(p, k) for k in PARAM_NAMES],
                    None if r["eof"] is None else r["eof"] * math.log(2.0) / f,
                    None if r["mi"] is None else r["mi"] / f,
                    r["beta_s"], r["beta_a"], r["null_dim"], r["residual"], r["error"]])
    write_csv(cfg.out, header, out)
    extra = {"sweep.count": len(cfg.sweeps)}
    for k, a in enumerate(cfg.sweeps):
        extra.update({f"sweep{k}.param": a.name, f"sweep{k}.min": a.lo, f"sweep{k}.max": a.hi,
                      f"sweep{k}.n": a.n})
    extra["rows"] = len(out)
    extra["failed_rows"] = sum(1 for r in rows if r["error"])
    extra["workers"] = cfg.workers
    extra["runtime_s"] = time.perf_counter() - t0
    write_manifest(cfg, extra)
    return EXIT_OK


# ---------------------------------------------------------------------------
# trajectory


def trajectory_grid(cfg: RunConfig) -> np.ndarray:
    t_max = cfg.t_max if cfg.t_max is not None else relaxation_time(cfg.params)
    if cfg.dt is not None:
        n = max(1, int(math.ceil(t_max / cfg.dt)))
        return np.linspace(0.0, n * cfg.dt, n + 1)
    return make_grid(t_max, cfg.n_steps, cfg.t_fine, cfg.dt_fine)


def run_trajectory(cfg: RunConfig) -> dict:
    from .correlations import mutual_information_series
    from .nonmarkov import distance_trajectory
    from .thermo import thermo_trajectory

    p = cfg.params
    t = trajectory_grid(cfg)
    rho0 = kron(qubit_state(cfg.state_s), qubit_state(cfg.state_a))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        traj = evolve(p, rho0, t)
        th = thermo_trajectory(traj, p)
        pu = p.uncoupled()
        traj_u = evolve(pu, rho0, t)
        th_u = thermo_trajectory(traj_u, pu)
    dist = distance_trajectory(p, tuple(qubit_state(s) for s in cfg.pair), qubit_state(cfg.state_a), t)
    ss = steady_state(p).state
    eof_bits = np.array([eof_from_concurrence(concurrence(r)) for r in traj.states])
    return dict(t=t, traj=traj, thermo=th, thermo_u=th_u, dist=dist, eof_bits=eof_bits,
                mi=mutual_information_series(traj.states),
                final_distance=trace_norm(traj.states[-1] - ss))


TRAJ_HEADER = [
    "k", "t", "d_sa", "d_s", "mutual_info", "eof", "sigma_sa", "sigma_s", "sigma_a", "mi_rate", "Sigma",
    "decomp_residual", "near_singular", "sigma_sa_uncoupled", "sigma_s_uncoupled", "Sigma_uncoupled",
]


def cmd_trajectory(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    res = run_trajectory(cfg)
    f = cfg.log_factor
    th, tu, d = res["thermo"], res["thermo_u"], res["dist"]
    rows = []
    for k, tk in enumerate(res["t"]):
        rows.append([
            k, tk, d.d_sa[k], d.d_s[k], res["mi"][k] / f, res["eof_bits"][k] * math.log(2.0) / f,
            th.sigma_sa[k], th.sigma_s[k], th.sigma_a[k], th.mi_rate[k], th.entropy_production_s[k],
            th.decomposition_residual[k], th.near_singular[k],
            tu.sigma_sa[k], tu.sigma_s[k], tu.entropy_production_s[k],
        ])
    write_csv(cfg.out, TRAJ_HEADER, rows)
    t = res["t"]
    write_manifest(cfg, {
        "state_s": cfg.state_s, "state_a": cfg.state_a, "pair_s": " ".join(cfg.pair),
        "grid.t_max": float(t[-1]), "grid.points": len(t), "grid.t_fine": cfg.t_fine,
        "grid.dt_fine": cfg.dt_fine, "grid.dt": cfg.dt if cfg.dt else "",
        "relaxation.trace_norm_at_t_max": res["final_distance"],
        "revivals_d_s": len(d.revivals),
        "thermodynamic_reference": int(th.thermodynamic),
        "rates.entropy_units": "nats",
        "runtime_s": time.perf_counter() - t0,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate


def cmd_validate(cfg: RunConfig) -> int:
    from .validation import run_suites

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = run_suites(cfg.params, corrupt_lambda=cfg.corrupt_lambda)
    failed = False
    lines = []
    for r in results:
        lines.append(r.line())
        failed |= r.status == "FAIL"
    lines.append("overall: " + ("FAIL" if failed else "PASS"))
    text = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"steady-sweep": cmd_steady_sweep, "trajectory": cmd_trajectory, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
