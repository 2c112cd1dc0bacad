"""Batch command-line front end.

Grammar:  sbwave <command> key=value ...

Commands: wave, branch, spectrum, index, evolve, orbital, continue, probe.
Parameters come from key=value tokens, optionally merged over an
INI-style file given as config=FILE (command line wins).  The output
directory is the `out` key, overridden by the SBWAVE_OUT environment
variable.  A `sweep` meta-key of the form sweep=key:v1,v2,... fans the
run out over independent worker threads, one output subdirectory per
value.

Every run writes a manifest (config echo, package version, wall time)
and stamps each data file with the sha256 hash of its producing
configuration.  Data files carry no timestamps, so identical
configurations reproduce byte-identical output.

Exit codes: 0 success, 2 validation error, 3 numerical error.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cnoidal import build_wave, ode_residual
from .continuation import continue_branch, pair_from_wave, smallest_singular_value
from .errors import NumericalError, ResolutionError, SbwaveError, TruncationError
from .evolution import SBState, SolverConfig, evolve
from .functionals import d_second
from .hill import kernel_check, spectrum
from .orbital import random_x_perturbation, stability_experiment
from .probe import (
    bilinear_ratio_sample,
    counterexample_slope,
    lemma31_check,
    lemma32_sup,
    lemma33_sup,
)

COMMANDS = ("wave", "branch", "spectrum", "index", "evolve", "orbital", "continue", "probe")


class ValidationError(SbwaveError, ValueError):
    """Bad or missing CLI parameters (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict


# ---------------------------------------------------------------------------
# canonical serialization


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(float(x), ".17g")


def dumps_canonical(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            items.append(f'{pad}  "{key}": ' + dumps_canonical(obj[key], indent + 2).lstrip())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        items = [pad + "  " + dumps_canonical(v, indent + 2).lstrip() for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]" if items else "[]"
    if isinstance(obj, bool):
        return pad + ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return pad + str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return pad + _fmt_float(float(obj))
    if obj is None:
        return pad + "null"
    return pad + json.dumps(str(obj))


def config_hash(config: RunConfig) -> str:
    payload = dumps_canonical({"command": config.command, "params": config.params})
    return hashlib.sha256(payload.encode()).hexdigest()


class OutputWriter:
    """Writes data files stamped with the producing configuration's hash."""

    def __init__(self, config: RunConfig, out_dir: Path):
        self.hash = config_hash(config)
        self.dir = out_dir
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def json(self, name: str, payload: dict):
        payload = dict(payload)
        payload["config_hash"] = self.hash
        path = self.dir / name
        path.write_text(dumps_canonical(payload) + "\n")
        self.files.append(str(path))
        return path

    def csv(self, name: str, header, rows):
        path = self.dir / name
        with path.open("w") as fh:
            fh.write(f"# config_hash={self.hash}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(
                    _fmt_float(v) if isinstance(v, (float, np.floating)) else str(v)
                    for v in row) + "\n")
        self.files.append(str(path))
        return path


# ---------------------------------------------------------------------------
# parameter access


def _require(params, key):
    if key not in params:
        raise ValidationError(f"missing required key '{key}'")
    return params[key]


def _get_float(params, key, default=None):
    raw = params.get(key)
    if raw is None:
        if default is None:
            raise ValidationError(f"missing required key '{key}'")
        return float(default)
    try:
        return float(raw)
    except ValueError as exc:
        raise ValidationError(f"key '{key}' must be a number, got {raw!r}") from exc


def _get_int(params, key, default=None):
    raw = params.get(key)
    if raw is None:
        if default is None:
            raise ValidationError(f"missing required key '{key}'")
        return int(default)
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"key '{key}' must be an integer, got {raw!r}") from exc


def _get_str(params, key, default=None, choices=None):
    raw = params.get(key, default)
    if raw is None:
        raise ValidationError(f"missing required key '{key}'")
    if choices and raw not in choices:
        raise ValidationError(f"key '{key}' must be one of {choices}, got {raw!r}")
    return raw


def _get_floats(params, key, default=None):
    """Comma list '0.8,1.0' or range syntax 'lo:hi:step'."""
    raw = params.get(key, default)
    if raw is None:
        raise ValidationError(f"missing required key '{key}'")
    if isinstance(raw, (list, tuple)):
        return [float(v) for v in raw]
    try:
        if ":" in raw:
            lo, hi, step = (float(v) for v in raw.split(":"))
            n = int(round((hi - lo) / step))
            return [lo + i * step for i in range(n + 1)]
        return [float(v) for v in raw.split(",") if v != ""]
    except ValueError as exc:
        raise ValidationError(f"cannot parse list '{key}' = {raw!r}") from exc


# ---------------------------------------------------------------------------
# command implementations


def _cmd_wave(params, writer):
    L = _get_float(params, "L")
    omega = _get_float(params, "omega")
    N = _get_int(params, "N", 256)
    profile = build_wave(omega, L, N)
    resid = ode_residual(profile)
    writer.csv("wave_profile.csv", ("x", "psi"),
               zip(profile.field.grid.x, profile.psi))
    writer.json("wave_params.json", {**profile.to_dict(), "ode_residual_sup": resid})


def _cmd_branch(params, writer):
    L = _get_float(params, "L")
    omegas = _get_floats(params, "omegas")
    N = _get_int(params, "N", 256)
    records = []
    for om in omegas:
        profile = build_wave(om, L, N)
        records.append({**profile.to_dict(), "ode_residual_sup": ode_residual(profile)})
    writer.csv(
        "branch.csv",
        ("omega", "beta1", "beta2", "beta3", "k", "rho", "K", "E", "residual"),
        [(r["omega"], r["beta1"], r["beta2"], r["beta3"], r["k"], r["rho"],
          r["K"], r["E"], r["ode_residual_sup"]) for r in records],
    )
    writer.json("branch_params.json", {"L": L, "N": N, "waves": records})


def _cmd_spectrum(params, writer):
    kind = _get_str(params, "kind", choices=("L1", "L2", "AR", "AI"))
    L = _get_float(params, "L")
    omega = _get_float(params, "omega", 1.0)
    N = _get_int(params, "N", 256)
    m = _get_int(params, "m", 5)
    wave = build_wave(omega, L, N)
    spec = spectrum(kind, wave, m)
    payload = spec.to_dict()
    payload["kernel_residual"] = kernel_check(kind, wave)["residual"]
    writer.json(f"spectrum_{kind}.json", payload)


def _cmd_index(params, writer):
    L = _get_float(params, "L")
    omegas = _get_floats(params, "omegas")
    N = _get_int(params, "N", 256)
    rows = [d_second(om, L, N) for om in omegas]
    writer.csv(
        "stability_index.csv",
        ("omega", "d_prime", "d_second_analytic", "d_second_fd"),
        [r.csv_row() for r in rows],
    )
    writer.json("stability_index.json", {
        "L": L, "N": N,
        "rows": [{"omega": r.omega, "d_prime": r.d_prime, "d_second": r.d_second,
                  "d_second_fd": r.d_second_fd, "G": r.G, "H": r.H} for r in rows],
    })


def _initial_state(params, grid_n, L, omega):
    from .grid import FourierGrid

    init = _get_str(params, "init", "standing", choices=("standing", "random"))
    if init == "standing":
        profile = build_wave(omega, L, grid_n)
        return SBState.standing_wave(profile)
    amp = _get_float(params, "amp", 0.1)
    seed = _get_int(params, "seed", 0)
    grid = FourierGrid(L, grid_n)
    du, dv, dw = random_x_perturbation(grid, amp, seed)
    return SBState(0.0, grid, du.astype(complex), dv.astype(complex), dw.astype(complex))


def _cmd_evolve(params, writer):
    L = _get_float(params, "L", 13.0)
    N = _get_int(params, "N", 256)
    omega = _get_float(params, "omega", 1.0)
    T = _get_float(params, "T")
    cfg = SolverConfig(
        dt=_get_float(params, "dt"),
        alpha=_get_float(params, "alpha", -1.0),
        beta=_get_float(params, "beta", -1.0),
        dealias=bool(_get_int(params, "dealias", 1)),
        monitor_stride=_get_int(params, "monitor", 100),
        check_conservation=bool(_get_int(params, "check_conservation", 1)),
    )
    state = _initial_state(params, N, L, omega)
    result = evolve(state, T, cfg)
    writer.json("evolve_monitors.json", {
        "L": L, "N": N, "T": T, "dt": cfg.dt,
        "alpha": cfg.alpha, "beta": cfg.beta,
        "mass_drift": result.mass_drift,
        "energy_drift": result.energy_drift,
        "envelope_constant": result.envelope_constant,
        "envelope_rate": result.envelope_rate,
        "envelope_base": result.envelope_base,
        "monitors": [{"t": r.time, "mass": r.mass, "energy": r.energy,
                      "b_norm": r.b_norm} for r in result.reports],
    })
    final = result.final
    u = final.grid.values_of(final.u_hat)
    v = np.real(final.grid.values_of(final.v_hat))
    writer.csv("evolve_final.csv", ("t", "x", "re_u", "im_u", "v"),
               [(final.t, x, ur, ui, vv)
                for x, ur, ui, vv in zip(final.grid.x, u.real, u.imag, v)])


def _cmd_orbital(params, writer):
    L = _get_float(params, "L", 13.0)
    N = _get_int(params, "N", 256)
    omega = _get_float(params, "omega", 1.0)
    eps = _get_float(params, "eps")
    T = _get_float(params, "T")
    n_snapshots = _get_int(params, "n_snapshots", 11)
    seed = _get_int(params, "seed", 0)
    cfg = SolverConfig(dt=_get_float(params, "dt", 1e-3),
                       monitor_stride=_get_int(params, "monitor", 200))
    wave = build_wave(omega, L, N)
    series = stability_experiment(eps, T, n_snapshots, cfg, wave, seed=seed)
    writer.csv("orbital_series.csv", ("t", "distance", "best_phase", "best_shift"),
               [(t, r.distance, r.best_phase, r.best_shift) for t, r in series])
    writer.json("orbital_manifest.json", {
        "seed": seed, "eps": eps, "T": T, "L": L, "N": N,
        "omega": omega, "dt": cfg.dt,
        "max_distance": max(r.distance for _, r in series),
    })


def _cmd_continue(params, writer):
    L = _get_float(params, "L")
    lo = _get_float(params, "lo", 0.9)
    hi = _get_float(params, "hi", 1.1)
    step = _get_float(params, "step", 0.01)
    N = _get_int(params, "N", 256)
    write_profiles = bool(_get_int(params, "profiles", 0))
    n = int(round((hi - lo) / step))
    omegas = [lo + i * step for i in range(n + 1)]
    seed_profile = build_wave(1.0, L, N)
    start = pair_from_wave(seed_profile)
    pairs = continue_branch(omegas, step, start)
    writer.csv("continuation_branch.csv",
               ("omega", "psi_min", "psi_max", "residual"),
               [p.to_row() for p in pairs])
    writer.json("continuation_summary.json", {
        "L": L, "N": N, "omegas": omegas,
        "max_residual": max(p.residual_norm for p in pairs),
        "jacobian_min_singular_value_at_1": smallest_singular_value(1.0, start),
    })
    if write_profiles:
        for p in pairs:
            writer.csv(f"continuation_profile_{p.omega:.4f}.csv",
                       ("x", "psi", "phi"),
                       zip(p.psi.grid.x, p.psi.real_values, p.phi.real_values))


def _cmd_probe(params, writer):
    mode = _get_str(params, "mode", "slope",
                    choices=("slope", "ratio", "lemma31", "lemma32", "lemma33"))
    if mode == "slope":
        report = counterexample_slope(
            case=_get_str(params, "case", choices=("i", "ii", "iii")),
            k=_get_float(params, "k"),
            s=_get_float(params, "s"),
            a=_get_float(params, "a", 0.3),
            b=_get_float(params, "b", 0.6),
            N_list=[int(v) for v in _get_floats(params, "N_list", "8,16,32,64,128")],
        )
        writer.json("probe_slope.json", report.to_dict())
    elif mode == "ratio":
        report = bilinear_ratio_sample(
            s=_get_float(params, "s", 0.0),
            a=_get_float(params, "a", 0.3),
            b=_get_float(params, "b", 0.6),
            n_trials=_get_int(params, "trials", 50),
            seed=_get_int(params, "seed", 0),
        )
        writer.json("probe_ratio.json", {
            "s": report.s, "a": report.a, "b": report.b,
            "n_trials": report.n_trials, "seed": report.seed,
            "max_ratio_schrodinger_target": report.max_ratio_sv,
            "max_ratio_boussinesq_target": report.max_ratio_ss,
            "max_ratio": report.max_ratio,
        })
    elif mode == "lemma33":
        sup, inf = lemma33_sup(
            _get_float(params, "x_max", 100.0),
            _get_float(params, "y_max", 100.0),
            _get_int(params, "n_points", 2001),
        )
        writer.json("probe_lemma33.json", {"sup_ratio": sup, "inf_ratio": inf})
    elif mode == "lemma32":
        report = lemma32_sup(
            gamma=_get_float(params, "gamma"),
            n_grid=_get_int(params, "n_grid", 10),
            tau_samples=_get_int(params, "tau_samples", 21),
            N1_max=_get_int(params, "N1_max", 10000),
            allow_subcritical=bool(_get_int(params, "allow_subcritical", 0)),
        )
        writer.json("probe_lemma32.json", {
            "gamma": report.gamma, "sup_value": report.sup_value,
            "tail_fraction": report.tail_fraction,
            "saturated": report.saturated, "N1_max": report.n1_max,
        })
    else:
        c_max, rows = lemma31_check(
            p=_get_float(params, "p"),
            q=_get_float(params, "q"),
            alphas=_get_floats(params, "alphas", "0"),
            betas=_get_floats(params, "betas", "0,1,10,100,1000"),
        )
        writer.json("probe_lemma31.json", {
            "p": _get_float(params, "p"), "q": _get_float(params, "q"),
            "max_constant": c_max,
            "table": [{"alpha": a, "beta": b, "constant": c} for a, b, c in rows],
        })


_DISPATCH = {
    "wave": _cmd_wave,
    "branch": _cmd_branch,
    "spectrum": _cmd_spectrum,
    "index": _cmd_index,
    "evolve": _cmd_evolve,
    "orbital": _cmd_orbital,
    "continue": _cmd_continue,
    "probe": _cmd_probe,
}


# ---------------------------------------------------------------------------
# driver


def parse_argv(argv) -> RunConfig:
    if not argv:
        raise ValidationError(f"usage: sbwave <command> key=value ...; commands: {COMMANDS}")
    command = argv[0]
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}; commands: {COMMANDS}")
    params = {}
    for token in argv[1:]:
        if "=" not in token:
            raise ValidationError(f"expected key=value, got {token!r}")
        key, _, value = token.partition("=")
        params[key.strip()] = value.strip()
    if "config" in params:
        file_params = _read_ini(params.pop("config"))
        file_params.update(params)  # command line wins
        params = file_params
    return RunConfig(command=command, params=params)


def _read_ini(path: str) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValidationError(f"cannot read config file {path!r}")
    section = "sbwave" if parser.has_section("sbwave") else parser.default_section
    return dict(parser[section])


def _out_dir(params) -> Path:
    env = os.environ.get("SBWAVE_OUT")
    return Path(env if env else params.get("out", "."))


def run(config: RunConfig, out_override=None) -> int:
    """Execute one command; returns the process exit code."""
    t0 = time.monotonic()
    params = dict(config.params)
    sweep = params.pop("sweep", None)
    if sweep is not None:
        return _run_sweep(config.command, params, sweep)
    config = RunConfig(config.command, params)
    out = Path(out_override) if out_override else _out_dir(params)
    try:
        writer = OutputWriter(config, out)
        _DISPATCH[config.command](params, writer)
    except ValidationError as exc:
        _emit_error(exc, 2)
        return 2
    except (NumericalError, ResolutionError, TruncationError) as exc:
        _emit_error(exc, 3)
        return 3
    except SbwaveError as exc:  # domain/usage errors from the modules
        _emit_error(exc, 2)
        return 2
    manifest = {
        "command": config.command,
        "params": params,
        "config_hash": config_hash(config),
        "version": __version__,
        "wall_time_s": time.monotonic() - t0,
        "timestamp_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": sorted(writer.files),
    }
    (out / f"{config.command}_manifest.json").write_text(dumps_canonical(manifest) + "\n")
    return 0


def _run_sweep(command, params, sweep) -> int:
    try:
        key, _, values = sweep.partition(":")
        value_list = [v for v in values.split(",") if v]
        if not key or not value_list:
            raise ValueError
    except ValueError:
        _emit_error(ValidationError(f"sweep must look like key:v1,v2,..., got {sweep!r}"), 2)
        return 2
    base_out = _out_dir(params)

    def one(value):
        sub = dict(params)
        sub[key] = value
        return run(RunConfig(command, sub),
                   out_override=base_out / f"sweep_{key}_{value}")

    with ThreadPoolExecutor(max_workers=min(4, len(value_list))) as pool:
        codes = list(pool.map(one, value_list))
    return max(codes)


def _emit_error(exc, code):
    record = {"error": type(exc).__name__, "message": str(exc), "exit": code}
    print(json.dumps(record), file=sys.stderr)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_argv(argv)
    except ValidationError as exc:
        _emit_error(exc, 2)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
