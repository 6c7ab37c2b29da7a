"""Command-line interface.

    photon-bundles <command> [--config FILE] [--<key> VALUE ...]

Commands: steady, sweep, gtau, resonance, validate, fullmodel.  The config
file holds one ``key = value`` per line with ``#`` comments; any key can also
be given as a flag, and flags win over the file.  Frequencies are in units of
the cavity decay rate.  Exit codes: 0 success, 1 bad input, 2 numerical or
validation failure.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .correlations import DEFAULT_TAU_MAX, DEFAULT_TAU_POINTS, classify, compute_record, gn2_tau
from .errors import ConfigError, NumericalFailure, UndefinedCorrelation
from .fullmodel import compare_models
from .hilbert import SpaceConfig
from .lindblad import DEFAULT_CUTOFFS, model_liouvillian, steady_state
from .model import AuxCavityParams, SystemParams, wrap_phase
from .spectrum import PHI_TRIPLE, resonance_curves
from .sweep import Axis, SweepSpec, format_value, run_sweep, to_csv, write_csv
from .validation import run_suites

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
PHI_TOKENS = {"0": 0.0, "2pi3": PHI_TRIPLE, "pi": math.pi}
FREQUENCY_COLUMNS = {"delta_a", "chi", "delta", "omega", "gamma_e", "delta_a_root"}


def parse_phi(text: str) -> float:
    """Symbolic phase token (0, 2pi3, pi) or raw radians, wrapped to [0, 2 pi)."""
    text = text.strip()
    if text in PHI_TOKENS:
        return PHI_TOKENS[text]
    try:
        return wrap_phase(float(text))
    except ValueError:
        raise ConfigError(f"phi: expected 0, 2pi3, pi or radians, got {text!r}") from None


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _int(text: str) -> int:
    return int(text)


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _str(text: str) -> str:
    return text.strip()


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


# key -> (parser, help)
KEYS = {
    # model
    "delta_a": (_float, "cavity detuning"),
    "delta_a_over_g": (_float, "cavity detuning in units of g_a (alternative to delta_a)"),
    "alpha": (_float, "atomic detuning delta = alpha * delta_a (default 0.5)"),
    "delta_rule": (_str, "alpha | chi_over_g"),
    "delta": (_float, "absolute atomic detuning, overrides the rule"),
    "omega": (_float, "drive amplitude (default 0.5)"),
    "g_a": (_float, "atom-cavity coupling (default 10)"),
    "chi": (_float, "spin-exchange strength"),
    "chi_over_g": (_float, "spin-exchange strength in units of g_a (alternative to chi)"),
    "phi": (parse_phi, "geometric phase: 0, 2pi3, pi or radians"),
    "kappa_a": (_float, "cavity decay (default 1, the unit)"),
    "gamma": (_float, "atomic decay (default 0.2)"),
    "gamma_e": (_float, "extra atomic decay from the auxiliary cavity (default 0)"),
    # space
    "cutoff": (_int, "cavity photon cutoff N_c"),
    "cutoffs": (_int_list, "ascending cutoffs for the convergence scan"),
    # tau grid and traces
    "tau_max": (_float, "largest delay (default 10)"),
    "tau_points": (_int, "number of delays including 0 (default 200)"),
    "bundles": (_int_list, "bundle sizes n for g_n^(2)(tau), e.g. 1,2,3"),
    # sweep
    "axis1": (_str, "first sweep axis"),
    "axis1_min": (_float, "first axis start"),
    "axis1_max": (_float, "first axis stop"),
    "axis1_points": (_int, "first axis points"),
    "axis2": (_str, "optional second sweep axis"),
    "axis2_min": (_float, "second axis start"),
    "axis2_max": (_float, "second axis stop"),
    "axis2_points": (_int, "second axis points"),
    "observables": (_str_list, "extra sweep columns: residual, gamma_e, p<q>, pt<q>"),
    "workers": (_int, "sweep worker processes (default 1)"),
    # resonance
    "manifolds": (_int_list, "manifolds for resonance curves (default by phi)"),
    "chi_min": (_float, "resonance curve chi start"),
    "chi_max": (_float, "resonance curve chi stop"),
    "chi_points": (_int, "resonance curve chi points"),
    "delta_sign": (_int, "+1 for delta = Da/2, -1 for delta = -Da/2"),
    # full model
    "g_b": (_float, "auxiliary cavity coupling"),
    "delta_b": (_float, "auxiliary cavity detuning"),
    "kappa_b": (_float, "auxiliary cavity decay"),
    "aux_cutoff": (_int, "auxiliary cavity photon cutoff (default 1)"),
    # validation
    "mutate_exchange": (_bool, "drop the j == k exchange terms (demonstrates a failing suite)"),
    # output
    "output": (_str, "output file (default stdout)"),
}


def read_config(path) -> dict:
    """Parse a ``key = value`` file into typed values."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    raw = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value
    return parse_values(raw, source=str(path))


def parse_values(raw: dict, source: str = "flags") -> dict:
    out = {}
    for key, text in raw.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r} ({source})")
        try:
            out[key] = KEYS[key][0](text)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {text!r} ({exc})") from None
    return out


@dataclass
class Config:
    values: dict

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values:
            raise ConfigError(f"missing required key: {key}")
        return self.values[key]

    def system_params(self, require_delta_a=True) -> SystemParams:
        v = dict(self.values)
        g_a = v.get("g_a", 10.0)
        for absolute, ratio in (("delta_a", "delta_a_over_g"), ("chi", "chi_over_g")):
            if absolute in v and ratio in v:
                raise ConfigError(f"give either {absolute} or {ratio}, not both")
            if ratio in v:
                v[absolute] = v[ratio] * g_a
        if require_delta_a and "delta_a" not in v:
            raise ConfigError("missing required key: delta_a")
        fields = SystemParams.__dataclass_fields__
        try:
            return SystemParams(**{k: v[k] for k in fields if k in v})
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def tau_grid(self) -> np.ndarray:
        points = self.get("tau_points", DEFAULT_TAU_POINTS)
        tau_max = self.get("tau_max", DEFAULT_TAU_MAX)
        if points < 2 or not tau_max > 0:
            raise ConfigError("tau grid is empty: need tau_points >= 2 and tau_max > 0")
        return np.linspace(0.0, tau_max, points)


# --- output helpers ----------------------------------------------------------

def _clean_json(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean_json(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean_json(obj.item())
    return obj


def _units(args) -> str:
    return "kappa_a" if args.unit_khz is None else f"2pi*{args.unit_khz:g}kHz"


def _header(columns, args) -> list[str]:
    if args.unit_khz is None:
        return list(columns)
    tag = f"[2pi*{args.unit_khz:g}kHz]"
    return [c + tag if c in FREQUENCY_COLUMNS else c for c in columns]


def _emit(text: str, cfg: Config, args) -> None:
    out = cfg.get("output")
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
    _write_meta(path, args)


def _write_meta(path: Path, args) -> None:
    """Run metadata lives beside the data so the data stays byte-stable."""
    meta = {
        "command": args.command,
        "argv": sys.argv[1:],
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "elapsed_s": round(time.perf_counter() - args._t0, 3),
    }
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def _json(payload) -> str:
    return json.dumps(_clean_json(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(rows, columns, args) -> str:
    body = to_csv(rows, columns).split("\n", 1)[1]
    return ",".join(_header(columns, args)) + "\n" + body


# --- commands ----------------------------------------------------------------

def cmd_steady(cfg: Config, args) -> int:
    params = cfg.system_params()
    space = SpaceConfig(cfg.get("cutoff", 12))
    bundles = cfg.get("bundles", ())
    if any(n not in (1, 2, 3) for n in bundles):
        raise ConfigError("bundles must be drawn from 1, 2, 3")
    taus = cfg.tau_grid() if bundles else None
    record = compute_record(params, space, taus, bundles)
    payload = {"units": _units(args), "status": "ok" if record.n_s > 1e-14 else "undefined_correlation"}
    payload.update(record.as_dict())
    if set(bundles) >= {1, 2, 3}:
        payload["labels"] = sorted(classify(record))
    _emit(_json(payload), cfg, args)
    return EXIT_OK


def cmd_gtau(cfg: Config, args) -> int:
    params = cfg.system_params()
    space = SpaceConfig(cfg.get("cutoff", 12))
    bundles = cfg.get("bundles", (2,))
    if not bundles or any(n not in (1, 2, 3) for n in bundles):
        raise ConfigError("bundles must be a non-empty subset of 1, 2, 3")
    taus = cfg.tau_grid()
    liou = model_liouvillian(params, space)
    ss = steady_state(liou)
    rows = [{"tau": t} for t in taus]
    columns = ["tau"]
    for n in bundles:
        col = f"g{n}2_tau"
        columns.append(col)
        for row, value in zip(rows, gn2_tau(liou, ss.rho, n, taus, space)):
            row[col] = value
    _emit(_csv_text(rows, columns, args), cfg, args)
    return EXIT_OK


def _axis(cfg: Config, prefix: str) -> Axis:
    try:
        return Axis(
            cfg.require(prefix),
            cfg.require(prefix + "_min"),
            cfg.require(prefix + "_max"),
            cfg.require(prefix + "_points"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_sweep(cfg: Config, args) -> int:
    axis1 = _axis(cfg, "axis1")
    axis2 = _axis(cfg, "axis2") if cfg.get("axis2") else None
    swept = {axis1.name} | ({axis2.name} if axis2 else set())
    params = cfg.system_params(require_delta_a="delta_a" not in swept)
    try:
        spec = SweepSpec(
            axis1=axis1,
            axis2=axis2,
            params=params,
            observables=cfg.get("observables", ()),
            workers=cfg.get("workers", 1),
            cutoff=cfg.get("cutoff"),
            cutoffs=cfg.get("cutoffs", DEFAULT_CUTOFFS),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = run_sweep(spec)
    _emit(_csv_text(rows, spec.columns(), args), cfg, args)
    return EXIT_OK


def cmd_resonance(cfg: Config, args) -> int:
    g_a = cfg.get("g_a", 10.0)
    phi = cfg.get("phi", 0.0)
    try:
        chi_grid = Axis("chi", cfg.get("chi_min", 0.0), cfg.get("chi_max", g_a), cfg.get("chi_points", 101)).values()
        rows = resonance_curves(chi_grid, g_a, phi, cfg.get("delta_sign", 1), cfg.get("manifolds") or None)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    columns = ["chi", "branch", "delta_a_root"]
    body = "".join(f"{format_value(c)},{b},{format_value(r)}\n" for c, b, r in rows)
    _emit(",".join(_header(columns, args)) + "\n" + body, cfg, args)
    return EXIT_OK


def cmd_validate(cfg: Config, args) -> int:
    options = {"self_exchange": not cfg.get("mutate_exchange", False)}
    if "cutoff" in cfg.values:
        options["cutoff"] = cfg.get("cutoff")
    results = run_suites(**options)
    text = "".join(r.line() + "\n" for r in results)
    passed = all(r.passed for r in results)
    text += f"{sum(r.passed for r in results)}/{len(results)} suites passed\n"
    _emit(text, cfg, args)
    return EXIT_OK if passed else EXIT_NUMERIC


def cmd_fullmodel(cfg: Config, args) -> int:
    params = cfg.system_params()
    aux = AuxCavityParams(cfg.require("g_b"), cfg.require("delta_b"), cfg.require("kappa_b"))
    nc, nb = cfg.get("cutoff", 3), cfg.get("aux_cutoff", 1)
    if nc > 6 or nb > 3:
        raise ConfigError("full model is limited to small truncations (cutoff <= 6, aux_cutoff <= 3)")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = compare_models(params, aux, nc, nb)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    report = {"units": _units(args), "params": params.echo(), "cutoff": nc, "aux_cutoff": nb, **report}
    _emit(_json(report), cfg, args)
    return EXIT_OK


COMMANDS = {
    "steady": (cmd_steady, "steady-state observable record (JSON)"),
    "sweep": (cmd_sweep, "1D/2D parameter sweep (CSV)"),
    "gtau": (cmd_gtau, "delayed bundle correlations g_n^(2)(tau) (CSV)"),
    "resonance": (cmd_resonance, "zero-energy resonance curves (CSV)"),
    "validate": (cmd_validate, "run the invariant suites"),
    "fullmodel": (cmd_fullmodel, "two-mode vs effective model comparison (JSON)"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--unit-khz", type=float, default=None, help="label frequency headers in 2pi*X kHz")
    group = common.add_argument_group("parameters (override the config file)")
    for key, (_, help_text) in KEYS.items():
        group.add_argument(f"--{key}", dest=f"key_{key}", metavar="V", help=help_text)
    parser = argparse.ArgumentParser(prog="photon-bundles", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def load_config(args) -> Config:
    values = read_config(args.config) if args.config else {}
    flags = {k[4:]: v for k, v in vars(args).items() if k.startswith("key_") and v is not None}
    values.update(parse_values(flags))
    return Config(values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args._t0 = time.perf_counter()
    try:
        cfg = load_config(args)
        return COMMANDS[args.command][0](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, UndefinedCorrelation) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostic", None)
        if diag:
            print(diag.get("table", diag) if isinstance(diag, dict) else diag, file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
