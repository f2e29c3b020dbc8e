"""Command-line front end: overlap and spectrum tables, protocol runs, sweeps.

Exit codes: 0 success, 2 configuration or validation error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

import jsonschema
import numpy as np

from .coupling import SystemConfig, build_M, couplings_for
from .errors import ConfigError, ConsistencyError, NumericFailure, QndSwapError
from .lgmodes import BeamGeometry, overlap_table
from .protocol import (
    SWEEP_VARS,
    QubitAmplitudes,
    Scenario,
    pick_constants,
    resolve,
    run_swap,
    sweep,
)
from .spectral import eigendecompose, group_tetrads

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
AMP_TOL = 1e-9

_complex = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_consts = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["regime", "truncation", "input"],
    "properties": {
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "waist": {"type": "number", "exclusiveMinimum": 0},
                "zs_over_zr": {"type": "number", "minimum": 0},
            },
        },
        "regime": {
            "type": "object",
            "additionalProperties": False,
            "required": ["driving_oam"],
            "properties": {"driving_oam": {"enum": [0, 1]}},
        },
        "truncation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["max_oam"],
            "properties": {"max_oam": {"type": "integer", "minimum": 2, "maximum": 32, "multipleOf": 2}},
        },
        "strength": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eta": {"type": "number", "minimum": 0},
                "eta1": {"type": "number", "minimum": 0},
                "eta2": {"type": "number", "minimum": 0},
            },
        },
        "constants": {
            "type": "object",
            "additionalProperties": False,
            "required": ["nu1", "nu2"],
            "properties": {"nu1": _consts, "nu2": _consts},
        },
        "protocol": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"theta1_deg": {"type": "number"}, "theta2_deg": {"type": "number"}},
        },
        "input": {
            "type": "object",
            "additionalProperties": False,
            "required": ["subsystems"],
            "properties": {
                "subsystems": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["c0", "c1", "t0", "t1"],
                        "properties": {k: _complex for k in ("c0", "c1", "t0", "t1")},
                    },
                }
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"format": {"enum": ["csv", "json"]}, "path": {"type": "string"}},
        },
    },
}


# --- formatting -------------------------------------------------------------


def fmt(x) -> str:
    """Shortest round-trip text of ``x`` rounded to 12 significant digits."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(_num(x))


def _num(x) -> float:
    v = float(f"{float(x):.12g}")
    return 0.0 if v == 0 else v


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def parse_range(text: str) -> np.ndarray:
    """``A:B:STEPS`` (inclusive, ``A < B``, ``STEPS >= 2``) or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"range must be A:B:STEPS or a number, got {text!r}") from None
    if not a < b or n < 2:
        raise ConfigError(f"range needs A < B and STEPS >= 2, got {text!r}")
    return np.linspace(a, b, n)


def parse_sweep(text: str):
    var, sep, rng = text.partition("=")
    if not sep or var not in SWEEP_VARS:
        raise ConfigError(f"--sweep must be VAR=A:B:STEPS with VAR in {SWEEP_VARS}, got {text!r}")
    return var, parse_range(rng)


# --- config -----------------------------------------------------------------


def _key_path(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        path = ".".join(filter(None, [path, ",".join(extra)]))
    return path or "<root>"


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ConfigError(f"config key {_key_path(err)}: {err.message}") from None
    if ("strength" in cfg) == ("constants" in cfg):
        raise ConfigError("config key strength/constants: give exactly one of them")
    return cfg


def _amplitudes(cfg: dict) -> list:
    out = []
    for j, sub in enumerate(cfg["input"]["subsystems"]):
        z = {k: complex(*sub[k]) for k in ("c0", "c1", "t0", "t1")}
        for q, (a, b) in (("c", ("c0", "c1")), ("t", ("t0", "t1"))):
            n = abs(z[a]) ** 2 + abs(z[b]) ** 2
            if abs(n - 1.0) > AMP_TOL:
                raise ConfigError(f"config key input.subsystems.{j}.{a}/{b}: squared norm {n:.12g} is not 1")
            s = math.sqrt(n)
            z[a], z[b] = z[a] / s, z[b] / s
        out.append(QubitAmplitudes(**z))
    return out


def _angle(deg: float) -> float:
    return math.radians(deg) % (2 * math.pi)


def scenario_from_config(cfg: dict, nu2: Optional[float] = None) -> Scenario:
    geo = cfg.get("geometry", {})
    geometry = BeamGeometry(geo.get("waist", 1.0), geo.get("zs_over_zr", 0.0))
    proto = cfg.get("protocol", {})
    K = cfg["truncation"]["max_oam"]
    kw = dict(
        regime=cfg["regime"]["driving_oam"],
        max_oam=K,
        geometry=geometry,
        theta1=_angle(proto.get("theta1_deg", 90.0)),
        theta2=_angle(proto.get("theta2_deg", 90.0)),
        inputs=tuple(_amplitudes(cfg)),
    )
    if len(kw["inputs"]) != K // 2:
        raise ConfigError(f"config key input.subsystems: need {K // 2} entries for max_oam {K}")
    if nu2 is not None:
        picked = pick_constants(nu2)
        return Scenario(nu1=picked.nu1, nu2=picked.nu2, **kw)
    if "constants" in cfg:
        c = cfg["constants"]
        nu = [tuple(v) if isinstance(v, list) else v for v in (c["nu1"], c["nu2"])]
        return Scenario(nu1=nu[0], nu2=nu[1], **kw)
    st = cfg["strength"]
    if "eta" in st and ("eta1" in st or "eta2" in st):
        raise ConfigError("config key strength: use eta or eta1/eta2, not both")
    if "eta" in st:
        return Scenario(eta1=st["eta"], eta2=st["eta"], **kw)
    if "eta1" not in st or "eta2" not in st:
        raise ConfigError("config key strength: needs eta, or both eta1 and eta2")
    return Scenario(eta1=st["eta1"], eta2=st["eta2"], **kw)


# --- commands -----------------------------------------------------------------


def cmd_overlaps(args) -> str:
    rows = []
    for zs in parse_range(args.zs):
        table = overlap_table(args.regime, args.max_oam, BeamGeometry(args.waist, float(zs)))
        for (l, m) in table.pairs:
            rows.append((float(zs), args.regime, l, m, table[(l, m)]))
    return _csv(["zs_over_zr", "k", "l", "m", "chi"], rows)


def _parse_constants(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"--constants must be comma-separated numbers, got {text!r}") from None


def cmd_spectrum(args) -> str:
    constants = _parse_constants(args.constants)
    rows = []
    for zs in parse_range(args.zs):
        cfg = SystemConfig(1, args.max_oam, args.eta, BeamGeometry(args.waist, float(zs)), constants)
        es = eigendecompose(build_M(couplings_for(cfg)))
        for j, t in enumerate(group_tetrads(es)):
            rows.append((float(zs), j, t.mu))
    return _csv(["zs_over_zr", "tetrad_index", "im_lambda"], rows)


def _params_json(scenario: Scenario, params) -> dict:
    def val(v):
        return [_num(x) for x in v] if isinstance(v, tuple) else _num(v)

    out = {
        "regime": params.regime,
        "max_oam": params.max_oam,
        "nu1": val(params.nu1),
        "nu2": val(params.nu2),
        "theta1": _num(params.theta1),
        "theta2": _num(params.theta2),
        "waist": _num(scenario.geometry.quantum_waist),
        "zs_over_zr": _num(scenario.geometry.zs_over_zr),
    }
    if scenario.strength_mode:
        out["eta1"], out["eta2"] = _num(scenario.eta1), _num(scenario.eta2)
    return out


def swap_report(scenario: Scenario) -> dict:
    params, enc = resolve(scenario)
    res = run_swap(params, scenario.inputs, enc)
    per = []
    for s in res.subsystems:
        r = s.ratios
        per.append(
            {
                "fidelity": _num(s.fidelity),
                "alpha": {f"a{i + 1}": _num(v) for i, v in enumerate(r)},
                "two_qubit_weight": _num(s.two_qubit_weight),
                "cross_leakage": _num(s.cross_leakage),
            }
        )
    return {
        "params": _params_json(scenario, params),
        "per_subsystem": per,
        "pre_normalization_norm": _num(res.pre_normalization_norm),
        "swap_times_xx": res.swap_times_xx,
    }


def cmd_swap(args) -> str:
    scenario = scenario_from_config(load_config(args.config), args.nu2)
    return json.dumps(swap_report(scenario), indent=2) + "\n"


def cmd_sweep(args) -> str:
    scenario = scenario_from_config(load_config(args.config), args.nu2)
    var, values = parse_sweep(args.sweep)
    rows = []
    for v, res in sweep(scenario, var, values):
        for j, s in enumerate(res.subsystems):
            _, a2, a3, a4 = s.ratios
            rows.append((v, j, s.fidelity, a2, a3, a4))
    return _csv(["sweep_value", "subsystem", "fidelity", "a2_over_a1", "a3_over_a1", "a4_over_a1"], rows)


def _out_path(args) -> Optional[str]:
    if args.out:
        return args.out
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                return json.load(fh).get("output", {}).get("path")
        except (OSError, json.JSONDecodeError, AttributeError):
            return None
    return None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qndswap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("overlaps", help="overlap integrals over a zs/zR grid (CSV)")
    o.add_argument("--regime", type=int, choices=(0, 1), default=0)
    o.add_argument("--max-oam", type=int, default=6)
    o.add_argument("--zs", default="0:50:51", help="A:B:STEPS or a single value")
    o.add_argument("--waist", type=float, default=1.0)
    o.add_argument("--out")
    o.set_defaults(func=cmd_overlaps)

    s = sub.add_parser("spectrum", help="tetrad gains mu = Im(lambda) of the k=1 matrix (CSV)")
    s.add_argument("--max-oam", type=int, default=14)
    s.add_argument("--zs", default="0:50:51")
    s.add_argument("--waist", type=float, default=1.0)
    s.add_argument("--eta", type=float, default=1.0, help="coupling strength")
    s.add_argument("--constants", help="comma-separated constants replacing the geometric ones")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    w = sub.add_parser("swap", help="run the protocol for a JSON config (JSON)")
    w.add_argument("--config", required=True)
    w.add_argument("--nu2", type=float, help="override constants with nu2 and nu1 = 2/nu2")
    w.add_argument("--out")
    w.set_defaults(func=cmd_swap)

    e = sub.add_parser("sweep", help="protocol runs over a parameter grid (CSV)")
    e.add_argument("--config", required=True)
    e.add_argument("--sweep", required=True, help=f"VAR=A:B:STEPS, VAR in {', '.join(SWEEP_VARS)}")
    e.add_argument("--nu2", type=float, help="start from constants nu2 and nu1 = 2/nu2")
    e.add_argument("--out")
    e.set_defaults(func=cmd_sweep)
    return p


def _validate_common(args):
    K = getattr(args, "max_oam", None)
    if K is not None and (K < 2 or K % 2 or K > 32):
        raise ConfigError(f"--max-oam must be an even integer in [2, 32], got {K}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_common(args)
        text = args.func(args)
        _write(_out_path(args), text)
    except (NumericFailure, ConsistencyError) as exc:
        print(f"qndswap: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QndSwapError, ValueError) as exc:
        print(f"qndswap: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
