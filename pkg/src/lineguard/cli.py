"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Dict, List, Optional

import jsonschema
import numpy as np

from . import checks
from . import equilibrium as eq
from . import sim
from .equilibrium import Side
from .model import (
    GameParams,
    InertialPose,
    ParamsError,
    TargetFrameState,
    check_state,
    from_inertial,
    validate_params,
)
from .value import barrier_curve, game_value, signed_value

_num = {"type": "number"}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}


def _obj(props: Dict[str, Any], required=()) -> Dict[str, Any]:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


RUN_CONFIG_SCHEMA = _obj({
    "params": _obj({"v_A": _num, "v_T": _num, "phi_T": _num, "L": _num,
                    "eps_event": _num, "tol": _num}, ["v_A", "v_T", "phi_T"]),
    "state": _obj({"xD_hat": _num, "xA_hat": _num, "yA_hat": _num},
                  ["xD_hat", "xA_hat", "yA_hat"]),
    "inertial": _obj({"attacker": _pair, "defender_x": _num, "target_origin": _pair},
                     ["attacker", "defender_x"]),
    "side": {"enum": ["above", "below"]},
    "strategy": _obj({"attacker": {"type": "string"}, "defender": {"type": "string"}}),
    "sim": _obj({"dt": _num, "max_time": _num, "eps_event": _num, "stride": {"type": "integer"}}),
    "barrier": _obj({"xD_hat": _num, "n": {"type": "integer"}}),
    "sweep": _obj({"xD_hat": _num, "x_range": _pair, "y_range": _pair,
                   "nx": {"type": "integer"}, "ny": {"type": "integer"}}),
    "output": _obj({"format": {"enum": ["json", "csv"]}}),
})


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- formatting


def fmt(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def _round(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _round(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def dump_json(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def dump_csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (fmt(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- config


def _set(cfg: Dict[str, Any], section: str, key: str, value) -> None:
    if value is not None:
        cfg.setdefault(section, {})[key] = value


def load_config(args) -> Dict[str, Any]:
    cfg: Dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
    for key, attr in (("v_A", "vA"), ("v_T", "vT"), ("phi_T", "phiT"), ("L", "L"),
                      ("eps_event", "eps_event"), ("tol", "tol")):
        _set(cfg, "params", key, getattr(args, attr, None))
    if getattr(args, "state", None):
        cfg.pop("inertial", None)
        cfg["state"] = dict(zip(("xD_hat", "xA_hat", "yA_hat"), args.state))
    if getattr(args, "inertial", None):
        cfg.pop("state", None)
        xa, ya, xd = args.inertial
        cfg["inertial"] = {"attacker": [xa, ya], "defender_x": xd}
        if args.target_origin:
            cfg["inertial"]["target_origin"] = list(args.target_origin)
    if getattr(args, "side", None):
        cfg["side"] = args.side
    _set(cfg, "strategy", "attacker", getattr(args, "attacker", None))
    _set(cfg, "strategy", "defender", getattr(args, "defender", None))
    for key in ("dt", "max_time", "stride"):
        _set(cfg, "sim", key, getattr(args, key, None))
    if getattr(args, "cmd", None) == "barrier":
        _set(cfg, "barrier", "xD_hat", args.xD)
        _set(cfg, "barrier", "n", args.n)
    if getattr(args, "cmd", None) == "sweep":
        _set(cfg, "sweep", "xD_hat", args.xD)
        _set(cfg, "sweep", "x_range", args.x_range and list(args.x_range))
        _set(cfg, "sweep", "y_range", args.y_range and list(args.y_range))
        _set(cfg, "sweep", "nx", args.nx)
        _set(cfg, "sweep", "ny", args.ny)
    _set(cfg, "output", "format", getattr(args, "format", None))
    try:
        jsonschema.validate(cfg, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(f"invalid config: {exc.message}") from exc
    return cfg


def params_from(cfg) -> GameParams:
    if "params" not in cfg:
        raise InputError("game parameters are required (--vA --vT --phiT or a config file)")
    return validate_params(GameParams(**cfg["params"]))


def state_from(cfg, p: GameParams) -> TargetFrameState:
    if "state" in cfg:
        s = TargetFrameState(**cfg["state"])
    elif "inertial" in cfg:
        i = cfg["inertial"]
        origin = tuple(i.get("target_origin", (0.0, 0.0)))
        s = from_inertial(tuple(i["attacker"]), i["defender_x"], InertialPose(0.0, origin))
    else:
        raise InputError("an initial state is required (--state or --inertial)")
    try:
        return check_state(s, p)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _side(cfg) -> Optional[Side]:
    return Side(cfg["side"]) if "side" in cfg else None


# ---------------------------------------------------------------- commands


def eval_record(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> Dict[str, Any]:
    e = game_value(s, p, side)
    return {
        "state": {"xD_hat": s.xD_hat, "xA_hat": s.xA_hat, "yA_hat": s.yA_hat},
        "region": e.region.value,
        "attacker_wins": e.region.attacker_wins,
        "value": e.value,
        "controls": {"omega_D": e.controls.omega_D, "heading_A": e.controls.heading_A},
        "diagnostics": e.diagnostics,
    }


def cmd_eval(cfg) -> int:
    p = params_from(cfg)
    s = state_from(cfg, p)
    _emit(dump_json(eval_record(s, p, _side(cfg))), cfg.get("_out"))
    return 0


def _sample_value(s: TargetFrameState, p: GameParams, side) -> Optional[float]:
    try:
        return signed_value(s, p, side)
    except (eq.GeometryError, eq.SideAmbiguousError, ValueError, ZeroDivisionError):
        return None


def cmd_simulate(cfg) -> int:
    p = params_from(cfg)
    s0 = state_from(cfg, p)
    st = cfg.get("strategy", {})
    try:
        spec = sim.StrategySpec.parse(st.get("attacker", "equilibrium"),
                                      st.get("defender", "equilibrium"))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sc = cfg.get("sim", {})
    try:
        sim_cfg = sim.SimConfig(dt=sc.get("dt", 1e-4), max_time=sc.get("max_time", 100.0),
                                eps_event=sc.get("eps_event", p.eps_event))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    stride = max(1, int(sc.get("stride", 1)))
    origin0 = tuple(cfg.get("inertial", {}).get("target_origin", (0.0, 0.0)))
    tr = sim.simulate(s0, spec, sim_cfg, p, origin0=origin0, side=_side(cfg))

    rows = []
    samples = list(tr.samples())
    keep = set(range(0, len(samples), stride)) | {len(samples) - 1}
    for i, smp in enumerate(samples):
        if i not in keep:
            continue
        v = _sample_value(smp.state, p, tr.sides[i])
        rows.append([smp.t, *smp.state.as_tuple(), *smp.attacker, *smp.defender, v])
    summary = {
        "event": tr.event.value,
        "t_f": tr.t_f,
        "payoff": tr.payoff,
        "region_at_start": tr.region_at_start.value if tr.region_at_start else None,
        "analytic_value": _sample_value(s0, p, _side(cfg)),
        "final_state": dict(zip(("xD_hat", "xA_hat", "yA_hat"), tr.final_state.as_tuple())),
        "steps": len(samples) - 1,
    }
    header = ["t", "xD_hat", "xA_hat", "yA_hat", "xA", "yA", "xD", "yD", "value"]
    out = cfg.get("_out")
    if cfg.get("output", {}).get("format") == "csv":
        _emit(dump_csv(header, rows), out)
        sys.stdout.write(dump_json({"summary": summary}) if out else "")
        return 0
    series = {h: [r[k] for r in rows] for k, h in enumerate(header)}
    _emit(dump_json({"summary": summary, "series": series}), out)
    return 0


def cmd_barrier(cfg) -> int:
    p = params_from(cfg)
    b = cfg.get("barrier", {})
    xd = b.get("xD_hat")
    if xd is None or not 0.0 <= xd <= p.L:
        raise InputError(f"barrier needs xD_hat in [0, {p.L}], got {xd}")
    n = int(b.get("n", 200))
    if n < 2:
        raise InputError("barrier needs n >= 2")
    curve = barrier_curve(xd, p, n)
    rows = [[x, y, tag, lam] for x, y, tag, lam in curve.polyline()]
    if cfg.get("output", {}).get("format") == "csv":
        _emit(dump_csv(["xA_hat", "yA_hat", "section", "lambda"], rows), cfg.get("_out"))
        return 0
    doc = {
        "xD_hat": xd,
        "centers": {str(k): v for k, v in curve.centers.items()},
        "radii": {str(k): v for k, v in curve.radii.items()},
        "junctions": [{"lambda": lam, "side": side.value, "point": pt}
                      for lam, side, pt in curve.junctions],
        "points": [{"xA_hat": r[0], "yA_hat": r[1], "section": r[2], "lambda": r[3]}
                   for r in rows],
    }
    _emit(dump_json(doc), cfg.get("_out"))
    return 0


def _sweep_row(args):
    xa, ya, xd, p = args
    s = TargetFrameState(xd, xa, ya)
    try:
        a = eq.analyse(s, p)
    except eq.SideAmbiguousError:
        return [xa, ya, "ambiguous", None]
    from .value import value_of
    return [xa, ya, a.region.value, value_of(a, s, p)]


def cmd_sweep(cfg) -> int:
    from ._parallel import pmap

    p = params_from(cfg)
    g = cfg.get("sweep", {})
    xd = g.get("xD_hat")
    if xd is None or not 0.0 <= xd <= p.L:
        raise InputError(f"sweep needs xD_hat in [0, {p.L}], got {xd}")
    nx, ny = int(g.get("nx", 200)), int(g.get("ny", 200))
    xr = g.get("x_range", [-0.5 * p.L, 1.5 * p.L])
    yr = g.get("y_range", [-p.L, p.L])
    if nx < 1 or ny < 1 or not all(map(math.isfinite, xr + yr)):
        raise InputError("sweep grid must be finite with nx, ny >= 1")
    xs = np.linspace(xr[0], xr[1], nx)
    ys = np.linspace(yr[0], yr[1], ny)
    cells = [(float(x), float(y), xd, p) for y in ys for x in xs]
    rows = pmap(_sweep_row, cells, chunksize=256)
    if cfg.get("output", {}).get("format") == "json":
        doc = {"xD_hat": xd, "nx": nx, "ny": ny,
               "cells": [dict(zip(("xA_hat", "yA_hat", "region", "value"), r)) for r in rows]}
        _emit(dump_json(doc), cfg.get("_out"))
    else:
        _emit(dump_csv(["xA_hat", "yA_hat", "region", "value"], rows), cfg.get("_out"))
    return 0


def _parse_bounds(items) -> Dict[str, float]:
    out = {}
    for item in items or ():
        name, _, val = item.partition("=")
        if name not in checks.DEFAULT_BOUNDS or not val:
            raise InputError(f"bad --tol {item!r}; names: {', '.join(checks.DEFAULT_BOUNDS)}")
        out[name] = float(val)
    return out


def cmd_check(cfg, args) -> int:
    p = params_from(cfg) if "params" in cfg else validate_params(
        GameParams(0.7, 0.2, 2 * math.pi / 3, 1.0))
    budget = checks.Budget(eta_params=args.eta_params, hji_states=args.hji_states,
                           saddle_states=args.saddle_states, headings=args.headings,
                           omegas=args.omegas, consistency_states=args.consistency_states,
                           dt=args.check_dt)
    bounds = _parse_bounds(args.tol_override)
    saved = eq._eta_offset
    eq._eta_offset = args.inject_eta_offset
    try:
        results = checks.run_checks(p, seed=args.seed, budget=budget, bounds=bounds)
    finally:
        eq._eta_offset = saved
    ok = all(r.passed for r in results)
    doc = {"passed": ok,
           "checks": [{"name": r.name, "passed": r.passed, "measured": r.measured,
                       "bound": r.bound, "samples": r.samples} for r in results]}
    _emit(dump_json(doc), cfg.get("_out"))
    return 0 if ok else 1


# ---------------------------------------------------------------- parser


def _common(sp: argparse.ArgumentParser, state: bool = True) -> None:
    sp.add_argument("--config", help="JSON run config; flags override its values")
    sp.add_argument("--vA", type=float, help="attacker speed")
    sp.add_argument("--vT", type=float, help="target speed")
    sp.add_argument("--phiT", type=float, help="target heading (radians)")
    sp.add_argument("--L", type=float, help="target length")
    sp.add_argument("--eps-event", dest="eps_event", type=float)
    sp.add_argument("--tol", type=float, help="general comparison tolerance")
    sp.add_argument("-o", "--output", dest="out", help="write here instead of stdout")
    if state:
        sp.add_argument("--state", nargs=3, type=float, metavar=("XD", "XA", "YA"),
                        help="target-frame state")
        sp.add_argument("--inertial", nargs=3, type=float, metavar=("XA", "YA", "XD"),
                        help="inertial attacker position and defender abscissa")
        sp.add_argument("--target-origin", nargs=2, type=float, metavar=("X", "Y"))
        sp.add_argument("--side", choices=["above", "below"],
                        help="approach side for attackers on the target line")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lineguard",
                                 description="Translating-line target-guarding game solver")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("eval", help="region, Value and equilibrium controls at one state")
    _common(sp)

    sp = sub.add_parser("simulate", help="integrate a trajectory")
    _common(sp)
    sp.add_argument("--attacker", help="equilibrium | naive | constant:PHI")
    sp.add_argument("--defender", help="equilibrium | idle | constant:OMEGA")
    sp.add_argument("--dt", type=float)
    sp.add_argument("--max-time", dest="max_time", type=float)
    sp.add_argument("--stride", type=int, help="keep every k-th sample in the output")
    sp.add_argument("--format", choices=["json", "csv"])

    sp = sub.add_parser("barrier", help="barrier polyline for a fixed defender position")
    _common(sp, state=False)
    sp.add_argument("--xD", type=float)
    sp.add_argument("--n", type=int, help="samples per section")
    sp.add_argument("--format", choices=["json", "csv"])

    sp = sub.add_parser("sweep", help="region and Value over an attacker-position grid")
    _common(sp, state=False)
    sp.add_argument("--xD", type=float)
    sp.add_argument("--x-range", dest="x_range", nargs=2, type=float)
    sp.add_argument("--y-range", dest="y_range", nargs=2, type=float)
    sp.add_argument("--nx", type=int)
    sp.add_argument("--ny", type=int)
    sp.add_argument("--format", choices=["json", "csv"])

    sp = sub.add_parser("check", help="run the verification suites")
    _common(sp, state=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eta-params", type=int, default=100)
    sp.add_argument("--hji-states", type=int, default=200)
    sp.add_argument("--saddle-states", type=int, default=1, help="states per region")
    sp.add_argument("--headings", type=int, default=3600)
    sp.add_argument("--omegas", type=int, default=21)
    sp.add_argument("--consistency-states", type=int, default=20)
    sp.add_argument("--check-dt", type=float, default=1e-3)
    sp.add_argument("--tol-override", action="append", metavar="NAME=BOUND",
                    help="replace a check bound, e.g. hji_residual=1e-20")
    sp.add_argument("--inject-eta-offset", type=float, default=0.0, help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        cfg["_out"] = args.out
        if args.cmd == "eval":
            return cmd_eval(cfg)
        if args.cmd == "simulate":
            return cmd_simulate(cfg)
        if args.cmd == "barrier":
            return cmd_barrier(cfg)
        if args.cmd == "sweep":
            return cmd_sweep(cfg)
        return cmd_check(cfg, args)
    except (InputError, ParamsError, eq.SideAmbiguousError) as exc:
        name = getattr(exc, "assumption", None)
        prefix = f"error [{name}]" if name else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
