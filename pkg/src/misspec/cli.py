"""Command-line experiment runner.

Every command reads an experiment configuration (a preset or a JSON/TOML
file), writes CSV and JSON outputs to ``--out`` and finishes with a
``manifest.json`` describing the run.  Failures print a JSON error object
on stderr and exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from pathlib import Path
from typing import Sequence

import numba
import numpy as np
import scipy

from . import __version__
from .env import read_document
from .equilibrium import (
    best_response_cycle,
    build_staircase,
    classify_model,
    find_equilibria,
)
from .errors import MisspecError, SchemaError
from .inclusion import BranchSample, DIConfig, FixedSelection, integrate_di
from .policy import TableSimplex, cyclic_shift_coef
from .presets import PRESET_NAMES, ExperimentConfig, config_from_document, preset
from .simulate import apt_distance, config_hash, run_batch, tau_of, tau_schedule

COMMANDS = ("simulate", "di", "equilibria", "classify", "apt")


def parse_seeds(text: str) -> list[int]:
    """``"3"`` -> [3], ``"0..9"`` -> [0, ..., 9], ``"1,4,7"`` -> [1, 4, 7]."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise SchemaError(f"empty seed range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise SchemaError("seed list is empty")
    return out


def _write_json(path: Path, doc) -> Path:
    path.write_text(json.dumps(doc, indent=2, default=_plain) + "\n", encoding="utf-8")
    return path


def _plain(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o)}")


def _strategy(cfg: ExperimentConfig):
    prio = cfg.param("priority")
    if prio:
        return FixedSelection(tuple(prio))
    return BranchSample(int(cfg.param("branches")), int(cfg.param("branch_seed") or 0))


def _sigma0(cfg: ExperimentConfig, n: int) -> np.ndarray:
    s = cfg.param("sigma0")
    return np.full(n, 1.0 / n) if s is None else np.asarray(s, dtype=float)


def _simulate(cfg, env, policy, out: Path) -> tuple[list[Path], dict]:
    seeds = [int(s) for s in cfg.param("seeds")]
    if not seeds:
        raise SchemaError("seed list is empty")
    trajs = run_batch(env, policy, int(cfg.param("horizon")), seeds, tie_rule=cfg.param("tie_rule"),
                      record_every=int(cfg.param("record_every")))
    paths = [tr.to_csv(out / f"trajectory_seed{tr.seed}.csv") for tr in trajs]
    return paths, {"seeds": seeds}


def _di(cfg, env, policy, out: Path) -> tuple[list[Path], dict]:
    sigma0 = _sigma0(cfg, env.n_actions)
    strategy = _strategy(cfg)
    paths = integrate_di(env, policy, sigma0, float(cfg.param("T")), float(cfg.param("step")), strategy)
    files = [p.to_csv(out / f"dipath_branch{k}.csv") for k, p in enumerate(paths)]
    events = [{"branch": k, "events": [{"time": e.time, "state": e.state, "from": list(e.from_set),
                                        "to": list(e.to_set), "selection": e.selection} for e in p.events]}
              for k, p in enumerate(paths)]
    files.append(_write_json(out / "events.json", events))
    return files, {"sigma0": sigma0.tolist(), "strategy": repr(strategy)}


def _equilibria(cfg, env, policy, out: Path) -> tuple[list[Path], dict]:
    res = int(cfg.param("resolution"))
    comps = find_equilibria(env, policy, res)
    doc = {"resolution": res, "equilibria": [
        {"point": c.point, "residual": c.residual, "continuum": c.is_continuum,
         "members": c.points if c.is_continuum else None} for c in comps]}
    if isinstance(policy, TableSimplex) and policy.name == "cyclic_shift":
        doc["limit_cycle"] = best_response_cycle(cyclic_shift_coef()).document()
    return [_write_json(out / "equilibria.json", doc)], {"resolution": res}


def _classify(cfg, env, policy, out: Path) -> tuple[list[Path], dict]:
    eps = float(cfg.param("eps"))
    st = build_staircase(env, policy, require_monotone=False)
    models = [{"theta": f.theta, "case": f.case, "verdict": classify_model(env, policy, f.theta, eps)}
              for f in st.fixed_points]
    doc = {"eps": eps, "monotone": st.monotone, "breakpoints": st.breakpoints, "levels": st.levels,
           "verticals": st.verticals, "models": models}
    return [_write_json(out / "classification.json", doc)], {"eps": eps}


def _apt(cfg, env, policy, out: Path) -> tuple[list[Path], dict]:
    seeds = [int(s) for s in cfg.param("seeds")]
    starts = [int(t) for t in (cfg.param("apt_starts") or [1000, 10000])]
    T = float(cfg.param("T"))
    di = DIConfig(float(cfg.param("step")), BranchSample(int(cfg.param("branches")), 0))
    t_end = int(np.ceil(max(starts) * np.exp(T) * 1.01)) + 2
    extra = np.concatenate([tau_schedule(s, t_end, 0.01) for s in starts])
    trajs = run_batch(env, policy, t_end, seeds, tie_rule=cfg.param("tie_rule"), record_every=10 ** 9,
                      record_times=extra)
    rows = []
    for tr in trajs:
        for s in starts:
            rows.append({"seed": tr.seed, "t_start": s,
                         "distance": apt_distance(tr, env, policy, float(tau_of(s)), T, di)})
    return [_write_json(out / "apt.json", {"T": T, "horizon": t_end, "rows": rows})], {"seeds": seeds}


_RUNNERS = {"simulate": _simulate, "di": _di, "equilibria": _equilibria, "classify": _classify, "apt": _apt}


def run_experiment(config: ExperimentConfig, command: str) -> list[Path]:
    """Run one command, write its outputs and the manifest; returns every written path."""
    if command not in _RUNNERS:
        raise SchemaError(f"unknown command {command!r}")
    env = config.env()
    policy = config.policy_spec()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    files, info = _RUNNERS[command](config, env, policy, out)
    manifest = {
        "command": command,
        "config": config.document(),
        "config_hash": config_hash(env, policy),
        "versions": {"misspec": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "numba": numba.__version__, "python": platform.python_version()},
        "wall_time_s": time.perf_counter() - start,
        "outputs": [p.name for p in files],
        **info,
    }
    files.append(_write_json(out / "manifest.json", manifest))
    return files


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="misspec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="JSON or TOML experiment configuration")
        src.add_argument("--preset", metavar="NAME", help=f"one of {', '.join(PRESET_NAMES)}")
        p.add_argument("--seeds", help="seed list such as 0..9 or 1,4,7")
        p.add_argument("--horizon", type=int)
        p.add_argument("--step", type=float)
        p.add_argument("--branches", type=int)
        p.add_argument("--record-every", type=int)
        p.add_argument("--out", type=Path)
    p = sub.add_parser("preset", help="print a preset configuration")
    p.add_argument("name", help=f"one of {', '.join(PRESET_NAMES)}")
    p.add_argument("--out", type=Path, help="write the configuration here instead of stdout")
    return ap


def _load_config(args) -> ExperimentConfig:
    cfg = preset(args.preset) if args.preset else config_from_document(read_document(args.config))
    if args.seeds is not None:
        cfg.params["seeds"] = parse_seeds(args.seeds)
    for key, attr in (("horizon", "horizon"), ("step", "step"), ("branches", "branches"),
                      ("record_every", "record_every")):
        val = getattr(args, attr)
        if val is not None:
            cfg.params[key] = val
    if args.out is not None:
        cfg.out = str(args.out)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            text = json.dumps(preset(args.name).document(), indent=2) + "\n"
            if args.out:
                args.out.write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            return 0
        cfg = _load_config(args)
        for path in run_experiment(cfg, args.command):
            print(path)
        return 0
    except (MisspecError, OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        inv = getattr(exc, "invariant", None)
        if inv:
            err["invariant"] = inv
        sys.stderr.write(json.dumps(err) + "\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
