"""Command-line entry point: ``menger <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import functionals as fn
from . import golab, shapes
from .graphs import GraphError, mst
from .metric import MetricError, MetricSpace
from .steiner import CapExceeded, smt_bounds, smt_estimate, smt_euclidean_small, smt_grid, smt_restricted

log = logging.getLogger("menger")


class InputError(ValueError):
    """Malformed input file."""


def _num(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(format(x, ".12g"))


def _clean(obj):
    """Round every float to 12 significant digits and make the structure JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def dumps_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        v = _num(v)
        return v if isinstance(v, str) else format(v, ".12g")
    return v


def _indices(text: str | None):
    if text is None or text == "":
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise MetricError(f"index list {text!r} is not comma-separated integers") from None


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise MetricError(f"schedule {text!r} is not comma-separated numbers") from None


def load_space(path: str) -> MetricSpace:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path} must hold a JSON object")
    try:
        return MetricSpace.from_json(obj)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MetricError):
            raise
        raise InputError(f"{path}: {exc}") from None


def _needs(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise MetricError(f"--{n.replace('_', '-')} is required for {args.command}")


def _subset(space, args):
    ids = _indices(args.terminals)
    return space.index_set(range(space.n) if ids is None else ids)


# ------------------------------------------------------------------ commands

def cmd_mst(args):
    _needs(args, "points")
    space = load_space(args.points)
    tree, length = mst(space, _subset(space, args))
    return {"length": length, "method": "mst", "tree": tree.to_json()}


def cmd_smt(args):
    _needs(args, "points")
    space = load_space(args.points)
    P = _subset(space, args)
    cands = _indices(args.candidates) or []
    mode = args.mode
    if mode == "euclidean-small":
        res = smt_euclidean_small(space, P)
    elif mode == "restricted":
        res = smt_restricted(space, P, cands)
    elif mode == "bounds":
        res = smt_bounds(space, P)
    elif mode == "grid":
        _needs(args, "grid_pitch")
        res = smt_grid(space, P, args.grid_pitch)
    else:
        res = smt_restricted(space, P, cands) if cands else smt_estimate(space, P, args.grid_pitch)
    out = res.to_json()
    if res.space is not space:
        out["steiner_coords"] = {str(v): res.space.coords[v].tolist()
                                 for v in res.tree.steiner_points if v >= space.n}
    return out


def _estimate(args, which):
    _needs(args, "points")
    space = load_space(args.points)
    A = _subset(space, args)
    sched = _floats(args.eps_schedule)
    if which == "lm":
        est = fn.L_M_estimate(space, A, sched, seed=args.seed)
    elif which == "lim":
        est = fn.L_IM_estimate(space, A, sched, seed=args.seed)
    else:
        est = fn.L_MC_estimate(space, A, sched, candidates=args.source, grid_pitch=args.grid_pitch,
                               seed=args.seed)
    return est.to_json()


def cmd_cover(args):
    _needs(args, "points", "delta")
    space = load_space(args.points)
    pc = fn.proof_cover(space, _subset(space, args), args.delta, _floats(args.eps_schedule), seed=args.seed,
                        grid_pitch=args.grid_pitch)
    return pc.to_json()


def cmd_shape(args):
    _needs(args, "kind")
    verts = tuple(map(tuple, json.loads(args.vertices))) if args.vertices else ()
    spec = shapes.ShapeSpec(args.kind, args.n, args.samples, args.base, verts)
    shape = shapes.generate(spec)
    meta = {"true_length": shape.true_length, "polyline_length": shapes.polyline_length(shape),
            "components": [list(c) for c in shape.components], **shape.meta}
    doc = shape.space.to_json()
    if args.out:
        out = Path(args.out)
        side = out.with_name(out.stem + ".meta.json")
        side.write_text(dumps_json(meta))
        return doc
    return {**doc, "meta": meta}


def cmd_golab(args):
    _needs(args, "family")
    sched = _floats(args.eps_schedule)
    if args.family == "disconnected":
        rep = golab.counterexample_disconnected(args.steps, sched, seed=args.seed)
    else:
        rep = golab.family_experiment(args.family, args.steps, args.samples, sched, seed=args.seed,
                                      grid_pitch=args.grid_pitch)
    if args.format == "json":
        return rep.to_json()
    return rep.rows()


def cmd_hits(args):
    _needs(args, "points", "eps")
    space = load_space(args.points)
    A = _subset(space, args)
    hc = golab.hit_collection(space, A, args.eps, _floats(args.eps_schedule), seed=args.seed,
                              grid_pitch=args.grid_pitch)
    out = {"hit_collection": hc.to_json()}
    B = _indices(args.test_set)
    if B is not None:
        out["test_set_hits"] = golab.check_hits(space, B, hc)
    return out


COMMANDS = {"mst": cmd_mst, "smt": cmd_smt, "lmc": lambda a: _estimate(a, "lmc"),
            "lim": lambda a: _estimate(a, "lim"), "lm": lambda a: _estimate(a, "lm"), "cover": cmd_cover,
            "shape": cmd_shape, "golab": cmd_golab, "hits": cmd_hits}
TABLE_COMMANDS = {"golab"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--points", help="point-set JSON file")
    common.add_argument("--terminals", help="comma-separated indices (default: every point)")
    common.add_argument("--candidates", help="comma-separated Steiner candidate indices")
    common.add_argument("--eps", type=float)
    common.add_argument("--eps-schedule", help="comma-separated decreasing eps values")
    common.add_argument("--delta", type=float)
    common.add_argument("--grid-pitch", type=float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="upper bound on worker threads")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="menger", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("mst", "lmc", "lim", "lm", "cover", "hits"):
        sp = sub.add_parser(name, parents=[common])
        if name == "lmc":
            sp.add_argument("--source", choices=("grid", "sample"), default="grid",
                            help="where Steiner points may come from")
        if name == "hits":
            sp.add_argument("--test-set", help="indices of a set B to test against the balls")
    sp = sub.add_parser("smt", parents=[common])
    sp.add_argument("--mode", choices=("auto", "restricted", "euclidean-small", "bounds", "grid"), default="auto")
    sp = sub.add_parser("shape", parents=[common])
    sp.add_argument("--kind", choices=shapes.KINDS)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--samples", type=int, default=2)
    sp.add_argument("--base", type=float, default=1.0)
    sp.add_argument("--vertices", help="JSON list of [x, y] vertices for --kind polyline")
    sp = sub.add_parser("golab", parents=[common])
    sp.add_argument("--family", choices=("semicircle", "shrunk_koch", "constant", "disconnected"))
    sp.add_argument("--steps", type=int, default=6)
    sp.add_argument("--samples", type=int, default=64)
    return p


def _setup_logging():
    level = os.environ.get("MENGER_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=getattr(logging, level), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def run(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    fmt = args.format or ("csv" if args.command in TABLE_COMMANDS else "json")
    args.format = fmt
    try:
        if args.threads < 1:
            raise MetricError("--threads must be at least 1")
        result = COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"menger: cap exceeded: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"menger: malformed input: {exc}", file=sys.stderr)
        return 2
    except (MetricError, GraphError, fn.CoverError) as exc:
        print(f"menger: invalid input: {exc}", file=sys.stderr)
        return 2
    if fmt == "csv":
        rows = result if isinstance(result, list) else [_flat(result)]
        text = dumps_csv(rows)
    else:
        text = dumps_json(result)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _flat(d: dict) -> dict:
    return {k: v for k, v in d.items() if not isinstance(v, (dict, list))}


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
