"""Command line: ``svbev {run,synth,eval,render}``.

    svbev synth  --in scene.jsonl --out detections.jsonl [--truth truth.jsonl] [noise flags]
    svbev run    --in detections.jsonl --out bevmap.jsonl [--format text|svg]
    svbev eval   --in bevmap.jsonl --truth truth.jsonl [--out report.jsonl] [gate flags]
    svbev render --in bevmap.jsonl --out figures/ [--format svg|text]

Calibration, catalog and config default to the copies shipped with the
package; SVBEV_CONFIG names a config file when --config is absent.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .camera import CameraRig, default_rig, load_calibration_file
from .errors import SvbevError
from .formats import (
    Config,
    default_config,
    dumps_bevmap,
    dumps_detections,
    dumps_eval,
    dumps_truth,
    format_eval_table,
    load_config_file,
    loads_bevmap,
    loads_detections,
    loads_scene,
    loads_truth,
    read_text,
    truth_from_render,
)
from .model import TypeCatalog, default_catalog, load_catalog_file
from .pipeline import Pipeline
from .svg import render_svg
from .synth import ErrorReport, EvalThresholds, NoiseSpec, evaluate, render_detections

CONFIG_ENV = "SVBEV_CONFIG"


class CliError(Exception):
    """A user-facing failure; the message is printed and the exit status is 1."""


# ---------------------------------------------------------------------------
# inputs and outputs


def _require(path: str | None, flag: str) -> Path:
    if path is None:
        raise CliError(f"{flag} is required")
    p = Path(path)
    if not p.is_file():
        raise CliError(f"{flag}: no such file: {path}")
    return p


def _load_rig(path: str | None) -> CameraRig:
    return default_rig() if path is None else load_calibration_file(_require(path, "--calib"))


def _load_catalog(path: str | None) -> TypeCatalog:
    return default_catalog() if path is None else load_catalog_file(_require(path, "--catalog"))


def _load_config(path: str | None) -> Config:
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
        if path is not None and not Path(path).is_file():
            raise CliError(f"{CONFIG_ENV}: no such file: {path}")
    return default_config() if path is None else load_config_file(_require(path, "--config"))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    p = Path(path)
    if p.parent and not p.parent.is_dir():
        raise CliError(f"output directory does not exist: {p.parent}")
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_svgs(out: str | None, frames) -> None:
    if out is None or out == "-":
        raise CliError("--format svg needs --out DIR")
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    for f in frames:
        _write(str(d / f"frame_{f.frame_id:06d}.svg"), render_svg(f.boxes, f.frame_id))


def _thresholds(args, base: EvalThresholds) -> EvalThresholds:
    gates = list(base.y_gates)
    for i, name in enumerate(("gate_y0", "gate_y1", "gate_y2")):
        if getattr(args, name) is not None:
            gates[i] = getattr(args, name)
    x_gate = base.x_gate if args.gate_x is None else args.gate_x
    return replace(base, x_gate=x_gate, y_gates=tuple(gates))


# ---------------------------------------------------------------------------
# commands


def cmd_run(args) -> int:
    src = _require(args.in_path, "--in")
    rig, catalog, config = _load_rig(args.calib), _load_catalog(args.catalog), _load_config(args.config)
    frames = loads_detections(read_text(src), str(src))
    pipeline = Pipeline(rig, catalog, config.pipeline)
    results = [pipeline.process_frame(records, frame_id=fid) for fid, records in frames]
    text = dumps_bevmap(results)
    if args.format == "svg":
        _write_svgs(args.out, loads_bevmap(text))
    else:
        _write(args.out, text)
    return 0


def cmd_synth(args) -> int:
    src = _require(args.in_path, "--in")
    rig, catalog = _load_rig(args.calib), _load_catalog(args.catalog)
    scene = loads_scene(read_text(src), str(src))
    for fid, vehicles in scene.items():
        for v in vehicles:
            if v.type_name not in catalog.types:
                raise CliError(f"{src}: frame {fid} vehicle {v.id}: unknown type {v.type_name!r}")
    try:
        noise = NoiseSpec(
            pixel_sigma=args.noise_px,
            quantize=args.quantize,
            drop_probability=args.drop_prob,
            drop_kinds=frozenset(k.strip().upper() for k in args.drop_kinds.split(",") if k.strip()),
            slope_gradient=args.slope,
            slope_pivot_x=args.slope_pivot,
            seed=args.seed,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    renders = {fid: render_detections(scene[fid], rig, noise, catalog, frame_id=fid) for fid in sorted(scene)}
    _write(args.out, dumps_detections(renders[fid].records for fid in sorted(renders)))
    truth_path = args.truth
    if truth_path is None and args.out not in (None, "-"):
        out = Path(args.out)
        truth_path = str(out.with_name(out.name.split(".")[0] + ".truth.jsonl"))
    if truth_path is not None:
        _write(truth_path, dumps_truth(truth_from_render(noise, scene, renders)))
    return 0


def cmd_eval(args) -> int:
    src = _require(args.in_path, "--in")
    truth_src = _require(args.truth, "--truth")
    catalog, config = _load_catalog(args.catalog), _load_config(args.config)
    thresholds = _thresholds(args, config.thresholds)
    frames = loads_bevmap(read_text(src), str(src))
    truth = loads_truth(read_text(truth_src), str(truth_src))
    est_ids = {f.frame_id for f in frames}
    if est_ids != set(truth.frames):
        missing = sorted(set(truth.frames) - est_ids)
        extra = sorted(est_ids - set(truth.frames))
        raise CliError(f"frame mismatch between {src} and {truth_src}: missing {missing}, unexpected {extra}")
    reports = {}
    total = ErrorReport([], [], [], thresholds)
    for f in frames:
        r = evaluate(list(f.boxes), truth.visible_vehicles(f.frame_id), catalog, thresholds)
        reports[f.frame_id] = r
        total.extend(r)
    provenance = {"bevmap": src.name, "truth": truth_src.name, "slope_gradient": truth.noise.slope_gradient,
                  "slope_pivot_x": truth.noise.slope_pivot_x}
    table = format_eval_table(total)
    header = f"x gate {thresholds.x_gate:g} m; y gates {'/'.join(f'{g:g}' for g in thresholds.y_gates)} m\n"
    if args.out not in (None, "-"):
        _write(args.out, dumps_eval(reports, total, provenance))
    sys.stdout.write(header + table)
    return 0


def cmd_render(args) -> int:
    src = _require(args.in_path, "--in")
    frames = loads_bevmap(read_text(src), str(src))
    if args.format == "svg":
        _write_svgs(args.out, frames)
        return 0
    lines = []
    for f in frames:
        lines.append(f"frame {f.frame_id}: {len(f.boxes)} object(s)")
        for b in f.boxes:
            lines.append(
                f"  id {b.obj_id:>4}  {b.type_name:<8} P=({b.center.x:+8.3f}, {b.center.y:+8.3f}) m  "
                f"heading {math.degrees(b.heading):+8.2f} deg  case {b.case}"
            )
    _write(args.out, "\n".join(lines) + ("\n" if lines else ""))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svbev", description="Surround-view fisheye BEV vehicle pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, calib=True, config=True):
        if calib:
            p.add_argument("--calib", help="calibration JSON (default: packaged rig)")
        p.add_argument("--catalog", help="vehicle type catalog JSON (default: packaged catalog)")
        if config:
            p.add_argument("--config", help=f"pipeline config JSON (default: ${CONFIG_ENV} or packaged config)")
        p.add_argument("--in", dest="in_path", required=True, help="input file")
        p.add_argument("--out", help="output file or directory ('-' or absent: stdout)")

    p = sub.add_parser("run", help="detection stream -> BEV map")
    common(p)
    p.add_argument("--format", choices=("text", "svg"), default="text", help="BEV map (text) or one SVG per frame")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("synth", help="scene -> detection stream and truth sidecar")
    common(p, config=False)
    p.add_argument("--truth", help="truth sidecar path (default: next to --out)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-px", type=float, default=0.0, help="Gaussian pixel noise sigma")
    p.add_argument("--quantize", action="store_true", help="round pixels to integers")
    p.add_argument("--drop-prob", type=float, default=0.0, help="per-part drop probability")
    p.add_argument("--drop-kinds", default="FW,RW,FB,RB", help="contact point kinds subject to dropping")
    p.add_argument("--slope", type=float, default=0.0, help="true ground gradient along ego x")
    p.add_argument("--slope-pivot", type=float, default=NoiseSpec.slope_pivot_x, help="x (m) where the sloped ground meets z = 0")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="BEV map + truth sidecar -> error report")
    common(p, calib=False)
    p.add_argument("--truth", help="truth sidecar written by synth")
    p.add_argument("--gate-x", type=float)
    p.add_argument("--gate-y0", type=float)
    p.add_argument("--gate-y1", type=float)
    p.add_argument("--gate-y2", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="BEV map -> SVG per frame")
    p.add_argument("--in", dest="in_path", required=True, help="BEV map")
    p.add_argument("--out", help="output directory (svg) or file (text)")
    p.add_argument("--format", choices=("text", "svg"), default="svg")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, SvbevError, OSError, ValueError) as exc:
        print(f"svbev {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
