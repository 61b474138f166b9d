"""Line-delimited file formats.

Every file is JSON Lines: the first line is a header naming the format,
its version and the units, every further line is one record. Angles are
degrees in files and radians in memory. Floats are rounded to 6 decimals
and written in Python's shortest round-trip form, so the bytes depend only
on the values and not on the platform.

    svbev.detections   one record per (frame, channel)
    svbev.scene        one record per ground-truth vehicle
    svbev.truth        scene records plus visibility; header holds the noise
    svbev.bevmap       one record per frame with its BEV boxes
    svbev.eval         one record per matched target, then a summary record

The pipeline configuration is a single JSON document (svbev.config).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .adapters import AdapterConfig, BoxClass, DetectedBox, DetectionRecord, HeadingEstimate, TypeLabel
from .camera import CHANNEL_ORDER, Channel, GroundPoint
from .errors import FormatError
from .model import BevBox
from .pipeline import FrameResult, PipelineConfig
from .reid import FusionConfig
from .synth import ErrorReport, EvalThresholds, GroundTruthVehicle, NoiseSpec, RenderResult

DETECTIONS_FORMAT = "svbev.detections"
SCENE_FORMAT = "svbev.scene"
TRUTH_FORMAT = "svbev.truth"
BEVMAP_FORMAT = "svbev.bevmap"
EVAL_FORMAT = "svbev.eval"
CONFIG_FORMAT = "svbev.config"
VERSION = 1
DECIMALS = 6

BBOX_UNITS = {"bbox": "px, [x, y, w, h], top-left origin", "heading": "deg"}
GROUND_UNITS = {"position": "m, ego frame (x forward, y left)", "heading": "deg"}


# ---------------------------------------------------------------------------
# canonical JSON


def _canon(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise FormatError(f"cannot write non-finite number {value}")
        r = round(value, DECIMALS)
        return 0.0 if r == 0 else r
    if isinstance(value, Mapping):
        return {str(k): _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return _canon(value.item())
    raise FormatError(f"cannot write value of type {type(value).__name__}")


def dumps_line(obj: Mapping[str, Any]) -> str:
    return json.dumps(_canon(obj), separators=(",", ":"), ensure_ascii=True, allow_nan=False)


def dumps_jsonl(header: Mapping[str, Any], records: Iterable[Mapping[str, Any]]) -> str:
    return "".join(dumps_line(r) + "\n" for r in (header, *records))


def _deg(rad: float) -> float:
    return math.degrees(rad)


def _rad(deg: float) -> float:
    from .model import wrap_angle

    return wrap_angle(math.radians(deg))


# ---------------------------------------------------------------------------
# strict parsing helpers


def _keys(obj: Any, allowed: set[str], required: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise FormatError(f"{where}: unknown field(s) {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise FormatError(f"{where}: missing field(s) {missing}")
    return obj


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise FormatError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise FormatError(f"{where}: expected a string, got {value!r}")
    return value


def _vec(value: Any, n: int, where: str) -> list[float]:
    if not isinstance(value, list) or len(value) != n:
        raise FormatError(f"{where}: expected a list of {n} numbers")
    return [_num(v, where) for v in value]


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected a list")
    return value


def _bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise FormatError(f"{where}: expected true or false, got {value!r}")
    return value


def loads_jsonl(text: str, fmt: str, where: str = "input") -> tuple[dict, list[tuple[int, dict]]]:
    """Header and (line number, record) pairs; blank lines are not allowed."""
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{where}: empty file, expected a {fmt} header")
    parsed = []
    for no, line in enumerate(lines, start=1):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{where}:{no}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise FormatError(f"{where}:{no}: expected an object")
        parsed.append((no, obj))
    header = parsed[0][1]
    if header.get("format") != fmt:
        raise FormatError(f"{where}:1: expected format {fmt!r}, got {header.get('format')!r}")
    if header.get("version") != VERSION:
        raise FormatError(f"{where}:1: unsupported {fmt} version {header.get('version')!r}")
    return header, parsed[1:]


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# detection streams


def detection_record_to_obj(r: DetectionRecord) -> dict:
    return {
        "frame_id": r.frame_id,
        "channel": r.channel.value,
        "boxes": [{"class": b.cls.value, "bbox": list(b.bbox), "score": b.score} for b in r.boxes],
        "type_labels": [{"vehicle_bbox": list(t.vehicle_bbox), "type": t.type_name, "score": t.score} for t in r.type_labels],
        "headings": [
            {"vehicle_bbox": list(h.vehicle_bbox), "heading_deg": _deg(h.heading), "score": h.score}
            for h in r.heading_estimates
        ],
    }


def _parse_detection(obj: dict, where: str) -> DetectionRecord:
    _keys(obj, {"frame_id", "channel", "boxes", "type_labels", "headings"}, {"frame_id", "channel"}, where)
    try:
        channel = Channel(_str(obj["channel"], f"{where}.channel"))
    except ValueError:
        raise FormatError(f"{where}: unknown channel {obj['channel']!r}") from None
    boxes, labels, headings = [], [], []
    for i, b in enumerate(_list(obj.get("boxes", []), f"{where}.boxes")):
        w = f"{where}.boxes[{i}]"
        _keys(b, {"class", "bbox", "score"}, {"class", "bbox"}, w)
        try:
            cls = BoxClass(_str(b["class"], w))
        except ValueError:
            raise FormatError(f"{w}: unknown class {b['class']!r}") from None
        boxes.append((cls, _vec(b["bbox"], 4, w), _num(b.get("score", 1.0), w)))
    for i, t in enumerate(_list(obj.get("type_labels", []), f"{where}.type_labels")):
        w = f"{where}.type_labels[{i}]"
        _keys(t, {"vehicle_bbox", "type", "score"}, {"vehicle_bbox", "type"}, w)
        labels.append((_vec(t["vehicle_bbox"], 4, w), _str(t["type"], w), _num(t.get("score", 1.0), w)))
    for i, h in enumerate(_list(obj.get("headings", []), f"{where}.headings")):
        w = f"{where}.headings[{i}]"
        _keys(h, {"vehicle_bbox", "heading_deg", "score"}, {"vehicle_bbox", "heading_deg"}, w)
        headings.append((_vec(h["vehicle_bbox"], 4, w), _rad(_num(h["heading_deg"], w)), _num(h.get("score", 1.0), w)))
    try:
        return DetectionRecord(
            channel=channel,
            frame_id=_int(obj["frame_id"], f"{where}.frame_id"),
            boxes=tuple(DetectedBox(c, bb, s) for c, bb, s in boxes),
            type_labels=tuple(TypeLabel(bb, name, s) for bb, name, s in labels),
            heading_estimates=tuple(HeadingEstimate(bb, hd, s) for bb, hd, s in headings),
        )
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def dumps_detections(frames: Iterable[Mapping[Channel, DetectionRecord]]) -> str:
    records = []
    for frame in frames:
        for ch in CHANNEL_ORDER:
            if ch in frame:
                records.append(detection_record_to_obj(frame[ch]))
    return dumps_jsonl({"format": DETECTIONS_FORMAT, "version": VERSION, "units": BBOX_UNITS}, records)


def loads_detections(text: str, where: str = "detections") -> list[tuple[int, dict[Channel, DetectionRecord]]]:
    """Frames in file order; records of one frame must be contiguous."""
    _, lines = loads_jsonl(text, DETECTIONS_FORMAT, where)
    frames: list[tuple[int, dict[Channel, DetectionRecord]]] = []
    seen: set[int] = set()
    for no, obj in lines:
        rec = _parse_detection(obj, f"{where}:{no}")
        if not frames or frames[-1][0] != rec.frame_id:
            if rec.frame_id in seen:
                raise FormatError(f"{where}:{no}: frame {rec.frame_id} is split across the file")
            seen.add(rec.frame_id)
            frames.append((rec.frame_id, {}))
        if rec.channel in frames[-1][1]:
            raise FormatError(f"{where}:{no}: second {rec.channel.value} record in frame {rec.frame_id}")
        frames[-1][1][rec.channel] = rec
    return frames


# ---------------------------------------------------------------------------
# scenes and truth sidecars


def _vehicle_obj(frame_id: int, v: GroundTruthVehicle) -> dict:
    return {
        "frame_id": frame_id,
        "id": v.id,
        "x": v.center.x,
        "y": v.center.y,
        "heading_deg": _deg(v.heading),
        "type_name": v.type_name,
    }


def _parse_vehicle(obj: dict, where: str, extra: set[str] = frozenset()) -> tuple[int, GroundTruthVehicle]:
    _keys(obj, {"frame_id", "id", "x", "y", "heading_deg", "type_name"} | extra, {"id", "x", "y", "heading_deg", "type_name"}, where)
    frame_id = _int(obj.get("frame_id", 0), f"{where}.frame_id")
    v = GroundTruthVehicle(
        id=_int(obj["id"], f"{where}.id"),
        center=GroundPoint(_num(obj["x"], f"{where}.x"), _num(obj["y"], f"{where}.y")),
        heading=_rad(_num(obj["heading_deg"], f"{where}.heading_deg")),
        type_name=_str(obj["type_name"], f"{where}.type_name"),
    )
    return frame_id, v


def dumps_scene(frames: Mapping[int, Sequence[GroundTruthVehicle]]) -> str:
    records = [_vehicle_obj(fid, v) for fid in sorted(frames) for v in frames[fid]]
    return dumps_jsonl({"format": SCENE_FORMAT, "version": VERSION, "units": GROUND_UNITS}, records)


def _group_vehicles(pairs, where: str) -> dict[int, list[GroundTruthVehicle]]:
    frames: dict[int, list[GroundTruthVehicle]] = {}
    for no, fid, v in pairs:
        if any(o.id == v.id for o in frames.get(fid, [])):
            raise FormatError(f"{where}:{no}: duplicate vehicle id {v.id} in frame {fid}")
        frames.setdefault(fid, []).append(v)
    return frames


def loads_scene(text: str, where: str = "scene") -> dict[int, list[GroundTruthVehicle]]:
    """Vehicles per frame; ``frame_id`` defaults to 0 for single-frame scenes."""
    _, lines = loads_jsonl(text, SCENE_FORMAT, where)
    pairs = []
    for no, obj in lines:
        fid, v = _parse_vehicle(obj, f"{where}:{no}")
        pairs.append((no, fid, v))
    return _group_vehicles(pairs, where)


def noise_obj(noise: NoiseSpec) -> dict:
    return {
        "pixel_sigma": noise.pixel_sigma,
        "quantize": noise.quantize,
        "drop_probability": noise.drop_probability,
        "drop_kinds": sorted(k.value for k in noise.drop_kinds),
        "slope_gradient": noise.slope_gradient,
        "slope_pivot_x": noise.slope_pivot_x,
        "heading_sigma": noise.heading_sigma,
        "seed": noise.seed,
    }


def _parse_noise(obj: Any, where: str) -> NoiseSpec:
    fields = {"pixel_sigma", "quantize", "drop_probability", "drop_kinds", "slope_gradient", "slope_pivot_x", "heading_sigma", "seed"}
    _keys(obj, fields, fields, where)
    try:
        return NoiseSpec(
            pixel_sigma=_num(obj["pixel_sigma"], where),
            quantize=_bool(obj["quantize"], where),
            drop_probability=_num(obj["drop_probability"], where),
            drop_kinds=frozenset(_str(k, where) for k in _list(obj["drop_kinds"], where)),
            slope_gradient=_num(obj["slope_gradient"], where),
            slope_pivot_x=_num(obj["slope_pivot_x"], where),
            heading_sigma=_num(obj["heading_sigma"], where),
            seed=_int(obj["seed"], where),
        )
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


@dataclass
class Truth:
    noise: NoiseSpec
    frames: dict[int, list[GroundTruthVehicle]]
    visible: dict[tuple[int, int], bool] = field(default_factory=dict)
    channels: dict[tuple[int, int], list[str]] = field(default_factory=dict)

    def visible_vehicles(self, frame_id: int) -> list[GroundTruthVehicle]:
        return [v for v in self.frames.get(frame_id, []) if self.visible[frame_id, v.id]]


def truth_from_render(noise: NoiseSpec, frames: Mapping[int, Sequence[GroundTruthVehicle]], renders: Mapping[int, RenderResult]) -> Truth:
    truth = Truth(noise, {fid: list(vs) for fid, vs in frames.items()})
    for fid, vs in frames.items():
        for v in vs:
            vis = renders[fid].visibility[v.id]
            truth.visible[fid, v.id] = vis.visible
            truth.channels[fid, v.id] = [c.value for c in vis.channels]
    return truth


def dumps_truth(truth: Truth) -> str:
    records = []
    for fid in sorted(truth.frames):
        for v in truth.frames[fid]:
            rec = _vehicle_obj(fid, v)
            rec["visible"] = truth.visible[fid, v.id]
            rec["channels"] = truth.channels[fid, v.id]
            records.append(rec)
    header = {"format": TRUTH_FORMAT, "version": VERSION, "units": GROUND_UNITS, "noise": noise_obj(truth.noise)}
    return dumps_jsonl(header, records)


def loads_truth(text: str, where: str = "truth") -> Truth:
    header, lines = loads_jsonl(text, TRUTH_FORMAT, where)
    _keys(header, {"format", "version", "units", "noise"}, {"format", "version", "noise"}, f"{where}:1")
    noise = _parse_noise(header["noise"], f"{where}:1.noise")
    pairs, visible, channels = [], {}, {}
    for no, obj in lines:
        w = f"{where}:{no}"
        fid, v = _parse_vehicle(obj, w, {"visible", "channels"})
        visible[fid, v.id] = _bool(obj.get("visible", True), f"{w}.visible")
        channels[fid, v.id] = [_str(c, f"{w}.channels") for c in _list(obj.get("channels", []), f"{w}.channels")]
        pairs.append((no, fid, v))
    return Truth(noise, _group_vehicles(pairs, where), visible, channels)


# ---------------------------------------------------------------------------
# BEV maps


def _pt(p: GroundPoint) -> list[float]:
    return [p.x, p.y]


def box_to_obj(b: BevBox) -> dict:
    return {
        "obj_id": b.obj_id,
        "type": b.type_name,
        "center": _pt(b.center),
        "heading_deg": _deg(b.heading),
        "corners": {"A": _pt(b.A), "B": _pt(b.B), "C": _pt(b.C), "D": _pt(b.D)},
        "case": b.case,
    }


def _parse_box(obj: dict, where: str) -> BevBox:
    _keys(obj, {"obj_id", "type", "center", "heading_deg", "corners", "case"}, {"obj_id", "type", "center", "heading_deg", "corners"}, where)
    corners = _keys(obj["corners"], {"A", "B", "C", "D"}, {"A", "B", "C", "D"}, f"{where}.corners")
    case = obj.get("case")
    return BevBox(
        obj_id=_int(obj["obj_id"], f"{where}.obj_id"),
        center=GroundPoint(*_vec(obj["center"], 2, f"{where}.center")),
        heading=_rad(_num(obj["heading_deg"], f"{where}.heading_deg")),
        corners=tuple(GroundPoint(*_vec(corners[k], 2, f"{where}.corners.{k}")) for k in "ABCD"),
        type_name=_str(obj["type"], f"{where}.type"),
        case=None if case is None else _str(case, f"{where}.case"),
    )


@dataclass(frozen=True)
class BevFrame:
    frame_id: int
    boxes: tuple[BevBox, ...]
    diagnostics: dict = field(default_factory=dict, compare=False)


def frame_to_obj(result: FrameResult | BevFrame) -> dict:
    boxes = result.bev_boxes if isinstance(result, FrameResult) else result.boxes
    d = result.diagnostics
    diagnostics = {
        "dropped_parts": d.get("dropped_parts", 0),
        "dropped_points": d.get("dropped_points", 0),
        "unfused_vectors": d.get("unfused_vectors", 0),
        "reconciled": d.get("reconciled", 0),
        "failures": [{"obj_id": f["obj_id"], "error": f["error"]} for f in d.get("failures", [])],
    }
    return {"frame_id": result.frame_id, "objects": [box_to_obj(b) for b in boxes], "diagnostics": diagnostics}


def dumps_bevmap(frames: Iterable[FrameResult | BevFrame]) -> str:
    return dumps_jsonl(
        {"format": BEVMAP_FORMAT, "version": VERSION, "units": GROUND_UNITS}, (frame_to_obj(f) for f in frames)
    )


def loads_bevmap(text: str, where: str = "bevmap") -> list[BevFrame]:
    _, lines = loads_jsonl(text, BEVMAP_FORMAT, where)
    frames, seen = [], set()
    for no, obj in lines:
        w = f"{where}:{no}"
        _keys(obj, {"frame_id", "objects", "diagnostics"}, {"frame_id", "objects"}, w)
        fid = _int(obj["frame_id"], f"{w}.frame_id")
        if fid in seen:
            raise FormatError(f"{w}: duplicate frame {fid}")
        seen.add(fid)
        boxes = tuple(_parse_box(b, f"{w}.objects[{i}]") for i, b in enumerate(_list(obj["objects"], f"{w}.objects")))
        diagnostics = obj.get("diagnostics", {})
        if not isinstance(diagnostics, dict):
            raise FormatError(f"{w}.diagnostics: expected an object")
        frames.append(BevFrame(fid, boxes, diagnostics))
    return frames


# ---------------------------------------------------------------------------
# evaluation reports


def thresholds_obj(th: EvalThresholds) -> dict:
    return {"x_gate": th.x_gate, "y_gates": list(th.y_gates), "y_bounds": list(th.y_bounds), "match_gate": th.match_gate}


def dumps_eval(reports: Mapping[int, ErrorReport], total: ErrorReport, provenance: Mapping[str, Any] | None = None) -> str:
    header = {
        "format": EVAL_FORMAT,
        "version": VERSION,
        "units": {"error": "m", "heading_error": "deg", "distance": "m, footprint gap to the ego body"},
        "thresholds": thresholds_obj(total.thresholds),
        "provenance": dict(provenance or {}),
    }
    records = []
    for fid in sorted(reports):
        r = reports[fid]
        for t in r.targets:
            records.append(
                {
                    "frame_id": fid,
                    "truth_id": t.truth_id,
                    "obj_id": t.obj_id,
                    "distance": t.distance,
                    "dx": t.dx,
                    "dy": t.dy,
                    "dheading_deg": _deg(t.dheading),
                    "interval": t.interval,
                    "x_ok": t.x_ok,
                    "y_ok": t.y_ok,
                }
            )
        records.append({"frame_id": fid, "misses": list(r.misses), "false_positives": list(r.false_positives)})
    summary = total.summary()
    summary["max_heading_error_deg"] = _deg(summary.pop("max_heading_error_rad"))
    records.append({"summary": summary})
    return dumps_jsonl(header, records)


def format_eval_table(total: ErrorReport) -> str:
    """Human-readable summary of a report."""
    s = total.summary()
    th = total.thresholds
    lines = [
        f"matched {s['matched']}  misses {s['misses']}  false positives {s['false_positives']}",
        f"x gate {th.x_gate:.2f} m: {100 * s['x_qualified_rate']:.2f}% qualified",
    ]
    for iv in s["y_intervals"]:
        lo, hi = iv["range_m"]
        lines.append(
            f"y {lo:g}-{hi:g} m, gate {iv['gate_m']:.2f} m: {100 * iv['qualified_rate']:.2f}% qualified ({iv['count']} targets)"
        )
    lines.append(f"max center error {s['max_center_error_m']:.4f} m, max heading error {_deg(s['max_heading_error_rad']):.3f} deg")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Config:
    pipeline: PipelineConfig = PipelineConfig()
    thresholds: EvalThresholds = EvalThresholds()


def config_document(cfg: Config) -> dict:
    f, a = cfg.pipeline.fusion, cfg.pipeline.adapter
    return {
        "format": CONFIG_FORMAT,
        "version": VERSION,
        "fusion": {
            "proximity_gate": f.proximity_gate,
            "channel_weight_alpha": f.channel_weight_alpha,
            "channel_weight_beta": f.channel_weight_beta,
            "max_cluster_diameter": f.max_cluster_diameter,
        },
        "adapter": {
            "score_threshold": a.score_threshold,
            "strict_types": a.strict_types,
            "synthesize_bumpers": a.synthesize_bumpers,
        },
        "reconcile": cfg.pipeline.reconcile,
        "eval": thresholds_obj(cfg.thresholds),
    }


def load_config(document: str | Mapping[str, Any], where: str = "config") -> Config:
    """Parse a config document; omitted sections keep their defaults."""
    doc = json.loads(document) if isinstance(document, str) else dict(document)
    _keys(doc, {"format", "version", "fusion", "adapter", "reconcile", "eval"}, {"format", "version"}, where)
    if doc["format"] != CONFIG_FORMAT or doc["version"] != VERSION:
        raise FormatError(f"{where}: expected {CONFIG_FORMAT} v{VERSION}")
    try:
        fusion = FusionConfig()
        if "fusion" in doc:
            f = _keys(doc["fusion"], {"proximity_gate", "channel_weight_alpha", "channel_weight_beta", "max_cluster_diameter"}, set(), f"{where}.fusion")
            fusion = FusionConfig(**{k: _num(v, f"{where}.fusion.{k}") for k, v in f.items()})
        adapter = AdapterConfig()
        if "adapter" in doc:
            a = _keys(doc["adapter"], {"score_threshold", "strict_types", "synthesize_bumpers"}, set(), f"{where}.adapter")
            kw = {}
            if "score_threshold" in a:
                kw["score_threshold"] = _num(a["score_threshold"], f"{where}.adapter.score_threshold")
            for k in ("strict_types", "synthesize_bumpers"):
                if k in a:
                    kw[k] = _bool(a[k], f"{where}.adapter.{k}")
            adapter = AdapterConfig(**kw)
        reconcile = _bool(doc.get("reconcile", True), f"{where}.reconcile")
        thresholds = EvalThresholds()
        if "eval" in doc:
            e = _keys(doc["eval"], {"x_gate", "y_gates", "y_bounds", "match_gate"}, set(), f"{where}.eval")
            kw = {}
            if "x_gate" in e:
                kw["x_gate"] = _num(e["x_gate"], f"{where}.eval.x_gate")
            if "match_gate" in e:
                kw["match_gate"] = _num(e["match_gate"], f"{where}.eval.match_gate")
            if "y_gates" in e:
                kw["y_gates"] = tuple(_vec(e["y_gates"], 3, f"{where}.eval.y_gates"))
            if "y_bounds" in e:
                kw["y_bounds"] = tuple(_vec(e["y_bounds"], 4, f"{where}.eval.y_bounds"))
            thresholds = EvalThresholds(**kw)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None
    return Config(PipelineConfig(adapter, fusion, reconcile), thresholds)


def load_config_file(path: str | Path) -> Config:
    return load_config(read_text(path), str(path))


def default_config() -> Config:
    from importlib.resources import files

    return load_config(files("svbev").joinpath("data/default_config.json").read_text(encoding="utf-8"), "default_config.json")
