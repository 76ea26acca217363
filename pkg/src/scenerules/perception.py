"""Scene ingestion: detection dedup, color naming, and KB entity creation.

Detections arrive from scene files (no live detector): each carries a
bounding box, a ranked list of category candidates with confidences, and the
HSV color of the cropped region.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .kb import KnowledgeBase, Provenance, normalize_value


class PerceptionError(Exception):
    pass


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if min(self.x_min, self.y_min) < 0:
            raise PerceptionError("box coordinates must be >= 0")
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise PerceptionError("box must have positive area")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True)
class CategoryCandidate:
    category: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise PerceptionError(f"confidence {self.confidence} outside [0,1]")
        object.__setattr__(self, "category", normalize_value(self.category))


@dataclass
class Detection:
    box: BoundingBox
    candidates: list[CategoryCandidate]
    region_color: tuple[float, float, float]  # (hue deg, sat, val)

    def __post_init__(self):
        if not self.candidates:
            raise PerceptionError("detection needs at least one candidate")
        self.candidates = sorted(self.candidates,
                                 key=lambda c: (-c.confidence, c.category))
        h, s, v = self.region_color
        if not (0.0 <= h < 360.0 and 0.0 <= s <= 1.0 and 0.0 <= v <= 1.0):
            raise PerceptionError(f"invalid HSV triple {self.region_color}")

    @property
    def top(self) -> CategoryCandidate:
        return self.candidates[0]


@dataclass
class SceneFrame:
    image_id: str
    detections: list[Detection] = field(default_factory=list)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0.0 for disjoint boxes."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def _merge_candidates(kept: list[CategoryCandidate],
                      new: list[CategoryCandidate]) -> list[CategoryCandidate]:
    best: dict[str, float] = {}
    for cand in list(kept) + list(new):
        if cand.confidence > best.get(cand.category, -1.0):
            best[cand.category] = cand.confidence
    merged = [CategoryCandidate(cat, conf) for cat, conf in best.items()]
    return sorted(merged, key=lambda c: (-c.confidence, c.category))


def dedup_detections(dets: list[Detection], threshold: float) -> list[Detection]:
    """Greedy merge of overlapping detections, most confident first.

    A detection whose IoU with an already-kept one reaches the threshold is
    folded into that keeper: its candidates join the keeper's list (max
    confidence per category).  Keepers come out in the order they were kept.
    """
    if not 0.0 < threshold <= 1.0:
        raise PerceptionError(f"threshold {threshold} outside (0,1]")
    order = sorted(dets, key=lambda d: -d.top.confidence)
    keepers: list[Detection] = []
    for det in order:
        for keeper in keepers:
            if iou(det.box, keeper.box) >= threshold:
                keeper.candidates = _merge_candidates(keeper.candidates,
                                                      det.candidates)
                break
        else:
            keepers.append(Detection(det.box, list(det.candidates),
                                     det.region_color))
    return keepers


# Standard palette: name -> canonical HSV.
PALETTE = [
    ("red", 0.0, 1.0, 1.0),
    ("orange", 30.0, 1.0, 1.0),
    ("yellow", 60.0, 1.0, 1.0),
    ("green", 120.0, 1.0, 1.0),
    ("cyan", 180.0, 1.0, 1.0),
    ("blue", 240.0, 1.0, 1.0),
    ("purple", 275.0, 1.0, 1.0),
    ("pink", 330.0, 0.5, 1.0),
    ("brown", 30.0, 1.0, 0.6),
    ("white", 0.0, 0.0, 1.0),
    ("gray", 0.0, 0.0, 0.5),
    ("black", 0.0, 0.0, 0.0),
]

COLOR_NAMES = tuple(name for name, *_ in PALETTE)


def hsv_distance(a: tuple[float, float, float],
                 b: tuple[float, float, float]) -> float:
    dh = abs(a[0] - b[0])
    dh = min(dh, 360.0 - dh) / 180.0
    return math.sqrt(dh * dh + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def name_color(hsv: tuple[float, float, float]) -> str:
    """Nearest palette name, with achromatic gating.

    Raw HSV distance misclassifies dark/washed-out regions, so very low
    value maps to black and very low saturation to white/gray/black by
    value thirds before the hue-based nearest-neighbor kicks in.
    """
    h, s, v = hsv
    if not (0.0 <= h < 360.0 and 0.0 <= s <= 1.0 and 0.0 <= v <= 1.0):
        raise PerceptionError(f"invalid HSV triple {hsv}")
    if v < 0.15:
        return "black"
    if s < 0.12:
        if v >= 2.0 / 3.0:
            return "white"
        if v >= 1.0 / 3.0:
            return "gray"
        return "black"
    chromatic = [entry for entry in PALETTE if entry[2] > 0.0]
    best_name, best_d = None, None
    for name, ph, ps, pv in chromatic:
        d = hsv_distance(hsv, (ph, ps, pv))
        if best_d is None or d < best_d:  # ties keep palette order
            best_name, best_d = name, d
    return best_name


def ingest_scene(frame: SceneFrame, kb: KnowledgeBase,
                 threshold: float = 0.5) -> list[tuple[str, Detection]]:
    """Dedup the frame and create one entity per surviving detection.

    Each entity gets category (top candidate, vision provenance at its
    confidence) and color (vision, confidence 1.0).  The full candidate list
    rides along in the returned pairs for later disambiguation.
    """
    survivors = dedup_detections(frame.detections, threshold)
    out = []
    for det in survivors:
        eid = kb.create_entity({
            "category": (det.top.category,
                         Provenance("vision", det.top.confidence)),
            "color": (name_color(det.region_color), Provenance("vision", 1.0)),
        })
        out.append((eid, det))
    return out


def frame_from_dict(doc: dict) -> SceneFrame:
    try:
        detections = []
        for d in doc.get("detections", []):
            box = BoundingBox(*d["box"])
            candidates = [CategoryCandidate(c["cat"], c["conf"])
                          for c in d["candidates"]]
            detections.append(Detection(box, candidates, tuple(d["hsv"])))
        return SceneFrame(doc.get("image_id", ""), detections)
    except (KeyError, TypeError) as exc:
        raise PerceptionError(f"malformed scene document: {exc}") from exc


def load_scene(path: str) -> SceneFrame:
    with open(path, encoding="utf-8") as fh:
        return frame_from_dict(json.load(fh))
