# matchstick/geometry.py
"""
Straight-line drawings of planar maps and the matchstick validator.

A drawing passes when every edge has length 1 within a relative tolerance,
no two edges cross or overlap, no two vertices coincide, and the
counterclockwise angular order of neighbours at every vertex is the stored
rotation. Validation failures are report entries; only malformed input raises.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from matchstick.core import DEFAULT_TOLERANCE, MatchstickError, Report
from matchstick.map_core import PlanarMap
from matchstick.utils import NotUtf8, read_utf8_file

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

_COORD_PATTERN = re.compile(r"^\s*(\d+)\s*:\s*(\S+)\s+(\S+)\s*$")

DISJOINT = "disjoint"
TOUCH = "touch"
CROSS = "cross"
OVERLAP = "overlap"


class GeometryError(MatchstickError):
    pass


class MissingCoordinates(GeometryError):
    pass


class CoordinateSyntaxError(GeometryError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


# --- coordinates file ---

def parse_coords(text: str) -> Dict[int, Point]:
    coords: Dict[int, Point] = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        match = _COORD_PATTERN.match(line)
        if not match:
            raise CoordinateSyntaxError(f"expected '<id>: <x> <y>', got {raw_line.strip()!r}", line_number)
        vertex = int(match.group(1))
        if vertex in coords:
            raise CoordinateSyntaxError(f"vertex {vertex} has two positions", line_number)
        try:
            x, y = float(match.group(2)), float(match.group(3))
        except ValueError:
            raise CoordinateSyntaxError(f"not a decimal number in {raw_line.strip()!r}", line_number) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise CoordinateSyntaxError(f"coordinates of vertex {vertex} are not finite", line_number)
        coords[vertex] = (x, y)
    return coords


def _decimal(value: float) -> str:
    return np.format_float_positional(float(value) + 0.0, unique=True, trim="-")


def serialize_coords(coords: Mapping[int, Sequence[float]]) -> str:
    return "".join(f"{v}: {_decimal(coords[v][0])} {_decimal(coords[v][1])}\n" for v in sorted(coords))


def load_coords(path) -> Dict[int, Point]:
    logger.info(f"Loading coordinates from {path}")
    try:
        text = read_utf8_file(Path(path))
    except NotUtf8 as error:
        raise CoordinateSyntaxError(str(error)) from None
    return parse_coords(text)


def dump_coords(coords: Mapping[int, Sequence[float]], path) -> None:
    Path(path).write_text(serialize_coords(coords), encoding="utf-8")


# --- drawings ---

@dataclass(frozen=True)
class GeometricMap:
    map: PlanarMap
    coords: Mapping[int, Point]
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        missing = [v for v in self.map.vertices if v not in self.coords]
        if missing:
            raise MissingCoordinates(f"no coordinates for vertices {missing[:10]}")
        extra = sorted(set(self.coords) - set(self.map.vertices))
        if extra:
            logger.warning(f"Ignoring coordinates of undeclared vertices {extra[:10]}")
        if not self.tolerance > 0:
            raise GeometryError(f"tolerance must be positive, got {self.tolerance}")
        object.__setattr__(self, "coords", {
            v: (float(self.coords[v][0]), float(self.coords[v][1])) for v in self.map.vertices
        })

    def point(self, v: int) -> np.ndarray:
        return np.asarray(self.coords[v], dtype=float)

    def as_array(self) -> np.ndarray:
        return np.array([self.coords[v] for v in self.map.vertices], dtype=float).reshape(-1, 2)

    def edge_length(self, u: int, v: int) -> float:
        return float(np.hypot(*(self.point(u) - self.point(v))))

    def signed_area(self, face_id: int) -> float:
        """Shoelace area of the face walk; bounded faces are positive, the outer face negative."""
        walk = self.map.face_vertices(face_id)
        if len(walk) < 3:
            return 0.0
        xs = np.array([self.coords[v][0] for v in walk])
        ys = np.array([self.coords[v][1] for v in walk])
        return float(0.5 * (np.dot(xs, np.roll(ys, -1)) - np.dot(np.roll(xs, -1), ys)))

    def is_bounded_face(self, face_id: int) -> bool:
        return self.signed_area(face_id) > 0

    def moved(self, coords: Mapping[int, Point]) -> "GeometricMap":
        return GeometricMap(self.map, coords, self.tolerance)


def _angle(origin: Sequence[float], target: Sequence[float]) -> float:
    angle = math.atan2(target[1] - origin[1], target[0] - origin[0])
    return angle if angle >= 0 else angle + 2 * math.pi


def rotation_from_coords(adjacency: Mapping[int, Sequence[int]], coords: Mapping[int, Sequence[float]]) -> Dict[int, List[int]]:
    """Counterclockwise rotation system of a straight-line drawing."""
    return {
        v: sorted(adjacency[v], key=lambda u: (_angle(coords[v], coords[u]), u))
        for v in sorted(adjacency)
    }


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    if a[0] not in b:
        return False
    offset = list(b).index(a[0])
    return list(a) == list(b[offset:]) + list(b[:offset])


# --- segment predicates ---

def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _sign(value: float, eps: float) -> int:
    if value > eps:
        return 1
    if value < -eps:
        return -1
    return 0


def _on_segment(p, q, r, eps: float) -> bool:
    """r is collinear with pq; is it inside the closed segment?"""
    return (min(p[0], q[0]) - eps <= r[0] <= max(p[0], q[0]) + eps
            and min(p[1], q[1]) - eps <= r[1] <= max(p[1], q[1]) + eps)


def segment_relation(p, q, r, s, eps: float = DEFAULT_TOLERANCE) -> str:
    """
    Relation of closed segments pq and rs: disjoint, touch (one common point that
    is an endpoint of at least one segment), cross (proper interior crossing)
    or overlap (collinear with a common interval of positive length).
    """
    o1, o2 = _sign(_orient(p, q, r), eps), _sign(_orient(p, q, s), eps)
    o3, o4 = _sign(_orient(r, s, p), eps), _sign(_orient(r, s, q), eps)

    if o1 == o2 == o3 == o4 == 0:
        direction = np.subtract(q, p)
        norm = float(np.dot(direction, direction))
        if norm <= eps * eps:
            return TOUCH if _on_segment(r, s, p, eps) else DISJOINT
        t0, t1 = sorted((float(np.dot(np.subtract(r, p), direction)) / norm,
                         float(np.dot(np.subtract(s, p), direction)) / norm))
        common = min(1.0, t1) - max(0.0, t0)
        scale = eps / math.sqrt(norm)
        if common > scale:
            return OVERLAP
        if common >= -scale:
            return TOUCH
        return DISJOINT

    if o1 * o2 < 0 and o3 * o4 < 0:
        return CROSS
    if (o1 == 0 and _on_segment(p, q, r, eps)) or (o2 == 0 and _on_segment(p, q, s, eps)) \
            or (o3 == 0 and _on_segment(r, s, p, eps)) or (o4 == 0 and _on_segment(r, s, q, eps)):
        return TOUCH
    return DISJOINT


def edge_pair_relation(gmap: GeometricMap, e1: Tuple[int, int], e2: Tuple[int, int]) -> str:
    """
    Like segment_relation, but edges meeting at a shared endpoint only conflict
    when they leave it in the same direction.
    """
    eps = gmap.tolerance
    shared = set(e1) & set(e2)
    if shared:
        w = shared.pop()
        x = e1[0] if e1[1] == w else e1[1]
        y = e2[0] if e2[1] == w else e2[1]
        origin, a, b = gmap.coords[w], gmap.coords[x], gmap.coords[y]
        da, db = np.subtract(a, origin), np.subtract(b, origin)
        collinear = abs(float(da[0] * db[1] - da[1] * db[0])) <= eps * max(float(np.hypot(*da)), float(np.hypot(*db)), 1.0)
        return OVERLAP if collinear and float(np.dot(da, db)) > 0 else DISJOINT
    return segment_relation(gmap.coords[e1[0]], gmap.coords[e1[1]], gmap.coords[e2[0]], gmap.coords[e2[1]], eps)


# --- validation ---

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    failures: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "failures": list(self.failures)}


@dataclass(frozen=True)
class ValidationReport(Report):
    checks: Tuple[CheckResult, ...]
    tolerance: float
    max_length_error: float
    crossing_pairs: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...] = field(default=())

    report_kind = "validation"

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    def check_map(self) -> Dict[str, bool]:
        return {check.name: check.passed for check in self.checks}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "max_length_error": self.max_length_error,
            "checks": [check.to_dict() for check in self.checks],
        }

    def summary_lines(self) -> List[str]:
        lines = [f"matchstick validation: {'PASS' if self.passed else 'FAIL'} (tolerance {self.tolerance:g})"]
        for check in self.checks:
            lines.append(f"  [{'ok' if check.passed else 'FAILED'}] {check.name}")
            lines.extend(f"      {failure}" for failure in check.failures[:10])
            if len(check.failures) > 10:
                lines.append(f"      ... {len(check.failures) - 10} more")
        lines.append(f"max |length - 1|: {self.max_length_error:.3e}")
        return lines


def validate_matchstick(gmap: GeometricMap, k: Optional[int] = None) -> ValidationReport:
    pmap = gmap.map
    eps = gmap.tolerance

    length_failures = []
    max_error = 0.0
    for u, v in pmap.edges:
        error = abs(gmap.edge_length(u, v) - 1.0)
        max_error = max(max_error, error)
        if error > eps:
            length_failures.append(f"edge {u}-{v} has length {gmap.edge_length(u, v):.9f}")

    coincident = []
    if pmap.num_vertices >= 2:
        distances = squareform(pdist(gmap.as_array()))
        rows, cols = np.nonzero(np.triu(distances <= eps, k=1))
        coincident = [f"vertices {pmap.vertices[i]} and {pmap.vertices[j]} coincide" for i, j in zip(rows, cols)]

    crossings, overlaps, crossing_pairs = [], [], []
    for e1, e2 in combinations(pmap.edges, 2):
        relation = edge_pair_relation(gmap, e1, e2)
        if relation == CROSS:
            crossings.append(f"edges {e1[0]}-{e1[1]} and {e2[0]}-{e2[1]} cross")
            crossing_pairs.append((e1, e2))
        elif relation in (OVERLAP, TOUCH):
            overlaps.append(f"edges {e1[0]}-{e1[1]} and {e2[0]}-{e2[1]} overlap")

    rotation_failures = []
    drawn = rotation_from_coords({v: pmap.neighbors(v) for v in pmap.vertices}, gmap.coords)
    for v in pmap.vertices:
        if not _same_cycle(pmap.neighbors(v), drawn[v]):
            rotation_failures.append(f"vertex {v}: stored {list(pmap.neighbors(v))}, drawn {drawn[v]}")

    checks = [
        CheckResult("unit-lengths", not length_failures, tuple(length_failures)),
        CheckResult("coincident-vertices", not coincident, tuple(coincident)),
        CheckResult("crossings", not crossings, tuple(crossings)),
        CheckResult("overlaps", not overlaps, tuple(overlaps)),
        CheckResult("rotation-consistency", not rotation_failures, tuple(rotation_failures)),
    ]
    if k is not None:
        irregular = [f"vertex {v} has degree {pmap.degree(v)}" for v in pmap.vertices if pmap.degree(v) != k]
        checks.append(CheckResult(f"{k}-regular", not irregular, tuple(irregular)))

    report = ValidationReport(
        checks=tuple(checks),
        tolerance=eps,
        max_length_error=max_error,
        crossing_pairs=tuple(crossing_pairs),
    )
    logger.debug(f"validation {'passed' if report.passed else 'failed'}: {report.check_map()}")
    return report


# --- triangles and diamonds ---

def count_triangles_at(gmap: GeometricMap, v: int) -> int:
    """Bounded triangular faces at v, one per corner."""
    count = sum(
        1 for face_id in gmap.map.faces_at(v)
        if gmap.map.face_size(face_id) == 3 and gmap.is_bounded_face(face_id)
    )
    if gmap.map.degree(v) == 5 and count > 4:
        logger.warning(f"vertex {v} of degree 5 has {count} triangles; a unit-edge drawing allows at most 4")
    return count


def triangle_bound_violations(gmap: GeometricMap) -> List[int]:
    return [v for v in gmap.map.vertices if gmap.map.degree(v) == 5 and count_triangles_at(gmap, v) > 4]


class DiamondEntry(NamedTuple):
    face_id: int
    diagonal: Tuple[int, int]
    length: float


def detect_diamonds(gmap: GeometricMap) -> List[DiamondEntry]:
    """
    Bounded quadrilateral faces whose shorter diagonal has unit length and runs
    inside the face, in face-id order.
    """
    entries = []
    for face_id in range(gmap.map.num_faces):
        walk = gmap.map.face_vertices(face_id)
        if len(walk) != 4 or len(set(walk)) != 4 or not gmap.is_bounded_face(face_id):
            continue
        a, b, c, d = walk
        candidates = sorted(
            ((gmap.edge_length(a, c), (a, c), (b, d)), (gmap.edge_length(b, d), (b, d), (a, c))),
            key=lambda item: item[0],
        )
        length, (p, q), (r, s) = candidates[0]
        if abs(length - 1.0) > gmap.tolerance:
            continue
        side_r = _orient(gmap.coords[p], gmap.coords[q], gmap.coords[r])
        side_s = _orient(gmap.coords[p], gmap.coords[q], gmap.coords[s])
        if side_r * side_s >= 0:
            # dart: the unit diagonal runs outside the face
            continue
        entries.append(DiamondEntry(face_id, (min(p, q), max(p, q)), length))
    return entries


# --- SVG ---

CHARGE_COLOURS = {1: "#c0392b", 0: "#7f8c8d", -1: "#2c7fb8"}


def _svg_number(value: float) -> str:
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def render_svg(gmap: GeometricMap, labels: bool = False, charges: Optional[Mapping[int, Fraction]] = None) -> str:
    """
    SVG 1.1 drawing: one line element per edge, vertices as circles coloured by
    the sign of their charge when charges are given. Deterministic for equal input.
    """
    pmap = gmap.map
    points = {v: (gmap.coords[v][0], -gmap.coords[v][1]) for v in pmap.vertices}
    if points:
        xs = [p[0] for p in points.values()]
        ys = [p[1] for p in points.values()]
        width, height = max(xs) - min(xs), max(ys) - min(ys)
        margin = 0.05 * max(width, height, 1.0)
        view_box = (min(xs) - margin, min(ys) - margin, width + 2 * margin, height + 2 * margin)
    else:
        view_box = (0.0, 0.0, 1.0, 1.0)
    unit = max(view_box[2], view_box[3])

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{" ".join(_svg_number(value) for value in view_box)}" width="600" height="600">',
        f'<g stroke="#222222" stroke-width="{_svg_number(unit / 200)}" stroke-linecap="round">',
    ]
    for u, v in pmap.edges:
        (x1, y1), (x2, y2) = points[u], points[v]
        parts.append(f'<line x1="{_svg_number(x1)}" y1="{_svg_number(y1)}" '
                     f'x2="{_svg_number(x2)}" y2="{_svg_number(y2)}"/>')
    parts.append('</g>')

    parts.append('<g stroke="none">')
    for v in pmap.vertices:
        x, y = points[v]
        colour = "#222222"
        if charges is not None and v in charges:
            value = Fraction(charges[v])
            colour = CHARGE_COLOURS[(value > 0) - (value < 0)]
        parts.append(f'<circle cx="{_svg_number(x)}" cy="{_svg_number(y)}" '
                     f'r="{_svg_number(unit / 80)}" fill="{colour}"/>')
    parts.append('</g>')

    if labels:
        parts.append(f'<g font-family="sans-serif" font-size="{_svg_number(unit / 30)}" fill="#000000">')
        for v in pmap.vertices:
            x, y = points[v]
            parts.append(f'<text x="{_svg_number(x + unit / 60)}" y="{_svg_number(y - unit / 60)}">{v}</text>')
        parts.append('</g>')

    parts.append('</svg>')
    return "\n".join(parts) + "\n"
