# matchstick/charge.py
"""
The discharging calculus for planar maps, in exact rational arithmetic.

Every corner of an i-gonal face contributes (10 - 3i)/i to the charge f(v) of its
vertex. On any planar map the face-wise total sum_i (10 - 3i)|F_i| equals
20 + sum_v 2(d(v) - 5), so the charges sum to 20 exactly when the map is
5-regular, and the shifted charges f~(v) = f(v) - 2(d(v) - 5) always sum to 20.
The audit checks these identities on an input, adds diamond diagonals, and then
reports which of the local bounds that would make the total non-positive fail.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from matchstick.core import MatchstickError, Report
from matchstick.map_core import FaceCensus, MapError, PlanarMap, build_map, degree_sequence, face_census
from matchstick.utils import fraction_str

logger = logging.getLogger(__name__)

TOTAL_CHARGE = Fraction(20)
POSITIVE_PENTAGON_RATIO = Fraction(1, 3)
PENTAGON_NEIGHBOUR_BOUND = Fraction(-1, 2)
HIGH_DEGREE_BOUND = Fraction(-4, 3)
MAX_DIAGONALS_PER_VERTEX = 2
MAX_TRIANGLES_AT_DEGREE_FIVE = 4

CHAIN_NOTE = (
    "a pentagon with two neighbouring four-triangle corners is a chain of three "
    "equilateral triangles, which leaves room for at most three such corners; "
    "this configuration has no drawing with unit edges"
)


class ChargeError(MatchstickError):
    pass


class NonPolygonFace(ChargeError):
    pass


class PreconditionViolated(ChargeError):
    def __init__(self, condition: str, message: str):
        self.condition = condition
        super().__init__(f"{condition}: {message}")


class DegreeOutOfRange(ChargeError):
    pass


class AugmentationError(ChargeError):
    pass


class NotAQuadrilateral(AugmentationError):
    pass


class DiagonalNotOpposite(AugmentationError):
    pass


class VertexGainsTooManyDiagonals(AugmentationError):
    pass


class AuditMode(str, Enum):
    EXACT_FIVE_REGULAR = "exact-5-regular"
    MIN_DEGREE_FIVE = "min-degree-5"

    @classmethod
    def parse(cls, value) -> "AuditMode":
        if isinstance(value, cls):
            return value
        aliases = {"exact5": cls.EXACT_FIVE_REGULAR, "mindeg5": cls.MIN_DEGREE_FIVE}
        if value in aliases:
            return aliases[value]
        return cls(value)


def face_weight(size: int) -> Fraction:
    return Fraction(10 - 3 * size, size)


# --- per-vertex charges ---

@dataclass(frozen=True)
class VertexCharge:
    vertex: int
    d: int
    face_counts: Mapping[int, int]
    f: Fraction
    f_tilde: Fraction
    f_hat: Fraction

    def count(self, size: int) -> int:
        return self.face_counts.get(size, 0)

    @property
    def f3(self) -> int:
        return self.count(3)

    @property
    def f4(self) -> int:
        return self.count(4)

    @property
    def f5(self) -> int:
        return self.count(5)

    @property
    def four_triangles_plus_pentagon(self) -> bool:
        return self.d == 5 and self.f3 == 4 and self.f5 == 1

    @property
    def classification(self) -> str:
        if self.d == 5 and self.f3 == 4 and self.f4 == 1:
            return "four triangles plus a tetragon"
        if self.four_triangles_plus_pentagon:
            return "four triangles plus a pentagon"
        if self.d == 5 and self.f3 == 5:
            return "five triangles"
        return " ".join(f"{size}^{self.face_counts[size]}" for size in sorted(self.face_counts))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vertex": self.vertex,
            "degree": self.d,
            "faces": {str(size): self.face_counts[size] for size in sorted(self.face_counts)},
            "f": fraction_str(self.f),
            "f_tilde": fraction_str(self.f_tilde),
            "f_hat": fraction_str(self.f_hat),
            "classification": self.classification,
        }


@dataclass(frozen=True)
class ChargeTable:
    charges: Tuple[VertexCharge, ...]
    total_f: Fraction
    total_tilde: Fraction
    total_hat: Fraction

    @property
    def by_vertex(self) -> Dict[int, VertexCharge]:
        return {charge.vertex: charge for charge in self.charges}


def _charge_of(pmap: PlanarMap, v: int) -> VertexCharge:
    counts = Counter(pmap.face_size(face_id) for face_id in pmap.faces_at(v))
    d = pmap.degree(v)
    f = sum((count * face_weight(size) for size, count in counts.items()), Fraction(0))
    return VertexCharge(
        vertex=v,
        d=d,
        face_counts=dict(sorted(counts.items())),
        f=f,
        f_tilde=f - 2 * (d - 5),
        f_hat=10 - 2 * d + f,
    )


def vertex_charges(pmap: PlanarMap, require_polygons: bool = True) -> ChargeTable:
    """
    Exact f, f~ and f^ for every vertex. Face incidences are counted per corner;
    with require_polygons (the default) a face walk that revisits a vertex is an error.
    """
    if require_polygons:
        for face_id in range(pmap.num_faces):
            if not pmap.is_polygon_face(face_id):
                raise NonPolygonFace(
                    f"face {face_id} with boundary {list(pmap.face_vertices(face_id))} is not a polygon"
                )
    charges = tuple(_charge_of(pmap, v) for v in pmap.vertices)
    return ChargeTable(
        charges=charges,
        total_f=sum((c.f for c in charges), Fraction(0)),
        total_tilde=sum((c.f_tilde for c in charges), Fraction(0)),
        total_hat=sum((c.f_hat for c in charges), Fraction(0)),
    )


# --- global identities ---

@dataclass(frozen=True)
class IdentityResult:
    name: str
    equation: str
    expected: Fraction
    computed: Fraction

    @property
    def passed(self) -> bool:
        return self.expected == self.computed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "equation": self.equation,
            "expected": fraction_str(self.expected),
            "computed": fraction_str(self.computed),
            "passed": self.passed,
        }


def _identity(name: str, equation: str, expected, computed) -> IdentityResult:
    return IdentityResult(name, equation, Fraction(expected), Fraction(computed))


def require_degree_condition(pmap: PlanarMap, mode) -> None:
    mode = AuditMode.parse(mode)
    degrees = degree_sequence(pmap)
    if mode is AuditMode.EXACT_FIVE_REGULAR and not degrees.is_regular(5):
        raise PreconditionViolated(
            "five-regular", f"degrees present: {sorted(degrees.multiset)}, every vertex must have degree 5"
        )
    if mode is AuditMode.MIN_DEGREE_FIVE and not degrees.min_degree_at_least_five:
        raise PreconditionViolated(
            "minimum-degree-five", f"minimum degree is {degrees.min_degree}, must be at least 5"
        )


def global_identity_check(pmap: PlanarMap, mode) -> List[IdentityResult]:
    mode = AuditMode.parse(mode)
    require_degree_condition(pmap, mode)
    census = face_census(pmap)
    table = vertex_charges(pmap, require_polygons=False)
    face_charge = sum(((10 - 3 * size) * count for size, count in census.counts.items()), 0)

    results = [
        _identity("euler", "|V|-|E|+|F| = 2", 2, pmap.num_vertices - pmap.num_edges + pmap.num_faces),
        _identity("face-count", "|F| = sum |F_i|", pmap.num_faces, census.face_sum),
        _identity("edge-count", "2|E| = sum i|F_i|", 2 * pmap.num_edges, census.length_sum),
    ]
    if mode is AuditMode.EXACT_FIVE_REGULAR:
        results += [
            _identity("regularity", "5|V| = 2|E|", 5 * pmap.num_vertices, 2 * pmap.num_edges),
            _identity("face-charge", "sum (10-3i)|F_i| = 20", TOTAL_CHARGE, face_charge),
            _identity("vertex-charge", "sum f(v) = 20", TOTAL_CHARGE, table.total_f),
        ]
    else:
        excess = sum(2 * (pmap.degree(v) - 5) for v in pmap.vertices if pmap.degree(v) >= 6)
        results += [
            _identity("face-charge", "sum (10-3i)|F_i| = 20 + sum_{i>=6} 2(i-5)v_i",
                      TOTAL_CHARGE + excess, face_charge),
            _identity("vertex-charge", "sum f^(v) = 20", TOTAL_CHARGE, table.total_hat),
        ]
    return results


# --- diamond augmentation ---

class Diamond(NamedTuple):
    face_id: int
    diagonal: Tuple[int, int]


@dataclass(frozen=True)
class AugmentationResult:
    augmented: PlanarMap
    diagonals_added: int
    v6: int
    v7: int
    charge_total_before: Fraction
    charge_total_after: Fraction
    tilde_total_after: Fraction
    five_regular_input: bool

    @property
    def increment_holds(self) -> bool:
        return self.charge_total_after == self.charge_total_before + 4 * self.diagonals_added

    @property
    def degree_accounting_holds(self) -> Optional[bool]:
        if not self.five_regular_input:
            return None
        return 2 * self.diagonals_added == self.v6 + 2 * self.v7

    @property
    def tilde_identity_holds(self) -> Optional[bool]:
        if not self.five_regular_input:
            return None
        return self.tilde_total_after == TOTAL_CHARGE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "diagonals_added": self.diagonals_added,
            "v6": self.v6,
            "v7": self.v7,
            "charge_total_before": fraction_str(self.charge_total_before),
            "charge_total_after": fraction_str(self.charge_total_after),
            "tilde_total_after": fraction_str(self.tilde_total_after),
            "five_regular_input": self.five_regular_input,
        }


def find_diagonal_face(pmap: PlanarMap, u: int, v: int) -> int:
    """Lowest id of a quadrilateral face in which u and v are opposite corners."""
    for face_id in range(pmap.num_faces):
        walk = pmap.face_vertices(face_id)
        if len(walk) != 4 or len(set(walk)) != 4 or u not in walk:
            continue
        if walk[(walk.index(u) + 2) % 4] == v:
            return face_id
    raise DiagonalNotOpposite(f"no quadrilateral face has {u} and {v} as opposite corners")


def augment_diamonds(pmap: PlanarMap, diamonds: Iterable[Sequence]) -> AugmentationResult:
    """
    Split each listed quadrilateral along the given diagonal. Face ids refer to
    pmap; entries are (face_id, (u, v)) pairs or anything indexable the same way.
    """
    entries = [Diamond(int(item[0]), (int(item[1][0]), int(item[1][1]))) for item in diamonds]
    rotation = pmap.rotation_table()
    gained: Counter = Counter()
    used_faces = set()
    used_pairs = set()
    insertions = []

    for face_id, (a, c) in entries:
        if not 0 <= face_id < pmap.num_faces:
            raise NotAQuadrilateral(f"map has no face {face_id}")
        if face_id in used_faces:
            raise AugmentationError(f"face {face_id} is listed twice")
        walk = pmap.face_vertices(face_id)
        if len(walk) != 4 or len(set(walk)) != 4:
            raise NotAQuadrilateral(f"face {face_id} has boundary {list(walk)}, not four distinct corners")
        if a not in walk or walk[(walk.index(a) + 2) % 4] != c:
            raise DiagonalNotOpposite(f"{a} and {c} are not opposite corners of face {face_id} {list(walk)}")
        pair = (min(a, c), max(a, c))
        if pmap.has_edge(a, c) or pair in used_pairs:
            raise DiagonalNotOpposite(f"diagonal {a}-{c} would duplicate an edge")
        position = walk.index(a)
        insertions.append((a, walk[position - 1], c))
        insertions.append((c, walk[(position + 1) % 4], a))
        gained[a] += 1
        gained[c] += 1
        used_faces.add(face_id)
        used_pairs.add(pair)

    crowded = sorted(v for v, count in gained.items() if count > MAX_DIAGONALS_PER_VERTEX)
    if crowded:
        raise VertexGainsTooManyDiagonals(
            f"vertices {crowded} would gain more than {MAX_DIAGONALS_PER_VERTEX} diagonals"
        )

    # each new neighbour goes into the corner of its face: right after the
    # predecessor of the vertex on the face walk
    for vertex, predecessor, new_neighbour in insertions:
        cycle = rotation[vertex]
        cycle.insert(cycle.index(predecessor) + 1, new_neighbour)

    augmented = build_map(rotation) if entries else pmap
    before = vertex_charges(pmap, require_polygons=False)
    after = vertex_charges(augmented, require_polygons=False)
    degrees = degree_sequence(augmented)
    result = AugmentationResult(
        augmented=augmented,
        diagonals_added=len(entries),
        v6=degrees.count(6),
        v7=degrees.count(7),
        charge_total_before=before.total_f,
        charge_total_after=after.total_f,
        tilde_total_after=after.total_tilde,
        five_regular_input=degree_sequence(pmap).is_regular(5),
    )
    if not result.increment_holds:
        raise MapError(f"charge increment check failed after augmentation: {result.to_dict()}")
    if result.degree_accounting_holds is False or result.tilde_identity_holds is False:
        raise MapError(f"degree accounting failed on 5-regular input: {result.to_dict()}")
    return result


# --- pentagons ---

@dataclass(frozen=True)
class PentagonReport:
    face_id: int
    vertices: Tuple[int, ...]
    ratios: Tuple[Fraction, ...]
    positive_count: int
    total: Fraction

    @property
    def flagged(self) -> bool:
        return self.total > 0 or self.positive_count > 3

    @property
    def note(self) -> str:
        return CHAIN_NOTE if self.flagged else ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "face_id": self.face_id,
            "vertices": list(self.vertices),
            "ratios": [fraction_str(r) for r in self.ratios],
            "positive_count": self.positive_count,
            "total": fraction_str(self.total),
            "flagged": self.flagged,
            "note": self.note,
        }


def pentagon_reports(pmap: PlanarMap, allowed_degrees: Optional[Sequence[int]] = (5, 6, 7)) -> List[PentagonReport]:
    """
    For every pentagonal face, the ratios f~(v)/f_5(v) of its corners and their sum.
    allowed_degrees=None lifts the degree range (minimum-degree mode, where f^ = f~).
    """
    if allowed_degrees is not None:
        outside = [v for v in pmap.vertices if pmap.degree(v) not in allowed_degrees]
        if outside:
            raise DegreeOutOfRange(
                f"vertices {outside[:5]} have degrees outside {sorted(allowed_degrees)}"
            )
    charges = vertex_charges(pmap).by_vertex
    reports = []
    for face_id in range(pmap.num_faces):
        if pmap.face_size(face_id) != 5:
            continue
        corners = pmap.face_vertices(face_id)
        ratios = tuple(charges[v].f_tilde / charges[v].f5 for v in corners)
        report = PentagonReport(
            face_id=face_id,
            vertices=corners,
            ratios=ratios,
            positive_count=sum(1 for v in corners if charges[v].four_triangles_plus_pentagon),
            total=sum(ratios, Fraction(0)),
        )
        if report.flagged:
            logger.info(f"pentagon {face_id} flagged: sum {report.total}, {report.positive_count} positive corners")
        reports.append(report)
    return reports


# --- local case analysis ---

@dataclass(frozen=True)
class OracleRow:
    d: int
    f3: int
    f4: int
    f5: int
    f6plus: int
    configurations: int
    max_ratio: Fraction
    min_ratio: Fraction

    @property
    def case(self) -> str:
        if self.f5 >= 2:
            return "f5>=2"
        if self.d >= 6:
            return "f5=1,d>=6"
        return "f5=1,d=5"

    @property
    def bound(self) -> Fraction:
        return {
            "f5>=2": PENTAGON_NEIGHBOUR_BOUND,
            "f5=1,d>=6": HIGH_DEGREE_BOUND,
            "f5=1,d=5": POSITIVE_PENTAGON_RATIO,
        }[self.case]

    @property
    def holds(self) -> bool:
        if self.max_ratio > self.bound:
            return False
        if self.case == "f5=1,d=5":
            # the bound is attained exactly by four triangles plus the pentagon
            return (self.max_ratio == self.bound) == (self.f3 == 4)
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "f3": self.f3,
            "f4": self.f4,
            "f5": self.f5,
            "f6plus": self.f6plus,
            "configurations": self.configurations,
            "max_ratio": fraction_str(self.max_ratio),
            "min_ratio": fraction_str(self.min_ratio),
            "case": self.case,
            "bound": fraction_str(self.bound),
            "holds": self.holds,
        }


@dataclass(frozen=True)
class OracleTable(Report):
    degrees: Tuple[int, ...]
    face_size_cap: int
    rows: Tuple[OracleRow, ...]
    ratios: Tuple[Fraction, ...]
    pentagon_bound: Optional["PentagonBound"] = None

    report_kind = "oracle"

    @property
    def violations(self) -> List[OracleRow]:
        return [row for row in self.rows if not row.holds]

    @property
    def positive_rows(self) -> List[OracleRow]:
        return [row for row in self.rows if row.max_ratio > 0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degrees": list(self.degrees),
            "face_size_cap": self.face_size_cap,
            "rows": [row.to_dict() for row in self.rows],
            "positive_rows": [row.to_dict() for row in self.positive_rows],
            "violations": [row.to_dict() for row in self.violations],
            "bounds_confirmed": not self.violations,
            "pentagon_sums": self.pentagon_bound.to_dict() if self.pentagon_bound else None,
        }

    def summary_lines(self) -> List[str]:
        lines = [f"{'d':>2} {'f3':>3} {'f4':>3} {'f5':>3} {'f6+':>4} {'max f~/f5':>10}  case"]
        for row in self.rows:
            lines.append(
                f"{row.d:>2} {row.f3:>3} {row.f4:>3} {row.f5:>3} {row.f6plus:>4} "
                f"{fraction_str(row.max_ratio):>10}  {row.case}{'' if row.holds else '  VIOLATION'}"
            )
        lines.append(f"rows: {len(self.rows)}, positive rows: {len(self.positive_rows)}, "
                     f"violations: {len(self.violations)}")
        if self.pentagon_bound is not None:
            for x, value in self.pentagon_bound.maxima.items():
                lines.append(f"pentagon with {x} positive corners: max sum {fraction_str(value)}")
        return lines


def local_config_oracle(degree_range: Sequence[int] = (5, 6, 7), face_size_cap: int = 10) -> OracleTable:
    """
    Enumerate every multiset of face sizes around a vertex of degree d with at most
    four triangles and at least one pentagon, and group the ratios f~/f_5 by
    (d, f3, f4, f5, f6plus).
    """
    degrees = tuple(sorted(set(degree_range)))
    if not degrees or not set(degrees) <= {5, 6, 7}:
        raise PreconditionViolated("degree-range", f"degrees {list(degrees)} must be a subset of 5, 6, 7")
    if face_size_cap < 5:
        raise PreconditionViolated("face-size-cap", f"cap {face_size_cap} excludes pentagons")

    groups: Dict[Tuple[int, int, int, int, int], List[Fraction]] = {}
    for d in degrees:
        for sizes in combinations_with_replacement(range(3, face_size_cap + 1), d):
            counts = Counter(sizes)
            if counts[3] > MAX_TRIANGLES_AT_DEGREE_FIVE or counts[5] < 1:
                continue
            f = sum((face_weight(size) for size in sizes), Fraction(0))
            ratio = (f - 2 * (d - 5)) / counts[5]
            key = (d, counts[3], counts[4], counts[5], sum(n for size, n in counts.items() if size >= 6))
            groups.setdefault(key, []).append(ratio)

    rows = tuple(
        OracleRow(*key, configurations=len(values), max_ratio=max(values), min_ratio=min(values))
        for key, values in sorted(groups.items())
    )
    ratios = tuple(sorted({ratio for values in groups.values() for ratio in values}))
    table = OracleTable(degrees=degrees, face_size_cap=face_size_cap, rows=rows, ratios=ratios)
    if table.violations:
        logger.error(f"{len(table.violations)} oracle rows violate their bound")
    return table


@dataclass(frozen=True)
class PentagonBound:
    maxima: Mapping[int, Fraction]

    @property
    def holds(self) -> bool:
        return all(self.maxima[x] <= 0 for x in range(4) if x in self.maxima) and self.maxima.get(3) == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "maxima": {str(x): fraction_str(value) for x, value in self.maxima.items()},
            "holds": self.holds,
        }


def pentagon_sum_bounds(table: OracleTable, floor: Fraction = Fraction(-1)) -> PentagonBound:
    """
    Maximum of sum_{v in P} f~(v)/f_5(v) over all assignments of achievable corner
    ratios to the five corners of a pentagon, by number x of positive corners.
    Ratios below the floor never raise a maximum while -1/2 is available.
    """
    candidates = [ratio for ratio in table.ratios if ratio >= floor]
    maxima: Dict[int, Fraction] = {}
    for combo in combinations_with_replacement(candidates, 5):
        positive = sum(1 for ratio in combo if ratio > 0)
        total = sum(combo, Fraction(0))
        if positive not in maxima or total > maxima[positive]:
            maxima[positive] = total
    return PentagonBound(maxima=dict(sorted(maxima.items())))


# --- audit ---

@dataclass(frozen=True)
class PreconditionResult:
    name: str
    status: Optional[bool]
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        label = {True: "holds", False: "fails", None: "not-checked"}[self.status]
        return {"name": self.name, "status": label, "detail": self.detail}


VERDICT_CERTIFIED = "contradiction-certified"
VERDICT_PRECONDITIONS = "input violated preconditions"
VERDICT_IDENTITY_FAILURE = "identity-failure"


@dataclass(frozen=True)
class AuditReport(Report):
    mode: AuditMode
    census: FaceCensus
    identities: Tuple[IdentityResult, ...]
    charges: ChargeTable
    positive_vertices: Tuple[VertexCharge, ...]
    pentagons: Tuple[PentagonReport, ...]
    augmentation: Optional[AugmentationResult]
    preconditions: Tuple[PreconditionResult, ...]

    report_kind = "audit"

    @property
    def identities_hold(self) -> bool:
        return all(identity.passed for identity in self.identities)

    @property
    def failing_precondition(self) -> Optional[str]:
        for precondition in self.preconditions:
            if precondition.status is False:
                return precondition.name
        return None

    @property
    def verdict(self) -> str:
        if not self.identities_hold:
            return VERDICT_IDENTITY_FAILURE
        term_groups = [p for p in self.preconditions
                       if p.name in ("non-pentagonal-nonpositive", "pentagon-sums-nonpositive")]
        if all(p.status for p in term_groups):
            return VERDICT_CERTIFIED
        return VERDICT_PRECONDITIONS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "verdict": self.verdict,
            "failing_precondition": self.failing_precondition,
            "identities": [identity.to_dict() for identity in self.identities],
            "positive_vertices": [charge.to_dict() for charge in self.positive_vertices],
            "pentagons": [pentagon.to_dict() for pentagon in self.pentagons],
            "preconditions": [precondition.to_dict() for precondition in self.preconditions],
            "census": self.census.to_dict(),
            "augmentation": self.augmentation.to_dict() if self.augmentation else None,
            "totals": {
                "f": fraction_str(self.charges.total_f),
                "f_tilde": fraction_str(self.charges.total_tilde),
                "f_hat": fraction_str(self.charges.total_hat),
            },
            "vertex_charges": [charge.to_dict() for charge in self.charges.charges],
        }

    def summary_lines(self) -> List[str]:
        lines = [f"mode: {self.mode.value}"]
        for identity in self.identities:
            mark = "ok" if identity.passed else "FAILED"
            lines.append(f"  [{mark}] {identity.name}: {identity.equation} "
                         f"(computed {fraction_str(identity.computed)})")
        lines.append(f"positive vertices: {len(self.positive_vertices)}")
        for charge in self.positive_vertices:
            lines.append(f"  v{charge.vertex}: f~ = {fraction_str(charge.f_tilde)} ({charge.classification})")
        for pentagon in self.pentagons:
            lines.append(f"  pentagon {pentagon.face_id}: sum {fraction_str(pentagon.total)}, "
                         f"x = {pentagon.positive_count}{' FLAGGED' if pentagon.flagged else ''}")
        for precondition in self.preconditions:
            lines.append(f"  precondition {precondition.name}: {precondition.to_dict()['status']}"
                         f"{' - ' + precondition.detail if precondition.detail else ''}")
        failing = self.failing_precondition
        lines.append(f"verdict: {self.verdict}" + (f" (first failing: {failing})" if failing else ""))
        return lines


def audit(
    pmap: PlanarMap,
    mode,
    diamonds: Optional[Iterable[Sequence]] = None,
    geometry_checks: Optional[Mapping[str, bool]] = None,
    augment: bool = True,
) -> AuditReport:
    """
    Run the whole charge argument on one input. geometry_checks maps validator
    check names to pass/fail when coordinates were supplied.
    """
    mode = AuditMode.parse(mode)
    require_degree_condition(pmap, mode)
    diamonds = list(diamonds or [])
    if mode is AuditMode.MIN_DEGREE_FIVE and diamonds:
        # f^ counts no diagonals; the caller supplies the augmented map itself
        raise PreconditionViolated(
            "diamond-free", f"{len(diamonds)} diamonds present; augment the map first and audit the result"
        )

    base = vertex_charges(pmap)
    identities = global_identity_check(pmap, mode)
    preconditions: List[PreconditionResult] = []

    if geometry_checks is not None:
        failed = [name for name, passed in geometry_checks.items() if not passed]
        preconditions.append(PreconditionResult(
            "matchstick-geometry", not failed, f"failed checks: {', '.join(failed)}" if failed else ""))

    crowded = [c.vertex for c in base.charges if c.d == 5 and c.f3 > MAX_TRIANGLES_AT_DEGREE_FIVE]
    preconditions.append(PreconditionResult(
        "at-most-four-triangles", not crowded,
        f"{len(crowded)} degree-5 vertices surrounded by more than four triangles" if crowded else ""))

    augmentation = None
    working = pmap
    if diamonds and augment:
        try:
            augmentation = augment_diamonds(pmap, diamonds)
        except VertexGainsTooManyDiagonals as error:
            preconditions.append(PreconditionResult("diamond-budget", False, str(error)))
        else:
            working = augmentation.augmented
            preconditions.append(PreconditionResult(
                "diamond-budget", True, f"{augmentation.diagonals_added} diagonals added"))
            identities.append(_identity(
                "augmentation-increment", "sum f(v) = 20 + 4 x (added diagonals)",
                augmentation.charge_total_before + 4 * augmentation.diagonals_added,
                augmentation.charge_total_after))
            identities.append(_identity(
                "degree-accounting", "2 x (added diagonals) = v6 + 2 v7",
                2 * augmentation.diagonals_added, augmentation.v6 + 2 * augmentation.v7))
    else:
        preconditions.append(PreconditionResult("diamond-budget", True, "no diamonds added"))

    charges = vertex_charges(working)
    if mode is AuditMode.EXACT_FIVE_REGULAR:
        identities.append(_identity("modified-charge", "sum f(v) - 2 v6 - 4 v7 = sum f~(v) = 20",
                                    TOTAL_CHARGE, charges.total_tilde))

    positive = tuple(c for c in charges.charges if c.f_tilde > 0)
    pentagons = tuple(pentagon_reports(
        working, (5, 6, 7) if mode is AuditMode.EXACT_FIVE_REGULAR else None))
    on_pentagons = {v for pentagon in pentagons for v in pentagon.vertices}

    stray = [c.vertex for c in positive if c.vertex not in on_pentagons]
    preconditions.append(PreconditionResult(
        "non-pentagonal-nonpositive", not stray,
        f"{len(stray)} vertices off pentagons carry positive charge" if stray else ""))
    chained = [p.face_id for p in pentagons if p.positive_count > 3]
    preconditions.append(PreconditionResult(
        "pentagon-chain", not chained,
        f"pentagons {chained} have more than three four-triangle corners; {CHAIN_NOTE}" if chained else ""))
    heavy = [p.face_id for p in pentagons if p.total > 0]
    preconditions.append(PreconditionResult(
        "pentagon-sums-nonpositive", not heavy,
        f"pentagons {heavy} have a positive sum" if heavy else ""))

    report = AuditReport(
        mode=mode,
        census=face_census(pmap),
        identities=tuple(identities),
        charges=charges,
        positive_vertices=positive,
        pentagons=pentagons,
        augmentation=augmentation,
        preconditions=tuple(preconditions),
    )
    logger.info(f"audit verdict: {report.verdict} (first failing: {report.failing_precondition})")
    return report
