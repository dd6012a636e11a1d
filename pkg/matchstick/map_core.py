# matchstick/map_core.py
"""
Combinatorial planar maps stored as rotation systems.

A map is given by the counterclockwise cyclic order of neighbours around every
vertex. Faces are traced with the successor rule: the directed edge (u, v) is
followed by (v, w), where w is the neighbour after u in the rotation at v.
Every accepted map is simple, connected and satisfies |V| - |E| + |F| = 2.
"""

import logging
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from matchstick.core import MatchstickError
from matchstick.utils import NotUtf8, read_utf8_file

logger = logging.getLogger(__name__)

DirectedEdge = Tuple[int, int]
Edge = Tuple[int, int]

_LINE_PATTERN = re.compile(r"^\s*(\d+)\s*:\s*(.*?)\s*$")


class MapError(MatchstickError):
    """Base class for errors raised while building or parsing a map."""


class MapSyntaxError(MapError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class AsymmetricAdjacency(MapError):
    pass


class UndeclaredVertex(AsymmetricAdjacency):
    pass


class NotSimple(MapError):
    pass


class Disconnected(MapError):
    pass


class NonPlanarEmbedding(MapError):
    pass


@dataclass(frozen=True)
class FaceCensus:
    """|F_i| per face length i, with the totals the two census identities relate."""
    counts: Mapping[int, int]
    faces: int
    edges: int

    @property
    def face_sum(self) -> int:
        return sum(self.counts.values())

    @property
    def length_sum(self) -> int:
        return sum(size * count for size, count in self.counts.items())

    def identities_hold(self) -> bool:
        return self.face_sum == self.faces and self.length_sum == 2 * self.edges

    def to_dict(self) -> dict:
        return {
            "counts": {str(size): self.counts[size] for size in sorted(self.counts)},
            "faces": self.faces,
            "edges": self.edges,
        }


@dataclass(frozen=True)
class DegreeSummary:
    degrees: Mapping[int, int]
    multiset: Mapping[int, int] = field(default_factory=dict)

    @property
    def min_degree(self) -> int:
        return min(self.degrees.values(), default=0)

    @property
    def max_degree(self) -> int:
        return max(self.degrees.values(), default=0)

    @property
    def regular_degree(self) -> Optional[int]:
        if len(self.multiset) == 1:
            return next(iter(self.multiset))
        return None

    def is_regular(self, k: Optional[int] = None) -> bool:
        degree = self.regular_degree
        if degree is None:
            return False
        return k is None or degree == k

    @property
    def min_degree_at_least_five(self) -> bool:
        return bool(self.degrees) and self.min_degree >= 5

    def count(self, degree: int) -> int:
        return self.multiset.get(degree, 0)


class PlanarMap:
    """
    Immutable rotation system. Build instances with build_map() or parse_map();
    the constructor trusts its input and is used internally once validation passed.
    """
    __slots__ = ("_rotation", "_vertices", "_edges", "_faces", "_position", "_face_of")

    def __init__(self, rotation: Mapping[int, Sequence[int]]):
        self._rotation: Dict[int, Tuple[int, ...]] = {v: tuple(rotation[v]) for v in sorted(rotation)}
        self._vertices: Tuple[int, ...] = tuple(self._rotation)
        self._position: Dict[DirectedEdge, int] = {}
        for v, cycle in self._rotation.items():
            for index, u in enumerate(cycle):
                self._position[(v, u)] = index
        self._edges: Tuple[Edge, ...] = tuple(sorted(
            {(min(v, u), max(v, u)) for v, cycle in self._rotation.items() for u in cycle}
        ))
        self._faces, self._face_of = self._trace_faces()

    # --- face tracing ---

    def next_in_face(self, u: int, v: int) -> DirectedEdge:
        cycle = self._rotation[v]
        w = cycle[(self._position[(v, u)] + 1) % len(cycle)]
        return (v, w)

    def _trace_faces(self):
        if not self._edges:
            # a lone vertex bounds one face with an empty boundary walk
            faces = (((),) if self._vertices else ())
            return faces, {}
        faces: List[Tuple[DirectedEdge, ...]] = []
        face_of: Dict[DirectedEdge, int] = {}
        for u in self._vertices:
            for v in self._rotation[u]:
                if (u, v) in face_of:
                    continue
                walk = []
                dart = (u, v)
                while dart not in face_of:
                    face_of[dart] = len(faces)
                    walk.append(dart)
                    dart = self.next_in_face(*dart)
                faces.append(tuple(walk))
        return tuple(faces), face_of

    # --- accessors ---

    @property
    def rotation(self) -> Mapping[int, Tuple[int, ...]]:
        return MappingProxyType(self._rotation)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def faces(self) -> Tuple[Tuple[DirectedEdge, ...], ...]:
        return self._faces

    @property
    def num_vertices(self) -> int:
        return len(self._vertices)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def num_faces(self) -> int:
        return len(self._faces)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    def degree(self, v: int) -> int:
        return len(self._rotation[v])

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._rotation[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._position

    def face_of(self, u: int, v: int) -> int:
        """Id of the face traced by the directed edge (u, v)."""
        return self._face_of[(u, v)]

    def face_size(self, face_id: int) -> int:
        return len(self._faces[face_id])

    def face_vertices(self, face_id: int) -> Tuple[int, ...]:
        return tuple(u for u, _ in self._faces[face_id])

    def faces_at(self, v: int) -> List[int]:
        """Face ids around v, one entry per corner, in rotation order."""
        return [self._face_of[(u, v)] for u in self._rotation[v]]

    def is_polygon_face(self, face_id: int) -> bool:
        walk = self.face_vertices(face_id)
        return len(walk) >= 3 and len(set(walk)) == len(walk)

    def has_polygon_faces(self) -> bool:
        return all(self.is_polygon_face(face_id) for face_id in range(self.num_faces))

    def mirror(self) -> "PlanarMap":
        return PlanarMap({v: tuple(reversed(cycle)) for v, cycle in self._rotation.items()})

    def relabel(self, mapping: Mapping[int, int]) -> "PlanarMap":
        return PlanarMap({mapping[v]: tuple(mapping[u] for u in cycle) for v, cycle in self._rotation.items()})

    def rotation_table(self) -> Dict[int, List[int]]:
        return {v: list(cycle) for v, cycle in self._rotation.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlanarMap):
            return NotImplemented
        return serialize_map(self) == serialize_map(other)

    def __hash__(self) -> int:
        return hash(serialize_map(self))

    def __repr__(self) -> str:
        return f"PlanarMap(V={self.num_vertices}, E={self.num_edges}, F={self.num_faces})"


# --- construction ---

def build_map(rotation_table: Mapping[int, Sequence[int]]) -> PlanarMap:
    """
    Validate a rotation table and return the traced map.
    Raises UndeclaredVertex/AsymmetricAdjacency, NotSimple, Disconnected or NonPlanarEmbedding.
    """
    table = {}
    for v, cycle in rotation_table.items():
        if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            raise MapError(f"vertex ids must be positive integers, got {v!r}")
        table[v] = tuple(cycle)

    for v, cycle in table.items():
        for u in cycle:
            if u not in table:
                raise UndeclaredVertex(f"vertex {v} lists neighbour {u}, which is not declared")
            if u == v:
                raise NotSimple(f"vertex {v} has a loop")
        if len(set(cycle)) != len(cycle):
            raise NotSimple(f"vertex {v} lists a neighbour more than once")

    for v, cycle in table.items():
        for u in cycle:
            if v not in table[u]:
                raise AsymmetricAdjacency(f"vertex {v} lists {u} but {u} does not list {v}")

    if table:
        _check_connected(table)

    pmap = PlanarMap(table)
    if pmap.num_vertices and pmap.euler_characteristic != 2:
        raise NonPlanarEmbedding(
            f"|V|-|E|+|F| = {pmap.num_vertices}-{pmap.num_edges}+{pmap.num_faces} = "
            f"{pmap.euler_characteristic}, expected 2"
        )
    return pmap


def _check_connected(table: Mapping[int, Sequence[int]]) -> None:
    start = min(table)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in table[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    if len(seen) != len(table):
        missing = sorted(set(table) - seen)
        raise Disconnected(f"vertices {missing[:5]} are not reachable from vertex {start}")


# --- census and degrees ---

def face_census(pmap: PlanarMap) -> FaceCensus:
    counts = Counter(len(walk) for walk in pmap.faces)
    census = FaceCensus(counts=dict(sorted(counts.items())), faces=pmap.num_faces, edges=pmap.num_edges)
    if not census.identities_hold():
        raise MapError(f"face census identities failed for {pmap!r}")
    return census


def degree_sequence(pmap: PlanarMap) -> DegreeSummary:
    degrees = {v: pmap.degree(v) for v in pmap.vertices}
    return DegreeSummary(degrees=degrees, multiset=dict(sorted(Counter(degrees.values()).items())))


# --- canonical forms ---

def _discovery_code(pmap: PlanarMap, root: int, first: int):
    labels = {root: 1}
    order = [root]
    start = {root: first}
    code: List[int] = []
    position = 0
    while position < len(order):
        x = order[position]
        cycle = pmap.neighbors(x)
        offset = cycle.index(start[x])
        for step in range(len(cycle)):
            y = cycle[(offset + step) % len(cycle)]
            if y not in labels:
                labels[y] = len(order) + 1
                order.append(y)
                start[y] = x
            code.append(labels[y])
        code.append(0)
        position += 1
    return tuple(code), labels


def canonical_code(pmap: PlanarMap) -> Tuple[int, ...]:
    """
    Orientation-preserving canonical code: two maps have equal codes iff an
    isomorphism maps one rotation system onto the other.
    """
    if not pmap.edges:
        return (1, 0) if pmap.vertices else ()
    return min(_discovery_code(pmap, u, v)[0] for u in pmap.vertices for v in pmap.neighbors(u))


def canonical_form(pmap: PlanarMap) -> PlanarMap:
    if not pmap.edges:
        return pmap.relabel({v: 1 for v in pmap.vertices})
    best = None
    for u in pmap.vertices:
        for v in pmap.neighbors(u):
            code, labels = _discovery_code(pmap, u, v)
            if best is None or code < best[0]:
                best = (code, labels)
    return pmap.relabel(best[1])


# --- text format ---

def parse_map(text: str) -> PlanarMap:
    table: Dict[int, List[int]] = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        match = _LINE_PATTERN.match(line)
        if not match:
            raise MapSyntaxError(f"expected '<id>: <n1> <n2> ...', got {raw_line.strip()!r}", line_number)
        vertex = int(match.group(1))
        if vertex in table:
            raise MapSyntaxError(f"vertex {vertex} declared twice", line_number)
        tokens = match.group(2).split()
        try:
            table[vertex] = [int(token) for token in tokens]
        except ValueError:
            raise MapSyntaxError(f"neighbour ids must be integers: {match.group(2)!r}", line_number) from None
    return build_map(table)


def serialize_map(pmap: PlanarMap) -> str:
    """Canonical text: vertices by id, each cycle rotated to start at its smallest neighbour."""
    lines = []
    for v in pmap.vertices:
        cycle = pmap.neighbors(v)
        if cycle:
            offset = cycle.index(min(cycle))
            cycle = cycle[offset:] + cycle[:offset]
        lines.append(f"{v}: {' '.join(str(u) for u in cycle)}".rstrip())
    return "".join(line + "\n" for line in lines)


def canonicalize_map_text(text: str) -> str:
    return serialize_map(parse_map(text))


def load_map(path) -> PlanarMap:
    logger.info(f"Loading map from {path}")
    try:
        text = read_utf8_file(Path(path))
    except NotUtf8 as error:
        raise MapSyntaxError(str(error)) from None
    return parse_map(text)


def dump_map(pmap: PlanarMap, path) -> None:
    Path(path).write_text(serialize_map(pmap), encoding="utf-8")


def edges_to_adjacency(edges: Iterable[Edge]) -> Dict[int, List[int]]:
    adjacency: Dict[int, List[int]] = {}
    for u, v in edges:
        adjacency.setdefault(u, []).append(v)
        adjacency.setdefault(v, []).append(u)
    return adjacency
