# matchstick/catalog.py
"""
Built-in instances addressable by name (``catalog:<name>`` on the command line).

Planar entries are built from unit-edge coordinates and take their rotation
system from the drawing. Polyhedral entries are combinatorial only: their
rotations come from sorting neighbours around the outward normal of a convex
3D model.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from matchstick.core import MatchstickError
from matchstick.geometry import Point, rotation_from_coords
from matchstick.map_core import PlanarMap, build_map, edges_to_adjacency

logger = logging.getLogger(__name__)

SQRT3_2 = math.sqrt(3) / 2


class UnknownCatalogEntry(MatchstickError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    map: PlanarMap
    coords: Optional[Dict[int, Point]]
    note: str
    k: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "vertices": self.map.num_vertices,
            "edges": self.map.num_edges,
            "faces": self.map.num_faces,
            "regular": self.k,
            "has_coordinates": self.coords is not None,
            "note": self.note,
        }


def _from_drawing(coords: Dict[int, Point], edges: Sequence[Tuple[int, int]]) -> PlanarMap:
    return build_map(rotation_from_coords(edges_to_adjacency(edges), coords))


def _from_polyhedron(points: Sequence[Sequence[float]]) -> PlanarMap:
    """Vertices 1..n of a convex polyhedron centred at the origin; edges join nearest pairs."""
    points = np.asarray(points, dtype=float)
    pairs = list(combinations(range(len(points)), 2))
    distances = {pair: float(np.linalg.norm(points[pair[0]] - points[pair[1]])) for pair in pairs}
    shortest = min(distances.values())
    edges = [(a + 1, b + 1) for (a, b), d in distances.items() if abs(d - shortest) < 1e-9]
    adjacency = edges_to_adjacency(edges)

    rotation = {}
    for v, neighbours in adjacency.items():
        normal = points[v - 1] / np.linalg.norm(points[v - 1])
        helper = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(normal, helper)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(normal, e1)

        def angle(u, origin=points[v - 1], e1=e1, e2=e2):
            offset = points[u - 1] - origin
            return math.atan2(float(offset @ e2), float(offset @ e1))

        rotation[v] = sorted(neighbours, key=angle)
    return build_map(rotation)


def _triangle() -> CatalogEntry:
    coords = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (0.5, SQRT3_2)}
    return CatalogEntry("triangle", _from_drawing(coords, [(1, 2), (2, 3), (1, 3)]), coords,
                        "smallest 2-regular matchstick graph", k=2)


def _square() -> CatalogEntry:
    coords = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (1.0, 1.0), 4: (0.0, 1.0)}
    return CatalogEntry("square", _from_drawing(coords, [(1, 2), (2, 3), (3, 4), (1, 4)]), coords,
                        "unit square; its diagonals have length sqrt(2), so it is no diamond", k=2)


def _rhombus() -> CatalogEntry:
    coords = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (1.5, SQRT3_2), 4: (0.5, SQRT3_2)}
    return CatalogEntry("rhombus", _from_drawing(coords, [(1, 2), (2, 3), (3, 4), (1, 4)]), coords,
                        "60-degree rhombus; the short diagonal 2-4 has unit length", k=2)


def _hex_patch() -> CatalogEntry:
    coords = {1: (0.0, 0.0)}
    for step in range(6):
        angle = math.pi * step / 3
        coords[step + 2] = (math.cos(angle), math.sin(angle))
    edges = [(1, v) for v in range(2, 8)] + [(v, v % 6 + 2) for v in range(2, 8)]
    return CatalogEntry("hex-patch", _from_drawing(coords, edges), coords,
                        "triangular-lattice hexagon of side 1: six unit triangles around a degree-6 centre")


def _rhombus_strip() -> CatalogEntry:
    coords = {
        1: (0.0, 0.0), 2: (1.0, 0.0), 3: (2.0, 0.0),
        4: (0.5, SQRT3_2), 5: (1.5, SQRT3_2), 6: (2.5, SQRT3_2),
    }
    edges = [(1, 2), (2, 3), (4, 5), (5, 6), (1, 4), (2, 5), (3, 6)]
    return CatalogEntry("rhombus-strip", _from_drawing(coords, edges), coords,
                        "two 60-degree rhombi sharing an edge; both faces are diamonds")


def _fan(tail: List[Point]) -> Tuple[Dict[int, Point], List[Tuple[int, int]]]:
    """Degree-5 centre 1 with neighbours 2..6 at 0, 60, ..., 240 degrees, closed by a tail from 6 back to 2."""
    coords = {1: (0.0, 0.0)}
    for step in range(5):
        angle = math.pi * step / 3
        coords[step + 2] = (math.cos(angle), math.sin(angle))
    edges = [(1, v) for v in range(2, 7)] + [(v, v + 1) for v in range(2, 6)]
    chain = [2]
    for offset, point in enumerate(tail):
        coords[7 + offset] = point
        chain.append(7 + offset)
    chain.append(6)
    edges += list(zip(chain, chain[1:]))
    return coords, edges


def _fan_tetragon() -> CatalogEntry:
    # 2 + 6 closes a 120-degree rhombus with the centre
    x = math.cos(4 * math.pi / 3)
    y = math.sin(4 * math.pi / 3)
    coords, edges = _fan([(1.0 + x, y)])
    return CatalogEntry("fan-tetragon", _from_drawing(coords, edges), coords,
                        "degree-5 vertex with four triangles and a tetragon, f = 5/6")


def _fan_pentagon() -> CatalogEntry:
    # equilateral pentagon with a 120-degree corner at the centre, symmetric about 300 degrees
    reach = 0.5 + math.sqrt(1.0 - (0.5 - SQRT3_2) ** 2)
    turn = -math.pi / 3

    def rotate(x, y):
        return (x * math.cos(turn) - y * math.sin(turn), x * math.sin(turn) + y * math.cos(turn))

    coords, edges = _fan([rotate(reach, 0.5), rotate(reach, -0.5)])
    return CatalogEntry("fan-pentagon", _from_drawing(coords, edges), coords,
                        "degree-5 vertex with four triangles and a pentagon, f = 1/3")


def _tetrahedron() -> CatalogEntry:
    points = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    return CatalogEntry("tetrahedron", _from_polyhedron(points), None, "K4, the unique 3-regular map on 6 edges", k=3)


def _octahedron() -> CatalogEntry:
    points = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    return CatalogEntry("octahedron", _from_polyhedron(points), None, "4-regular, eight triangular faces", k=4)


def _cube() -> CatalogEntry:
    points = list(product((-1, 1), repeat=3))
    return CatalogEntry("cube", _from_polyhedron(points), None, "3-regular, six quadrilateral faces", k=3)


def _icosahedron() -> CatalogEntry:
    phi = (1 + math.sqrt(5)) / 2
    points = []
    for a, b in product((-1, 1), repeat=2):
        points += [(0, a, b * phi), (a, b * phi, 0), (b * phi, 0, a)]
    return CatalogEntry("icosahedron", _from_polyhedron(points), None,
                        "5-regular with twenty triangles; it has no drawing with equal straight edges", k=5)


def _snub_square_antiprism() -> CatalogEntry:
    # rings: A_i (1..4) at radius 3, B_j (5..12) at radius 2, C_i (13..16) at radius 1
    coords: Dict[int, Point] = {}
    for i in range(4):
        coords[1 + i] = (3 * math.cos(math.pi * i / 2), 3 * math.sin(math.pi * i / 2))
        coords[13 + i] = (math.cos(math.pi / 4 + math.pi * i / 2), math.sin(math.pi / 4 + math.pi * i / 2))
    for j in range(8):
        coords[5 + j] = (2 * math.cos(math.pi * j / 4), 2 * math.sin(math.pi * j / 4))

    def a(i):
        return 1 + i % 4

    def b(j):
        return 5 + j % 8

    def c(i):
        return 13 + i % 4

    edges = set()
    for i in range(4):
        edges |= {(a(i), a(i + 1)), (c(i), c(i + 1))}
        edges |= {(a(i), b(2 * i + delta)) for delta in (-1, 0, 1)}
        edges |= {(c(i), b(2 * i + delta)) for delta in (0, 1, 2)}
    for j in range(8):
        edges.add((b(j), b(j + 1)))
    return CatalogEntry("snub-square-antiprism", _from_drawing(coords, sorted(edges)), None,
                        "5-regular with 24 triangles and two quadrilateral faces (1 2 3 4 and 13 14 15 16)", k=5)


_BUILDERS = {
    "triangle": _triangle,
    "icosahedron": _icosahedron,
    "hex-patch": _hex_patch,
    "rhombus-strip": _rhombus_strip,
    "square": _square,
    "rhombus": _rhombus,
    "fan-tetragon": _fan_tetragon,
    "fan-pentagon": _fan_pentagon,
    "tetrahedron": _tetrahedron,
    "octahedron": _octahedron,
    "cube": _cube,
    "snub-square-antiprism": _snub_square_antiprism,
}


@lru_cache(maxsize=None)
def _build(name: str) -> CatalogEntry:
    return _BUILDERS[name]()


def catalog_names() -> List[str]:
    return list(_BUILDERS)


def catalog() -> List[CatalogEntry]:
    return [_build(name) for name in _BUILDERS]


def catalog_entry(name: str) -> CatalogEntry:
    if name not in _BUILDERS:
        raise UnknownCatalogEntry(f"no catalog entry named {name!r}; known: {', '.join(_BUILDERS)}")
    return _build(name)
