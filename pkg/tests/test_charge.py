# matchstick/tests/test_charge.py

import math
import unittest
from fractions import Fraction
from unittest import mock

from matchstick.catalog import catalog_entry
from matchstick.charge import (
    AuditMode, AugmentationError, AugmentationResult, DegreeOutOfRange, DiagonalNotOpposite, NonPolygonFace, NotAQuadrilateral, PreconditionViolated,
    VertexGainsTooManyDiagonals, VERDICT_PRECONDITIONS, audit, augment_diamonds, face_weight,
    find_diagonal_face, global_identity_check, local_config_oracle, pentagon_reports, pentagon_sum_bounds,
    require_degree_condition, vertex_charges,
)
from matchstick.geometry import rotation_from_coords
from matchstick.map_core import MapError, build_map, parse_map


def snub_diamonds(pmap):
    return [(find_diagonal_face(pmap, 1, 3), (1, 3)), (find_diagonal_face(pmap, 13, 15), (13, 15))]


def map_from_drawing(coords, edges):
    adjacency = {v: [] for v in coords}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    return build_map(rotation_from_coords(adjacency, coords))


def snub_pentagonal_antiprism():
    """5-regular: rings a (1..5), b (6..15), c (16..20); both pentagons have four triangles at every corner."""
    coords = {}
    for i in range(5):
        coords[1 + i] = (3 * math.cos(2 * math.pi * i / 5), 3 * math.sin(2 * math.pi * i / 5))
        angle = math.pi / 5 + 2 * math.pi * i / 5
        coords[16 + i] = (math.cos(angle), math.sin(angle))
    for j in range(10):
        coords[6 + j] = (2 * math.cos(math.pi * j / 5), 2 * math.sin(math.pi * j / 5))
    edges = set()
    for i in range(5):
        a, a_next, c, c_next = 1 + i, 1 + (i + 1) % 5, 16 + i, 16 + (i + 1) % 5
        edges |= {(a, a_next), (c, c_next)}
        edges |= {(a, 6 + (2 * i + delta) % 10) for delta in (-1, 0, 1)}
        edges |= {(c, 6 + (2 * i + delta) % 10) for delta in (0, 1, 2)}
    for j in range(10):
        edges.add((6 + j, 6 + (j + 1) % 10))
    return map_from_drawing(coords, sorted(edges))


def centre_on_two_pentagons():
    """Degree-5 centre 1 with three triangles and two pentagons, closed off by a nine-sided outer face."""
    coords = {1: (0.0, 0.0)}
    for k in range(5):
        angle = math.radians(90 + 72 * k)
        coords[2 + k] = (math.cos(angle), math.sin(angle))
    for v, degrees in zip((7, 8, 9, 10), (330, 354, 42, 66)):
        coords[v] = (2 * math.cos(math.radians(degrees)), 2 * math.sin(math.radians(degrees)))
    edges = [(1, v) for v in range(2, 7)] + [(2, 3), (3, 4), (4, 5)]
    edges += [(5, 7), (7, 8), (8, 6), (6, 9), (9, 10), (10, 2)]
    return map_from_drawing(coords, edges)


class TestVertexCharges(unittest.TestCase):
    def test_face_weights(self):
        self.assertEqual(face_weight(3), Fraction(1, 3))
        self.assertEqual(face_weight(4), Fraction(-1, 2))
        self.assertEqual(face_weight(5), Fraction(-1))
        self.assertEqual(face_weight(6), Fraction(-4, 3))

    def test_icosahedron_charges(self):
        table = vertex_charges(catalog_entry("icosahedron").map)
        self.assertEqual(len(table.charges), 12)
        self.assertEqual(table.total_f, 20)
        self.assertEqual(table.total_tilde, 20)
        for charge in table.charges:
            self.assertEqual(charge.f, Fraction(5, 3))
            self.assertEqual(charge.classification, "five triangles")

    def test_fan_tetragon_centre(self):
        centre = vertex_charges(catalog_entry("fan-tetragon").map).by_vertex[1]
        self.assertEqual(centre.d, 5)
        self.assertEqual(centre.f, Fraction(5, 6))
        self.assertEqual(centre.classification, "four triangles plus a tetragon")

    def test_fan_pentagon_centre(self):
        centre = vertex_charges(catalog_entry("fan-pentagon").map).by_vertex[1]
        self.assertEqual(centre.f, Fraction(1, 3))
        self.assertEqual(centre.f_tilde, Fraction(1, 3))
        self.assertTrue(centre.four_triangles_plus_pentagon)

    def test_shifted_charges(self):
        centre = vertex_charges(catalog_entry("hex-patch").map).by_vertex[1]
        self.assertEqual(centre.f, 2)
        self.assertEqual(centre.f_tilde, 0)
        self.assertEqual(centre.f_hat, 0)

    def test_non_polygon_face_is_rejected(self):
        path = build_map({1: [2], 2: [1, 3], 3: [2]})
        with self.assertRaises(NonPolygonFace):
            vertex_charges(path)


class TestIdentities(unittest.TestCase):
    def test_icosahedron_exact_mode(self):
        results = global_identity_check(catalog_entry("icosahedron").map, "exact5")
        self.assertEqual([r.name for r in results],
                         ["euler", "face-count", "edge-count", "regularity", "face-charge", "vertex-charge"])
        self.assertTrue(all(r.passed for r in results))

    def test_min_degree_mode_on_five_regular_map(self):
        results = global_identity_check(catalog_entry("snub-square-antiprism").map, AuditMode.MIN_DEGREE_FIVE)
        self.assertTrue(all(r.passed for r in results))

    def test_min_degree_mode_on_icosahedron(self):
        pmap = catalog_entry("icosahedron").map
        self.assertEqual(vertex_charges(pmap).total_hat, 20)
        self.assertTrue(all(r.passed for r in global_identity_check(pmap, "mindeg5")))

    def test_degree_conditions(self):
        with self.assertRaises(PreconditionViolated) as ctx:
            require_degree_condition(catalog_entry("octahedron").map, "exact5")
        self.assertEqual(ctx.exception.condition, "five-regular")
        with self.assertRaises(PreconditionViolated) as ctx:
            require_degree_condition(catalog_entry("cube").map, "mindeg5")
        self.assertEqual(ctx.exception.condition, "minimum-degree-five")

    def test_mode_aliases(self):
        self.assertIs(AuditMode.parse("exact5"), AuditMode.EXACT_FIVE_REGULAR)
        self.assertIs(AuditMode.parse("min-degree-5"), AuditMode.MIN_DEGREE_FIVE)
        with self.assertRaises(ValueError):
            AuditMode.parse("regular")


class TestAugmentation(unittest.TestCase):
    def setUp(self):
        self.pmap = catalog_entry("snub-square-antiprism").map

    def test_snub_antiprism_diagonals(self):
        result = augment_diamonds(self.pmap, snub_diamonds(self.pmap))
        self.assertEqual(result.diagonals_added, 2)
        self.assertEqual(result.v6, 4)
        self.assertEqual(result.v7, 0)
        self.assertEqual(result.charge_total_before, 20)
        self.assertEqual(result.charge_total_after, 28)
        self.assertEqual(result.tilde_total_after, 20)
        self.assertTrue(result.increment_holds)
        self.assertTrue(result.degree_accounting_holds)
        self.assertTrue(result.tilde_identity_holds)
        self.assertEqual(result.augmented.num_edges, self.pmap.num_edges + 2)
        self.assertTrue(result.augmented.has_edge(1, 3))

    def test_diagonal_must_join_opposite_corners(self):
        face_id = find_diagonal_face(self.pmap, 1, 3)
        with self.assertRaises(DiagonalNotOpposite):
            augment_diamonds(self.pmap, [(face_id, (1, 2))])
        with self.assertRaises(DiagonalNotOpposite):
            find_diagonal_face(self.pmap, 1, 5)

    def test_triangle_is_not_a_quadrilateral(self):
        face_id = self.pmap.face_of(13, 14)
        if self.pmap.face_size(face_id) == 4:
            face_id = self.pmap.face_of(14, 13)
        with self.assertRaises(NotAQuadrilateral):
            augment_diamonds(self.pmap, [(face_id, (13, 14))])

    def test_face_listed_twice(self):
        face_id = find_diagonal_face(self.pmap, 1, 3)
        with self.assertRaises(AugmentationError):
            augment_diamonds(self.pmap, [(face_id, (1, 3)), (face_id, (2, 4))])

    def test_vertex_gaining_three_diagonals(self):
        # a cube has three quadrilaterals around every vertex
        cube = catalog_entry("cube").map
        v = cube.vertices[0]
        diamonds = []
        for face_id in sorted(set(cube.faces_at(v))):
            walk = cube.face_vertices(face_id)
            diamonds.append((face_id, (v, walk[(walk.index(v) + 2) % 4])))
        with self.assertRaises(VertexGainsTooManyDiagonals):
            augment_diamonds(cube, diamonds)

    def test_each_diagonal_adds_four_on_a_map_that_is_not_five_regular(self):
        for name in ("cube", "rhombus-strip", "fan-tetragon"):
            pmap = catalog_entry(name).map
            before = vertex_charges(pmap, require_polygons=False).by_vertex
            for face_id in range(pmap.num_faces):
                walk = pmap.face_vertices(face_id)
                if len(walk) != 4 or len(set(walk)) != 4:
                    continue
                for start in (0, 1):
                    a, b, c, d = walk[start:] + walk[:start]
                    if pmap.has_edge(a, c):
                        continue
                    with self.subTest(name=name, face=face_id, diagonal=(a, c)):
                        result = augment_diamonds(pmap, [(face_id, (a, c))])
                        self.assertEqual(result.charge_total_after - result.charge_total_before, 4)
                        self.assertTrue(result.increment_holds)
                        self.assertIsNone(result.degree_accounting_holds)
                        after = vertex_charges(result.augmented, require_polygons=False).by_vertex
                        gain = {v: after[v].f - before[v].f for v in pmap.vertices}
                        # the split corners trade a tetragon for two triangles, the others for one
                        self.assertEqual((gain[a], gain[c]), (Fraction(7, 6), Fraction(7, 6)))
                        self.assertEqual((gain[b], gain[d]), (Fraction(5, 6), Fraction(5, 6)))
                        self.assertEqual(sum(gain.values()), 4)

    def test_failed_increment_raises(self):
        with mock.patch.object(AugmentationResult, "increment_holds", new_callable=mock.PropertyMock,
                               return_value=False):
            with self.assertRaises(MapError):
                augment_diamonds(self.pmap, snub_diamonds(self.pmap))

    def test_failed_degree_accounting_raises(self):
        with mock.patch.object(AugmentationResult, "degree_accounting_holds", new_callable=mock.PropertyMock,
                               return_value=False):
            with self.assertRaises(MapError):
                augment_diamonds(self.pmap, snub_diamonds(self.pmap))

    def test_empty_list_returns_input(self):
        result = augment_diamonds(self.pmap, [])
        self.assertIs(result.augmented, self.pmap)
        self.assertEqual(result.diagonals_added, 0)


class TestPentagons(unittest.TestCase):
    def test_fan_pentagon_report(self):
        pmap = catalog_entry("fan-pentagon").map
        reports = pentagon_reports(pmap, allowed_degrees=None)
        inner = [r for r in reports if 1 in r.vertices]
        self.assertEqual(len(inner), 1)
        report = inner[0]
        ratio = dict(zip(report.vertices, report.ratios))
        self.assertEqual(ratio[1], Fraction(1, 3))
        self.assertEqual(report.positive_count, 1)

    def test_pentagon_with_five_positive_corners_is_flagged(self):
        reports = pentagon_reports(snub_pentagonal_antiprism())
        self.assertEqual(len(reports), 2)
        for report in reports:
            self.assertEqual(report.ratios, (Fraction(1, 3),) * 5)
            self.assertEqual(report.positive_count, 5)
            self.assertEqual(report.total, Fraction(5, 3))
            self.assertTrue(report.flagged)
            self.assertTrue(report.to_dict()["note"])

    def test_degrees_outside_the_range_are_refused(self):
        with self.assertRaises(DegreeOutOfRange):
            pentagon_reports(catalog_entry("octahedron").map)
        with self.assertRaises(DegreeOutOfRange):
            pentagon_reports(catalog_entry("icosahedron").map, allowed_degrees=(6, 7))

    def test_degree_five_vertex_on_two_pentagons(self):
        pmap = centre_on_two_pentagons()
        reports = [r for r in pentagon_reports(pmap, allowed_degrees=None) if 1 in r.vertices]
        self.assertEqual(len(reports), 2)
        for report in reports:
            ratio = dict(zip(report.vertices, report.ratios))[1]
            self.assertEqual(ratio, Fraction(-1, 2))
            self.assertLessEqual(ratio, Fraction(-1, 2))
            self.assertEqual(report.positive_count, 0)


class TestOracle(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.table = local_config_oracle()

    def test_unique_positive_row(self):
        positive = self.table.positive_rows
        self.assertEqual(len(positive), 1)
        row = positive[0]
        self.assertEqual((row.d, row.f3, row.f4, row.f5, row.f6plus), (5, 4, 0, 1, 0))
        self.assertEqual(row.max_ratio, Fraction(1, 3))

    def test_no_violations(self):
        self.assertEqual(self.table.violations, [])
        self.assertTrue(self.table.to_dict()["bounds_confirmed"])

    def test_case_bounds(self):
        for row in self.table.rows:
            if row.f5 >= 2:
                self.assertLessEqual(row.max_ratio, Fraction(-1, 2))
            elif row.d >= 6:
                self.assertLessEqual(row.max_ratio, Fraction(-4, 3))

    def test_pentagon_sums(self):
        bound = pentagon_sum_bounds(self.table)
        self.assertEqual(bound.maxima[3], 0)
        self.assertTrue(bound.holds)
        self.assertGreater(bound.maxima[4], 0)

    def test_bad_arguments(self):
        with self.assertRaises(PreconditionViolated):
            local_config_oracle((4, 5))
        with self.assertRaises(PreconditionViolated):
            local_config_oracle((5,), face_size_cap=4)


class TestAudit(unittest.TestCase):
    def test_icosahedron_verdict(self):
        report = audit(catalog_entry("icosahedron").map, "exact5")
        self.assertTrue(report.identities_hold)
        self.assertEqual(len(report.positive_vertices), 12)
        self.assertEqual(report.failing_precondition, "at-most-four-triangles")
        self.assertEqual(report.verdict, VERDICT_PRECONDITIONS)
        data = report.to_dict()
        self.assertEqual(data["mode"], "exact-5-regular")
        self.assertEqual(data["totals"]["f"], "20/1")

    def test_snub_antiprism_audit_with_diamonds(self):
        pmap = catalog_entry("snub-square-antiprism").map
        report = audit(pmap, "exact5", diamonds=snub_diamonds(pmap))
        names = {identity.name: identity.passed for identity in report.identities}
        self.assertTrue(names["augmentation-increment"])
        self.assertTrue(names["degree-accounting"])
        self.assertTrue(names["modified-charge"])
        self.assertEqual(report.augmentation.v6, 4)

    def test_geometry_failures_are_reported_first(self):
        report = audit(catalog_entry("icosahedron").map, "exact5",
                       geometry_checks={"unit-lengths": False, "crossings": True})
        self.assertEqual(report.failing_precondition, "matchstick-geometry")

    def test_min_degree_mode_refuses_unaugmented_diamonds(self):
        pmap = catalog_entry("snub-square-antiprism").map
        with self.assertRaises(PreconditionViolated):
            audit(pmap, "mindeg5", diamonds=snub_diamonds(pmap), augment=False)

    def test_min_degree_mode_refuses_diamonds_even_when_augmenting(self):
        pmap = catalog_entry("snub-square-antiprism").map
        with self.assertRaises(PreconditionViolated) as ctx:
            audit(pmap, "mindeg5", diamonds=snub_diamonds(pmap))
        self.assertEqual(ctx.exception.condition, "diamond-free")

    def test_min_degree_mode_on_the_augmented_map(self):
        pmap = catalog_entry("snub-square-antiprism").map
        augmented = augment_diamonds(pmap, snub_diamonds(pmap)).augmented
        report = audit(augmented, "mindeg5")
        self.assertTrue(report.identities_hold)

    def test_exact_mode_rejects_other_degrees(self):
        with self.assertRaises(PreconditionViolated):
            audit(parse_map("1: 2 3\n2: 3 1\n3: 1 2\n"), "exact5")


if __name__ == '__main__':
    unittest.main()
