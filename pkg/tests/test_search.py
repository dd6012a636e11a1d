# matchstick/tests/test_search.py

import unittest
from fractions import Fraction
from unittest import mock

import networkx as nx

from matchstick.catalog import catalog_entry
from matchstick.charge import vertex_charges
from matchstick.geometry import GeometricMap, validate_matchstick
from matchstick.map_core import (
    NonPlanarEmbedding, build_map, canonical_code, degree_sequence, face_census, parse_map, serialize_map,
)
from matchstick.search import (
    EnumerationStats, SearchSpec, SearchSpecError, catalog, enumerate_maps, iter_planar_graphs, rotation_systems,
    run_pipeline,
)


def atlas_graphs(k, max_edges):
    """Connected planar k-regular graphs on at most seven vertices, from the networkx graph atlas."""
    return [
        g for g in nx.graph_atlas_g()
        if g.number_of_nodes() > k and g.number_of_edges() <= max_edges
        and all(d == k for _, d in g.degree()) and nx.is_connected(g) and nx.check_planarity(g)[0]
    ]


def underlying_graph(pmap):
    graph = nx.Graph()
    graph.add_nodes_from(pmap.vertices)
    graph.add_edges_from(pmap.edges)
    return graph


class TestSearchSpec(unittest.TestCase):
    def test_six_regular_is_impossible(self):
        with self.assertRaises(SearchSpecError) as ctx:
            SearchSpec(k=6)
        self.assertIn("3|V| - 6", str(ctx.exception))

    def test_other_rejections(self):
        with self.assertRaises(SearchSpecError):
            SearchSpec(k=None)
        with self.assertRaises(SearchSpecError):
            SearchSpec(k=1)
        with self.assertRaises(SearchSpecError):
            SearchSpec(k=3, max_edges=41)
        with self.assertRaises(SearchSpecError):
            SearchSpec(k=3, time_budget=0)
        with self.assertRaises(SearchSpecError):
            SearchSpec(mode="planar")

    def test_vertex_counts(self):
        self.assertEqual(SearchSpec(k=2, max_edges=5).vertex_counts(), [3, 4, 5])
        self.assertEqual(SearchSpec(k=3, max_edges=9).vertex_counts(), [4, 6])
        self.assertEqual(SearchSpec(k=5, max_edges=14).vertex_counts(), [])
        self.assertEqual(SearchSpec(mode="min-degree", max_edges=14).vertex_counts(), [])

    def test_min_degree_edge_range(self):
        spec = SearchSpec(mode="min-degree", max_edges=30)
        self.assertEqual(spec.degree_bounds, (5, 7))
        self.assertEqual(spec.edge_range(12), (30, 30))


class TestEnumeration(unittest.TestCase):
    def test_cycles(self):
        maps = list(enumerate_maps(SearchSpec(k=2, max_edges=5)))
        self.assertEqual([m.num_vertices for m in maps], [3, 4, 5])
        for pmap in maps:
            self.assertEqual(pmap.vertices, tuple(range(1, pmap.num_vertices + 1)))

    def test_k4_is_the_only_small_cubic_map(self):
        maps = list(enumerate_maps(SearchSpec(k=3, max_edges=6)))
        self.assertEqual(len(maps), 1)
        self.assertEqual(canonical_code(maps[0]), canonical_code(catalog_entry("tetrahedron").map))

    def test_no_small_five_regular_map(self):
        self.assertEqual(list(enumerate_maps(SearchSpec(k=5, max_edges=14))), [])

    def test_maps_are_distinct(self):
        maps = list(enumerate_maps(SearchSpec(k=3, max_edges=9)))
        codes = [canonical_code(m) for m in maps]
        self.assertEqual(len(codes), len(set(codes)))
        for pmap in maps:
            self.assertTrue(degree_sequence(pmap).is_regular(3))

    def test_census_identities_on_enumerated_maps(self):
        for k in (2, 3, 4):
            for pmap in enumerate_maps(SearchSpec(k=k, max_edges=14)):
                with self.subTest(k=k, pmap=serialize_map(pmap)):
                    self.assertEqual(pmap.euler_characteristic, 2)
                    census = face_census(pmap)
                    self.assertTrue(census.identities_hold())
                    face_wise = sum((Fraction(10 - 3 * size) * count for size, count in census.counts.items()),
                                    Fraction(0))
                    self.assertEqual(face_wise, vertex_charges(pmap, require_polygons=False).total_f)

    def test_graphs_match_the_atlas(self):
        for k, max_edges in ((2, 7), (3, 9)):
            with self.subTest(k=k):
                expected = atlas_graphs(k, max_edges)
                found = []
                for pmap in enumerate_maps(SearchSpec(k=k, max_edges=max_edges)):
                    graph = underlying_graph(pmap)
                    if not any(nx.is_isomorphic(graph, other) for other in found):
                        found.append(graph)
                self.assertEqual(len(found), len(expected))
                for graph in expected:
                    self.assertTrue(any(nx.is_isomorphic(graph, other) for other in found))

    def test_planar_graphs_are_pairwise_non_isomorphic(self):
        graphs = list(iter_planar_graphs(6, 2, 3, (6, 9)))
        self.assertTrue(graphs)
        for i, first in enumerate(graphs):
            self.assertTrue(nx.check_planarity(first)[0])
            for second in graphs[i + 1:]:
                self.assertFalse(nx.is_isomorphic(first, second))

    def test_non_planar_graphs_are_dropped(self):
        # the prism survives, K3,3 does not
        graphs = list(iter_planar_graphs(6, 3, 3, (9, 9)))
        self.assertEqual(len(graphs), 1)
        self.assertTrue(nx.is_isomorphic(graphs[0], nx.circular_ladder_graph(3)))

    def test_graphs_with_a_seen_canonical_code_are_pruned(self):
        prism = [m for m in enumerate_maps(SearchSpec(k=3, max_edges=9)) if m.num_vertices == 6]
        seen = {canonical_code(m) for m in prism} | {canonical_code(m.mirror()) for m in prism}
        stats = EnumerationStats()
        self.assertEqual(list(iter_planar_graphs(6, 3, 3, (9, 9), seen_codes=seen, stats=stats)), [])
        self.assertGreaterEqual(stats.pruned, 1)

    def test_stats_follow_the_stream(self):
        stats = EnumerationStats()
        maps = list(enumerate_maps(SearchSpec(k=3, max_edges=9), stats=stats))
        self.assertEqual(stats.maps, len(maps))
        self.assertEqual(stats.graphs, 2)
        self.assertTrue(stats.complete)

    def test_rotation_systems_of_a_two_connected_graph(self):
        # K4 minus an edge: two vertices of degree three, each with two cyclic orders
        graph = nx.complete_graph(4)
        graph.remove_edge(2, 3)
        systems = list(rotation_systems(graph))
        self.assertEqual(len(systems), 4)
        planar = []
        for rotation in systems:
            try:
                planar.append(build_map(rotation))
            except NonPlanarEmbedding:
                continue
        self.assertTrue(planar)

    def test_rotation_limit_fallback_is_counted(self):
        graph = nx.complete_graph(4)
        graph.remove_edge(2, 3)
        stats = EnumerationStats()
        systems = list(rotation_systems(graph, limit=1, stats=stats))
        self.assertEqual(len(systems), 2)
        self.assertEqual(stats.rotation_fallbacks, 1)
        self.assertFalse(stats.complete)

    def test_non_planar_graph_has_no_rotation_systems(self):
        self.assertEqual(list(rotation_systems(nx.complete_graph(5))), [])

    def test_catalog_wrapper(self):
        self.assertIn("icosahedron", [entry.name for entry in catalog()])


class TestPipeline(unittest.TestCase):
    def test_triangle_is_the_smallest_two_regular_matchstick_graph(self):
        report = run_pipeline(SearchSpec(k=2, max_edges=4, restarts=8))
        self.assertEqual(report.smallest_edges, 3)
        self.assertEqual(report.findings[0].vertices, 3)
        self.assertFalse(report.truncated)
        self.assertEqual(report.audits, ())

    def test_no_cubic_matchstick_graph_below_twelve_edges(self):
        report = run_pipeline(SearchSpec(k=3, max_edges=11))
        self.assertEqual(report.candidates_examined, 2)
        self.assertEqual(report.findings, ())
        self.assertIsNone(report.smallest_edges)
        self.assertFalse(report.truncated)
        self.assertIn("no realization found", report.summary_lines())

    def test_smallest_cubic_matchstick_graph_has_eight_vertices(self):
        report = run_pipeline(SearchSpec(k=3, max_edges=12, time_budget=600))
        self.assertFalse(report.truncated)
        self.assertEqual(report.smallest_edges, 12)
        finding = report.findings[0]
        self.assertEqual((finding.vertices, finding.edges), (8, 12))
        pmap = parse_map(finding.map_text)
        self.assertTrue(validate_matchstick(GeometricMap(pmap, finding.coords), k=3).passed)
        # two rhombi joined tip to tip: four triangles and two hexagons
        self.assertEqual(face_census(pmap).counts, {3: 4, 6: 2})

    def test_rotation_limit_fallback_truncates_the_report(self):
        with mock.patch("matchstick.search.ROTATION_LIMIT", 0):
            report = run_pipeline(SearchSpec(k=2, max_edges=3))
        self.assertTrue(report.truncated)
        self.assertEqual(report.rotation_fallbacks, 1)
        self.assertEqual(report.smallest_edges, 3)
        self.assertTrue(report.to_dict()["truncated"])
        self.assertIn("incomplete", report.summary_lines()[0])

    def test_icosahedron_candidate(self):
        spec = SearchSpec(k=5)
        report = run_pipeline(spec, candidates=[catalog_entry("icosahedron").map])
        self.assertEqual(report.findings, ())
        self.assertEqual(len(report.audits), 1)
        self.assertEqual(report.audits[0]["failing_precondition"], "at-most-four-triangles")
        self.assertTrue(report.audits[0]["identities_hold"])

    def test_no_five_regular_candidates_below_fifteen_edges(self):
        report = run_pipeline(SearchSpec(k=5, max_edges=14))
        self.assertEqual(report.candidates_examined, 0)
        self.assertEqual(report.findings, ())

    def test_report_is_reproducible(self):
        spec = SearchSpec(k=2, max_edges=3, seed=4)
        self.assertEqual(run_pipeline(spec).to_dict()["findings"], run_pipeline(spec).to_dict()["findings"])


if __name__ == '__main__':
    unittest.main()
