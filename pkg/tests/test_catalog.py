# matchstick/tests/test_catalog.py

import unittest

from matchstick.catalog import UnknownCatalogEntry, catalog, catalog_entry, catalog_names
from matchstick.map_core import degree_sequence, face_census


class TestCatalog(unittest.TestCase):
    def test_polyhedra_counts(self):
        expected = {
            "tetrahedron": (4, 6, 4),
            "octahedron": (6, 12, 8),
            "cube": (8, 12, 6),
            "icosahedron": (12, 30, 20),
            "snub-square-antiprism": (16, 40, 26),
        }
        for name, counts in expected.items():
            with self.subTest(name=name):
                pmap = catalog_entry(name).map
                self.assertEqual((pmap.num_vertices, pmap.num_edges, pmap.num_faces), counts)

    def test_declared_regularity(self):
        for entry in catalog():
            if entry.k is not None:
                with self.subTest(name=entry.name):
                    self.assertTrue(degree_sequence(entry.map).is_regular(entry.k))

    def test_snub_antiprism_faces(self):
        census = face_census(catalog_entry("snub-square-antiprism").map)
        self.assertEqual(dict(census.counts), {3: 24, 4: 2})

    def test_entries_are_cached(self):
        self.assertIs(catalog_entry("cube"), catalog_entry("cube"))
        self.assertEqual(catalog_names()[0], "triangle")

    def test_unknown_entry(self):
        with self.assertRaises(UnknownCatalogEntry):
            catalog_entry("dodecahedron")

    def test_to_dict(self):
        data = catalog_entry("icosahedron").to_dict()
        self.assertFalse(data["has_coordinates"])
        self.assertEqual(data["regular"], 5)


if __name__ == '__main__':
    unittest.main()
