# matchstick/tests/test_plugins.py

import hashlib
import json
import os
import shutil
import unittest
from pathlib import Path

from matchstick.catalog import catalog_entry
from matchstick.charge import audit
from matchstick.cli import MatchstickSession, discover_plugins
from matchstick.core import BaseArguments
from matchstick.map_core import canonical_form, parse_map, serialize_map


class TestPlugins(unittest.TestCase):
    def setUp(self):
        args = BaseArguments()
        args.command = "audit"
        args.output_file = "test_output/report.json"
        args.formats = "json,markdown"
        self.session = MatchstickSession(args, set())
        self.session.plugins = discover_plugins(set())
        self.session.load_map("catalog:icosahedron")
        self.report = audit(self.session.pmap, "exact5")

        # Ensure test_output directory is clean
        os.makedirs("test_output", exist_ok=True)
        for f in Path("test_output").glob("*"):
            if f.is_file():
                f.unlink()

    def tearDown(self):
        shutil.rmtree("test_output", ignore_errors=True)

    def test_plugin_discovery(self):
        discovered = discover_plugins(set())
        self.assertEqual(set(discovered), {"text", "json", "markdown"})
        self.assertNotIn("json", discover_plugins({"json"}))

    def test_metadata_plugin_discovery(self):
        self.assertIn("map_digest", self.session.metadata_plugins)
        self.assertIn("canonical_map", self.session.metadata_plugins)
        self.assertIn("report_kind", self.session.metadata_config)
        disabled = MatchstickSession(BaseArguments(), {"map_digest"})
        self.assertNotIn("map_digest", disabled.metadata_plugins)

    def test_json_output_plugin(self):
        from matchstick.plugins.outputs.json_output import JSONOutputPlugin
        plugin = JSONOutputPlugin(self.session)
        output_path = Path("test_output") / "audit.json"
        plugin.generate_output(self.report, self.session.build_payload(self.report), output_path)
        self.assertTrue(output_path.exists())

        with open(output_path, "r", encoding="utf-8") as f:
            data = json.load(f)
            self.assertEqual(data["metadata"]["report_kind"], "audit")
            self.assertEqual(data["metadata"]["input"], {"map": "catalog:icosahedron"})
            self.assertEqual(data["tool_metadata"]["Tool"], "matchstick")
            self.assertEqual(data["verdict"], "input violated preconditions")
            self.assertEqual(len(data["vertex_charges"]), 12)

    def test_json_compact(self):
        from matchstick.plugins.outputs.json_output import JSONOutputPlugin
        self.session.args.json_compact = True
        text = JSONOutputPlugin(self.session).render(self.report, self.session.build_payload(self.report))
        self.assertNotIn("\n", text)

    def test_markdown_output_plugin(self):
        from matchstick.plugins.outputs.markdown_output import MarkdownOutputPlugin
        plugin = MarkdownOutputPlugin(self.session)
        output_path = Path("test_output") / "audit.md"
        plugin.generate_output(self.report, self.session.build_payload(self.report), output_path)

        content = output_path.read_text(encoding="utf-8")
        self.assertIn("# matchstick audit report", content)
        self.assertIn("## Identities", content)
        self.assertIn("## Vertex charges", content)

    def test_markdown_brief_drops_vertex_tables(self):
        from matchstick.plugins.outputs.markdown_output import MarkdownOutputPlugin
        self.session.args.md_brief = True
        content = MarkdownOutputPlugin(self.session).render(self.report, self.session.build_payload(self.report))
        self.assertNotIn("## Vertex charges", content)
        self.assertIn("## Identities", content)

    def test_text_output_plugin(self):
        from matchstick.plugins.outputs.text_output import TextOutputPlugin
        content = TextOutputPlugin(self.session).render(self.report, self.session.build_payload(self.report))
        self.assertIn("verdict: input violated preconditions", content)
        self.assertNotIn("report_kind", content)

    def test_map_digest_metadata(self):
        self.session.args.metadata_add = ["map_digest", "canonical_map"]
        metadata = self.session.build_payload(self.report)["metadata"]
        canonical = serialize_map(canonical_form(self.session.pmap))
        self.assertEqual(metadata["map_digest"], hashlib.sha256(canonical.encode("utf-8")).hexdigest())
        self.assertEqual(metadata["canonical_map"], canonical)

    def test_map_digest_separates_mirror_images(self):
        description = self.session.metadata_plugins["map_digest"].description
        self.assertIn("orientation-preserving isomorphic", description)
        # a triangle with tails of lengths 1 and 2 has no orientation-reversing symmetry
        chiral = parse_map("1: 2 3 4\n2: 3 1 5\n3: 1 2\n4: 1\n5: 2 6\n6: 5\n")
        digests = {
            hashlib.sha256(serialize_map(canonical_form(pmap)).encode("utf-8")).hexdigest()
            for pmap in (chiral, chiral.mirror())
        }
        self.assertEqual(len(digests), 2)

    def test_metadata_remove(self):
        self.session.args.metadata_remove = ["input"]
        metadata = self.session.build_payload(self.report)["metadata"]
        self.assertNotIn("input", metadata)
        self.assertNotIn("map_digest", metadata)

    def test_formats_inferred_from_output_file(self):
        self.session.args.formats = "default"
        self.session.args.output_file = "test_output/report.md"
        self.assertEqual(self.session.requested_formats(), ["markdown"])
        self.session.args.output_file = None
        self.assertEqual(self.session.requested_formats(), ["text"])

    def test_multiple_formats_use_their_own_extensions(self):
        self.session.emit(self.report)
        self.assertTrue(Path("test_output/report.json").exists())
        self.assertTrue(Path("test_output/report.md").exists())


if __name__ == "__main__":
    unittest.main()
