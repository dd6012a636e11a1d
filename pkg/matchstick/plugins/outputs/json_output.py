import json
from typing import Any, Dict

from matchstick.core import OutputPlugin, Report


class JSONOutputPlugin(OutputPlugin):
    """
    Machine-readable report. Key order is fixed by the report classes, so equal
    inputs and seeds give byte-identical files.
    """
    format_name = "json"
    supported_extensions = [".json"]
    description = "Stable-ordered JSON representation of the report."

    @classmethod
    def add_arguments(cls, parser):
        group = parser.add_argument_group("JSON output options")
        group.add_argument("--json-compact", action="store_true", help="Minified JSON output")

    def render(self, report: Report, payload: Dict[str, Any]) -> str:
        data = dict(payload)
        data["tool_metadata"] = self._get_tool_metadata()
        indent = None if getattr(self.args, "json_compact", False) else 2
        return json.dumps(data, indent=indent, default=str)
