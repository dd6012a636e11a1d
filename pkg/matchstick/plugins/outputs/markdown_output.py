# matchstick/plugins/outputs/markdown_output.py

import argparse
import json
from typing import Any, Dict, List

from matchstick.core import OutputPlugin, Report


class MarkdownOutputPlugin(OutputPlugin):
    """
    Renders any report as a Markdown document.

    It:
      - Writes the tool metadata and the report summary under headings.
      - Turns scalar report fields into a two-column table.
      - Turns every list of records (identities, checks, oracle rows, findings) into its own table.
      - Optionally leaves out the per-vertex tables (md_brief), which dominate large maps.
    """
    format_name = "markdown"
    supported_extensions = [".md"]
    description = "Markdown report with headings and tables."

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        group = parser.add_argument_group("Markdown output options")
        group.add_argument("--md-brief", action="store_true", help="Omit per-vertex and per-coordinate tables")

    def render(self, report: Report, payload: Dict[str, Any]) -> str:
        lines = [f"# matchstick {report.report_kind} report", ""]

        lines.append("## Tool Metadata")
        for key, value in self._get_tool_metadata().items():
            lines.append(f"- **{key}:** {value}")
        for key, value in payload.get("metadata", {}).items():
            lines.append(f"- **{key}:** {self._cell(value)}")
        lines.append("")

        lines.append("## Summary")
        lines.append("```")
        lines.extend(report.summary_lines())
        lines.append("```")
        lines.append("")

        brief = getattr(self.args, "md_brief", False)
        scalars = {k: v for k, v in payload.items() if k not in ("metadata",) and not isinstance(v, (list, dict))}
        if scalars:
            lines.append("## Fields")
            lines.append("| field | value |")
            lines.append("|---|---|")
            for key, value in scalars.items():
                lines.append(f"| {key} | {self._cell(value)} |")
            lines.append("")

        for key, value in payload.items():
            if key == "metadata" or not isinstance(value, list) or not value:
                continue
            if brief and key in ("vertex_charges", "rows"):
                continue
            if not all(isinstance(item, dict) for item in value):
                continue
            lines.append(f"## {key.replace('_', ' ').capitalize()}")
            lines.extend(self._table(value, skip=("coords",) if brief else ()))
            lines.append("")

        return "\n".join(lines)

    @staticmethod
    def _cell(value: Any) -> str:
        if isinstance(value, (dict, list)):
            text = json.dumps(value, default=str)
        else:
            text = str(value)
        return text.replace("|", "\\|").replace("\n", "<br>")

    def _table(self, records: List[Dict[str, Any]], skip=()) -> List[str]:
        columns: List[str] = []
        for record in records:
            for key in record:
                if key not in columns and key not in skip:
                    columns.append(key)
        rows = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
        for record in records:
            rows.append("| " + " | ".join(self._cell(record.get(column, "")) for column in columns) + " |")
        return rows
