import logging
from typing import Any, Dict

from matchstick.core import OutputPlugin, Report

logger = logging.getLogger(__name__)


class TextOutputPlugin(OutputPlugin):
    """
    The default output plugin: the report's own human-readable summary,
    followed by any metadata that was switched on.
    """
    format_name = "text"
    supported_extensions = [".txt"]
    description = "Human-readable summary of the report."

    def render(self, report: Report, payload: Dict[str, Any]) -> str:
        lines = list(report.summary_lines())
        metadata = payload.get("metadata", {})
        extra = {key: value for key, value in metadata.items() if key not in ("report_kind", "input")}
        for key, value in extra.items():
            text = str(value).rstrip("\n")
            if "\n" in text:
                lines.append(f"{key}:")
                lines.extend(f"  {line}" for line in text.splitlines())
            else:
                lines.append(f"{key}: {text}")
        return "\n".join(lines)
