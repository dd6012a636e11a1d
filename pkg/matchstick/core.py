# matchstick/core.py
"""
Core module for matchstick.
This file defines:
  - MatchstickError: root of every domain exception raised by the package.
  - BaseArguments: shared CLI arguments.
  - Report: base class for every machine-readable result (validation, audit,
    oracle table, embedding result, pipeline findings).
  - OutputPlugin: abstract base class for output plugins.
"""

from abc import ABC, abstractmethod
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from matchstick import version
from matchstick.utils import ENV_BUDGET, ENV_TOLERANCE, env_float

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6
DEFAULT_BUDGET = 60.0

# Built-in report metadata keys. Metadata plugins extend this set at runtime.
BUILTIN_METADATA = {
    "report_kind": {"default": True, "description": "Kind of report (validation, audit, embedding, ...)."},
    "input": {"default": True, "description": "Map and coordinate sources as given on the command line."},
}


class MatchstickError(Exception):
    """Base class for all matchstick domain errors."""


class BaseArguments:
    """Base class containing common arguments shared across all subcommands and plugins."""
    def __init__(self):
        self.command: Optional[str] = None
        self.formats: str = "default"
        self.output_file: Optional[Path] = None
        self.config: Optional[str] = None
        self.disable_plugin: List[str] = []
        self.query = None
        self.metadata_add: List[str] = []
        self.metadata_remove: List[str] = []
        self.quiet: bool = False
        # inputs
        self.map_path: Optional[str] = None
        self.coords_path: Optional[str] = None
        # geometry
        self.tolerance: float = env_float(ENV_TOLERANCE, DEFAULT_TOLERANCE)
        self.k: Optional[int] = None
        self.labels: bool = False
        self.audit_path: Optional[str] = None
        # audit takes exact5|mindeg5, search takes regular|min-degree
        self.mode: Optional[str] = None
        self.diagonals: List[List[int]] = []
        self.augment: bool = True
        self.degrees: str = "5,6,7"
        self.cap: int = 10
        # embed
        self.seed: int = 0
        self.restarts: int = 8
        self.max_iterations: int = 4000
        self.tau: float = 1e-13
        self.init: str = "random"
        self.coords_out: Optional[str] = None
        self.svg: Optional[str] = None
        self.workers: int = 1
        # search
        self.max_edges: int = 14
        self.budget: float = env_float(ENV_BUDGET, DEFAULT_BUDGET)

    @classmethod
    def add_core_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--format", dest="formats", default="default",
                            help="Comma-separated list of output formats (text, json, markdown); "
                                 "by default inferred from --output-file, else text")
        parser.add_argument("--output-file", default=None,
                            help="Write the report here instead of standard output")
        parser.add_argument("--metadata-add", nargs="*", default=[], help="Add optional report metadata fields")
        parser.add_argument("--metadata-remove", nargs="*", default=[], help="Remove default report metadata fields")
        parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "BaseArguments":
        instance = cls()
        for key, value in vars(args).items():
            if hasattr(instance, key):
                setattr(instance, key, value)
        return instance


class Report(ABC):
    """
    A machine-readable result. to_dict() must return plain JSON types with a
    deterministic key order so that repeated runs serialize byte-identically.
    """
    report_kind = "report"

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Plain-data form of the report."""

    @abstractmethod
    def summary_lines(self) -> List[str]:
        """Human-readable summary, one line per entry."""


class OutputPlugin(ABC):
    """
    Base class for output plugins.
    Plugins receive the Report and the payload the session assembled from it
    (report fields plus metadata), and only decide how to format them.
    """
    format_name: str = None
    supported_extensions: List[str] = []
    description: str = ""

    def __init__(self, session):
        self.session = session
        self.args = session.args

    @abstractmethod
    def render(self, report: Report, payload: Dict[str, Any]) -> str:
        """Return the report formatted in the plugin's format."""

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Add plugin-specific arguments to the parser."""
        pass

    def generate_output(self, report: Report, payload: Dict[str, Any], output_path: Optional[Path]) -> None:
        text = self.render(report, payload)
        if not text.endswith("\n"):
            text += "\n"
        if output_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        with open(output_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info(f"{self.format_name} output generated at {output_path}")

    def _get_tool_metadata(self) -> dict:
        """
        Centralize the tool metadata by importing from the version module.
        Command arguments are left out so that reports stay byte-identical
        across output locations.
        """
        return {
            "Tool": version.__tool_name__,
            "Version": version.__version__,
            "Command": self.args.command,
        }
