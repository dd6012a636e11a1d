#!/usr/bin/env python
"""
Main entry point for matchstick.
This module parses arguments, merges configuration, discovers plugins,
loads the input map, runs one subcommand and emits its report.

Exit codes: 0 success, 1 domain failure, 2 input error, 3 precondition violation.
"""

import sys
import argparse
import traceback
import json
import logging
import importlib
import inspect
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Set, Type

from matchstick.catalog import UnknownCatalogEntry, catalog, catalog_entry
from matchstick.charge import (
    AuditMode, ChargeError, PreconditionViolated, NonPolygonFace, DegreeOutOfRange, AugmentationError,
    audit, find_diagonal_face, local_config_oracle, pentagon_sum_bounds,
)
from matchstick.core import BUILTIN_METADATA, BaseArguments, MatchstickError, OutputPlugin, Report
from matchstick.embed import EmbeddingError, EmbeddingProblem, solve
from matchstick.geometry import (
    GeometricMap, GeometryError, detect_diamonds, dump_coords, load_coords, render_svg, validate_matchstick,
)
from matchstick.map_core import MapError, PlanarMap, load_map
from matchstick.search import SearchSpec, SearchSpecError, run_pipeline
from matchstick.utils import NotUtf8, env_config_dirs, format_path_for_output, read_utf8_file

logger = logging.getLogger(__name__)
logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3

SUBCOMMANDS = ("validate", "audit", "embed", "search", "render", "oracle")
AUDIT_MODES = ("exact5", "mindeg5", "exact-5-regular", "min-degree-5")
SEARCH_MODES = ("regular", "min-degree")
CATALOG_PREFIX = "catalog:"


class InputError(MatchstickError):
    """Bad flags or flag combinations detected before any work is done."""


class MatchstickSession:
    """
    Holds the parsed arguments, the discovered plugins and the loaded input,
    and turns reports into output through the selected output plugins.
    """
    def __init__(self, args: BaseArguments, disabled_plugins: Set[str] = None):
        self.args = args
        self.disabled_plugins = disabled_plugins or set()
        self.plugins: Dict[str, Type[OutputPlugin]] = {}
        self.logger = logging.getLogger(__name__)
        self.metadata_plugins = self._discover_metadata_plugins()
        self.build_dynamic_metadata_config()
        self.pmap: Optional[PlanarMap] = None
        self.catalog_coords = None
        self.sources: Dict[str, str] = {}

    def build_dynamic_metadata_config(self):
        config = BUILTIN_METADATA.copy()
        for plugin in self.metadata_plugins.values():
            key = plugin.metadata_name
            default_value = getattr(plugin, "default", False)
            description = getattr(plugin, "description", "")
            config[key] = {"default": default_value, "description": description}
        self.metadata_config = config

    def _discover_metadata_plugins(self) -> Dict[str, Type]:
        from matchstick.plugins.metadata.plugin_base import MetadataPlugin
        plugins = {}
        metadata_dir = Path(__file__).parent / "plugins" / "metadata"
        if not metadata_dir.exists():
            self.logger.warning(f"Metadata plugins directory does not exist at {metadata_dir}")
            return plugins
        self.logger.debug("Scanning for metadata plugins in: %s", metadata_dir)
        for plugin_file in sorted(metadata_dir.glob("*.py")):
            if plugin_file.name.startswith("_"):
                continue
            try:
                module = importlib.import_module(f"matchstick.plugins.metadata.{plugin_file.stem}")
                for name, obj in inspect.getmembers(module):
                    if (inspect.isclass(obj) and issubclass(obj, MetadataPlugin)
                            and obj is not MetadataPlugin and hasattr(obj, "metadata_name")):
                        if obj.metadata_name in self.disabled_plugins:
                            self.logger.info(f"Metadata plugin '{obj.metadata_name}' is disabled.")
                            continue
                        plugins[obj.metadata_name] = obj
                        self.logger.debug(f"Loaded metadata plugin: {obj.metadata_name}")
            except Exception as e:
                self.logger.error(f"Error loading metadata plugin {plugin_file}: {e}")
        return plugins

    # --- inputs ---

    def load_map(self, source: Optional[str]) -> PlanarMap:
        if not source:
            raise InputError(f"'{self.args.command}' needs a map file or catalog:<name>")
        if source.startswith(CATALOG_PREFIX):
            entry = catalog_entry(source[len(CATALOG_PREFIX):])
            self.pmap = entry.map
            self.catalog_coords = entry.coords
        else:
            self.pmap = load_map(source)
        self.sources["map"] = source
        self.logger.info(f"Map {source}: {self.pmap!r}")
        return self.pmap

    def load_coords(self, required: bool) -> Optional[dict]:
        source = self.args.coords_path
        if source:
            self.sources["coords"] = source
            return load_coords(source)
        if self.catalog_coords is not None:
            return dict(self.catalog_coords)
        if required:
            raise InputError(f"'{self.args.command}' needs a coordinates file")
        return None

    # --- outputs ---

    def allowed_metadata(self) -> Set[str]:
        allowed = {k for k, cfg in self.metadata_config.items() if cfg["default"]}
        for key in self.args.metadata_remove:
            allowed.discard(key)
        for key in self.args.metadata_add:
            allowed.add(key)
        return allowed

    def build_payload(self, report: Report) -> dict:
        allowed = self.allowed_metadata()
        metadata = {}
        if "report_kind" in allowed:
            metadata["report_kind"] = report.report_kind
        if "input" in allowed and self.sources:
            metadata["input"] = dict(self.sources)
        for plugin_name, plugin_cls in self.metadata_plugins.items():
            if plugin_name in allowed:
                plugin_cls(session=self).attach_metadata(metadata)
        payload = report.to_dict()
        payload["metadata"] = metadata
        return payload

    def requested_formats(self) -> List[str]:
        formats_arg = (self.args.formats or "").strip().lower()
        if not formats_arg or formats_arg == "default":
            if self.args.output_file:
                suffix = Path(self.args.output_file).suffix.lower()
                for plugin in self.plugins.values():
                    if suffix in plugin.supported_extensions:
                        return [plugin.format_name]
            return ["text"]
        return [fmt.strip() for fmt in formats_arg.split(",") if fmt.strip()]

    def emit(self, report: Report) -> None:
        payload = self.build_payload(report)
        formats = self.requested_formats()
        output_path = Path(self.args.output_file) if self.args.output_file else None
        for format_name in formats:
            plugin_cls = self.plugins[format_name]
            target = output_path
            if output_path is not None and len(formats) > 1:
                target = output_path.with_suffix(plugin_cls.supported_extensions[0])
            plugin_cls(self).generate_output(report, payload, target)


def discover_plugins(disabled_plugins: Set[str]) -> Dict[str, Type[OutputPlugin]]:
    """
    Discover and load output plugins from the plugins/outputs directory.
    """
    plugins_dict = {}
    plugins_dir = Path(__file__).parent / "plugins" / "outputs"
    if not plugins_dir.exists():
        logger.warning(f"Output plugins directory does not exist at {plugins_dir}")
        return plugins_dict
    for plugin_file in sorted(plugins_dir.glob("*.py")):
        if plugin_file.name.startswith("_"):
            continue
        try:
            plugin_module = importlib.import_module(f"matchstick.plugins.outputs.{plugin_file.stem}")
            for name, obj in inspect.getmembers(plugin_module):
                if (inspect.isclass(obj) and issubclass(obj, OutputPlugin) and obj is not OutputPlugin and obj.format_name):
                    if obj.format_name in disabled_plugins:
                        logger.info(f"Plugin '{obj.format_name}' is disabled.")
                        continue
                    plugins_dict[obj.format_name] = obj
                    logger.debug(f"Loaded plugin for format: {obj.format_name}")
        except Exception as e:
            logger.error(f"Error loading plugin {plugin_file}: {e}")
    return plugins_dict


# --- subcommands ---

def run_validate(session: MatchstickSession) -> int:
    args = session.args
    pmap = session.load_map(args.map_path)
    gmap = GeometricMap(pmap, session.load_coords(required=True), args.tolerance)
    report = validate_matchstick(gmap, args.k)
    session.emit(report)
    return EXIT_OK if report.passed else EXIT_FAILURE


def run_audit(session: MatchstickSession) -> int:
    args = session.args
    mode_name = args.mode or "exact5"
    if mode_name not in AUDIT_MODES:
        raise InputError(f"audit --mode must be one of {', '.join(AUDIT_MODES)}, got {mode_name!r}")
    mode = AuditMode.parse(mode_name)
    pmap = session.load_map(args.map_path)
    coords = session.load_coords(required=False)

    geometry_checks = None
    diamonds = []
    if coords is not None:
        gmap = GeometricMap(pmap, coords, args.tolerance)
        validation = validate_matchstick(gmap)
        geometry_checks = validation.check_map()
        diamonds = [(entry.face_id, entry.diagonal) for entry in detect_diamonds(gmap)]
        logger.info(f"{len(diamonds)} diamonds detected")
    for u, v in args.diagonals or []:
        diamonds.append((find_diagonal_face(pmap, u, v), (u, v)))

    report = audit(pmap, mode, diamonds=diamonds, geometry_checks=geometry_checks, augment=args.augment)
    session.emit(report)
    return EXIT_OK if report.identities_hold else EXIT_FAILURE


def run_embed(session: MatchstickSession) -> int:
    args = session.args
    if args.init not in ("random", "tutte"):
        raise InputError(f"--init must be 'random' or 'tutte', got {args.init!r}")
    pmap = session.load_map(args.map_path)
    initial = session.load_coords(required=True) if args.coords_path else None

    result = solve(EmbeddingProblem(
        map=pmap,
        initial_coords=initial,
        seed=args.seed,
        max_iterations=args.max_iterations,
        restarts=args.restarts,
        tau=args.tau,
        tolerance=args.tolerance,
        workers=args.workers,
        start="planar" if args.init == "tutte" else "random",
    ))
    if args.coords_out:
        dump_coords(result.coords, args.coords_out)
        logger.info(f"coordinates written to {format_path_for_output(args.coords_out, Path.cwd())}")
    if args.svg:
        Path(args.svg).write_text(render_svg(GeometricMap(pmap, result.coords, args.tolerance), labels=args.labels),
                                  encoding="utf-8")
        logger.info(f"SVG written to {format_path_for_output(args.svg, Path.cwd())}")
    session.emit(result)
    return EXIT_OK if result.success else EXIT_FAILURE


def run_search(session: MatchstickSession) -> int:
    args = session.args
    mode = args.mode or "regular"
    if mode not in SEARCH_MODES:
        raise InputError(f"search --mode must be one of {', '.join(SEARCH_MODES)}, got {mode!r}")
    spec = SearchSpec(
        k=args.k if mode == "regular" else None,
        mode=mode,
        max_edges=args.max_edges,
        time_budget=args.budget,
        seed=args.seed,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        tolerance=args.tolerance,
    )
    report = run_pipeline(spec)
    session.emit(report)
    return EXIT_OK


def _charges_from_audit(path: str) -> Dict[int, Fraction]:
    try:
        data = json.loads(read_utf8_file(Path(path)))
        return {int(entry["vertex"]): Fraction(entry["f_tilde"]) for entry in data["vertex_charges"]}
    except (KeyError, TypeError, ValueError) as error:
        raise InputError(f"{path} is not an audit report: {error}") from None


def run_render(session: MatchstickSession) -> int:
    args = session.args
    pmap = session.load_map(args.map_path)
    gmap = GeometricMap(pmap, session.load_coords(required=True), args.tolerance)
    charges = _charges_from_audit(args.audit_path) if args.audit_path else None
    svg = render_svg(gmap, labels=args.labels, charges=charges)
    if args.output_file:
        Path(args.output_file).write_text(svg, encoding="utf-8")
        logger.info(f"SVG written to {args.output_file}")
    else:
        sys.stdout.write(svg)
        sys.stdout.flush()
    return EXIT_OK


def run_oracle(session: MatchstickSession) -> int:
    args = session.args
    try:
        degrees = [int(part) for part in str(args.degrees).split(",") if part.strip()]
    except ValueError:
        raise InputError(f"--degrees must be a comma-separated list of integers, got {args.degrees!r}") from None
    table = local_config_oracle(degrees, args.cap)
    bound = pentagon_sum_bounds(table)
    table = replace(table, pentagon_bound=bound)
    session.emit(table)
    judged = 5 in table.degrees
    if table.violations or (judged and not bound.holds):
        return EXIT_FAILURE
    return EXIT_OK


HANDLERS = {
    "validate": run_validate,
    "audit": run_audit,
    "embed": run_embed,
    "search": run_search,
    "render": run_render,
    "oracle": run_oracle,
}


def add_command_arguments(parser: argparse.ArgumentParser) -> None:
    defaults = BaseArguments()
    parser.add_argument("command", nargs="?", choices=SUBCOMMANDS, help="Subcommand to run")
    parser.add_argument("map_path", nargs="?", default=None, help="Map file, or catalog:<name>")
    parser.add_argument("coords_path", nargs="?", default=None, help="Coordinates file")

    geometry = parser.add_argument_group("geometry options")
    geometry.add_argument("--tolerance", type=float, default=defaults.tolerance,
                          help="Relative length tolerance (env MATCHSTICK_TOLERANCE)")
    geometry.add_argument("--k", type=int, default=None, help="Required regularity")
    geometry.add_argument("--labels", action="store_true", help="Label vertices in SVG output")
    geometry.add_argument("--audit", dest="audit_path", default=None,
                          help="Audit report JSON used to colour vertices by charge")

    charge = parser.add_argument_group("audit and oracle options")
    charge.add_argument("--mode", default=None,
                        help="audit: exact5|mindeg5 (default exact5); search: regular|min-degree (default regular)")
    charge.add_argument("--diagonal", dest="diagonals", nargs=2, type=int, action="append", default=[],
                        metavar=("U", "V"), help="Split the quadrilateral with opposite corners U and V")
    charge.add_argument("--no-augment", dest="augment", action="store_false", help="Do not add diamond diagonals")
    charge.add_argument("--degrees", default=defaults.degrees, help="Degrees for the oracle table")
    charge.add_argument("--cap", type=int, default=defaults.cap, help="Largest face size for the oracle table")

    embed = parser.add_argument_group("embedding options")
    embed.add_argument("--seed", type=int, default=defaults.seed)
    embed.add_argument("--restarts", type=int, default=defaults.restarts)
    embed.add_argument("--max-iterations", type=int, default=defaults.max_iterations)
    embed.add_argument("--tau", type=float, default=defaults.tau, help="Convergence threshold on the residual")
    embed.add_argument("--init", default=defaults.init, help="random or tutte")
    embed.add_argument("--coords-out", default=None, help="Write the best coordinates here")
    embed.add_argument("--svg", default=None, help="Write an SVG drawing of the best coordinates here")
    embed.add_argument("--workers", type=int, default=defaults.workers, help="Threads for parallel restarts")

    search = parser.add_argument_group("search options")
    search.add_argument("--max-edges", type=int, default=defaults.max_edges)
    search.add_argument("--budget", type=float, default=defaults.budget,
                        help="Time budget in seconds (env MATCHSTICK_BUDGET)")


def _query(session: MatchstickSession, active_plugins: Dict[str, Type[OutputPlugin]], queries: List[str]) -> dict:
    query_summary = {}
    requested_queries = [q.lower() for q in queries]

    if "formats" in requested_queries:
        query_summary["formats"] = {
            fmt_name: {
                "extensions": plugin_class.supported_extensions,
                "description": getattr(plugin_class, "description", "")
            }
            for fmt_name, plugin_class in active_plugins.items()
        }

    if "metadata" in requested_queries:
        query_summary["metadata"] = session.metadata_config

    if "plugins" in requested_queries:
        query_summary["metadata_plugins"] = {
            key: {
                "default": getattr(plugin, "default", False),
                "description": getattr(plugin, "description", "")
            }
            for key, plugin in session.metadata_plugins.items()
        }
        query_summary["output_plugins"] = {
            key: {
                "extensions": getattr(plugin, "supported_extensions", []),
                "description": getattr(plugin, "description", "")
            }
            for key, plugin in active_plugins.items()
        }

    if "configs" in requested_queries:
        config_files = []
        config_dirs = [Path(__file__).parent.parent / "configs"] + env_config_dirs()
        for config_dir in config_dirs:
            if config_dir.exists() and config_dir.is_dir():
                for conf_file in sorted(config_dir.glob("*.json")):
                    config_files.append({"path": str(conf_file.resolve()), "file": conf_file.name})
        query_summary["configs"] = config_files

    if "catalog" in requested_queries:
        query_summary["catalog"] = [entry.to_dict() for entry in catalog()]

    return query_summary


def _read_config(path: str) -> dict:
    config_path = Path(path)
    if not config_path.is_file():
        raise InputError(f"config file {path} does not exist")
    try:
        config_data = json.loads(read_utf8_file(config_path))
    except NotUtf8 as error:
        raise InputError(str(error)) from None
    except json.JSONDecodeError as error:
        raise InputError(f"config file {path} is not valid JSON: {error}") from None
    if not isinstance(config_data, dict):
        raise InputError(f"config file {path} must hold a JSON object")
    known = vars(BaseArguments())
    for key in [key for key in config_data if key not in known]:
        logger.warning(f"Ignoring unknown config key '{key}' in {path}")
        del config_data[key]
    return config_data


# --- Main Function ---
def main(cli_args=None):
    if cli_args is None:
        cli_args = sys.argv[1:]

    # If --query or any form of help is requested, disable logging.
    if any(arg in ("--query", "--help", "-h") for arg in cli_args):
        logging.disable(logging.CRITICAL)
    if "--quiet" in cli_args:
        logging.getLogger().setLevel(logging.WARNING)

    # Phase 1: Parse core arguments.
    phase1_parser = argparse.ArgumentParser(add_help=False)
    BaseArguments.add_core_arguments(phase1_parser)
    phase1_parser.add_argument("--config", default=None, help="Path to a JSON config file")
    phase1_parser.add_argument("--disable-plugin", nargs="*", default=[], help="Disable plugins")
    phase1_parser.add_argument("--query", nargs="+", default=None,
                               help="Query available items (formats, metadata, plugins, configs, catalog)")
    phase1_args, remaining_args = phase1_parser.parse_known_args(cli_args)

    config_data = {}
    if phase1_args.config:
        try:
            config_data = _read_config(phase1_args.config)
        except InputError as error:
            logger.error(str(error))
            return EXIT_INPUT
        logger.info(f"Loaded config {phase1_args.config}: {sorted(config_data)}")

    disabled_plugin_set = set(config_data.get("disable_plugin", phase1_args.disable_plugin) or [])
    active_plugins = discover_plugins(disabled_plugin_set)

    # Phase 2: Create final parser (which also adds plugin-specific and subcommand arguments).
    phase2_parser = argparse.ArgumentParser(parents=[phase1_parser], add_help=False, prog="matchstick")
    for plugin_class in active_plugins.values():
        plugin_class.add_arguments(phase2_parser)
    add_command_arguments(phase2_parser)
    phase2_parser.add_argument("-h", "--help", action="help", help="Show help message")
    # config values act as defaults, so explicit flags still win
    phase2_parser.set_defaults(**config_data)
    final_args = phase2_parser.parse_args(cli_args)
    actual_args = BaseArguments.from_namespace(final_args)
    if actual_args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    session = MatchstickSession(actual_args, disabled_plugin_set)
    session.plugins = active_plugins

    if actual_args.query:
        print(json.dumps(_query(session, active_plugins, actual_args.query), indent=2, default=str))
        return EXIT_OK

    if not actual_args.command:
        phase2_parser.error("a subcommand is required: " + ", ".join(SUBCOMMANDS))
    unknown = [fmt for fmt in session.requested_formats() if fmt not in active_plugins]
    if unknown:
        logger.error(f"No plugin found for format(s) {', '.join(unknown)}")
        return EXIT_INPUT

    try:
        return HANDLERS[actual_args.command](session)
    except PreconditionViolated as error:
        logger.error(f"precondition violated: {error}")
        return EXIT_PRECONDITION
    except (NonPolygonFace, DegreeOutOfRange) as error:
        logger.error(f"precondition violated: {error}")
        return EXIT_PRECONDITION
    except (InputError, MapError, GeometryError, AugmentationError, UnknownCatalogEntry,
            EmbeddingError, SearchSpecError, OSError) as error:
        logger.error(str(error))
        return EXIT_INPUT
    except (ChargeError, MatchstickError) as error:
        logger.error(str(error))
        return EXIT_FAILURE
    except Exception as gen_err:
        logger.error(f"Error during execution: {gen_err}")
        traceback.print_exc()
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
