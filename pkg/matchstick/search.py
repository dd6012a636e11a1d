# matchstick/search.py
"""
Desk-scale enumeration of plane maps and the enumerate -> embed -> validate -> audit pipeline.

Connected graphs are grown in breadth-first discovery order and filtered for
planarity. A graph whose planar embedding has an already emitted canonical code is
pruned at once; the others are deduplicated with Weisfeiler-Lehman hashes plus an
exact isomorphism test and expanded into every rotation system of genus 0. Maps
are streamed once per orientation-preserving isomorphism class; mirror images stay
distinct until the findings are reported.
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations, permutations, product
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from matchstick.catalog import CatalogEntry, catalog as _catalog
from matchstick.charge import AuditMode, audit
from matchstick.core import DEFAULT_BUDGET, DEFAULT_TOLERANCE, MatchstickError, Report
from matchstick.embed import EmbeddingProblem, solve
from matchstick.map_core import (
    NonPlanarEmbedding, PlanarMap, build_map, canonical_code, canonical_form, serialize_map,
)

logger = logging.getLogger(__name__)

MAX_EDGE_BUDGET = 40
ROTATION_LIMIT = 100000
SEED_STRIDE = 100003

EULER_EXPLANATION = (
    "a finite simple planar map has |E| <= 3|V| - 6, and k-regularity gives 2|E| = k|V|, "
    "so k|V| <= 6|V| - 12, i.e. |V|(6 - k) >= 12, which no k >= 6 satisfies"
)


class SearchSpecError(MatchstickError):
    pass


@dataclass(frozen=True)
class SearchSpec:
    k: Optional[int] = None
    mode: str = "regular"
    max_edges: int = 14
    time_budget: float = DEFAULT_BUDGET
    seed: int = 0
    restarts: int = 8
    max_iterations: int = 4000
    max_degree: int = 7
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.mode not in ("regular", "min-degree"):
            raise SearchSpecError(f"mode must be 'regular' or 'min-degree', got {self.mode!r}")
        if self.mode == "regular":
            if self.k is None:
                raise SearchSpecError("regular search needs k")
            if self.k >= 6:
                raise SearchSpecError(f"no finite planar map is {self.k}-regular: {EULER_EXPLANATION}")
            if self.k not in (2, 3, 4, 5):
                raise SearchSpecError(f"k must be one of 2, 3, 4, 5, got {self.k}")
        elif self.max_degree < 5:
            raise SearchSpecError(f"max_degree must be at least 5 in min-degree mode, got {self.max_degree}")
        if not 1 <= self.max_edges <= MAX_EDGE_BUDGET:
            raise SearchSpecError(f"max_edges must lie in 1..{MAX_EDGE_BUDGET}, got {self.max_edges}")
        if not self.time_budget > 0:
            raise SearchSpecError(f"time budget must be positive, got {self.time_budget}")

    @property
    def degree_bounds(self) -> Tuple[int, int]:
        if self.mode == "regular":
            return self.k, self.k
        return 5, self.max_degree

    @property
    def audit_mode(self) -> Optional[AuditMode]:
        if self.mode == "min-degree":
            return AuditMode.MIN_DEGREE_FIVE
        if self.k == 5:
            return AuditMode.EXACT_FIVE_REGULAR
        return None

    def edge_range(self, n: int) -> Tuple[int, int]:
        lo, hi = self.degree_bounds
        planar_cap = 3 * n - 6 if n >= 3 else n - 1
        return math.ceil(lo * n / 2), min(self.max_edges, planar_cap, hi * n // 2)

    def vertex_counts(self) -> List[int]:
        lo, hi = self.degree_bounds
        counts = []
        for n in range(lo + 1, 2 * self.max_edges // lo + 1):
            if self.mode == "regular" and (self.k * n) % 2:
                continue
            low, high = self.edge_range(n)
            if low <= high:
                counts.append(n)
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# --- graphs ---

def _connected_graphs(n: int, lo: int, hi: int, max_edges: int,
                      should_stop: Optional[Callable[[], bool]] = None) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """
    Connected simple graphs on 0..n-1 with lo <= degree <= hi and at most max_edges
    edges, labelled in breadth-first discovery order. A graph appears once per
    such labelling.
    """
    adjacency = [set() for _ in range(n)]
    edges: List[Tuple[int, int]] = []

    def visit(i: int, discovered: int):
        if should_stop is not None and should_stop():
            return
        if i == n:
            if discovered == n:
                yield tuple(sorted(edges))
            return
        if i >= discovered:
            return
        have = len(adjacency[i])
        pending = [j for j in range(i + 1, discovered) if len(adjacency[j]) < hi]
        for extra in range(max(0, lo - have), hi - have + 1):
            if len(edges) + extra > max_edges:
                break
            for new in range(0, min(extra, n - discovered) + 1):
                old = extra - new
                if old > len(pending):
                    continue
                fresh = list(range(discovered, discovered + new))
                for chosen in combinations(pending, old):
                    added = [(i, j) for j in chosen + tuple(fresh)]
                    for a, b in added:
                        adjacency[a].add(b)
                        adjacency[b].add(a)
                    edges.extend(added)
                    yield from visit(i + 1, discovered + new)
                    del edges[len(edges) - len(added):]
                    for a, b in added:
                        adjacency[a].discard(b)
                        adjacency[b].discard(a)

    if n == 1:
        if lo == 0:
            yield ()
        return
    yield from visit(0, 1)


@dataclass
class EnumerationStats:
    """Counters filled in while maps are enumerated."""
    graphs: int = 0
    maps: int = 0
    pruned: int = 0
    rotation_fallbacks: int = 0

    @property
    def complete(self) -> bool:
        return self.rotation_fallbacks == 0


def _relabelled(rotation: Dict[int, Sequence[int]]) -> Dict[int, List[int]]:
    return {v + 1: [u + 1 for u in cycle] for v, cycle in rotation.items()}


def _embedding_rotation(graph: nx.Graph) -> Optional[Dict[int, List[int]]]:
    planar, embedding = nx.check_planarity(graph)
    if not planar:
        return None
    # networkx lists neighbours clockwise
    return {v: list(reversed(list(embedding.neighbors_cw_order(v)))) for v in graph.nodes}


def iter_planar_graphs(n: int, lo: int, hi: int, edge_range: Tuple[int, int],
                       should_stop: Optional[Callable[[], bool]] = None,
                       seen_codes: Optional[Set[Tuple[int, ...]]] = None,
                       stats: Optional[EnumerationStats] = None) -> Iterator[nx.Graph]:
    """
    Pairwise non-isomorphic connected planar graphs, yielded as they are generated.
    A graph whose planar embedding already has its canonical code in seen_codes
    is a relabelled copy of an earlier graph and is pruned on the spot; the rest
    are compared only with earlier graphs of equal Weisfeiler-Lehman hash.
    """
    seen_codes = seen_codes if seen_codes is not None else set()
    buckets: Dict[str, List[nx.Graph]] = {}
    low, high = edge_range
    for edges in _connected_graphs(n, lo, hi, high, should_stop):
        if len(edges) < low:
            continue
        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(edges)
        rotation = _embedding_rotation(graph)
        if rotation is None:
            continue
        embedded = build_map(_relabelled(rotation))
        if canonical_code(embedded) in seen_codes or canonical_code(embedded.mirror()) in seen_codes:
            if stats is not None:
                stats.pruned += 1
            continue
        bucket = buckets.setdefault(nx.weisfeiler_lehman_graph_hash(graph), [])
        if any(nx.is_isomorphic(graph, other) for other in bucket):
            continue
        bucket.append(graph)
        yield graph


def rotation_systems(graph: nx.Graph, limit: Optional[int] = None,
                     stats: Optional[EnumerationStats] = None) -> Iterator[Dict[int, List[int]]]:
    """
    Candidate rotation systems of a planar graph, labelled 1..n. A 3-connected graph
    has one embedding up to reflection; otherwise every combination of cyclic orders
    is tried and build_map discards those of higher genus. Past the limit
    (ROTATION_LIMIT by default) only the planar embedding and its mirror are
    produced and the fallback is counted in stats.
    """
    fixed = _embedding_rotation(graph)
    if fixed is None:
        return
    mirror = {v: list(reversed(cycle)) for v, cycle in fixed.items()}

    if graph.number_of_nodes() >= 4 and nx.node_connectivity(graph) >= 3:
        yield _relabelled(fixed)
        yield _relabelled(mirror)
        return

    limit = ROTATION_LIMIT if limit is None else limit
    total = math.prod(math.factorial(max(graph.degree(v) - 1, 0)) for v in graph.nodes)
    if total > limit:
        logger.warning(f"{total} rotation systems exceed the limit of {limit}; "
                       f"using the planar embedding and its mirror only, enumeration is incomplete")
        if stats is not None:
            stats.rotation_fallbacks += 1
        yield _relabelled(fixed)
        yield _relabelled(mirror)
        return

    nodes = sorted(graph.nodes)
    choices = []
    for v in nodes:
        neighbours = sorted(graph.neighbors(v))
        if len(neighbours) <= 2:
            choices.append([neighbours])
        else:
            first, rest = neighbours[0], neighbours[1:]
            choices.append([[first, *order] for order in permutations(rest)])
    for combo in product(*choices):
        yield _relabelled(dict(zip(nodes, combo)))


def enumerate_maps(spec: SearchSpec, deadline: Optional[float] = None,
                   stats: Optional[EnumerationStats] = None) -> Iterator[PlanarMap]:
    """
    Every connected simple plane map with the requested degree property and at most
    spec.max_edges edges, once per orientation-preserving isomorphism class, streamed
    by vertex count in generation order. Only canonical codes of the current vertex
    count are held in memory.
    """
    lo, hi = spec.degree_bounds
    stats = stats if stats is not None else EnumerationStats()

    def should_stop() -> bool:
        return deadline is not None and time.monotonic() > deadline

    for n in spec.vertex_counts():
        seen: Set[Tuple[int, ...]] = set()
        graphs = maps = 0
        for graph in iter_planar_graphs(n, lo, hi, spec.edge_range(n), should_stop, seen, stats):
            graphs += 1
            for rotation in rotation_systems(graph, stats=stats):
                try:
                    pmap = build_map(rotation)
                except NonPlanarEmbedding:
                    continue
                code = canonical_code(pmap)
                if code in seen:
                    continue
                seen.add(code)
                maps += 1
                yield canonical_form(pmap)
        stats.graphs += graphs
        stats.maps += maps
        logger.info(f"n={n}: {graphs} planar graphs, {maps} maps")
        if should_stop():
            logger.warning(f"enumeration stopped by the time budget after n={n}")
            return


def catalog() -> List[CatalogEntry]:
    return _catalog()


# --- pipeline ---

@dataclass(frozen=True)
class Finding:
    map_text: str
    vertices: int
    edges: int
    coords: Dict[int, Tuple[float, float]]
    residual: float
    validation: Dict[str, Any]
    candidate_index: int
    audit_ref: Optional[int] = None
    mirror_merged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map": self.map_text,
            "vertices": self.vertices,
            "edges": self.edges,
            "coords": {str(v): [x, y] for v, (x, y) in sorted(self.coords.items())},
            "residual": self.residual,
            "validation": self.validation,
            "candidate_index": self.candidate_index,
            "audit_ref": self.audit_ref,
            "mirror_merged": self.mirror_merged,
        }


@dataclass(frozen=True)
class PipelineReport(Report):
    spec: SearchSpec
    candidates_examined: int
    truncated: bool
    findings: Tuple[Finding, ...]
    audits: Tuple[Dict[str, Any], ...] = field(default=())
    rotation_fallbacks: int = 0

    report_kind = "search"

    @property
    def smallest_edges(self) -> Optional[int]:
        return self.findings[0].edges if self.findings else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "candidates_examined": self.candidates_examined,
            "truncated": self.truncated,
            "rotation_fallbacks": self.rotation_fallbacks,
            "smallest_edges": self.smallest_edges,
            "findings": [finding.to_dict() for finding in self.findings],
            "audits": list(self.audits),
        }

    def summary_lines(self) -> List[str]:
        label = f"k={self.spec.k}" if self.spec.mode == "regular" else "minimum degree 5"
        lines = [f"search {label}, max_edges {self.spec.max_edges}: "
                 f"{self.candidates_examined} candidates, {len(self.findings)} matchstick graphs found"
                 + (" (incomplete)" if self.truncated else "")]
        if self.rotation_fallbacks:
            lines.append(f"  {self.rotation_fallbacks} graphs exceeded the rotation limit; only their planar embedding was tried")
        for finding in self.findings:
            lines.append(f"  |V|={finding.vertices} |E|={finding.edges} residual {finding.residual:.2e}"
                         + (" (mirror images merged)" if finding.mirror_merged else ""))
        if self.audits:
            verdicts: Dict[str, int] = {}
            for record in self.audits:
                verdicts[record["verdict"]] = verdicts.get(record["verdict"], 0) + 1
            lines.append("audits: " + ", ".join(f"{verdict}: {count}" for verdict, count in sorted(verdicts.items())))
        if not self.findings:
            lines.append("no realization found")
        return lines


def _audit_record(index: int, pmap: PlanarMap, mode: AuditMode) -> Dict[str, Any]:
    record: Dict[str, Any] = {"candidate_index": index, "map": serialize_map(pmap)}
    try:
        report = audit(pmap, mode)
    except MatchstickError as error:
        record.update({
            "verdict": "input violated preconditions",
            "failing_precondition": getattr(error, "condition", type(error).__name__),
            "identities_hold": None,
            "detail": str(error),
        })
        return record
    record.update({
        "verdict": report.verdict,
        "failing_precondition": report.failing_precondition,
        "identities_hold": report.identities_hold,
        "positive_vertices": len(report.positive_vertices),
    })
    return record


def run_pipeline(spec: SearchSpec, candidates: Optional[Iterable[PlanarMap]] = None) -> PipelineReport:
    """
    Embed and validate every enumerated map (or the given candidates), merge mirror
    images, and sort findings by edge count. Candidate i is solved with seed
    spec.seed * 100003 + i from Tutte starts on each face, jittered after the first
    restart; a drawing of another rotation system of the same graph is reported as
    that map. The report is truncated when the time budget runs out or when any
    graph fell back from the full rotation enumeration.
    """
    deadline = time.monotonic() + spec.time_budget
    stats = EnumerationStats()
    stream = enumerate_maps(spec, deadline, stats) if candidates is None else iter(candidates)
    findings: Dict[Tuple[int, ...], Finding] = {}
    first_codes: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    audits: List[Dict[str, Any]] = []
    examined = 0
    truncated = False
    mode = spec.audit_mode

    for index, pmap in enumerate(stream):
        if time.monotonic() > deadline:
            truncated = True
            break
        examined += 1
        audit_ref = None
        if mode is not None:
            audits.append(_audit_record(index, pmap, mode))
            audit_ref = len(audits) - 1

        result = solve(EmbeddingProblem(
            map=pmap,
            seed=spec.seed * SEED_STRIDE + index,
            restarts=spec.restarts,
            max_iterations=spec.max_iterations,
            tolerance=spec.tolerance,
            start="planar",
            free_rotation=True,
            stop_on_success=True,
        ))
        logger.debug(f"candidate {index} ({pmap!r}): {result.verdict}")
        if not result.success:
            continue
        realized = result.realized_map or pmap
        code = canonical_code(realized)
        key = min(code, canonical_code(realized.mirror()))
        if key in findings:
            # another candidate drawn as the same map is not a mirror image
            if code != first_codes[key]:
                findings[key] = replace(findings[key], mirror_merged=True)
            continue
        first_codes[key] = code
        findings[key] = Finding(
            map_text=serialize_map(realized),
            vertices=realized.num_vertices,
            edges=realized.num_edges,
            coords=result.coords,
            residual=result.residual,
            validation=result.validation.to_dict(),
            candidate_index=index,
            audit_ref=audit_ref,
        )
    else:
        truncated = time.monotonic() > deadline
    if not stats.complete:
        truncated = True

    ordered = tuple(sorted(findings.values(), key=lambda f: (f.edges, f.vertices, f.map_text)))
    report = PipelineReport(
        spec=spec,
        candidates_examined=examined,
        truncated=truncated,
        findings=ordered,
        audits=tuple(audits),
        rotation_fallbacks=stats.rotation_fallbacks,
    )
    logger.info(f"pipeline: {examined} candidates, {len(ordered)} findings"
                + (", truncated" if truncated else ""))
    return report
