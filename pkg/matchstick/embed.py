# matchstick/embed.py
"""
Numerical search for unit-distance drawings.

The residual sum over edges of (|x_u - x_v| - 1)^2 is minimized by gradient descent
with backtracking from seeded random starts, or from jittered Tutte drawings,
optionally polished with a least-squares solve. The first vertex is pinned at
the origin and its first rotation neighbour kept on the x-axis. A result only
counts as a realization when the penalty-free validator accepts it; a failed
search means "no realization found", nothing stronger. With free_rotation a
crossing-free drawing that shows another rotation system of the same graph is
validated against the map it actually draws.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial.distance import pdist, squareform

from matchstick.core import DEFAULT_TOLERANCE, MatchstickError, Report
from matchstick.geometry import GeometricMap, Point, ValidationReport, rotation_from_coords, validate_matchstick
from matchstick.map_core import MapError, PlanarMap, build_map, serialize_map

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
INITIAL_STEP = 0.1
MAX_STEP = 10.0
MIN_STEP = 1e-16
COINCIDENCE = 1e-9
KICK = 1e-6
POLISH_THRESHOLD = 1e-2
PLANAR_JITTER = 0.2
CROSSING_MARGIN = 0.05
REPULSION_RADIUS = 0.25
FINITE_DIFFERENCE_STEP = 1e-7
START_POLICIES = ("random", "planar")

Coords = Union[Mapping[int, Point], np.ndarray]


class EmbeddingError(MatchstickError):
    pass


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    STALLED = "stalled"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class EmbeddingProblem:
    map: PlanarMap
    initial_coords: Optional[Mapping[int, Point]] = None
    seed: int = 0
    max_iterations: int = 4000
    restarts: int = 8
    tau: float = 1e-13
    tolerance: float = DEFAULT_TOLERANCE
    penalty_rounds: int = 3
    polish: bool = True
    workers: int = 1
    start: str = "random"
    free_rotation: bool = False
    stop_on_success: bool = False

    def __post_init__(self):
        if not self.tau > 0:
            raise EmbeddingError(f"convergence threshold must be positive, got {self.tau}")
        if self.restarts < 1:
            raise EmbeddingError(f"at least one restart is required, got {self.restarts}")
        if self.max_iterations < 1:
            raise EmbeddingError(f"max_iterations must be positive, got {self.max_iterations}")
        if self.workers < 1:
            raise EmbeddingError(f"workers must be positive, got {self.workers}")
        if self.start not in START_POLICIES:
            raise EmbeddingError(f"start must be one of {', '.join(START_POLICIES)}, got {self.start!r}")
        if self.initial_coords is not None:
            missing = [v for v in self.map.vertices if v not in self.initial_coords]
            if missing:
                raise EmbeddingError(f"initial coordinates miss vertices {missing[:10]}")


@dataclass(frozen=True)
class EmbeddingResult(Report):
    coords: Dict[int, Point]
    residual: float
    iterations: int
    status: SolveStatus
    validation: ValidationReport
    restart: int = 0
    penalty_rounds_used: int = 0
    realized_map: Optional[PlanarMap] = None

    report_kind = "embedding"

    @property
    def success(self) -> bool:
        return self.status is SolveStatus.CONVERGED and self.validation.passed

    @property
    def verdict(self) -> str:
        return "realization found" if self.success else "no realization found"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "success": self.success,
            "verdict": self.verdict,
            "residual": self.residual,
            "iterations": self.iterations,
            "restart": self.restart,
            "penalty_rounds_used": self.penalty_rounds_used,
            "realized_map": serialize_map(self.realized_map) if self.realized_map is not None else None,
            "validation": self.validation.to_dict(),
            "coords": {str(v): [x, y] for v, (x, y) in sorted(self.coords.items())},
        }

    def summary_lines(self) -> List[str]:
        lines = [
            f"{self.verdict}: status {self.status.value}, residual {self.residual:.3e}, "
            f"{self.iterations} iterations (restart {self.restart}, penalty rounds {self.penalty_rounds_used})",
        ]
        lines.extend(self.validation.summary_lines())
        return lines


class _EdgeSystem:
    """Index arrays shared by the objective, its Jacobian and the penalties."""

    def __init__(self, pmap: PlanarMap):
        self.map = pmap
        self.vertices = pmap.vertices
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.n = len(self.vertices)
        self.I = np.array([self.index[u] for u, _ in pmap.edges], dtype=int)
        self.J = np.array([self.index[v] for _, v in pmap.edges], dtype=int)

        self.free = np.ones((self.n, 2), dtype=bool)
        self.anchor: Optional[int] = None
        self.second: Optional[int] = None
        if self.n:
            self.anchor = 0
            self.free[0, :] = False
            first = pmap.neighbors(self.vertices[0])
            if first:
                self.second = self.index[first[0]]
                self.free[self.second, 1] = False

        edges = pmap.edges
        pairs = [(a, b) for a in range(len(edges)) for b in range(a + 1, len(edges))
                 if not set(edges[a]) & set(edges[b])]
        self.pair_a = np.array([a for a, _ in pairs], dtype=int)
        self.pair_b = np.array([b for _, b in pairs], dtype=int)

    def to_points(self, coords: Coords) -> np.ndarray:
        if isinstance(coords, np.ndarray):
            return np.array(coords, dtype=float).reshape(self.n, 2)
        return np.array([coords[v] for v in self.vertices], dtype=float).reshape(self.n, 2)

    def to_coords(self, points: np.ndarray) -> Dict[int, Point]:
        return {v: (float(points[i, 0]) + 0.0, float(points[i, 1]) + 0.0) for i, v in enumerate(self.vertices)}

    def residuals(self, points: np.ndarray) -> np.ndarray:
        diff = points[self.I] - points[self.J]
        return np.hypot(diff[:, 0], diff[:, 1]) - 1.0

    def value(self, points: np.ndarray) -> float:
        r = self.residuals(points)
        return float(r @ r)

    def value_and_grad(self, points: np.ndarray) -> Tuple[float, np.ndarray]:
        diff = points[self.I] - points[self.J]
        lengths = np.hypot(diff[:, 0], diff[:, 1])
        r = lengths - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            # zero subgradient at coincident endpoints
            scale = np.where(lengths > 0, 2.0 * r / lengths, 0.0)
        edge_grad = scale[:, None] * diff
        grad = np.zeros_like(points)
        np.add.at(grad, self.I, edge_grad)
        np.add.at(grad, self.J, -edge_grad)
        return float(r @ r), grad

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        diff = points[self.I] - points[self.J]
        lengths = np.hypot(diff[:, 0], diff[:, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            unit = np.where(lengths[:, None] > 0, diff / lengths[:, None], 0.0)
        rows = np.arange(len(self.I))
        jac = np.zeros((len(self.I), self.n, 2))
        jac[rows, self.I] += unit
        jac[rows, self.J] -= unit
        return jac.reshape(len(self.I), 2 * self.n)

    def gauge(self, points: np.ndarray) -> np.ndarray:
        if self.anchor is None:
            return points
        points = points - points[self.anchor]
        if self.second is not None:
            dx, dy = points[self.second]
            if math.hypot(dx, dy) > 0:
                angle = math.atan2(dy, dx)
                c, s = math.cos(angle), math.sin(angle)
                points = points @ np.array([[c, -s], [s, c]])
                points[self.second, 1] = 0.0
        points[self.anchor] = 0.0
        return points

    def conflict_penalty(self, points: np.ndarray) -> float:
        """Repulsion between properly crossing edges and between nearly coincident vertices."""
        total = 0.0
        if self.pair_a.size:
            p, q = points[self.I[self.pair_a]], points[self.J[self.pair_a]]
            r, s = points[self.I[self.pair_b]], points[self.J[self.pair_b]]
            o1, o2 = _cross_rows(q - p, r - p), _cross_rows(q - p, s - p)
            o3, o4 = _cross_rows(s - r, p - r), _cross_rows(s - r, q - r)
            crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
            if crossing.any():
                lpq = np.maximum(np.hypot(*(q - p).T), 1e-12)
                lrs = np.maximum(np.hypot(*(s - r).T), 1e-12)
                depth = np.minimum(
                    np.minimum(np.abs(o1), np.abs(o2)) / lpq,
                    np.minimum(np.abs(o3), np.abs(o4)) / lrs,
                )[crossing]
                total += float(np.sum((depth + CROSSING_MARGIN) ** 2))
        if self.n >= 2:
            distances = pdist(points)
            close = distances < REPULSION_RADIUS
            total += float(np.sum((REPULSION_RADIUS - distances[close]) ** 2))
        return total

    def conflict_penalty_grad(self, points: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(points)
        for i, j in zip(*np.nonzero(self.free)):
            shifted = points.copy()
            shifted[i, j] += FINITE_DIFFERENCE_STEP
            upper = self.conflict_penalty(shifted)
            shifted[i, j] -= 2 * FINITE_DIFFERENCE_STEP
            lower = self.conflict_penalty(shifted)
            grad[i, j] = (upper - lower) / (2 * FINITE_DIFFERENCE_STEP)
        return grad


def _cross_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]


def objective_and_gradient(pmap: PlanarMap, coords: Coords) -> Tuple[float, np.ndarray]:
    """
    Value and analytic gradient of sum (|x_u - x_v| - 1)^2. coords is a mapping
    from vertex id to point, or an (n, 2) array in pmap.vertices order; the
    gradient is returned as an (n, 2) array in the same order.
    """
    system = _EdgeSystem(pmap)
    return system.value_and_grad(system.to_points(coords))


def _kick_coincident(points: np.ndarray, free: np.ndarray, rng: np.random.Generator) -> bool:
    if len(points) < 2:
        return False
    distances = pdist(points)
    if distances.min() >= COINCIDENCE:
        return False
    rows, cols = np.nonzero(np.triu(squareform(distances) < COINCIDENCE, k=1))
    for j in sorted(set(cols.tolist())):
        points[j] += rng.normal(scale=KICK, size=2) * free[j]
    logger.debug(f"kicked {len(rows)} coincident vertex pairs")
    return True


def _descend(
    fun: Callable[[np.ndarray], Tuple[float, np.ndarray]],
    points: np.ndarray,
    free: np.ndarray,
    tau: float,
    max_iterations: int,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, float, int, SolveStatus]:
    """Gradient descent with Armijo backtracking; the step doubles after every accepted move."""
    points = points.copy()
    value, grad = fun(points)
    step = INITIAL_STEP
    iterations = 0
    while True:
        if value <= tau:
            return points, value, iterations, SolveStatus.CONVERGED
        if iterations >= max_iterations:
            return points, value, iterations, SolveStatus.EXHAUSTED
        iterations += 1
        if _kick_coincident(points, free, rng):
            value, grad = fun(points)
        grad = grad * free
        slope = float(np.sum(grad * grad))
        if slope < 1e-30:
            return points, value, iterations, SolveStatus.STALLED
        while step > MIN_STEP:
            trial = points - step * grad
            trial_value, trial_grad = fun(trial)
            if trial_value <= value - ARMIJO * step * slope:
                points, value, grad = trial, trial_value, trial_grad
                step = min(step * 2.0, MAX_STEP)
                break
            step *= 0.5
        else:
            return points, value, iterations, SolveStatus.STALLED


def _polish(system: _EdgeSystem, points: np.ndarray) -> np.ndarray:
    free = system.free.ravel()
    if not free.any() or not system.I.size:
        return points
    base = points.ravel().copy()

    def expand(x):
        full = base.copy()
        full[free] = x
        return full.reshape(-1, 2)

    solution = least_squares(
        lambda x: system.residuals(expand(x)),
        base[free],
        jac=lambda x: system.jacobian(expand(x))[:, free],
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=200,
    )
    return expand(solution.x)


def _random_start(rng: np.random.Generator, n: int) -> np.ndarray:
    radius = max(1.0, 0.5 * math.sqrt(n))
    r = radius * np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2 * math.pi, size=n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _planar_start(system: _EdgeSystem, restart: int, rng: np.random.Generator) -> np.ndarray:
    """
    Tutte drawing with the restart-th face (largest first) as outer face; every
    restart after the first is jittered so that symmetric starts can break apart.
    """
    pmap = system.map
    faces = sorted(range(pmap.num_faces), key=lambda f: (-pmap.face_size(f), f))
    points = system.to_points(tutte_layout(pmap, faces[restart % len(faces)]))
    if restart:
        points = points + rng.normal(scale=PLANAR_JITTER, size=points.shape)
    return points


def _minimize(system: _EdgeSystem, problem: EmbeddingProblem, points: np.ndarray,
              rng: np.random.Generator) -> Tuple[np.ndarray, float, int, SolveStatus]:
    points, value, iterations, status = _descend(
        system.value_and_grad, system.gauge(points), system.free, problem.tau, problem.max_iterations, rng
    )
    if problem.polish and value < POLISH_THRESHOLD:
        polished = system.gauge(_polish(system, points))
        polished_value = system.value(polished)
        if polished_value < value:
            points, value = polished, polished_value
    points = system.gauge(points)
    value = system.value(points)
    if value <= problem.tau:
        status = SolveStatus.CONVERGED
    elif status is SolveStatus.CONVERGED:
        status = SolveStatus.STALLED
    return points, value, iterations, status


def _drawn_map(pmap: PlanarMap, coords: Dict[int, Point]) -> Optional[PlanarMap]:
    """The map whose rotation the drawing shows, when that differs from pmap and is planar."""
    drawn = rotation_from_coords({v: pmap.neighbors(v) for v in pmap.vertices}, coords)
    try:
        realized = build_map(drawn)
    except MapError:
        return None
    return None if serialize_map(realized) == serialize_map(pmap) else realized


def _result(system: _EdgeSystem, problem: EmbeddingProblem, points: np.ndarray, value: float,
            iterations: int, status: SolveStatus, restart: int, penalty_rounds_used: int = 0) -> EmbeddingResult:
    coords = system.to_coords(points)
    realized = _drawn_map(problem.map, coords) if problem.free_rotation else None
    validation = validate_matchstick(GeometricMap(realized or problem.map, coords, problem.tolerance))
    return EmbeddingResult(
        coords=coords,
        residual=value,
        iterations=iterations,
        status=status,
        validation=validation,
        restart=restart,
        penalty_rounds_used=penalty_rounds_used,
        realized_map=realized,
    )


def _has_conflicts(validation: ValidationReport) -> bool:
    return any(
        check is not None and not check.passed
        for check in (validation.check("crossings"), validation.check("overlaps"),
                      validation.check("coincident-vertices"))
    )


def crossing_penalty_pass(result: EmbeddingResult, problem: EmbeddingProblem) -> EmbeddingResult:
    """
    Re-solve a converged but conflicting drawing with a repulsive penalty on crossing
    edges and coincident vertices, weight 10**round, then strip the penalty and
    re-validate. Results that did not converge, or have no conflicts, come back unchanged.
    """
    if result.status is not SolveStatus.CONVERGED or not _has_conflicts(result.validation):
        return result

    system = _EdgeSystem(problem.map)
    rng = np.random.default_rng(np.random.SeedSequence([problem.seed, result.restart, 1]))
    points = system.to_points(result.coords)
    iterations = result.iterations

    for penalty_round in range(1, problem.penalty_rounds + 1):
        weight = 10.0 ** penalty_round

        def penalized(p, weight=weight):
            value, grad = system.value_and_grad(p)
            return value + weight * system.conflict_penalty(p), grad + weight * system.conflict_penalty_grad(p)

        points, _, used, _ = _descend(penalized, points, system.free, problem.tau,
                                      problem.max_iterations, rng)
        iterations += used
        points, value, used, status = _minimize(system, problem, points, rng)
        iterations += used
        candidate = _result(system, problem, points, value, iterations, status,
                            result.restart, penalty_round)
        logger.debug(f"penalty round {penalty_round}: residual {value:.3e}, "
                     f"validation {'passed' if candidate.validation.passed else 'failed'}")
        if candidate.success:
            return candidate

    return replace(result, penalty_rounds_used=problem.penalty_rounds)


def _run_restart(system: _EdgeSystem, problem: EmbeddingProblem, restart: int,
                 seed_sequence: np.random.SeedSequence) -> EmbeddingResult:
    rng = np.random.default_rng(seed_sequence)
    if restart == 0 and problem.initial_coords is not None:
        start = system.to_points(problem.initial_coords)
    elif problem.start == "planar" and system.map.edges:
        start = _planar_start(system, restart, rng)
    else:
        start = _random_start(rng, system.n)
    points, value, iterations, status = _minimize(system, problem, start, rng)
    result = _result(system, problem, points, value, iterations, status, restart)
    if problem.penalty_rounds and result.status is SolveStatus.CONVERGED and not result.validation.passed:
        result = crossing_penalty_pass(result, problem)
    logger.debug(f"restart {restart}: {result.status.value}, residual {result.residual:.3e}, "
                 f"valid {result.validation.passed}")
    return result


def solve(problem: EmbeddingProblem) -> EmbeddingResult:
    """
    Best drawing over all restarts, ranked by (validation passed, residual,
    restart index). Restart i draws from the i-th child of SeedSequence(seed).
    With stop_on_success, serial runs end at the first restart that validates.
    """
    system = _EdgeSystem(problem.map)
    seeds = np.random.SeedSequence(problem.seed).spawn(problem.restarts)
    restarts = range(problem.restarts)
    if problem.workers > 1:
        with ThreadPoolExecutor(max_workers=problem.workers) as pool:
            results = list(pool.map(lambda i: _run_restart(system, problem, i, seeds[i]), restarts))
    else:
        results = []
        for i in restarts:
            results.append(_run_restart(system, problem, i, seeds[i]))
            if problem.stop_on_success and results[-1].success:
                break
    best = min(results, key=lambda r: (not r.validation.passed, r.residual, r.restart))
    logger.info(f"embedding: {best.verdict} after {len(results)} restarts "
                f"(best restart {best.restart}, residual {best.residual:.3e})")
    return best


def tutte_layout(pmap: PlanarMap, outer_face: Optional[int] = None) -> Dict[int, Point]:
    """
    Barycentric drawing: the outer face (by default the largest, lowest id on ties)
    is placed clockwise on a circle with unit chords, every other vertex at the
    mean of its neighbours.
    """
    if not pmap.vertices:
        return {}
    if not pmap.edges:
        return {v: (0.0, 0.0) for v in pmap.vertices}
    if outer_face is None:
        outer_face = max(range(pmap.num_faces), key=lambda f: (pmap.face_size(f), -f))
    boundary = list(dict.fromkeys(pmap.face_vertices(outer_face)))
    k = len(boundary)
    radius = 1.0 / (2.0 * math.sin(math.pi / k)) if k >= 3 else 0.5

    positions = np.zeros((pmap.num_vertices, 2))
    index = {v: i for i, v in enumerate(pmap.vertices)}
    for step, v in enumerate(boundary):
        angle = math.pi / 2 - 2 * math.pi * step / k
        positions[index[v]] = (radius * math.cos(angle), radius * math.sin(angle))

    fixed = set(boundary)
    interior = [v for v in pmap.vertices if v not in fixed]
    if interior:
        slot = {v: i for i, v in enumerate(interior)}
        laplacian = np.zeros((len(interior), len(interior)))
        rhs = np.zeros((len(interior), 2))
        for v in interior:
            row = slot[v]
            laplacian[row, row] = pmap.degree(v)
            for u in pmap.neighbors(v):
                if u in slot:
                    laplacian[row, slot[u]] -= 1.0
                else:
                    rhs[row] += positions[index[u]]
        solution = np.linalg.solve(laplacian, rhs)
        for v in interior:
            positions[index[v]] = solution[slot[v]]
    return {v: (float(positions[index[v], 0]) + 0.0, float(positions[index[v], 1]) + 0.0) for v in pmap.vertices}
