""" Solvers for the best approximation pair problem

    minimize ‖a − b‖ over a ∈ A, b ∈ B

* alternating_projections():        Euclidean norm, b_k = P_B(a_k), a_{k+1} = P_A(b_k)
* general_norm_descent():           any ℓp norm, projected subgradient on (a, b)
* simultaneous_projection_solve():  Euclidean norm, A and B given as intersections of parts
* multistart_bap():                 many seeded runs, clustered, to expose non-uniqueness

Every solver returns a BapResult. Not converging is not an error: check `converged` and `diverging`.
"""
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.cluster.hierarchy
from funcy import pairwise

from .exc import DimensionMismatchError, NotEuclideanError, PreconditionError
from .geometry import Vector, NormSpec, as_vector, check_dimension, norm_eval
from .log import class_logger
from .projections import ProjectionParams, euclid_project, dykstra_project
from .sets import SetExpr, BBox, contains, is_boundary_point, bounding_box, union_box

EUCLIDEAN = NormSpec(2.0)

# Slack of the per-iteration monotonicity check of alternating projections
MONOTONE_SLACK = 1e-12

# A run that stops short is a runaway when ‖a_k‖ outgrows the distance decrease by this factor
RUNAWAY_RATIO = 1000.0
# and when it ran at least this many iterations
RUNAWAY_MIN_ITER = 100

# Start region for multistart when the sets do not bound one
DEFAULT_START_BOX = (-10.0, 10.0)


class StepKind(enum.Enum):
    CONSTANT = 'constant'
    DIMINISHING = 'diminishing'


@dataclass(frozen=True)
class StepSchedule:
    """ Step sizes of the subgradient method: c, or c/√k

    When `scale` is None, c is the distance between the two starting points.
    """
    kind: StepKind = StepKind.DIMINISHING
    scale: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', StepKind(self.kind))
        if self.scale is not None and not self.scale > 0:
            raise PreconditionError('StepSchedule', f'scale must be positive, got {self.scale}')

    def step(self, k: int, default_scale: float) -> float:
        c = self.scale if self.scale is not None else default_scale
        if self.kind is StepKind.CONSTANT:
            return c
        return c / math.sqrt(k)


@dataclass(frozen=True)
class SolverParams:
    """ Solver configuration

    Attributes:
        tol: Stopping tolerance on the last-step displacement (and on value stagnation)
        max_iter: Iteration budget
        step_schedule: Step sizes for general_norm_descent()
        blowup_radius: An iterate farther than this from the origin marks the run as diverging
        seed: Seed of every random choice; multistart derives one stream per start from it
        inner_max_iter: Budget of the inner anchored iteration of simultaneous_projection_solve()
        window: Stagnation window of general_norm_descent()
    """
    tol: float = 1e-10
    max_iter: int = 10_000
    step_schedule: StepSchedule = StepSchedule()
    blowup_radius: float = 1e6
    seed: int = 0
    inner_max_iter: int = 500
    window: int = 100

    def __post_init__(self):
        if not self.tol > 0:
            raise PreconditionError('SolverParams', f'tol must be positive, got {self.tol}')
        if self.max_iter < 1:
            raise PreconditionError('SolverParams', f'max_iter must be ≥ 1, got {self.max_iter}')
        if not self.blowup_radius > 0:
            raise PreconditionError('SolverParams', f'blowup_radius must be positive, got {self.blowup_radius}')

    @property
    def projection_params(self) -> ProjectionParams:
        return ProjectionParams(tol=min(self.tol, 1e-10))


@dataclass(frozen=True, eq=False)
class BapResult:
    """ The outcome of a solver run

    Attributes:
        a, b: The candidate pair, a ∈ A, b ∈ B
        distance: ‖a − b‖ in the problem norm
        iterations: Iterations performed
        residual: Displacement of the last step
        converged: The stopping test was met
        diverging: The iterates left the blow-up radius: the infimum is suspected not to be attained
        trace: Distance after every iteration
        monotone: Every step kept the distance nonincreasing (alternating projections only)
        peak_norms: Largest ‖a_k‖ and ‖b_k‖ seen
        solver: Name of the solver
        escape: Direction of the last half of a diverging or runaway run, normalized; None otherwise
        runaway: The budget ran out while ‖a_k‖ kept growing and the distance barely moved
            (alternating projections only)
    """
    a: Vector
    b: Vector
    distance: float
    iterations: int
    residual: float
    converged: bool
    diverging: bool = False
    trace: Tuple[float, ...] = ()
    monotone: bool = True
    peak_norms: Tuple[float, float] = (0.0, 0.0)
    solver: str = ''
    escape: Optional[Vector] = None
    runaway: bool = False

    @property
    def difference(self) -> Vector:
        return self.a - self.b

    @property
    def pair(self) -> Vector:
        """ (a, b) as one vector of the product space """
        return np.concatenate([self.a, self.b])


def _check_pair(A: SetExpr, B: SetExpr):
    if A.dim != B.dim:
        raise DimensionMismatchError(A.dim, B.dim, 'set B')


class _Solver:
    """ Shared bookkeeping of the iterative solvers """
    name = None

    def __init__(self, A: SetExpr, B: SetExpr, params: SolverParams):
        _check_pair(A, B)
        self.A = A
        self.B = B
        self.params = params
        self.projection_params = params.projection_params

    def _project(self, s: SetExpr, x: Vector) -> Vector:
        return euclid_project(s, x, self.projection_params).point

    def _report(self, result: BapResult) -> BapResult:
        if result.diverging:
            self.logger.warning('%s: iterates left the blow-up radius %g after %d iterations, distance %.12g: '
                                'suspected unattained infimum',
                                self.name, self.params.blowup_radius, result.iterations, result.distance)
        elif result.runaway:
            self.logger.warning('%s: no convergence after %d iterations; the iterates drift outward at '
                                'distance %.12g: suspected unattained infimum',
                                self.name, result.iterations, result.distance)
        elif not result.converged:
            self.logger.warning('%s: no convergence after %d iterations (residual %.3g)',
                                self.name, result.iterations, result.residual)
        elif self._should_log_info():
            self.logger.info('%s: converged in %d iterations, distance %.12g',
                             self.name, result.iterations, result.distance)
        return result


@class_logger
class AlternatingProjections(_Solver):
    """ b_k = P_B(a_k), a_{k+1} = P_A(b_k), started from a_0 = P_A(x0) """
    name = 'alternating_projections'

    def run(self, x0: Vector) -> BapResult:
        p = self.params
        x0 = np.asarray(x0, dtype=float)
        check_dimension(x0, self.A.dim, 'x0')

        a = self._project(self.A, x0)
        b = self._project(self.B, a)
        distance = float(np.linalg.norm(a - b))
        trace = [distance]
        peak_a, peak_b = float(np.linalg.norm(a)), float(np.linalg.norm(b))
        monotone = True
        residual = math.inf
        converged = diverging = False
        history = [a]

        k = 0
        for k in range(1, p.max_iter + 1):
            a_next = self._project(self.A, b)
            b_next = self._project(self.B, a_next)
            residual = float(np.linalg.norm(a_next - a) + np.linalg.norm(b_next - b))
            a, b = a_next, b_next
            history.append(a)

            new_distance = float(np.linalg.norm(a - b))
            if new_distance > distance + MONOTONE_SLACK * max(1.0, distance) and monotone:
                monotone = False
                self.logger.warning('%s: distance increased at iteration %d: %.17g -> %.17g',
                                    self.name, k, distance, new_distance)
            distance = new_distance
            trace.append(distance)

            norm_a, norm_b = float(np.linalg.norm(a)), float(np.linalg.norm(b))
            peak_a, peak_b = max(peak_a, norm_a), max(peak_b, norm_b)
            if max(norm_a, norm_b) > p.blowup_radius:
                diverging = True
                break
            if residual < p.tol:
                converged = True
                break

        runaway = not (converged or diverging) and _is_runaway(history, trace, p.tol)
        escape = _escape_direction(history) if diverging or runaway else None
        return self._report(BapResult(a, b, distance, k, residual, converged, diverging,
                                      tuple(trace), monotone, (peak_a, peak_b), self.name, escape, runaway))


def _is_runaway(history: List[Vector], trace: List[float], tol: float) -> bool:
    """ Over the last half of the run, ‖a_k‖ grew by RUNAWAY_RATIO times more than the distance fell """
    if len(history) <= RUNAWAY_MIN_ITER:
        return False
    mid = len(history) // 2
    growth = float(np.linalg.norm(history[-1]) - np.linalg.norm(history[mid]))
    decrease = trace[mid] - trace[-1]
    return growth > RUNAWAY_RATIO * max(decrease, tol)


def _escape_direction(history: List[Vector]) -> Optional[Vector]:
    """ From the iterate halfway through the run to the last one """
    step = history[-1] - history[len(history) // 2]
    length = float(np.linalg.norm(step))
    return step / length if length > 0 else None


def _subgradient(norm: NormSpec, v: Vector) -> Vector:
    """ A subgradient of ‖·‖_p at v ≠ 0

    For p=∞ the smallest index among the maximizing coordinates is chosen.
    """
    if norm.is_inf:
        i = int(np.argmax(np.abs(v)))
        g = np.zeros_like(v)
        g[i] = np.sign(v[i])
        return g
    if norm.p == 1.0:
        return np.sign(v)
    u = v / np.max(np.abs(v))
    powered = np.abs(u) ** (norm.p - 1.0)
    return np.sign(u) * powered / norm_eval(norm, u) ** (norm.p - 1.0)


@class_logger
class NormDescent(_Solver):
    """ Projected subgradient on (a, b) ∈ A × B for f(a, b) = ‖a − b‖_p

    Each step moves a against the subgradient and b along it, then projects both back.
    The best pair seen so far is returned.
    """
    name = 'general_norm_descent'

    def __init__(self, A: SetExpr, B: SetExpr, norm: NormSpec, params: SolverParams):
        super().__init__(A, B, params)
        self.norm = norm

    def run(self, x0: Vector, y0: Vector) -> BapResult:
        p = self.params
        a = self._project(self.A, np.asarray(x0, dtype=float))
        b = self._project(self.B, np.asarray(y0, dtype=float))
        value = norm_eval(self.norm, a - b)
        best = (value, a, b)
        best_history = [value]
        trace = [value]
        peak_a, peak_b = float(np.linalg.norm(a)), float(np.linalg.norm(b))
        scale = value if value > 0 else 1.0
        residual = math.inf
        converged = diverging = False

        k = 0
        for k in range(1, p.max_iter + 1):
            v = a - b
            if not np.any(v):
                converged = True
                residual = 0.0
                break
            alpha = p.step_schedule.step(k, scale)
            g = _subgradient(self.norm, v)
            a_next = self._project(self.A, a - alpha * g)
            b_next = self._project(self.B, b + alpha * g)
            residual = float(np.linalg.norm(a_next - a) + np.linalg.norm(b_next - b))
            a, b = a_next, b_next

            value = norm_eval(self.norm, a - b)
            trace.append(value)
            if value < best[0]:
                best = (value, a, b)
            best_history.append(best[0])

            norm_a, norm_b = float(np.linalg.norm(a)), float(np.linalg.norm(b))
            peak_a, peak_b = max(peak_a, norm_a), max(peak_b, norm_b)
            if max(norm_a, norm_b) > p.blowup_radius:
                diverging = True
                break
            if k >= p.window and best_history[k - p.window] - best[0] < p.tol:
                converged = True
                break

        value, a, b = best
        return self._report(BapResult(a, b, value, k, residual, converged, diverging,
                                      tuple(trace), True, (peak_a, peak_b), self.name))


@class_logger
class SimultaneousProjections(_Solver):
    """ Alternating projections between two intersections, A = ∩A_parts and B = ∩B_parts

    Each half-step approximates the projection of u onto an intersection with an anchored
    iteration on the averaged projection T(z) = mean_i P_i(z):

        z_{j+1} = u/(j+1) + (1 − 1/(j+1))·T(z_j),   j = 1, 2, ...

    which is pulled towards the anchor u and converges to the projection of u onto ∩parts.
    A single part is projected onto directly. The final pair is made exactly feasible
    with dykstra_project().
    """
    name = 'simultaneous_projection_solve'

    def __init__(self, A_parts: Sequence[SetExpr], B_parts: Sequence[SetExpr], params: SolverParams):
        self.A_parts = list(A_parts)
        self.B_parts = list(B_parts)
        if not self.A_parts or not self.B_parts:
            raise PreconditionError(self.name, 'both part lists must be nonempty')
        for s in self.A_parts[1:] + self.B_parts:
            _check_pair(self.A_parts[0], s)
        self.params = params
        self.projection_params = params.projection_params

    def _anchored_projection(self, parts: List[SetExpr], u: Vector) -> Vector:
        if len(parts) == 1:
            return self._project(parts[0], u)
        if all(contains(s, u) for s in parts):
            return u
        z = u
        for j in range(1, self.params.inner_max_iter + 1):
            weight = 1.0 / (j + 1)
            averaged = np.mean([self._project(s, z) for s in parts], axis=0)
            z_next = weight * u + (1.0 - weight) * averaged
            if np.linalg.norm(z_next - z) < self.params.tol:
                return z_next
            z = z_next
        return z

    def run(self, anchor: Vector) -> BapResult:
        p = self.params
        anchor = np.asarray(anchor, dtype=float)
        check_dimension(anchor, self.A_parts[0].dim, 'anchor')

        a = self._anchored_projection(self.A_parts, anchor)
        b = self._anchored_projection(self.B_parts, a)
        trace = [float(np.linalg.norm(a - b))]
        peak_a, peak_b = float(np.linalg.norm(a)), float(np.linalg.norm(b))
        residual = math.inf
        converged = diverging = False

        k = 0
        for k in range(1, p.max_iter + 1):
            a_next = self._anchored_projection(self.A_parts, b)
            b_next = self._anchored_projection(self.B_parts, a_next)
            residual = float(np.linalg.norm(a_next - a) + np.linalg.norm(b_next - b))
            a, b = a_next, b_next
            trace.append(float(np.linalg.norm(a - b)))

            norm_a, norm_b = float(np.linalg.norm(a)), float(np.linalg.norm(b))
            peak_a, peak_b = max(peak_a, norm_a), max(peak_b, norm_b)
            if max(norm_a, norm_b) > p.blowup_radius:
                diverging = True
                break
            if residual < p.tol:
                converged = True
                break

        # Exact feasibility
        a = dykstra_project(self.A_parts, a, self.projection_params).point
        b = dykstra_project(self.B_parts, b, self.projection_params).point
        distance = float(np.linalg.norm(a - b))
        return self._report(BapResult(a, b, distance, k, residual, converged, diverging,
                                      tuple(trace), True, (peak_a, peak_b), self.name))


def alternating_projections(A: SetExpr, B: SetExpr, x0: Vector, params: SolverParams = SolverParams(),
                            norm: NormSpec = EUCLIDEAN) -> BapResult:
    """ Alternating projections from x0

    Args:
        A, B: The sets
        x0: Starting point; the first iterate is its projection onto A
        params: Stopping controls
        norm: The problem norm. Must be Euclidean: it is accepted only to reject other norms early
    Raises:
        NotEuclideanError: the problem norm is not ℓ2
        DimensionMismatchError
    """
    if not norm.is_euclidean:
        raise NotEuclideanError('alternating_projections', norm)
    return AlternatingProjections(A, B, params).run(x0)


def general_norm_descent(A: SetExpr, B: SetExpr, norm: NormSpec, x0: Vector, y0: Vector,
                         params: SolverParams = SolverParams()) -> BapResult:
    """ Projected subgradient descent of ‖a − b‖_p over A × B, from (P_A(x0), P_B(y0)) """
    return NormDescent(A, B, norm, params).run(x0, y0)


def simultaneous_projection_solve(A_parts: Sequence[SetExpr], B_parts: Sequence[SetExpr], anchor: Vector,
                                  params: SolverParams = SolverParams()) -> BapResult:
    """ Best approximation pair of ∩A_parts and ∩B_parts (Euclidean norm) """
    return SimultaneousProjections(A_parts, B_parts, params).run(anchor)


# region Multistart

@dataclass(frozen=True, eq=False)
class MultiplicitySummary:
    """ What many runs say about the number of best approximation pairs

    Attributes:
        cluster_count: Number of distinct pairs found among the runs that did not diverge
        labels: Cluster label of every run, in seed order; -1 for runs left out
        representatives: The first run of each cluster
        best_distance: Smallest distance found
        differences_agree: All clusters share the same a − b
        witness: Two distance-equal pairs from different clusters, when there are any
    """
    cluster_count: int
    labels: Tuple[int, ...]
    representatives: Tuple[BapResult, ...]
    best_distance: float
    differences_agree: bool
    witness: Optional[Tuple[BapResult, BapResult]] = None
    radius: float = 0.0


def cluster_results(results: Sequence[BapResult], radius: float) -> List[int]:
    """ Single-linkage clusters of the pairs (a, b), in the product metric

    Labels are numbered in order of first appearance.
    """
    if len(results) == 1:
        return [0]
    points = np.array([r.pair for r in results])
    Z = scipy.cluster.hierarchy.linkage(points, method='single')
    raw = scipy.cluster.hierarchy.fcluster(Z, t=radius, criterion='distance')
    renumber = {}
    return [renumber.setdefault(label, len(renumber)) for label in raw]


def difference_signature(results: Sequence[BapResult], tol: float) -> bool:
    """ Do all the pairs share one difference vector a − b? """
    return all(np.linalg.norm(r1.difference - r2.difference) <= tol for r1, r2 in pairwise(results))


def summarize(results: Sequence[BapResult], radius: float) -> MultiplicitySummary:
    """ Cluster results and look for a non-uniqueness witness """
    usable = [i for i, r in enumerate(results) if not r.diverging]
    labels = [-1] * len(results)
    if not usable:
        return MultiplicitySummary(0, tuple(labels), (), math.inf, False, None, radius)

    for i, label in zip(usable, cluster_results([results[i] for i in usable], radius)):
        labels[i] = label
    count = max(labels) + 1
    representatives = tuple(results[labels.index(c)] for c in range(count))
    best = min(r.distance for r in representatives)

    # Optimal clusters: those achieving the best value
    optimal = [r for r in representatives if r.distance - best <= radius]
    witness = (optimal[0], optimal[1]) if len(optimal) >= 2 else None
    return MultiplicitySummary(count, tuple(labels), representatives, best,
                               difference_signature(optimal, radius), witness, radius)


def multistart_bap(A: SetExpr, B: SetExpr, norm: NormSpec, n_starts: int, params: SolverParams = SolverParams(),
                   box: Optional[BBox] = None, workers: int = 1,
                   cluster_radius: Optional[float] = None) -> Tuple[List[BapResult], MultiplicitySummary]:
    """ Run a solver from `n_starts` seeded starting points and cluster the pairs found

    Starts are drawn uniformly from `box` (default: the bounding box of A ∪ B, or [−10, 10]^n).
    Start i uses the random stream seeded with (params.seed, i).
    The Euclidean norm runs alternating_projections(); other norms run general_norm_descent()
    with a common y0, the projection onto B of the center of the box.

    Args:
        workers: Run this many starts concurrently; results are kept in seed order
        cluster_radius: Pairs closer than this are the same pair. Default: max(10·tol, 1e−6)
    Raises:
        PreconditionError: n_starts < 2
    """
    if n_starts < 2:
        raise PreconditionError('multistart_bap', f'n_starts must be ≥ 2, got {n_starts}')
    _check_pair(A, B)
    if box is None:
        box = union_box(bounding_box(A), bounding_box(B))
    if box is None:
        box = (np.full(A.dim, DEFAULT_START_BOX[0]), np.full(A.dim, DEFAULT_START_BOX[1]))
    lo, hi = (as_vector(v, dim=A.dim, what='start box') for v in box)
    radius = cluster_radius if cluster_radius is not None else max(10 * params.tol, 1e-6)
    y0 = euclid_project(B, (lo + hi) / 2.0).point

    def run_one(i: int) -> BapResult:
        rng = np.random.default_rng([params.seed, i])
        x0 = rng.uniform(lo, hi)
        if norm.is_euclidean:
            return AlternatingProjections(A, B, params).run(x0)
        return NormDescent(A, B, norm, params).run(x0, y0)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_one, range(n_starts)))
    else:
        results = [run_one(i) for i in range(n_starts)]
    return results, summarize(results, radius)

# endregion

# region Checks on solver output


def check_boundary_postcondition(A: SetExpr, B: SetExpr, result: BapResult, tol: float = 1e-6) -> bool:
    """ A best approximation pair of disjoint sets lies on both boundaries """
    return (contains(A, result.a, tol) and contains(B, result.b, tol) and
            is_boundary_point(A, result.a, tol) and is_boundary_point(B, result.b, tol))


def check_segment_of_baps(A: SetExpr, B: SetExpr, norm: NormSpec, r0: BapResult, r1: BapResult,
                          ts: Sequence[float] = (0.1, 0.3, 0.5, 0.7, 0.9), tol: float = 1e-6) -> bool:
    """ Convex combinations of two best approximation pairs are best approximation pairs

    Raises:
        PreconditionError: the two pairs do not share the optimal value
    """
    if abs(r0.distance - r1.distance) > tol:
        raise PreconditionError('check_segment_of_baps', f'distances differ: {r0.distance} vs {r1.distance}')
    optimum = min(r0.distance, r1.distance)
    for t in ts:
        a = (1 - t) * r0.a + t * r1.a
        b = (1 - t) * r0.b + t * r1.b
        if not (contains(A, a, tol) and contains(B, b, tol)):
            return False
        if abs(norm_eval(norm, a - b) - optimum) > tol:
            return False
    return True


def is_fixed_point(A: SetExpr, B: SetExpr, result: BapResult, tol: float) -> bool:
    """ Is a a fixed point of P_A∘P_B? Such a point realizes the Euclidean distance between A and B """
    a_again = euclid_project(A, euclid_project(B, result.a).point).point
    return float(np.linalg.norm(a_again - result.a)) <= tol


