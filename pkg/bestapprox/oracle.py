""" Brute-force grid oracle

Enumerates the grid points of a box that fall inside A and inside B, and finds the closest
pairs with a k-d tree in the problem norm. Slow, but independent of the solvers:
everything the solvers and certificates claim on small instances can be checked against it.

    report = grid_min_distance(A, B, NormSpec(2), OracleConfig(([-3, -3], [3, 4]), 0.01))
    report.dist_estimate    # ≈ dist(A, B), within the grid resolution
    report.cluster_count    # number of separate groups of near-optimal pairs
    report.segment_fit      # (Segment, Segment) when the near-optimal pairs trace two segments

Only dimensions up to 3 are supported.
"""
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
from funcy import chunks
from scipy.spatial import cKDTree

from .exc import GridBudgetExceeded, PreconditionError
from .geometry import Vector, NormSpec, Segment, as_vector, norm_eval
from .log import class_logger
from .sets import SetExpr, BBox, MEMBER_TOL, contains, contains_points, boundary_mask, bounding_box

# Most grid points one oracle call may enumerate
GRID_BUDGET = 10 ** 8

# Highest supported dimension
MAX_DIM = 3

# Membership is evaluated on slabs of about this many points
SLAB_POINTS = 2 ** 20

# Pairs within dist_estimate + BAND_CELLS·resolution are near-optimal
BAND_CELLS = 2

# Near-optimal pairs whose a-points or b-points are closer than CLUSTER_CELLS·resolution share a cluster
CLUSTER_CELLS = 5

# A fitted segment pair must span at least this many grid cells
SEGMENT_MIN_CELLS = 10

# Strict inequalities: a point must clear every constraint by this much
OPEN_MARGIN = 1e-12

# Parameters at which segment fits are checked
SEGMENT_CHECK_TS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class OracleConfig:
    """ The grid: an axis-aligned box and a spacing """
    bbox: BBox
    resolution: float

    def __post_init__(self):
        lo = as_vector(self.bbox[0], what='oracle.bbox.lo')
        hi = as_vector(self.bbox[1], dim=lo.size, what='oracle.bbox.hi')
        if np.any(lo >= hi):
            raise PreconditionError('OracleConfig', 'bbox.lo must be below bbox.hi in every coordinate')
        if not self.resolution > 0:
            raise PreconditionError('OracleConfig', f'resolution must be positive, got {self.resolution}')
        object.__setattr__(self, 'bbox', (lo, hi))
        object.__setattr__(self, 'resolution', float(self.resolution))

    @property
    def dim(self) -> int:
        return self.bbox[0].size

    @property
    def axes(self) -> List[np.ndarray]:
        """ Grid nodes along every axis: lo + k·resolution, up to hi """
        lo, hi = self.bbox
        res = self.resolution
        return [l + res * np.arange(int(math.floor((h - l) / res + 1e-9)) + 1) for l, h in zip(lo, hi)]

    @property
    def grid_points(self) -> int:
        return math.prod(len(axis) for axis in self.axes)

    def with_resolution(self, resolution: float) -> 'OracleConfig':
        return OracleConfig(self.bbox, resolution)


@dataclass(frozen=True, eq=False)
class OracleReport:
    """ What the grid says about dist(A, B)

    Attributes:
        dist_estimate: Smallest distance between a grid point of A and a grid point of B
        resolution: Grid spacing
        optimal_pairs: Near-optimal pairs: every grid point of A within dist_estimate + 2·resolution
            of B, with its nearest grid point of B
        pair_distances: Distance of every optimal pair
        cluster_count: Connected groups of optimal pairs; two pairs connect through close a-points or close b-points
        segment_fit: Two segments, one in A and one in B, whose matched points are near-optimal pairs
        clipped: A set reaches outside the box: the estimate only covers the part inside
        members: Number of grid points in A and in B
    """
    dist_estimate: float
    resolution: float
    optimal_pairs: Tuple[Tuple[Vector, Vector], ...]
    pair_distances: Tuple[float, ...]
    cluster_count: int
    segment_fit: Optional[Tuple[Segment, Segment]] = None
    clipped: bool = False
    members: Tuple[int, int] = (0, 0)

    @property
    def points_a(self) -> np.ndarray:
        return np.array([a for a, _ in self.optimal_pairs])

    @property
    def points_b(self) -> np.ndarray:
        return np.array([b for _, b in self.optimal_pairs])

    def to_dict(self, max_pairs: int = 20) -> dict:
        return {
            'dist_estimate': self.dist_estimate,
            'resolution': self.resolution,
            'optimal_pair_count': len(self.optimal_pairs),
            'optimal_pairs': [[a.tolist(), b.tolist()] for a, b in self.optimal_pairs[:max_pairs]],
            'cluster_count': self.cluster_count,
            'segment_fit': None if self.segment_fit is None else [
                [seg.a0.tolist(), seg.a1.tolist()] for seg in self.segment_fit
            ],
            'bounds_a': [self.points_a.min(axis=0).tolist(), self.points_a.max(axis=0).tolist()],
            'bounds_b': [self.points_b.min(axis=0).tolist(), self.points_b.max(axis=0).tolist()],
            'clipped': self.clipped,
            'members': list(self.members),
        }


class BoundaryIdentityReport(NamedTuple):
    """ Grid distance over the whole sets vs over their boundaries """
    holds: bool
    disjoint: bool
    full: OracleReport
    boundary: OracleReport
    note: str = ''


class ClosureIdentityReport(NamedTuple):
    """ Grid distance of the closed sets vs of their interiors (strict inequalities) """
    holds: bool
    closed: OracleReport
    open: OracleReport


@class_logger
class GridOracle:
    """ Grid enumeration of two sets inside one box """

    def __init__(self, A: SetExpr, B: SetExpr, norm: NormSpec, config: OracleConfig):
        if A.dim != B.dim or A.dim != config.dim:
            raise PreconditionError('grid_min_distance',
                                    f'dimensions differ: A={A.dim} B={B.dim} bbox={config.dim}')
        if A.dim > MAX_DIM:
            raise PreconditionError('grid_min_distance', f'dimension {A.dim} > {MAX_DIM} is not supported')
        points = config.grid_points
        if points > GRID_BUDGET:
            suggested = config.resolution * (points / GRID_BUDGET) ** (1.0 / A.dim) * 1.01
            raise GridBudgetExceeded(points, GRID_BUDGET, suggested)
        self.A = A
        self.B = B
        self.norm = norm
        self.config = config

    def members(self, s: SetExpr, member_tol: float = MEMBER_TOL, boundary_tol: Optional[float] = None) -> np.ndarray:
        """ Grid points inside s, as rows; only those near the boundary when `boundary_tol` is given """
        axes = self.config.axes
        if len(axes) > 1:
            rest = np.stack(np.meshgrid(*axes[1:], indexing='ij'), axis=-1).reshape(-1, len(axes) - 1)
        else:
            rest = np.empty((1, 0))
        rows_per_slab = max(1, SLAB_POINTS // len(rest))

        found = [np.empty((0, len(axes)))]
        for head in chunks(rows_per_slab, axes[0]):
            head = np.asarray(head, dtype=float)
            X = np.hstack([np.repeat(head, len(rest))[:, None], np.tile(rest, (len(head), 1))])
            X = X[contains_points(s, X, member_tol)]
            if boundary_tol is not None and len(X):
                X = X[boundary_mask(s, X, boundary_tol)]
            found.append(X)
        return np.vstack(found)

    def _is_clipped(self, s: SetExpr) -> bool:
        box = bounding_box(s)
        lo, hi = self.config.bbox
        return box is None or bool(np.any(box[0] < lo - MEMBER_TOL) or np.any(box[1] > hi + MEMBER_TOL))

    def run(self, member_tol: float = MEMBER_TOL, boundary_tol: Optional[float] = None) -> OracleReport:
        res = self.config.resolution
        PA = self.members(self.A, member_tol, boundary_tol)
        PB = self.members(self.B, member_tol, boundary_tol)
        for name, P in (('A', PA), ('B', PB)):
            if not len(P):
                raise PreconditionError('grid_min_distance', f'no grid point of {name} inside the box; '
                                                             f'enlarge the box or refine the resolution')

        clipped = self._is_clipped(self.A) or self._is_clipped(self.B)
        if clipped:
            self.logger.warning('%s: a set reaches outside the box %s..%s; the estimate covers the clipped part',
                                type(self).__name__, self.config.bbox[0].tolist(), self.config.bbox[1].tolist())

        d, j = cKDTree(PB).query(PA, k=1, p=self.norm.order)
        estimate = float(d.min())
        near = np.flatnonzero(d <= estimate + BAND_CELLS * res + 1e-12)
        pairs_a, pairs_b, pair_d = PA[near], PB[j[near]], d[near]

        cluster_count = _count_clusters(pairs_a, pairs_b, CLUSTER_CELLS * res)
        fit = self._fit_segments(pairs_a, pairs_b, pair_d, estimate)

        if self._should_log_info():
            self.logger.info('%s: %d points in A, %d in B, estimate %.6g, %d near-optimal pairs in %d clusters',
                             type(self).__name__, len(PA), len(PB), estimate, len(near), cluster_count)
        return OracleReport(
            dist_estimate=estimate,
            resolution=res,
            optimal_pairs=tuple(zip(pairs_a, pairs_b)),
            pair_distances=tuple(float(x) for x in pair_d),
            cluster_count=cluster_count,
            segment_fit=fit,
            clipped=clipped,
            members=(len(PA), len(PB)),
        )

    def _fit_segments(self, pairs_a, pairs_b, pair_d, estimate) -> Optional[Tuple[Segment, Segment]]:
        """ Fit one segment to the a-points and one to the b-points of the tightest pairs """
        res = self.config.resolution
        tight = pair_d <= estimate + res / 10 + 1e-12
        side_a = _fit_line(pairs_a[tight], pair_d[tight], res)
        side_b = _fit_line(pairs_b[tight], pair_d[tight], res)
        if side_a is None or side_b is None:
            return None
        (seg_a, proj_a), (seg_b, proj_b) = side_a, side_b
        if max(seg_a.length, seg_b.length) < SEGMENT_MIN_CELLS * res:
            return None
        # Match the orientations: the matched points must move together
        if seg_a.length > 0 and seg_b.length > 0 and float(np.dot(proj_a, proj_b)) < 0:
            seg_b = Segment(seg_b.a1, seg_b.a0)
        fit = (seg_a, seg_b)
        if not segment_fit_holds(self.A, self.B, self.norm, fit, estimate + 3 * res):
            return None
        return fit


def _fit_line(P: np.ndarray, dist: np.ndarray, res: float) -> Optional[Tuple[Segment, np.ndarray]]:
    """ Least-squares line through the rows of P

    Returns the segment between the two extreme points and the centered projections,
    or None when a point lies farther than 2·res from the line.
    Among points at the same extreme the one of the tightest pair wins.
    """
    center = P.mean(axis=0)
    U = P - center
    spread = np.linalg.norm(U, axis=1)
    if spread.max() <= BAND_CELLS * res:
        medoid = P[int(np.argmin(spread))]
        return Segment(medoid, medoid), np.zeros(len(P))

    direction = np.linalg.svd(U, full_matrices=False)[2][0]
    proj = U @ direction
    residual = np.linalg.norm(U - proj[:, None] * direction, axis=1)
    if residual.max() > BAND_CELLS * res:
        return None

    def extreme(values):
        candidates = np.flatnonzero(values >= values.max() - res / 2)
        return P[candidates[int(np.argmin(dist[candidates]))]]

    return Segment(extreme(-proj), extreme(proj)), proj


def _count_clusters(pairs_a: np.ndarray, pairs_b: np.ndarray, radius: float) -> int:
    """ Connected components of the pairs, joined when their a-points or their b-points are closer than `radius` """
    n = len(pairs_a)
    if n <= 1:
        return n
    edges = np.vstack([cKDTree(P).query_pairs(radius, output_type='ndarray').reshape(-1, 2)
                       for P in (pairs_a, pairs_b)])
    graph = scipy.sparse.coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    count, _ = scipy.sparse.csgraph.connected_components(graph, directed=False)
    return int(count)



def segment_fit_holds(A: SetExpr, B: SetExpr, norm: NormSpec, fit: Tuple[Segment, Segment], bound: float,
                      ts=SEGMENT_CHECK_TS) -> bool:
    """ Are the matched points a(t), b(t) of the two segments members with ‖a(t) − b(t)‖ ≤ bound? """
    seg_a, seg_b = fit
    for a, b in zip(seg_a.points(ts), seg_b.points(ts)):
        if not (contains(A, a) and contains(B, b) and norm_eval(norm, a - b) <= bound + 1e-9):
            return False
    return True


def grid_min_distance(A: SetExpr, B: SetExpr, norm: NormSpec, config: OracleConfig,
                      member_tol: float = MEMBER_TOL) -> OracleReport:
    """ Grid estimate of dist(A, B) with the near-optimal pairs

    Raises:
        GridBudgetExceeded: more than GRID_BUDGET grid points; the error suggests a coarser resolution
        PreconditionError: dimension above 3, or a set with no grid point in the box
    """
    return GridOracle(A, B, norm, config).run(member_tol)


def verify_boundary_identity(A: SetExpr, B: SetExpr, norm: NormSpec, config: OracleConfig) -> BoundaryIdentityReport:
    """ dist(A, B) = dist(∂A, ∂B) for disjoint sets, on the grid

    The boundary is the grid points within 2·resolution of an active constraint.
    The identity holds when the two estimates differ by at most 3·resolution.
    """
    oracle = GridOracle(A, B, norm, config)
    res = config.resolution
    full = oracle.run()
    boundary = oracle.run(boundary_tol=BAND_CELLS * res)
    if full.dist_estimate <= 0:
        return BoundaryIdentityReport(False, False, full, boundary, 'the sets intersect: the identity needs disjoint sets')
    holds = abs(boundary.dist_estimate - full.dist_estimate) <= 3 * res + 1e-9
    return BoundaryIdentityReport(holds, True, full, boundary)


def check_closure_identity(A: SetExpr, B: SetExpr, norm: NormSpec, config: OracleConfig) -> ClosureIdentityReport:
    """ Distance between the interiors equals the distance between the closed sets, on the grid

    Interiors are enumerated with strict inequalities. Both estimates must agree within 2·resolution.
    Only meaningful for sets with nonempty interior.
    """
    oracle = GridOracle(A, B, norm, config)
    closed = oracle.run()
    interior = oracle.run(member_tol=-OPEN_MARGIN)
    holds = abs(interior.dist_estimate - closed.dist_estimate) <= BAND_CELLS * config.resolution + 1e-9
    return ClosureIdentityReport(holds, closed, interior)
