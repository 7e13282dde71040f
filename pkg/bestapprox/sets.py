""" Closed convex sets as structured expressions

Every variant is an immutable dataclass, validated at construction. Membership and boundary
tests are vectorized: `contains_points()` and `boundary_mask()` take a matrix whose rows are
points, and `contains()` / `is_boundary_point()` are the single-point conveniences.

Example:

    A = Box([-2, -2], [2, 0])
    B = Ellipsoid([0, 2], [2, 1])

    contains(A, [0, 0])             # True
    is_boundary_point(B, [0, 1])    # True
"""
from dataclasses import dataclass
from functools import cached_property, singledispatch
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.optimize

from .exc import InvalidSetError, DimensionMismatchError, PreconditionError
from .functions import ConvexFunction
from .geometry import (Vector, NormSpec, Segment, Structural,
                       as_vector, check_dimension, norm_eval_rows, basis_matrix, orthonormal_basis, rank)

# Additive slack for membership tests
MEMBER_TOL = 1e-9

# Slack for "a defining inequality is active"
BOUNDARY_TOL = 1e-7

# An axis-aligned bounding box: (lo, hi)
BBox = Tuple[Vector, Vector]


class SetExpr(Structural):
    """ A nonempty closed convex subset of R^n """

    # Name used in problem files
    tag: str = None

    @property
    def dim(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Halfspace(SetExpr):
    """ {x: ⟨normal, x⟩ ≤ offset} """
    normal: Vector
    offset: float
    tag = 'halfspace'

    def __post_init__(self):
        normal = as_vector(self.normal, what='Halfspace.normal')
        if not np.any(normal):
            raise InvalidSetError('Halfspace', 'normal', 'must be nonzero')
        object.__setattr__(self, 'normal', normal)
        object.__setattr__(self, 'offset', float(self.offset))

    @property
    def dim(self):
        return self.normal.size

    @cached_property
    def normal_norm(self) -> float:
        return float(np.linalg.norm(self.normal))


@dataclass(frozen=True, eq=False)
class Box(SetExpr):
    """ {x: lo ≤ x ≤ hi} """
    lo: Vector
    hi: Vector
    tag = 'box'

    def __post_init__(self):
        lo = as_vector(self.lo, what='Box.lo')
        hi = as_vector(self.hi, dim=lo.size, what='Box.hi')
        if np.any(lo > hi):
            raise InvalidSetError('Box', 'hi', 'must be ≥ lo in every coordinate')
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @property
    def dim(self):
        return self.lo.size

    def as_polytope(self) -> 'PolytopeH':
        eye = np.eye(self.dim)
        return PolytopeH(tuple(Halfspace(e, h) for e, h in zip(eye, self.hi)) +
                         tuple(Halfspace(-e, -l) for e, l in zip(eye, self.lo)))


@dataclass(frozen=True, eq=False)
class NormBall(SetExpr):
    """ {x: ‖x − center‖_p ≤ radius} """
    center: Vector
    radius: float
    norm: NormSpec = NormSpec(2.0)
    tag = 'norm_ball'

    def __post_init__(self):
        object.__setattr__(self, 'center', as_vector(self.center, what='NormBall.center'))
        if not self.radius > 0:
            raise InvalidSetError('NormBall', 'radius', f'must be positive, got {self.radius}')
        object.__setattr__(self, 'radius', float(self.radius))

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True, eq=False)
class Ellipsoid(SetExpr):
    """ Axis-aligned {x: Σ((x_i − c_i)/σ_i)² ≤ 1} """
    center: Vector
    semiaxes: Vector
    tag = 'ellipsoid'

    def __post_init__(self):
        center = as_vector(self.center, what='Ellipsoid.center')
        semiaxes = as_vector(self.semiaxes, dim=center.size, what='Ellipsoid.semiaxes')
        if not np.all(semiaxes > 0):
            raise InvalidSetError('Ellipsoid', 'semiaxes', 'must be positive')
        object.__setattr__(self, 'center', center)
        object.__setattr__(self, 'semiaxes', semiaxes)

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True, eq=False)
class PolytopeH(SetExpr):
    """ An intersection of finitely many halfspaces """
    halfspaces: Tuple[Halfspace, ...]
    tag = 'polytope'

    def __post_init__(self):
        halfspaces = tuple(self.halfspaces)
        if not halfspaces:
            raise InvalidSetError('PolytopeH', 'halfspaces', 'must not be empty')
        for h in halfspaces:
            if not isinstance(h, Halfspace):
                raise InvalidSetError('PolytopeH', 'halfspaces', f'expected Halfspace, got {type(h).__name__}')
            if h.dim != halfspaces[0].dim:
                raise DimensionMismatchError(halfspaces[0].dim, h.dim, 'PolytopeH halfspace')
        object.__setattr__(self, 'halfspaces', halfspaces)

    @classmethod
    def from_inequalities(cls, A: Sequence[Sequence[float]], b: Sequence[float]) -> 'PolytopeH':
        """ {x: Ax ≤ b} """
        return cls(tuple(Halfspace(row, rhs) for row, rhs in zip(A, b)))

    @property
    def dim(self):
        return self.halfspaces[0].dim

    @cached_property
    def A(self) -> np.ndarray:
        return np.array([h.normal for h in self.halfspaces])

    @cached_property
    def b(self) -> np.ndarray:
        return np.array([h.offset for h in self.halfspaces])

    @cached_property
    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.A, axis=1)


@dataclass(frozen=True, eq=False)
class AffineSubspace(SetExpr):
    """ point + span(basis). An empty basis makes a singleton """
    point: Vector
    basis: Tuple[Vector, ...] = ()
    tag = 'affine'

    def __post_init__(self):
        point = as_vector(self.point, what='AffineSubspace.point')
        basis = tuple(as_vector(v, dim=point.size, what='AffineSubspace.basis') for v in self.basis)
        if len(basis) > point.size or rank(basis_matrix(basis, point.size)) != len(basis):
            raise InvalidSetError('AffineSubspace', 'basis', 'vectors must be linearly independent')
        object.__setattr__(self, 'point', point)
        object.__setattr__(self, 'basis', basis)

    @property
    def dim(self):
        return self.point.size

    @property
    def subspace_dim(self) -> int:
        return len(self.basis)

    @cached_property
    def orthonormal(self) -> np.ndarray:
        """ Orthonormal basis of the linear part, as columns """
        return orthonormal_basis(basis_matrix(self.basis, self.dim))


@dataclass(frozen=True, eq=False)
class SegmentSet(SetExpr):
    """ The segment [a0, a1] as a set """
    seg: Segment
    tag = 'segment'

    @property
    def dim(self):
        return self.seg.dim


@dataclass(frozen=True, eq=False)
class Intersection(SetExpr):
    """ ∩ parts """
    parts: Tuple[SetExpr, ...]
    tag = 'intersection'

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise InvalidSetError('Intersection', 'parts', 'must not be empty')
        for p in parts:
            if p.dim != parts[0].dim:
                raise DimensionMismatchError(parts[0].dim, p.dim, 'Intersection part')
        object.__setattr__(self, 'parts', parts)

    @property
    def dim(self):
        return self.parts[0].dim


@dataclass(frozen=True, eq=False)
class Cylinder(SetExpr):
    """ A cross-section swept along a line: {y + t·u: y ∈ C ∩ H, t ∈ extent}

    H is the hyperplane through `axis_point` orthogonal to the unit vector u = `axis_dir`.
    The cross-section C is a Euclidean NormBall or an Ellipsoid centered at `axis_point`;
    an Ellipsoid cross-section needs a coordinate axis as `axis_dir`, and its semiaxis
    along that axis is ignored.

    `extent` is None for a full line (a hypercylinder), or (t_lo, t_hi).
    Zero-length extents give flat sets, like an ellipse floating in R³.
    """
    crosssection: SetExpr
    axis_point: Vector
    axis_dir: Vector
    extent: Optional[Tuple[float, float]] = None
    tag = 'cylinder'

    def __post_init__(self):
        cs = self.crosssection
        point = as_vector(self.axis_point, what='Cylinder.axis_point')
        axis = as_vector(self.axis_dir, dim=point.size, what='Cylinder.axis_dir')
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise InvalidSetError('Cylinder', 'axis_dir', 'must have unit Euclidean norm')
        if isinstance(cs, NormBall):
            if not cs.norm.is_euclidean:
                raise InvalidSetError('Cylinder', 'crosssection', 'a ball cross-section must be Euclidean')
        elif isinstance(cs, Ellipsoid):
            if np.sum(np.abs(axis) > 1e-12) != 1:
                raise InvalidSetError('Cylinder', 'axis_dir', 'must be a coordinate axis for an Ellipsoid cross-section')
        else:
            raise InvalidSetError('Cylinder', 'crosssection', 'must be a NormBall or an Ellipsoid')
        check_dimension(cs.center, point.size, 'Cylinder.crosssection')
        if not np.allclose(cs.center, point, atol=1e-12):
            raise InvalidSetError('Cylinder', 'crosssection', 'must be centered at axis_point')

        extent = self.extent
        if extent is not None:
            extent = (float(extent[0]), float(extent[1]))
            if not np.all(np.isfinite(extent)) or extent[0] > extent[1]:
                raise InvalidSetError('Cylinder', 'extent', 'must be a finite interval [t_lo, t_hi]')
        object.__setattr__(self, 'axis_point', point)
        object.__setattr__(self, 'axis_dir', axis)
        object.__setattr__(self, 'extent', extent)

    @property
    def dim(self):
        return self.axis_point.size

    @property
    def is_full_line(self) -> bool:
        return self.extent is None

    def split(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """ Rows of X as (axis coordinates t, in-hyperplane parts y) """
        t = (X - self.axis_point) @ self.axis_dir
        return t, X - t[:, None] * self.axis_dir


@dataclass(frozen=True, eq=False)
class VoronoiCell(SetExpr):
    """ {x: min_p ‖x − p‖₂ ≤ dist(x, competitor)} for a finite site list """
    sites: Tuple[Vector, ...]
    competitor: SetExpr
    tag = 'voronoi'

    def __post_init__(self):
        sites = tuple(as_vector(p, dim=self.competitor.dim, what='VoronoiCell.sites') for p in self.sites)
        if not sites:
            raise InvalidSetError('VoronoiCell', 'sites', 'must not be empty')
        object.__setattr__(self, 'sites', sites)

    @property
    def dim(self):
        return self.competitor.dim

    @cached_property
    def site_matrix(self) -> np.ndarray:
        return np.array(self.sites)


@dataclass(frozen=True, eq=False)
class SublevelSet(SetExpr):
    """ {x: f(x) ≤ level} for f from the function catalog """
    function: ConvexFunction
    level: float = 0.0
    tag = 'sublevel'

    def __post_init__(self):
        if not isinstance(self.function, ConvexFunction):
            raise InvalidSetError('SublevelSet', 'function', 'must come from the function catalog')
        object.__setattr__(self, 'level', float(self.level))

    @property
    def dim(self):
        return self.function.dim


# region Membership

def contains(s: SetExpr, x: Vector, tol: float = MEMBER_TOL) -> bool:
    """ Does x satisfy the constraints of s, up to an additive slack `tol`?

    Raises:
        DimensionMismatchError
    """
    x = np.asarray(x, dtype=float)
    check_dimension(x, s.dim)
    return bool(contains_points(s, x[None, :], tol)[0])


@singledispatch
def contains_points(s: SetExpr, X: np.ndarray, tol: float = MEMBER_TOL) -> np.ndarray:
    """ Row-wise membership: a boolean array with one entry per row of X """
    raise NotImplementedError(type(s).__name__)


@contains_points.register
def _(s: Halfspace, X, tol=MEMBER_TOL):
    return (X @ s.normal - s.offset) / s.normal_norm <= tol


@contains_points.register
def _(s: Box, X, tol=MEMBER_TOL):
    return np.all((X >= s.lo - tol) & (X <= s.hi + tol), axis=1)


@contains_points.register
def _(s: NormBall, X, tol=MEMBER_TOL):
    return norm_eval_rows(s.norm, X - s.center) <= s.radius + tol


def _ellipsoid_level(s: Ellipsoid, X) -> np.ndarray:
    return np.sqrt(np.sum(((X - s.center) / s.semiaxes) ** 2, axis=1))


@contains_points.register
def _(s: Ellipsoid, X, tol=MEMBER_TOL):
    return _ellipsoid_level(s, X) <= 1.0 + tol


def _polytope_slacks(s: PolytopeH, X) -> np.ndarray:
    """ Signed distances to the bounding hyperplanes, one column per halfspace """
    return (X @ s.A.T - s.b) / s.row_norms


@contains_points.register
def _(s: PolytopeH, X, tol=MEMBER_TOL):
    return np.all(_polytope_slacks(s, X) <= tol, axis=1)


@contains_points.register
def _(s: AffineSubspace, X, tol=MEMBER_TOL):
    D = X - s.point
    Q = s.orthonormal
    R = D - (D @ Q) @ Q.T
    return np.linalg.norm(R, axis=1) <= tol


def _segment_distances(seg: Segment, X) -> np.ndarray:
    d = seg.direction
    dd = float(np.dot(d, d))
    if dd == 0.0:
        return np.linalg.norm(X - seg.a0, axis=1)
    t = np.clip((X - seg.a0) @ d / dd, 0.0, 1.0)
    return np.linalg.norm(X - (seg.a0 + t[:, None] * d), axis=1)


@contains_points.register
def _(s: SegmentSet, X, tol=MEMBER_TOL):
    return _segment_distances(s.seg, X) <= tol


@contains_points.register
def _(s: Intersection, X, tol=MEMBER_TOL):
    inside = np.ones(len(X), dtype=bool)
    for part in s.parts:
        inside &= contains_points(part, X, tol)
    return inside


def _cylinder_axis_ok(s: Cylinder, t, tol) -> np.ndarray:
    if s.extent is None:
        return np.ones(len(t), dtype=bool)
    return (t >= s.extent[0] - tol) & (t <= s.extent[1] + tol)


@contains_points.register
def _(s: Cylinder, X, tol=MEMBER_TOL):
    t, Y = s.split(X)
    return _cylinder_axis_ok(s, t, tol) & contains_points(s.crosssection, Y, tol)


def _voronoi_gap(s: VoronoiCell, X) -> np.ndarray:
    """ min_p ‖x − p‖ − dist(x, competitor), row-wise """
    from .projections import euclid_project

    site_dist = np.min(np.linalg.norm(X[:, None, :] - s.site_matrix[None, :, :], axis=2), axis=1)
    competitor_dist = np.array([euclid_project(s.competitor, x).distance for x in X])
    return site_dist - competitor_dist


@contains_points.register
def _(s: VoronoiCell, X, tol=MEMBER_TOL):
    return _voronoi_gap(s, X) <= tol


@contains_points.register
def _(s: SublevelSet, X, tol=MEMBER_TOL):
    return s.function.values(X) - s.level <= tol

# endregion

# region Boundary


def is_boundary_point(s: SetExpr, x: Vector, tol: float = BOUNDARY_TOL) -> bool:
    """ Is the point x ∈ s on the boundary of s?

    Raises:
        PreconditionError: x is not in s
        DimensionMismatchError
    """
    if not contains(s, x, tol):
        raise PreconditionError('is_boundary_point', f'{np.asarray(x).tolist()} is not in {type(s).__name__}')
    return bool(boundary_mask(s, np.asarray(x, dtype=float)[None, :], tol)[0])


@singledispatch
def boundary_mask(s: SetExpr, X: np.ndarray, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """ Row-wise boundary test for points already known to be members of s

    A member is on the boundary when at least one defining inequality is active within `tol`.
    Sets of lower dimension are all boundary.
    """
    raise NotImplementedError(type(s).__name__)


@boundary_mask.register
def _(s: Halfspace, X, tol=BOUNDARY_TOL):
    return np.abs((X @ s.normal - s.offset) / s.normal_norm) <= tol


@boundary_mask.register
def _(s: Box, X, tol=BOUNDARY_TOL):
    return np.any((np.abs(X - s.lo) <= tol) | (np.abs(X - s.hi) <= tol), axis=1)


@boundary_mask.register
def _(s: NormBall, X, tol=BOUNDARY_TOL):
    return np.abs(norm_eval_rows(s.norm, X - s.center) - s.radius) <= tol


@boundary_mask.register
def _(s: Ellipsoid, X, tol=BOUNDARY_TOL):
    return np.abs(_ellipsoid_level(s, X) - 1.0) <= tol


@boundary_mask.register
def _(s: PolytopeH, X, tol=BOUNDARY_TOL):
    # A lower-dimensional polytope has some constraint active at every one of its points
    return np.any(np.abs(_polytope_slacks(s, X)) <= tol, axis=1)


@boundary_mask.register
def _(s: AffineSubspace, X, tol=BOUNDARY_TOL):
    return np.full(len(X), s.subspace_dim < s.dim)


@boundary_mask.register
def _(s: SegmentSet, X, tol=BOUNDARY_TOL):
    if s.dim >= 2 or s.seg.is_degenerate():
        return np.ones(len(X), dtype=bool)
    return (np.abs(X[:, 0] - s.seg.a0[0]) <= tol) | (np.abs(X[:, 0] - s.seg.a1[0]) <= tol)


@boundary_mask.register
def _(s: Intersection, X, tol=BOUNDARY_TOL):
    on_boundary = np.zeros(len(X), dtype=bool)
    for part in s.parts:
        on_boundary |= boundary_mask(part, X, tol)
    return on_boundary


@boundary_mask.register
def _(s: Cylinder, X, tol=BOUNDARY_TOL):
    t, Y = s.split(X)
    on_boundary = boundary_mask(s.crosssection, Y, tol)
    if s.extent is not None:
        on_boundary |= (np.abs(t - s.extent[0]) <= tol) | (np.abs(t - s.extent[1]) <= tol)
    return on_boundary


@boundary_mask.register
def _(s: VoronoiCell, X, tol=BOUNDARY_TOL):
    return np.abs(_voronoi_gap(s, X)) <= tol


@boundary_mask.register
def _(s: SublevelSet, X, tol=BOUNDARY_TOL):
    return np.abs(s.function.values(X) - s.level) <= tol

# endregion

# region Bounding boxes


@singledispatch
def bounding_box(s: SetExpr) -> Optional[BBox]:
    """ An axis-aligned box containing s, or None when s is unbounded (or the bound is not known) """
    return None


@bounding_box.register
def _(s: Box):
    return s.lo, s.hi


@bounding_box.register
def _(s: NormBall):
    # Every ℓp ball sits inside the ℓ∞ ball of the same radius
    return s.center - s.radius, s.center + s.radius


@bounding_box.register
def _(s: Ellipsoid):
    return s.center - s.semiaxes, s.center + s.semiaxes


@bounding_box.register
def _(s: SegmentSet):
    return np.minimum(s.seg.a0, s.seg.a1), np.maximum(s.seg.a0, s.seg.a1)


@bounding_box.register
def _(s: AffineSubspace):
    if s.basis:
        return None
    return s.point, s.point


@bounding_box.register
def _(s: PolytopeH):
    lo, hi = np.empty(s.dim), np.empty(s.dim)
    for i in range(s.dim):
        for sign, out in ((1.0, lo), (-1.0, hi)):
            c = np.zeros(s.dim)
            c[i] = sign
            res = scipy.optimize.linprog(c, A_ub=s.A, b_ub=s.b, bounds=[(None, None)] * s.dim, method='highs')
            if res.status != 0:
                return None
            out[i] = sign * res.fun
    return lo, hi


@bounding_box.register
def _(s: Intersection):
    boxes = [b for b in map(bounding_box, s.parts) if b is not None]
    if not boxes:
        return None
    lo = np.max([b[0] for b in boxes], axis=0)
    hi = np.min([b[1] for b in boxes], axis=0)
    return lo, np.maximum(lo, hi)


@bounding_box.register
def _(s: Cylinder):
    if s.extent is None:
        return None
    cs_lo, cs_hi = bounding_box(s.crosssection)
    # Ellipsoid cross-sections live in the hyperplane: drop their semiaxis along the axis
    along = np.abs(s.axis_dir) > 1e-12
    if isinstance(s.crosssection, Ellipsoid):
        cs_lo = np.where(along, s.axis_point, cs_lo)
        cs_hi = np.where(along, s.axis_point, cs_hi)
    ends = [cs_lo + t * s.axis_dir for t in s.extent] + [cs_hi + t * s.axis_dir for t in s.extent]
    return np.min(ends, axis=0), np.max(ends, axis=0)


def union_box(*boxes: Optional[BBox]) -> Optional[BBox]:
    """ The smallest box containing all the given boxes; None if any of them is None """
    if any(b is None for b in boxes):
        return None
    return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

# endregion
