""" Structural facts about sets: strict convexity, recession cones, flat pieces of the boundary

These are the inputs of the uniqueness and existence certificates.
Polyhedral computations go through `scipy.optimize.linprog` (HiGHS).
"""
import enum
import itertools
from dataclasses import dataclass, field
from functools import singledispatch
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from .functions import AffineFunction
from .geometry import (Vector, Segment, as_vector, basis_matrix, orthonormal_basis, orthogonal_complement,
                       rank, RANK_TOL)
from .sets import (SetExpr, Halfspace, Box, NormBall, Ellipsoid, PolytopeH, AffineSubspace, SegmentSet,
                   Intersection, Cylinder, VoronoiCell, SublevelSet,
                   contains_points, boundary_mask, MEMBER_TOL, BOUNDARY_TOL)

# Face enumeration gives up past this many active-set combinations
FACE_COMBINATION_CAP = 2 ** 20

# A constraint counts as tight on a face when its largest slack there is below this
_TIGHT_TOL = 1e-9

# Parameters along a witness segment that are probed on an intersection
_PROBE_TS = (0.0, 0.25, 0.5, 0.75, 1.0)


class Verdict(enum.Enum):
    YES = 'Yes'
    NO = 'No'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class StrictConvexityVerdict:
    """ Is the set strictly convex? A No comes with a nondegenerate segment lying in the boundary """
    value: Verdict
    witness: Optional[Segment] = None

    @property
    def is_yes(self) -> bool:
        return self.value is Verdict.YES


YES = StrictConvexityVerdict(Verdict.YES)
UNKNOWN = StrictConvexityVerdict(Verdict.UNKNOWN)


def _no(a0, a1) -> StrictConvexityVerdict:
    return StrictConvexityVerdict(Verdict.NO, Segment(a0, a1))


# region Polyhedral faces

class Face(NamedTuple):
    """ A face of a polytope: orthonormal basis of its direction space, and a relative interior point """
    basis: np.ndarray
    point: Vector


def _linprog(c, A_ub, b_ub, A_eq=None, b_eq=None):
    n = len(c)
    return scipy.optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                                  bounds=[(None, None)] * n, method='highs')


def _max_slacks(A, b, A_eq=None, b_eq=None) -> Optional[np.ndarray]:
    """ For every row j: sup (b_j − a_j·x) over {Ax ≤ b, A_eq x = b_eq}. None if that set is empty """
    slacks = np.empty(len(A))
    for j, row in enumerate(A):
        res = _linprog(row, A, b, A_eq, b_eq)
        if res.status == 2:
            return None
        slacks[j] = np.inf if res.status == 3 else b[j] - res.fun
    return slacks


def _relative_interior_point(A, b, tight: np.ndarray) -> Vector:
    """ A point of {Ax ≤ b, A_T x = b_T} maximizing the smallest slack of the other rows """
    n = A.shape[1]
    loose = ~tight
    # Variables: (x, s); maximize s with s ≤ 1
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A[loose], np.ones((loose.sum(), 1))])
    A_ub = np.vstack([A_ub, np.eye(1, n + 1, n)])
    b_ub = np.concatenate([b[loose], [1.0]])
    A_eq = np.hstack([A[tight], np.zeros((tight.sum(), 1))]) if tight.any() else None
    b_eq = b[tight] if tight.any() else None
    res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                                 bounds=[(None, None)] * (n + 1), method='highs')
    return res.x[:n]


def polytope_faces(P: PolytopeH) -> Optional[List[Face]]:
    """ The maximal flat pieces of the boundary of P that have dimension ≥ 1

    Every segment lying in ∂P lies in one of these faces. For a full-dimensional P they are
    the facets; a lower-dimensional P is all boundary and is its own face.

    Returns:
        None when the enumeration would exceed FACE_COMBINATION_CAP
    """
    A = P.A / P.row_norms[:, None]
    b = P.b / P.row_norms
    m, n = A.shape
    if m * (m + 1) > FACE_COMBINATION_CAP:
        return None

    slacks = _max_slacks(A, b)
    if slacks is None:
        return []
    implicit = slacks <= _TIGHT_TOL
    if implicit.any():
        basis = scipy.linalg.null_space(A[implicit], rcond=RANK_TOL)
        if basis.shape[1] == 0:
            return []
        return [Face(basis, _relative_interior_point(A, b, implicit))]

    faces = []
    for i in range(m):
        face_slacks = _max_slacks(A, b, A[i:i + 1], b[i:i + 1])
        if face_slacks is None:
            continue
        tight = face_slacks <= _TIGHT_TOL
        tight[i] = True
        basis = scipy.linalg.null_space(A[tight], rcond=RANK_TOL)
        if basis.shape[1] == 0:
            continue
        if any(_same_subspace(basis, f.basis) and np.array_equal(tight, t) for f, t in faces):
            continue
        faces.append((Face(basis, _relative_interior_point(A, b, tight)), tight))
    return [f for f, _ in faces]


def _same_subspace(U: np.ndarray, V: np.ndarray) -> bool:
    r = rank(U)
    return r == rank(V) == rank(np.hstack([U, V]))


def _dedupe_subspaces(subspaces: Sequence[np.ndarray]) -> List[np.ndarray]:
    unique = []
    for U in subspaces:
        if not any(_same_subspace(U, V) for V in unique):
            unique.append(U)
    return unique


def _polyhedral_form(s: SetExpr) -> Optional[PolytopeH]:
    """ s as a PolytopeH, when it is polyhedral in a way we can write down """
    if isinstance(s, PolytopeH):
        return s
    if isinstance(s, Halfspace):
        return PolytopeH((s,))
    if isinstance(s, Box):
        return s.as_polytope()
    if isinstance(s, NormBall) and s.norm.is_inf:
        return Box(s.center - s.radius, s.center + s.radius).as_polytope()
    if isinstance(s, NormBall) and s.norm.p == 1.0 and s.dim <= 10:
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=s.dim)))
        return PolytopeH.from_inequalities(signs, signs @ s.center + s.radius)
    if isinstance(s, SublevelSet) and isinstance(s.function, AffineFunction):
        return PolytopeH((Halfspace(s.function.linear, s.level - s.function.offset),))
    if isinstance(s, Intersection):
        forms = [_polyhedral_form(p) for p in s.parts]
        if all(f is not None for f in forms):
            return PolytopeH(tuple(h for f in forms for h in f.halfspaces))
    return None


def is_polyhedral(s: SetExpr) -> bool:
    return _polyhedral_form(s) is not None

# endregion

# region Strict convexity


@singledispatch
def _classify(s: SetExpr) -> StrictConvexityVerdict:
    return UNKNOWN


def classify_strict_convexity(s: SetExpr) -> StrictConvexityVerdict:
    """ Is the set strictly convex?

    * Yes: ellipsoids, ℓp balls with 1 < p < ∞, intersections of strictly convex sets, and
      every convex subset of the real line
    * No: sets with a flat piece of boundary; the witness is a nondegenerate segment on the boundary
    * Unknown: everything we cannot decide
    """
    if s.dim == 1:
        return YES
    return _classify(s)


@_classify.register
def _(s: Ellipsoid):
    return YES


@_classify.register
def _(s: NormBall):
    c, r = s.center, s.radius
    e1, e2 = np.eye(s.dim)[:2]
    if s.norm.is_inf:
        # Facet x_1 = c_1 + r
        return _no(c + r * (e1 - e2), c + r * (e1 + e2))
    if s.norm.p == 1.0:
        # Facet between two vertices
        return _no(c + r * e1, c + r * e2)
    return YES


@_classify.register
def _(s: Halfspace):
    foot = s.offset / s.normal_norm ** 2 * s.normal
    along = orthogonal_complement(s.normal[:, None])[:, 0]
    return _no(foot - along, foot + along)


@_classify.register
def _(s: Box):
    wide = np.flatnonzero(s.hi > s.lo)
    if wide.size == 0:
        return YES
    j = wide[0]
    k = max(i for i in range(s.dim) if i != j)
    a0 = s.lo.copy()
    a0[k] = s.hi[k]
    a1 = a0.copy()
    a1[j] = s.hi[j]
    return _no(a0, a1)


@_classify.register
def _(s: PolytopeH):
    faces = polytope_faces(s)
    if faces is None:
        return UNKNOWN
    if not faces:
        return YES
    basis, x = faces[0]
    d = basis[:, 0]
    return _no(*_segment_within(s, x, d))


def _segment_within(P: PolytopeH, x: Vector, d: Vector):
    """ A short segment x ± εd inside P """
    rates = P.A @ d
    slack = P.b - P.A @ x
    moving = np.abs(rates) > 1e-12
    eps = 1.0
    if moving.any():
        eps = min(eps, 0.5 * float(np.min(slack[moving] / np.abs(rates[moving]))))
    return x - eps * d, x + eps * d


@_classify.register
def _(s: SegmentSet):
    if s.seg.is_degenerate():
        return YES
    return StrictConvexityVerdict(Verdict.NO, s.seg)


@_classify.register
def _(s: AffineSubspace):
    if 1 <= s.subspace_dim < s.dim:
        d = s.orthonormal[:, 0]
        return _no(s.point - d, s.point + d)
    return YES


def _cylinder_rim(s: Cylinder):
    """ A unit direction w ⊥ axis, and the radius of the cross-section along w """
    cs = s.crosssection
    if isinstance(cs, Ellipsoid):
        j = next(i for i in range(s.dim) if abs(s.axis_dir[i]) <= 1e-12)
        return np.eye(s.dim)[j], float(cs.semiaxes[j])
    return orthogonal_complement(s.axis_dir[:, None])[:, 0], cs.radius


@_classify.register
def _(s: Cylinder):
    w, radius = _cylinder_rim(s)
    p, u = s.axis_point, s.axis_dir
    if s.extent is None:
        q = p + radius * w
        return _no(q - u, q + u)
    lo, hi = s.extent
    if hi > lo:
        q = p + radius * w
        return _no(q + lo * u, q + hi * u)
    # Flat: the whole set is boundary
    return _no(p + lo * u - 0.5 * radius * w, p + lo * u + 0.5 * radius * w)


@_classify.register
def _(s: Intersection):
    verdicts = [classify_strict_convexity(p) for p in s.parts]
    if all(v.is_yes for v in verdicts):
        return YES
    for v in verdicts:
        if v.value is Verdict.NO and _survives(s, v.witness):
            return v
    return UNKNOWN


def _survives(s: SetExpr, witness: Segment) -> bool:
    """ Does the witness lie in s and on its boundary, judging by probes along it? """
    points = witness.points(_PROBE_TS)
    return bool(np.all(contains_points(s, points, MEMBER_TOL)) and np.all(boundary_mask(s, points, BOUNDARY_TOL)))


@_classify.register
def _(s: SublevelSet):
    strict = s.function.is_strictly_convex_sublevel()
    if strict:
        return YES
    form = _polyhedral_form(s)
    if form is not None:
        return _classify(form.halfspaces[0])
    return UNKNOWN

# endregion

# region Recession cones


class ConeKind(enum.Enum):
    BOUNDED = 'bounded'
    HALFSPACES = 'halfspaces'
    LINES = 'lines'
    UNKNOWN = 'unknown'


@dataclass(frozen=True, eq=False)
class RecessionCone:
    """ {d: G d ≤ 0, E d = 0}

    * BOUNDED: the trivial cone {0}
    * HALFSPACES: a homogeneous halfspace system (maybe with equalities)
    * LINES: the linear span of `lines`
    * UNKNOWN: nothing is known; G and E are meaningless
    """
    kind: ConeKind
    dim: int
    G: np.ndarray = field(default=None)
    E: np.ndarray = field(default=None)
    lines: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.G is None:
            object.__setattr__(self, 'G', np.zeros((0, self.dim)))
        if self.E is None:
            object.__setattr__(self, 'E', np.eye(self.dim) if self.kind is ConeKind.BOUNDED else np.zeros((0, self.dim)))

    @property
    def is_known(self) -> bool:
        return self.kind is not ConeKind.UNKNOWN

    @property
    def is_bounded(self) -> bool:
        return self.kind is ConeKind.BOUNDED

    def contains(self, d: Vector, tol: float = 1e-9) -> bool:
        scale = max(1.0, float(np.linalg.norm(d)))
        return bool(np.all(self.G @ d <= tol * scale) and np.all(np.abs(self.E @ d) <= tol * scale))


def _lines_cone(U: np.ndarray) -> RecessionCone:
    n = U.shape[0]
    if U.shape[1] == 0:
        return RecessionCone(ConeKind.BOUNDED, n)
    Q = orthonormal_basis(U)
    return RecessionCone(ConeKind.LINES, n, E=orthogonal_complement(Q).T, lines=Q)


@singledispatch
def recession_cone_generators(s: SetExpr) -> RecessionCone:
    """ The recession cone {d: d + s ⊆ s}, in one of the forms of RecessionCone """
    return RecessionCone(ConeKind.UNKNOWN, s.dim)


@recession_cone_generators.register(Box)
@recession_cone_generators.register(NormBall)
@recession_cone_generators.register(Ellipsoid)
@recession_cone_generators.register(SegmentSet)
def _(s):
    return RecessionCone(ConeKind.BOUNDED, s.dim)


@recession_cone_generators.register
def _(s: Halfspace):
    return RecessionCone(ConeKind.HALFSPACES, s.dim, G=s.normal[None, :].copy())


@recession_cone_generators.register
def _(s: PolytopeH):
    return RecessionCone(ConeKind.HALFSPACES, s.dim, G=s.A.copy())


@recession_cone_generators.register
def _(s: AffineSubspace):
    return _lines_cone(basis_matrix(s.basis, s.dim))


@recession_cone_generators.register
def _(s: Cylinder):
    if s.extent is None:
        return _lines_cone(s.axis_dir[:, None])
    return RecessionCone(ConeKind.BOUNDED, s.dim)


@recession_cone_generators.register
def _(s: Intersection):
    cones = [recession_cone_generators(p) for p in s.parts]
    if not all(c.is_known for c in cones):
        return RecessionCone(ConeKind.UNKNOWN, s.dim)
    if any(c.is_bounded for c in cones):
        return RecessionCone(ConeKind.BOUNDED, s.dim)
    G = np.vstack([c.G for c in cones])
    E = np.vstack([c.E for c in cones])
    if G.shape[0] == 0:
        # Intersection of spans
        lines = scipy.linalg.null_space(E, rcond=RANK_TOL) if E.shape[0] else np.eye(s.dim)
        return _lines_cone(lines)
    return RecessionCone(ConeKind.HALFSPACES, s.dim, G=G, E=E)


def shared_recession_direction(c1: RecessionCone, c2: RecessionCone, tol: float = 1e-9) -> Optional[Vector]:
    """ A nonzero d in both cones, or None when they only share 0

    Solves max ±d_i subject to both cone systems and |d_i| ≤ 1, for every coordinate i.

    Raises:
        ValueError: a cone is unknown
    """
    if not (c1.is_known and c2.is_known):
        raise ValueError('Both recession cones must be known')
    if c1.is_bounded or c2.is_bounded:
        return None
    n = c1.dim
    G = np.vstack([c1.G, c2.G])
    E = np.vstack([c1.E, c2.E])
    for i in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sign
            res = scipy.optimize.linprog(c, A_ub=G if len(G) else None, b_ub=np.zeros(len(G)) if len(G) else None,
                                         A_eq=E if len(E) else None, b_eq=np.zeros(len(E)) if len(E) else None,
                                         bounds=[(-1.0, 1.0)] * n, method='highs')
            if res.status == 0 and -res.fun > tol:
                return res.x / np.linalg.norm(res.x)
    return None


def is_recession_direction(s: SetExpr, base: Vector, d: Vector,
                           ts: Sequence[float] = (1.0, 10.0, 100.0, 1000.0), rel_tol: float = 1e-3) -> bool:
    """ Probe whether d is (asymptotically) a recession direction of s

    For a closed convex s and any base point, dist(base + t·d, s)/t tends to the distance from d
    to the recession cone. The probe accepts d when that ratio stays below `rel_tol`.
    """
    from .projections import euclid_project

    d = as_vector(d, dim=s.dim, what='direction')
    d = d / np.linalg.norm(d)
    return all(euclid_project(s, base + t * d).distance / t <= rel_tol for t in ts)

# endregion

# region Flat boundary pieces


@singledispatch
def _directions(s: SetExpr) -> Optional[List[np.ndarray]]:
    return None


def boundary_segments_directions(s: SetExpr) -> Optional[List[np.ndarray]]:
    """ Direction spaces of the flat pieces of ∂s

    Every nondegenerate segment lying in ∂s is parallel to one of the returned subspaces.
    Each subspace is an orthonormal basis, as the columns of an (n × k) matrix.

    Returns:
        [] for strictly convex sets; None when unknown
    """
    if classify_strict_convexity(s).is_yes:
        return []
    found = _directions(s)
    return None if found is None else _dedupe_subspaces(found)


@_directions.register(Halfspace)
@_directions.register(Box)
@_directions.register(PolytopeH)
@_directions.register(NormBall)
def _(s):
    form = _polyhedral_form(s)
    if form is None:
        return None
    faces = polytope_faces(form)
    return None if faces is None else [f.basis for f in faces]


@_directions.register
def _(s: SegmentSet):
    return [orthonormal_basis(s.seg.direction[:, None])]


@_directions.register
def _(s: AffineSubspace):
    return [s.orthonormal]


@_directions.register
def _(s: Cylinder):
    axis = s.axis_dir[:, None]
    across = orthogonal_complement(axis)
    if s.extent is None:
        return [axis]
    if s.extent[1] > s.extent[0]:
        # Rulings, and the two flat caps
        return [axis, across]
    return [across]


@_directions.register
def _(s: Intersection):
    form = _polyhedral_form(s)
    if form is None:
        return None
    faces = polytope_faces(form)
    return None if faces is None else [f.basis for f in faces]


def difference_span(s: SetExpr) -> Optional[np.ndarray]:
    """ An orthonormal basis of a subspace containing s − s; None when unknown

    Exact for affine subspaces and segments. For intersections it is the intersection of the
    parts' spans, which may be larger than the true span, never smaller.
    """
    n = s.dim
    if isinstance(s, AffineSubspace):
        return s.orthonormal
    if isinstance(s, SegmentSet):
        return orthonormal_basis(s.seg.direction[:, None]) if not s.seg.is_degenerate() else np.zeros((n, 0))
    if isinstance(s, Box):
        return np.eye(n)[:, s.hi > s.lo]
    if isinstance(s, (NormBall, Ellipsoid, Halfspace)):
        return np.eye(n)
    if isinstance(s, Cylinder):
        if s.extent is not None and s.extent[0] == s.extent[1]:
            return orthogonal_complement(s.axis_dir[:, None])
        return np.eye(n)
    if isinstance(s, Intersection):
        spans = [difference_span(p) for p in s.parts]
        if any(x is None for x in spans):
            return None
        complements = [orthogonal_complement(U).T for U in spans]
        return scipy.linalg.null_space(np.vstack(complements), rcond=RANK_TOL) if any(len(c) for c in complements) \
            else np.eye(n)
    return None

# endregion
