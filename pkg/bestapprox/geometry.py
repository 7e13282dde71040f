""" Vectors, ℓp norms, segments, and the linear-algebra helpers the rest of the package leans on

Vectors are plain 1-D float64 `numpy` arrays. Use `as_vector()` at every public boundary:
it validates finiteness and dimension eagerly, so a dimension mismatch is an error
at construction time and never turns into a NaN later on.
"""
import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .exc import InvalidVectorError, DimensionMismatchError, PreconditionError

# A point of R^n: a finite, 1-D float64 array
Vector = np.ndarray

# Collinearity tolerance for segment directions
PARALLEL_TOL = 1e-9

# Numerical rank tolerance: applied to unit-normalized columns
RANK_TOL = 1e-9


def as_vector(coords: Union[Sequence[float], np.ndarray], dim: Optional[int] = None, what: str = 'vector') -> Vector:
    """ Convert coordinates into a validated Vector

    Args:
        coords: Anything numpy can turn into a 1-D array of floats
        dim: Expected dimension, if known
        what: Name of the thing, for error messages
    Raises:
        InvalidVectorError: empty, not 1-D, or has non-finite coordinates
        DimensionMismatchError: the dimension is not `dim`
    """
    v = np.array(coords, dtype=float)
    if v.ndim != 1:
        raise InvalidVectorError(f'{what} must be one-dimensional, got shape {v.shape}')
    if v.size == 0:
        raise InvalidVectorError(f'{what} has no coordinates')
    if not np.all(np.isfinite(v)):
        raise InvalidVectorError(f'{what} has non-finite coordinates: {v.tolist()}')
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(dim, v.size, what)
    v.flags.writeable = False
    return v


def check_dimension(x: Vector, dim: int, what: str = 'point'):
    """ Raise DimensionMismatchError unless `x` has `dim` coordinates """
    if np.shape(x) != (dim,):
        raise DimensionMismatchError(dim, np.size(x), what)


class Infinity(enum.Enum):
    """ The p=∞ case of an ℓp norm: max semantics, not a large number """
    INF = 'inf'

    def __repr__(self):
        return 'INF'


INF = Infinity.INF


@dataclass(frozen=True)
class NormSpec:
    """ An ℓp norm on R^n, p ∈ [1, ∞]

    Example:
        NormSpec(2)
        NormSpec(INF)
        NormSpec.parse('inf')
    """
    p: Union[float, Infinity] = 2.0

    def __post_init__(self):
        if self.p is INF:
            return
        if isinstance(self.p, bool) or not isinstance(self.p, (int, float)):
            raise PreconditionError('NormSpec', f'p must be a number or INF, got {self.p!r}')
        if math.isinf(self.p):
            object.__setattr__(self, 'p', INF)
        elif not self.p >= 1:
            raise PreconditionError('NormSpec', f'p must be ≥ 1, got {self.p}')
        else:
            object.__setattr__(self, 'p', float(self.p))

    @classmethod
    def euclidean(cls) -> 'NormSpec':
        return cls(2.0)

    @classmethod
    def parse(cls, value: Union[str, float, int]) -> 'NormSpec':
        """ Build from the serialized form: a number, or the string "inf" """
        if isinstance(value, str):
            if value.strip().lower() in ('inf', 'infinity', '∞'):
                return cls(INF)
            raise PreconditionError('NormSpec.parse', f'unknown norm {value!r}')
        return cls(value)

    @property
    def is_inf(self) -> bool:
        return self.p is INF

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    @property
    def order(self) -> float:
        """ p as a float (math.inf for ∞), the form numpy and scipy expect """
        return math.inf if self.is_inf else self.p

    def serialize(self) -> Union[str, float]:
        if self.is_inf:
            return 'inf'
        return int(self.p) if self.p.is_integer() else self.p

    def __str__(self):
        return f'l{self.serialize()}'


def norm_eval(norm: NormSpec, v: Vector) -> float:
    """ ‖v‖_p

    For 1 < p < ∞ (p ≠ 2) the sum is computed on v/max|v_i| to stay clear of overflow.
    """
    a = np.abs(np.asarray(v, dtype=float))
    if norm.is_inf:
        return float(a.max(initial=0.0))
    if norm.p == 1.0:
        return float(a.sum())
    if norm.p == 2.0:
        return float(np.linalg.norm(a))
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** norm.p) ** (1.0 / norm.p))


def norm_eval_rows(norm: NormSpec, V: np.ndarray) -> np.ndarray:
    """ norm_eval() applied to every row of a 2-D array """
    return np.linalg.norm(np.asarray(V, dtype=float), ord=norm.order, axis=1)


def is_strictly_convex_norm(norm: NormSpec) -> bool:
    """ ℓp is strictly convex exactly for 1 < p < ∞ """
    return not norm.is_inf and norm.p > 1.0


@dataclass(frozen=True, eq=False)
class Segment:
    """ The closed segment [a0, a1], parametrized as a0 + t(a1 − a0) """
    a0: Vector
    a1: Vector

    def __post_init__(self):
        a0 = as_vector(self.a0, what='segment start')
        a1 = as_vector(self.a1, dim=a0.size, what='segment end')
        object.__setattr__(self, 'a0', a0)
        object.__setattr__(self, 'a1', a1)

    @property
    def dim(self) -> int:
        return self.a0.size

    @property
    def direction(self) -> Vector:
        return self.a1 - self.a0

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.direction))

    def is_degenerate(self, tol: float = 0.0) -> bool:
        return self.length <= tol

    def points(self, ts: Iterable[float]) -> np.ndarray:
        """ Points a(t) for several t, as rows """
        ts = np.asarray(list(ts), dtype=float)
        return self.a0[None, :] + ts[:, None] * self.direction[None, :]

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return np.array_equal(self.a0, other.a0) and np.array_equal(self.a1, other.a1)

    def __hash__(self):
        return hash((tuple(self.a0), tuple(self.a1)))

    def __repr__(self):
        return f'Segment({self.a0.tolist()}, {self.a1.tolist()})'


def segment_point(s: Segment, t: float) -> Vector:
    """ a(t) = a0 + t(a1 − a0)

    Raises:
        PreconditionError: t is outside of [0, 1]
    """
    if not 0.0 <= t <= 1.0:
        raise PreconditionError('segment_point', f't must lie in [0, 1], got {t}')
    return s.a0 + t * s.direction


def are_parallel_segments(s1: Segment, s2: Segment, tol: float = PARALLEL_TOL) -> bool:
    """ Are the two segments located on two distinct parallel lines?

    Three conditions must hold:
    * the directions are collinear (sine of the angle below `tol`),
    * the supporting lines do not coincide,
    * the four endpoints span a 2-dimensional affine subspace.

    Raises:
        PreconditionError: a segment is degenerate
        DimensionMismatchError: segments live in different spaces
    """
    if s1.dim != s2.dim:
        raise DimensionMismatchError(s1.dim, s2.dim, 'segment')
    if s1.is_degenerate() or s2.is_degenerate():
        raise PreconditionError('are_parallel_segments', 'both segments must be nondegenerate')

    u = s1.direction / s1.length
    v = s2.direction / s2.length

    # Collinear directions
    if np.linalg.norm(v - np.dot(u, v) * u) > tol:
        return False

    # Distinct supporting lines: b0 is off the line through a0
    w = s2.a0 - s1.a0
    off_line = w - np.dot(w, u) * u
    if np.linalg.norm(off_line) <= tol * max(1.0, float(np.linalg.norm(w))):
        return False

    # Common plane
    return rank(np.column_stack([s1.direction, w, s2.a1 - s1.a0]), tol) == 2


def rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    """ Numerical rank of a matrix by QR with column pivoting

    Columns are normalized first, so `tol` is scale-free. Zero columns are ignored.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.size == 0:
        return 0
    norms = np.linalg.norm(M, axis=0)
    keep = norms > 0
    if not keep.any():
        return 0
    M = M[:, keep] / norms[keep]
    R, _ = scipy.linalg.qr(M, mode='r', pivoting=True)
    diag = np.abs(np.diag(R))
    return int(np.sum(diag > tol))


def basis_matrix(vectors: Iterable[Vector], dim: int) -> np.ndarray:
    """ Stack vectors as the columns of a (dim × k) matrix; k may be 0 """
    cols = [np.asarray(v, dtype=float) for v in vectors]
    if not cols:
        return np.zeros((dim, 0))
    return np.column_stack(cols)


def orthonormal_basis(U: np.ndarray) -> np.ndarray:
    """ Orthonormal basis of the column span of U (dim × k, possibly k=0) """
    if U.shape[1] == 0:
        return U
    return scipy.linalg.orth(U, rcond=RANK_TOL)


def orthogonal_complement(U: np.ndarray) -> np.ndarray:
    """ Orthonormal basis of the orthogonal complement of span(U) """
    n = U.shape[0]
    if U.shape[1] == 0:
        return np.eye(n)
    return scipy.linalg.null_space(U.T, rcond=RANK_TOL)


def subspaces_intersect(U: np.ndarray, V: np.ndarray, tol: float = RANK_TOL) -> bool:
    """ Do span(U) and span(V) share a nonzero vector?

    rank(U) + rank(V) − rank([U V]) is the dimension of the intersection.
    """
    if U.shape[1] == 0 or V.shape[1] == 0:
        return False
    return rank(U, tol) + rank(V, tol) - rank(np.hstack([U, V]), tol) >= 1


class Structural:
    """ Value semantics for frozen dataclasses holding numpy arrays

    Two instances are equal when they are of the same class and all their fields are equal,
    arrays being compared coordinate by coordinate.
    """

    def _key(self) -> tuple:
        return (type(self).__name__,) + tuple(_freeze(getattr(self, f.name)) for f in dataclasses.fields(self))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def _freeze(value):
    """ Turn a field value into something hashable """
    if isinstance(value, np.ndarray):
        return _freeze(value.tolist())
    if isinstance(value, Structural):
        return value._key()
    if isinstance(value, Segment):
        return ('Segment', tuple(value.a0.tolist()), tuple(value.a1.tolist()))
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value
