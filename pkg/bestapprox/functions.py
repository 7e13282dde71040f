""" The closed catalog of convex functions whose sublevel sets are supported

* AffineFunction:       f(x) = ⟨a, x⟩ + c
* QuadraticFunction:    f(x) = xᵀQx + ⟨a, x⟩ + c, Q symmetric positive semidefinite
* ExpFunction:          f(x) = s·exp(x_i) + ⟨a, x⟩ + c, s > 0 and a_i = 0

The exponential entry is what encodes sets like {x₂ ≥ e^{x₁} + 1}: take i=0, s=1, a=(0, −1), c=1
and look at the sublevel set {f ≤ 0}.

Every function knows how to project a point onto its own sublevel set {f ≤ level}.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import scipy.optimize

from .exc import InvalidSetError, EmptySetError
from .geometry import Vector, Structural, as_vector

# Give up on bracketing a multiplier after this many doublings
_MAX_DOUBLINGS = 200


class ConvexFunction(Structural):
    """ Base class for the function catalog """
    kind: str = None

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def values(self, X: np.ndarray) -> np.ndarray:
        """ f() evaluated at every row of X """
        raise NotImplementedError

    def value(self, x: Vector) -> float:
        return float(self.values(np.asarray(x, dtype=float)[None, :])[0])

    def project_sublevel(self, x: Vector, level: float) -> Tuple[Vector, int]:
        """ Euclidean projection of x onto {f ≤ level}

        Returns:
            (point, root-finder iterations)
        """
        raise NotImplementedError

    def is_strictly_convex_sublevel(self) -> Optional[bool]:
        """ Is every nonempty sublevel set strictly convex? None if not known """
        return None


@dataclass(frozen=True, eq=False)
class AffineFunction(ConvexFunction):
    linear: Vector
    offset: float = 0.0
    kind = 'affine'

    def __post_init__(self):
        object.__setattr__(self, 'linear', as_vector(self.linear, what='linear'))
        object.__setattr__(self, 'offset', float(self.offset))
        if not np.any(self.linear):
            raise InvalidSetError('AffineFunction', 'linear', 'must be nonzero')

    @property
    def dim(self) -> int:
        return self.linear.size

    def values(self, X):
        return X @ self.linear + self.offset

    def project_sublevel(self, x, level):
        excess = float(np.dot(self.linear, x)) + self.offset - level
        if excess <= 0:
            return x, 0
        return x - excess / float(np.dot(self.linear, self.linear)) * self.linear, 0

    def is_strictly_convex_sublevel(self):
        # A halfspace; only the real line makes it strictly convex
        return self.dim == 1


@dataclass(frozen=True, eq=False)
class QuadraticFunction(ConvexFunction):
    Q: np.ndarray
    linear: Vector
    offset: float = 0.0
    kind = 'quadratic'

    def __post_init__(self):
        linear = as_vector(self.linear, what='linear')
        Q = np.array(self.Q, dtype=float)
        if Q.shape != (linear.size, linear.size):
            raise InvalidSetError('QuadraticFunction', 'Q', f'must be {linear.size}×{linear.size}, got {Q.shape}')
        if not np.all(np.isfinite(Q)):
            raise InvalidSetError('QuadraticFunction', 'Q', 'has non-finite entries')
        if not np.allclose(Q, Q.T):
            raise InvalidSetError('QuadraticFunction', 'Q', 'must be symmetric')
        if np.linalg.eigvalsh(Q).min() < -1e-12:
            raise InvalidSetError('QuadraticFunction', 'Q', 'must be positive semidefinite')
        Q.flags.writeable = False
        object.__setattr__(self, 'Q', Q)
        object.__setattr__(self, 'linear', linear)
        object.__setattr__(self, 'offset', float(self.offset))

    @property
    def dim(self) -> int:
        return self.linear.size

    @cached_property
    def _eigen(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.Q)

    def values(self, X):
        return np.einsum('ij,jk,ik->i', X, self.Q, X) + X @ self.linear + self.offset

    def _minimizer(self, x: Vector, lam: float) -> Vector:
        """ argmin ½‖z − x‖² + λ f(z): solves (I + 2λQ) z = x − λa """
        w, V = self._eigen
        rhs = V.T @ (x - lam * self.linear)
        return V @ (rhs / (1.0 + 2.0 * lam * w))

    def project_sublevel(self, x, level):
        if self.value(x) <= level:
            return x, 0

        # f(z(λ)) is nonincreasing in λ: bracket the multiplier, then find the root
        def excess(lam):
            return self.value(self._minimizer(x, lam)) - level

        hi = 1.0
        for _ in range(_MAX_DOUBLINGS):
            if excess(hi) <= 0:
                break
            hi *= 2.0
        else:
            raise EmptySetError('SublevelSet(quadratic)', f'level {level} is below the minimum')

        lam, info = scipy.optimize.brentq(excess, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                          maxiter=500, full_output=True, disp=False)
        return self._minimizer(x, lam), info.iterations

    def is_strictly_convex_sublevel(self):
        return bool(np.linalg.eigvalsh(self.Q).min() > 1e-12)


@dataclass(frozen=True, eq=False)
class ExpFunction(ConvexFunction):
    index: int
    scale: float
    linear: Vector
    offset: float = 0.0
    kind = 'exp'

    def __post_init__(self):
        linear = as_vector(self.linear, what='linear')
        if not 0 <= self.index < linear.size:
            raise InvalidSetError('ExpFunction', 'index', f'must be in [0, {linear.size}), got {self.index}')
        if not self.scale > 0:
            raise InvalidSetError('ExpFunction', 'scale', f'must be positive, got {self.scale}')
        if linear[self.index] != 0:
            raise InvalidSetError('ExpFunction', 'linear', f'coordinate {self.index} must be zero')
        object.__setattr__(self, 'index', int(self.index))
        object.__setattr__(self, 'scale', float(self.scale))
        object.__setattr__(self, 'linear', linear)
        object.__setattr__(self, 'offset', float(self.offset))

    @property
    def dim(self) -> int:
        return self.linear.size

    def values(self, X):
        with np.errstate(over='ignore'):
            return self.scale * np.exp(X[:, self.index]) + X @ self.linear + self.offset

    def project_sublevel(self, x, level):
        x = np.asarray(x, dtype=float)
        if self.value(x) <= level:
            return x, 0

        # Stationarity gives z_j = x_j − λa_j (j ≠ i) and z_i + λ·s·e^{z_i} = x_i.
        # Parametrize by δ = x_i − z_i ≥ 0: then λ = δ·e^{−z_i}/s and the constraint
        # f(z) = level becomes a single equation in δ, decreasing in δ.
        i = self.index
        xi = float(x[i])
        aa = float(np.dot(self.linear, self.linear))
        rest = float(np.dot(self.linear, x)) + self.offset - level

        if xi < -700.0:
            # e^{x_i} is below double precision: only the affine part can move
            if aa == 0:
                raise EmptySetError('SublevelSet(exp)', f'level {level} is not reachable')
            return x - (self.value(x) - level) / aa * self.linear, 0

        def multiplier(delta):
            if delta == 0.0:
                return 0.0
            exponent = delta - xi
            if exponent > 700:
                return math.inf
            return delta * math.exp(exponent) / self.scale

        def excess(delta):
            lam = multiplier(delta)
            if math.isinf(lam):
                return -1e300 if aa > 0 else rest
            return self.scale * math.exp(min(xi - delta, 700.0)) + rest - lam * aa

        hi = 1.0
        for _ in range(_MAX_DOUBLINGS):
            if excess(hi) < 0:
                break
            hi *= 2.0
        else:
            raise EmptySetError('SublevelSet(exp)', f'level {level} is not reachable')

        delta, info = scipy.optimize.brentq(excess, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                            maxiter=500, full_output=True, disp=False)
        lam = multiplier(delta)
        z = x - lam * self.linear
        z[i] = xi - delta
        return z, info.iterations

    def is_strictly_convex_sublevel(self):
        # The boundary is the graph of a strictly convex function of one variable only in the plane
        if self.dim == 2 and np.any(self.linear):
            return True
        return None
