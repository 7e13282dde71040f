""" Euclidean nearest-point projections onto every set variant

All projections are Euclidean, whatever the norm of the best approximation problem.

Example:

    euclid_project(Box([-2, -2], [2, 0]), [0, 1]).point        # (0, 0)
    dykstra_project([Halfspace([0, 1], 0), Box([-2, -2], [2, 2])], [0, 1]).point
"""
import logging
from dataclasses import dataclass
from functools import singledispatch
from typing import Sequence

import numpy as np
import scipy.optimize

from .geometry import Vector, check_dimension
from .log import class_logger
from .sets import (SetExpr, Halfspace, Box, NormBall, Ellipsoid, PolytopeH, AffineSubspace, SegmentSet,
                   Intersection, Cylinder, VoronoiCell, SublevelSet, contains, MEMBER_TOL)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProjectionParams:
    """ Iteration controls for the projections that are not in closed form """
    tol: float = 1e-10
    max_iter: int = 10_000


DEFAULT_PARAMS = ProjectionParams()


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """ The nearest point of a set to x

    Attributes:
        point: The projection
        distance: ‖x − point‖₂
        iterations: 0 for closed-form projections
        converged: False when an iterative scheme ran out of iterations
    """
    point: Vector
    distance: float
    iterations: int = 0
    converged: bool = True


def _result(x, point, iterations=0, converged=True) -> ProjectionResult:
    point = np.asarray(point, dtype=float)
    return ProjectionResult(point, float(np.linalg.norm(x - point)), iterations, converged)


def euclid_project(s: SetExpr, x: Vector, params: ProjectionParams = DEFAULT_PARAMS) -> ProjectionResult:
    """ Project x onto s

    Raises:
        DimensionMismatchError
    """
    x = np.asarray(x, dtype=float)
    check_dimension(x, s.dim)
    return _project(s, x, params)


@singledispatch
def _project(s: SetExpr, x: Vector, params: ProjectionParams) -> ProjectionResult:
    raise NotImplementedError(type(s).__name__)


@_project.register
def _(s: Halfspace, x, params):
    excess = float(np.dot(s.normal, x)) - s.offset
    if excess <= 0:
        return _result(x, x)
    return _result(x, x - excess / s.normal_norm ** 2 * s.normal)


@_project.register
def _(s: Box, x, params):
    return _result(x, np.clip(x, s.lo, s.hi))


@_project.register
def _(s: AffineSubspace, x, params):
    Q = s.orthonormal
    return _result(x, s.point + Q @ (Q.T @ (x - s.point)))


@_project.register
def _(s: SegmentSet, x, params):
    d = s.seg.direction
    dd = float(np.dot(d, d))
    if dd == 0.0:
        return _result(x, s.seg.a0)
    t = min(1.0, max(0.0, float(np.dot(x - s.seg.a0, d)) / dd))
    return _result(x, s.seg.a0 + t * d)


@_project.register
def _(s: NormBall, x, params):
    y = x - s.center
    if s.norm.is_inf:
        return _result(x, s.center + np.clip(y, -s.radius, s.radius))
    if s.norm.p == 2.0:
        r = float(np.linalg.norm(y))
        if r <= s.radius:
            return _result(x, x)
        return _result(x, s.center + s.radius / r * y)
    if s.norm.p == 1.0:
        return _result(x, s.center + _project_l1_ball(y, s.radius))
    point, iterations = _project_lp_ball(y, s.radius, s.norm.p)
    return _result(x, s.center + point, iterations)


def _project_l1_ball(y: Vector, radius: float) -> Vector:
    """ Projection onto {‖z‖₁ ≤ radius} by soft thresholding with a sorted threshold search """
    a = np.abs(y)
    if a.sum() <= radius:
        return y.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(u) + 1)
    rho = np.nonzero(u * k > css - radius)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(y) * np.maximum(a - theta, 0.0)


def _project_lp_ball(y: Vector, radius: float, p: float):
    """ Projection onto {‖z‖_p ≤ radius}, 1 < p < ∞, p ≠ 2

    Stationarity: z_i = sign(y_i)·w_i with w_i + λ·p·w_i^{p−1} = |y_i|.
    The outer root-find is on λ, each w_i is an inner monotone root.
    """
    a = np.abs(y)
    if np.sum((a / radius) ** p) <= 1.0:
        return y.copy(), 0

    def magnitudes(lam):
        w = np.empty_like(a)
        for i, ai in enumerate(a):
            if ai == 0.0:
                w[i] = 0.0
            else:
                w[i] = scipy.optimize.brentq(lambda t: t + lam * p * t ** (p - 1) - ai, 0.0, ai, xtol=1e-15)
        return w

    def excess(lam):
        return np.sum((magnitudes(lam) / radius) ** p) - 1.0

    hi = 1.0
    while excess(hi) > 0:
        hi *= 2.0
    lam, info = scipy.optimize.brentq(excess, 0.0, hi, xtol=1e-15, full_output=True, disp=False)
    return np.sign(y) * magnitudes(lam), info.iterations


@_project.register
def _(s: Ellipsoid, x, params):
    return _project_ellipsoid(s.center, s.semiaxes, x)


def _project_ellipsoid(center: Vector, semiaxes: Vector, x: Vector) -> ProjectionResult:
    """ z_i = c_i + σ_i²·y_i/(σ_i² + λ) with the multiplier λ ≥ 0 making z a boundary point

    The constraint residual is decreasing in λ and nonpositive at λ = max σ · ‖y‖,
    so the root is bracketed in [0, λ_max].
    """
    y = x - center
    s2 = semiaxes ** 2
    if np.sum(y ** 2 / s2) <= 1.0:
        return _result(x, x)

    def residual(lam):
        return float(np.sum(s2 * y ** 2 / (s2 + lam) ** 2)) - 1.0

    lam_max = float(semiaxes.max() * np.linalg.norm(y))
    lam, info = scipy.optimize.brentq(residual, 0.0, lam_max, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                      maxiter=100, full_output=True, disp=False)
    # Newton polish: one step, kept only if it stays in the bracket and improves the residual
    derivative = -2.0 * float(np.sum(s2 * y ** 2 / (s2 + lam) ** 3))
    if derivative < 0:
        polished = lam - residual(lam) / derivative
        if 0.0 <= polished <= lam_max and abs(residual(polished)) < abs(residual(lam)):
            lam = polished
    return _result(x, center + s2 * y / (s2 + lam), info.iterations)


@_project.register
def _(s: Cylinder, x, params):
    t, y = s.split(x[None, :])
    t, y = float(t[0]), y[0]
    if s.extent is not None:
        t = min(max(t, s.extent[0]), s.extent[1])
    cs = s.crosssection
    if isinstance(cs, Ellipsoid):
        # The axis coordinate of y already sits on the center; the ellipsoid formula keeps it there
        y_proj = _project_ellipsoid(cs.center, cs.semiaxes, y).point
    else:
        y_proj = _project(cs, y, params).point
    return _result(x, y_proj + t * s.axis_dir)


@_project.register
def _(s: SublevelSet, x, params):
    point, iterations = s.function.project_sublevel(x, s.level)
    return _result(x, point, iterations)


@_project.register
def _(s: PolytopeH, x, params):
    return dykstra_project(s.halfspaces, x, params)


@_project.register
def _(s: Intersection, x, params):
    return dykstra_project(s.parts, x, params)


@_project.register
def _(s: VoronoiCell, x, params):
    return VoronoiProjector(s, params).project(x)


def dykstra_project(parts: Sequence[SetExpr], x: Vector, params: ProjectionParams = DEFAULT_PARAMS) -> ProjectionResult:
    """ Project x onto the intersection of `parts` with Dykstra's algorithm

    Each cycle projects onto every part in turn, carrying one correction vector per part.
    The cycle stops when the correction vectors move less than `params.tol` in total.
    An empty intersection is not detected: it shows up as `converged=False`.

    Args:
        parts: The sets to intersect. Each is projected with euclid_project()
        x: The point to project
        params: Tolerance and cycle budget
    """
    parts = list(parts)
    x = np.asarray(x, dtype=float)
    for part in parts:
        check_dimension(x, part.dim)

    # Single parts and intersections that already hold x need no iterations
    if len(parts) == 1:
        return euclid_project(parts[0], x, params)
    if all(contains(part, x, 0.0) for part in parts):
        return _result(x, x)

    point = x.copy()
    corrections = [np.zeros_like(x) for _ in parts]
    for cycle in range(1, params.max_iter + 1):
        change = 0.0
        for i, part in enumerate(parts):
            shifted = point + corrections[i]
            projected = _project(part, shifted, params).point
            new_correction = shifted - projected
            change += float(np.sum((new_correction - corrections[i]) ** 2))
            corrections[i] = new_correction
            point = projected
        if np.sqrt(change) < params.tol:
            return _result(x, point, cycle, True)

    logger.warning('dykstra_project: no convergence after %d cycles (%d parts)', params.max_iter, len(parts))
    return _result(x, point, params.max_iter, False)


@class_logger
class VoronoiProjector:
    """ Best-effort projection onto a Voronoi cell

    The cell is {z: g(z) ≤ 0} with g(z) = min_p ‖z − p‖ − dist(z, A). The nearest site p* to x
    dominates: we first project onto the bisector halfspace between p* and the competitor's
    nearest point to x, then repair feasibility by minimizing ‖z − x‖² under g(z) ≤ 0 with SLSQP.
    """

    def __init__(self, cell: VoronoiCell, params: ProjectionParams):
        self.cell = cell
        self.params = params

    def _gap(self, z: Vector) -> float:
        sites = self.cell.site_matrix
        nearest_site = float(np.min(np.linalg.norm(sites - z, axis=1)))
        return nearest_site - _project(self.cell.competitor, z, self.params).distance

    def project(self, x: Vector) -> ProjectionResult:
        if self._gap(x) <= 0:
            return _result(x, x)

        sites = self.cell.site_matrix
        site = sites[int(np.argmin(np.linalg.norm(sites - x, axis=1)))]
        rival = _project(self.cell.competitor, x, self.params).point

        # Bisector halfspace {z: ‖z − site‖ ≤ ‖z − rival‖} contains the cell
        start = site
        if np.linalg.norm(rival - site) > 0:
            bisector = Halfspace(rival - site, (np.dot(rival, rival) - np.dot(site, site)) / 2.0)
            start = _project(bisector, x, self.params).point
            if self._gap(start) > 0:
                start = site

        res = scipy.optimize.minimize(
            lambda z: 0.5 * float(np.sum((z - x) ** 2)),
            start,
            jac=lambda z: z - x,
            constraints=[{'type': 'ineq', 'fun': lambda z: -self._gap(z)}],
            method='SLSQP',
            options={'maxiter': min(self.params.max_iter, 500), 'ftol': 1e-12},
        )
        point = res.x
        converged = bool(res.success) and self._gap(point) <= MEMBER_TOL
        if self._gap(point) > 0:
            point = self._pull_back(site, point, start)
        if not converged:
            self.logger.warning('%s: projection did not converge (%s)', type(self).__name__, res.message)
        return _result(x, point, int(res.nit), converged)

    def _pull_back(self, site: Vector, point: Vector, start: Vector) -> Vector:
        """ The last point of the cell on the segment from the site to `point`; `start` when the site is not inside """
        if self._gap(site) >= 0:
            return start
        direction = point - site
        theta = scipy.optimize.brentq(lambda t: self._gap(site + t * direction), 0.0, 1.0, xtol=1e-14)
        # Step back past the root's bracket so the answer satisfies g ≤ 0 exactly
        return site + max(theta - 1e-12, 0.0) * direction
