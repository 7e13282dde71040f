""" Boundary samples of 2-D sets, as CSV for plotting

Rows are `kind,x1,x2` with kind one of `boundary_a`, `boundary_b`, `bap_a`, `bap_b`.
Boundaries are traced by bisection along rays cast from an interior point of each set.
"""
import csv
import logging
from typing import Iterable, List, Optional, TextIO, Tuple

import numpy as np

from .exc import PreconditionError
from .geometry import Vector
from .sets import SetExpr, BBox, contains, contains_points, is_boundary_point, bounding_box, union_box
from .solvers import BapResult

logger = logging.getLogger(__name__)

# Samples must pass is_boundary_point() at this tolerance
SAMPLE_TOL = 1e-6

BISECTION_STEPS = 60

PLOT_BOX_PADDING = 0.5

FALLBACK_PLOT_BOX = (-10.0, 10.0)

Row = Tuple[str, float, float]


def plot_box(A: SetExpr, B: SetExpr, bbox: Optional[BBox] = None) -> BBox:
    """ The drawing area: `bbox` if given, else the padded bounding box of A ∪ B, else [−10, 10]² """
    if bbox is not None:
        return np.asarray(bbox[0], dtype=float), np.asarray(bbox[1], dtype=float)
    box = union_box(bounding_box(A), bounding_box(B))
    if box is None:
        return np.full(2, FALLBACK_PLOT_BOX[0]), np.full(2, FALLBACK_PLOT_BOX[1])
    return box[0] - PLOT_BOX_PADDING, box[1] + PLOT_BOX_PADDING


def interior_point(s: SetExpr, box: BBox, n: int = 41) -> Optional[Vector]:
    """ The centroid of the grid points of s in the box; inside s because s is convex """
    lo, hi = box
    X = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], n), np.linspace(lo[1], hi[1], n)), axis=-1).reshape(-1, 2)
    members = X[contains_points(s, X)]
    if not len(members):
        return None
    center = members.mean(axis=0)
    return center if contains(s, center) else members[0]


def _exit_length(origin: Vector, direction: Vector, box: BBox) -> float:
    """ How far the ray may go before leaving the box """
    lo, hi = box
    with np.errstate(divide='ignore'):
        limits = np.where(direction > 0, (hi - origin) / direction,
                          np.where(direction < 0, (lo - origin) / direction, np.inf))
    return float(limits.min())


def boundary_samples(s: SetExpr, box: BBox, n_rays: int = 180) -> np.ndarray:
    """ Points of ∂s inside the box, one per ray at most

    Rays that leave the box while still inside s give no sample.
    """
    if s.dim != 2:
        raise PreconditionError('boundary_samples', f'plot data needs a 2-D set, got dimension {s.dim}')
    center = interior_point(s, box)
    if center is None:
        logger.warning('boundary_samples: %s has no point inside the plot box', type(s).__name__)
        return np.empty((0, 2))

    samples = []
    for theta in np.linspace(0.0, 2 * np.pi, n_rays, endpoint=False):
        d = np.array([np.cos(theta), np.sin(theta)])
        t_out = _exit_length(center, d, box)
        if contains(s, center + t_out * d):
            continue
        t_in = 0.0
        for _ in range(BISECTION_STEPS):
            t = (t_in + t_out) / 2
            if contains(s, center + t * d):
                t_in = t
            else:
                t_out = t
        x = center + t_in * d
        if is_boundary_point(s, x, SAMPLE_TOL):
            samples.append(x)
    return np.array(samples).reshape(-1, 2)


def plot_rows(A: SetExpr, B: SetExpr, result: Optional[BapResult] = None, bbox: Optional[BBox] = None,
              n_rays: int = 180) -> List[Row]:
    """ All rows of the plot data: both boundaries, then the best approximation pair """
    box = plot_box(A, B, bbox)
    rows = []
    for kind, s in (('boundary_a', A), ('boundary_b', B)):
        rows.extend((kind, float(x), float(y)) for x, y in boundary_samples(s, box, n_rays))
    if result is not None:
        rows.append(('bap_a', float(result.a[0]), float(result.a[1])))
        rows.append(('bap_b', float(result.b[0]), float(result.b[1])))
    return rows


def write_csv(rows: Iterable[Row], f: TextIO):
    writer = csv.writer(f)
    writer.writerow(('kind', 'x1', 'x2'))
    writer.writerows((kind, repr(x), repr(y)) for kind, x, y in rows)
