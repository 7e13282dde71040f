""" Best approximation pairs between two convex sets

TL;DR
=====

Two disjoint convex sets A and B. Which points a ∈ A and b ∈ B are closest to each other?

```python
from bestapprox import Box, Ellipsoid, NormSpec, alternating_projections

A = Box([-2, -2], [2, 0])
B = Ellipsoid([0, 2], [2, 1])

result = alternating_projections(A, B, x0=[0, 0])
result.a, result.b      # (0, 0), (0, 1)
result.distance         # 1.0
```

A pair (a, b) that attains dist(A, B) = inf ‖a − b‖ is a *best approximation pair*.
It may not exist, and when it does it may not be unique. This package finds such pairs,
tells you whether there can be another one, and whether there is one at all.

Sets
====

Every set is a frozen dataclass with the same small interface: `contains()`, `is_boundary_point()`,
`bounding_box()`, and a Euclidean projection `euclid_project()`.

* `Halfspace(normal, offset)`: {x: ⟨normal, x⟩ ≤ offset}
* `Box(lo, hi)`
* `NormBall(center, radius, norm)`
* `Ellipsoid(center, semiaxes)`: axis-aligned
* `PolytopeH(halfspaces)`: a polytope as an intersection of halfspaces
* `AffineSubspace(point, basis)`
* `SegmentSet(Segment(a0, a1))`
* `Intersection(parts)`: projected onto with Dykstra's algorithm
* `Cylinder(crosssection, axis_point, axis_dir, extent)`: a ball or an ellipse swept along an axis
* `VoronoiCell(sites, competitor)`: points closer to the sites than to another set
* `SublevelSet(function, level)`: {x: f(x) ≤ level} for an affine, quadratic or exponential f

Norms are ℓp norms: `NormSpec(2)`, `NormSpec(1)`, `NormSpec(INF)`.

Solvers
=======

`alternating_projections(A, B, x0)`
-----------------------------------

Euclidean norm only: b_k = P_B(a_k), a_{k+1} = P_A(b_k). The distance never increases.
When the iterates run away past `SolverParams.blowup_radius`, the result is flagged `diverging`:
the distance is probably not attained.

`general_norm_descent(A, B, norm, x0, y0)`
------------------------------------------

Any ℓp norm: a projected subgradient method on (a, b) with constant or diminishing steps.

`simultaneous_projection_solve(A_parts, B_parts, anchor)`
---------------------------------------------------------

Both sets given as intersections. Projects onto every part, averages, and polishes with Dykstra.

`multistart_bap(A, B, norm, n_starts)`
--------------------------------------

Seeded runs from many starting points, clustered. More than one cluster at the optimal value
is a witness that the pair is not unique.

Certificates
============

```python
from bestapprox import certify_uniqueness, certify_existence

cert = certify_uniqueness([A], [B], NormSpec(2))
cert.verdict    # UniquenessVerdict.AT_MOST_ONE
cert.rule       # 'strictNormSecondSetStrictlyConvex'

certify_existence(A, B, NormSpec(2)).rule  # 'bothCompact'
```

Uniqueness: strictly convex sets; a strictly convex norm with one strictly convex set,
or with no parallel flat pieces on the two boundaries; difference sets that only share 0.

Existence: intersecting sets, a bounded set, polyhedra, affine subspaces, Voronoi cells,
hypercylinders, recession cones with nothing in common, and a few probe-based rules.
When a probe run escapes, or keeps drifting outward, along a direction both sets recede in,
the verdict is `SuspectedNotAttained`.

Oracle
======

`grid_min_distance(A, B, norm, OracleConfig(bbox, resolution))` enumerates a grid in up to 3 dimensions.
It is slow and dumb, and therefore a good judge of everything else.

Command line
============

```console
$ bestapprox solve --spec problem.json
$ bestapprox certify --spec problem.json --out report.json
$ bestapprox oracle --spec problem.json --resolution 0.02 --plotdata boundary.csv
$ bestapprox reproduce
```

See `bestapprox/problem.py` for the problem file format, and `bestapprox/problems/` for examples.
"""

# Geometry
from .geometry import NormSpec, INF, Segment
from .geometry import norm_eval, is_strictly_convex_norm, segment_point, are_parallel_segments

# Sets
from .sets import SetExpr, Halfspace, Box, NormBall, Ellipsoid, PolytopeH, AffineSubspace, SegmentSet
from .sets import Intersection, Cylinder, VoronoiCell, SublevelSet
from .sets import contains, is_boundary_point, bounding_box
from .functions import AffineFunction, QuadraticFunction, ExpFunction
from .classify import classify_strict_convexity, recession_cone_generators, boundary_segments_directions

# Projections
from .projections import ProjectionParams, euclid_project, dykstra_project

# Solvers
from .solvers import SolverParams, StepSchedule, BapResult
from .solvers import alternating_projections, general_norm_descent, simultaneous_projection_solve, multistart_bap

# Certificates
from .certificates import UniquenessVerdict, ExistenceVerdict, certify_uniqueness, certify_existence

# Oracle
from .oracle import OracleConfig, grid_min_distance

# Problem files
from .problem import ProblemSpec, parse_problem, load_problem, print_problem

# Exceptions
from .exc import BestApproxError, InvalidSetError, PreconditionError, ProblemSchemaError
