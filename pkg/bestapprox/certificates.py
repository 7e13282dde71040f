""" Uniqueness and existence certificates for best approximation pairs

Both certificates walk a cascade of rules and report the first one that fires,
together with a human-readable trace of every step:

    cert = certify_uniqueness([Box(...)], [Ellipsoid(...)], NormSpec(2))
    cert.verdict    # UniquenessVerdict.AT_MOST_ONE
    cert.rule       # 'strictNormSecondSetStrictlyConvex'

A certificate never claims more than its hypotheses allow:
AtMostOne and Exists come from verified rules, NotUnique only from a computed witness,
and SuspectedNotAttained is a heuristic downgrade, never a proof.
"""
import enum
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exc import DimensionMismatchError
from .classify import (classify_strict_convexity, boundary_segments_directions, difference_span, is_polyhedral,
                       recession_cone_generators, shared_recession_direction, is_recession_direction)
from .geometry import NormSpec, is_strictly_convex_norm, subspaces_intersect
from .sets import (SetExpr, Halfspace, AffineSubspace, Intersection, Cylinder, VoronoiCell,
                   contains, bounding_box)
from .solvers import BapResult, SolverParams, AlternatingProjections, is_fixed_point

logger = logging.getLogger(__name__)

# Up to this dimension the coercivity check tries all 3^n − 1 sign patterns, not only coordinate rays
DIAGONAL_RAYS_MAX_DIM = 4


class UniquenessVerdict(enum.Enum):
    AT_MOST_ONE = 'AtMostOne'
    NOT_UNIQUE = 'NotUnique'
    UNKNOWN = 'Unknown'


class ExistenceVerdict(enum.Enum):
    EXISTS = 'Exists'
    SUSPECTED_NOT_ATTAINED = 'SuspectedNotAttained'
    UNKNOWN = 'Unknown'


class UniquenessRule:
    """ Identifiers of the uniqueness rules, in increasing order of what they need to check """
    STRICTLY_CONVEX_SETS = 'strictlyConvexSets'
    STRICTLY_CONVEX_INTERSECTIONS = 'strictlyConvexIntersections'
    FIRST_SET_STRICTLY_CONVEX = 'strictNormFirstSetStrictlyConvex'
    SECOND_SET_STRICTLY_CONVEX = 'strictNormSecondSetStrictlyConvex'
    NO_PARALLEL_INTERVALS = 'noParallelBoundaryIntervals'
    DIFFERENCE_SETS_TRIVIAL = 'differenceSetsTrivial'
    COMPUTED_WITNESS = 'computedWitness'
    NONE = 'none'


class ExistenceRule:
    INTERSECTION_NONEMPTY = 'intersectionNonempty'
    BOTH_COMPACT = 'bothCompact'
    FINITE_DIM_CLOSED_BOUNDED = 'finiteDimClosedBounded'
    FINITE_DIM_COERCIVE = 'finiteDimCoercive'
    RECESSION_CONES_TRIVIAL = 'recessionConesTrivial'
    FINITE_DIM_AFFINE = 'finiteDimAffine'
    POLYHEDRAL = 'polyhedral'
    VORONOI_CELL = 'voronoiCell'
    HYPERPARABOLOID = 'hyperparaboloid'
    HYPERCYLINDERS = 'hypercylinders'
    MIN_NORM_ATTAINED = 'minNormAttained'
    NONE = 'none'


@dataclass(frozen=True, eq=False)
class UniquenessCertificate:
    """ At most one best approximation pair?

    Attributes:
        verdict: AtMostOne, NotUnique, or Unknown
        rule: The rule that decided the verdict
        trace: One line per step of the cascade
        witness: For NotUnique: two best approximation pairs that differ
    """
    verdict: UniquenessVerdict
    rule: str
    trace: Tuple[str, ...] = ()
    witness: Optional[Tuple[BapResult, BapResult]] = None

    def to_dict(self) -> dict:
        return {
            'verdict': self.verdict.value,
            'rule': self.rule,
            'trace': list(self.trace),
            'witness': None if self.witness is None else [
                {'a': r.a.tolist(), 'b': r.b.tolist(), 'distance': r.distance} for r in self.witness
            ],
        }


@dataclass(frozen=True, eq=False)
class ExistenceCertificate:
    """ Is dist(A, B) attained?

    Attributes:
        verdict: Exists, SuspectedNotAttained, or Unknown
        rule: The rule that decided the verdict
        trace: One line per step of the cascade
        probe: The Euclidean alternating projections run the cascade looked at
    """
    verdict: ExistenceVerdict
    rule: str
    trace: Tuple[str, ...] = ()
    probe: Optional[BapResult] = None

    def to_dict(self) -> dict:
        return {'verdict': self.verdict.value, 'rule': self.rule, 'trace': list(self.trace)}


class CatalogEntry(NamedTuple):
    """ One sufficient condition for dist(A, B) to be attained """
    rule: str
    statement: str
    machine_checkable: bool


EXISTENCE_CATALOG: Tuple[CatalogEntry, ...] = (
    CatalogEntry(ExistenceRule.INTERSECTION_NONEMPTY, 'A and B intersect', True),
    CatalogEntry(ExistenceRule.BOTH_COMPACT, 'A and B are compact', True),
    CatalogEntry(ExistenceRule.FINITE_DIM_CLOSED_BOUNDED,
                 'finite dimension, A and B closed, one of them bounded', True),
    CatalogEntry(ExistenceRule.FINITE_DIM_COERCIVE,
                 'finite dimension, A and B closed, ‖a − b‖ → ∞ as ‖(a, b)‖ → ∞ over A × B', True),
    CatalogEntry(ExistenceRule.RECESSION_CONES_TRIVIAL,
                 'A and B closed convex, B locally compact, their recession cones share only 0', True),
    CatalogEntry(ExistenceRule.FINITE_DIM_AFFINE, 'A and B are finite-dimensional affine subspaces', True),
    CatalogEntry(ExistenceRule.POLYHEDRAL, 'finite dimension, A and B polyhedral', True),
    CatalogEntry(ExistenceRule.VORONOI_CELL,
                 'finite dimension, A closed, B the Voronoi cell of a bounded site set with respect to A', True),
    CatalogEntry(ExistenceRule.HYPERPARABOLOID,
                 'Hilbert space, A a closed hyperplane, B the full hyperparaboloid of a point with respect to A', True),
    CatalogEntry(ExistenceRule.HYPERCYLINDERS,
                 'finite dimension, A and B full-line cylinders over bounded cross-sections', True),
    CatalogEntry(ExistenceRule.MIN_NORM_ATTAINED,
                 'Hilbert space, P_A∘P_B has a fixed point (the minimal-norm element of the closure of A − B '
                 'is attained)', True),
    # Documentation only: these need facts about infinite-dimensional spaces
    CatalogEntry('reflexiveWeaklyCompact', 'reflexive space, A weakly compact, B weakly closed', False),
    CatalogEntry('reflexiveDifferenceClosed', 'reflexive space, A and B convex, A − B closed', False),
    CatalogEntry('reflexiveWeaklyCompactSums',
                 'reflexive space, A and B are sums of a weakly compact set and a part whose differences are '
                 'weakly closed', False),
    CatalogEntry('reflexiveAffineComplemented',
                 'reflexive space, A a closed affine subspace with a complemented linear part, '
                 'B affine with closed image under the complement projection', False),
    CatalogEntry('reflexiveAffineFiniteDim',
                 'reflexive space, A a closed affine subspace, B a finite-dimensional affine subspace', False),
    CatalogEntry('reflexiveAffineFiniteCodim',
                 'reflexive space, A a closed affine subspace of finite codimension, B affine', False),
    CatalogEntry('reflexiveAffineRegular',
                 'reflexive space, A and B closed affine subspaces whose linear parts are boundedly regular', False),
    CatalogEntry('proximinalCompactSubset',
                 'B proximinal, A compact', False),
    CatalogEntry('voronoiHilbert',
                 'Hilbert space, A weakly sequentially closed, B the Voronoi cell of one point with respect to A',
                 False),
)


def _flatten(parts: Iterable[SetExpr]) -> List[SetExpr]:
    """ Intersections spread into their parts """
    flat = []
    for part in parts:
        if isinstance(part, Intersection):
            flat.extend(_flatten(part.parts))
        else:
            flat.append(part)
    return flat


# region Uniqueness

_PAIR_RULE_ORDER = (
    UniquenessRule.FIRST_SET_STRICTLY_CONVEX,
    UniquenessRule.SECOND_SET_STRICTLY_CONVEX,
    UniquenessRule.NO_PARALLEL_INTERVALS,
)


def _pair_rule(A_i: SetExpr, B_j: SetExpr, strict: dict, trace: list) -> Optional[str]:
    """ Why no pair of parallel nondegenerate intervals can sit on ∂A_i and ∂B_j; None when we cannot tell """
    if strict[id(A_i)]:
        return UniquenessRule.FIRST_SET_STRICTLY_CONVEX
    if strict[id(B_j)]:
        return UniquenessRule.SECOND_SET_STRICTLY_CONVEX
    directions_a = boundary_segments_directions(A_i)
    directions_b = boundary_segments_directions(B_j)
    if directions_a is None or directions_b is None:
        trace.append(f'{A_i.tag} vs {B_j.tag}: flat boundary directions unknown')
        return None
    for U in directions_a:
        for V in directions_b:
            if subspaces_intersect(U, V):
                trace.append(f'{A_i.tag} vs {B_j.tag}: flat boundary pieces share a direction')
                return None
    return UniquenessRule.NO_PARALLEL_INTERVALS


def _verified_witness(A_parts, B_parts, witness, tol: float) -> bool:
    r0, r1 = witness
    close = max(10 * tol, 1e-6)
    members = all(contains(s, r.a, 1e-6) for s in A_parts for r in witness) and \
        all(contains(s, r.b, 1e-6) for s in B_parts for r in witness)
    differ = float(np.linalg.norm(r0.pair - r1.pair)) > 10 * tol
    return members and differ and abs(r0.distance - r1.distance) <= close


def certify_uniqueness(A_parts: Sequence[SetExpr], B_parts: Sequence[SetExpr], norm: NormSpec,
                       witness: Optional[Tuple[BapResult, BapResult]] = None,
                       tol: float = 1e-10) -> UniquenessCertificate:
    """ Certify that (∩A_parts, ∩B_parts) has at most one best approximation pair

    Cascade:

    1. every part is strictly convex: AtMostOne in any norm
    2. the norm is strictly convex, and for every pair of parts (A_i, B_j) either one of them is
       strictly convex, or the flat pieces of their boundaries have no direction in common: AtMostOne
    3. the norm is strictly convex and (A − A) ∩ (B − B) = {0}: AtMostOne
    4. otherwise: NotUnique when a verified `witness` is supplied, Unknown when it is not

    Disjointness of A and B is the caller's claim and is not checked.

    Args:
        A_parts, B_parts: The parts; Intersection parts are spread out
        norm: The problem norm
        witness: Two distance-equal best approximation pairs, e.g. from multistart_bap()
        tol: Solver tolerance the witness was computed with
    """
    A_parts, B_parts = _flatten(A_parts), _flatten(B_parts)
    if not A_parts or not B_parts:
        return UniquenessCertificate(UniquenessVerdict.UNKNOWN, UniquenessRule.NONE, ('no parts given',))
    trace = []
    strict = {id(s): classify_strict_convexity(s).is_yes for s in A_parts + B_parts}
    trace.append('strictly convex parts: A={} B={}'.format(
        [strict[id(s)] for s in A_parts], [strict[id(s)] for s in B_parts]))

    def at_most_one(rule):
        trace.append(f'fired: {rule}')
        if witness is not None:
            logger.warning('certify_uniqueness: a witness of non-uniqueness was supplied, but %s holds; ignored', rule)
        return UniquenessCertificate(UniquenessVerdict.AT_MOST_ONE, rule, tuple(trace))

    # Strictly convex sets
    if all(strict.values()):
        if len(A_parts) > 1 or len(B_parts) > 1:
            return at_most_one(UniquenessRule.STRICTLY_CONVEX_INTERSECTIONS)
        return at_most_one(UniquenessRule.STRICTLY_CONVEX_SETS)

    if is_strictly_convex_norm(norm):
        # Pairwise: the strongest requirement over all pairs is the one reported
        rules = [_pair_rule(A_i, B_j, strict, trace) for A_i in A_parts for B_j in B_parts]
        if all(rule is not None for rule in rules):
            return at_most_one(max(rules, key=_PAIR_RULE_ORDER.index))

        # Difference sets
        span_a = difference_span(Intersection(tuple(A_parts)) if len(A_parts) > 1 else A_parts[0])
        span_b = difference_span(Intersection(tuple(B_parts)) if len(B_parts) > 1 else B_parts[0])
        if span_a is not None and span_b is not None:
            if not subspaces_intersect(span_a, span_b):
                return at_most_one(UniquenessRule.DIFFERENCE_SETS_TRIVIAL)
            trace.append('difference sets share a nonzero vector')
        else:
            trace.append('difference sets unknown')
    else:
        trace.append(f'norm {norm} is not strictly convex')

    if witness is not None:
        if _verified_witness(A_parts, B_parts, witness, tol):
            trace.append('fired: computed witness of two distinct distance-equal pairs')
            return UniquenessCertificate(UniquenessVerdict.NOT_UNIQUE, UniquenessRule.COMPUTED_WITNESS,
                                         tuple(trace), witness)
        trace.append('witness rejected')
    return UniquenessCertificate(UniquenessVerdict.UNKNOWN, UniquenessRule.NONE, tuple(trace))

# endregion

# region Existence


def _is_hypercylinder(s: SetExpr) -> bool:
    return isinstance(s, Cylinder) and s.is_full_line


def _voronoi_rule(A: SetExpr, B: SetExpr, norm: NormSpec) -> Optional[str]:
    """ One set is a Voronoi cell whose competitor is the other set """
    for cell, other in ((A, B), (B, A)):
        if isinstance(cell, VoronoiCell) and cell.competitor == other:
            hyperplane = isinstance(other, Halfspace) or \
                (isinstance(other, AffineSubspace) and other.subspace_dim == other.dim - 1)
            if norm.is_euclidean and hyperplane and len(cell.sites) == 1:
                return ExistenceRule.HYPERPARABOLOID
            return ExistenceRule.VORONOI_CELL
    return None


def _probe_directions(probe: BapResult):
    """ Unit rays to test for a shared recession direction

    Every nonzero direction with entries in {-1, 0, 1} up to DIAGONAL_RAYS_MAX_DIM dimensions,
    the coordinate rays above that, and ±(a − b) of the probe pair.
    """
    dim = probe.a.size
    if dim <= DIAGONAL_RAYS_MAX_DIM:
        rays = [np.array(v, dtype=float) for v in itertools.product((-1.0, 0.0, 1.0), repeat=dim) if any(v)]
    else:
        rays = [sign * e for e in np.eye(dim) for sign in (1.0, -1.0)]
    gap = probe.a - probe.b
    if np.linalg.norm(gap) > 0:
        rays += [gap, -gap]
    return [d / np.linalg.norm(d) for d in rays]


def certify_existence(A: SetExpr, B: SetExpr, norm: NormSpec, dim: Optional[int] = None,
                      params: SolverParams = SolverParams(), probe: Optional[BapResult] = None) -> ExistenceCertificate:
    """ Certify that dist(A, B) is attained

    Cascade:

    1. a Euclidean alternating projections probe from the origin closes the gap: the sets intersect
    2. both sets bounded; then exactly one bounded
    3. both polyhedral; then both affine
    4. a Voronoi cell against its own competitor (a hyperparaboloid when the competitor is a hyperplane)
    5. two full-line cylinders
    6. recession cones known and sharing only 0
    7. Euclidean norm: the probe converged to a fixed point of P_A∘P_B
    8. probe-based coercivity: a bounded converged probe, and no tested ray (coordinate, diagonal, or
       along the probe gap) recedes in both sets
    9. the probe diverged, or ran out of budget drifting outward, along a direction that recedes
       in both sets: SuspectedNotAttained
    10. otherwise Unknown

    Args:
        A, B: The sets
        norm: The problem norm
        dim: The ambient dimension; checked against the sets
        params: Controls of the probe run
        probe: A finished probe run to reuse: alternating projections from the origin
    """
    if A.dim != B.dim:
        raise DimensionMismatchError(A.dim, B.dim, 'set B')
    if dim is not None and dim != A.dim:
        raise DimensionMismatchError(dim, A.dim, 'sets')

    trace = []

    def exists(rule):
        trace.append(f'fired: {rule}')
        return ExistenceCertificate(ExistenceVerdict.EXISTS, rule, tuple(trace), probe)

    if probe is None:
        probe = AlternatingProjections(A, B, params).run(np.zeros(A.dim))
    trace.append('probe: distance={:.12g} iterations={} converged={} diverging={} runaway={}'.format(
        probe.distance, probe.iterations, probe.converged, probe.diverging, probe.runaway))
    if probe.converged and probe.distance < 10 * params.tol:
        return exists(ExistenceRule.INTERSECTION_NONEMPTY)

    bounded_a, bounded_b = bounding_box(A) is not None, bounding_box(B) is not None
    trace.append(f'bounded: A={bounded_a} B={bounded_b}')
    if bounded_a and bounded_b:
        return exists(ExistenceRule.BOTH_COMPACT)
    if bounded_a or bounded_b:
        return exists(ExistenceRule.FINITE_DIM_CLOSED_BOUNDED)

    if is_polyhedral(A) and is_polyhedral(B):
        return exists(ExistenceRule.POLYHEDRAL)
    if isinstance(A, AffineSubspace) and isinstance(B, AffineSubspace):
        return exists(ExistenceRule.FINITE_DIM_AFFINE)

    rule = _voronoi_rule(A, B, norm)
    if rule is not None:
        return exists(rule)

    if _is_hypercylinder(A) and _is_hypercylinder(B):
        return exists(ExistenceRule.HYPERCYLINDERS)

    cone_a, cone_b = recession_cone_generators(A), recession_cone_generators(B)
    if cone_a.is_known and cone_b.is_known:
        shared = shared_recession_direction(cone_a, cone_b)
        if shared is None:
            return exists(ExistenceRule.RECESSION_CONES_TRIVIAL)
        trace.append('recession cones share the direction {}'.format(np.round(shared, 6).tolist()))
    else:
        trace.append('recession cones unknown')

    bounded_probe = probe.converged and not probe.diverging
    if bounded_probe and norm.is_euclidean and is_fixed_point(A, B, probe, max(100 * params.tol, 1e-8)):
        return exists(ExistenceRule.MIN_NORM_ATTAINED)

    if bounded_probe and not (cone_a.is_known and cone_b.is_known):
        receding = [d for d in _probe_directions(probe)
                    if is_recession_direction(A, probe.a, d) and is_recession_direction(B, probe.b, d)]
        if not receding:
            trace.append('no tested ray recedes in both sets')
            return exists(ExistenceRule.FINITE_DIM_COERCIVE)
        trace.append('rays receding in both sets: {}'.format([np.round(d, 6).tolist() for d in receding]))

    if (probe.diverging or probe.runaway) and probe.escape is not None:
        d = probe.escape
        if is_recession_direction(A, probe.a, d) and is_recession_direction(B, probe.b, d):
            trace.append('probe escaped along {}, a recession direction of both sets'.format(
                np.round(d, 6).tolist()))
            return ExistenceCertificate(ExistenceVerdict.SUSPECTED_NOT_ATTAINED, ExistenceRule.NONE,
                                        tuple(trace), probe)
        trace.append('probe diverged, but not along a common recession direction')

    return ExistenceCertificate(ExistenceVerdict.UNKNOWN, ExistenceRule.NONE, tuple(trace), probe)

# endregion
