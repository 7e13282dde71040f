""" The shipped problem corpus and its ground truths

Every file under `bestapprox/problems/` is a classical instance with a known answer.
`check_case()` compares one report (as produced by `bestapprox.cli.run()`) against its ground truth,
`check_criteria()` checks the headline claims that span several instances.

    for spec in load_corpus():
        report, _ = run('all', spec)
        row = check_case(spec, report)
        row.passed
"""
import math
import os
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from funcy import first

from .certificates import UniquenessRule, ExistenceRule
from .geometry import norm_eval_rows, are_parallel_segments
from .problem import ProblemSpec, load_problem
from .sets import SegmentSet

PROBLEMS_DIR = os.path.join(os.path.dirname(__file__), 'problems')

CORPUS = (
    'rectangle_ellipse_euclidean',
    'rectangle_ellipse_linf',
    'skew_segments_linf',
    'ellipse_over_cylinder',
    'square_and_flat_drop',
    'pentagon_and_drop',
    'skew_cylinders',
    'lens_intersections',
    'exponential_epigraphs',
)

LENS_GAP = 3.0 - math.sqrt(3.0)


@dataclass(frozen=True)
class GroundTruth:
    """ What a corpus instance must report

    Attributes:
        distance: dist(A, B), checked within `distance_tol`
        distance_range: An open interval the distance must fall in, for infima that are not attained
        a, b: The unique best approximation pair, checked within `pair_tol`
        uniqueness: Acceptable uniqueness verdicts
        uniqueness_rule: The rule that must fire
        existence, existence_rule: Same for existence
        diverging: The solver must flag the run as diverging
        clusters: (min, max) multistart clusters; max None is unbounded
        common_difference: All multistart clusters share a − b
        oracle_clusters: Clusters of near-optimal grid pairs
    """
    distance: Optional[float] = None
    distance_tol: float = 1e-4
    distance_range: Optional[Tuple[float, float]] = None
    a: Optional[Tuple[float, ...]] = None
    b: Optional[Tuple[float, ...]] = None
    pair_tol: float = 1e-6
    uniqueness: Tuple[str, ...] = ()
    uniqueness_rule: Optional[str] = None
    existence: Tuple[str, ...] = ()
    existence_rule: Optional[str] = None
    diverging: bool = False
    clusters: Optional[Tuple[int, Optional[int]]] = None
    common_difference: bool = False
    oracle_clusters: Optional[int] = None


_NOT_AT_MOST_ONE = ('Unknown', 'NotUnique')

GROUND_TRUTH: Dict[str, GroundTruth] = {
    'rectangle_ellipse_euclidean': GroundTruth(
        distance=1.0, distance_tol=1e-6, a=(0.0, 0.0), b=(0.0, 1.0),
        uniqueness=('AtMostOne',), uniqueness_rule=UniquenessRule.SECOND_SET_STRICTLY_CONVEX,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
        clusters=(1, 1), oracle_clusters=1,
    ),
    'rectangle_ellipse_linf': GroundTruth(
        distance=1.0, uniqueness=_NOT_AT_MOST_ONE,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
        clusters=(2, None),
    ),
    'skew_segments_linf': GroundTruth(
        distance=1.5, uniqueness=_NOT_AT_MOST_ONE,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
    ),
    'ellipse_over_cylinder': GroundTruth(
        distance=2.0, uniqueness=_NOT_AT_MOST_ONE,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
        clusters=(2, None), common_difference=True,
    ),
    'square_and_flat_drop': GroundTruth(
        distance=0.5, distance_tol=1e-6, a=(0.0, 1.0), b=(0.0, 1.5),
        uniqueness=('Unknown',), uniqueness_rule=UniquenessRule.NONE,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
        clusters=(1, 1), oracle_clusters=1,
    ),
    'pentagon_and_drop': GroundTruth(
        distance=1.0, distance_tol=1e-6, a=(0.0, 1.5), b=(0.0, 2.5),
        uniqueness=('AtMostOne',), uniqueness_rule=UniquenessRule.SECOND_SET_STRICTLY_CONVEX,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
        clusters=(1, 1), oracle_clusters=1,
    ),
    'skew_cylinders': GroundTruth(
        distance=1.0, distance_tol=1e-6, a=(0.0, 0.0, 1.0), b=(0.0, 0.0, 2.0),
        uniqueness=('AtMostOne',), uniqueness_rule=UniquenessRule.NO_PARALLEL_INTERVALS,
        existence=('Exists',), existence_rule=ExistenceRule.HYPERCYLINDERS,
        clusters=(1, 1),
    ),
    'lens_intersections': GroundTruth(
        distance=LENS_GAP, a=(0.0, math.sqrt(3.0) / 2), b=(0.0, 3.0 - math.sqrt(3.0) / 2), pair_tol=1e-4,
        uniqueness=('AtMostOne',), uniqueness_rule=UniquenessRule.STRICTLY_CONVEX_INTERSECTIONS,
        existence=('Exists',), existence_rule=ExistenceRule.BOTH_COMPACT,
        oracle_clusters=1,
    ),
    'exponential_epigraphs': GroundTruth(
        distance_range=(2.0, 2.05), diverging=True,
        existence=('SuspectedNotAttained',),
    ),
}


class Check(NamedTuple):
    """ One comparison against a ground truth """
    name: str
    passed: bool
    detail: str = ''


@dataclass(frozen=True)
class CorpusRow:
    """ All checks of one corpus file, or of one acceptance criterion """
    name: str
    checks: Tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'checks': [{'name': c.name, 'passed': c.passed, 'detail': c.detail} for c in self.checks],
        }


def problem_path(name: str) -> str:
    return os.path.join(PROBLEMS_DIR, f'{name}.json')


def load_corpus() -> List[ProblemSpec]:
    """ Parse every corpus file, in corpus order """
    return [load_problem(problem_path(name)) for name in CORPUS]


# region Case checks

def _close(x, y, tol) -> bool:
    return bool(np.max(np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))) <= tol)


def _solve_checks(truth: GroundTruth, solve: dict) -> List[Check]:
    checks = []
    distance = solve['distance']
    if truth.distance is not None:
        checks.append(Check('distance', abs(distance - truth.distance) <= truth.distance_tol,
                            f'{distance:.10g} vs {truth.distance:.10g} ± {truth.distance_tol:g}'))
    if truth.distance_range is not None:
        lo, hi = truth.distance_range
        checks.append(Check('distance range', lo < distance < hi, f'{distance:.10g} in ({lo:g}, {hi:g})'))
    if truth.a is not None:
        a, b = solve['pair']
        checks.append(Check('pair', _close(a, truth.a, truth.pair_tol) and _close(b, truth.b, truth.pair_tol),
                            f'a={np.round(a, 8).tolist()} b={np.round(b, 8).tolist()}'))
    if truth.diverging or solve['diverging']:
        checks.append(Check('diverging', solve['diverging'] == truth.diverging, f'diverging={solve["diverging"]}'))
    else:
        checks.append(Check('converged', solve['converged'], f'{solve["iterations"]} iterations'))

    multistart = solve.get('multistart')
    if truth.clusters is not None and multistart is not None:
        lo, hi = truth.clusters
        count = multistart['cluster_count']
        checks.append(Check('multistart clusters', count >= lo and (hi is None or count <= hi),
                            f'{count} clusters, expected {lo}..{hi if hi is not None else "∞"}'))
    if truth.common_difference and multistart is not None:
        checks.append(Check('common difference', multistart['differences_agree'],
                            'a − b agrees across clusters' if multistart['differences_agree'] else 'a − b differs'))
    return checks


def _certificate_checks(truth: GroundTruth, report: dict) -> List[Check]:
    checks = []
    for kind, verdicts, rule in (('uniqueness', truth.uniqueness, truth.uniqueness_rule),
                                 ('existence', truth.existence, truth.existence_rule)):
        cert = report.get(kind)
        if not verdicts or cert is None:
            continue
        checks.append(Check(f'{kind} verdict', cert['verdict'] in verdicts,
                            f'{cert["verdict"]} ({cert["rule"]}), expected one of {list(verdicts)}'))
        if rule is not None:
            checks.append(Check(f'{kind} rule', cert['rule'] == rule, f'{cert["rule"]}, expected {rule}'))
    return checks


def _oracle_checks(truth: GroundTruth, spec: ProblemSpec, report: dict) -> List[Check]:
    oracle, solve = report.get('oracle'), report['solve']
    if oracle is None:
        return []
    checks = []
    if solve['converged'] and not solve['diverging']:
        bound = 2 * oracle['resolution'] * math.sqrt(spec.dimension)
        gap = abs(solve['distance'] - oracle['dist_estimate'])
        checks.append(Check('oracle agreement', gap <= bound, f'|{solve["distance"]:.6g} − '
                                                               f'{oracle["dist_estimate"]:.6g}| ≤ {bound:.3g}'))
    if truth.oracle_clusters is not None:
        checks.append(Check('oracle clusters', oracle['cluster_count'] == truth.oracle_clusters,
                            f'{oracle["cluster_count"]} clusters'))
    return checks


def check_case(spec: ProblemSpec, report: dict) -> CorpusRow:
    """ Compare one report against the ground truth of its corpus file

    Raises:
        KeyError: `spec.name` is not a corpus file
    """
    truth = GROUND_TRUTH[spec.name]
    checks = _solve_checks(truth, report['solve']) + _certificate_checks(truth, report) + \
        _oracle_checks(truth, spec, report)
    return CorpusRow(spec.name, tuple(checks))

# endregion

# region Acceptance criteria


def _all_pairs_optimal(spec: ProblemSpec, estimate: float, bound: float, samples: int = 11) -> bool:
    """ Every sampled pair of the two segments is within `bound` of the optimal value """
    ts = np.linspace(0.0, 1.0, samples)
    PA, PB = spec.A.seg.points(ts), spec.B.seg.points(ts)
    D = norm_eval_rows(spec.norm, (PA[:, None, :] - PB[None, :, :]).reshape(-1, spec.dimension))
    return bool(D.max() <= estimate + bound)


def _criterion_rectangle_euclidean(spec, report) -> List[Check]:
    truth = GROUND_TRUTH[spec.name]
    reps = report['solve']['multistart']['representatives']
    starts_agree = bool(reps) and all(_close(r['a'], truth.a, 1e-6) and _close(r['b'], truth.b, 1e-6) and
                                      abs(r['distance'] - 1.0) <= 1e-6 for r in reps)
    return [
        Check('every start reaches (0,0)/(0,1)', starts_agree, f'{len(reps)} clusters'),
        Check('rule', report['uniqueness']['rule'] == UniquenessRule.SECOND_SET_STRICTLY_CONVEX,
              report['uniqueness']['rule']),
    ]


def _criterion_rectangle_linf(spec, report) -> List[Check]:
    oracle = report['oracle']
    lo, hi = oracle['bounds_a']
    return [
        Check('distance', abs(report['solve']['distance'] - 1.0) <= 1e-4, f'{report["solve"]["distance"]:.10g}'),
        Check('near-optimal a-points span', lo[0] <= -0.98 and hi[0] >= 0.98, f'x1 in [{lo[0]:.3g}, {hi[0]:.3g}]'),
        Check('segment fit', oracle['segment_fit'] is not None, str(oracle['segment_fit'])),
        Check('never AtMostOne', report['uniqueness']['verdict'] != 'AtMostOne', report['uniqueness']['verdict']),
    ]


def _criterion_skew_segments(spec, report) -> List[Check]:
    oracle = report['oracle']
    parallel = are_parallel_segments(spec.A.seg, spec.B.seg) if isinstance(spec.A, SegmentSet) else None
    return [
        Check('distance', abs(report['solve']['distance'] - 1.5) <= 1e-4, f'{report["solve"]["distance"]:.10g}'),
        Check('every pair optimal', _all_pairs_optimal(spec, oracle['dist_estimate'], 2 * oracle['resolution']),
              f'estimate {oracle["dist_estimate"]:.6g}'),
        Check('segments not parallel', parallel is False, f'parallel={parallel}'),
    ]


def _criterion_ellipse_cylinder(spec, report) -> List[Check]:
    multistart = report['solve']['multistart']
    a_points = [r['a'] for r in multistart['representatives']]
    distinct = all(not _close(p, q, 1e-6) for i, p in enumerate(a_points) for q in a_points[i + 1:])
    gap = abs(report['solve']['distance'] - report['oracle']['dist_estimate'])
    return [
        Check('clusters', multistart['cluster_count'] >= 2, f'{multistart["cluster_count"]} clusters'),
        Check('distinct a-points', distinct, f'{len(a_points)} a-points'),
        Check('common difference', multistart['differences_agree'], ''),
        Check('oracle distance', gap <= 0.05, f'|solver − oracle| = {gap:.3g}'),
    ]


def _criterion_at_most_one(cases: Dict[str, Tuple[ProblemSpec, dict]]) -> List[Check]:
    checks = []
    for name in ('pentagon_and_drop', 'skew_cylinders'):
        _, report = cases[name]
        truth = GROUND_TRUTH[name]
        cert = report['uniqueness']
        count = report['solve']['multistart']['cluster_count']
        checks.append(Check(f'{name} AtMostOne', cert['verdict'] == 'AtMostOne' and cert['rule'] == truth.uniqueness_rule,
                            f'{cert["verdict"]} ({cert["rule"]})'))
        checks.append(Check(f'{name} single cluster', count == 1, f'{count} clusters'))
    return checks


def _criterion_not_attained(spec, report) -> List[Check]:
    solve = report['solve']
    return [
        Check('diverging', solve['diverging'], f'{solve["iterations"]} iterations'),
        Check('distance in (2, 2.05)', 2.0 < solve['distance'] < 2.05, f'{solve["distance"]:.10g}'),
        Check('SuspectedNotAttained', report['existence']['verdict'] == 'SuspectedNotAttained',
              report['existence']['verdict']),
    ]


CRITERIA = (
    ('criterion 1: Euclidean rectangle and ellipse', 'rectangle_ellipse_euclidean', _criterion_rectangle_euclidean),
    ('criterion 2: ℓ∞ rectangle and ellipse', 'rectangle_ellipse_linf', _criterion_rectangle_linf),
    ('criterion 3: ℓ∞ skew segments', 'skew_segments_linf', _criterion_skew_segments),
    ('criterion 4: ellipse over cylinder', 'ellipse_over_cylinder', _criterion_ellipse_cylinder),
    ('criterion 5: polytope and cylinder uniqueness', None, None),
    ('criterion 6: unattained infimum', 'exponential_epigraphs', _criterion_not_attained),
)


def check_criteria(cases: Dict[str, Tuple[ProblemSpec, dict]]) -> List[CorpusRow]:
    """ One row per acceptance criterion, from the reports of the whole corpus

    Args:
        cases: corpus name → (spec, report)
    """
    rows = []
    for title, name, check in CRITERIA:
        try:
            if name is None:
                checks = _criterion_at_most_one(cases)
            else:
                spec, report = cases[name]
                checks = check(spec, report)
        except (KeyError, TypeError) as e:
            checks = [Check('report complete', False, f'missing {e}')]
        rows.append(CorpusRow(title, tuple(checks)))
    return rows


def first_failure(rows: List[CorpusRow]) -> Optional[Tuple[str, Check]]:
    """ The first failed check, for the one-line summary """
    row = first(r for r in rows if not r.passed)
    return None if row is None else (row.name, row.failures[0])

# endregion
