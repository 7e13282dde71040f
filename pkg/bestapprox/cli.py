""" Command line: `bestapprox {solve,certify,oracle,reproduce} ...`

    bestapprox solve --spec problems/rectangle_ellipse_euclidean.json
    bestapprox certify --spec my_problem.json --out report.json --starts 16
    bestapprox oracle --spec my_problem.json --resolution 0.02 --plotdata boundary.csv
    bestapprox reproduce

`solve` runs the solver and multistart; `certify` adds both certificates; `oracle` adds the grid oracle.
`reproduce` runs every command on the whole shipped corpus and checks the results.

The report is one JSON object with the keys spec_echo, solve, uniqueness, existence, oracle, corpus;
parts that were not computed are null.

Exit codes: 0 success, 1 usage or schema error, 2 no convergence (or a diverging run), 3 corpus mismatch.
"""
import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import corpus
from .certificates import (UniquenessCertificate, ExistenceCertificate, certify_uniqueness, certify_existence)
from .exc import BestApproxError, PreconditionError, ProblemSchemaError
from .log import configure
from .oracle import OracleReport, grid_min_distance
from .plotdata import plot_rows, write_csv
from .problem import ProblemSpec, load_problem, dump_problem
from .projections import euclid_project
from .solvers import (BapResult, MultiplicitySummary, alternating_projections, general_norm_descent,
                      simultaneous_projection_solve, multistart_bap)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_CORPUS_MISMATCH = 3

COMMANDS = ('solve', 'certify', 'oracle', 'all')

DIVERGING_NOTE = 'suspected unattained infimum'


@dataclass(eq=False)
class Analysis:
    """ Everything computed for one problem """
    spec: ProblemSpec
    result: BapResult
    runs: List[BapResult]
    summary: MultiplicitySummary
    uniqueness: Optional[UniquenessCertificate] = None
    existence: Optional[ExistenceCertificate] = None
    oracle: Optional[OracleReport] = None

    @property
    def exit_code(self) -> int:
        if self.result.diverging or not self.result.converged:
            return EXIT_NOT_CONVERGED
        return EXIT_OK


def primary_run(spec: ProblemSpec) -> BapResult:
    """ The main solver run, started from the origin

    Euclidean problems use alternating projections, or the simultaneous solver when a side is given
    as parts. Other norms start the subgradient method from the projections of the origin.
    """
    origin = np.zeros(spec.dimension)
    if spec.norm.is_euclidean:
        if spec.uses_parts:
            return simultaneous_projection_solve(spec.A_parts, spec.B_parts, origin, spec.solver)
        return alternating_projections(spec.A, spec.B, origin, spec.solver)
    x0 = euclid_project(spec.A, origin).point
    y0 = euclid_project(spec.B, origin).point
    return general_norm_descent(spec.A, spec.B, spec.norm, x0, y0, spec.solver)


def analyze(command: str, spec: ProblemSpec, workers: int = 1) -> Analysis:
    """ Run a command on a problem

    Raises:
        GridBudgetExceeded: the oracle grid is too fine
        PreconditionError: `oracle` on a problem without oracle settings
    """
    result = primary_run(spec)
    runs, summary = multistart_bap(spec.A, spec.B, spec.norm, spec.starts, spec.solver, workers=workers)
    analysis = Analysis(spec, result, runs, summary)

    if command in ('certify', 'all'):
        analysis.uniqueness = certify_uniqueness(spec.A_parts, spec.B_parts, spec.norm,
                                                 witness=summary.witness, tol=spec.solver.tol)
        # The Euclidean primary run from the origin is exactly the existence probe
        probe = result if spec.norm.is_euclidean and not spec.uses_parts else None
        analysis.existence = certify_existence(spec.A, spec.B, spec.norm, spec.dimension, spec.solver, probe)

    if command in ('oracle', 'all') and spec.oracle is not None:
        analysis.oracle = grid_min_distance(spec.A, spec.B, spec.norm, spec.oracle)
    elif command == 'oracle':
        raise PreconditionError('oracle', f'problem {spec.name!r} has no "oracle" settings')
    return analysis


def _pair_dict(r: BapResult) -> dict:
    return {'a': r.a.tolist(), 'b': r.b.tolist(), 'distance': r.distance}


def solve_section(analysis: Analysis) -> dict:
    r, summary = analysis.result, analysis.summary
    return {
        'solver': r.solver,
        'distance': r.distance,
        'pair': [r.a.tolist(), r.b.tolist()],
        'converged': r.converged,
        'diverging': r.diverging,
        'runaway': r.runaway,
        'iterations': r.iterations,
        'residual': r.residual,
        'monotone': r.monotone,
        'note': DIVERGING_NOTE if r.diverging or r.runaway else None,
        'multistart': {
            'starts': len(analysis.runs),
            'cluster_count': summary.cluster_count,
            'labels': list(summary.labels),
            'best_distance': summary.best_distance if np.isfinite(summary.best_distance) else None,
            'differences_agree': summary.differences_agree,
            'cluster_radius': summary.radius,
            'representatives': [_pair_dict(rep) for rep in summary.representatives],
        },
    }


def build_report(analysis: Analysis) -> dict:
    return {
        'spec_echo': dump_problem(analysis.spec),
        'solve': solve_section(analysis),
        'uniqueness': analysis.uniqueness.to_dict() if analysis.uniqueness is not None else None,
        'existence': analysis.existence.to_dict() if analysis.existence is not None else None,
        'oracle': analysis.oracle.to_dict() if analysis.oracle is not None else None,
        'corpus': None,
    }


def run(command: str, spec: ProblemSpec, plotdata: Optional[str] = None, workers: int = 1) -> Tuple[dict, int]:
    """ Run a command on a parsed problem and build the report

    Args:
        command: solve, certify, oracle, or all
        spec: The problem, with command-line overrides already applied
        plotdata: Write the plot CSV here (2-D problems only)
    Returns:
        (report, exit code)
    """
    if command not in COMMANDS:
        raise ValueError(f'unknown command {command!r}')
    analysis = analyze(command, spec, workers)
    report = build_report(analysis)
    if plotdata is not None:
        _write_plotdata(analysis, plotdata)

    code = analysis.exit_code
    if analysis.result.diverging:
        logger.warning('%s: the iterates left the blow-up radius: %s', spec.name or 'problem', DIVERGING_NOTE)
    elif code != EXIT_OK:
        logger.warning('%s: the solver did not converge in %d iterations', spec.name or 'problem',
                       analysis.result.iterations)
    return report, code


def _write_plotdata(analysis: Analysis, path: str):
    spec = analysis.spec
    if spec.dimension != 2:
        logger.warning('plot data is only written for 2-D problems; %s is %d-D', spec.name, spec.dimension)
        return
    bbox = spec.oracle.bbox if spec.oracle is not None else None
    rows = plot_rows(spec.A, spec.B, analysis.result, bbox)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        write_csv(rows, f)


# region Corpus


def reproduce(workers: int = 1) -> Tuple[dict, List[corpus.CorpusRow]]:
    """ Run the whole corpus: one row per acceptance criterion, then one per corpus file """
    cases: Dict[str, Tuple[ProblemSpec, dict]] = {}
    file_rows = []
    for spec in corpus.load_corpus():
        started = time.monotonic()
        report, _ = run('all', spec, workers=workers)
        row = corpus.check_case(spec, report)
        report['corpus'] = row.to_dict()
        report['corpus']['seconds'] = round(time.monotonic() - started, 3)
        cases[spec.name] = (spec, report)
        file_rows.append(row)
    rows = corpus.check_criteria(cases) + file_rows
    document = {
        'rows': [row.to_dict() for row in rows],
        'reports': {name: report for name, (_, report) in cases.items()},
    }
    return document, rows


def format_table(rows: Sequence[corpus.CorpusRow]) -> str:
    width = max(len(row.name) for row in rows)
    lines = []
    for row in rows:
        status = 'pass' if row.passed else 'FAIL'
        detail = '' if row.passed else '  ' + '; '.join(f'{c.name}: {c.detail}' for c in row.failures)
        lines.append(f'{row.name:<{width}}  {status}{detail}')
    return '\n'.join(lines)

# endregion

# region Front end


class _Parser(argparse.ArgumentParser):
    """ Usage errors exit with EXIT_USAGE """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='bestapprox', description='Best approximation pairs between two convex sets')
    sub = parser.add_subparsers(dest='command', metavar='command', parser_class=_Parser)
    sub.required = True

    common = _Parser(add_help=False)
    common.add_argument('--out', help='write the JSON report here (default: stdout)')
    common.add_argument('--quiet', action='store_true', help='log errors only')
    common.add_argument('--workers', type=int, default=1, help='run multistart starts concurrently')

    for name, text in (('solve', 'solve and run multistart'),
                       ('certify', 'solve, then certify uniqueness and existence'),
                       ('oracle', 'solve, then check against the grid oracle')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--spec', required=True, help='problem file (JSON)')
        p.add_argument('--seed', type=int, help='override solver.seed')
        p.add_argument('--starts', type=int, help='override solver.starts (≥ 2)')
        p.add_argument('--resolution', type=float, help='override oracle.resolution')
        p.add_argument('--plotdata', help='write boundary samples of a 2-D problem as CSV here')

    sub.add_parser('reproduce', aliases=['reproduce-paper'], parents=[common],
                   help='run the shipped corpus and check every ground truth')
    return parser


def _write_json(document: dict, path: Optional[str]):
    text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)
    if path is None:
        print(text)
    else:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text + '\n')


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure(quiet=args.quiet)

    if args.command in ('reproduce', 'reproduce-paper'):
        document, rows = reproduce(args.workers)
        if args.out is not None:
            _write_json(document, args.out)
        print(format_table(rows))
        failure = corpus.first_failure(rows)
        if failure is not None:
            name, check = failure
            logger.error('corpus mismatch: %s: %s (%s)', name, check.name, check.detail)
            return EXIT_CORPUS_MISMATCH
        return EXIT_OK

    if args.starts is not None and args.starts < 2:
        print(f'bestapprox: error: --starts must be ≥ 2, got {args.starts}', file=sys.stderr)
        return EXIT_USAGE
    if args.resolution is not None and not args.resolution > 0:
        print(f'bestapprox: error: --resolution must be positive, got {args.resolution}', file=sys.stderr)
        return EXIT_USAGE

    try:
        spec = load_problem(args.spec).with_overrides(seed=args.seed, starts=args.starts, resolution=args.resolution)
    except ProblemSchemaError as e:
        print(f'bestapprox: {e}', file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f'bestapprox: cannot read {args.spec}: {e.strerror}', file=sys.stderr)
        return EXIT_USAGE

    plotdata = args.plotdata
    if plotdata is None and 'plotdata' in spec.outputs and args.out is not None:
        plotdata = args.out.rsplit('.', 1)[0] + '.csv'

    try:
        report, code = run(args.command, spec, plotdata, args.workers)
    except BestApproxError as e:
        print(f'bestapprox: {e}', file=sys.stderr)
        return EXIT_USAGE

    if 'report' in spec.outputs or args.out is not None:
        _write_json(report, args.out)
    return code

# endregion
