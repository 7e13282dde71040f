import json
import os
import tempfile
import unittest

from bestapprox import INF, Box, Ellipsoid, Intersection, ProblemSpec, parse_problem, load_problem, print_problem
from bestapprox.corpus import CORPUS, problem_path, load_corpus
from bestapprox.exc import ProblemSchemaError
from bestapprox.solvers import StepKind

RECTANGLE_ELLIPSE = {
    'name': 'rectangle_ellipse',
    'dimension': 2,
    'norm': {'p': 2},
    'set_a': {'type': 'box', 'lo': [-2, -2], 'hi': [2, 0]},
    'set_b': {'type': 'ellipsoid', 'center': [0, 2], 'semiaxes': [2, 1]},
}


def problem(**changes) -> str:
    """ The rectangle-and-ellipse problem, with some keys replaced; None drops a key """
    document = dict(RECTANGLE_ELLIPSE, **changes)
    return json.dumps({k: v for k, v in document.items() if v is not None})


class ProblemTest(unittest.TestCase):
    def test_parse(self):
        spec = parse_problem(problem())
        self.assertIsInstance(spec, ProblemSpec)
        self.assertEqual(spec.dimension, 2)
        self.assertEqual(spec.set_a, Box([-2, -2], [2, 0]))
        self.assertEqual(spec.set_b, Ellipsoid([0, 2], [2, 1]))
        self.assertTrue(spec.norm.is_euclidean)

        # ### Test: defaults
        self.assertEqual(spec.starts, 8)
        self.assertEqual(spec.solver.tol, 1e-10)
        self.assertIsNone(spec.oracle)
        self.assertEqual(spec.outputs, ('report',))

        # ### Test: "inf" is the ℓ∞ norm
        self.assertIs(parse_problem(problem(norm={'p': 'inf'})).norm.p, INF)

    def test_parts(self):
        spec = parse_problem(problem(set_b=[
            {'type': 'ellipsoid', 'center': [0, 3], 'semiaxes': [2, 1.5]},
            {'type': 'halfspace', 'normal': [0, 1], 'offset': 3},
        ]))
        self.assertTrue(spec.uses_parts)
        self.assertEqual(len(spec.B_parts), 2)
        self.assertIsInstance(spec.B, Intersection)
        self.assertEqual(spec.A_parts, [spec.A])

    def test_solver_settings(self):
        spec = parse_problem(problem(solver={'tol': 1e-8, 'max_iter': 50, 'seed': 3, 'starts': 4,
                                             'step_schedule': {'kind': 'constant', 'scale': 0.1}}))
        self.assertEqual((spec.solver.tol, spec.solver.max_iter, spec.solver.seed, spec.starts), (1e-8, 50, 3, 4))
        self.assertIs(spec.solver.step_schedule.kind, StepKind.CONSTANT)
        self.assertEqual(spec.solver.step_schedule.scale, 0.1)

        # ### Test: command-line overrides
        changed = spec.with_overrides(seed=9, starts=2)
        self.assertEqual((changed.solver.seed, changed.starts), (9, 2))
        self.assertEqual(spec.solver.seed, 3)

    def test_corpus_round_trip(self):
        """ print, then parse: the same problem """
        specs = load_corpus()
        self.assertEqual([s.name for s in specs], list(CORPUS))
        for spec in specs:
            again = parse_problem(print_problem(spec))
            self.assertEqual(again, spec, spec.name)

        # ### Test: ℓ∞ survives as "inf"
        spec = load_problem(problem_path('rectangle_ellipse_linf'))
        self.assertEqual(json.loads(print_problem(spec))['norm'], {'p': 'inf'})

    def test_schema_errors(self):
        def paths(text: str):
            with self.assertRaises(ProblemSchemaError) as e:
                parse_problem(text, source='test.json')
            self.assertIn('test.json', str(e.exception))
            return e.exception.paths

        # ### Test: one issue, with its path
        self.assertEqual(paths(problem(set_b={'type': 'norm_ball', 'center': [0, 2], 'radius': -1})),
                         ['set_b.radius'])
        self.assertEqual(paths(problem(set_b={'type': 'ellipsoid', 'center': [0, 2], 'semiaxes': [2, 0]})),
                         ['set_b.semiaxes'])
        self.assertEqual(paths(problem(set_a={'type': 'box', 'lo': [-2, -2, 0], 'hi': [2, 0]})), ['set_a.lo'])
        self.assertEqual(paths(problem(set_a={'type': 'torus'})), ['set_a.type'])
        self.assertEqual(paths(problem(norm={'p': 0.5})), ['norm.p'])
        self.assertEqual(paths(problem(dimension=None))[:1], ['dimension'])
        self.assertEqual(paths(problem(colour='blue')), ['colour'])
        self.assertEqual(paths(problem(solver={'starts': 1})), ['solver.starts'])
        self.assertEqual(paths(problem(solver={'step_schedule': {'kind': 'random'}})), ['solver.step_schedule.kind'])
        self.assertEqual(paths(problem(outputs=['report', 'movie'])), ['outputs[1]'])
        self.assertEqual(paths(problem(oracle={'bbox': {'lo': [0, 0], 'hi': [0, 1]}, 'resolution': 0.1})),
                         ['oracle.bbox'])
        self.assertEqual(paths(problem(set_a={'type': 'polytope', 'halfspaces': [
            {'normal': [0, 1], 'offset': 0}, {'normal': [0, 0], 'offset': 1},
        ]})), ['set_a.halfspaces[1].normal'])
        self.assertEqual(paths('{"dimension": 2,'), [''])

        # ### Test: values of the wrong JSON type
        self.assertEqual(paths(problem(set_a={'type': ['box'], 'lo': [-2, -2], 'hi': [2, 0]})), ['set_a.type'])
        self.assertEqual(paths(problem(solver={'step_schedule': {'kind': ['constant']}})),
                         ['solver.step_schedule.kind'])

        # ### Test: every issue at once
        self.assertEqual(paths(problem(set_a={'type': 'box', 'lo': [0, 'x'], 'hi': [1, 1]},
                                       set_b={'type': 'norm_ball', 'center': [0, 2], 'radius': 0},
                                       outputs=['gif'])),
                         ['set_a.lo[1]', 'set_b.radius', 'outputs[0]'])

    def test_load_problem(self):
        spec = load_problem(problem_path('rectangle_ellipse_euclidean'))
        self.assertEqual(spec.name, 'rectangle_ellipse_euclidean')

        # ### Test: bytes that are not UTF-8
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'latin1.json')
            with open(path, 'wb') as f:
                f.write('{"name": "café", "dimension": 2}'.encode('latin-1'))
            with self.assertRaises(ProblemSchemaError) as e:
                load_problem(path)
        self.assertEqual(e.exception.paths, [''])
        self.assertIn('UTF-8', str(e.exception))
        self.assertIn('latin1.json', str(e.exception))
