import csv
import json
import os
import tempfile
import unittest
from contextlib import redirect_stdout, redirect_stderr
from io import StringIO

from bestapprox.cli import main, run, reproduce, format_table, EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED
from bestapprox.corpus import CORPUS, CRITERIA, problem_path
from bestapprox.problem import load_problem

REPORT_KEYS = {'spec_echo', 'solve', 'uniqueness', 'existence', 'oracle', 'corpus'}


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def write_problem(self, name: str, **changes) -> str:
        """ A copy of the rectangle-and-ellipse problem with some keys replaced; None drops a key """
        with open(problem_path('rectangle_ellipse_euclidean'), encoding='utf-8') as f:
            document = json.load(f)
        document.update(changes)
        document = {k: v for k, v in document.items() if v is not None}
        path = os.path.join(self.tmp, name)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f)
        return path

    def main(self, *argv) -> int:
        err = StringIO()
        with redirect_stdout(StringIO()), redirect_stderr(err):
            code = main(list(argv) + ['--quiet'])
        self.stderr = err.getvalue()
        return code

    def read_report(self, path: str) -> dict:
        with open(path, encoding='utf-8') as f:
            return json.load(f)

    def test_solve(self):
        out = os.path.join(self.tmp, 'report.json')
        code = self.main('solve', '--spec', problem_path('rectangle_ellipse_euclidean'), '--out', out)
        self.assertEqual(code, EXIT_OK)

        report = self.read_report(out)
        self.assertEqual(set(report), REPORT_KEYS)
        self.assertIsNone(report['uniqueness'])
        self.assertIsNone(report['oracle'])
        solve = report['solve']
        self.assertAlmostEqual(solve['distance'], 1.0, delta=1e-6)
        self.assertTrue(solve['converged'])
        self.assertIsNone(solve['note'])
        self.assertEqual(solve['multistart']['starts'], 8)
        self.assertEqual(solve['multistart']['cluster_count'], 1)
        self.assertEqual(report['spec_echo']['name'], 'rectangle_ellipse_euclidean')

        # ### Test: plot data goes next to the report
        with open(os.path.join(self.tmp, 'report.csv'), newline='', encoding='utf-8') as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ['kind', 'x1', 'x2'])
        kinds = [row[0] for row in rows[1:]]
        self.assertIn('boundary_a', kinds)
        self.assertIn('boundary_b', kinds)
        self.assertEqual(kinds[-2:], ['bap_a', 'bap_b'])

    def test_certify(self):
        out = os.path.join(self.tmp, 'report.json')
        code = self.main('certify', '--spec', problem_path('rectangle_ellipse_euclidean'), '--out', out,
                         '--starts', '2', '--seed', '5')
        self.assertEqual(code, EXIT_OK)
        report = self.read_report(out)
        self.assertEqual(report['uniqueness']['verdict'], 'AtMostOne')
        self.assertEqual(report['uniqueness']['rule'], 'strictNormSecondSetStrictlyConvex')
        self.assertEqual(report['existence']['rule'], 'bothCompact')
        self.assertEqual(report['spec_echo']['solver']['seed'], 5)
        self.assertEqual(report['solve']['multistart']['starts'], 2)

    def test_oracle(self):
        out = os.path.join(self.tmp, 'report.json')
        csv_path = os.path.join(self.tmp, 'plot.csv')
        code = self.main('oracle', '--spec', problem_path('rectangle_ellipse_euclidean'), '--out', out,
                         '--resolution', '0.05', '--plotdata', csv_path)
        self.assertEqual(code, EXIT_OK)
        report = self.read_report(out)
        self.assertAlmostEqual(report['oracle']['dist_estimate'], 1.0, delta=0.05)
        self.assertEqual(report['oracle']['resolution'], 0.05)
        self.assertTrue(os.path.exists(csv_path))

        # ### Test: no oracle settings
        path = self.write_problem('no_oracle.json', oracle=None)
        self.assertEqual(self.main('oracle', '--spec', path), EXIT_USAGE)
        self.assertIn('oracle', self.stderr)

    def test_not_converged(self):
        path = self.write_problem('short.json', set_b={'type': 'ellipsoid', 'center': [1, 2], 'semiaxes': [2, 1]},
                                  solver={'max_iter': 3, 'starts': 2}, outputs=['report'])
        out = os.path.join(self.tmp, 'report.json')
        self.assertEqual(self.main('solve', '--spec', path, '--out', out), EXIT_NOT_CONVERGED)
        report = self.read_report(out)
        self.assertFalse(report['solve']['converged'])
        self.assertEqual(report['solve']['iterations'], 3)

    def test_usage_errors(self):
        # ### Test: schema errors name the offending key
        path = self.write_problem('bad.json', set_b={'type': 'norm_ball', 'center': [0, 2], 'radius': -1})
        self.assertEqual(self.main('solve', '--spec', path), EXIT_USAGE)
        self.assertIn('set_b.radius', self.stderr)

        self.assertEqual(self.main('solve', '--spec', os.path.join(self.tmp, 'missing.json')), EXIT_USAGE)

        # ### Test: a file that is not UTF-8
        path = os.path.join(self.tmp, 'binary.json')
        with open(path, 'wb') as f:
            f.write(b'{"name": "\xff\xfe"}')
        self.assertEqual(self.main('solve', '--spec', path), EXIT_USAGE)
        self.assertIn('UTF-8', self.stderr)

        path = self.write_problem('listed_type.json', set_a={'type': ['box'], 'lo': [-2, -2], 'hi': [2, 0]})
        self.assertEqual(self.main('solve', '--spec', path), EXIT_USAGE)
        self.assertIn('set_a.type', self.stderr)

        self.assertEqual(self.main('solve', '--spec', problem_path('rectangle_ellipse_euclidean'), '--starts', '1'),
                         EXIT_USAGE)
        self.assertEqual(self.main('oracle', '--spec', problem_path('rectangle_ellipse_euclidean'),
                                   '--resolution', '0'), EXIT_USAGE)

        # ### Test: argparse errors
        with self.assertRaises(SystemExit) as e:
            self.main('optimize', '--spec', 'x.json')
        self.assertEqual(e.exception.code, EXIT_USAGE)
        with self.assertRaises(SystemExit) as e:
            self.main('solve')
        self.assertEqual(e.exception.code, EXIT_USAGE)

    def test_deterministic(self):
        spec = load_problem(problem_path('ellipse_over_cylinder'))
        first, code = run('solve', spec)
        again, _ = run('solve', spec)
        threaded, _ = run('solve', spec, workers=2)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(first, again)
        self.assertEqual(first, threaded)
        self.assertGreaterEqual(first['solve']['multistart']['cluster_count'], 2)
        self.assertTrue(first['solve']['multistart']['differences_agree'])

        with self.assertRaises(ValueError):
            run('plot', spec)

    def test_reproduce(self):
        document, rows = reproduce(workers=2)
        self.assertEqual(len(rows), len(CRITERIA) + len(CORPUS))
        self.assertEqual([row.name for row in rows if not row.passed], [], format_table(rows))
        self.assertEqual(set(document['reports']), set(CORPUS))
        self.assertEqual(document['reports']['rectangle_ellipse_euclidean']['oracle']['cluster_count'], 1)
