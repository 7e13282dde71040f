""" Facts about best approximation pairs, checked on the corpus """
import unittest

from bestapprox.cli import primary_run
from bestapprox.corpus import problem_path
from bestapprox.oracle import verify_boundary_identity
from bestapprox.problem import load_problem
from bestapprox.solvers import multistart_bap, check_boundary_postcondition, check_segment_of_baps

# Disjoint planar corpus problems
PLANAR = ('rectangle_ellipse_euclidean', 'rectangle_ellipse_linf', 'square_and_flat_drop', 'pentagon_and_drop',
          'lens_intersections')

# Euclidean corpus problems with an attained distance
EUCLIDEAN = ('rectangle_ellipse_euclidean', 'ellipse_over_cylinder', 'square_and_flat_drop', 'pentagon_and_drop',
             'skew_cylinders', 'lens_intersections')


class LemmasTest(unittest.TestCase):
    def test_distance_is_attained_on_the_boundaries(self):
        """ dist(A, B) = dist(∂A, ∂B) for disjoint sets """
        for name in PLANAR:
            spec = load_problem(problem_path(name))
            report = verify_boundary_identity(spec.A, spec.B, spec.norm, spec.oracle.with_resolution(0.05))
            self.assertTrue(report.disjoint, name)
            self.assertTrue(report.holds, '{}: {} vs {}'.format(
                name, report.full.dist_estimate, report.boundary.dist_estimate))

    def test_pairs_lie_on_the_boundaries(self):
        for name in EUCLIDEAN:
            spec = load_problem(problem_path(name))
            result = primary_run(spec)
            self.assertTrue(result.converged, name)
            self.assertTrue(check_boundary_postcondition(spec.A, spec.B, result), name)

    def test_segments_of_pairs(self):
        """ The pairs between two best approximation pairs are best approximation pairs """
        for name, tol in (('ellipse_over_cylinder', 1e-6), ('rectangle_ellipse_linf', 1e-3)):
            spec = load_problem(problem_path(name))
            _, summary = multistart_bap(spec.A, spec.B, spec.norm, spec.starts, spec.solver)
            self.assertIsNotNone(summary.witness, name)
            r0, r1 = summary.witness
            self.assertTrue(check_segment_of_baps(spec.A, spec.B, spec.norm, r0, r1, tol=tol), name)
