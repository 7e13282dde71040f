import unittest

from bestapprox import (Segment, Halfspace, Box, NormBall, Ellipsoid, AffineSubspace, SegmentSet, Intersection,
                        Cylinder, SolverParams, UniquenessVerdict, ExistenceVerdict, certify_uniqueness,
                        certify_existence, multistart_bap, alternating_projections)
from bestapprox.certificates import UniquenessRule, ExistenceRule, EXISTENCE_CATALOG
from bestapprox.corpus import problem_path
from bestapprox.exc import DimensionMismatchError
from bestapprox.problem import load_problem

from .instances import (L2, L3, LINF, RECTANGLE, ELLIPSE, SEGMENT_A, SEGMENT_B, ELLIPTIC_CYLINDER, FLOATING_ELLIPSE,
                        SQUARE, DROP_PARTS, PENTAGON, PENTAGON_DROP_PARTS, CYLINDER_X, CYLINDER_Y, LENS_A_PARTS,
                        LENS_B_PARTS, EXP_ABOVE, EXP_BELOW, PARABOLA, PARABOLA_FLOOR, STRIP, FAR_STRIP, DISK)


class UniquenessTest(unittest.TestCase):
    def assertCertificate(self, cert, verdict, rule):
        self.assertEqual((cert.verdict, cert.rule), (verdict, rule), '\n'.join(cert.trace))

    def test_strictly_convex(self):
        # ### Test: a strictly convex second set settles it for the rectangle
        self.assertCertificate(certify_uniqueness([RECTANGLE], [ELLIPSE], L2),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.SECOND_SET_STRICTLY_CONVEX)
        self.assertCertificate(certify_uniqueness([ELLIPSE], [RECTANGLE], L3),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.FIRST_SET_STRICTLY_CONVEX)

        # ### Test: two strictly convex sets need no strictly convex norm
        self.assertCertificate(certify_uniqueness([ELLIPSE], [NormBall([5, 5], 1)], LINF),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.STRICTLY_CONVEX_SETS)
        self.assertCertificate(certify_uniqueness(LENS_A_PARTS, LENS_B_PARTS, L2),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.STRICTLY_CONVEX_INTERSECTIONS)

        # ### Test: parts given as an Intersection are spread out
        self.assertCertificate(certify_uniqueness([Intersection(LENS_A_PARTS)], [Intersection(LENS_B_PARTS)], L2),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.STRICTLY_CONVEX_INTERSECTIONS)

    def test_pentagon_and_drop(self):
        cert = certify_uniqueness([PENTAGON], PENTAGON_DROP_PARTS, L2)
        self.assertCertificate(cert, UniquenessVerdict.AT_MOST_ONE, UniquenessRule.SECOND_SET_STRICTLY_CONVEX)
        self.assertEqual(cert.trace[-1], f'fired: {UniquenessRule.SECOND_SET_STRICTLY_CONVEX}')

    def test_no_parallel_boundary_intervals(self):
        self.assertCertificate(certify_uniqueness([CYLINDER_X], [CYLINDER_Y], L2),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.NO_PARALLEL_INTERVALS)
        self.assertCertificate(certify_uniqueness([SEGMENT_A], [SEGMENT_B], L2),
                               UniquenessVerdict.AT_MOST_ONE, UniquenessRule.NO_PARALLEL_INTERVALS)

    def test_difference_sets(self):
        """ A horizontal segment, and a vertical chord of a box """
        chord = Intersection((AffineSubspace([0, 3], ([0, 1],)), Box([-1, 2], [1, 4])))
        cert = certify_uniqueness([SegmentSet(Segment([-1, 0], [1, 0]))], [chord], L2)
        self.assertCertificate(cert, UniquenessVerdict.AT_MOST_ONE, UniquenessRule.DIFFERENCE_SETS_TRIVIAL)

    def test_unknown(self):
        # ### Test: the ℓ∞ norm is not strictly convex
        cert = certify_uniqueness([RECTANGLE], [ELLIPSE], LINF)
        self.assertCertificate(cert, UniquenessVerdict.UNKNOWN, UniquenessRule.NONE)
        self.assertIn('norm linf is not strictly convex', cert.trace)
        self.assertCertificate(certify_uniqueness([SEGMENT_A], [SEGMENT_B], LINF),
                               UniquenessVerdict.UNKNOWN, UniquenessRule.NONE)

        # ### Test: the square's top edge and the drop's flat bottom are parallel
        cert = certify_uniqueness([SQUARE], DROP_PARTS, L2)
        self.assertCertificate(cert, UniquenessVerdict.UNKNOWN, UniquenessRule.NONE)
        self.assertIn('difference sets share a nonzero vector', cert.trace)

        self.assertCertificate(certify_uniqueness([], [ELLIPSE], L2), UniquenessVerdict.UNKNOWN, UniquenessRule.NONE)

    def test_computed_witness(self):
        _, summary = multistart_bap(ELLIPTIC_CYLINDER, FLOATING_ELLIPSE, L2, 8)
        self.assertIsNotNone(summary.witness)

        # ### Test: no rule fires; the witness decides
        self.assertCertificate(certify_uniqueness([ELLIPTIC_CYLINDER], [FLOATING_ELLIPSE], L2),
                               UniquenessVerdict.UNKNOWN, UniquenessRule.NONE)
        cert = certify_uniqueness([ELLIPTIC_CYLINDER], [FLOATING_ELLIPSE], L2, summary.witness)
        self.assertCertificate(cert, UniquenessVerdict.NOT_UNIQUE, UniquenessRule.COMPUTED_WITNESS)
        self.assertIs(cert.witness, summary.witness)
        self.assertEqual(cert.to_dict()['verdict'], 'NotUnique')
        self.assertEqual(len(cert.to_dict()['witness']), 2)

        # ### Test: two copies of one pair are no witness
        r = summary.witness[0]
        cert = certify_uniqueness([ELLIPTIC_CYLINDER], [FLOATING_ELLIPSE], L2, (r, r))
        self.assertCertificate(cert, UniquenessVerdict.UNKNOWN, UniquenessRule.NONE)
        self.assertEqual(cert.trace[-1], 'witness rejected')

    def test_rules_beat_witnesses(self):
        """ A verified rule is never overturned by solver output """
        r0 = alternating_projections(RECTANGLE, ELLIPSE, [2, 3])
        r1 = alternating_projections(RECTANGLE, ELLIPSE, [-2, 3])
        cert = certify_uniqueness([RECTANGLE], [ELLIPSE], L2, (r0, r1))
        self.assertEqual(cert.verdict, UniquenessVerdict.AT_MOST_ONE)
        self.assertIsNone(cert.witness)


class ExistenceTest(unittest.TestCase):
    def assertCertificate(self, cert, verdict, rule):
        self.assertEqual((cert.verdict, cert.rule), (verdict, rule), '\n'.join(cert.trace))

    def test_bounded(self):
        cert = certify_existence(RECTANGLE, ELLIPSE, L2)
        self.assertCertificate(cert, ExistenceVerdict.EXISTS, ExistenceRule.BOTH_COMPACT)
        self.assertAlmostEqual(cert.probe.distance, 1.0, delta=1e-8)
        self.assertEqual(cert.to_dict(), {'verdict': 'Exists', 'rule': 'bothCompact', 'trace': list(cert.trace)})

        self.assertCertificate(certify_existence(RECTANGLE, Halfspace([0, -1], -1), L2),
                               ExistenceVerdict.EXISTS, ExistenceRule.FINITE_DIM_CLOSED_BOUNDED)

    def test_intersecting(self):
        self.assertCertificate(certify_existence(NormBall([0, 0], 1), NormBall([1, 0], 1), LINF),
                               ExistenceVerdict.EXISTS, ExistenceRule.INTERSECTION_NONEMPTY)

    def test_unbounded(self):
        # ### Test: two halfplanes
        self.assertCertificate(certify_existence(Halfspace([0, 1], 0), Halfspace([0, -1], -1), L2),
                               ExistenceVerdict.EXISTS, ExistenceRule.POLYHEDRAL)

        # ### Test: two skew lines
        line_x = AffineSubspace([0, 0, 0], ([1, 0, 0],))
        line_y = AffineSubspace([0, 0, 1], ([0, 1, 0],))
        self.assertCertificate(certify_existence(line_x, line_y, L2),
                               ExistenceVerdict.EXISTS, ExistenceRule.FINITE_DIM_AFFINE)

        # ### Test: hypercylinders
        self.assertCertificate(certify_existence(CYLINDER_X, CYLINDER_Y, L2),
                               ExistenceVerdict.EXISTS, ExistenceRule.HYPERCYLINDERS)

        # ### Test: elliptic hypercylinders in a non-Euclidean norm
        tube_x = Cylinder(Ellipsoid([0, 0, 0], [2, 1, 1]), [0, 0, 0], [1, 0, 0])
        tube_y = Cylinder(Ellipsoid([0, 0, 3], [2, 1, 1]), [0, 0, 3], [0, 1, 0])
        self.assertCertificate(certify_existence(tube_x, tube_y, LINF),
                               ExistenceVerdict.EXISTS, ExistenceRule.HYPERCYLINDERS)
        self.assertCertificate(certify_existence(CYLINDER_X, CYLINDER_Y, L3),
                               ExistenceVerdict.EXISTS, ExistenceRule.HYPERCYLINDERS)

        # ### Test: a cylinder below a halfspace: the probe finds a fixed point
        cert = certify_existence(CYLINDER_X, Halfspace([0, 0, -1], -3), L2)
        self.assertCertificate(cert, ExistenceVerdict.EXISTS, ExistenceRule.MIN_NORM_ATTAINED)

    def test_voronoi_cells(self):
        self.assertCertificate(certify_existence(PARABOLA, PARABOLA_FLOOR, L2),
                               ExistenceVerdict.EXISTS, ExistenceRule.HYPERPARABOLOID)
        self.assertCertificate(certify_existence(PARABOLA_FLOOR, PARABOLA, LINF),
                               ExistenceVerdict.EXISTS, ExistenceRule.VORONOI_CELL)

    def test_suspected_not_attained(self):
        params = load_problem(problem_path('exponential_epigraphs')).solver
        cert = certify_existence(EXP_ABOVE, EXP_BELOW, L2, 2, params)
        self.assertCertificate(cert, ExistenceVerdict.SUSPECTED_NOT_ATTAINED, ExistenceRule.NONE)
        self.assertTrue(cert.probe.diverging)

        # ### Test: a finished probe is reused
        again = certify_existence(EXP_ABOVE, EXP_BELOW, L2, params=params, probe=cert.probe)
        self.assertIs(again.probe, cert.probe)
        self.assertEqual(again.verdict, ExistenceVerdict.SUSPECTED_NOT_ATTAINED)

    def test_diagonal_recession(self):
        """ Two parallel diagonal strips recede along (1, 1), which no coordinate ray detects """
        cert = certify_existence(STRIP, FAR_STRIP, L3)
        self.assertCertificate(cert, ExistenceVerdict.UNKNOWN, ExistenceRule.NONE)
        self.assertTrue(cert.probe.converged)
        self.assertAlmostEqual(cert.probe.distance, 2 ** 0.5, delta=1e-6)
        self.assertTrue(any('receding in both sets' in line for line in cert.trace))

        # ### Test: a strip against a disk: nothing recedes in the disk
        cert = certify_existence(STRIP, DISK, L3)
        self.assertCertificate(cert, ExistenceVerdict.EXISTS, ExistenceRule.FINITE_DIM_COERCIVE)

    def test_slow_escape(self):
        """ With default settings the iterates never reach the blowup radius, but they drift outward """
        cert = certify_existence(EXP_ABOVE, EXP_BELOW, L2)
        self.assertCertificate(cert, ExistenceVerdict.SUSPECTED_NOT_ATTAINED, ExistenceRule.NONE)
        self.assertFalse(cert.probe.converged)
        self.assertFalse(cert.probe.diverging)
        self.assertTrue(cert.probe.runaway)
        self.assertLess(cert.probe.escape[0], -0.99)

        # ### Test: bounded sets cut short are not runaways
        short = alternating_projections(RECTANGLE, ELLIPSE, [2, 3], SolverParams(max_iter=5))
        self.assertFalse(short.runaway)
        self.assertIsNone(short.escape)

    def test_preconditions(self):
        with self.assertRaises(DimensionMismatchError):
            certify_existence(RECTANGLE, CYLINDER_X, L2)
        with self.assertRaises(DimensionMismatchError):
            certify_existence(RECTANGLE, ELLIPSE, L2, dim=3)

    def test_catalog(self):
        checkable = {e.rule for e in EXISTENCE_CATALOG if e.machine_checkable}
        rules = {v for k, v in vars(ExistenceRule).items() if k.isupper()} - {ExistenceRule.NONE}
        self.assertEqual(checkable, rules)
        self.assertEqual(len({e.rule for e in EXISTENCE_CATALOG}), len(EXISTENCE_CATALOG))
        self.assertTrue(any(not e.machine_checkable for e in EXISTENCE_CATALOG))

    def test_probe_reused(self):
        probe = alternating_projections(RECTANGLE, ELLIPSE, [2, 3], SolverParams(max_iter=5))
        cert = certify_existence(RECTANGLE, ELLIPSE, L2, probe=probe)
        self.assertIs(cert.probe, probe)
        self.assertCertificate(cert, ExistenceVerdict.EXISTS, ExistenceRule.BOTH_COMPACT)
