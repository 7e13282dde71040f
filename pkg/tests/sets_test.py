import unittest

import numpy as np
from hypothesis import given

from bestapprox import (Segment, Halfspace, Box, NormBall, Ellipsoid, PolytopeH, AffineSubspace, SegmentSet,
                        Intersection, Cylinder, SublevelSet, QuadraticFunction, AffineFunction, ExpFunction,
                        contains, is_boundary_point, bounding_box, classify_strict_convexity,
                        recession_cone_generators, boundary_segments_directions)
from bestapprox.classify import (Verdict, ConeKind, polytope_faces, is_polyhedral, shared_recession_direction,
                                 is_recession_direction, difference_span)
from bestapprox.exc import InvalidSetError, PreconditionError, DimensionMismatchError
from bestapprox.geometry import subspaces_intersect, rank
from bestapprox.sets import contains_points, union_box

from .instances import (L1, L3, LINF, RECTANGLE, ELLIPSE, SQUARE, PENTAGON, DROP_PARTS, ELLIPTIC_CYLINDER,
                        FLOATING_ELLIPSE, CYLINDER_X, CYLINDER_Y, LENS_A_PARTS, EXP_ABOVE, PARABOLA, PLANAR_SETS,
                        points, BapAssertions)


def same_subspaces(found, expected) -> bool:
    """ Do two lists of direction subspaces describe the same subspaces, in any order? """
    if len(found) != len(expected):
        return False
    expected = [np.asarray(U, dtype=float).reshape(len(U), -1) for U in expected]
    for U in found:
        if not any(rank(U) == rank(V) == rank(np.hstack([U, V])) for V in expected):
            return False
    return True


class SetsTest(BapAssertions, unittest.TestCase):
    def test_construction(self):
        # ### Test: invalid sets
        with self.assertRaises(InvalidSetError):
            Halfspace([0, 0], 1)
        with self.assertRaises(InvalidSetError):
            Box([0, 0], [1, -1])
        with self.assertRaises(InvalidSetError):
            NormBall([0, 0], -1)
        with self.assertRaises(InvalidSetError):
            Ellipsoid([0, 0], [1, 0])
        with self.assertRaises(InvalidSetError):
            Cylinder(NormBall([0, 0, 0], 1), [0, 0, 0], [1, 1, 0])
        with self.assertRaises(InvalidSetError):
            Cylinder(NormBall([0, 0, 1], 1), [0, 0, 0], [1, 0, 0])
        with self.assertRaises(InvalidSetError):
            Cylinder(Ellipsoid([0, 0, 0], [1, 2, 3]), [0, 0, 0], [0.6, 0.8, 0])
        with self.assertRaises(InvalidSetError):
            Cylinder(NormBall([0, 0, 0], 1, LINF), [0, 0, 0], [1, 0, 0])
        with self.assertRaises(InvalidSetError):
            QuadraticFunction([[1, 0], [0, -1]], [0, 0])
        with self.assertRaises(InvalidSetError):
            ExpFunction(0, 1.0, [1, -1])
        with self.assertRaises(DimensionMismatchError):
            Ellipsoid([0, 0], [1, 1, 1])

        # ### Test: value semantics
        self.assertEqual(Box([0, 0], [1, 1]), Box([0.0, 0.0], [1.0, 1.0]))
        self.assertNotEqual(Box([0, 0], [1, 1]), Box([0, 0], [1, 2]))
        self.assertEqual(hash(Intersection(DROP_PARTS)), hash(Intersection(DROP_PARTS)))
        self.assertEqual(RECTANGLE.tag, 'box')
        self.assertEqual(PARABOLA.tag, 'voronoi')

    def test_contains(self):
        # ### Test: examples
        self.assertTrue(contains(RECTANGLE, [0, 0]))
        self.assertTrue(contains(ELLIPSE, [0, 1]))
        self.assertFalse(contains(Halfspace([0, 1], 0), [0, 0.1]))

        # ### Test: every variant
        self.assertTrue(contains(NormBall([0, 0], 1, L1), [0.5, 0.5]))
        self.assertFalse(contains(NormBall([0, 0], 1, L1), [0.6, 0.5]))
        self.assertTrue(contains(NormBall([0, 0], 1, LINF), [1, -1]))
        self.assertTrue(contains(PENTAGON, [0, 1.5]))
        self.assertFalse(contains(PENTAGON, [0.9, 0.9]))
        self.assertTrue(contains(AffineSubspace([0, 1], ([1, 1],)), [2, 3]))
        self.assertFalse(contains(AffineSubspace([0, 1], ([1, 1],)), [2, 2]))
        self.assertTrue(contains(SegmentSet(Segment([0, 0], [2, 2])), [1, 1]))
        self.assertFalse(contains(SegmentSet(Segment([0, 0], [2, 2])), [3, 3]))
        self.assertTrue(contains(Intersection(DROP_PARTS), [0, 2]))
        self.assertFalse(contains(Intersection(DROP_PARTS), [0, 3.5]))
        self.assertTrue(contains(ELLIPTIC_CYLINDER, [1.9, 0, -0.5]))
        self.assertFalse(contains(ELLIPTIC_CYLINDER, [0, 0, 0.5]))
        self.assertTrue(contains(CYLINDER_X, [1000, 0.6, 0.6]))
        self.assertTrue(contains(FLOATING_ELLIPSE, [0, 1, 2]))
        self.assertFalse(contains(FLOATING_ELLIPSE, [0, 1, 2.1]))
        self.assertTrue(contains(EXP_ABOVE, [0, 2]))
        self.assertFalse(contains(EXP_ABOVE, [0, 1.9]))
        self.assertTrue(contains(PARABOLA, [0, 1]))
        self.assertTrue(contains(PARABOLA, [2, 2]))
        self.assertFalse(contains(PARABOLA, [2, 1]))

        # ### Test: tolerance
        self.assertFalse(contains(RECTANGLE, [0, 1e-6]))
        self.assertTrue(contains(RECTANGLE, [0, 1e-6], tol=1e-5))

        with self.assertRaises(DimensionMismatchError):
            contains(RECTANGLE, [0, 0, 0])

    @given(points(2))
    def test_contains_points_agrees(self, x):
        for name, s in PLANAR_SETS.items():
            self.assertEqual(bool(contains_points(s, x[None, :])[0]), contains(s, x), name)

    def test_is_boundary_point(self):
        # ### Test: examples
        self.assertTrue(is_boundary_point(RECTANGLE, [0, 0]))
        self.assertFalse(is_boundary_point(RECTANGLE, [0, -1]))
        self.assertTrue(is_boundary_point(ELLIPSE, [0, 1]))

        # ### Test: lower-dimensional sets are all boundary
        self.assertTrue(is_boundary_point(SegmentSet(Segment([0, 0], [2, 2])), [1, 1]))
        self.assertTrue(is_boundary_point(AffineSubspace([0, 1], ([1, 1],)), [2, 3]))
        self.assertTrue(is_boundary_point(FLOATING_ELLIPSE, [0, 1, 2]))
        self.assertFalse(is_boundary_point(AffineSubspace([0, 0], ([1, 0], [0, 1])), [2, 3]))

        # ### Test: cylinders
        self.assertTrue(is_boundary_point(CYLINDER_X, [5, 1, 0]))
        self.assertFalse(is_boundary_point(CYLINDER_X, [5, 0, 0]))
        self.assertTrue(is_boundary_point(ELLIPTIC_CYLINDER, [0, 0, 0]))
        self.assertFalse(is_boundary_point(ELLIPTIC_CYLINDER, [0, 0, -0.5]))

        # ### Test: intersections and sublevel sets
        self.assertTrue(is_boundary_point(Intersection(DROP_PARTS), [0, 1.5]))
        self.assertTrue(is_boundary_point(Intersection(DROP_PARTS), [1, 3]))
        self.assertTrue(is_boundary_point(EXP_ABOVE, [0, 2]))
        self.assertTrue(is_boundary_point(PARABOLA, [0, 1]))

        # ### Test: only members have a boundary status
        with self.assertRaises(PreconditionError):
            is_boundary_point(RECTANGLE, [0, 1])

    def test_bounding_box(self):
        lo, hi = bounding_box(ELLIPSE)
        self.assertVectorAlmostEqual(lo, [-2, 1])
        self.assertVectorAlmostEqual(hi, [2, 3])

        lo, hi = bounding_box(PENTAGON)
        self.assertVectorAlmostEqual(lo, [-1, -1])
        self.assertVectorAlmostEqual(hi, [1, 1.5])

        lo, hi = bounding_box(Intersection(DROP_PARTS))
        self.assertVectorAlmostEqual(lo, [-2, 1.5])
        self.assertVectorAlmostEqual(hi, [2, 4.5])

        lo, hi = bounding_box(ELLIPTIC_CYLINDER)
        self.assertVectorAlmostEqual(lo, [-2, -1, -1])
        self.assertVectorAlmostEqual(hi, [2, 1, 0])

        # ### Test: unbounded sets have none
        self.assertIsNone(bounding_box(CYLINDER_X))
        self.assertIsNone(bounding_box(Halfspace([0, 1], 0)))
        self.assertIsNone(bounding_box(EXP_ABOVE))
        self.assertIsNone(bounding_box(PolytopeH.from_inequalities([[0, 1]], [0])))

        # ### Test: union
        lo, hi = union_box(bounding_box(RECTANGLE), bounding_box(ELLIPSE))
        self.assertVectorAlmostEqual(lo, [-2, -2])
        self.assertVectorAlmostEqual(hi, [2, 3])
        self.assertIsNone(union_box(bounding_box(RECTANGLE), None))

    def test_sublevel_functions(self):
        f = QuadraticFunction([[1, 0], [0, 2]], [0, 0], 0)
        self.assertAlmostEqual(f.value([1, 1]), 3.0)
        self.assertTrue(f.is_strictly_convex_sublevel())
        self.assertFalse(QuadraticFunction([[1, 0], [0, 0]], [0, 1]).is_strictly_convex_sublevel())

        g = AffineFunction([1, -1], 0.5)
        self.assertAlmostEqual(g.value([2, 1]), 1.5)
        self.assertFalse(g.is_strictly_convex_sublevel())

        # ### Test: the exponential epigraph
        self.assertAlmostEqual(EXP_ABOVE.function.value([0, 2]), 0.0)
        point, _ = EXP_ABOVE.function.project_sublevel(np.array([0.0, 0.0]), 0.0)
        self.assertOnBoundary(EXP_ABOVE, point)


class ClassifyTest(BapAssertions, unittest.TestCase):
    def test_classify_strict_convexity(self):
        # ### Test: strictly convex
        for s in (ELLIPSE, NormBall([0, 0], 1), NormBall([0, 0], 1, L3), Intersection(LENS_A_PARTS),
                  SublevelSet(QuadraticFunction([[1, 0], [0, 2]], [0, 0]), 1.0), EXP_ABOVE):
            self.assertIs(classify_strict_convexity(s).value, Verdict.YES, s)

        # ### Test: the rectangle, with its top edge as the witness
        verdict = classify_strict_convexity(RECTANGLE)
        self.assertIs(verdict.value, Verdict.NO)
        self.assertEqual(verdict.witness, Segment([-2, 0], [2, 0]))

        # ### Test: every No comes with a boundary segment
        for s in (Halfspace([0, 1], 0), SQUARE, PENTAGON, NormBall([0, 0], 1, L1), NormBall([0, 0], 1, LINF),
                  AffineSubspace([0, 1], ([1, 1],)), SegmentSet(Segment([0, 0], [1, 1])),
                  SublevelSet(AffineFunction([1, -1], 0), 0.5)):
            verdict = classify_strict_convexity(s)
            self.assertIs(verdict.value, Verdict.NO, s)
            self.assertFalse(verdict.witness.is_degenerate())
            for x in verdict.witness.points([0, 0.5, 1]):
                self.assertOnBoundary(s, x)

        for s in (ELLIPTIC_CYLINDER, FLOATING_ELLIPSE, CYLINDER_X):
            verdict = classify_strict_convexity(s)
            self.assertIs(verdict.value, Verdict.NO, s)
            for x in verdict.witness.points([0, 0.5, 1]):
                self.assertOnBoundary(s, x)

        # ### Test: intersections keep a flat piece only when it survives
        verdict = classify_strict_convexity(Intersection(DROP_PARTS))
        self.assertIs(verdict.value, Verdict.NO)
        self.assertVectorAlmostEqual(verdict.witness.a0[1:], [3])
        self.assertIs(classify_strict_convexity(Intersection((SQUARE, NormBall([0, 0], 0.5)))).value,
                      Verdict.UNKNOWN)

        # ### Test: every subset of the line is strictly convex
        self.assertTrue(classify_strict_convexity(Box([0], [1])).is_yes)

    def test_polytope_faces(self):
        faces = polytope_faces(PENTAGON)
        self.assertEqual(len(faces), 5)
        for face in faces:
            self.assertEqual(face.basis.shape, (2, 1))
            self.assertOnBoundary(PENTAGON, face.point)

        # ### Test: a flat polytope is its own face
        flat = PolytopeH.from_inequalities([[0, 1], [0, -1], [1, 0], [-1, 0]], [0, 0, 1, 1])
        faces = polytope_faces(flat)
        self.assertEqual(len(faces), 1)
        self.assertTrue(same_subspaces([faces[0].basis], [[[1], [0]]]))

        self.assertTrue(is_polyhedral(RECTANGLE))
        self.assertTrue(is_polyhedral(NormBall([0, 0], 1, L1)))
        self.assertTrue(is_polyhedral(Intersection((SQUARE, Halfspace([1, 1], 0)))))
        self.assertFalse(is_polyhedral(ELLIPSE))
        self.assertFalse(is_polyhedral(Intersection(DROP_PARTS)))

    def test_recession_cone_generators(self):
        # ### Test: bounded sets
        for s in (RECTANGLE, ELLIPSE, NormBall([0, 0], 1), SegmentSet(Segment([0, 0], [1, 1])), ELLIPTIC_CYLINDER):
            self.assertIs(recession_cone_generators(s).kind, ConeKind.BOUNDED, s)

        # ### Test: a halfspace recedes into itself
        cone = recession_cone_generators(Halfspace([0, 1], 0))
        self.assertIs(cone.kind, ConeKind.HALFSPACES)
        self.assertTrue(cone.contains([5, -1]))
        self.assertTrue(cone.contains([1, 0]))
        self.assertFalse(cone.contains([0, 1]))

        # ### Test: a full cylinder recedes along its axis
        cylinder = Cylinder(Ellipsoid([0, 0, 0], [2, 1, 1]), [0, 0, 0], [0, 0, 1])
        cone = recession_cone_generators(cylinder)
        self.assertIs(cone.kind, ConeKind.LINES)
        self.assertTrue(same_subspaces([cone.lines], [[[0], [0], [1]]]))
        self.assertTrue(cone.contains([0, 0, -3]))
        self.assertFalse(cone.contains([1, 0, 0]))
        for t in (1, 10, 100):
            self.assertInSet(cylinder, [1.9, 0, t])

        # ### Test: affine subspaces and intersections
        cone = recession_cone_generators(AffineSubspace([0, 1], ([1, 1],)))
        self.assertTrue(cone.contains([2, 2]))
        self.assertFalse(cone.contains([1, 0]))
        cone = recession_cone_generators(Intersection((Halfspace([0, 1], 0), Halfspace([1, 0], 0))))
        self.assertTrue(cone.contains([-1, -1]))
        self.assertFalse(cone.contains([1, -1]))
        self.assertIs(recession_cone_generators(Intersection(DROP_PARTS)).kind, ConeKind.BOUNDED)
        self.assertIs(recession_cone_generators(EXP_ABOVE).kind, ConeKind.UNKNOWN)

    def test_shared_recession_direction(self):
        up = recession_cone_generators(Halfspace([0, -1], 0))
        down = recession_cone_generators(Halfspace([0, 1], 0))

        # ### Test: two halfplanes share the horizontal line
        d = shared_recession_direction(up, down)
        self.assertIsNotNone(d)
        self.assertAlmostEqual(abs(d[0]), 1.0)
        self.assertAlmostEqual(d[1], 0.0)

        # ### Test: orthogonal cylinders share nothing
        self.assertIsNone(shared_recession_direction(recession_cone_generators(CYLINDER_X),
                                                     recession_cone_generators(CYLINDER_Y)))
        self.assertIsNone(shared_recession_direction(up, recession_cone_generators(ELLIPSE)))

        with self.assertRaises(ValueError):
            shared_recession_direction(up, recession_cone_generators(EXP_ABOVE))

        # ### Test: probing
        self.assertTrue(is_recession_direction(EXP_ABOVE, np.array([0.0, 2.0]), [-1, 0]))
        self.assertFalse(is_recession_direction(EXP_ABOVE, np.array([0.0, 2.0]), [1, 0]))
        self.assertTrue(is_recession_direction(EXP_ABOVE, np.array([0.0, 2.0]), [0, 1]))

    def test_boundary_segments_directions(self):
        # ### Test: examples
        self.assertTrue(same_subspaces(boundary_segments_directions(RECTANGLE), [[[1], [0]], [[0], [1]]]))
        self.assertEqual(boundary_segments_directions(ELLIPSE), [])
        cylinder = Cylinder(Ellipsoid([0, 0, 0], [2, 1, 1]), [0, 0, 0], [0, 0, 1])
        self.assertTrue(same_subspaces(boundary_segments_directions(cylinder), [[[0], [0], [1]]]))

        # ### Test: finite cylinders add their flat caps
        directions = boundary_segments_directions(ELLIPTIC_CYLINDER)
        self.assertTrue(same_subspaces(directions, [[[0], [0], [1]], [[1, 0], [0, 1], [0, 0]]]))
        directions = boundary_segments_directions(FLOATING_ELLIPSE)
        self.assertTrue(same_subspaces(directions, [[[1, 0], [0, 1], [0, 0]]]))

        # ### Test: polytopes
        # The two vertical sides share a direction
        self.assertEqual(len(boundary_segments_directions(PENTAGON)), 4)
        self.assertTrue(same_subspaces(boundary_segments_directions(Halfspace([1, 1], 0)), [[[1], [-1]]]))
        self.assertIsNone(boundary_segments_directions(Intersection(DROP_PARTS)))

        # ### Test: one subspace per segment
        self.assertTrue(same_subspaces(boundary_segments_directions(SegmentSet(Segment([0, 0], [1, 2]))),
                                       [[[1], [2]]]))
        # The horizontal and vertical edges of the two boxes are parallel
        U = boundary_segments_directions(SQUARE)
        V = boundary_segments_directions(RECTANGLE)
        self.assertTrue(any(subspaces_intersect(u, v) for u in U for v in V))

    def test_difference_span(self):
        self.assertEqual(difference_span(AffineSubspace([0, 0, 0], ([1, 0, 0],))).shape, (3, 1))
        self.assertEqual(difference_span(SegmentSet(Segment([0, 0], [0, 0]))).shape, (2, 0))
        self.assertEqual(difference_span(FLOATING_ELLIPSE).shape, (3, 2))
        self.assertEqual(difference_span(Box([0, 0, 0], [1, 0, 1])).shape, (3, 2))
        self.assertIsNone(difference_span(EXP_ABOVE))
        span = difference_span(Intersection((FLOATING_ELLIPSE, AffineSubspace([0, 0, 2], ([1, 0, 0], [0, 0, 1])))))
        self.assertEqual(span.shape, (3, 1))
