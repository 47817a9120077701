import unittest
import numpy as np
import numpy.testing as npt

from pirouette.geometry import sets

# useful for debugging
np.set_printoptions(suppress=True)


class SetsTestCase(unittest.TestCase):
    """Class for planar set tests."""

    def setUp(self):
        """
        Set Up
        Set up shared environment or variables for tests.
        """
        self.square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class DiskTestCase(SetsTestCase):
    """Tests for disks."""

    def test_1(self):
        """
        Params Assertions
        Test case for invalid disk arguments.
        """
        with self.assertRaises(Exception) as context:
            sets.Disk([0.0, 0.0], -1.0)
        self.assertTrue('Radius parameter must be greater than or equal to zero' in str(context.exception))

        with self.assertRaises(Exception) as context:
            sets.Disk([0.0, 0.0, 0.0], 1.0)
        self.assertTrue('Not appropriate input shape.' in str(context.exception))

    def test_2(self):
        """
        Farthest Distance
        Test the largest distance from a point to the disk.
        """
        disk = sets.Disk([1.0, 1.0], 2.0)
        self.assertAlmostEqual(disk.farthest_distance([1.0, 1.0]), 2.0)
        self.assertAlmostEqual(disk.farthest_distance([4.0, 5.0]), 7.0)
        self.assertEqual(disk.to_record(), {"type": "disk", "center": [1.0, 1.0], "radius": 2.0})


class PolygonTestCase(SetsTestCase):
    """Tests for convex polygons and hulls."""

    def test_1(self):
        """
        Orientation
        Test that clockwise input is reoriented counterclockwise.
        """
        polygon = sets.Polygon(self.square[::-1])
        self.assertAlmostEqual(polygon.area, 1.0)
        normals = polygon.inward_normals()
        start, _ = polygon.edges
        center = np.array([0.5, 0.5])
        self.assertTrue(np.all(np.einsum("ij,ij->i", center - start, normals) > 0.0))

    def test_2(self):
        """
        Merging
        Test that repeated and collinear vertices are merged.
        """
        vertices = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [1.0, 1.0], [0.0, 1.0]])
        polygon = sets.Polygon(vertices)
        self.assertEqual(polygon.vertices.shape, (4, 2))
        self.assertAlmostEqual(polygon.area, 1.0)

        segment = sets.Polygon([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        self.assertEqual(segment.vertices.shape[0], 2)
        self.assertEqual(segment.area, 0.0)

        point = sets.Polygon([[1.0, 1.0], [1.0, 1.0]])
        self.assertEqual(point.vertices.shape, (1, 2))

    def test_3(self):
        """
        Convexity
        Test that a non-convex vertex cycle is rejected.
        """
        with self.assertRaises(Exception) as context:
            sets.Polygon([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, 0.5], [0.0, 2.0]])
        self.assertTrue('must describe a convex polygon' in str(context.exception))

        with self.assertRaises(Exception) as context:
            sets.Polygon(np.zeros((0, 2)))
        self.assertTrue('at least one vertex' in str(context.exception))

    def test_4(self):
        """
        Convex Hull
        Test the hull of scattered points against its extreme points.
        """
        random = np.random.RandomState(7)
        points = np.vstack([random.uniform(0.1, 0.9, size=(50, 2)), self.square])
        hull = sets.convex_hull(points)
        npt.assert_almost_equal(np.sort(hull, axis=0), np.sort(self.square, axis=0), decimal=12)

        polygon = sets.Polygon.hull(points)
        self.assertAlmostEqual(polygon.area, 1.0)
        self.assertAlmostEqual(polygon.farthest_distance([0.0, 0.0]), np.sqrt(2.0))

        line = sets.convex_hull([[0.0, 0.0], [1.0, 1.0], [0.5, 0.5], [2.0, 2.0]])
        npt.assert_almost_equal(np.sort(line, axis=0), [[0.0, 0.0], [2.0, 2.0]], decimal=12)


class ConeHullTestCase(SetsTestCase):
    """Tests for cone hulls."""

    def test_1(self):
        """
        Tangent Points
        Test the tangent points from the apex to the base disk.
        """
        cone = sets.ConeHull([0.0, 0.0], sets.Disk([2.0, 0.0], 1.0))
        right, left = cone.tangent_points()
        npt.assert_almost_equal(right, [1.5, -np.sqrt(3.0) / 2.0], decimal=12)
        npt.assert_almost_equal(left, [1.5, np.sqrt(3.0) / 2.0], decimal=12)
        for touch in (right, left):
            # tangent lines meet the radius at a right angle
            self.assertAlmostEqual(np.dot(touch - cone.disk.center, touch - cone.apex), 0.0)

        triangle, disk = cone.decomposition()
        self.assertEqual(triangle.vertices.shape, (3, 2))
        self.assertIs(disk, cone.disk)
        self.assertAlmostEqual(cone.farthest_distance([0.0, 0.0]), 3.0)

    def test_2(self):
        """
        Degenerate Cones
        Test cones whose apex lies inside the base disk.
        """
        cone = sets.ConeHull([1.5, 0.0], sets.Disk([2.0, 0.0], 1.0))
        self.assertTrue(cone.apex_inside_disk)
        right, left = cone.tangent_points()
        npt.assert_almost_equal(right, cone.apex, decimal=12)
        npt.assert_almost_equal(left, cone.apex, decimal=12)

        with self.assertRaises(Exception) as context:
            sets.ConeHull([0.0, 0.0], sets.Polygon(self.square))
        self.assertTrue('Cone base must be a Disk' in str(context.exception))


class PointChainTestCase(SetsTestCase):
    """Tests for point chains."""

    def test_1(self):
        """
        Segments
        Test chain segments including the single point chain.
        """
        chain = sets.PointChain(self.square)
        start, end = chain.segments
        self.assertEqual(start.shape, (3, 2))
        npt.assert_almost_equal(end[-1], [0.0, 1.0], decimal=12)

        single = sets.PointChain([[2.0, 3.0]])
        start, end = single.segments
        npt.assert_almost_equal(start, end, decimal=12)
        self.assertAlmostEqual(single.farthest_distance([2.0, 0.0]), 3.0)


if __name__ == '__main__':
    unittest.main()
