import unittest

import numpy as np
import numpy.testing as npt

from pirouette import validation
from pirouette.geometry.sets import Disk, Polygon


class ValidationTestCase(unittest.TestCase):
    """Class for validation tests."""

    def test_preprocess(self):
        """
        Preprocess
        Test error metric preprocessing code.
        """
        preprocess = validation.preprocess

        @preprocess
        def test_function(predictions, targets):
            return True

        predictions = np.ones(10)
        targets = np.zeros(9)

        with self.assertRaises(Exception) as context:
            test_function(predictions, targets)
        self.assertTrue('Number of predictions does not match number of targets' in str(context.exception))

        self.assertTrue(test_function(predictions=np.ones(3), targets=np.ones((3, 1))))

    def test_rmse(self):
        """
        Root Mean Squared Error
        Test that rmse returns the correct root mean squared error.
        """
        predictions = np.array([0.76392998, 0.75568339, 0.41298595, 0.74049558, 0.92748847,
                                0.72007371, 0.52249059, 0.59100948, 0.86575088, 0.19507582])

        targets = np.array([0.18075874, 0.58670919, 0.60749056, 0.81186994, 0.20804091,
                            0.1987932, 0.92317227, 0.26883039, 0.24775426, 0.10320547]) + 1.0

        output = validation.rmse(predictions=predictions, targets=targets)
        true = 0.844919688370596
        self.assertAlmostEqual(output, true, places=12)

        output = validation.rmse(predictions.reshape(-1, 1), targets.reshape(-1, 1))
        self.assertAlmostEqual(output, true, places=12)

        self.assertAlmostEqual(validation.max_abs_error([1.0, 2.0, 3.0], [1.5, 2.0, 1.0]), 2.0)

    def test_monotone(self):
        """
        Non-Increasing Violations
        Test detection of increases in sampled sequences.
        """
        npt.assert_equal(validation.non_increasing_violations([3.0, 2.0, 2.0, 1.0]), [])
        npt.assert_equal(validation.non_increasing_violations([3.0, 2.0, 2.5, 1.0, 1.1]), [1, 3])
        npt.assert_equal(validation.non_increasing_violations([3.0, 2.0, 2.05], tol=0.1), [])

    def test_containment(self):
        """
        Containment Violations
        Test detection of sampled points outside a set.
        """
        points = np.array([[0.0, 0.0], [0.5, 0.5], [2.0, 0.0], [1.0 + 1e-9, 0.0]])
        npt.assert_equal(validation.containment_violations(Disk([0.0, 0.0], 1.0), points), [2, 3])
        npt.assert_equal(validation.containment_violations(Disk([0.0, 0.0], 1.0), points, tol=1e-6), [2])

        square = Polygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        npt.assert_equal(validation.containment_violations(square, points), [2, 3])


if __name__ == '__main__':
    unittest.main()
