import unittest
from unittest import mock

import numpy as np
import numpy.testing as npt
from scipy.special import sici
from scipy.integrate import quad

from pirouette import turning
from pirouette.unicycle import UnicycleState, ControlGains

# useful for debugging
np.set_printoptions(suppress=True)


def state_with_heading_error(psi0):
    """State at the origin whose heading error towards (1, 0) is psi0."""
    return UnicycleState([0.0, 0.0], -psi0), np.array([1.0, 0.0])


class SineIntegralTestCase(unittest.TestCase):
    """Class for sine integral tests."""

    def test_1(self):
        """
        Series Accuracy
        Test the series against scipy on the fitting interval and beyond.
        """
        x = np.linspace(-np.pi, np.pi, 101)
        npt.assert_allclose(turning.sine_integral(x), sici(x)[0], rtol=0.0, atol=1e-12)

        x = np.linspace(-4.0 * np.pi, 4.0 * np.pi, 201)
        npt.assert_allclose(turning.sine_integral(x), sici(x)[0], rtol=0.0, atol=1e-12)

    def test_2(self):
        """
        Known Values
        Test Si(0), Si(pi) against quadrature and that Si is odd.
        """
        self.assertEqual(turning.sine_integral(0.0), 0.0)
        self.assertTrue(isinstance(turning.sine_integral(1.0), float))

        oracle, _ = quad(lambda t: np.sinc(t / np.pi), 0.0, np.pi, epsabs=1e-14)
        self.assertAlmostEqual(turning.sine_integral(np.pi), oracle, places=12)
        self.assertAlmostEqual(turning.sine_integral(np.pi), turning.SI_PI, places=12)
        self.assertAlmostEqual(turning.sine_integral(-2.0), -turning.sine_integral(2.0), places=14)

    def test_3(self):
        """
        Domain
        Test that arguments beyond 4 pi are rejected.
        """
        with self.assertRaises(Exception) as context:
            turning.sine_integral(4.0 * np.pi + 0.1)
        self.assertTrue('Sine integral argument must satisfy' in str(context.exception))

        with self.assertRaises(Exception) as context:
            turning.sine_integral([0.0, np.nan])
        self.assertTrue('Sine integral argument must satisfy' in str(context.exception))

    def test_4(self):
        """
        Monotone and Bounded
        Test that Si increases on [-pi, pi] and never exceeds its argument in magnitude.
        """
        x = np.linspace(-np.pi, np.pi, 2001)
        output = turning.sine_integral(x)
        self.assertTrue(np.all(np.diff(output) > 0.0))

        x = np.linspace(-4.0 * np.pi, 4.0 * np.pi, 2001)
        output = turning.sine_integral(x)
        self.assertTrue(np.all(np.abs(output) <= np.abs(x) + 1e-15))
        self.assertTrue(np.all(np.abs(output) <= turning.SI_PI + 1e-12))


class TurningEffortTestCase(unittest.TestCase):
    """Class for closed form turning effort tests."""

    def setUp(self):
        self.state = UnicycleState([0.0, 0.0], 0.0)
        self.goal = np.array([1.0, 1.0])
        self.gains = ControlGains(kv=1.0, kw=2.0)

    def test_1(self):
        """
        Total Turning
        Test the total turning effort of the diagonal goal example.
        """
        output = turning.total_turning(self.state, self.goal, self.gains)
        true = np.pi / 4.0 + 0.25 * sici(np.pi / 2.0)[0]
        self.assertAlmostEqual(output, true, places=12)
        self.assertAlmostEqual(output, 1.12809, places=5)

        self.assertAlmostEqual(turning.final_orientation(self.state, self.goal, self.gains), 1.12809, places=5)
        self.assertAlmostEqual(turning.final_heading_error(self.state, self.goal, self.gains), -0.34269, places=5)

    def test_2(self):
        """
        Turning Report
        Test that the final heading error of the report agrees with the closed form.
        """
        report = turning.turning_report(self.state, self.goal, self.gains)
        self.assertAlmostEqual(report.theta_total, 1.12809, places=5)
        self.assertAlmostEqual(report.final_orientation, 1.12809, places=5)
        self.assertAlmostEqual(report.final_heading_error,
                               turning.final_heading_error(self.state, self.goal, self.gains), places=10)

    def test_3(self):
        """
        Spiral Regime
        Test that kv > kw gives a total turning larger than pi.
        """
        state = UnicycleState([0.0, 0.0], 0.0)
        goal = np.array([0.0, 1.0])
        gains = ControlGains(kv=4.0, kw=1.0)
        output = turning.total_turning(state, goal, gains)
        self.assertAlmostEqual(output, np.pi / 2.0 + 2.0 * turning.SI_PI, places=10)
        self.assertAlmostEqual(output, 5.2747, places=4)
        self.assertTrue(abs(output) > np.pi)

    def test_4(self):
        """
        Spiral Free Bound
        Test that kv <= kw keeps the total turning within the linear bounds.
        """
        for kv, kw in ((1.0, 1.0), (1.0, 2.0), (1.0, 3.0)):
            gains = ControlGains(kv=kv, kw=kw)
            for psi0 in (-1.5, -1.0, -0.5, -0.2, 0.2, 0.5, 1.0, 1.5):
                state, goal = state_with_heading_error(psi0)
                output = turning.total_turning(state, goal, gains)
                lower, upper = turning.turning_bounds(psi0, gains)
                self.assertTrue(lower - 1e-12 <= abs(output) <= upper + 1e-12)
                self.assertTrue(abs(output) <= 2.0 * abs(psi0) <= np.pi)
                self.assertTrue(abs(turning.final_heading_error(state, goal, gains))
                                <= turning.heading_error_bound(psi0, gains) + 1e-12)

        with self.assertRaises(Exception) as context:
            turning.turning_bounds(2.0, self.gains)
        self.assertTrue('Heading error must satisfy' in str(context.exception))

    def test_5(self):
        """
        Directional Modes
        Test the turning effort of directional modes with the goal behind.
        """
        state = UnicycleState([0.0, 0.0], 0.0)
        goal = np.array([-1.0, 0.0])
        self.assertAlmostEqual(turning.total_turning(state, goal, self.gains, "bwd"), 0.0, places=12)

        goal = np.array([-1.0, 1e-3])
        output = turning.total_turning(state, goal, self.gains, "fwd")
        psi0 = np.arctan2(1e-3, -1.0)
        self.assertAlmostEqual(output, psi0 + 0.25 * turning.SI_PI, places=10)

        with self.assertRaises(Exception) as context:
            turning.total_turning(state, goal, self.gains, "sideways")
        self.assertTrue('Invalid steering mode argument' in str(context.exception))


class SinusoidFitTestCase(unittest.TestCase):
    """Class for sine integral sinusoid fit tests."""

    def test_1(self):
        """
        Fit Accuracy
        Test the rmse of the fits of every order.
        """
        for order, limit in ((1, 1.6e-2), (2, 2.6e-3), (3, 1.2e-3)):
            fit = turning.fit_si_sinusoids(order=order)
            self.assertTrue(fit.converged)
            self.assertEqual(fit.order, order)
            self.assertTrue(fit.rmse <= limit)

    def test_2(self):
        """
        Third Order Parameters
        Test that the third order fit reproduces the published parameters.
        """
        fit = turning.fit_si_sinusoids(order=3)
        weights, frequencies, _ = turning.TABLE_I[3]
        npt.assert_allclose(fit.weights, weights, rtol=0.0, atol=0.05)
        npt.assert_allclose(fit.frequencies, frequencies, rtol=0.0, atol=0.05)

        x = np.linspace(-np.pi, np.pi, 11)
        npt.assert_allclose(fit(x), turning.si_sinusoid(x, fit.weights, fit.frequencies), atol=1e-14)
        self.assertEqual(sorted(fit.to_record()), ["converged", "frequencies", "nfev", "order", "rmse", "weights"])

    def test_3(self):
        """
        Canonical Parameters
        Test that fits store positive weights and ascending frequencies.
        """
        fit = turning.SiFit([-1.0, 2.0], [-0.5, 0.1], 0.0)
        npt.assert_almost_equal(fit.weights, [2.0, 1.0])
        npt.assert_almost_equal(fit.frequencies, [0.1, 0.5])

        x = np.linspace(-np.pi, np.pi, 7)
        npt.assert_allclose(fit(x), turning.si_sinusoid(x, [-1.0, 2.0], [-0.5, 0.1]), atol=1e-14)

    def test_4(self):
        """
        Fit Failure
        Test that a fit that does not converge raises with the best attempt.
        """
        with self.assertRaises(Exception) as context:
            turning.fit_si_sinusoids(order=2, max_nfev=1)
        self.assertTrue('did not converge' in str(context.exception))
        self.assertEqual(context.exception.best.order, 2)

        failed = mock.Mock(x=np.array([1.9, 0.5]), status=0, nfev=3)
        with mock.patch('pirouette.turning.least_squares', return_value=failed) as patched:
            with self.assertRaises(Exception) as context:
                turning.fit_si_sinusoids(order=1, starts=3, seed=0)
        self.assertEqual(patched.call_count, 3)
        self.assertTrue('did not converge' in str(context.exception))

    def test_5(self):
        """
        Fit Arguments
        Test argument validation of the fit.
        """
        with self.assertRaises(Exception) as context:
            turning.fit_si_sinusoids(order=4)
        self.assertTrue('Fit order must be 1, 2 or 3.' in str(context.exception))

        with self.assertRaises(Exception) as context:
            turning.fit_si_sinusoids(order=1, starts=0)
        self.assertTrue('Number of starts must be a positive integer.' in str(context.exception))

        with self.assertRaises(Exception) as context:
            turning.fit_si_sinusoids(order=2, init=([1.0], [0.5]))
        self.assertTrue('Initial guess must hold' in str(context.exception))


if __name__ == '__main__':
    unittest.main()
