import unittest
from unittest import mock

import numpy as np
import numpy.testing as npt

from pirouette import simulate, turning
from pirouette.validation import non_increasing_violations
from pirouette.unicycle import UnicycleState, ControlGains

# useful for debugging
np.set_printoptions(suppress=True)

GRID_PSI = (-1.5, -1.0, -0.5, -0.2, 0.2, 0.5, 1.0, 1.5)
GRID_GAINS = ((1.0, 1.0), (1.0, 2.0), (1.0, 3.0))


class SimulateTestCase(unittest.TestCase):
    """Base class for simulation tests."""

    def setUp(self):
        self.goal = np.array([1.0, 0.0])
        self.tight = simulate.IntegratorSettings(rel_tol=1e-9, abs_tol=1e-12, goal_eps=1e-7)

    def run_from(self, psi0, gains, mode="bi", settings=None):
        """Closed loop from the origin with heading error psi0 towards (1, 0)."""
        state = UnicycleState([0.0, 0.0], -psi0)
        return state, simulate.simulate_to_goal(state, self.goal, gains, mode, settings or self.tight)


class IntegratorTestCase(unittest.TestCase):
    """Class for adaptive integrator tests."""

    def test_1(self):
        """
        Exponential Decay
        Test the integrator on x' = -x.
        """
        settings = simulate.IntegratorSettings(max_time=1.0)
        result = simulate.integrate(lambda t, y: -y, 1.0, settings)
        self.assertTrue(result.truncated)
        self.assertAlmostEqual(result.t[-1], 1.0, places=12)
        self.assertTrue(abs(result.y[-1, 0] - np.exp(-1.0)) < 1e-6)
        self.assertTrue(np.all(np.diff(result.t) > 0.0))

    def test_2(self):
        """
        Harmonic Oscillator
        Test the drift of a harmonic oscillator over one period.
        """
        settings = simulate.IntegratorSettings(rel_tol=1e-10, abs_tol=1e-12, max_time=2.0 * np.pi)
        result = simulate.integrate(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], settings)
        npt.assert_allclose(result.y[-1], [1.0, 0.0], rtol=0.0, atol=1e-6)

    def test_3(self):
        """
        Max Step
        Test that no accepted step exceeds max step.
        """
        settings = simulate.IntegratorSettings(max_step=0.1, max_time=2.0)
        result = simulate.integrate(lambda t, y: np.zeros_like(y), [1.0], settings)
        self.assertTrue(np.max(np.diff(result.t)) <= 0.1 + 1e-12)
        npt.assert_almost_equal(result.y[:, 0], np.ones(result.t.shape[0]))

    def test_4(self):
        """
        Step Failure
        Test that a failed integration raises a stiffness error.
        """
        failed = mock.Mock(status=-1, message="Required step size is less than spacing between numbers.")
        with mock.patch('pirouette.simulate.solve_ivp', return_value=failed):
            with self.assertRaises(Exception) as context:
                simulate.integrate(lambda t, y: -y, 1.0)
        self.assertTrue('Integration step failed' in str(context.exception))

    def test_5(self):
        """
        Settings
        Test integrator settings validation and replacement.
        """
        settings = simulate.IntegratorSettings()
        self.assertEqual(settings.goal_tolerance(0.5), 1e-4)
        self.assertAlmostEqual(settings.goal_tolerance(20.0), 2e-3)
        self.assertEqual(settings.replace(goal_eps=1e-6).goal_tolerance(20.0), 1e-6)
        self.assertEqual(settings.replace(max_time=5.0).max_time, 5.0)
        self.assertEqual(settings.max_time, 100.0)

        with self.assertRaises(Exception) as context:
            settings.replace(order=4)
        self.assertTrue('Invalid integrator setting argument' in str(context.exception))

        with self.assertRaises(Exception) as context:
            simulate.IntegratorSettings(rel_tol=0.0)
        self.assertTrue('Relative tolerance parameter must be greater than zero.' in str(context.exception))


class TrajectoryTestCase(SimulateTestCase):
    """Class for closed-loop trajectory tests."""

    def test_1(self):
        """
        Diagonal Goal
        Test that the terminal orientation matches the closed form final orientation.
        """
        state = UnicycleState([0.0, 0.0], 0.0)
        goal = np.array([1.0, 1.0])
        gains = ControlGains(kv=1.0, kw=2.0)
        traj = simulate.simulate_to_goal(state, goal, gains)
        self.assertTrue(traj.converged)
        self.assertTrue(traj.dist[-1] <= 1e-4 * np.sqrt(2.0) + 1e-12)
        self.assertTrue(abs(traj.orientations[-1] - 1.12809) < 1e-4)
        self.assertTrue(abs(traj.orientations[-1] - turning.final_orientation(state, goal, gains)) < 1e-4)

        columns = traj.as_columns()
        self.assertEqual(columns.shape, (len(traj), len(simulate.COLUMNS)))
        self.assertTrue(np.all(np.isnan(columns[:, -2:])))
        npt.assert_almost_equal(columns[:, 0], traj.t)

    def test_2(self):
        """
        Start At Goal
        Test that a run starting at the goal has a single sample.
        """
        state = UnicycleState([1.0, 0.0], 0.3)
        traj = simulate.simulate_to_goal(state, self.goal, ControlGains())
        self.assertEqual(len(traj), 1)
        self.assertTrue(traj.converged)
        self.assertEqual(traj.dist[0], 0.0)
        self.assertEqual(simulate.integrated_turning(traj), (0.0, 0.0))

    def test_3(self):
        """
        Truncation
        Test that a short horizon truncates the run.
        """
        settings = simulate.IntegratorSettings(max_time=0.5)
        _, traj = self.run_from(1.0, ControlGains(), settings=settings)
        self.assertTrue(traj.truncated)
        self.assertAlmostEqual(traj.t[-1], 0.5, places=12)

        with self.assertRaises(Exception) as context:
            simulate.integrated_turning(traj)
        self.assertTrue('Turning integrals require a converged trajectory.' in str(context.exception))

    def test_4(self):
        """
        Sample Times
        Test that sample times must start at zero and increase.
        """
        with self.assertRaises(Exception) as context:
            simulate.Trajectory([0.0, 0.0], np.zeros((2, 2)), [0.0, 0.0], np.zeros((2, 2)), self.goal, "bi")
        self.assertTrue('Sample times must start at zero' in str(context.exception))

        with self.assertRaises(Exception) as context:
            simulate.Trajectory([0.1, 0.2], np.zeros((2, 2)), [0.0, 0.0], np.zeros((2, 2)), self.goal, "bi")
        self.assertTrue('Sample times must start at zero' in str(context.exception))

    def test_5(self):
        """
        Turning Integral Methods
        Test that the integrated channel and the trapezoidal rule agree.
        """
        _, traj = self.run_from(1.0, ControlGains(kv=1.0, kw=2.0))
        signed, absolute = simulate.integrated_turning(traj)
        signed_trapz, absolute_trapz = simulate.integrated_turning(traj, method="trapezoid")
        self.assertTrue(abs(signed - signed_trapz) < 1e-2)
        self.assertTrue(abs(absolute - absolute_trapz) < 1e-2)
        self.assertAlmostEqual(signed, absolute, places=8)

        with self.assertRaises(Exception) as context:
            simulate.integrated_turning(traj, method="simpson")
        self.assertTrue('Invalid turning integral method argument.' in str(context.exception))

    def test_6(self):
        """
        Goal Line Crossing
        Test goal line crossing detection on hand made trajectories.
        """
        t = [0.0, 1.0, 2.0]
        straight = simulate.Trajectory(t, [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]], [0.0] * 3, np.zeros((3, 2)),
                                       self.goal, "bi")
        self.assertFalse(simulate.crosses_goal_line(straight))
        one_side = simulate.Trajectory(t, [[0.0, 0.0], [0.5, 0.2], [1.0, 0.0]], [0.0] * 3, np.zeros((3, 2)),
                                       self.goal, "bi")
        self.assertFalse(simulate.crosses_goal_line(one_side))
        both = simulate.Trajectory(t, [[0.0, 0.0], [0.5, 0.2], [1.5, -0.1]], [0.0] * 3, np.zeros((3, 2)),
                                   self.goal, "bi")
        self.assertTrue(simulate.crosses_goal_line(both))


class ClosedLoopTestCase(SimulateTestCase):
    """Class for closed-loop acceptance tests."""

    def test_1(self):
        """
        Total Turning Grid
        Test the closed form total turning against the simulated integral.
        """
        for kv, kw in GRID_GAINS:
            gains = ControlGains(kv=kv, kw=kw)
            for psi0 in GRID_PSI:
                state, traj = self.run_from(psi0, gains)
                self.assertTrue(traj.converged)
                signed, absolute = simulate.integrated_turning(traj)
                closed_form = turning.total_turning(state, self.goal, gains)
                self.assertTrue(abs(closed_form - signed) <= 1e-3)
                # no circulation without spirals
                self.assertTrue(abs(signed) <= 2.0 * abs(psi0) + 1e-3)
                self.assertAlmostEqual(signed, np.sign(psi0) * absolute, places=6)

    def test_2(self):
        """
        Spiral Circulation
        Test the turning effort of the spiral regime kv > kw.
        """
        gains = ControlGains(kv=4.0, kw=1.0)
        state = UnicycleState([0.0, -1.0], 0.0)
        goal = np.zeros(2)
        settings = simulate.IntegratorSettings(rel_tol=1e-10, abs_tol=1e-30, goal_eps=1e-20)
        traj = simulate.simulate_to_goal(state, goal, gains, settings=settings)
        self.assertTrue(traj.converged)

        closed_form = turning.total_turning(state, goal, gains)
        self.assertAlmostEqual(closed_form, 5.2747, places=4)
        signed, _ = simulate.integrated_turning(traj)
        self.assertTrue(abs(signed - closed_form) <= 1e-2)
        self.assertTrue(abs(signed) > np.pi)

    def test_3(self):
        """
        Heading Error Linearization
        Test that the heading error decays as psi0 exp(-kw t).
        """
        for kv, kw in GRID_GAINS:
            gains = ControlGains(kv=kv, kw=kw)
            for psi0 in GRID_PSI:
                _, traj = self.run_from(psi0, gains)
                self.assertTrue(simulate.heading_error_residual(traj, gains) <= 1e-5)

    def test_4(self):
        """
        Lyapunov Decrease
        Test that psi^2 + |g - x|^2 never increases along the samples.
        """
        for kv, kw in ((1.0, 1.0), (1.0, 3.0), (4.0, 1.0)):
            gains = ControlGains(kv=kv, kw=kw)
            for psi0 in (-1.5, 0.5, 1.5):
                _, traj = self.run_from(psi0, gains, settings=simulate.IntegratorSettings())
                self.assertEqual(non_increasing_violations(traj.lyapunov, tol=1e-9).shape[0], 0)
                self.assertEqual(non_increasing_violations(traj.dist, tol=1e-9).shape[0], 0)

    def test_5(self):
        """
        Directional Turning
        Test the forward and backward total turning with the goal behind.
        """
        gains = ControlGains(kv=1.0, kw=2.0)
        goal = np.array([-1.0, 0.3])
        for mode in ("fwd", "bwd"):
            state = UnicycleState([0.0, 0.0], 0.0)
            traj = simulate.simulate_to_goal(state, goal, gains, mode, self.tight)
            self.assertTrue(traj.converged)
            signed, _ = simulate.integrated_turning(traj)
            self.assertTrue(abs(signed - turning.total_turning(state, goal, gains, mode)) <= 1e-3)
            if mode == "fwd":
                self.assertTrue(np.all(traj.inputs[:, 0] >= 0.0))
            else:
                self.assertTrue(np.all(traj.inputs[:, 0] <= 0.0))

    def test_6(self):
        """
        Tolerance Refinement
        Test that halving the tolerances moves the state at a fixed time by less than ten relative tolerances.
        """
        gains = ControlGains(kv=1.0, kw=2.0)
        goal = np.array([2.0, 1.0])
        coarse = simulate.IntegratorSettings(rel_tol=1e-6, abs_tol=1e-9, max_time=1.5)
        fine = coarse.replace(rel_tol=5e-7, abs_tol=5e-10)
        for theta in (-2.0, 0.0, 1.0, 3.0):
            state = UnicycleState([0.0, 0.0], theta)
            first = simulate.simulate_to_goal(state, goal, gains, "bi", coarse)
            second = simulate.simulate_to_goal(state, goal, gains, "bi", fine)
            self.assertTrue(first.truncated and second.truncated)
            self.assertAlmostEqual(first.t[-1], second.t[-1], places=12)
            self.assertTrue(np.linalg.norm(first.positions[-1] - second.positions[-1]) < 10.0 * coarse.rel_tol)


if __name__ == '__main__':
    unittest.main()
