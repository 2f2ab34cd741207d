"""
Tests for the ODE decay lemma checkers.
"""

import numpy as np
from django.test import SimpleTestCase

from boussinesq.exceptions import PreconditionError
from boussinesq.numerics.odecheck import (
    SampledTrajectory,
    Verdict,
    check_lemma_A1,
    check_lemma_A2,
    check_lemma_A3,
    check_lemma_A4,
    run_series_verdicts,
    smallest_decay_constant,
    synthetic_suite,
    weighted_trajectory,
)


class SampledTrajectoryTests(SimpleTestCase):
    def test_needs_three_increasing_samples(self):
        with self.assertRaises(PreconditionError):
            SampledTrajectory(np.array([0.0, 1.0]), {"f": np.ones(2)})
        with self.assertRaises(PreconditionError):
            SampledTrajectory(np.array([0.0, 2.0, 1.0]), {"f": np.ones(3)})

    def test_columns_must_match_and_be_nonnegative(self):
        t = np.linspace(0.0, 1.0, 5)
        with self.assertRaises(PreconditionError):
            SampledTrajectory(t, {"f": np.ones(4)})
        with self.assertRaises(PreconditionError):
            SampledTrajectory(t, {"f": -np.ones(5)})

    def test_missing_role_raises(self):
        traj = SampledTrajectory(np.linspace(0.0, 1.0, 5), {"f": np.ones(5)})
        with self.assertRaises(PreconditionError):
            traj["g"]

    def test_from_series_picks_composites(self):
        t = np.linspace(0.0, 4.0, 5)
        series = {"t": t, "grad_u_sq": t, "grad_v_sq": t, "grad_w_sq": t}
        traj = SampledTrajectory.from_series(series, f="dissipation")
        np.testing.assert_array_equal(traj["f"], 3 * t)
        self.assertEqual(traj.t_final, 4.0)


class VerdictTests(SimpleTestCase):
    def test_status_and_text(self):
        verdict = Verdict("lemma_A4", "ok", 0.5, 10.0)
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.status, "pass")
        self.assertIn("result: pass", verdict.to_text())
        self.assertEqual(verdict.as_dict()["minimal_constant"], 0.5)

    def test_failed_and_violated(self):
        self.assertEqual(Verdict("x", "ok", 20.0, 10.0).status, "fail")
        violated = Verdict("x", "hypothesis-violated", 0.0, 10.0, ["f window decay fails"])
        self.assertIsNone(violated.passed)
        self.assertEqual(violated.status, "hypothesis-violated")
        self.assertIn("violation: f window decay fails", violated.to_text())


class LemmaCheckerTests(SimpleTestCase):
    def test_synthetic_families_match_expectations(self):
        for case in synthetic_suite():
            with self.subTest(case=case.name):
                self.assertEqual(case.run().status, case.expected)

    def test_each_lemma_has_a_failing_control(self):
        """Controls that meet the hypotheses but need more than the acceptance constant."""
        failing = [case for case in synthetic_suite() if case.expected == "fail"]
        self.assertEqual(sorted(case.name.split()[0] for case in failing), ["A1", "A2", "A3", "A4"])
        for case in failing:
            with self.subTest(case=case.name):
                verdict = case.run()
                self.assertEqual(verdict.hypothesis_status, "ok")
                self.assertGreater(verdict.minimal_constant, verdict.constant)
                self.assertIs(verdict.passed, False)

    def test_minimal_constants_are_stable_under_refinement(self):
        coarse = {case.name: case.run() for case in synthetic_suite(2001)}
        fine = {case.name: case.run() for case in synthetic_suite(4001)}
        for name in ("A2 power law", "A3 exponential", "A4 power law"):
            a, b = coarse[name].minimal_constant, fine[name].minimal_constant
            self.assertLessEqual(abs(a - b), 0.05 * b, name)

    def test_A2_power_law_constant(self):
        t = np.linspace(2.0, 100.0, 4001)
        traj = SampledTrajectory(t, {"f": 1.0 / t**2, "g": 2.0 / t**3, "h": np.zeros_like(t)})
        verdict = check_lemma_A2(traj, A=2.5, n=3)
        self.assertAlmostEqual(verdict.minimal_constant, 6.0 / 2.5, delta=1e-3)

    def test_A4_integral_constant(self):
        t = np.linspace(1.0, 100.0, 4001)
        verdict = check_lemma_A4(SampledTrajectory(t, {"f": 1.0 / t**2}), E=2.5, n=2, alpha=1.0)
        self.assertAlmostEqual(verdict.minimal_constant, 0.99 / 2.5, delta=1e-3)
        self.assertEqual(verdict.hypothesis_status, "ok")

    def test_A4_preconditions(self):
        traj = SampledTrajectory(np.linspace(1.0, 10.0, 50), {"f": np.ones(50)})
        with self.assertRaises(PreconditionError):
            check_lemma_A4(traj, E=1.0, n=1.0, alpha=1.0)
        with self.assertRaises(PreconditionError):
            check_lemma_A4(traj, E=1.0, n=2.0, alpha=0.4)
        short = SampledTrajectory(np.linspace(0.0, 1.5, 10), {"f": np.ones(10)})
        with self.assertRaises(PreconditionError):
            check_lemma_A4(short, E=1.0, n=2.0, alpha=1.0)
        late = SampledTrajectory(np.linspace(1.5, 10.0, 10), {"f": np.ones(10)})
        with self.assertRaises(PreconditionError):
            check_lemma_A4(late, E=1.0, n=2.0, alpha=1.0)

    def test_A1_detects_growth(self):
        t = np.linspace(0.0, 5.0, 501)
        traj = SampledTrajectory(t, {"f": np.zeros_like(t), "g": np.exp(t), "alpha": np.ones_like(t)})
        self.assertEqual(check_lemma_A1(traj).status, "hypothesis-violated")

    def test_A2_and_A3_need_positive_A(self):
        t = np.linspace(0.0, 5.0, 11)
        z = np.zeros_like(t)
        with self.assertRaises(PreconditionError):
            check_lemma_A2(SampledTrajectory(t, {"f": z, "g": z, "h": z}), A=0.0, n=2)
        with self.assertRaises(PreconditionError):
            check_lemma_A3(SampledTrajectory(t, {"f": z, "g": z}), A=-1.0, n=2)

    def test_smallest_decay_constant_of_power_law(self):
        t = np.linspace(1.0, 100.0, 9901)
        traj = SampledTrajectory(t, {"f": 1.0 / t**3})
        # (2/t) int_{t/2}^t s^-3 ds = 3 / t^3
        self.assertAlmostEqual(smallest_decay_constant(traj, 3.0), 3.0, delta=1e-3)
        weighted = weighted_trajectory(traj, 1.0)
        np.testing.assert_allclose(weighted["f"], 1.0 / t**2)


class RunSeriesVerdictTests(SimpleTestCase):
    def test_decaying_dissipation_passes(self):
        t = np.linspace(0.0, 200.0, 2001)
        decay = 1.0 / (1.0 + t) ** 3
        series = {"t": t, "grad_u_sq": decay, "grad_v_sq": decay, "grad_w_sq": decay}
        verdicts = run_series_verdicts(series)
        self.assertEqual(len(verdicts), 2)
        for verdict in verdicts:
            self.assertEqual(verdict.status, "pass", verdict.to_text())

    def test_short_series_gives_no_verdicts(self):
        t = np.linspace(0.0, 1.0, 11)
        series = {"t": t, "grad_u_sq": t, "grad_v_sq": t, "grad_w_sq": t}
        self.assertEqual(run_series_verdicts(series), [])
