"""
Reference runs from the shipped configs. Minutes each; run with --tag slow.
"""

import math
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, tag

from boussinesq.services import RunConfigService, SimulationService

from .test_services import TempDirMixin

CONFIG_DIR = Path(settings.BASE_DIR) / "configs"


@tag("slow")
class StableReferenceRunTests(TempDirMixin, SimpleTestCase):
    """alpha = 1, eps = 1e-2 to t = 200 at (kmax 21, n2 129).

    At this horizon the decay is still governed by the slowest viscous
    buoyancy mode (rate about alpha / 526 for the amplitude), so the fitted
    slopes sit near -0.3 rather than in the t^-2 regime.
    """

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.config = RunConfigService().load(CONFIG_DIR / "stable-linear.ini")

    def setUp(self):
        super().setUp()
        self.outcome = SimulationService(log_to_db=False).run(self.config, output_dir=self.tmp / "stable")
        self.report = self.outcome.report

    def test_reference_run(self):
        self.assertEqual(self.outcome.status, "completed")
        self.assertAlmostEqual(self.report["final_time"], 200.0, places=6)

        with self.subTest("E_T decays at the slow-mode rate"):
            slope = self.report["slopes"]["E_T"]["slope"]
            self.assertLess(slope, -0.15)
            self.assertGreater(slope, -0.5)

        with self.subTest("windowed dissipation decays"):
            exponent = self.report["window_averages"]["exponent"]
            self.assertLess(exponent, -0.1)
            self.assertGreater(exponent, -0.6)

        with self.subTest("Lyapunov functional"):
            lyapunov = self.report["lyapunov"]
            self.assertTrue(math.isfinite(lyapunov["minimal_c1"]))
            self.assertLessEqual(lyapunov["minimal_c1"], 100.0)
            self.assertIs(lyapunov["nonincreasing"], True)


@tag("slow")
class BubbleReferenceRunTests(TempDirMixin, SimpleTestCase):
    """The shipped bubble config cut to t = 20; the full horizon is a manual run."""

    def test_horizontal_density_gradient_persists(self):
        text = (CONFIG_DIR / "bubble.ini").read_text().replace("t_final = 100", "t_final = 20")
        config = RunConfigService().parse(text, name="bubble-short")

        outcome = SimulationService(log_to_db=False).run(config, output_dir=self.tmp / "bubble")

        self.assertEqual(outcome.status, "completed")
        instability = outcome.report["instability"]
        self.assertGreaterEqual(instability["min_d1rho"], 0.5 * instability["initial_d1rho"])
        self.assertGreater(instability["gradv_integral"], 0.0)
        self.assertTrue(outcome.report["initial"]["bubble_type"])
