""" End to end runs at full size; set HORSESHOE_ACCEPTANCE=1 to enable """

### Load in needed libraries
import math
import os
import unittest

import numpy as np

from NACS.src.back_end.Control_Function import run_verification
from NACS.src.back_end.Cone_Verification.Cone_Verification_Main import (
    ConeParams,
    check_A3_grid,
    derive_contraction,
    measure_contraction,
)
from NACS.src.back_end.General_Utility.Errors import HypothesisError
from NACS.src.back_end.Henon_Domain.Henon_Domain_Main import (
    HenonGeometry,
    build_geometry,
    headline_constants,
    strip_separation_check,
)
from NACS.src.back_end.Invariant_Set.Invariant_Set_Main import (
    approximate_lambda,
    brute_force_survivors,
    directed_hausdorff,
)
from NACS.src.back_end.Map_Core.Map_Sequences import HenonParams
from NACS.src.back_end.Symbolic_Dynamics.Itinerary_Functions import Itinerary
from NACS.src.back_end.Symbolic_Dynamics.Strip_Refinement import (
    StripRefiner,
    conjugacy_residual,
)
from NACS.src.front_interface.Run_Config_Functions import RunConfig

ENABLED = os.environ.get("HORSESHOE_ACCEPTANCE") == "1"


@unittest.skipUnless(ENABLED, "set HORSESHOE_ACCEPTANCE=1 to run")
class Test_Acceptance(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.params = HenonParams(9.5, 0.1)
        cls.geom = build_geometry(cls.params)
        cls.refiner = StripRefiner(cls.geom, cls.geom.seq)

    """
    ---------------------------------------------------------------------------
    TESTING FOR headline_constants()
    ---------------------------------------------------------------------------
    """

    def test_constants(self):
        c = headline_constants(self.params)
        self.assertAlmostEqual(c["R"], 1.0 + math.sqrt(10.6), places=12)
        self.assertEqual(math.floor(c["R"] * 100) / 100, 4.25)
        for key, expected in (
            ("slope_bound", 0.527),
            ("mu_product", 0.378225),
            ("threshold", 1.1205),
            ("xbar2_upper", 3.8699),
            ("x2_lower", 3.8887),
            ("dxbar2_bound", 0.1504),
            ("dx2_bound", 0.8450),
            ("one_minus_mu_product", 0.621775),
        ):
            self.assertLess(abs(c[key] - expected), 5e-3, key)

    """
    ---------------------------------------------------------------------------
    TESTING FOR the full window verification
    ---------------------------------------------------------------------------
    """

    def test_full_window_verification(self):
        report = run_verification(RunConfig(quiet=True))
        self.assertEqual(len(report.rows), 201)
        self.assertTrue(report.passed, [r for r in report.rows if not r["pass"]][:3])
        summary = report.summary
        self.assertGreater(summary["min_sector_margin"], 0.0)
        self.assertGreater(summary["min_expansion_ratio"], 1.0)
        self.assertLess(summary["nu_v"], 1.0)
        self.assertLessEqual(summary["max_measured_contraction"], summary["nu_v"])
        self.assertTrue(summary["transitions_full"])
        self.assertTrue(summary["remark_flag"])
        self.assertLess(summary["autonomous_remark"]["min_a"], 5 + 2 * math.sqrt(5))

    """
    ---------------------------------------------------------------------------
    TESTING FOR the conjugacy diagram at depth 8
    ---------------------------------------------------------------------------
    """

    def test_conjugacy_depth_eight(self):
        depth = 8
        ratio = measure_contraction(
            self.geom.seq, self.geom, 0, 6, self.refiner
        ).max_ratio
        tol = max(1e-6, ratio ** depth * 2.0 * self.geom.r)
        rng = np.random.RandomState(2024)
        worst = 0.0
        for _ in range(100):
            word = tuple(rng.randint(1, 3, size=2 * depth + 2))
            it = Itinerary(0, word[:depth], word[depth:])
            worst = max(
                worst,
                conjugacy_residual(self.geom, self.geom.seq, it, depth, self.refiner),
            )
        self.assertLess(worst, tol, "measured contraction %.4g" % ratio)

    """
    ---------------------------------------------------------------------------
    TESTING FOR the survivor oracle
    ---------------------------------------------------------------------------
    """

    def test_oracle_agreement(self):
        grid, k = 2048, 6
        approx = approximate_lambda(self.geom, self.geom.seq, 0, k, self.refiner)
        self.assertEqual(len(approx), 2 ** (2 * k + 1))
        cloud = brute_force_survivors(self.geom, self.geom.seq, 0, k, grid, refine=2)
        lattice = 2.0 * self.geom.r / (grid - 1)
        max_err = approx.max_err_bound
        self.assertLessEqual(
            directed_hausdorff(approx, cloud), 2.0 * lattice + max_err
        )
        self.assertLessEqual(
            directed_hausdorff(cloud, approx),
            2.0 * lattice + cloud.cell_radius + 2.0 * max_err,
        )

    """
    ---------------------------------------------------------------------------
    TESTING FOR the negative controls
    ---------------------------------------------------------------------------
    """

    def test_negative_controls(self):
        small = strip_separation_check(HenonGeometry(HenonParams(8.0, 0.1)), 0)
        self.assertIn(
            "xbar2 < x2", {r.inequality for r in small.inequalities.failures}
        )
        narrow = strip_separation_check(
            HenonGeometry(self.params, mu_h=0.5, mu_v=0.5), 0
        )
        self.assertIn(
            "xbar2 < x2", {r.inequality for r in narrow.inequalities.failures}
        )
        cones = check_A3_grid(
            self.geom.seq, self.geom, 0, 256, ConeParams(0.5, 0.5, 0.618)
        )
        self.assertFalse(cones.passed)
        self.assertLess(cones.worst_sector_margin, 0.0)
        with self.assertRaises(HypothesisError):
            derive_contraction(ConeParams(0.615, 0.615, 0.615))


if __name__ == "__main__":
    unittest.main()
