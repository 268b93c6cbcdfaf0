""" Test files for Henon_Domain_Main """

### Load in test module
import NACS.src.back_end.Henon_Domain.Henon_Domain_Main as tm

### Load in needed libraries
import math
import unittest

import numpy as np

from NACS.src.back_end.General_Utility.Errors import GeometryError
from NACS.src.back_end.Map_Core.Map_Sequences import HenonParams
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    curve_from_dict,
    strip_contains,
)


class Test_Henon_Domain(unittest.TestCase):
    def setUp(self):
        self.params = HenonParams(9.5, 0.1)
        self.geom = tm.build_geometry(self.params)

    """
    ---------------------------------------------------------------------------
    TESTING FOR headline_constants()
    ---------------------------------------------------------------------------
    """

    def test_headline_constants(self):
        c = tm.headline_constants(self.params)
        self.assertAlmostEqual(c["R"], 1.0 + math.sqrt(10.6), places=12)
        # quoted as 4.25, truncated rather than rounded
        self.assertEqual(math.floor(c["R"] * 100) / 100, 4.25)
        self.assertAlmostEqual(c["slope_bound"], 0.527, delta=5e-3)
        self.assertLess(c["slope_bound"], 0.615)
        self.assertAlmostEqual(c["mu_product"], 0.378225, places=12)
        self.assertAlmostEqual(c["one_minus_mu_product"], 0.621775, places=12)
        self.assertAlmostEqual(c["threshold"], 1.1205, places=4)
        self.assertAlmostEqual(c["xbar2_upper"], 3.8699, places=4)
        self.assertAlmostEqual(c["x2_lower"], 3.8887, places=4)
        self.assertAlmostEqual(c["dxbar2_bound"], 0.1504, places=4)
        self.assertAlmostEqual(c["dx2_bound"], 0.8450, places=4)

    def test_sector_threshold(self):
        self.assertAlmostEqual(tm.sector_threshold(1.0), 1.0, places=15)
        self.assertAlmostEqual(tm.sector_threshold(0.5), 1.25, places=15)

    """
    ---------------------------------------------------------------------------
    TESTING FOR build_geometry() and HenonGeometry
    ---------------------------------------------------------------------------
    """

    def test_build_geometry_refuses_small_a(self):
        with self.assertRaises(GeometryError):
            tm.build_geometry(HenonParams(8.0, 0.1))

    def test_degenerate_strip_raises(self):
        geom = tm.HenonGeometry(HenonParams(8.0, 0.1))
        with self.assertRaises(GeometryError):
            geom.v_strip(3, 1)

    def test_strip_index_out_of_range(self):
        with self.assertRaises(GeometryError):
            self.geom.v_strip(0, 3)

    def test_symbol_sides(self):
        r = self.geom.r
        for n in (-1, 0, 2):
            v1, v2 = self.geom.v_strip(n, 1), self.geom.v_strip(n, 2)
            self.assertGreater(float(v1.lower(0.0)), 0.0)
            self.assertLess(float(v2.upper(0.0)), 0.0)
            h1, h2 = self.geom.h_strip_at(n, 1), self.geom.h_strip_at(n, 2)
            self.assertGreater(float(h1.lower(r)), 0.0)
            self.assertLess(float(h2.upper(-r)), 0.0)

    def test_h_strip_is_image_of_v_strip(self):
        """f_n maps the centre line of V_i^n into H_i^{n+1}."""
        y = np.linspace(-self.geom.r, self.geom.r, 257)
        for n in (-4, 0, 5):
            for i in (1, 2):
                v = self.geom.v_strip(n, i)
                x = 0.5 * (v.lower(y) + v.upper(y))
                X, Y = self.geom.seq.forward_xy(n, x, y)
                self.assertTrue(
                    np.all(strip_contains(self.geom.h_strip_at(n + 1, i), X, Y, 1e-9))
                )

    def test_random_points_move_between_strips(self):
        """f_n carries V_i^n into H_i^{n+1} and f_n^{-1} carries it back."""
        rng = np.random.RandomState(17)
        r = self.geom.r
        for n in (-7, 0, 3):
            for i in (1, 2):
                v = self.geom.v_strip(n, i)
                h = self.geom.h_strip_at(n + 1, i)
                t = rng.uniform(-r, r, 10 ** 4)
                s = rng.uniform(0.0, 1.0, 10 ** 4)
                x = v.lower(t) + s * (v.upper(t) - v.lower(t))
                X, Y = self.geom.seq.forward_xy(n, x, t)
                self.assertTrue(np.all(strip_contains(h, X, Y, 1e-9)))
                Y = h.lower(t) + s * (h.upper(t) - h.lower(t))
                x, y = self.geom.seq.inverse_xy(n, t, Y)
                self.assertTrue(np.all(strip_contains(v, x, y, 1e-9)))

    """
    ---------------------------------------------------------------------------
    TESTING FOR key_points() and boundary_images()
    ---------------------------------------------------------------------------
    """

    def test_key_points_at_zero(self):
        kp = tm.key_points(self.geom, 0)
        r = self.geom.r
        self.assertAlmostEqual(kp.p[0].x, 9.6 + r, places=12)
        self.assertEqual(kp.q[1].x, 0.0)
        self.assertAlmostEqual(kp.q[1].y, 9.6 - r, places=12)

    def test_boundary_images_shape(self):
        images = tm.boundary_images(self.geom, 0, samples=32)
        self.assertEqual(set(images), {"forward", "inverse"})
        self.assertEqual(set(images["forward"]), {"L1", "L2", "L3", "L4"})
        self.assertEqual(len(images["inverse"]["L3"]), 32)

    def test_geometry_record(self):
        record = tm.geometry_record(self.geom, 0, samples=32)
        r = self.geom.r
        self.assertTrue(np.allclose(record["domain"], [-r, r]))
        self.assertAlmostEqual(record["a"], 9.6, places=12)
        self.assertAlmostEqual(record["key_points"]["p1"][0], 9.6 + r, places=12)
        self.assertEqual(len(record["boundary_images"]["forward"]["L2"]), 32)
        upper = curve_from_dict(record["horizontal"]["2"]["upper"])
        x = np.linspace(-r, r, 50)
        self.assertTrue(np.allclose(upper(x), self.geom.h_strip_at(0, 2).upper(x)))

    def test_forward_image_of_top_side_is_parabola(self):
        images = tm.boundary_images(self.geom, 0, samples=16)
        for X, Y in images["forward"]["L1"]:
            self.assertAlmostEqual(X, 9.6 - self.geom.r - Y * Y, places=10)

    """
    ---------------------------------------------------------------------------
    TESTING FOR check_domain_inequalities()
    ---------------------------------------------------------------------------
    """

    def test_domain_inequalities_pass(self):
        report = tm.check_domain_inequalities(self.geom)
        self.assertTrue(report.passed, [r.as_dict() for r in report.failures][:3])
        self.assertEqual(report.rows[0].n, "all")

    def test_domain_inequalities_without_modulation(self):
        geom = tm.build_geometry(HenonParams(9.5, 0.0), n_range=(-3, 3))
        report = tm.check_domain_inequalities(geom, n_range=(-3, 3))
        self.assertTrue(report.passed)

    def test_domain_inequalities_report_small_a(self):
        geom = tm.HenonGeometry(HenonParams(8.0, 0.1))
        report = tm.check_domain_inequalities(geom, n_range=(0, 5))
        self.assertFalse(report.passed)
        names = {row.inequality for row in report.failures}
        self.assertIn("A* - eps > 2R", names)

    def test_row_dict_keys(self):
        row = tm.check_domain_inequalities(self.geom, n_range=(0, 0)).rows[1]
        self.assertEqual(
            set(row.as_dict()), {"n", "inequality", "lhs", "rhs", "margin", "pass"}
        )

    """
    ---------------------------------------------------------------------------
    TESTING FOR strip_separation_check()
    ---------------------------------------------------------------------------
    """

    def test_separation_passes_over_window(self):
        for n in range(-100, 101):
            report = tm.strip_separation_check(self.geom, n)
            self.assertTrue(report.passed, n)
            self.assertLess(report.xbar1, report.xbar2)
            self.assertLess(report.xbar2, report.x2)

    def test_separation_fails_for_small_a(self):
        geom = tm.HenonGeometry(HenonParams(8.0, 0.1))
        report = tm.strip_separation_check(geom, 0)
        self.assertFalse(report.passed)
        failed = {row.inequality for row in report.inequalities.failures}
        self.assertIn("xbar2 < x2", failed)

    def test_separation_fails_for_half_slope(self):
        geom = tm.HenonGeometry(self.params, mu_h=0.5, mu_v=0.5)
        report = tm.strip_separation_check(geom, 0)
        self.assertFalse(report.passed)
        failed = {row.inequality for row in report.inequalities.failures}
        self.assertIn("xbar2 < x2", failed)

    def test_separation_derivatives(self):
        report = tm.strip_separation_check(self.geom, 0)
        self.assertLessEqual(report.dxbar2_da, report.dxbar2_bound + 1e-9)
        self.assertGreaterEqual(report.dx2_da, report.dx2_bound - 1e-9)
        self.assertLess(report.dxbar2_bound, report.dx2_bound)

    """
    ---------------------------------------------------------------------------
    TESTING FOR autonomous_remark()
    ---------------------------------------------------------------------------
    """

    def test_autonomous_remark(self):
        remark = tm.autonomous_remark(self.params)
        self.assertTrue(remark["below"])
        self.assertEqual(abs(remark["argmin_n"]), 22)
        self.assertLess(remark["min_a"], 9.472)
        self.assertAlmostEqual(remark["threshold"], 5 + 2 * math.sqrt(5), places=12)

    def test_autonomous_remark_above(self):
        remark = tm.autonomous_remark(HenonParams(10.0, 0.1), n_range=(0, 10))
        self.assertFalse(remark["below"])


if __name__ == "__main__":
    unittest.main()
