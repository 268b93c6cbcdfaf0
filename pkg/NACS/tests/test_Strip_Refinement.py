""" Test files for Strip_Refinement """

### Load in test module
import NACS.src.back_end.Symbolic_Dynamics.Strip_Refinement as tm

### Load in needed libraries
import unittest

import numpy as np

from NACS.src.back_end.General_Utility.Errors import RefinementError, WordError
from NACS.src.back_end.Map_Core.Map_Sequences import HenonParams
from NACS.src.back_end.Henon_Domain.Henon_Domain_Main import build_geometry
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    intersects_fully,
    lipschitz_audit,
    nested_limit,
    strip_cell_grid,
    strip_contains,
)
from NACS.src.back_end.Symbolic_Dynamics.Itinerary_Functions import (
    Itinerary,
    TransitionMatrixSeq,
)
from NACS.tests.Test_Doubles import (
    ForbiddenTransitionGeometry,
    LinearHorseshoe,
    LinearHorseshoeGeometry,
    RemovedStripGeometry,
)


class Test_Strip_Refinement(unittest.TestCase):
    def setUp(self):
        self.linear = LinearHorseshoe()
        self.linear_geom = LinearHorseshoeGeometry()
        self.linear_refiner = tm.StripRefiner(self.linear_geom, self.linear, samples=65)
        self.geom = build_geometry(HenonParams(9.5, 0.1), n_range=(-20, 20))
        self.refiner = tm.StripRefiner(self.geom, self.geom.seq, samples=257)
        self.rng = np.random.RandomState(11)

    """
    ---------------------------------------------------------------------------
    TESTING FOR StripRefiner on the linear horseshoe
    ---------------------------------------------------------------------------
    """

    def test_vertical_widths_shrink_by_six(self):
        for k in range(1, 6):
            strip = self.linear_refiner.vertical(0, (1,) * k)
            self.assertAlmostEqual(
                self.linear_refiner.width(strip), 6.0 ** -(k - 1) / 3.0, places=10
            )

    def test_horizontal_widths_shrink_by_six(self):
        for k in range(1, 6):
            strip = self.linear_refiner.horizontal(0, (2,) * k)
            self.assertAlmostEqual(
                self.linear_refiner.width(strip), 6.0 ** -(k - 1) / 3.0, places=10
            )

    def test_fixed_point(self):
        it = tm.periodic_itinerary((1,), 0, 6, 6)
        p, err = self.linear_refiner.point(it)
        self.assertLess(err, 6.0 ** -5)
        self.assertLessEqual(abs(p.x - 0.6), err)
        self.assertLessEqual(abs(p.y - 0.6), err)

    def test_points_stay_in_their_strips(self):
        for _ in range(200):
            past = tuple(self.rng.randint(1, 3, size=3))
            future = tuple(self.rng.randint(1, 3, size=4))
            p, _ = self.linear_refiner.point(Itinerary(0, past, future))
            self.assertTrue(
                strip_contains(self.linear_geom.v_strip(0, future[0]), p.x, p.y, 1e-9)
            )
            self.assertTrue(
                strip_contains(self.linear_geom.h_strip_at(0, past[-1]), p.x, p.y, 1e-9)
            )

    def test_conjugacy_linear_random(self):
        bound = 6.0 ** -2 / 3.0
        for _ in range(200):
            it = Itinerary(
                0,
                tuple(self.rng.randint(1, 3, size=3)),
                tuple(self.rng.randint(1, 3, size=5)),
            )
            residual = tm.conjugacy_residual(
                self.linear_geom, self.linear, it, 3, refiner=self.linear_refiner
            )
            self.assertLessEqual(residual, bound + 1e-9)

    def test_cache_returns_same_strip(self):
        a = self.linear_refiner.vertical(2, (1, 2, 1))
        b = self.linear_refiner.vertical(2, (1, 2, 1))
        self.assertIs(a, b)

    def test_cache_stays_bounded(self):
        refiner = tm.StripRefiner(self.linear_geom, self.linear, samples=33, cache_size=3)
        word = (1, 2, 1, 2, 1)
        for k in range(1, 6):
            strip = refiner.vertical(0, word[:k])
            self.assertAlmostEqual(refiner.width(strip), 6.0 ** -(k - 1) / 3.0, places=10)
            refiner.horizontal(0, word[:k])
            for size in refiner.cache_sizes().values():
                self.assertLessEqual(size, 3)
        self.assertIs(refiner.vertical(0, word), refiner.vertical(0, word))

    def test_cache_size_must_be_positive(self):
        with self.assertRaises(RefinementError):
            tm.StripRefiner(self.linear_geom, self.linear, cache_size=0)

    def test_cells_map_into_shifted_cells_linear(self):
        for _ in range(20):
            past = tuple(self.rng.randint(1, 3, size=2))
            future = tuple(self.rng.randint(1, 3, size=3))
            self._check_cell_shift(self.linear_refiner, self.linear, past, future, 1e-9)

    def test_chain_is_nested(self):
        chain = self.linear_refiner.vertical_chain(0, (2, 1, 1, 2))
        self.assertEqual(len(chain), 4)
        for outer, inner in zip(chain, chain[1:]):
            self.assertTrue(intersects_fully(inner, outer))

    """
    ---------------------------------------------------------------------------
    TESTING FOR errors
    ---------------------------------------------------------------------------
    """

    def test_empty_words(self):
        with self.assertRaises(WordError):
            self.linear_refiner.vertical(0, ())
        with self.assertRaises(WordError):
            self.linear_refiner.horizontal(0, ())
        with self.assertRaises(WordError):
            self.linear_refiner.point(Itinerary(0, (), (1,)))

    def test_missing_strip(self):
        refiner = tm.StripRefiner(RemovedStripGeometry(), self.linear, samples=33)
        with self.assertRaises(RefinementError):
            refiner.vertical(0, (2,))

    def test_forbidden_transition(self):
        geom = ForbiddenTransitionGeometry()
        refiner = tm.StripRefiner(
            geom, self.linear, samples=33, transitions=TransitionMatrixSeq(geom)
        )
        with self.assertRaises(WordError):
            refiner.vertical(0, (2, 1))
        with self.assertRaises(WordError):
            refiner.horizontal(0, (2, 1))

    def test_conjugacy_needs_long_word(self):
        it = Itinerary(0, (1,), (1, 1, 1, 1))
        with self.assertRaises(WordError):
            tm.conjugacy_residual(self.linear_geom, self.linear, it, 2)
        with self.assertRaises(WordError):
            tm.conjugacy_residual(self.linear_geom, self.linear, it, 0)

    def test_periodic_itinerary(self):
        it = tm.periodic_itinerary((1, 2), 3, 2, 3)
        self.assertEqual((it.past, it.future), ((2, 1), (2, 1, 2)))
        with self.assertRaises(WordError):
            tm.periodic_itinerary((), 0, 1, 1)

    """
    ---------------------------------------------------------------------------
    TESTING FOR StripRefiner on the Henon map
    ---------------------------------------------------------------------------
    """

    def test_henon_vertical_nesting_and_contraction(self):
        for word in ((1, 1, 1, 1, 1), (2, 1, 2, 1, 2), (1, 2, 2, 1, 1)):
            chain = self.refiner.vertical_chain(0, word)
            widths = [self.refiner.width(s) for s in chain]
            for outer, inner in zip(chain, chain[1:]):
                self.assertTrue(intersects_fully(inner, outer))
            for coarse, fine in zip(widths, widths[1:]):
                self.assertLess(fine, 0.99393 * coarse)

    def test_henon_horizontal_nesting(self):
        chain = self.refiner.horizontal_chain(0, (2, 1, 1, 2))
        for outer, inner in zip(chain, chain[1:]):
            self.assertTrue(intersects_fully(inner, outer))
            self.assertLess(self.refiner.width(inner), self.refiner.width(outer))

    def test_henon_point_in_cell(self):
        it = Itinerary(0, (1, 2, 1, 1), (2, 1, 1, 2, 2))
        p, err = tm.itinerary_to_point(self.geom, self.geom.seq, it, refiner=self.refiner)
        self.assertLess(err, 0.1)
        self.assertTrue(strip_contains(self.geom.v_strip(0, 2), p.x, p.y, 1e-9))
        self.assertTrue(strip_contains(self.geom.h_strip_at(0, 1), p.x, p.y, 1e-9))

    def test_henon_refine_helpers_match_refiner(self):
        it = Itinerary(1, (2, 2), (1, 2))
        v = tm.refine_vertical(self.geom, self.geom.seq, it, refiner=self.refiner)
        h = tm.refine_horizontal(self.geom, self.geom.seq, it, refiner=self.refiner)
        self.assertIs(v, self.refiner.vertical(1, (1, 2)))
        self.assertIs(h, self.refiner.horizontal(1, (2, 2)))

    def _check_cell_shift(self, refiner, seq, past, future, tol):
        v = refiner.vertical(0, future)
        h = refiner.horizontal(0, past)
        x, y, valid = strip_cell_grid(v, h, 6)
        self.assertTrue(np.all(valid))
        X, Y = seq.forward_xy(0, x, y)
        self.assertTrue(np.all(strip_contains(refiner.vertical(1, future[1:]), X, Y, tol)))
        self.assertTrue(
            np.all(strip_contains(refiner.horizontal(1, past + future[:1]), X, Y, tol))
        )

    def test_henon_cells_map_into_shifted_cells(self):
        for past, future in (((1, 1), (1, 1, 1)), ((2, 1), (1, 2, 2)), ((2, 2), (2, 1, 2))):
            self._check_cell_shift(self.refiner, self.geom.seq, past, future, 1e-3)

    def test_henon_refined_curves_keep_their_slopes(self):
        seq = self.geom.seq
        future = (1, 2, 2, 1)
        strip = self.refiner.vertical(0, future)
        finer = self.refiner.vertical(1, future[1:])
        for curve in (strip.lower, strip.upper):
            slopes = np.abs(np.diff(curve.values) / np.diff(curve.t))
            self.assertLessEqual(np.max(slopes), self.geom.mu_v)
            self.assertTrue(lipschitz_audit(curve, n_points=400)[1])
            # table nodes are exact pullbacks of the finer boundaries
            X, Y = seq.forward_xy(0, curve.values, curve.t)
            off = np.minimum(np.abs(X - finer.lower(Y)), np.abs(X - finer.upper(Y)))
            self.assertLess(np.max(off), 1e-8)
        past = (2, 1, 1, 2)
        strip = self.refiner.horizontal(0, past)
        for curve in (strip.lower, strip.upper):
            slopes = np.abs(np.diff(curve.values) / np.diff(curve.t))
            self.assertLessEqual(np.max(slopes), self.geom.mu_h)
            self.assertTrue(lipschitz_audit(curve, n_points=400)[1])

    def test_henon_nested_limit_depth_8_against_12(self):
        refiner = tm.StripRefiner(self.geom, self.geom.seq, samples=1025)
        word = (1, 2, 1, 1, 2, 2, 1, 2, 1, 1, 2, 1)
        chain = refiner.vertical_chain(0, word)
        coarse = nested_limit(chain[:8], tol=1e-8)
        fine = nested_limit(chain, tol=1e-8)
        self.assertLess(fine.error_bound, coarse.error_bound)
        t = np.linspace(-self.geom.r, self.geom.r, 2001)
        self.assertLessEqual(np.max(np.abs(coarse(t) - fine(t))), coarse.error_bound)

    def test_henon_conjugacy(self):
        for word in ((1,) * 10, (1, 2) * 5, (2, 2, 1, 2, 1, 1, 2, 1, 2, 2)):
            it = Itinerary(0, word[:4], word[4:])
            residual = tm.conjugacy_residual(
                self.geom, self.geom.seq, it, 4, refiner=self.refiner
            )
            # both sides lie in V(s_1..s_4) ∩ H(s_-3..s_0) at time 1
            wv = self.refiner.width(self.refiner.vertical(1, word[5:9]))
            wh = self.refiner.width(self.refiner.horizontal(1, word[1:5]))
            self.assertLess(residual, 3.0 * (wv + wh) + 1e-6)


if __name__ == "__main__":
    unittest.main()
