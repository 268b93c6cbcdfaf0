### Standard Libraries
import threading
from collections import OrderedDict

### External Libraries
import numpy as np

### General Modules
from NACS.src.back_end.General_Utility.Errors import RefinementError, WordError
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    DEFAULT_TOL,
    Orientation,
    Strip,
    TabulatedCurve,
    curve_intersection,
    strip_midline,
    strip_width,
)
from NACS.src.back_end.Symbolic_Dynamics.Itinerary_Functions import (
    Itinerary,
    shift_word,
)

"""
Strip refinement along itineraries.

V(s_n .. s_{n+k}) at time n is the set of points of V_{s_n}^n whose image
under f_n lies in V(s_{n+1} .. s_{n+k}) at time n+1. Its boundaries are the
pullbacks of the boundaries of the finer strip, found pointwise by bisection
inside V_{s_n}^n and re-tabulated. H(s_{n-k} .. s_{n-1}) at time n is built
the same way by pushing forward through f_{n-1}.
"""

DEFAULT_CURVE_SAMPLES = 1025
BISECTION_STEPS = 64
BRACKET_TOL = 1e-9
DEFAULT_CACHE_SIZE = 512


class StripRefiner:
    """Memoised V(word) and H(word) strips of one geometry.

    Parameters
    ----------
    geom: StripGeometry
        Supplies V_i^n and H_i^n.

    seq: MapSequence
        The dynamics the strips are pulled back and pushed through.

    samples: integer
        Table size of every refined boundary curve.

    transitions: TransitionMatrixSeq or None
        When given, a non admissible word raises WordError up front instead
        of failing inside the bisection.

    cache_size: integer
        Strips kept per orientation; the least recently used go first.
    """

    def __init__(
        self,
        geom,
        seq,
        samples=DEFAULT_CURVE_SAMPLES,
        transitions=None,
        bisection_steps=BISECTION_STEPS,
        cache_size=DEFAULT_CACHE_SIZE,
    ):
        self.geom = geom
        self.seq = seq
        self.samples = int(samples)
        self.transitions = transitions
        self.bisection_steps = int(bisection_steps)
        if int(cache_size) < 1:
            raise RefinementError("cache_size must be positive, got %r" % (cache_size,))
        self.cache_size = int(cache_size)
        self._vertical = OrderedDict()
        self._horizontal = OrderedDict()
        self._widths = OrderedDict()
        self._lock = threading.RLock()

    def __repr__(self):
        return "StripRefiner(%r, samples=%d, cached=%d)" % (
            self.geom,
            self.samples,
            len(self._vertical) + len(self._horizontal),
        )

    ### Public interface
    def vertical(self, n, future):
        """V(future) at time n; future = (s_n, ..., s_{n+k})."""
        n, future = int(n), tuple(future)
        if not future:
            raise WordError("vertical refinement needs at least one symbol")
        key = (n, future)
        cached = self._recall(self._vertical, key)
        if cached is not None:
            return cached

        if len(future) == 1:
            strip = self._base_strip(self.geom.v_strip(n, future[0]), n, future)
        else:
            self._check_transition(n, future[0], future[1])
            finer = self.vertical(n + 1, future[1:])
            bracket = self._base_strip(
                self.geom.v_strip(n, future[0]), n, future[:1]
            )
            strip = self._pullback(finer, n, bracket)

        self._store(self._vertical, key, strip)
        return strip

    def horizontal(self, n, past):
        """H(past) at time n; past = (s_{n-k}, ..., s_{n-1})."""
        n, past = int(n), tuple(past)
        if not past:
            raise WordError("horizontal refinement needs at least one symbol")
        key = (n, past)
        cached = self._recall(self._horizontal, key)
        if cached is not None:
            return cached

        if len(past) == 1:
            strip = self._base_strip(self.geom.h_strip_at(n, past[-1]), n, past)
        else:
            self._check_transition(n - 2, past[-2], past[-1])
            coarser = self.horizontal(n - 1, past[:-1])
            bracket = self._base_strip(
                self.geom.h_strip_at(n, past[-1]), n, past[-1:]
            )
            strip = self._push(coarser, n - 1, bracket)

        self._store(self._horizontal, key, strip)
        return strip

    def vertical_chain(self, n, future):
        """The nested strips V(future[:1]) ⊃ V(future[:2]) ⊃ ... at time n."""
        return [self.vertical(n, future[:k]) for k in range(1, len(future) + 1)]

    def horizontal_chain(self, n, past):
        """The nested strips H(past[-1:]) ⊃ H(past[-2:]) ⊃ ... at time n."""
        return [
            self.horizontal(n, past[len(past) - k:])
            for k in range(1, len(past) + 1)
        ]

    def width(self, strip):
        key = id(strip)
        cached = self._recall(self._widths, key)
        if cached is None or cached[0] is not strip:
            cached = (strip, strip_width(strip, self.samples))
            self._store(self._widths, key, cached)
        return cached[1]

    def cache_sizes(self):
        with self._lock:
            return {
                "vertical": len(self._vertical),
                "horizontal": len(self._horizontal),
                "widths": len(self._widths),
            }

    def point(self, it, tol=DEFAULT_TOL):
        """Crossing of the midlines of H(past) and V(future) at base_time.

        Returns
        -------
        point: Point2
            Approximation of the point of Λ with this itinerary.

        error: float
            The larger of the two strip widths.
        """

        if not it.past or not it.future:
            raise WordError(
                "a point needs both a past and a future, got %s" % (it,)
            )
        v_strip = self.vertical(it.base_time, it.future)
        h_strip = self.horizontal(it.base_time, it.past)
        p = curve_intersection(
            strip_midline(v_strip, self.samples),
            strip_midline(h_strip, self.samples),
            tol=tol,
        )
        return p, max(self.width(v_strip), self.width(h_strip))

    ### Internals
    def _recall(self, cache, key):
        with self._lock:
            value = cache.get(key)
            if value is not None:
                cache.move_to_end(key)
            return value

    def _store(self, cache, key, value):
        with self._lock:
            cache[key] = value
            cache.move_to_end(key)
            while len(cache) > self.cache_size:
                cache.popitem(last=False)

    def _check_transition(self, n, i, j):
        if self.transitions is not None and not self.transitions.allows(n, i, j):
            raise WordError(
                "transition %d -> %d is not allowed at time %d" % (i, j, n)
            )

    def _base_strip(self, strip, n, word):
        if strip is None:
            raise RefinementError(
                "no strip for symbol %s at time %d" % (word[-1], n)
            )
        return strip

    def _solve(self, residual, lo, hi):
        """Vectorised bisection for residual(u) = 0 with lo <= u <= hi."""
        r_lo = residual(lo)
        r_hi = residual(hi)
        bracketed = ((r_lo <= BRACKET_TOL) & (r_hi >= -BRACKET_TOL)) | (
            (r_lo >= -BRACKET_TOL) & (r_hi <= BRACKET_TOL)
        )
        if not np.all(bracketed):
            raise RefinementError(
                "refined boundary leaves its strip at %d of %d samples"
                % (int(np.sum(~bracketed)), bracketed.size)
            )
        lo, hi = lo.copy(), hi.copy()
        for _ in range(self.bisection_steps):
            mid = 0.5 * (lo + hi)
            r_mid = residual(mid)
            same = np.sign(r_mid) == np.sign(r_lo)
            lo = np.where(same, mid, lo)
            r_lo = np.where(same, r_mid, r_lo)
            hi = np.where(same, hi, mid)
        return 0.5 * (lo + hi)

    def _tabulate(self, orientation, t, a, b, bound):
        lower = np.minimum(a, b)
        upper = np.maximum(a, b)
        return Strip(
            orientation,
            TabulatedCurve(orientation, t, lower, bound),
            TabulatedCurve(orientation, t, upper, bound),
        )

    def _pullback(self, finer, n, bracket):
        """Boundaries of bracket ∩ f_n^{-1}(finer), curves x = w(y)."""
        y = np.linspace(*bracket.param_interval, self.samples)
        lo = np.asarray(bracket.lower(y), dtype=float)
        hi = np.asarray(bracket.upper(y), dtype=float)

        def pull(curve):
            def residual(x):
                X, Y = self.seq.forward_xy(n, x, y)
                return X - curve(Y)

            return self._solve(residual, lo, hi)

        return self._tabulate(
            Orientation.VERTICAL,
            y,
            pull(finer.lower),
            pull(finer.upper),
            self.geom.mu_v,
        )

    def _push(self, coarser, m, bracket):
        """Boundaries of bracket ∩ f_m(coarser), curves y = h(x)."""
        x = np.linspace(*bracket.param_interval, self.samples)
        lo = np.asarray(bracket.lower(x), dtype=float)
        hi = np.asarray(bracket.upper(x), dtype=float)

        def push(curve):
            def residual(y):
                X0, Y0 = self.seq.inverse_xy(m, x, y)
                return Y0 - curve(X0)

            return self._solve(residual, lo, hi)

        return self._tabulate(
            Orientation.HORIZONTAL,
            x,
            push(coarser.lower),
            push(coarser.upper),
            self.geom.mu_h,
        )


def refine_vertical(geom, seq, it, refiner=None):
    """V(s_n .. s_{n+k}) at time n for the future of it."""
    refiner = refiner or StripRefiner(geom, seq)
    return refiner.vertical(it.base_time, it.future)


def refine_horizontal(geom, seq, it, refiner=None):
    """H(s_{n-k} .. s_{n-1}) at time n for the past of it."""
    refiner = refiner or StripRefiner(geom, seq)
    return refiner.horizontal(it.base_time, it.past)


def itinerary_to_point(geom, seq, it, refiner=None):
    """Point of Λ_n with a truncated itinerary, plus its error bound."""
    refiner = refiner or StripRefiner(geom, seq)
    return refiner.point(it)


def conjugacy_residual(geom, seq, it, depth, refiner=None):
    """|f_n(φ_n(s)) - φ_{n+1}(σ(s))| with both sides truncated at depth.

    The itinerary needs at least depth past symbols and depth + 2 future
    symbols so that the shifted word still has depth + 1 of them.
    """

    depth = int(depth)
    if depth < 1:
        raise WordError("conjugacy depth must be at least 1")
    refiner = refiner or StripRefiner(geom, seq)
    here = it.truncate(depth, depth + 1)
    there = shift_word(it).truncate(depth, depth + 1)
    z, _ = refiner.point(here)
    z_next, _ = refiner.point(there)
    return seq.forward(it.base_time, z).distance(z_next)


def periodic_itinerary(block, n, past_len, future_len):
    """Itinerary of the periodic word ...block.block... with the dot at n.

    The block is aligned so that block[0] is the symbol at time 0.
    """

    block = tuple(block)
    if not block:
        raise WordError("periodic block must not be empty")
    period = len(block)
    past = tuple(block[m % period] for m in range(n - past_len, n))
    future = tuple(block[m % period] for m in range(n, n + future_len))
    return Itinerary(n, past, future)
