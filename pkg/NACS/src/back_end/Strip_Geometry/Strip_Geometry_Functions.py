### Standard Libraries
import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

### External Libraries
import numpy as np
from scipy.interpolate import PchipInterpolator

### General Modules
from NACS.src.back_end.General_Utility.Errors import (
    ConvergenceError,
    GeometryError,
    NestingError,
)
from NACS.src.back_end.Map_Core.Map_Sequences import Point2

"""
This file contains the curves and strips everything else is built from.

A horizontal curve is the graph y = h(x) over an x-interval, a vertical
curve the graph x = v(y) over a y-interval; both come with a Lipschitz bound.
A strip is the region between two curves of the same orientation. The
operations here are the numerical contracts the refinement machinery relies
on: widths, full intersection, nested limits and the unique crossing of a
vertical with a horizontal curve.
"""

DEFAULT_SAMPLES = 1024
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
STRIP_ORDER_SAMPLES = 65
STRIP_ORDER_TOL = 1e-12


class Orientation(enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class LipschitzCurve(ABC):
    """Graph of a Lipschitz function over a closed parameter interval.

    Calling the curve evaluates it; arrays are evaluated element-wise.
    """

    def __init__(self, orientation, param_interval, lipschitz_bound):
        lo, hi = float(param_interval[0]), float(param_interval[1])
        if not lo <= hi:
            raise GeometryError("curve interval must satisfy lo <= hi")
        if not lipschitz_bound >= 0:
            raise GeometryError("Lipschitz bound must be non-negative")
        self.orientation = Orientation(orientation)
        self.param_interval = (lo, hi)
        self.lipschitz_bound = float(lipschitz_bound)

    @abstractmethod
    def _evaluate(self, t):
        """Evaluate at an array of parameters inside the interval."""

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self._evaluate(t_arr)
        if np.ndim(t) == 0:
            return float(out)
        return out

    def eval(self, t):
        return self(t)

    def clip(self, t):
        return np.clip(t, self.param_interval[0], self.param_interval[1])

    def grid(self, samples=DEFAULT_SAMPLES):
        return np.linspace(
            self.param_interval[0], self.param_interval[1], int(samples)
        )


class ParabolaCurve(LipschitzCurve):
    """Closed form value = sign * sqrt(a + offset - t).

    These are the boundary parabolas of the Henon strips, e.g.
    x = sqrt(A(n) - R - y) for the inner boundary of V_1.
    """

    def __init__(
        self, orientation, param_interval, lipschitz_bound, sign, a, offset
    ):
        super().__init__(orientation, param_interval, lipschitz_bound)
        self.sign = 1.0 if sign >= 0 else -1.0
        self.a = float(a)
        self.offset = float(offset)

    def _evaluate(self, t):
        return self.sign * np.sqrt(self.a + self.offset - t)

    def max_slope(self):
        """Largest |derivative| on the interval, attained at its top end."""
        radicand = self.a + self.offset - self.param_interval[1]
        if radicand <= 0:
            return math.inf
        return 1.0 / (2.0 * math.sqrt(radicand))


class FunctionCurve(LipschitzCurve):
    """Curve given by a vectorised python callable."""

    def __init__(self, orientation, param_interval, lipschitz_bound, func):
        super().__init__(orientation, param_interval, lipschitz_bound)
        self.func = func

    def _evaluate(self, t):
        return np.broadcast_to(
            np.asarray(self.func(t), dtype=float), np.shape(t)
        ).copy()


class ConstantCurve(LipschitzCurve):
    def __init__(self, orientation, param_interval, value):
        super().__init__(orientation, param_interval, 0.0)
        self.value = float(value)

    def _evaluate(self, t):
        return np.full(np.shape(t), self.value)


class TabulatedCurve(LipschitzCurve):
    """Curve interpolated from a sample table.

    Segment slopes are clamped to the declared bound before interpolation,
    then a shape preserving cubic (PCHIP) is fitted. error_bound carries the
    distance to the exact curve when the table is an approximation.
    """

    def __init__(
        self, orientation, t, values, lipschitz_bound, error_bound=0.0
    ):
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape or t.size < 2:
            raise GeometryError("sample table needs matching 1-d arrays")
        if not np.all(np.isfinite(values)):
            raise GeometryError("sample table contains non-finite values")
        super().__init__(orientation, (t[0], t[-1]), lipschitz_bound)

        steps = np.diff(t)
        slopes = np.diff(values) / steps
        bound = self.lipschitz_bound
        if np.any(np.abs(slopes) > bound):
            slopes = np.clip(slopes, -bound, bound)
            values = values[0] + np.concatenate(([0.0], np.cumsum(slopes * steps)))

        self.t = t
        self.values = values
        self.error_bound = float(error_bound)
        self._interp = PchipInterpolator(t, values, extrapolate=True)

    def _evaluate(self, t):
        return self._interp(self.clip(t))


@dataclass(frozen=True)
class Strip:
    """Region between two non-intersecting curves of one orientation."""

    orientation: Orientation
    lower: LipschitzCurve
    upper: LipschitzCurve

    def __post_init__(self):
        if not (
            self.lower.orientation == self.orientation
            and self.upper.orientation == self.orientation
        ):
            raise GeometryError("strip boundaries must share the orientation")
        lo_a, lo_b = self.lower.param_interval
        up_a, up_b = self.upper.param_interval
        if abs(lo_a - up_a) > 1e-12 or abs(lo_b - up_b) > 1e-12:
            raise GeometryError("strip boundaries must share the interval")
        t = _grid_with_endpoints(self.param_interval, STRIP_ORDER_SAMPLES)
        gap = self.gap(t)
        if not np.all(gap >= -STRIP_ORDER_TOL):
            worst = int(np.nanargmin(gap)) if np.any(np.isfinite(gap)) else 0
            raise GeometryError(
                "strip boundaries cross: upper - lower = %.3g at t = %.6g"
                % (gap[worst], t[worst])
            )

    @property
    def param_interval(self):
        return self.lower.param_interval

    @property
    def lipschitz_bound(self):
        return max(self.lower.lipschitz_bound, self.upper.lipschitz_bound)

    def gap(self, t):
        return self.upper(t) - self.lower(t)


def _grid_with_endpoints(interval, samples):
    return np.linspace(interval[0], interval[1], max(int(samples), 2))


def strip_width(s, samples=DEFAULT_SAMPLES):
    """Width of a strip: the largest gap between its boundary curves.

    The gap is evaluated on a uniform grid of the parameter interval, which
    always includes both endpoints.
    """
    t = _grid_with_endpoints(s.param_interval, samples)
    return float(np.max(s.gap(t)))


def strip_excess(strip, x, y):
    """How far (x, y) sits outside the closed strip, 0 inside.

    Measured per coordinate: the smallest widening of the parameter
    interval and of the two boundaries that takes the point in.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if strip.orientation is Orientation.VERTICAL:
        t, value = y, x
    else:
        t, value = x, y
    lo, hi = strip.param_interval
    tc = np.clip(t, lo, hi)
    off_ends = np.maximum(lo - t, t - hi)
    off_sides = np.maximum(strip.lower(tc) - value, value - strip.upper(tc))
    return np.maximum(np.maximum(off_ends, off_sides), 0.0)


def strip_contains(strip, x, y, tol=0.0):
    """Vectorised test that (x, y) lies in the closed strip widened by tol."""
    return strip_excess(strip, x, y) <= tol


def strip_midline(strip, samples=DEFAULT_SAMPLES):
    """The curve halfway between the two boundaries, as a table."""
    t = _grid_with_endpoints(strip.param_interval, samples)
    mid = 0.5 * (strip.lower(t) + strip.upper(t))
    return TabulatedCurve(
        strip.orientation,
        t,
        mid,
        strip.lipschitz_bound,
        error_bound=strip_width(strip, samples),
    )


def _sampled_containment(inner, outer, samples, tol):
    t = _grid_with_endpoints(inner.param_interval, samples)
    o_lo, o_hi = outer.param_interval
    if t[0] < o_lo - tol or t[-1] > o_hi + tol:
        return False
    tc = np.clip(t, o_lo, o_hi)
    return bool(
        np.all(outer.lower(tc) <= inner.lower(t) + tol)
        and np.all(inner.upper(t) <= outer.upper(tc) + tol)
    )


def intersects_fully(inner, outer, samples=DEFAULT_SAMPLES, tol=1e-8):
    """Whether inner lies inside outer with its horizontal boundary on outer's.

    For vertical strips the horizontal boundary is the pair of segments
    closing the strip at the ends of its y-interval; inner intersects outer
    fully when inner is contained in outer and reaches both of those ends.
    Horizontal strips are handled the same way with the roles of x and y
    exchanged.
    """

    if inner.orientation is not outer.orientation:
        raise GeometryError("intersects_fully needs strips of one orientation")

    if not _sampled_containment(inner, outer, samples, tol):
        return False

    i_lo, i_hi = inner.param_interval
    o_lo, o_hi = outer.param_interval
    return abs(i_lo - o_lo) <= tol and abs(i_hi - o_hi) <= tol


def iterate_intersection(v, h, y0=None):
    """Yield the iterates y_{k+1} = h(v(y_k)) of the crossing iteration."""
    if y0 is None:
        y0 = h(h.clip(v(0.5 * sum(v.param_interval))))
    y = float(y0)
    while True:
        yield y
        y = h(h.clip(v(v.clip(y))))


def curve_intersection(v, h, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Unique crossing point of a vertical and a horizontal curve.

    Parameters
    ----------
    v: LipschitzCurve
        Vertical curve x = v(y).

    h: LipschitzCurve
        Horizontal curve y = h(x).

    tol: float
        Stop when successive iterates differ by less than tol.

    max_iter: integer
        Iteration budget.


    Returns
    -------
    point: Point2
        The (x, y) with x = v(y) and y = h(x).
    """

    if v.orientation is not Orientation.VERTICAL:
        raise GeometryError("first curve must be vertical")
    if h.orientation is not Orientation.HORIZONTAL:
        raise GeometryError("second curve must be horizontal")
    if not v.lipschitz_bound * h.lipschitz_bound < 1.0:
        raise GeometryError(
            "curve_intersection needs mu_v * mu_h < 1, got %.6g"
            % (v.lipschitz_bound * h.lipschitz_bound)
        )

    iterates = iterate_intersection(v, h)
    previous = next(iterates)
    for _ in range(max_iter):
        current = next(iterates)
        if abs(current - previous) < tol:
            break
        previous = current
    else:
        raise ConvergenceError(
            "curve_intersection did not converge in %d iterations; "
            "the declared Lipschitz bounds are probably violated" % max_iter
        )

    y = current
    x = v(v.clip(y))
    slack = 10.0 * tol
    v_lo, v_hi = v.param_interval
    h_lo, h_hi = h.param_interval
    if not (v_lo - slack <= y <= v_hi + slack and h_lo - slack <= x <= h_hi + slack):
        raise GeometryError(
            "crossing point (%.6g, %.6g) lies outside the curve intervals"
            % (x, y)
        )
    return Point2(x, y)


def nested_limit(strips, samples=DEFAULT_SAMPLES, tol=1e-9):
    """Approximate the limit curve of a nested sequence of strips.

    The midline of the last strip is returned; its error_bound is the width
    of that strip, its Lipschitz bound the largest bound in the sequence.
    """

    strips = list(strips)
    if not strips:
        raise NestingError("nested_limit needs at least one strip")

    for k, (outer, inner) in enumerate(zip(strips, strips[1:])):
        if inner.orientation is not outer.orientation:
            raise NestingError("strip %d changes orientation" % (k + 1))
        if not _sampled_containment(inner, outer, samples, tol):
            raise NestingError(
                "strip %d is not contained in strip %d" % (k + 1, k)
            )

    last = strips[-1]
    t = _grid_with_endpoints(last.param_interval, samples)
    mid = 0.5 * (last.lower(t) + last.upper(t))
    return TabulatedCurve(
        last.orientation,
        t,
        mid,
        max(s.lipschitz_bound for s in strips),
        error_bound=strip_width(last, samples),
    )


def lipschitz_audit(curve, n_points=1000, slack=1e-9):
    """Pairwise slope check of a curve against its declared bound.

    Returns
    -------
    max_slope: float
        Largest |c(t1) - c(t2)| / |t1 - t2| over all sampled pairs.

    passed: bool
        max_slope <= lipschitz_bound + slack.
    """

    t = curve.grid(n_points)
    values = curve(t)
    dt = np.abs(t[:, None] - t[None, :])
    dv = np.abs(values[:, None] - values[None, :])
    mask = dt > 0
    max_slope = float(np.max(dv[mask] / dt[mask])) if np.any(mask) else 0.0
    return max_slope, max_slope <= curve.lipschitz_bound + slack


def curve_in_domain(curve, box, samples=DEFAULT_SAMPLES, tol=1e-12):
    """Whether the sampled graph of a curve lies inside the square box."""
    t = curve.grid(samples)
    values = curve(t)
    if curve.orientation is Orientation.VERTICAL:
        return bool(np.all(box.contains(values, t, tol)))
    return bool(np.all(box.contains(t, values, tol)))


def cell_points(v_strip, h_strip, s, t, iterations=80):
    """Points of the cell v_strip ∩ h_strip in curvilinear coordinates.

    s in [0, 1] selects the vertical curve lower + s * (upper - lower) of
    v_strip, t in [0, 1] the horizontal curve of h_strip built the same way;
    the returned point is their crossing, found by the same contraction as
    curve_intersection, vectorised over s and t.

    Returns
    -------
    x, y: np.ndarray
        Crossing coordinates.

    valid: np.ndarray of bool
        False where the crossing falls outside either curve interval, which
        means the two strips do not cross there.
    """

    if v_strip.orientation is not Orientation.VERTICAL:
        raise GeometryError("cell_points needs a vertical strip first")
    if h_strip.orientation is not Orientation.HORIZONTAL:
        raise GeometryError("cell_points needs a horizontal strip second")

    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    s, t = np.broadcast_arrays(s, t)

    def v_family(yy):
        yc = v_strip.lower.clip(yy)
        lo = v_strip.lower(yc)
        return lo + s * (v_strip.upper(yc) - lo)

    def h_family(xx):
        xc = h_strip.lower.clip(xx)
        lo = h_strip.lower(xc)
        return lo + t * (h_strip.upper(xc) - lo)

    y = h_family(v_family(np.full(s.shape, 0.5 * sum(v_strip.param_interval))))
    for _ in range(iterations):
        y = h_family(v_family(y))
    x = v_family(y)

    v_lo, v_hi = v_strip.param_interval
    h_lo, h_hi = h_strip.param_interval
    slack = 1e-9
    residual = np.abs(y - h_family(x))
    valid = (
        (y >= v_lo - slack)
        & (y <= v_hi + slack)
        & (x >= h_lo - slack)
        & (x <= h_hi + slack)
        & (residual < 1e-8)
    )
    return x, y, valid


def strip_cell_grid(v_strip, h_strip, grid):
    """grid x grid lattice of the cell v_strip ∩ h_strip.

    grid = 2 gives exactly the four crossings of the boundary curves.
    """
    u = np.linspace(0.0, 1.0, int(grid))
    s, t = np.meshgrid(u, u, indexing="ij")
    return cell_points(v_strip, h_strip, s.ravel(), t.ravel())


### Serialisation
def curve_to_dict(curve, samples=DEFAULT_SAMPLES):
    out = {
        "orientation": curve.orientation.value,
        "interval": [curve.param_interval[0], curve.param_interval[1]],
        "lipschitz_bound": curve.lipschitz_bound,
    }
    if isinstance(curve, ParabolaCurve):
        out.update(
            {
                "form": "parabola",
                "sign": curve.sign,
                "a": curve.a,
                "offset": curve.offset,
            }
        )
    elif isinstance(curve, ConstantCurve):
        out.update({"form": "constant", "value": curve.value})
    else:
        if isinstance(curve, TabulatedCurve):
            t, values = curve.t, curve.values
        else:
            t = curve.grid(samples)
            values = curve(t)
        out.update(
            {
                "form": "table",
                "t": [float(v) for v in t],
                "values": [float(v) for v in values],
            }
        )
    return out


def curve_from_dict(data):
    orientation = Orientation(data["orientation"])
    interval = tuple(data["interval"])
    form = data["form"]
    if form == "parabola":
        return ParabolaCurve(
            orientation,
            interval,
            data["lipschitz_bound"],
            data["sign"],
            data["a"],
            data["offset"],
        )
    if form == "constant":
        return ConstantCurve(orientation, interval, data["value"])
    if form == "table":
        return TabulatedCurve(
            orientation, data["t"], data["values"], data["lipschitz_bound"]
        )
    raise GeometryError("unknown curve form %r" % (form,))


def strip_to_dict(strip, samples=DEFAULT_SAMPLES):
    return {
        "orientation": strip.orientation.value,
        "lower": curve_to_dict(strip.lower, samples),
        "upper": curve_to_dict(strip.upper, samples),
    }


def strip_outline(strip, samples=256):
    """Closed polygon (list of (x, y)) tracing the strip boundary."""
    t = _grid_with_endpoints(strip.param_interval, samples)
    lower = strip.lower(t)
    upper = strip.upper(t)
    if strip.orientation is Orientation.VERTICAL:
        pts = list(zip(lower, t)) + list(zip(upper[::-1], t[::-1]))
    else:
        pts = list(zip(t, lower)) + list(zip(t[::-1], upper[::-1]))
    return [(float(a), float(b)) for a, b in pts]
