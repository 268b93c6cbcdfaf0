### Standard Libraries
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

### External Libraries
import numpy as np

### General Modules
from NACS.src.back_end.General_Utility.Errors import GeometryError
from NACS.src.back_end.Map_Core.Map_Sequences import (
    Point2,
    autonomous_threshold,
    eval_a,
    henon_sequence,
)
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    Orientation,
    ParabolaCurve,
    Strip,
    strip_to_dict,
)

"""
This file builds the square D, the horizontal strips H_i^{n+1} = f_n(D) ∩ D
and the vertical strips V_i^n = f_n^{-1}(D) ∩ D of the nonautonomous Henon
map for every time n, together with the inequalities the strip picture rests
on: A(n) > 2R, the key points lying outside D and the separation of the
parabolas at the sector threshold.

Symbol 1 is the strip on the non-negative side (x >= 0 for V, y >= 0 for H),
symbol 2 the strip on the negative side.
"""

DEFAULT_MU = 0.615
DEFAULT_N_RANGE = (-100, 100)
BOUNDARY_TOL = 1e-8


class StripGeometry(ABC):
    """Strips of a two-symbol (or N-symbol) horseshoe at every time n.

    v_strip(n, i) is V_i^n, h_strip_at(m, i) is H_i^m; either may return
    None when the strip does not exist.
    """

    n_symbols = 2
    mu_h = DEFAULT_MU
    mu_v = DEFAULT_MU

    @abstractmethod
    def domain(self, n):
        """DomainBox D_n."""

    @abstractmethod
    def v_strip(self, n, i):
        """Vertical strip V_i^n."""

    @abstractmethod
    def h_strip_at(self, m, i):
        """Horizontal strip H_i^m."""

    @property
    def symbols(self):
        return tuple(range(1, self.n_symbols + 1))

    def v_strips(self, n):
        return [self.v_strip(n, i) for i in self.symbols]

    def h_strips(self, n):
        """[H_1^{n+1}, ..., H_N^{n+1}]: the strips f_n produces."""
        return [self.h_strip_at(n + 1, i) for i in self.symbols]


@dataclass(frozen=True)
class KeyPoints:
    """Corner and apex points of f_n(D) (p1..p6) and f_n^{-1}(D) (q1..q6)."""

    n: int
    p: tuple
    q: tuple


class HenonGeometry(StripGeometry):
    """Strips of the nonautonomous Henon map with B = -1.

    Parameters
    ----------
    params: HenonParams
        A(n) = a_star + epsilon cos(n).

    mu_h, mu_v: float
        Lipschitz bounds declared for horizontal and vertical boundaries.
    """

    def __init__(self, params, mu_h=DEFAULT_MU, mu_v=DEFAULT_MU):
        self.params = params
        self.seq = henon_sequence(params)
        self.mu_h = float(mu_h)
        self.mu_v = float(mu_v)
        self.r = self.seq.r
        self._box = self.seq.domain(0)

    def __repr__(self):
        return "HenonGeometry(%r, mu_h=%r, mu_v=%r)" % (
            self.params,
            self.mu_h,
            self.mu_v,
        )

    def a(self, n):
        return eval_a(self.params, n)

    def domain(self, n=0):
        return self._box

    def _check_nondegenerate(self, a):
        if not a - 2.0 * self.r > 0:
            raise GeometryError(
                "A(n) - 2R = %.6g <= 0: the strip parabolas degenerate"
                % (a - 2.0 * self.r)
            )

    def _parabola_strip(self, orientation, a, i, bound):
        self._check_nondegenerate(a)
        r = self.r
        interval = (-r, r)
        if i == 1:
            lower = ParabolaCurve(orientation, interval, bound, 1.0, a, -r)
            upper = ParabolaCurve(orientation, interval, bound, 1.0, a, r)
        elif i == 2:
            lower = ParabolaCurve(orientation, interval, bound, -1.0, a, r)
            upper = ParabolaCurve(orientation, interval, bound, -1.0, a, -r)
        else:
            raise GeometryError("Henon strips are indexed by 1 and 2")
        return Strip(orientation, lower, upper)

    def v_strip(self, n, i):
        """V_i^n, bounded by X = +-sqrt(A(n) -+ R - Y)."""
        return self._parabola_strip(Orientation.VERTICAL, self.a(n), i, self.mu_v)

    def h_strip_at(self, m, i):
        """H_i^m = f_{m-1}(V_i^{m-1}), bounded by Y = +-sqrt(A(m-1) -+ R - X)."""
        return self._parabola_strip(
            Orientation.HORIZONTAL, self.a(m - 1), i, self.mu_h
        )


def build_geometry(params, n_range=DEFAULT_N_RANGE, mu_h=DEFAULT_MU, mu_v=DEFAULT_MU):
    """Construct the Henon strip geometry, refusing degenerate windows.

    Raises GeometryError when A(n) - 2R <= 0 for some n in n_range.
    """

    geom = HenonGeometry(params, mu_h=mu_h, mu_v=mu_v)
    bad = [
        n
        for n in range(int(n_range[0]), int(n_range[1]) + 1)
        if not geom.a(n) - 2.0 * geom.r > 0
    ]
    if bad:
        raise GeometryError(
            "A(n) - 2R <= 0 for %d time(s), first n = %d (R = %.6g)"
            % (len(bad), bad[0], geom.r)
        )
    return geom


def key_points(geom, n):
    a = geom.a(n)
    r = geom.r
    p = (
        Point2(a + r, 0.0),
        Point2(a - r, 0.0),
        Point2(a + r - r * r, -r),
        Point2(a - r - r * r, -r),
        Point2(a - r - r * r, r),
        Point2(a + r - r * r, r),
    )
    q = (
        Point2(0.0, a + r),
        Point2(0.0, a - r),
        Point2(r, a + r - r * r),
        Point2(r, a - r - r * r),
        Point2(-r, a - r - r * r),
        Point2(-r, a + r - r * r),
    )
    return KeyPoints(n=int(n), p=p, q=q)


def boundary_images(geom, n, samples=128):
    """Images of the sides L1..L4 of D under f_n and f_n^{-1}.

    Returns
    -------
    images: dict
        {"forward": {"L1": [(x, y), ...], ...}, "inverse": {...}}
    """

    r = geom.r
    u = np.linspace(-r, r, samples)
    sides = {
        "L1": (u, np.full_like(u, r)),
        "L2": (u, np.full_like(u, -r)),
        "L3": (np.full_like(u, r), u),
        "L4": (np.full_like(u, -r), u),
    }
    images = {"forward": {}, "inverse": {}}
    for name, (x, y) in sides.items():
        X, Y = geom.seq.forward_xy(n, x, y)
        images["forward"][name] = list(zip(X.tolist(), Y.tolist()))
        X, Y = geom.seq.inverse_xy(n, x, y)
        images["inverse"][name] = list(zip(X.tolist(), Y.tolist()))
    return images


def geometry_record(geom, n, samples=256):
    """D, V_i^n and H_i^n at time n as plain data for the plotter.

    Missing strips are null. Henon geometries also carry their key points
    and the images of the sides of D.
    """

    lo, hi = geom.domain(n).x_interval
    record = {
        "n": int(n),
        "domain": [float(lo), float(hi)],
        "vertical": {},
        "horizontal": {},
    }
    for i in geom.symbols:
        v, h = geom.v_strip(n, i), geom.h_strip_at(n, i)
        record["vertical"][str(i)] = None if v is None else strip_to_dict(v, samples)
        record["horizontal"][str(i)] = None if h is None else strip_to_dict(h, samples)
    if isinstance(geom, HenonGeometry):
        kp = key_points(geom, n)
        record["a"] = geom.a(n)
        record["key_points"] = {
            "%s%d" % (name, k + 1): [point.x, point.y]
            for name, points in (("p", kp.p), ("q", kp.q))
            for k, point in enumerate(points)
        }
        record["boundary_images"] = boundary_images(geom, n, samples)
    return record


@dataclass
class InequalityRow:
    """One checked inequality: lhs compared against rhs."""

    n: object
    inequality: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def as_dict(self):
        return {
            "n": self.n,
            "inequality": self.inequality,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
        }


@dataclass
class InequalityReport:
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    @property
    def failures(self):
        return [row for row in self.rows if not row.passed]

    def add_less(self, n, name, lhs, rhs, tol=0.0):
        """Record lhs < rhs (or lhs <= rhs + tol when tol > 0)."""
        margin = rhs - lhs
        passed = margin >= -tol if tol > 0 else margin > 0
        self.rows.append(InequalityRow(n, name, lhs, rhs, margin, passed))

    def add_greater(self, n, name, lhs, rhs, tol=0.0):
        margin = lhs - rhs
        passed = margin >= -tol if tol > 0 else margin > 0
        self.rows.append(InequalityRow(n, name, lhs, rhs, margin, passed))

    def extend(self, other):
        self.rows.extend(other.rows)
        return self


def check_domain_inequalities(geom, n_range=DEFAULT_N_RANGE):
    """Check A(n) > 2R, A(n)+R-R^2 <= -R and the key points outside D.

    Failures are reported as rows, never raised. The rows tagged "all" use
    the bounds A* - eps <= A(n) <= A* + eps and so hold for every integer n.
    """

    report = InequalityReport()
    r = geom.r
    a_lo = geom.params.a_star - geom.params.epsilon

    report.add_greater("all", "A* - eps > 2R", a_lo, 2.0 * r)

    for n in range(int(n_range[0]), int(n_range[1]) + 1):
        a = geom.a(n)
        report.add_greater(n, "A(n) > 2R", a, 2.0 * r)
        # equality at n = 0, where p3, p6, q3, q6 are vertices of D
        report.add_less(n, "A(n) + R - R^2 <= -R", a + r - r * r, -r, tol=1e-9)

        kp = key_points(geom, n)
        for label, point in (
            ("p1", kp.p[0]),
            ("p2", kp.p[1]),
            ("p4", kp.p[3]),
            ("p5", kp.p[4]),
            ("q1", kp.q[0]),
            ("q2", kp.q[1]),
            ("q4", kp.q[3]),
            ("q5", kp.q[4]),
        ):
            report.add_greater(
                n,
                "%s outside D" % label,
                max(abs(point.x), abs(point.y)),
                r,
            )
    return report


def sector_threshold(mu):
    """The level 1/2 (mu + 1/mu) above which |y0| keeps the cone invariant."""
    return 0.5 * (mu + 1.0 / mu)


def _xbar2_of(a_star, eps, n, c):
    r = 1.0 + math.sqrt(1.0 + a_star + eps)
    return math.sqrt(a_star + eps * math.cos(n + 1) + r + c)


def _x2_of(a_star, eps, n, c):
    r = 1.0 + math.sqrt(1.0 + a_star + eps)
    return a_star + eps * math.cos(n) - r - c * c


@dataclass
class SeparationReport:
    n: int
    threshold: float
    xbar1: float
    xbar2: float
    x1: float
    x2: float
    dxbar2_da: float
    dx2_da: float
    dxbar2_bound: float
    dx2_bound: float
    inequalities: InequalityReport

    @property
    def passed(self):
        return self.inequalities.passed


def strip_separation_check(geom, n, fd_step=1e-6):
    """Check that the lines Y = +-c cut the parabolas in the right order.

    With c = 1/2 (mu_v + 1/mu_v), xbar_1, xbar_2 are where Y = +-c meets
    the outer vertical boundary X = sqrt(A(n+1) + R - Y) and x_1 = x_2 where
    it meets the inner horizontal boundary X = A(n) - R - Y^2. The chain
    xbar_1 < xbar_2 < x_2 = x_1 < R keeps every point of the cells at time
    n+1 above |y| = c. The derivative comparison carries the result to
    every A* >= the configured value.
    """

    params = geom.params
    eps = params.epsilon
    a_star = params.a_star
    r = geom.r
    c = sector_threshold(geom.mu_v)

    a_next = geom.a(n + 1)
    a_now = geom.a(n)
    xbar1 = math.sqrt(max(a_next + r - c, 0.0))
    xbar2 = math.sqrt(max(a_next + r + c, 0.0))
    x2 = a_now - r - c * c
    x1 = x2

    rows = InequalityReport()
    rows.add_less(n, "xbar1 < xbar2", xbar1, xbar2)
    rows.add_less(n, "xbar2 < x2", xbar2, x2)
    rows.add_less(n, "x2 < R", x2, r)

    ### Bounds valid for every n
    xbar2_sup = math.sqrt(a_star + eps + r + c)
    x2_inf = a_star - eps - r - c * c
    rows.add_less("all", "sup xbar2 < inf x2", xbar2_sup, x2_inf)

    ### Derivatives with respect to A*
    h = fd_step
    dxbar2 = (
        _xbar2_of(a_star + h, eps, n, c) - _xbar2_of(a_star - h, eps, n, c)
    ) / (2.0 * h)
    dx2 = (_x2_of(a_star + h, eps, n, c) - _x2_of(a_star - h, eps, n, c)) / (
        2.0 * h
    )
    base = 1.0 + a_star - eps
    xbar2_low = math.sqrt(base + math.sqrt(base) + c)
    dxbar2_bound = (1.0 + 1.0 / (2.0 * math.sqrt(base))) / (2.0 * xbar2_low)
    dx2_bound = 1.0 - 1.0 / (2.0 * math.sqrt(base))
    rows.add_less(n, "dxbar2/dA* <= bound", dxbar2, dxbar2_bound, tol=1e-12)
    rows.add_greater(n, "dx2/dA* >= bound", dx2, dx2_bound, tol=1e-12)
    rows.add_less("all", "dxbar2 bound < dx2 bound", dxbar2_bound, dx2_bound)

    return SeparationReport(
        n=int(n),
        threshold=c,
        xbar1=xbar1,
        xbar2=xbar2,
        x1=x1,
        x2=x2,
        dxbar2_da=dxbar2,
        dx2_da=dx2,
        dxbar2_bound=dxbar2_bound,
        dx2_bound=dx2_bound,
        inequalities=rows,
    )


def headline_constants(params, mu_h=DEFAULT_MU, mu_v=DEFAULT_MU):
    """The constants the Henon construction quotes, at full precision."""

    a_max = params.a_star + params.epsilon
    a_min = params.a_star - params.epsilon
    r = 1.0 + math.sqrt(1.0 + a_max)
    c = sector_threshold(mu_v)
    base = 1.0 + a_min
    xbar2_low = math.sqrt(base + math.sqrt(base) + c)
    return {
        "R": r,
        "slope_bound": 1.0 / (2.0 * math.sqrt(a_min - 2.0 * r))
        if a_min > 2.0 * r
        else math.inf,
        "mu_product": mu_h * mu_v,
        "one_minus_mu_product": 1.0 - mu_h * mu_v,
        "threshold": c,
        "xbar2_upper": math.sqrt(a_max + r + c),
        "x2_lower": a_min - r - c * c,
        "dxbar2_bound": (1.0 + 1.0 / (2.0 * math.sqrt(base))) / (2.0 * xbar2_low),
        "dx2_bound": 1.0 - 1.0 / (2.0 * math.sqrt(base)),
    }


def autonomous_remark(params, n_range=DEFAULT_N_RANGE):
    """Smallest A(n) over the window against the autonomous threshold A_2.

    Returns
    -------
    remark: dict
        min_a, argmin_n, threshold and below (min_a < threshold).
    """

    ns = range(int(n_range[0]), int(n_range[1]) + 1)
    argmin = min(ns, key=lambda n: eval_a(params, n))
    min_a = eval_a(params, argmin)
    threshold = autonomous_threshold(params.b)
    return {
        "min_a": min_a,
        "argmin_n": argmin,
        "threshold": threshold,
        "below": min_a < threshold,
    }
