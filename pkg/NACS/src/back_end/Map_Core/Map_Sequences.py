### Standard Libraries
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

### External Libraries
import numpy as np

### General Modules
from NACS.src.back_end.General_Utility.Errors import GeometryError

"""
This file holds the dynamics: a bi-infinite sequence of invertible planar
maps f_n, each with its inverse and Jacobians, indexed by the integer time n.
The nonautonomous Henon family is the built-in instance. Anything else that
implements MapSequence plugs into the verification code unchanged.
"""


@dataclass(frozen=True)
class Point2:
    """A point (x, y) of the plane. Both coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(
                "Point2 coordinates must be finite, got (%r, %r)"
                % (self.x, self.y)
            )

    def as_array(self):
        return np.array([self.x, self.y], dtype=float)

    def distance(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class TangentVector:
    """Components (xi, eta) of a tangent vector at some base point."""

    xi: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.eta)):
            raise GeometryError("TangentVector components must be finite")

    def is_zero(self):
        return self.xi == 0.0 and self.eta == 0.0


@dataclass(frozen=True)
class DomainBox:
    """The square [-r, r] x [-r, r] together with its projections."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise GeometryError("DomainBox half-width must be positive")

    @property
    def x_interval(self):
        return (-self.r, self.r)

    @property
    def y_interval(self):
        return (-self.r, self.r)

    def contains(self, x, y, tol=0.0):
        """Vectorised membership test, closed square widened by tol."""
        bound = self.r + tol
        return (np.abs(x) <= bound) & (np.abs(y) <= bound)


@dataclass(frozen=True)
class HenonParams:
    """Parameters of A(n) = a_star + epsilon * cos(n) with B fixed to -1.

    Parameters
    ----------
    a_star: float
        The offset A*. The verified regime is a_star >= 9.5, but other
        values are accepted so that failures can be reported.

    epsilon: float
        Modulation amplitude, non-negative.

    b: float
        Only -1 is supported; it keeps every f_n orientation and area
        preserving.
    """

    a_star: float = 9.5
    epsilon: float = 0.1
    b: float = -1.0

    def __post_init__(self):
        if not (math.isfinite(self.a_star) and math.isfinite(self.epsilon)):
            raise GeometryError("HenonParams values must be finite")
        if self.epsilon < 0:
            raise GeometryError("epsilon must be non-negative")
        if self.b != -1.0:
            raise GeometryError("only b = -1 is supported")

    @property
    def in_verified_regime(self):
        return self.a_star >= 9.5


def eval_a(params, n):
    """A(n) = a_star + epsilon * cos(n), radian cosine of the integer n."""
    return params.a_star + params.epsilon * math.cos(float(int(n)))


def autonomous_threshold(b=-1.0):
    """The autonomous sufficient condition A > A_2 = (5+2*sqrt5)(1+|b|)^2/4.

    For b = +-1 this is 5 + 2*sqrt(5), roughly 9.472.
    """
    return (5.0 + 2.0 * math.sqrt(5.0)) * (1.0 + abs(b)) ** 2 / 4.0


class MapSequence(ABC):
    """The dynamics {f_n, D_n}.

    Subclasses provide array versions of the maps and Jacobians; the scalar
    Point2 interface is derived from them. Instances are immutable and may be
    evaluated from several threads at once.
    """

    @abstractmethod
    def forward_xy(self, n, x, y):
        """Return (X, Y) = f_n(x, y) for arrays x, y."""

    @abstractmethod
    def inverse_xy(self, n, x, y):
        """Return (X, Y) = f_n^{-1}(x, y) for arrays x, y."""

    @abstractmethod
    def jacobian_fwd_xy(self, n, x, y):
        """Return Df_n at (x, y) as an array of shape (..., 2, 2)."""

    @abstractmethod
    def jacobian_inv_xy(self, n, x, y):
        """Return Df_n^{-1} at (x, y) as an array of shape (..., 2, 2)."""

    @abstractmethod
    def domain(self, n):
        """Return the DomainBox D_n."""

    ### Scalar conveniences
    def forward(self, n, p):
        X, Y = self.forward_xy(n, np.float64(p.x), np.float64(p.y))
        return Point2(float(X), float(Y))

    def inverse(self, n, p):
        X, Y = self.inverse_xy(n, np.float64(p.x), np.float64(p.y))
        return Point2(float(X), float(Y))

    def jacobian_fwd(self, n, p):
        return np.asarray(
            self.jacobian_fwd_xy(n, np.float64(p.x), np.float64(p.y)),
            dtype=float,
        )

    def jacobian_inv(self, n, p):
        return np.asarray(
            self.jacobian_inv_xy(n, np.float64(p.x), np.float64(p.y)),
            dtype=float,
        )


class HenonSequence(MapSequence):
    """f_n(x, y) = (A(n) - y - x^2, x), f_n^{-1}(x, y) = (y, A(n) - x - y^2)."""

    def __init__(self, params):
        self.params = params
        # R = 1 + sqrt(1 + sup_n A(n)); cos(0) = 1 attains the sup
        self._r = 1.0 + math.sqrt(1.0 + params.a_star + params.epsilon)

    def __repr__(self):
        return "HenonSequence(%r)" % (self.params,)

    def a(self, n):
        return eval_a(self.params, n)

    @property
    def r(self):
        return self._r

    def forward_xy(self, n, x, y):
        return self.a(n) - y - x * x, x

    def inverse_xy(self, n, x, y):
        return y, self.a(n) - x - y * y

    def jacobian_fwd_xy(self, n, x, y):
        x = np.asarray(x, dtype=float)
        jac = np.zeros(x.shape + (2, 2))
        jac[..., 0, 0] = -2.0 * x
        jac[..., 0, 1] = -1.0
        jac[..., 1, 0] = 1.0
        return jac

    def jacobian_inv_xy(self, n, x, y):
        y = np.asarray(y, dtype=float)
        jac = np.zeros(y.shape + (2, 2))
        jac[..., 0, 1] = 1.0
        jac[..., 1, 0] = -1.0
        jac[..., 1, 1] = -2.0 * y
        return jac

    def domain(self, n):
        return DomainBox(self._r)


def henon_sequence(params):
    """Build the nonautonomous Henon MapSequence for params."""
    return HenonSequence(params)


def jacobian_fd(seq, n, p, h=1e-5):
    """Central finite-difference Jacobian of f_n at p.

    Parameters
    ----------
    seq: MapSequence
        The dynamics to differentiate.

    n: integer
        Time index.

    p: Point2
        Base point.

    h: float
        Step, strictly positive. The error is O(h^2).


    Returns
    -------
    jac: np.ndarray
        2x2 array, rows are the components of f_n, columns d/dx and d/dy.
    """

    if not h > 0:
        raise GeometryError("finite difference step must be positive")

    x = np.array([p.x + h, p.x - h, p.x, p.x])
    y = np.array([p.y, p.y, p.y + h, p.y - h])
    X, Y = seq.forward_xy(n, x, y)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)

    jac = np.empty((2, 2))
    jac[0, 0] = (X[0] - X[1]) / (2.0 * h)
    jac[1, 0] = (Y[0] - Y[1]) / (2.0 * h)
    jac[0, 1] = (X[2] - X[3]) / (2.0 * h)
    jac[1, 1] = (Y[2] - Y[3]) / (2.0 * h)
    return jac


def orbit(seq, n, p, steps):
    """Orbit of p starting at time n.

    Positive steps iterate f_n, f_{n+1}, ...; negative steps iterate
    f_{n-1}^{-1}, f_{n-2}^{-1}, ... The returned list starts with p.
    """

    points = [p]
    if steps >= 0:
        for m in range(n, n + steps):
            points.append(seq.forward(m, points[-1]))
    else:
        for m in range(n - 1, n + steps - 1, -1):
            points.append(seq.inverse(m, points[-1]))
    return points
