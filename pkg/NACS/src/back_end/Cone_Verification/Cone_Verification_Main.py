### Standard Libraries
import enum
import math
from dataclasses import dataclass, field

### External Libraries
import numpy as np
from scipy.spatial import cKDTree

### General Modules
from NACS.src.back_end.General_Utility.Errors import (
    EmptyInputError,
    GeometryError,
    HypothesisError,
)
from NACS.src.back_end.Map_Core.Map_Sequences import (
    HenonSequence,
    TangentVector,
)
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    cell_points,
    curve_in_domain,
    lipschitz_audit,
    strip_cell_grid,
    strip_contains,
)
from NACS.src.back_end.Symbolic_Dynamics.Strip_Refinement import StripRefiner

"""
Cone field hypotheses of the nonautonomous Conley-Moser conditions.

The unstable sector S^u = {|eta| <= mu_h |xi|} lives over the cells 𝒱^n,
the stable sector S^s = {|xi| <= mu_v |eta|} over the cells ℋ^{n+1}. The
grid check samples both cell families, maps the two extremal rays of each
sector through Df_n (resp. Df_n^{-1}) and records how far the image is inside
the target sector and how much it stretches. Sectors are convex and the maps
linear, so the extremal rays decide every vector in between.
"""

DEFAULT_MU_EXPANSION = 0.618
MAX_FAILURES_KEPT = 100
INJECTIVITY_TOL = 1e-9


class ConeDirection(enum.Enum):
    UNSTABLE = "unstable"
    STABLE = "stable"


@dataclass(frozen=True)
class ConeParams:
    """Sector slopes mu_h, mu_v and the expansion constant mu."""

    mu_h: float
    mu_v: float
    mu: float = DEFAULT_MU_EXPANSION

    def __post_init__(self):
        for name in ("mu_h", "mu_v", "mu"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise GeometryError("%s must be a positive number" % name)
        if not self.mu_h * self.mu_v < 1.0:
            raise GeometryError(
                "cone slopes need mu_h * mu_v < 1, got %.6g"
                % (self.mu_h * self.mu_v)
            )


@dataclass(frozen=True)
class SectorRecord:
    """Outcome of mapping one vector.

    sector_margin > 0 means the image is strictly inside the target sector,
    expansion_ratio > 1 means the defining component grew by more than 1/mu.
    """

    image: TangentVector
    sector_margin: float
    expansion_ratio: float

    @property
    def passed(self):
        return self.sector_margin > 0 and self.expansion_ratio > 1


@dataclass
class ConeReport:
    n: int
    grid: int
    params: ConeParams
    worst_sector_margin: float
    worst_expansion_ratio: float
    analytic_min_abs_y: float
    analytic_min_abs_x: float
    point_count: int
    failures: list = field(default_factory=list)

    @property
    def worst_expansion_margin(self):
        return self.worst_expansion_ratio - 1.0

    @property
    def analytic_threshold(self):
        return 0.5 * (self.params.mu_v + 1.0 / self.params.mu_v)

    @property
    def passed(self):
        return self.worst_sector_margin > 0 and self.worst_expansion_ratio > 1

    def to_dict(self):
        return {
            "n": self.n,
            "grid": self.grid,
            "worst_sector_margin": self.worst_sector_margin,
            "worst_expansion_ratio": self.worst_expansion_ratio,
            "analytic_min_abs_y": self.analytic_min_abs_y,
            "analytic_min_abs_x": self.analytic_min_abs_x,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class ContractionBounds:
    """nu_v = nu_h = mu / (1 - mu_h mu_v)."""

    mu: float
    nu_v: float
    nu_h: float


### Vectorised sector arithmetic
def _apply(jac, xi, eta):
    img_xi = jac[..., 0, 0] * xi + jac[..., 0, 1] * eta
    img_eta = jac[..., 1, 0] * xi + jac[..., 1, 1] * eta
    return img_xi, img_eta


def _sector_scores(jac, xi, eta, params, direction):
    img_xi, img_eta = _apply(jac, xi, eta)
    if direction is ConeDirection.UNSTABLE:
        margin = params.mu_h * np.abs(img_xi) - np.abs(img_eta)
        ratio = params.mu * np.abs(img_xi) / np.abs(xi)
    else:
        margin = params.mu_v * np.abs(img_eta) - np.abs(img_xi)
        ratio = params.mu * np.abs(img_eta) / np.abs(eta)
    return img_xi, img_eta, margin, ratio


def _extremal_rays(params, direction):
    if direction is ConeDirection.UNSTABLE:
        return [(1.0, params.mu_h), (1.0, -params.mu_h)]
    return [(params.mu_v, 1.0), (-params.mu_v, 1.0)]


def check_sector_point(
    seq, n, z0, v, params, direction, geometry=None, tol=1e-12
):
    """Map one vector of a sector and score the image.

    Parameters
    ----------
    seq: MapSequence
        Dynamics; Df_n is used for the unstable sector, Df_n^{-1} for the
        stable one.

    n: integer
        Time index.

    z0: Point2
        Base point. For the stable sector it lives at time n+1.

    v: TangentVector
        Must lie in the source sector.

    params: ConeParams

    direction: ConeDirection or str

    geometry: StripGeometry or None
        When given, z0 has to lie in some V_i^n (unstable) or some
        H_i^{n+1} (stable).


    Returns
    -------
    record: SectorRecord
    """

    direction = ConeDirection(direction)
    if v.is_zero():
        raise GeometryError("the zero vector has no cone")

    if direction is ConeDirection.UNSTABLE:
        in_sector = abs(v.eta) <= params.mu_h * abs(v.xi) + tol
        strip_kind = "vertical"
        strips = geometry.v_strips(n) if geometry is not None else None
        jac = seq.jacobian_fwd(n, z0)
    else:
        in_sector = abs(v.xi) <= params.mu_v * abs(v.eta) + tol
        strip_kind = "horizontal"
        strips = geometry.h_strips(n) if geometry is not None else None
        jac = seq.jacobian_inv(n, z0)
    if not in_sector:
        raise GeometryError(
            "vector (%g, %g) is outside the %s sector"
            % (v.xi, v.eta, direction.value)
        )
    if strips is not None and not any(
        s is not None and bool(strip_contains(s, z0.x, z0.y, 1e-12))
        for s in strips
    ):
        raise GeometryError(
            "base point (%g, %g) is not in any %s strip"
            % (z0.x, z0.y, strip_kind)
        )

    img_xi, img_eta, margin, ratio = _sector_scores(
        jac, np.float64(v.xi), np.float64(v.eta), params, direction
    )
    return SectorRecord(
        image=TangentVector(float(img_xi), float(img_eta)),
        sector_margin=float(margin),
        expansion_ratio=float(ratio),
    )


def cell_samples(geom, n, grid):
    """Sample points of the cells ℋ^{n+1} = ∪ H_i^{n+1} ∩ V_j^{n+1}.

    Raises GeometryError when a cell turns out empty.
    """

    xs, ys = [], []
    for i in geom.symbols:
        h_strip = geom.h_strip_at(n + 1, i)
        for j in geom.symbols:
            v_strip = geom.v_strip(n + 1, j)
            if h_strip is None or v_strip is None:
                continue
            x, y, valid = strip_cell_grid(v_strip, h_strip, grid)
            if not np.any(valid):
                raise GeometryError(
                    "empty strip intersection H_%d ∩ V_%d at time %d"
                    % (i, j, n + 1)
                )
            xs.append(x[valid])
            ys.append(y[valid])
    if not xs:
        raise EmptyInputError("no cells to sample at time %d" % (n + 1))
    return np.concatenate(xs), np.concatenate(ys)


def check_A3_grid(seq, geom, n, grid, params):
    """Grid check of both cone conditions at time n.

    The stable sector is tested at the ℋ^{n+1} sample points, the unstable
    sector at their preimages, which sample 𝒱^n.
    """

    grid = int(grid)
    if grid < 2:
        raise GeometryError("cone grid must be at least 2")

    X, Y = cell_samples(geom, n, grid)
    x, y = seq.inverse_xy(n, X, Y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    worst_margin = math.inf
    worst_ratio = math.inf
    failures = []
    batches = [
        (ConeDirection.STABLE, seq.jacobian_inv_xy(n, X, Y), X, Y),
        (ConeDirection.UNSTABLE, seq.jacobian_fwd_xy(n, x, y), x, y),
    ]
    for direction, jac, bx, by in batches:
        for xi, eta in _extremal_rays(params, direction):
            _, _, margin, ratio = _sector_scores(jac, xi, eta, params, direction)
            worst_margin = min(worst_margin, float(np.min(margin)))
            worst_ratio = min(worst_ratio, float(np.min(ratio)))
            bad = np.flatnonzero((margin <= 0) | (ratio <= 1))
            for k in bad[: max(0, MAX_FAILURES_KEPT - len(failures))]:
                failures.append(
                    {
                        "direction": direction.value,
                        "x": float(bx[k]),
                        "y": float(by[k]),
                        "xi": xi,
                        "eta": eta,
                        "sector_margin": float(margin[k]),
                        "expansion_ratio": float(ratio[k]),
                    }
                )

    return ConeReport(
        n=int(n),
        grid=grid,
        params=params,
        worst_sector_margin=worst_margin,
        worst_expansion_ratio=worst_ratio,
        analytic_min_abs_y=float(np.min(np.abs(Y))),
        analytic_min_abs_x=float(np.min(np.abs(x))),
        point_count=int(X.size),
        failures=failures,
    )


### Hypothesis A1
@dataclass
class A1CellRow:
    i: int
    j: int
    crossings: int
    crossings_in_domain: bool
    h_lipschitz: float
    h_lipschitz_ok: bool
    injective: bool
    orientation_ok: bool
    boundary_distance: float
    boundary_ok: bool
    samples_used: int

    @property
    def passed(self):
        return (
            self.crossings == 4
            and self.crossings_in_domain
            and self.h_lipschitz_ok
            and self.injective
            and self.orientation_ok
            and self.boundary_ok
        )

    def as_dict(self):
        out = dict(vars(self))
        out["pass"] = self.passed
        return out


@dataclass
class A1Report:
    """Sampled check that f_n maps each V_ji^n onto H_ij^{n+1}.

    guarantee is "closed-form" when the map has a proven closed form for
    its strips, "sampled" otherwise.
    """

    n: int
    rows: list
    guarantee: str

    @property
    def passed(self):
        return all(row.passed for row in self.rows)


def _injective_on(seq, n, x, y, tol, same=1e-6):
    """No two sources further apart than same share an image within tol."""
    X, Y = seq.forward_xy(n, x, y)
    images = np.column_stack([np.asarray(X, float), np.asarray(Y, float)])
    sources = np.column_stack([x, y])
    pairs = cKDTree(images).query_pairs(tol, output_type="ndarray")
    if pairs.size == 0:
        return True
    gaps = np.linalg.norm(sources[pairs[:, 0]] - sources[pairs[:, 1]], axis=1)
    return bool(np.all(gaps <= same))


def _cell_lattice(seq, n, v_now, v_next, h_next, side, tol):
    """Sample points of V_ji^n from both ends.

    The pullback of the H_ij^{n+1} cell lattice reaches thin cells at any
    side; the uniform lattice of V_i^n kept where it lands in V_j^{n+1}
    sees every preimage branch, which the inverse alone cannot.
    """

    cx, cy, cvalid = strip_cell_grid(v_next, h_next, side)
    bx, by = seq.inverse_xy(n, cx[cvalid], cy[cvalid])
    bx = np.asarray(bx, dtype=float).ravel()
    by = np.asarray(by, dtype=float).ravel()
    back = strip_contains(v_now, bx, by, tol)

    u = np.linspace(0.0, 1.0, side)
    t = np.linspace(*v_now.param_interval, side)
    s_grid, t_grid = np.meshgrid(u, t, indexing="ij")
    lo = v_now.lower(t_grid)
    fx = (lo + s_grid * (v_now.upper(t_grid) - lo)).ravel()
    fy = t_grid.ravel()
    X, Y = seq.forward_xy(n, fx, fy)
    ahead = strip_contains(v_next, X, Y, tol)

    return (
        np.concatenate([bx[back], fx[ahead]]),
        np.concatenate([by[back], fy[ahead]]),
    )


def check_A1(seq, geom, n, samples=1024, tol=1e-8):
    """Sampled version of hypothesis A1 for every cell at time n.

    For each pair (i, j):
      the boundaries of V_j^{n+1} and H_i^{n+1} cross in four points of D,
      the boundaries of H_i^{n+1} respect mu_h,
      f_n is injective and orientation-consistent on a lattice of V_ji^n,
      the horizontal boundary of H_ij^{n+1} pulls back onto the horizontal
      boundary of V_i^n.
    """

    side = max(int(math.ceil(math.sqrt(samples))), 2)
    box = geom.domain(n + 1)
    rows = []
    for i in geom.symbols:
        v_now = geom.v_strip(n, i)
        h_next = geom.h_strip_at(n + 1, i)
        if v_now is None or h_next is None:
            continue
        h_slope, h_ok = 0.0, True
        for curve in (h_next.lower, h_next.upper):
            slope, ok = lipschitz_audit(curve, n_points=min(side * 4, 400))
            h_slope, h_ok = max(h_slope, slope), h_ok and ok

        for j in geom.symbols:
            v_next = geom.v_strip(n + 1, j)
            if v_next is None:
                continue

            ### Four crossings
            cx, cy, cvalid = strip_cell_grid(v_next, h_next, 2)
            distinct = len({(round(a, 12), round(b, 12)) for a, b in zip(cx, cy)})
            crossings = int(np.sum(cvalid)) if distinct == 4 else distinct
            in_domain = bool(np.all(box.contains(cx, cy, tol))) and all(
                curve_in_domain(c, box, side, tol)
                for c in (h_next.lower, h_next.upper)
            )

            ### Lattice of V_ji^n = V_i^n ∩ f_n^{-1}(V_j^{n+1})
            px, py = _cell_lattice(seq, n, v_now, v_next, h_next, side, tol)
            if not px.size:
                raise GeometryError(
                    "V_%d%d at n = %d holds none of the %d lattice points"
                    % (j, i, n, 2 * side * side)
                )
            injective = _injective_on(seq, n, px, py, INJECTIVITY_TOL)
            det = np.linalg.det(seq.jacobian_fwd_xy(n, px, py))
            orientation_ok = bool(np.all(det > 0) or np.all(det < 0))

            ### Horizontal boundary of H_ij^{n+1} against that of V_i^n
            edge = np.linspace(0.0, 1.0, side)
            bx, by, bvalid = cell_points(
                v_next,
                h_next,
                np.concatenate([edge, edge]),
                np.concatenate([np.zeros(side), np.ones(side)]),
            )
            qx, qy = seq.inverse_xy(n, bx[bvalid], by[bvalid])
            qx = np.asarray(qx, dtype=float)
            qy = np.asarray(qy, dtype=float)
            y_lo, y_hi = v_now.param_interval
            if qx.size:
                dist = np.minimum(np.abs(qy - y_lo), np.abs(qy - y_hi))
                on_strip = strip_contains(v_now, qx, qy, tol)
                boundary = float(np.max(dist))
                boundary_ok = boundary <= tol and bool(np.all(on_strip))
            else:
                boundary, boundary_ok = math.inf, False

            rows.append(
                A1CellRow(
                    i=i,
                    j=j,
                    crossings=crossings,
                    crossings_in_domain=in_domain,
                    h_lipschitz=h_slope,
                    h_lipschitz_ok=h_ok,
                    injective=injective,
                    orientation_ok=orientation_ok,
                    boundary_distance=boundary,
                    boundary_ok=boundary_ok,
                    samples_used=int(px.size),
                )
            )

    guarantee = "closed-form" if isinstance(seq, HenonSequence) else "sampled"
    return A1Report(n=int(n), rows=rows, guarantee=guarantee)


### Contraction
def derive_contraction(params):
    """nu = mu / (1 - mu_h mu_v), defined for mu_v < mu < 1 - mu_h mu_v."""
    upper = 1.0 - params.mu_h * params.mu_v
    if not params.mu_v < params.mu < upper:
        raise HypothesisError(
            "mu = %.6g must lie strictly between mu_v = %.6g and "
            "1 - mu_h mu_v = %.6g" % (params.mu, params.mu_v, upper)
        )
    nu = params.mu / upper
    return ContractionBounds(mu=params.mu, nu_v=nu, nu_h=nu)


@dataclass
class ContractionMeasurement:
    n: int
    depth: int
    ratios: dict

    @property
    def max_ratio(self):
        return max(max(r) for r in self.ratios.values())


def _reference_words(symbols, length):
    words = {
        "constant_%d" % s: tuple([s] * length) for s in symbols
    }
    if len(symbols) > 1:
        words["alternating"] = tuple(
            symbols[k % 2] for k in range(length)
        )
    return words


def measure_contraction(seq, geom, n, depth, refiner=None):
    """Observed width ratios |V(s_n..s_{n+k})| / |V(s_{n+1}..s_{n+k})|.

    Constant and alternating words are refined for k = 1 .. depth; the
    measured ratios should stay below the derived nu_v.
    """

    depth = int(depth)
    if depth < 1:
        raise GeometryError("contraction depth must be at least 1")
    refiner = refiner or StripRefiner(geom, seq)
    ratios = {}
    for name, word in _reference_words(geom.symbols, depth + 1).items():
        series = []
        for k in range(1, depth + 1):
            fine = refiner.width(refiner.vertical(n, word[: k + 1]))
            coarse = refiner.width(refiner.vertical(n + 1, word[1 : k + 1]))
            series.append(fine / coarse)
        ratios[name] = series
    return ContractionMeasurement(n=int(n), depth=depth, ratios=ratios)
