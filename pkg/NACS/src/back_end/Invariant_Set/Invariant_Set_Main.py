### Standard Libraries
import math
from dataclasses import dataclass, field

### External Libraries
import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

### General Modules
from NACS.src.back_end.General_Utility.Errors import (
    EmptyInputError,
    GeometryError,
)
from NACS.src.back_end.General_Utility.General_Utilities import (
    chunks,
    parallel_map,
)
from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    strip_excess,
)
from NACS.src.back_end.Symbolic_Dynamics.Itinerary_Functions import (
    TransitionMatrixSeq,
    format_word,
    iter_itineraries,
)
from NACS.src.back_end.Symbolic_Dynamics.Strip_Refinement import StripRefiner

"""
The invariant set Λ_n, two ways.

approximate_lambda walks every admissible word of length 2*depth + 1 centred
at n and places one point per word at the crossing of its refined strips.
brute_force_survivors knows nothing about words: it seeds a lattice on D and
keeps the points whose lattice cell reaches, to first order along the orbit,
a point that stays in the strips for a window of steps. The two clouds should
agree up to lattice spacing plus the refinement error.
"""

LAMBDA_COLUMNS = ["word", "n", "x", "y", "err_bound"]
SURVIVOR_CHUNK = 1 << 18
MIN_ORACLE_GRID = 32
# cell radii a lattice point reaches along its orbit
SURVIVOR_REACH = 2.0


@dataclass
class LambdaApproximation:
    n: int
    depth: int
    words: list = field(default_factory=list)
    points: np.ndarray = None
    err_bounds: np.ndarray = None

    def __len__(self):
        return len(self.words)

    @property
    def max_err_bound(self):
        return float(np.max(self.err_bounds)) if len(self) else 0.0

    def records(self):
        for word, (x, y), err in zip(self.words, self.points, self.err_bounds):
            yield {
                "word": word,
                "n": self.n,
                "x": float(x),
                "y": float(y),
                "err_bound": float(err),
            }

    def to_frame(self):
        return pd.DataFrame(list(self.records()), columns=LAMBDA_COLUMNS)


@dataclass
class SurvivorCloud:
    """Lattice cells that meet the survival set of [n-k, n+k].

    spacing is the final lattice step; a survivor stands for the square
    cell of that side centred on it.
    """

    n: int
    window: int
    points: np.ndarray
    spacing: float
    grid: int
    refine: int = 1

    def __len__(self):
        return int(self.points.shape[0])

    @property
    def cell_radius(self):
        return self.spacing * math.sqrt(2.0) / 2.0

    def to_frame(self):
        return pd.DataFrame(
            {
                "n": np.full(len(self), self.n, dtype=int),
                "x": self.points[:, 0],
                "y": self.points[:, 1],
            }
        )


### Symbolic approximation
def _lambda_point(refiner, it):
    p, err = refiner.point(it)
    return format_word(it), p.x, p.y, err


def iter_lambda_points(
    geom, seq, n, depth, refiner=None, transitions=None, threads=None,
    batch=4096,
):
    """Stream (word, x, y, err_bound) for every admissible word.

    Words are produced in lexicographic order and evaluated batch by batch,
    so memory stays bounded however long the enumeration runs.
    """

    depth = int(depth)
    if depth < 1:
        raise GeometryError("lambda depth must be at least 1")
    refiner = refiner or StripRefiner(geom, seq)
    transitions = transitions or TransitionMatrixSeq(geom)
    words = iter_itineraries(transitions, n, depth, depth + 1)
    box = geom.domain(n)

    pending = []
    for it in words:
        pending.append(it)
        if len(pending) == batch:
            yield from _evaluate_batch(refiner, pending, box, threads)
            pending = []
    if pending:
        yield from _evaluate_batch(refiner, pending, box, threads)


def _evaluate_batch(refiner, batch, box, threads):
    rows = parallel_map(lambda it: _lambda_point(refiner, it), batch, threads)
    for word, x, y, err in rows:
        if not bool(box.contains(x, y, err)):
            raise GeometryError(
                "point of word %s at (%.6g, %.6g) lies outside D" % (word, x, y)
            )
        yield word, x, y, err


def approximate_lambda(
    geom, seq, n, depth, refiner=None, transitions=None, threads=None
):
    """Λ_n approximated at one point per admissible word of length 2*depth+1.

    Parameters
    ----------
    geom: StripGeometry

    seq: MapSequence

    n: integer
        Time slice.

    depth: integer
        depth past symbols and depth + 1 future symbols per word.


    Returns
    -------
    approx: LambdaApproximation
    """

    rows = list(
        iter_lambda_points(geom, seq, n, depth, refiner, transitions, threads)
    )
    return LambdaApproximation(
        n=int(n),
        depth=int(depth),
        words=[r[0] for r in rows],
        points=np.array([[r[1], r[2]] for r in rows], dtype=float).reshape(-1, 2),
        err_bounds=np.array([r[3] for r in rows], dtype=float),
    )


def lambda_separation(approx):
    """Smallest distance between two points against their summed errors.

    Returns
    -------
    min_gap: float

    separated: bool
        Every pair of points is further apart than err_a + err_b.
    """

    if len(approx) < 2:
        return math.inf, True
    dist, idx = cKDTree(approx.points).query(approx.points, k=2)
    gaps = dist[:, 1]
    allowed = approx.err_bounds + approx.err_bounds[idx[:, 1]]
    return float(np.min(gaps)), bool(np.all(gaps > allowed))


### Oracle
def _union_excess(strips, x, y):
    excess = np.full(np.shape(x), np.inf)
    for strip in strips:
        if strip is not None:
            excess = np.minimum(excess, strip_excess(strip, x, y))
    return excess


def _stretch(jac, tangent):
    tangent = np.matmul(jac, tangent)
    return tangent, np.linalg.norm(tangent, ord=2, axis=(-2, -1))


def _miss_distance(geom, seq, n, window, x, y, cutoff):
    """First order distance from each point to the window's survival set.

    At every step the amount by which the orbit leaves the strips is divided
    by the stretch of Df along the orbit so far; the largest such quotient
    estimates how far the starting point is from one whose orbit stays in
    V over [n, n+window] and in H over [n-window, n]. Points past cutoff are
    frozen and reported as inf.
    """

    miss = np.maximum(
        _union_excess(geom.v_strips(n), x, y),
        _union_excess([geom.h_strip_at(n, i) for i in geom.symbols], x, y),
    )
    eye = np.broadcast_to(np.eye(2), np.shape(x) + (2, 2))
    fx, fy, f_tan = x, y, eye
    bx, by, b_tan = x, y, eye
    for m in range(1, window + 1):
        f_tan, f_norm = _stretch(seq.jacobian_fwd_xy(n + m - 1, fx, fy), f_tan)
        fx, fy = seq.forward_xy(n + m - 1, fx, fy)
        b_tan, b_norm = _stretch(seq.jacobian_inv_xy(n - m, bx, by), b_tan)
        bx, by = seq.inverse_xy(n - m, bx, by)
        with np.errstate(divide="ignore", invalid="ignore"):
            ahead = _union_excess(geom.v_strips(n + m), fx, fy) / f_norm
            behind = (
                _union_excess(
                    [geom.h_strip_at(n - m, i) for i in geom.symbols], bx, by
                )
                / b_norm
            )
        miss = np.maximum(miss, np.maximum(ahead, behind))
        miss = np.where(np.isnan(miss), np.inf, miss)
        # Orbits well outside blow up quickly; freeze them at the origin
        gone = miss > cutoff
        miss = np.where(gone, np.inf, miss)
        fx, fy = np.where(gone, 0.0, fx), np.where(gone, 0.0, fy)
        bx, by = np.where(gone, 0.0, bx), np.where(gone, 0.0, by)
        f_tan = np.where(gone[..., None, None], eye, f_tan)
        b_tan = np.where(gone[..., None, None], eye, b_tan)
    return miss


def _filter(geom, seq, n, window, points, reach):
    """Keep the points whose cell of radius reach meets the survival set."""
    keep = []
    for start, stop in chunks(points.shape[0], SURVIVOR_CHUNK):
        block = points[start:stop]
        miss = _miss_distance(
            geom, seq, n, window, block[:, 0], block[:, 1], reach
        )
        keep.append(block[miss <= reach])
    if not keep:
        return np.empty((0, 2))
    return np.concatenate(keep)


def _reach(spacing, tol):
    return SURVIVOR_REACH * spacing * math.sqrt(2.0) / 2.0 + tol


def brute_force_survivors(geom, seq, n, k, grid, refine=1, tol=0.0):
    """Lattice points of D whose cell meets the survival set of [n-k, n+k].

    A point is kept when its orbit leaves the strips by no more than
    SURVIVOR_REACH cell radii times the stretch of Df along the orbit.
    Cells holding a true survivor are kept even where the survival set is
    much thinner than the lattice.

    Parameters
    ----------
    geom: StripGeometry

    seq: MapSequence

    n: integer
        Time slice.

    k: integer
        Window; k = 0 keeps the lattice points of D_V^n ∩ D_H^n.

    grid: integer
        Lattice points per side, at least 32.

    refine: integer
        1 keeps the uniform lattice. Larger values re-seed each survivor's
        cell with a refine x refine sub-lattice after every window step, so
        the lattice follows the shrinking set.

    tol: float
        Extra reach added on top of the cell radii.


    Returns
    -------
    cloud: SurvivorCloud
    """

    grid, k, refine = int(grid), int(k), int(refine)
    if grid < MIN_ORACLE_GRID:
        raise GeometryError("oracle grid must be at least %d" % MIN_ORACLE_GRID)
    if k < 0:
        raise GeometryError("oracle window must be non-negative")
    if refine < 1:
        raise GeometryError("oracle refinement factor must be at least 1")

    box = geom.domain(n)
    lo, hi = box.x_interval
    axis = np.linspace(lo, hi, grid)
    spacing = (hi - lo) / (grid - 1)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([xx.ravel(), yy.ravel()])

    if refine == 1:
        points = _filter(geom, seq, n, k, points, _reach(spacing, tol))
        return SurvivorCloud(n=int(n), window=k, points=points,
                             spacing=spacing, grid=grid, refine=1)

    points = _filter(geom, seq, n, 0, points, _reach(spacing, tol))
    offsets = (np.arange(refine) + 0.5) / refine - 0.5
    ox, oy = np.meshgrid(offsets, offsets, indexing="ij")
    pattern = np.column_stack([ox.ravel(), oy.ravel()])
    for window in range(1, k + 1):
        points = (points[:, None, :] + spacing * pattern[None, :, :]).reshape(-1, 2)
        spacing /= refine
        points = _filter(geom, seq, n, window, points, _reach(spacing, tol))
    return SurvivorCloud(n=int(n), window=k, points=points,
                         spacing=spacing, grid=grid, refine=refine)


### Distances
def _as_points(cloud):
    if hasattr(cloud, "points") and not isinstance(cloud, np.ndarray):
        cloud = cloud.points
    if len(cloud) and hasattr(cloud[0], "x"):
        cloud = [(p.x, p.y) for p in cloud]
    return np.asarray(cloud, dtype=float).reshape(-1, 2)


def directed_hausdorff(a, b):
    """max over a of the distance to the nearest point of b."""
    a = _as_points(a)
    b = _as_points(b)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptyInputError("directed_hausdorff needs two non-empty clouds")
    dist, _ = cKDTree(b).query(a, k=1)
    return float(np.max(dist))


def lambda_equivariance(seq, approx_n, approx_next):
    """Distance from f_n(Λ_n) to Λ_{n+1} against the error it may carry.

    Each image point sits within |Df_n| err_n of the image of the exact
    point, which in turn lies within err_{n+1} of the approximation of the
    shifted word.

    Returns
    -------
    result: dict
        distance, bound and passed.
    """

    if approx_next.n != approx_n.n + 1:
        raise GeometryError("equivariance compares time n with time n+1")
    x, y = approx_n.points[:, 0], approx_n.points[:, 1]
    X, Y = seq.forward_xy(approx_n.n, x, y)
    images = np.column_stack([np.asarray(X, float), np.asarray(Y, float)])
    distance = directed_hausdorff(images, approx_next.points)
    stretch = float(
        np.max(np.linalg.norm(seq.jacobian_fwd_xy(approx_n.n, x, y), ord=2, axis=(-2, -1)))
    )
    bound = stretch * approx_n.max_err_bound + approx_next.max_err_bound
    return {"distance": distance, "bound": bound, "passed": distance <= bound}
