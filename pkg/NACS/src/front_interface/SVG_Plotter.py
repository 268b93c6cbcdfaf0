from xml.sax.saxutils import escape

import numpy as np

from NACS.src.back_end.Strip_Geometry.Strip_Geometry_Functions import (
    strip_outline,
)

"""
Static SVG scenes of the square D, the strips at one time slice and an
optional point cloud. The square is mapped onto a fixed 1000 x 1000 viewBox
with y pointing up.
"""

VIEWBOX = 1000.0
MARGIN = 40.0
STYLE = """
rect.domain { fill: none; stroke: #222; stroke-width: 2; }
path.strip { fill-opacity: 0.25; stroke-width: 1; }
path.strip.vertical { fill: #2b6cb0; stroke: #2b6cb0; }
path.strip.horizontal { fill: #c05621; stroke: #c05621; }
circle.lambda-point { fill: #111; }
"""


class SceneMapper:
    """Affine map from the box [-r, r]^2 onto the drawing area."""

    def __init__(self, r):
        self.r = float(r)
        self.scale = (VIEWBOX - 2.0 * MARGIN) / (2.0 * self.r)

    def __call__(self, x, y):
        px = MARGIN + (np.asarray(x, dtype=float) + self.r) * self.scale
        py = MARGIN + (self.r - np.asarray(y, dtype=float)) * self.scale
        return px, py


def _path_data(mapper, outline):
    xs, ys = zip(*outline)
    px, py = mapper(xs, ys)
    moves = ["M %.3f %.3f" % (px[0], py[0])]
    moves += ["L %.3f %.3f" % (a, b) for a, b in zip(px[1:], py[1:])]
    return " ".join(moves) + " Z"


def render_svg(geom, n, points=None, title=None, samples=256, radius=2.0):
    """SVG text of D, V_1^n, V_2^n, H_1^n, H_2^n and optional points.

    Parameters
    ----------
    geom: StripGeometry

    n: integer
        Time slice drawn.

    points: array of shape (m, 2) or None
        Drawn as circles of class lambda-point.


    Returns
    -------
    svg: str
    """

    box = geom.domain(n)
    mapper = SceneMapper(box.r)
    x0, y0 = mapper(-box.r, box.r)
    side = 2.0 * box.r * mapper.scale

    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 %d %d">'
        % (VIEWBOX, VIEWBOX),
        "<style>%s</style>" % STYLE,
        "<title>%s</title>" % escape(title or "time slice n = %d" % n),
        '<rect class="domain" x="%.3f" y="%.3f" width="%.3f" height="%.3f"/>'
        % (x0, y0, side, side),
    ]

    strips = [("vertical", i, geom.v_strip(n, i)) for i in geom.symbols]
    strips += [("horizontal", i, geom.h_strip_at(n, i)) for i in geom.symbols]
    for kind, i, strip in strips:
        if strip is None:
            continue
        lines.append(
            '<path class="strip %s" data-symbol="%d" d="%s"/>'
            % (kind, i, _path_data(mapper, strip_outline(strip, samples)))
        )

    if points is not None and len(points):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        px, py = mapper(pts[:, 0], pts[:, 1])
        lines += [
            '<circle class="lambda-point" cx="%.3f" cy="%.3f" r="%.2f"/>'
            % (a, b, radius)
            for a, b in zip(px, py)
        ]

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(geom, n, path, points=None, title=None):
    with open(path, "w") as f:
        f.write(render_svg(geom, n, points=points, title=title))
    return path
