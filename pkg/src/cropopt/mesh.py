"""Triangular meshes of the benchmark crop fields and of arbitrary polygons.

Rectilinear domains (rectangles and unions of rectangles) are meshed on a
structured grid whose diagonals are mirrored about the bounding-box centre,
so meshes of symmetric domains are exactly symmetric.  Disks are meshed on
concentric rings inside one quadrant and mirrored into the other three.
General simple polygons are ear-clipped and uniformly refined.
"""
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import AsymmetricMeshError, InvalidSpecError

DOMAIN_KINDS = ("rectangle", "disk", "lshape", "cross", "polygon")

BENCHMARK_DISK_RADIUS = 2.0 / math.sqrt(math.pi)
BENCHMARK_CROSS_C = 1.0 / math.sqrt(5.0)


@dataclass(frozen=True)
class DomainSpec:
    """Geometric description of a domain plus the target edge length.

    Parameters
    ----------
    kind : str
        One of ``rectangle``, ``disk``, ``lshape``, ``cross``, ``polygon``.
    h : float
        Target edge length.
    extent : tuple of float, optional
        ``(xmin, xmax, ymin, ymax)`` for rectangles.
    radius : float, optional
        Disk radius (the disk is centred at the origin).
    c : float, optional
        Half-width of the cross arms.
    vertices : tuple of (x, y), optional
        Polygon boundary, either orientation, not closed.

    Missing parameters default to the four benchmark fields of area 4:
    the L-shape, the cross with ``c = 1/sqrt(5)``, the disk of radius
    ``2/sqrt(pi)`` and the rectangle ``]-2, 2[ x ]-1/2, 1/2[``.
    """

    kind: str
    h: float = 0.05
    extent: tuple = (-2.0, 2.0, -0.5, 0.5)
    radius: float = BENCHMARK_DISK_RADIUS
    c: float = BENCHMARK_CROSS_C
    vertices: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise InvalidSpecError(f"unknown domain kind {self.kind!r}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise InvalidSpecError("target edge length h must be positive")
        if self.kind == "rectangle":
            xmin, xmax, ymin, ymax = self.extent
            if not (xmax > xmin and ymax > ymin):
                raise InvalidSpecError("rectangle extent has zero area")
        elif self.kind == "disk" and not self.radius > 0:
            raise InvalidSpecError("disk radius must be positive")
        elif self.kind == "cross" and not self.c > 0:
            raise InvalidSpecError("cross half-width must be positive")
        elif self.kind == "polygon":
            _check_simple_polygon(np.asarray(self.vertices, dtype=float))

    def rectangles(self):
        """Return the domain as a list of ``(xmin, xmax, ymin, ymax)`` boxes."""
        if self.kind == "rectangle":
            return [tuple(float(v) for v in self.extent)]
        if self.kind == "lshape":
            return [(-1.0, 1.0, -1.0, 0.0), (0.0, 1.0, 0.0, 2.0)]
        if self.kind == "cross":
            c = self.c
            return [(-3 * c, 3 * c, -c, c), (-c, c, c, 3 * c), (-c, c, -3 * c, -c)]
        raise InvalidSpecError(f"{self.kind} is not a rectilinear domain")

    def exact_area(self):
        if self.kind == "disk":
            return math.pi * self.radius ** 2
        if self.kind == "polygon":
            return abs(_signed_polygon_area(np.asarray(self.vertices, float)))
        return sum((b - a) * (d - c) for a, b, c, d in self.rectangles())


def benchmark_domain(index, h=0.05):
    """The four benchmark fields, numbered 1 to 4 (all of area 4)."""
    kinds = {1: "lshape", 2: "cross", 3: "disk", 4: "rectangle"}
    if index not in kinds:
        raise InvalidSpecError(f"benchmark domains are numbered 1-4, got {index}")
    return DomainSpec(kinds[index], h=h)


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Conforming triangulation with counter-clockwise elements.

    Attributes
    ----------
    vertices : ndarray of shape (n_vertices, 2)
    triangles : ndarray of shape (n_triangles, 3)
    boundary_vertex : ndarray of bool, shape (n_vertices,)
    element_area : ndarray of shape (n_triangles,)

    Instances hash by identity, which lets solver caches key on the mesh.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_vertex: np.ndarray
    element_area: np.ndarray
    kind: str = "polygon"

    @classmethod
    def from_arrays(cls, vertices, triangles, kind="polygon"):
        """Build a mesh, orienting elements and flagging boundary vertices."""
        vertices = np.array(vertices, dtype=float).reshape(-1, 2)
        triangles = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise InvalidSpecError("triangle references a missing vertex")
        signed = _signed_areas(vertices, triangles)
        flip = signed < 0
        triangles[flip] = triangles[flip][:, [0, 2, 1]]
        area = np.abs(signed)
        boundary = np.zeros(len(vertices), dtype=bool)
        edges, counts = _edge_counts(triangles)
        boundary[edges[counts == 1].ravel()] = True
        for arr in (vertices, triangles, boundary, area):
            arr.setflags(write=False)
        return cls(vertices, triangles, boundary, area, kind)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def area(self):
        return float(self.element_area.sum())

    @cached_property
    def centroids(self):
        c = self.vertices[self.triangles].mean(axis=1)
        c.setflags(write=False)
        return c

    def edges(self):
        """Unique undirected edges and the number of triangles sharing each."""
        return _edge_counts(self.triangles)

    def edge_lengths(self):
        edges, _ = self.edges()
        d = self.vertices[edges[:, 0]] - self.vertices[edges[:, 1]]
        return np.hypot(d[:, 0], d[:, 1])

    def max_edge_length(self):
        return float(self.edge_lengths().max())

    def locate(self, points):
        """Index of the element containing each point, or -1 outside.

        Candidates are the nearest elements by centroid, which is reliable
        for shape-regular meshes.  Points on a shared edge are assigned to
        one of the adjacent elements.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        tree = self._centroid_tree
        k = min(24, self.n_triangles)
        _, cand = tree.query(points, k=k)
        cand = np.asarray(cand).reshape(len(points), k)
        out = np.full(len(points), -1, dtype=np.int64)
        tol = 1e-12
        for col in range(k):
            todo = out < 0
            if not todo.any():
                break
            idx = cand[todo, col]
            lam = _barycentric(self.vertices[self.triangles[idx]], points[todo])
            inside = (lam >= -tol).all(axis=1)
            sub = np.flatnonzero(todo)[inside]
            out[sub] = idx[inside]
        return out

    @cached_property
    def _centroid_tree(self):
        return cKDTree(self.centroids)


def generate_mesh(spec):
    """Mesh the domain described by ``spec``.

    Parameters
    ----------
    spec : DomainSpec

    Returns
    -------
    TriMesh
        Every edge is at most ``1.5 * spec.h`` long.  Polygonal domains are
        covered exactly; the disk is approximated by an inscribed polygon
        whose vertices lie on the circle.
    """
    if spec.kind == "disk":
        vertices, triangles = _disk_mesh(spec.radius, spec.h)
    elif spec.kind == "polygon":
        vertices, triangles = _polygon_mesh(np.asarray(spec.vertices, float), spec.h)
    else:
        vertices, triangles = _rectilinear_mesh(spec.rectangles(), spec.h)
    mesh = TriMesh.from_arrays(vertices, triangles, kind=spec.kind)
    if mesh.element_area.min() <= 1e-14:
        raise InvalidSpecError("mesh generation produced a degenerate element")
    return mesh


def measure_indicator(mesh, w):
    """Area-weighted sum ``sum_e area_e * w_e`` of an element field."""
    w = _element_field(mesh, w)
    return float(mesh.element_area @ w)


def reflect_indicator(mesh, w, axis, tol=None):
    """Transport an element field to the mirror elements.

    Parameters
    ----------
    mesh : TriMesh
    w : array_like of shape (n_triangles,)
    axis : {"x=0", "y=0"}
        Mirror line.  ``"x=0"`` maps ``(x, y)`` to ``(-x, y)``.
    tol : float, optional
        Maximum centroid mismatch; half the mean edge length by default.

    Raises
    ------
    AsymmetricMeshError
        If some element has no mirror partner or the pairing is not one to one.
    """
    w = _element_field(mesh, w)
    perm = mirror_permutation(mesh, axis, tol)
    return w[perm]


def mirror_permutation(mesh, axis, tol=None):
    """Permutation ``p`` such that element ``p[e]`` is the mirror of ``e``."""
    if axis not in ("x=0", "y=0"):
        raise ValueError("axis must be 'x=0' or 'y=0'")
    if tol is None:
        tol = 0.5 * float(mesh.edge_lengths().mean())
    c = np.array(mesh.centroids)
    if axis == "x=0":
        c[:, 0] = -c[:, 0]
    else:
        c[:, 1] = -c[:, 1]
    dist, perm = mesh._centroid_tree.query(c)
    if np.any(dist > tol):
        raise AsymmetricMeshError(
            f"{int(np.sum(dist > tol))} elements have no mirror image about {axis}")
    if len(np.unique(perm)) != len(perm):
        raise AsymmetricMeshError(f"mirror pairing about {axis} is not one to one")
    return perm


def dump_mesh(mesh, path):
    """Write the mesh in the plain-text ``nv nt`` / ``x y flag`` / ``i j k`` format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_mesh(mesh))


def format_mesh(mesh):
    lines = [f"{mesh.n_vertices} {mesh.n_triangles}"]
    for (x, y), b in zip(mesh.vertices, mesh.boundary_vertex):
        lines.append(f"{x:.17g} {y:.17g} {int(b)}")
    for i, j, k in mesh.triangles:
        lines.append(f"{i} {j} {k}")
    return "\n".join(lines) + "\n"


def load_mesh(path, kind="polygon"):
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    nv, nt = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    vdata = np.array(body[:3 * nv], dtype=float).reshape(nv, 3)
    tdata = np.array(body[3 * nv:3 * nv + 3 * nt], dtype=np.int64).reshape(nt, 3)
    return TriMesh.from_arrays(vdata[:, :2], tdata, kind=kind)


# --------------------------------------------------------------------------
# helpers

def _element_field(mesh, w):
    from .validation import check_element_field
    return check_element_field(mesh, w)


def _signed_areas(vertices, triangles):
    p = vertices[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _edge_counts(triangles):
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    e.sort(axis=1)
    return np.unique(e, axis=0, return_counts=True)


def _barycentric(tri_pts, points):
    a, b, c = tri_pts[:, 0], tri_pts[:, 1], tri_pts[:, 2]
    v0, v1, v2 = b - a, c - a, points - a
    det = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    l1 = (v2[:, 0] * v1[:, 1] - v2[:, 1] * v1[:, 0]) / det
    l2 = (v0[:, 0] * v2[:, 1] - v0[:, 1] * v2[:, 0]) / det
    return np.column_stack([1.0 - l1 - l2, l1, l2])


def _subdivide(a, b, h):
    n = max(1, math.ceil((b - a) / h - 1e-9))
    return [a + (b - a) * i / n for i in range(n)]


def _rectilinear_mesh(rects, h):
    xb = sorted({v for r in rects for v in r[:2]})
    yb = sorted({v for r in rects for v in r[2:]})
    xs = np.array([x for a, b in zip(xb, xb[1:]) for x in _subdivide(a, b, h)] + [xb[-1]])
    ys = np.array([y for a, b in zip(yb, yb[1:]) for y in _subdivide(a, b, h)] + [yb[-1]])
    nx = len(xs)
    ox, oy = 0.5 * (xb[0] + xb[-1]), 0.5 * (yb[0] + yb[-1])

    def inside(x, y):
        return any(r[0] < x < r[1] and r[2] < y < r[3] for r in rects)

    triangles = []
    for j in range(len(ys) - 1):
        for i in range(nx - 1):
            cx, cy = 0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])
            if not inside(cx, cy):
                continue
            v00, v10 = j * nx + i, j * nx + i + 1
            v01, v11 = v00 + nx, v10 + nx
            if (cx - ox) * (cy - oy) >= 0:
                triangles += [(v00, v10, v11), (v00, v11, v01)]
            else:
                triangles += [(v00, v10, v01), (v10, v11, v01)]
    gx, gy = np.meshgrid(xs, ys)
    vertices = np.column_stack([gx.ravel(), gy.ravel()])
    return _compact(vertices, np.array(triangles, dtype=np.int64))


def _compact(vertices, triangles):
    used = np.unique(triangles)
    remap = np.full(len(vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return vertices[used], remap[triangles]


def _disk_mesh(radius, h):
    n_rings = max(1, math.ceil(radius / h - 1e-9))
    quad_pts = [(0.0, 0.0)]
    rings = [[0]]
    for k in range(1, n_rings + 1):
        r = radius * k / n_rings
        m = max(1, math.ceil(0.5 * math.pi * r / h - 1e-9))
        ids = []
        for j in range(m + 1):
            if j == 0:
                p = (r, 0.0)
            elif j == m:
                p = (0.0, r)
            else:
                t = 0.5 * math.pi * j / m
                p = (r * math.cos(t), r * math.sin(t))
            ids.append(len(quad_pts))
            quad_pts.append(p)
        rings.append(ids)
    pts = np.array(quad_pts)
    quad_tris = []
    for inner, outer in zip(rings, rings[1:]):
        if len(inner) == 1:
            quad_tris += [(inner[0], outer[j], outer[j + 1]) for j in range(len(outer) - 1)]
            continue
        i = j = 0
        while i < len(inner) - 1 or j < len(outer) - 1:
            if i == len(inner) - 1:
                advance_outer = True
            elif j == len(outer) - 1:
                advance_outer = False
            else:
                d_out = np.sum((pts[inner[i]] - pts[outer[j + 1]]) ** 2)
                d_in = np.sum((pts[inner[i + 1]] - pts[outer[j]]) ** 2)
                advance_outer = d_out <= d_in
            if advance_outer:
                quad_tris.append((inner[i], outer[j], outer[j + 1]))
                j += 1
            else:
                quad_tris.append((inner[i], outer[j], inner[i + 1]))
                i += 1
    quad_tris = np.array(quad_tris, dtype=np.int64)

    # mirror the quadrant into the full disk and merge shared axis vertices
    all_pts, all_tris = [], []
    for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        all_tris.append(quad_tris + len(all_pts) * len(pts))
        all_pts.append(pts * np.array([sx, sy]))
    return _merge_duplicates(np.vstack(all_pts) + 0.0, np.vstack(all_tris))


def _merge_duplicates(vertices, triangles, decimals=12):
    key = np.round(vertices, decimals) + 0.0
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    return vertices[first], inverse[triangles]


def _signed_polygon_area(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True
    # collinear overlaps count as crossings
    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    return ((d1 == 0 and on_seg(q1, q2, p1)) or (d2 == 0 and on_seg(q1, q2, p2))
            or (d3 == 0 and on_seg(p1, p2, q1)) or (d4 == 0 and on_seg(p1, p2, q2)))


def _check_simple_polygon(poly):
    if poly.ndim != 2 or poly.shape[0] < 3 or poly.shape[1] != 2:
        raise InvalidSpecError("polygon needs at least three 2D vertices")
    if not np.all(np.isfinite(poly)):
        raise InvalidSpecError("polygon has non-finite coordinates")
    if abs(_signed_polygon_area(poly)) <= 1e-14:
        raise InvalidSpecError("polygon has zero area")
    n = len(poly)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]):
                raise InvalidSpecError("polygon is not simple")


def _ear_clip(poly):
    idx = list(range(len(poly)))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    while len(idx) > 3:
        for k in range(len(idx)):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            a, b, c = poly[i0], poly[i1], poly[i2]
            if cross(a, b, c) <= 0:
                continue
            others = [poly[m] for m in idx if m not in (i0, i1, i2)]
            if any(cross(a, b, p) >= 0 and cross(b, c, p) >= 0 and cross(c, a, p) >= 0
                   for p in others):
                continue
            tris.append((i0, i1, i2))
            del idx[k]
            break
        else:
            raise InvalidSpecError("ear clipping failed; polygon may be degenerate")
    tris.append(tuple(idx))
    return tris


def _polygon_mesh(poly, h):
    if _signed_polygon_area(poly) < 0:
        poly = poly[::-1]
    vertices = [tuple(p) for p in poly]
    triangles = _ear_clip(poly)
    while True:
        pts = np.array(vertices)
        tri = np.array(triangles)
        e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        if np.hypot(*(pts[e[:, 0]] - pts[e[:, 1]]).T).max() <= h:
            break
        mid = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in mid:
                mid[key] = len(vertices)
                vertices.append(tuple(0.5 * (pts[a] + pts[b])))
            return mid[key]

        refined = []
        for a, b, c in triangles:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        triangles = refined
    return np.array(vertices), np.array(triangles, dtype=np.int64)
