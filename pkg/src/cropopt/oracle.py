"""Exact optimal controls by thresholding the adjoint, plus comparison controls.

The optimum is the indicator of an upper level set ``{q >= xi}`` of the
adjoint state with area exactly ``L``.  On a mesh this becomes a greedy
selection of elements by decreasing adjoint average, closed off by one
fractionally filled element so the budget is met exactly.
"""
from dataclasses import dataclass
import math

import numpy as np

from .exceptions import BudgetError, DomainError
from .model import adjoint_average

_AREA_RTOL = 1e-12


@dataclass(frozen=True)
class OracleResult:
    """Optimal control and its level-set threshold.

    Attributes
    ----------
    control : ndarray
        Element values in {0, 1} except for at most one element.
    xi : float
        Adjoint level defining the selected set.
    quantization_gap : float
        Budget left over by the whole elements, filled by the fractional one.
    """

    control: np.ndarray
    xi: float
    quantization_gap: float

    @property
    def selected(self):
        return self.control >= 1.0


def check_budget(mesh, L):
    total = mesh.area
    if not (0.0 <= L <= total * (1 + _AREA_RTOL)):
        raise BudgetError(f"budget L={L} outside [0, {total}]")
    return min(float(L), total)


def _greedy_fill(mesh, order, L):
    """Fill elements in ``order`` up to area ``L``; returns (control, n_full, gap)."""
    area = mesh.element_area[order]
    cum = np.cumsum(area)
    n_full = int(np.searchsorted(cum, L * (1 + _AREA_RTOL), side="right"))
    u = np.zeros(mesh.n_triangles)
    u[order[:n_full]] = 1.0
    used = cum[n_full - 1] if n_full else 0.0
    gap = L - used
    if n_full < len(order) and gap > 0:
        u[order[n_full]] = gap / area[n_full]
    return u, n_full, max(gap, 0.0)


def solve_exact(mesh, params):
    """Globally optimal control for the budget ``params.L``.

    Elements are ranked by decreasing adjoint average (ties by element
    index) and switched on until the budget is spent.

    Returns
    -------
    OracleResult

    Raises
    ------
    BudgetError
        If ``L`` is negative or exceeds the mesh area.
    """
    L = check_budget(mesh, params.L)
    qbar = adjoint_average(mesh, params.D)
    order = np.argsort(-qbar, kind="stable")
    u, n_full, gap = _greedy_fill(mesh, order, L)
    xi = float(qbar[order[n_full - 1]]) if n_full else float(qbar.max())
    return OracleResult(u, xi, float(gap))


def random_bangbang(mesh, L, seed):
    """Random admissible control of area exactly ``L`` (one fractional element)."""
    L = check_budget(mesh, L)
    order = np.random.default_rng(seed).permutation(mesh.n_triangles)
    u, _, _ = _greedy_fill(mesh, order, L)
    return u


@dataclass(frozen=True)
class AnnulusControl:
    """Outer-ring control on a disk.

    Attributes
    ----------
    control : ndarray
        Element indicator of the ring.
    inner_radius : float
        Analytic hole radius ``sqrt((|disk| - L) / pi)``.
    threshold : float
        Smallest centroid radius among the selected elements.
    quantization_gap : float
        ``measure(control) - L``; at most half an element area in size.
    """

    control: np.ndarray
    inner_radius: float
    threshold: float
    quantization_gap: float


def annulus_inner_radius(area, L):
    """Radius of the hole left by an outer ring of area ``L`` in a disk of area ``area``."""
    return math.sqrt(max(area - L, 0.0) / math.pi)


def make_annulus_control(mesh, params):
    """Indicator of the outer ring of area ``L`` on a centred disk.

    Elements are switched on by decreasing centroid radius (ties by element
    index) and the prefix whose area is closest to ``L`` is kept.  On ring
    meshes a fixed cut at the analytic hole radius would miss the budget by
    a whole layer of elements.  No fractional correction is applied; the
    mismatch to ``L`` is reported as ``quantization_gap``.

    Raises
    ------
    DomainError
        If the mesh is not a disk centred at the origin.
    """
    _check_centred_disk(mesh)
    L = check_budget(mesh, params.L)
    radius = np.hypot(*mesh.centroids.T)
    order = np.argsort(-radius, kind="stable")
    cum = np.concatenate([[0.0], np.cumsum(mesh.element_area[order])])
    n = int(np.argmin(np.abs(cum - L)))
    u = np.zeros(mesh.n_triangles)
    u[order[:n]] = 1.0
    threshold = float(radius[order[n - 1]]) if n else float(radius.max())
    return AnnulusControl(u, annulus_inner_radius(mesh.area, L), threshold,
                          float(cum[n] - L))


def _check_centred_disk(mesh):
    b = mesh.vertices[mesh.boundary_vertex]
    r = np.hypot(b[:, 0], b[:, 1])
    if mesh.kind != "disk" or r.size == 0 or (r.max() - r.min()) > 1e-9 * r.max():
        raise DomainError("annulus control needs a disk mesh centred at the origin")
