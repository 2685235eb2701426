"""P1 finite elements for the screened Poisson problem ``v - D lap v = f``.

Sources are piecewise constant per element, solutions are continuous and
piecewise linear.  Constant Dirichlet data ``g`` is handled by lifting: the
unknown ``v - g`` vanishes on the boundary and solves the problem with
source ``f - g``.
"""
from functools import lru_cache
import math

import numpy as np
from scipy import sparse as sp
from scipy.sparse import linalg as spla

from .exceptions import AssemblyError, ParameterError, SolverError
from .validation import check_element_field as _check_element
from .validation import check_nodal_field as _check_nodal

CG_RTOL = 1e-10
MIN_ELEMENT_AREA = 1e-14


def _gradients(mesh):
    """Constant gradients of the three hat functions on every element."""
    p = mesh.vertices[mesh.triangles]
    area = mesh.element_area
    if area.min() < MIN_ELEMENT_AREA:
        bad = int(np.argmin(area))
        raise AssemblyError(f"element {bad} is degenerate (area {area[bad]:.3e})")
    # grad phi_i = rot90(p_k - p_j) / (2 area) for the edge opposite vertex i
    x, y = p[:, :, 0], p[:, :, 1]
    gx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    gy = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    return gx / (2 * area[:, None]), gy / (2 * area[:, None])


def _scatter(mesh, blocks):
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((blocks.ravel(), (rows, cols)), shape=(n, n))


@lru_cache(maxsize=32)
def assemble_stiffness(mesh):
    """Stiffness matrix ``K_ij = sum_e int_e grad phi_i . grad phi_j``.

    Returns
    -------
    scipy.sparse.csr_matrix
        Symmetric, positive semidefinite, with zero row sums.
    """
    gx, gy = _gradients(mesh)
    blocks = (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :])
    blocks *= mesh.element_area[:, None, None]
    return _scatter(mesh, blocks)


_MASS_REF = (np.ones((3, 3)) + np.eye(3)) / 12.0


@lru_cache(maxsize=32)
def assemble_mass(mesh):
    """Consistent P1 mass matrix; element block is ``area/12 * [[2,1,1],[1,2,1],[1,1,2]]``."""
    _gradients(mesh)  # degeneracy check
    blocks = mesh.element_area[:, None, None] * _MASS_REF[None]
    return _scatter(mesh, blocks)


def assemble_load(mesh, f):
    """Load vector ``b_i = sum_{e contains i} f_e * area_e / 3``."""
    f = _check_element(mesh, f)
    contrib = np.repeat((f * mesh.element_area / 3.0)[:, None], 3, axis=1)
    return np.bincount(mesh.triangles.ravel(), weights=contrib.ravel(),
                       minlength=mesh.n_vertices)


def integrate_nodal(mesh, v):
    """Exact integral of a P1 field, ``1^T M v``."""
    v = _check_nodal(mesh, v)
    return float(_mass_row_sums(mesh) @ v)


def element_average(mesh, v):
    """Mean of the three vertex values on every element."""
    v = _check_nodal(mesh, v)
    return v[mesh.triangles].mean(axis=1)


@lru_cache(maxsize=32)
def _mass_row_sums(mesh):
    return np.asarray(assemble_mass(mesh).sum(axis=1)).ravel()


@lru_cache(maxsize=32)
def _reduced_system(mesh, D):
    A = (assemble_mass(mesh) + D * assemble_stiffness(mesh)).tocsr()
    interior = np.flatnonzero(~mesh.boundary_vertex)
    A_ii = A[interior][:, interior].tocsr()
    inv_diag = 1.0 / A_ii.diagonal()
    precond = spla.LinearOperator(A_ii.shape, matvec=lambda x: inv_diag * x, dtype=float)
    return A_ii, interior, precond


def solve_screened_poisson(mesh, D, f, g=0.0, x0=None):
    """Solve ``v - D lap v = f`` with ``v = g`` on the boundary.

    Parameters
    ----------
    mesh : TriMesh
    D : float
        Diffusion coefficient, strictly positive.
    f : array_like of shape (n_triangles,)
        Piecewise constant source.
    g : float
        Constant Dirichlet value.
    x0 : ndarray of shape (n_vertices,), optional
        Initial guess for the conjugate gradient iteration.

    Returns
    -------
    ndarray of shape (n_vertices,)

    Raises
    ------
    ParameterError
        If ``D`` is not positive.
    SolverError
        If preconditioned CG does not reach relative residual 1e-10 within
        ``50 * sqrt(n)`` iterations.
    """
    if not (D > 0 and math.isfinite(D)):
        raise ParameterError(f"diffusion coefficient must be positive, got {D}")
    f = _check_element(mesh, f)
    g = float(g)
    A_ii, interior, precond = _reduced_system(mesh, float(D))
    # constants lie in the kernel of K, so the lift by g only shifts the source
    rhs = assemble_load(mesh, f - g)[interior]
    v = np.full(mesh.n_vertices, g)
    if not interior.size:
        return v
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return v
    guess = None if x0 is None else np.asarray(x0, float)[interior] - g
    maxiter = int(50 * math.sqrt(interior.size)) + 1
    # restarts absorb drift between the recursive and the true residual
    for _ in range(3):
        w, _ = spla.cg(A_ii, rhs, x0=guess, rtol=CG_RTOL, atol=0.0, maxiter=maxiter,
                       M=precond)
        residual = np.linalg.norm(A_ii @ w - rhs) / bnorm
        if residual <= CG_RTOL or not np.isfinite(residual):
            break
        guess = w
    if not residual <= CG_RTOL:
        raise SolverError("conjugate gradients did not converge", residual)
    v[interior] += w
    return v
