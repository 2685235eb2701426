"""Input checks shared by the solvers and the estimator wrappers."""
import numpy as np

from .exceptions import DimensionError
from .mesh import TriMesh


def check_mesh(mesh):
    if not isinstance(mesh, TriMesh):
        raise TypeError(f"expected a TriMesh, got {type(mesh).__name__}")
    if mesh.n_triangles == 0:
        raise ValueError("mesh has no elements")
    return mesh


def check_element_field(mesh, f):
    """Return ``f`` as a finite float array with one value per element.

    Scalars are broadcast to a constant field.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim == 0:
        f = np.full(mesh.n_triangles, float(f))
    if f.shape != (mesh.n_triangles,):
        raise DimensionError(
            f"element field has shape {f.shape}, mesh has {mesh.n_triangles} triangles")
    if not np.all(np.isfinite(f)):
        raise ValueError("element field contains non-finite values")
    return f


def check_nodal_field(mesh, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (mesh.n_vertices,):
        raise DimensionError(
            f"nodal field has shape {v.shape}, mesh has {mesh.n_vertices} vertices")
    return v


def check_points(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 and X.size == 2:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != 2:
        raise DimensionError(f"points must have shape (n, 2), got {X.shape}")
    return X
