"""Protection model: time-averaged state, cost functional and its derivatives.

A control ``u`` with values in [0, 1] lets the protection source decay as
``exp(-alpha (1 - u) t)``.  Averaging the state over ``[0, T]`` leaves one
elliptic problem

    P - D lap P = phi_bar(u)  in the field,   P = 1 on the boundary,

and the cost is ``J(u) = T * int P``.  Its gradient density is
``q * w(u)`` where ``q - D lap q = 1``, ``q = 0`` on the boundary.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import gammainc

from .exceptions import ParameterError
from .fem import element_average, integrate_nodal, solve_screened_poisson
from .validation import check_element_field as _check_element

# below this |1 - s| the kernels take their s = 1 limit
LIMIT_THRESHOLD = 1e-7
# below this alpha (1 - s) T the kernels use a 3-term Taylor expansion
TAYLOR_THRESHOLD = 1e-3


@dataclass(frozen=True)
class ProblemParams:
    """Physical constants of the protection problem.

    Parameters
    ----------
    D : float
        Diffusion coefficient.
    alpha : float
        Degradation rate of the protection source.
    T : float
        Length of the season.
    L : float
        Intervention budget (area); checked against the mesh area at use.
    """

    D: float = 0.01
    alpha: float = 1.0
    T: float = 1.0
    L: float = 0.4

    def __post_init__(self):
        for name in ("D", "alpha", "T"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive, got {value}")
        if not (self.L >= 0 and math.isfinite(self.L)):
            raise ParameterError(f"L must be non-negative, got {self.L}")


def _rate(s, alpha, T):
    s = np.asarray(s, dtype=float)
    return s, alpha * (1.0 - s) * T


def phi_bar(s, alpha, T):
    """Time average ``(1/T) int_0^T exp(-alpha (1 - s) t) dt`` of the source."""
    s, x = _rate(s, alpha, T)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x < TAYLOR_THRESHOLD, 1.0 - x / 2 + x * x / 6, -np.expm1(-x) / x)
    out = np.where(np.abs(1.0 - s) < LIMIT_THRESHOLD, 1.0, out)
    return out[()] if out.ndim == 0 else out


def switching_w(s, alpha, T):
    """Switching function ``alpha int_0^T t exp(-alpha (1 - s) t) dt``.

    Equals ``alpha T^2 / 2`` at ``s = 1`` and
    ``(1 + exp(-beta T) (-beta T - 1)) / (alpha (1 - s)^2)`` otherwise, with
    ``beta = alpha (1 - s)``.
    """
    s, x = _rate(s, alpha, T)
    # gammainc(2, x) = 1 - exp(-x) (1 + x) without the cancellation near 0
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = alpha * T * T * gammainc(2.0, x) / (x * x)
    taylor = alpha * T * T * (0.5 - x / 3 + x * x / 8)
    out = np.where(x < TAYLOR_THRESHOLD, taylor, closed)
    out = np.where(np.abs(1.0 - s) < LIMIT_THRESHOLD, 0.5 * alpha * T * T, out)
    return out[()] if out.ndim == 0 else out


def second_kernel(s, alpha, T):
    """``int_0^T t^2 exp(-alpha (1 - s) t) dt``, the second-derivative weight."""
    s, x = _rate(s, alpha, T)
    # 2 gammainc(3, x) = 2 - exp(-x) (x^2 + 2x + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = T ** 3 * 2.0 * gammainc(3.0, x) / x ** 3
    taylor = T ** 3 * (1.0 / 3 - x / 4 + x * x / 10)
    out = np.where(x < TAYLOR_THRESHOLD, taylor, closed)
    out = np.where(np.abs(1.0 - s) < LIMIT_THRESHOLD, T ** 3 / 3.0, out)
    return out[()] if out.ndim == 0 else out


def check_control(mesh, u):
    """Validate an element-wise control with values in [0, 1]."""
    u = _check_element(mesh, u)
    if u.min() < 0.0 or u.max() > 1.0:
        raise ParameterError(
            f"control values must lie in [0, 1], got range [{u.min()}, {u.max()}]")
    return u


def solve_state(mesh, params, u, x0=None):
    """Time-averaged protection ``P_u`` at the mesh vertices."""
    u = check_control(mesh, u)
    return solve_screened_poisson(mesh, params.D, phi_bar(u, params.alpha, params.T),
                                  g=1.0, x0=x0)


def cost_J(mesh, params, u):
    """Total protection ``J(u) = T int P_u`` over field and season."""
    return params.T * integrate_nodal(mesh, solve_state(mesh, params, u))


@lru_cache(maxsize=32)
def adjoint_state(mesh, D):
    """Adjoint ``q`` with ``q - D lap q = 1``, ``q = 0`` on the boundary.

    It does not depend on the control, so it is computed once per mesh and
    diffusion coefficient.
    """
    q = solve_screened_poisson(mesh, D, 1.0, g=0.0)
    q.setflags(write=False)
    return q


@lru_cache(maxsize=32)
def adjoint_average(mesh, D):
    """Element averages of the adjoint state."""
    qbar = element_average(mesh, adjoint_state(mesh, D))
    qbar.setflags(write=False)
    return qbar


def gradient_density(mesh, params, u):
    """Element-wise density ``qbar_e * w(u_e)`` of the differential of J.

    ``dJ(u)(h) = sum_e area_e * h_e * gradient_density(u)_e``.
    """
    u = check_control(mesh, u)
    return adjoint_average(mesh, params.D) * switching_w(u, params.alpha, params.T)


def directional_derivative(mesh, params, u, h):
    h = _check_element(mesh, h)
    return float(np.sum(mesh.element_area * h * gradient_density(mesh, params, u)))


def second_diff(mesh, params, u, h1, h2):
    """Second differential ``d2J(u)(h1, h2)``; positive definite in ``h``."""
    u = check_control(mesh, u)
    h1 = _check_element(mesh, h1)
    h2 = _check_element(mesh, h2)
    weight = params.alpha ** 2 * adjoint_average(mesh, params.D)
    weight = weight * second_kernel(u, params.alpha, params.T)
    return float(np.sum(mesh.element_area * weight * h1 * h2))
