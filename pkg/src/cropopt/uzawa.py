"""Projected gradient ascent with an Uzawa multiplier for the area budget.

Each step moves the control along ``q * w(u) - lambda``, clamps it to
[0, 1], then raises the multiplier by ``mu`` times the budget excess::

    u_{k+1}      = clip(u_k + eta * (q w(u_k) - lambda_k), 0, 1)
    lambda_{k+1} = max(0, lambda_k + mu * (int u_{k+1} - L))

The run stops when J changes by less than ``stop_tol`` over one check period
and the budget is met to within ``budget_tol``.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from .exceptions import DivergenceError, ParameterError
from .fem import integrate_nodal
from .mesh import measure_indicator
from .model import check_control, gradient_density, solve_state
from .oracle import check_budget

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UzawaConfig:
    """Step sizes and stopping rule.

    A run stops at a check point when J moved by less than ``stop_tol`` since
    the previous check point and the budget is met to within ``budget_tol``.
    ``stop_tol=None`` means ``1e-5 * T * |domain|``; ``budget_tol=None``
    means ``0.005 * L``.
    """

    eta: float = 0.1
    mu: float = 1.0
    lambda0: float = 0.0
    max_iters: int = 2000
    check_period: int = 20
    stop_tol: float = None
    budget_tol: float = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ParameterError("eta must be positive")
        if not self.mu > 0:
            raise ParameterError("mu must be positive")
        if not self.lambda0 >= 0:
            raise ParameterError("lambda0 must be non-negative")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ParameterError("max_iters must be a positive integer")
        if int(self.check_period) != self.check_period or self.check_period < 1:
            raise ParameterError("check_period must be a positive integer")
        if self.stop_tol is not None and not self.stop_tol > 0:
            raise ParameterError("stop_tol must be positive")
        if self.budget_tol is not None and not self.budget_tol >= 0:
            raise ParameterError("budget_tol must be non-negative")


@dataclass
class RunHistory:
    """Per-iteration cost, intervention area and multiplier."""

    iteration: list = field(default_factory=list)
    J: list = field(default_factory=list)
    area: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    converged: bool = False

    def append(self, k, J, area, lam):
        self.iteration.append(k)
        self.J.append(J)
        self.area.append(area)
        self.lam.append(lam)

    def __len__(self):
        return len(self.iteration)

    def to_csv(self):
        rows = ["iter,J,area,lambda"]
        rows += [f"{k},{j:.17g},{a:.17g},{m:.17g}"
                 for k, j, a, m in zip(self.iteration, self.J, self.area, self.lam)]
        return "\n".join(rows) + "\n"


def project_box(v):
    """Clamp element values to [0, 1]."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot project non-finite values")
    return np.clip(v, 0.0, 1.0)


def budget_residual(mesh, u, L):
    """Budget excess ``int u - L``."""
    return measure_indicator(mesh, u) - L


def run_uzawa(mesh, params, config=None, u0=None):
    """Run the projected-gradient / Uzawa iteration.

    Parameters
    ----------
    mesh : TriMesh
    params : ProblemParams
    config : UzawaConfig, optional
    u0 : array_like, optional
        Admissible initial control; uniform ``L / |domain|`` by default.

    Returns
    -------
    control : ndarray
    history : RunHistory

    Raises
    ------
    DivergenceError
        If the cost becomes non-finite.
    """
    config = config or UzawaConfig()
    L = check_budget(mesh, params.L)
    if u0 is None:
        u0 = np.full(mesh.n_triangles, L / mesh.area)
    u = check_control(mesh, u0).copy()
    stop_tol = config.stop_tol
    if stop_tol is None:
        stop_tol = 1e-5 * params.T * mesh.area
    budget_tol = config.budget_tol
    if budget_tol is None:
        budget_tol = 0.005 * L

    lam = float(config.lambda0)
    state = solve_state(mesh, params, u)
    checkpoint = params.T * integrate_nodal(mesh, state)
    history = RunHistory()
    for k in range(1, int(config.max_iters) + 1):
        step = gradient_density(mesh, params, u) - lam
        u = project_box(u + config.eta * step)
        lam = max(0.0, lam + config.mu * budget_residual(mesh, u, L))
        state = solve_state(mesh, params, u, x0=state)
        J = params.T * integrate_nodal(mesh, state)
        if not np.isfinite(J):
            raise DivergenceError("cost functional became non-finite", k)
        history.append(k, J, measure_indicator(mesh, u), lam)
        if k % config.check_period == 0:
            # a flat J alone also happens while lambda drifts across a plateau
            feasible = abs(history.area[-1] - L) <= budget_tol
            if abs(J - checkpoint) < stop_tol and feasible:
                history.converged = True
                logger.info("uzawa converged after %d iterations, J=%.6f", k, J)
                break
            checkpoint = J
    return u, history
