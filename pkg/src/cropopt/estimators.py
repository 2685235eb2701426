"""Scikit-learn style wrapper around the two control solvers.

``fit`` takes a mesh in place of a design matrix; ``predict`` evaluates the
fitted control at arbitrary points, so the estimator composes with the
usual ``get_params`` / ``set_params`` / ``clone`` machinery.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .fem import integrate_nodal
from .mesh import measure_indicator
from .model import ProblemParams, cost_J, solve_state
from .oracle import solve_exact
from .uzawa import UzawaConfig, run_uzawa
from .validation import check_mesh, check_points

SOLVERS = ("oracle", "uzawa")


class InterventionOptimizer(BaseEstimator):
    """Optimal intervention zone for a fixed budget.

    Parameters
    ----------
    D, alpha, T, L : float
        Problem constants, see :class:`~cropopt.model.ProblemParams`.
    solver : {"oracle", "uzawa"}
        Exact level-set thresholding or the projected-gradient iteration.
    eta, mu, lambda0, max_iters, check_period, stop_tol, budget_tol
        Passed to :class:`~cropopt.uzawa.UzawaConfig`; ignored by the oracle.

    Attributes
    ----------
    mesh_ : TriMesh
    control_ : ndarray of shape (n_triangles,)
    state_ : ndarray of shape (n_vertices,)
    cost_ : float
    area_ : float
    xi_ : float or None
        Adjoint threshold, oracle only.
    history_ : RunHistory or None
        Iteration trace, Uzawa only.
    """

    def __init__(self, D=0.01, alpha=1.0, T=1.0, L=0.4, solver="oracle", eta=0.1,
                 mu=1.0, lambda0=0.0, max_iters=2000, check_period=20, stop_tol=None,
                 budget_tol=None):
        self.D = D
        self.alpha = alpha
        self.T = T
        self.L = L
        self.solver = solver
        self.eta = eta
        self.mu = mu
        self.lambda0 = lambda0
        self.max_iters = max_iters
        self.check_period = check_period
        self.stop_tol = stop_tol
        self.budget_tol = budget_tol

    def _params(self):
        return ProblemParams(self.D, self.alpha, self.T, self.L)

    def _config(self):
        return UzawaConfig(self.eta, self.mu, self.lambda0, self.max_iters,
                           self.check_period, self.stop_tol, self.budget_tol)

    def fit(self, mesh, y=None, u0=None):
        """Solve for the optimal control on ``mesh``.

        ``y`` is accepted for pipeline compatibility and ignored.
        """
        mesh = check_mesh(mesh)
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        params = self._params()
        self.xi_ = None
        self.history_ = None
        if self.solver == "oracle":
            result = solve_exact(mesh, params)
            self.control_ = result.control
            self.xi_ = result.xi
        else:
            self.control_, self.history_ = run_uzawa(mesh, params, self._config(), u0=u0)
        self.mesh_ = mesh
        self.state_ = solve_state(mesh, params, self.control_)
        self.cost_ = params.T * integrate_nodal(mesh, self.state_)
        self.area_ = measure_indicator(mesh, self.control_)
        return self

    def predict(self, X):
        """Control value at each point; 0 outside the mesh."""
        check_is_fitted(self, "control_")
        X = check_points(X)
        elem = self.mesh_.locate(X)
        return np.where(elem >= 0, self.control_[np.maximum(elem, 0)], 0.0)

    def score(self, X=None, y=None):
        """Cost J of the fitted control (higher is better).

        ``X`` may be a control to evaluate on the fitted mesh instead.
        """
        check_is_fitted(self, "control_")
        if X is None:
            return self.cost_
        return cost_J(self.mesh_, self._params(), X)

