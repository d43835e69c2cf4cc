"""Inertial Bregman proximal DC algorithm (iBPDCA) and its diagnostics.

One iteration, starting from ``x^{-1} = x^0`` and ``xi^0 = 0``::

    xhat   = x + alpha_k (x - x_prev)                        # extrapolation
    xi+    = argmin g*(xi) - <xhat, xi> + beta/2 ||xi - xi_k||^2
           = xi_k + xhat/beta - prox_{beta g}(beta xi_k + xhat)/beta
    u      = xi+ + grad h-(xhat)
    x+     = argmin f(x) + h+(x) - <x - xhat, u> + tau B_psi(x, xhat)

BPDCA is the same loop with ``alpha_k = 0``.

Besides the main loop this module evaluates the Lyapunov-style quantities
used to check the iterates: the surrogate ``Theta``, the merit function
``Theta_hat`` with its constants ``delta``, ``eta``, the one-step constants
``H`` and ``P`` and the subgradient residual ``upsilon``.
"""

import csv
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_array, check_scalar
from .exceptions import DivergenceError, ParameterError
from .prox import prox_conjugate

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("k", "phi", "theta", "theta_hat", "step_x", "step_xi", "upsilon", "alpha")


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass
class SolverConfig:
    """Parameters of the iBPDCA family.

    ``alpha`` selects the extrapolation schedule: ``"fista"`` (default),
    ``"none"`` (BPDCA) or a float for a constant value, clamped to (0, 1].
    ``alpha_min`` and ``epsilon_merit`` only enter the diagnostics.
    """

    beta: float = 1.0
    tau: float = 1.0
    alpha: object = "fista"
    alpha_min: float = 0.2
    max_iter: int = 500
    rel_tol: float = 1e-5
    epsilon_merit: float = 0.5
    diagnostics: bool = False

    def __post_init__(self):
        self.beta = check_scalar(self.beta, "beta", lower=0.5, lower_inclusive=False)
        self.tau = check_scalar(self.tau, "tau", lower=0.0, lower_inclusive=False)
        self.alpha_min = check_scalar(self.alpha_min, "alpha_min", lower=0.0, upper=1.0,
                                      lower_inclusive=False, upper_inclusive=False)
        self.max_iter = check_scalar(self.max_iter, "max_iter", lower=1, integer=True)
        self.rel_tol = check_scalar(self.rel_tol, "rel_tol", lower=0.0, lower_inclusive=False)
        self.epsilon_merit = check_scalar(self.epsilon_merit, "epsilon_merit", lower=0.0,
                                          upper=1.0, lower_inclusive=False,
                                          upper_inclusive=False)
        if isinstance(self.alpha, str):
            if self.alpha not in ("fista", "none"):
                raise ParameterError(f"alpha must be 'fista', 'none' or a number, got {self.alpha!r}")
        else:
            a = check_scalar(self.alpha, "alpha")
            self.alpha = min(max(a, np.finfo(float).tiny), 1.0)


class AlphaSchedule:
    """Extrapolation weights ``alpha_k`` for ``k = 0, 1, 2, ...``.

    ``alpha_0`` never matters because ``x^{-1} = x^0``.
    """

    def __init__(self, rule):
        self.rule = rule
        self._values = [0.0 if rule in ("fista", "none") else float(rule)]
        self._t = 1.0

    def __call__(self, k):
        while len(self._values) <= k:
            if self.rule == "fista":
                a, self._t = fista_alpha(self._t)
            elif self.rule == "none":
                a = 0.0
            else:
                a = float(self.rule)
            self._values.append(a)
        return self._values[k]


def fista_alpha(t_prev):
    """One step of the FISTA recurrence.

    Returns ``(alpha, t)`` with ``t = (1 + sqrt(1 + 4 t_prev^2)) / 2`` and
    ``alpha = (t_prev - 1) / t``. Starting from ``t^0 = 1`` this gives
    ``alpha_1 = 0``, ``alpha_2 ~ 0.2817`` and then increases toward 1.
    """
    t = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_prev * t_prev))
    return (t_prev - 1.0) / t, t


@dataclass
class IterationRecord:
    """State ``k`` of a run and the step taken from it.

    ``xhat_gap`` is ``||x^k - xhat^k||``; ``step_x``/``step_xi`` are
    ``||x^{k+1} - x^k||`` and ``||xi^{k+1} - xi^k||`` (NaN on the last
    record); ``upsilon`` is the residual norm at ``k`` (NaN when unknown).
    """

    k: int
    phi: float
    theta: float
    theta_hat: float
    xhat_gap: float
    step_x: float
    step_xi: float
    upsilon: float
    alpha: float
    xi_norm: float
    upsilon_components: tuple = (math.nan,) * 4
    inner_iters: int = 0
    inner_residual: float = math.nan


@dataclass
class SolverTrace:
    records: list = field(default_factory=list)
    status: str = "running"
    n_iter: int = 0
    wall_seconds: float = 0.0
    solver: str = ""

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def to_csv(self, path_or_file, inner=False):
        """Write the trace as CSV, floats with 17 significant digits.

        With ``inner=True`` an ``inner_iters`` column is appended (ADMM-DCA).
        """
        cols = TRACE_COLUMNS + (("inner_iters",) if inner else ())
        if hasattr(path_or_file, "write"):
            self._write_csv(path_or_file, cols)
        else:
            with open(path_or_file, "w", newline="") as fh:
                self._write_csv(fh, cols)

    def _write_csv(self, fh, cols):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in self.records:
            w.writerow([_fmt(getattr(r, c)) for c in cols])


@dataclass(frozen=True)
class MeritParams:
    delta: float
    eta: float
    H: float
    P: float
    theta_feasible: bool
    tau: float
    beta: float
    alpha_min: float
    epsilon: float
    l_h_minus: float
    l_psi: float
    rho: float

    @property
    def sigma(self):
        """Guaranteed decrease factor ``epsilon * min(delta, eta)``."""
        return self.epsilon * min(self.delta, self.eta)

    @property
    def residual_bound(self):
        """Constant ``theta`` bounding ``||upsilon^{k+1}||`` by the iteration gaps.

        Valid when every ``alpha_k >= alpha_min``.
        """
        lip = self.l_h_minus + self.tau * self.l_psi
        c_prev = lip + 1.0
        c_next = (lip + 1.0) / self.alpha_min + 4.0 * self.delta
        c_xi = abs(2.0 * self.eta - self.beta) + 2.0 * self.eta
        return max(c_prev, c_next, c_xi)


def _merit_denominator(alpha_min, eps):
    return 2.0 * ((1.0 - eps) + (1.0 + eps) * alpha_min ** 2)


def merit_params(problem, config):
    """Constants of the merit function for the given problem and configuration.

    ``delta`` is derived from the supplied ``tau``; ``theta_feasible`` tells
    whether that ``tau`` also satisfies the coupled lower bound
    ``tau >= (2 L^2 + L + 1 + 2(1+eps) delta) / (2 rho)`` with ``L = L_h-``.

    Raises
    ------
    ParameterError
        If ``tau * L_psi <= L_h-``.
    """
    beta, tau, eps, amin = config.beta, config.tau, config.epsilon_merit, config.alpha_min
    lm = float(problem.l_h_minus)
    lpsi, rho = float(problem.kernel.l_psi), float(problem.kernel.rho)
    if tau * lpsi <= lm:
        raise ParameterError(f"need L_h- < tau * L_psi, got L_h-={lm}, tau*L_psi={tau * lpsi}")
    delta = (tau * lpsi - lm) / _merit_denominator(amin, eps)
    eta = (2.0 * beta - 1.0) / (2.0 * (1.0 + eps))
    tau_needed = (2.0 * lm ** 2 + lm + 1.0 + 2.0 * (1.0 + eps) * delta) / (2.0 * rho)
    H = (tau * lpsi + 1.0 + 2.0 * lm ** 2 - 2.0 * tau * rho) / 2.0
    P = (2.0 * lm ** 2 + lm - 2.0 * tau * rho + 1.0) / (2.0 * amin ** 2)
    return MeritParams(delta=delta, eta=eta, H=H, P=P,
                       theta_feasible=bool(tau >= tau_needed * (1.0 - 1e-12)),
                       tau=tau, beta=beta, alpha_min=amin, epsilon=eps,
                       l_h_minus=lm, l_psi=lpsi, rho=rho)


def theory_tau(problem, alpha_min, epsilon):
    """Solve the coupled ``delta``/``tau`` relations of the merit function.

    The two relations are linear in ``(delta, tau)``::

        2 D delta - L_psi tau = -L
        -2 (1 + eps) delta + 2 rho tau = 2 L^2 + L + 1

    with ``D = (1 - eps) + (1 + eps) alpha_min^2`` and ``L = L_h-``.

    Returns
    -------
    tau, delta : float

    Raises
    ------
    ParameterError
        When the system is singular or its solution is not admissible
        (``tau <= 0``, ``delta <= 0`` or ``tau L_psi <= L``); this happens
        e.g. for the masked kernel, whose ``rho`` is too small relative to
        ``L_psi``.
    """
    lm = float(problem.l_h_minus)
    lpsi, rho = float(problem.kernel.l_psi), float(problem.kernel.rho)
    D = _merit_denominator(alpha_min, epsilon) / 2.0
    A = np.array([[2.0 * D, -lpsi], [-2.0 * (1.0 + epsilon), 2.0 * rho]])
    b = np.array([-lm, 2.0 * lm ** 2 + lm + 1.0])
    if abs(np.linalg.det(A)) < 1e-14:
        raise ParameterError("coupled merit relations are singular")
    delta, tau = np.linalg.solve(A, b)
    if tau <= 0 or delta <= 0 or tau * lpsi <= lm:
        raise ParameterError(
            f"no admissible theory parameters (tau={tau:.4g}, delta={delta:.4g}); "
            f"rho={rho}, L_psi={lpsi}, alpha_min={alpha_min}, epsilon={epsilon}"
        )
    return float(tau), float(delta)


def merit_value(problem, x, xi, xhat, xi_prev, params):
    """``Theta(x, xi) + delta ||x - xhat||^2 + eta ||xi - xi_prev||^2`` (may be ``inf``)."""
    th = problem.surrogate(x, xi)
    if np.isinf(th):
        return np.inf
    return (th + params.delta * float(np.sum((x - xhat) ** 2))
            + params.eta * float(np.sum((xi - xi_prev) ** 2)))


def subgradient_residual(problem, x, xhat, x_next, xhat_next, xi, xi_next, params):
    """Residual ``upsilon^{k+1}``, an element of the merit subdifferential.

    Parameters are the iterates ``x^k, xhat^k, x^{k+1}, xhat^{k+1}, xi^k,
    xi^{k+1}``.

    Returns
    -------
    norm : float
        ``||upsilon^{k+1}||``.
    components : tuple of 4 floats
        Norms of the ``x``, ``xi``, ``xhat`` and ``zeta`` blocks.
    """
    d, eta, beta, tau = params.delta, params.eta, params.beta, params.tau
    psi = problem.kernel
    v_x = (problem.grad_h_minus(xhat) - problem.grad_h_minus(x_next)
           + 2.0 * d * (x_next - xhat_next)
           - tau * (psi.gradient(x_next) - psi.gradient(xhat)))
    # (x^{k+1} - xhat^{k+1}) / alpha_{k+1} == x^k - x^{k+1}; avoids dividing by alpha
    v_xi = xhat - x_next + (2.0 * eta - beta) * (xi_next - xi)
    v_xhat = -2.0 * d * (x_next - xhat_next)
    v_zeta = 2.0 * eta * (xi - xi_next)
    comps = tuple(float(np.linalg.norm(v)) for v in (v_x, v_xi, v_xhat, v_zeta))
    return float(math.sqrt(sum(c * c for c in comps))), comps


def _rel_change(new, old):
    return float(np.linalg.norm(new - old)) / max(1.0, float(np.linalg.norm(old)))


def ibpdca_run(problem, config=None, x0=None, callback=None):
    """Run iBPDCA on a :class:`~ibpdca.problems.DcProblem`.

    Parameters
    ----------
    problem : DcProblem
    config : SolverConfig, optional
    x0 : array_like, optional
        Starting point; defaults to the zero array of the problem's shape.
    callback : callable, optional
        Called as ``callback(k, x)`` after each iteration.

    Returns
    -------
    x : ndarray
        Last iterate.
    trace : SolverTrace

    Raises
    ------
    DivergenceError
        If an iterate becomes non-finite; ``exc.trace`` holds the records so far.

    Notes
    -----
    The run stops when ``max(||dx|| / max(1, ||x||), ||dxi|| / max(1, ||xi||))``
    drops to ``rel_tol`` or after ``max_iter`` iterations.
    """
    config = SolverConfig() if config is None else config
    tau = problem.check_tau(config.tau)
    beta = config.beta
    x = np.zeros(problem.shape) if x0 is None else check_array(x0, name="x0").copy()
    if x.shape != tuple(problem.shape):
        raise ParameterError(f"x0 shape {x.shape} does not match problem shape {problem.shape}")

    params = merit_params(problem, config) if config.diagnostics else None
    alpha = AlphaSchedule(config.alpha)
    trace = SolverTrace(solver="bpdca" if config.alpha == "none" else "ibpdca")

    x_prev = x.copy()
    xi = np.zeros_like(x)
    xi_prev = xi.copy()
    pending_upsilon = (math.nan, (math.nan,) * 4)
    xhat = x.copy()
    start = time.perf_counter()

    def state_record(k, x, xi, xhat, xi_prev, a):
        phi, theta = _phi_theta(problem, x, xi)
        theta_hat = math.nan
        if params is not None:
            theta_hat = (theta + params.delta * float(np.sum((x - xhat) ** 2))
                         + params.eta * float(np.sum((xi - xi_prev) ** 2)))
        return IterationRecord(
            k=k, phi=phi, theta=theta, theta_hat=theta_hat,
            xhat_gap=float(np.linalg.norm(x - xhat)), step_x=math.nan, step_xi=math.nan,
            upsilon=pending_upsilon[0], alpha=a, xi_norm=float(np.linalg.norm(xi)),
            upsilon_components=pending_upsilon[1])

    for k in range(config.max_iter):
        a = alpha(k)
        xhat = x + a * (x - x_prev)
        rec = state_record(k, x, xi, xhat, xi_prev, a)
        xi_next = prox_conjugate(problem.prox_beta_g, xi, xhat, beta)
        u = xi_next + problem.grad_h_minus(xhat)
        x_next = problem.solve_x_subproblem(u, xhat, tau)
        rec.step_x = float(np.linalg.norm(x_next - x))
        rec.step_xi = float(np.linalg.norm(xi_next - xi))
        trace.records.append(rec)

        if not (np.isfinite(x_next).all() and np.isfinite(xi_next).all()):
            trace.status = "diverged"
            trace.n_iter = k + 1
            trace.wall_seconds = time.perf_counter() - start
            raise DivergenceError(f"non-finite iterate at iteration {k + 1}", trace)

        if params is not None:
            xhat_next = x_next + alpha(k + 1) * (x_next - x)
            pending_upsilon = subgradient_residual(problem, x, xhat, x_next, xhat_next,
                                                   xi, xi_next, params)

        done = max(_rel_change(x_next, x), _rel_change(xi_next, xi)) <= config.rel_tol
        x_prev, x = x, x_next
        xi_prev, xi = xi, xi_next
        if callback is not None:
            callback(k, x)
        if done:
            trace.status = "converged"
            trace.n_iter = k + 1
            break
    else:
        trace.status = "max-iter"
        trace.n_iter = config.max_iter

    trace.wall_seconds = time.perf_counter() - start
    K = trace.n_iter
    a = alpha(K)
    trace.records.append(state_record(K, x, xi, x + a * (x - x_prev), xi_prev, a))
    logger.debug("%s finished: status=%s iters=%d phi=%.6g", trace.solver, trace.status,
                 K, trace.records[-1].phi)
    return x, trace


def bpdca_run(problem, config=None, x0=None, callback=None):
    """BPDCA: :func:`ibpdca_run` without extrapolation (``alpha_k = 0``)."""
    config = SolverConfig() if config is None else config
    return ibpdca_run(problem, replace(config, alpha="none"), x0=x0, callback=callback)


def _phi_theta(problem, x, xi):
    f = problem.eval_f(x)
    smooth = problem.eval_h_plus(x) - problem.eval_h_minus(x)
    phi = f - problem.eval_g(x) + smooth
    gc = problem.conj_g(xi)
    theta = math.inf if math.isinf(gc) else f + gc - float(np.vdot(xi, x)) + smooth
    return phi, theta


# ---------------------------------------------------------------------------
# checks over a finished trace


def descent_slacks(trace, params):
    """Per-iteration slack of the one-step inequality

    ``Theta^{k+1} <= Theta^k + H a_k^2 + P a_{k+1}^2 + (1/2 - beta) ||dxi_k||^2``

    where ``a_k = ||xhat^k - x^k||``. Nonpositive entries mean the
    inequality holds; the returned array has one entry per iteration.
    """
    recs = trace.records
    out = []
    for r0, r1 in zip(recs[:-1], recs[1:]):
        rhs = (r0.theta + params.H * r0.xhat_gap ** 2 + params.P * r1.xhat_gap ** 2
               + (0.5 - params.beta) * r0.step_xi ** 2)
        out.append(r1.theta - rhs)
    return np.array(out)


def merit_increments(trace):
    """``Theta_hat^{k+1} - Theta_hat^k`` along the trace."""
    th = trace.column("theta_hat")
    return np.diff(th)


def residual_bound_slacks(trace, params):
    """``||upsilon^{k+1}|| - theta (a_k + a_{k+1} + ||dxi_k||)`` per iteration."""
    theta = params.residual_bound
    recs = trace.records
    out = []
    for r0, r1 in zip(recs[:-1], recs[1:]):
        out.append(r1.upsilon - theta * (r0.xhat_gap + r1.xhat_gap + r0.step_xi))
    return np.array(out)
