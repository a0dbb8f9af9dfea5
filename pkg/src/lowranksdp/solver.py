"""Fast Riemannian trust-region solver with a curvature-certificate stop.

Two step schedules are implemented:

* ``eigen-only``: every step moves along an approximate top-curvature
  direction found by a shifted power method, with step size
  lam_H / (100 ||A||_1).
* ``gradient-eigen``: while the Riemannian gradient is large (above the
  spectral norm of A) take fixed-size gradient steps ||A||_2 / (20 ||A||_1);
  otherwise take an eigen-step of size
  min(sqrt(lam_H / (216 ||A||_1)), lam_H / (12 ||A||_2)).

The run stops once a power-method direction certifies that the largest
Hessian curvature is (with high probability) below the target epsilon; the
certificate is retried once with a fresh start before convergence is
declared.  A projected-gradient-ascent baseline shares the report format.

The solver is generic over the sphere-product and Stiefel-product
geometries; pass ``manifold="stiefel"`` in the options (the matrix must then
carry a matching ``block_dim``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sphere, stiefel
from .symmat import SymmetricMatrix

__all__ = [
    "SolverOptions",
    "StepRecord",
    "SolveReport",
    "MODE_EIGEN_ONLY",
    "MODE_GRADIENT_EIGEN",
    "default_epsilon",
    "worst_case_budget",
    "power_method",
    "direction_finding",
    "rtr_step",
    "solve",
    "projected_gradient_ascent",
]

MODE_EIGEN_ONLY = "eigen-only"
MODE_GRADIENT_EIGEN = "gradient-eigen"
_MODES = (MODE_EIGEN_ONLY, MODE_GRADIENT_EIGEN)

_BUDGET_CAP = 10**15


@dataclass
class SolverOptions:
    """Knobs of the trust-region solver.

    ``epsilon=None`` resolves to the natural target 2*Rg/(n(k-1)) with the
    range Rg bounded by 2n||A||_2, i.e. 4||A||_2/(k-1) (divided by k_d-1 on
    the Stiefel product).  ``max_iters=None`` resolves to the worst-case
    iteration budget of the convergence analysis for the chosen mode.
    """

    k: int
    mode: str = MODE_GRADIENT_EIGEN
    epsilon: float | None = None
    max_iters: int | None = None
    power_C: float = 8.0
    seed: int = 0
    pga_step: float | None = None
    manifold: str = "sphere"
    max_power_iters: int | None = None

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("rank k must be >= 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.epsilon is not None and not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.power_C <= 0.0:
            raise ValueError("power_C must be positive")
        if self.manifold not in ("sphere", "stiefel"):
            raise ValueError("manifold must be 'sphere' or 'stiefel'")


@dataclass(frozen=True)
class StepRecord:
    index: int
    kind: str  # "init" | "gradient" | "eigen" | "pga" | "none"
    step_size: float
    objective: float
    grad_norm: float
    lam_h: float = math.nan


@dataclass
class SolveReport:
    """Outcome of a solve: final point, certificate, and per-step trace."""

    sigma: object
    objective: float
    grad_norm: float
    curvature_cert: float
    converged: bool
    gradient_steps: int
    eigen_steps: int
    trace: list
    seed: int
    epsilon: float
    mode: str
    manifold: str
    budget: int

    @property
    def iterations(self) -> int:
        return self.gradient_steps + self.eigen_steps

    def summary_line(self) -> str:
        return ("mode=%s manifold=%s converged=%s f=%.10g grad_norm=%.4g cert=%.4g "
                "steps=%d (gradient=%d eigen=%d) eps=%.4g seed=%d"
                % (self.mode, self.manifold, self.converged, self.objective,
                   self.grad_norm, self.curvature_cert, self.iterations,
                   self.gradient_steps, self.eigen_steps, self.epsilon, self.seed))

    def trace_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "f", "grad_norm", "kind", "step"])
            for rec in self.trace:
                writer.writerow([rec.index, f"{rec.objective:.17g}",
                                 f"{rec.grad_norm:.17g}", rec.kind, f"{rec.step_size:.17g}"])
            writer.writerow(["# " + self.summary_line()])


# -- geometry adapters --------------------------------------------------------


@dataclass
class _State:
    config: object
    hess: object
    objective: float
    grad: object
    grad_norm: float


class _SphereGeometry:
    manifold = "sphere"

    def __init__(self, A: SymmetricMatrix, k: int):
        if k < 1:
            raise ValueError("rank k must be >= 1")
        self.A = A
        self.k = k
        self.n = A.n
        self.mu_H = 4.0 * A.l1_norm()

    def tangent_dim(self) -> int:
        return self.n * (self.k - 1)

    def random_point(self, rng):
        return sphere.random_config(self.n, self.k, rng)

    def evaluate(self, config) -> _State:
        h = sphere.HessianOperator(self.A, config)
        g = h.gradient()
        return _State(config, h, h.objective_value(), g, g.norm)

    def retract(self, config, u, t):
        return sphere.retract(config, u, t)

    def scale_tangent(self, u, c: float):
        return sphere.TangentField(c * u.rows, u.base)


class _StiefelGeometry:
    manifold = "stiefel"

    def __init__(self, A: SymmetricMatrix, k: int):
        if A.block_dim is None:
            raise ValueError("stiefel solves need a matrix with block_dim set")
        d = A.block_dim
        if k < d:
            raise ValueError("rank k must be at least the block dimension d")
        self.A = A
        self.k = k
        self.n = A.n
        self.d = d
        self.m = A.num_blocks
        # upper bound on ||Hess||: 2(||A||_2 + ||Lambda||_2) <= 2(1 + sqrt(d)) ||A||_1;
        # equals the sphere shift 4||A||_1 at d = 1
        self.mu_H = 2.0 * (1.0 + math.sqrt(d)) * A.l1_norm()

    def tangent_dim(self) -> int:
        per_block = self.d * (self.k - self.d) + self.d * (self.d - 1) // 2
        return self.m * per_block

    def random_point(self, rng):
        return stiefel.oc_random_config(self.m, self.d, self.k, rng)

    def evaluate(self, config) -> _State:
        h = stiefel.OcHessianOperator(self.A, config)
        g = h.gradient()
        return _State(config, h, h.objective_value(), g, g.norm)

    def retract(self, config, u, t):
        return stiefel.oc_retract(config, u, t)

    def scale_tangent(self, u, c: float):
        return stiefel.StiefelTangent(c * u.rows, u.base)


def _geometry(A: SymmetricMatrix, opts: SolverOptions):
    if opts.manifold == "stiefel":
        return _StiefelGeometry(A, opts.k)
    return _SphereGeometry(A, opts.k)


# -- parameter defaults --------------------------------------------------------


def default_epsilon(A: SymmetricMatrix, k: int, manifold: str = "sphere") -> float:
    """Natural curvature target 2*Rg/(n(k-1)) with Rg bounded by 2n||A||_2."""
    if manifold == "stiefel":
        if A.block_dim is None:
            raise ValueError("stiefel epsilon needs a matrix with block_dim set")
        k_eff = 2.0 * k / (A.block_dim + 1)
    else:
        k_eff = float(k)
    if k_eff <= 1.0:
        raise ValueError("effective rank must exceed 1 for the default epsilon")
    l2 = A.opnorm()
    if l2 == 0.0:
        return 1.0  # zero matrix: any positive target certifies instantly
    return 4.0 * l2 / (k_eff - 1.0)


def worst_case_budget(A: SymmetricMatrix, epsilon: float, mode: str) -> int:
    """Worst-case step budget of the convergence analysis (a loose cap)."""
    n = A.n
    l1 = A.l1_norm()
    if l1 == 0.0:
        return 1
    if mode == MODE_EIGEN_ONLY:
        t = 64e4 * n * l1**2 / epsilon**2
    else:
        l2 = max(A.opnorm(), 1e-300)
        rg_proxy = 2.0 * n * l2
        t_g = 40.0 * l1 * rg_proxy / l2**2
        t_h = 1728.0 * n * l1 / epsilon + 1152.0 * n * l2**2 / epsilon**2
        t = t_g + t_h
    return int(min(math.ceil(t), _BUDGET_CAP))


# -- power method and direction finding ----------------------------------------


def power_method(H, mu_H: float, N_H: int, seed):
    """Shifted power iteration on the Hessian operator.

    Starts from a uniformly random unit tangent and iterates
    u <- Hess[u] + mu_H * u (normalized).  ``N_H = 0`` returns the random
    start itself.  ``seed`` may be an integer or a numpy Generator.
    """
    if N_H < 0:
        raise ValueError("N_H must be nonnegative")
    rng = np.random.default_rng(seed)
    start = H.random_tangent(rng)
    rows = start.rows
    stepped = False
    for _ in range(int(N_H)):
        w = H.apply_rows(rows) + mu_H * rows
        nw = np.linalg.norm(w)
        if nw == 0.0:
            break
        rows = w / nw
        stepped = True
    if not stepped:
        return start
    return type(start)(rows, H.config)


def _power_iteration_count(opts: SolverOptions, n: int, l1: float,
                           epsilon: float, lam_prev: float | None) -> int:
    # the analysis wants C ||A||_1 log n / lam_max; lam_max is replaced by the
    # best available lower bound (previous eigen Rayleigh value, floored at eps)
    lam_ref = max(lam_prev if lam_prev is not None else 0.0, epsilon)
    n_h = int(math.ceil(opts.power_C * l1 * math.log(max(n, 2)) / lam_ref))
    n_h = max(n_h, 1)
    if opts.max_power_iters is not None:
        n_h = min(n_h, int(opts.max_power_iters))
    return n_h


def _eigen_direction(state: _State, geom, opts: SolverOptions, epsilon: float,
                     lam_prev: float | None, rng):
    l1 = geom.A.l1_norm()
    n_h = _power_iteration_count(opts, geom.n, l1, epsilon, lam_prev)
    u = power_method(state.hess, geom.mu_H, n_h, rng)
    if float(np.sum(u.rows * state.grad.rows)) < 0.0:
        u = geom.scale_tangent(u, -1.0)
    lam_h = state.hess.rayleigh(u)
    return u, lam_h


def direction_finding(A: SymmetricMatrix, config, mu_G: float, *,
                      epsilon: float, power_C: float = 8.0,
                      lam_floor: float | None = None, seed=0,
                      max_power_iters: int | None = None):
    """One pass of the search-direction routine.

    Returns ``(u, kind, lam_h)`` with ``u`` a unit tangent: the normalized
    gradient when its norm exceeds ``mu_G`` (kind ``"gradient"``), otherwise
    a power-method direction of near-maximal curvature with
    ``<u, grad f> >= 0`` (kind ``"eigen"``).  ``lam_h`` is the Hessian
    Rayleigh quotient of ``u``; a value at or below the target epsilon on an
    eigen direction signals termination, not an error.
    """
    opts = SolverOptions(k=config.k, power_C=power_C, max_power_iters=max_power_iters)
    geom = (_StiefelGeometry(A, config.k) if isinstance(config, stiefel.StiefelConfig)
            else _SphereGeometry(A, config.k))
    state = geom.evaluate(config)
    rng = np.random.default_rng(seed)
    if state.grad_norm > mu_G:
        u = geom.scale_tangent(state.grad, 1.0 / state.grad_norm)
        return u, "gradient", state.hess.rayleigh(u)
    u, lam_h = _eigen_direction(state, geom, opts, epsilon, lam_floor, rng)
    return u, "eigen", lam_h


# -- single trust-region step ----------------------------------------------------


def rtr_step(A: SymmetricMatrix, config, opts: SolverOptions, *,
             rng=None, lam_prev: float | None = None):
    """One step of the trust-region schedule; returns (next_config, record).

    A zero matrix, or an eigen direction whose curvature is already at or
    below the target, produces no movement (kind ``"none"``).
    """
    opts.validate()
    rng = np.random.default_rng(opts.seed if rng is None else rng)
    geom = _geometry(A, opts)
    l1 = A.l1_norm()
    if l1 == 0.0:
        state = geom.evaluate(config)
        return config, StepRecord(0, "none", 0.0, state.objective, state.grad_norm, 0.0)
    epsilon = opts.epsilon if opts.epsilon is not None else default_epsilon(A, opts.k, opts.manifold)
    state = geom.evaluate(config)
    if opts.mode == MODE_GRADIENT_EIGEN:
        mu_g = A.opnorm()
        if state.grad_norm > mu_g:
            eta = mu_g / (20.0 * l1)
            u = geom.scale_tangent(state.grad, 1.0 / state.grad_norm)
            nxt = geom.retract(config, u, eta)
            after = geom.evaluate(nxt)
            return nxt, StepRecord(0, "gradient", eta, after.objective, after.grad_norm)
    u, lam_h = _eigen_direction(state, geom, opts, epsilon, lam_prev, rng)
    if lam_h <= epsilon:
        return config, StepRecord(0, "none", 0.0, state.objective, state.grad_norm, lam_h)
    if opts.mode == MODE_EIGEN_ONLY:
        eta = lam_h / (100.0 * l1)
    else:
        l2 = A.opnorm()
        eta = min(math.sqrt(lam_h / (216.0 * l1)), lam_h / (12.0 * l2))
    nxt = geom.retract(config, u, eta)
    after = geom.evaluate(nxt)
    return nxt, StepRecord(0, "eigen", eta, after.objective, after.grad_norm, lam_h)


# -- full solves -----------------------------------------------------------------


def solve(A: SymmetricMatrix, opts: SolverOptions, sigma0=None) -> SolveReport:
    """Run the trust-region method until the curvature certificate holds.

    Terminates when the gradient threshold is met (gradient-eigen mode) and a
    power-method certificate reports top curvature at most epsilon twice in a
    row, or when the step budget is exhausted (``converged=False`` then; no
    exception).  Any starting point is admissible; ``sigma0=None`` draws a
    uniformly random one.
    """
    opts.validate()
    geom = _geometry(A, opts)
    rng = np.random.default_rng(opts.seed)
    config = sigma0 if sigma0 is not None else geom.random_point(rng)
    epsilon = opts.epsilon if opts.epsilon is not None else default_epsilon(A, opts.k, opts.manifold)
    l1 = A.l1_norm()
    state = geom.evaluate(config)
    trace = [StepRecord(0, "init", 0.0, state.objective, state.grad_norm)]

    if l1 == 0.0 or geom.tangent_dim() == 0:
        return SolveReport(sigma=config, objective=state.objective, grad_norm=state.grad_norm,
                           curvature_cert=0.0, converged=True, gradient_steps=0, eigen_steps=0,
                           trace=trace, seed=opts.seed, epsilon=epsilon, mode=opts.mode,
                           manifold=geom.manifold, budget=0)

    budget = opts.max_iters if opts.max_iters is not None else worst_case_budget(A, epsilon, opts.mode)
    mu_g = math.inf if opts.mode == MODE_EIGEN_ONLY else A.opnorm()
    l2 = None if opts.mode == MODE_EIGEN_ONLY else A.opnorm()

    t_g = t_h = 0
    lam_prev: float | None = None
    cert = math.nan
    converged = False
    for it in range(1, budget + 1):
        if state.grad_norm > mu_g:
            eta = mu_g / (20.0 * l1)
            u = geom.scale_tangent(state.grad, 1.0 / state.grad_norm)
            config = geom.retract(state.config, u, eta)
            state = geom.evaluate(config)
            t_g += 1
            trace.append(StepRecord(it, "gradient", eta, state.objective, state.grad_norm))
            continue
        u, lam_h = _eigen_direction(state, geom, opts, epsilon, lam_prev, rng)
        if lam_h <= epsilon:
            # the power method fails with small probability; retry once before
            # trusting the certificate
            u2, lam_h2 = _eigen_direction(state, geom, opts, epsilon, lam_prev, rng)
            if lam_h2 <= epsilon:
                cert = max(lam_h, lam_h2)
                converged = True
                break
            u, lam_h = u2, lam_h2
        lam_prev = lam_h
        if opts.mode == MODE_EIGEN_ONLY:
            eta = lam_h / (100.0 * l1)
        else:
            eta = min(math.sqrt(lam_h / (216.0 * l1)), lam_h / (12.0 * l2))
        config = geom.retract(state.config, u, eta)
        state = geom.evaluate(config)
        t_h += 1
        trace.append(StepRecord(it, "eigen", eta, state.objective, state.grad_norm, lam_h))

    if not converged:
        # budget exhausted: measure (but do not certify) the current curvature
        _, cert = _eigen_direction(state, geom, opts, epsilon, lam_prev, rng)

    return SolveReport(sigma=state.config, objective=state.objective, grad_norm=state.grad_norm,
                       curvature_cert=float(cert), converged=converged,
                       gradient_steps=t_g, eigen_steps=t_h, trace=trace, seed=opts.seed,
                       epsilon=epsilon, mode=opts.mode, manifold=geom.manifold, budget=budget)


def projected_gradient_ascent(A: SymmetricMatrix, sigma0, step: float | None = None,
                              iters: int = 1000, *, grad_tol: float | None = None,
                              record_every: int = 1) -> SolveReport:
    """Fixed-step projected gradient ascent baseline.

    Updates sigma <- P_M(sigma + step * grad f(sigma)) with the raw
    (unnormalized) gradient; the objective trace need not be monotone.  The
    default step is 1/(20 ||A||_1).  ``grad_tol`` adds an early exit; the
    report's ``converged`` flag reflects it when given.
    """
    if isinstance(sigma0, stiefel.StiefelConfig):
        geom = _StiefelGeometry(A, sigma0.k)
    else:
        geom = _SphereGeometry(A, sigma0.k)
    l1 = A.l1_norm()
    if step is None:
        step = 1.0 / (20.0 * l1) if l1 > 0.0 else 0.0
    elif step <= 0.0:
        raise ValueError("step must be positive")
    config = sigma0
    state = geom.evaluate(config)
    trace = [StepRecord(0, "init", 0.0, state.objective, state.grad_norm)]
    done = 0
    hit_tol = grad_tol is not None and state.grad_norm <= grad_tol
    for it in range(1, iters + 1):
        if hit_tol or step == 0.0 or state.grad_norm == 0.0:
            break
        config = geom.retract(state.config, state.grad, step)
        state = geom.evaluate(config)
        done = it
        if it % record_every == 0 or it == iters:
            trace.append(StepRecord(it, "pga", step, state.objective, state.grad_norm))
        if grad_tol is not None and state.grad_norm <= grad_tol:
            hit_tol = True
    converged = hit_tol if grad_tol is not None else True
    return SolveReport(sigma=state.config, objective=state.objective, grad_norm=state.grad_norm,
                       curvature_cert=math.nan, converged=converged, gradient_steps=done,
                       eigen_steps=0, trace=trace, seed=-1, epsilon=math.nan, mode="pga",
                       manifold=geom.manifold, budget=iters)
