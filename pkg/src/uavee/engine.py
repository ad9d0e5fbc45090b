"""Dense log-barrier solver for the per-iteration convex subproblems.

The SCA algorithms emit tiny (dimension <= ~21), smooth, strictly feasible
convex programs at every iteration and need them solved at millisecond
latency. A generic conic solver is overkill for that: this module implements
classic path-following on the log barrier with damped Newton steps,
backtracking line search, Jacobi equilibration of the Newton system and
Levenberg regularization on factorization failure.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

logger = logging.getLogger("uavee.engine")

# Levenberg schedule: start, growth factor, cap. Applied to the equilibrated
# Newton matrix, whose diagonal is ~1.
_REG_START = 1e-10
_REG_GROW = 10.0
_REG_CAP = 1e-2

_MIN_STEP = 1e-16


class InfeasibleStartError(ValueError):
    """The supplied starting point is not strictly feasible."""


class NoFeasiblePointFoundError(RuntimeError):
    """Random search exhausted its tries without a strictly feasible point."""


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class Functional:
    """A smooth scalar function of a vector with analytic gradient and Hessian oracles."""

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ConvexProgram:
    """Minimize `objective` over {z : c_j(z) <= 0 for all j} intersected with an open domain.

    Callers minimizing a concave SCA surrogate negate it first. domain_guard
    marks the open set where all oracles are defined (positive coordinates,
    theta above 1, ...).

    The optional vectorized oracles are pure performance fast paths and must
    agree with the per-constraint Functionals: constraint_values returns all
    constraint values in list order, constraint_jacobian their stacked
    gradients (m x dim), and constraint_hessian_weighted(z, w) the sum of
    w_j * hess(c_j)(z). The solver falls back to the Functionals when they
    are absent.
    """

    dim: int
    objective: Functional
    ineq_constraints: Sequence[Functional]
    domain_guard: Callable[[np.ndarray], bool]
    constraint_values: Callable[[np.ndarray], np.ndarray] | None = None
    constraint_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    constraint_hessian_weighted: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None


@dataclass(frozen=True)
class SolverSettings:
    barrier_mu: float = 10.0
    newton_tol: float = 1e-9
    max_newton_iters: int = 50
    max_outer_iters: int = 40
    line_search_backtrack: float = 0.5
    line_search_slope: float = 1e-4
    duality_gap_tol: float = 1e-7

    def __post_init__(self):
        if not 0.0 < self.line_search_backtrack < 1.0:
            raise ValueError("line_search_backtrack must lie in (0, 1)")
        for name in ("barrier_mu", "newton_tol", "duality_gap_tol", "line_search_slope"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SolveOutcome:
    z_star: np.ndarray
    objective_value: float
    status: SolveStatus
    newton_step_count: int
    wall_time: float
    barrier_t_final: float = 1.0
    outer_objective_trace: list[float] = field(default_factory=list)


def _constraint_vector(prog: ConvexProgram, z: np.ndarray) -> np.ndarray:
    if prog.constraint_values is not None:
        return np.asarray(prog.constraint_values(z), dtype=float)
    return np.array([c.value(z) for c in prog.ineq_constraints], dtype=float)


def _barrier_value(prog: ConvexProgram, z: np.ndarray, inv_t: float) -> float:
    """f(z) + (1/t) * sum -ln(-c_j(z)); +inf outside the strictly feasible region."""
    if not prog.domain_guard(z):
        return np.inf
    c = _constraint_vector(prog, z)
    if not np.all(np.isfinite(c)) or np.any(c >= 0.0):
        return np.inf
    f = prog.objective.value(z)
    if not np.isfinite(f):
        return np.inf
    return f - inv_t * float(np.sum(np.log(-c)))


def _barrier_derivatives(prog: ConvexProgram, z: np.ndarray, inv_t: float):
    """Gradient and Hessian of f + (1/t) * barrier, or None when a constraint
    evaluates to >= 0 here (possible at the rounding floor: the scalar oracle
    and the vectorized fast path round differently)."""
    grad = np.array(prog.objective.grad(z), dtype=float)
    hess = np.array(prog.objective.hess(z), dtype=float)
    if prog.constraint_jacobian is not None and prog.constraint_hessian_weighted is not None:
        v = _constraint_vector(prog, z)
        if not np.all(v < 0.0):
            return None
        jac = prog.constraint_jacobian(z)
        w = inv_t / (-v)
        grad += jac.T @ w
        hess += (jac * (inv_t / (v * v))[:, None]).T @ jac
        hess += prog.constraint_hessian_weighted(z, w)
        return grad, hess
    for con in prog.ineq_constraints:
        v = con.value(z)
        if not v < 0.0:
            return None
        gc = np.asarray(con.grad(z), dtype=float)
        grad += inv_t * gc / (-v)
        hess += inv_t * (np.outer(gc, gc) / (v * v) + con.hess(z) / (-v))
    return grad, hess


def _newton_direction(hess: np.ndarray, grad: np.ndarray):
    """Solve H d = -g with Jacobi equilibration and a Levenberg fallback.

    Returns (direction, ok). ok is False when the regularization cap is hit.
    """
    diag = np.diag(hess)
    top = float(np.max(diag)) if diag.size else 1.0
    scale = 1.0 / np.sqrt(np.maximum(diag, max(top, 1.0) * 1e-300))
    hs = hess * scale[:, None] * scale[None, :]
    gs = grad * scale
    eye = np.eye(hess.shape[0])
    reg = 0.0
    while True:
        try:
            chol = np.linalg.cholesky(hs + reg * eye)
        except np.linalg.LinAlgError:
            reg = _REG_START if reg == 0.0 else reg * _REG_GROW
            if reg > _REG_CAP:
                return None, False
            continue
        y = np.linalg.solve(chol.T, np.linalg.solve(chol, -gs))
        if not np.all(np.isfinite(y)):
            reg = _REG_START if reg == 0.0 else reg * _REG_GROW
            if reg > _REG_CAP:
                return None, False
            continue
        return scale * y, True


def _center(prog: ConvexProgram, z: np.ndarray, inv_t: float, settings: SolverSettings):
    """Damped Newton until the decrement (or gradient norm) meets newton_tol.

    Returns (z, steps_taken, converged, numerically_ok). Stages that stop
    making float-level progress (hair-thin active sets push constraint slacks
    to the rounding floor) end early with converged=False; only an
    unrepairable Newton system reports numerically_ok=False.
    """
    steps = 0
    stalls = 0
    base = _barrier_value(prog, z, inv_t)
    for _ in range(settings.max_newton_iters):
        derivs = _barrier_derivatives(prog, z, inv_t)
        if derivs is None:
            return z, steps, False, True
        grad, hess = derivs
        if np.linalg.norm(grad) <= settings.newton_tol:
            return z, steps, True, True
        direction, ok = _newton_direction(hess, grad)
        if not ok:
            return z, steps, False, False
        # The decrement approximates the remaining value gap; iterate error
        # scales like its square root, so exit well below newton_tol.
        decrement2 = float(-grad @ direction)
        if 0.5 * decrement2 <= 1e-4 * settings.newton_tol:
            return z, steps, True, True

        slope = settings.line_search_slope * float(grad @ direction)
        step = 1.0
        while True:
            trial = z + step * direction
            trial_val = _barrier_value(prog, trial, inv_t)
            if trial_val <= base + step * slope:
                break
            step *= settings.line_search_backtrack
            if step < _MIN_STEP:
                return z, steps, False, True
        achieved = base - trial_val
        z = trial
        base = trial_val
        steps += 1
        if achieved <= 1e-11 * max(1.0, abs(base)):
            stalls += 1
            if stalls >= 2:
                return z, steps, False, True
        else:
            stalls = 0
    return z, steps, False, True


def solve(
    prog: ConvexProgram,
    z0: np.ndarray,
    settings: SolverSettings | None = None,
    t0: float = 1.0,
) -> SolveOutcome:
    """Path-following log-barrier minimization from a strictly feasible start.

    Centers f + (1/t) * barrier for t = t0, t0*mu, ... until the duality gap
    bound m/t drops below duality_gap_tol. Raises InfeasibleStartError when z0
    is not strictly feasible; numerical breakdown is reported via status
    rather than raised so callers can keep partial traces.
    """
    settings = settings or SolverSettings()
    started = time.perf_counter()
    z = np.array(z0, dtype=float)
    if not prog.domain_guard(z):
        raise InfeasibleStartError("starting point violates the domain guard")
    c0 = _constraint_vector(prog, z)
    if np.any(c0 >= 0.0) or not np.all(np.isfinite(c0)):
        raise InfeasibleStartError("starting point is not strictly feasible")

    m = len(prog.ineq_constraints)
    t = max(t0, 1e-12)
    total_steps = 0
    trace: list[float] = []
    status = SolveStatus.MAX_ITERATIONS
    for _ in range(settings.max_outer_iters):
        z, steps, centered, ok = _center(prog, z, 1.0 / t, settings)
        total_steps += steps
        if not ok:
            status = SolveStatus.NUMERICAL_FAILURE
            break
        f_val = float(prog.objective.value(z))
        # Exact centering walks the central path, along which the true
        # objective never increases; allow slack for inexact Newton stops.
        assert not trace or f_val <= trace[-1] + 1e-7 * max(1.0, abs(trace[-1])), (
            "barrier outer loop lost monotonicity"
        )
        trace.append(f_val)
        if m / t < settings.duality_gap_tol:
            status = SolveStatus.OPTIMAL if centered else SolveStatus.MAX_ITERATIONS
            break
        t *= settings.barrier_mu
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "%s",
            json.dumps(
                {
                    "dim": prog.dim,
                    "status": status.value,
                    "newton_steps": total_steps,
                    "barrier_t_final": t,
                    "constraint_values": _constraint_vector(prog, z).tolist(),
                    "outer_objective_trace": trace,
                }
            ),
        )
    return SolveOutcome(
        z_star=z,
        objective_value=float(prog.objective.value(z)),
        status=status,
        newton_step_count=total_steps,
        wall_time=time.perf_counter() - started,
        barrier_t_final=t,
        outer_objective_trace=trace,
    )


def find_feasible(
    constraints: Sequence[Callable[[np.ndarray], float]],
    sampler: Callable[[np.random.Generator, int], np.ndarray | None],
    rng: np.random.Generator,
    max_tries: int = 10000,
) -> np.ndarray:
    """Random-search a strictly feasible point (all constraints < 0).

    sampler(rng, k) proposes the k-th candidate and may return None to skip.
    Raises NoFeasiblePointFoundError after max_tries proposals, which signals
    an (effectively) infeasible constraint set for this realization.
    """
    for k in range(max_tries):
        z = sampler(rng, k)
        if z is None:
            continue
        feasible = True
        for con in constraints:
            v = con(z)
            if not np.isfinite(v) or v >= 0.0:
                feasible = False
                break
        if feasible:
            return np.asarray(z, dtype=float)
    raise NoFeasiblePointFoundError(f"no strictly feasible point in {max_tries} tries")


def _fd_step(z: np.ndarray, rel_step: float) -> np.ndarray:
    return rel_step * np.maximum(np.abs(z), 1e-8)


def _fd_gradient(fn: Callable, z: np.ndarray, rel_step: float) -> np.ndarray:
    h = _fd_step(z, rel_step)
    out = np.empty_like(z)
    for i in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        out[i] = (fn(zp) - fn(zm)) / (2.0 * h[i])
    return out


def _fd_jacobian(fn: Callable, z: np.ndarray, rel_step: float) -> np.ndarray:
    h = _fd_step(z, rel_step)
    cols = []
    for i in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        cols.append((np.asarray(fn(zp)) - np.asarray(fn(zm))) / (2.0 * h[i]))
    return np.stack(cols, axis=1)


def _fd_error(analytic, numeric, column_noise: np.ndarray) -> float:
    """Largest entry mismatch beyond the FD rounding allowance, relative."""
    a = np.asarray(analytic, dtype=float)
    b = np.asarray(numeric, dtype=float)
    excess = np.maximum(np.abs(a - b) - column_noise, 0.0)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    return float(np.max(excess)) / scale

def check_gradients(prog: ConvexProgram, z: np.ndarray, rel_step: float = 1e-6) -> float:
    """Max relative error of all gradient/Hessian oracles against central differences.

    Gradients are differenced from values, Hessians from analytic gradients.
    Each difference column carries a rounding allowance of ~1e3 * eps * scale
    / step that is subtracted before the relative comparison: a central
    difference cannot resolve derivatives below that floor, so near-flat
    directions are not flagged for noise.
    """
    z = np.asarray(z, dtype=float)
    h = _fd_step(z, rel_step)
    eps_safety = 1e3 * np.finfo(float).eps
    worst = 0.0
    for fn in (prog.objective, *prog.ineq_constraints):
        g_analytic = np.asarray(fn.grad(z), dtype=float)
        value_scale = max(1.0, abs(float(fn.value(z))))
        g_noise = eps_safety * value_scale / h
        worst = max(
            worst, _fd_error(g_analytic, _fd_gradient(fn.value, z, rel_step), g_noise)
        )
        grad_scale = max(1.0, float(np.max(np.abs(g_analytic))))
        h_fd = _fd_jacobian(fn.grad, z, rel_step)
        h_noise = eps_safety * grad_scale / np.minimum(h[None, :], h[:, None])
        worst = max(worst, _fd_error(fn.hess(z), 0.5 * (h_fd + h_fd.T), h_noise))
    return worst
