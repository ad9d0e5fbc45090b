"""The three resource-allocation algorithms.

All three ascend a fractional objective by successive convex approximation:
the nonconcave rate terms are replaced by the affine lower bound from
`core.log_bound_coeffs` at the current iterate, and the resulting concave
subproblem is handed to the log-barrier engine (or, for the one-dimensional
harvesting-time search, a golden-section max-min).

  jhtpa  joint harvesting-time and power allocation in (theta, 1/p) space
  opa    power-only allocation at a fixed harvesting time
  oht    harvesting-time-only max-min rate with full-harvest powers
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import THETA_GAP, Allocation, FeasibilityReport
from .engine import (
    ConvexProgram,
    Functional,
    InfeasibleStartError,
    NoFeasiblePointFoundError,
    SolveStatus,
    SolverSettings,
    find_feasible,
    solve,
)
from .scenario import ChannelRealization, ScenarioConfig

ALGORITHM_NAMES = ("jhtpa", "opa", "oht")

# Relative-change floor: treats |phi| below this as zero when testing
# convergence, so degenerate near-zero-EE scenarios still terminate.
PHI_FLOOR = 1e-12

# Constraint scale floor used when the QoS threshold is essentially zero.
_QOS_SCALE_FLOOR = 1e-12

# Initial points must clear the QoS floor by this scaled margin: the SCA
# subproblems re-evaluate the same constraint through the surrogate
# coefficients, whose rounding differs from the direct rate formula by
# ~1e-16, so hair-thin slacks would flip sign between the two forms.
_QOS_FEAS_MARGIN = 1e-13

_SEED_SALT = {"jhtpa": 1, "opa": 2}


@dataclass(frozen=True)
class ScaSettings:
    """Outer-loop controls shared by the three algorithms.

    epsilon is applied as a relative change test on successive objective
    values, |phi_new - phi| <= epsilon * max(|phi_new|, PHI_FLOOR). Trace
    monotonicity does not rest on subsolver accuracy: steps that fail to
    improve the true objective are rejected outright.
    """

    epsilon: float = 1e-2
    max_iterations: int = 100
    max_feasible_tries: int = 10000
    theta_max: float = 1e3
    oht_theta_tol: float = 1e-6
    solver: SolverSettings = field(default_factory=SolverSettings)


@dataclass
class ScaState:
    """One SCA iterate: the current point, fractional objective value, and history."""

    iterate: np.ndarray
    phi: float
    kappa: int = 0
    trace: list[float] = field(default_factory=list)


@dataclass
class SolveReport:
    """Outcome of one algorithm run on one channel realization."""

    algorithm: str
    allocation: Allocation
    ee_nats_per_joule: float
    ee_bits_per_joule: float
    iterations: int
    subsolver_calls: int
    wall_time_ms: float
    feasibility: FeasibilityReport
    trace: list[float]
    status: str
    r_bar: float

    def to_json(self, include_trace: bool = False) -> str:
        data = {
            "algorithm": self.algorithm,
            "tau": self.allocation.tau,
            "p_watt": self.allocation.p.tolist(),
            "ee_nats_per_joule": self.ee_nats_per_joule,
            "ee_bits_per_joule": self.ee_bits_per_joule,
            "iterations": self.iterations,
            "subsolver_calls": self.subsolver_calls,
            "wall_time_ms": self.wall_time_ms,
            "status": self.status,
            "r_bar": self.r_bar,
            "causality_violation": self.feasibility.causality_violation.tolist(),
            "qos_violation": self.feasibility.qos_violation.tolist(),
            "tau_in_range": self.feasibility.tau_in_range,
        }
        if include_trace:
            data["trace"] = list(self.trace)
        return json.dumps(data)


def _converged(phi_new: float, phi_old: float, epsilon: float) -> bool:
    return abs(phi_new - phi_old) <= epsilon * max(abs(phi_new), PHI_FLOOR)


# Monotone extrapolation along the SCA step: candidate amplifications tried in
# order, keeping the last one that still improves the true objective. Low-SINR
# realizations push theta toward saturation and the plain surrogate maximizer
# only multiplies (theta - 1) by ~sqrt(theta/(theta-1)) per iteration, far too
# slow for a 100-iteration budget; the safeguard climbs that ladder
# exponentially while never accepting a worse or infeasible point.
_EXTRAPOLATION_POWERS = tuple(float(2**j) for j in range(1, 11))
_THETA_CAP = 1e6


def _rng_for(config: ScenarioConfig, algorithm: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([config.seed & 0xFFFFFFFFFFFFFFFF, _SEED_SALT[algorithm]])
    )


# ---------------------------------------------------------------------------
# JHTPA: joint harvesting time and power allocation
# ---------------------------------------------------------------------------


def build_jhtpa_subproblem(
    state: ScaState,
    ch: ChannelRealization,
    config: ScenarioConfig,
    r_bar: float,
) -> ConvexProgram:
    """Convex program over z = (theta, q_1..q_N), q_n = 1/p_n, at the current iterate.

    Maximizes the Dinkelbach surplus sum psi_n - phi * linearized-power
    (negated for the minimizing engine) subject to theta > 1, per-pair energy
    causality 1/q_n <= (theta-1)*eta*P0*g_n, and psi_n >= r_bar. psi_n is the
    affine rate bound with x_n = q_n/h_nn, y_n = sum_{i!=n} h_ni/q_i + sigma2,
    t = theta; causality and QoS rows are rescaled to O(1).
    """
    z_bar = np.asarray(state.iterate, dtype=float)
    theta_bar, q_bar = float(z_bar[0]), z_bar[1:]
    n = q_bar.size
    hd = np.diag(ch.h).copy()
    off = ch.h - np.diag(hd)
    s2 = ch.sigma2_watt
    ep = config.eta * config.p0_watt
    cap = ep * ch.g  # causality scale: p_n <= (theta-1) * cap_n

    x_bar = q_bar / hd
    y_bar = off @ (1.0 / q_bar) + s2
    coeffs = core.log_bound_coeffs(x_bar, y_bar, theta_bar)
    a_const, cx, cy, ct = coeffs.const_term, coeffs.cx, coeffs.cy, coeffs.ct

    phi = float(state.phi)
    a_lin = cx / hd  # coefficient of q_n in sum psi
    b_rec = off.T @ cy  # coefficient of 1/q_n in sum psi
    sum_a = float(np.sum(a_const - cy * s2))
    sum_ct = float(np.sum(ct))
    pw_const = (1.0 - 2.0 / theta_bar) * ep + config.p_cir_watt
    pw_lin = ep / theta_bar**2
    f_const = -sum_a + phi * pw_const
    qos_scale = max(r_bar, _QOS_SCALE_FLOOR)
    # Normalize the surplus to O(1): sum rates can sit many decades below one
    # and the engine's absolute tolerances would otherwise fire early.
    inv_obj = 1.0 / max(float(np.sum(core.rates_from_inverse(theta_bar, q_bar, ch))), 1e-300)

    def psi_vec(z: np.ndarray) -> np.ndarray:
        theta, q = z[0], z[1:]
        return a_const - cx * q / hd - cy * (off @ (1.0 / q) + s2) - ct * theta

    def obj_value(z: np.ndarray) -> float:
        theta, q = z[0], z[1:]
        recip = 1.0 / q
        return inv_obj * (
            f_const
            + float(a_lin @ q + b_rec @ recip)
            + sum_ct * theta
            + phi * (float(np.sum(recip)) / theta + pw_lin * theta)
        )

    def obj_grad(z: np.ndarray) -> np.ndarray:
        theta, q = z[0], z[1:]
        recip2 = 1.0 / (q * q)
        out = np.empty(n + 1)
        out[0] = sum_ct + phi * (pw_lin - float(np.sum(1.0 / q)) / theta**2)
        out[1:] = a_lin - b_rec * recip2 - (phi / theta) * recip2
        return inv_obj * out

    def obj_hess(z: np.ndarray) -> np.ndarray:
        theta, q = z[0], z[1:]
        recip = 1.0 / q
        out = np.zeros((n + 1, n + 1))
        out[0, 0] = 2.0 * phi * float(np.sum(recip)) / theta**3
        cross = (phi / theta**2) * recip**2
        out[0, 1:] = cross
        out[1:, 0] = cross
        diag = 2.0 * b_rec * recip**3 + (2.0 * phi / theta) * recip**3
        out[1:, 1:][np.diag_indices(n)] = diag
        return inv_obj * out

    constraints = [
        Functional(
            value=lambda z: (1.0 + THETA_GAP) - z[0],
            grad=lambda z: np.concatenate(([-1.0], np.zeros(n))),
            hess=lambda z: np.zeros((n + 1, n + 1)),
        )
    ]

    def make_causality(idx: int) -> Functional:
        k = cap[idx]

        def value(z):
            return 1.0 / (z[1 + idx] * k) - z[0] + 1.0

        def grad(z):
            out = np.zeros(n + 1)
            out[0] = -1.0
            out[1 + idx] = -1.0 / (z[1 + idx] ** 2 * k)
            return out

        def hess(z):
            out = np.zeros((n + 1, n + 1))
            out[1 + idx, 1 + idx] = 2.0 / (z[1 + idx] ** 3 * k)
            return out

        return Functional(value, grad, hess)

    def make_qos(idx: int) -> Functional:
        row = off[idx]

        def value(z):
            theta, q = z[0], z[1:]
            psi = (
                a_const[idx]
                - cx[idx] * q[idx] / hd[idx]
                - cy[idx] * (row @ (1.0 / q) + s2)
                - ct[idx] * theta
            )
            return (r_bar - psi) / qos_scale

        def grad(z):
            q = z[1:]
            out = np.empty(n + 1)
            out[0] = ct[idx] / qos_scale
            out[1:] = -cy[idx] * row / (q * q) / qos_scale
            out[1 + idx] += cx[idx] / hd[idx] / qos_scale
            return out

        def hess(z):
            q = z[1:]
            out = np.zeros((n + 1, n + 1))
            out[1:, 1:][np.diag_indices(n)] = 2.0 * cy[idx] * row / q**3 / qos_scale
            return out

        return Functional(value, grad, hess)

    constraints.extend(make_causality(i) for i in range(n))
    constraints.extend(make_qos(i) for i in range(n))

    def all_values(z: np.ndarray) -> np.ndarray:
        theta, q = z[0], z[1:]
        caus = 1.0 / (q * cap) - theta + 1.0
        qos = (r_bar - psi_vec(z)) / qos_scale
        return np.concatenate(([(1.0 + THETA_GAP) - theta], caus, qos))

    diag_idx = np.arange(n)

    def all_jacobian(z: np.ndarray) -> np.ndarray:
        q = z[1:]
        recip2 = 1.0 / (q * q)
        jac = np.zeros((2 * n + 1, n + 1))
        jac[0, 0] = -1.0
        jac[1 : n + 1, 0] = -1.0
        jac[1 + diag_idx, 1 + diag_idx] = -recip2 / cap
        jac[n + 1 :, 0] = ct / qos_scale
        jac[n + 1 :, 1:] = -(cy[:, None] * off) * recip2[None, :] / qos_scale
        jac[n + 1 + diag_idx, 1 + diag_idx] += (cx / hd) / qos_scale
        return jac

    def weighted_hessian(z: np.ndarray, w: np.ndarray) -> np.ndarray:
        q = z[1:]
        recip3 = 1.0 / q**3
        out = np.zeros((n + 1, n + 1))
        diag = w[1 : n + 1] * 2.0 * recip3 / cap
        diag += (off.T @ (w[n + 1 :] * cy)) * 2.0 * recip3 / qos_scale
        out[1 + diag_idx, 1 + diag_idx] = diag
        return out

    return ConvexProgram(
        dim=n + 1,
        objective=Functional(obj_value, obj_grad, obj_hess),
        ineq_constraints=constraints,
        domain_guard=lambda z: bool(z[0] > 1.0 and np.all(z[1:] > 0.0) and np.all(np.isfinite(z))),
        constraint_values=all_values,
        constraint_jacobian=all_jacobian,
        constraint_hessian_weighted=weighted_hessian,
    )


def _jhtpa_feasibility_constraints(ch, config, r_bar):
    """Strict-feasibility checks for the transformed joint problem, true rates."""
    cap = config.eta * config.p0_watt * ch.g
    qos_scale = max(r_bar, _QOS_SCALE_FLOOR)

    def theta_guard(z):
        return (1.0 + THETA_GAP) - z[0]

    def causality(z):
        return float(np.max(1.0 / (z[1:] * cap) - z[0] + 1.0))

    def qos(z):
        rates = core.rates_from_inverse(z[0], z[1:], ch)
        return float(np.max(r_bar - rates)) / qos_scale + _QOS_FEAS_MARGIN

    return [theta_guard, causality, qos]


_PROBE_FLOORS = (1e-9, 1e-11, 1e-13)
_PROBE_SCALES = (0.5, 0.1, 0.02)


def _jhtpa_sampler(ch, config, r_bar):
    """Candidate generator for the joint problem's initial random search.

    Structured probes first: several harvesting times around theta_fix with
    powers pulled just inside the causality boundary, backed off in proportion
    to each pair's rate slack. The QoS floor equals the worst pair's
    full-power rate, so feasibility lives in a sliver whose width scales with
    that pair's interference-to-noise fraction; the probe ladder walks the
    boundary offset down to 1e-13 to reach it. Random draws then use an
    independent log-uniform backoff width per pair.
    """
    cap = config.eta * config.p0_watt * ch.g
    n = ch.num_pairs
    thetas = config.theta_fix * np.array([1.0, 1.1, 0.9, 1.25, 0.8, 1.5, 2.0 / 3.0, 2.0, 0.5, 3.0])
    thetas = np.clip(thetas, 1.01, 999.0)
    probes = [(t, s, f) for t in thetas for f in _PROBE_FLOORS for s in _PROBE_SCALES]
    qos_scale = max(r_bar, _QOS_SCALE_FLOOR)

    def sampler(rng: np.random.Generator, k: int):
        if k < len(probes):
            theta, scale, floor = probes[k]
            slack = core.pinned_rates(theta, ch, config) - r_bar
            if np.min(slack) < 0.0:
                return None
            u = 1.0 + np.clip(scale * slack / qos_scale, floor, scale)
        else:
            theta = float(np.exp(rng.uniform(math.log(1.01), math.log(100.0))))
            span = 10.0 ** rng.uniform(-12.0, 6.0, size=n)
            u = np.exp(rng.uniform(np.full(n, 1e-13), np.log1p(span)))
        q = u / ((theta - 1.0) * cap)
        return np.concatenate(([theta], q))

    return sampler


def _jhtpa_objective(z: np.ndarray, ch, config) -> float:
    return float(
        np.sum(core.rates_from_inverse(z[0], z[1:], ch))
    ) / core.total_power_from_inverse(z[0], z[1:], config)


def _pinned_inverse_iterate(ch, config, r_bar):
    """Full-harvest point at theta_fix in inverse-power coordinates, or None.

    Used when random search finds no strict interior: with the QoS floor set
    to the worst pair's full-harvest rate, the feasible set can collapse to
    (a neighborhood of) this boundary point, which satisfies every constraint
    weakly by construction.
    """
    theta = config.theta_fix
    cap = config.eta * config.p0_watt * ch.g
    q = 1.0 / ((theta - 1.0) * cap)
    rates = core.rates_from_inverse(theta, q, ch)
    qos_scale = max(r_bar, _QOS_SCALE_FLOOR)
    if float(np.min(rates - r_bar)) / qos_scale < -1e-9:
        return None
    return np.concatenate(([theta], q))


def _jhtpa_extrapolate(z_bar, z_new, phi_new, ch, config, r_bar):
    """Geometrically extend the harvesting-time step while the true EE improves.

    Candidates scale (theta - 1) by the accepted step's ratio raised to
    doubling powers while holding each pair's position relative to its
    causality bound fixed, i.e. they track the harvest-budget boundary the
    optimizer rides. Every candidate is vetted against the original
    constraints with strict margins, so ascent and feasibility are preserved.
    """
    cap = config.eta * config.p0_watt * ch.g
    qos_scale = max(r_bar, _QOS_SCALE_FLOOR)
    theta_bar = float(z_bar[0])
    theta_new = float(z_new[0])
    ratio_t = (theta_new - 1.0) / (theta_bar - 1.0)
    slack_u = z_new[1:] * (theta_new - 1.0) * cap  # >= 1, distance off the bound
    best_z, best_phi = z_new, phi_new
    for s in _EXTRAPOLATION_POWERS:
        theta_e = 1.0 + (theta_bar - 1.0) * ratio_t**s
        if not np.isfinite(theta_e) or not 1.0 + THETA_GAP < theta_e <= _THETA_CAP:
            break
        q_e = slack_u / ((theta_e - 1.0) * cap)
        if not np.all(np.isfinite(q_e)) or np.any(q_e <= 0.0):
            break
        if np.max(1.0 / (q_e * cap) - theta_e + 1.0) >= -1e-13:
            break
        rates = core.rates_from_inverse(theta_e, q_e, ch)
        if float(np.min(rates - r_bar)) / qos_scale <= _QOS_FEAS_MARGIN:
            break
        phi_e = float(np.sum(rates)) / core.total_power_from_inverse(theta_e, q_e, config)
        if phi_e <= best_phi:
            break
        best_z = np.concatenate(([theta_e], q_e))
        best_phi = phi_e
    return best_z, best_phi


def jhtpa(
    ch: ChannelRealization,
    config: ScenarioConfig,
    settings: ScaSettings | None = None,
    r_bar: float | None = None,
) -> SolveReport:
    """Joint harvesting-time and power allocation (Algorithm-1-style SCA loop).

    Finds a strictly feasible start by random search, then alternates between
    building the surrogate convex program at the current iterate and solving
    it, updating the Dinkelbach multiplier with the true energy efficiency,
    until the relative change drops below epsilon. Each accepted step is
    extended by the monotone extrapolation safeguard. Raises
    NoFeasiblePointFoundError when no feasible start exists for this
    realization's QoS floor.
    """
    settings = settings or ScaSettings()
    started = time.perf_counter()
    if r_bar is None:
        r_bar = core.qos_threshold(ch, config)

    try:
        z = find_feasible(
            _jhtpa_feasibility_constraints(ch, config, r_bar),
            _jhtpa_sampler(ch, config, r_bar),
            _rng_for(config, "jhtpa"),
            settings.max_feasible_tries,
        )
    except NoFeasiblePointFoundError:
        z = _pinned_inverse_iterate(ch, config, r_bar)
        if z is None:
            raise
        # No strict interior to iterate in; the boundary point is the answer.
        state = ScaState(iterate=z, phi=_jhtpa_objective(z, ch, config))
        state.trace = [state.phi]
        alloc = Allocation.from_theta(float(z[0]), 1.0 / z[1:])
        return _finish_report(
            "jhtpa", alloc, ch, config, r_bar, state, "converged", 0, started
        )
    phi = _jhtpa_objective(z, ch, config)
    state = ScaState(iterate=z, phi=phi, trace=[phi])
    status = "max_iterations"
    subsolver_calls = 0
    warm_t = 1.0
    mu2 = settings.solver.barrier_mu**2
    for _ in range(settings.max_iterations):
        prog = build_jhtpa_subproblem(state, ch, config, r_bar)
        if np.any(prog.constraint_values(state.iterate) >= 0.0):
            # The surrogate re-evaluation of a boundary-hugging iterate lost
            # its slack to rounding; no room left to iterate in.
            status = "converged"
            break
        try:
            outcome = solve(prog, state.iterate, settings.solver, t0=warm_t)
        except InfeasibleStartError:
            status = "converged"
            break
        subsolver_calls += 1
        if outcome.status is SolveStatus.NUMERICAL_FAILURE:
            status = "failed"
            break
        phi_step = _jhtpa_objective(outcome.z_star, ch, config)
        z, phi_new = _jhtpa_extrapolate(
            state.iterate, outcome.z_star, phi_step, ch, config, r_bar
        )
        # Extrapolation moves the iterate far off this solve's central path.
        warm_t = 1.0 if phi_new > phi_step else max(1.0, outcome.barrier_t_final / mu2)
        if phi_new < phi:
            # Ascent is guaranteed in exact arithmetic; a non-improving step
            # means the numerical floor is reached. Keep the better iterate.
            status = "converged"
            break
        state = ScaState(
            iterate=z, phi=phi_new, kappa=state.kappa + 1, trace=state.trace + [phi_new]
        )
        if _converged(phi_new, phi, settings.epsilon):
            status = "converged"
            phi = phi_new
            break
        phi = phi_new

    alloc = Allocation.from_theta(float(state.iterate[0]), 1.0 / state.iterate[1:])
    return _finish_report(
        "jhtpa", alloc, ch, config, r_bar, state, status, subsolver_calls, started
    )


# ---------------------------------------------------------------------------
# OPA: power allocation at fixed harvesting time
# ---------------------------------------------------------------------------


def build_opa_subproblem(
    state: ScaState,
    ch: ChannelRealization,
    config: ScenarioConfig,
    r_bar: float,
    theta_fix: float,
) -> ConvexProgram:
    """Convex program over transmit powers p at a fixed harvesting time.

    The rate bound uses x_n = 1/(p_n h_nn), y_n = sum_{i!=n} h_ni p_i + sigma2,
    t = 1, so psi_n bounds ln(1 + SINR_n) and the QoS row reads
    psi_n >= theta_fix * r_bar. state.phi holds the Dinkelbach multiplier in
    the same ln(1 + SINR) units (theta_fix times the energy efficiency).
    """
    p_bar = np.asarray(state.iterate, dtype=float)
    n = p_bar.size
    hd = np.diag(ch.h).copy()
    off = ch.h - np.diag(hd)
    s2 = ch.sigma2_watt
    ep = config.eta * config.p0_watt
    p_max = (theta_fix - 1.0) * ep * ch.g

    x_bar = 1.0 / (p_bar * hd)
    y_bar = off @ p_bar + s2
    coeffs = core.log_bound_coeffs(x_bar, y_bar, 1.0)
    a_const, cx, cy, ct = coeffs.const_term, coeffs.cx, coeffs.cy, coeffs.ct

    lam = float(state.phi)
    b_rec = cx / hd  # coefficient of 1/p_n in sum psi
    a_lin = off.T @ cy + lam / theta_fix  # coefficient of p_n in the negated objective
    f_const = -float(np.sum(a_const - cy * s2 - ct)) + lam * (
        (1.0 - 1.0 / theta_fix) * ep + config.p_cir_watt
    )
    qos_rhs = theta_fix * r_bar
    qos_scale = max(qos_rhs, _QOS_SCALE_FLOOR)
    # Same O(1) normalization as the joint builder (here the rate terms live
    # in ln(1 + SINR) units).
    inv_obj = 1.0 / max(float(np.sum(np.log1p(core.sinr(p_bar, ch)))), 1e-300)

    def psi_vec(p: np.ndarray) -> np.ndarray:
        return a_const - cx / (hd * p) - cy * (off @ p + s2) - ct

    def obj_value(p: np.ndarray) -> float:
        return inv_obj * (f_const + float(a_lin @ p + b_rec @ (1.0 / p)))

    def obj_grad(p: np.ndarray) -> np.ndarray:
        return inv_obj * (a_lin - b_rec / (p * p))

    def obj_hess(p: np.ndarray) -> np.ndarray:
        return np.diag(inv_obj * 2.0 * b_rec / p**3)

    def make_box(idx: int) -> Functional:
        cap = p_max[idx]

        def value(p):
            return p[idx] / cap - 1.0

        def grad(p):
            out = np.zeros(n)
            out[idx] = 1.0 / cap
            return out

        return Functional(value, grad, lambda p: np.zeros((n, n)))

    def make_qos(idx: int) -> Functional:
        row = off[idx]

        def value(p):
            psi = a_const[idx] - cx[idx] / (hd[idx] * p[idx]) - cy[idx] * (row @ p + s2) - ct[idx]
            return (qos_rhs - psi) / qos_scale

        def grad(p):
            out = cy[idx] * row / qos_scale
            out[idx] -= cx[idx] / (hd[idx] * p[idx] ** 2) / qos_scale
            return out

        def hess(p):
            out = np.zeros((n, n))
            out[idx, idx] = 2.0 * cx[idx] / (hd[idx] * p[idx] ** 3) / qos_scale
            return out

        return Functional(value, grad, hess)

    constraints = [make_box(i) for i in range(n)]
    constraints.extend(make_qos(i) for i in range(n))

    def all_values(p: np.ndarray) -> np.ndarray:
        return np.concatenate((p / p_max - 1.0, (qos_rhs - psi_vec(p)) / qos_scale))

    diag_idx = np.arange(n)

    def all_jacobian(p: np.ndarray) -> np.ndarray:
        jac = np.zeros((2 * n, n))
        jac[diag_idx, diag_idx] = 1.0 / p_max
        jac[n:, :] = cy[:, None] * off / qos_scale
        jac[n + diag_idx, diag_idx] -= b_rec / (p * p) / qos_scale
        return jac

    def weighted_hessian(p: np.ndarray, w: np.ndarray) -> np.ndarray:
        out = np.zeros((n, n))
        out[diag_idx, diag_idx] = w[n:] * 2.0 * b_rec / p**3 / qos_scale
        return out

    return ConvexProgram(
        dim=n,
        objective=Functional(obj_value, obj_grad, obj_hess),
        ineq_constraints=constraints,
        domain_guard=lambda p: bool(np.all(p > 0.0) and np.all(np.isfinite(p))),
        constraint_values=all_values,
        constraint_jacobian=all_jacobian,
        constraint_hessian_weighted=weighted_hessian,
    )


def _opa_feasibility_constraints(ch, config, r_bar, theta_fix):
    p_max = (theta_fix - 1.0) * config.eta * config.p0_watt * ch.g
    qos_rhs = theta_fix * r_bar
    qos_scale = max(qos_rhs, _QOS_SCALE_FLOOR)

    def box(p):
        return float(np.max(p / p_max - 1.0))

    def qos(p):
        return float(np.max(qos_rhs - np.log1p(core.sinr(p, ch)))) / qos_scale + _QOS_FEAS_MARGIN

    return [box, qos]


def _opa_sampler(ch, config, r_bar, theta_fix):
    """Boundary-offset probe ladder plus per-pair log-uniform random backoffs.

    Mirrors the joint sampler's geometry: the binding pair must sit within an
    interference-fraction-wide sliver of its full-power boundary, so probe
    offsets go down to 1e-13.
    """
    p_max = (theta_fix - 1.0) * config.eta * config.p0_watt * ch.g
    n = ch.num_pairs
    qos_rhs = theta_fix * r_bar
    qos_scale = max(qos_rhs, _QOS_SCALE_FLOOR)
    slack = np.log1p(core.sinr(p_max, ch)) - qos_rhs
    probes = [(s, f) for f in _PROBE_FLOORS for s in _PROBE_SCALES]

    def sampler(rng: np.random.Generator, k: int):
        if k < len(probes):
            if np.min(slack) < 0.0:
                return None
            s, floor = probes[k]
            u = 1.0 + np.clip(s * slack / qos_scale, floor, s)
        else:
            span = 10.0 ** rng.uniform(-12.0, 6.0, size=n)
            u = np.exp(rng.uniform(np.full(n, 1e-13), np.log1p(span)))
        return p_max / u

    return sampler


def opa(
    ch: ChannelRealization,
    config: ScenarioConfig,
    theta_fix: float | None = None,
    settings: ScaSettings | None = None,
    r_bar: float | None = None,
) -> SolveReport:
    """Power-only SCA at a fixed harvesting time (default config.theta_fix).

    The QoS floor r_bar always comes from the configured theta_fix, so runs
    with an overridden harvesting time still target the same original problem.
    """
    settings = settings or ScaSettings()
    started = time.perf_counter()
    if r_bar is None:
        r_bar = core.qos_threshold(ch, config)
    if theta_fix is None:
        theta_fix = config.theta_fix

    def ln_domain_phi(p_vec: np.ndarray) -> float:
        alloc = Allocation.from_theta(theta_fix, p_vec)
        return float(np.sum(np.log1p(core.sinr(p_vec, ch)))) / core.total_power(alloc, config)

    p_max = (theta_fix - 1.0) * config.eta * config.p0_watt * ch.g
    try:
        p = find_feasible(
            _opa_feasibility_constraints(ch, config, r_bar, theta_fix),
            _opa_sampler(ch, config, r_bar, theta_fix),
            _rng_for(config, "opa"),
            settings.max_feasible_tries,
        )
    except NoFeasiblePointFoundError:
        # Without interference coupling the QoS floor can pin the feasible
        # set to exactly the full-power vertex; answer with it when it is
        # weakly feasible, otherwise the instance is genuinely infeasible.
        qos_gap = theta_fix * r_bar - np.log1p(core.sinr(p_max, ch))
        if float(np.max(qos_gap)) / max(theta_fix * r_bar, _QOS_SCALE_FLOOR) >= 1e-9:
            raise
        state = ScaState(iterate=p_max, phi=ln_domain_phi(p_max))
        state.trace = [state.phi / theta_fix]
        alloc = Allocation.from_theta(theta_fix, p_max)
        return _finish_report(
            "opa", alloc, ch, config, r_bar, state, "converged", 0, started
        )

    lam = ln_domain_phi(p)
    ee = lam / theta_fix
    state = ScaState(iterate=p, phi=lam, trace=[ee])
    status = "max_iterations"
    subsolver_calls = 0
    warm_t = 1.0
    mu2 = settings.solver.barrier_mu**2
    for _ in range(settings.max_iterations):
        prog = build_opa_subproblem(state, ch, config, r_bar, theta_fix)
        if np.any(prog.constraint_values(state.iterate) >= 0.0):
            status = "converged"
            break
        try:
            outcome = solve(prog, state.iterate, settings.solver, t0=warm_t)
        except InfeasibleStartError:
            status = "converged"
            break
        subsolver_calls += 1
        if outcome.status is SolveStatus.NUMERICAL_FAILURE:
            status = "failed"
            break
        p = outcome.z_star
        warm_t = max(1.0, outcome.barrier_t_final / mu2)
        lam_new = ln_domain_phi(p)
        ee_new = lam_new / theta_fix
        if ee_new < ee:
            status = "converged"
            break
        state = ScaState(
            iterate=p, phi=lam_new, kappa=state.kappa + 1, trace=state.trace + [ee_new]
        )
        if _converged(ee_new, ee, settings.epsilon):
            status = "converged"
            ee = ee_new
            break
        ee = ee_new

    alloc = Allocation.from_theta(theta_fix, state.iterate)
    return _finish_report(
        "opa", alloc, ch, config, r_bar, state, status, subsolver_calls, started
    )


# ---------------------------------------------------------------------------
# OHT: harvesting-time-only max-min rate
# ---------------------------------------------------------------------------


def build_oht_surrogate(
    theta_bar: float, ch: ChannelRealization, config: ScenarioConfig
) -> list[Functional]:
    """Per-pair concave surrogates psi_hat_n(theta) of the full-harvest rates.

    Substitutions: x = 1/((theta-1) h_nn g_n),
    y = (theta-1) sum_{i!=n} h_ni g_i + sigma2/(eta P0), t = theta. Each
    functional takes the one-element vector z = [theta].
    """
    hd = np.diag(ch.h).copy()
    off = ch.h - np.diag(hd)
    ep = config.eta * config.p0_watt
    u = hd * ch.g
    w = off @ ch.g
    c_noise = ch.sigma2_watt / ep

    x_bar = 1.0 / ((theta_bar - 1.0) * u)
    y_bar = (theta_bar - 1.0) * w + c_noise
    coeffs = core.log_bound_coeffs(x_bar, y_bar, theta_bar)
    a_const, cx, cy, ct = coeffs.const_term, coeffs.cx, coeffs.cy, coeffs.ct

    def make(idx: int) -> Functional:
        def value(z):
            t = z[0]
            return float(
                a_const[idx]
                - cx[idx] / ((t - 1.0) * u[idx])
                - cy[idx] * ((t - 1.0) * w[idx] + c_noise)
                - ct[idx] * t
            )

        def grad(z):
            t = z[0]
            return np.array(
                [cx[idx] / ((t - 1.0) ** 2 * u[idx]) - cy[idx] * w[idx] - ct[idx]]
            )

        def hess(z):
            t = z[0]
            return np.array([[-2.0 * cx[idx] / ((t - 1.0) ** 3 * u[idx])]])

        return Functional(value, grad, hess)

    return [make(i) for i in range(ch.num_pairs)]


def _oht_surrogate_min(theta_bar, ch, config):
    """Vectorized min_n psi_hat_n(theta) for the golden-section search."""
    hd = np.diag(ch.h).copy()
    off = ch.h - np.diag(hd)
    ep = config.eta * config.p0_watt
    u = hd * ch.g
    w = off @ ch.g
    c_noise = ch.sigma2_watt / ep
    x_bar = 1.0 / ((theta_bar - 1.0) * u)
    y_bar = (theta_bar - 1.0) * w + c_noise
    coeffs = core.log_bound_coeffs(x_bar, y_bar, theta_bar)

    def fn(theta: float) -> float:
        x = 1.0 / ((theta - 1.0) * u)
        y = (theta - 1.0) * w + c_noise
        return float(np.min(core.surrogate_psi(coeffs, x, y, theta)))

    return fn


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section maximum of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol * max(1.0, abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def oht(
    ch: ChannelRealization,
    config: ScenarioConfig,
    settings: ScaSettings | None = None,
    r_bar: float | None = None,
) -> SolveReport:
    """Harvesting-time-only max-min rate with powers pinned to the harvest budget.

    SCA on the scalar theta: each iteration maximizes min_n psi_hat_n by
    golden-section search, starting from theta_fix so the final allocation
    never drops below the QoS floor derived there. The trace records the
    max-min objective (nats per slot), which is the quantity this algorithm
    ascends; the reported EE uses the closed-form full-harvest power draw.
    """
    settings = settings or ScaSettings()
    started = time.perf_counter()
    if r_bar is None:
        r_bar = core.qos_threshold(ch, config)

    theta = float(config.theta_fix)
    obj = float(np.min(core.pinned_rates(theta, ch, config)))
    trace = [obj]
    status = "max_iterations"
    iterations = 0
    lo, hi = 1.0 + THETA_GAP, settings.theta_max

    def min_rate(t: float) -> float:
        return float(np.min(core.pinned_rates(t, ch, config)))

    for _ in range(settings.max_iterations):
        fn = _oht_surrogate_min(theta, ch, config)
        theta_new = _golden_max(fn, lo, hi)
        obj_new = min_rate(theta_new)
        # Monotone extrapolation on the true max-min objective: saturating
        # realizations push theta to the search bound, which the surrogate
        # maximizer alone approaches too slowly.
        ratio = (theta_new - 1.0) / (theta - 1.0)
        if ratio != 1.0:
            for s in _EXTRAPOLATION_POWERS:
                theta_e = min(1.0 + (theta - 1.0) * ratio**s, hi)
                obj_e = min_rate(theta_e)
                if obj_e <= obj_new:
                    break
                theta_new, obj_new = theta_e, obj_e
                if theta_new >= hi:
                    break
        iterations += 1
        trace.append(obj_new)
        moved = abs(theta_new - theta) > settings.oht_theta_tol * max(1.0, abs(theta_new))
        theta, prev_obj = theta_new, obj
        obj = obj_new
        if _converged(obj_new, prev_obj, settings.epsilon) and not moved:
            status = "converged"
            break

    alloc = core.pinned_allocation(theta, ch, config)
    ee = float(np.sum(core.pinned_rates(theta, ch, config))) / core.pinned_total_power(
        theta, ch, config
    )
    state = ScaState(iterate=np.array([theta]), phi=obj, kappa=iterations, trace=trace)
    return _finish_report(
        "oht",
        alloc,
        ch,
        config,
        r_bar,
        state,
        status,
        iterations,
        started,
        ee_override=ee,
    )


# ---------------------------------------------------------------------------
# shared reporting
# ---------------------------------------------------------------------------


def _finish_report(
    algorithm: str,
    alloc: Allocation,
    ch: ChannelRealization,
    config: ScenarioConfig,
    r_bar: float,
    state: ScaState,
    status: str,
    subsolver_calls: int,
    started: float,
    ee_override: float | None = None,
) -> SolveReport:
    ee = ee_override if ee_override is not None else core.energy_efficiency(alloc, ch, config)
    return SolveReport(
        algorithm=algorithm,
        allocation=alloc,
        ee_nats_per_joule=ee,
        ee_bits_per_joule=ee / core.LN2,
        iterations=state.kappa,
        subsolver_calls=subsolver_calls,
        wall_time_ms=(time.perf_counter() - started) * 1e3,
        feasibility=core.check_feasible(alloc, ch, config, r_bar),
        trace=list(state.trace),
        status=status,
        r_bar=r_bar,
    )


def run_algorithm(
    name: str,
    ch: ChannelRealization,
    config: ScenarioConfig,
    settings: ScaSettings | None = None,
) -> SolveReport:
    """Dispatch one of jhtpa / opa / oht by name."""
    if name == "jhtpa":
        return jhtpa(ch, config, settings)
    if name == "opa":
        return opa(ch, config, settings=settings)
    if name == "oht":
        return oht(ch, config, settings)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHM_NAMES}")
