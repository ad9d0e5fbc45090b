"""Exact system formulas for the energy-efficiency problem.

Holds harvested energy, per-pair rates, total consumed power, energy
efficiency, feasibility checks, the affine lower bound on ln(1 + 1/(x*y))/t
used by the SCA algorithms, and the QoS threshold rule. Rates are kept in
nats throughout; bits-based figures divide by ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ChannelRealization, ScenarioConfig

LN2 = math.log(2.0)

# Open-interval guard for the transformed time variable: theta >= 1 + THETA_GAP.
# The endpoints tau in {0, 1} give zero harvest or zero transmit phase and are
# never optimal.
THETA_GAP = 1e-9


@dataclass
class Allocation:
    """Decision variables: harvesting-time fraction tau and per-pair transmit powers (W)."""

    tau: float
    p: np.ndarray

    @property
    def theta(self) -> float:
        return 1.0 / (1.0 - self.tau)

    @classmethod
    def from_theta(cls, theta: float, p: np.ndarray) -> "Allocation":
        return cls(tau=1.0 - 1.0 / theta, p=np.asarray(p, dtype=float))


@dataclass(frozen=True)
class BoundCoeffs:
    """Coefficients of the affine lower bound on ln(1 + 1/(x*y))/t at an expansion point.

    The bound is const_term - cx*x - cy*y - ct*t; fields hold scalars or
    per-pair vectors depending on what was expanded.
    """

    const_term: np.ndarray
    cx: np.ndarray
    cy: np.ndarray
    ct: np.ndarray
    expansion: tuple

    def __post_init__(self):
        if np.any(self.cx <= 0.0) or np.any(self.cy <= 0.0) or np.any(self.ct <= 0.0):
            raise ValueError("bound coefficients must be strictly positive")


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint deficits of an allocation against the original problem.

    causality_violation[n] is the wattage by which pair n overspends its
    harvested energy; qos_violation[n] is the nats by which its rate misses
    r_bar. Zero everywhere plus tau in [0, 1] means feasible.
    """

    causality_violation: np.ndarray
    qos_violation: np.ndarray
    tau_in_range: bool

    def is_feasible(self, atol: float = 0.0) -> bool:
        return (
            self.tau_in_range
            and bool(np.all(self.causality_violation <= atol))
            and bool(np.all(self.qos_violation <= atol))
        )


def harvested_energy(tau: float, g_n: float, config: ScenarioConfig) -> float:
    """Energy harvested by one Tx over the unit slot: tau * eta * P0 * g_n."""
    return tau * config.eta * config.p0_watt * g_n


def sinr(p: np.ndarray, ch: ChannelRealization) -> np.ndarray:
    """Per-pair SINR for transmit powers p: desired gain over cross interference plus noise."""
    p = np.asarray(p, dtype=float)
    hd = np.diag(ch.h)
    interference = ch.h @ p - hd * p
    return hd * p / (interference + ch.sigma2_watt)


def rates(alloc: Allocation, ch: ChannelRealization) -> np.ndarray:
    """Per-pair throughput (nats per slot): (1 - tau) * ln(1 + SINR)."""
    return (1.0 - alloc.tau) * np.log1p(sinr(alloc.p, ch))


def rate(alloc: Allocation, ch: ChannelRealization, n: int) -> float:
    """Throughput of pair n in nats per slot."""
    return float(rates(alloc, ch)[n])


def total_power(alloc: Allocation, config: ScenarioConfig) -> float:
    """Network power draw: transmit-phase power plus UAV transfer and circuit power."""
    return float(
        (1.0 - alloc.tau) * np.sum(alloc.p)
        + alloc.tau * config.eta * config.p0_watt
        + config.p_cir_watt
    )


def energy_efficiency(
    alloc: Allocation, ch: ChannelRealization, config: ScenarioConfig
) -> float:
    """Energy efficiency in nats per joule: sum rate over total power."""
    return float(np.sum(rates(alloc, ch))) / total_power(alloc, config)


def check_feasible(
    alloc: Allocation,
    ch: ChannelRealization,
    config: ScenarioConfig,
    r_bar: float,
) -> FeasibilityReport:
    """Measure how far an allocation violates energy causality and the QoS floor."""
    budget = alloc.tau * config.eta * config.p0_watt * ch.g
    spent = (1.0 - alloc.tau) * alloc.p
    causality = np.maximum(0.0, spent - budget)
    qos = np.maximum(0.0, r_bar - rates(alloc, ch))
    return FeasibilityReport(
        causality_violation=causality,
        qos_violation=qos,
        tau_in_range=0.0 <= alloc.tau <= 1.0,
    )


def log_bound_coeffs(x_bar, y_bar, t_bar) -> BoundCoeffs:
    """Affine lower bound of f(x, y, t) = ln(1 + 1/(x*y))/t expanded at (x_bar, y_bar, t_bar).

    f is jointly convex on the positive orthant, so its tangent plane

        (2/t̄)ln(1+1/(x̄ȳ)) + 2/(t̄(x̄ȳ+1)) - x/(t̄x̄(x̄ȳ+1)) - y/(t̄ȳ(x̄ȳ+1))
        - t ln(1+1/(x̄ȳ))/t̄²

    minorizes f everywhere and touches it at the expansion point.
    Accepts scalars or broadcastable arrays.
    """
    x_bar = np.asarray(x_bar, dtype=float)
    y_bar = np.asarray(y_bar, dtype=float)
    t_bar = np.asarray(t_bar, dtype=float)
    if np.any(x_bar <= 0.0) or np.any(y_bar <= 0.0) or np.any(t_bar <= 0.0):
        raise ValueError("expansion point must be strictly positive")
    prod = x_bar * y_bar
    log_term = np.log1p(1.0 / prod)
    denom = t_bar * (prod + 1.0)
    return BoundCoeffs(
        const_term=2.0 * log_term / t_bar + 2.0 / denom,
        cx=1.0 / (x_bar * denom),
        cy=1.0 / (y_bar * denom),
        ct=log_term / t_bar**2,
        expansion=(x_bar, y_bar, t_bar),
    )


def surrogate_psi(coeffs: BoundCoeffs, x, y, t):
    """Evaluate the affine lower bound; never exceeds ln(1 + 1/(x*y))/t for positive inputs."""
    return coeffs.const_term - coeffs.cx * np.asarray(x) - coeffs.cy * np.asarray(y) - coeffs.ct * np.asarray(t)


def rates_from_inverse(theta: float, q: np.ndarray, ch: ChannelRealization) -> np.ndarray:
    """Per-pair rate in the transformed variables theta = 1/(1-tau), q_n = 1/p_n."""
    q = np.asarray(q, dtype=float)
    hd = np.diag(ch.h)
    recip = 1.0 / q
    cross = ch.h @ recip - hd * recip
    return np.log1p(hd / (q * cross + q * ch.sigma2_watt)) / theta


def total_power_from_inverse(theta: float, q: np.ndarray, config: ScenarioConfig) -> float:
    """Total power draw in the transformed variables."""
    return float(
        np.sum(1.0 / (theta * np.asarray(q)))
        + (1.0 - 1.0 / theta) * config.eta * config.p0_watt
        + config.p_cir_watt
    )


def pinned_rates(theta: float, ch: ChannelRealization, config: ScenarioConfig) -> np.ndarray:
    """Per-pair rate when every Tx spends its full harvested energy, p_n = (theta-1)*eta*P0*g_n."""
    hd = np.diag(ch.h)
    cross = ch.h @ ch.g - hd * ch.g
    num = (theta - 1.0) * hd * ch.g
    den = (theta - 1.0) * cross + ch.sigma2_watt / (config.eta * config.p0_watt)
    return np.log1p(num / den) / theta


def pinned_allocation(theta: float, ch: ChannelRealization, config: ScenarioConfig) -> Allocation:
    """Allocation with full-harvest powers at a given theta.

    Powers are derived from the allocation's own theta property (theta round
    trips through tau with one rounding) so that p_n / ((theta-1) eta P0 g_n)
    evaluates to exactly one on the reported object.
    """
    tau = 1.0 - 1.0 / theta
    theta_eff = 1.0 / (1.0 - tau)
    p = (theta_eff - 1.0) * config.eta * config.p0_watt * ch.g
    return Allocation(tau=tau, p=p)


def pinned_total_power(theta: float, ch: ChannelRealization, config: ScenarioConfig) -> float:
    """Closed-form power draw at the full-harvest allocation."""
    return float(
        (1.0 - 1.0 / theta) * config.eta * config.p0_watt * (np.sum(ch.g) + 1.0)
        + config.p_cir_watt
    )


def qos_threshold(ch: ChannelRealization, config: ScenarioConfig) -> float:
    """QoS floor in nats: min over pairs of the full-harvest rate at theta_fix, capped.

    The cap is rate_cap_bpshz converted to nats. Taking the minimum over pairs
    keeps the floor attainable by the fixed-time full-harvest allocation.
    """
    floor = float(np.min(pinned_rates(config.theta_fix, ch, config)))
    return min(floor, config.rate_cap_bpshz * LN2)
