"""Independent brute-force oracles the tests check the algorithms against.

Everything here recomputes the physics from first principles with plain
numpy grids; none of it calls into the solver or the SCA loops.
"""

import numpy as np


def grid_ee_n1(ch, config, r_bar, tau_points=500, p_points=500):
    """Max energy efficiency of a single-pair network on a (tau, p) grid.

    tau is swept linearly over (0, 1); for each tau the power axis is
    log-spaced up to the energy-causality cap, so causality holds by
    construction and only the QoS floor filters points.
    """
    h = float(ch.h[0, 0])
    g = float(ch.g[0])
    s2 = ch.sigma2_watt
    ep = config.eta * config.p0_watt
    best = -np.inf
    for tau in np.linspace(1e-3, 1.0 - 1e-3, tau_points):
        p = (tau * ep * g / (1.0 - tau)) * np.logspace(-6.0, 0.0, p_points)
        rates = (1.0 - tau) * np.log1p(p * h / s2)
        power = (1.0 - tau) * p + tau * ep + config.p_cir_watt
        feasible = rates >= r_bar
        if np.any(feasible):
            best = max(best, float(np.max(rates[feasible] / power[feasible])))
    return best


def grid_opa_ee_n1(ch, config, r_bar, points=10**5):
    """Max EE of the fixed-time single-pair power allocation on a log grid."""
    theta = config.theta_fix
    h = float(ch.h[0, 0])
    g = float(ch.g[0])
    s2 = ch.sigma2_watt
    ep = config.eta * config.p0_watt
    p = ((theta - 1.0) * ep * g) * np.logspace(-6.0, 0.0, points)
    ln_sinr = np.log1p(p * h / s2)
    rates = ln_sinr / theta
    power = p / theta + (1.0 - 1.0 / theta) * ep + config.p_cir_watt
    feasible = ln_sinr >= theta * r_bar
    if not np.any(feasible):
        return -np.inf
    return float(np.max(rates[feasible] / power[feasible]))


def grid_oht_theta(ch, config, points=10**6, theta_max=1e3, chunks=20):
    """Argmax of the full-harvest max-min rate over a linear theta grid."""
    hd = np.diag(ch.h)
    off = ch.h - np.diag(hd)
    cross = off @ ch.g
    c_noise = ch.sigma2_watt / (config.eta * config.p0_watt)
    desired = hd * ch.g
    best_val, best_theta = -np.inf, None
    for chunk in np.array_split(np.linspace(1.0 + 1e-6, theta_max, points), chunks):
        tm1 = chunk[:, None] - 1.0
        rates = np.log1p(tm1 * desired[None, :] / (tm1 * cross[None, :] + c_noise))
        vals = np.min(rates, axis=1) / chunk
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_theta = float(vals[i]), float(chunk[i])
    return best_theta, best_val


def pinned_rates_direct(theta, ch, config):
    """Loop-and-scalar evaluation of the full-harvest per-pair rates."""
    n = ch.num_pairs
    ep = config.eta * config.p0_watt
    out = np.empty(n)
    for k in range(n):
        interference = sum(
            ch.h[k, i] * ch.g[i] for i in range(n) if i != k
        )
        num = (theta - 1.0) * ch.h[k, k] * ch.g[k]
        den = (theta - 1.0) * interference + ch.sigma2_watt / ep
        out[k] = np.log1p(num / den) / theta
    return out
