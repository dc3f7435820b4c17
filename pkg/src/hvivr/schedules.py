"""Tikhonov and step-size sequences, plus sharpness-based diagnostics.

Choosing ``theta``: one iteration of the Euclidean method costs on average
``theta |A| + 2`` component evaluations, and minimising the resulting
oracle complexity ``max(1/(sqrt(theta) eps), eps^(-1/delta)) (theta |A| + 2)``
gives ``theta = 2 / |A|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ConfigError


@dataclass(frozen=True)
class ScheduleParams:
    """Algorithm constants and the user-asserted sharpness data ``(kappa, rho, ||p*||)``.

    Ranges are checked by :func:`validate_schedule`, not at construction,
    so out-of-range values can still be inspected.
    """

    theta: float = 0.1
    alpha: float = 0.9
    gamma: float = 0.5
    delta: float = 0.1
    a: float = 1.0
    b: float = 1.0
    K: int = 10
    rho: float = 1.5
    kappa: float = 1.0
    p_norm: float = 0.0

    @property
    def rho_star(self) -> float:
        return self.rho / (self.rho - 1.0)


def beta_euclid(k: int, a: float = 1.0, b: float = 1.0, delta: float = 0.1) -> float:
    """``a / (k + b)^delta``."""
    if k < 0:
        raise ConfigError("iteration counter must be >= 0")
    return a * (k + b) ** (-delta)


def beta_bregman(s: int, K: int, delta: float = 0.1) -> float:
    """``1 / (K (s + 1))^delta``."""
    if s < 0 or K < 1:
        raise ConfigError("need s >= 0 and K >= 1")
    return (K * (s + 1.0)) ** (-delta)


def tau_euclid(lipschitz: float, theta: float, gamma: float = 0.5) -> float:
    """``gamma sqrt(theta) / L``; ``gamma = 1/2`` gives the default ``sqrt(theta) / (2 L)``."""
    if lipschitz <= 0:
        raise ConfigError("Lipschitz bound must be positive")
    return gamma * math.sqrt(theta) / lipschitz


def tau_bregman(lipschitz: float, alpha: float) -> float:
    """``sqrt(1 - alpha) / (2 L)``."""
    if lipschitz <= 0:
        raise ConfigError("Lipschitz bound must be positive")
    if not 0.0 <= alpha < 1.0:
        raise ConfigError(f"alpha must lie in [0, 1) for a positive step, got {alpha}")
    return math.sqrt(1.0 - alpha) / (2.0 * lipschitz)


def validate_schedule(params: ScheduleParams) -> list:
    """List of human-readable violations; empty means the schedule is admissible.

    For ``beta_k = a/(k+b)^delta`` and constant steps, the summability
    condition ``sum tau beta_k^(rho/(rho-1)) < inf`` holds iff
    ``delta > 1 - 1/rho``, so one check covers both.
    """
    p = params
    out = []
    if not 0.0 < p.theta <= 1.0:
        out.append("theta not in (0, 1]")
    if not 0.0 < p.alpha <= 1.0:
        out.append("alpha not in (0, 1]")
    if not 0.0 < p.gamma < 1.0:
        out.append("gamma not in (0, 1)")
    if not 0.0 < p.delta < 0.5:
        out.append("delta not in (0, 1/2)")
    if p.a <= 0 or p.b <= 0:
        out.append("a and b must be positive")
    if p.K < 1:
        out.append("K must be >= 1")
    if not 1.0 < p.rho < 2.0:
        out.append("rho not in (1, 2)")
    elif p.delta <= 1.0 - 1.0 / p.rho:
        out.append("delta <= 1 - 1/rho (step-regularisation summability fails)")
    if p.kappa <= 0:
        out.append("kappa must be positive")
    return out


def h_bar_bound(params: ScheduleParams) -> float:
    """Closed-form bound on ``sum_k h_k`` for the polynomial Tikhonov sequence.

    ``C_rho [a^r b^(-r delta) + a^r b^(1 - r delta) / (delta r - 1)]`` with
    ``r = rho*`` and ``C_rho = ||p*||^r kappa^(-1/(rho-1)) / r``.
    """
    p = params
    r = p.rho_star
    if p.delta * r <= 1.0:
        raise ConfigError("h_bar_bound needs delta * rho_star > 1")
    c_rho = p.p_norm**r * p.kappa ** (-1.0 / (p.rho - 1.0)) / r
    ar = p.a**r
    return c_rho * (ar * p.b ** (-r * p.delta) + ar * p.b ** (1.0 - r * p.delta) / (p.delta * r - 1.0))
