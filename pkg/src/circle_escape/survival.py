"""Long-time survival constants P_inf = lim t * mu(orbits alive at time t).

For two holes of width delta at angular separation theta,

    P_inf = 1/(8 pi) sum_{n <= 2 pi/delta} n (phi(n) - mu(n))
                     [g(2 pi/n - theta'_n - delta) + g(theta'_n - delta)]

with g(x) = x^2 for x > 0 and 0 otherwise, theta'_n = theta mod 2 pi/n.
Each n contributes the ring of periodic orbits of period n; the bracket is
the squared length of the arcs their hole images leave uncovered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arithmetic import tables_up_to
from .billiard import TWO_PI, HoleConfiguration
from .errors import AccuracyError, DomainError


@dataclass(frozen=True)
class SurvivalConstant:
    value: float
    terms_used: int
    config: HoleConfiguration

    def __float__(self) -> float:
        return self.value


def g(x):
    """x^2 for x > 0, else 0."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x * x, 0.0)


def theta_reduced(n, theta: float, rational: tuple[int, int] | None = None):
    """theta' = (2 pi/n) frac(n theta / 2 pi), exactly when (r, q) is given."""
    n = np.asarray(n, dtype=np.int64)
    if rational is not None:
        r, q = rational
        frac = np.mod(n * r, q) / q
    else:
        frac = np.mod(n * (theta / TWO_PI), 1.0)
    return (TWO_PI / n) * frac


def _cutoff(delta: float) -> int:
    return int(math.floor(TWO_PI / delta))


def p_infinity_two_holes(
    theta: float, delta: float, rational: tuple[int, int] | None = None
) -> SurvivalConstant:
    """Survival constant for holes [0, delta) and [theta, theta + delta).

    ``theta = 0`` gives the one-hole case. ``rational = (r, q)`` asserts
    theta = 2 pi r/q and switches theta' to exact integer arithmetic.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if rational is not None:
        config = HoleConfiguration.rational_angle(delta, *rational)
        theta = config.theta
        rational = config.rational
    else:
        config = HoleConfiguration.two_holes(delta, theta)
        theta = config.theta
    n_max = _cutoff(delta)
    if n_max < 1:
        return SurvivalConstant(0.0, n_max, config)
    tab = tables_up_to(n_max)
    n = np.arange(1, n_max + 1, dtype=np.int64)
    weight = n * (tab.phi[1 : n_max + 1] - tab.mu[1 : n_max + 1])
    tp = theta_reduced(n, theta, rational)
    arc = TWO_PI / n
    bracket = g(arc - tp - delta) + g(tp - delta)
    value = float(np.sum(weight * bracket)) / (8 * math.pi)
    return SurvivalConstant(value, n_max, config)


def p_infinity_one_hole(delta: float) -> SurvivalConstant:
    return p_infinity_two_holes(0.0, delta, rational=(0, 1))


def q_hole_terms(q: int, n: np.ndarray) -> np.ndarray:
    """Grouped-sum weights: n (phi(n) - mu(n)) q / gcd(n, q)."""
    tab = tables_up_to(int(n.max()))
    qt = q // np.gcd(n, q)
    return n * (tab.phi[n] - tab.mu[n]) * qt


def p_infinity_q_holes(q: int, delta: float) -> SurvivalConstant:
    """Survival constant for q equal holes spaced 2 pi/q apart.

    Evaluated from the per-n sum and cross-checked against the regrouped
    sum over n~ = n/gcd(n, q), 1/(8 pi) sum n~ phi(n~) q^2 g(2 pi/(n~ q) - delta).
    """
    if q < 2:
        raise DomainError("q-hole configuration needs q >= 2")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    config = HoleConfiguration.equal_holes(delta, q)
    n_max = _cutoff(delta)
    if n_max < 1:
        return SurvivalConstant(0.0, n_max, config)
    tab = tables_up_to(n_max)
    n = np.arange(1, n_max + 1, dtype=np.int64)
    weight = n * (tab.phi[1 : n_max + 1] - tab.mu[1 : n_max + 1])
    qt = q // np.gcd(n, q)
    value = float(np.sum(weight * qt * g(TWO_PI / (n * qt) - delta))) / (8 * math.pi)

    value_grouped = _q_holes_grouped(q, delta)
    if not math.isclose(value, value_grouped, rel_tol=1e-12, abs_tol=1e-12):
        raise AccuracyError(
            f"q-hole sums disagree: {value!r} vs regrouped {value_grouped!r} (q={q}, delta={delta})"
        )
    return SurvivalConstant(value, n_max, config)


def _q_holes_grouped(q: int, delta: float) -> float:
    m_max = int(math.floor(TWO_PI / (q * delta)))
    if m_max < 1:
        return 0.0
    tab = tables_up_to(m_max)
    m = np.arange(1, m_max + 1, dtype=np.int64)
    return float(np.sum(m * tab.phi[1 : m_max + 1] * q * q * g(TWO_PI / (m * q) - delta))) / (
        8 * math.pi
    )


def p_infinity(holes: HoleConfiguration) -> SurvivalConstant:
    """Dispatch on a hole configuration."""
    if holes.num_equal_holes is not None:
        return p_infinity_q_holes(holes.num_equal_holes, holes.delta)
    return p_infinity_two_holes(holes.theta, holes.delta, holes.rational)
