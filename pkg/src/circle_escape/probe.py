"""Fluctuations of the exact survival constant around its residue expansion.

After the real-pole terms are removed, what is left of P_inf(Delta) is a sum
over zeta zeros rho of terms proportional to Delta^(1 - rho). If every zero
has real part 1/2 the residual envelope scales as Delta^(1/2). This module
measures that exponent on a grid and counts the oscillations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import mellin
from .errors import DegenerateFitError, DomainError
from .survival import p_infinity_one_hole, p_infinity_q_holes, p_infinity_two_holes

GRID_MIN, GRID_MAX = 1e-5, 1e-1
WINDOWS_PER_DECADE = 4


@dataclass(frozen=True)
class EnvelopeFit:
    exponent: float
    half_width: float
    window_deltas: np.ndarray
    window_maxima: np.ndarray


@dataclass(frozen=True)
class FluctuationSeries:
    """Detrended residuals on a decreasing Delta grid with their envelope fit."""

    deltas: np.ndarray
    residuals: np.ndarray
    envelope_exponent: float
    exponent_half_width: float
    window_deltas: np.ndarray
    window_maxima: np.ndarray
    sign_changes: int
    label: str = ""

    @property
    def decades(self) -> float:
        return math.log10(self.deltas[0] / self.deltas[-1])

    def sign_changes_per_decade(self) -> float:
        return self.sign_changes / self.decades

    def decade_maxima(self) -> np.ndarray:
        """max |residual| over each full decade, starting from the largest Delta."""
        top = math.log10(self.deltas[0])
        idx = np.floor((top - np.log10(self.deltas)) + 1e-12).astype(int)
        n = int(math.floor(self.decades + 1e-9))
        return np.array([np.max(np.abs(self.residuals[idx == k])) for k in range(n)])


def _prepare_grid(delta_grid) -> np.ndarray:
    d = np.asarray(delta_grid, dtype=float).ravel()
    if d.size < 2:
        raise DomainError("grid needs at least two points")
    if np.any(d < GRID_MIN * (1 - 1e-12)) or np.any(d > GRID_MAX * (1 + 1e-12)):
        raise DomainError(f"grid must lie within [{GRID_MIN:g}, {GRID_MAX:g}]")
    d = np.unique(d)[::-1]
    return d


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` log-spaced points from hi down to lo."""
    return np.logspace(math.log10(hi), math.log10(lo), count)


def envelope_fit(deltas, residuals, windows_per_decade: int = WINDOWS_PER_DECADE) -> EnvelopeFit:
    """Slope of log|residual| maxima against log Delta.

    The grid is cut into windows of 1/windows_per_decade decades; each window
    contributes its largest |residual| at the Delta where it occurs. The
    half-width is the 95% t-interval of the least-squares slope.
    """
    d = np.asarray(deltas, dtype=float)
    r = np.abs(np.asarray(residuals, dtype=float))
    if not np.all(np.isfinite(r)):
        raise DegenerateFitError("residuals contain non-finite values")
    if np.all(r == 0):
        raise DegenerateFitError("all residuals vanish; grid too coarse to see fluctuations")
    top = math.log10(d.max())
    win = np.floor((top - np.log10(d)) * windows_per_decade + 1e-9).astype(int)
    xs, ys = [], []
    for w in np.unique(win):
        sel = (win == w) & (r > 0)
        if np.count_nonzero(win == w) < 2 or not np.any(sel):
            continue
        i = np.flatnonzero(sel)[np.argmax(r[sel])]
        xs.append(d[i])
        ys.append(r[i])
    if len(xs) < 3:
        raise DegenerateFitError("fewer than three windows with non-zero residual")
    fit = stats.linregress(np.log(xs), np.log(ys))
    t = stats.t.ppf(0.975, len(xs) - 2)
    return EnvelopeFit(float(fit.slope), float(t * fit.stderr), np.array(xs), np.array(ys))


def count_sign_changes(values) -> int:
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _series(deltas, residuals, label) -> FluctuationSeries:
    if not np.all(np.isfinite(residuals)):
        raise DegenerateFitError("non-finite residuals")
    fit = envelope_fit(deltas, residuals)
    return FluctuationSeries(
        deltas=deltas,
        residuals=residuals,
        envelope_exponent=fit.exponent,
        exponent_half_width=fit.half_width,
        window_deltas=fit.window_deltas,
        window_maxima=fit.window_maxima,
        sign_changes=count_sign_changes(residuals),
        label=label,
    )


def _exact_two_holes(r: int, q: int, deltas: np.ndarray) -> np.ndarray:
    theta = 2 * math.pi * (r % q) / q if q > 1 else 0.0
    rational = (r % q, q) if q > 1 else (0, 1)
    return np.array([p_infinity_two_holes(theta, d, rational=rational).value for d in deltas])


def fluctuation(
    q: int,
    r: int,
    delta_grid,
    real_pole_cutoff: int = 3,
    zero_count: int = 0,
) -> FluctuationSeries:
    """P_inf(2 pi r/q, Delta) minus its expansion over real and log-periodic poles.

    With ``zero_count`` > 0 the first critical-line pole pairs are removed too.
    """
    if q not in mellin.TABLE_MODULI:
        raise DomainError(f"q must be one of {mellin.TABLE_MODULI}")
    if q > 1 and math.gcd(r, q) != 1:
        raise DomainError("need gcd(r, q) = 1")
    d = _prepare_grid(delta_grid)
    expansion = mellin.asymptotic_expansion(mellin.model_for(r, q), real_pole_cutoff, zero_count)
    resid = _exact_two_holes(r, q, d) - expansion.evaluate(d)
    return _series(d, resid, f"fluctuation q={q} r={r}")


def comparator_one_two(delta_grid, real_pole_cutoff: int = 3, zero_count: int = 0) -> FluctuationSeries:
    """D = P_inf(0, Delta) - 2 P_inf(pi, Delta), detrended by both expansions."""
    d = _prepare_grid(delta_grid)
    e1 = mellin.asymptotic_expansion(mellin.table_model(1), real_pole_cutoff, zero_count)
    e2 = mellin.asymptotic_expansion(mellin.table_model(2), real_pole_cutoff, zero_count)
    p1 = _exact_two_holes(0, 1, d)
    p2 = _exact_two_holes(1, 2, d)
    resid = (p1 - 2.0 * p2) - (e1.evaluate(d) - 2.0 * e2.evaluate(d))
    return _series(d, resid, "one hole vs two opposite holes")


def q_hole_comparator(q: int, delta_grid, real_pole_cutoff: int = 3, zero_count: int = 0) -> FluctuationSeries:
    """P_inf(one hole) - q P_q, detrended by the one-hole and q-hole expansions.

    For q = 2 this is the one-vs-two comparator computed through the q-hole sums.
    """
    if q not in (2, 3, 4, 6):
        raise DomainError("q must be one of (2, 3, 4, 6)")
    d = _prepare_grid(delta_grid)
    e1 = mellin.asymptotic_expansion(mellin.table_model(1), real_pole_cutoff, zero_count)
    eq = mellin.asymptotic_expansion(mellin.q_hole_model(q), real_pole_cutoff, zero_count)
    p1 = np.array([p_infinity_one_hole(x).value for x in d])
    pq = np.array([p_infinity_q_holes(q, x).value for x in d])
    resid = (p1 - q * pq) - (e1.evaluate(d) - q * eq.evaluate(d))
    return _series(d, resid, f"one hole vs {q} equal holes")
