"""Mellin transforms of the survival constant and its small-hole expansion.

The transform P~(s) = int_0^inf P_inf(Delta) Delta^(s-1) dDelta is known in
closed form for rational hole separations 2 pi r/q. Each pole s_k of P~
contributes Res[P~(s) Delta^(-s), s_k] to P_inf(Delta), so residues give the
asymptotic expansion as Delta -> 0:

* s = 1 gives the leading 1/Delta term,
* s = -1, -2 and the trivial zeros of zeta(s + 1) give regular corrections,
* zeros of zeta(s + 1) on Re s = -1/2 give Delta^(1/2) oscillations,
* for q in {3, 4, 6} the factors (p^(s+1) - 1), p | q, add log-periodic
  poles at s = -1 + 2 pi i k / log p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from . import zeta as zl
from .arithmetic import character_table, prime_factors, tables_up_to
from .billiard import TWO_PI
from .errors import AccuracyError, DomainError, PoleError
from .survival import p_infinity_q_holes, p_infinity_two_holes, theta_reduced

TABLE_MODULI = (1, 2, 3, 4, 6)
POLE_TOL = 1e-6


def _as_array(s):
    arr = np.asarray(s, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def _pow(base: float, s: np.ndarray) -> np.ndarray:
    return np.exp(s * math.log(base))


def _check_poles(s: np.ndarray, denominators: list[np.ndarray]):
    for p in (1.0, 0.0, -1.0, -2.0):
        if np.any(np.abs(s - p) < POLE_TOL):
            raise PoleError(f"transform evaluated within {POLE_TOL:g} of s = {p:g}")
    for d in denominators:
        if np.any(np.abs(d) < POLE_TOL):
            idx = int(np.argmin(np.abs(d)))
            raise PoleError(f"transform evaluated near a pole at s = {s[idx]}")


def p_tilde_closed(q: int, s):
    """Closed-form transform for two holes at angle 2 pi/q, q in {1, 2, 3, 4, 6}.

    q = 1 is the single hole (r = 0).
    """
    if q not in TABLE_MODULI:
        raise DomainError(f"closed form only for q in {TABLE_MODULI}, got {q}")
    s, scalar = _as_array(s)
    z = zl.riemann_zeta(s)
    z1 = zl.riemann_zeta(s + 1)
    cubic = s * (s + 1) * (s + 2)
    pi = math.pi
    if q == 1:
        dens = [z1]
        out = _pow(2 * pi, s + 1) * (z - 1) / (2 * cubic * z1)
    elif q == 2:
        dens = [z1]
        out = _pow(pi, s + 1) * z / (cubic * z1)
    elif q == 3:
        d3 = _pow(3, s + 1) - 1
        dens = [z1, d3]
        num = _pow(3, s) * (7 * z + _pow(2, s + 2) * (z - 1) + 2) - z * (_pow(2, s + 2) + 1)
        out = _pow(2 * pi / 3, s + 1) * num / (2 * cubic * d3 * z1)
    elif q == 4:
        d2 = _pow(2, s + 1) - 1
        dens = [z1, d2]
        num = _pow(2, s) * (13 * z + _pow(3, s + 2) * (z - 1) + 3) - z * (_pow(3, s + 2) + 5)
        out = _pow(pi / 2, s + 1) * num / (4 * cubic * d2 * z1)
    else:
        d2 = _pow(2, s + 1) - 1
        d3 = _pow(3, s + 1) - 1
        dens = [z1, d2, d3]
        P = lambda b: _pow(b, s)  # noqa: E731
        poly = (
            1 - 3 * P(2) - 13 * P(3) - 8 * P(4) + 25 * P(5) + 27 * P(6)
            - 25 * P(10) + 8 * P(12) - 25 * P(15) + 25 * P(30)
        )
        num = _pow(pi / 3, s + 1) * (P(6) + 8 * P(12) - 25 * P(30) + poly * z)
        out = num / (2 * cubic * d2 * d3 * z1)
    _check_poles(s, dens)
    return complex(out[0]) if scalar else out


def _phi_mu(n: int) -> tuple[int, int]:
    tab = tables_up_to(n)
    return int(tab.phi[n]), int(tab.mu[n])


def p_tilde_general(r: int, q: int, s, include_odd: bool = True):
    """Transform for separation 2 pi r/q as a sum over Dirichlet characters.

    For each residue a mod q with b = gcd(a, q), a' = a/b, q' = q/b the
    series over n = a (mod q) of (phi(n) - mu(n)) n^(-s-1) is expanded over
    the characters mod q' into L(s, chi) and L(s + 1, chi).
    Odd characters cancel between a and q - a; ``include_odd=False`` drops
    them up front.
    """
    if q < 1 or math.gcd(r, q) != 1:
        raise DomainError(f"need gcd(r, q) = 1, got r={r}, q={q}")
    s, scalar = _as_array(s)
    l_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
    total = np.zeros_like(s)
    for a in range(1, q + 1):
        b = math.gcd(a, q)
        a1, q1 = a // b, q // b
        f = ((a * r) % q) / q
        bracket = _pow(1 - f, s + 2) if f == 0 else _pow(1 - f, s + 2) + _pow(f, s + 2)
        phi_b, mu_b = _phi_mu(b)
        table = character_table(q1)
        inner = np.zeros_like(s)
        for idx, chi in enumerate(table):
            if not include_odd and not chi.is_even:
                continue
            key = (q1, idx)
            if key not in l_cache:
                l_cache[key] = (zl.dirichlet_L(s, chi), zl.dirichlet_L(s + 1, chi))
            L0, L1 = l_cache[key]
            euler = np.ones_like(s)
            for p in prime_factors(b):
                euler = euler * (1 - chi(p) * _pow(p, -s - 1))
            inner = inner + np.conj(chi(a1)) * (phi_b * L0 - mu_b) / (L1 * euler)
        total = total + bracket * inner / (_pow(b, s + 1) * _phi_mu(q1)[0])
    out = _pow(TWO_PI, s + 1) / (2 * s * (s + 1) * (s + 2)) * total
    _check_poles(s, [])
    return complex(out[0]) if scalar else out


def p_tilde_q_holes(q: int, s):
    """Transform of the q-equal-hole constant: (2pi)^(s+1) zeta(s) / (2 q^s s(s+1)(s+2) zeta(s+1))."""
    if q < 2:
        raise DomainError("q-hole transform needs q >= 2")
    s, scalar = _as_array(s)
    z1 = zl.riemann_zeta(s + 1)
    out = _pow(TWO_PI, s + 1) * zl.riemann_zeta(s) / (2 * _pow(q, s) * s * (s + 1) * (s + 2) * z1)
    _check_poles(s, [z1])
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class MellinModel:
    """A transform evaluator with the data needed to locate its poles."""

    r: int
    q: int
    source: str
    evaluator: Callable = field(repr=False, compare=False)
    log_periodic_primes: tuple[int, ...] = ()

    def __call__(self, s):
        return self.evaluator(s)

    def survival_constant(self, delta: float) -> float:
        """The exact P_inf the transform belongs to."""
        if self.source == "q-hole":
            return p_infinity_q_holes(self.q, delta).value
        return p_infinity_two_holes(TWO_PI * self.r / self.q, delta, rational=(self.r, self.q)).value


def table_model(q: int) -> MellinModel:
    if q not in TABLE_MODULI:
        raise DomainError(f"closed form only for q in {TABLE_MODULI}")
    primes = {3: (3,), 4: (2,), 6: (2, 3)}.get(q, ())
    return MellinModel(0 if q == 1 else 1, q, "table-closed-form", lambda s: p_tilde_closed(q, s), primes)


def character_model(r: int, q: int) -> MellinModel:
    if math.gcd(r, q) != 1:
        raise DomainError("need gcd(r, q) = 1")
    r = r % q if q > 1 else 0
    primes = tuple(p for p in prime_factors(q))
    return MellinModel(r, q, "character-series", lambda s: p_tilde_general(r, q, s), primes)


def q_hole_model(q: int) -> MellinModel:
    """q equally spaced holes; q = 2 reuses the closed form for opposite holes."""
    if q == 2:
        return MellinModel(1, 2, "q-hole", lambda s: p_tilde_closed(2, s))
    return MellinModel(1, q, "q-hole", lambda s: p_tilde_q_holes(q, s))


def model_for(r: int, q: int) -> MellinModel:
    """Closed form when available (using mirror symmetry r -> q - r), else characters."""
    r = r % q if q > 1 else 0
    if q in TABLE_MODULI and (q == 1 or r in (1, q - 1)):
        base = table_model(q)
        return MellinModel(r, q, base.source, base.evaluator, base.log_periodic_primes)
    return character_model(r, q)


# ---------------------------------------------------------------- residues


def _contour_integrals(model: MellinModel, s0: complex, rho: float, m: int, deltas):
    """(1/2 pi i) closed integral of P~(s) Delta^(-(s - s0)) ds for each Delta."""
    phase = np.exp(2j * np.pi * np.arange(m) / m)
    pts = s0 + rho * phase
    vals = np.asarray(model(pts), dtype=complex) * rho * phase
    out = []
    for d in deltas:
        w = np.exp(-(pts - s0) * math.log(d))
        out.append(np.sum(vals * w) / m)
    return out


def residue_numeric(
    model: MellinModel,
    s0: complex,
    delta: float = 0.5,
    rho: float = 0.25,
    points: int = 128,
    tol: float = 1e-8,
) -> tuple[complex, complex]:
    """Residue of P~(s) Delta^(-s) at s0 divided by Delta^(-s0).

    Returns (coefficient, log_coefficient) such that the normalised residue
    equals coefficient + log_coefficient * ln(Delta); the log part is non-zero
    only at a double pole. Uses the M-point trapezoid rule on a circle of
    radius ``rho`` and re-checks with 2M points.
    """
    deltas = (delta, delta * math.exp(-1.0))
    fine = _contour_integrals(model, s0, rho, 2 * points, deltas)
    coarse = _contour_integrals(model, s0, rho, points, deltas)
    gap = max(abs(f - c) for f, c in zip(fine, coarse))
    if gap > tol * max(1.0, max(abs(f) for f in fine)):
        raise AccuracyError(f"contour quadrature at s0={s0} not converged (change {gap:.3g})")
    i1, i2 = fine
    log_coef = (i1 - i2) / (math.log(deltas[0]) - math.log(deltas[1]))
    coef = i1 - log_coef * math.log(deltas[0])
    return complex(coef), complex(log_coef)


@dataclass(frozen=True)
class PoleTerm:
    """Contribution (coefficient + log_coefficient ln Delta) Delta^(-pole)."""

    pole: complex
    coefficient: complex
    log_coefficient: complex = 0j
    conjugate_pair: bool = False

    def evaluate(self, delta: np.ndarray) -> np.ndarray:
        ld = np.log(delta)
        val = (self.coefficient + self.log_coefficient * ld) * np.exp(-self.pole * ld)
        if self.conjugate_pair:
            pc = np.conj(self.pole)
            val = val + (np.conj(self.coefficient) + np.conj(self.log_coefficient) * ld) * np.exp(-pc * ld)
        return val


@dataclass(frozen=True)
class AsymptoticExpansion:
    """Truncated residue sum for P_inf(Delta) as Delta -> 0."""

    model: MellinModel
    real_pole_terms: tuple[PoleTerm, ...]
    oscillatory_terms: tuple[PoleTerm, ...]
    critical_terms: tuple[PoleTerm, ...]
    real_pole_cutoff: int
    zero_count: int

    @property
    def critical_ordinates(self) -> np.ndarray:
        return np.array([t.pole.imag for t in self.critical_terms])

    def evaluate_complex(self, delta, critical: bool = True, oscillatory: bool = True):
        d = np.atleast_1d(np.asarray(delta, dtype=float))
        terms = list(self.real_pole_terms)
        if oscillatory:
            terms += self.oscillatory_terms
        if critical:
            terms += self.critical_terms
        total = np.zeros(d.shape, dtype=complex)
        for t in terms:
            total = total + t.evaluate(d)
        return total

    def evaluate(self, delta, critical: bool = True, oscillatory: bool = True):
        """Real value of the truncated expansion (conjugate poles paired)."""
        out = self.evaluate_complex(delta, critical, oscillatory)
        scale = np.maximum(1.0, np.abs(out))
        if np.any(np.abs(out.imag) > 1e-10 * scale):
            raise AccuracyError("expansion has a non-negligible imaginary part")
        return float(out.real[0]) if np.ndim(delta) == 0 else out.real


def real_pole_candidates(cutoff: int) -> list[int]:
    """s = 1, -1, -2 and odd s <= -3 down to -cutoff (even s <= -4 are regular)."""
    out = [1]
    for k in range(1, cutoff + 1):
        if k <= 2 or k % 2 == 1:
            out.append(-k)
    return out


@lru_cache(maxsize=8)
def _zeros(count: int) -> tuple[float, ...]:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", zl.OutsideValidatedBoxWarning)
        return tuple(zl.first_zeros(count).ordinates)


def _half_gap(x: complex, others: list[complex], cap: float) -> float:
    dists = [abs(x - o) for o in others if o != x]
    return min([cap] + [d / 2 for d in dists])


def asymptotic_expansion(
    model: MellinModel,
    real_pole_cutoff: int = 3,
    zero_count: int = 0,
    log_periodic_max_imag: float = 60.0,
    removable_tol: float = 1e-9,
) -> AsymptoticExpansion:
    """Collect residues of ``model`` into an expansion in Delta.

    Critical-line poles use the first ``zero_count`` zeros of zeta; for
    models involving L-functions of non-trivial even characters their own
    zeros are not included.
    """
    if real_pole_cutoff < 1:
        raise DomainError("real_pole_cutoff must be >= 1")
    if zero_count < 0:
        raise DomainError("zero_count must be >= 0")
    import warnings

    taus = _zeros(zero_count) if zero_count else ()
    critical_poles = [complex(-0.5, t) for t in taus]
    osc_poles = []
    for p in model.log_periodic_primes:
        step = TWO_PI / math.log(p)
        k = 1
        while k * step <= log_periodic_max_imag:
            osc_poles.append(complex(-1.0, k * step))
            k += 1
    reals = [complex(x) for x in real_pole_candidates(real_pole_cutoff)]
    everything = reals + osc_poles + critical_poles + [complex(-0.5, -t) for t in taus]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", zl.OutsideValidatedBoxWarning)
        real_terms = []
        for s0 in reals:
            c, lc = residue_numeric(model, s0, rho=_half_gap(s0, everything, 0.25))
            real_terms.append(PoleTerm(s0, complex(c.real, 0.0), complex(lc.real, 0.0)))
        osc_terms = []
        for s0 in osc_poles:
            c, lc = residue_numeric(model, s0, rho=_half_gap(s0, everything, 0.25))
            if abs(c) >= removable_tol or abs(lc) >= removable_tol:
                osc_terms.append(PoleTerm(s0, c, lc, conjugate_pair=True))
        crit_terms = []
        for s0 in critical_poles:
            c, lc = residue_numeric(model, s0, rho=_half_gap(s0, everything, 0.2))
            crit_terms.append(PoleTerm(s0, c, lc, conjugate_pair=True))
    return AsymptoticExpansion(
        model, tuple(real_terms), tuple(osc_terms), tuple(crit_terms), real_pole_cutoff, zero_count
    )


# ------------------------------------------------------- numeric transform


def _breakpoints(model: MellinModel, eps: float) -> np.ndarray:
    n_max = int(TWO_PI / eps) + 1
    n = np.arange(1, n_max + 1, dtype=np.int64)
    if model.source == "q-hole":
        qt = model.q // np.gcd(n, model.q)
        pts = TWO_PI / (n * qt)
    else:
        tp = theta_reduced(n, TWO_PI * model.r / model.q, (model.r, model.q))
        pts = np.concatenate([TWO_PI / n - tp, tp])
    pts = pts[(pts > eps) & (pts < TWO_PI)]
    return np.unique(np.concatenate([[eps], pts]))


def numeric_mellin_transform(model: MellinModel, s: complex, eps: float = 1e-2) -> complex:
    """int_0^inf P_inf(Delta) Delta^(s-1) dDelta by adaptive quadrature, Re s > 1.

    The integral is split at every kink of P_inf above ``eps``. Below ``eps``
    the integrand is replaced by a least-squares fit Delta P_inf ~ c0 + c2 Delta^2
    sampled from the exact sum, integrated in closed form.
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError("numeric transform converges only for Re s > 1")
    P = model.survival_constant
    sample = np.linspace(eps / 2, eps, 64)
    y = np.array([d * P(d) for d in sample])
    c0, c2 = np.linalg.lstsq(np.vstack([np.ones_like(sample), sample**2]).T, y, rcond=None)[0]
    total = c0 * eps ** (s - 1) / (s - 1) + c2 * eps ** (s + 1) / (s + 1)
    bps = _breakpoints(model, eps)
    for lo, hi in zip(bps[:-1], bps[1:]):
        val, _ = integrate.quad(
            lambda d: P(d) * d ** (s - 1), lo, hi, complex_func=True, epsabs=1e-14, epsrel=1e-12
        )
        total += val
    return complex(total)
