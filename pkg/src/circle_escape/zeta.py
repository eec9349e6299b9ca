"""Riemann zeta, Hurwitz zeta and Dirichlet L-functions in double precision.

Everything funnels through one Euler-Maclaurin kernel, vectorised over an
array of complex arguments. The left half-plane is reached through the
functional equation (Riemann) or Hurwitz's formula for rational shifts.

Accuracy target: relative 1e-10 inside the box |Im s| <= 100, |Re s| <= 30.
Arguments outside the box still evaluate but raise
:class:`OutsideValidatedBoxWarning`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize, special

from .arithmetic import DirichletCharacter, prime_factors
from .errors import AccuracyError, DomainError, OutsideValidatedBoxWarning, PoleError

BOX_IM = 100.0
BOX_RE = 30.0
EM_BERNOULLI_TERMS = 10
# B_2, B_4, ..., B_20 divided by (2j)!
_B = special.bernoulli(2 * EM_BERNOULLI_TERMS)
_EM_COEFFS = np.array(
    [_B[2 * j] / math.factorial(2 * j) for j in range(1, EM_BERNOULLI_TERMS + 1)]
)
_LOG2 = math.log(2.0)
_LOGPI = math.log(math.pi)


def _as_complex_array(s) -> tuple[np.ndarray, bool]:
    arr = np.asarray(s, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def _unwrap(out: np.ndarray, scalar: bool):
    return complex(out[0]) if scalar else out


def _check_box(s: np.ndarray) -> bool:
    outside = bool(np.any(np.abs(s.imag) > BOX_IM) or np.any(np.abs(s.real) > BOX_RE))
    if outside:
        warnings.warn(
            "zeta evaluated outside |Im s| <= 100, |Re s| <= 30; accuracy not validated",
            OutsideValidatedBoxWarning,
            stacklevel=3,
        )
    return outside


def _exprel(u: np.ndarray) -> np.ndarray:
    """(exp(u) - 1) / u, stable near u = 0."""
    small = np.abs(u) < 1e-3
    safe = np.where(small, 1.0, u)
    series = 1 + u / 2 + u**2 / 6 + u**3 / 24 + u**4 / 120
    return np.where(small, series, np.expm1(safe) / safe)


def _em_hurwitz(s: np.ndarray, a: float, drop_pole: bool = False) -> np.ndarray:
    """Euler-Maclaurin sum for zeta(s, a), a > 0.

    With ``drop_pole`` the returned value is zeta(s, a) - 1/(s - 1), which is
    entire and finite at s = 1.
    """
    n_terms = max(20, math.ceil(1.3 * float(np.max(np.abs(s.imag), initial=0.0))))
    logs = np.log(np.arange(n_terms) + a)
    head = np.exp(-np.outer(s, logs)).sum(axis=1)
    x = n_terms + a
    lx = math.log(x)
    xs = np.exp(-s * lx)
    if drop_pole:
        u = (1 - s) * lx
        tail = -lx * _exprel(u) + xs / 2
    else:
        tail = x * xs / (s - 1) + xs / 2
    term = s * xs / x
    corr = _EM_COEFFS[0] * term
    inv_x2 = 1.0 / (x * x)
    for j in range(2, EM_BERNOULLI_TERMS + 1):
        term = term * (s + 2 * j - 3) * (s + 2 * j - 2) * inv_x2
        corr = corr + _EM_COEFFS[j - 1] * term
    return head + tail + corr


def _sin_half_pi(s: np.ndarray) -> np.ndarray:
    """sin(pi s / 2) with the nearest even integer removed exactly first.

    Keeps full relative accuracy next to the trivial zeros, where forming
    pi * s directly would round away the offset.
    """
    m = 2.0 * np.round(s.real / 2)
    sign = np.where(np.mod(m, 4) == 0, 1.0, -1.0)
    return sign * np.sin(np.pi * (s - m) / 2)


def _use_direct(s: np.ndarray) -> np.ndarray:
    return (s.real >= 0.5) | (np.abs(s) < 0.5)


def riemann_zeta(s):
    """zeta(s) for scalar or array complex ``s``; raises PoleError at s = 1."""
    s, scalar = _as_complex_array(s)
    if np.any(s == 1):
        raise PoleError("zeta has a pole at s = 1")
    _check_box(s)
    out = np.empty_like(s)
    direct = _use_direct(s)
    if np.any(direct):
        out[direct] = _em_hurwitz(s[direct], 1.0)
    refl = ~direct
    if np.any(refl):
        sr = s[refl]
        # zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
        log_pref = sr * _LOG2 + (sr - 1) * _LOGPI + special.loggamma(1 - sr)
        val = np.exp(log_pref) * _sin_half_pi(sr) * _em_hurwitz(1 - sr, 1.0)
        trivial = (sr.imag == 0) & (sr.real < 0) & (np.mod(sr.real, 2) == 0)
        out[refl] = np.where(trivial, 0.0, val)
    return _unwrap(out, scalar)


def _rational(a) -> Fraction | None:
    if isinstance(a, Fraction):
        return a
    f = Fraction(float(a)).limit_denominator(1000)
    return f if abs(float(f) - float(a)) < 1e-15 else None


def hurwitz_zeta(s, a):
    """zeta(s, a) = sum_{k>=0} (k + a)^(-s) for 0 < a <= 1.

    For Re s < 1/2 and rational ``a`` (a Fraction, or a float equal to a
    fraction with denominator <= 1000) Hurwitz's formula is used; otherwise
    the Euler-Maclaurin sum is evaluated directly and a warning is issued,
    since cancellation degrades it far to the left.
    """
    s, scalar = _as_complex_array(s)
    if not 0 < float(a) <= 1:
        raise ValueError(f"shift a must lie in (0, 1], got {a}")
    if np.any(s == 1):
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    _check_box(s)
    out = np.empty_like(s)
    direct = _use_direct(s)
    if np.any(direct):
        out[direct] = _em_hurwitz(s[direct], float(a))
    refl = ~direct
    if np.any(refl):
        sr = s[refl]
        frac = _rational(a)
        if frac is None:
            warnings.warn(
                "Hurwitz zeta with irrational shift left of Re s = 1/2; accuracy not validated",
                OutsideValidatedBoxWarning,
                stacklevel=2,
            )
            out[refl] = _em_hurwitz(sr, float(a))
        else:
            out[refl] = _hurwitz_reflect(sr, frac.numerator, frac.denominator)
    return _unwrap(out, scalar)


def _hurwitz_reflect(s: np.ndarray, m: int, n: int) -> np.ndarray:
    """Hurwitz's formula: zeta(s, m/n) from zeta(1 - s, k/n), k = 1..n."""
    w = 1 - s
    log_pref = math.log(2.0) + special.loggamma(w) - w * math.log(2 * math.pi * n)
    total = np.zeros_like(s)
    for k in range(1, n + 1):
        total = total + np.cos(np.pi * w / 2 - 2 * np.pi * k * m / n) * _em_hurwitz(w, k / n)
    return np.exp(log_pref) * total


def dirichlet_L(s, chi: DirichletCharacter):
    """L(s, chi) = q^(-s) sum_{a=1}^{q} chi(a) zeta(s, a/q).

    Only the trivial character has a pole (at s = 1). For other characters
    the pole parts of the Hurwitz terms cancel and are removed analytically.
    """
    s, scalar = _as_complex_array(s)
    q = chi.modulus
    if q == 1:
        return riemann_zeta(s[0]) if scalar else riemann_zeta(s)
    if chi.is_trivial and np.any(s == 1):
        raise PoleError("L(s, chi) for the trivial character has a pole at s = 1")
    _check_box(s)
    vals = chi.values()
    near_one = np.abs(s - 1) < 0.25
    direct = _use_direct(s)
    out = np.zeros_like(s)
    for a in range(1, q + 1):
        c = vals[a % q]
        if c == 0:
            continue
        shift = Fraction(a, q)
        term = np.empty_like(s)
        drop = direct & near_one & (not chi.is_trivial)
        keep = direct & ~drop
        if np.any(drop):
            term[drop] = _em_hurwitz(s[drop], float(shift), drop_pole=True)
        if np.any(keep):
            term[keep] = _em_hurwitz(s[keep], float(shift))
        if np.any(~direct):
            term[~direct] = _hurwitz_reflect(s[~direct], shift.numerator, shift.denominator)
        out = out + c * term
    out = out * np.exp(-s * math.log(q))
    return _unwrap(out, scalar)


def zeta_derivative(s, order: int = 1):
    """zeta'(s) by a central difference (h = 1e-5) with one Richardson step."""
    if order != 1:
        raise NotImplementedError("only the first derivative is provided")
    s_arr, scalar = _as_complex_array(s)
    if np.any(np.abs(s_arr - 1) < 0.1):
        raise PoleError("zeta_derivative requires |s - 1| >= 0.1")
    h = 1e-5

    def diff(step):
        return (riemann_zeta(s_arr + step) - riemann_zeta(s_arr - step)) / (2 * step)

    out = (4 * diff(h / 2) - diff(h)) / 3
    return _unwrap(out, scalar)


def riemann_siegel_theta(t):
    """theta(t) = Im log Gamma(1/4 + i t/2) - (t/2) log pi."""
    t = np.asarray(t, dtype=float)
    return special.loggamma(0.25 + 0.5j * t).imag - 0.5 * t * _LOGPI


def hardy_z(t):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + i t), real for real t."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    z = np.exp(1j * riemann_siegel_theta(t_arr)) * riemann_zeta(0.5 + 1j * t_arr)
    out = z.real
    return float(out[0]) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class ZeroList:
    """Ordinates of critical-line zeros 0 < tau_j <= t_max."""

    ordinates: np.ndarray
    multiplicities: np.ndarray
    t_max: float
    grid_step: float
    max_abs_zeta: float

    def __len__(self) -> int:
        return len(self.ordinates)

    def counting_main_terms(self, T: float | None = None) -> float:
        """T/2pi log(T/2pi) - T/2pi + 7/8."""
        T = self.t_max if T is None else T
        x = T / (2 * math.pi)
        return x * math.log(x) - x + 7 / 8


def find_zeros(t_max: float, step: float = 0.05, xtol: float = 1e-12) -> ZeroList:
    """Zeros of zeta on the critical line up to ``t_max`` via sign changes of Z.

    Sign changes on a grid of spacing ``step`` are refined with Brent's
    bracketing method. Grid cells where |Z| dips close to zero without a
    sign change are examined for a pair of nearby zeros (or a double zero).
    """
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    if t_max > BOX_IM:
        warnings.warn(
            f"zero search beyond t = {BOX_IM:g}; accuracy not validated",
            OutsideValidatedBoxWarning,
            stacklevel=2,
        )
    grid = np.arange(1.0, t_max + step, step)
    grid = grid[grid <= t_max]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideValidatedBoxWarning)
        z = hardy_z(grid)
        roots: list[float] = []
        mult: list[int] = []
        for i in range(len(grid) - 1):
            if z[i] == 0.0:
                roots.append(float(grid[i]))
                mult.append(1)
            elif z[i] * z[i + 1] < 0:
                roots.append(optimize.brentq(hardy_z, grid[i], grid[i + 1], xtol=xtol))
                mult.append(1)
        roots, mult = _scan_missed_pairs(grid, z, roots, mult, xtol)
        order = np.argsort(roots)
        ords = np.asarray(roots, dtype=float)[order]
        mults = np.asarray(mult, dtype=int)[order]
        resid = np.abs(riemann_zeta(0.5 + 1j * ords)) if len(ords) else np.zeros(0)
    max_abs = float(np.max(resid, initial=0.0))
    if max_abs >= 1e-8:
        raise AccuracyError(f"refined zero has |zeta| = {max_abs:.3g} >= 1e-8")
    return ZeroList(ords, mults, float(t_max), float(step), max_abs)


def _scan_missed_pairs(grid, z, roots, mult, xtol):
    absz = np.abs(z)
    for i in range(1, len(grid) - 1):
        if not (absz[i] < absz[i - 1] and absz[i] <= absz[i + 1]):
            continue
        if z[i - 1] * z[i] <= 0 or z[i] * z[i + 1] <= 0:
            continue
        sign = np.sign(z[i])
        res = optimize.minimize_scalar(
            lambda t: sign * hardy_z(t), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
            options={"xatol": 1e-10},
        )
        if res.fun < 0:
            roots.append(optimize.brentq(hardy_z, grid[i - 1], res.x, xtol=xtol))
            roots.append(optimize.brentq(hardy_z, res.x, grid[i + 1], xtol=xtol))
            mult.extend([1, 1])
        elif res.fun < 1e-9:
            roots.append(float(res.x))
            mult.append(2)
    return roots, mult


def first_zeros(count: int, step: float = 0.05) -> ZeroList:
    """The first ``count`` zero ordinates, extending the search window as needed."""
    t_max = 50.0
    while True:
        zl = find_zeros(t_max, step=step)
        if len(zl) >= count:
            keep = slice(0, count)
            return ZeroList(zl.ordinates[keep], zl.multiplicities[keep], zl.t_max, step, zl.max_abs_zeta)
        t_max *= 1.5


def euler_factor_product(s, q: int):
    """prod_{p | q} (1 - p^(-s))."""
    s, scalar = _as_complex_array(s)
    out = np.ones_like(s)
    for p in prime_factors(q):
        out = out * (1 - np.exp(-s * math.log(p)))
    return _unwrap(out, scalar)
