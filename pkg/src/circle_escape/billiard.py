"""The circular billiard as a boundary map, with holes.

A collision state is (beta, psi): beta the boundary angle, psi the angle of
the outgoing ray from the inner normal. The map is a rigid rotation of beta
by pi - 2 psi, psi is conserved, and the time between collisions is 2 cos psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi
DEFAULT_MAX_BOUNCES = 10**8
_BLOCK_ELEMENTS = 4_000_000


def _wrap(beta: float) -> float:
    b = math.fmod(beta, TWO_PI)
    if b < 0:
        b += TWO_PI
    return 0.0 if b >= TWO_PI else b


@dataclass(frozen=True)
class PhasePoint:
    beta: float
    psi: float

    def __post_init__(self):
        if not -math.pi / 2 <= self.psi <= math.pi / 2:
            raise DomainError(f"psi must lie in [-pi/2, pi/2], got {self.psi}")
        object.__setattr__(self, "beta", _wrap(float(self.beta)))


def billiard_map(p: PhasePoint) -> PhasePoint:
    """One collision: (beta, psi) -> (beta + pi - 2 psi mod 2 pi, psi)."""
    return PhasePoint(p.beta + math.pi - 2.0 * p.psi, p.psi)


def rotation_angle(psi):
    """Rotation per bounce, reduced to [0, 2 pi)."""
    return np.mod(np.pi - 2.0 * np.asarray(psi, dtype=float), TWO_PI)


def orbit_betas(beta0, psi, k):
    """Closed-form beta of the k-th iterate: beta0 + k (pi - 2 psi) mod 2 pi."""
    return np.mod(np.asarray(beta0, float) + np.asarray(k) * (np.pi - 2.0 * np.asarray(psi, float)), TWO_PI)


@dataclass(frozen=True)
class HoleConfiguration:
    """Equal arcs [start, start + delta) on the unit circle.

    Either two holes at 0 and ``theta`` (theta = 0 is the one-hole case), or
    ``num_equal_holes`` holes at 2 pi j / q. ``rational = (r, q)`` records
    theta = 2 pi r / q exactly for downstream arithmetic.
    """

    delta: float
    theta: float = 0.0
    rational: tuple[int, int] | None = None
    num_equal_holes: int | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError(f"hole width must be positive, got {self.delta}")
        if not 0 <= self.theta < TWO_PI:
            raise DomainError(f"theta must lie in [0, 2 pi), got {self.theta}")
        if self.num_equal_holes is not None:
            if self.num_equal_holes < 2:
                raise DomainError("num_equal_holes must be >= 2")
            if self.theta != 0 or self.rational is not None:
                raise DomainError("num_equal_holes is exclusive with theta / rational")
        if self.rational is not None:
            r, q = self.rational
            if q < 1 or math.gcd(r, q) != 1:
                raise DomainError(f"rational angle needs gcd(r, q) = 1, got {(r, q)}")
            if abs(self.theta - TWO_PI * (r % q) / q) >= 1e-15:
                raise DomainError("theta inconsistent with rational metadata")

    @classmethod
    def one_hole(cls, delta: float) -> "HoleConfiguration":
        return cls(delta=delta, theta=0.0, rational=(0, 1))

    @classmethod
    def two_holes(cls, delta: float, theta: float) -> "HoleConfiguration":
        return cls(delta=delta, theta=_wrap(theta))

    @classmethod
    def rational_angle(cls, delta: float, r: int, q: int) -> "HoleConfiguration":
        r = r % q
        return cls(delta=delta, theta=TWO_PI * r / q, rational=(r, q))

    @classmethod
    def equal_holes(cls, delta: float, q: int) -> "HoleConfiguration":
        return cls(delta=delta, num_equal_holes=q)

    @property
    def starts(self) -> tuple[float, ...]:
        if self.num_equal_holes is not None:
            q = self.num_equal_holes
            return tuple(TWO_PI * j / q for j in range(q))
        if self.theta == 0.0:
            return (0.0,)
        return (0.0, self.theta)

    def contains(self, beta) -> np.ndarray:
        """Membership of boundary angle(s) in the union of hole arcs."""
        beta = np.asarray(beta, dtype=float)
        hit = np.zeros(beta.shape, dtype=bool)
        for start in self.starts:
            hit |= np.mod(beta - start, TWO_PI) < self.delta
        return hit


@dataclass(frozen=True)
class EscapeResult:
    """``bounces`` is None when the orbit survived to the cap."""

    bounces: int | None
    continuous_time: float | None
    cap: int

    @property
    def survived(self) -> bool:
        return self.bounces is None


def first_escape(beta0, psi, holes: HoleConfiguration, budget) -> np.ndarray:
    """Least k in [1, budget] with the k-th iterate in a hole, else 0.

    Vectorised over orbits; iterates are generated in blocks from the closed
    form. Blocks start short and double, so early escapes stay cheap. Orbits
    whose rotation is exactly zero in floating point are fixed points and are
    decided at k = 1.
    """
    beta0 = np.atleast_1d(np.asarray(beta0, dtype=float))
    psi = np.broadcast_to(np.asarray(psi, dtype=float), beta0.shape)
    budget = np.broadcast_to(np.asarray(budget, dtype=np.int64), beta0.shape)
    step = np.pi - 2.0 * psi
    result = np.zeros(beta0.shape, dtype=np.int64)

    fixed = (np.mod(step, TWO_PI) == 0.0) & (budget >= 1)
    if np.any(fixed):
        result[fixed] = np.where(holes.contains(beta0[fixed]), 1, 0)
    active = np.flatnonzero(~fixed & (budget >= 1))
    k0 = 1
    grow = 8
    while active.size:
        width = int(min(1 << 16, grow, max(16, _BLOCK_ELEMENTS // active.size)))
        grow *= 2
        ks = np.arange(k0, k0 + width, dtype=np.int64)
        b = np.mod(beta0[active, None] + ks[None, :] * step[active, None], TWO_PI)
        hit = holes.contains(b) & (ks[None, :] <= budget[active, None])
        any_hit = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        result[active[any_hit]] = ks[first[any_hit]]
        done = any_hit | (budget[active] < k0 + width)
        active = active[~done]
        k0 += width
    return result


def escape_count(
    p: PhasePoint, holes: HoleConfiguration, max_bounces: int = DEFAULT_MAX_BOUNCES
) -> EscapeResult:
    """First bounce k >= 1 landing in a hole; the starting point is not tested."""
    if max_bounces < 1:
        raise DomainError("max_bounces must be >= 1")
    k = int(first_escape(p.beta, p.psi, holes, max_bounces)[0])
    if k == 0:
        return EscapeResult(None, None, max_bounces)
    return EscapeResult(k, 2.0 * math.cos(p.psi) * k, max_bounces)


def survival_budget(psi, t: float, cap: int = DEFAULT_MAX_BOUNCES) -> np.ndarray:
    """Largest bounce count k with 2 cos(psi) k <= t (clipped to ``cap``).

    An orbit survives past time t exactly when it does not escape within
    this many bounces.
    """
    c = 2.0 * np.cos(np.asarray(psi, dtype=float))
    with np.errstate(divide="ignore"):
        raw = np.floor(t / c)
    return np.minimum(np.nan_to_num(raw, posinf=cap), cap).astype(np.int64)


class PhaseSample(NamedTuple):
    beta: np.ndarray
    psi: np.ndarray

    def points(self) -> Iterator[PhasePoint]:
        for b, s in zip(self.beta, self.psi):
            yield PhasePoint(float(b), float(s))


def sample_initial(rng: np.random.Generator, count: int) -> PhaseSample:
    """i.i.d. draws from the invariant measure cos(psi) dpsi dbeta / (4 pi)."""
    if count < 0:
        raise DomainError("count must be non-negative")
    beta = rng.uniform(0.0, TWO_PI, size=count)
    psi = np.arcsin(2.0 * rng.uniform(0.0, 1.0, size=count) - 1.0)
    return PhaseSample(beta, psi)


@dataclass(frozen=True)
class SurvivingIntervals:
    """Maximal runs of grid directions whose orbit outlives the horizon."""

    intervals: list[tuple[float, float]]
    resolution: float
    beta: float
    time_horizon: float

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)


def surviving_psi_intervals(
    beta: float,
    holes: HoleConfiguration,
    time_horizon: float,
    psi_grid: int = 100_000,
    max_bounces: int = DEFAULT_MAX_BOUNCES,
) -> SurvivingIntervals:
    """Scan psi on a uniform grid of [-pi/2, pi/2] at fixed beta.

    Returns maximal runs of grid points with continuous escape time above
    ``time_horizon``. Empty when delta >= pi.
    """
    if psi_grid < 1000:
        raise DomainError("psi_grid must be >= 1000")
    if time_horizon <= 8 * math.pi / holes.delta:
        raise DomainError("time_horizon must exceed 8 pi / delta")
    resolution = math.pi / (psi_grid - 1)
    beta = _wrap(beta)
    if holes.delta >= math.pi:
        return SurvivingIntervals([], resolution, beta, time_horizon)
    psi = np.linspace(-math.pi / 2, math.pi / 2, psi_grid)
    budget = survival_budget(psi, time_horizon, max_bounces)
    alive = first_escape(np.full(psi_grid, beta), psi, holes, budget) == 0
    edges = np.diff(alive.astype(np.int8), prepend=0, append=0)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    intervals = [(float(psi[a]), float(psi[b])) for a, b in zip(starts, stops)]
    return SurvivingIntervals(intervals, resolution, beta, time_horizon)
