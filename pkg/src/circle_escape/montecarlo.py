"""Direct simulation of survival probabilities in the open circle billiard."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .billiard import HoleConfiguration, first_escape, sample_initial, survival_budget
from .errors import DomainError

CHUNK = 1 << 18
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class SurvivalEstimate:
    t: float
    survivors: int
    samples: int
    seed: int
    streams: int
    below_regime: bool = False

    @property
    def p_hat(self) -> float:
        return self.survivors / self.samples

    @property
    def std_error(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.samples)

    @property
    def tp_hat(self) -> float:
        return self.t * self.p_hat

    @property
    def tp_std_error(self) -> float:
        return self.t * self.std_error


def stream_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for substream ``index`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _count_survivors(holes: HoleConfiguration, t: float, n: int, rng: np.random.Generator) -> int:
    alive = 0
    for start in range(0, n, CHUNK):
        size = min(CHUNK, n - start)
        beta, psi = sample_initial(rng, size)
        budget = survival_budget(psi, t)
        alive += int(np.count_nonzero(first_escape(beta, psi, holes, budget) == 0))
    return alive


def estimate_survival(
    holes: HoleConfiguration,
    t: float,
    samples: int,
    seed: int = 0,
    streams: int = 8,
    threads: int | None = 1,
) -> SurvivalEstimate:
    """Fraction of mu-distributed initial conditions still inside at time t.

    An orbit survives when its escape time 2 cos(psi) N exceeds t. Samples
    are split over ``streams`` independent substreams whose counts are added,
    so the result depends only on (seed, streams), not on ``threads``.
    """
    if samples < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if streams < 1:
        raise DomainError("streams must be positive")
    if not t > 0:
        raise DomainError("t must be positive")
    below = t <= 8 * math.pi / holes.delta
    if below:
        warnings.warn(
            f"t = {t:g} is below the asymptotic regime t > 8 pi / delta", RuntimeWarning, stacklevel=2
        )
    sizes = [samples // streams + (1 if i < samples % streams else 0) for i in range(streams)]

    def work(i: int) -> int:
        return _count_survivors(holes, t, sizes[i], stream_generator(seed, i))

    if threads is None or threads <= 1:
        counts = [work(i) for i in range(streams)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(work, range(streams)))
    return SurvivalEstimate(t, sum(counts), samples, seed, streams, below)
