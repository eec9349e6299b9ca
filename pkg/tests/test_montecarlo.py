import math

import numpy as np
import pytest

from circle_escape.billiard import TWO_PI, HoleConfiguration, first_escape, sample_initial, survival_budget
from circle_escape.errors import DomainError
from circle_escape.montecarlo import SurvivalEstimate, estimate_survival, stream_generator
from circle_escape.survival import p_infinity


def test_full_circle_hole():
    est = estimate_survival(HoleConfiguration.one_hole(TWO_PI), 10.0, 20_000, seed=3)
    assert est.survivors == 0 and est.p_hat == 0.0 and est.std_error == 0.0


def test_estimate_fields():
    est = SurvivalEstimate(t=100.0, survivors=25, samples=10_000, seed=1, streams=2)
    assert est.p_hat == 0.0025
    assert est.std_error == pytest.approx(math.sqrt(0.0025 * 0.9975 / 10_000))
    assert est.tp_hat == pytest.approx(0.25)
    assert est.tp_std_error == pytest.approx(100 * est.std_error)


def test_reproducible_and_thread_independent():
    holes = HoleConfiguration.two_holes(0.4, 2.0)
    a = estimate_survival(holes, 200.0, 50_000, seed=9, streams=4, threads=1)
    b = estimate_survival(holes, 200.0, 50_000, seed=9, streams=4, threads=4)
    c = estimate_survival(holes, 200.0, 50_000, seed=9, streams=4, threads=2)
    assert a.survivors == b.survivors == c.survivors
    d = estimate_survival(holes, 200.0, 50_000, seed=10, streams=4)
    assert d.survivors != a.survivors


def test_streams_are_disjoint():
    x = stream_generator(5, 0).random(1000)
    y = stream_generator(5, 1).random(1000)
    z = stream_generator(5, 0).random(1000)
    assert not np.array_equal(x, y)
    assert np.array_equal(x, z)


def test_below_regime_flag():
    with pytest.warns(RuntimeWarning):
        est = estimate_survival(HoleConfiguration.one_hole(0.5), 10.0, 10_000)
    assert est.below_regime


def test_preconditions():
    with pytest.raises(DomainError):
        estimate_survival(HoleConfiguration.one_hole(0.5), 100.0, 100)
    with pytest.raises(DomainError):
        estimate_survival(HoleConfiguration.one_hole(0.5), 100.0, 10_000, streams=0)
    with pytest.raises(DomainError):
        estimate_survival(HoleConfiguration.one_hole(0.5), -1.0, 10_000)
    with pytest.raises(DomainError):
        HoleConfiguration.one_hole(-0.5)


def test_budget_is_strict_survival_time():
    psi = np.array([0.0, 1.0, math.pi / 2])
    budget = survival_budget(psi, 10.0)
    assert budget[0] == 5
    assert budget[1] == math.floor(10.0 / (2 * math.cos(1.0)))
    assert budget[2] == 10**8


def test_closed_form_matches_stepwise():
    rng = np.random.default_rng(21)
    holes = HoleConfiguration.two_holes(0.05, math.pi)
    beta, psi = sample_initial(rng, 1000)
    got = first_escape(beta, psi, holes, 2000)
    for b0, s, k in zip(beta, psi, got):
        b = b0
        want = 0
        for j in range(1, 2001):
            b = (b + math.pi - 2 * s) % TWO_PI
            if b < 0.05 or 0 <= b - math.pi < 0.05:
                want = j
                break
        assert k == want


def test_agrees_with_exact_small():
    holes = HoleConfiguration.one_hole(math.pi / 4)
    est = estimate_survival(holes, 500.0, 200_000, seed=4)
    exact = p_infinity(holes).value
    assert abs(est.tp_hat - exact) < 4 * est.tp_std_error


def test_convergence_t_and_2t():
    holes = HoleConfiguration.one_hole(math.pi / 8)
    a = estimate_survival(holes, 500.0, 200_000, seed=1)
    b = estimate_survival(holes, 1000.0, 200_000, seed=2)
    combined = math.hypot(a.tp_std_error, b.tp_std_error)
    assert abs(a.tp_hat - b.tp_hat) < 3 * combined
