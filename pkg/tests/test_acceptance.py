"""End-to-end acceptance checks.

Each test carries an ``acceptance`` marker; the terminal summary prints one
PASS/FAIL line per criterion together with its wall time. Runtime budgets are
asserted inside the tests.
"""

import math
import time

import numpy as np
import pytest
from scipy.special import loggamma

from circle_escape import mellin, probe
from circle_escape import zeta as zl
from circle_escape.arithmetic import character_table, farey_pairs, tables_up_to
from circle_escape.billiard import HoleConfiguration, surviving_psi_intervals
from circle_escape.montecarlo import estimate_survival
from circle_escape.reference import RESIDUE_POLES, expected_residues
from circle_escape.survival import p_infinity, p_infinity_two_holes, q_hole_terms


class Timer:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.budget, f"took {self.elapsed:.1f} s, budget {self.budget} s"


@pytest.mark.acceptance(1, "residue table reproduction")
def test_residue_table():
    want = expected_residues()
    with Timer(10):
        for q in mellin.TABLE_MODULI:
            model = mellin.table_model(q)
            for s0 in RESIDUE_POLES:
                coef, log_coef = mellin.residue_numeric(model, float(s0))
                c, lc = want[(q, s0)]
                assert abs(coef - c) < 1e-6, (q, s0)
                assert abs(log_coef - lc) < 1e-6, (q, s0)
    # only q = 6 carries a double pole at s = -1
    assert want[(6, -1)][1] != 0.0
    assert all(want[(q, -1)][1] == 0.0 for q in (1, 2, 3, 4))


@pytest.mark.acceptance(2, "exact vs Monte Carlo")
@pytest.mark.parametrize("theta", [0.0, math.pi])
@pytest.mark.parametrize("delta", [math.pi / 4, math.pi / 8])
def test_exact_vs_monte_carlo(theta, delta):
    holes = HoleConfiguration.two_holes(delta, theta)
    exact = p_infinity(holes).value
    with Timer(120):
        est = estimate_survival(holes, 1000.0, 1_000_000, seed=1)
    assert abs(est.tp_hat - exact) < 3 * est.tp_std_error


@pytest.mark.acceptance(3, "Mellin quadrature consistency")
def test_mellin_quadrature():
    points = [2.0, 3.5, 5.0, 2.5 + 1.0j, 4.0 - 2.0j]
    with Timer(60):
        for q in (1, 2):
            closed = mellin.table_model(q)
            series = mellin.character_model(0 if q == 1 else 1, q)
            for s in points:
                num = mellin.numeric_mellin_transform(closed, s)
                assert abs(closed(s) - num) < 1e-6 * abs(num), (q, s)
                assert abs(series(s) - num) < 1e-6 * abs(num), (q, s)


@pytest.mark.acceptance(4, "leading small-hole asymptotics")
def test_leading_asymptotics():
    d = 1e-4
    with Timer(5):
        one = d * p_infinity_two_holes(0.0, d).value
        opposite = d * p_infinity_two_holes(math.pi, d).value
    assert 1.9 <= one <= 2.1
    assert 0.95 <= opposite <= 1.05


@pytest.mark.acceptance(5, "critical-line scaling probe")
def test_scaling_probe():
    grid = probe.log_grid(1e-4, 1e-2, 200)
    with Timer(300):
        plain = probe.fluctuation(1, 0, grid)
        detrended = probe.fluctuation(1, 0, grid, zero_count=50)
    assert abs(plain.envelope_exponent - 0.5) <= 0.1
    assert plain.sign_changes_per_decade() >= 3
    assert np.all(plain.decade_maxima() / detrended.decade_maxima() >= 2)


@pytest.mark.acceptance(6, "zeta zero finder")
def test_zero_finder():
    with Timer(30):
        below50 = zl.find_zeros(50.0)
        below100 = zl.find_zeros(100.0)
    assert len(below50) == 10
    assert abs(below50.ordinates[0] - 14.1347) <= 1e-4
    for T in np.linspace(15.0, 100.0, 86):
        count = int(np.sum(below100.ordinates <= T))
        assert abs(count - below100.counting_main_terms(T)) <= 2, T


def _rational_directions(n_max):
    # the endpoints 0/1 and 1/1 are the tangential directions psi = +-pi/2
    num, den = farey_pairs(n_max)
    frac = np.concatenate(([0.0], num / den, [1.0]))
    return math.pi / 2 - frac * math.pi


@pytest.mark.acceptance(7, "non-escaping set structure")
def test_surviving_set_structure():
    dirs = _rational_directions(6)
    holes = HoleConfiguration.one_hole(1.0)
    with Timer(60):
        found = 0
        for beta in (4.0, 2.0):
            res = surviving_psi_intervals(beta, holes, 200.0, psi_grid=100_000)
            found += len(res)
            for lo, hi in res:
                inside = (dirs >= lo - res.resolution) & (dirs <= hi + res.resolution)
                assert inside.any(), (beta, lo, hi)
    assert found > 0


@pytest.mark.acceptance(8, "identity suite")
def test_identity_suite():
    with Timer(60):
        tab = tables_up_to(1000)
        for n in range(1, 1001):
            m = np.arange(1, n + 1)
            m = m[np.gcd(m, n) == 1]
            total = np.sum(np.sin(np.pi * m / n) ** 2)
            assert abs(total - (tab.phi[n] - tab.mu[n]) / 2) < 1e-9

        for q in range(1, 101):
            chars = character_table(q)
            mat = chars.matrix()
            units = np.array([math.gcd(a, q) == 1 for a in range(q)])
            gram = np.conj(mat) @ mat.T
            assert np.allclose(gram, units.sum() * np.eye(len(chars)), atol=1e-12)
            cols = np.conj(mat).T @ mat / len(chars)
            assert np.allclose(cols, np.diag(units.astype(float)), atol=1e-12)

        rng = np.random.default_rng(7)
        checked = 0
        while checked < 100:
            s = complex(rng.uniform(-29, 29), rng.uniform(-100, 100))
            if abs(s - 1) < 0.1 or abs(s) < 0.1 or (s.imag == 0 and s.real <= 0):
                continue
            lhs = zl.riemann_zeta(1 - s)
            rhs = 2 ** (1 - s) * math.pi ** (-s) * np.cos(np.pi * s / 2) * np.exp(loggamma(s)) * zl.riemann_zeta(s)
            assert abs(lhs - rhs) < 1e-8 * (1 + abs(lhs)), s
            checked += 1

        for q in (2, 3, 4, 6):
            n = np.arange(1, 1000 * q + 1, dtype=np.int64)
            w = q_hole_terms(q, n)
            nt = n // np.gcd(n, q)
            grouped = np.zeros(1001, dtype=np.int64)
            keep = nt <= 1000
            np.add.at(grouped, nt[keep], w[keep])
            m = np.arange(1001)
            assert np.array_equal(grouped[1:], (m * tab.phi[: 1001] * q * q)[1:])
