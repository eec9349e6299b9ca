import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circle_escape.billiard import HoleConfiguration
from circle_escape.errors import DomainError
from circle_escape.survival import (
    g,
    p_infinity,
    p_infinity_one_hole,
    p_infinity_q_holes,
    p_infinity_two_holes,
    q_hole_terms,
    theta_reduced,
)


def phi_mu(n):
    phi = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
    m, k, p = n, 0, 2
    mu = None
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                mu = 0
                break
            k += 1
        p += 1
    if mu is None:
        mu = (-1) ** (k + (1 if m > 1 else 0))
    return phi, mu


def oracle_two_holes(r, q, delta):
    # the arc sum with theta' kept as an exact fraction of 2 pi
    total = 0.0
    for n in range(1, int(2 * math.pi / delta) + 1):
        phi, mu = phi_mu(n)
        frac = Fraction(n * r, q) % 1
        tp = 2 * math.pi / n * float(frac)
        x1 = 2 * math.pi / n - tp - delta
        x2 = tp - delta
        total += n * (phi - mu) * ((x1 * x1 if x1 > 0 else 0.0) + (x2 * x2 if x2 > 0 else 0.0))
    return total / (8 * math.pi)


def test_g():
    assert np.array_equal(g([-1.0, 0.0, 2.0]), [0.0, 0.0, 4.0])


def test_theta_reduced_examples():
    assert theta_reduced(2, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert theta_reduced(3, math.pi) == pytest.approx(math.pi / 3)
    assert theta_reduced(4, 2 * math.pi / 3) == pytest.approx(math.pi / 6)
    assert theta_reduced(4, 0.0, rational=(1, 3)) == pytest.approx(math.pi / 6)
    assert theta_reduced(2, 0.0, rational=(1, 2)) == 0.0


def test_hand_values():
    assert p_infinity_two_holes(0.0, math.pi / 2).value == pytest.approx(5 * math.pi / 32, rel=1e-14)
    assert p_infinity_two_holes(math.pi, math.pi / 2).value == pytest.approx(math.pi / 8, rel=1e-14)
    assert p_infinity_two_holes(0.0, math.pi).value == 0.0
    assert p_infinity_two_holes(1.0, 3.5).value == 0.0


@pytest.mark.parametrize("r,q", [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (1, 5), (2, 7), (1, 6)])
@pytest.mark.parametrize("delta", [0.9, 0.21, 0.037])
def test_against_exact_fraction_oracle(r, q, delta):
    got = p_infinity_two_holes(2 * math.pi * r / q, delta, rational=(r, q)).value
    assert got == pytest.approx(oracle_two_holes(r, q, delta), rel=1e-12)
    # floating theta' agrees with the exact path
    assert p_infinity_two_holes(2 * math.pi * r / q, delta).value == pytest.approx(got, rel=1e-9)


def test_q_two_matches_opposite_holes():
    assert p_infinity_q_holes(2, math.pi / 2).value == pytest.approx(math.pi / 8, rel=1e-14)
    for delta in (0.1, 0.01, math.pi / 2, 0.0123):
        a = p_infinity_q_holes(2, delta).value
        b = p_infinity_two_holes(math.pi, delta).value
        assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("q", [2, 3, 4, 6])
def test_regrouping_identity_integer(q):
    # every n with n / gcd(n, q) <= 1000 satisfies n <= 1000 q
    n = np.arange(1, 1000 * q + 1, dtype=np.int64)
    w = q_hole_terms(q, n)
    nt = n // np.gcd(n, q)
    grouped = np.zeros(1001, dtype=np.int64)
    keep = nt <= 1000
    np.add.at(grouped, nt[keep], w[keep])
    for m in range(1, 1001):
        assert grouped[m] == m * phi_mu(m)[0] * q * q


def test_q_two_grouped_example():
    n = np.arange(1, 20, dtype=np.int64)
    w = q_hole_terms(2, n)
    nt = n // np.gcd(n, 2)
    assert int(np.sum(w[nt == 2])) == 8 == 2 * 1 * 4


@pytest.mark.parametrize("theta", [0.0, math.pi, 2 * math.pi / 3])
def test_monotone_in_delta(theta):
    deltas = np.linspace(0.005, math.pi + 0.1, 1000)
    vals = np.array([p_infinity_two_holes(theta, d).value for d in deltas])
    assert np.all(np.diff(vals) <= 1e-12 * np.maximum(vals[:-1], 1.0))
    assert np.all(vals >= 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 2 * math.pi, exclude_min=True, exclude_max=True), st.floats(0.01, 3.5))
def test_mirror_symmetry(theta, delta):
    a = p_infinity_two_holes(theta, delta).value
    b = p_infinity_two_holes(2 * math.pi - theta, delta).value
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_small_delta_leading_order():
    d = 1e-4
    assert d * p_infinity_two_holes(0.0, d).value == pytest.approx(2.0, rel=0.05)
    assert d * p_infinity_two_holes(math.pi, d).value == pytest.approx(1.0, rel=0.05)


def test_q_holes_leading_order():
    d = 1e-4
    for q in (3, 4, 6):
        assert q * d * p_infinity_q_holes(q, d).value == pytest.approx(2.0, rel=0.01)


def test_dispatch_and_metadata():
    one = p_infinity(HoleConfiguration.one_hole(0.3))
    assert one.value == p_infinity_one_hole(0.3).value
    assert one.terms_used == int(2 * math.pi / 0.3)
    qh = p_infinity(HoleConfiguration.equal_holes(0.2, 3))
    assert qh.value == p_infinity_q_holes(3, 0.2).value
    assert float(qh) == qh.value


def test_domain_errors():
    with pytest.raises(DomainError):
        p_infinity_two_holes(0.0, 0.0)
    with pytest.raises(DomainError):
        p_infinity_q_holes(1, 0.1)
    with pytest.raises(DomainError):
        p_infinity_q_holes(3, -0.1)
