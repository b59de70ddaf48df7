import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize

from nhuncc.exponent import (
    ExponentProfile,
    critical_x_star,
    critical_x_star_dual,
    error_exponent,
    lambda_N,
    min_entropy,
    rate_function_I,
    renyi_entropy,
)
from nhuncc.params import binary_entropy


def renyi_direct(p, a):
    return math.log2(p**a + (1 - p) ** a) / (1 - a)


def I_oracle(p, x):
    """Independent sup over alpha with a bounded scalar optimiser (no shared code)."""
    f = lambda a: -(a * x - (1 + a) * math.log2(p ** (1 / (1 + a)) + (1 - p) ** (1 / (1 + a))))
    best = optimize.minimize_scalar(f, bounds=(-1 + 1e-9, 200), method="bounded", options={"xatol": 1e-12})
    return max(-best.fun, -x + min_entropy(p))  # alpha <= -1 branch is linear with value -x + H_min at -1


@pytest.mark.parametrize("a", [0.3, 0.5, 2.0, 7.0])
def test_renyi_uniform(a):
    assert renyi_entropy(0.5, a) == pytest.approx(1.0, abs=1e-12)


def test_renyi_values():
    assert renyi_entropy(0.1, 0.5) == pytest.approx(2 * math.log2(math.sqrt(0.1) + math.sqrt(0.9)), abs=1e-12)
    assert renyi_entropy(0.1, 0.5) == pytest.approx(0.678072, abs=1e-6)
    assert renyi_entropy(0.1, 1e6) == pytest.approx(-math.log2(0.9), abs=1e-6)
    assert renyi_entropy(0.1, 1.0) == binary_entropy(0.1)
    assert renyi_entropy(0.1, math.inf) == min_entropy(0.1)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            renyi_entropy(0.1, bad)
    with pytest.raises(ValueError):
        renyi_entropy(0.0, 0.5)


@given(p=st.floats(0.01, 0.49), a=st.floats(0.05, 50))
def test_renyi_matches_direct_and_is_monotone(p, a):
    if abs(a - 1) > 1e-3:
        assert renyi_entropy(p, a) == pytest.approx(renyi_direct(p, a), abs=1e-9)
    assert renyi_entropy(p, a * 1.5) <= renyi_entropy(p, a) + 1e-12


def test_lambda_values_and_continuity():
    p = 0.1
    assert lambda_N(p, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert lambda_N(p, 1.0) == pytest.approx(renyi_entropy(p, 0.5), abs=1e-12)
    assert lambda_N(p, 2.0) == pytest.approx(2 * renyi_entropy(p, 1 / 3), abs=1e-12)
    assert lambda_N(p, -1 - 1e-9) == pytest.approx(-min_entropy(p), abs=1e-6)
    assert lambda_N(p, -1 + 1e-9) == pytest.approx(-min_entropy(p), abs=1e-6)


def test_lambda_convex():
    a = np.linspace(-0.99, 10, 400)
    v = np.array([lambda_N(0.07, x) for x in a])
    assert np.all(np.diff(v, 2) >= -1e-10)


@pytest.mark.parametrize("p", [0.02, 0.05, 0.1, 0.2, 0.35])
def test_rate_function_against_oracle(p):
    for x in np.linspace(0.05, 0.99, 25):
        assert rate_function_I(p, x) == pytest.approx(I_oracle(p, x), abs=1e-8)


@pytest.mark.parametrize("p", [0.05, 0.1, 0.3])
def test_rate_function_zero_at_shannon(p):
    assert rate_function_I(p, binary_entropy(p)) == pytest.approx(0.0, abs=1e-10)


def test_rate_function_uniform_noise():
    for x in (0.1, 0.5, 0.9, 1.0):
        assert rate_function_I(0.5, x) == pytest.approx(1 - x, abs=1e-9)


def test_rate_function_convex():
    xs = np.linspace(0.02, 1.0, 120)
    v = np.array([rate_function_I(0.1, x) for x in xs])
    assert np.all(v[1:-1] <= (v[:-2] + v[2:]) / 2 + 1e-9)


def test_rate_function_at_one():
    p = 0.1
    assert rate_function_I(p, 1.0) == pytest.approx(-1 - (math.log2(p) + math.log2(1 - p)) / 2, abs=1e-12)
    near = [rate_function_I(p, 1 - d) for d in (1e-3, 1e-5, 1e-7)]
    assert near == sorted(near) and rate_function_I(p, 1.0) - near[-1] < 1e-3


@pytest.mark.parametrize("p", [0.05, 0.1, 0.2])
def test_x_star_duality(p):
    a, b = critical_x_star(p), critical_x_star_dual(p)
    assert abs(a - b) <= 1e-5
    assert b > binary_entropy(p)


def test_x_star_limits():
    ps = [0.3, 0.1, 0.01, 1e-4, 1e-7]
    xs = [critical_x_star_dual(p) for p in ps]
    assert xs == sorted(xs, reverse=True) and xs[-1] < 1e-2
    for p in (0.01, 0.25, 0.45):
        assert critical_x_star_dual(p) > binary_entropy(p)


@pytest.mark.parametrize("p", [0.02, 0.05, 0.1, 0.2])
def test_linear_branch_identity(p):
    xs = critical_x_star_dual(p)
    for R in np.linspace(0.01, 1 - xs - 1e-3, 10):
        assert error_exponent(R, p) + R + renyi_entropy(p, 0.5) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.05, 0.1, 0.2])
def test_exponent_continuity_and_limit(p):
    xs = critical_x_star_dual(p)
    d = 1e-5
    assert abs(error_exponent(1 - xs - d, p) - error_exponent(1 - xs + d, p)) <= 1e-4
    cap = 1 - binary_entropy(p)
    assert 0 <= error_exponent(cap - 1e-4, p) <= 1e-4
    with pytest.raises(ValueError):
        error_exponent(cap, p)


def test_exponent_monotone_nonnegative():
    p = 0.08
    cap = 1 - binary_entropy(p)
    v = [error_exponent(R, p) for R in np.linspace(0.01, cap - 1e-6, 200)]
    assert all(x >= -1e-12 for x in v)
    assert all(a >= b - 1e-12 for a, b in zip(v, v[1:]))


def test_profile():
    prof = ExponentProfile.of(0.1)
    assert prof.min_entropy <= prof.renyi_half
    assert prof.shannon < prof.x_star <= 1
    assert prof.capacity == pytest.approx(1 - binary_entropy(0.1))


def test_reference_exponent_value():
    # R = 0.5 lies above 1 - x*(0.05), on the curved branch
    assert 0.5 > 1 - critical_x_star_dual(0.05)
    assert error_exponent(0.5, 0.05) == pytest.approx(I_oracle(0.05, 0.5), abs=1e-9)
    assert error_exponent(0.5, 0.05) == pytest.approx(0.04139, abs=1e-5)
