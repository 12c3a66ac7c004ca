import numpy as np
import pytest
from hypothesis import given, strategies as st

from virorbit.circle import (MonotoneGridFunction, SampledDensity, differentiate, grid,
                             integrate_arc, integrate_period, invert_monotone, resample_samples)
from virorbit.errors import NotMonotone

TWO_PI = 2 * np.pi


def density(f, weight, n=256):
    return SampledDensity.from_function(f, weight, n)


def test_derivative_of_constant_is_zero():
    d = differentiate(SampledDensity.constant(3.2, -1, 64))
    assert d.weight == 0
    assert np.abs(d.samples).max() < 1e-12


def test_derivative_of_sine():
    f = density(lambda x: np.sin(TWO_PI * x), 0, 128)
    x = grid(128)
    assert np.abs(differentiate(f).samples - TWO_PI * np.cos(TWO_PI * x)).max() < 1e-10


def test_derivative_of_exp_sin_matches_oracle(oracle):
    f = density(lambda x: np.exp(np.sin(TWO_PI * x)), 0, oracle["grid_size"])
    got = differentiate(f).samples[oracle["indices"]]
    assert np.abs(got - oracle["derivative_exp_sin"]).max() < 1e-8


@given(st.integers(1, 32))
def test_second_derivative_of_modes(k):
    n = 256
    x = grid(n)
    f = SampledDensity(0, np.sin(TWO_PI * k * x))
    dd = differentiate(differentiate(f))
    assert np.abs(dd.samples + (TWO_PI * k) ** 2 * np.sin(TWO_PI * k * x)).max() < 1e-8 * (TWO_PI * k) ** 2


def test_period_integrals():
    assert integrate_period(SampledDensity.constant(1.0, 1, 64)) == pytest.approx(1.0, abs=1e-14)
    assert abs(integrate_period(density(lambda x: np.sin(TWO_PI * x), 1, 64))) < 1e-14
    assert integrate_period(density(lambda x: np.cos(TWO_PI * x) ** 2, 1, 64)) == pytest.approx(0.5, abs=1e-12)


def _random_smooth(seed, weight, n=128):
    r = np.random.default_rng(seed)
    x = grid(n)
    a, b = r.normal(size=3), r.normal(size=3)
    s = sum(a[k] * np.cos(TWO_PI * (k + 1) * x) + b[k] * np.sin(TWO_PI * (k + 1) * x) for k in range(3))
    return SampledDensity(weight, s + r.normal())


@given(st.integers(0, 2 ** 31))
def test_integration_by_parts(seed):
    f, g = _random_smooth(seed, 0), _random_smooth(seed + 1, 0)
    val = integrate_period(differentiate(f) * g + f * differentiate(g))
    assert abs(val) < 1e-10


def test_arcs():
    one = SampledDensity.constant(1.0, 1, 64)
    assert integrate_arc(one, 0, 64) == pytest.approx(1.0, abs=1e-13)
    assert integrate_arc(one, 0, 32) == pytest.approx(0.5, abs=1e-13)


@given(st.integers(-200, 200))
def test_full_period_arc_is_shift_independent(k):
    f = _random_smooth(7, 1)
    assert integrate_arc(f, k, k + f.grid_size) == pytest.approx(integrate_period(f), abs=1e-12)


def test_invert_monotone_examples():
    g = MonotoneGridFunction.from_function(lambda x: x + 0.25, 64)
    assert invert_monotone(g, 0.5) == pytest.approx(0.25, abs=1e-12)
    assert invert_monotone(g, 3.5) == pytest.approx(3.25, abs=1e-12)
    h = MonotoneGridFunction.from_function(lambda x: x + 0.1 * np.sin(TWO_PI * x), 256)
    assert invert_monotone(h, h(0.37)) == pytest.approx(0.37, abs=1e-10)


@given(st.floats(-0.1, 0.1), st.floats(-0.02, 0.02), st.floats(-3.0, 3.0))
def test_invert_after_evaluate(a, b, y):
    g = MonotoneGridFunction.from_function(
        lambda x: x + a * np.sin(TWO_PI * x) + b * np.cos(4 * np.pi * x) + 0.1, 128)
    x = invert_monotone(g, y)
    assert g(x) == pytest.approx(y, abs=1e-10)


def test_non_monotone_rejected():
    with pytest.raises(NotMonotone):
        MonotoneGridFunction.from_function(lambda x: x + 0.3 * np.sin(TWO_PI * x), 64)


def test_bad_grid_size_rejected():
    with pytest.raises(ValueError):
        SampledDensity(0, np.zeros(12))


def test_weight_arithmetic_and_json_round_trip():
    f = _random_smooth(3, -1)
    g = _random_smooth(4, 2)
    assert (f * g).weight == 1
    back = SampledDensity.from_json(f.to_json())
    assert back.weight == f.weight and np.array_equal(back.samples, f.samples)


def test_resample_is_exact_for_band_limited():
    f = _random_smooth(5, 0, 64)
    up = resample_samples(f.samples, 256)
    back = resample_samples(up, 64)
    assert np.abs(back - f.samples).max() < 1e-12
    assert np.abs(up[::4] - f.samples).max() < 1e-12
