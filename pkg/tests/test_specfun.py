import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtxt import log_gamma, log_multigamma

# high-precision reference values (50-digit arbitrary-precision arithmetic)
LOG_GAMMA_5_5 = 3.9578139676187163
LOG_MULTIGAMMA_3_3 = 2.6949248798069647
LOG_HALF_PI = 0.4515827052894549  # ln Gamma_2(2) = ln(pi/2)


def test_log_gamma_integers():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(2.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(5.0) == pytest.approx(np.log(24.0), rel=1e-14)


def test_log_gamma_half_integers():
    assert log_gamma(0.5) == pytest.approx(0.5 * np.log(np.pi), rel=1e-14)
    assert log_gamma(5.5) == pytest.approx(LOG_GAMMA_5_5, rel=1e-13)


def test_log_gamma_domain():
    with pytest.raises(ValueError):
        log_gamma(0.0)
    with pytest.raises(ValueError):
        log_gamma(-1.5)
    with pytest.raises(ValueError):
        log_gamma(np.array([1.0, -0.1]))


def test_log_gamma_array():
    z = np.array([0.5, 1.0, 5.5])
    out = log_gamma(z)
    assert out.shape == (3,)
    assert out[2] == pytest.approx(LOG_GAMMA_5_5, rel=1e-13)


def test_log_gamma_recurrence_grid():
    # ln Gamma(z + 1) = ln z + ln Gamma(z)
    for z in (0.5, 1.0, 2.5, 10.0, 100.0, 1e4, 1e6):
        assert log_gamma(z + 1.0) == pytest.approx(
            np.log(z) + log_gamma(z), rel=1e-12, abs=1e-12
        )


def test_log_gamma_large_argument():
    # Stirling check: ln Gamma(z) ~ (z - 1/2) ln z - z + ln(2 pi)/2 + 1/(12 z)
    z = 1e6
    stirling = (z - 0.5) * np.log(z) - z + 0.5 * np.log(2.0 * np.pi) + 1.0 / (12.0 * z)
    assert log_gamma(z) == pytest.approx(stirling, rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.5, max_value=1e5))
def test_log_gamma_recurrence_property(z):
    assert log_gamma(z + 1.0) == pytest.approx(
        np.log(z) + log_gamma(z), rel=1e-11, abs=1e-11
    )


def test_log_multigamma_reduces_to_scalar():
    for z in (0.7, 1.0, 3.5, 40.0):
        assert log_multigamma(1, z) == pytest.approx(log_gamma(z), rel=1e-15)


def test_log_multigamma_known_values():
    assert log_multigamma(2, 2.0) == pytest.approx(LOG_HALF_PI, rel=1e-13)
    assert log_multigamma(3, 3.0) == pytest.approx(LOG_MULTIGAMMA_3_3, rel=1e-13)


def test_log_multigamma_product_form():
    # direct product check against the scalar function
    d, z = 4, 6.25
    expected = d * (d - 1) / 4.0 * np.log(np.pi) + sum(
        log_gamma(z - j / 2.0) for j in range(d)
    )
    assert log_multigamma(d, z) == pytest.approx(expected, rel=1e-14)


def test_log_multigamma_domain():
    with pytest.raises(ValueError):
        log_multigamma(0, 1.0)
    with pytest.raises(ValueError):
        log_multigamma(3, 1.0)  # needs z > 1
    with pytest.raises(ValueError):
        log_multigamma(2, np.array([2.0, 0.5]))


def test_log_multigamma_array():
    z = np.array([2.0, 3.0, 10.0])
    out = log_multigamma(2, z)
    assert out.shape == (3,)
    assert out[0] == pytest.approx(LOG_HALF_PI, rel=1e-13)
