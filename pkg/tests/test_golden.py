import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidden_action.golden import golden_max


@given(c=st.floats(-5, 5))
def test_parabola(c):
    x, fx = golden_max(lambda x: -(x - c) ** 2, -10.0, 10.0)
    assert x == pytest.approx(c, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("lo, hi, expected", [(0.0, 1.0, 1.0), (3.0, 5.0, 3.0)])
def test_boundary_optimum(lo, hi, expected):
    x, _ = golden_max(lambda x: -(x - 2.0) ** 2, lo, hi)
    assert x == pytest.approx(expected, abs=1e-7)


def test_vectorized():
    c = np.array([0.1, 0.5, 0.9])
    x, _ = golden_max(lambda x: -(x - c) ** 2, np.zeros(3), np.ones(3))
    np.testing.assert_allclose(x, c, atol=1e-6)
