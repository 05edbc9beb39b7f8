import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from metapop_hj.errors import NoRoot
from metapop_hj.roots import bisect, expand_upper, shrink_toward


@given(st.floats(-10, 10))
def test_bisect_linear(root):
    x = bisect(lambda t: t - root, -20.0, 20.0)
    assert abs(x - root) <= 1e-11


def test_bisect_requires_sign_change():
    with pytest.raises(NoRoot):
        bisect(lambda t: t * t + 1, -1.0, 1.0)


def test_bisect_endpoint_root():
    assert bisect(lambda t: t, 0.0, 1.0) == 0.0


def test_bisect_decreasing():
    assert bisect(lambda t: math.cos(t), 0.0, 3.0) == pytest.approx(math.pi / 2, abs=1e-11)


def test_expand_upper():
    assert expand_upper(lambda t: t - 100.0, 1.0, True) >= 100.0
    with pytest.raises(NoRoot):
        expand_upper(lambda t: -1.0, 1.0, True, limit=1e3)


def test_shrink_toward():
    x = shrink_toward(lambda t: t - 1e-3, 0.0, 1.0, False)
    assert 0 < x < 1e-3
    with pytest.raises(NoRoot):
        shrink_toward(lambda t: 1.0, 0.0, 1.0, False)
