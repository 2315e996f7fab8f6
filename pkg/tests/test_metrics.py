import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fracsph.metrics import error_report


def test_identical_fields():
    ref = np.sin(np.linspace(0, 3, 20))
    rep = error_report(ref, ref)
    assert rep.l2 == 0.0 and rep.r2 == 1.0
    assert np.all(rep.abs_errors == 0.0)


def test_constant_reference():
    rep = error_report([0.0, 2.0], [1.0, 1.0])
    assert not rep.r2_defined
    np.testing.assert_array_equal(rep.abs_errors, [1.0, 1.0])
    assert rep.l2 == pytest.approx(1.0)


def test_ten_percent_bias():
    ref = np.linspace(-2, 3, 17)
    assert error_report(1.1 * ref, ref).l2 == pytest.approx(0.1, rel=1e-14)


def test_zero_reference_uses_absolute_norm():
    rep = error_report([3.0, 4.0], [0.0, 0.0])
    assert rep.l2_absolute
    assert rep.l2 == 5.0
    assert rep.r2 is None


def test_exclusions():
    rep = error_report([1.0, 2.0, 3.0, np.nan], [1.0, 2.0, 3.5, 0.0], exclude=[False, False, False, True])
    assert rep.n_points == 3 and rep.excluded_points == 1
    assert math.isnan(rep.abs_errors[3])
    assert rep.l2 == pytest.approx(0.5 / math.sqrt(1 + 4 + 12.25))


def test_bad_lengths():
    with pytest.raises(ValueError):
        error_report([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        error_report([1.0], [1.0])


values = arrays(np.float64, st.integers(3, 40), elements=st.floats(-100, 100))


@settings(max_examples=200)
@given(values, st.floats(0.01, 100), st.booleans(), st.integers(0, 2**32 - 1))
def test_scale_and_permutation(ref, scale, flip, seed):
    assume(np.ptp(ref) > 1e-3 and np.linalg.norm(ref) > 1e-3)
    noise = np.random.default_rng(seed).normal(size=ref.shape)
    approx = ref + noise
    base = error_report(approx, ref)
    c = -scale if flip else scale
    scaled = error_report(c * approx, c * ref)
    assert scaled.l2 == pytest.approx(base.l2, rel=1e-9)
    assert scaled.r2 == pytest.approx(base.r2, rel=1e-9, abs=1e-9)
    np.testing.assert_allclose(scaled.abs_errors, abs(c) * base.abs_errors, rtol=1e-9, atol=1e-9)
    perm = np.random.default_rng(seed).permutation(len(ref))
    shuffled = error_report(approx[perm], ref[perm])
    assert shuffled.l2 == pytest.approx(base.l2, rel=1e-12)
    assert shuffled.r2 == pytest.approx(base.r2, rel=1e-9, abs=1e-12)
    assert base.r2 <= 1.0
