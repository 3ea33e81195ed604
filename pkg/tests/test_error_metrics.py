import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stereoquant import median_symmetric_accuracy, rms_error
from stereoquant.errors import EmptySeries, LengthMismatch, NonPositiveValue


def test_rms_identical_is_zero():
    assert rms_error([1.0, 2.5, 7.0], [1.0, 2.5, 7.0]) == 0.0


def test_rms_single():
    assert rms_error([3.0], [0.0]) == 3.0


def test_rms_hand_value():
    assert rms_error([1, 2, 3], [2, 2, 2]) == pytest.approx(0.816496580927726, rel=1e-12)


def test_msa_identical_is_zero():
    assert median_symmetric_accuracy([0.1, 2, 3], [0.1, 2, 3]) == 0.0


def test_msa_constant_ratio_e():
    o = np.array([0.5, 1.0, 4.0, 9.0])
    assert median_symmetric_accuracy(math.e * o, o) == pytest.approx(171.8281828459045, rel=1e-12)


def test_msa_even_length_median_averages():
    # |ln ratios| = ln2, ln4 -> median = ln(2*sqrt2)... mean of ln2 and 2ln2 = 1.5 ln2
    got = median_symmetric_accuracy([2.0, 1.0], [1.0, 4.0])
    assert got == pytest.approx(100 * (2**1.5 - 1), rel=1e-12)


@given(st.lists(st.tuples(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6)), min_size=1, max_size=30))
def test_msa_symmetric_and_rms_swap_invariant(pairs):
    p, o = np.array(pairs).T
    assert median_symmetric_accuracy(p, o) == pytest.approx(median_symmetric_accuracy(o, p), rel=1e-12, abs=1e-12)
    assert rms_error(p, o) == pytest.approx(rms_error(o, p), rel=1e-12)
    assert median_symmetric_accuracy(p, o) >= 0


def test_errors():
    with pytest.raises(LengthMismatch):
        rms_error([1, 2], [1])
    with pytest.raises(LengthMismatch):
        median_symmetric_accuracy([1, 2], [1])
    with pytest.raises(EmptySeries):
        rms_error([], [])
    with pytest.raises(NonPositiveValue):
        median_symmetric_accuracy([1, 0], [1, 1])
    with pytest.raises(NonPositiveValue):
        median_symmetric_accuracy([1, 1], [1, -2])
