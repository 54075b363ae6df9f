import math
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majorants.seqz import (
    NormConsistencyError,
    SeqZ,
    autocorrelation,
    conv_power,
    convolve,
    involute,
    lp_norm,
    majorant_coeffs,
    norm_2j_pow,
    norm_2j_pow_direct,
    norm_2j_pow_grid,
)


def seq(start, *vals):
    return SeqZ(start, np.array(vals, dtype=complex))


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
coefs = st.builds(complex, finite, finite)


@st.composite
def sequences(draw, max_width=8):
    vals = draw(st.lists(coefs, min_size=1, max_size=max_width))
    start = draw(st.integers(-5, 5))
    return SeqZ(start, np.array(vals))


def close(x, y, rtol=1e-12):
    scale = max(x.max_abs(), y.max_abs(), 1.0)
    return x.max_diff(y) <= rtol * scale


# -- representation -----------------------------------------------------------


def test_trimming_is_canonical():
    x = seq(-2, 0, 0, 1, 2, 0)
    assert x.start == 0 and list(x.coeffs) == [1, 2]
    assert seq(3, 0, 0) == SeqZ.zero()
    assert SeqZ.zero().start == 0 and SeqZ.zero().width == 0


def test_tiny_values_are_kept_not_rounded():
    x = seq(0, 1e-200, 1.0)
    assert x.start == 0 and x[0] == 1e-200
    assert seq(0, 1e-301, 1.0).start == 1


def test_equality_is_indexwise():
    assert seq(0, 1, 2) == SeqZ.from_mapping({0: 1, 1: 2, 5: 0})
    assert seq(0, 1, 2) != seq(1, 1, 2)


def test_indexing_outside_window_is_zero():
    x = seq(2, 1, 2)
    assert x[0] == 0 and x[3] == 2 and x[100] == 0


def test_immutable():
    x = seq(0, 1, 2)
    with pytest.raises(ValueError):
        x.coeffs[0] = 5


def test_index_overflow_rejected():
    with pytest.raises(OverflowError):
        SeqZ.delta(sys.maxsize).shift(1)


# -- convolve ---------------------------------------------------------------


def test_convolve_binomial():
    one_one = seq(0, 1, 1)
    assert convolve(one_one, one_one) == seq(0, 1, 2, 1)


def test_convolve_zero_and_delta():
    x = seq(-1, 1, 2j, -3)
    assert convolve(x, SeqZ.zero()).is_zero
    assert convolve(x, SeqZ.delta(4)) == x.shift(4)


def test_convolve_window():
    z = convolve(seq(-2, 1, 1), seq(3, 1, 0, 1))
    assert (z.start, z.end) == (1, 4)


def test_convolve_compensated_cancellation():
    # naive left-to-right summation loses the 1.0 entirely
    x = seq(0, 1e16, 1.0, -1e16)
    y = seq(0, 1.0, 1.0, 1.0)
    assert convolve(x, y)[2] == 1.0


@settings(max_examples=60, deadline=None)
@given(sequences(), sequences(), sequences())
def test_convolve_commutative_associative(x, y, z):
    assert close(convolve(x, y), convolve(y, x))
    assert close(convolve(convolve(x, y), z), convolve(x, convolve(y, z)), 1e-12)


# -- involute / powers --------------------------------------------------------


def test_involute_examples():
    r = involute(seq(0, 1, 1j))
    assert r[0] == 1 and r[-1] == -1j
    assert involute(SeqZ.delta(3)) == SeqZ.delta(-3)


@settings(max_examples=60, deadline=None)
@given(sequences(), sequences())
def test_involute_properties(x, y):
    assert involute(involute(x)) == x
    assert close(involute(convolve(x, y)), convolve(involute(x), involute(y)))


def test_conv_power_examples():
    x = seq(-1, 2, 1j, 3)
    assert conv_power(seq(0, 1, 1), 2) == seq(0, 1, 2, 1)
    assert conv_power(x, 1) == x
    assert conv_power(x, 0) == SeqZ.delta(0)
    with pytest.raises(ValueError):
        conv_power(x, -1)


def test_autocorrelation_is_hermitian():
    x = seq(1, 1, 2 - 1j, 0.5j)
    r = autocorrelation(x)
    assert close(r, involute(r))


# -- norms ----------------------------------------------------------------


@pytest.mark.parametrize("x, j, expected", [
    (seq(0, 1, 1), 2, 6.0),
    (seq(0, 1, -1, 1), 2, 19.0),
    (SeqZ.zero(), 3, 0.0),
])
def test_norm_examples(x, j, expected):
    assert norm_2j_pow(x, j) == pytest.approx(expected, rel=1e-14, abs=0)
    assert norm_2j_pow_direct(x, j) == expected


@settings(max_examples=80, deadline=None)
@given(sequences(max_width=12))
def test_parseval(x):
    expected = math.fsum(abs(v) ** 2 for v in x.coeffs)
    assert norm_2j_pow(x, 1) == pytest.approx(expected, rel=1e-12)


def test_path_agreement_random():
    rng = np.random.default_rng(7)
    for _ in range(60):
        width = int(rng.integers(1, 33))
        j = int(rng.integers(1, 5))
        x = SeqZ(int(rng.integers(-10, 10)), rng.normal(size=width) + 1j * rng.normal(size=width))
        direct, grid = norm_2j_pow_direct(x, j), norm_2j_pow_grid(x, j)
        assert abs(direct - grid) <= 1e-9 * direct


def test_norm_consistency_error_on_disagreement(monkeypatch):
    import majorants.seqz as mod
    monkeypatch.setattr(mod, "norm_2j_pow_grid", lambda x, j: 2 * norm_2j_pow_direct(x, j))
    with pytest.raises(NormConsistencyError):
        mod.norm_2j_pow(seq(0, 1, 1), 2)


def test_lp_norm_matches_even_moment():
    x = seq(0, 1, 1j, 1)
    assert lp_norm(x, 4.0) ** 4 == pytest.approx(norm_2j_pow_direct(x, 2), rel=1e-12)
    assert lp_norm(x, 2.0) == pytest.approx(math.sqrt(3), rel=1e-12)


# -- majorant coefficients ------------------------------------------------


def test_majorant_coeffs_examples():
    assert majorant_coeffs(seq(0, 1, 1, 1), 2) == seq(-2, 1, 3, 6, 7, 6, 3, 1)
    assert majorant_coeffs(SeqZ.delta(4, 2.0), 2) == SeqZ.delta(4, 8.0)
    x = seq(-1, 0.5, 2, 1)
    assert majorant_coeffs(x, 1) == x


def test_majorant_coeffs_nonnegative_and_self_dual():
    rng = np.random.default_rng(3)
    for _ in range(50):
        b = SeqZ(int(rng.integers(-3, 3)), rng.random(int(rng.integers(1, 9))))
        for j in (1, 2, 3):
            F = majorant_coeffs(b, j)
            assert F.is_real
            assert F.coeffs.real.min() >= -1e-12 * F.max_abs()
            dual = math.fsum(F[n].real * b[n].real for n in b.indices())
            assert dual == pytest.approx(norm_2j_pow_direct(b, j), rel=1e-10)
