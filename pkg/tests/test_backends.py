"""The compiled and numpy kernel tiers must agree bit for bit.

Both walk the same triple tables in the same order, so every intermediate
sum sees the same operands in the same sequence.  If the extension is not
built these tests exercise only the numpy tier's self-consistency.
"""

import numpy as np
import pytest

from finsq import _kernels
from finsq.jetspace import jet_space, xy_space

try:
    from finsq import _jetcore
except ImportError:
    _jetcore = None

SPACES = [
    jet_space((0,), (6,)),
    jet_space((0, 0, 0), (4,)),
    xy_space(3, 3, 2, 4, 5),
    xy_space(2, 2, 1, 6, 7),
]


def _random_coeffs(space, rng, positive_lead=False):
    c = rng.uniform(-1.0, 1.0, space.size)
    if positive_lead:
        c[0] = rng.uniform(0.5, 2.0)
    return c


@pytest.mark.skipif(_jetcore is None, reason="compiled kernels not built")
@pytest.mark.parametrize("space", SPACES, ids=lambda s: f"caps{s.group_caps}t{s.total_cap}")
class TestCompiledMatchesNumpy:
    def test_mul_bitwise(self, space, rng):
        a = _random_coeffs(space, rng)
        b = _random_coeffs(space, rng)
        out_c = np.zeros(space.size)
        _jetcore.mul(a, b, out_c, space.mul_i, space.mul_j, space.mul_k)
        out_n = np.zeros(space.size)
        _kernels.np_mul(space, a, b, out_n)
        assert np.array_equal(out_c, out_n)

    def test_div_bitwise(self, space, rng):
        a = _random_coeffs(space, rng)
        b = _random_coeffs(space, rng, positive_lead=True)
        out_c = np.zeros(space.size)
        acc_c = np.zeros(space.size)
        _jetcore.div(a, b, out_c, acc_c, space.div_i, space.div_j, space.div_k,
                     space.div_off, space.deg_off, space.total_cap + 1)
        out_n = np.zeros(space.size)
        acc_n = np.zeros(space.size)
        _kernels.np_div(space, a, b, out_n, acc_n)
        assert np.array_equal(out_c, out_n)

    def test_sqrt_bitwise(self, space, rng):
        a = _random_coeffs(space, rng, positive_lead=True)
        out_c = np.zeros(space.size)
        acc_c = np.zeros(space.size)
        _jetcore.sqrt_(a, out_c, acc_c, space.sq_i, space.sq_j, space.sq_k,
                       space.sq_off, space.deg_off, space.total_cap + 1)
        out_n = np.zeros(space.size)
        acc_n = np.zeros(space.size)
        _kernels.np_sqrt(space, a, out_n, acc_n)
        assert np.array_equal(out_c, out_n)


class TestNumpyTierAlgebra:
    """Fallback correctness without the extension: invert the operations."""

    @pytest.mark.parametrize("space", SPACES, ids=lambda s: f"caps{s.group_caps}t{s.total_cap}")
    def test_div_then_mul_roundtrip(self, space, rng):
        a = _random_coeffs(space, rng)
        b = _random_coeffs(space, rng, positive_lead=True)
        out = np.zeros(space.size)
        acc = np.zeros(space.size)
        _kernels.np_div(space, a, b, out, acc)
        back = np.zeros(space.size)
        _kernels.np_mul(space, out, b, back)
        np.testing.assert_allclose(back, a, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("space", SPACES, ids=lambda s: f"caps{s.group_caps}t{s.total_cap}")
    def test_sqrt_squares_back(self, space, rng):
        a = _random_coeffs(space, rng, positive_lead=True)
        a[0] = abs(a[0]) + 0.5
        out = np.zeros(space.size)
        acc = np.zeros(space.size)
        _kernels.np_sqrt(space, a, out, acc)
        back = np.zeros(space.size)
        _kernels.np_mul(space, out, out, back)
        np.testing.assert_allclose(back, a, rtol=1e-12, atol=1e-12)

    def test_object_tier_matches_float_tier(self, rng):
        space = xy_space(2, 2, 2, 2)
        a = _random_coeffs(space, rng)
        b = _random_coeffs(space, rng, positive_lead=True)
        got = _kernels.mul_o(space, a.astype(object), b.astype(object)).astype(float)
        want = _kernels.mul_f(space, a, b)
        np.testing.assert_allclose(got, want, rtol=0, atol=0)
        got = _kernels.div_o(space, a.astype(object), b.astype(object)).astype(float)
        want = _kernels.div_f(space, a, b)
        np.testing.assert_allclose(got, want, rtol=1e-15, atol=1e-15)
        b[0] = abs(b[0]) + 0.5
        got = _kernels.sqrt_o(space, b.astype(object)).astype(float)
        want = _kernels.sqrt_f(space, b)
        np.testing.assert_allclose(got, want, rtol=1e-15, atol=1e-15)
