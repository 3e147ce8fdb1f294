"""Jet engine: seeding, exact arithmetic, extraction, and error contract.

Expected values are either worked by hand (and frozen here) or checked
against an independent finite-difference oracle.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finsq.jets import (
    CapabilityError,
    DerivativeSpec,
    FieldEvaluationError,
    Jet,
    JetDomainError,
    SpaceMismatchError,
    TruncationError,
    differentiate_vectorfield,
    fd_partial,
    partial,
    seed,
    seed_pair,
)
from finsq.jetspace import jet_space, meet, xy_space


def one_var(order):
    (t,) = seed([0.0], [[1.0]], order)
    return t


class TestSeeding:
    def test_seed_point_in_one_direction(self):
        X = seed([1.0, 2.0], [[1.0, 0.0]], 2)
        assert [float(j.value) for j in X] == [1.0, 2.0]
        assert [float(j.coefficient((1,))) for j in X] == [1.0, 0.0]

    def test_polynomial_on_seed(self):
        X = seed([1.0, 2.0], [[1.0, 0.0]], 2)
        f = X[0] * X[0]
        assert float(f.value) == 1.0
        assert float(f.partial((1,))) == 2.0
        assert float(f.partial((2,))) == 2.0

    def test_seed_rejects_bad_requests(self):
        with pytest.raises(ValueError):
            seed([1.0], [[1.0]], 0)
        with pytest.raises(ValueError):
            seed([1.0], [], 2)
        with pytest.raises(ValueError):
            seed([1.0, 2.0], [[1.0]], 1)

    def test_seed_pair_layout(self):
        X, Y = seed_pair([0.1, 0.2], [1.0, -1.0], DerivativeSpec(1, 2))
        assert float(X[1].value) == 0.2
        assert float(Y[0].value) == 1.0
        # x-seeds carry no y-dependence and vice versa
        assert float(X[0].coefficient((0, 0, 1, 0))) == 0.0
        assert float(Y[1].coefficient((0, 1, 0, 0))) == 0.0


class TestFrozenValues:
    def test_sqrt_taylor_at_one(self):
        # d/dt sqrt(1+t): 1/2; second derivative: -1/4
        r = (1.0 + one_var(3)).sqrt()
        assert float(r.value) == pytest.approx(1.0, abs=0)
        assert float(r.partial((1,))) == pytest.approx(0.5, abs=1e-15)
        assert float(r.partial((2,))) == pytest.approx(-0.25, abs=1e-15)
        assert float(r.partial((3,))) == pytest.approx(0.375, abs=1e-15)

    def test_inner_product_squared_mixed_partial(self):
        # f = <x, y>^2, d^2 f / dx1 dy1 at x = y = e1 equals 4
        def f(X, Y):
            ip = X[0] * Y[0] + X[1] * Y[1]
            return ip * ip

        got = partial(f, [1.0, 0.0], [1.0, 0.0], ((1, 0), (1, 0)))
        assert got == pytest.approx(4.0, abs=1e-14)

    def test_binomial_powers(self):
        t = one_var(5)
        p = (1.0 + t) ** 5
        coeffs = [float(p.coefficient((k,))) for k in range(6)]
        assert coeffs == [1.0, 5.0, 10.0, 10.0, 5.0, 1.0]

    def test_negative_power_matches_division(self):
        t = one_var(4)
        lhs = (1.0 + t) ** (-2)
        rhs = 1.0 / ((1.0 + t) * (1.0 + t))
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=0, atol=1e-15)


class TestRingIdentities:
    @given(
        a=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
        b=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
        c=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
    )
    @settings(max_examples=60, deadline=None)
    def test_product_matches_cauchy_convolution(self, a, b, c):
        space = jet_space((0,), (4,))
        ja, jb = Jet(space, np.array(a)), Jet(space, np.array(b))
        prod = ja * jb
        expect = [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(5)]
        np.testing.assert_allclose(prod.coeffs, expect, rtol=1e-12, atol=1e-12)
        # distributivity
        jc = Jet(space, np.array(c))
        lhs = ja * (jb + jc)
        rhs = ja * jb + ja * jc
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-12, atol=1e-12)

    @given(b0=st.floats(0.5, 3.0), rest=st.lists(st.floats(-1, 1), min_size=4, max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_division_and_sqrt_invert(self, b0, rest):
        space = jet_space((0,), (4,))
        jb = Jet(space, np.array([b0] + rest))
        t = one_var(4)
        ja = 1.0 + 0.5 * t + t * t
        q = ja / jb
        np.testing.assert_allclose((q * jb).coeffs, ja.truncated(space).coeffs, rtol=1e-12, atol=1e-12)
        s = jb.sqrt()
        np.testing.assert_allclose((s * s).coeffs, jb.coeffs, rtol=1e-12, atol=1e-12)

    def test_leibniz_on_random_polynomials(self, rng):
        # jets of polynomial functions are exact, so d(fg) = f'g + fg' exactly
        space = jet_space((0, 0), (3,))
        for _ in range(20):
            ca = rng.uniform(-1, 1, space.size)
            cb = rng.uniform(-1, 1, space.size)
            ja, jb = Jet(space, ca), Jet(space, cb)
            prod = ja * jb
            for var in (0, 1):
                lhs = prod.derivative(var)
                rhs = ja.derivative(var) * jb.truncated(lhs.space) + ja.truncated(lhs.space) * jb.derivative(var)
                np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-12, atol=1e-12)


class TestNesting:
    def test_flat_order4_matches_nested_two_by_two(self):
        cases = [
            lambda t: (1.0 + t + 0.3 * t * t).sqrt(),
            lambda t: (1.0 + t) / (2.0 - t),
            lambda t: ((0.5 * t + t * t) ** 3 + 2.0 * t + 1.0) * (1.0 - t),
        ]
        inner_space = jet_space((0,), (2,))
        outer_space = jet_space((0,), (2,))
        for fn in cases:
            flat = fn(one_var(4))
            inner = Jet.variable(inner_space, 0, 0.0)
            outer = Jet.variable(outer_space, 0, inner)
            nested = fn(outer)
            # d^4/dt^4 via mixed d^2_outer d^2_inner of f(u + v)
            d4_nested = float(nested.partial((2,)).partial((2,)))
            d4_flat = float(flat.partial((4,)))
            assert d4_nested == pytest.approx(d4_flat, rel=1e-12, abs=1e-12)
            d2_nested = float(nested.partial((1,)).partial((1,)))
            d2_flat = float(flat.partial((2,)))
            assert d2_nested == pytest.approx(d2_flat, rel=1e-12, abs=1e-12)


def smooth_field(X, Y):
    # strictly positive inside the sampled box, built from supported ops
    q = (2.0 + X[0]) * Y[0] * Y[0] + (1.5 + X[0] * X[1]) * Y[1] * Y[1] + 0.3 * Y[0] * Y[1]
    from finsq.jets import sqrt

    return sqrt(q) * (1.0 + 0.2 * X[1] * Y[0]) / (2.0 + X[0] * X[0])


class TestFiniteDifferenceAgreement:
    X0 = [0.3, -0.4]
    Y0 = [0.8, 0.5]

    @pytest.mark.parametrize(
        "xidx,yidx",
        [

            ((1, 0), (0, 0)),
            ((0, 1), (0, 0)),
            ((0, 0), (1, 0)),
            ((0, 0), (0, 1)),
            ((2, 0), (0, 0)),
            ((1, 1), (0, 0)),
            ((1, 0), (1, 0)),
            ((0, 1), (0, 1)),
            ((0, 0), (2, 0)),
            ((0, 0), (1, 1)),
            ((1, 0), (2, 0)),
            ((2, 0), (1, 0)),
            ((0, 0), (3, 0)),
            ((0, 0), (2, 1)),
        ],
    )
    def test_low_order_partials_match_fd(self, xidx, yidx):
        # Richardson-extrapolated central differences at step 1e-3 resolve
        # total order <= 3 to 1e-6 relative; the absolute floor covers the
        # oracle's own rounding noise (eps / h^3) on small derivative values
        exact = partial(smooth_field, self.X0, self.Y0, (xidx, yidx))
        approx = fd_partial(smooth_field, self.X0, self.Y0, xidx, yidx, step=1e-3)
        assert approx == pytest.approx(exact, rel=1e-6, abs=1e-6)

    @pytest.mark.parametrize(
        "xidx,yidx",
        [
            ((2, 0), (2, 0)),
            ((1, 1), (0, 3)),
            ((2, 0), (0, 3)),
        ],
    )
    def test_high_order_partials_match_fd_coarse_step(self, xidx, yidx):
        # rounding noise scales like eps/h^order, so orders 4 and 5 need a
        # coarser step before the FD oracle carries any signal at all
        exact = partial(smooth_field, self.X0, self.Y0, (xidx, yidx))
        approx = fd_partial(smooth_field, self.X0, self.Y0, xidx, yidx, step=0.05)
        assert approx == pytest.approx(exact, rel=5e-4, abs=5e-4)


class TestErrorContract:
    def test_partial_beyond_truncation_is_error(self):
        t = one_var(2)
        with pytest.raises(TruncationError):
            t.partial((3,))

    def test_mixed_order_beyond_spec_is_error(self):
        X, Y = seed_pair([0.1], [1.0], DerivativeSpec(1, 1))
        f = X[0] * Y[0]
        # the mixed index within both caps is retained and exact
        assert float(f.partial((1, 1))) == pytest.approx(1.0)
        with pytest.raises(TruncationError):
            f.partial((2, 0))
        with pytest.raises(TruncationError):
            f.partial((0, 2))

    def test_space_mismatch_rejected(self):
        a = one_var(2)
        space_b = jet_space((0, 0), (2,))
        b = Jet.variable(space_b, 0, 0.0)
        with pytest.raises(SpaceMismatchError):
            _ = a + b

    def test_sqrt_domain(self):
        t = one_var(2)
        with pytest.raises(JetDomainError):
            t.sqrt()
        with pytest.raises(JetDomainError):
            (t - 1.0).sqrt()

    def test_division_by_zero_lead(self):
        t = one_var(2)
        with pytest.raises(JetDomainError):
            _ = 1.0 / t

    def test_capability_ceiling(self):
        with pytest.raises(CapabilityError):
            partial(lambda X, Y: X[0], [0.0], [1.0], ((6,), (5,)))

    def test_field_failure_is_labeled(self):
        def bad(X, Y):
            return [X[0], 1.0 / (X[0] - X[0])]

        with pytest.raises(FieldEvaluationError):
            differentiate_vectorfield(bad, [0.0], [1.0], DerivativeSpec(1, 1))


class TestVectorFieldTable:
    def test_hand_worked_partials(self):
        def field(X, Y):
            return [X[0] * Y[0] * Y[0] + X[1] * Y[1], X[0] * X[1] * Y[0]]

        t = differentiate_vectorfield(field, [2.0, 3.0], [0.5, -1.0], DerivativeSpec(1, 2))
        assert t.value(0) == pytest.approx(-2.5)
        assert t.dx(0, 0) == pytest.approx(0.25)
        assert t.dy(0, 0) == pytest.approx(2.0)
        assert t.dxdy(0, 0, 0) == pytest.approx(1.0)
        assert t.dydy(0, 0, 0) == pytest.approx(4.0)
        assert t.dydy(0, 0, 1) == pytest.approx(0.0)
        assert t.dy(0, 1) == pytest.approx(3.0)
        assert t.dxdy(0, 1, 1) == pytest.approx(1.0)
        assert t.value(1) == pytest.approx(3.0)
        assert t.dx(1, 0) == pytest.approx(1.5)
        assert t.dx(1, 1) == pytest.approx(1.0)
        assert t.dy(1, 0) == pytest.approx(6.0)
        assert t.dxdy(1, 0, 0) == pytest.approx(3.0)


class TestExtraction:
    def test_derivative_of_polynomial_jet(self):
        space = jet_space((0, 0), (3,))
        x1 = Jet.variable(space, 0, 0.5)
        x2 = Jet.variable(space, 1, -1.5)
        f = x1 * x1 * x2
        df = f.derivative(0)
        expect = 2.0 * x1 * x2
        np.testing.assert_allclose(df.coeffs, expect.truncated(df.space).coeffs, rtol=0, atol=1e-15)

    def test_alignment_lands_in_meet_space(self):
        big = jet_space((0,), (4,))
        small = jet_space((0,), (2,))
        a = Jet.variable(big, 0, 1.0)
        b = Jet.variable(small, 0, 1.0)
        c = a * b
        assert c.space is meet(big, small)

    def test_truncation_is_projection(self):
        space = xy_space(1, 1, 2, 2)
        sub = xy_space(1, 1, 1, 1)
        x = Jet.variable(space, 0, 0.7)
        y = Jet.variable(space, 1, 1.3)
        f = (x * y + 1.0) * (x + y)
        g = f.truncated(sub)
        for idx in sub.indices:
            assert float(g.coefficient(idx)) == float(f.coefficient(idx))
