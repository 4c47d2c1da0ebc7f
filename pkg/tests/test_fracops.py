import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fracmech import fracops as fo
from fracmech.errors import DomainError, MixedSideError

GRID = fo.Grid(0.0, 1.0, 256)

# gamma-function oracle values, frozen from math.gamma
G2_OVER_G25 = 0.7522527780636751  # Gamma(2)/Gamma(2.5)
G15_OVER_G2 = 0.886226925452758  # Gamma(1.5)/Gamma(2)


def sampled(fn, grid=GRID):
    return fo.SampledFunction.from_callable(fn, grid)


def test_frozen_gamma_oracles():
    assert G2_OVER_G25 == pytest.approx(math.gamma(2) / math.gamma(2.5), rel=1e-15)
    assert G15_OVER_G2 == pytest.approx(math.gamma(1.5) / math.gamma(2), rel=1e-15)


class TestTypes:
    def test_order_range(self):
        for bad in (0.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                fo.FracOrder(bad)
        assert fo.FracOrder(1.0).classical
        assert not fo.FracOrder(0.4).classical

    def test_grid(self):
        g = fo.Grid(1.0, 3.0, 4)
        np.testing.assert_allclose(g.nodes, [1.0, 1.5, 2.0, 2.5, 3.0])
        assert g.h == 0.5
        for a, b, n in ((1, 1, 4), (0, 1, 1), (0, 1, 2.5)):
            with pytest.raises(ValueError):
                fo.Grid(a, b, n)

    def test_interior_band(self):
        g = fo.Grid(0, 1, 100)
        mask = g.interior()
        assert not mask[:5].any() and not mask[-5:].any()
        assert mask[5:96].all()

    def test_sample_count(self):
        with pytest.raises(ValueError):
            fo.SampledFunction(GRID, np.zeros(10))

    def test_complex_samples_kept(self):
        f = fo.SampledFunction(GRID, np.ones(GRID.n + 1) * 1j)
        assert np.iscomplexobj(f.values)


class TestLeftIntegral:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.0])
    def test_constant(self, alpha):
        c = 2.5
        out = fo.left_rl_integral(sampled(lambda t: np.full_like(t, c)), alpha)
        expected = c * GRID.nodes**alpha / math.gamma(alpha + 1)
        np.testing.assert_allclose(out.values, expected, rtol=1e-12, atol=1e-14)
        assert out.values[0] == 0.0

    def test_classical_integral_of_one(self):
        out = fo.left_rl_integral(sampled(np.ones_like), 1.0)
        np.testing.assert_allclose(out.values, GRID.nodes, atol=1e-14)

    def test_linear_at_unit_distance(self):
        out = fo.left_rl_integral(sampled(lambda t: t), 0.5)
        assert out.values[-1] == pytest.approx(G2_OVER_G25, rel=1e-12)

    def test_against_adaptive_quadrature(self):
        alpha = 0.4
        grid = fo.Grid(0.0, 1.0, 512)
        out = fo.left_rl_integral(sampled(np.exp, grid), alpha)
        for k in (64, 200, 400, 512):
            t = grid.nodes[k]
            ref, _ = quad(np.exp, 0.0, t, weight="alg", wvar=(0.0, alpha - 1))
            ref /= math.gamma(alpha)
            assert out.values[k] == pytest.approx(ref, rel=1e-5)


class TestRightIntegral:
    @pytest.mark.parametrize("alpha", [0.3, 0.7])
    def test_constant(self, alpha):
        out = fo.right_rl_integral(sampled(lambda t: np.full_like(t, -1.5)), alpha)
        expected = -1.5 * (1 - GRID.nodes) ** alpha / math.gamma(alpha + 1)
        np.testing.assert_allclose(out.values, expected, rtol=1e-12, atol=1e-14)
        assert out.values[-1] == 0.0

    def test_classical(self):
        out = fo.right_rl_integral(sampled(np.ones_like), 1.0)
        np.testing.assert_allclose(out.values, 1 - GRID.nodes, atol=1e-14)

    def test_against_adaptive_quadrature(self):
        alpha = 0.6
        out = fo.right_rl_integral(sampled(np.cos), alpha)
        for k in (0, 50, 128, 220):
            t = GRID.nodes[k]
            ref, _ = quad(np.cos, t, 1.0, weight="alg", wvar=(alpha - 1, 0.0))
            assert out.values[k] == pytest.approx(ref / math.gamma(alpha), rel=1e-4)


class TestCaputo:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9, 1.0])
    def test_constant_annihilated(self, alpha):
        f = sampled(lambda t: np.full_like(t, 7.25))
        assert np.max(np.abs(fo.left_caputo(f, alpha).values)) <= 1e-12
        assert np.max(np.abs(fo.right_caputo(f, alpha).values)) <= 1e-12

    @pytest.mark.parametrize("alpha", [0.3, 0.8])
    def test_linear_exact(self, alpha):
        out = fo.left_caputo(sampled(lambda t: t), alpha)
        np.testing.assert_allclose(out.values, GRID.nodes ** (1 - alpha) / math.gamma(2 - alpha),
                                   rtol=1e-12, atol=1e-14)
        out = fo.right_caputo(sampled(lambda t: 1 - t), alpha)
        np.testing.assert_allclose(out.values, (1 - GRID.nodes) ** (1 - alpha) / math.gamma(2 - alpha),
                                   rtol=1e-12, atol=1e-14)

    def test_classical_limit(self):
        f = sampled(lambda t: t**2)
        np.testing.assert_allclose(fo.left_caputo(f, 1.0).values, 2 * GRID.nodes, atol=1e-12)
        np.testing.assert_allclose(fo.right_caputo(f, 1.0).values, -2 * GRID.nodes, atol=1e-12)

    def test_value_at_start_is_zero(self):
        assert fo.left_caputo(sampled(np.sin), 0.5).values[0] == 0.0

    def test_classical_convergence_order(self):
        errs = []
        for n in (64, 128, 256):
            g = fo.Grid(0, 1, n)
            out = fo.left_caputo(sampled(lambda t: t**3, g), 1.0).values
            errs.append(np.max(np.abs(out - 3 * g.nodes**2)))
        assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5

    @pytest.mark.parametrize("alpha,s", [(0.8, 0.8), (0.5, 0.5), (0.6, 1.6)])
    def test_starting_correction_exact_on_its_power(self, alpha, s):
        f = sampled(lambda t: t**s)
        out = fo.left_caputo(f, alpha, starting_exponents=(s,)).values
        ref = math.gamma(s + 1) / math.gamma(s + 1 - alpha) * GRID.nodes ** (s - alpha)
        np.testing.assert_allclose(out[1:], ref[1:], rtol=1e-9)

    def test_starting_correction_keeps_constants(self):
        f = sampled(lambda t: np.full_like(t, 4.0))
        assert not np.any(fo.left_caputo(f, 0.7, starting_exponents=(0.7,)).values)

    def test_starting_correction_with_linear_exponent(self):
        f = sampled(lambda t: 2 + 3 * t + t**0.7)
        out = fo.left_caputo(f, 0.7, starting_exponents=(0.7, 1.0)).values
        t = GRID.nodes
        ref = 3 * t**0.3 / math.gamma(1.3) + math.gamma(1.7)
        np.testing.assert_allclose(out[1:], ref[1:], rtol=1e-9)


class TestRLDerivative:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
    @pytest.mark.parametrize("beta", [1.0, 2.0, 2.5])
    def test_power_rule(self, alpha, beta):
        grid = fo.Grid(0, 1, 1024)
        f = sampled(lambda t: t**beta, grid)
        num = fo.left_rl_derivative(f, alpha).values
        ref = math.gamma(beta + 1) / math.gamma(beta + 1 - alpha) * grid.nodes ** (beta - alpha)
        mask = grid.interior()
        rel = np.max(np.abs(num - ref)[mask]) / np.max(np.abs(ref[mask]))
        assert rel <= 1e-3

    def test_constant_is_not_annihilated(self):
        alpha = 0.4
        out = fo.left_rl_derivative(sampled(lambda t: np.full_like(t, 2.0)), alpha)
        t = GRID.nodes[1:]
        np.testing.assert_allclose(out.values[1:], 2.0 * t**-alpha / math.gamma(1 - alpha), rtol=1e-12)
        assert np.isinf(out.values[0]) and out.values[0] > 0

    def test_zero(self):
        z = sampled(np.zeros_like)
        assert not np.any(fo.left_rl_derivative(z, 0.5).values)
        assert not np.any(fo.right_rl_derivative(z, 0.5).values)

    def test_classical_order_rejected(self):
        with pytest.raises(DomainError):
            fo.left_rl_derivative(sampled(np.sin), 1.0)
        with pytest.raises(DomainError):
            fo.right_rl_derivative(sampled(np.sin), 1.0)

    def test_right_power_rule(self):
        alpha, beta = 0.5, 2.0
        grid = fo.Grid(0, 1, 1024)
        f = sampled(lambda t: (1 - t) ** beta, grid)
        num = fo.right_rl_derivative(f, alpha).values
        ref = math.gamma(beta + 1) / math.gamma(beta + 1 - alpha) * (1 - grid.nodes) ** (beta - alpha)
        mask = grid.interior()
        assert np.max(np.abs(num - ref)[mask]) / np.max(ref[mask]) <= 1e-3

    def test_right_marker_sign(self):
        out = fo.right_rl_derivative(sampled(lambda t: np.full_like(t, -1.0)), 0.5)
        assert np.isinf(out.values[-1]) and out.values[-1] < 0


class TestComplementaryIntegral:
    def test_identity_at_one(self):
        f = sampled(np.sin)
        np.testing.assert_array_equal(fo.right_rl_integral_frac(f, 1.0).values, f.values)

    def test_alias(self):
        f = sampled(np.cos)
        np.testing.assert_array_equal(
            fo.right_rl_integral_frac(f, 0.3).values, fo.right_rl_integral(f, 0.7).values
        )

    def test_constant(self):
        out = fo.right_rl_integral_frac(sampled(lambda t: np.full_like(t, 3.0)), 0.25)
        np.testing.assert_allclose(out.values, 3.0 * (1 - GRID.nodes) ** 0.75 / math.gamma(1.75),
                                   rtol=1e-12, atol=1e-14)


SMALL = fo.Grid(0.0, 2.0, 24)
finite_arrays = st.lists(
    st.floats(-10, 10, allow_nan=False), min_size=SMALL.n + 1, max_size=SMALL.n + 1
).map(np.array)


@settings(max_examples=25, deadline=None)
@given(f=finite_arrays, g=finite_arrays, c1=st.floats(-5, 5), c2=st.floats(-5, 5),
       alpha=st.sampled_from([0.3, 0.5, 0.8]))
def test_linearity(f, g, c1, c2, alpha):
    F, G = fo.SampledFunction(SMALL, f), fo.SampledFunction(SMALL, g)
    for op in (fo.left_rl_integral, fo.right_rl_integral, fo.left_caputo, fo.right_caputo):
        lhs = op(c1 * F + c2 * G, alpha).values
        rhs = (c1 * op(F, alpha) + c2 * op(G, alpha)).values
        scale = max(1.0, np.max(np.abs(rhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(f=finite_arrays, alpha=st.sampled_from([0.25, 0.5, 0.75, 1.0]))
def test_mirror_symmetry_is_exact(f, alpha):
    F = fo.SampledFunction(SMALL, f)
    pairs = [(fo.left_rl_integral, fo.right_rl_integral), (fo.left_caputo, fo.right_caputo)]
    if alpha < 1:
        pairs.append((fo.left_rl_derivative, fo.right_rl_derivative))
    for left, right in pairs:
        np.testing.assert_array_equal(right(F, alpha).values, left(F.reversed(), alpha).values[::-1])


class TestPowerOracle:
    def test_integral(self):
        expr = fo.PowerExpansion(left_terms=((1.0, 0.5),))
        out = fo.power_oracle(expr, "left_int", 0.5)
        ((c, e),) = out.left_terms
        assert e == 1.0 and c == pytest.approx(G15_OVER_G2, rel=1e-14)

    def test_caputo_of_constant_is_empty(self):
        expr = fo.PowerExpansion(left_terms=((4.0, 0.0),))
        assert fo.power_oracle(expr, fo.OpKind.LEFT_CAPUTO, 0.3).is_zero
        assert fo.power_oracle(expr, fo.OpKind.RIGHT_CAPUTO, 0.3).is_zero

    def test_rl_derivative_restriction(self):
        expr = fo.PowerExpansion(left_terms=((1.0, 0.4),))
        with pytest.raises(DomainError):
            fo.power_oracle(expr, "left_rl_d", 0.5)
        with pytest.raises(DomainError):
            fo.power_oracle(fo.PowerExpansion(left_terms=((1.0, 0.5),)), "left_rl_d", 0.5)

    def test_mixed_sides(self):
        expr = fo.PowerExpansion(left_terms=((1.0, 1.0),), right_terms=((1.0, 2.0),))
        with pytest.raises(MixedSideError):
            fo.power_oracle(expr, "left_int", 0.5)
        with pytest.raises(MixedSideError):
            fo.power_oracle(expr, "right_caputo", 0.5)

    def test_right_rule(self):
        expr = fo.PowerExpansion(right_terms=((2.0, 2.0),))
        ((c, e),) = fo.power_oracle(expr, "right_rl_d", 0.5).right_terms
        assert e == 1.5 and c == pytest.approx(2 * math.gamma(3) / math.gamma(2.5))

    def test_canonical_form(self):
        expr = fo.PowerExpansion(left_terms=((1.0, 2.0), (3.0, 0.5), (-1.0, 2.0)))
        assert expr.left_terms == ((3.0, 0.5),)
        with pytest.raises(DomainError):
            fo.PowerExpansion(left_terms=((1.0, -1.0),))

    def test_arithmetic(self):
        a = fo.PowerExpansion(left_terms=((1.0, 1.0),))
        b = fo.PowerExpansion(left_terms=((-1.0, 1.0),), right_terms=((2.0, 0.5),))
        assert (a + b).left_terms == ()
        assert (2 * b).right_terms == ((4.0, 0.5),)


class TestEvaluate:
    def test_empty(self):
        assert not np.any(fo.evaluate(fo.PowerExpansion(), GRID).values)

    def test_linear(self):
        out = fo.evaluate(fo.PowerExpansion(left_terms=((1.0, 1.0),)), fo.Grid(0, 1, 4))
        np.testing.assert_array_equal(out.values, [0, 0.25, 0.5, 0.75, 1])

    def test_singular_endpoint_marker(self):
        with np.errstate(divide="ignore"):
            out = fo.evaluate(fo.PowerExpansion(right_terms=((1.0, -0.5),)), GRID)
        assert np.isinf(out.values[-1])
        assert np.all(np.isfinite(out.values[:-1]))


class TestParse:
    def test_literal(self):
        expr = fo.parse_power_expansion("1*(t-a)^2 + 3*(b-t)^0.5")
        assert expr.left_terms == ((1.0, 2.0),) and expr.right_terms == ((3.0, 0.5),)

    def test_signs_and_complex(self):
        expr = fo.parse_power_expansion("-2*(t-a)^1 - 1.5j*(b - t)^0")
        assert expr.left_terms == ((-2.0, 1.0),) and expr.right_terms == ((-1.5j, 0.0),)

    @pytest.mark.parametrize("text", ["", "1*(t-a)^x", "(t-a)^2", "1*(t-a)^2 2*(t-a)^1",
                                      "1*(t-b)^2", "1*(t-a)^2j"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            fo.parse_power_expansion(text)
