import math
from fractions import Fraction

import pytest

from pooltest import TestFunction as PoolFunction
from pooltest import (
    InputError,
    MultiPolynomial,
    Polynomial,
    SystemParams,
    achievable_margin,
    binary_direct_margin,
    binary_entropy,
    converse_margin,
    count_function,
    ensemble_event_probability,
    enumeration_fraction_general,
    enumeration_fraction_noiseless,
    enumeration_fraction_noisy,
    exponent_infimum,
    fixed_point_z,
    general_converse_bound,
    general_direct_margin,
    general_ensemble_event_probability,
    golden_section_min,
    multinomial,
    noiseless_direct_exponent,
    noisy_achievable_margin,
    noisy_direct_exponent,
    noisy_ensemble_event_probability,
    or_function,
    or_pool_poly,
    threshold_function,
    type_enumerator,
    weight_enumerator,
)


def ternary_max():
    return PoolFunction.from_callable(lambda vals: max(vals), (0, 1, 2), (0, 1, 2), 2)


class TestPolynomial:
    def test_algebra(self):
        a = Polynomial([1, 1])
        assert (a * a).coeffs == (1, 2, 1)
        assert (a + Polynomial([0, 0, 5])).coeffs == (1, 1, 5)
        assert (a**3).coeffs == (1, 3, 3, 1)
        assert (a * 2).coeffs == (2, 2)

    def test_degree_and_order(self):
        p = Polynomial([0, 0, 3, 0, 7])
        assert p.degree == 4
        assert p.order == 2
        assert p.coeff(2) == 3
        assert p.coeff(9) == 0

    def test_trailing_zeros_trimmed(self):
        assert Polynomial([1, 2, 0, 0]).coeffs == (1, 2)

    def test_evaluate(self):
        p = Polynomial([1, 2, 1])
        assert p.evaluate(3) == 16
        assert p.evaluate(Fraction(1, 2)) == Fraction(9, 4)

    def test_clamp_small_negatives(self):
        p = Polynomial([1.0, -1e-18, 0.5])
        clamped, count = p.clamp_small_negatives()
        assert clamped.coeffs[1] == 0.0
        assert count == 1
        with pytest.raises(InputError):
            Polynomial([1.0, -0.5]).clamp_small_negatives()

    def test_or_pool_poly(self):
        # (1+z)^r - 1: binomial coefficients with the constant removed
        assert or_pool_poly(3).coeffs == (0, 3, 3, 1)
        assert or_pool_poly(1).coeffs == (0, 1)
        assert or_pool_poly(6).coeff(6) == 1
        assert or_pool_poly(6).coeff(1) == 6
        assert or_pool_poly(6).coeff(0) == 0

    def test_multinomial(self):
        assert multinomial(4, [2, 2]) == 6
        assert multinomial(6, [1, 2, 3]) == 60
        assert multinomial(0, []) == 1
        with pytest.raises(InputError):
            multinomial(4, [2, 3])


class TestMultiPolynomial:
    def test_product_merges_exponent_vectors(self):
        a = MultiPolynomial(2, {(1, 0): 2, (0, 1): 1})
        b = MultiPolynomial(2, {(1, 0): 1})
        prod = a * b
        assert prod.terms == {(2, 0): 2, (1, 1): 1}

    def test_power_and_coeff(self):
        a = MultiPolynomial(2, {(1, 0): 1, (0, 1): 1})
        sq = a**2
        assert sq.coeff((1, 1)) == 2
        assert sq.coeff((5, 5)) == 0

    def test_evaluate(self):
        a = MultiPolynomial(2, {(2, 1): 3})
        assert a.evaluate((2, 5)) == 60


class TestEventProbabilityOracles:
    """Closed-form values checked against full enumeration of every wiring."""

    def test_quarter_system_hand_value(self):
        assert ensemble_event_probability(SystemParams(1, 2, 4), 2, 1) == Fraction(1, 6)

    def test_degenerate_weights(self):
        params = SystemParams(3, 6, 12)
        assert ensemble_event_probability(params, 0, 0) == 1
        assert ensemble_event_probability(params, 0, 3) == 0
        assert ensemble_event_probability(params, 12, 6) == 1

    def test_large_system_hand_value(self):
        assert ensemble_event_probability(SystemParams(3, 6, 12), 2, 2) == Fraction(
            461, 973896
        )

    @pytest.mark.parametrize("params", [SystemParams(1, 2, 4), SystemParams(1, 2, 2)])
    def test_matches_enumeration_everywhere(self, params):
        for w in range(params.n + 1):
            for s in range(params.m + 1):
                assert ensemble_event_probability(params, w, s) == (
                    enumeration_fraction_noiseless(params, w, s)
                ), (w, s)

    def test_matches_enumeration_spot_checks(self):
        params = SystemParams(2, 4, 4)
        for w, s in ((1, 1), (2, 1), (2, 2), (3, 2)):
            assert ensemble_event_probability(params, w, s) == (
                enumeration_fraction_noiseless(params, w, s)
            )

    def test_normalization_over_outcomes(self):
        for params in (SystemParams(3, 6, 12), SystemParams(2, 4, 4)):
            for w in range(params.n + 1):
                total = sum(
                    math.comb(params.m, s) * ensemble_event_probability(params, w, s)
                    for s in range(params.m + 1)
                )
                assert total == 1, w

    def test_event_bounds_validated(self):
        params = SystemParams(1, 2, 4)
        with pytest.raises(InputError):
            ensemble_event_probability(params, 5, 1)
        with pytest.raises(InputError):
            ensemble_event_probability(params, 1, 3)


class TestNoisyEventProbability:
    def test_hand_values_single_test(self):
        params = SystemParams(1, 2, 2, q=Fraction(1, 4))
        assert noisy_ensemble_event_probability(params, 0, 1) == Fraction(1, 4)
        assert noisy_ensemble_event_probability(params, 1, 1) == Fraction(3, 4)

    @pytest.mark.parametrize("q", [Fraction(1, 4), Fraction(1, 2)])
    def test_matches_noisy_enumeration(self, q):
        params = SystemParams(1, 2, 2, q=q)
        for w in range(3):
            for s in range(2):
                assert noisy_ensemble_event_probability(params, w, s) == (
                    enumeration_fraction_noisy(params, w, s)
                ), (q, w, s)

    def test_zero_noise_reduces_exactly(self):
        clean = SystemParams(3, 6, 12)
        noisy = SystemParams(3, 6, 12, q=Fraction(0))
        for w in range(13):
            for s in range(7):
                assert noisy_ensemble_event_probability(
                    noisy, w, s
                ) == ensemble_event_probability(clean, w, s)

    def test_full_noise_complements_outcomes(self):
        clean = SystemParams(3, 6, 12)
        flipped = SystemParams(3, 6, 12, q=Fraction(1))
        for w in range(13):
            for s in range(7):
                assert noisy_ensemble_event_probability(
                    flipped, w, s
                ) == ensemble_event_probability(clean, w, 6 - s)

    def test_half_noise_erases_the_graph(self):
        params = SystemParams(1, 2, 2, q=Fraction(1, 2))
        for w in range(3):
            assert noisy_ensemble_event_probability(params, w, 1) == Fraction(1, 2)

    def test_normalization(self):
        params = SystemParams(3, 6, 12, q=Fraction(1, 10))
        for w in (0, 1, 5, 12):
            total = sum(
                math.comb(6, s) * noisy_ensemble_event_probability(params, w, s)
                for s in range(7)
            )
            assert total == 1

    def test_float_q_is_close_to_exact(self):
        exact = noisy_ensemble_event_probability(
            SystemParams(3, 6, 12, q=Fraction(1, 10)), 2, 3
        )
        approx = noisy_ensemble_event_probability(SystemParams(3, 6, 12, q=0.1), 2, 3)
        assert isinstance(approx, float)
        assert approx == pytest.approx(float(exact), rel=1e-12)


class TestGeneralEventProbability:
    def test_reduces_to_binary_or(self):
        params = SystemParams(2, 4, 4)
        f = or_function(4)
        for w in range(5):
            for s in range(params.m + 1):
                assert general_ensemble_event_probability(
                    params, f, (4 - w, w), (params.m - s, s)
                ) == ensemble_event_probability(params, w, s)

    def test_ternary_max_matches_enumeration(self):
        params = SystemParams(1, 2, 2)
        f = ternary_max()
        input_types = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
        output_types = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        for ic in input_types:
            for oc in output_types:
                assert general_ensemble_event_probability(
                    params, f, ic, oc
                ) == enumeration_fraction_general(params, f, ic, oc), (ic, oc)

    def test_normalization_over_output_types(self):
        params = SystemParams(1, 2, 4)
        f = ternary_max()
        total = Fraction(0)
        for s0 in range(3):
            for s1 in range(3 - s0):
                oc = (s0, s1, 2 - s0 - s1)
                total += multinomial(2, oc) * general_ensemble_event_probability(
                    params, f, (1, 2, 1), oc
                )
        assert total == 1

    def test_count_sums_validated(self):
        params = SystemParams(1, 2, 4)
        with pytest.raises(InputError):
            general_ensemble_event_probability(params, or_function(2), (1, 1), (1, 1))
        with pytest.raises(InputError):
            general_ensemble_event_probability(params, or_function(2), (2, 2), (1, 2))


class TestTypeEnumerators:
    def test_or_enumerators_recover_pool_polynomial(self):
        f = or_function(6)
        quiet = weight_enumerator(f, 0)
        fire = weight_enumerator(f, 1)
        assert quiet.coeffs == (1,)
        assert fire.coeffs == or_pool_poly(6).coeffs

    def test_or_type_enumerator_collapses_to_weight(self):
        f = or_function(4)
        te = type_enumerator(f, 1)
        we = weight_enumerator(f, 1)
        # substituting z0 = 1 leaves a univariate enumerator in z1
        for k in range(5):
            assert te.coeff((4 - k, k)) == we.coeff(k)

    def test_enumerators_partition_all_types(self):
        f = ternary_max()
        total = {}
        for k in range(3):
            for counts, coeff in type_enumerator(f, k).terms.items():
                total[counts] = total.get(counts, 0) + coeff
        for counts, coeff in total.items():
            assert coeff == multinomial(2, counts)
        assert sum(total.values()) == 3**2

    def test_threshold_enumerator_counts_heavy_pools(self):
        f = threshold_function(4, 2)
        fire = weight_enumerator(f, 1)
        assert fire.coeff(0) == 0
        assert fire.coeff(1) == 0
        assert fire.coeff(2) == math.comb(4, 2)
        assert fire.coeff(4) == 1

    def test_envelope_identity_for_or(self):
        # the firing-pool enumerator evaluated at z matches the closed form
        f = or_function(6)
        fire = weight_enumerator(f, 1)
        for z in (0.05, 0.1, 0.2, 0.4, 0.8):
            assert abs(fire.evaluate(z) - ((1 + z) ** 6 - 1)) <= 1e-12


class TestGeneralConverse:
    def test_or_function_recovers_binary_converse(self):
        for l, r, p in ((3, 6, 0.08), (2, 4, 0.05)):
            a = general_converse_bound(or_function(r), l, r, [1 - p, p])
            assert abs(a - converse_margin(l, r, p)) <= 1e-12

    def test_constant_function_gives_source_entropy(self):
        const = PoolFunction((0, 1), (0,), 2, {(2, 0): 0, (1, 1): 0, (0, 2): 0})
        assert general_converse_bound(const, 2, 2, [0.9, 0.1]) == pytest.approx(
            binary_entropy(0.1), abs=1e-14
        )

    def test_probability_vector_validated(self):
        with pytest.raises(InputError):
            general_converse_bound(or_function(2), 1, 2, [0.7, 0.7])
        with pytest.raises(InputError):
            general_converse_bound(or_function(2), 1, 2, [1.0])


class TestExponentInfimum:
    def test_unbounded_outside_weight_window(self):
        # finite only for sigma between l*p/r and l*p
        assert not exponent_infimum(0.5, 3, 6, 0.08).bounded
        assert not exponent_infimum(0.01, 3, 6, 0.08).bounded
        assert not exponent_infimum(0.0, 3, 6, 0.08).bounded

    def test_boundary_values_are_finite(self):
        lp = 3 * 0.08
        top = exponent_infimum(lp, 3, 6, 0.08)
        bottom = exponent_infimum(lp / 6, 3, 6, 0.08)
        assert top.bounded and bottom.bounded
        assert top.value == pytest.approx(lp * math.log2(6), abs=1e-12)
        assert bottom.value == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "sigma,l,r,p",
        [(0.1, 3, 6, 0.05), (0.18, 3, 6, 0.08), (0.05, 2, 8, 0.04)],
    )
    def test_matches_dense_grid_scan(self, sigma, l, r, p):
        def objective(z):
            return sigma * math.log2((1 + z) ** r - 1) - l * p * math.log2(z)

        inf = exponent_infimum(sigma, l, r, p)
        assert inf.bounded
        lo, hi = math.log2(inf.z) - 2.0, math.log2(inf.z) + 2.0
        steps = 1_000_000
        grid_best = min(
            objective(2 ** (lo + (hi - lo) * i / steps)) for i in range(steps + 1)
        )
        assert abs(inf.value - grid_best) <= 1e-8
        assert inf.value <= grid_best + 1e-12

    def test_is_a_lower_bound_at_every_z(self):
        l, r, p = 3, 6, 0.08
        for sigma in (0.1, 0.15, 0.2):
            inf = exponent_infimum(sigma, l, r, p)
            for z in (0.05, 0.1, fixed_point_z(r), 0.3, 1.0):
                value = sigma * math.log2((1 + z) ** r - 1) - l * p * math.log2(z)
                assert inf.value <= value + 1e-12


class TestGoldenSection:
    def test_finds_parabola_minimum(self):
        x, v = golden_section_min(lambda t: (t - 1.3) ** 2 + 2.0, -4.0, 4.0, 1e-12)
        assert x == pytest.approx(1.3, abs=1e-6)
        assert v == pytest.approx(2.0, abs=1e-12)

    def test_handles_asymmetric_interval(self):
        x, _ = golden_section_min(lambda t: abs(t + 2.5), -50.0, 0.0, 1e-10)
        assert x == pytest.approx(-2.5, abs=1e-6)


class TestDirectExponent:
    def test_below_relaxed_bound(self):
        # maximizing over sigma after the inner infimum can only fall below
        # the single-evaluation bound at the fixed point
        for l, r, p in ((3, 6, 0.05), (3, 6, 0.08), (2, 8, 0.04)):
            direct = noiseless_direct_exponent(l, r, p, sigma_step=0.01)
            assert direct.value <= achievable_margin(l, r, p) + 1e-9

    def test_sigma_step_already_converged(self):
        coarse = noiseless_direct_exponent(3, 6, 0.08, sigma_step=0.01)
        fine = noiseless_direct_exponent(3, 6, 0.08, sigma_step=0.001)
        assert abs(coarse.value - fine.value) <= 1e-6

    def test_maximizer_inside_weight_window(self):
        direct = noiseless_direct_exponent(3, 6, 0.08, sigma_step=0.01)
        assert 3 * 0.08 / 6 <= direct.sigma <= 3 * 0.08

    def test_noisy_zero_noise_is_identical(self):
        for p in (0.05, 0.1):
            a = noiseless_direct_exponent(3, 6, p, sigma_step=0.01)
            b = noisy_direct_exponent(3, 6, p, 0.0, sigma_step=0.01)
            assert abs(a.value - b.value) <= 1e-12

    def test_noisy_below_relaxed_bound(self):
        l, r, p, q = 3, 6, 0.05, 0.01
        direct = noisy_direct_exponent(l, r, p, q, sigma_step=0.01)
        assert direct.value <= noisy_achievable_margin(l, r, p, q) + 1e-9

    def test_recoverable_regime_is_negative(self):
        assert noiseless_direct_exponent(3, 6, 0.05, sigma_step=0.01).value < 0
        assert noisy_direct_exponent(3, 6, 0.05, 0.01, sigma_step=0.01).value < 0


class TestBinaryDirectMargin:
    def test_equals_closed_form_at_small_p(self):
        # at low weight the optimizing argument sits at the fixed point and
        # the margin collapses to the closed-form bound
        f6 = or_function(6)
        for p in (0.02, 0.08, 0.14, 0.2):
            m = binary_direct_margin(f6, 3, 6, p)
            assert abs(m.value - achievable_margin(3, 6, p)) <= 1e-9
            assert m.z == pytest.approx(fixed_point_z(6), abs=1e-5)

    def test_improves_on_closed_form_at_large_p(self):
        # past the crossover weight the interior optimum beats the fixed point
        m = binary_direct_margin(or_function(8), 4, 8, 0.2)
        assert m.value < achievable_margin(4, 8, 0.2) - 1e-9

    def test_constant_function_is_uninformative(self):
        const = PoolFunction((0, 1), (0,), 2, {(2, 0): 0, (1, 1): 0, (0, 2): 0})
        m = binary_direct_margin(const, 2, 2, 0.1)
        assert m.value == pytest.approx(binary_entropy(0.1), abs=1e-12)

    def test_probability_validated(self):
        with pytest.raises(InputError):
            binary_direct_margin(or_function(6), 3, 6, 0.0)
        with pytest.raises(InputError):
            binary_direct_margin(or_function(6), 3, 6, 1.0)


class TestGeneralDirectMargin:
    def test_matches_binary_for_or(self):
        for l, r, p in ((3, 6, 0.08), (2, 4, 0.05)):
            gm = general_direct_margin(or_function(r), l, r, [1 - p, p])
            bm = binary_direct_margin(or_function(r), l, r, p)
            assert gm.converged
            assert abs(gm.value - bm.value) <= 1e-8

    def test_threshold_function_converges(self):
        gm = general_direct_margin(threshold_function(4, 2), 2, 4, [0.9, 0.1])
        assert gm.converged
        assert gm.sweeps <= 200

    def test_ternary_function_converges(self):
        gm = general_direct_margin(ternary_max(), 1, 2, [0.8, 0.15, 0.05])
        assert gm.converged
        # one argument per output symbol, the first pinned to 1
        assert len(gm.z) == 3
        assert gm.z[0] == 1.0

    def test_count_function_is_fully_informative(self):
        # the count output determines the pool type, so confusion carries no
        # entropy beyond the source and the margin drops well below the OR one
        gm = general_direct_margin(count_function(4), 2, 4, [0.9, 0.1])
        bm = binary_direct_margin(or_function(4), 2, 4, 0.1)
        assert gm.value < bm.value + 1e-12
