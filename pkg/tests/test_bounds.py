import json
import math

import pytest

from pooltest import (
    CURVE_IDS,
    InputError,
    NoThresholdError,
    ThresholdPair,
    achievable_margin,
    binary_entropy,
    collision_exponent,
    converse_margin,
    emit_curve,
    entropy,
    fixed_point_z,
    linspace,
    noisy_achievable_margin,
    noisy_collision_factor,
    noisy_converse_margin,
    threshold_lower,
    threshold_pair,
    threshold_upper,
)

# thresholds below were frozen from an independent high-precision run and
# cross-checked by bisection against the margin sign changes
FROZEN_THRESHOLDS = {
    (2, 4): (0.092763, 0.097350),
    (3, 6): (0.110022, 0.110023),
    (4, 8): (0.104629, 0.105999),
    (5, 10): (0.096091, 0.099480),
    (6, 12): (0.087848, 0.093027),
    (2, 8): (0.022022, 0.026824),
    (3, 12): (0.038651, 0.039535),
    (4, 16): (0.041685, 0.041687),
    (5, 20): (0.040693, 0.040978),
    (6, 24): (0.038556, 0.039427),
}


class TestEntropy:
    def test_binary_entropy_known_values(self):
        assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.25) == pytest.approx(
            -0.25 * math.log2(0.25) - 0.75 * math.log2(0.75), abs=1e-15
        )

    def test_binary_entropy_symmetry(self):
        for k in range(1, 50):
            p = k / 100
            assert abs(binary_entropy(p) - binary_entropy(1 - p)) <= 1e-14

    def test_binary_entropy_domain(self):
        with pytest.raises(InputError):
            binary_entropy(-0.01)
        with pytest.raises(InputError):
            binary_entropy(1.01)

    def test_entropy_general(self):
        assert entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
        assert entropy([1.0, 0.0]) == 0.0
        assert entropy([0.25, 0.25, 0.25, 0.25]) == pytest.approx(2.0, abs=1e-14)
        assert entropy([0.3, 0.7]) == pytest.approx(binary_entropy(0.3), abs=1e-15)

    def test_entropy_rejects_bad_distributions(self):
        with pytest.raises(InputError):
            entropy([0.5, 0.6])
        with pytest.raises(InputError):
            entropy([-0.1, 1.1])


class TestConverseMargin:
    def test_matches_direct_formula(self):
        l, r, p = 3, 6, 0.08
        expected = binary_entropy(p) - (l / r) * binary_entropy((1 - p) ** r)
        assert converse_margin(l, r, p) == pytest.approx(expected, abs=1e-15)

    def test_sign_change_brackets_threshold(self):
        lo, hi = FROZEN_THRESHOLDS[(3, 6)]
        assert converse_margin(3, 6, hi - 5e-6) < 0
        assert converse_margin(3, 6, hi + 5e-6) > 0

    def test_noiseless_limit_of_noisy(self):
        for p in (0.01, 0.05, 0.11, 0.2, 0.35, 0.49):
            a = converse_margin(3, 6, p)
            b = noisy_converse_margin(3, 6, p, 0.0)
            assert abs(a - b) <= 1e-14

    def test_noise_shrinks_the_negative_region(self):
        # extra channel noise can only make recovery harder
        p = 0.09
        assert noisy_converse_margin(2, 4, p, 0.05) > converse_margin(2, 4, p)


class TestAchievableMargin:
    def test_fixed_point_solves_pool_equation(self):
        for r in (2, 4, 6, 12):
            z = fixed_point_z(r)
            assert (1 + z) ** r - 1 == pytest.approx(1.0, abs=1e-12)

    def test_matches_direct_formula(self):
        l, r, p = 3, 6, 0.08
        z = fixed_point_z(r)
        expected = -(l - 1) * binary_entropy(p) - l * p * math.log2(z)
        assert achievable_margin(l, r, p) == pytest.approx(expected, abs=1e-13)

    def test_midpoint_convexity_in_p(self):
        for k in range(1, 48):
            a, b = k / 100, (k + 2) / 100
            mid = achievable_margin(3, 6, (a + b) / 2)
            chord = (achievable_margin(3, 6, a) + achievable_margin(3, 6, b)) / 2
            assert mid <= chord + 1e-10

    def test_noisy_adds_noise_entropy(self):
        l, r, p, q = 3, 6, 0.05, 0.08
        expected = achievable_margin(l, r, p) + (l / r) * binary_entropy(q)
        assert noisy_achievable_margin(l, r, p, q) == pytest.approx(expected, abs=1e-13)


class TestCollisionExponent:
    def test_sigma_spread_vanishes_at_fixed_point(self):
        l, r, p = 3, 6, 0.08
        z = fixed_point_z(r)
        values = [collision_exponent(l, r, p, s, z) for s in (0.0, 0.1, 0.25, 0.4, 0.5)]
        assert max(values) - min(values) <= 1e-12

    def test_equals_achievable_margin_at_fixed_point(self):
        for l, r, p in ((3, 6, 0.08), (2, 4, 0.05), (4, 8, 0.1)):
            z = fixed_point_z(r)
            assert collision_exponent(l, r, p, 0.5, z) == pytest.approx(
                achievable_margin(l, r, p), abs=1e-12
            )

    def test_rejects_nonpositive_z(self):
        with pytest.raises(InputError):
            collision_exponent(3, 6, 0.08, 0.5, 0.0)

    def test_noisy_factor_is_one_at_fixed_point(self):
        for r in (2, 4, 6, 10):
            z = fixed_point_z(r)
            for q in (0.0, 0.1, 0.3, 0.5):
                for sigma in (0.0, 0.25, 0.5, 1.0):
                    assert abs(noisy_collision_factor(r, q, sigma, z) - 1.0) <= 1e-15

    def test_noisy_factor_varies_off_fixed_point(self):
        assert noisy_collision_factor(6, 0.1, 0.5, 0.3) != pytest.approx(1.0, abs=1e-3)


class TestThresholds:
    @pytest.mark.parametrize("pair,frozen", sorted(FROZEN_THRESHOLDS.items()))
    def test_frozen_values(self, pair, frozen):
        l, r = pair
        lo, hi = frozen
        assert threshold_lower(l, r) == pytest.approx(lo, abs=5e-6)
        assert threshold_upper(l, r) == pytest.approx(hi, abs=5e-6)

    def test_ordering(self):
        for (l, r), _ in sorted(FROZEN_THRESHOLDS.items()):
            assert threshold_lower(l, r) <= threshold_upper(l, r) + 1e-9

    def test_pair_bundles_both(self):
        pair = threshold_pair(3, 6)
        assert pair.l == 3 and pair.r == 6
        assert pair.p_lower == pytest.approx(threshold_lower(3, 6), abs=1e-12)
        assert pair.p_upper == pytest.approx(threshold_upper(3, 6), abs=1e-12)

    def test_unit_ratio_has_no_root(self):
        # a single-object-per-test design recovers everything; the converse
        # margin never crosses zero
        with pytest.raises(NoThresholdError):
            threshold_upper(1, 2)

    def test_odd_ratio_is_fine(self):
        pair = threshold_pair(3, 5)
        assert 0 < pair.p_lower <= pair.p_upper < 0.5

    def test_json_dict(self):
        data = threshold_pair(3, 6).to_json_dict()
        assert data["l"] == 3 and data["r"] == 6
        assert data["p_lower"] == pytest.approx(0.110022, abs=5e-6)
        assert data["p_upper"] == pytest.approx(0.110023, abs=5e-6)
        json.dumps(data)


class TestCurves:
    def test_linspace_endpoints_and_count(self):
        grid = linspace(0.0, 1.0, 4)
        assert grid == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        assert linspace(2.0, 2.0, 3) == [2.0, 2.0, 2.0, 2.0]
        with pytest.raises(InputError):
            linspace(0.0, 1.0, 0)

    def test_curve_ids_cover_five_families(self):
        assert len(CURVE_IDS) == 5
        assert "converse-vs-p" in CURVE_IDS
        assert "collision-vs-z" in CURVE_IDS

    def test_converse_curve_rows(self):
        rows = emit_curve("converse-vs-p", linspace(0.01, 0.2, 19), l=3, r=6)
        assert len(rows) == 20
        x, y = rows[0]
        assert x == pytest.approx(0.01)
        assert y == pytest.approx(converse_margin(3, 6, 0.01), abs=1e-15)

    def test_degree_sweep_casts_to_int(self):
        rows = emit_curve("converse-vs-l", [2.0, 3.0, 4.0], p=0.05)
        assert [x for x, _ in rows] == [2, 3, 4]
        assert rows[1][1] == pytest.approx(converse_margin(3, 6, 0.05), abs=1e-15)

    def test_collision_curve_needs_sigma(self):
        rows = emit_curve(
            "collision-vs-z", linspace(0.05, 0.3, 10), l=3, r=6, p=0.08, sigma=0.5
        )
        assert len(rows) == 11
        assert rows[0][1] == pytest.approx(
            collision_exponent(3, 6, 0.08, 0.5, 0.05), abs=1e-15
        )

    def test_unknown_curve_rejected(self):
        with pytest.raises(InputError):
            emit_curve("margin-vs-q", [0.1], l=3, r=6)
