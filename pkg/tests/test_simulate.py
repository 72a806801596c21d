import numpy as np
import pytest
from scipy import stats

from targetlearn import (
    DgpSpec,
    FeatureSpec,
    NoiseSpec,
    PolicyTree,
    Surface,
    Term,
    ValidationError,
    build_scores,
    cold_analog_spec,
    estimate_ate_aipw,
    generate,
    named_spec,
    paper_analog_spec,
    true_value,
    two_group_spec,
)
from targetlearn.simulate import _BLOCK, _block_rng, _draw_block
from targetlearn.tree import TreeNode


def no_noise_spec(tau=2.0):
    return DgpSpec(
        features=(FeatureSpec("x_1", "uniform", 0.0, 1.0),),
        baseline=Surface.constant(10.0),
        effect=Surface.constant(tau),
        noise=NoiseSpec("normal", sigma=0.0),
        propensities=(0.5,),
        cost=1.16,
    )


class TestGenerate:
    def test_zero_noise_constant_effect_exact_difference(self):
        ds, truth = generate(no_noise_spec(2.0), 500, seed=0)
        diff = ds.y[ds.d == 1].mean() - ds.y[ds.d == -1].mean()
        assert diff == 2.0  # exact: constants average exactly
        assert np.all(truth.true_cate == 2.0)

    def test_same_seed_bit_identical(self):
        spec = paper_analog_spec()
        a, _ = generate(spec, 3000, seed=42)
        b, _ = generate(spec, 3000, seed=42)
        assert a.ids == b.ids
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.d, b.d)
        assert np.array_equal(a.x, b.x)
        c, _ = generate(spec, 3000, seed=43)
        assert not np.array_equal(a.y, c.y)

    def test_block_substreams_make_generation_chunkable(self):
        spec = two_group_spec()
        n = _BLOCK + 1234  # spans two blocks
        ds, _ = generate(spec, n, seed=5)
        parts = []
        for block_index, start in enumerate(range(0, n, _BLOCK)):
            m = min(_BLOCK, n - start)
            parts.append(_draw_block(spec, m, _block_rng(5, block_index), True))
        x_manual = np.concatenate([p[0] for p in parts])
        assert np.array_equal(ds.x, x_manual)

    def test_sutva_consistency_observed_outcome(self):
        spec = no_noise_spec(3.0)
        ds, truth = generate(spec, 400, seed=1)
        y_control = np.full(ds.n, 10.0)
        y_treated = y_control + truth.true_cate
        expected = np.where(ds.d == 1, y_treated, y_control)
        assert np.array_equal(ds.y, expected)

    def test_skewed_noise_calibration(self):
        # lognormal moment-matched to mean 16, sd 30 is strongly right-skewed
        noise = NoiseSpec.lognormal_from_moments(16.0, 30.0)
        draws = noise.sample(np.random.default_rng(0), 20_000)
        assert draws.mean() == pytest.approx(16.0, rel=0.05)
        assert stats.skew(draws) > 2.0

    def test_treated_share_tracks_stratum_propensity(self):
        spec = paper_analog_spec()
        ds, _ = generate(spec, 20_000, seed=2)
        for cell, p in enumerate(spec.propensities):
            mask = ds.z[:, 0] == cell
            share = (ds.d[mask] == 1).mean()
            se = np.sqrt(p * (1 - p) / mask.sum())
            assert abs(share - p) < 3 * se

    def test_aipw_recovers_true_ate(self):
        for seed in (3, 4):
            ds, truth = generate(two_group_spec(), 20_000, seed=seed)
            est, se = estimate_ate_aipw(build_scores(ds))
            assert abs(est - 1.0) < 3 * se

    def test_n_must_be_positive(self):
        with pytest.raises(ValidationError):
            generate(two_group_spec(), 0, seed=0)

    def test_effect_equal_to_cost_means_no_treat(self):
        spec = no_noise_spec(tau=1.16)  # exactly the cost
        _, truth = generate(spec, 50, seed=6)
        assert np.all(truth.true_action == -1)


class TestTrueValue:
    def test_benchmark_formulas(self):
        spec = two_group_spec()
        v_all, se = true_value(spec, "all")
        assert se == 0.0
        assert v_all == pytest.approx(10.0 + 1.0 - 1.16)
        v_none, _ = true_value(spec, "none")
        assert v_none == pytest.approx(10.0)
        v_rand, _ = true_value(spec, "random")
        assert v_rand == pytest.approx(10.0 + (1.0 - 1.16) / 2)

    def test_two_group_optimal_value_analytic(self):
        value, se = true_value(two_group_spec(), "optimal")
        assert se == 0.0
        assert value == pytest.approx(10.0 + 0.5 * (3.0 - 1.16), abs=1e-9)

    def test_tree_rule_value_analytic(self):
        spec = two_group_spec()
        tree = PolicyTree(
            TreeNode(feature=0, threshold=0.5,
                     left=TreeNode(action=-1), right=TreeNode(action=1)),
            max_depth=1, feature_names=("x_1",),
        )
        value, se = true_value(spec, tree)
        assert se == 0.0
        assert value == pytest.approx(10.92, abs=1e-9)
        # a mistuned threshold treats part of the losing group
        worse = PolicyTree(
            TreeNode(feature=0, threshold=0.25,
                     left=TreeNode(action=-1), right=TreeNode(action=1)),
            max_depth=1, feature_names=("x_1",),
        )
        value_worse, _ = true_value(spec, worse)
        assert value_worse == pytest.approx(10.0 + 0.25 * (-1 - 1.16) + 0.5 * (3 - 1.16))

    def test_monte_carlo_path_for_linear_effects(self):
        spec = DgpSpec(
            features=(FeatureSpec("x_1", "uniform", 0.0, 1.0),),
            baseline=Surface.constant(0.0),
            effect=Surface((Term(kind="linear", coefs=((0, 2.0),)),)),
            noise=NoiseSpec("normal", sigma=1.0),
            propensities=(0.5,), cost=0.0,
        )
        value_all, se_all = true_value(spec, "all")
        assert se_all == 0.0  # benchmark means stay analytic under linear effects
        assert value_all == pytest.approx(1.0)  # E[2 x] = 1
        # the optimal region of a linear surface needs simulation
        value, se = true_value(spec, "optimal", mc_draws=200_000)
        assert se > 0.0
        assert abs(value - 1.0) < 4 * se  # E[2 x | 2 x > 0] P(...) = E[2 x] here

    def test_truth_values_order(self):
        _, truth = generate(two_group_spec(), 100, seed=7)
        assert truth.value_optimal >= truth.value_all_treat
        assert truth.value_optimal >= truth.value_no_treat
        assert truth.value_random == pytest.approx(
            (truth.value_all_treat + truth.value_no_treat) / 2
        )
        assert truth.optimal_gain_vs_no_treat == pytest.approx(0.92)


class TestCalibratedSpecs:
    def test_paper_analog_moments(self):
        spec = paper_analog_spec()
        ds, truth = generate(spec, 20_000, seed=8)
        assert 14.0 <= ds.y.mean() <= 18.0
        assert 0.25 <= truth.optimal_share <= 0.40
        assert truth.optimal_gain_vs_no_treat > 0
        assert truth.optimal_gain_vs_all_treat > 0
        assert stats.skew(ds.y) > 2.0

    def test_cold_analog_pattern(self):
        spec = cold_analog_spec()
        _, truth = generate(spec, 1000, seed=9)
        assert truth.optimal_share <= 0.05
        assert truth.value_all_treat < truth.value_no_treat  # broad gifting loses
        assert truth.optimal_gain_vs_no_treat >= 0

    def test_named_spec_lookup(self):
        assert named_spec("two-group").name == "two-group"
        with pytest.raises(ValidationError, match="unknown spec"):
            named_spec("nope")

    def test_spec_json_round_trip(self):
        spec = paper_analog_spec()
        again = DgpSpec.from_json(spec.to_json())
        assert again == spec
        ds1, _ = generate(spec, 500, seed=10)
        ds2, _ = generate(again, 500, seed=10)
        assert np.array_equal(ds1.y, ds2.y)
