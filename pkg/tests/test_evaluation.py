import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from targetlearn import (
    ConstantPolicy,
    ExactPolicyTree,
    ValidationError,
    build_scores,
    cross_validate,
    evaluate,
    generate,
    report_table,
    significance_stars,
    transfer_evaluate,
    two_group_spec,
)

from test_scores import scores_from_arrays


class TestEvaluate:
    def test_two_unit_worked_example(self):
        # gamma - c = (1, -1), actions (+1, -1)
        s = scores_from_arrays([1.0, -1.0], [0.0, 0.0], cost=0.0)
        rep = evaluate(s, [1, -1])
        assert rep.gain_vs_all_treat.estimate == pytest.approx(0.5)
        assert rep.gain_vs_no_treat.estimate == pytest.approx(0.5)
        assert rep.gain_vs_random.estimate == pytest.approx(0.5)
        assert rep.gain_vs_random.estimate == pytest.approx(
            (rep.gain_vs_all_treat.estimate + rep.gain_vs_no_treat.estimate) / 2
        )

    def test_constant_all_treat_collapses(self):
        s = scores_from_arrays([3.0, 5.0, 1.0], [1.0, 0.0, 2.0], cost=1.16)
        rep = evaluate(s, [1, 1, 1])
        assert rep.gain_vs_all_treat.estimate == 0.0  # exactly
        assert rep.gain_vs_all_treat.se == 0.0
        assert rep.value.estimate == pytest.approx(np.mean([3.0, 5.0, 1.0]) - 1.16)
        assert rep.share_treated == 1.0

    def test_constant_no_treat_collapses(self):
        s = scores_from_arrays([3.0, 5.0], [1.0, 0.5], cost=1.16)
        rep = evaluate(s, [-1, -1])
        assert rep.gain_vs_no_treat.estimate == 0.0
        assert rep.value.estimate == pytest.approx(0.75)
        assert rep.share_treated == 0.0

    def test_misaligned_lengths_rejected(self):
        s = scores_from_arrays([1.0, 2.0], [0.0, 0.0])
        with pytest.raises(ValidationError):
            evaluate(s, [1, -1, 1])

    def test_actions_domain_checked(self):
        s = scores_from_arrays([1.0, 2.0], [0.0, 0.0])
        with pytest.raises(ValidationError, match="-1, \\+1"):
            evaluate(s, [1, 0])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 100_000))
    def test_gain_identities(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 60))
        s = scores_from_arrays(rng.normal(size=n) * 10, rng.normal(size=n),
                               cost=float(rng.uniform(0, 2)))
        actions = rng.choice([-1, 1], size=n)
        rep = evaluate(s, actions)
        assert rep.gain_vs_random.estimate == pytest.approx(
            (rep.gain_vs_all_treat.estimate + rep.gain_vs_no_treat.estimate) / 2,
            abs=1e-12,
        )
        no_treat = evaluate(s, -np.ones(n, dtype=int))
        assert rep.value.estimate - no_treat.value.estimate == pytest.approx(
            rep.gain_vs_no_treat.estimate, abs=1e-12
        )

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        n = 30
        s = scores_from_arrays(rng.normal(size=n), rng.normal(size=n), cost=0.5)
        actions = rng.choice([-1, 1], size=n)
        perm = rng.permutation(n)
        s_perm = scores_from_arrays(s.gamma1[perm], s.gamma_neg1[perm], cost=0.5)
        a, b = evaluate(s, actions), evaluate(s_perm, actions[perm])
        assert a.value.estimate == pytest.approx(b.value.estimate, abs=1e-12)
        assert a.gain_vs_random.se == pytest.approx(b.gain_vs_random.se, abs=1e-12)


class TestStars:
    def test_star_cutoffs(self):
        assert significance_stars(2.14, 0.82) == "***"  # z = 2.61 > 2.576
        assert significance_stars(2.0, 1.0) == "**"
        assert significance_stars(1.7, 1.0) == "*"
        assert significance_stars(1.0, 1.0) == ""
        assert significance_stars(0.0, 0.5) == ""
        assert significance_stars(0.1, 0.0) == "***"  # degenerate z -> inf
        assert significance_stars(0.0, 0.0) == ""

    def test_report_table_renders_stars(self):
        s = scores_from_arrays(np.full(50, 3.0) + np.arange(50) * 0.01,
                               np.zeros(50), cost=1.16)
        rep = evaluate(s, np.ones(50, dtype=int), label="all")
        text = report_table([rep], title="demo")
        assert "demo" in text and "all" in text and "***" in text


class TestCrossValidate:
    def test_constant_learner_zero_gain_vs_all_treat(self):
        ds, _ = generate(two_group_spec(), 400, seed=1)
        rep = cross_validate(ds, ConstantPolicy(action=1), k=5, seed=2)
        assert rep.gain_vs_all_treat.estimate == 0.0
        assert rep.share_treated == 1.0
        assert len(rep.folds) == 5

    def test_fold_detail_recombines_to_pooled_estimates(self):
        ds, _ = generate(two_group_spec(), 300, seed=3)
        rep = cross_validate(ds, ExactPolicyTree(depth=1), k=3, seed=4)
        fold_means = [f.gain_vs_no_treat.estimate for f in rep.folds]
        assert rep.gain_vs_no_treat.estimate == pytest.approx(np.mean(fold_means))
        assert rep.n == 300

    def test_thread_count_invariance(self):
        ds, _ = generate(two_group_spec(), 300, seed=5)
        rep1 = cross_validate(ds, ExactPolicyTree(depth=2), k=4, seed=6, threads=1)
        rep2 = cross_validate(ds, ExactPolicyTree(depth=2), k=4, seed=6, threads=4)
        assert rep1.value.estimate == rep2.value.estimate
        assert rep1.gain_vs_no_treat.se == rep2.gain_vs_no_treat.se
        assert rep1.share_treated == rep2.share_treated

    def test_report_dict_round_trip(self):
        ds, _ = generate(two_group_spec(), 200, seed=7)
        rep = cross_validate(ds, ExactPolicyTree(depth=1), k=2, seed=8)
        from targetlearn import ValueReport

        again = ValueReport.from_dict(rep.to_dict())
        assert again.value.estimate == rep.value.estimate
        assert len(again.folds) == len(rep.folds)


class TestTransfer:
    def test_same_sample_matches_in_sample_evaluation(self):
        ds, _ = generate(two_group_spec(), 500, seed=9)
        rule = ExactPolicyTree(depth=1).fit(
            ds.x, build_scores(ds).net_reward, feature_names=ds.schema.feature_names
        )
        rep_transfer = transfer_evaluate(rule, ds)
        rep_direct = evaluate(build_scores(ds), rule.predict(ds.x))
        assert rep_transfer.value.estimate == pytest.approx(rep_direct.value.estimate)
        assert rep_transfer.gain_vs_no_treat.se == pytest.approx(
            rep_direct.gain_vs_no_treat.se
        )

    def test_missing_features_listed(self):
        ds, _ = generate(two_group_spec(), 100, seed=10)
        rule = ExactPolicyTree(depth=1).fit(
            ds.x, np.ones(ds.n), feature_names=("x_other",)
        )
        with pytest.raises(ValidationError, match="x_other"):
            transfer_evaluate(rule, ds)

    def test_same_dgp_gains_agree_within_3se(self):
        spec = two_group_spec()
        ds_a, _ = generate(spec, 4000, seed=11)
        ds_b, _ = generate(spec, 4000, seed=12)
        rule = ExactPolicyTree(depth=1).fit(
            ds_a.x, build_scores(ds_a).net_reward,
            feature_names=ds_a.schema.feature_names,
        )
        rep_a = transfer_evaluate(rule, ds_a)
        rep_b = transfer_evaluate(rule, ds_b)
        scale = 3 * max(rep_a.gain_vs_no_treat.se, rep_b.gain_vs_no_treat.se)
        assert abs(rep_a.gain_vs_no_treat.estimate - rep_b.gain_vs_no_treat.estimate) < scale


class TestRegretAndSubsets:
    def test_true_optimal_rule_upper_bounds_learned_rules(self):
        # regret non-negativity at scale: no learned rule evaluates above
        # the true optimal assignments by more than sampling noise
        ds, truth = generate(two_group_spec(), 20_000, seed=13)
        scores = build_scores(ds)
        optimal = evaluate(scores, truth.true_action)
        learned_rule = ExactPolicyTree(depth=2).fit(
            ds.x, scores.net_reward, feature_names=ds.schema.feature_names
        )
        learned = evaluate(scores, learned_rule.predict(ds.x))
        slack = 3 * max(optimal.value.se, learned.value.se)
        assert optimal.value.estimate >= learned.value.estimate - slack

    def test_feature_subset_restricts_the_rule(self):
        ds, _ = generate(two_group_spec(), 600, seed=14)
        rep = cross_validate(ds, ExactPolicyTree(depth=1), k=4, seed=15,
                             features=["x_1"])
        assert 0.0 <= rep.share_treated <= 1.0
        with pytest.raises(ValidationError, match="missing"):
            cross_validate(ds, ExactPolicyTree(depth=1), k=4, seed=15,
                           features=["x_9"])
