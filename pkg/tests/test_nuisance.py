import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from targetlearn import (
    NumericalError,
    NuisanceSpec,
    ValidationError,
    cross_fit,
    fit_outcome_means,
    fit_propensity_logit,
    fit_propensity_population,
)

from util import make_dataset


class TestPropensityLogit:
    def test_intercept_only_equals_sample_share(self):
        ds = make_dataset(np.arange(6.0), [1, 1, 1, -1, -1, -1])
        model = fit_propensity_logit(ds)
        assert np.allclose(model.predict(ds), 0.5, atol=1e-10)

    def test_saturated_reproduces_cell_shares(self):
        # cell 0: 3 of 10 treated; cell 1: 6 of 10 treated
        d = [1] * 3 + [-1] * 7 + [1] * 6 + [-1] * 4
        z = [[0]] * 10 + [[1]] * 10
        ds = make_dataset(np.arange(20.0), d, z=z)
        p = fit_propensity_logit(ds, "saturated").predict(ds)
        assert np.allclose(p[:10], 0.3, atol=1e-8)
        assert np.allclose(p[10:], 0.6, atol=1e-8)

    def test_single_arm_cell_is_separation(self):
        d = [1, 1, 1, -1, 1, -1]
        z = [[0], [0], [0], [1], [1], [1]]
        ds = make_dataset(np.arange(6.0), d, z=z)
        with pytest.raises(NumericalError, match="separation.*z_1"):
            fit_propensity_logit(ds, "saturated")
        with pytest.raises(NumericalError, match="separation"):
            fit_propensity_logit(ds, "main")

    def test_predictions_clipped(self):
        # 19 of 20 treated in one cell: MLE share 0.95 exceeds the 0.9 ceiling
        d = [1] * 19 + [-1] + [-1] * 10 + [1] * 10
        z = [[0]] * 20 + [[1]] * 20
        ds = make_dataset(np.arange(40.0), d, z=z)
        model = fit_propensity_logit(ds, "saturated", clip=0.1)
        p = model.predict(ds)
        assert p.max() <= 0.9 and p.min() >= 0.1

    def test_row_order_invariance(self):
        rng = np.random.default_rng(0)
        d = rng.choice([-1, 1], size=30)
        d[:2] = [1, -1]
        z = rng.integers(0, 2, size=(30, 1))
        z[:2] = [[0], [1]]
        d[2:4], z[2:4] = [1, -1], [[1], [0]]  # both arms in both cells
        ds = make_dataset(np.arange(30.0), d, z=z)
        perm = rng.permutation(30)
        shuffled = ds.subset(perm)
        p1 = fit_propensity_logit(ds).predict(ds)
        p2 = fit_propensity_logit(shuffled).predict(ds)
        assert np.allclose(p1, p2, atol=1e-9)


class TestPopulationPropensity:
    def test_returns_supplied_values(self):
        ds = make_dataset(np.arange(4.0), [1, -1, 1, -1], z=[[0], [0], [1], [1]])
        model = fit_propensity_population(ds, {(0,): 0.5, (1,): 0.116})
        assert np.allclose(model.predict(ds), [0.5, 0.5, 0.116, 0.116])

    def test_missing_cell_rejected(self):
        ds = make_dataset(np.arange(4.0), [1, -1, 1, -1], z=[[0], [0], [1], [1]])
        with pytest.raises(ValidationError, match="missing cells"):
            fit_propensity_population(ds, {(0,): 0.5})

    def test_probabilities_must_be_interior(self):
        ds = make_dataset(np.arange(2.0), [1, -1])
        with pytest.raises(ValidationError, match="outside"):
            fit_propensity_population(ds, {(): 1.0})


class TestOutcomeMeans:
    def test_intercept_only_equals_arm_means(self):
        y = [8.0, 8.0, 8.0, 5.0, 5.0, 5.0]
        ds = make_dataset(y, [1, 1, 1, -1, -1, -1])
        model = fit_outcome_means(ds)
        mu1, mu0 = model.predict(ds)
        assert np.allclose(mu1, 8.0) and np.allclose(mu0, 5.0)

    def test_saturated_reproduces_cell_arm_means(self):
        rng = np.random.default_rng(1)
        z = np.repeat([0, 1, 2], 20).reshape(-1, 1)
        d = np.tile([1, -1], 30)
        y = rng.normal(size=60) + z[:, 0] * 3.0 + (d == 1) * 2.0
        ds = make_dataset(y, d, z=z)
        mu1, mu0 = fit_outcome_means(ds, "saturated").predict(ds)
        for cell in range(3):
            mask = z[:, 0] == cell
            assert np.allclose(mu1[mask], y[mask & (d == 1)].mean(), atol=1e-8)
            assert np.allclose(mu0[mask], y[mask & (d == -1)].mean(), atol=1e-8)

    def test_collinear_columns_listed(self):
        # two stratum variables carrying the same category: identical dummies
        z = [[0, 0], [1, 1], [0, 0], [1, 1], [0, 0], [1, 1]]
        ds = make_dataset(np.arange(6.0), [1, -1, 1, -1, 1, -1], z=z)
        with pytest.raises(NumericalError, match="collinear.*z_2"):
            fit_outcome_means(ds)

    def test_too_few_arm_observations(self):
        z = [[0], [1], [0], [1]]
        ds = make_dataset([1.0, 2.0, 3.0, 4.0], [1, -1, -1, -1], z=z)
        with pytest.raises(NumericalError, match="arm \\+1"):
            fit_outcome_means(ds)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_saturated_models_match_cell_statistics(seed):
    rng = np.random.default_rng(seed)
    n = 40
    z = rng.integers(0, 2, size=(n, 1))
    d = np.where(rng.uniform(size=n) < 0.5, 1, -1)
    # force both arms into both cells so the fits are defined
    z[:4, 0] = [0, 0, 1, 1]
    d[:4] = [1, -1, 1, -1]
    y = rng.normal(size=n) * 3.0
    ds = make_dataset(y, d, z=z)
    p = fit_propensity_logit(ds, "saturated", clip=1e-6).predict(ds)
    mu1, mu0 = fit_outcome_means(ds, "saturated").predict(ds)
    for cell in range(2):
        mask = z[:, 0] == cell
        share = (d[mask] == 1).mean()
        assert np.allclose(p[mask], np.clip(share, 1e-6, 1 - 1e-6), atol=1e-8)
        assert np.allclose(mu1[mask], y[mask & (d == 1)].mean(), atol=1e-8)
        assert np.allclose(mu0[mask], y[mask & (d == -1)].mean(), atol=1e-8)


class TestCrossFit:
    def test_homogeneous_equals_plugin(self):
        y = np.array([8.0] * 6 + [5.0] * 6)
        d = np.array([1] * 6 + [-1] * 6)
        ds = make_dataset(y, d)
        # constant y per arm: out-of-fold means equal plug-in for any folds
        for seed in (0, 1, 2):
            fit = cross_fit(ds, k=3, seed=seed)
            assert np.allclose(fit.mu_treated, 8.0, atol=1e-8)
            assert np.allclose(fit.mu_control, 5.0, atol=1e-8)
        # seed 5 gives arm-balanced folds, so the share is fold-invariant too
        fit = cross_fit(ds, k=3, seed=5)
        assert np.allclose(fit.p_hat, 0.5, atol=1e-8)

    def test_leave_one_out_closed_form(self):
        y = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        d = np.array([1, 1, 1, -1, -1, -1])
        ds = make_dataset(y, d)
        fit = cross_fit(ds, k=6, seed=4, spec=NuisanceSpec(clip=1e-9))
        for i in range(6):
            others = np.arange(6) != i
            treated = others & (d == 1)
            control = others & (d == -1)
            assert fit.mu_treated[i] == pytest.approx(y[treated].mean(), abs=1e-8)
            assert fit.mu_control[i] == pytest.approx(y[control].mean(), abs=1e-8)
            assert fit.p_hat[i] == pytest.approx((d[others] == 1).mean(), abs=1e-7)

    def test_fold_missing_arm_names_fold(self):
        ds = make_dataset([1.0, 2.0, 3.0, 4.0], [1, -1, -1, -1])
        with pytest.raises((ValidationError, NumericalError), match="fold \\d"):
            cross_fit(ds, k=2, seed=0)
