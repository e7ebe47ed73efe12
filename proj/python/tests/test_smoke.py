import os

import numpy as np
import pytest

import treecascade as tc


def test_population_fit_recovers_generating_tree():
    model = tc.random_unit_variance_model(6, seed=5)
    cov = tc.population_covariance(model)
    fit = tc.fit_cascade(cov)
    assert fit.tree == model.rooted_tree.tree
    assert fit.tree_unique
    assert fit.objective == pytest.approx(fit.identity_objective(), abs=1e-12)
    assert fit.objective == pytest.approx(6 - sum(w for w in fit.weights), abs=1e-12)


def test_cascade_inverse_matches_numpy():
    model = tc.random_unit_variance_model(7, seed=11)
    a = model.dense_coefficients()
    b = tc.cascade_inverse(model)
    np.testing.assert_allclose(b, np.linalg.inv(np.eye(7) - a), atol=1e-12)
    checks = tc.verify_covariance_lemmas(model)
    assert all(row["passed"] for row in checks.values())


def test_simulate_and_empirical_fit():
    model = tc.random_unit_variance_model(5, seed=3)
    x = tc.simulate(model, "laplace", 20000, seed=1)
    assert x.shape == (20000, 5)
    np.testing.assert_allclose(np.cov(x, rowvar=False), tc.population_covariance(model), atol=0.05)
    fit = tc.empirical_fit(x, names=list("abcde"))
    assert fit.tree == model.rooted_tree.tree
    assert fit.names == list("abcde")


def test_brute_force_and_chow_liu_agree():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((5, 7))
    cov = g @ g.T
    cov = (cov + cov.T) / 2
    assert tc.brute_force_fit(cov).objective == tc.fit_cascade(cov).objective
    report = tc.correspondence_check(cov)
    assert report["trees_equal"]
    assert tc.chow_liu_tree(cov).tree == tc.fit_cascade(cov).tree


def test_errors_are_typed():
    with pytest.raises(tc.InvalidInputError):
        tc.Tree(3, [(0, 1), (0, 1)])
    with pytest.raises(tc.SizeLimitError):
        tc.brute_force_fit(np.eye(9))
    with pytest.raises(tc.Error):
        tc.simulate(tc.random_unit_variance_model(3, seed=1), "cauchy", 10)


def test_cli_pipeline(tmp_path):
    csv = os.environ.get("TREECASCADE_SAMPLE_CSV")
    if not csv:
        pytest.skip("sample CSV location not provided")
    fit = str(tmp_path / "fit.json")
    code, out, _ = tc.run_cli(["fit", "--data", csv, "--diff", "--out", fit])
    assert code == 0 and "tree_unique: true" in out
    code, out, _ = tc.run_cli(["cluster", "--fit", fit, "--k", "5"])
    assert code == 0 and len(out.splitlines()) == 5
    assert tc.load_fit(fit).tree.vertex_count == 30
