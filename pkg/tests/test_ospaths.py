import numpy as np
import pytest

from oskit import OskitError, kernels, ospaths as op
from oskit.linalg import psd_verdict


def test_ou_covariance_basics(rng):
    assert np.array_equal(op.ou_covariance(1.0, [0.3]), [[1.0]])
    c = op.ou_covariance(0.7, [0.0, 0.4, 1.1])
    assert c[0, 2] == pytest.approx(c[0, 1] * c[1, 2], rel=1e-15)
    assert psd_verdict(op.ou_covariance(1.0, np.sort(rng.uniform(0, 10, 64))), 1e-10).is_psd


def test_markov_property(rng):
    t = np.sort(rng.uniform(0, 5, 7))
    cov = op.ou_covariance(1.3, t)
    for k in range(7):
        assert op.markov_property_check(cov, k)["cross_residual"] <= 1e-12
    out = op.markov_property_check(op.sqexp_covariance(1.0, [0, 1, 2]), 1)
    assert out["cross_residual"] > 1e-3 and not out["is_markov_numerically"]
    assert op.markov_property_check(op.ou_covariance(1.0, [0, 1]), 0)["cross_residual"] == 0.0


def test_singular_present():
    with pytest.raises(OskitError) as exc:
        op.markov_property_check(np.diag([1.0, 0.0, 1.0]), 1)
    assert exc.value.code == "SINGULAR_PRESENT"


def test_ou_is_reflection_positive_and_markov():
    t = np.linspace(0.1, 4, 20)
    g = kernels.reflected_gram(kernels.exp_line(1.0), kernels.ReflectionGeometry("LINE"), t)
    assert psd_verdict(g).is_psd
    assert op.markov_property_check(op.ou_covariance(1.0, np.r_[-t[::-1], t]), 20)["is_markov_numerically"]


def test_sampling_statistics():
    out = op.sample_gaussian(op.GaussianSpec("ou", 1.0, (0.0, 1.0), 42), 100_000)
    assert out["within_tolerance"]
    emp = out["empirical_covariance"]
    assert abs(emp[0, 1] - np.exp(-1)) < 5 * out["standard_error"][0, 1]
    assert np.all(np.abs(np.diag(emp) - 1) < 5 * np.diag(out["standard_error"]))


def test_sampling_deterministic():
    spec = op.GaussianSpec("ou", 0.5, (0.0, 0.5, 2.0), 7)
    a = op.sample_gaussian(spec, 20_000)["paths"]
    b = op.sample_gaussian(spec, 20_000)["paths"]
    assert a.tobytes() == b.tobytes()
    assert op.sample_gaussian(spec, 20_000, seed=8)["paths"].tobytes() != a.tobytes()


def test_constant_process():
    paths = op.sample_gaussian(op.GaussianSpec("ou", 0.0, (0.0, 1.0, 2.0), 3), 1000)["paths"]
    assert np.allclose(paths, paths[:, :1], atol=1e-12, rtol=0)


def test_sqexp_non_psd_raises():
    with pytest.raises(OskitError) as exc:
        op.covariance_root(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert exc.value.code == "NOT_PSD"


GRID = np.arange(-20.0, 20.0, 0.05)


def test_heat_semigroup_constant_and_positivity():
    assert np.max(np.abs(op.heat_semigroup(np.ones_like(GRID), GRID, 1.0) - 1)) <= 1e-10
    f = (np.abs(GRID) < 1).astype(float)
    assert np.all(op.heat_semigroup(f, GRID, 0.5) >= 0)


def test_heat_semigroup_gaussian_variance():
    sigma2, t = 0.8, 0.6
    f = np.exp(-GRID**2 / (2 * sigma2)) / np.sqrt(2 * np.pi * sigma2)
    v = sigma2 + t
    expected = np.exp(-GRID**2 / (2 * v)) / np.sqrt(2 * np.pi * v)
    assert np.max(np.abs(op.heat_semigroup(f, GRID, t) - expected)) < 1e-12


def test_heat_semigroup_composition():
    f = np.exp(-GRID**2 / 2)
    a = op.heat_semigroup(op.heat_semigroup(f, GRID, 0.3), GRID, 0.7)
    assert np.max(np.abs(a - op.heat_semigroup(f, GRID, 1.0))) <= 1e-8


def test_heat_grid_too_coarse():
    with pytest.raises(OskitError) as exc:
        op.heat_semigroup(np.ones(10), np.linspace(0, 9, 10), 0.01)
    assert exc.value.code == "GRID_TOO_COARSE"


def test_feynman_kac():
    assert op.feynman_kac_mc(lambda x: np.ones_like(x), 1.0, 0.2, 1000, 1)["mc_estimate"] == 1.0
    out = op.feynman_kac_mc(lambda x: (x >= 0) * 1.0, 1.0, 0.0, 100_000, 5, breaks=(0.0,))
    assert out["analytic"] == pytest.approx(0.5, abs=1e-12)
    assert abs(out["z_score"]) <= 3
    out = op.feynman_kac_mc(lambda x: x, 2.0, -1.0, 100_000, 6)
    assert abs(out["mc_estimate"] + 1.0) < 3 * out["stderr"]


def test_mehler_fixes_ground_state():
    omega = op.ground_state(GRID)
    out = op.mehler_step(omega, GRID, 0.5)
    inner = np.abs(GRID) <= 10
    assert np.max(np.abs(out - omega)[inner]) <= 1e-8


def test_mehler_positive_and_semigroup():
    f = np.exp(-GRID**2 / 2) * (1 + GRID**2)
    assert np.all(op.mehler_step(f, GRID, 0.3) >= 0)
    a = op.mehler_step(op.mehler_step(f, GRID, 0.3), GRID, 0.4)
    assert np.max(np.abs(a - op.mehler_step(f, GRID, 0.7))) <= 1e-7


def test_mehler_grid_too_coarse():
    with pytest.raises(OskitError):
        op.mehler_step(np.ones(10), np.linspace(-5, 5, 10), 0.01)


def test_markov_matrix_validation():
    with pytest.raises(OskitError):
        op.MarkovMatrix(np.array([[0.5, 0.6], [0.5, 0.5]]))
    chain = op.MarkovMatrix(np.array([[0.9, 0.1], [0.2, 0.8]]))
    assert np.allclose(chain.stationary, [2 / 3, 1 / 3])
    assert chain.detailed_balance


def test_pss_axioms(rng):
    chain = op.random_reversible_chain(rng, 5)
    out = op.pss_axiom_check(chain, [1, 2, 3, 5], 500, 11)
    assert out["pass"]
    assert out["min_monomial_value"] >= -1e-12
    ones = [np.ones(5)] * 3
    assert op.monomial(chain, ones, [1, 4]) == pytest.approx(1.0, rel=1e-14)


def test_pss_two_state_exhaustive():
    for p in (0.1, 0.5, 0.9):
        assert op.pss_two_state_exhaustive(p, [1, 2, 3]) >= 0


def test_not_reversible():
    p = np.array([[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]])
    with pytest.raises(OskitError) as exc:
        op.pss_axiom_check(op.MarkovMatrix(p), [1], 5, 0)
    assert exc.value.code == "NOT_REVERSIBLE"
