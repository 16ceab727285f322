import numpy as np
import pytest

from oskit import OskitError, Verdict, sphere
from oskit.linalg import hermitian_residual, psd_verdict


def test_conformal_action_stays_on_sphere(rng):
    g = sphere.random_conformal(rng, 3)
    x = rng.normal(size=4)
    x /= np.linalg.norm(x)
    y, j = sphere.conformal_action(g, x)
    assert abs(np.linalg.norm(y) - 1) < 1e-12
    assert j > 0


def test_q_lambda_covariance(rng):
    n, lam = 3, 0.8
    g = sphere.random_conformal(rng, n)
    u, v = (p / np.linalg.norm(p) for p in rng.normal(size=(2, n + 1)))
    gu, ju = sphere.conformal_action(g, u)
    gv, jv = sphere.conformal_action(g, v)
    lhs = sphere.q_lambda(gu, gv, lam, n)
    rhs = (ju * jv) ** (n / 2 - lam) * sphere.q_lambda(u, v, lam, n)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_stereographic_roundtrip(rng):
    x = rng.uniform(-0.5, 0.5, 3)
    y = sphere.stereographic(x)
    assert abs(np.linalg.norm(y) - 1) < 1e-14
    assert np.allclose(sphere.inverse_stereographic(y), x)
    with pytest.raises(OskitError) as exc:
        sphere.inverse_stereographic(np.r_[-1.0, 0, 0, 0])
    assert exc.value.code == "ANTIPODE"


@pytest.mark.parametrize("n,lam", [(3, 0.9), (2, 0.95), (4, 0.6)])
def test_r_lambda_inside_window(n, lam):
    assert sphere.r_lambda_window_check(n, lam).verdict is Verdict.PSD
    assert sphere.in_positivity_window(lam, n)


@pytest.mark.parametrize("n,lam", [(3, 1.3), (4, 1.4)])
def test_r_lambda_outside_window(n, lam):
    assert sphere.r_lambda_window_check(n, lam).verdict is Verdict.NOT_PSD
    assert not sphere.in_positivity_window(lam, n)


def test_r_lambda_out_of_ball():
    with pytest.raises(OskitError) as exc:
        sphere.r_lambda_gram(np.array([[1.0, 0.0]]), 0.5, 2)
    assert exc.value.code == "OUT_OF_BALL"


@pytest.mark.parametrize("n,m", [(2, 0.5), (2, 2.0), (3, 1.0), (3, 0.3), (4, 3.0)])
def test_psi_gram(n, m):
    g = sphere.psi_gram(m, n, sphere.half_sphere_points(n, 30))
    assert hermitian_residual(g) <= 1e-12
    assert psd_verdict(g, 1e-7).is_psd


def test_psi_real_for_imaginary_spectral_parameter():
    pts = sphere.half_sphere_points(2, 10)
    g = sphere.psi_gram(2.0, 2, pts)
    assert np.max(np.abs(g.imag)) < 1e-12


def test_psi_argument_on_cut():
    x = np.array([-1.0, 0.0, 0.0])
    with pytest.raises(OskitError) as exc:
        sphere.psi_kernel(1.0, 2, x, -x)
    assert exc.value.code == "ARGUMENT_ON_CUT"


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("lam", [0.3, 0.7])
def test_sphere_constants(n, lam):
    out = sphere.sphere_constants(lam, n)
    assert out["d_rel_error"] <= 1e-8
    assert out["beta_rel_error"] <= 1e-8
    assert out["duplication_residual"] <= 1e-12


def test_nonintegrable():
    with pytest.raises(OskitError) as exc:
        sphere.sphere_constants(0.0, 2)
    assert exc.value.code == "NONINTEGRABLE"


def test_half_sphere_points_separated():
    pts = sphere.half_sphere_points(3, 30)
    assert np.all(pts[:, 0] > 0.05)
    cos = pts @ pts.T - 2 * np.eye(30)
    assert np.arccos(np.clip(cos.max(), -1, 1)) >= 0.15 - 1e-12


@pytest.mark.parametrize("n,lam", [(3, 0.9), (2, 0.95), (4, 0.6)])
def test_unit_coefficient_variant_is_not_positive(n, lam):
    assert sphere.r_lambda_window_check(n, lam, variant="unit").verdict is Verdict.NOT_PSD


def test_unknown_variant():
    with pytest.raises(OskitError):
        sphere.r_lambda(np.zeros(2), np.zeros(2), 0.5, 2, variant="other")
