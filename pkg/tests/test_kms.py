import numpy as np
import pytest

from oskit import OskitError, Verdict, kms


def psd_weight(rng, k=2):
    a = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    return a @ a.conj().T


def test_kms_condition_random_measures(rng):
    for _ in range(5):
        mu = kms.KMSMeasure(1.5, tuple((rng.uniform(0, 3), psd_weight(rng)) for _ in range(3)))
        assert kms.kms_residual(mu, rng.uniform(-5, 5, 32)) <= 1e-12
        assert mu.symmetry_residual() <= 1e-12


def test_kms_function_scalar_closed_form():
    mu = kms.KMSMeasure(2.0, ((0.7, 1.0),))
    t = 0.6
    assert kms.kms_function(mu, 1j * t).real == pytest.approx(np.exp(-0.7 * t) + np.exp(-0.7 * (2 - t)), rel=1e-14)


def test_kms_gram_positive_definite(rng):
    mu = kms.KMSMeasure(1.0, ((0.5, psd_weight(rng)), (2.0, psd_weight(rng))))
    from oskit.linalg import psd_verdict

    assert psd_verdict(kms.kms_gram(mu, np.linspace(-2, 2, 12)), herm_tol=1e-10).is_psd


def test_outside_strip():
    mu = kms.KMSMeasure(1.0, ((0.5, 1.0),))
    with pytest.raises(OskitError) as exc:
        kms.kms_function(mu, 1.5j)
    assert exc.value.code == "OUTSIDE_STRIP"


def test_strict_contraction_required():
    with pytest.raises(OskitError) as exc:
        kms.rotation_contraction(1.0)
    assert exc.value.code == "NOT_STRICT_CONTRACTION"


def test_phi_endpoints_and_extension():
    model = kms.rotation_contraction(0.5, 2)
    c = model.C
    assert np.allclose(kms.phi_from_contraction(model, 1.0, 0.0), np.eye(4) + 1j * c)
    assert np.allclose(kms.phi_from_contraction(model, 1.0, 1.0), np.eye(4) - 1j * c)
    for t in (0.1, 0.45, 0.9):
        a = kms.phi_extended(model, 1.0, t + 1.0)
        assert np.allclose(a, np.conj(kms.phi_extended(model, 1.0, t)))


def test_polar_decomposition():
    model = kms.SkewContraction(np.array([[0, -0.3, 0], [0.3, 0, 0], [0, 0, 0.0]]))
    i_op, absc = model.polar()
    assert np.allclose(i_op @ absc, model.C)
    assert np.allclose(i_op[2], 0)


@pytest.mark.parametrize("mu", [0.2, 0.5, 0.8])
def test_rp_extension(mu):
    model = kms.rotation_contraction(mu)
    grid = np.linspace(0, 0.5, 16)
    out = kms.rp_extension_check(model, 1.0, grid)
    assert out["reflected_pd"].is_psd and out["group_pd"].is_psd
    neg = kms.rp_extension_check(model, 1.0, grid, flip_identity=True)
    assert neg["group_pd"].verdict is Verdict.NOT_PSD


def test_contraction_reduces_to_thermal_functions():
    beta, mu = 2.0, 0.6
    lam = kms.lambda_for_contraction(mu, beta)
    for t in np.linspace(0, 2 * beta, 9):
        up, um = kms.u_pair(mu, beta, t)
        assert up == pytest.approx(kms.u_lambda(lam, beta, t, 1.0), rel=1e-12)
        assert um == pytest.approx(kms.u_lambda(lam, beta, t, -1.0), rel=1e-12, abs=1e-14)


def test_zero_contraction_gives_periodic_green():
    from oskit import kernels

    model = kms.SkewContraction(np.zeros((1, 1)))
    for t in (0.1, 0.7, 1.6):
        val = kms.f_value(model, 2.0, t, 1, lam=1.3)[0, 0]
        assert val.real == pytest.approx(kernels.periodic_green_value(t, 1.3, 2.0), rel=1e-13)


def test_matsubara():
    out = kms.matsubara(1.0, 2.0, 32)
    assert out["fft_check"] <= 1e-6
    assert out["parity_leak"] <= 1e-12
    assert out["c_plus"] == pytest.approx(np.tanh(1.0), rel=1e-15)
    assert out["c_minus"] == 1.0
    assert np.all(out["c_n"] > 0)


def test_standard_subspace_roundtrip():
    for delta in (0.3, 2.0, 5.0):
        sub = kms.standard_subspace_roundtrip(kms.StandardSubspaceModel((delta,), 1))
        assert sub.contraction.norm == pytest.approx(kms.two_dim_contraction_norm(delta), rel=1e-12)
        assert sub.pairing_residual < 1e-12
        assert sub.real_rank == 6
        assert kms.modular_pairing_residual(sub, 1.0, np.linspace(0, 1, 7)) < 1e-10
