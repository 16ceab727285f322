import numpy as np
import pytest

from oskit import OskitError, dilation
from oskit.linalg import psd_verdict
from oskit.measures import SpectralMeasure


def test_rp_function_block_grams(rng):
    w = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    mu = SpectralMeasure(((0.5, w @ w.conj().T), (2.0, np.eye(2))))
    t = np.linspace(0, 3, 10)
    assert psd_verdict(dilation.block_gram(mu, t), herm_tol=1e-10).is_psd
    assert psd_verdict(dilation.block_gram(mu, t, semigroup=True), herm_tol=1e-10).is_psd


def test_dilation_pairing_matches_closed_form(rng):
    sg = dilation.HermitianSemigroup([0.3, 2.0, 7.0])
    xi = rng.normal(size=3) + 1j * rng.normal(size=3)
    eta = rng.normal(size=3) + 1j * rng.normal(size=3)
    for t in (0.0, 0.4, -1.3, 3.0):
        out = dilation.dilation_pairing(sg, xi, eta, t)
        assert out["rel_discrepancy"] < 1e-6


def test_zero_eigenvalue_warns():
    sg = dilation.HermitianSemigroup([0.0, 1.0])
    with pytest.warns(dilation.ZeroEigenvalueWarning):
        out = dilation.dilation_pairing(sg, [1.0, 1.0], [1.0, 1.0], 0.5)
    assert out["skipped_components"] == [0]
    assert out["rel_discrepancy"] < 1e-6


def test_hardy_residue_vs_quadrature(rng):
    sg = dilation.HermitianSemigroup([0.3, 2.0, 7.0])
    xi, eta = rng.normal(size=3), rng.normal(size=3) + 1j
    out = dilation.hardy_twisted_inner(sg, 0.7 + 0.4j, 1.5 - 2j, xi, eta)
    assert out["rel_discrepancy"] < 1e-6


def test_hardy_gram_psd_and_half_plane(rng):
    sg = dilation.HermitianSemigroup([0.3, 2.0, 7.0])
    pts = rng.uniform(0.2, 3, 5) + 1j * rng.uniform(-3, 3, 5)
    vecs = rng.normal(size=(5, 3))
    _, report = dilation.hardy_gram(sg, pts, vecs)
    assert report.is_psd
    with pytest.raises(OskitError) as exc:
        dilation.hardy_residue(sg, -0.1, 1.0, vecs[0], vecs[1])
    assert exc.value.code == "NONPOSITIVE_REAL_PART"


def test_cesaro_average_tends_to_fixed_mass():
    model = dilation.spectral_projection_model(SpectralMeasure(((0.0, 0.3), (2.0, 0.7))))
    assert model["ergodic_limit"] == 0.3
    rows = model["cesaro"]
    assert abs(rows[-1]["closed_form"] - 0.3) < 1e-2
    assert all(abs(r["closed_form"] - r["quadrature"]) < 1e-10 for r in rows)
    assert rows[0]["deviation"] > rows[1]["deviation"] > rows[2]["deviation"]


def test_nu_density_integrates_to_mass():
    from scipy import integrate

    model = dilation.spectral_projection_model(SpectralMeasure(((0.0, 0.3), (2.0, 0.7))))
    total, _ = integrate.quad(model["nu_density"], -np.inf, np.inf)
    assert total == pytest.approx(0.7, rel=1e-8)


def test_negative_generator_rejected():
    with pytest.raises(OskitError):
        dilation.HermitianSemigroup([-1.0])
