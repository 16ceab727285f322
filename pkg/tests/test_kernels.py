import numpy as np
import pytest

from oskit import OskitError, Verdict, kernels
from oskit.linalg import psd_verdict
from oskit.measures import SpectralMeasure

LINE = kernels.ReflectionGeometry("LINE")


def test_exp_line_gram_psd():
    pts = np.linspace(-10, 10, 64)
    for lam in (0.1, 1.0, 10.0):
        assert psd_verdict(kernels.gram(kernels.exp_line(lam), pts), 1e-10).is_psd


def test_exp_line_reflected_gram_rank_one():
    pts = np.linspace(0.1, 5, 30)
    g = kernels.reflected_gram(kernels.exp_line(0.7), LINE, pts)
    sv = np.linalg.svd(g, compute_uv=False)
    assert sv[1] <= 1e-10 * sv[0]


def test_reflected_gram_needs_positive_points():
    with pytest.raises(OskitError):
        kernels.reflected_gram(kernels.exp_line(1.0), LINE, [-1.0, 1.0])


def test_periodic_green_is_beta_periodic():
    t = np.linspace(-3, 3, 17)
    a = kernels.periodic_green_value(t, 1.3, 2.0)
    b = kernels.periodic_green_value(t + 2.0, 1.3, 2.0)
    assert np.allclose(a, b, rtol=1e-14)


def test_periodic_fourier_coefficients():
    for lam in (0.5, 1.0, 4.0):
        for beta in (0.5, 1.0, 4.0):
            out = kernels.periodic_fourier_coefficients(lam, beta, 64)
            assert out["max_rel_error"] <= 1e-8
            assert out["min_coefficient"] >= 0


def test_power_law_window_and_coincident_points():
    with pytest.raises(OskitError):
        kernels.power_law(3.0, 3)
    with pytest.raises(OskitError) as exc:
        kernels.gram(kernels.power_law(1.0, 3), np.zeros((2, 3)))
    assert exc.value.code == "COINCIDENT_POINTS"


def test_power_law_halfspace(rng):
    pts = np.column_stack([rng.uniform(0.1, 3, 30), rng.uniform(-3, 3, (30, 2))])
    geo = kernels.ReflectionGeometry("HALFSPACE")
    assert psd_verdict(kernels.reflected_gram(kernels.power_law(1.5, 3), geo, pts)).is_psd


def test_unknown_family():
    with pytest.raises(OskitError) as exc:
        kernels.KernelSpec("BESSEL", {})
    assert exc.value.code == "SCHEMA_ERROR"


def test_custom_kernel_lookup():
    pts = [0.0, 1.0]
    spec = kernels.custom(pts, [[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(kernels.gram(spec, pts), [[2, 1], [1, 2]])
    with pytest.raises(OskitError):
        kernels.gram(spec, [0.5])


def test_widder_delta_and_periodic_pair():
    out = kernels.interval_rp_check(SpectralMeasure(((1.0, 1.0),), "real"), 1.0)
    assert out["group_kernel"].is_psd and out["semigroup_kernel"].is_psd
    pair = SpectralMeasure(((1.0, 1.0), (-1.0, np.exp(-2.0))), "real")
    out = kernels.interval_rp_check(pair, 1.0)
    assert out["group_kernel"].is_psd and out["semigroup_kernel"].is_psd
    assert out["prediction_consistent"]


def test_widder_negative_location_fails():
    out = kernels.interval_rp_check(SpectralMeasure(((-1.0, 1.0),), "real"), 2.0)
    assert out["group_kernel"].verdict is Verdict.NOT_PSD
    assert out["group_kernel"].min_eig < -1e-6
    assert not out["slope_predicts_rp"]


def test_measure_validation():
    with pytest.raises(OskitError) as exc:
        SpectralMeasure(((-1.0, 1.0),))
    assert exc.value.code == "NEGATIVE_LOCATION"
    with pytest.raises(OskitError) as exc:
        SpectralMeasure(((1.0, -1.0),))
    assert exc.value.code == "MEASURE_NOT_POSITIVE"
    with pytest.raises(OskitError):
        SpectralMeasure(((1.0, np.diag([1.0, -1.0])),))
