import numpy as np
import pytest

from oskit import OskitError, freefield as ff
from oskit.linalg import psd_verdict

ONE = ff.MassMeasure.atomic((1.0, 1.0))
PAIR = ff.MassMeasure.atomic((1.0, 1.0), (2.0, 1.0))


def test_theta_density_single_mass():
    p = np.linspace(0, 3, 7)
    assert np.allclose(ff.theta_density(ONE, 1, p), 1 / (np.pi * (1 + p * p)))


def test_theta_density_linear_in_weights():
    two = ff.MassMeasure.atomic((1.0, 2.0))
    assert ff.theta_density(two, 3, 0.7) == pytest.approx(2 * ff.theta_density(ONE, 3, 0.7))


def test_theta_density_vector_argument():
    assert ff.theta_density(ONE, 3, np.array([0.3, 0.4, 0.0])) == pytest.approx(ff.theta_density(ONE, 3, 0.5))


def test_power_law_theta():
    p = np.geomspace(0.5, 5, 8)
    vals = ff.theta_density(ff.MassMeasure.power(1.0), 3, p)
    assert ff.log_slope(p, vals) == pytest.approx(-1.0, abs=1e-12)
    assert ff.theta_power_constant(1.0) == pytest.approx(ff.theta_power_closed(1.0), rel=1e-10)


def test_not_tame():
    with pytest.raises(OskitError) as exc:
        ff.theta_density(ff.MassMeasure.power(2.5), 3, 1.0)
    assert exc.value.code == "NOT_TAME"
    with pytest.raises(OskitError):
        ff.theta_density(ff.MassMeasure.power(0.5), 1, 1.0)


def test_theta_t_against_quadrature():
    assert ff.theta_t_check(PAIR, [0.0, 0.3, 1.0, 2.5], [0.0, 0.7, [0.3, 1.2]]) <= 1e-7


def test_theta_t_at_zero():
    assert ff.theta_t(PAIR, 0.0, 0.0) == pytest.approx(1.0 + 0.5)


def test_multiplicativity():
    assert ff.multiplicativity_deviation(ONE, 0.5, 0.5, 0.3) < 1e-14
    assert ff.multiplicativity_deviation(PAIR, 0.5, 0.5) > 1e-3


def test_schwinger_d1():
    x = np.linspace(-4, 4, 9)
    assert np.allclose(ff.schwinger_2pt(ONE, 1, x), np.exp(-np.abs(x)))
    assert np.allclose(ff.schwinger_2pt(PAIR, 1, x), ff.schwinger_2pt(PAIR, 1, -x))


def test_schwinger_d3_constant_and_slope():
    assert ff.schwinger_constant_3d() == pytest.approx(2 * np.pi, rel=1e-9)
    r = np.linspace(0.5, 5, 10)
    vals = ff.schwinger_2pt(ONE, 3, np.column_stack([r, 0 * r, 0 * r]))
    assert np.polyfit(r, np.log(r * vals), 1)[0] == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(OskitError) as exc:
        ff.schwinger_2pt(ONE, 3, np.zeros(3))
    assert exc.value.code == "ORIGIN_SINGULARITY"


def test_ode_residual():
    xs = np.r_[np.linspace(-5, -0.1, 20), np.linspace(0.1, 5, 20)]
    assert ff.ode_residual(1.0, xs) <= 1e-6
    assert ff.ode_residual(2.5, xs) <= 1e-6


@pytest.mark.parametrize("d", [1, 3])
@pytest.mark.parametrize("rho", [ONE, PAIR])
def test_halfspace_rp(rng, d, rho):
    assert ff.halfspace_rp_check(rho, d, ff.halfspace_samples(rng, d, 32)).is_psd


def test_halfspace_rp_uniform_d1():
    assert ff.halfspace_rp_check(ff.MassMeasure.atomic((1.3, 1.0)), 1, np.linspace(0.2, 10, 32)).is_psd


def test_power_kernel_window(rng):
    pts = ff.halfspace_samples(rng, 3, 32)
    assert psd_verdict(ff.power_kernel_gram(1.5, pts)).is_psd
    assert not psd_verdict(ff.power_kernel_gram(0.5, pts)).is_psd


@pytest.mark.parametrize("s,d", [(1.0, 3), (0.5, 3), (1.5, 1)])
def test_power_law_slopes(s, d):
    out = ff.power_law_slopes(s, d)
    assert abs(out["theta_slope"] - out["theta_expected"]) <= 1e-3
    assert abs(out["nu_slope"] - out["nu_expected"]) <= 1e-3
    r = 1.7
    assert ff.power_schwinger_quadrature(s, d, r) == pytest.approx(ff.power_schwinger_closed(s, d, r), rel=1e-9)


def test_mass_measure_json():
    rho = ff.MassMeasure.from_json({"kind": "atomic", "atoms": [{"m": 1.0, "w": 1.0}]})
    assert rho == ONE
    assert ff.MassMeasure.from_json({"kind": "power", "s": 1.0}).s == 1.0
    with pytest.raises(OskitError):
        ff.MassMeasure.atomic((0.0, 1.0))
