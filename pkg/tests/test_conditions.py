import json
import math

import pytest

from scalesq import (
    band_indicator_kernel,
    condition_summary,
    fourier_decay_check,
    haar_kernel,
    hormander_energy,
    local_power_integral,
    marcinkiewicz_estimate_scan,
    marcinkiewicz_kernel,
    nondegeneracy_check,
    poisson_derivative_kernel,
    radial_majorant_l1,
    tail_moment_integral,
)
from oracles import (
    gm_local_power_closed,
    haar_hormander_closed,
    hormander_quad,
    poisson_local_power_quad,
    poisson_majorant_l1_closed,
    poisson_tail_moment_quad,
    scan_ratio_alpha1_closed,
)


# ---------------------------------------------------------------------------
# integrability checkers against closed forms

def test_haar_tail_moment_zero():
    assert tail_moment_integral(haar_kernel(), 0.5) == 0.0
    with pytest.raises(ValueError):
        tail_moment_integral(haar_kernel(), 0.0)


def test_haar_local_power_is_two():
    for u in (2.0, 4.0):
        assert math.isclose(local_power_integral(haar_kernel(), u), 2.0, rel_tol=1e-12)
    with pytest.raises(ValueError):
        local_power_integral(haar_kernel(), 1.0)


def test_haar_majorant_is_two():
    assert math.isclose(radial_majorant_l1(haar_kernel()), 2.0, rel_tol=1e-12)


@pytest.mark.parametrize("alpha", [0.75, 1.25])
@pytest.mark.parametrize("u", [2.0, 3.0])
def test_gm_local_power_closed_form(alpha, u):
    got = local_power_integral(marcinkiewicz_kernel(alpha), u)
    assert math.isclose(got, gm_local_power_closed(alpha, u), rel_tol=1e-9)


def test_gm_divergences():
    # u (alpha - 1) + 1 hits zero at u = 4 for alpha = 3/4
    k = marcinkiewicz_kernel(0.75)
    assert math.isinf(local_power_integral(k, 4.0))
    assert math.isinf(radial_majorant_l1(k))
    assert tail_moment_integral(k, 0.5) == 0.0


def test_gm_majorant_above_one():
    # the edge vanishes instead of blowing up, so the envelope integrates to 2
    assert math.isclose(radial_majorant_l1(marcinkiewicz_kernel(1.25)), 2.0, rel_tol=1e-6)


def test_poisson_tail_moment_vs_quad():
    got = tail_moment_integral(poisson_derivative_kernel(1), 0.5)
    assert math.isclose(got, poisson_tail_moment_quad(0.5), rel_tol=1e-5)


@pytest.mark.parametrize("u", [2.0, 4.0])
def test_poisson_local_power_vs_quad(u):
    got = local_power_integral(poisson_derivative_kernel(1), u)
    assert math.isclose(got, poisson_local_power_quad(u), rel_tol=1e-9)


def test_poisson_majorant_closed_form():
    got = radial_majorant_l1(poisson_derivative_kernel(1))
    assert math.isclose(got, poisson_majorant_l1_closed(), rel_tol=1e-4)


def test_spatial_checks_need_spatial():
    band = band_indicator_kernel(1.5, 1.6)
    with pytest.raises(ValueError, match="spatial"):
        tail_moment_integral(band, 0.5)
    with pytest.raises(ValueError, match="spatial"):
        radial_majorant_l1(band)


# ---------------------------------------------------------------------------
# Fourier-side checkers

def test_fourier_decay_haar():
    # |haarhat(xi)| xi = 2 sin^2(pi xi) / pi, peaking at exactly 2/pi
    rep = fourier_decay_check(haar_kernel(), 1.0)
    assert rep.passed
    assert math.isclose(rep.c_est, 2.0 / math.pi, rel_tol=1e-3)
    assert not fourier_decay_check(haar_kernel(), 1.5).passed
    with pytest.raises(ValueError):
        fourier_decay_check(haar_kernel(), 0.0)


def test_nondegeneracy_haar():
    for mode in ("continuous", "dyadic"):
        rep = nondegeneracy_check(haar_kernel(), mode)
        assert rep.passed
        assert rep.min_value > 0.1
    with pytest.raises(ValueError, match="mode"):
        nondegeneracy_check(haar_kernel(), "sideways")


def test_nondegeneracy_band_gap():
    # a band thinner than an octave misses frequencies under dyadic dilation
    # but every direction still meets it along the continuous scale ray
    band = band_indicator_kernel(1.5, 1.6)
    assert nondegeneracy_check(band, "continuous").passed
    rep = nondegeneracy_check(band, "dyadic")
    assert not rep.passed
    assert rep.min_value == 0.0


# ---------------------------------------------------------------------------
# shift energy

HAAR_POINTS = [(1.0, 0.1), (2.0, -0.3), (-1.5, 0.2), (-0.7, -0.12)]


@pytest.mark.parametrize("x,y", HAAR_POINTS)
def test_hormander_haar_closed_form(x, y):
    got = hormander_energy(haar_kernel(), x, y)
    assert math.isclose(got, haar_hormander_closed(x, y), rel_tol=1e-12)


def test_hormander_gates():
    with pytest.raises(ValueError, match="one-dimensional"):
        hormander_energy(poisson_derivative_kernel(2), 1.0, 0.1)
    with pytest.raises(ValueError, match="y"):
        hormander_energy(haar_kernel(), 1.0, 0.6)
    assert hormander_energy(haar_kernel(), 1.0, 0.0) == 0.0


def test_hormander_gm_one_matches_haar():
    k = marcinkiewicz_kernel(1.0)
    for x, y in HAAR_POINTS:
        assert math.isclose(
            hormander_energy(k, x, y), hormander_energy(haar_kernel(), x, y),
            rel_tol=1e-12,
        )


@pytest.mark.parametrize("alpha", [0.75, 1.25])
@pytest.mark.parametrize("x,y", [(1.0, 0.1), (1.0, -0.2)])
def test_hormander_gm_vs_quad(alpha, x, y):
    k = marcinkiewicz_kernel(alpha)
    assert math.isclose(hormander_energy(k, x, y), hormander_quad(k, x, y), rel_tol=1e-6)


def test_hormander_unbounded_edge_diverges():
    # grading below 1/2 makes the edge term fail to be square integrable
    assert math.isinf(hormander_energy(marcinkiewicz_kernel(0.4), 1.0, 0.1))


def test_hormander_poisson_positive_finite():
    # unbounded-support branch: no closed form, just the basic sanity
    val = hormander_energy(poisson_derivative_kernel(1), 1.0, 0.1)
    assert 0.0 < val < math.inf


# ---------------------------------------------------------------------------
# the scan

def test_scan_ratio_curve_matches_closed_form():
    k = marcinkiewicz_kernel(1.0)
    for m in (2, 3, 4):
        rho = 2.0**-m
        same = hormander_energy(k, 1.0, rho) / rho
        assert math.isclose(same, scan_ratio_alpha1_closed(rho, True), rel_tol=1e-12)
        opp = hormander_energy(k, 1.0, -rho) / rho
        assert math.isclose(opp, scan_ratio_alpha1_closed(rho, False), rel_tol=1e-12)


def test_scan_alpha_one_report():
    rep = marcinkiewicz_estimate_scan(1.0)
    assert rep.passed
    assert math.isclose(rep.max_ratio, 14.0 / 9.0, rel_tol=1e-10)
    assert abs(rep.refinement_delta) < 1e-10
    assert abs(abs(rep.argmax[1] / rep.argmax[0]) - 0.25) < 1e-12


def test_scan_without_refinement():
    rep = marcinkiewicz_estimate_scan(0.75, refine=False)
    assert math.isfinite(rep.max_ratio)
    assert math.isnan(rep.refinement_delta)
    assert rep.passed


def test_scan_alpha_gate():
    for bad in (0.5, 1.5, 2.0):
        with pytest.raises(ValueError, match="alpha"):
            marcinkiewicz_estimate_scan(bad)


def test_scan_report_dict_is_json():
    d = marcinkiewicz_estimate_scan(1.0, refine=False).as_dict()
    json.dumps(d)
    assert set(d) == {"alpha", "max_ratio", "argmax", "refinement_delta", "pass"}


# ---------------------------------------------------------------------------
# aggregate summary

def test_condition_summary_haar():
    s = condition_summary(haar_kernel())
    assert s["kernel"] == "haar"
    assert s["cancellation_modulus"] == 0.0
    assert s["tail_moment"]["value"] == 0.0
    assert s["local_power"]["u=2"]["value"] == pytest.approx(2.0)
    assert s["majorant_l1"]["value"] == pytest.approx(2.0)
    assert s["fourier_decay"]["pass"]
    assert s["nondegeneracy"]["continuous"]["pass"]
    assert s["nondegeneracy"]["dyadic"]["pass"]
    json.dumps(s)


def test_condition_summary_divergent_flags():
    s = condition_summary(marcinkiewicz_kernel(0.75))
    assert s["local_power"]["u=4"] == {"value": None, "divergent": True}
    assert s["majorant_l1"] == {"value": None, "divergent": True}
    json.dumps(s)


def test_condition_summary_spectral_only():
    s = condition_summary(band_indicator_kernel(1.5, 1.6))
    assert "tail_moment" not in s
    assert "skipped" in s["spatial_checks"]
    assert not s["nondegeneracy"]["dyadic"]["pass"]
    json.dumps(s)
