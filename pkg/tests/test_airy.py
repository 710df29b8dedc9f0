import warnings
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from airytau.airy import (ContourConfig, JUMPS, AirySector, airy_asymptotic, airy_jet, airy_pair,
                          airy_parametrix, airy_quadrature_oracle, airy_series,
                          asymptotic_coefficients, omega, parametrix_jump, switch_radius,
                          verify_parametrix_jumps)
from airytau.errors import DivergentTail, OnRay, PrecisionLossWarning, ValidationError

with mp.workdps(60):
    AI0 = mpmath.mpf("0.35502805388781723926006318600418317639797917419917724")
    AIP0 = mpmath.mpf("-0.25881940379280679840518356018920396347909113835493459")
    AI1 = mpmath.mpf("0.13529241631288141552414742351546630617494414298833")


def test_series_at_origin(agree):
    ai, aip = airy_series(0)
    assert agree(ai, AI0) >= 32
    assert agree(aip, AIP0) >= 32


def test_series_at_one(agree):
    ai, _ = airy_series(1)
    assert agree(ai, AI1) >= 32


def test_series_matches_mpmath_64(agree):
    with mp.workdps(90):
        want = mpmath.airyai(mpmath.mpc(2.5, -1.25))
    ai, _ = airy_series(mpmath.mpc(2.5, -1.25), digits=64)
    assert agree(ai, want) >= 64


def test_asymptotic_coefficients_first_terms():
    c = asymptotic_coefficients(3)
    assert c.u[1] == Fraction(5, 72)
    assert c.r[1] == Fraction(-7, 72)
    assert c.u[0] == c.r[0] == 1


def test_asymptotic_matches_series_at_twenty(agree):
    a_asym, d_asym = airy_asymptotic(20)
    a_ser, d_ser = airy_series(20)
    assert agree(a_asym, a_ser) >= 25
    assert agree(d_asym, d_ser) >= 25


def test_asymptotic_rejects_short_tail():
    with pytest.raises(DivergentTail):
        airy_asymptotic(2, kmax=None, digits=32)


def test_asymptotic_rejects_negative_axis():
    with pytest.raises(ValidationError):
        airy_asymptotic(-25)


def test_switch_radius_grows_with_precision():
    assert switch_radius(44) < switch_radius(76)


@pytest.mark.parametrize("z", [mpmath.mpc(30, 5), mpmath.mpc(-40, 1), mpmath.mpc(0, 25),
                               mpmath.mpc(-19, -0.01), mpmath.mpc(15, 15)])
def test_dispatch_matches_mpmath(z, agree):
    with mp.workdps(70):
        want = mpmath.airyai(z), mpmath.airyai(z, 1)
    ai, aip = airy_pair(z)
    assert agree(ai, want[0]) >= 31
    assert agree(aip, want[1]) >= 31


@settings(max_examples=30, deadline=None)
@given(st.floats(-30, 30), st.floats(-30, 30))
def test_dispatch_property(re, im):
    z = mpmath.mpc(re, im)
    with mp.workdps(70):
        want = mpmath.airyai(z)
    ai, _ = airy_pair(z)
    with mp.workdps(70):
        assert abs(ai - want) <= mpmath.mpf(10) ** -30 * max(abs(want), mpmath.mpf(10) ** -300)


def test_jet_at_origin(agree):
    jet = airy_jet(0, 0, 2)
    assert agree(jet.values[0], AI0) >= 32
    assert agree(jet.values[1], AIP0) >= 32
    assert jet.values[2] == 0


def test_jet_rotated_sector(agree):
    jet = airy_jet(1, 1, 0)
    with mp.workdps(60):
        want = mpmath.airyai(omega())
    assert agree(jet.values[0], want) >= 32


def test_jet_recurrence_against_mpmath(agree):
    z = mpmath.mpc(0.7, -0.4)
    jet = airy_jet(z, 2, 6)
    with mp.workdps(60):
        om2 = omega() ** 2
        for k in range(7):
            want = om2 ** k * mpmath.airyai(om2 * z, k)
            assert agree(jet.values[k], want) >= 30


def test_sector_identity_at_two():
    with mp.workdps(50):
        om = omega()
        s = AirySector(0)(2) + om * AirySector(1)(2) + om * om * AirySector(2)(2)
        assert abs(s) < mpmath.mpf(10) ** -28


def test_jet_validation():
    with pytest.raises(ValidationError):
        airy_jet(0, 3, 1)
    with pytest.raises(ValidationError):
        AirySector(5)


@pytest.mark.parametrize("z, need", [(0, 20), (1, 20), (-2, 18)])
def test_quadrature_oracle_agrees_with_series(z, need, agree):
    assert agree(airy_quadrature_oracle(z), airy_series(z)[0]) >= need


def test_series_warns_when_cancellation_exceeds_guard():
    with warnings.catch_warnings():
        warnings.simplefilter("error", PrecisionLossWarning)
        airy_series(10)


def test_parametrix_determinant_one():
    P = airy_parametrix(1 + 1j)
    with mp.workdps(50):
        assert abs(P.det - 1) < mpmath.mpf(10) ** -28


def test_parametrix_region():
    assert airy_parametrix(2 * mpmath.expj(0.1)).region == "I"
    assert ContourConfig().region(mpmath.mpc(-1, -0.1)) == "III"
    with pytest.raises(OnRay):
        ContourConfig().region(mpmath.mpc(3, 0))


@pytest.mark.parametrize("ray", list(JUMPS))
def test_jump_matrices(ray):
    J = parametrix_jump(1.5, ray)
    want = JUMPS[ray][2]
    with mp.workdps(50):
        assert max(abs(J[i][j] - want[i][j]) for i in range(2) for j in range(2)) < 1e-28


def test_jump_on_negative_axis_is_i_sigma2():
    assert JUMPS["negative_axis"][2] == ((0, 1), (-1, 0))
    assert JUMPS["theta_plus"][2] == ((1, 0), (1, 1))


@pytest.mark.parametrize("rho", [2, 10])
def test_verify_jumps(rho):
    assert verify_parametrix_jumps(rho)["max"] <= 1e-25


def test_verify_jumps_custom_rays():
    rays = ContourConfig(0.2, 2.0, -2.2)
    assert verify_parametrix_jumps(3, rays)["max"] <= 1e-25


def test_contour_config_validation():
    with pytest.raises(ValidationError):
        ContourConfig(theta0=1.2)
