import mpmath
import pytest
from mpmath import mp

from airytau.errors import PoleProximity, ValidationError
from airytau.pade import (bound_report, pade_poly, pade_ratio, pade_remainder, pade_zeros,
                          remainder_bound, saff_varga_mu)


def test_pade_poly_small_r():
    assert pade_poly(1).coeffs == (2, -1)
    assert pade_poly(2).coeffs == (12, -6, 1)
    assert pade_poly(3).coeffs[0] == 120


def test_pade_poly_rejects_r():
    with pytest.raises(ValidationError):
        pade_poly(0)


def test_mu_solves_its_equation():
    mu = saff_varga_mu()
    with mp.workdps(44):
        assert abs(mu * mpmath.exp(1 + mu) - 1) < mpmath.mpf(10) ** -32
        assert abs(mu - mpmath.mpf("0.2784645427610737")) < 1e-15


def test_zeros_r1():
    (z,) = pade_zeros(1).zeros
    assert z == 2
    assert 2 * saff_varga_mu() < 2 < 2 + mpmath.mpf(4) / 3


def test_zeros_r2():
    zs = pade_zeros(2).zeros
    with mp.workdps(44):
        want = {mpmath.mpc(3, mpmath.sqrt(3)), mpmath.mpc(3, -mpmath.sqrt(3))}
        for z in zs:
            assert min(abs(z - w) for w in want) < mpmath.mpf(10) ** -30
            assert abs(abs(z) - 2 * mpmath.sqrt(3)) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("r", range(1, 21))
def test_zeros_satisfy_bounds(r):
    approx = pade_zeros(r)
    assert len(approx.zeros) == r
    for row in bound_report(r, approx.zeros):
        assert row["annulus"] and row["real_part"] and row["argument"]
    with mp.workdps(44):
        p = approx.polynomial()
        for z in approx.zeros:
            assert abs(p(z)) <= mpmath.mpf(10) ** -25 * p.scale(z)


def test_zeros_come_in_conjugate_pairs():
    zs = pade_zeros(7).zeros
    with mp.workdps(44):
        for z in zs:
            assert min(abs(w - mpmath.conj(z)) for w in zs) < mpmath.mpf(10) ** -28


def test_ratio_at_origin():
    assert pade_ratio(1, 0) == 1


def test_ratio_small_z():
    with mp.workdps(40):
        diff = mpmath.exp(-mpmath.mpf("0.01")) - pade_ratio(1, "0.01")
        # next term of the expansion is -z^4/24, about 4e-10
        assert abs(diff - mpmath.mpf("0.01") ** 3 / 12) < 1e-9


def test_ratio_pole():
    with pytest.raises(PoleProximity):
        pade_ratio(1, -2)


def test_ratio_within_bound():
    with mp.workdps(44):
        diff = abs(mpmath.exp(-1) - pade_ratio(4, 1))
        assert diff <= remainder_bound(4, 1, theta0=mp.pi / 4)


def test_remainder_at_origin():
    res = pade_remainder(1, 0)
    assert res.direct == 0 and res.integral == 0


def test_remainder_small_z():
    res = pade_remainder(1, "0.01")
    with mp.workdps(44):
        assert abs(res.direct - mpmath.mpf("8.33e-8")) < 1e-9
        assert abs(res.direct - res.integral) <= mpmath.mpf(10) ** -20 * abs(res.direct)


def test_remainder_bound_r5():
    res = pade_remainder(5, 2)
    assert abs(res.direct) <= res.bound


def test_remainder_complex_point():
    res = pade_remainder(6, mpmath.mpc(1.5, 0.8))
    with mp.workdps(44):
        assert abs(res.direct - res.integral) <= mpmath.mpf(10) ** -25 * abs(res.direct)
        assert abs(res.direct) <= res.bound


def test_remainder_domain():
    with pytest.raises(ValidationError):
        pade_remainder(2, -1)
    with pytest.raises(ValidationError):
        pade_remainder(2, mpmath.mpc(0.1, 3))
