import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from airytau.errors import ValidationError
from airytau.numkernel import (XPolynomial, aberth_roots, check_digits, default_digits,
                               logdet_lu, principal_root, principal_sqrt, reduce_arg, to_xc)


@pytest.mark.parametrize("z, expected", [(4, 2), (-1, 1j), (2j, 1 + 1j)])
def test_principal_sqrt(z, expected):
    with mp.workdps(40):
        assert abs(principal_sqrt(z) - expected) < mpmath.mpf(10) ** -38


def test_principal_root_branch():
    with mp.workdps(40):
        w = principal_root(-8, 3)
        assert abs(w ** 3 + 8) < 1e-35
        assert abs(mpmath.arg(w) - mp.pi / 3) < 1e-35


def test_reduce_arg_range():
    with mp.workdps(30):
        for a in (-10, -mp.pi, 0, mp.pi, 7.5):
            r = reduce_arg(mpmath.mpf(a))
            assert -mp.pi < r <= mp.pi
            assert abs(mpmath.sin(r) - mpmath.sin(a)) < 1e-25


def test_to_xc_pairs_and_strings():
    with mp.workdps(40):
        z = to_xc(("0.1000000000000000000000000000001", "2"))
        assert z.imag == 2
        assert abs(z.real - mpmath.mpf("0.1")) < mpmath.mpf(10) ** -30


def test_digits_tiers(monkeypatch):
    assert check_digits(32) == 32
    with pytest.raises(ValidationError):
        check_digits(40)
    monkeypatch.setenv("AIRYTAU_DIGITS", "64")
    assert default_digits() == 64
    monkeypatch.setenv("AIRYTAU_DIGITS", "x")
    with pytest.raises(ValidationError):
        default_digits()


def test_logdet_identity():
    ld = logdet_lu([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert ld.log_abs == 0 and ld.arg == 0


def test_logdet_diag():
    with mp.workdps(40):
        ld = logdet_lu([[2, 0], [0, 3]])
        assert abs(ld.log_abs - mpmath.log(6)) < 1e-38
        assert ld.arg == 0


def test_logdet_negative_determinant():
    with mp.workdps(40):
        ld = logdet_lu([[1, 2], [3, 4]])
        assert abs(ld.log_abs - mpmath.log(2)) < 1e-38
        assert abs(ld.arg - mp.pi) < 1e-38


@settings(max_examples=25, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=9, max_size=9))
def test_logdet_matches_mpmath_det(entries):
    M = [entries[0:3], entries[3:6], entries[6:9]]
    with mp.workdps(45):
        a = [[mpmath.mpc(v) for v in row] for row in M]
        det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
               - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
               + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
        if abs(det) < 1e-6:
            return
        ld = logdet_lu(M)
        assert abs(ld.value - det) < 1e-25 * abs(det)


def test_aberth_quadratic():
    with mp.workdps(40):
        roots = aberth_roots(XPolynomial((-1, 0, 1)), tol=mpmath.mpf(10) ** -35)
        assert sorted(float(r.real) for r in roots) == pytest.approx([-1, 1])


def test_aberth_pade_one():
    with mp.workdps(40):
        (root,) = aberth_roots(XPolynomial((2, -1)), tol=mpmath.mpf(10) ** -35)
        assert abs(root - 2) < 1e-35


def test_aberth_cubic_thirty_digits():
    with mp.workdps(50):
        p = XPolynomial.from_roots([1, 2, 3])
        roots = sorted(aberth_roots(p, tol=mpmath.mpf(10) ** -45), key=lambda z: z.real)
        for r, want in zip(roots, (1, 2, 3)):
            assert abs(r - want) < mpmath.mpf(10) ** -30


@settings(max_examples=15, deadline=None)
@given(st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=4, allow_nan=False,
                                   allow_infinity=False), min_size=2, max_size=6, unique=True))
def test_aberth_recovers_separated_roots(roots):
    if min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]) < 0.05:
        return
    with mp.workdps(50):
        p = XPolynomial.from_roots(roots)
        found = aberth_roots(p, tol=mpmath.mpf(10) ** -40)
        for want in roots:
            assert min(abs(f - want) for f in found) < 1e-20


def test_xpolynomial_derivative_and_bound():
    p = XPolynomial((1, 2, 3))
    assert p.derivative().coefficients == (2, 6)
    assert p.degree == 2
    assert p.cauchy_bound() >= 1
    assert math.isclose(float(p(1).real), 6)
