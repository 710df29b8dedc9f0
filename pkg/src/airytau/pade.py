"""Diagonal Pade approximants P_r(z)/P_r(-z) of e^{-z}: coefficients, zeros, remainder."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mp

from .errors import BoundViolation, PoleProximity, QuadratureFailure, ValidationError
from .numkernel import GUARD, XPolynomial, aberth_roots, to_xc

R_MAX = 64


@dataclass(frozen=True)
class PadeApproximant:
    r: int
    coeffs: tuple  # exact ints, ascending, sign (-1)^k included
    zeros: tuple | None = None

    def polynomial(self) -> XPolynomial:
        return XPolynomial(tuple(self.coeffs))

    def __call__(self, z):
        acc = mpmath.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


def _check_r(r: int):
    if not 1 <= r <= R_MAX:
        raise ValidationError(f"r must lie in 1..{R_MAX}, got {r}")


@lru_cache(maxsize=None)
def pade_poly(r: int) -> PadeApproximant:
    """P_r(z) = sum_k (2r-k)! (-z)^k / (k! (r-k)!) with exact integer coefficients."""
    _check_r(r)
    c = math.factorial(2 * r) // math.factorial(r)
    coeffs = [c]
    for k in range(r):
        # c_{k+1}/c_k = -(r-k) / ((k+1)(2r-k)), always an exact division
        c = -c * (r - k) // ((k + 1) * (2 * r - k))
        coeffs.append(c)
    return PadeApproximant(r, tuple(coeffs))


@lru_cache(maxsize=None)
def _mu(dps: int):
    with mp.workdps(dps):
        mu = mpmath.mpf("0.28")
        for _ in range(200):
            f = mu * mpmath.exp(1 + mu) - 1
            step = f / ((1 + mu) * mpmath.exp(1 + mu))
            mu -= step
            if abs(step) < mpmath.mpf(10) ** (-dps):
                break
        return mu


def saff_varga_mu(digits: int = 32):
    """The positive root of mu e^{1+mu} = 1, by Newton iteration from 0.28."""
    return _mu(digits + GUARD)


def bound_report(r: int, zeros, digits: int = 32) -> list[dict]:
    """Check every zero against the annulus, the half-plane and the argument bound."""
    with mp.workdps(digits + GUARD):
        mu = saff_varga_mu(digits)
        lo, hi = 2 * r * mu, 2 * r + mpmath.mpf(4) / 3
        max_arg = mpmath.acos(mpmath.mpf(1) / r)
        slack = mpmath.mpf(10) ** (-digits)
        rows = []
        for a in zeros:
            rows.append({
                "zero": a,
                "annulus": bool(lo < abs(a) < hi),
                "real_part": bool(a.real > 2 * mu),
                "argument": bool(abs(mpmath.arg(a)) <= max_arg + slack),
            })
    return rows


@lru_cache(maxsize=None)
def _zeros(r: int, digits: int) -> tuple:
    p = pade_poly(r)
    dps = digits + GUARD + r // 2
    with mp.workdps(dps):
        roots = aberth_roots(p.polynomial(), tol=mpmath.mpf(10) ** (-dps + 4),
                             radius=mpmath.mpf(1.4) * r, dps=dps)
        # conjugate pairs, ordered by argument
        roots = sorted(roots, key=lambda z: (float(mpmath.arg(z)), float(abs(z))))
        if r % 2:
            k = min(range(r), key=lambda i: abs(roots[i].imag))
            roots[k] = mpmath.mpc(roots[k].real, 0)
    return tuple(roots)


def pade_zeros(r: int, digits: int = 32) -> PadeApproximant:
    """Zeros of P_r, validated against the Saff-Varga bounds."""
    _check_r(r)
    zeros = _zeros(r, digits)
    for row in bound_report(r, zeros, digits):
        failed = [k for k in ("annulus", "real_part", "argument") if not row[k]]
        if failed:
            raise BoundViolation(f"zero {mpmath.nstr(row['zero'], 15)} of P_{r} "
                                 f"violates {', '.join(failed)}")
    return PadeApproximant(r, pade_poly(r).coeffs, zeros)


def pade_ratio(r: int, z, digits: int = 32):
    """P_r(z)/P_r(-z) by Horner."""
    p = pade_poly(r)
    with mp.workdps(digits + GUARD):
        z = to_xc(z)
        den = p(-z)
        scale = p.polynomial().scale(z)
        if abs(den) < mpmath.mpf(10) ** (-digits / 2) * scale:
            raise PoleProximity(f"P_{r}(-z) nearly vanishes at z={mpmath.nstr(z, 10)}")
        return p(z) / den


@dataclass(frozen=True)
class PadeRemainder:
    direct: mpmath.mpc
    integral: mpmath.mpc
    bound: mpmath.mpf


def remainder_bound(r: int, z, theta0=None, digits: int = 32):
    """2|z|^r / ((sin th)^r (2 r mu sin th + |z|)^r)."""
    with mp.workdps(digits + GUARD):
        th = mp.pi / 6 if theta0 is None else mpmath.mpf(theta0)
        s = mpmath.sin(th)
        az = abs(to_xc(z))
        mu = saff_varga_mu(digits)
        return 2 * az ** r / (s ** r * (2 * r * mu * s + az) ** r)


def pade_remainder(r: int, z, digits: int = 32, theta0=None) -> PadeRemainder:
    """e^{-z} - P_r(z)/P_r(-z), directly and from the exact integral representation."""
    _check_r(r)
    with mp.workdps(digits + GUARD):
        z = to_xc(z)
        th = mp.pi / 6 if theta0 is None else mpmath.mpf(theta0)
        if z.real < 0:
            raise ValidationError("pade_remainder needs Re z >= 0")
        if z != 0 and abs(mpmath.arg(z)) > mp.pi / 2 - th + mpmath.mpf(10) ** (-digits):
            raise ValidationError("pade_remainder needs |arg z| <= pi/2 - theta0")
    # the direct difference cancels about log10|e^{-z}/remainder| digits
    extra = 2 * r + 10 + int(float(abs(z)))
    with mp.workdps(digits + GUARD + extra):
        p = pade_poly(r)
        z = mpmath.mpc(z)
        direct = mpmath.exp(-z) - p(z) / p(-z)
        if z == 0:
            integral = mpmath.mpc(0)
        else:
            pref = (-1) ** (r + 1) * z ** (2 * r + 1) / (math.factorial(r) * p(-z))
            val, err = mpmath.quad(lambda s: mpmath.exp(-s * z) * (1 - s) ** r * s ** r,
                                   [0, 0.5, 1], method="gauss-legendre", error=True)
            if err > abs(val) * mpmath.mpf(10) ** (-digits - 2) and err > mpmath.mpf(10) ** (-digits - 20):
                raise QuadratureFailure(f"remainder integral error estimate {mpmath.nstr(err, 3)}")
            integral = pref * val
    bound = remainder_bound(r, z, th, digits)
    with mp.workdps(digits + GUARD):
        return PadeRemainder(+direct, +integral, +bound)
