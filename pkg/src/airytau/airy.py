"""Complex Airy functions in every sector, derivative jets, and the 2x2 Airy parametrix.

Two backends produce the pair (Ai, Ai'):

* the Maclaurin series, run with enough guard digits to absorb the
  cancellation that grows like exp(4/3 |z|^{3/2});
* the large-|z| asymptotic expansion, used directly for |arg z| <= 2pi/3
  and through the connection identity Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z)
  beyond that.

The switch radius is tied to the working precision so that the asymptotic
series always reaches the target accuracy before it starts to diverge.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .errors import (
    DivergentTail,
    GrowthWarning,
    OnRay,
    PrecisionLossWarning,
    QuadratureFailure,
    ValidationError,
)
from .numkernel import GUARD, to_xc

LOG10E = math.log10(math.e)

# Ai(0) and -Ai'(0), i.e. 3^(-2/3)/Gamma(2/3) and 3^(-1/3)/Gamma(1/3).
AIRY_C1 = ("0.3550280538878172392600631860041831763979791741991772405833265103"
           "008100424501267129571742460540402716")
AIRY_C2 = ("0.2588194037928067984051835601892039634790911383549345822100018138"
           "561027726767902806541964058272753843")
_LITERAL_DIGITS = 95


def omega() -> mpmath.mpc:
    """e^{2 i pi / 3} at the active precision."""
    return mpmath.expj(2 * mp.pi / 3)


def _origin_constants():
    if mp.dps <= _LITERAL_DIGITS:
        return mpmath.mpf(AIRY_C1), mpmath.mpf(AIRY_C2)
    third = mpmath.mpf(1) / 3
    return (mpmath.power(3, -2 * third) / mpmath.gamma(2 * third),
            mpmath.power(3, -third) / mpmath.gamma(third))


def switch_radius(dps: int) -> float:
    """|z| above which the asymptotic series reaches 10^-dps before diverging.

    The smallest term of the expansion is about exp(-2|zeta|), zeta = 2/3 z^{3/2}.
    """
    return (0.75 * (dps + 3) * math.log(10)) ** (2 / 3)


def _series_extra_digits(z) -> int:
    return int(math.ceil(4 / 3 * float(abs(z)) ** 1.5 * LOG10E)) + 2


# ---------------------------------------------------------------- asymptotics

@dataclass(frozen=True)
class AiryAsymptotics:
    u: tuple  # exact Fractions, u[0] = 1
    r: tuple  # r[k] = -(6k+1)/(6k-1) u[k], r[0] = 1

    @staticmethod
    def zeta(z):
        z = mpmath.mpc(z)
        return 2 * z * mpmath.sqrt(z) / 3


@lru_cache(maxsize=None)
def asymptotic_coefficients(kmax: int) -> AiryAsymptotics:
    """u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!) and the matching r_k, k = 0..kmax."""
    u = [Fraction(1)]
    for k in range(1, kmax + 1):
        u.append(u[-1] * Fraction((6 * k - 5) * (6 * k - 3) * (6 * k - 1), 216 * k * (2 * k - 1)))
    r = [Fraction(1)] + [-Fraction(6 * k + 1, 6 * k - 1) * u[k] for k in range(1, kmax + 1)]
    return AiryAsymptotics(tuple(u), tuple(r))


def _mpf_fraction(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _asymptotic_pair(z, kmax: int | None, target_digits: int):
    z = mpmath.mpc(z)
    if z == 0 or abs(mpmath.arg(z)) >= mp.pi:
        raise ValidationError("airy_asymptotic needs |arg z| < pi and z != 0")
    sq = mpmath.sqrt(z)
    zeta = 2 * z * sq / 3
    z14 = mpmath.sqrt(sq)
    eps = mpmath.mpf(10) ** (-mp.dps)
    cap = kmax if kmax is not None else 4 * mp.dps + 40
    coeffs = asymptotic_coefficients(max(cap, 1))
    inv = 1 / zeta
    s_u = mpmath.mpc(1)
    s_v = mpmath.mpc(1)
    power = mpmath.mpc(1)
    prev = mpmath.inf
    last = mpmath.mpf(0)
    for k in range(1, cap + 1):
        power *= -inv
        tu = _mpf_fraction(coeffs.u[k]) * power
        tv = _mpf_fraction(coeffs.r[k]) * power
        size = max(abs(tu), abs(tv))
        if size > prev:
            break  # terms started to grow: stop at the smallest one
        s_u += tu
        s_v += tv
        last = size
        prev = size
        if size <= eps:
            break
    if last > mpmath.mpf(10) ** (-target_digits):
        raise DivergentTail(f"asymptotic series stalls at term size {mpmath.nstr(last, 3)} "
                            f"for |z| = {mpmath.nstr(abs(z), 5)}")
    pref = mpmath.exp(-zeta) / (2 * mpmath.sqrt(mp.pi))
    return pref * s_u / z14, -pref * z14 * s_v


def airy_asymptotic(z, kmax: int | None = None, digits: int = 32):
    """(Ai(z), Ai'(z)) from the large-|z| expansion; requires |arg z| < pi."""
    with mp.workdps(digits + GUARD):
        ai, aip = _asymptotic_pair(to_xc(z), kmax, digits)
        return +ai, +aip


# --------------------------------------------------------------------- series

def _series_pair(z):
    """Maclaurin evaluation at the active precision.  Returns (Ai, Ai', digits cancelled)."""
    c1, c2 = _origin_constants()
    z3 = z * z * z
    f, g = mpmath.mpc(1), mpmath.mpc(z)          # f_k, g_k terms
    fp, gp = mpmath.mpc(0), mpmath.mpc(1)        # derivative terms
    sf, sg, sfp, sgp = f, g, fp, gp
    biggest = max(c1 * abs(f), c2 * abs(g), c1 * abs(fp), c2 * abs(gp))
    eps = mpmath.mpf(10) ** (-mp.dps - 5)
    fp_next = z * z / 2                           # f'_1
    k = 0
    while True:
        f = f * z3 / ((3 * k + 2) * (3 * k + 3))
        g = g * z3 / ((3 * k + 3) * (3 * k + 4))
        fp = fp_next if k == 0 else fp * z3 / ((3 * k) * (3 * k + 2))
        gp = gp * z3 / ((3 * k + 1) * (3 * k + 3))
        sf += f
        sg += g
        sfp += fp
        sgp += gp
        k += 1
        size = c1 * (abs(f) + abs(fp)) + c2 * (abs(g) + abs(gp))
        biggest = max(biggest, size)
        scale = c1 * (abs(sf) + abs(sfp)) + c2 * (abs(sg) + abs(sgp))
        if size <= eps * scale:
            break
    ai = c1 * sf - c2 * sg
    aip = c1 * sfp - c2 * sgp
    result = abs(ai) + abs(aip)
    lost = float(mpmath.log10(biggest / result)) if result else float(mp.dps)
    return ai, aip, lost


def airy_series(z, digits: int = 32):
    """(Ai(z), Ai'(z)) from the Maclaurin series with adaptive guard digits."""
    z = to_xc(z)
    extra = _series_extra_digits(z)
    with mp.workdps(digits + GUARD + extra):
        ai, aip, lost = _series_pair(mpmath.mpc(z))
    if lost > extra + GUARD - 2:
        warnings.warn(f"airy_series lost {lost:.1f} digits at |z|={mpmath.nstr(abs(z), 5)}",
                      PrecisionLossWarning, stacklevel=2)
    with mp.workdps(digits + GUARD):
        return +ai, +aip


def _pair(w):
    """(Ai(w), Ai'(w)) to the active precision, choosing the backend."""
    dps = mp.dps
    if abs(w) < switch_radius(dps):
        extra = _series_extra_digits(w)
        with mp.workdps(dps + extra):
            ai, aip, _ = _series_pair(mpmath.mpc(w))
        return +ai, +aip
    with mp.workdps(dps + 5):
        if abs(mpmath.arg(w)) <= 2 * mp.pi / 3:
            ai, aip = _asymptotic_pair(w, None, dps)
        else:
            om = omega()
            a1, d1 = _asymptotic_pair(om * w, None, dps)
            a2, d2 = _asymptotic_pair(om * om * w, None, dps)
            ai = -om * a1 - om * om * a2
            aip = -om * om * d1 - om * d2
    return +ai, +aip


def airy_pair(z, digits: int = 32):
    """(Ai(z), Ai'(z)) with automatic backend selection."""
    with mp.workdps(digits + GUARD):
        return _pair(to_xc(z))


# ------------------------------------------------------------------------ jet

@dataclass(frozen=True)
class AirySector:
    nu: int

    def __post_init__(self):
        if self.nu not in (0, 1, 2):
            raise ValidationError("sector index nu must be 0, 1 or 2")

    @property
    def omega(self):
        return omega()

    def __call__(self, z, digits: int = 32):
        """Ai_nu(z) = Ai(omega^nu z)."""
        with mp.workdps(digits + GUARD):
            return _pair(omega() ** self.nu * to_xc(z))[0]


@dataclass(frozen=True)
class AiryJet:
    z: mpmath.mpc
    nu: int
    values: tuple


def jet_values(z, nu: int, m: int) -> list:
    """[Ai_nu(z), Ai_nu'(z), ..., Ai_nu^(m)(z)] at the active precision.

    Ai_nu solves the same equation y'' = z y as Ai, so the derivative
    recurrence runs in z after the chain rule fixes the first derivative.
    """
    rot = omega() ** nu
    ai, aip = _pair(rot * z)
    vals = [ai, rot * aip]
    for k in range(m - 1):
        vals.append(z * vals[k] + (k * vals[k - 1] if k else 0))
    return vals[: m + 1]


def airy_jet(z, nu: int, m: int, digits: int = 32) -> AiryJet:
    if nu not in (0, 1, 2):
        raise ValidationError("nu must be 0, 1 or 2")
    if m < 0:
        raise ValidationError("m must be non-negative")
    with mp.workdps(digits + GUARD):
        z = to_xc(z)
        vals = jet_values(z, nu, m)
    if abs(vals[-1]) > mpmath.mpf(10) ** (digits / 2):
        warnings.warn(f"Airy jet of order {m} reached {mpmath.nstr(abs(vals[-1]), 3)}",
                      GrowthWarning, stacklevel=2)
    return AiryJet(z, nu, tuple(vals))


# ------------------------------------------------------------ quadrature oracle

def airy_quadrature_oracle(z, digits: int = 32) -> mpmath.mpc:
    """Ai(z) = (1/2pi) * integral of exp(i(s^3/3 + s z)) over the two steepest rays.

    Independent of both production backends; meant for tests only.
    """
    z = to_xc(z)
    if abs(z) > 30:
        raise ValidationError("quadrature oracle regime is |z| <= 30")
    target = mpmath.mpf(10) ** (-min(digits, 30))
    with mp.workdps(digits + GUARD):
        dirs = (mpmath.expj(mp.pi / 6), mpmath.expj(5 * mp.pi / 6))
        # worst exponential growth of the integrand before the cubic wins
        b = max(max(-float((d * z).imag) for d in dirs), 0.0)
        peak = 2 / 3 * b ** 1.5
        loss = int(peak * LOG10E) + 2
    dps = digits + GUARD + loss
    with mp.workdps(dps):
        dirs = (mpmath.expj(mp.pi / 6), mpmath.expj(5 * mp.pi / 6))
        stop = mpmath.mpf((dps + 10) * math.log(10))
        rho_max = mpmath.mpf(2)
        while rho_max ** 3 / 3 - b * rho_max < stop:
            rho_max *= 1.25
        cuts = [mpmath.mpf(0)]
        step = max(mpmath.mpf(1) / 2, mpmath.sqrt(max(b, 1)) / 4)
        while cuts[-1] < rho_max:
            cuts.append(min(cuts[-1] + step, rho_max))
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        sign = (1, -1)
        for d, sg in zip(dirs, sign):
            def f(rho, d=d):
                s = rho * d
                return d * mpmath.exp(1j * (s ** 3 / 3 + s * z))
            val, e = mpmath.quad(f, cuts, method="gauss-legendre", error=True)
            total += sg * val
            err += e
        tail = max(abs(mpmath.exp(1j * ((rho_max * d) ** 3 / 3 + rho_max * d * z))) for d in dirs)
        result = total / (2 * mp.pi)
        if (err + tail) / (2 * mp.pi) > target:
            raise QuadratureFailure(f"oracle error estimate {mpmath.nstr(err + tail, 3)}")
    with mp.workdps(digits + GUARD):
        return +result


# ----------------------------------------------------------------- parametrix

@dataclass(frozen=True)
class ContourConfig:
    theta0: float = 0.0
    theta_plus: float = 2 * math.pi / 3
    theta_minus: float = -2 * math.pi / 3

    def __post_init__(self):
        if not -math.pi / 3 < self.theta0 < math.pi / 3:
            raise ValidationError("theta0 must lie in (-pi/3, pi/3)")
        if not math.pi / 3 < self.theta_plus < math.pi:
            raise ValidationError("theta_plus must lie in (pi/3, pi)")
        if not -math.pi < self.theta_minus < -math.pi / 3:
            raise ValidationError("theta_minus must lie in (-pi, -pi/3)")

    def region(self, zeta, tol: float = 1e-15) -> str:
        """Region I-IV containing zeta; half-open sectors [theta, next theta) counterclockwise."""
        if zeta == 0:
            raise OnRay("zeta = 0 lies on every ray")
        phi = float(mpmath.arg(zeta))
        for ray in (self.theta0, self.theta_plus, self.theta_minus, math.pi):
            gap = abs((phi - ray + math.pi) % (2 * math.pi) - math.pi)
            if gap < tol:
                raise OnRay(f"arg zeta = {phi} is within {tol} of the ray at {ray}")
        if self.theta0 <= phi < self.theta_plus:
            return "I"
        if self.theta_plus <= phi < math.pi:
            return "II"
        if self.theta_minus <= phi < self.theta0:
            return "IV"
        return "III"


@dataclass(frozen=True)
class ParametrixValue:
    zeta: mpmath.mpc
    region: str
    matrix: tuple  # ((a, b), (c, d))

    @property
    def det(self):
        (a, b), (c, d) = self.matrix
        return a * d - b * c


def _region_matrix(zeta, region: str):
    om = omega()
    om2 = om * om
    if region in ("I", "IV"):
        a0, d0 = _pair(zeta)
    if region in ("I", "II", "III"):
        a2, d2 = _pair(om2 * zeta)
    if region in ("II", "III", "IV"):
        a1, d1 = _pair(om * zeta)
    if region == "I":
        m = ((a0, a2), (d0, om2 * d2))
    elif region == "II":
        m = ((-om * a1, a2), (-om2 * d1, om2 * d2))
    elif region == "III":
        m = ((-om2 * a2, -om2 * a1), (-om * d2, -d1))
    else:
        m = ((a0, -om2 * a1), (d0, -d1))
    pref = mpmath.sqrt(2 * mp.pi) * mpmath.expj(-mp.pi / 12)
    left = mpmath.expj(-mp.pi / 6)
    right = mpmath.expj(mp.pi / 6)
    return ((pref * m[0][0] * left, pref * m[0][1] * right),
            (pref * m[1][0] * left, pref * m[1][1] * right))


def _extra_for_radius(rho) -> int:
    return int(4 / 3 * float(rho) ** 1.5 * LOG10E) + 2


def airy_parametrix(zeta, rays: ContourConfig | None = None, digits: int = 32) -> ParametrixValue:
    rays = rays or ContourConfig()
    with mp.workdps(digits + GUARD):
        zeta = to_xc(zeta)
        region = rays.region(zeta)
    with mp.workdps(digits + GUARD + _extra_for_radius(abs(zeta))):
        m = _region_matrix(mpmath.mpc(zeta), region)
    return ParametrixValue(zeta, region, m)


def _inv_mul(A, B):
    """A^{-1} B for 2x2 A with det A = 1 (uses the adjugate, scaled by 1/det)."""
    (a, b), (c, d) = A
    det = a * d - b * c
    inv = ((d / det, -b / det), (-c / det, a / det))
    return tuple(tuple(inv[i][0] * B[0][j] + inv[i][1] * B[1][j] for j in range(2))
                 for i in range(2))


JUMPS = {
    "theta0": ("IV", "I", ((1, 1), (0, 1))),
    "theta_plus": ("II", "I", ((1, 0), (1, 1))),
    "theta_minus": ("IV", "III", ((1, 0), (1, 1))),
    "negative_axis": ("III", "II", ((0, 1), (-1, 0))),
}


def parametrix_jump(rho, ray: str, rays: ContourConfig | None = None, digits: int = 32):
    """A_-^{-1} A_+ on the given ray at radius rho, from the boundary values of both regions."""
    rays = rays or ContourConfig()
    minus, plus, _ = JUMPS[ray]
    angle = {"theta0": rays.theta0, "theta_plus": rays.theta_plus,
             "theta_minus": rays.theta_minus, "negative_axis": math.pi}[ray]
    with mp.workdps(digits + GUARD + 2 * _extra_for_radius(rho)):
        zeta = mpmath.mpf(rho) * mpmath.expj(mpmath.mpf(angle) if ray != "negative_axis" else mp.pi)
        return _inv_mul(_region_matrix(zeta, minus), _region_matrix(zeta, plus))


def verify_parametrix_jumps(rho, rays: ContourConfig | None = None, digits: int = 32) -> dict:
    """Max entrywise deviation of each ray's jump from its expected matrix."""
    if rho <= 0:
        raise ValidationError("rho must be positive")
    out = {}
    for ray, (_, _, expected) in JUMPS.items():
        J = parametrix_jump(rho, ray, rays, digits)
        with mp.workdps(digits + GUARD):
            out[ray] = max(abs(J[i][j] - expected[i][j]) for i in range(2) for j in range(2))
    out["max"] = max(out.values())
    return out
