"""Generalized Kontsevich integral as a log-scaled Airy determinant.

For eigenvalue sets Y0, Y1, Y2 (each inside its sector S_nu) the integral is

    Z_n = (-w)^{n1-n2} (2 sqrt(pi))^n e^{sum (2/3) y^3 + x y} prod sqrt(y)
          * det[Ai_nu^{(k-1)}(y_j^2 + x)] / Vandermonde(y),

rows ordered Y0, Y1, Y2.  The exponential is folded into the rows so each
row stays of moderate size for large |y|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp

from .airy import jet_values
from .errors import IllConditioned, InvalidPartition, PoleProximity, ValidationError
from .numkernel import GUARD, MAX_DPS, check_digits, logdet_lu, principal_sqrt, reduce_arg, to_xc

SECTORS = {0: (-90.0, 90.0), 1: (30.0, 210.0), 2: (150.0, 330.0)}


def in_sector(y, nu: int) -> bool:
    """Strict membership of y in the open sector S_nu."""
    if y == 0:
        return False
    deg = math.degrees(float(mpmath.arg(y)))
    lo, hi = SECTORS[nu]
    for d in (deg, deg + 360.0, deg - 360.0):
        if lo < d < hi:
            return True
    return False


def sector_membership(y) -> frozenset:
    if to_xc(y) == 0:
        raise ValidationError("y = 0 has no sector")
    y = to_xc(y)
    return frozenset(nu for nu in (0, 1, 2) if in_sector(y, nu))


@dataclass(frozen=True)
class SpectrumPartition:
    x: mpmath.mpc
    y0: tuple
    y1: tuple = ()
    y2: tuple = ()
    digits: int = 32

    def __post_init__(self):
        object.__setattr__(self, "x", to_xc(self.x))
        for name in ("y0", "y1", "y2"):
            object.__setattr__(self, name, tuple(to_xc(y) for y in getattr(self, name)))
        self.validate()

    @property
    def n(self) -> int:
        return len(self.y0) + len(self.y1) + len(self.y2)

    @property
    def points(self) -> list:
        """(y, nu) in determinant row order."""
        return [(y, nu) for nu, block in enumerate((self.y0, self.y1, self.y2)) for y in block]

    def validate(self):
        if self.n == 0:
            raise InvalidPartition("partition is empty")
        pts = self.points
        for y, nu in pts:
            if y == 0:
                raise InvalidPartition("y = 0 is not allowed")
            if not in_sector(y, nu):
                raise InvalidPartition(f"y = {mpmath.nstr(y, 10)} is not inside sector S_{nu}")
        sep = mpmath.mpf(10) ** (-self.digits / 4)
        ys = [y for y, _ in pts]
        for j in range(len(ys)):
            for k in range(j + 1, len(ys)):
                if abs(ys[j] - ys[k]) <= sep:
                    raise InvalidPartition(f"points {j} and {k} coincide to within {mpmath.nstr(sep, 3)}")


@dataclass(frozen=True)
class KontsevichResult:
    log_z: mpmath.mpc
    n: int
    digits_lost_estimate: int
    work_dps: int


def _log_zn_at(p: SpectrumPartition, dps: int):
    with mp.workdps(dps):
        x = mpmath.mpc(p.x)
        pts = p.points
        n = len(pts)
        rows = []
        for y, nu in pts:
            fold = mpmath.exp(2 * y ** 3 / 3 + x * y)
            rows.append([fold * v for v in jet_values(y * y + x, nu, n - 1)])
        ld = logdet_lu(rows, digits=dps, dps=dps)
        total = n * mpmath.log(2 * mpmath.sqrt(mp.pi))
        total += (len(p.y1) - len(p.y2)) * mpmath.mpc(0, -mp.pi / 3)
        ys = [y for y, _ in pts]
        total += mpmath.fsum(mpmath.log(y) for y in ys) / 2
        for j in range(n):
            for k in range(j + 1, n):
                total -= mpmath.log(ys[j] - ys[k])
        total += mpmath.mpc(ld.log_abs, ld.arg)
        total = mpmath.mpc(total.real, reduce_arg(total.imag))
    return total, ld


def log_zn_target(p: SpectrumPartition, target_digits: int, work_dps: int | None = None) -> KontsevichResult:
    """log Z_n accurate to about ``target_digits`` digits, escalating precision as needed."""
    dps = work_dps or target_digits + GUARD + p.n
    while True:
        val, ld = _log_zn_at(p, dps)
        lost = int(math.ceil(ld.hadamard_loss))
        if dps - lost >= target_digits + GUARD:
            return KontsevichResult(val, p.n, lost, dps)
        need = target_digits + 2 * GUARD + lost + lost // 5
        dps = max(need, dps + dps // 2)
        if dps > MAX_DPS:
            raise IllConditioned(f"determinant needs more than {MAX_DPS} working digits "
                                 f"({lost} digits cancelled)")


def log_Zn(p: SpectrumPartition, digits: int | None = None) -> KontsevichResult:
    """log of the generalized Kontsevich integral; imaginary part in (-pi, pi]."""
    digits = check_digits(digits or p.digits)
    res = log_zn_target(p, digits)
    with mp.workdps(digits + GUARD):
        return KontsevichResult(+res.log_z, res.n, res.digits_lost_estimate, res.work_dps)


def partition_from_assignment(x, ys: Sequence, assignment: Sequence[int], digits: int = 32) -> SpectrumPartition:
    if len(ys) != len(assignment):
        raise ValidationError("assignment length must match ys")
    blocks = ([], [], [])
    for y, nu in zip(ys, assignment):
        blocks[nu].append(y)
    return SpectrumPartition(x, tuple(blocks[0]), tuple(blocks[1]), tuple(blocks[2]), digits)


def log_difference(a, b):
    """|a - b| with imaginary parts compared modulo 2 pi."""
    d = a - b
    return abs(mpmath.mpc(d.real, reduce_arg(d.imag)))


def assignment_gap(x, ys: Sequence, A: Sequence[int], B: Sequence[int], digits: int = 32):
    """|log Z(A) - log Z(B)| for two sector assignments of the same points."""
    check_digits(digits)
    za = log_Zn(partition_from_assignment(x, ys, A, digits), digits).log_z
    zb = log_Zn(partition_from_assignment(x, ys, B, digits), digits).log_z
    with mp.workdps(digits + GUARD):
        return log_difference(za, zb)


def _double_factorial(m: int) -> int:
    return math.prod(range(m, 0, -2)) if m > 0 else 1


@dataclass(frozen=True)
class MiwaTimes:
    T: tuple


def miwa_times(ys: Sequence, kmax: int, digits: int = 32) -> MiwaTimes:
    """T_k = -2^{-(2k+1)/3} / (2k+1)!! * sum_j y_j^{-2k-1}, k = 0..kmax."""
    with mp.workdps(digits + GUARD):
        ys = [to_xc(y) for y in ys]
        if any(y == 0 for y in ys):
            raise ValidationError("Miwa times need non-zero y")
        out = []
        for k in range(kmax + 1):
            s = mpmath.fsum(y ** (-2 * k - 1) for y in ys)
            out.append(-mpmath.power(2, -mpmath.mpf(2 * k + 1) / 3) / _double_factorial(2 * k + 1) * s)
    return MiwaTimes(tuple(out))


def witten_time_map(T: Sequence, digits: int = 32) -> list:
    """t_{2j+1} = -2^{(2j+1)/3} (T_j - delta_{j,1}) / (2j+1)!!, returned as [t_1, t_3, ...]."""
    with mp.workdps(digits + GUARD):
        return [-mpmath.power(2, mpmath.mpf(2 * j + 1) / 3) * (mpmath.mpf(Tj) - (1 if j == 1 else 0))
                / _double_factorial(2 * j + 1) for j, Tj in enumerate(T)]


def dn_eval(lam, lambdas: Sequence, mus: Sequence, digits: int = 32):
    """prod (sqrt mu_j + sqrt lam)/(sqrt mu_j - sqrt lam) * prod (sqrt lam_j - sqrt lam)/(sqrt lam_j + sqrt lam)."""
    with mp.workdps(digits + GUARD):
        s = principal_sqrt(to_xc(lam))
        tiny = mpmath.mpf(10) ** (-digits / 2)
        out = mpmath.mpc(1)
        for m in mus:
            sm = principal_sqrt(to_xc(m))
            den = sm - s
            if abs(den) <= tiny * (abs(sm) + abs(s)):
                raise PoleProximity(f"sqrt(lambda) hits sqrt(mu) = {mpmath.nstr(sm, 10)}")
            out *= (sm + s) / den
        for l in lambdas:
            sl = principal_sqrt(to_xc(l))
            den = sl + s
            if abs(den) <= tiny * (abs(sl) + abs(s)):
                raise PoleProximity(f"sqrt(lambda) hits -sqrt(lambda_j) = {mpmath.nstr(-sl, 10)}")
            out *= (sl - s) / den
        return out


# ------------------------------------------------------- Taylor mode in x

def _ser_mul(a, b, M):
    return [mpmath.fsum(a[i] * b[m - i] for i in range(m + 1)) for m in range(M + 1)]


def _ser_div(a, b, M):
    out = []
    inv0 = 1 / b[0]
    for m in range(M + 1):
        s = a[m] - mpmath.fsum(out[i] * b[m - i] for i in range(m))
        out.append(s * inv0)
    return out


def _ser_log(a, M):
    """Taylor coefficients of log a(d), constant term principal."""
    da = [(m + 1) * a[m + 1] for m in range(M)]
    q = _ser_div(da, a, M - 1) if M else []
    return [mpmath.log(a[0])] + [q[m - 1] / m for m in range(1, M + 1)]


def log_zn_derivatives(p: SpectrumPartition, order: int, target_digits: int = 32,
                       work_dps: int | None = None) -> list:
    """[log Z, d/dx log Z, ..., d^order/dx^order log Z] at p.x, exactly (no finite differences).

    Every matrix entry is expanded as a truncated Taylor series in the shift of
    x, using the Airy jet to the needed order; the LU runs over that series
    ring and the pivots' series logarithms are summed.
    """
    M = order
    if work_dps is None:
        work_dps = log_zn_target(p, target_digits).work_dps + 10
    with mp.workdps(work_dps):
        x = mpmath.mpc(p.x)
        pts = p.points
        n = len(pts)
        fact = [mpmath.factorial(m) for m in range(M + 1)]
        A = []
        for y, nu in pts:
            fold = mpmath.exp(2 * y ** 3 / 3 + x * y)
            jet = jet_values(y * y + x, nu, n - 1 + M)
            A.append([[fold * jet[k + m] / fact[m] for m in range(M + 1)] for k in range(n)])
        total = [mpmath.mpc(0)] * (M + 1)
        sign_flip = 0
        for j in range(n):
            piv_row = max(range(j, n), key=lambda i: abs(A[i][j][0]))
            if A[piv_row][j][0] == 0:
                raise IllConditioned("zero pivot in Taylor-mode determinant")
            if piv_row != j:
                A[j], A[piv_row] = A[piv_row], A[j]
                sign_flip += 1
            piv = A[j][j]
            lg = _ser_log(piv, M)
            total = [t + v for t, v in zip(total, lg)]
            for i in range(j + 1, n):
                f = _ser_div(A[i][j], piv, M)
                for k in range(j + 1, n):
                    prod = _ser_mul(f, A[j][k], M)
                    A[i][k] = [a - b for a, b in zip(A[i][k], prod)]
        ys = [y for y, _ in pts]
        const = n * mpmath.log(2 * mpmath.sqrt(mp.pi))
        const += (len(p.y1) - len(p.y2)) * mpmath.mpc(0, -mp.pi / 3) + sign_flip * mpmath.mpc(0, mp.pi)
        const += mpmath.fsum(mpmath.log(y) for y in ys) / 2
        for j in range(n):
            for k in range(j + 1, n):
                const -= mpmath.log(ys[j] - ys[k])
        total[0] += const
        total[0] = mpmath.mpc(total[0].real, reduce_arg(total[0].imag))
        if M >= 1:
            total[1] += mpmath.fsum(ys)  # the folded e^{x sum y}
        return [total[m] * fact[m] for m in range(M + 1)]
