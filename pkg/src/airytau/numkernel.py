"""Extended-precision numeric substrate.

Every complex number is an ``mpmath.mpc``.  The public ``digits`` argument
names the accuracy the caller wants (32 or 64 decimal digits); functions
work internally at ``digits + GUARD`` or more and never touch the global
mpmath precision outside a ``workdps`` block.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp

from .errors import NearSingularWarning, NoConvergence, SingularMatrix, ValidationError

TIERS = (32, 64)
GUARD = 12
MAX_DPS = 4000


def default_digits() -> int:
    raw = os.environ.get("AIRYTAU_DIGITS", "32")
    try:
        d = int(raw)
    except ValueError:
        raise ValidationError(f"AIRYTAU_DIGITS={raw!r} is not an integer") from None
    return check_digits(d)


def check_digits(digits: int) -> int:
    if digits not in TIERS:
        raise ValidationError(f"digits must be one of {TIERS}, got {digits}")
    return digits


def to_xc(z) -> mpmath.mpc:
    """Coerce numbers, strings and ``(re, im)`` pairs to ``mpc`` at the active precision."""
    if isinstance(z, (tuple, list)):
        re, im = z
        return mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
    return mpmath.mpc(z)


def reduce_arg(a):
    """Reduce a real angle into (-pi, pi]."""
    two_pi = 2 * mp.pi
    a = a - two_pi * mpmath.floor(a / two_pi)
    if a > mp.pi:
        a -= two_pi
    return a


def principal_sqrt(z) -> mpmath.mpc:
    """Square root with the cut on the negative reals; boundary value taken from above."""
    z = mpmath.mpc(z)
    if z.imag == 0 and z.real < 0:
        return mpmath.mpc(0, mpmath.sqrt(-z.real))
    return mpmath.sqrt(z)


def principal_root(z, k: int) -> mpmath.mpc:
    """Principal k-th root, arg in (-pi/k, pi/k]."""
    z = mpmath.mpc(z)
    if z == 0:
        return mpmath.mpc(0)
    return mpmath.exp(mpmath.log(z) / k)


@dataclass(frozen=True)
class XPolynomial:
    coefficients: tuple  # ascending degree

    def __post_init__(self):
        cs = [mpmath.mpc(c) for c in self.coefficients]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [mpmath.mpc(0)]
        object.__setattr__(self, "coefficients", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Sequence) -> "XPolynomial":
        cs = [mpmath.mpc(1)]
        for r in roots:
            nxt = [mpmath.mpc(0)] * (len(cs) + 1)
            for k, c in enumerate(cs):
                nxt[k + 1] += c
                nxt[k] -= r * c
            cs = nxt
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        acc = mpmath.mpc(0)
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def derivative(self) -> "XPolynomial":
        cs = self.coefficients
        if len(cs) == 1:
            return XPolynomial((0,))
        return XPolynomial(tuple(k * cs[k] for k in range(1, len(cs))))

    def scale(self, z):
        """Sum of |c_k| |z|^k, the natural size against which |p(z)| is judged."""
        a = abs(z)
        acc = mpmath.mpf(0)
        for c in reversed(self.coefficients):
            acc = acc * a + abs(c)
        return acc

    def cauchy_bound(self):
        lead = abs(self.coefficients[-1])
        return 1 + max(abs(c) / lead for c in self.coefficients[:-1])


@dataclass(frozen=True)
class LogDet:
    log_abs: mpmath.mpf
    arg: mpmath.mpf
    near_singular: bool = False
    digits_lost: int = 0
    hadamard_loss: float = 0.0

    @property
    def value(self) -> mpmath.mpc:
        return mpmath.exp(self.log_abs) * mpmath.expj(self.arg)


def logdet_lu(M: Sequence[Sequence], digits: int = 32, dps: int | None = None) -> LogDet:
    """Log-determinant by LU with partial pivoting.

    ``digits_lost`` is ceil(log10(max row norm / min pivot)).  ``hadamard_loss``
    is log10(prod of row norms / |det|), an upper estimate (up to a factor
    n**1.5) of the digits cancelled inside the determinant; callers use it to
    decide whether to redo the computation at higher precision.
    """
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise ValidationError("logdet_lu needs a non-empty square matrix")
    with mp.workdps(dps or digits + GUARD):
        A = [[mpmath.mpc(v) for v in row] for row in M]
        row_norms = [mpmath.sqrt(mpmath.fsum(abs(v) ** 2 for v in row)) for row in A]
        max_norm = max(row_norms)
        if max_norm == 0:
            raise SingularMatrix("zero matrix")
        log_abs = mpmath.mpf(0)
        arg = mpmath.mpf(0)
        min_pivot = None
        for j in range(n):
            p = max(range(j, n), key=lambda i: abs(A[i][j]))
            piv = A[p][j]
            if piv == 0:
                raise SingularMatrix(f"zero pivot column at step {j}")
            if p != j:
                A[j], A[p] = A[p], A[j]
                arg = reduce_arg(arg + mp.pi)
            apiv = abs(piv)
            min_pivot = apiv if min_pivot is None else min(min_pivot, apiv)
            log_abs += mpmath.log(apiv)
            arg = reduce_arg(arg + mpmath.arg(piv))
            row_j = A[j]
            for i in range(j + 1, n):
                f = A[i][j] / piv
                if f == 0:
                    continue
                row_i = A[i]
                for k in range(j + 1, n):
                    row_i[k] -= f * row_j[k]
        near = min_pivot < mpmath.mpf(10) ** (-digits / 2) * max_norm
        lost = int(math.ceil(float(mpmath.log10(max_norm / min_pivot))))
        had = float((mpmath.fsum(mpmath.log(rn) for rn in row_norms) - log_abs) / mpmath.log(10))
    if near:
        warnings.warn(f"near-singular matrix: smallest pivot {mpmath.nstr(min_pivot, 5)}",
                      NearSingularWarning, stacklevel=2)
    return LogDet(+log_abs, +arg, bool(near), max(lost, 0), max(had, 0.0))


def aberth_roots(p: XPolynomial, tol, max_iter: int = 200, radius=None,
                 dps: int | None = None) -> list:
    """All roots of ``p`` by simultaneous Aberth-Ehrlich iteration.

    Starting points sit on a circle of the given radius (default: the Cauchy
    bound) with a small angular offset so conjugate-symmetric polynomials do
    not start on the real axis.
    """
    if p.degree < 1:
        raise ValidationError("aberth_roots needs degree >= 1")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    n = p.degree
    with mp.workdps(dps or mp.dps):
        lead = p.coefficients[-1]
        q = XPolynomial(tuple(c / lead for c in p.coefficients))
        dq = q.derivative()
        rad = mpmath.mpf(radius) if radius is not None else q.cauchy_bound()
        zs = [rad * mpmath.expj(2 * mp.pi * k / n + mpmath.mpf(0.4) / n) for k in range(n)]
        step_tol = mpmath.mpf(10) ** (-mp.dps + 3)

        def residual(z):
            s = q.scale(z)
            return abs(q(z)) / s if s else abs(q(z))

        for _ in range(max_iter):
            moved = mpmath.mpf(0)
            for i in range(n):
                z = zs[i]
                pz = q(z)
                if pz == 0:
                    continue
                ratio = pz / dq(z)
                repulsion = mpmath.fsum(1 / (z - zs[j]) for j in range(n) if j != i)
                w = ratio / (1 - ratio * repulsion)
                zs[i] = z - w
                moved = max(moved, abs(w) / max(abs(zs[i]), 1))
            if moved <= step_tol:
                break
        worst = max(residual(z) for z in zs)
        if worst > tol:
            raise NoConvergence(f"aberth_roots: worst scaled residual {mpmath.nstr(worst, 5)}",
                                worst_residual=worst)
    return zs
