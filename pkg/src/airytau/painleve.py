"""Pade eigenvalue configurations and the Painleve I hierarchy residual.

The points 𝒴_kappa = e^{2 i pi kappa/(2N+1)} (a_j / 2t)^{1/(2N+1)}, kappa = -N..N,
are the zeros of P_r(2 t y^{2N+1}); every group 𝒴_kappa of r points is
binned into one of the sector sets Y0, Y1, Y2.  The three labels
(k_plus, k_zero, k_minus) are read off a binning by counting groups per
quadrant.  With tau = e^{-x^3/12} Z_n, u = 2 d^2/dx^2 log Z_n - x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
from mpmath import mp

from .errors import InfeasibleBinning, SectorViolation, StepTooSmall, ValidationError
from .kontsevich import SpectrumPartition, in_sector, log_difference, log_zn_derivatives, log_zn_target
from .lenard import eval_diffpoly, lenard
from .numkernel import GUARD, check_digits, principal_root, to_xc
from .pade import pade_zeros

N_MAX = 6
R_MAX = 20
QUADRANT_TOL = 1e-12


def _check_t(t):
    t = to_xc(t)
    if t == 0:
        raise ValidationError("t = 0 degenerates the equation")
    if abs(float(mpmath.arg(t))) > math.pi / 4 + 1e-15:
        raise ValidationError("|arg t| must not exceed pi/4")
    return t


@lru_cache(maxsize=None)
def _groups(N: int, r: int, t_key: tuple, digits: int) -> tuple:
    with mp.workdps(digits + 2 * GUARD):
        t = mpmath.mpc(*t_key)
        a = pade_zeros(r, digits + GUARD).zeros
        m = 2 * N + 1
        base = [principal_root(aj / (2 * t), m) for aj in a]
        out = {}
        for kappa in range(-N, N + 1):
            rot = mpmath.expj(2 * mp.pi * kappa / m)
            out[kappa] = tuple(rot * b for b in base)
    return tuple(sorted(out.items()))


def group_points(N: int, r: int, t, digits: int = 32) -> dict:
    """{kappa: (y_1, ..., y_r)} for kappa = -N..N."""
    if not 1 <= N <= N_MAX:
        raise ValidationError(f"N must lie in 1..{N_MAX}")
    if not 1 <= r <= R_MAX:
        raise ValidationError(f"r must lie in 1..{R_MAX}")
    t = _check_t(t)
    return dict(_groups(N, r, (str(t.real), str(t.imag)), digits))


def quadrants(points: Sequence) -> frozenset:
    """Quadrants (1-4) met by a group of points."""
    qs = set()
    for y in points:
        phi = float(mpmath.arg(y))
        for edge in (math.pi / 2, -math.pi / 2):
            if abs(phi - edge) < QUADRANT_TOL:
                raise SectorViolation(f"point at arg {phi} lies on the imaginary axis")
        if 0 <= phi < math.pi / 2:
            qs.add(1)
        elif phi > math.pi / 2:
            qs.add(2)
        elif phi < -math.pi / 2:
            qs.add(3)
        else:
            qs.add(4)
    return frozenset(qs)


# (quadrant, nu) -> contribution to (k_plus, k_zero, k_minus)
_COUNTS = {(2, 2): (0, 1, 0), (3, 1): (0, -1, 0), (1, 1): (0, 0, 1), (4, 2): (-1, 0, 0)}


def labels_of(N: int, groups: dict, assignment: dict) -> tuple:
    """(k_plus, k_zero, k_minus) of a binning by the quadrant-counting rules.

    A group straddling the real axis is fine as long as every quadrant it
    meets yields the same contribution (the kappa = 0 group in Y0 yields none).
    """
    kp, k0, km = N // 2, 0, -(N // 2)
    for kappa, pts in groups.items():
        nu = assignment[kappa]
        contrib = {_COUNTS.get((q, nu), (0, 0, 0)) for q in quadrants(pts)}
        if len(contrib) != 1:
            raise SectorViolation(f"group kappa={kappa} straddles quadrants with different counts")
        dp, d0, dm = contrib.pop()
        kp, k0, km = kp + dp, k0 + d0, km + dm
    return kp, k0, km


def sector_feasible(groups: dict, assignment: dict) -> bool:
    return all(in_sector(y, assignment[k]) for k, pts in groups.items() for y in pts)


def consecutive_binnings(N: int) -> list:
    """Every split of the cyclic index order into consecutive Y0, Y1, Y2 blocks.

    Blocks run counterclockwise: Y2, then Y0 (non-empty), then Y1.
    Returned as dicts kappa -> nu.
    """
    m = 2 * N + 1
    order = list(range(-N, N + 1))  # counterclockwise by angle
    seen = set()
    out = []
    for start in range(m):
        for len0 in range(1, m + 1):
            for len1 in range(0, m - len0 + 1):
                a = {}
                for i in range(m):
                    kappa = order[(start + i) % m]
                    a[kappa] = 0 if i < len0 else (1 if i < len0 + len1 else 2)
                key = tuple(a[k] for k in order)
                if key not in seen:
                    seen.add(key)
                    out.append(a)
    return out


def feasible_binnings(N: int, r: int, t, digits: int = 32) -> list:
    """[(assignment, labels)] for every sector-feasible consecutive binning."""
    groups = group_points(N, r, t, digits)
    out = []
    for a in consecutive_binnings(N):
        if sector_feasible(groups, a):
            out.append((a, labels_of(N, groups, a)))
    return out


# ------------------------------------------------------------ ray windows

def _windows(N: int, t, kind: str) -> list:
    """[(k, lo, hi)] open angle windows where a ray of the given kind may sit."""
    m = 2 * N + 1
    shift = -2 * float(mpmath.arg(to_xc(t))) / m
    half = math.pi / m
    if kind == "0":
        rng, offset = (-math.pi / 3, math.pi / 3), 0.0
    elif kind == "+":
        rng, offset = (math.pi / 3, math.pi), 2 * math.pi / m
    else:
        rng, offset = (-math.pi, -math.pi / 3), -2 * math.pi / m
    out = []
    for k in range(-2 * m, 2 * m + 1):
        c = 4 * k * math.pi / m + offset + shift
        lo, hi = max(c - half, rng[0]), min(c + half, rng[1])
        if lo < hi:
            out.append((k, lo, hi))
    return out


def ray_windows(N: int, t) -> dict:
    """Admissible jump-ray windows {'0': [(k, lo, hi)], '+': [...], '-': [...]} in the lambda plane."""
    return {kind: _windows(N, t, kind) for kind in ("0", "+", "-")}


def ray_admissible(N: int, groups: dict, assignment: dict, t) -> tuple | None:
    """Labels (k_plus, k_zero, k_minus) of ray windows realizing the binning, or None.

    A zero lambda = y^2 (Re y > 0) gets index 0 between theta_minus and
    theta_plus, 1 above theta_plus, 2 below theta_minus; a pole mu = y^2
    (Re y < 0) gets index 2 above theta0 and 1 below it.
    """
    bounds = {"0": [-math.pi, math.pi], "+": [-math.pi, math.pi], "-": [-math.pi, math.pi]}

    def above(kind, phi):  # ray must sit above phi
        bounds[kind][0] = max(bounds[kind][0], phi)

    def below(kind, phi):
        bounds[kind][1] = min(bounds[kind][1], phi)

    for kappa, pts in groups.items():
        nu = assignment[kappa]
        for y in pts:
            phi = float(mpmath.arg(y * y))
            if y.real > 0:
                if nu == 0:
                    (above("+", phi) if phi > 0 else below("-", phi))
                elif nu == 1:
                    if phi <= 0:
                        return None
                    below("+", phi)
                else:
                    if phi >= 0:
                        return None
                    above("-", phi)
            elif nu == 2:
                below("0", phi)
            else:
                above("0", phi)
    labels = {}
    for kind in ("0", "+", "-"):
        lo, hi = bounds[kind]
        hit = [k for k, a, b in _windows(N, t, kind) if max(a, lo) < min(b, hi)]
        if not hit:
            return None
        labels[kind] = hit[0]
    return labels["+"], labels["0"], labels["-"]


# ------------------------------------------------------------- configs

@dataclass(frozen=True)
class P1Config:
    N: int
    r: int
    t: mpmath.mpc
    k_plus: int
    k_zero: int
    k_minus: int
    assignment: tuple  # ((kappa, nu), ...)
    groups: tuple = field(repr=False)  # ((kappa, points), ...)
    digits: int = 32

    @property
    def n(self) -> int:
        return self.r * (2 * self.N + 1)

    def partition(self, x=0) -> SpectrumPartition:
        a = dict(self.assignment)
        blocks = ([], [], [])
        for kappa, pts in self.groups:
            blocks[a[kappa]].extend(pts)
        return SpectrumPartition(x, tuple(blocks[0]), tuple(blocks[1]), tuple(blocks[2]), self.digits)

    @property
    def ray_labels(self):
        """Labels of ray windows compatible with this binning, None if there are none."""
        return ray_admissible(self.N, dict(self.groups), dict(self.assignment), self.t)

    def zeros_and_poles(self):
        """(lambdas, mus): squares of the points with Re y > 0 and Re y < 0."""
        lam, mu = [], []
        with mp.workdps(self.digits + GUARD):
            for _, pts in self.groups:
                for y in pts:
                    (lam if y.real > 0 else mu).append(y * y)
        return lam, mu

    def theta(self, lam, x=0):
        """t lam^{(2N+1)/2} + (2/3) lam^{3/2} + x lam^{1/2}, principal powers."""
        with mp.workdps(self.digits + GUARD):
            s = mpmath.sqrt(to_xc(lam))
            return self.t * s ** (2 * self.N + 1) + 2 * s ** 3 / 3 + to_xc(x) * s


def config_from_assignment(N: int, r: int, t, assignment: dict, digits: int = 32) -> P1Config:
    """Config for an explicit kappa -> nu binning; labels computed, sectors checked."""
    check_digits(digits)
    groups = group_points(N, r, t, digits)
    if set(assignment) != set(groups):
        raise ValidationError(f"assignment must cover kappa = -{N}..{N}")
    for kappa, pts in groups.items():
        for y in pts:
            if not in_sector(y, assignment[kappa]):
                raise SectorViolation(f"group kappa={kappa} is not inside S_{assignment[kappa]}")
    kp, k0, km = labels_of(N, groups, assignment)
    return P1Config(N, r, _check_t(t), kp, k0, km, tuple(sorted(assignment.items())),
                    tuple(sorted(groups.items())), digits)


def build_config(N: int, r: int, t, k_plus: int, k_zero: int, k_minus: int, digits: int = 32) -> P1Config:
    """Config whose binning carries the requested labels.

    Among several binnings with equal labels the one with the largest Y0
    block is taken, then the first in enumeration order.
    """
    if not (k_plus > k_minus and k_plus >= k_zero >= k_minus):
        raise InfeasibleBinning("labels must satisfy k_plus >= k_zero >= k_minus and k_plus > k_minus")
    matches = [a for a, lab in feasible_binnings(N, r, t, digits) if lab == (k_plus, k_zero, k_minus)]
    if not matches:
        raise InfeasibleBinning(f"no sector-feasible binning has labels {(k_plus, k_zero, k_minus)}")
    best = max(matches, key=lambda a: sum(1 for v in a.values() if v == 0))
    return config_from_assignment(N, r, t, best, digits)


# ------------------------------------------------------- u and residuals

@lru_cache(maxsize=None)
def fd_weights(deriv: int, offsets: tuple) -> tuple:
    """Exact finite-difference weights (Fornberg) for the given integer offsets."""
    x0 = 0
    n = len(offsets)
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(deriv + 1)]
    c[0][0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, n):
        c2 = Fraction(1)
        for j in range(i):
            c3 = Fraction(offsets[i] - offsets[j])
            c2 *= c3
            for k in range(min(i, deriv), -1, -1):
                prev = c[k - 1][i - 1][j] if k else 0
                c[k][i][j] = ((offsets[i] - x0) * c[k][i - 1][j] - k * prev) / c3
        for k in range(min(i, deriv), -1, -1):
            prev = c[k - 1][i - 1][i - 1] if k else 0
            c[k][i][i] = c1 / c2 * (k * prev - (offsets[i - 1] - x0) * c[k][i - 1][i - 1])
        c1 = c2
    return tuple(c[deriv][n - 1])


def _stencil_half_width(deriv: int, order: int) -> int:
    return (deriv + 1) // 2 - 1 + order // 2


@dataclass(frozen=True)
class UJet:
    x: float
    values: tuple      # u, u_x, ..., u_(m)
    fd_error: tuple    # estimated truncation error per entry (0 for exact mode)


def _fd_log_derivs(cfg: P1Config, x, h, max_deriv: int, order: int, target: int, cache: dict, work):
    s = _stencil_half_width(max_deriv, order)
    with mp.workdps(target + GUARD):
        h = mpmath.mpf(h)
        x = mpmath.mpf(x)
        vals = {}
        for j in range(-s, s + 1):
            key = (str(x), str(h), j)
            if key not in cache:
                res = log_zn_target(cfg.partition(x + j * h), target, work.get("dps"))
                work["dps"] = res.work_dps
                cache[key] = res.log_z
            vals[j] = cache[key]
        ref = vals[0]
        # keep the imaginary parts on one continuous branch
        for j in vals:
            d = vals[j].imag - ref.imag
            vals[j] = mpmath.mpc(vals[j].real, ref.imag + d - 2 * mp.pi * mpmath.nint(d / (2 * mp.pi)))
        out = []
        for d in range(2, max_deriv + 1):
            sd = _stencil_half_width(d, order)
            offs = tuple(range(-sd, sd + 1))
            w = fd_weights(d, offs)
            out.append(mpmath.fsum(mpmath.mpf(wk.numerator) / wk.denominator * vals[o]
                                   for wk, o in zip(w, offs)) / h ** d)
    return out


def u_from_logZ(cfg: P1Config, x, h=2.0 ** -6, digits: int = 32, m: int = 4,
                method: str = "fd", order: int = 6) -> UJet:
    """(u, u_x, ..., u_(m)) at x with u = 2 (log Z_n)'' - x.

    ``method="fd"`` uses central stencils of the given order with step h and
    reports |D_h - D_{h/2}| as the error estimate; ``method="taylor"``
    differentiates the determinant exactly in Taylor mode.
    """
    check_digits(digits)
    if h <= 0:
        raise ValidationError("h must be positive")
    max_deriv = m + 2
    if method == "taylor":
        with mp.workdps(digits + GUARD):
            ld = log_zn_derivatives(cfg.partition(x), max_deriv, digits)
            u = [2 * ld[k + 2] for k in range(m + 1)]
            u[0] -= mpmath.mpf(x)
            if m >= 1:
                u[1] -= 1
            return UJet(float(x), tuple(+v for v in u), tuple(0.0 for _ in u))
    if method != "fd":
        raise ValidationError("method must be 'fd' or 'taylor'")
    loss = max_deriv * math.log10(1 / h) + 1
    if loss > 3 * digits:
        raise StepTooSmall(f"step {h} cancels {loss:.0f} digits in the order-{max_deriv} stencil")
    target = digits + int(math.ceil(loss)) + 5
    cache: dict = {}
    work: dict = {}
    coarse = _fd_log_derivs(cfg, x, h, max_deriv, order, target, cache, work)
    fine = _fd_log_derivs(cfg, x, h / 2, max_deriv, order, target, cache, work)
    with mp.workdps(digits + GUARD):
        u = [2 * v for v in fine]
        err = [float(2 * abs(a - b)) for a, b in zip(coarse, fine)]
        u[0] -= mpmath.mpf(x)
        if m >= 1:
            u[1] -= 1
        return UJet(float(x), tuple(+v for v in u), tuple(err))


@dataclass(frozen=True)
class ResidualReport:
    x_grid: tuple
    residuals: tuple
    u_values: tuple
    fd_step: float
    fd_errors: tuple
    method: str = "fd"


def ode_residual(cfg: P1Config, x_grid: Sequence, h=2.0 ** -6, digits: int = 32,
                 method: str = "fd") -> ResidualReport:
    """|(2N+1) t L_N[u] + u + x| along the grid."""
    N = cfg.N
    L = lenard(N)
    m = max(2 * N - 2, 0)
    res, us, errs = [], [], []
    for x in x_grid:
        jet = u_from_logZ(cfg, x, h, digits, m=m, method=method)
        with mp.workdps(digits + GUARD):
            val = (2 * N + 1) * cfg.t * eval_diffpoly(L, list(jet.values)) + jet.values[0] + mpmath.mpf(x)
            res.append(abs(val))
            us.append(jet.values[0])
            # first-order propagation of the u-jet error through the residual
            errs.append(max(jet.fd_error) * float(abs((2 * N + 1) * cfg.t) * 10 + 1) if jet.fd_error else 0.0)
    return ResidualReport(tuple(float(x) for x in x_grid), tuple(res), tuple(us), float(h),
                          tuple(errs), method)


def general_residual(t_list: Sequence, u_jet: Sequence, x):
    """|sum_{k=1}^{N} (2k+1) t_{2k+1} L_k[u] + x| with t_list = [t_3, t_5, ..., t_{2N+1}]."""
    total = x
    for k, tk in enumerate(t_list, start=1):
        if tk:
            total = total + (2 * k + 1) * tk * eval_diffpoly(lenard(k), list(u_jet))
    return abs(total)


def stokes_gap(N: int, r: int, t, labels_a: tuple, labels_b: tuple, digits: int = 32, x=0):
    """|log Z_n(A) - log Z_n(B)| for two binnings of the same points."""
    a = build_config(N, r, t, *labels_a, digits=digits)
    b = build_config(N, r, t, *labels_b, digits=digits)
    return config_gap(a, b, x, digits)


def config_gap(a: P1Config, b: P1Config, x=0, digits: int = 32):
    if a.assignment == b.assignment:
        return mpmath.mpf(0)
    za = log_zn_target(a.partition(x), digits).log_z
    zb = log_zn_target(b.partition(x), digits).log_z
    with mp.workdps(digits + GUARD):
        return log_difference(za, zb)
