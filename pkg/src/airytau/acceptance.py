"""The eleven acceptance checks, shared by the test suite and ``airytau suite acceptance``.

Each check returns a ``Check`` with a pass flag, the measured numbers and the
threshold they were held to.  Nothing here relaxes a tolerance.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from . import airy, kontsevich, lenard, pade, painleve
from .lenard import DiffPolynomial
from .numkernel import GUARD


@dataclass
class Check:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.title} -- {self.detail} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        check = fn(*args, **kwargs)
        check.seconds = time.perf_counter() - t0
        return check
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _f(x) -> str:
    return mpmath.nstr(x, 3)


@_timed
def criterion_1() -> Check:
    """Series vs quadrature oracle at four points, <= 1e-18, under 10 s."""
    t0 = time.perf_counter()
    worst = mpmath.mpf(0)
    for z in (0, 1, -2, mpmath.mpc(3, 2)):
        ai, _ = airy.airy_series(z, 32)
        worst = max(worst, abs(ai - airy.airy_quadrature_oracle(z, 32)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-18 and elapsed < 10
    return Check(1, "Airy oracle agreement", ok, f"max |series - oracle| = {_f(worst)} (<= 1e-18), {elapsed:.1f}s (< 10s)",
                 data={"max_abs": float(worst), "elapsed": elapsed})


@_timed
def criterion_2(seed: int = 2024) -> Check:
    """Ai0 + w Ai1 + w^2 Ai2 = 0 at 100 random points |z| <= 10."""
    rng = random.Random(seed)
    worst = mpmath.mpf(0)
    with mp.workdps(32 + GUARD):
        om = airy.omega()
        for _ in range(100):
            rad, ang = 10 * math.sqrt(rng.random()), rng.uniform(-math.pi, math.pi)
            z = mpmath.mpf(rad) * mpmath.expj(ang)
            vals = [airy.airy_jet(z, nu, 0, 32).values[0] for nu in range(3)]
            worst = max(worst, abs(vals[0] + om * vals[1] + om * om * vals[2]))
    return Check(2, "connection identity", worst <= 1e-26, f"max residual {_f(worst)} (<= 1e-26)",
                 data={"max_residual": float(worst)})


@_timed
def criterion_3() -> Check:
    """det A = 1 to 1e-25 and jumps to 1e-20 at |zeta| = 2, 10."""
    det_worst = mpmath.mpf(0)
    jump_worst = mpmath.mpf(0)
    for rho in (2, 10):
        for ang in (0.1, 1.0, 1.9, 2.5, 3.0, -0.4, -1.2, -2.3, -2.9):
            v = airy.airy_parametrix(rho * mpmath.expj(ang), digits=32)
            det_worst = max(det_worst, abs(v.det - 1))
        jump_worst = max(jump_worst, airy.verify_parametrix_jumps(rho, digits=32)["max"])
    ok = det_worst <= 1e-25 and jump_worst <= 1e-20
    return Check(3, "parametrix det and jumps", ok,
                 f"max |det - 1| = {_f(det_worst)} (<= 1e-25), max jump residual {_f(jump_worst)} (<= 1e-20)",
                 data={"det": float(det_worst), "jump": float(jump_worst)})


@_timed
def criterion_4(seed: int = 7) -> Check:
    """log Z_1(0; 10) = -5/48000 within 1e-6; n = 1 closed form to 1e-24 at 20 random points."""
    anchor = kontsevich.log_Zn(kontsevich.SpectrumPartition(0, (10,))).log_z
    anchor_err = abs(anchor - mpmath.mpf(-5) / 48000)
    rng = random.Random(seed)
    worst = mpmath.mpf(0)
    for _ in range(20):
        x = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-1, 1))
        y = mpmath.mpf(rng.uniform(0.3, 4)) * mpmath.expj(rng.uniform(-1.4, 1.4))
        got = kontsevich.log_Zn(kontsevich.SpectrumPartition(x, (y,))).log_z
        with mp.workdps(60):
            ref = (mpmath.log(2 * mpmath.sqrt(mp.pi)) + 2 * y ** 3 / 3 + x * y + mpmath.log(y) / 2
                   + mpmath.log(mpmath.airyai(y * y + x)))
            worst = max(worst, kontsevich.log_difference(got, ref))
    ok = anchor_err <= 1e-6 and worst <= 1e-24
    return Check(4, "Kontsevich n=1 anchor", ok,
                 f"|log Z1(10) + 5/48000| = {_f(anchor_err)} (<= 1e-6), closed-form max diff {_f(worst)} (<= 1e-24)",
                 data={"anchor_err": float(anchor_err), "closed_form": float(worst)})


@_timed
def criterion_5() -> Check:
    """|log Z_3| at {c, 2c, 3c} drops by >= 7 from c = 5 to c = 10."""
    vals = {c: abs(kontsevich.log_Zn(kontsevich.SpectrumPartition(0, (c, 2 * c, 3 * c))).log_z) for c in (5, 10)}
    ratio = vals[5] / vals[10]
    return Check(5, "normalization", ratio >= 7, f"|log Z(5)|/|log Z(10)| = {_f(ratio)} (>= 7)",
                 data={"ratio": float(ratio)})


@_timed
def criterion_6() -> Check:
    """Assignment gap at y = R e^{i pi/3}: gap(5)/gap(3) <= (3/5)^6 and gap(5) <= 1e-4."""
    gaps = {}
    for R in (3, 5):
        with mp.workdps(32 + GUARD):
            y = R * mpmath.expj(mp.pi / 3)
        gaps[R] = kontsevich.assignment_gap(0, [y], [0], [1])
    ratio = gaps[5] / gaps[3]
    ok = ratio <= mpmath.mpf(3 / 5) ** 6 and gaps[5] <= 1e-4
    return Check(6, "assignment independence", ok,
                 f"gap(3) = {_f(gaps[3])}, gap(5) = {_f(gaps[5])}, ratio {_f(ratio)} (<= {0.6 ** 6:.3g})",
                 data={"gap3": float(gaps[3]), "gap5": float(gaps[5])})


@_timed
def criterion_7(seed: int = 11) -> Check:
    """Exact P_1, P_2; Saff-Varga bounds for r <= 20; remainder identity and bound at 50 points."""
    exact = pade.pade_poly(1).coeffs == (2, -1) and pade.pade_poly(2).coeffs == (12, -6, 1)
    bounds_ok = True
    for r in range(1, 21):
        for row in pade.bound_report(r, pade.pade_zeros(r).zeros):
            bounds_ok &= row["annulus"] and row["real_part"]
    rng = random.Random(seed)
    worst_rel = mpmath.mpf(0)
    bound_ok = True
    for _ in range(50):
        r = rng.randint(1, 10)
        rad, ang = 5 * rng.random(), rng.uniform(-math.pi / 3, math.pi / 3)
        z = mpmath.mpf(rad) * mpmath.expj(ang)
        rem = pade.pade_remainder(r, z)
        if rem.direct != 0:
            worst_rel = max(worst_rel, abs(rem.direct - rem.integral) / abs(rem.direct))
        bound_ok &= abs(rem.direct) <= rem.bound
    ok = exact and bounds_ok and worst_rel <= 1e-15 and bound_ok
    return Check(7, "Pade", ok,
                 f"exact={exact}, zero bounds={bounds_ok}, remainder rel diff {_f(worst_rel)} (<= 1e-15), bound holds={bound_ok}",
                 data={"remainder_rel": float(worst_rel)})


@_timed
def criterion_8() -> Check:
    """L_2, L_3 exact; recursion identity n <= 7; weight 2n for n <= 8."""
    u = DiffPolynomial.u
    L2 = Fraction(1, 8) * (u(2) + 3 * u(0) * u(0))
    L3 = Fraction(1, 32) * (u(4) + 10 * u(0) * u(2) + 5 * u(1) * u(1) + 10 * u(0) * u(0) * u(0))
    examples = lenard.lenard(2) == L2 and lenard.lenard(3) == L3
    recursion = all((lenard.apply_dx(lenard.lenard(n + 1)) - lenard.apply_recursion_operator(lenard.lenard(n))).is_zero()
                    for n in range(8))
    homogeneous = all(lenard.lenard(n).weights() == {2 * n} for n in range(9))
    ok = examples and recursion and homogeneous
    return Check(8, "Lenard exactness", ok, f"examples={examples}, recursion={recursion}, homogeneity={homogeneous}")


@_timed
def criterion_9(labels=(1, 0, -1), t=0.25, rs=(2, 4, 6), grid=(-1.0, 0.0, 1.0)) -> Check:
    """ode_residual for N = 2, t = 0.25 drops by >= 5 from r = 2 to 4 and from 4 to 6, within 10 min."""
    t0 = time.perf_counter()
    table = {}
    for r in rs:
        cfg = painleve.build_config(2, r, t, *labels)
        table[r] = painleve.ode_residual(cfg, grid, digits=32).residuals
    elapsed = time.perf_counter() - t0
    factors = []
    for a, b in zip(rs, rs[1:]):
        factors.append([float(table[a][i] / table[b][i]) for i in range(len(grid))])
    ok = all(f >= 5 for row in factors for f in row) and elapsed <= 600
    rows = "; ".join(f"r={r}: " + ", ".join(_f(v) for v in table[r]) for r in rs)
    fac = "; ".join(", ".join(f"{f:.3g}" for f in row) for row in factors)
    return Check(9, "hierarchy convergence", ok,
                 f"labels {labels}, residuals at x={list(grid)}: {rows}; decrease factors {fac} (>= 5); {elapsed:.0f}s (<= 600s)",
                 data={"residuals": {r: [float(v) for v in table[r]] for r in rs}, "factors": factors})


@_timed
def criterion_10(labels_a=(1, 0, -1), labels_b=(1, 0, 0), r=2) -> Check:
    """N = 3 Stokes closeness: gap(t=0.2) <= 1e-2 gap(t=0.4)."""
    g = {t: painleve.stokes_gap(3, r, t, labels_a, labels_b) for t in (0.2, 0.4)}
    ratio = g[0.2] / g[0.4]
    return Check(10, "Stokes closeness", ratio <= 1e-2,
                 f"{labels_a} vs {labels_b}: gap(0.2) = {_f(g[0.2])}, gap(0.4) = {_f(g[0.4])}, ratio {_f(ratio)} (<= 1e-2)",
                 data={"gap_02": float(g[0.2]), "gap_04": float(g[0.4])})


@_timed
def criterion_11(t=0.25) -> Check:
    """d_n vs Pade ratio at 10 points of the J0 window for N = 2, r = 4."""
    cfg = painleve.build_config(2, 4, t, 1, 0, -1)
    lam, mu = cfg.zeros_and_poles()
    worst = mpmath.mpf(0)
    half = math.pi / 5
    for i in range(10):
        with mp.workdps(32 + GUARD):
            ang = -half + (i + 0.5) * 2 * half / 10
            L = mpmath.mpf(0.5 + 0.25 * i) * mpmath.expj(ang * 0.95)
            z = 2 * cfg.t * mpmath.sqrt(L) ** 5
        d = kontsevich.dn_eval(L, lam, mu)
        p = pade.pade_ratio(4, z)
        worst = max(worst, abs(d - p))
    return Check(11, "d_n / Pade cross-validation", worst <= 1e-24, f"max |d_n - ratio| = {_f(worst)} (<= 1e-24)",
                 data={"max_abs": float(worst)})


ALL = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
       criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(select=None) -> list:
    out = []
    for fn in ALL:
        n = int(fn.__name__.split("_")[1])
        if select and n not in select:
            continue
        out.append(fn())
    return out
