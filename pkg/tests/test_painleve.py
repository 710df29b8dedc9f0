import mpmath
import pytest
from mpmath import mp

from airytau.errors import InfeasibleBinning, SectorViolation, StepTooSmall, ValidationError
from airytau.lenard import eval_diffpoly, lenard
from airytau.painleve import (build_config, config_from_assignment, config_gap, consecutive_binnings,
                              fd_weights, feasible_binnings, general_residual, group_points,
                              ode_residual, stokes_gap, u_from_logZ)
from fractions import Fraction


def test_group_points_r1():
    g = group_points(2, 1, mpmath.mpf(1) / 2)
    with mp.workdps(40):
        base = mpmath.power(2, mpmath.mpf(1) / 5)
        for kappa, (y,) in g.items():
            assert abs(y - base * mpmath.expj(2 * mp.pi * kappa / 5)) < 1e-30
    assert sum(len(v) for v in g.values()) == 5


def test_group_points_are_pade_roots():
    N, r, t = 2, 3, mpmath.mpf("0.25")
    g = group_points(N, r, t)
    from airytau.pade import pade_poly
    p = pade_poly(r)
    with mp.workdps(44):
        for pts in g.values():
            for y in pts:
                z = 2 * t * y ** (2 * N + 1)
                assert abs(p(z)) <= mpmath.mpf(10) ** -25 * p.polynomial().scale(z)


def test_build_config_labels():
    cfg = build_config(2, 1, 0.5, 1, 0, -1)
    a = dict(cfg.assignment)
    assert a[0] == a[1] == a[-1] == 0
    assert a[2] == 1 and a[-2] == 2
    assert cfg.n == 5
    assert cfg.partition(0).n == 5


def test_build_config_rejects_equal_extremes():
    with pytest.raises(InfeasibleBinning):
        build_config(2, 2, 0.25, 0, 0, 0)
    with pytest.raises(InfeasibleBinning):
        build_config(2, 2, 0.25, 1, 2, 0)


def test_config_from_assignment_checks_sectors():
    with pytest.raises(SectorViolation):
        config_from_assignment(1, 1, 0.25, {-1: 0, 0: 0, 1: 0})
    with pytest.raises(ValidationError):
        config_from_assignment(1, 1, 0.25, {0: 0})


def test_t_validation():
    with pytest.raises(ValidationError):
        group_points(2, 2, 0)
    with pytest.raises(ValidationError):
        group_points(2, 2, mpmath.mpc(0, 1))


def test_binning_enumeration():
    assert len(consecutive_binnings(2)) >= 4
    labels = {lab for _, lab in feasible_binnings(2, 4, 0.25)}
    assert {(1, 0, 0), (1, 0, -1), (0, 0, 0), (0, 0, -1)} <= labels
    for a, _ in feasible_binnings(3, 2, 0.25):
        assert a[0] == 0


def test_fd_weights_exact():
    assert fd_weights(2, (-1, 0, 1)) == (Fraction(1), Fraction(-2), Fraction(1))
    w = fd_weights(1, (-2, -1, 0, 1, 2))
    assert w == (Fraction(1, 12), Fraction(-2, 3), Fraction(0), Fraction(2, 3), Fraction(-1, 12))


def test_u_small_t_is_pole_free():
    cfg = build_config(2, 4, 0.25, 1, 0, -1)
    jet = u_from_logZ(cfg, 0, method="taylor", m=0)
    assert abs(jet.values[0]) < 10


def test_fd_step_halving_consistent():
    cfg = config_from_assignment(2, 2, 0.25, {-2: 2, -1: 2, 0: 0, 1: 1, 2: 1})
    a = u_from_logZ(cfg, 0.1, h=2.0 ** -5, m=1)
    b = u_from_logZ(cfg, 0.1, h=2.0 ** -6, m=1)
    assert abs(a.values[0] - b.values[0]) < 1e-9
    assert all(e < 1e-8 for e in b.fd_error)


def test_fd_matches_taylor():
    cfg = config_from_assignment(2, 2, 0.25, {-2: 2, -1: 2, 0: 0, 1: 1, 2: 1})
    fd = u_from_logZ(cfg, 0.2, m=2)
    ex = u_from_logZ(cfg, 0.2, m=2, method="taylor")
    for a, b, e in zip(fd.values, ex.values, fd.fd_error):
        assert abs(a - b) <= max(10 * e, 1e-20)


def test_u_x_consistent_with_u():
    cfg = config_from_assignment(2, 2, 0.25, {-2: 2, -1: 2, 0: 0, 1: 1, 2: 1})
    h = mpmath.mpf(2) ** -10
    up = u_from_logZ(cfg, h, m=0, method="taylor").values[0]
    um = u_from_logZ(cfg, -h, m=0, method="taylor").values[0]
    ux = u_from_logZ(cfg, 0, m=1, method="taylor").values[1]
    assert abs((up - um) / (2 * h) - ux) < 1e-5


def test_step_too_small():
    cfg = build_config(2, 1, 0.25, 1, 0, -1)
    with pytest.raises(StepTooSmall):
        u_from_logZ(cfg, 0, h=1e-30)


def test_n1_residual_small():
    # N = 1: u = -x/(1 + 3t/2) exactly; r = 2 already reproduces it closely
    cfg = config_from_assignment(1, 2, 0.25, {-1: 2, 0: 0, 1: 1})
    rep = ode_residual(cfg, [-0.5, 0.0, 0.5], method="taylor")
    assert max(rep.residuals) < 1e-3
    with mp.workdps(40):
        assert abs(rep.u_values[2] + mpmath.mpf(0.5) / (1 + mpmath.mpf(3) / 8)) < 1e-3


def test_general_residual_identities():
    assert general_residual([0, 0], [1, 2, 3, 4, 5], 0.7) == pytest.approx(0.7)
    x = mpmath.mpf("0.3")
    assert general_residual([mpmath.mpf(2) / 3], [-x], x) == 0
    u = [mpmath.mpf("0.4"), mpmath.mpf("0.1"), mpmath.mpf("-0.2")]
    t = mpmath.mpf("0.25")
    lhs = general_residual([mpmath.mpf(2) / 3, t], u, x)
    rhs = abs(5 * t * eval_diffpoly(lenard(2), u) + u[0] + x)
    assert abs(lhs - rhs) < 1e-14


def test_stokes_gap_identical():
    assert stokes_gap(2, 2, 0.25, (1, 0, -1), (1, 0, -1)) == 0


def test_stokes_gap_finite():
    g = stokes_gap(2, 2, 0.3, (1, 0, -1), (1, 0, 0))
    assert 0 < g < 10


def test_ray_labels_n2():
    assert config_from_assignment(2, 4, 0.25, {-2: 2, -1: 2, 0: 0, 1: 1, 2: 1}).ray_labels == (0, 0, 0)
    assert build_config(2, 4, 0.25, 1, 0, -1).ray_labels is None


def test_zeros_and_poles_split():
    cfg = build_config(2, 2, 0.25, 1, 0, -1)
    lam, mu = cfg.zeros_and_poles()
    assert len(lam) + len(mu) == cfg.n


@pytest.mark.slow
def test_admissible_n2_converges_in_r():
    res = {}
    for r in (2, 6):
        cfg = config_from_assignment(2, r, 0.25, {-2: 2, -1: 2, 0: 0, 1: 1, 2: 1})
        res[r] = ode_residual(cfg, [0.0, 0.5], method="taylor").residuals
    for a, b in zip(res[2], res[6]):
        assert b < a / 10


@pytest.mark.slow
def test_admissible_n3_converges_in_r():
    res = {}
    for r in (2, 4):
        cfg = build_config(3, r, 0.05, 1, 0, -1)
        res[r] = ode_residual(cfg, [0.0], method="taylor").residuals[0]
    assert res[4] < res[2] / 5
