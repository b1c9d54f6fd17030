import math

import numpy as np
import pytest

from heislorentz import oracle
from heislorentz.errors import IllConditioned, InvalidParameter, NotCausal
from heislorentz.family_one import chart1, exp1, jacobian1
from heislorentz.family_two import PiecewiseControl, chart2, exp2, periodic_plan
from heislorentz.group import Family


class Plan:
    """Minimal stand-in: integrate_control only needs ``segments``."""

    def __init__(self, segments):
        self.segments = [(np.asarray(u, float), d) for u, d in segments]


def test_integrate_extremal_examples():
    traj = oracle.integrate_extremal(Family.ONE, 1.0, [-1, 0, 0], 2.0)
    assert np.max(np.abs(traj.endpoint - [2, 0, 0])) <= 1e-10
    assert traj.times.shape == (2001,) and traj.points.shape == (2001, 3)
    assert np.all(np.diff(traj.times) > 0) and traj.times[0] == 0
    for eps in (0.5, 1.0, 2.0):
        end, _ = oracle.extremal_endpoint(Family.TWO, eps, [0, 0, -1 / eps], 3.0)
        assert np.max(np.abs(end - [0, 0, eps * 3.0])) <= 1e-9


def test_integrate_extremal_random_golden():
    rng = np.random.default_rng(4)
    th, ph, t = rng.uniform(-1, 1, 20), rng.uniform(0, 2 * np.pi, 20), rng.uniform(0.1, 4, 20)
    end, _ = oracle.extremal_endpoint(Family.ONE, 1.0, chart1(1.0, th, ph), t)
    assert np.max(np.abs(end - exp1(1.0, th, ph, t))) <= 1e-8
    end, _ = oracle.extremal_endpoint(Family.TWO, 1.0, chart2(1.0, th, ph), t)
    assert np.max(np.abs(end - exp2(1.0, th, ph, t))) <= 1e-8


@pytest.mark.parametrize("family", [Family.ONE, Family.TWO])
def test_hamiltonian_conservation(family):
    rng = np.random.default_rng(8)
    chart = chart1 if family is Family.ONE else chart2
    h0 = chart(1.0, rng.uniform(-1, 1, 50), rng.uniform(0, 2 * np.pi, 50))
    t = rng.uniform(0.1, 5, 50)
    _, cov = oracle.extremal_endpoint(family, 1.0, h0, t)
    assert np.max(np.abs(oracle.hamiltonian(family, 1.0, cov) + 0.5)) <= 1e-10


@pytest.mark.parametrize("family", [Family.ONE, Family.TWO])
def test_rk4_order(family):
    rng = np.random.default_rng(12)
    chart, ex = (chart1, exp1) if family is Family.ONE else (chart2, exp2)
    # keep |tau| away from 0 so the coarse error is far above rounding
    th = rng.choice([-1, 1], 10) * rng.uniform(0.3, 1, 10)
    ph, t = rng.uniform(0.3, math.pi - 0.3, 10), rng.uniform(1, 3, 10)
    h0 = chart(1.0, th, ph)
    exact = ex(1.0, th, ph, t)
    errs = []
    for steps in (20, 40):
        end, _ = oracle.extremal_endpoint(family, 1.0, h0, t, steps=steps)
        errs.append(np.max(np.abs(end - exact), axis=-1))
    ratio = errs[0] / errs[1]
    assert np.all(errs[1] > 1e-12)  # above the rounding floor, so the ratio means something
    assert np.all((ratio > 12) & (ratio < 20)), ratio


def test_integrate_control_examples():
    for eps in (0.5, 1.0):
        traj = oracle.integrate_control(eps, [0, 0, 0], Plan([([0, 0, 1], 1.0)]))
        assert np.max(np.abs(traj.endpoint - [0, 0, eps])) <= 1e-12
        traj = oracle.integrate_control(eps, [0, 0, 0], Plan([([1, 0, 1], 6.0)]))
        assert np.max(np.abs(traj.endpoint - [6, 0, 6 * eps])) <= 1e-12
    traj = oracle.integrate_control(1.0, [0, 0, 0], periodic_plan(1.0, 6, 15).control)
    assert np.max(np.abs(traj.endpoint)) <= 1e-9
    with pytest.raises(InvalidParameter):
        oracle.integrate_control(1.0, [0, 0, 0], Plan([]))


def test_constant_control_equals_chord():
    rng = np.random.default_rng(1)
    for _ in range(20):
        start = rng.uniform(-5, 5, 3)
        u = rng.uniform(-2, 2, 3)
        d = rng.uniform(0.1, 3)
        plan = Plan([(u, d)])
        a = oracle.integrate_control(0.7, start, plan, steps_per_segment=7).endpoint
        b = oracle.chord_endpoint(0.7, start, plan)
        assert np.max(np.abs(a - b)) <= 1e-10


def test_length_functional_examples():
    p = periodic_plan(1.0, 6, 15)
    lightlike = PiecewiseControl(p.control.segments[:2])
    traj = oracle.integrate_control(1.0, [0, 0, 0], lightlike, steps_per_segment=10)
    assert abs(oracle.length_functional(traj, 1.0, Family.TWO)) <= 1e-12
    traj = oracle.integrate_control(1.0, [0, 0, 0], Plan([([-6, 9, 12], 1.0)]), steps_per_segment=10)
    assert abs(oracle.length_functional(traj, 1.0, Family.TWO) - math.sqrt(27)) <= 1e-12
    traj = oracle.integrate_control(1.0, [0, 0, 0], Plan([([1, 0, 0], 2.5)]), steps_per_segment=10)
    assert abs(oracle.length_functional(traj, 1.0, Family.ONE) - 2.5) <= 1e-12
    with pytest.raises(NotCausal):
        oracle.length_functional(traj, 1.0, Family.TWO)


def test_extremal_length_is_arclength():
    rng = np.random.default_rng(17)
    for family, chart in ((Family.ONE, chart1), (Family.TWO, chart2)):
        th, ph, t = rng.uniform(-1, 1, 5), rng.uniform(0, 2 * np.pi, 5), rng.uniform(0.5, 4, 5)
        traj = oracle.integrate_extremal(family, 1.0, chart(1.0, th, ph), t)
        assert np.max(np.abs(oracle.length_functional(traj, 1.0, family) - t)) <= 1e-6


def test_fd_jacobian_matches_jacobian1():
    rng = np.random.default_rng(6)
    th, ph = rng.uniform(0.2, 2, 40), rng.uniform(0.2, math.pi - 0.2, 40)
    t = rng.uniform(0.2, 3, 40)
    tau = np.sinh(th) * np.sin(ph) * t
    J = jacobian1(1.0, th, ph, t)
    h0 = chart1(1.0, th, ph)
    factor = oracle.chart_factor(Family.ONE, 1.0, th)
    # at h = 1e-5 the RK4 rounding noise (which grows like e^|tau|) divided by h
    # is the limiting error, so the default step is certified for |tau| <= 4
    ok = tau <= 4
    fd = oracle.fd_jacobian(Family.ONE, 1.0, h0[ok], t[ok]) * factor[ok]
    assert np.max(np.abs(J[ok] - fd) / np.abs(fd)) <= 1e-5
    # a larger step stretches the certified range to |tau| <= 6; near tau = 8 the
    # determinant cancels so strongly that no step reaches 1e-5 in double precision
    ok = tau <= 6
    fd = oracle.fd_jacobian(Family.ONE, 1.0, h0[ok], t[ok], h_step=1e-4) * factor[ok]
    assert np.max(np.abs(J[ok] - fd) / np.abs(fd)) <= 1e-5


def test_fd_step_study():
    h0 = chart1(1.0, 1.0, 1.0)
    J = jacobian1(1.0, 1.0, 1.0, 1.0)
    factor = oracle.chart_factor(Family.ONE, 1.0, 1.0)
    errs = {}
    for h in (1e-4, 1e-5, 1e-6):
        fd = oracle.fd_jacobian(Family.ONE, 1.0, h0, 1.0, h_step=h, endpoint="closed") * factor
        errs[h] = abs(fd - J) / abs(J)
    assert all(e <= 1e-5 for e in errs.values())
    # plateau at large steps, rounding noise grows as h shrinks
    assert errs[1e-6] > errs[1e-4]
    with pytest.raises(IllConditioned):
        oracle.fd_jacobian(Family.ONE, 1.0, h0, 1.0, h_step=1e-10, endpoint="closed")


def test_fd_jacobian_theta_zero_family_two():
    # along theta = 0 the Cartesian Jacobian touches zero at t = 2 pi eps
    for eps in (0.5, 1.0):
        h0 = chart2(eps, 0.0, 0.0)
        t0 = 2 * math.pi * eps
        ts = t0 + np.array([-0.1, -0.01, 0.0, 0.01, 0.1])
        fd = oracle.fd_jacobian(Family.TWO, eps, np.broadcast_to(h0, (5, 3)), ts)
        assert abs(fd[2]) < 1e-6 * abs(fd[0])
        assert np.all(fd[[0, 1, 3, 4]] * fd[0] > 0)  # same sign on both sides: a double zero
        assert abs(fd[1]) < abs(fd[0]) and abs(fd[3]) < abs(fd[4])


def test_fd_jacobian_rejects_off_level():
    with pytest.raises(InvalidParameter):
        oracle.fd_jacobian(Family.ONE, 1.0, [-2.0, 0, 0], 1.0)
    with pytest.raises(InvalidParameter):
        oracle.fd_jacobian(Family.ONE, 1.0, [-1.0, 0, 0], 0.0)
