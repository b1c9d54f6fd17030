import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heislorentz import oracle
from heislorentz.errors import InvalidParameter, NotAdmissible, NotCausal
from heislorentz.family_two import (PiecewiseControl, abnormal2, admissible_t2, chart2, compose,
                                    conjugate_scan, exp2, first_conjugate_time2,
                                    first_conjugate_time2_exact, first_zero_f, hamiltonian2,
                                    jacobian2, periodic_plan, pmp_surface2, reach_plan,
                                    vertical_flow2)
from heislorentz.group import Family, dynamics, lorentz_form

GOLDEN_EXP2 = np.array([0.7613016617557853, -0.7404887492113663, 1.3854689024958802])


def test_exp2_examples():
    for eps in (0.3, 1.0, 2.0):
        for phi in (0.0, 2.0):
            assert np.allclose(exp2(eps, 0.0, phi, 1.7), [0, 0, eps * 1.7], atol=1e-14)
    assert np.allclose(exp2(1.0, 0.0, 0.0, 2 * math.pi), [0, 0, 2 * math.pi], atol=1e-14)
    assert np.max(np.abs(exp2(1.0, 1.0, 0.0, 1.0) - GOLDEN_EXP2)) <= 1e-8


def test_energy_level_chart2():
    th, ph = np.meshgrid(np.linspace(-3, 3, 41), np.linspace(0, 2 * np.pi, 17))
    for eps in (0.25, 1.0, 3.0):
        h = chart2(eps, th, ph)
        lhs = h[..., 0] ** 2 + h[..., 1] ** 2 - eps**2 * h[..., 2] ** 2
        assert np.max(np.abs(lhs + 1)) <= 1e-12 * math.cosh(3) ** 2
        assert np.max(np.abs(hamiltonian2(eps, h) + 0.5)) <= 1e-12 * math.cosh(3) ** 2


@pytest.mark.parametrize("eps", [0.5, 1.0, 2.0])
def test_exp2_matches_oracle(eps):
    rng = np.random.default_rng(int(eps * 100))
    th, ph, t = rng.uniform(-3, 3, 200), rng.uniform(0, 2 * np.pi, 200), rng.uniform(1e-3, 5, 200)
    end, cov = oracle.extremal_endpoint(Family.TWO, eps, chart2(eps, th, ph), t)
    q = exp2(eps, th, ph, t)
    err = np.max(np.abs(end - q), axis=-1) / np.maximum(1.0, np.max(np.abs(q), axis=-1))
    assert np.max(err) <= 1e-8
    drift = np.abs(hamiltonian2(eps, cov) + 0.5) / np.maximum(1.0, np.sum(cov * cov, axis=-1))
    assert np.max(drift) <= 1e-10


def test_vertical_flow2_rotation():
    h0 = chart2(1.0, 1.0, 0.3)
    h = vertical_flow2(1.0, h0, 2.0)
    assert abs(np.hypot(h[0], h[1]) - math.sinh(1.0)) < 1e-14
    _, cov = oracle.extremal_endpoint(Family.TWO, 1.0, h0, 2.0)
    assert np.max(np.abs(cov - h)) <= 1e-10


def abnormal_control(eps, beta, t):
    h = vertical_flow2(eps, np.array([math.cos(beta), math.sin(beta), -1.0 / eps]), t)
    return np.array([h[0], h[1], 1.0])


def test_abnormal2():
    assert np.array_equal(abnormal2(1.0, 0.7, 0.0), [0, 0, 0])
    q = abnormal2(1.0, 0.0, math.pi)  # tau = -pi
    assert abs(q[2] - math.pi / 2) < 1e-14
    h0 = np.array([1.0, 0.0, -1.0])
    end, _ = oracle.extremal_endpoint(Family.TWO, 1.0, h0, math.pi)
    assert np.max(np.abs(end - q)) <= 1e-9


@settings(max_examples=50)
@given(st.floats(0, 2 * math.pi), st.floats(0, 6), st.floats(0.2, 3))
def test_abnormal2_is_lightlike(beta, t, eps):
    q = abnormal2(eps, beta, t)
    u = abnormal_control(eps, beta, t)
    v = dynamics(q, u, eps)
    assert abs(lorentz_form(v, q, eps, Family.TWO)) <= 1e-10
    # the velocity of the closed form is the velocity generated by the control
    d = 1e-5
    fd = (abnormal2(eps, beta, t + d) - abnormal2(eps, beta, t - d)) / (2 * d)
    assert np.max(np.abs(fd - v)) <= 1e-7 * max(1.0, float(np.max(np.abs(q))))


def test_pmp_surface2():
    angles = np.linspace(0, 2 * np.pi, 9)
    h3 = -np.array([1.0, 1.5, 3.0, 6.0])
    s = pmp_surface2(1.0, angles, h3)
    assert s.shape == (9, 4)
    assert np.max(np.abs(s.points[:, 0, :2])) == 0.0  # eps*h3 = -1 sits on the z-axis
    rho = np.sqrt(h3**2 - 1)
    for i, a in enumerate(angles):
        h0 = np.stack([rho * math.cos(a), rho * math.sin(a), h3], axis=-1)
        end, _ = oracle.extremal_endpoint(Family.TWO, 1.0, h0, 1.0)
        assert np.max(np.abs(end - s.points[i])) <= 1e-8
    with pytest.raises(InvalidParameter):
        pmp_surface2(1.0, angles, [-0.5])


def test_jacobian2_examples():
    J, f = jacobian2(1.0, 0.0, math.pi)
    assert f == 4.0 and J == 0.0
    J, f = jacobian2(1.0, 1.0, math.pi / 2)
    assert abs(f - (2 / math.cosh(1) ** 2 + math.pi / 2 * math.tanh(1) ** 2)) < 1e-14
    assert f > 0 and J < 0
    J, f = jacobian2(1.0, 1.0, 2 * math.pi)
    assert abs(f) < 1e-12 and abs(J) < 1e-12


def test_jacobian2_matches_fd():
    # the printed J is the Cartesian fd determinant times -eps sinh(theta):
    # (h1, h2) -> (theta, phi) has determinant sinh cosh, and d/dt = h3 d/dtau
    rng = np.random.default_rng(2)
    for _ in range(10):
        eps, theta, phi, t = rng.uniform(0.4, 2), rng.uniform(0.2, 2), rng.uniform(0, 6), rng.uniform(0.1, 4)
        tau = -math.cosh(theta) * t / eps
        fd = oracle.fd_jacobian(Family.TWO, eps, chart2(eps, theta, phi), t, endpoint="closed")
        J, _ = jacobian2(eps, theta, tau)
        assert abs(J + fd * eps * math.sinh(theta)) <= 1e-6 * abs(J) + 1e-12


def test_first_conjugate_time2():
    assert first_conjugate_time2(1.0, 0.0) == 2 * math.pi
    for eps in (0.5, 1.0, 3.0):
        t = first_conjugate_time2(eps, 0.0)
        assert abs(t - 2 * math.pi * eps) < 1e-14
        assert np.allclose(exp2(eps, 0.0, 1.0, t), [0, 0, 2 * math.pi * eps**2], atol=1e-12)
    assert abs(first_conjugate_time2(1.0, 1.0) - 2 * math.pi / math.cosh(1)) < 1e-15


def test_f_positive_up_to_pi():
    th, tau = np.meshgrid(np.linspace(0.01, 3, 60), np.linspace(1e-3, math.pi, 60))
    _, f = jacobian2(1.0, th, tau)
    assert np.all(f > 0)


def test_first_zero_f():
    assert first_zero_f(0.0) == 2 * math.pi
    for theta in (0.3, 1.0, 2.5):
        s = first_zero_f(theta)
        assert math.pi < s < 2 * math.pi
        _, f = jacobian2(1.0, theta, s)
        assert abs(f) < 1e-12
    assert abs(first_zero_f(1.0) - 3.8595) < 1e-4


def test_conjugate_scan_theta_zero():
    taus = np.linspace(0.05, 13.0, 1200)
    for eps in (0.5, 1.0):
        (rep,) = conjugate_scan(eps, [0.0], taus)
        assert rep.predicted == [(1, 2 * math.pi * eps**2), (2, 4 * math.pi * eps**2)]
        dtau = taus[1] - taus[0]
        assert len(rep.tau_zeros) == 2
        assert abs(rep.tau_zeros[0] - 2 * math.pi) <= dtau
        assert abs(rep.tau_zeros[1] - 4 * math.pi) <= dtau
        assert rep.agrees_with_prediction


def test_conjugate_scan_theta_positive_disagrees_with_claim():
    # the first zero moves into (pi, 2 pi) and lands off the z = 2 pi n eps**2 line
    taus = np.linspace(0.05, 2 * math.pi - 0.05, 600)
    reps = conjugate_scan(1.0, [1.0, 2.0, 3.0], taus)
    for rep in reps:
        assert len(rep.tau_zeros) == 1 and len(rep.f_zeros) == 1
        assert math.pi < rep.tau_zeros[0] < 2 * math.pi
        assert abs(rep.tau_zeros[0] - first_zero_f(rep.theta)) <= taus[1] - taus[0]
        assert abs(rep.tau_zeros[0] - rep.f_zeros[0]) <= taus[1] - taus[0]
        assert rep.predicted == [] and not rep.agrees_with_prediction
        assert abs(rep.z_at_zeros[0] - 2 * math.pi) > 0.5


def test_conjugate_time_exact_ode():
    eps, theta = 1.0, 1.0
    t_star = first_conjugate_time2_exact(eps, theta)
    h0 = chart2(eps, theta, 0.4)
    ts = t_star + np.array([-1e-2, 1e-2])
    fd = oracle.fd_jacobian(Family.TWO, eps, np.broadcast_to(h0, (2, 3)), ts, h_step=1e-4)
    assert fd[0] * fd[1] < 0


def test_periodic_plan_default():
    p = periodic_plan(1.0, 6, 15)
    assert np.array_equal(p.waypoints[0], [6, 0, 6])
    assert np.array_equal(p.waypoints[1], [6, -9, -12])
    assert np.array_equal(p.third_control, [-6, 9, 12])
    assert p.t3 == 16 and p.closure_residual <= 1e-9
    assert abs(p.lorentz_length - math.sqrt(27)) <= 1e-12
    traj = oracle.integrate_control(1.0, [0, 0, 0], p.control)
    assert np.max(np.abs(traj.endpoint)) <= 1e-9
    assert np.max(np.abs(oracle.chord_endpoint(1.0, [0, 0, 0], p.control))) <= 1e-9


def test_periodic_plan_segments_causal_type():
    for eps in (0.5, 1.0, 2.0):
        p = periodic_plan(eps)
        traj = oracle.integrate_control(eps, [0, 0, 0], p.control, steps_per_segment=50)
        n = 50
        u = traj.controls[:, 0]
        v = dynamics(traj.points[:-1], u, eps)
        g = lorentz_form(v, traj.points[:-1], eps, Family.TWO)
        assert np.max(np.abs(g[: 2 * n])) <= 1e-12
        assert np.all(g[2 * n:] < 0)


def test_periodic_plan_not_admissible():
    with pytest.raises(NotAdmissible):
        periodic_plan(1.0, 3, 15)
    with pytest.raises(NotAdmissible):
        periodic_plan(1.0, 3, 1e6)
    with pytest.raises(NotAdmissible):
        periodic_plan(1.0, 3.99, 1e8)
    with pytest.raises(NotAdmissible):
        admissible_t2(1.0, 4.0)


def test_periodic_plan_scaled_eps():
    eps = 0.5
    t1 = 6 * eps
    t2 = admissible_t2(eps, t1)
    assert abs(t2 - 15 * eps) < 1e-12
    p = periodic_plan(eps, t1, t2)
    assert p.closure_residual <= 1e-9
    end = oracle.integrate_control(eps, [0, 0, 0], p.control).endpoint
    assert np.max(np.abs(end)) <= 1e-9
    # the boundary root itself is not strictly admissible, anything past it is
    with pytest.raises(NotAdmissible):
        periodic_plan(eps, t1, admissible_t2(eps, t1, margin=1.0 + 1e-15) - 1e-9)
    periodic_plan(eps, t1, admissible_t2(eps, t1, margin=1.001))


@pytest.mark.parametrize("k", [1, 2, 5, 10])
def test_periodic_lengths_unbounded(k):
    p = periodic_plan(1.0)
    loop = p.control.repeat(k)
    traj = oracle.integrate_control(1.0, [0, 0, 0], loop, steps_per_segment=20)
    assert np.max(np.abs(traj.endpoint)) <= 1e-8
    assert abs(oracle.length_functional(traj, 1.0, Family.TWO) - k * math.sqrt(27)) <= 1e-10 * k


def test_piecewise_control_validation():
    with pytest.raises(NotCausal):
        PiecewiseControl([(np.array([1.0, 0.0, 0.5]), 1.0)])
    with pytest.raises(InvalidParameter):
        PiecewiseControl([(np.array([0.0, 0.0, 1.0]), 0.0)])


def test_reach_plan_examples():
    for eps in (0.5, 1.0):
        plan = reach_plan(eps, [0, 0, eps])
        assert len(plan.segments) == 1
        u, d = plan.segments[0]
        assert np.allclose(u, [0, 0, 1]) and d == 1.0
    plan = reach_plan(1.0, [1, 0, 2])
    (u, d), = plan.segments
    assert np.allclose(u, [1, 0, 2]) and d == 1.0
    plan = reach_plan(1.0, [0, 0, -1])
    assert len(plan.segments) == 3
    end = oracle.integrate_control(1.0, [0, 0, 0], plan).endpoint
    assert np.max(np.abs(end - [0, 0, -1])) <= 1e-8


coord = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(coord, coord, coord, st.sampled_from([0.1, 0.5, 1.0, 3.0]))
def test_reach_plan_hits_target(x, y, z, eps):
    q1 = np.array([x, y, z])
    plan = reach_plan(eps, q1)
    assert np.max(np.abs(compose(eps, plan) - q1)) <= 1e-8 * max(1.0, np.max(np.abs(q1)))
    end = oracle.integrate_control(eps, [0, 0, 0], plan, steps_per_segment=4).endpoint
    scale = max(1.0, max(d for _, d in plan.segments), float(np.max(np.abs(q1))))
    assert np.max(np.abs(end - q1)) <= 1e-8 * scale
