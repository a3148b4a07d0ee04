"""Spin tensor identities, dipole energies, angular momentum conservation."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zsim.constants import H_STAR, HBAR, MASS, OMEGA0, Q_ELECTRON, T0
from zsim.dynamics import free_motion, matched_initial_states
from zsim.emfield import CoulombField, FreeField, UniformEB, force_at
from zsim.spinstates import axis_vector
from zsim.spintensor import (
    accel_spin_tensor,
    angular_momentum,
    build_spin_tensor,
    decompose,
    energy_diagnostics,
    identity_suite,
    interaction_energy,
    scalar_invariant,
    spin_vectors_direct,
    torque_tensor,
    triad_residuals,
)
from zsim.states import PositionState

theta_st = st.floats(min_value=0.0, max_value=np.pi, allow_nan=False)
phi_st = st.floats(min_value=-np.pi, max_value=np.pi, allow_nan=False)
speed_st = st.floats(min_value=-0.8, max_value=0.8, allow_nan=False)


def test_rest_spin_up_components():
    """Spin-up at rest: s = (0, 0, 1/2) and d = (0, -1/2, 0) at tau = 0."""
    state = matched_initial_states(0.0)["position"]
    assert np.allclose(state.u, [1.0, 1.0, 0.0, 0.0], atol=1e-15)
    assert np.allclose(state.z, [0.0, 0.0, -0.5, 0.0], atol=1e-15)
    s, d = decompose(build_spin_tensor(state.z, state.u))
    assert np.allclose(s, [0.0, 0.0, 0.5], atol=1e-15), f"s = {s}"
    assert np.allclose(d, [0.0, -0.5, 0.0], atol=1e-15), f"d = {d}"


def test_rest_spin_vector_follows_axis():
    """At rest the spin three-vector is (hbar / 2) times the chosen axis."""
    theta, phi = np.pi / 3, 0.4
    state = matched_initial_states(theta, phi)["position"]
    s, _ = decompose(build_spin_tensor(state.z, state.u))
    assert np.allclose(s, H_STAR * axis_vector(theta, phi), atol=1e-14)
    assert np.linalg.norm(s) == pytest.approx(H_STAR, abs=1e-14)


def test_decompose_matches_direct_vectors():
    state = matched_initial_states(1.1, -0.7, velocity=np.array([0.3, 0.1, -0.2]))[
        "position"
    ]
    spin = build_spin_tensor(state.z, state.u)
    s_m, d_m = decompose(spin)
    s_d, d_d = spin_vectors_direct(state.z, state.u)
    assert np.allclose(s_m, s_d, atol=1e-15)
    assert np.allclose(d_m, d_d, atol=1e-15)


def test_acceleration_form_equals_wedge_form():
    """S = (m / w0^2)(udot ^ u) with udot = -w0^2 z equals -m (z ^ u)."""
    state = matched_initial_states(0.5, 1.3)["position"]
    udot = -(OMEGA0**2) * state.z
    assert np.allclose(
        accel_spin_tensor(state.u, udot),
        build_spin_tensor(state.z, state.u),
        atol=1e-14,
    )


@given(theta=theta_st, phi=phi_st, vx=speed_st, vy=speed_st)
@settings(max_examples=100, deadline=None)
def test_identity_suite_on_matched_states(theta, phi, vx, vy):
    """All contraction identities hold on constraint-satisfying states."""
    v = np.array([vx, vy, 0.0])
    n = np.linalg.norm(v)
    if n >= 0.95:
        v *= 0.9 / n
    state = matched_initial_states(theta, phi, velocity=v)["position"]
    res = identity_suite(state)
    for name, val in res.items():
        assert val < 1e-10, f"{name} residual {val} for theta={theta} v={v}"


def test_identity_suite_detects_scaled_velocity():
    """A 0.1% error in the spatial velocity breaks S u = 0 detectably."""
    state = matched_initial_states(np.pi / 3, 0.4)["position"]
    bad_u = state.u.copy()
    bad_u[1:] *= 1.001
    bad = PositionState(x=state.x, u=bad_u, y=state.y, pi=state.pi)
    res = identity_suite(bad)
    assert res["s_u"] > 1e-4, f"corruption went undetected: {res['s_u']}"


def test_scalar_invariant_forms():
    state = matched_initial_states(0.9, 2.2, velocity=np.array([0.5, 0.0, 0.0]))[
        "position"
    ]
    spin = build_spin_tensor(state.z, state.u)
    s, d = decompose(spin)
    assert scalar_invariant(spin) == pytest.approx(0.0, abs=1e-13)
    assert scalar_invariant(spin) == pytest.approx(
        2.0 * (np.dot(s, s) - np.dot(d, d)), abs=1e-13
    )


def test_triad_orthonormal_and_right_handed():
    state = matched_initial_states(2.0, -1.0, velocity=np.array([0.0, 0.6, 0.0]))[
        "position"
    ]
    spin = build_spin_tensor(state.z, state.u)
    res = triad_residuals(spin, state.u)
    for name, val in res.items():
        assert val < 1e-12, f"{name} residual {val}"


def test_interaction_energy_routes_agree():
    """Force contraction, tensor contraction, and dipole form all agree."""
    state = matched_initial_states(
        np.pi / 3, 0.4, velocity=np.array([0.3, -0.2, 0.1])
    )["position"]
    model = UniformEB(e0=np.array([2e-4, 0.0, -1e-4]), b0=np.array([0.0, 5e-4, 3e-4]))
    rep = interaction_energy(state, model, Q_ELECTRON)
    assert rep.phi_via_tensor == pytest.approx(rep.phi_via_force, abs=1e-12)
    assert rep.phi_via_vectors == pytest.approx(rep.phi_via_force, abs=1e-12)
    assert rep.u_magnetic + rep.u_electric == pytest.approx(rep.phi, abs=1e-15)


def test_magnetic_dipole_energy_aligned():
    """Electron spin aligned with B: U_m = (hbar / 2)(e / m) B, U_e = 0."""
    state = matched_initial_states(0.0)["position"]
    b = 1e-3
    rep = interaction_energy(state, UniformEB(b0=np.array([0.0, 0.0, b])), Q_ELECTRON)
    assert rep.u_magnetic == pytest.approx(H_STAR * b / MASS, rel=1e-12)
    assert rep.u_electric == pytest.approx(0.0, abs=1e-18)
    assert np.allclose(rep.magnetic_moment, [0.0, 0.0, Q_ELECTRON * H_STAR])


def test_magnetic_dipole_energy_anti_aligned():
    state = matched_initial_states(np.pi)["position"]
    b = 1e-3
    rep = interaction_energy(state, UniformEB(b0=np.array([0.0, 0.0, b])), Q_ELECTRON)
    assert rep.u_magnetic == pytest.approx(-H_STAR * b / MASS, rel=1e-12)


def test_energy_residual_zero_for_free_states():
    state = matched_initial_states(1.0, 0.5, velocity=np.array([0.4, 0.2, 0.0]))[
        "position"
    ]
    diag = energy_diagnostics(state, FreeField(), Q_ELECTRON)
    assert abs(diag["energy_residual"]) < 1e-12
    assert diag["gamma_implied"] == pytest.approx(diag["gamma_momentum"], rel=1e-12)


def test_moving_dipole_electric_term():
    """Averaged over a revolution, U_e reduces to the (E x P).s drift term.

    The instantaneous electric-dipole energy oscillates at the orbit
    frequency; its period mean is the motional term carried by the drift
    momentum, up to the small field variation across the orbit.
    """
    state0 = matched_initial_states(0.0, velocity=np.array([0.0, 0.05, 0.0]))[
        "position"
    ]
    model = CoulombField(z_charge=1.0, center=np.array([300.0, 0.0, 0.0]))
    taus = np.linspace(0.0, T0, 64, endpoint=False)
    xs, us, ys = free_motion(state0, taus)
    u_e, dominant = [], []
    for x, u, y in zip(xs, us, ys):
        st8 = PositionState(x=x, u=u, y=y, pi=state0.pi)
        diag = energy_diagnostics(st8, model, Q_ELECTRON)
        u_e.append(diag["u_electric_dominant"] + diag["u_electric_remainder"])
        dominant.append(diag["u_electric_dominant"])
    mean_ue, mean_dom = np.mean(u_e), np.mean(dominant)
    assert abs(mean_dom) > 1e-8, "test geometry degenerate"
    assert mean_ue == pytest.approx(mean_dom, rel=0.05), f"{mean_ue} vs {mean_dom}"


def test_angular_momentum_conserved_free():
    """J = x ^ pi + S is constant along free motion."""
    state0 = matched_initial_states(
        np.pi / 3, 0.4, velocity=np.array([0.6, 0.0, 0.0])
    )["position"]
    taus = np.linspace(0.0, 10 * T0, 101)
    xs, us, ys = free_motion(state0, taus)
    totals = []
    for x, u, y in zip(xs, us, ys):
        st8 = PositionState(x=x, u=u, y=y, pi=state0.pi)
        totals.append(angular_momentum(st8).total)
    totals = np.array(totals)
    drift = np.abs(totals - totals[0]).max()
    assert drift < 1e-12, f"angular momentum drift {drift}"


def test_angular_momentum_vector_form():
    state = matched_initial_states(0.7, -0.9, velocity=np.array([0.2, 0.3, 0.0]))[
        "position"
    ]
    am = angular_momentum(state)
    s, _ = decompose(am.spin)
    want = np.cross(state.x[1:], state.pi[1:]) - s
    assert np.allclose(am.total_vector, want, atol=1e-15)


def test_torque_tensor_antisymmetric_and_free_zero():
    state = matched_initial_states(0.3, 0.1)["position"]
    f = force_at(UniformEB(b0=np.array([0.0, 0.0, 1e-3])), Q_ELECTRON, state.x, state.u)
    m = torque_tensor(state.x, f)
    assert np.allclose(m, -m.T, atol=1e-18)
    f0 = force_at(FreeField(), Q_ELECTRON, state.x, state.u)
    assert not torque_tensor(state.x, f0).any()


def test_spin_magnitude_scales_with_tdot():
    """|s| = (hbar / 2) tdot grows with the Lorentz factor of the drift."""
    v = np.array([0.6, 0.0, 0.0])
    state = matched_initial_states(np.pi / 2, 0.0, velocity=v)["position"]
    s, d = decompose(build_spin_tensor(state.z, state.u))
    tdot = state.u[0]
    assert np.linalg.norm(s) == pytest.approx(H_STAR * tdot, rel=1e-12)
    assert np.linalg.norm(d) == pytest.approx(H_STAR * tdot, rel=1e-12)
    assert HBAR == 2 * H_STAR
