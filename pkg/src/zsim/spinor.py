"""Four-spinor state functions and the operator algebra acting on them.

The state of the electron can be carried by a complex four-component
amplitude phi(tau) evolving as i hbar dphi/dtau = H phi with
H = c pi_mu gamma^mu.  Expectation values use the adjoint row
phibar = phi^* gamma^0, never the plain Hermitian inner product:
a matrix Q is a physical observable exactly when gamma^0 Q is Hermitian,
which makes phibar Q phi real.

Gamma matrices are in the standard Dirac basis.  Natural units
(hbar = m = c = 1) throughout; factors are kept in symbolic form in
formulas via the constants module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .constants import C, HBAR, MASS, OMEGA0, OMEGA1, REST_ENERGY
from .minkowski import BoostParams, Vec4, lower, mdot

Amplitudes = NDArray[np.complex128]

PAULI = [
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
]

_I2 = np.eye(2, dtype=np.complex128)
_Z2 = np.zeros((2, 2), dtype=np.complex128)

GAMMA0 = np.block([[_I2, _Z2], [_Z2, -_I2]])
GAMMA = [GAMMA0] + [
    np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI
]
GAMMA5 = np.block([[_Z2, _I2], [_I2, _Z2]])

#: Velocity operators u^mu = c gamma^mu.
U_OP = [C * g for g in GAMMA]

_METRIC_DIAG = np.array([1.0, -1.0, -1.0, -1.0])


def spin_operator(mu: int, nu: int) -> np.ndarray:
    """Spin-tensor operator S^{mu nu} = -(i hbar / 4) [gamma^mu, gamma^nu]."""
    g_mu, g_nu = GAMMA[mu], GAMMA[nu]
    return (-1j * HBAR / 4.0) * (g_mu @ g_nu - g_nu @ g_mu)


#: All sixteen S^{mu nu} operators, indexed [mu][nu].
SPIN_OP = [[spin_operator(m, n) for n in range(4)] for m in range(4)]


def hamiltonian(pi: Vec4) -> np.ndarray:
    """Matrix Hamiltonian H = c pi_mu gamma^mu for conjugate momentum pi."""
    pi_low = lower(pi)
    h = np.zeros((4, 4), dtype=np.complex128)
    for mu in range(4):
        h += C * pi_low[mu] * GAMMA[mu]
    return h


@dataclass(frozen=True)
class StateFunction:
    """Amplitude four-spinor together with the proper time it belongs to."""

    phi: Amplitudes
    tau: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "phi", np.asarray(self.phi, dtype=np.complex128).reshape(4)
        )


def _amps(state) -> Amplitudes:
    phi = getattr(state, "phi", state)
    return np.asarray(phi, dtype=np.complex128)


def adjoint_row(state) -> Amplitudes:
    """Adjoint row phibar = phi^* gamma^0."""
    return _amps(state).conj() @ GAMMA0


def tdot_of(state) -> float:
    """Laboratory-time rate tdot = phi^* phi (positive for valid states)."""
    phi = _amps(state)
    return float(np.real(phi.conj() @ phi))


def bilinear(state, op: np.ndarray) -> complex:
    """Unchecked sandwich phibar op phi."""
    phi = _amps(state)
    return complex(adjoint_row(phi) @ op @ phi)


def is_observable(op: np.ndarray) -> bool:
    """True when gamma^0 op is Hermitian, so phibar op phi is always real."""
    m = GAMMA0 @ op
    return bool(np.allclose(m, m.conj().T, rtol=0.0, atol=1e-12))


def observable(state, op: np.ndarray, imag_tol: float = 1e-10) -> float:
    """Real expectation value phibar op phi of an observable operator."""
    if not is_observable(op):
        raise ValueError("operator is not observable: gamma^0 op is not Hermitian")
    val = bilinear(state, op)
    if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
        raise ValueError(f"expectation value has imaginary residue {val.imag}")
    return val.real


def velocity_observable(state) -> Vec4:
    """Four-velocity u^mu = phibar c gamma^mu phi.

    Accepts a single amplitude vector or a stack of shape (N, 4) and then
    returns shape (N, 4).
    """
    phi = _amps(state)
    single = phi.ndim == 1
    phis = phi.reshape(-1, 4)
    bar = phis.conj() @ GAMMA0
    u = np.empty((phis.shape[0], 4))
    for mu in range(4):
        u[:, mu] = np.real(np.einsum("ni,ij,nj->n", bar, U_OP[mu], phis))
    return u[0] if single else u


def spin_tensor_observable(state) -> np.ndarray:
    """Spin tensor S^{mu nu} = phibar S-op^{mu nu} phi (antisymmetric, real)."""
    phi = _amps(state)
    bar = adjoint_row(phi)
    s = np.zeros((4, 4))
    for mu in range(4):
        for nu in range(mu + 1, 4):
            val = np.real(bar @ SPIN_OP[mu][nu] @ phi)
            s[mu, nu] = val
            s[nu, mu] = -val
    return s


def normalization(state, pi: Vec4) -> float:
    """Energy normalization phibar H phi; equals m c^2 for physical states."""
    return float(np.real(bilinear(state, hamiltonian(pi))))


def state_derivative(state, pi: Vec4) -> Amplitudes:
    """Proper-time derivative dphi/dtau = -(i / hbar) H phi."""
    return (-1j / HBAR) * (hamiltonian(pi) @ _amps(state))


def _require_on_shell(pi: Vec4, tol: float = 1e-8) -> None:
    p2 = mdot(pi, pi)
    if abs(p2 - (MASS * C) ** 2) > tol:
        raise ValueError(f"momentum is off shell: pi.pi = {p2}")


def _require_normalized(amps: Amplitudes, pi: Vec4, tol: float = 1e-8) -> None:
    norm = normalization(amps, pi)
    if abs(norm - REST_ENERGY) > tol:
        raise ValueError(f"amplitudes are not energy normalized: {norm}")


def evolve_amplitudes(amps, pi: Vec4, taus) -> Amplitudes:
    """Closed-form evolution phi(tau) for one or many proper times.

    phi(tau) = [cos(w1 tau) I - (i / m c^2) sin(w1 tau) H] phi(0), using
    H^2 = (m c^2)^2 on shell.  Returns shape (4,) for scalar tau, else
    (N, 4).
    """
    a = _amps(amps)
    taus_arr = np.atleast_1d(np.asarray(taus, dtype=np.float64))
    h = hamiltonian(pi)
    ha = h @ a
    phase = OMEGA1 * taus_arr
    out = (
        np.cos(phase)[:, None] * a[None, :]
        - (1j / REST_ENERGY) * np.sin(phase)[:, None] * ha[None, :]
    )
    return out[0] if np.ndim(taus) == 0 else out


def closed_form_state(amps, pi: Vec4, tau: float) -> StateFunction:
    """Evolved state at proper time tau for validated on-shell inputs."""
    a = _amps(amps)
    _require_on_shell(pi)
    _require_normalized(a, pi)
    return StateFunction(evolve_amplitudes(a, pi, float(tau)), float(tau))


def energy_projectors(pi: Vec4) -> tuple[np.ndarray, np.ndarray]:
    """Projectors (P+, P-) onto the +/- m c^2 eigenspaces of H."""
    _require_on_shell(pi)
    h = hamiltonian(pi)
    eye = np.eye(4, dtype=np.complex128)
    return 0.5 * (eye + h / REST_ENERGY), 0.5 * (eye - h / REST_ENERGY)


def energy_split(amps, pi: Vec4) -> tuple[Amplitudes, Amplitudes]:
    """Split amplitudes into positive and negative energy parts."""
    p_plus, p_minus = energy_projectors(pi)
    a = _amps(amps)
    return p_plus @ a, p_minus @ a


def velocity_closed_form(amps, pi: Vec4, taus) -> np.ndarray:
    """Four-velocity along the motion without evolving the state:

    u(tau) = (u(0) - pi / m) cos(w0 tau) + (udot(0) / w0) sin(w0 tau) + pi / m

    with u(0) and udot(0) = (4 c^2 / hbar^2) S(0) pi read off the initial
    amplitudes.  Returns shape (4,) for scalar tau, else (N, 4).
    """
    a = _amps(amps)
    u0 = velocity_observable(a)
    s0 = spin_tensor_observable(a)
    udot0 = (4.0 * C**2 / HBAR**2) * (s0 @ lower(pi))
    drift = np.asarray(pi, dtype=np.float64) / MASS
    taus_arr = np.atleast_1d(np.asarray(taus, dtype=np.float64))
    cos = np.cos(OMEGA0 * taus_arr)[:, None]
    sin = np.sin(OMEGA0 * taus_arr)[:, None]
    u = (u0 - drift)[None, :] * cos + (udot0 / OMEGA0)[None, :] * sin + drift
    return u[0] if np.ndim(taus) == 0 else u


def boost_state(amps, params: BoostParams) -> Amplitudes:
    """Boost amplitudes with the standard spinor boost matrix.

    The matrix cosh(eta/2) I + sinh(eta/2) (vhat . gamma^0 gamma) preserves
    the energy normalization and maps every bilinear four-vector with the
    coordinate boost of the same velocity.
    """
    v = params.velocity
    speed = float(np.linalg.norm(v))
    a = _amps(amps)
    if speed == 0.0:
        return a.copy()
    g = params.gamma
    nhat = v / speed
    alpha = sum(nhat[k] * (GAMMA0 @ GAMMA[k + 1]) for k in range(3))
    mat = np.sqrt((1.0 + g) / 2.0) * np.eye(4, dtype=np.complex128)
    # g*speed/sqrt(2(1+g)) = sqrt((g-1)/2) without cancellation at small speeds
    mat += (g * speed / np.sqrt(2.0 * (1.0 + g))) * alpha
    return mat @ a


def operator_identity_suite(pi: Vec4) -> dict[str, float]:
    """Max-norm residuals of the core operator identities at momentum pi.

    Keys: anticommutator, h_squared, velocity_commutator, spin_commutator,
    h_gamma_h.  The momentum must be on shell.
    """
    _require_on_shell(pi)
    h = hamiltonian(pi)
    pi = np.asarray(pi, dtype=np.float64)
    pi_low = lower(pi)
    eye = np.eye(4, dtype=np.complex128)

    res_anti = 0.0
    for mu in range(4):
        for nu in range(4):
            lhs = GAMMA[mu] @ GAMMA[nu] + GAMMA[nu] @ GAMMA[mu]
            target = 2.0 * (_METRIC_DIAG[mu] if mu == nu else 0.0) * eye
            res_anti = max(res_anti, float(np.abs(lhs - target).max()))

    res_h2 = float(np.abs(h @ h - C**2 * mdot(pi, pi) * eye).max())

    res_vel = 0.0
    for mu in range(4):
        lhs = (1j / HBAR) * (h @ U_OP[mu] - U_OP[mu] @ h)
        rhs = (4.0 * C**2 / HBAR**2) * sum(
            SPIN_OP[mu][nu] * pi_low[nu] for nu in range(4)
        )
        res_vel = max(res_vel, float(np.abs(lhs - rhs).max()))

    res_spin = 0.0
    for mu in range(4):
        for nu in range(4):
            lhs = (1j / HBAR) * (h @ SPIN_OP[mu][nu] - SPIN_OP[mu][nu] @ h)
            rhs = pi[mu] * U_OP[nu] - pi[nu] * U_OP[mu]
            res_spin = max(res_spin, float(np.abs(lhs - rhs).max()))

    res_hgh = 0.0
    for mu in range(4):
        lhs = h @ GAMMA[mu] @ h
        rhs = -(REST_ENERGY**2) * GAMMA[mu] + 2.0 * C * pi[mu] * h
        res_hgh = max(res_hgh, float(np.abs(lhs - rhs).max()))

    return {
        "anticommutator": res_anti,
        "h_squared": res_h2,
        "velocity_commutator": res_vel,
        "spin_commutator": res_spin,
        "h_gamma_h": res_hgh,
    }
