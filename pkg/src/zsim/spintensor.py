"""Spin tensor construction, identities, dipole energies, angular momentum.

The spin tensor of the moving electron is S = -m (z ^ u) built from the
local spin-motion vector z and the total velocity u.  Its six independent
components split into two three-vectors,

    s = z x (m xdot)            (rows/columns 1..3)
    d = m (u0 z - z0 u)         (row 0),

stored in matrix layout S[0][i] = d_i, S[2][1] = s_3, S[1][3] = s_2,
S[3][2] = s_1.  All identities here are exact consequences of the
constraints; the suites report scaled max-norm residuals so corrupted
states are detectable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C, H_STAR, HBAR, MASS, OMEGA0
from .emfield import FieldModel, field_at, field_tensor, force_at
from .minkowski import METRIC, Vec4, lower, mdot
from .states import PositionState


def _wedge(a: Vec4, b: Vec4) -> np.ndarray:
    return np.outer(a, b) - np.outer(b, a)


def build_spin_tensor(z: Vec4, u: Vec4, mass: float = MASS) -> np.ndarray:
    """S^{mu nu} = -m (z^mu u^nu - z^nu u^mu)."""
    return -mass * _wedge(np.asarray(z), np.asarray(u))


def accel_spin_tensor(u: Vec4, udot: Vec4, mass: float = MASS) -> np.ndarray:
    """Equivalent acceleration form S = (m / w0^2) (udot ^ u)."""
    return (mass / OMEGA0**2) * _wedge(np.asarray(udot), np.asarray(u))


def decompose(spin: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extract (s, d) three-vectors from the spin tensor matrix."""
    s = np.array([spin[3, 2], spin[1, 3], spin[2, 1]])
    d = np.array([spin[0, 1], spin[0, 2], spin[0, 3]])
    return s, d


def spin_vectors_direct(z: Vec4, u: Vec4, mass: float = MASS) -> tuple[np.ndarray, np.ndarray]:
    """(s, d) computed directly from z and u, bypassing the matrix."""
    z = np.asarray(z)
    u = np.asarray(u)
    s = mass * np.cross(z[1:], u[1:])
    d = mass * (u[0] * z[1:] - z[0] * u[1:])
    return s, d


def scalar_invariant(spin: np.ndarray) -> float:
    """Full contraction S^{mu nu} S_{mu nu} (zero for valid states)."""
    spin_low = METRIC @ spin @ METRIC
    return float(np.sum(spin * spin_low))


def _scaled(lhs: np.ndarray, rhs: np.ndarray) -> float:
    lhs = np.atleast_1d(np.asarray(lhs, dtype=np.float64))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
    scale = max(1.0, float(np.abs(lhs).max()), float(np.abs(rhs).max()))
    return float(np.abs(lhs - rhs).max()) / scale


def triad_residuals(spin: np.ndarray, u: Vec4) -> dict[str, float]:
    """Orthonormality and handedness of the co-moving triad.

    The rows (2 d / (hbar tdot), xdot / (c tdot), 2 s / (hbar tdot)) form a
    right-handed orthonormal set, equivalently d = (xdot x s) / (c tdot),
    s = (d x xdot) / (c tdot) and xdot = (4 c^2 / hbar^2)(s x d) / (c tdot).
    """
    s, d = decompose(spin)
    u = np.asarray(u)
    tdot = u[0] / C
    xdot = u[1:]
    rows = np.vstack(
        [
            2.0 * d / (HBAR * tdot),
            xdot / (C * tdot),
            2.0 * s / (HBAR * tdot),
        ]
    )
    res_ortho = float(np.abs(rows @ rows.T - np.eye(3)).max())
    res_det = abs(float(np.linalg.det(rows)) - 1.0)
    res_cyc_d = _scaled(d, np.cross(xdot, s) / (C * tdot))
    res_cyc_s = _scaled(s, np.cross(d, xdot) / (C * tdot))
    res_cyc_u = _scaled(xdot, (4.0 * C**2 / HBAR**2) * np.cross(s, d) / (C * tdot))
    return {
        "triad_orthonormal": res_ortho,
        "triad_handedness": res_det,
        "cyclic_d": res_cyc_d,
        "cyclic_s": res_cyc_s,
        "cyclic_u": res_cyc_u,
    }


def identity_suite(state: PositionState, mass: float = MASS) -> dict[str, float]:
    """Scaled residuals of the five contraction identities plus invariants.

    For a state satisfying the constraints every entry is zero:

    * ``s_u``:      S u = 0 (holds iff u.u = 0)
    * ``s_udot``:   S udot = m c^2 u with udot = -w0^2 z
    * ``s_pi``:     S pi = -(m c)^2 z
    * ``s_z``:      S z = -(hbar / (2 w0)) u
    * ``s_zdot``:   S zdot = m c^2 z with zdot = u - pi / m
    * ``scalar``:   S^{mu nu} S_{mu nu} = 0 and its 2(s.s - d.d) form
    * ``magnitude``: |s| = |d| = (hbar / 2) tdot
    * triad entries from ``triad_residuals``
    """
    z = state.z
    u = state.u
    pi = state.pi
    spin = build_spin_tensor(z, u, mass)
    udot = -(OMEGA0**2) * z
    zdot = u - pi / mass

    out = {
        "s_u": _scaled(spin @ lower(u), np.zeros(4)),
        "s_udot": _scaled(spin @ lower(udot), mass * C**2 * u),
        "s_pi": _scaled(spin @ lower(pi), -((mass * C) ** 2) * z),
        "s_z": _scaled(spin @ lower(z), -(HBAR / (2.0 * OMEGA0)) * u),
        "s_zdot": _scaled(spin @ lower(zdot), mass * C**2 * z),
    }
    s, d = decompose(spin)
    out["scalar"] = _scaled(scalar_invariant(spin), 0.0)
    out["scalar_vector_form"] = _scaled(
        scalar_invariant(spin), 2.0 * (np.dot(s, s) - np.dot(d, d))
    )
    tdot = u[0] / C
    out["magnitude_s"] = _scaled(np.linalg.norm(s), H_STAR * tdot)
    out["magnitude_d"] = _scaled(np.linalg.norm(d), H_STAR * tdot)
    out.update(triad_residuals(spin, u))
    return out


@dataclass(frozen=True)
class DipoleReport:
    """Field interaction energy split into dipole pieces.

    ``phi`` is the total interaction energy; the three ``phi_via_*``
    entries are independent computation routes that must agree.
    """

    phi: float
    u_magnetic: float
    u_electric: float
    magnetic_moment: np.ndarray
    electric_moment: np.ndarray
    gamma_implied: float
    phi_via_force: float
    phi_via_tensor: float
    phi_via_vectors: float


def interaction_energy(
    state: PositionState, model: FieldModel, q: float, mass: float = MASS
) -> DipoleReport:
    """Interaction energy Phi = f.z and its dipole decomposition.

    Routes: (a) the defining contraction f.z with the Lorentz force,
    (b) the tensor contraction -(q / 2m) F^{mu nu} S_{mu nu}, and
    (c) the dipole form -(q / m)(B.s + E.d / c) = U_m + U_e with moments
    mu = (q / m) s and eps = (q / (m c)) d.
    """
    e_vec, b_vec = field_at(model, state.x)
    f = force_at(model, q, state.x, state.u)
    spin = build_spin_tensor(state.z, state.u, mass)
    s, d = decompose(spin)

    phi_force = float(mdot(f, state.z))
    f_tensor = field_tensor(e_vec, b_vec)
    spin_low = METRIC @ spin @ METRIC
    phi_tensor = float(-(q / (2.0 * mass)) * np.sum(f_tensor * spin_low))
    u_m = float(-(q / mass) * np.dot(b_vec, s))
    u_e = float(-(q / (mass * C)) * np.dot(e_vec, d))

    energy = C * state.pi[0]
    vel = C**2 * state.pi[1:] / energy
    v2 = float(np.dot(vel, vel))
    gamma_implied = float(np.sqrt((1.0 + (u_m + u_e) / (mass * C**2)) / (1.0 - v2 / C**2)))

    return DipoleReport(
        phi=phi_force,
        u_magnetic=u_m,
        u_electric=u_e,
        magnetic_moment=(q / mass) * s,
        electric_moment=(q / (mass * C)) * d,
        gamma_implied=gamma_implied,
        phi_via_force=phi_force,
        phi_via_tensor=phi_tensor,
        phi_via_vectors=u_m + u_e,
    )


def energy_diagnostics(
    state: PositionState, model: FieldModel, q: float, mass: float = MASS
) -> dict[str, float]:
    """Energy-equation residual and low-speed expansion terms.

    * ``energy_residual``: (1/m) pi.pi - m c^2 - Phi, identically zero on
      exact states.
    * ``kinetic_error``: E - (m c^2 + m V^2 / 2 + Phi / 2), the error of the
      low-speed expansion (meaningful for |V| << c).
    * ``u_electric_dominant``: leading moving-dipole term
      -(q / (m^2 c^2)) (E x P).s / tdot, and ``u_electric_remainder`` the
      rest of U_e.
    """
    report = interaction_energy(state, model, q, mass)
    phi = report.phi
    pi = state.pi
    residual = float(mdot(pi, pi)) / mass - mass * C**2 - phi

    energy = C * pi[0]
    vel = C**2 * pi[1:] / energy
    v2 = float(np.dot(vel, vel))
    kinetic_error = energy - (mass * C**2 + 0.5 * mass * v2 + 0.5 * phi)

    e_vec, _ = field_at(model, state.x)
    spin = build_spin_tensor(state.z, state.u, mass)
    s, _ = decompose(spin)
    tdot = state.u[0] / C
    dominant = float(
        -(q / (mass**2 * C**2)) * np.dot(np.cross(e_vec, pi[1:]), s) / tdot
    )
    return {
        "energy_residual": residual,
        "kinetic_error": float(kinetic_error),
        "u_electric_dominant": dominant,
        "u_electric_remainder": report.u_electric - dominant,
        "gamma_implied": report.gamma_implied,
        "gamma_momentum": float(pi[0] / (mass * C)),
    }


@dataclass(frozen=True)
class AngularMomentum:
    orbital: np.ndarray
    spin: np.ndarray
    total: np.ndarray
    total_vector: np.ndarray


def angular_momentum(state: PositionState, mass: float = MASS) -> AngularMomentum:
    """Orbital x ^ pi, spin, and conserved total J = L + S.

    The three-vector form is J = x cross P - s.
    """
    orbital = _wedge(state.x, state.pi)
    spin = build_spin_tensor(state.z, state.u, mass)
    s, _ = decompose(spin)
    total = orbital + spin
    j_vec = np.cross(state.x[1:], state.pi[1:]) - s
    return AngularMomentum(orbital=orbital, spin=spin, total=total, total_vector=j_vec)


def torque_tensor(x: Vec4, f: Vec4) -> np.ndarray:
    """External torque M = x ^ f driving dJ/dtau."""
    return _wedge(np.asarray(x), np.asarray(f))
