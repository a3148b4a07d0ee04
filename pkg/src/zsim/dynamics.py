"""Equations of motion, integration driver, closed forms, and state maps.

The model splits the total motion x(tau) into a spin center y(tau) and a
local circular motion z(tau) = x - y at radius r0 and angular frequency
w0.  Three equivalent first-order formulations are integrated:

* position:    xdot = u, udot = -w0^2 (x - y), ydot = pi / m, pidot = q F u
* spintensor:  xdot = u, udot = (4 c^2 / hbar^2) S pi,
               Sdot^{mu nu} = pi^mu u^nu - pi^nu u^mu, pidot = q F u
* spinor:      xdot = u = phibar c gamma phi, i hbar phidot = H phi,
               pidot = q F u

Valid initial states satisfy (and the flow preserves)

* C1: u.u = 0              (the total motion is light-like)
* C2: z.z = -r0^2          (equivalently udotdot.udotdot = -c^2 w0^2)
* C3: pi.u = m c^2         (fixes the zitter frequency scale)
* G:  z.pi = 0             (phase constraint, follows from C1..C3)

Integration uses fixed-step classical RK4 (kernels module); constraints
are monitored along the trajectory, never projected, so constraint drift
is a direct quality metric of the integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constants import C, HBAR, MASS, OMEGA0, Q_ELECTRON, R0
from .emfield import (
    CoulombField,
    FieldModel,
    FreeField,
    UniformEB,
    field_at,
    force_at,
)
from .minkowski import BoostParams, Vec4, boost_vector, lower, mdot
from .spinor import (
    SPIN_OP,
    GAMMA0,
    boost_state,
    evolve_amplitudes,
    spin_tensor_observable,
    state_derivative,
    velocity_observable,
)
from .spinstates import spin_amplitudes
from .spintensor import build_spin_tensor, spin_vectors_direct
from .states import (
    DynState,
    FORMULATIONS,
    PositionState,
    SpinorState,
    SpinTensorState,
    Trajectory,
    formulation_of,
)


class ConstraintViolationError(ValueError):
    """Initial state violates the motion constraints.

    ``failures`` lists (constraint name, residual) pairs beyond tolerance.
    """

    def __init__(self, failures: list[tuple[str, float]]):
        self.failures = failures
        msg = ", ".join(f"{name}: {res:.3e}" for name, res in failures)
        super().__init__(f"constraint validation failed: {msg}")


class IntegrationDivergedError(RuntimeError):
    """Integration hit a non-finite state at proper time ``tau``."""

    def __init__(self, tau: float):
        self.tau = tau
        super().__init__(f"integration diverged near tau = {tau:.6g}")


# ---------------------------------------------------------------------------
# Derivatives at dataclass level (reference implementation; the packed
# kernels must agree with these, see tests).


def deriv_position(state: PositionState, model: FieldModel, q: float = Q_ELECTRON) -> PositionState:
    """Time derivative of a position-formulation state, packaged in kind."""
    f = force_at(model, q, state.x, state.u)
    return PositionState(
        x=state.u,
        u=-(OMEGA0**2) * state.z,
        y=state.pi / MASS,
        pi=f,
    )


def deriv_spintensor(state: SpinTensorState, model: FieldModel, q: float = Q_ELECTRON) -> SpinTensorState:
    f = force_at(model, q, state.x, state.u)
    udot = (4.0 * C**2 / HBAR**2) * (state.spin @ lower(state.pi))
    sdot = np.outer(state.pi, state.u) - np.outer(state.u, state.pi)
    return SpinTensorState(x=state.u, u=udot, spin=sdot, pi=f)


def deriv_spinor(state: SpinorState, model: FieldModel, q: float = Q_ELECTRON) -> SpinorState:
    u = velocity_observable(state.phi)
    f = force_at(model, q, state.x, u)
    phidot = state_derivative(state.phi, state.pi)
    return SpinorState(x=u, phi=phidot, pi=f)


# ---------------------------------------------------------------------------
# Constraint residuals and validation.


def _z_from_spin_parts(d: np.ndarray, s: np.ndarray, pi: Vec4) -> Vec4:
    """Local vector z = -S pi / (m c)^2 from the (d, s) split of S."""
    z = np.empty(4)
    z[0] = np.dot(d, pi[1:])
    z[1:] = d * pi[0] + np.cross(s, pi[1:])
    return z / (MASS * C) ** 2


def local_vector(state: DynState) -> Vec4:
    """Spin-motion vector z for any formulation."""
    if isinstance(state, PositionState):
        return state.z
    if isinstance(state, SpinTensorState):
        return -(state.spin @ lower(state.pi)) / (MASS * C) ** 2
    spin = spin_tensor_observable(state.phi)
    return -(spin @ lower(state.pi)) / (MASS * C) ** 2


def velocity_of(state: DynState) -> Vec4:
    """Total four-velocity u for any formulation."""
    if isinstance(state, SpinorState):
        return velocity_observable(state.phi)
    return state.u


def constraint_residuals(state: DynState) -> dict[str, float]:
    """Residuals of C1..C3 and G (all zero for exact states).

    * c1 = u.u
    * c2 = z.z + r0^2
    * c3 = pi.u / m - c^2
    * g  = z.pi
    """
    u = velocity_of(state)
    z = local_vector(state)
    return {
        "c1": float(mdot(u, u)),
        "c2": float(mdot(z, z)) + R0**2,
        "c3": float(mdot(state.pi, u)) / MASS - C**2,
        "g": float(mdot(z, state.pi)),
    }


def validate_state(state: DynState, tol: float = 1e-10) -> None:
    """Raise ConstraintViolationError for residuals beyond ``tol``."""
    res = constraint_residuals(state)
    failures = [(k, v) for k, v in res.items() if abs(v) > tol]
    if isinstance(state, SpinorState):
        tdot = float(np.real(state.phi.conj() @ state.phi))
        if tdot <= 0.0:
            failures.append(("tdot_positive", tdot))
    if failures:
        raise ConstraintViolationError(failures)


# ---------------------------------------------------------------------------
# Free-electron closed form.


def free_motion(state0: PositionState, taus) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact field-free trajectory arrays (xs, us, ys) at proper times taus.

    x(tau) = y(0) + (pi / m) tau + (u(0) - pi / m) sin(w0 tau) / w0
             + z(0) cos(w0 tau)
    u(tau) = pi / m + (u(0) - pi / m) cos(w0 tau) - w0 z(0) sin(w0 tau)
    y(tau) = y(0) + (pi / m) tau
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=np.float64))
    drift = state0.pi / MASS
    osc_u = state0.u - drift
    z0 = state0.z
    cos = np.cos(OMEGA0 * taus)[:, None]
    sin = np.sin(OMEGA0 * taus)[:, None]
    lin = taus[:, None] * drift[None, :]
    ys = state0.y[None, :] + lin
    xs = ys + (osc_u / OMEGA0)[None, :] * sin + z0[None, :] * cos
    us = drift[None, :] + osc_u[None, :] * cos - (OMEGA0 * z0)[None, :] * sin
    return xs, us, ys


def closed_form_free(state0: PositionState, tau: float) -> PositionState:
    """Exact field-free state at proper time tau."""
    xs, us, ys = free_motion(state0, float(tau))
    return PositionState(xs[0], us[0], ys[0], state0.pi)


# ---------------------------------------------------------------------------
# Packing between dataclasses and kernel layouts.


def _field_code(model: FieldModel) -> tuple[int, np.ndarray]:
    if isinstance(model, FreeField):
        return kernels.FIELD_FREE, np.zeros(1)
    if isinstance(model, UniformEB):
        return kernels.FIELD_UNIFORM, np.concatenate([model.e0, model.b0])
    if isinstance(model, CoulombField):
        return kernels.FIELD_COULOMB, np.concatenate([[model.z_charge], model.center])
    raise TypeError(f"unsupported field model: {type(model)!r}")


def pack_state(state: DynState) -> np.ndarray:
    if isinstance(state, PositionState):
        return np.concatenate([state.x, state.u, state.y, state.pi])
    if isinstance(state, SpinTensorState):
        s, d = _spin_parts_of_matrix(state.spin)
        return np.concatenate([state.x, state.u, state.pi, d, s])
    return np.concatenate(
        [state.x.astype(np.complex128), state.pi.astype(np.complex128), state.phi]
    )


def unpack_state(formulation: str, packed: np.ndarray) -> DynState:
    if formulation == "position":
        return PositionState(packed[0:4], packed[4:8], packed[8:12], packed[12:16])
    if formulation == "spintensor":
        spin = _matrix_of_spin_parts(packed[12:15], packed[15:18])
        return SpinTensorState(packed[0:4], packed[4:8], spin, packed[8:12])
    return SpinorState(packed[0:4].real, packed[8:12], packed[4:8].real)


def _spin_parts_of_matrix(spin: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.array([spin[3, 2], spin[1, 3], spin[2, 1]])
    d = np.array([spin[0, 1], spin[0, 2], spin[0, 3]])
    return s, d


def _matrix_of_spin_parts(d: np.ndarray, s: np.ndarray) -> np.ndarray:
    spin = np.zeros((4, 4))
    spin[0, 1:] = d
    spin[1:, 0] = -d
    spin[1, 2], spin[2, 1] = -s[2], s[2]
    spin[1, 3], spin[3, 1] = s[1], -s[1]
    spin[2, 3], spin[3, 2] = -s[0], s[0]
    return spin


# ---------------------------------------------------------------------------
# Vectorized per-sample diagnostics.


def _mdot_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[:, 0] * b[:, 0] - np.sum(a[:, 1:] * b[:, 1:], axis=1)


def _spinor_spin_parts(phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (d, s) bilinears for stacked amplitudes of shape (N, 4)."""
    bar = phis.conj() @ GAMMA0
    def comp(mu, nu):
        return np.real(np.einsum("ni,ij,nj->n", bar, SPIN_OP[mu][nu], phis))
    d = np.stack([comp(0, 1), comp(0, 2), comp(0, 3)], axis=1)
    s = np.stack([comp(3, 2), comp(1, 3), comp(2, 1)], axis=1)
    return d, s


def _zs_from_parts(ds: np.ndarray, ss: np.ndarray, pis: np.ndarray) -> np.ndarray:
    zs = np.empty((ds.shape[0], 4))
    zs[:, 0] = np.sum(ds * pis[:, 1:], axis=1)
    zs[:, 1:] = ds * pis[:, 0:1] + np.cross(ss, pis[:, 1:])
    return zs / (MASS * C) ** 2


def _residual_arrays(
    xs: np.ndarray,
    us: np.ndarray,
    pis: np.ndarray,
    zs: np.ndarray,
) -> dict[str, np.ndarray]:
    return {
        "c1": _mdot_rows(us, us),
        "c2": _mdot_rows(zs, zs) + R0**2,
        "c3": _mdot_rows(pis, us) / MASS - C**2,
        "g": _mdot_rows(zs, pis),
    }


# ---------------------------------------------------------------------------
# Integration driver.


def integrate(
    state: DynState,
    model: FieldModel,
    dt: float,
    n_steps: int,
    q: float = Q_ELECTRON,
    record_every: int = 1,
    tau0: float = 0.0,
    validate: bool = True,
    validate_tol: float = 1e-10,
) -> Trajectory:
    """Fixed-step RK4 integration, recording every ``record_every`` steps.

    ``n_steps`` must be a multiple of ``record_every``.  With
    ``validate=True`` (default) the initial state must pass the constraint
    validator; integration never projects constraints afterwards.
    Non-finite states abort with IntegrationDivergedError.
    """
    if n_steps % record_every != 0:
        raise ValueError("n_steps must be a multiple of record_every")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if validate:
        validate_state(state, validate_tol)
    formulation = formulation_of(state)
    fcode, fparams = _field_code(model)
    packed = pack_state(state).astype(kernels.STATE_DTYPE[formulation])
    n_rec = n_steps // record_every + 1
    out = np.empty((n_rec, packed.shape[0]), dtype=packed.dtype)
    status = kernels.INTEGRATORS[formulation](
        packed, fcode, fparams, float(q), float(dt), int(n_steps), int(record_every), out
    )
    if status != -1:
        raise IntegrationDivergedError(tau0 + status * record_every * dt)
    taus = tau0 + dt * record_every * np.arange(n_rec)
    return _trajectory_from_packed(formulation, taus, out)


def _trajectory_from_packed(formulation: str, taus: np.ndarray, out: np.ndarray) -> Trajectory:
    if formulation == "position":
        xs, us, ys, pis = out[:, 0:4], out[:, 4:8], out[:, 8:12], out[:, 12:16]
        zs = xs - ys
        res = _residual_arrays(xs, us, pis, zs)
        return Trajectory(formulation, taus, xs, us, pis, ys=ys, residuals=res)
    if formulation == "spintensor":
        xs, us, pis = out[:, 0:4], out[:, 4:8], out[:, 8:12]
        ds, ss = out[:, 12:15], out[:, 15:18]
        zs = _zs_from_parts(ds, ss, pis)
        res = _residual_arrays(xs, us, pis, zs)
        spins = np.concatenate([ds, ss], axis=1)
        return Trajectory(formulation, taus, xs, us, pis, spins=spins, residuals=res)
    xs, pis, phis = out[:, 0:4].real, out[:, 4:8].real, out[:, 8:12]
    us = velocity_observable(phis)
    ds, ss = _spinor_spin_parts(phis)
    zs = _zs_from_parts(ds, ss, pis)
    res = _residual_arrays(xs, us, pis, zs)
    return Trajectory(formulation, taus, xs, us, pis, phis=phis, residuals=res)


def integrate_adaptive(
    state: DynState,
    model: FieldModel,
    tau_end: float,
    q: float = Q_ELECTRON,
    tol: float = 1e-10,
    dt0: float = 1e-3,
    validate: bool = True,
) -> Trajectory:
    """RK4 with step-doubling error control (optional alternative driver).

    The error estimate is the max-norm difference between one dt step and
    two dt/2 steps; accepted steps keep the halved-step result.  Sampling
    is therefore non-uniform.
    """
    if validate:
        validate_state(state)
    formulation = formulation_of(state)
    fcode, fparams = _field_code(model)
    rhs = kernels.RHS[formulation]
    s = pack_state(state).astype(kernels.STATE_DTYPE[formulation])

    def step(vec, h):
        k1 = np.empty_like(vec)
        k2 = np.empty_like(vec)
        k3 = np.empty_like(vec)
        k4 = np.empty_like(vec)
        rhs(vec, fcode, fparams, q, k1)
        rhs(vec + 0.5 * h * k1, fcode, fparams, q, k2)
        rhs(vec + 0.5 * h * k2, fcode, fparams, q, k3)
        rhs(vec + h * k3, fcode, fparams, q, k4)
        return vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    tau = 0.0
    dt = dt0
    taus = [0.0]
    rows = [s.copy()]
    while tau < tau_end:
        dt = min(dt, tau_end - tau)
        full = step(s, dt)
        half = step(step(s, 0.5 * dt), 0.5 * dt)
        err = float(np.abs(full - half).max())
        if err <= tol or dt <= 1e-12:
            tau += dt
            s = half
            taus.append(tau)
            rows.append(s.copy())
            if not np.all(np.isfinite(np.abs(s))):
                raise IntegrationDivergedError(tau)
        factor = 0.9 * (tol / err) ** 0.2 if err > 0.0 else 5.0
        dt *= min(5.0, max(0.2, factor))
    return _trajectory_from_packed(formulation, np.array(taus), np.vstack(rows))


# ---------------------------------------------------------------------------
# State maps between formulations.


def map_states(state: DynState, target: str) -> DynState:
    """Convert between formulations.

    position <-> spintensor both ways and spinor -> either are supported;
    mapping into the spinor formulation has no general constructive
    inverse and raises ValueError (build spinor states from a rest-frame
    spin axis plus boost instead, see matched_initial_states).
    """
    if target not in FORMULATIONS:
        raise ValueError(f"unknown formulation {target!r}")
    source = formulation_of(state)
    if source == target:
        return state
    if target == "spinor":
        raise ValueError(
            "no constructive map into the spinor formulation; "
            "use matched_initial_states for rest-frame spin states"
        )
    u = velocity_of(state)
    if isinstance(state, PositionState):
        spin = build_spin_tensor(state.z, state.u)
        return SpinTensorState(state.x, state.u, spin, state.pi)
    if isinstance(state, SpinTensorState):
        z = local_vector(state)
        return PositionState(state.x, state.u, state.x - z, state.pi)
    # spinor source
    spin = spin_tensor_observable(state.phi)
    if target == "spintensor":
        return SpinTensorState(state.x, u, spin, state.pi)
    z = -(spin @ lower(state.pi)) / (MASS * C) ** 2
    return PositionState(state.x, u, state.x - z, state.pi)


def matched_initial_states(
    theta: float,
    phi: float = 0.0,
    velocity: np.ndarray | None = None,
    origin: np.ndarray | None = None,
    phase: float = 0.0,
) -> dict[str, DynState]:
    """Consistent initial states of all three formulations.

    The electron starts as the rest-frame spin state with axis
    (theta, phi), optionally boosted to ``velocity``; the spin center
    starts at ``origin`` (a four-vector event, default the coordinate
    origin).  ``phase`` rotates the zitter motion forward by that angle
    (rest frame, before the boost), selecting where on the circular
    path tau = 0 falls.  Observables of the spinor state define the
    position and spin-tensor data, so the three returned states
    describe the same physical motion exactly.
    """
    amps = spin_amplitudes(theta, phi)
    pi = np.array([MASS * C, 0.0, 0.0, 0.0])
    if phase != 0.0:
        amps = evolve_amplitudes(amps, pi, phase / OMEGA0)
    if velocity is not None and float(np.linalg.norm(velocity)) > 0.0:
        params = BoostParams(np.asarray(velocity, dtype=np.float64))
        amps = boost_state(amps, params)
        pi = boost_vector(pi, params)
    u0 = velocity_observable(amps)
    spin0 = spin_tensor_observable(amps)
    udot0 = (4.0 * C**2 / HBAR**2) * (spin0 @ lower(pi))
    z0 = -udot0 / OMEGA0**2
    y0 = np.zeros(4) if origin is None else np.asarray(origin, dtype=np.float64)
    x0 = y0 + z0
    return {
        "position": PositionState(x0, u0, y0, pi),
        "spintensor": SpinTensorState(x0, u0, spin0, pi),
        "spinor": SpinorState(x0, amps, pi),
    }


# ---------------------------------------------------------------------------
# Trajectory-level diagnostics.


def oracle_errors(traj: Trajectory, state0: PositionState) -> dict[str, float]:
    """Max scaled error of a field-free run against the closed form.

    The scale for each variable is max(1, closed-form magnitude), so the
    numbers read as relative errors for order-one quantities.
    """
    xs, us, ys = free_motion(state0, traj.taus)
    def err(a, b):
        return float((np.abs(a - b) / max(1.0, np.abs(b).max())).max())
    out = {"x": err(traj.xs, xs), "u": err(traj.us, us)}
    if traj.ys is not None:
        out["y"] = err(traj.ys, ys)
    out["pi"] = err(traj.pis, np.broadcast_to(state0.pi, traj.pis.shape))
    out["overall"] = max(out.values())
    return out


def spin_part_arrays(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """(d, s) spin-vector arrays for any formulation's trajectory."""
    if traj.formulation == "spintensor":
        assert traj.spins is not None
        return traj.spins[:, 0:3], traj.spins[:, 3:6]
    if traj.formulation == "spinor":
        assert traj.phis is not None
        return _spinor_spin_parts(traj.phis)
    assert traj.ys is not None
    zs = traj.xs - traj.ys
    ss = MASS * np.cross(zs[:, 1:], traj.us[:, 1:])
    ds = MASS * (traj.us[:, 0:1] * zs[:, 1:] - zs[:, 0:1] * traj.us[:, 1:])
    return ds, ss


@dataclass
class ComparisonReport:
    """Pairwise max divergence between formulations sharing a tau grid."""

    taus: np.ndarray
    per_pair: dict[str, dict[str, float]]
    overall: float

    def worst_pair(self) -> tuple[str, float]:
        worst = max(self.per_pair.items(), key=lambda kv: max(kv[1].values()))
        return worst[0], max(worst[1].values())


def compare_formulations(
    initial: dict[str, DynState],
    model: FieldModel,
    dt: float,
    n_steps: int,
    q: float = Q_ELECTRON,
    record_every: int = 1,
    validate: bool = True,
) -> tuple[ComparisonReport, dict[str, Trajectory]]:
    """Integrate each formulation and report pairwise trajectory divergence.

    Divergence is the max absolute componentwise difference over the
    shared sample grid, per variable (x, u, pi, d, s).
    """
    trajs = {
        name: integrate(
            st, model, dt, n_steps, q=q, record_every=record_every, validate=validate
        )
        for name, st in initial.items()
    }
    return compare_trajectories(trajs), trajs


def compare_trajectories(trajs: dict[str, Trajectory]) -> ComparisonReport:
    """Pairwise divergence of already-integrated trajectories."""
    arrays = {}
    for name, tr in trajs.items():
        ds, ss = spin_part_arrays(tr)
        arrays[name] = {"x": tr.xs, "u": tr.us, "pi": tr.pis, "d": ds, "s": ss}
    names = sorted(trajs)
    per_pair: dict[str, dict[str, float]] = {}
    overall = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            entry = {
                var: float(np.abs(arrays[a][var] - arrays[b][var]).max())
                for var in arrays[a]
            }
            per_pair[f"{a}|{b}"] = entry
            overall = max(overall, max(entry.values()))
    taus = trajs[names[0]].taus
    return ComparisonReport(taus, per_pair, overall)


def fourth_order_residual(
    traj: Trajectory, model: FieldModel, q: float = Q_ELECTRON
) -> dict[str, np.ndarray | float]:
    """Residual of the single-equation form of the dynamics along a run.

    Checks x'''' + w0^2 xdotdot - (q w0^2 / m) F xdot = 0 per component
    with central differences (interior samples only), and evaluates the
    Lagrangian

        L = (m/2) u.u + q A.u - (m / (2 w0^2)) udot.udot

    whose field-free value is m c^2 / 2.  Returns per-sample arrays
    ``residual`` (max-norm over components) and ``lagrangian`` plus the
    scalar ``max_residual``.
    """
    dt = traj.dt
    xs = traj.xs
    if len(traj) < 5:
        raise ValueError("need at least five samples")
    x4 = (xs[:-4] - 4 * xs[1:-3] + 6 * xs[2:-2] - 4 * xs[3:-1] + xs[4:]) / dt**4
    x2 = (xs[1:-3] - 2 * xs[2:-2] + xs[3:-1]) / dt**2
    x1 = (xs[3:-1] - xs[1:-3]) / (2 * dt)
    inner = slice(2, len(traj) - 2)
    es = np.empty((x1.shape[0], 3))
    bs = np.empty((x1.shape[0], 3))
    for k, xrow in enumerate(xs[inner]):
        e, b = field_at(model, xrow)
        es[k] = e
        bs[k] = b
    force = np.empty_like(x1)
    force[:, 0] = np.sum(es * x1[:, 1:], axis=1)
    force[:, 1:] = x1[:, 0:1] * es + np.cross(x1[:, 1:], bs)
    resid = x4 + OMEGA0**2 * x2 - (q * OMEGA0**2 / MASS) * force
    resid_norm = np.abs(resid).max(axis=1)

    us = traj.us
    udot = (us[2:] - us[:-2]) / (2 * dt)
    pot = np.stack([model.potential_at(xrow) for xrow in xs[1:-1]])
    lag = (
        0.5 * MASS * _mdot_rows(us[1:-1], us[1:-1])
        + q * _mdot_rows(pot, us[1:-1])
        - (MASS / (2.0 * OMEGA0**2)) * _mdot_rows(udot, udot)
    )
    return {
        "residual": resid_norm,
        "lagrangian": lag,
        "max_residual": float(resid_norm.max()),
    }


def conservation_drift(traj: Trajectory, model: FieldModel, q: float = Q_ELECTRON) -> dict[str, float]:
    """Drift diagnostics along a trajectory.

    For free runs the total angular momentum tensor J = x ^ pi + S is
    constant; in a field its rate matches the torque x ^ f.  Also reports
    max constraint residuals and the energy-equation residual
    (1/m) pi.pi - m c^2 - f.z.
    """
    ds, ss = spin_part_arrays(traj)
    ls = np.einsum("ni,nj->nij", traj.xs, traj.pis) - np.einsum(
        "ni,nj->nij", traj.pis, traj.xs
    )
    spins = np.zeros_like(ls)
    spins[:, 0, 1:] = ds
    spins[:, 1:, 0] = -ds
    spins[:, 1, 2], spins[:, 2, 1] = -ss[:, 2], ss[:, 2]
    spins[:, 1, 3], spins[:, 3, 1] = ss[:, 1], -ss[:, 1]
    spins[:, 2, 3], spins[:, 3, 2] = -ss[:, 0], ss[:, 0]
    js = ls + spins

    out = dict(traj.max_residuals())
    if isinstance(model, FreeField):
        out["j_drift"] = float(np.abs(js - js[0]).max())
        out["pi_drift"] = float(np.abs(traj.pis - traj.pis[0]).max())
    else:
        dt = traj.dt
        jdot = (js[2:] - js[:-2]) / (2 * dt)
        torque = np.empty_like(jdot)
        for k in range(jdot.shape[0]):
            f = force_at(model, q, traj.xs[k + 1], traj.us[k + 1])
            torque[k] = np.outer(traj.xs[k + 1], f) - np.outer(f, traj.xs[k + 1])
        out["torque_residual"] = float(np.abs(jdot - torque).max())

    # Energy equation along the run.
    phis_energy = np.empty(len(traj))
    for k in range(len(traj)):
        f = force_at(model, q, traj.xs[k], traj.us[k])
        z = _z_row(traj, k, ds, ss)
        phis_energy[k] = mdot(f, z)
    pipi = _mdot_rows(traj.pis, traj.pis)
    out["energy_residual"] = float(
        np.abs(pipi / MASS - MASS * C**2 - phis_energy).max()
    )
    return out


def _z_row(traj: Trajectory, k: int, ds: np.ndarray, ss: np.ndarray) -> Vec4:
    if traj.formulation == "position":
        assert traj.ys is not None
        return traj.xs[k] - traj.ys[k]
    return _z_from_spin_parts(ds[k], ss[k], traj.pis[k])
