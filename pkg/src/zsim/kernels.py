"""Packed fixed-step RK4 kernels for the three formulations.

These are the hot loops: states are packed into flat arrays and advanced
with classical RK4 at constant proper-time step.  The layouts are

* position:    float64[16]    = x(4) u(4) y(4) pi(4)
* spintensor:  float64[18]    = x(4) u(4) pi(4) d(3) s(3)
* spinor:      complex128[12] = x(4) pi(4) phi(4)   (x, pi stay real)

Field models are encoded as (code, params): 0 = free, 1 = uniform with
params (e0, b0), 2 = point charge with params (Z, center).  Kernels are
compiled with numba at import time when available; set ZSIM_NO_NUMBA=1
before import to force the plain-Python fallback (identical code, much
slower).  Recording happens every ``record_every`` steps into a
caller-allocated array; the return value is -1 on success or the record
index at which a non-finite state was detected.

The equations of motion also exist at dataclass level in dynamics.deriv_*;
the test suite pins agreement between the two implementations.
"""

from __future__ import annotations

import os

import numpy as np

FIELD_FREE = 0
FIELD_UNIFORM = 1
FIELD_COULOMB = 2

# omega0^2 in natural units, kept literal so kernels are self-contained.
_W0SQ = 4.0

_USE_NUMBA = os.environ.get("ZSIM_NO_NUMBA", "0") != "1"
if _USE_NUMBA:
    try:
        from numba import njit as _njit

        def _jit(fn):
            return _njit(cache=True)(fn)

    except ImportError:  # pragma: no cover
        _USE_NUMBA = False

if not _USE_NUMBA:

    def _jit(fn):
        return fn


JITTED = _USE_NUMBA


@_jit
def _field_eb(fcode, fp, x1, x2, x3):
    if fcode == 1:
        return fp[0], fp[1], fp[2], fp[3], fp[4], fp[5]
    if fcode == 2:
        r1 = x1 - fp[1]
        r2 = x2 - fp[2]
        r3 = x3 - fp[3]
        rsq = r1 * r1 + r2 * r2 + r3 * r3
        if rsq == 0.0:
            return np.nan, np.nan, np.nan, 0.0, 0.0, 0.0
        scale = fp[0] / (rsq * np.sqrt(rsq))
        return scale * r1, scale * r2, scale * r3, 0.0, 0.0, 0.0
    return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0


@_jit
def _force(q, e1, e2, e3, b1, b2, b3, u0, u1, u2, u3):
    f0 = q * (e1 * u1 + e2 * u2 + e3 * u3)
    f1 = q * (u0 * e1 + u2 * b3 - u3 * b2)
    f2 = q * (u0 * e2 + u3 * b1 - u1 * b3)
    f3 = q * (u0 * e3 + u1 * b2 - u2 * b1)
    return f0, f1, f2, f3


@_jit
def rhs_position(s, fcode, fp, q, out):
    e1, e2, e3, b1, b2, b3 = _field_eb(fcode, fp, s[1], s[2], s[3])
    f0, f1, f2, f3 = _force(q, e1, e2, e3, b1, b2, b3, s[4], s[5], s[6], s[7])
    for i in range(4):
        out[i] = s[4 + i]
        out[4 + i] = -_W0SQ * (s[i] - s[8 + i])
        out[8 + i] = s[12 + i]
    out[12] = f0
    out[13] = f1
    out[14] = f2
    out[15] = f3


@_jit
def rhs_spintensor(s, fcode, fp, q, out):
    e1, e2, e3, b1, b2, b3 = _field_eb(fcode, fp, s[1], s[2], s[3])
    u0, u1, u2, u3 = s[4], s[5], s[6], s[7]
    p0, p1, p2, p3 = s[8], s[9], s[10], s[11]
    d1, d2, d3 = s[12], s[13], s[14]
    sv1, sv2, sv3 = s[15], s[16], s[17]
    f0, f1, f2, f3 = _force(q, e1, e2, e3, b1, b2, b3, u0, u1, u2, u3)
    out[0] = u0
    out[1] = u1
    out[2] = u2
    out[3] = u3
    # udot = (4 c^2 / hbar^2) S pi, spelled out in (d, s) components
    out[4] = -4.0 * (d1 * p1 + d2 * p2 + d3 * p3)
    out[5] = -4.0 * (d1 * p0 + sv2 * p3 - sv3 * p2)
    out[6] = -4.0 * (d2 * p0 + sv3 * p1 - sv1 * p3)
    out[7] = -4.0 * (d3 * p0 + sv1 * p2 - sv2 * p1)
    out[8] = f0
    out[9] = f1
    out[10] = f2
    out[11] = f3
    # ddot^i = pi^0 u^i - pi^i u^0,  sdot = xdot x P
    out[12] = p0 * u1 - p1 * u0
    out[13] = p0 * u2 - p2 * u0
    out[14] = p0 * u3 - p3 * u0
    out[15] = u2 * p3 - u3 * p2
    out[16] = u3 * p1 - u1 * p3
    out[17] = u1 * p2 - u2 * p1


@_jit
def rhs_spinor(s, fcode, fp, q, out):
    p0 = s[4].real
    p1 = s[5].real
    p2 = s[6].real
    p3 = s[7].real
    ph1, ph2, ph3, ph4 = s[8], s[9], s[10], s[11]
    c1 = np.conj(ph1)
    c2 = np.conj(ph2)
    u0 = (
        ph1.real * ph1.real + ph1.imag * ph1.imag
        + ph2.real * ph2.real + ph2.imag * ph2.imag
        + ph3.real * ph3.real + ph3.imag * ph3.imag
        + ph4.real * ph4.real + ph4.imag * ph4.imag
    )
    u1 = 2.0 * (c1 * ph4 + c2 * ph3).real
    u2 = 2.0 * (c1 * ph4).imag - 2.0 * (c2 * ph3).imag
    u3 = 2.0 * (c1 * ph3 - c2 * ph4).real
    e1, e2, e3, b1, b2, b3 = _field_eb(fcode, fp, s[1].real, s[2].real, s[3].real)
    f0, f1, f2, f3 = _force(q, e1, e2, e3, b1, b2, b3, u0, u1, u2, u3)
    out[0] = u0
    out[1] = u1
    out[2] = u2
    out[3] = u3
    out[4] = f0
    out[5] = f1
    out[6] = f2
    out[7] = f3
    # dphi/dtau = -i H phi, H = pi0 g0 - pi1 g1 - pi2 g2 - pi3 g3
    h1 = p0 * ph1 - p1 * ph4 + 1j * p2 * ph4 - p3 * ph3
    h2 = p0 * ph2 - p1 * ph3 - 1j * p2 * ph3 + p3 * ph4
    h3 = -p0 * ph3 + p1 * ph2 - 1j * p2 * ph2 + p3 * ph1
    h4 = -p0 * ph4 + p1 * ph1 + 1j * p2 * ph1 - p3 * ph2
    out[8] = -1j * h1
    out[9] = -1j * h2
    out[10] = -1j * h3
    out[11] = -1j * h4


@_jit
def integrate_position(state, fcode, fp, q, dt, n_steps, record_every, out):
    s = state.copy()
    k1 = np.empty_like(s)
    k2 = np.empty_like(s)
    k3 = np.empty_like(s)
    k4 = np.empty_like(s)
    tmp = np.empty_like(s)
    n = s.shape[0]
    for i in range(n):
        out[0, i] = s[i]
    rec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        rhs_position(s, fcode, fp, q, k1)
        for i in range(n):
            tmp[i] = s[i] + half * k1[i]
        rhs_position(tmp, fcode, fp, q, k2)
        for i in range(n):
            tmp[i] = s[i] + half * k2[i]
        rhs_position(tmp, fcode, fp, q, k3)
        for i in range(n):
            tmp[i] = s[i] + dt * k3[i]
        rhs_position(tmp, fcode, fp, q, k4)
        for i in range(n):
            s[i] = s[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if step % record_every == 0:
            ok = True
            for i in range(n):
                if not np.isfinite(abs(s[i])):
                    ok = False
            if not ok:
                return rec
            for i in range(n):
                out[rec, i] = s[i]
            rec += 1
    return -1


@_jit
def integrate_spintensor(state, fcode, fp, q, dt, n_steps, record_every, out):
    s = state.copy()
    k1 = np.empty_like(s)
    k2 = np.empty_like(s)
    k3 = np.empty_like(s)
    k4 = np.empty_like(s)
    tmp = np.empty_like(s)
    n = s.shape[0]
    for i in range(n):
        out[0, i] = s[i]
    rec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        rhs_spintensor(s, fcode, fp, q, k1)
        for i in range(n):
            tmp[i] = s[i] + half * k1[i]
        rhs_spintensor(tmp, fcode, fp, q, k2)
        for i in range(n):
            tmp[i] = s[i] + half * k2[i]
        rhs_spintensor(tmp, fcode, fp, q, k3)
        for i in range(n):
            tmp[i] = s[i] + dt * k3[i]
        rhs_spintensor(tmp, fcode, fp, q, k4)
        for i in range(n):
            s[i] = s[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if step % record_every == 0:
            ok = True
            for i in range(n):
                if not np.isfinite(abs(s[i])):
                    ok = False
            if not ok:
                return rec
            for i in range(n):
                out[rec, i] = s[i]
            rec += 1
    return -1


@_jit
def integrate_spinor(state, fcode, fp, q, dt, n_steps, record_every, out):
    s = state.copy()
    k1 = np.empty_like(s)
    k2 = np.empty_like(s)
    k3 = np.empty_like(s)
    k4 = np.empty_like(s)
    tmp = np.empty_like(s)
    n = s.shape[0]
    for i in range(n):
        out[0, i] = s[i]
    rec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        rhs_spinor(s, fcode, fp, q, k1)
        for i in range(n):
            tmp[i] = s[i] + half * k1[i]
        rhs_spinor(tmp, fcode, fp, q, k2)
        for i in range(n):
            tmp[i] = s[i] + half * k2[i]
        rhs_spinor(tmp, fcode, fp, q, k3)
        for i in range(n):
            tmp[i] = s[i] + dt * k3[i]
        rhs_spinor(tmp, fcode, fp, q, k4)
        for i in range(n):
            s[i] = s[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if step % record_every == 0:
            ok = True
            for i in range(n):
                if not np.isfinite(abs(s[i])):
                    ok = False
            if not ok:
                return rec
            for i in range(n):
                out[rec, i] = s[i]
            rec += 1
    return -1


@_jit
def ensemble_corrupted(xs, thetas, drift, osc_a, osc_b, pa, pb, h, n_steps):
    """Advance the sign-flipped-zitter ensemble flow in place.

    Per particle: dtheta/ds = 1 + pa cos(w0 theta) + pb sin(w0 theta),
    dx/ds = drift - osc_a cos(w0 theta) - osc_b sin(w0 theta); classical
    RK4, sequential over particles (they are independent).
    """
    w0 = 2.0
    n = xs.shape[0]
    for i in range(n):
        th = thetas[i]
        x1, x2, x3 = xs[i, 0], xs[i, 1], xs[i, 2]
        for _ in range(n_steps):
            c = np.cos(w0 * th)
            s = np.sin(w0 * th)
            k1t = 1.0 + pa * c + pb * s
            k1x1 = drift[0] - osc_a[0] * c - osc_b[0] * s
            k1x2 = drift[1] - osc_a[1] * c - osc_b[1] * s
            k1x3 = drift[2] - osc_a[2] * c - osc_b[2] * s
            t2 = th + 0.5 * h * k1t
            c = np.cos(w0 * t2)
            s = np.sin(w0 * t2)
            k2t = 1.0 + pa * c + pb * s
            k2x1 = drift[0] - osc_a[0] * c - osc_b[0] * s
            k2x2 = drift[1] - osc_a[1] * c - osc_b[1] * s
            k2x3 = drift[2] - osc_a[2] * c - osc_b[2] * s
            t3 = th + 0.5 * h * k2t
            c = np.cos(w0 * t3)
            s = np.sin(w0 * t3)
            k3t = 1.0 + pa * c + pb * s
            k3x1 = drift[0] - osc_a[0] * c - osc_b[0] * s
            k3x2 = drift[1] - osc_a[1] * c - osc_b[1] * s
            k3x3 = drift[2] - osc_a[2] * c - osc_b[2] * s
            t4 = th + h * k3t
            c = np.cos(w0 * t4)
            s = np.sin(w0 * t4)
            k4t = 1.0 + pa * c + pb * s
            k4x1 = drift[0] - osc_a[0] * c - osc_b[0] * s
            k4x2 = drift[1] - osc_a[1] * c - osc_b[1] * s
            k4x3 = drift[2] - osc_a[2] * c - osc_b[2] * s
            th += (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
            x1 += (h / 6.0) * (k1x1 + 2.0 * k2x1 + 2.0 * k3x1 + k4x1)
            x2 += (h / 6.0) * (k1x2 + 2.0 * k2x2 + 2.0 * k3x2 + k4x2)
            x3 += (h / 6.0) * (k1x3 + 2.0 * k2x3 + 2.0 * k3x3 + k4x3)
        thetas[i] = th
        xs[i, 0], xs[i, 1], xs[i, 2] = x1, x2, x3


INTEGRATORS = {
    "position": integrate_position,
    "spintensor": integrate_spintensor,
    "spinor": integrate_spinor,
}

RHS = {
    "position": rhs_position,
    "spintensor": rhs_spintensor,
    "spinor": rhs_spinor,
}

STATE_WIDTH = {"position": 16, "spintensor": 18, "spinor": 12}
STATE_DTYPE = {
    "position": np.float64,
    "spintensor": np.float64,
    "spinor": np.complex128,
}
