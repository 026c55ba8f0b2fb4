"""Pure-numpy circuit kernels.

Mirrors `_kernels_numba` exactly; selected via QAOA_MVC_PURE_NUMPY=1 or when
numba is unavailable.  State vectors are complex128 arrays of length 2^n with
qubit q at bit q of the index; density matrices are C-contiguous (2^n, 2^n)
arrays.  All dm_* helpers operate in place.
"""

import numpy as np

KIND_H = 0
KIND_RZ = 1
KIND_RZZ = 2
KIND_RX = 3

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def sv_apply_1q(psi, q, m00, m01, m10, m11):
    view = psi.reshape(-1, 2, 1 << q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = m00 * a0 + m01 * a1
    view[:, 1, :] = m10 * a0 + m11 * a1


def _rz_phases(size, q, theta):
    bit = (np.arange(size) >> q) & 1
    return np.where(bit == 0, np.exp(-0.5j * theta), np.exp(0.5j * theta))


def _rzz_phases(size, q1, q2, theta):
    idx = np.arange(size)
    parity = ((idx >> q1) ^ (idx >> q2)) & 1
    return np.where(parity == 0, np.exp(-0.5j * theta), np.exp(0.5j * theta))


def sv_run(n, kinds, qa, qb, thetas):
    """Apply the gate list to |0...0> and return the final state vector."""
    size = 1 << n
    psi = np.zeros(size, dtype=np.complex128)
    psi[0] = 1.0
    for g in range(kinds.size):
        kind, q, theta = int(kinds[g]), int(qa[g]), float(thetas[g])
        if kind == KIND_H:
            sv_apply_1q(psi, q, _INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)
        elif kind == KIND_RX:
            c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
            sv_apply_1q(psi, q, c, -1j * s, -1j * s, c)
        elif kind == KIND_RZ:
            psi *= _rz_phases(size, q, theta)
        elif kind == KIND_RZZ:
            psi *= _rzz_phases(size, q, int(qb[g]), theta)
    return psi


def dm_apply_1q(rho, q, m00, m01, m10, m11):
    """rho <- U rho U^dagger for a single-qubit unitary U on qubit q."""
    dim = rho.shape[0]
    rows = rho.reshape(-1, 2, 1 << q, dim)
    a0 = rows[:, 0].copy()
    a1 = rows[:, 1]
    rows[:, 0] = m00 * a0 + m01 * a1
    rows[:, 1] = m10 * a0 + m11 * a1
    cols = rho.reshape(dim, -1, 2, 1 << q)
    b0 = cols[:, :, 0].copy()
    b1 = cols[:, :, 1]
    cols[:, :, 0] = np.conj(m00) * b0 + np.conj(m01) * b1
    cols[:, :, 1] = np.conj(m10) * b0 + np.conj(m11) * b1


def dm_apply_diag(rho, phases):
    """rho <- D rho D^dagger for a diagonal unitary with the given phases."""
    rho *= phases[:, None]
    rho *= np.conj(phases)[None, :]


def dm_thermal_1q(rho, q, gad, decay):
    """Amplitude damping (population transfer gad) with total off-diagonal decay factor."""
    dim = rho.shape[0]
    low = 1 << q
    r = rho.reshape(dim // (2 * low), 2, low, dim // (2 * low), 2, low)
    b11 = r[:, 1, :, :, 1, :].copy()
    r[:, 0, :, :, 0, :] += gad * b11
    r[:, 1, :, :, 1, :] = (1.0 - gad) * b11
    r[:, 0, :, :, 1, :] *= decay
    r[:, 1, :, :, 0, :] *= decay


def dm_depolarize_1q(rho, q, p):
    """With probability p replace qubit q by the maximally mixed state."""
    dim = rho.shape[0]
    low = 1 << q
    r = rho.reshape(dim // (2 * low), 2, low, dim // (2 * low), 2, low)
    t = (r[:, 0, :, :, 0, :] + r[:, 1, :, :, 1, :]) * (0.5 * p)
    rho *= 1.0 - p
    r[:, 0, :, :, 0, :] += t
    r[:, 1, :, :, 1, :] += t


def dm_depolarize_2q(rho, q1, q2, p):
    """With probability p replace qubits (q1, q2) by the maximally mixed state."""
    dim = rho.shape[0]
    ql, qh = (q1, q2) if q1 < q2 else (q2, q1)
    lo = 1 << ql
    mid = 1 << (qh - ql - 1)
    hi = dim // (4 * lo * mid)
    shape = (hi, 2, mid, 2, lo)
    r = rho.reshape(shape + shape)
    tr = (
        r[:, 0, :, 0, :, :, 0, :, 0, :]
        + r[:, 0, :, 1, :, :, 0, :, 1, :]
        + r[:, 1, :, 0, :, :, 1, :, 0, :]
        + r[:, 1, :, 1, :, :, 1, :, 1, :]
    )
    rho *= 1.0 - p
    add = (0.25 * p) * tr
    for a in (0, 1):
        for b in (0, 1):
            r[:, a, :, b, :, :, a, :, b, :] += add


def dm_run(n, kinds, qa, qb, thetas, p1q, gad1, f1, p2, gad2, f2):
    """Evolve |0...0><0...0| through the gate list with per-gate noise channels.

    After each single-qubit gate: depolarizing(p1q[q]) then thermal relaxation
    (gad1[q], f1[q]) on the target.  After each two-qubit gate: two-qubit
    depolarizing(p2) then thermal relaxation (gad2, f2) on both targets.
    Zero rates make every channel the identity.
    """
    size = 1 << n
    rho = np.zeros((size, size), dtype=np.complex128)
    rho[0, 0] = 1.0
    for g in range(kinds.size):
        kind, q, theta = int(kinds[g]), int(qa[g]), float(thetas[g])
        if kind == KIND_H:
            dm_apply_1q(rho, q, _INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)
            _noise_1q(rho, q, p1q, gad1, f1)
        elif kind == KIND_RX:
            c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
            dm_apply_1q(rho, q, c, -1j * s, -1j * s, c)
            _noise_1q(rho, q, p1q, gad1, f1)
        elif kind == KIND_RZ:
            dm_apply_diag(rho, _rz_phases(size, q, theta))
            _noise_1q(rho, q, p1q, gad1, f1)
        elif kind == KIND_RZZ:
            q2 = int(qb[g])
            dm_apply_diag(rho, _rzz_phases(size, q, q2, theta))
            if p2 > 0.0:
                dm_depolarize_2q(rho, q, q2, p2)
            if gad2[q] > 0.0 or f2[q] < 1.0:
                dm_thermal_1q(rho, q, gad2[q], f2[q])
            if gad2[q2] > 0.0 or f2[q2] < 1.0:
                dm_thermal_1q(rho, q2, gad2[q2], f2[q2])
    return rho


def _noise_1q(rho, q, p1q, gad1, f1):
    if p1q[q] > 0.0:
        dm_depolarize_1q(rho, q, p1q[q])
    if gad1[q] > 0.0 or f1[q] < 1.0:
        dm_thermal_1q(rho, q, gad1[q], f1[q])
