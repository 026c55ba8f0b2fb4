"""Numba-compiled circuit kernels; contracts identical to `_kernels_numpy`.

The fused runners keep the whole circuit inside one jitted call, which is what
makes shot-based optimization loops cheap at 5 qubits.  cache=True persists
compiled code across processes (worker pools pay no recompile).
"""

import math

import numpy as np
from numba import njit

KIND_H = 0
KIND_RZ = 1
KIND_RZZ = 2
KIND_RX = 3

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@njit(cache=True)
def sv_apply_1q(psi, q, m00, m01, m10, m11):
    step = 1 << q
    for base in range(0, psi.size, step << 1):
        for off in range(step):
            i0 = base + off
            i1 = i0 + step
            a0 = psi[i0]
            a1 = psi[i1]
            psi[i0] = m00 * a0 + m01 * a1
            psi[i1] = m10 * a0 + m11 * a1


@njit(cache=True)
def _sv_rz(psi, q, theta):
    ph0 = complex(math.cos(0.5 * theta), -math.sin(0.5 * theta))
    ph1 = np.conj(ph0)
    for i in range(psi.size):
        if (i >> q) & 1:
            psi[i] *= ph1
        else:
            psi[i] *= ph0


@njit(cache=True)
def _sv_rzz(psi, q1, q2, theta):
    ph0 = complex(math.cos(0.5 * theta), -math.sin(0.5 * theta))
    ph1 = np.conj(ph0)
    for i in range(psi.size):
        if ((i >> q1) ^ (i >> q2)) & 1:
            psi[i] *= ph1
        else:
            psi[i] *= ph0


@njit(cache=True)
def sv_run(n, kinds, qa, qb, thetas):
    size = 1 << n
    psi = np.zeros(size, dtype=np.complex128)
    psi[0] = 1.0
    for g in range(kinds.size):
        kind = kinds[g]
        q = qa[g]
        theta = thetas[g]
        if kind == KIND_H:
            sv_apply_1q(psi, q, _INV_SQRT2 + 0j, _INV_SQRT2 + 0j, _INV_SQRT2 + 0j, -_INV_SQRT2 + 0j)
        elif kind == KIND_RX:
            c = math.cos(0.5 * theta)
            s = math.sin(0.5 * theta)
            sv_apply_1q(psi, q, c + 0j, -1j * s, -1j * s, c + 0j)
        elif kind == KIND_RZ:
            _sv_rz(psi, q, theta)
        elif kind == KIND_RZZ:
            _sv_rzz(psi, q, qb[g], theta)
    return psi


@njit(cache=True)
def dm_apply_1q(rho, q, m00, m01, m10, m11):
    dim = rho.shape[0]
    step = 1 << q
    for base in range(0, dim, step << 1):
        for off in range(step):
            r0 = base + off
            r1 = r0 + step
            for j in range(dim):
                a0 = rho[r0, j]
                a1 = rho[r1, j]
                rho[r0, j] = m00 * a0 + m01 * a1
                rho[r1, j] = m10 * a0 + m11 * a1
    c00 = np.conj(m00)
    c01 = np.conj(m01)
    c10 = np.conj(m10)
    c11 = np.conj(m11)
    for i in range(dim):
        for base in range(0, dim, step << 1):
            for off in range(step):
                c0 = base + off
                c1 = c0 + step
                b0 = rho[i, c0]
                b1 = rho[i, c1]
                rho[i, c0] = c00 * b0 + c01 * b1
                rho[i, c1] = c10 * b0 + c11 * b1


@njit(cache=True)
def dm_apply_diag(rho, phases):
    dim = rho.shape[0]
    for i in range(dim):
        pi = phases[i]
        for j in range(dim):
            rho[i, j] *= pi * np.conj(phases[j])


@njit(cache=True)
def _rz_phases(size, q, theta):
    out = np.empty(size, dtype=np.complex128)
    ph0 = complex(math.cos(0.5 * theta), -math.sin(0.5 * theta))
    ph1 = np.conj(ph0)
    for i in range(size):
        if (i >> q) & 1:
            out[i] = ph1
        else:
            out[i] = ph0
    return out


@njit(cache=True)
def _rzz_phases(size, q1, q2, theta):
    out = np.empty(size, dtype=np.complex128)
    ph0 = complex(math.cos(0.5 * theta), -math.sin(0.5 * theta))
    ph1 = np.conj(ph0)
    for i in range(size):
        if ((i >> q1) ^ (i >> q2)) & 1:
            out[i] = ph1
        else:
            out[i] = ph0
    return out


@njit(cache=True)
def dm_thermal_1q(rho, q, gad, decay):
    dim = rho.shape[0]
    step = 1 << q
    for rbase in range(0, dim, step << 1):
        for roff in range(step):
            r0 = rbase + roff
            r1 = r0 + step
            for cbase in range(0, dim, step << 1):
                for coff in range(step):
                    c0 = cbase + coff
                    c1 = c0 + step
                    b00 = rho[r0, c0]
                    b01 = rho[r0, c1]
                    b10 = rho[r1, c0]
                    b11 = rho[r1, c1]
                    rho[r0, c0] = b00 + gad * b11
                    rho[r0, c1] = decay * b01
                    rho[r1, c0] = decay * b10
                    rho[r1, c1] = (1.0 - gad) * b11


@njit(cache=True)
def dm_depolarize_1q(rho, q, p):
    dim = rho.shape[0]
    step = 1 << q
    keep = 1.0 - p
    for rbase in range(0, dim, step << 1):
        for roff in range(step):
            r0 = rbase + roff
            r1 = r0 + step
            for cbase in range(0, dim, step << 1):
                for coff in range(step):
                    c0 = cbase + coff
                    c1 = c0 + step
                    b00 = rho[r0, c0]
                    b01 = rho[r0, c1]
                    b10 = rho[r1, c0]
                    b11 = rho[r1, c1]
                    t = 0.5 * p * (b00 + b11)
                    rho[r0, c0] = keep * b00 + t
                    rho[r0, c1] = keep * b01
                    rho[r1, c0] = keep * b10
                    rho[r1, c1] = keep * b11 + t


@njit(cache=True)
def _insert_two_bits(x, ql, qh):
    low = x & ((1 << ql) - 1)
    mid = (x >> ql) & ((1 << (qh - ql - 1)) - 1)
    high = x >> (qh - 1)
    return (high << (qh + 1)) | (mid << (ql + 1)) | low


@njit(cache=True)
def dm_depolarize_2q(rho, q1, q2, p):
    dim = rho.shape[0]
    ql = min(q1, q2)
    qh = max(q1, q2)
    bl = 1 << ql
    bh = 1 << qh
    rest = dim >> 2
    keep = 1.0 - p
    quarter = 0.25 * p
    for mr in range(rest):
        rb = _insert_two_bits(mr, ql, qh)
        r0 = rb
        r1 = rb | bl
        r2 = rb | bh
        r3 = rb | bh | bl
        for mc in range(rest):
            cb = _insert_two_bits(mc, ql, qh)
            c0 = cb
            c1 = cb | bl
            c2 = cb | bh
            c3 = cb | bh | bl
            tr = rho[r0, c0] + rho[r1, c1] + rho[r2, c2] + rho[r3, c3]
            add = quarter * tr
            rho[r0, c0] = keep * rho[r0, c0] + add
            rho[r0, c1] = keep * rho[r0, c1]
            rho[r0, c2] = keep * rho[r0, c2]
            rho[r0, c3] = keep * rho[r0, c3]
            rho[r1, c0] = keep * rho[r1, c0]
            rho[r1, c1] = keep * rho[r1, c1] + add
            rho[r1, c2] = keep * rho[r1, c2]
            rho[r1, c3] = keep * rho[r1, c3]
            rho[r2, c0] = keep * rho[r2, c0]
            rho[r2, c1] = keep * rho[r2, c1]
            rho[r2, c2] = keep * rho[r2, c2] + add
            rho[r2, c3] = keep * rho[r2, c3]
            rho[r3, c0] = keep * rho[r3, c0]
            rho[r3, c1] = keep * rho[r3, c1]
            rho[r3, c2] = keep * rho[r3, c2]
            rho[r3, c3] = keep * rho[r3, c3] + add


@njit(cache=True)
def _noise_1q(rho, q, p1q, gad1, f1):
    if p1q[q] > 0.0:
        dm_depolarize_1q(rho, q, p1q[q])
    if gad1[q] > 0.0 or f1[q] < 1.0:
        dm_thermal_1q(rho, q, gad1[q], f1[q])


@njit(cache=True)
def dm_run(n, kinds, qa, qb, thetas, p1q, gad1, f1, p2, gad2, f2):
    size = 1 << n
    rho = np.zeros((size, size), dtype=np.complex128)
    rho[0, 0] = 1.0
    for g in range(kinds.size):
        kind = kinds[g]
        q = qa[g]
        theta = thetas[g]
        if kind == KIND_H:
            dm_apply_1q(rho, q, _INV_SQRT2 + 0j, _INV_SQRT2 + 0j, _INV_SQRT2 + 0j, -_INV_SQRT2 + 0j)
            _noise_1q(rho, q, p1q, gad1, f1)
        elif kind == KIND_RX:
            c = math.cos(0.5 * theta)
            s = math.sin(0.5 * theta)
            dm_apply_1q(rho, q, c + 0j, -1j * s, -1j * s, c + 0j)
            _noise_1q(rho, q, p1q, gad1, f1)
        elif kind == KIND_RZ:
            dm_apply_diag(rho, _rz_phases(size, q, theta))
            _noise_1q(rho, q, p1q, gad1, f1)
        elif kind == KIND_RZZ:
            q2 = qb[g]
            dm_apply_diag(rho, _rzz_phases(size, q, q2, theta))
            if p2 > 0.0:
                dm_depolarize_2q(rho, q, q2, p2)
            if gad2[q] > 0.0 or f2[q] < 1.0:
                dm_thermal_1q(rho, q, gad2[q], f2[q])
            if gad2[q2] > 0.0 or f2[q2] < 1.0:
                dm_thermal_1q(rho, q2, gad2[q2], f2[q2])
    return rho
