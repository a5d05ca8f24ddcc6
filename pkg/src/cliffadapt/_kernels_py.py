"""Pure-numpy fallback for the compiled kernels.

Same call surface as the Cython module ``_kernels``; selected by
``cliffadapt.kernels`` when the extension is unavailable or when
``CLIFFADAPT_PURE_PYTHON=1``.

Stabilizer helpers work on bit-packed integers internally.  Tableau rows are
uint8 arrays; the stabilizer half of a (2n x n) tableau is rows n..2n-1.
Group elements are kept in E-form ``i^e * X^a Z^b`` with e mod 4 and a, b
bit-packed (qubit q = bit q).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_SQRT1_2 = 1.0 / math.sqrt(2.0)
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


# ---------------------------------------------------------------------------
# dense statevector kernels


def apply_1q(amps, q, u00, u01, u10, u11):
    v = amps.reshape(-1, 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u00 * a0 + u01 * a1
    v[:, 1, :] = u10 * a0 + u11 * a1


def apply_cnot(amps, control, target):
    idx = np.arange(amps.size)
    sel = ((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)
    src = idx[sel]
    dst = src | (1 << target)
    amps[src], amps[dst] = amps[dst], amps[src].copy()


def apply_rzz(amps, q1, q2, theta):
    idx = np.arange(amps.size)
    odd = ((idx >> q1) ^ (idx >> q2)) & 1
    half = theta / 2.0
    amps *= np.where(odd == 1, np.exp(1j * half), np.exp(-1j * half))


def pauli_expval(amps, x, z):
    """<s| X^x Z^z |s> for bit-packed masks (no Y phase; caller folds i^y)."""
    idx = np.arange(amps.size)
    if x == 0:
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
        return complex(np.sum(signs * (amps.real**2 + amps.imag**2)))
    perm = idx ^ x
    signs = 1.0 - 2.0 * (np.bitwise_count(perm & z) & 1)
    return complex(np.sum(np.conj(amps) * signs * amps[perm]))


# ---------------------------------------------------------------------------
# stabilizer bit helpers


def _pack(row) -> int:
    v = 0
    for q in range(len(row)):
        if row[q]:
            v |= 1 << q
    return v


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _emul(e1, a1, b1, e2, a2, b2):
    """E-form product i^e1 X^a1 Z^b1 * i^e2 X^a2 Z^b2."""
    return (e1 + e2 + 2 * _popcount(b1 & a2)) % 4, a1 ^ a2, b1 ^ b2


def _pivots(sx, sz, sr):
    """Echelonized E-form group elements whose x-parts span the x-rowspace.

    sx, sz: (n, n) uint8 stabilizer rows; sr: (n,) sign bits.
    Returns a list of (pivot_bit, e, a, b); each pivot bit occurs in exactly
    one element.  Elements with zero x-part (Z-type) are dropped.
    """
    pivots = []
    n = sx.shape[0]
    for i in range(n):
        a = _pack(sx[i])
        b = _pack(sz[i])
        e = (2 * int(sr[i]) + _popcount(a & b)) % 4
        for pb, pe, pa, pbb in pivots:
            if a & pb:
                e, a, b = _emul(e, a, b, pe, pa, pbb)
        if a == 0:
            continue
        bit = a & (-a)
        # keep full reduced echelon: clear this bit from existing pivots
        for k, (pb, pe, pa, pbb) in enumerate(pivots):
            if pa & bit:
                ne, na, nb = _emul(pe, pa, pbb, e, a, b)
                pivots[k] = (pb, ne, na, nb)
        pivots.append((bit, e, a, b))
    return pivots


def _solve_element(pivots, target):
    """Group element with x-part == target, or None."""
    e, a, b = 0, 0, 0
    res = target
    for pb, pe, pa, pbb in pivots:
        if res & pb:
            e, a, b = _emul(e, a, b, pe, pa, pbb)
            res ^= pa
    if res:
        return None
    return e, a, b


def _amp_from_element(elem, anchor_int, aamp):
    e, _a, b = elem
    sign = -1.0 if _popcount(b & anchor_int) & 1 else 1.0
    return _I_POW[e] * sign * aamp


def stab_amplitude(sx, sz, sr, anchor, aamp, y):
    """Basis amplitude <y|state> from the anchor; y is a bit-packed int."""
    anchor_int = _pack(anchor)
    if y == anchor_int:
        return complex(aamp)
    elem = _solve_element(_pivots(sx, sz, sr), y ^ anchor_int)
    if elem is None:
        return 0.0 + 0.0j
    return _amp_from_element(elem, anchor_int, aamp)


def _dense_accum_one(sx, sz, sr, anchor, aamp, weight, out):
    pivots = _pivots(sx, sz, sr)
    anchor_int = _pack(anchor)
    base = weight * aamp
    out[anchor_int] += base
    r = len(pivots)
    e, a, b = 0, 0, 0
    gray = 0
    for m in range(1, 1 << r):
        g = m ^ (m >> 1)
        j = (g ^ gray).bit_length() - 1
        gray = g
        _pb, pe, pa, pbb = pivots[j]
        e, a, b = _emul(e, a, b, pe, pa, pbb)
        sign = -1.0 if _popcount(b & anchor_int) & 1 else 1.0
        out[anchor_int ^ a] += base * _I_POW[e] * sign


def batch_stab_dense_accum(xs, zs, rs, anchors, aamps, weights, out):
    """out += sum_k weights[k] * dense(branch k); tableaus are (k, 2n, n)."""
    k, two_n, n = xs.shape
    for i in range(k):
        if weights[i] == 0:
            continue
        _dense_accum_one(
            xs[i, n:, :], zs[i, n:, :], rs[i, n:], anchors[i], aamps[i], weights[i], out
        )


def batch_anchor_h(xs, zs, rs, anchors, aamps, q):
    """Anchor updates for H on qubit q, computed against the PRE-gate tableau."""
    k, two_n, n = xs.shape
    bit = 1 << q
    for i in range(k):
        sx, sz, sr = xs[i, n:, :], zs[i, n:, :], rs[i, n:]
        anchor_int = _pack(anchors[i])
        a0 = complex(aamps[i])
        oth = stab_amplitude(sx, sz, sr, anchors[i], a0, anchor_int ^ bit)
        if anchor_int & bit:
            v_keep = (oth - a0) * _SQRT1_2
            v_flip = (oth + a0) * _SQRT1_2
        else:
            v_keep = (a0 + oth) * _SQRT1_2
            v_flip = (a0 - oth) * _SQRT1_2
        if abs(v_keep) >= abs(v_flip):
            aamps[i] = v_keep
        else:
            anchors[i, q] ^= 1
            aamps[i] = v_flip


def batch_anchor_rot(xs, zs, rs, anchors, aamps, xp, zp, ep, c_i, c_p):
    """Anchor updates for c_i * I + c_p * P with P = i^ep X^xp Z^zp (PRE-gate)."""
    k, two_n, n = xs.shape
    phase_p = _I_POW[ep % 4]
    for i in range(k):
        anchor_int = _pack(anchors[i])
        a0 = complex(aamps[i])
        if xp == 0:
            sign = -1.0 if _popcount(zp & anchor_int) & 1 else 1.0
            aamps[i] = a0 * (c_i + c_p * phase_p * sign)
            continue
        sx, sz, sr = xs[i, n:, :], zs[i, n:, :], rs[i, n:]
        oth = stab_amplitude(sx, sz, sr, anchors[i], a0, anchor_int ^ xp)
        sign_keep = -1.0 if _popcount(zp & (anchor_int ^ xp)) & 1 else 1.0
        sign_flip = -1.0 if _popcount(zp & anchor_int) & 1 else 1.0
        v_keep = c_i * a0 + c_p * phase_p * sign_keep * oth
        v_flip = c_i * oth + c_p * phase_p * sign_flip * a0
        if abs(v_keep) >= abs(v_flip):
            aamps[i] = v_keep
        else:
            for q in range(n):
                anchors[i, q] ^= (xp >> q) & 1
            aamps[i] = v_flip
