# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: dense gate application, Pauli expectations, and the
stabilizer-branch bridges (dense accumulation, amplitude queries, anchor
updates).  Semantics mirror cliffadapt._kernels_py exactly."""

from libc.math cimport cos, sin, sqrt

BACKEND = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

DEF MAXQ = 64

cdef inline double complex ipow(int e) nogil:
    e = e & 3
    if e == 0:
        return 1.0
    elif e == 1:
        return 1j
    elif e == 2:
        return -1.0
    return -1j


# ---------------------------------------------------------------------------
# dense statevector kernels


def apply_1q(double complex[::1] amps, int q,
             double complex u00, double complex u01,
             double complex u10, double complex u11):
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0, j
    cdef double complex a0, a1
    with nogil:
        while base < size:
            for j in range(base, base + stride):
                a0 = amps[j]
                a1 = amps[j + stride]
                amps[j] = u00 * a0 + u01 * a1
                amps[j + stride] = u10 * a0 + u11 * a1
            base += 2 * stride


def apply_cnot(double complex[::1] amps, int control, int target):
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t cbit = (<Py_ssize_t>1) << control
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << target
    cdef Py_ssize_t i
    cdef double complex tmp
    with nogil:
        for i in range(size):
            if (i & cbit) and not (i & tbit):
                tmp = amps[i]
                amps[i] = amps[i | tbit]
                amps[i | tbit] = tmp


def apply_rzz(double complex[::1] amps, int q1, int q2, double theta):
    cdef Py_ssize_t size = amps.shape[0]
    cdef double half = theta / 2.0
    cdef double complex pm = cos(half) - 1j * sin(half)
    cdef double complex pp = cos(half) + 1j * sin(half)
    cdef Py_ssize_t i
    with nogil:
        for i in range(size):
            if ((i >> q1) ^ (i >> q2)) & 1:
                amps[i] = amps[i] * pp
            else:
                amps[i] = amps[i] * pm


def pauli_expval(double complex[::1] amps, unsigned long long x, unsigned long long z):
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t i
    cdef unsigned long long perm
    cdef double complex acc = 0
    cdef double complex ai
    with nogil:
        for i in range(size):
            perm = (<unsigned long long>i) ^ x
            ai = amps[i]
            if __builtin_popcountll(perm & z) & 1:
                acc = acc - (ai.real - 1j * ai.imag) * amps[perm]
            else:
                acc = acc + (ai.real - 1j * ai.imag) * amps[perm]
    return complex(acc)


# ---------------------------------------------------------------------------
# stabilizer helpers (bit-packed E-form group elements)


cdef inline unsigned long long _pack_row(const unsigned char[:] row, int n) nogil:
    cdef unsigned long long v = 0
    cdef int q
    for q in range(n):
        if row[q]:
            v |= (<unsigned long long>1) << q
    return v


cdef int _pivots2(const unsigned char[:, :] sx, const unsigned char[:, :] sz,
                  const unsigned char[:] sr,
                  unsigned long long* pbit, int* pe,
                  unsigned long long* pa, unsigned long long* pb) nogil:
    cdef int n = <int>sx.shape[0]
    cdef int count = 0, i, k, q, e
    cdef unsigned long long a, b, bit
    for i in range(n):
        a = 0
        b = 0
        for q in range(n):
            if sx[i, q]:
                a |= (<unsigned long long>1) << q
            if sz[i, q]:
                b |= (<unsigned long long>1) << q
        e = (2 * sr[i] + __builtin_popcountll(a & b)) & 3
        for k in range(count):
            if a & pbit[k]:
                e = (e + pe[k] + 2 * __builtin_popcountll(b & pa[k])) & 3
                a ^= pa[k]
                b ^= pb[k]
        if a == 0:
            continue
        bit = a & (~a + 1)
        for k in range(count):
            if pa[k] & bit:
                pe[k] = (pe[k] + e + 2 * __builtin_popcountll(pb[k] & a)) & 3
                pa[k] ^= a
                pb[k] ^= b
        pbit[count] = bit
        pe[count] = e
        pa[count] = a
        pb[count] = b
        count += 1
    return count


cdef int _pivots3(const unsigned char[:, :, :] xs, const unsigned char[:, :, :] zs,
                  const unsigned char[:, :] rs, Py_ssize_t bi, int n,
                  unsigned long long* pbit, int* pe,
                  unsigned long long* pa, unsigned long long* pb) nogil:
    cdef int count = 0, i, k, q, e, row
    cdef unsigned long long a, b, bit
    for i in range(n):
        row = n + i
        a = 0
        b = 0
        for q in range(n):
            if xs[bi, row, q]:
                a |= (<unsigned long long>1) << q
            if zs[bi, row, q]:
                b |= (<unsigned long long>1) << q
        e = (2 * rs[bi, row] + __builtin_popcountll(a & b)) & 3
        for k in range(count):
            if a & pbit[k]:
                e = (e + pe[k] + 2 * __builtin_popcountll(b & pa[k])) & 3
                a ^= pa[k]
                b ^= pb[k]
        if a == 0:
            continue
        bit = a & (~a + 1)
        for k in range(count):
            if pa[k] & bit:
                pe[k] = (pe[k] + e + 2 * __builtin_popcountll(pb[k] & a)) & 3
                pa[k] ^= a
                pb[k] ^= b
        pbit[count] = bit
        pe[count] = e
        pa[count] = a
        pb[count] = b
        count += 1
    return count


cdef bint _solve(int count, unsigned long long* pbit, int* pe,
                 unsigned long long* pa, unsigned long long* pb,
                 unsigned long long target,
                 int* e_out, unsigned long long* a_out, unsigned long long* b_out) nogil:
    cdef int e = 0, k
    cdef unsigned long long a = 0, b = 0, res = target
    for k in range(count):
        if res & pbit[k]:
            e = (e + pe[k] + 2 * __builtin_popcountll(b & pa[k])) & 3
            a ^= pa[k]
            b ^= pb[k]
            res ^= pa[k]
    if res:
        return 0
    e_out[0] = e
    a_out[0] = a
    b_out[0] = b
    return 1


def stab_amplitude(const unsigned char[:, :] sx, const unsigned char[:, :] sz,
                   const unsigned char[:] sr, const unsigned char[:] anchor,
                   double complex aamp, unsigned long long y):
    cdef int n = <int>sx.shape[0]
    cdef unsigned long long pbit[MAXQ]
    cdef unsigned long long pa[MAXQ]
    cdef unsigned long long pb[MAXQ]
    cdef int pe[MAXQ]
    cdef int count, e
    cdef unsigned long long a, b, anchor_int
    anchor_int = _pack_row(anchor, n)
    if y == anchor_int:
        return complex(aamp)
    count = _pivots2(sx, sz, sr, pbit, pe, pa, pb)
    if not _solve(count, pbit, pe, pa, pb, y ^ anchor_int, &e, &a, &b):
        return 0j
    if __builtin_popcountll(b & anchor_int) & 1:
        return complex(-ipow(e) * aamp)
    return complex(ipow(e) * aamp)


def batch_stab_dense_accum(const unsigned char[:, :, :] xs, const unsigned char[:, :, :] zs,
                           const unsigned char[:, :] rs, const unsigned char[:, :] anchors,
                           const double complex[:] aamps, const double complex[:] weights,
                           double complex[::1] out):
    cdef Py_ssize_t k = xs.shape[0]
    cdef int n = <int>(xs.shape[1] // 2)
    cdef unsigned long long pbit[MAXQ]
    cdef unsigned long long pa[MAXQ]
    cdef unsigned long long pb[MAXQ]
    cdef int pe[MAXQ]
    cdef Py_ssize_t bi
    cdef int count, e, j, q
    cdef unsigned long long a, b, anchor_int, gray, g, m, total
    cdef double complex base
    with nogil:
        for bi in range(k):
            if weights[bi] == 0:
                continue
            count = _pivots3(xs, zs, rs, bi, n, pbit, pe, pa, pb)
            anchor_int = 0
            for q in range(n):
                if anchors[bi, q]:
                    anchor_int |= (<unsigned long long>1) << q
            base = weights[bi] * aamps[bi]
            out[anchor_int] += base
            e = 0
            a = 0
            b = 0
            gray = 0
            total = (<unsigned long long>1) << count
            for m in range(1, total):
                g = m ^ (m >> 1)
                j = __builtin_ctzll(g ^ gray)
                gray = g
                e = (e + pe[j] + 2 * __builtin_popcountll(b & pa[j])) & 3
                a ^= pa[j]
                b ^= pb[j]
                if __builtin_popcountll(b & anchor_int) & 1:
                    out[anchor_int ^ a] -= base * ipow(e)
                else:
                    out[anchor_int ^ a] += base * ipow(e)


def batch_anchor_h(const unsigned char[:, :, :] xs, const unsigned char[:, :, :] zs,
                   const unsigned char[:, :] rs, unsigned char[:, :] anchors,
                   double complex[:] aamps, int q):
    cdef Py_ssize_t k = xs.shape[0]
    cdef int n = <int>(xs.shape[1] // 2)
    cdef unsigned long long pbit[MAXQ]
    cdef unsigned long long pa[MAXQ]
    cdef unsigned long long pb[MAXQ]
    cdef int pe[MAXQ]
    cdef Py_ssize_t bi
    cdef int count, e, qq
    cdef unsigned long long a, b, anchor_int, bit
    cdef double complex a0, oth, v_keep, v_flip
    cdef double s = 1.0 / sqrt(2.0)
    bit = (<unsigned long long>1) << q
    with nogil:
        for bi in range(k):
            anchor_int = 0
            for qq in range(n):
                if anchors[bi, qq]:
                    anchor_int |= (<unsigned long long>1) << qq
            a0 = aamps[bi]
            count = _pivots3(xs, zs, rs, bi, n, pbit, pe, pa, pb)
            if _solve(count, pbit, pe, pa, pb, bit, &e, &a, &b):
                if __builtin_popcountll(b & anchor_int) & 1:
                    oth = -ipow(e) * a0
                else:
                    oth = ipow(e) * a0
            else:
                oth = 0
            if anchor_int & bit:
                v_keep = (oth - a0) * s
                v_flip = (oth + a0) * s
            else:
                v_keep = (a0 + oth) * s
                v_flip = (a0 - oth) * s
            if (v_keep.real * v_keep.real + v_keep.imag * v_keep.imag) >= (
                v_flip.real * v_flip.real + v_flip.imag * v_flip.imag
            ):
                aamps[bi] = v_keep
            else:
                anchors[bi, q] ^= 1
                aamps[bi] = v_flip


def batch_anchor_rot(const unsigned char[:, :, :] xs, const unsigned char[:, :, :] zs,
                     const unsigned char[:, :] rs, unsigned char[:, :] anchors,
                     double complex[:] aamps,
                     unsigned long long xp, unsigned long long zp, int ep,
                     double complex c_i, double complex c_p):
    cdef Py_ssize_t k = xs.shape[0]
    cdef int n = <int>(xs.shape[1] // 2)
    cdef unsigned long long pbit[MAXQ]
    cdef unsigned long long pa[MAXQ]
    cdef unsigned long long pb[MAXQ]
    cdef int pe[MAXQ]
    cdef Py_ssize_t bi
    cdef int count, e, qq
    cdef unsigned long long a, b, anchor_int
    cdef double complex a0, oth, v_keep, v_flip, phase_p
    phase_p = ipow(ep)
    with nogil:
        for bi in range(k):
            anchor_int = 0
            for qq in range(n):
                if anchors[bi, qq]:
                    anchor_int |= (<unsigned long long>1) << qq
            a0 = aamps[bi]
            if xp == 0:
                if __builtin_popcountll(zp & anchor_int) & 1:
                    aamps[bi] = a0 * (c_i - c_p * phase_p)
                else:
                    aamps[bi] = a0 * (c_i + c_p * phase_p)
                continue
            count = _pivots3(xs, zs, rs, bi, n, pbit, pe, pa, pb)
            if _solve(count, pbit, pe, pa, pb, xp, &e, &a, &b):
                if __builtin_popcountll(b & anchor_int) & 1:
                    oth = -ipow(e) * a0
                else:
                    oth = ipow(e) * a0
            else:
                oth = 0
            if __builtin_popcountll(zp & (anchor_int ^ xp)) & 1:
                v_keep = c_i * a0 - c_p * phase_p * oth
            else:
                v_keep = c_i * a0 + c_p * phase_p * oth
            if __builtin_popcountll(zp & anchor_int) & 1:
                v_flip = c_i * oth - c_p * phase_p * a0
            else:
                v_flip = c_i * oth + c_p * phase_p * a0
            if (v_keep.real * v_keep.real + v_keep.imag * v_keep.imag) >= (
                v_flip.real * v_flip.real + v_flip.imag * v_flip.imag
            ):
                aamps[bi] = v_keep
            else:
                for qq in range(n):
                    anchors[bi, qq] ^= (xp >> qq) & 1
                aamps[bi] = v_flip
