"""Clifford tableau simulation with optional exact global-phase tracking.

Representation: the Aaronson-Gottesman tableau, rows 0..n-1 destabilizers and
rows n..2n-1 stabilizers, each row (x bits, z bits, sign bit r) encoding the
Hermitian Pauli ``(-1)^r i^{|x&z|} X^x Z^z``.

Phase tracking is opt-in.  A tracked state additionally carries an *anchor*:
one basis index together with its exact complex amplitude.  The pair pins the
global phase; any other amplitude is an O(n^2) group-element query.  Gate
application updates the anchor from the pre-gate state (one extra amplitude
query for H and for non-diagonal grid rotations, O(1) otherwise).

The overlap of two tracked states reduces to a quadratic Gauss sum over the
intersection of the two supports, evaluated by variable elimination in
O(n^3).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import instrumentation, kernels
from .circuit import GRID_EPS, Circuit, Gate, on_grid, project_angle
from .errors import ContractError, ResourceError
from .pauli import PauliTerm

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


# ---------------------------------------------------------------------------
# tableau row updates, vectorized over any leading batch dimensions
# (arrays shaped (..., rows, n) for x/z and (..., rows) for r)


def t_h(x, z, r, q):
    r ^= x[..., q] & z[..., q]
    tmp = x[..., q].copy()
    x[..., q] = z[..., q]
    z[..., q] = tmp


def t_s(x, z, r, q):
    r ^= x[..., q] & z[..., q]
    z[..., q] ^= x[..., q]


def t_x(x, z, r, q):
    r ^= z[..., q]


def t_y(x, z, r, q):
    r ^= x[..., q] ^ z[..., q]


def t_z(x, z, r, q):
    r ^= x[..., q]


def t_cnot(x, z, r, c, t):
    r ^= x[..., c] & z[..., t] & (x[..., t] ^ z[..., c] ^ 1)
    x[..., t] ^= x[..., c]
    z[..., c] ^= z[..., t]


def _word_vectors(n: int, xp: int, zp: int) -> tuple[np.ndarray, np.ndarray]:
    qs = np.arange(n)
    return ((xp >> qs) & 1).astype(np.uint8), ((zp >> qs) & 1).astype(np.uint8)


def t_pauli(x, z, r, xp_vec, zp_vec):
    """Conjugate all rows by a Pauli word: sign flips on anticommuting rows."""
    anti = ((x & zp_vec).sum(-1) + (z & xp_vec).sum(-1)) & 1
    r ^= anti.astype(np.uint8)


def t_axis_rotation(x, z, r, xp_vec, zp_vec, sgn: int):
    """Conjugate rows by exp(-i (pi/4) sgn P): anticommuting rows G -> -sgn*i P G.

    sgn=+1 realizes a theta=pi/2 rotation, sgn=-1 theta=3pi/2.
    """
    anti = (((x & zp_vec).sum(-1) + (z & xp_vec).sum(-1)) & 1).astype(bool)
    if not anti.any():
        return
    y_p = int((xp_vec & zp_vec).sum())
    y_g = (x & z).sum(-1).astype(np.int64)
    zp_dot_xg = (x & zp_vec).sum(-1).astype(np.int64)
    exponent = (-sgn + y_p + y_g + 2 * r.astype(np.int64) + 2 * zp_dot_xg) % 4
    new_x = x ^ xp_vec
    new_z = z ^ zp_vec
    new_y = (new_x & new_z).sum(-1).astype(np.int64)
    new_r = (((exponent - new_y) % 4) // 2).astype(np.uint8)
    x[anti] = new_x[anti]
    z[anti] = new_z[anti]
    r[anti] = new_r[anti]


# ---------------------------------------------------------------------------
# bit-packed helpers for group-element algebra


def _pack(row) -> int:
    v = 0
    for q in range(len(row)):
        if row[q]:
            v |= 1 << q
    return v


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _emul(e1, a1, b1, e2, a2, b2):
    return (e1 + e2 + 2 * _popcount(b1 & a2)) % 4, a1 ^ a2, b1 ^ b2


def _pivots_full(sx, sz, sr):
    """Echelon E-form pivots of the stabilizer x-rowspace plus Z-type residuals."""
    pivots: list[tuple[int, int, int, int]] = []
    zres: list[tuple[int, int]] = []
    n = sx.shape[0]
    for i in range(n):
        a, b = _pack(sx[i]), _pack(sz[i])
        e = (2 * int(sr[i]) + _popcount(a & b)) % 4
        for pb, pe, pa, pbb in pivots:
            if a & pb:
                e, a, b = _emul(e, a, b, pe, pa, pbb)
        if a == 0:
            if e % 2:
                raise AssertionError("non-Hermitian Z-type group element")
            zres.append((e, b))
            continue
        bit = a & (-a)
        for k, (pb, pe, pa, pbb) in enumerate(pivots):
            if pa & bit:
                ne, na, nb = _emul(pe, pa, pbb, e, a, b)
                pivots[k] = (pb, ne, na, nb)
        pivots.append((bit, e, a, b))
    return pivots, zres


def _support_point(sx, sz, sr) -> tuple[int, int]:
    """One basis index in the support, and the support dimension."""
    pivots, zres = _pivots_full(sx, sz, sr)
    # constraints b.y = e/2 (mod 2) from Z-type group elements i^e Z^b
    constraints: list[tuple[int, int, int]] = []  # (b, rhs, pivot bit)
    for e, b in zres:
        rhs = (e // 2) % 2
        for cb, crhs, cbit in constraints:
            if b & cbit:
                b ^= cb
                rhs ^= crhs
        if b == 0:
            if rhs:
                raise AssertionError("inconsistent stabilizer sign constraints")
            continue
        bit = b & (-b)
        constraints = [
            (cb ^ b, crhs ^ rhs, cbit) if cb & bit else (cb, crhs, cbit)
            for cb, crhs, cbit in constraints
        ]
        constraints.append((b, rhs, bit))
    y = 0
    for _cb, crhs, cbit in constraints:
        if crhs:
            y |= cbit
    return y, len(pivots)


# ---------------------------------------------------------------------------
# the state


class StabilizerState:
    """Tableau-backed stabilizer state of n qubits, initialized to |0^n>."""

    __slots__ = ("n", "x", "z", "r", "tracked", "anchor", "aamp")

    def __init__(self, n: int, track_phase: bool = False):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        for q in range(n):
            self.x[q, q] = 1  # destabilizer X_q
            self.z[n + q, q] = 1  # stabilizer Z_q
        self.tracked = track_phase
        self.anchor = np.zeros(n, dtype=np.uint8)
        self.aamp = 1.0 + 0.0j

    def copy(self) -> "StabilizerState":
        out = StabilizerState.__new__(StabilizerState)
        out.n = self.n
        out.x = self.x.copy()
        out.z = self.z.copy()
        out.r = self.r.copy()
        out.tracked = self.tracked
        out.anchor = self.anchor.copy()
        out.aamp = self.aamp
        return out

    # -- internal views for the batch kernels (leading axis of size 1)

    def _k3(self):
        return (
            self.x.reshape(1, 2 * self.n, self.n),
            self.z.reshape(1, 2 * self.n, self.n),
            self.r.reshape(1, 2 * self.n),
            self.anchor.reshape(1, self.n),
        )

    def _stab_rows(self):
        return self.x[self.n :], self.z[self.n :], self.r[self.n :]

    @property
    def anchor_int(self) -> int:
        return _pack(self.anchor)

    def amplitude(self, index: int) -> complex:
        """<index|state>; requires phase tracking."""
        if not self.tracked:
            raise ContractError("amplitude queries need a phase-tracked state")
        sx, sz, sr = self._stab_rows()
        return complex(kernels.stab_amplitude(sx, sz, sr, self.anchor, self.aamp, index))

    # -- gate application

    def apply_gate(self, g: Gate) -> None:
        kind = g.kind
        if kind in ("RX", "RY", "RZ", "RZZ"):
            if not on_grid(g.theta):
                raise ContractError(
                    f"{kind}({g.theta}) is not a grid-angle rotation; transpile first"
                )
            self._apply_grid_rotation(g)
            return
        q = g.qubits[0]
        if self.tracked:
            aq = int(self.anchor[q])
            if kind == "H":
                xs, zs, rs, anchors = self._k3()
                aamps = np.array([self.aamp], dtype=complex)
                kernels.batch_anchor_h(xs, zs, rs, anchors, aamps, q)
                self.aamp = complex(aamps[0])
            elif kind == "S":
                self.aamp *= _I_POW[aq]
            elif kind == "X":
                self.anchor[q] ^= 1
            elif kind == "Y":
                self.aamp *= 1.0j if aq == 0 else -1.0j
                self.anchor[q] ^= 1
            elif kind == "Z":
                if aq:
                    self.aamp = -self.aamp
            elif kind == "CNOT":
                if self.anchor[q]:
                    self.anchor[g.qubits[1]] ^= 1
        if kind == "H":
            t_h(self.x, self.z, self.r, q)
        elif kind == "S":
            t_s(self.x, self.z, self.r, q)
        elif kind == "X":
            t_x(self.x, self.z, self.r, q)
        elif kind == "Y":
            t_y(self.x, self.z, self.r, q)
        elif kind == "Z":
            t_z(self.x, self.z, self.r, q)
        elif kind == "CNOT":
            t_cnot(self.x, self.z, self.r, q, g.qubits[1])
        else:
            raise ContractError(f"{kind} is not a Clifford gate")

    def _rotation_word(self, g: Gate) -> tuple[int, int]:
        if g.kind == "RX":
            return 1 << g.qubits[0], 0
        if g.kind == "RY":
            return 1 << g.qubits[0], 1 << g.qubits[0]
        if g.kind == "RZ":
            return 0, 1 << g.qubits[0]
        return 0, (1 << g.qubits[0]) | (1 << g.qubits[1])  # RZZ

    def _apply_grid_rotation(self, g: Gate) -> None:
        grid = project_angle(g.theta)
        if grid == 0.0:
            return
        xp, zp = self._rotation_word(g)
        if self.tracked:
            half = grid / 2.0
            c_i = complex(math.cos(half))
            c_p = -1j * math.sin(half)
            xs, zs, rs, anchors = self._k3()
            aamps = np.array([self.aamp], dtype=complex)
            kernels.batch_anchor_rot(
                xs, zs, rs, anchors, aamps, xp, zp, _popcount(xp & zp) % 4, c_i, c_p
            )
            self.aamp = complex(aamps[0])
        xp_vec, zp_vec = _word_vectors(self.n, xp, zp)
        if grid == math.pi:
            t_pauli(self.x, self.z, self.r, xp_vec, zp_vec)
        else:
            t_axis_rotation(
                self.x, self.z, self.r, xp_vec, zp_vec, 1 if grid == math.pi / 2 else -1
            )

    def apply_pauli_word(self, xp: int, zp: int) -> None:
        """Left-multiply the state by the bare word i^{|xp&zp|} X^xp Z^zp."""
        if self.tracked:
            anchor_int = self.anchor_int
            e = _popcount(xp & zp) % 4
            sign = -1.0 if _popcount(zp & anchor_int) & 1 else 1.0
            self.aamp *= _I_POW[e] * sign
            qs = np.arange(self.n)
            self.anchor ^= ((xp >> qs) & 1).astype(np.uint8)
        xp_vec, zp_vec = _word_vectors(self.n, xp, zp)
        t_pauli(self.x, self.z, self.r, xp_vec, zp_vec)

    def scale_phase(self, factor: complex) -> None:
        if not self.tracked:
            raise ContractError("global phase is only defined for tracked states")
        self.aamp *= factor


def apply_clifford(s: StabilizerState, g: Gate) -> StabilizerState:
    """Functional wrapper: returns the updated state (mutates a copy)."""
    out = s.copy()
    out.apply_gate(g)
    return out


def run_clifford(c: Circuit, track_phase: bool = False) -> StabilizerState:
    """Simulate a Clifford-only circuit from |0^n>."""
    instrumentation.bump("stabilizer_runs")
    state = StabilizerState(c.n, track_phase=track_phase)
    for g in c.gates:
        state.apply_gate(g)
    return state


# ---------------------------------------------------------------------------
# expectations, sampling, dense bridge


def pauli_expectation(s: StabilizerState, p: PauliTerm) -> complex:
    """coeff * <s|word|s>, which is coeff * {-1, 0, +1}; O(n^2)."""
    if p.n != s.n:
        raise ContractError(f"operator on {p.n} qubits, state on {s.n}")
    if p.is_identity:
        return p.coeff
    xp_vec, zp_vec = _word_vectors(s.n, p.x, p.z)
    sx, sz, sr = s._stab_rows()
    anti_stab = (((sx & zp_vec).sum(-1) + (sz & xp_vec).sum(-1)) & 1).astype(bool)
    if anti_stab.any():
        return 0.0
    # decompose P over stabilizer generators using destabilizer pairings
    dx, dz = s.x[: s.n], s.z[: s.n]
    sel = ((((dx & zp_vec).sum(-1) + (dz & xp_vec).sum(-1)) & 1)).astype(bool)
    e, a, b = 0, 0, 0
    for i in np.nonzero(sel)[0]:
        ge = (2 * int(sr[i]) + _popcount(_pack(sx[i]) & _pack(sz[i]))) % 4
        e, a, b = _emul(e, a, b, ge, _pack(sx[i]), _pack(sz[i]))
    if a != p.x or b != p.z:
        raise AssertionError("destabilizer decomposition failed")
    ratio = _I_POW[(e - p.y_count) % 4]
    return p.coeff * ratio.real


def _rowsum_many(s: StabilizerState, targets: np.ndarray, src: int) -> None:
    """rows[targets] <- generator product row[src] * rows[targets], vectorized."""
    x, z, r = s.x, s.z, s.r
    y_src = int((x[src] & z[src]).sum())
    e_src = (2 * int(r[src]) + y_src) % 4
    y_t = (x[targets] & z[targets]).sum(-1).astype(np.int64)
    e_t = (2 * r[targets].astype(np.int64) + y_t) % 4
    cross = 2 * (z[src] & x[targets]).sum(-1).astype(np.int64)
    new_x = x[targets] ^ x[src]
    new_z = z[targets] ^ z[src]
    new_y = (new_x & new_z).sum(-1).astype(np.int64)
    e_new = (e_src + e_t + cross) % 4
    diff = (e_new - new_y) % 4
    if (diff % 2).any():
        raise AssertionError("rowsum produced a non-Hermitian row")
    x[targets] = new_x
    z[targets] = new_z
    r[targets] = (diff // 2).astype(np.uint8)


def measure_z(s: StabilizerState, q: int, rng: np.random.Generator) -> int:
    """Destructive Z measurement of qubit q with tableau collapse."""
    n = s.n
    stab_anti = np.nonzero(s.x[n:, q])[0]
    if stab_anti.size:
        p = int(stab_anti[0]) + n
        outcome = int(rng.integers(0, 2))
        others = np.nonzero(s.x[:, q])[0]
        others = others[others != p]
        if others.size:
            _rowsum_many(s, others, p)
        s.x[p - n] = s.x[p]
        s.z[p - n] = s.z[p]
        s.r[p - n] = s.r[p]
        s.x[p] = 0
        s.z[p] = 0
        s.z[p, q] = 1
        s.r[p] = outcome
        return outcome
    # deterministic outcome: accumulate the stabilizer product selected by
    # destabilizers that anticommute with Z_q
    sel = np.nonzero(s.x[:n, q])[0]
    e, a, b = 0, 0, 0
    for i in sel:
        row = int(i) + n
        ge = (2 * int(s.r[row]) + _popcount(_pack(s.x[row]) & _pack(s.z[row]))) % 4
        e, a, b = _emul(e, a, b, ge, _pack(s.x[row]), _pack(s.z[row]))
    if a != 0 or b != (1 << q):
        raise AssertionError("deterministic measurement decomposition failed")
    return 0 if e == 0 else 1


def measure_all(s: StabilizerState, rng: np.random.Generator) -> str:
    work = s.copy()
    work.tracked = False
    return "".join(str(measure_z(work, q, rng)) for q in range(s.n))


def sample(s: StabilizerState, shots: int, rng: np.random.Generator) -> list[str]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    return [measure_all(s, rng) for _ in range(shots)]


def to_statevector(s: StabilizerState):
    """Dense state; exact global phase for tracked states, canonical otherwise."""
    from .statevector import StateVector

    if s.n > 14:
        raise ResourceError(f"n={s.n} exceeds the dense-conversion cap")
    out = np.zeros(1 << s.n, dtype=complex)
    if s.tracked:
        anchor, aamp = s.anchor, s.aamp
    else:
        sx, sz, sr = s._stab_rows()
        y0, rdim = _support_point(sx, sz, sr)
        qs = np.arange(s.n)
        anchor = ((y0 >> qs) & 1).astype(np.uint8)
        aamp = 2.0 ** (-rdim / 2.0)
    kernels.batch_stab_dense_accum(
        s.x.reshape(1, 2 * s.n, s.n),
        s.z.reshape(1, 2 * s.n, s.n),
        s.r.reshape(1, 2 * s.n),
        anchor.reshape(1, s.n),
        np.array([aamp], dtype=complex),
        np.array([1.0 + 0.0j]),
        out,
    )
    return StateVector(s.n, out)


def validate(s: StabilizerState) -> bool:
    """Stabilizer-group validity: commuting, independent generators."""
    sx, sz, _ = s._stab_rows()
    sym = (sx.astype(int) @ sz.astype(int).T + sz.astype(int) @ sx.astype(int).T) % 2
    if sym.any():
        return False
    basis: dict[int, int] = {}  # leading bit -> reduced vector
    for i in range(s.n):
        v = (_pack(sx[i]) << s.n) | _pack(sz[i])
        while v:
            lead = 1 << (v.bit_length() - 1)
            if lead not in basis:
                basis[lead] = v
                break
            v ^= basis[lead]
        if v == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# exact overlap of tracked states


def _gauss_sum(c: list[int], m_mat: list[list[int]]) -> complex:
    """sum over u in F2^m of i^(sum c_j u_j + 2 sum_{j<k} M_jk u_j u_k).

    Standard variable elimination; returns the exact value as a complex float.
    """
    c = [v % 4 for v in c]
    m_mat = [row[:] for row in m_mat]
    active = list(range(len(c)))
    factor = 1.0 + 0.0j
    const = 0

    def add_scaled_xor(coef: int, subset: list[int]) -> None:
        coef %= 4
        if coef == 0:
            return
        for idx in subset:
            c[idx] = (c[idx] + coef) % 4
        if coef % 2:
            for a_i in range(len(subset)):
                for b_i in range(a_i + 1, len(subset)):
                    ia, ib = subset[a_i], subset[b_i]
                    m_mat[ia][ib] ^= 1
                    m_mat[ib][ia] ^= 1

    while active:
        j = active.pop()
        cj = c[j]
        coupled = [k for k in active if m_mat[j][k]]
        if cj % 2 == 1:
            s0 = 1 if cj == 1 else -1
            factor *= math.sqrt(2.0) * cmath.exp(1j * math.pi / 4 * s0)
            add_scaled_xor((-s0) % 4, coupled)
            continue
        s_plus = cj == 0
        if not coupled:
            if s_plus:
                factor *= 2.0
                continue
            return 0.0 + 0.0j
        # restriction q(u') = t with t=0 for +, 1 for -
        t = 0 if s_plus else 1
        piv = coupled[-1]
        rest = [k for k in coupled if k != piv]
        factor *= 2.0
        active.remove(piv)
        # substitute u_piv = t XOR xor(rest) into the remaining form
        c_piv = c[piv]
        links = [k for k in active if m_mat[piv][k]]
        if t:
            const = (const + c_piv) % 4
            add_scaled_xor((c_piv + 2 * c_piv) % 4, rest)
            for k in links:
                c[k] = (c[k] + 2) % 4
        else:
            add_scaled_xor(c_piv, rest)
        for k in links:
            for s_i in rest:
                if s_i == k:
                    c[k] = (c[k] + 2) % 4
                else:
                    m_mat[s_i][k] ^= 1
                    m_mat[k][s_i] ^= 1
    return factor * _I_POW[const]


def inner_product(a: StabilizerState, b: StabilizerState) -> complex:
    """Exact complex overlap <a|b> of two phase-tracked stabilizer states."""
    if not (a.tracked and b.tracked):
        raise ContractError("inner_product requires phase-tracked operands")
    if a.n != b.n:
        raise ContractError("qubit counts differ")
    sx_a, sz_a, sr_a = a._stab_rows()
    sx_b, sz_b, sr_b = b._stab_rows()
    piv_a, _ = _pivots_full(sx_a, sz_a, sr_a)
    piv_b, _ = _pivots_full(sx_b, sz_b, sr_b)
    basis_a = [p[2] for p in piv_a]
    basis_b = [p[2] for p in piv_b]
    anchor_a, anchor_b = a.anchor_int, b.anchor_int

    # one common support point: solve w1 ^ w2 = anchor_a ^ anchor_b; linear
    # dependencies between the two bases give the intersection subspace
    target = anchor_a ^ anchor_b
    ech: list[tuple[int, int, int]] = []  # (vec, tag over [basis_a|basis_b], pivot bit)
    null_tags: list[int] = []
    for idx, vec in enumerate(basis_a + basis_b):
        tag = 1 << idx
        for ev, et, ebit in ech:
            if vec & ebit:
                vec ^= ev
                tag ^= et
        if vec:
            ech.append((vec, tag, vec & (-vec)))
        else:
            null_tags.append(tag)
    sol_tag = 0
    res = target
    for ev, et, ebit in ech:
        if res & ebit:
            res ^= ev
            sol_tag ^= et
    if res:
        return 0.0 + 0.0j
    ra = len(basis_a)
    w1 = 0
    for i in range(ra):
        if (sol_tag >> i) & 1:
            w1 ^= basis_a[i]
    point_c = anchor_a ^ w1

    inter: list[int] = []
    for tag in null_tags:
        v = 0
        for i in range(ra):
            if (tag >> i) & 1:
                v ^= basis_a[i]
        inter.append(v)
    m = len(inter)

    def rho(x: int) -> complex:
        va = kernels.stab_amplitude(sx_a, sz_a, sr_a, a.anchor, a.aamp, x)
        vb = kernels.stab_amplitude(sx_b, sz_b, sr_b, b.anchor, b.aamp, x)
        return np.conj(va) * vb

    rho0 = rho(point_c)
    if m == 0:
        return complex(rho0)

    def theta(x: int) -> int:
        ratio = rho(x) / rho0
        k = round(cmath.phase(ratio) / (math.pi / 2)) % 4
        return k

    c_vec = [theta(point_c ^ inter[j]) for j in range(m)]
    m_mat = [[0] * m for _ in range(m)]
    for j in range(m):
        for k in range(j + 1, m):
            d = (theta(point_c ^ inter[j] ^ inter[k]) - c_vec[j] - c_vec[k]) % 4
            if d % 2:
                raise AssertionError("support phase function is not quadratic")
            m_mat[j][k] = m_mat[k][j] = d // 2
    return complex(rho0 * _gauss_sum(c_vec, m_mat))
