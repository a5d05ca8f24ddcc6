"""Approximate circuit evaluation by low-rank stabilizer decomposition.

Every non-Clifford rotation ``exp(-i (theta/2) P)`` splits each branch into
``cos(theta/2) * I`` and ``-i sin(theta/2) * P`` parts (both Clifford
actions); greedy pruning after each split discards the smallest branches
while the accumulated discarded amplitude mass stays within the error budget
delta, which bounds the L2 distance to the exact state by the triangle
inequality.

Branches are stored structure-of-arrays so Clifford gates and splits are
vectorized across all branches at once.
"""

from __future__ import annotations

import math

import numpy as np

from . import instrumentation, kernels
from .circuit import Circuit, Gate, on_grid, project_angle
from .errors import ContractError, DegenerateApproximationError
from .pauli import PauliSum, PauliTerm, expect_hermitian
from .stabilizer import (
    StabilizerState,
    _popcount,
    _word_vectors,
    inner_product,
    t_axis_rotation,
    t_cnot,
    t_h,
    t_pauli,
    t_s,
    t_x,
    t_y,
    t_z,
)

DENSE_EVAL_CAP = 12

_ROTATION_WORDS = {"RX": (1, 0), "RY": (1, 1), "RZ": (0, 1)}


class BranchSum:
    """Weighted list of phase-tracked stabilizer branches: sum_a b_a |phi_a>."""

    __slots__ = ("n", "xs", "zs", "rs", "anchors", "aamps", "amps", "budget_spent")

    def __init__(self, n: int):
        self.n = n
        self.xs = np.zeros((1, 2 * n, n), dtype=np.uint8)
        self.zs = np.zeros((1, 2 * n, n), dtype=np.uint8)
        self.rs = np.zeros((1, 2 * n), dtype=np.uint8)
        for q in range(n):
            self.xs[0, q, q] = 1
            self.zs[0, n + q, q] = 1
        self.anchors = np.zeros((1, n), dtype=np.uint8)
        self.aamps = np.ones(1, dtype=complex)
        self.amps = np.ones(1, dtype=complex)
        self.budget_spent = 0.0

    @property
    def k(self) -> int:
        return self.amps.shape[0]

    def branch_state(self, i: int) -> StabilizerState:
        """Materialize branch i as a phase-tracked StabilizerState (copy)."""
        s = StabilizerState.__new__(StabilizerState)
        s.n = self.n
        s.x = self.xs[i].copy()
        s.z = self.zs[i].copy()
        s.r = self.rs[i].copy()
        s.tracked = True
        s.anchor = self.anchors[i].copy()
        s.aamp = complex(self.aamps[i])
        return s

    # -- vectorized gate application across all branches

    def _rotation_mask(self, g: Gate) -> tuple[int, int]:
        if g.kind == "RZZ":
            return 0, (1 << g.qubits[0]) | (1 << g.qubits[1])
        xb, zb = _ROTATION_WORDS[g.kind]
        q = g.qubits[0]
        return xb << q, zb << q

    def apply_clifford_gate(self, g: Gate) -> None:
        kind = g.kind
        q = g.qubits[0]
        if kind == "H":
            kernels.batch_anchor_h(self.xs, self.zs, self.rs, self.anchors, self.aamps, q)
            t_h(self.xs, self.zs, self.rs, q)
        elif kind == "S":
            self.aamps *= np.where(self.anchors[:, q] == 1, 1j, 1.0)
            t_s(self.xs, self.zs, self.rs, q)
        elif kind == "X":
            self.anchors[:, q] ^= 1
            t_x(self.xs, self.zs, self.rs, q)
        elif kind == "Y":
            self.aamps *= np.where(self.anchors[:, q] == 0, 1j, -1j)
            self.anchors[:, q] ^= 1
            t_y(self.xs, self.zs, self.rs, q)
        elif kind == "Z":
            self.aamps *= np.where(self.anchors[:, q] == 1, -1.0, 1.0)
            t_z(self.xs, self.zs, self.rs, q)
        elif kind == "CNOT":
            t = g.qubits[1]
            self.anchors[:, t] ^= self.anchors[:, q]
            t_cnot(self.xs, self.zs, self.rs, q, t)
        else:
            raise ContractError(f"{kind} is not a Clifford gate")

    def apply_grid_rotation(self, g: Gate) -> None:
        grid = project_angle(g.theta)
        if grid == 0.0:
            return
        xp, zp = self._rotation_mask(g)
        half = grid / 2.0
        kernels.batch_anchor_rot(
            self.xs, self.zs, self.rs, self.anchors, self.aamps,
            xp, zp, _popcount(xp & zp) % 4,
            complex(math.cos(half)), -1j * math.sin(half),
        )
        xp_vec, zp_vec = _word_vectors(self.n, xp, zp)
        if grid == math.pi:
            t_pauli(self.xs, self.zs, self.rs, xp_vec, zp_vec)
        else:
            t_axis_rotation(
                self.xs, self.zs, self.rs, xp_vec, zp_vec,
                1 if grid == math.pi / 2 else -1,
            )

    def split_rotation(self, g: Gate) -> None:
        """Non-Clifford rotation: branch into the I part and the P part."""
        xp, zp = self._rotation_mask(g)
        half = g.theta / 2.0
        c, s = math.cos(half), math.sin(half)
        # P-branch: apply the word i^{|xp&zp|} X^xp Z^zp to copies
        xs2, zs2, rs2 = self.xs.copy(), self.zs.copy(), self.rs.copy()
        anchors2 = self.anchors.copy()
        ep = _popcount(xp & zp) % 4
        zp_vec = _word_vectors(self.n, xp, zp)[1]
        signs = 1.0 - 2.0 * ((self.anchors & zp_vec).sum(-1) & 1)
        aamps2 = self.aamps * (1j**ep) * signs
        qs = np.arange(self.n)
        anchors2 ^= ((xp >> qs) & 1).astype(np.uint8)
        xp_vec, zp_vec = _word_vectors(self.n, xp, zp)
        t_pauli(xs2, zs2, rs2, xp_vec, zp_vec)

        self.xs = np.concatenate([self.xs, xs2])
        self.zs = np.concatenate([self.zs, zs2])
        self.rs = np.concatenate([self.rs, rs2])
        self.anchors = np.concatenate([self.anchors, anchors2])
        self.aamps = np.concatenate([self.aamps, aamps2])
        self.amps = np.concatenate([self.amps * c, self.amps * (-1j * s)])


def prune(bs: BranchSum, delta: float) -> BranchSum:
    """Greedily discard smallest-|b| branches within the remaining budget.

    Mutates and returns bs; never discards the largest branch."""
    if delta <= 0.0 or bs.k <= 1:
        return bs
    mags = np.abs(bs.amps)
    order = np.argsort(mags, kind="stable")
    available = delta - bs.budget_spent
    cum = np.cumsum(mags[order])
    n_discard = int(np.searchsorted(cum, available + 1e-15, side="right"))
    n_discard = min(n_discard, bs.k - 1)
    if n_discard <= 0:
        return bs
    drop = order[:n_discard]
    keep = np.ones(bs.k, dtype=bool)
    keep[drop] = False
    bs.budget_spent += float(mags[drop].sum())
    bs.xs = bs.xs[keep]
    bs.zs = bs.zs[keep]
    bs.rs = bs.rs[keep]
    bs.anchors = bs.anchors[keep]
    bs.aamps = bs.aamps[keep]
    bs.amps = bs.amps[keep]
    return bs


def evolve(c: Circuit, delta: float) -> BranchSum:
    """Run the circuit as a branch sum with error budget delta (L2 bound)."""
    if delta < 0.0 or delta >= 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    instrumentation.bump("lowrank_evolutions")
    bs = BranchSum(c.n)
    for g in c.gates:
        if g.is_rotation:
            if on_grid(g.theta):
                bs.apply_grid_rotation(g)
            else:
                bs.split_rotation(g)
                prune(bs, delta)
        else:
            bs.apply_clifford_gate(g)
    if bs.k == 0:
        raise DegenerateApproximationError("no branches left after pruning")
    return bs


def dense(bs: BranchSum) -> np.ndarray:
    """Unnormalized dense amplitudes of the retained sum (n <= 12)."""
    if bs.n > DENSE_EVAL_CAP:
        raise ContractError(f"dense accumulation capped at n={DENSE_EVAL_CAP}")
    out = np.zeros(1 << bs.n, dtype=complex)
    kernels.batch_stab_dense_accum(
        bs.xs, bs.zs, bs.rs, bs.anchors, bs.aamps, bs.amps, out
    )
    return out


def retained_norm_sq(bs: BranchSum) -> float:
    return float(np.vdot(dense(bs), dense(bs)).real)


def expectation(bs: BranchSum, h: PauliSum, method: str = "auto") -> float:
    """<psi'|h|psi'> / <psi'|psi'> over the retained branches.

    "dense" accumulates the branches into one dense vector (desk scale);
    "pairwise" sums conj(b_a) b_b <phi_a|W|phi_b> with inner-product Pauli
    insertion.  Both compute the identical value.
    """
    if bs.k == 0:
        raise DegenerateApproximationError("empty branch sum")
    expect_hermitian(h)
    if method == "auto":
        method = "dense" if bs.n <= DENSE_EVAL_CAP else "pairwise"
    if method == "dense":
        psi = dense(bs)
        norm = float(np.vdot(psi, psi).real)
        acc = 0.0 + 0.0j
        for t in h.terms:
            x, z, scalar = t.phase_mask_form()
            if x == 0 and z == 0:
                acc += scalar * norm
            else:
                acc += scalar * kernels.pauli_expval(psi, x, z)
        val = acc / norm
    elif method == "pairwise":
        states = [bs.branch_state(i) for i in range(bs.k)]
        norm = 0.0 + 0.0j
        acc = 0.0 + 0.0j
        for b_idx, sb in enumerate(states):
            for a_idx, sa in enumerate(states):
                w = np.conj(bs.amps[a_idx]) * bs.amps[b_idx]
                norm += w * inner_product(sa, sb)
            for t in h.terms:
                inserted = sb.copy()
                if not t.is_identity:
                    inserted.apply_pauli_word(t.x, t.z)
                inserted.scale_phase(t.coeff)
                for a_idx, sa in enumerate(states):
                    w = np.conj(bs.amps[a_idx]) * bs.amps[b_idx]
                    acc += w * inner_product(sa, inserted)
        val = acc / norm
    else:
        raise ValueError(f"unknown expectation method {method!r}")
    if abs(val.imag) > 1e-9:
        raise AssertionError(f"Hermitian expectation has imaginary residue {val.imag}")
    return float(val.real)


def sample(bs: BranchSum, shots: int, rng: np.random.Generator) -> list[str]:
    """Bitstrings from the normalized |<x|psi'>|^2 distribution (desk scale)."""
    from .statevector import bitstring

    if bs.k == 0:
        raise DegenerateApproximationError("empty branch sum")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    psi = dense(bs)
    probs = np.abs(psi) ** 2
    probs /= probs.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    return [bitstring(int(i), bs.n) for i in draws]
