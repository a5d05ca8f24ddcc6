"""Exact dense simulation: the ground-truth backend and oracle for every
approximation in the package."""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse.linalg

from . import instrumentation, kernels
from .circuit import Circuit, Gate
from .errors import ResourceError
from .pauli import PauliSum, dense_matrix, expect_hermitian

STATEVECTOR_CAP = 14
GROUND_CAP = 12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


class StateVector:
    """2^n complex amplitudes; qubit 0 is the least-significant index bit."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray | None = None):
        if n > STATEVECTOR_CAP:
            raise ResourceError(f"n={n} exceeds statevector cap {STATEVECTOR_CAP}")
        self.n = n
        if amps is None:
            self.amps = np.zeros(1 << n, dtype=complex)
            self.amps[0] = 1.0
        else:
            self.amps = np.asarray(amps, dtype=complex)
            if self.amps.shape != (1 << n,):
                raise ValueError("amplitude vector has wrong length")

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def apply_gate(self, g: Gate) -> None:
        kind = g.kind
        if kind == "H":
            m = _H
        elif kind == "X":
            m = _X
        elif kind == "Y":
            m = _Y
        elif kind == "Z":
            m = _Z
        elif kind == "S":
            m = _S
        elif kind == "CNOT":
            kernels.apply_cnot(self.amps, g.qubits[0], g.qubits[1])
            return
        elif kind == "RZZ":
            kernels.apply_rzz(self.amps, g.qubits[0], g.qubits[1], g.theta)
            return
        else:
            h = g.theta / 2.0
            c, s = math.cos(h), math.sin(h)
            if kind == "RX":
                m = np.array([[c, -1j * s], [-1j * s, c]])
            elif kind == "RY":
                m = np.array([[c, -s], [s, c]])
            elif kind == "RZ":
                m = np.array([[c - 1j * s, 0], [0, c + 1j * s]])
            else:
                raise ValueError(kind)
        kernels.apply_1q(self.amps, g.qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def run(c: Circuit) -> StateVector:
    """Simulate the circuit from |0^n>.  Counted in the instrumentation."""
    instrumentation.bump("statevector_runs")
    state = StateVector(c.n)
    for g in c.gates:
        state.apply_gate(g)
    return state


def expectation(s: StateVector, h: PauliSum) -> float:
    """<s|h|s> for a Hermitian Pauli sum."""
    expect_hermitian(h)
    if h.n != s.n:
        raise ValueError(f"operator acts on {h.n} qubits, state has {s.n}")
    acc = 0.0 + 0.0j
    for t in h.terms:
        x, z, scalar = t.phase_mask_form()
        if x == 0 and z == 0:
            acc += scalar
        else:
            acc += scalar * kernels.pauli_expval(s.amps, x, z)
    if abs(acc.imag) > 1e-10:
        raise AssertionError(f"Hermitian expectation has imaginary residue {acc.imag}")
    return float(acc.real)


def bitstring(index: int, n: int) -> str:
    """Qubit 0 printed leftmost, matching the amplitude index convention."""
    return "".join(str((index >> q) & 1) for q in range(n))


def sample(s: StateVector, shots: int, rng: np.random.Generator) -> list[str]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(s.amps) ** 2
    probs = probs / probs.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    return [bitstring(int(i), s.n) for i in draws]


def _apply_pauli_sum(h: PauliSum, v: np.ndarray) -> np.ndarray:
    """Matrix-free h @ v using the bit-packed word action."""
    idx = np.arange(v.size)
    out = np.zeros_like(v)
    for t in h.terms:
        x, z, scalar = t.phase_mask_form()
        # W|j> = scalar * (-1)^{z.j} |j^x>, so (Wv)[i] = scalar*(-1)^{z.(i^x)} v[i^x]
        src = idx ^ x
        signs = 1.0 - 2.0 * (np.bitwise_count(src & z) & 1)
        out += scalar * signs * v[src]
    return out


def ground_energy(h: PauliSum) -> tuple[float, np.ndarray]:
    """Minimum eigenvalue and ground vector of a Hermitian Pauli sum.

    Dense eigensolve for n <= 8; matrix-free Lanczos for 8 < n <= 12.
    """
    expect_hermitian(h)
    if h.n > GROUND_CAP:
        raise ResourceError(f"n={h.n} exceeds ground-solver cap {GROUND_CAP}")
    if not h.terms:
        return 0.0, np.ones(1 << h.n, dtype=complex) / math.sqrt(1 << h.n)
    if h.n <= 8:
        vals, vecs = np.linalg.eigh(dense_matrix(h))
        return float(vals[0]), vecs[:, 0]
    dim = 1 << h.n
    op = scipy.sparse.linalg.LinearOperator(
        (dim, dim), matvec=lambda v: _apply_pauli_sum(h, v.astype(complex)), dtype=complex
    )
    vals, vecs = scipy.sparse.linalg.eigsh(op, k=1, which="SA", tol=1e-12, maxiter=50000)
    return float(vals[0]), vecs[:, 0]
