"""Gate-level circuit IR, the layered ansatz, and Clifford-point projection.

Angle convention: a rotation gate with parameter theta implements
``exp(-i (theta/2) P)`` for its axis word P.  Grid angles are the exact
floats ``0, pi/2, pi, 3*pi/2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import NonFactorizableMixerError
from .pauli import PauliSum

ROTATION_KINDS = frozenset({"RX", "RY", "RZ", "RZZ"})
CLIFFORD_KINDS = frozenset({"H", "X", "Y", "Z", "S", "CNOT"})
GATE_KINDS = ROTATION_KINDS | CLIFFORD_KINDS

GRID = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
GRID_EPS = 1e-12


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        two_qubit = self.kind in ("RZZ", "CNOT")
        if two_qubit:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.kind} needs 2 distinct qubits, got {self.qubits}")
        elif len(self.qubits) != 1:
            raise ValueError(f"{self.kind} acts on exactly 1 qubit, got {self.qubits}")
        if self.kind in ROTATION_KINDS:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{self.kind} needs a finite angle, got {self.theta}")
        elif self.theta is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATION_KINDS


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n for q in g.qubits):
                raise ValueError(f"gate {g} out of range for n={self.n}")

    def __len__(self) -> int:
        return len(self.gates)

    def extended(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n, (*self.gates, *gates))

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "gates": [
                {"kind": g.kind, "qubits": list(g.qubits)}
                | ({"theta": g.theta} if g.theta is not None else {})
                for g in self.gates
            ],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        payload = json.loads(text)
        gates = tuple(
            Gate(g["kind"], tuple(g["qubits"]), g.get("theta")) for g in payload["gates"]
        )
        return cls(payload["n"], gates)


def project_angle(theta: float) -> float:
    """Nearest element of the {0, pi/2, pi, 3pi/2} grid, distance on the circle.

    Exact ties round toward the smaller grid index.
    """
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta}")
    t = math.fmod(theta, 2 * math.pi)
    if t < 0:
        t += 2 * math.pi
    best, best_d = GRID[0], None
    for g in GRID:
        d = abs(t - g)
        d = min(d, 2 * math.pi - d)
        if best_d is None or d < best_d:
            best, best_d = g, d
    return best


def on_grid(theta: float, eps: float = GRID_EPS) -> bool:
    """True when theta is within eps of a multiple of pi/2 (mod 2pi)."""
    r = math.fmod(theta, math.pi / 2)
    return min(abs(r), math.pi / 2 - abs(r)) <= eps


def count_non_clifford(c: Circuit) -> int:
    """Rotations whose angle is off the pi/2 grid (the T-count proxy)."""
    return sum(1 for g in c.gates if g.is_rotation and not on_grid(g.theta))


# Gate realizations of projected rotations, up to global phase.
# S*Z = diag(1, -i) is the S-dagger equivalent; sequences are in time order.
_RZ_REAL = {
    GRID[0]: (),
    GRID[1]: ("S",),
    GRID[2]: ("Z",),
    GRID[3]: ("Z", "S"),
}


def _basis_change(letter: str, q: int) -> tuple[tuple[Gate, ...], tuple[Gate, ...]]:
    """Gates C with C P C^dag = Z for a single-qubit axis letter, and C^dag."""
    if letter == "Z":
        return (), ()
    if letter == "X":
        g = (Gate("H", (q,)),)
        return g, g
    if letter == "Y":
        # C = H S^dag: apply Z, S, H in time order; inverse is H then S
        fwd = (Gate("Z", (q,)), Gate("S", (q,)), Gate("H", (q,)))
        inv = (Gate("H", (q,)), Gate("S", (q,)))
        return fwd, inv
    raise ValueError(f"no basis change for letter {letter!r}")


def transpile_to_clifford(c: Circuit) -> Circuit:
    """Project every rotation angle onto the grid and realize it as Clifford gates."""
    out: list[Gate] = []
    for g in c.gates:
        if not g.is_rotation:
            out.append(g)
            continue
        grid = project_angle(g.theta)
        if g.kind == "RZ":
            out.extend(Gate(k, g.qubits) for k in _RZ_REAL[grid])
        elif g.kind == "RX":
            seq = _RZ_REAL[grid]
            if seq:
                out.append(Gate("H", g.qubits))
                out.extend(Gate(k, g.qubits) for k in seq)
                out.append(Gate("H", g.qubits))
        elif g.kind == "RY":
            seq = _RZ_REAL[grid]
            if seq:
                fwd, inv = _basis_change("Y", g.qubits[0])
                out.extend(fwd)
                out.extend(Gate(k, g.qubits) for k in seq)
                out.extend(inv)
        elif g.kind == "RZZ":
            seq = _RZ_REAL[grid]
            if seq:
                i, j = g.qubits
                out.append(Gate("CNOT", (i, j)))
                out.extend(Gate(k, (j,)) for k in seq)
                out.append(Gate("CNOT", (i, j)))
    return Circuit(c.n, tuple(out))


class CliffordPointVector:
    """A parameter vector whose entries all lie on the 4-angle grid."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[float]):
        vals = tuple(float(v) for v in values)
        for v in vals:
            if v not in GRID:
                raise ValueError(f"{v} is not one of the grid angles {GRID}")
        self.values = vals

    @classmethod
    def from_indices(cls, indices: Sequence[int]) -> "CliffordPointVector":
        return cls(tuple(GRID[i % 4] for i in indices))

    @classmethod
    def zeros(cls, m: int) -> "CliffordPointVector":
        return cls((0.0,) * m)

    def to_indices(self) -> tuple[int, ...]:
        return tuple(GRID.index(v) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        return isinstance(other, CliffordPointVector) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"CliffordPointVector({self.values})"

    @staticmethod
    def enumerate_all(m: int):
        """All 4^m grid vectors of length m (test support)."""
        for combo in product(range(4), repeat=m):
            yield CliffordPointVector.from_indices(combo)


@dataclass
class Ansatz:
    """Layered alternating-operator ansatz: p cost/mixer pairs on a reference state."""

    n: int
    cost_ops: PauliSum
    mixers: list[PauliSum] = field(default_factory=list)
    params: list[tuple[float, float]] = field(default_factory=list)
    reference_state: str = "plus_all"

    def __post_init__(self):
        if self.cost_ops.n != self.n:
            raise ValueError("cost operator qubit count mismatch")
        if len(self.mixers) != len(self.params):
            raise ValueError("one (gamma, beta) pair per mixer layer required")
        for m in self.mixers:
            if not m.is_hermitian:
                raise ValueError("mixers must be Hermitian")

    @property
    def p(self) -> int:
        return len(self.mixers)

    def flat_params(self) -> np.ndarray:
        return np.array([v for pair in self.params for v in pair], dtype=float)

    def with_params(self, flat: Sequence[float]) -> "Ansatz":
        if len(flat) != 2 * self.p:
            raise ValueError(f"expected {2 * self.p} parameters, got {len(flat)}")
        pairs = [(float(flat[2 * k]), float(flat[2 * k + 1])) for k in range(self.p)]
        return Ansatz(self.n, self.cost_ops, list(self.mixers), pairs, self.reference_state)


def _pauli_rotation_gates(term, theta: float) -> list[Gate]:
    """Gates for exp(-i c theta_base P) with angle folded by the caller."""
    letters = [(q, term.word[q]) for q in term.support()]
    if len(letters) == 1:
        q, letter = letters[0]
        return [Gate("R" + letter, (q,), theta)]
    if len(letters) == 2:
        (qa, la), (qb, lb) = letters
        fwd_a, inv_a = _basis_change(la, qa)
        fwd_b, inv_b = _basis_change(lb, qb)
        return [*fwd_a, *fwd_b, Gate("RZZ", (qa, qb), theta), *inv_b, *inv_a]
    raise ValueError(f"rotation about weight-{len(letters)} word {term.word} unsupported")


def cost_layer_gates(cost_ops: PauliSum, gamma: float) -> list[Gate]:
    """Per-term rotations realizing the cost-layer exponential.

    Terms are emitted in canonical order; for cost Hamiltonians with
    non-commuting terms (TFIM with a transverse field) the layer is the
    per-term product, which is what defines the ansatz.  Identity terms only
    shift the global phase and are skipped.
    """
    gates: list[Gate] = []
    for t in cost_ops.terms:
        if t.is_identity:
            continue
        angle = 2.0 * t.coeff.real * gamma
        gates.extend(_pauli_rotation_gates(t, angle))
    return gates


def mixer_gates(mixer: PauliSum, beta: float) -> list[Gate]:
    """Gates for exp(-i mixer beta); mixer terms must pairwise commute."""
    terms = mixer.terms
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if not terms[i].commutes_with(terms[j]):
                raise NonFactorizableMixerError(
                    f"mixer {mixer} has non-commuting terms; its exponential "
                    "does not factor into per-term rotations"
                )
    gates: list[Gate] = []
    for t in terms:
        if t.is_identity:
            continue
        gates.extend(_pauli_rotation_gates(t, 2.0 * t.coeff.real * beta))
    return gates


def build_circuit(a: Ansatz) -> Circuit:
    """Emit the bound circuit: reference wall, then p cost/mixer blocks."""
    gates: list[Gate] = []
    if a.reference_state == "plus_all":
        gates.extend(Gate("H", (q,)) for q in range(a.n))
    elif a.reference_state != "zeros":
        raise ValueError(f"unknown reference state {a.reference_state!r}")
    for (gamma, beta), mixer in zip(a.params, a.mixers):
        gates.extend(cost_layer_gates(a.cost_ops, gamma))
        gates.extend(mixer_gates(mixer, beta))
    return Circuit(a.n, tuple(gates))


def gate_unitary(g: Gate) -> np.ndarray:
    """Dense matrix of a single gate on its own qubits (test oracle support)."""
    if g.kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if g.kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if g.kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if g.kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if g.kind == "S":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if g.kind == "CNOT":
        # qubit order (control, target) with target the faster index
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    h = g.theta / 2.0
    c, s = math.cos(h), math.sin(h)
    if g.kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if g.kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.kind == "RZ":
        return np.array([[np.exp(-1j * h), 0], [0, np.exp(1j * h)]], dtype=complex)
    if g.kind == "RZZ":
        return np.diag(np.exp(-1j * h * np.array([1, -1, -1, 1])))
    raise ValueError(g.kind)
