"""Problem definitions and classical oracles: weighted MaxCut and the
transverse-field Ising model, with exact and greedy baselines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError
from .pauli import PauliSum, PauliTerm

BRUTE_FORCE_CAP = 22


@dataclass(frozen=True)
class MaxCutInstance:
    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        norm_edges = []
        for i, j, w in self.edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValueError(f"edge ({i},{j}) out of range")
            if w <= 0:
                raise ValueError(f"edge ({i},{j}) has non-positive weight {w}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm_edges.append((key[0], key[1], float(w)))
        object.__setattr__(self, "edges", tuple(norm_edges))

    @property
    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)


@dataclass(frozen=True)
class TfimInstance:
    n_sites: int
    couplings: tuple[tuple[float, ...], ...]
    g_x: float
    g_z: float

    def __post_init__(self):
        w = np.asarray(self.couplings, dtype=float)
        if w.shape != (self.n_sites, self.n_sites):
            raise ValueError("couplings must be an n x n matrix")
        if not np.allclose(w, w.T):
            raise ValueError("couplings must be symmetric")
        if np.abs(np.diag(w)).max(initial=0.0) != 0.0:
            raise ValueError("couplings must have zero diagonal")
        object.__setattr__(self, "couplings", tuple(tuple(row) for row in w))

    def coupling_matrix(self) -> np.ndarray:
        return np.asarray(self.couplings, dtype=float)


def maxcut_hamiltonian(m: MaxCutInstance) -> PauliSum:
    """sum over edges of (w/2)(Z_i Z_j - I); the identity offset is explicit."""
    n = m.n_vertices
    terms = []
    offset = 0.0
    for i, j, w in m.edges:
        terms.append(PauliTerm(n, 0, (1 << i) | (1 << j), w / 2.0))
        offset -= w / 2.0
    if offset:
        terms.append(PauliTerm.identity(n, offset))
    return PauliSum(n, terms)


def maxcut_cost(m: MaxCutInstance, x: str) -> float:
    """C(x) = sum w_ij (x_i x_j - 1)/2 in spin form: 0 for uncut, -w per cut edge."""
    if len(x) != m.n_vertices:
        raise ValueError(f"bitstring length {len(x)} != {m.n_vertices} vertices")
    bits = [int(ch) for ch in x]
    return sum(-w for i, j, w in m.edges if bits[i] != bits[j])


def _edge_arrays(m: MaxCutInstance):
    i = np.array([e[0] for e in m.edges], dtype=np.int64)
    j = np.array([e[1] for e in m.edges], dtype=np.int64)
    w = np.array([e[2] for e in m.edges], dtype=float)
    return i, j, w


def brute_force_maxcut(m: MaxCutInstance) -> tuple[str, float]:
    """Global minimum of maxcut_cost; the x <-> complement symmetry halves the
    search by fixing vertex 0 in subset 0."""
    n = m.n_vertices
    if n > BRUTE_FORCE_CAP:
        raise ResourceError(f"brute force capped at {BRUTE_FORCE_CAP} vertices")
    if not m.edges:
        return "0" * n, 0.0
    half = 1 << (n - 1)
    assign = np.arange(half, dtype=np.int64) << 1  # vertex 0 = bit 0 = 0
    ei, ej, ew = _edge_arrays(m)
    cost = np.zeros(half)
    for i, j, w in zip(ei, ej, ew):
        cut = ((assign >> i) ^ (assign >> j)) & 1
        cost -= w * cut
    best = int(np.argmin(cost))
    bits = assign[best]
    return "".join(str((bits >> q) & 1) for q in range(n)), float(cost[best])


def greedy_maxcut(m: MaxCutInstance, rng: np.random.Generator) -> tuple[str, float]:
    """Single-vertex-flip descent from a random assignment."""
    n = m.n_vertices
    bits = rng.integers(0, 2, size=n)
    ei, ej, ew = _edge_arrays(m) if m.edges else (np.array([], dtype=np.int64),) * 2 + (np.array([]),)
    improved = True
    while improved:
        improved = False
        for v in range(n):
            # gain of flipping v: cut edges at v become uncut and vice versa
            gain = 0.0
            for i, j, w in zip(ei, ej, ew):
                if i == v or j == v:
                    other = j if i == v else i
                    gain += -w if bits[v] == bits[other] else w
            if gain < 0:
                bits[v] ^= 1
                improved = True
    x = "".join(str(int(b)) for b in bits)
    return x, maxcut_cost(m, x)


def tfim_hamiltonian(t: TfimInstance) -> PauliSum:
    """sum_{i<j} w_ij Z_i Z_j + sum_i (g_x X_i + g_z Z_i), exactly as printed."""
    n = t.n_sites
    w = t.coupling_matrix()
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            if w[i, j] != 0.0:
                terms.append(PauliTerm(n, 0, (1 << i) | (1 << j), w[i, j]))
    for i in range(n):
        if t.g_x != 0.0:
            terms.append(PauliTerm(n, 1 << i, 0, t.g_x))
        if t.g_z != 0.0:
            terms.append(PauliTerm(n, 0, 1 << i, t.g_z))
    return PauliSum(n, terms)


def ising_chain(n: int, w: float = 1.0, g_x: float = 0.0, g_z: float = 0.0) -> TfimInstance:
    """Nearest-neighbor open chain with uniform coupling w."""
    if n < 2:
        raise ValueError("a chain needs at least 2 sites")
    mat = np.zeros((n, n))
    for i in range(n - 1):
        mat[i, i + 1] = mat[i + 1, i] = w
    return TfimInstance(n, tuple(tuple(row) for row in mat), g_x, g_z)


def tfim_from_maxcut(m: MaxCutInstance) -> TfimInstance:
    """The (g_x, g_z) = (0, 0) TFIM whose Hamiltonian is the MaxCut cost
    operator without its identity offset (couplings w_ij / 2)."""
    mat = np.zeros((m.n_vertices, m.n_vertices))
    for i, j, w in m.edges:
        mat[i, j] = mat[j, i] = w / 2.0
    return TfimInstance(m.n_vertices, tuple(tuple(row) for row in mat), 0.0, 0.0)


def random_maxcut(n: int, rng: np.random.Generator) -> MaxCutInstance:
    """Fully connected graph with weights uniform in (0, 1]."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((i, j, float(1.0 - rng.random())))
    return MaxCutInstance(n, tuple(edges))


def load_graph(path) -> MaxCutInstance:
    """Plain-text graph: one edge per line "i j w", 0-indexed, '#' comments."""
    edges = []
    max_vertex = -1
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i j w', got {raw!r}")
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            edges.append((i, j, w))
            max_vertex = max(max_vertex, i, j)
    if max_vertex < 0:
        raise ValueError(f"{path}: no edges")
    return MaxCutInstance(max_vertex + 1, tuple(edges))


def save_graph(m: MaxCutInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {m.n_vertices} vertices, {len(m.edges)} edges\n")
        for i, j, w in m.edges:
            fh.write(f"{i} {j} {w!r}\n")


def load_couplings(path) -> np.ndarray:
    """Whitespace-separated square matrix, '#' comments."""
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append([float(v) for v in line.split()])
    return np.asarray(rows, dtype=float)
