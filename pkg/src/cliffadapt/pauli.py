"""Exact algebra of n-qubit Pauli words and weighted Pauli sums.

Words are bit-packed: qubit ``q`` owns bit ``1 << q`` of two integer masks
``x`` and ``z``.  Letter encoding per qubit: I=(0,0), X=(1,0), Y=(1,1),
Z=(0,1).  The operator of a word is ``i**y_count * X^x Z^z`` (per-qubit
matrix product X then Z, so Y = i X Z).  In strings the leftmost letter is
qubit 0, matching the project-wide bitstring convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, DimensionError, ResourceError

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

COEFF_EPS = 1e-12  # terms below this magnitude are dropped after merges
DENSE_CAP = 12


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliTerm:
    """A weighted n-qubit Pauli word.  Immutable."""

    n: int
    x: int
    z: int
    coeff: complex = 1.0

    @classmethod
    def from_word(cls, word: str | Sequence[str], coeff: complex = 1.0) -> "PauliTerm":
        x = z = 0
        for q, letter in enumerate(word):
            bx, bz = _LETTER_TO_BITS[letter.upper()]
            x |= bx << q
            z |= bz << q
        return cls(len(word), x, z, complex(coeff))

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "PauliTerm":
        return cls(n, 0, 0, complex(coeff))

    @property
    def word(self) -> str:
        return "".join(
            _BITS_TO_LETTER[(self.x >> q) & 1, (self.z >> q) & 1] for q in range(self.n)
        )

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def support(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n) if (self.x >> q) & 1 or (self.z >> q) & 1)

    def phase_mask_form(self) -> tuple[int, int, complex]:
        """(x_mask, z_mask, scalar) with operator == scalar * X^x Z^z."""
        return self.x, self.z, self.coeff * (1j ** (self.y_count % 4))

    def commutes_with(self, other: "PauliTerm") -> bool:
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        return multiply(self, other)

    def scale(self, factor: complex) -> "PauliTerm":
        return PauliTerm(self.n, self.x, self.z, self.coeff * factor)

    def dense(self) -> np.ndarray:
        if self.n > DENSE_CAP:
            raise ResourceError(f"dense matrix for n={self.n} exceeds cap {DENSE_CAP}")
        # qubit 0 is the least significant index bit, so it is the last kron factor
        mats = [_SINGLE_QUBIT[letter] for letter in self.word]
        return self.coeff * reduce(np.kron, reversed(mats), np.eye(1, dtype=complex))

    def __str__(self) -> str:
        return f"{self.coeff}*{self.word}"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Exact product of two Pauli terms, phase folded into the coefficient."""
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} != {b.n}")
    x3, z3 = a.x ^ b.x, a.z ^ b.z
    # i-exponent: reassociate Y factors plus the Z-past-X swap of the middle
    exponent = (
        _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        - _popcount(x3 & z3)
        + 2 * _popcount(a.z & b.x)
    ) % 4
    return PauliTerm(a.n, x3, z3, a.coeff * b.coeff * (1j**exponent))


class PauliSum:
    """Canonical merged sum of Pauli terms with distinct words."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Iterable[PauliTerm] = ()):
        self.n = n
        merged: dict[tuple[int, int], complex] = {}
        for t in terms:
            if t.n != n:
                raise DimensionError(f"term on {t.n} qubits in sum on {n}")
            key = (t.x, t.z)
            merged[key] = merged.get(key, 0.0) + t.coeff
        self.terms: tuple[PauliTerm, ...] = tuple(
            PauliTerm(n, x, z, c)
            for (x, z), c in sorted(merged.items())
            if abs(c) >= COEFF_EPS
        )

    @classmethod
    def from_terms(cls, terms: Sequence[PauliTerm]) -> "PauliSum":
        if not terms:
            raise ValueError("cannot infer qubit count from an empty term list")
        return cls(terms[0].n, terms)

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n, ())

    @property
    def is_hermitian(self) -> bool:
        return all(abs(t.coeff.imag) < COEFF_EPS for t in self.terms)

    @property
    def is_anti_hermitian(self) -> bool:
        return all(abs(t.coeff.real) < COEFF_EPS for t in self.terms)

    def one_norm(self) -> float:
        return float(sum(abs(t.coeff) for t in self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n != other.n:
            raise DimensionError(f"qubit counts differ: {self.n} != {other.n}")
        return PauliSum(self.n, (*self.terms, *other.terms))

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scale(-1.0)

    def scale(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n, (t.scale(factor) for t in self.terms))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.terms))

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"PauliSum({self.n}, {format_pauli(self)!r})"


def commutator(h: PauliSum, a: PauliSum) -> PauliSum:
    """HA - AH in canonical merged form.

    Anti-Hermitian (purely imaginary coefficients) whenever both inputs are
    Hermitian.
    """
    if h.n != a.n:
        raise DimensionError(f"qubit counts differ: {h.n} != {a.n}")
    out: list[PauliTerm] = []
    for th in h.terms:
        for ta in a.terms:
            if th.commutes_with(ta):
                continue
            # anticommuting words: [th, ta] = 2 th ta
            out.append(multiply(th, ta).scale(2.0))
    return PauliSum(h.n, out)


def dense_matrix(h: PauliSum | PauliTerm, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a Pauli sum (Kronecker expansion)."""
    if isinstance(h, PauliTerm):
        h = PauliSum(h.n, [h])
    if h.n > cap:
        raise ResourceError(f"dense matrix for n={h.n} exceeds cap {cap}")
    dim = 1 << h.n
    out = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        out += t.dense()
    return out


_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*                      # leading sign
        (?:(?P<coeff>[0-9.]+(?:[eE][+-]?[0-9]+)?(?:j)?)\s*\*?\s*)?  # optional coefficient
        (?P<word>[IXYZixyz]+)\s*""",
    re.VERBOSE,
)


def parse_pauli(text: str, n: int | None = None) -> PauliSum:
    """Parse textual Pauli notation, e.g. ``"1.5*ZZI - 0.5*XII"``.

    Case-insensitive letters, ``*`` optional, term order irrelevant.  Both
    ASCII ``-`` and the typographic minus are accepted.
    """
    cleaned = text.replace("−", "-").strip()
    if not cleaned:
        if n is None:
            raise ValueError("empty expression with no qubit count")
        return PauliSum.zero(n)
    terms = []
    pos = 0
    while pos < len(cleaned):
        m = _TERM_RE.match(cleaned, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse Pauli expression at: {cleaned[pos:]!r}")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        coeff = complex(m.group("coeff")) if m.group("coeff") else 1.0
        terms.append(PauliTerm.from_word(m.group("word"), sign * coeff))
        pos = m.end()
    if n is None:
        n = terms[0].n
    for t in terms:
        if t.n != n:
            raise DimensionError("terms of mixed length in expression")
    return PauliSum(n, terms)


def format_pauli(h: PauliSum) -> str:
    if not h.terms:
        return "0"
    parts = []
    for i, t in enumerate(h.terms):
        c = t.coeff
        if abs(c.imag) < COEFF_EPS:
            c = c.real
            mag, neg = abs(c), c < 0
            body = f"{mag:.12g}*{t.word}"
        else:
            neg = False
            body = f"({c:.12g})*{t.word}"
        if i == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def expect_hermitian(h: PauliSum, what: str = "observable") -> None:
    if not h.is_hermitian:
        raise ContractError(f"{what} must be Hermitian (real coefficients)")
