"""Lattice encodings, qubit layouts and the sorted representative basis.

A lattice point on the periodic ``D``-dimensional grid with ``N = 2**n``
sites per axis is identified with an interleaved key whose bit ``i*D + d`` is
bit ``i`` of coordinate ``d``.  Keys order points lexicographically by their
most significant coordinate bits first, which is the order used to pick the
representative of each antisymmetric state: particle registers hold strictly
increasing keys.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .pauli import ResourceCapError

__all__ = [
    "brgc_encode",
    "brgc_decode",
    "brgc_sequence",
    "interleave_key",
    "deinterleave_key",
    "shift_key",
    "register_value",
    "point_from_register",
    "register_point_table",
    "QubitLayout",
    "QubitRole",
    "basis_state_index",
    "FermionBasis",
    "enumerate_basis",
    "sorting_sign",
    "CODES",
]

CODES = ("brgc", "binary")


def brgc_encode(x: int, n: int | None = None) -> int:
    """Binary-reflected Gray code of ``x``; ``n`` only bounds the input."""
    if x < 0 or (n is not None and x >= 1 << n):
        raise ValueError(f"{x} is outside the range of an {n}-bit register")
    return x ^ (x >> 1)


def brgc_decode(g: int) -> int:
    x = 0
    while g:
        x ^= g
        g >>= 1
    return x


def brgc_sequence(n: int) -> list[int]:
    return [brgc_encode(x) for x in range(1 << n)]


def interleave_key(point: Sequence[int], n: int, D: int | None = None) -> int:
    """Interleave the coordinates of ``point`` (each below ``2**n``) into one key."""
    if D is not None and len(point) != D:
        raise ValueError(f"expected {D} coordinates, got {len(point)}")
    D = len(point)
    key = 0
    for d, coord in enumerate(point):
        if not 0 <= coord < 1 << n:
            raise ValueError(f"coordinate {coord} is outside 0..{(1 << n) - 1}")
        for i in range(n):
            key |= ((coord >> i) & 1) << (i * D + d)
    return key


def deinterleave_key(key: int, n: int, D: int) -> tuple[int, ...]:
    coords = [0] * D
    for i in range(n):
        for d in range(D):
            coords[d] |= ((key >> (i * D + d)) & 1) << i
    return tuple(coords)


def shift_key(key: int, n: int, D: int, axis: int, step: int) -> int:
    """Key of the periodic neighbour ``point + step * e_axis``."""
    coords = list(deinterleave_key(key, n, D))
    coords[axis] = (coords[axis] + step) % (1 << n)
    return interleave_key(coords, n)


def register_value(point: Sequence[int], n: int, code: str = "brgc") -> int:
    """Particle-register content for ``point`` under ``code``.

    The register uses the interleaved bit order of the key; with ``"brgc"``
    each axis register holds the Gray code of its coordinate.
    """
    if code == "brgc":
        point = [brgc_encode(c) for c in point]
    elif code != "binary":
        raise ValueError(f"unknown code {code!r}; expected one of {CODES}")
    return interleave_key(point, n)


def point_from_register(value: int, n: int, D: int, code: str = "brgc") -> tuple[int, ...]:
    coords = deinterleave_key(value, n, D)
    if code == "brgc":
        coords = tuple(brgc_decode(c) for c in coords)
    return coords


def register_point_table(n: int, D: int, code: str = "brgc") -> np.ndarray:
    """``table[v]`` is the lattice key of register content ``v``."""
    return np.array(
        [interleave_key(point_from_register(v, n, D, code), n) for v in range(1 << (n * D))],
        dtype=np.int64,
    )


# ---------------------------------------------------------------------------
# qubit layout


@dataclass(frozen=True)
class QubitRole:
    register: str
    particle: int = -1
    bit: int = -1
    axis: int = -1


@dataclass
class QubitLayout:
    """Global qubit index assignment.

    Base qubit ``(a, i, d)`` (particle, bit, axis) sits at
    ``a*n*D + i*D + d``, so particle ``a`` owns a contiguous block whose
    content is its interleaved register value.  Ancillas are appended by
    :meth:`allocate` in call order, which keeps layouts reproducible.

    Parameters
    ----------
    A, n, D : int
        Particle count, bits per axis and dimension.
    code : {"brgc", "binary"}
        Encoding stored in the base registers.
    """

    A: int
    n: int
    D: int
    code: str = "brgc"
    roles: list[QubitRole] = field(default_factory=list)
    _blocks: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.code not in CODES:
            raise ValueError(f"unknown code {self.code!r}; expected one of {CODES}")
        if self.A < 1 or self.n < 1 or self.D < 1:
            raise ValueError("A, n and D must all be positive")
        if not self.roles:
            for a in range(self.A):
                for i in range(self.n):
                    for d in range(self.D):
                        self.roles.append(QubitRole("base", a, i, d))

    @property
    def block_size(self) -> int:
        return self.n * self.D

    @property
    def num_base(self) -> int:
        return self.A * self.block_size

    @property
    def num_qubits(self) -> int:
        return len(self.roles)

    def base(self, a: int, i: int, d: int) -> int:
        if not (0 <= a < self.A and 0 <= i < self.n and 0 <= d < self.D):
            raise IndexError(f"no base qubit ({a}, {i}, {d})")
        return a * self.block_size + i * self.D + d

    def particle_block(self, a: int, register: str = "base") -> list[int]:
        """Qubits of particle ``a`` in key bit order (least significant first)."""
        if register == "base":
            start = a * self.block_size
            return list(range(start, start + self.block_size))
        return list(self._blocks[(register, a)])

    def axis_register(self, a: int, d: int, register: str = "base") -> list[int]:
        """The ``n`` qubits encoding coordinate ``d`` of particle ``a``, LSB first."""
        block = self.particle_block(a, register)
        return [block[i * self.D + d] for i in range(self.n)]

    def allocate(self, register: str, particle: int = -1, bit: int = -1, axis: int = -1) -> int:
        self.roles.append(QubitRole(register, particle, bit, axis))
        return len(self.roles) - 1

    def allocate_block(self, register: str, particle: int = -1, tag=None) -> list[int]:
        """Allocate a full particle-shaped block of ``n*D`` qubits."""
        qubits = [
            self.allocate(register, particle, i, d) for i in range(self.n) for d in range(self.D)
        ]
        self._blocks[(register if tag is None else tag, particle)] = qubits
        return qubits

    def has_block(self, register: str, particle: int) -> bool:
        return (register, particle) in self._blocks

    def basis_index(self, points: Sequence[Sequence[int]]) -> int:
        """Computational index of base registers holding ``points`` in order."""
        if len(points) != self.A:
            raise ValueError(f"expected {self.A} points")
        idx = 0
        for a, p in enumerate(points):
            idx |= register_value(p, self.n, self.code) << (a * self.block_size)
        return idx

    def count(self, register: str) -> int:
        return sum(1 for r in self.roles if r.register == register)

    def dump(self) -> str:
        """``index register particle bit axis`` per line."""
        lines = [
            f"{q} {r.register} {r.particle} {r.bit} {r.axis}" for q, r in enumerate(self.roles)
        ]
        return "\n".join(lines) + "\n"


def basis_state_index(points: Sequence[Sequence[int]], layout: QubitLayout) -> int:
    """Computational index of the base registers holding ``points``."""
    return layout.basis_index(points)


# ---------------------------------------------------------------------------
# representative basis


def sorting_sign(values: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``values`` (0 if any repeat)."""
    values = list(values)
    if len(set(values)) != len(values):
        return 0
    inversions = sum(
        1 for i in range(len(values)) for j in range(i + 1, len(values)) if values[i] > values[j]
    )
    return -1 if inversions % 2 else 1


@dataclass
class FermionBasis:
    """Strictly increasing key tuples of ``A`` fermions on the lattice.

    Attributes
    ----------
    keys : ndarray, shape (S, A)
        Rows in lexicographic order.
    """

    A: int
    n: int
    D: int
    keys: np.ndarray

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def points(self) -> list[tuple[tuple[int, ...], ...]]:
        return [
            tuple(deinterleave_key(int(k), self.n, self.D) for k in row) for row in self.keys
        ]

    def index_of(self, keys: Sequence[int]) -> int:
        row = np.asarray(keys, dtype=np.int64)
        lo, hi = 0, len(self.keys)
        # binary search on lexicographic rows
        while lo < hi:
            mid = (lo + hi) // 2
            cur = self.keys[mid]
            diff = np.flatnonzero(cur != row)
            if diff.size == 0:
                return mid
            if cur[diff[0]] < row[diff[0]]:
                lo = mid + 1
            else:
                hi = mid
        raise KeyError(tuple(keys))

    def computational_indices(self, code: str = "brgc") -> np.ndarray:
        """Index of each representative in the base-qubit computational basis."""
        to_register = np.array(
            [register_value(deinterleave_key(k, self.n, self.D), self.n, code)
             for k in range(1 << (self.n * self.D))],
            dtype=np.int64,
        )
        block = self.n * self.D
        out = np.zeros(len(self.keys), dtype=np.int64)
        for a in range(self.A):
            out |= to_register[self.keys[:, a]] << (a * block)
        return out


def enumerate_basis(A: int, n: int, D: int, cap_states: int = 200_000) -> FermionBasis:
    """All ``C(2**(n*D), A)`` sorted representatives."""
    sites = 1 << (n * D)
    if A > sites:
        raise ValueError(f"{A} fermions do not fit on {sites} sites")
    size = comb(sites, A)
    if size > cap_states:
        raise ResourceCapError(f"basis of {size} states exceeds cap {cap_states}")
    keys = np.array(list(combinations(range(sites), A)), dtype=np.int64).reshape(size, A)
    return FermionBasis(A, n, D, keys)
