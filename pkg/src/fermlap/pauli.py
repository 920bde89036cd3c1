"""Weighted sums of Pauli strings.

Each Pauli string is stored in symplectic form as a pair of bit masks
``(x, z)`` with the convention ``P(x, z) = i^{|x & z|} X^x Z^z``, so that
``X``, ``Y`` and ``Z`` on qubit ``q`` are ``(1<<q, 0)``, ``(1<<q, 1<<q)`` and
``(0, 1<<q)``.  Qubit 0 is the least significant bit of a computational basis
index.  Masks live in ``uint64`` arrays while every qubit index is below 64 and
fall back to arrays of Python integers otherwise, which keeps term counting
possible for the large ancilla-heavy layouts produced by the gadget compiler.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
import re

import numpy as np
import scipy.sparse as sp

__all__ = [
    "PauliTerm",
    "PauliSum",
    "Projector",
    "expand_projector",
    "projector",
    "multiply",
    "product",
    "adjoint",
    "swap_sum",
    "to_matrix",
    "restrict",
    "diagonal_values",
    "fwht",
    "dumps",
    "loads",
    "HermiticityError",
    "ResourceCapError",
]

# i^k for k = 0..3
_I_POWERS = np.array([1, 1j, -1, -1j], dtype=complex)
_WIDE_LIMIT = 64
_PRODUCT_CHUNK = 1 << 21

DEFAULT_ATOL = 1e-14


class HermiticityError(ValueError):
    """Raised when an operator that must be hermitian is not."""


# ---------------------------------------------------------------------------
# bit helpers


def _popcount(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.fromiter((int(v).bit_count() for v in a), dtype=np.int64, count=len(a))
    return np.bitwise_count(a).astype(np.int64)


def _as_masks(values, wide: bool) -> np.ndarray:
    if wide:
        out = np.empty(len(values), dtype=object)
        out[:] = [int(v) for v in values]
        return out
    return np.asarray(values, dtype=np.uint64)


def _widen(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return a
    return _as_masks(a.tolist(), True)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis.

    ``out[..., i] = sum_z values[..., z] * (-1)**popcount(i & z)``.
    """
    a = np.array(values, copy=True)
    n = a.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < n:
        a = a.reshape(lead + (n // (2 * h), 2, h))
        lo, hi = a[..., 0, :], a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return a.reshape(lead + (n,))


# ---------------------------------------------------------------------------
# terms

_LETTER_OF = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS_OF = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _letters_of(x: int, z: int) -> tuple[tuple[int, str], ...]:
    out = []
    support = x | z
    while support:
        low = support & -support
        q = low.bit_length() - 1
        out.append((q, _LETTER_OF[(int(bool(x & low)), int(bool(z & low)))]))
        support ^= low
    return tuple(out)


def _masks_of(letters: Iterable[tuple[int, str]]) -> tuple[int, int]:
    x = z = 0
    for q, letter in letters:
        q = int(q)
        if q < 0:
            raise ValueError(f"negative qubit index {q}")
        letter = letter.upper()
        if letter == "I":
            continue
        if letter not in _BITS_OF:
            raise ValueError(f"unknown Pauli letter {letter!r}")
        bit = 1 << q
        if (x | z) & bit:
            raise ValueError(f"qubit {q} appears twice in one Pauli string")
        bx, bz = _BITS_OF[letter]
        x |= bit * bx
        z |= bit * bz
    return x, z


@dataclass(frozen=True)
class PauliTerm:
    """A single weighted Pauli string.

    Attributes
    ----------
    coefficient : complex
    letters : tuple of (qubit, letter)
        Non-identity factors sorted by qubit index; an empty tuple is the
        identity.
    """

    coefficient: complex
    letters: tuple[tuple[int, str], ...] = ()

    @classmethod
    def from_label(cls, label: str, coefficient: complex = 1.0) -> "PauliTerm":
        """Parse a label such as ``"X0 Z3"`` (or ``"I"`` for the identity)."""
        return cls(coefficient, _letters_of(*_parse_label(label)))

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def masks(self) -> tuple[int, int]:
        return _masks_of(self.letters)

    def label(self) -> str:
        if not self.letters:
            return "I"
        return " ".join(f"{letter}{q}" for q, letter in self.letters)


def _parse_label(label: str) -> tuple[int, int]:
    tokens = label.split()
    if tokens == ["I"] or not tokens:
        return 0, 0
    letters = []
    for tok in tokens:
        m = re.fullmatch(r"([IXYZ])(\d+)", tok.upper())
        if m is None:
            raise ValueError(f"cannot parse Pauli factor {tok!r}")
        letters.append((int(m.group(2)), m.group(1)))
    return _masks_of(letters)


# ---------------------------------------------------------------------------
# sums


def _reduce(x: np.ndarray, z: np.ndarray, c: np.ndarray, atol: float):
    """Combine duplicate strings and drop near-zero coefficients."""
    if len(c) == 0:
        return x, z, c
    if x.dtype == object:
        acc: dict[tuple[int, int], complex] = {}
        for xi, zi, ci in zip(x.tolist(), z.tolist(), c.tolist()):
            acc[(xi, zi)] = acc.get((xi, zi), 0) + ci
        keys = sorted(k for k, v in acc.items() if abs(v) > atol)
        xs = _as_masks([k[0] for k in keys], True)
        zs = _as_masks([k[1] for k in keys], True)
        cs = np.array([acc[k] for k in keys], dtype=complex)
        return xs, zs, cs
    order = np.lexsort((z, x))
    x, z, c = x[order], z[order], c[order]
    new = np.ones(len(c), dtype=bool)
    new[1:] = (x[1:] != x[:-1]) | (z[1:] != z[:-1])
    starts = np.flatnonzero(new)
    c = np.add.reduceat(c, starts)
    x, z = x[starts], z[starts]
    keep = np.abs(c) > atol
    return x[keep], z[keep], c[keep]


class PauliSum:
    """A canonical weighted sum of Pauli strings.

    Terms are kept sorted by ``(x, z)`` with duplicates merged and
    coefficients of magnitude below ``1e-14`` removed.  Instances are treated
    as immutable.

    Parameters
    ----------
    terms : iterable of PauliTerm, mapping of label to coefficient, or None
    """

    __slots__ = ("_x", "_z", "_c")

    def __init__(self, terms=None):
        if terms is None:
            terms = ()
        if isinstance(terms, Mapping):
            items = [(_parse_label(k), complex(v)) for k, v in terms.items()]
        else:
            items = [(t.masks, complex(t.coefficient)) for t in terms]
        wide = any(max(xz).bit_length() > _WIDE_LIMIT for xz, _ in items)
        x = _as_masks([xz[0] for xz, _ in items], wide)
        z = _as_masks([xz[1] for xz, _ in items], wide)
        c = np.array([v for _, v in items], dtype=complex)
        self._x, self._z, self._c = _reduce(x, z, c, DEFAULT_ATOL)

    @classmethod
    def _from_arrays(cls, x, z, c, reduce: bool = True, atol: float = DEFAULT_ATOL):
        obj = cls.__new__(cls)
        if reduce:
            x, z, c = _reduce(x, z, np.asarray(c, dtype=complex), atol)
        obj._x, obj._z, obj._c = x, z, np.asarray(c, dtype=complex)
        return obj

    # -- constructors --------------------------------------------------
    @classmethod
    def identity(cls, coefficient: complex = 1.0) -> "PauliSum":
        return cls._from_arrays(
            np.zeros(1, np.uint64), np.zeros(1, np.uint64), np.array([coefficient], complex)
        )

    @classmethod
    def zero(cls) -> "PauliSum":
        return cls._from_arrays(np.zeros(0, np.uint64), np.zeros(0, np.uint64), np.zeros(0, complex))

    @classmethod
    def from_label(cls, label: str, coefficient: complex = 1.0) -> "PauliSum":
        x, z = _parse_label(label)
        return cls.from_masks([x], [z], [coefficient])

    @classmethod
    def single(cls, qubit: int, letter: str, coefficient: complex = 1.0) -> "PauliSum":
        x, z = _masks_of([(qubit, letter)])
        return cls.from_masks([x], [z], [coefficient])

    @classmethod
    def from_masks(cls, xs: Sequence[int], zs: Sequence[int], coefficients) -> "PauliSum":
        xs = [int(v) for v in xs]
        zs = [int(v) for v in zs]
        wide = any(v.bit_length() > _WIDE_LIMIT for v in xs + zs)
        return cls._from_arrays(
            _as_masks(xs, wide), _as_masks(zs, wide), np.asarray(coefficients, dtype=complex)
        )

    @classmethod
    def sum(cls, parts: Iterable["PauliSum"]) -> "PauliSum":
        """Add many sums with a single canonicalisation pass."""
        parts = [p for p in parts if p.num_terms]
        if not parts:
            return cls.zero()
        wide = any(p.is_wide for p in parts)
        xs = [(_widen(p._x) if wide else p._x) for p in parts]
        zs = [(_widen(p._z) if wide else p._z) for p in parts]
        return cls._from_arrays(
            np.concatenate(xs), np.concatenate(zs), np.concatenate([p._c for p in parts])
        )

    # -- inspection ----------------------------------------------------
    @property
    def num_terms(self) -> int:
        return len(self._c)

    def __len__(self) -> int:
        return len(self._c)

    @property
    def is_wide(self) -> bool:
        return self._x.dtype == object

    @property
    def coefficients(self) -> np.ndarray:
        return self._c.copy()

    def masks(self) -> tuple[np.ndarray, np.ndarray]:
        return self._x.copy(), self._z.copy()

    def weights(self) -> np.ndarray:
        if self.is_wide:
            return _popcount(np.array([int(a) | int(b) for a, b in zip(self._x, self._z)], dtype=object))
        return _popcount(self._x | self._z)

    def max_weight(self) -> int:
        return int(self.weights().max()) if self.num_terms else 0

    def support(self) -> list[int]:
        """Sorted indices of all qubits acted on non-trivially."""
        acc = 0
        for a, b in zip(self._x.tolist(), self._z.tolist()):
            acc |= int(a) | int(b)
        return [q for q in range(acc.bit_length()) if acc >> q & 1]

    def num_qubits_spanned(self) -> int:
        s = self.support()
        return s[-1] + 1 if s else 0

    def is_diagonal(self) -> bool:
        return not any(int(v) for v in self._x.tolist())

    def __iter__(self):
        for a, b, c in zip(self._x.tolist(), self._z.tolist(), self._c.tolist()):
            yield PauliTerm(c, _letters_of(int(a), int(b)))

    def terms(self) -> list[PauliTerm]:
        """Terms in canonical lexicographic order of their letter strings."""
        return sorted(self, key=_canonical_key)

    def coefficient(self, label: str) -> complex:
        x, z = _parse_label(label)
        hit = [i for i, (a, b) in enumerate(zip(self._x.tolist(), self._z.tolist())) if a == x and b == z]
        return complex(self._c[hit[0]]) if hit else 0j

    def norm1(self) -> float:
        return float(np.abs(self._c).sum())

    def __repr__(self) -> str:
        shown = ", ".join(f"{t.coefficient:.4g}*{t.label()}" for t in self.terms()[:6])
        more = "" if self.num_terms <= 6 else f", ... ({self.num_terms} terms)"
        return f"PauliSum({shown}{more})"

    # -- algebra -------------------------------------------------------
    def _aligned(self, other: "PauliSum"):
        if self.is_wide or other.is_wide:
            return _widen(self._x), _widen(self._z), _widen(other._x), _widen(other._z)
        return self._x, self._z, other._x, other._z

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliSum.identity(other)
        if not isinstance(other, PauliSum):
            return NotImplemented
        return PauliSum.sum([self, other]) if (self.num_terms or other.num_terms) else PauliSum.zero()

    __radd__ = __add__

    def __neg__(self):
        return PauliSum._from_arrays(self._x, self._z, -self._c, reduce=False)

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliSum.identity(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, PauliSum):
            raise TypeError("use @ for the operator product of two Pauli sums")
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return PauliSum._from_arrays(self._x, self._z, self._c * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        return multiply(self, other)

    def adjoint(self) -> "PauliSum":
        # every P(x, z) is hermitian in this convention
        return PauliSum._from_arrays(self._x, self._z, self._c.conj(), reduce=False)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self._c.imag) <= atol))

    def require_hermitian(self, atol: float = 1e-12, what: str = "operator") -> "PauliSum":
        if not self.is_hermitian(atol):
            worst = float(np.abs(self._c.imag).max())
            raise HermiticityError(f"{what} is not hermitian (max |Im c| = {worst:.3g})")
        return self

    def simplify(self, atol: float = DEFAULT_ATOL) -> "PauliSum":
        return PauliSum._from_arrays(self._x, self._z, self._c, reduce=True, atol=atol)

    def equals(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        diff = (self - other).simplify(atol)
        return diff.num_terms == 0

    def relabel(self, mapping: Mapping[int, int]) -> "PauliSum":
        """Move qubit ``q`` to ``mapping[q]``; unmapped qubits stay put."""
        def move(mask: int) -> int:
            out = 0
            while mask:
                low = mask & -mask
                q = low.bit_length() - 1
                out |= 1 << mapping.get(q, q)
                mask ^= low
            return out

        xs = [move(int(v)) for v in self._x.tolist()]
        zs = [move(int(v)) for v in self._z.tolist()]
        return PauliSum.from_masks(xs, zs, self._c)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.equals(other, atol=0.0)

    __hash__ = None


def _canonical_key(term: PauliTerm):
    return tuple((q, letter) for q, letter in term.letters)


def multiply(left: PauliSum, right: PauliSum, atol: float = DEFAULT_ATOL) -> PauliSum:
    """Operator product ``left @ right`` with exact phase bookkeeping."""
    if left.num_terms == 0 or right.num_terms == 0:
        return PauliSum.zero()
    x1, z1, x2, z2 = left._aligned(right)
    c1, c2 = left._c, right._c
    a1 = _popcount(x1 & z1) if x1.dtype != object else _popcount(np.array([a & b for a, b in zip(x1, z1)], object))
    a2 = _popcount(x2 & z2) if x2.dtype != object else _popcount(np.array([a & b for a, b in zip(x2, z2)], object))

    if x1.dtype == object:
        acc: dict[tuple[int, int], complex] = {}
        for xa, za, ca, pa in zip(x1.tolist(), z1.tolist(), c1.tolist(), a1.tolist()):
            for xb, zb, cb, pb in zip(x2.tolist(), z2.tolist(), c2.tolist(), a2.tolist()):
                x, z = xa ^ xb, za ^ zb
                k = (pa + pb + 2 * (za & xb).bit_count() - (x & z).bit_count()) % 4
                acc[(x, z)] = acc.get((x, z), 0) + ca * cb * complex(_I_POWERS[k])
        keys = list(acc)
        return PauliSum._from_arrays(
            _as_masks([k[0] for k in keys], True),
            _as_masks([k[1] for k in keys], True),
            np.array([acc[k] for k in keys], dtype=complex),
            atol=atol,
        )

    rows = max(1, _PRODUCT_CHUNK // len(c2))
    parts_x, parts_z, parts_c = [], [], []
    for lo in range(0, len(c1), rows):
        sl = slice(lo, lo + rows)
        x = x1[sl, None] ^ x2[None, :]
        z = z1[sl, None] ^ z2[None, :]
        k = a1[sl, None] + a2[None, :] + 2 * np.bitwise_count(z1[sl, None] & x2[None, :]).astype(np.int64)
        k -= np.bitwise_count(x & z).astype(np.int64)
        c = (c1[sl, None] * c2[None, :]) * _I_POWERS[k % 4]
        rx, rz, rc = _reduce(x.ravel(), z.ravel(), c.ravel(), atol=0.0)
        parts_x.append(rx)
        parts_z.append(rz)
        parts_c.append(rc)
    return PauliSum._from_arrays(
        np.concatenate(parts_x), np.concatenate(parts_z), np.concatenate(parts_c), atol=atol
    )


def adjoint(op: PauliSum) -> PauliSum:
    return op.adjoint()


def product(factors: Iterable[PauliSum]) -> PauliSum:
    out = PauliSum.identity()
    for f in factors:
        out = out @ f
    return out


# ---------------------------------------------------------------------------
# projectors and building blocks


@dataclass(frozen=True)
class Projector:
    """Product of single-qubit projectors ``prod_q |v_q><v_q|``.

    Attributes
    ----------
    values : tuple of (qubit, bit)
    """

    values: tuple[tuple[int, int], ...]

    @classmethod
    def from_bits(cls, qubits: Sequence[int], bits: str | Sequence[int]) -> "Projector":
        """Pair ``qubits[j]`` with ``bits[j]`` read left to right.

        ``Projector.from_bits([a, b], "01")`` is ``P^0_a P^1_b``.
        """
        bits = [int(b) for b in bits]
        if len(bits) != len(qubits):
            raise ValueError("one bit per qubit is required")
        return cls(tuple(zip((int(q) for q in qubits), bits)))

    @classmethod
    def from_value(cls, qubits: Sequence[int], value: int) -> "Projector":
        """Pair ``qubits[j]`` with bit ``j`` of ``value`` (first qubit is least significant)."""
        return cls(tuple((int(q), (value >> j) & 1) for j, q in enumerate(qubits)))

    def expand(self) -> PauliSum:
        qubits = [q for q, _ in self.values]
        if len(set(qubits)) != len(qubits):
            raise ValueError("projector lists a qubit twice")
        m = len(self.values)
        zs, cs = [], []
        for sub in range(1 << m):
            z = 0
            sign = 1
            for j, (q, v) in enumerate(self.values):
                if sub >> j & 1:
                    z |= 1 << q
                    if v:
                        sign = -sign
            zs.append(z)
            cs.append(sign / (1 << m))
        return PauliSum.from_masks([0] * len(zs), zs, cs)


def expand_projector(p: Projector) -> PauliSum:
    return p.expand()


def projector(qubits: Sequence[int], bits) -> PauliSum:
    """Expanded ``P^{bits}`` on ``qubits`` (bits read left to right)."""
    return Projector.from_bits(qubits, bits).expand()


def swap_sum(a: int, b: int) -> PauliSum:
    """SWAP of qubits ``a`` and ``b`` as ``(I + XX + YY + ZZ) / 2``."""
    if a == b:
        raise ValueError("swap needs two distinct qubits")
    ma, mb = 1 << a, 1 << b
    return PauliSum.from_masks(
        [0, ma | mb, ma | mb, 0], [0, 0, ma | mb, ma | mb], [0.5, 0.5, 0.5, 0.5]
    )


# ---------------------------------------------------------------------------
# matrices


def _narrow_arrays(op: PauliSum):
    if op.is_wide:
        if op.num_qubits_spanned() > _WIDE_LIMIT:
            raise ValueError("operator acts on qubits beyond index 63; no matrix form")
        return _as_masks(op._x.tolist(), False), _as_masks(op._z.tolist(), False), op._c
    return op._x, op._z, op._c


def _groups_by_x(x: np.ndarray):
    if len(x) == 0:
        return
    bounds = np.flatnonzero(np.r_[True, x[1:] != x[:-1], True])
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        yield int(x[lo]), slice(lo, hi)


def to_matrix(op: PauliSum, num_qubits: int | None = None, cap_qubits: int = 24) -> sp.csr_matrix:
    """Sparse matrix of ``op`` on ``num_qubits`` qubits.

    Raises
    ------
    ResourceCapError
        When the qubit count exceeds ``cap_qubits``.
    """
    span = op.num_qubits_spanned()
    nq = span if num_qubits is None else int(num_qubits)
    if span > nq:
        raise ValueError(f"operator spans {span} qubits, more than {nq}")
    if nq > cap_qubits:
        raise ResourceCapError(f"{nq} qubits exceeds the dense-matrix cap of {cap_qubits}")
    dim = 1 << nq
    x, z, c = _narrow_arrays(op)
    phase = c * _I_POWERS[np.bitwise_count(x & z).astype(np.int64) % 4]
    cols = np.arange(dim, dtype=np.uint64)
    rows_all, cols_all, vals_all = [], [], []
    for xv, sl in _groups_by_x(x):
        table = np.zeros(dim, dtype=complex)
        np.add.at(table, z[sl].astype(np.int64), phase[sl])
        diag = fwht(table)
        keep = np.abs(diag) > 1e-15
        rows_all.append((cols[keep] ^ np.uint64(xv)).astype(np.int64))
        cols_all.append(cols[keep].astype(np.int64))
        vals_all.append(diag[keep])
    if not vals_all:
        return sp.csr_matrix((dim, dim), dtype=complex)
    return sp.csr_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
    )


def restrict(op: PauliSum, indices: Sequence[int]) -> np.ndarray:
    """Dense block ``<s|op|t>`` for computational basis states ``s, t`` in ``indices``.

    Only the requested states are touched, so this works for operators on
    up to 63 qubits as long as the index list is modest.
    """
    idx = np.asarray(indices, dtype=np.uint64)
    order = np.argsort(idx)
    sorted_idx = idx[order]
    out = np.zeros((len(idx), len(idx)), dtype=complex)
    if op.num_terms == 0 or len(idx) == 0:
        return out
    x, z, c = _narrow_arrays(op)
    phase = c * _I_POWERS[np.bitwise_count(x & z).astype(np.int64) % 4]
    span = max(op.num_qubits_spanned(), int(sorted_idx[-1]).bit_length(), 1)
    for xv, sl in _groups_by_x(x):
        targets = sorted_idx ^ np.uint64(xv)
        pos = np.clip(np.searchsorted(sorted_idx, targets), 0, len(idx) - 1)
        hit = sorted_idx[pos] == targets
        if not hit.any():
            continue
        src = sorted_idx[hit]
        zs, ph = z[sl], phase[sl]
        if span <= 20 and len(zs) * len(src) > (1 << span) * span:
            table = np.zeros(1 << span, dtype=complex)
            np.add.at(table, zs.astype(np.int64), ph)
            vals = fwht(table)[src.astype(np.int64)]
        else:
            vals = np.zeros(len(src), dtype=complex)
            step = max(1, (1 << 22) // max(1, len(zs)))
            for lo in range(0, len(src), step):
                block = src[lo:lo + step]
                signs = 1 - 2 * (np.bitwise_count(block[:, None] & zs[None, :]) & 1).astype(np.int64)
                vals[lo:lo + step] = signs @ ph
        out[order[pos[hit]], order[np.flatnonzero(hit)]] = vals
    return out


def diagonal_values(op: PauliSum, qubits: Sequence[int]) -> np.ndarray:
    """Values of a diagonal operator on every assignment of ``qubits``.

    Entry ``k`` corresponds to ``qubits[j]`` holding bit ``j`` of ``k``.
    """
    if not op.is_diagonal():
        raise ValueError("operator has off-diagonal terms")
    pos = {int(q): j for j, q in enumerate(qubits)}
    missing = set(op.support()) - set(pos)
    if missing:
        raise ValueError(f"operator acts on qubits outside the list: {sorted(missing)}")
    table = np.zeros(1 << len(qubits), dtype=float)
    for zmask, coeff in zip(op._z.tolist(), op._c.tolist()):
        zmask = int(zmask)
        local = 0
        while zmask:
            low = zmask & -zmask
            local |= 1 << pos[low.bit_length() - 1]
            zmask ^= low
        table[local] += coeff.real
    return fwht(table)


class ResourceCapError(RuntimeError):
    """Raised when a requested dense object would exceed the configured caps."""


# ---------------------------------------------------------------------------
# serialisation


def _format_float(v: float) -> str:
    v = float(v)
    if v == 0:
        v = 0.0
    return repr(v)


def dumps(op: PauliSum) -> str:
    """One term per line, ``re im letters``, in canonical lexicographic order."""
    lines = []
    for t in op.terms():
        c = complex(t.coefficient)
        lines.append(f"{_format_float(c.real)} {_format_float(c.imag)} {t.label()}")
    return "\n".join(lines) + ("\n" if lines else "")


def loads(text: str) -> PauliSum:
    xs, zs, cs = [], [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"malformed term line {raw!r}")
        x, z = _parse_label(" ".join(parts[2:]))
        xs.append(x)
        zs.append(z)
        cs.append(complex(float(parts[0]), float(parts[1])))
    return PauliSum.from_masks(xs, zs, cs)
