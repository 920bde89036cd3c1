"""Diagonal potentials as sums of Z products.

A diagonal operator on ``m`` qubits with value table ``v`` expands exactly as
``sum_z c_z Z^z`` with ``c = WHT(v) / 2**m``.  One-body potentials act on each
particle register; two-body potentials act on register pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import isfinite
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .encoding import QubitLayout, deinterleave_key, interleave_key, register_point_table
from .pauli import PauliSum, fwht

__all__ = [
    "diagonal_to_zsum",
    "same_species_factor",
    "cross_species_factor",
    "PotentialSpec",
    "well",
    "harmonic",
    "coulomb_softened",
    "tabulated",
    "parse_potential",
    "one_body_operator",
    "two_body_operator",
    "potential_operator",
    "lattice_values",
]


def diagonal_to_zsum(values: Sequence[float], register: Sequence[int], atol: float = 0.0) -> PauliSum:
    """Exact Z-product expansion of ``diag(values)`` on ``register``.

    ``values[k]`` is the diagonal entry where ``register[j]`` holds bit ``j``
    of ``k``.  Coefficients of magnitude at most ``atol`` are dropped.
    """
    values = np.asarray(values, dtype=float)
    register = list(register)
    m = len(register)
    if values.ndim != 1 or len(values) != 1 << m:
        raise ValueError(f"need 2**{m} = {1 << m} values, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("potential values must be finite")
    coeffs = fwht(values) / (1 << m)
    keep = np.flatnonzero(np.abs(coeffs) > max(atol, 1e-15))
    bit_of = np.array([1 << q for q in register], dtype=object)
    zs = []
    for k in keep.tolist():
        z = 0
        for j in range(m):
            if k >> j & 1:
                z |= int(bit_of[j])
        zs.append(z)
    return PauliSum.from_masks([0] * len(zs), zs, coeffs[keep])


def same_species_factor(A: int) -> int:
    """Number of particle pairs, ``A (A - 1) / 2``."""
    if A < 2:
        raise ValueError("a pair interaction needs at least two particles")
    return A * (A - 1) // 2


def cross_species_factor(A_n: int, A_p: int) -> int:
    """Number of unlike pairs between two species."""
    if A_n < 1 or A_p < 1:
        raise ValueError("both species need at least one particle")
    return A_n * A_p


# ---------------------------------------------------------------------------
# potential descriptions


@dataclass
class PotentialSpec:
    """A one-body or two-body lattice potential.

    Parameters
    ----------
    kind : {"one-body", "two-body"}
    values : callable
        ``values(point)`` for one-body, ``values(point_a, point_b)`` for
        two-body, with points as coordinate tuples.
    name : str
    species : list of (label, count)
    """

    kind: str
    values: Callable
    name: str = "custom"
    species: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("one-body", "two-body"):
            raise ValueError(f"unknown potential kind {self.kind!r}")


def well(depth: float = 0.2, site: Sequence[int] | int = 0) -> PotentialSpec:
    """Attractive single-site well of the given depth."""
    target = (int(site),) if np.isscalar(site) else tuple(int(c) for c in site)

    def values(point):
        padded = target + (0,) * (len(point) - len(target))
        return -float(depth) if tuple(point) == padded else 0.0

    return PotentialSpec("one-body", values, name="well")


def harmonic(strength: float = 1.0, center: Sequence[float] | None = None, size: int | None = None) -> PotentialSpec:
    """``strength * |x - center|^2 / 2`` with periodic minimum-image distance."""

    def values(point):
        c = np.zeros(len(point)) if center is None else np.asarray(center, dtype=float)
        diff = np.asarray(point, dtype=float) - c
        if size is not None:
            diff = (diff + size / 2) % size - size / 2
        return 0.5 * float(strength) * float(diff @ diff)

    return PotentialSpec("one-body", values, name="harmonic")


def coulomb_softened(strength: float = 1.0, softening: float = 1.0, size: int | None = None) -> PotentialSpec:
    """Pair potential ``strength / sqrt(r^2 + softening^2)``."""

    def values(p, q):
        diff = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
        if size is not None:
            diff = (diff + size / 2) % size - size / 2
        return float(strength) / float(np.sqrt(diff @ diff + softening**2))

    return PotentialSpec("two-body", values, name="coulomb-softened")


def tabulated(path: str | Path, n: int, D: int, kind: str = "one-body") -> PotentialSpec:
    """Read ``index value`` lines.

    One-body indices are interleaved lattice keys; two-body indices are
    ``key_a * 2**(n*D) + key_b``.  Missing entries are zero.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"potential file not found: {path}")
    sites = 1 << (n * D)
    size = sites if kind == "one-body" else sites * sites
    table = np.zeros(size)
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            idx_text, val_text = line.split()
            idx, val = int(idx_text), float(val_text)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: expected 'index value'") from exc
        if not 0 <= idx < size or not isfinite(val):
            raise ValueError(f"{path}:{lineno}: index out of range or value not finite")
        table[idx] = val
    if kind == "one-body":
        return PotentialSpec(kind, lambda p: table[interleave_key(p, n)], name="tabulated")
    pair = table.reshape(sites, sites)
    if not np.allclose(pair, pair.T):
        raise ValueError("two-body table must be symmetric")
    return PotentialSpec(
        kind, lambda p, q: pair[interleave_key(p, n), interleave_key(q, n)], name="tabulated"
    )


def parse_potential(text: str | None, n: int, D: int) -> PotentialSpec | None:
    """Parse ``name:key=value,...`` or ``file:path[:two-body]``."""
    if text is None or text.strip() in ("", "none"):
        return None
    head, _, rest = text.strip().partition(":")
    if head == "file":
        path, _, kind = rest.partition(":")
        return tabulated(path, n, D, kind or "one-body")
    params: dict[str, object] = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        if "/" in val:
            params[key] = tuple(int(v) for v in val.split("/"))
        else:
            params[key] = float(val)
    size = 1 << n
    if head == "well":
        site = params.pop("site", 0)
        return well(params.pop("depth", 0.2), site)
    if head == "harmonic":
        return harmonic(params.pop("strength", 1.0), params.pop("center", None), size)
    if head == "coulomb-softened":
        return coulomb_softened(params.pop("strength", 1.0), params.pop("softening", 1.0), size)
    raise ValueError(f"unknown potential {head!r}")


# ---------------------------------------------------------------------------
# operators


def lattice_values(potential: PotentialSpec, n: int, D: int) -> np.ndarray:
    """Potential on every lattice key (one-body) or key pair (two-body)."""
    sites = 1 << (n * D)
    points = [deinterleave_key(k, n, D) for k in range(sites)]
    if potential.kind == "one-body":
        return np.array([potential.values(p) for p in points], dtype=float)
    return np.array([[potential.values(p, q) for q in points] for p in points], dtype=float)


def one_body_operator(potential: PotentialSpec, layout: QubitLayout, register: str = "base") -> PauliSum:
    """``sum_a V(x_a)`` acting on every particle register."""
    per_key = lattice_values(potential, layout.n, layout.D)
    table = per_key[register_point_table(layout.n, layout.D, layout.code)]
    return PauliSum.sum(
        diagonal_to_zsum(table, layout.particle_block(a, register)) for a in range(layout.A)
    )


def two_body_operator(
    potential: PotentialSpec,
    layout: QubitLayout,
    pairs: str = "all",
    register: str = "base",
) -> PauliSum:
    """Pair potential on the particle registers.

    ``pairs="all"`` sums over every register pair.  ``pairs="factored"``
    puts the interaction on registers ``(0, 1)`` only, scaled by
    ``A (A - 1) / 2``; this reproduces the pair sum only on
    antisymmetrised states, which for ``A > 2`` are not the sorted
    representatives stored here.
    """
    per_pair = lattice_values(potential, layout.n, layout.D)
    to_key = register_point_table(layout.n, layout.D, layout.code)
    table = per_pair[np.ix_(to_key, to_key)]
    # joint index: first register in the low bits
    joint = table.T.reshape(-1)
    if pairs == "factored":
        chosen, scale = [(0, 1)], same_species_factor(layout.A)
    elif pairs == "all":
        chosen, scale = list(combinations(range(layout.A), 2)), 1
    else:
        raise ValueError(f"unknown pair mode {pairs!r}")
    parts = []
    for a, b in chosen:
        qubits = layout.particle_block(a, register) + layout.particle_block(b, register)
        parts.append(diagonal_to_zsum(joint * scale, qubits))
    return PauliSum.sum(parts)


def potential_operator(
    potential: PotentialSpec | None, layout: QubitLayout, pairs: str = "all", register: str = "base"
) -> PauliSum:
    if potential is None:
        return PauliSum.zero()
    if potential.kind == "one-body":
        return one_body_operator(potential, layout, register)
    if layout.A < 2:
        return PauliSum.zero()
    return two_body_operator(potential, layout, pairs, register)
