"""Brute-force reference Hamiltonians and comparisons with synthesized ones.

The reference works directly with sorted tuples of lattice keys: every hop of
every particle is applied, collisions are discarded and the result is sorted
back into a representative with the sign of the sorting permutation.  Nothing
here uses the Pauli synthesis, so agreement is a genuine check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .encoding import (
    FermionBasis,
    QubitLayout,
    deinterleave_key,
    enumerate_basis,
    shift_key,
    sorting_sign,
)
from .pauli import PauliSum, ResourceCapError, restrict, to_matrix
from .potential import PotentialSpec, lattice_values

__all__ = [
    "OracleHamiltonian",
    "oracle_kinetic_matrix",
    "build_oracle",
    "first_quantized_oracle",
    "SubspaceReport",
    "compare_subspace",
    "SpectralReport",
    "penalized_spectrum",
    "GapFlowReport",
    "gap_flow",
    "pair_sum_check",
    "cross_species_check",
    "AuditRow",
    "AuditReport",
    "term_count_audit",
    "linear_fit",
    "EquivalenceReport",
    "gadget_equivalence",
]

DENSE_LIMIT = 1 << 12


# ---------------------------------------------------------------------------
# reference matrices


@lru_cache(maxsize=32)
def _kinetic_entries(A: int, n: int, D: int, cap_states: int):
    basis = enumerate_basis(A, n, D, cap_states)
    position = {tuple(row): r for r, row in enumerate(basis.keys.tolist())}
    rows, cols, vals, wraps = [], [], [], []
    size = 1 << n
    for col, row in enumerate(basis.keys.tolist()):
        for a in range(A):
            coords = deinterleave_key(row[a], n, D)
            for d in range(D):
                for step in (1, -1):
                    moved = list(row)
                    moved[a] = shift_key(row[a], n, D, d, step)
                    sign = sorting_sign(moved)
                    if sign == 0:
                        continue
                    rows.append(position[tuple(sorted(moved))])
                    cols.append(col)
                    vals.append(float(sign))
                    wraps.append(not 0 <= coords[d] + step < size)
    return basis, np.array(rows), np.array(cols), np.array(vals), np.array(wraps, dtype=bool)


def oracle_kinetic_matrix(A: int, n: int, D: int, cap_states: int = 200_000):
    """Sorted key tuples and the antisymmetric hop matrix on them."""
    basis, rows, cols, vals, _ = _kinetic_entries(A, n, D, cap_states)
    size = len(basis)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    return basis.keys, m


@dataclass
class OracleHamiltonian:
    """Exact Hamiltonian on the sorted representatives.

    Attributes
    ----------
    basis : FermionBasis
    matrix : scipy.sparse.csr_matrix
        Real symmetric.
    kinetic : scipy.sparse.csr_matrix
        Hop part only (no coefficient, no diagonal shift).
    wrap_mask : scipy.sparse.csr_matrix
        Boolean pattern of hops that cross the periodic boundary.
    """

    A: int
    n: int
    D: int
    basis: FermionBasis
    matrix: sp.csr_matrix
    kinetic: sp.csr_matrix
    wrap_mask: sp.csr_matrix
    potential: str = "none"

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix.toarray())


def build_oracle(
    A: int,
    n: int,
    D: int,
    potential: PotentialSpec | None = None,
    kinetic_coefficient: float = 1.0,
    include_diagonal: bool = False,
    cap_states: int = 200_000,
) -> OracleHamiltonian:
    """Reference Hamiltonian ``c * (hops [- 2 D A]) + V`` on sorted tuples."""
    basis, rows, cols, vals, wraps = _kinetic_entries(A, n, D, cap_states)
    size = len(basis)
    kinetic = sp.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    wrap_mask = sp.coo_matrix(
        (wraps.astype(float), (rows, cols)), shape=(size, size)
    ).tocsr()
    wrap_mask.eliminate_zeros()
    diag = np.zeros(size)
    if include_diagonal:
        diag -= 2 * D * A
    matrix = kinetic_coefficient * (kinetic + sp.diags(diag))
    name = "none"
    if potential is not None:
        name = potential.name
        values = lattice_values(potential, n, D)
        if potential.kind == "one-body":
            pot = values[basis.keys].sum(axis=1)
        else:
            pot = np.zeros(size)
            for i, j in combinations(range(A), 2):
                pot += values[basis.keys[:, i], basis.keys[:, j]]
        matrix = matrix + sp.diags(pot)
    return OracleHamiltonian(A, n, D, basis, sp.csr_matrix(matrix), kinetic, wrap_mask, name)


def _single_ring_hops(n: int, D: int) -> np.ndarray:
    sites = 1 << (n * D)
    m = np.zeros((sites, sites))
    for k in range(sites):
        for d in range(D):
            for step in (1, -1):
                m[shift_key(k, n, D, d, step), k] += 1
    return m


def slater_isometry(A: int, n: int, D: int) -> tuple[np.ndarray, np.ndarray]:
    """Columns are normalised antisymmetrised product states of sorted tuples."""
    sites = 1 << (n * D)
    keys = np.array(list(combinations(range(sites), A)), dtype=np.int64).reshape(-1, A)
    iso = np.zeros((sites**A, len(keys)))
    norm = 1.0 / np.sqrt(factorial(A))
    for col, row in enumerate(keys.tolist()):
        for perm in permutations(range(A)):
            ordered = [row[p] for p in perm]
            idx = 0
            for k in ordered:
                idx = idx * sites + k
            iso[idx, col] += sorting_sign(ordered) * norm
    return keys, iso


def first_quantized_oracle(A: int, n: int, D: int) -> np.ndarray:
    """Distinguishable-particle Laplacian projected onto Slater determinants."""
    sites = 1 << (n * D)
    if sites**A > 1 << 14:
        raise ResourceCapError("first-quantized space too large")
    ring = _single_ring_hops(n, D)
    eye = np.eye(sites)
    total = np.zeros((sites**A, sites**A))
    for a in range(A):
        factors = [ring if b == a else eye for b in range(A)]
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        total += term
    _, iso = slater_isometry(A, n, D)
    return iso.T @ total @ iso


# ---------------------------------------------------------------------------
# subspace comparison


@dataclass
class SubspaceReport:
    """Entrywise comparison on the valid representatives.

    Attributes
    ----------
    max_error : float
    discrepancies : list of (row tuple, column tuple, synthesized, reference)
    """

    max_error: float
    discrepancies: list = field(default_factory=list)
    dimension: int = 0

    @property
    def passed(self) -> bool:
        return self.max_error <= 1e-12

    def lines(self, limit: int = 50) -> list[str]:
        out = [f"dimension={self.dimension} max_error={self.max_error:.3e}"]
        for r, c, s, o in self.discrepancies[:limit]:
            out.append(f"row={r} col={c} synthesized={s:.6g} reference={o:.6g}")
        return out


def representative_indices(basis: FermionBasis, layout: QubitLayout) -> np.ndarray:
    return basis.computational_indices(layout.code)


def compare_subspace(
    synth: PauliSum,
    oracle: OracleHamiltonian | sp.spmatrix,
    layout: QubitLayout,
    basis: FermionBasis | None = None,
    atol: float = 1e-12,
) -> SubspaceReport:
    """Compare ``<s|synth|t>`` with the reference for all valid ``s, t``."""
    if isinstance(oracle, OracleHamiltonian):
        basis, reference = oracle.basis, oracle.matrix
    else:
        reference = oracle
        if basis is None:
            raise ValueError("a basis is needed with a bare matrix")
    if reference.shape[0] != len(basis):
        raise ValueError("reference matrix and basis sizes differ")
    block = restrict(synth, representative_indices(basis, layout))
    ref = reference.toarray()
    diff = np.abs(block - ref)
    bad = np.argwhere(diff > atol)
    keys = basis.keys.tolist()
    disc = [(tuple(keys[r]), tuple(keys[c]), complex(block[r, c]).real, ref[r, c]) for r, c in bad]
    return SubspaceReport(float(diff.max()) if diff.size else 0.0, disc, len(basis))


# ---------------------------------------------------------------------------
# spectra


@dataclass
class SpectralReport:
    """Low-lying spectrum of a penalized Hamiltonian.

    Attributes
    ----------
    eigenvalues : ndarray
    valid_weight : ndarray
        Norm squared of each eigenvector inside the valid sector.
    valid_eigenvalues : ndarray
        Eigenvalues whose vectors are valid-dominant (weight >= 0.5).
    leakage : ndarray
        ``1 - valid_weight``.
    """

    eigenvalues: np.ndarray
    valid_weight: np.ndarray
    Q: float
    num_qubits: int

    @property
    def valid_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.valid_weight >= 0.5]

    @property
    def leakage(self) -> np.ndarray:
        return 1.0 - self.valid_weight

    def lines(self) -> list[str]:
        out = [f"Q={self.Q:g} qubits={self.num_qubits}"]
        for e, w in zip(self.eigenvalues, self.valid_weight):
            out.append(f"{e:.12f} valid_weight={w:.12f}")
        return out


def _lowest(matrix: sp.spmatrix, k: int, seed: int = 0):
    dim = matrix.shape[0]
    if dim <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(matrix.toarray())
        return vals[:k], vecs[:, :k]
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    vals, vecs = spla.eigsh(matrix, k=k, which="SA", v0=v0, tol=1e-12)
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def penalized_spectrum(
    operator: PauliSum,
    penalty: PauliSum,
    Q: float,
    k: int,
    num_qubits: int,
    valid_indices: Sequence[int],
    cap_qubits: int = 20,
    seed: int = 0,
) -> SpectralReport:
    """Lowest ``k`` eigenpairs of ``operator + Q * penalty`` on all qubits."""
    if num_qubits > cap_qubits:
        raise ResourceCapError(f"{num_qubits} qubits exceeds the spectral cap {cap_qubits}")
    total = to_matrix(operator, num_qubits, cap_qubits) + Q * to_matrix(penalty, num_qubits, cap_qubits)
    total = (total + total.conj().T) * 0.5
    vals, vecs = _lowest(total, k, seed)
    valid = np.asarray(valid_indices, dtype=np.int64)
    weight = (np.abs(vecs[valid, :]) ** 2).sum(axis=0)
    return SpectralReport(np.real(vals), weight, float(Q), num_qubits)


@dataclass
class GapFlowReport:
    """Valid-sector levels along ``H(s) = T + s V``.

    ``gap`` at each ``s`` is the spacing between level ``g`` and level
    ``g - 1`` of the valid-dominant spectrum, where ``g`` is the degeneracy of
    the free ground level (1 when it is non-degenerate).  ``splitting`` is
    the spread within those lowest ``g`` levels.
    """

    s: np.ndarray
    levels: np.ndarray
    gap: np.ndarray
    splitting: np.ndarray
    ground_degeneracy: int

    @property
    def free_gap(self) -> float:
        return float(self.gap[0])

    @property
    def min_gap(self) -> float:
        return float(self.gap.min())

    def table(self) -> str:
        head = "s gap splitting " + " ".join(f"E{j}" for j in range(self.levels.shape[1]))
        rows = [head]
        for s, g, w, lv in zip(self.s, self.gap, self.splitting, self.levels):
            rows.append(f"{s:.4f} {g:.10f} {w:.10f} " + " ".join(f"{e:.10f}" for e in lv))
        return "\n".join(rows) + "\n"


def gap_flow(
    T: PauliSum,
    V: PauliSum,
    steps: int,
    num_qubits: int,
    valid_indices: Sequence[int],
    levels: int = 4,
    cap_qubits: int = 20,
    degeneracy_tol: float = 1e-8,
) -> GapFlowReport:
    """Track the valid-dominant low spectrum of ``T + s V`` for ``s`` in ``[0, 1]``."""
    if steps < 2:
        raise ValueError("need at least two schedule points")
    if num_qubits > cap_qubits:
        raise ResourceCapError(f"{num_qubits} qubits exceeds the spectral cap {cap_qubits}")
    tm = to_matrix(T, num_qubits, cap_qubits)
    vm = to_matrix(V, num_qubits, cap_qubits)
    valid = np.asarray(valid_indices, dtype=np.int64)
    grid = np.linspace(0.0, 1.0, steps)
    want = min(levels, len(valid))
    table = []
    for s in grid:
        h = tm + s * vm
        h = (h + h.conj().T) * 0.5
        k = min(h.shape[0], max(4 * want, want + 8))
        vals, vecs = _lowest(h, k)
        weight = (np.abs(vecs[valid, :]) ** 2).sum(axis=0)
        picked = np.real(vals[weight >= 0.5])[:want]
        if len(picked) < want:
            raise RuntimeError("too few valid-dominant levels; raise the penalty weight")
        table.append(picked)
    lv = np.array(table)
    free = lv[0]
    g = int(np.sum(np.abs(free - free[0]) <= degeneracy_tol))
    g = min(g, want - 1)
    gap = lv[:, g] - lv[:, g - 1] if g >= 1 else lv[:, 1] - lv[:, 0]
    splitting = lv[:, g - 1] - lv[:, 0] if g >= 1 else np.zeros(len(grid))
    return GapFlowReport(grid, lv, gap, splitting, g)


# ---------------------------------------------------------------------------
# pair-interaction identities


def _first_quantized_pair(values: np.ndarray, A: int, i: int, j: int) -> np.ndarray:
    sites = values.shape[0]
    idx = np.arange(sites**A)
    digits = [(idx // sites ** (A - 1 - a)) % sites for a in range(A)]
    return values[digits[i], digits[j]]


def pair_sum_check(A: int, n: int, D: int, pair_values: np.ndarray) -> float:
    """Max entrywise gap between ``sum_{i<j} V_ij`` and ``A(A-1)/2 V_01`` on Slater determinants."""
    from .potential import same_species_factor

    _, iso = slater_isometry(A, n, D)
    full = sum(_first_quantized_pair(pair_values, A, i, j) for i, j in combinations(range(A), 2))
    one = _first_quantized_pair(pair_values, A, 0, 1)
    lhs = iso.T @ (full[:, None] * iso)
    rhs = same_species_factor(A) * (iso.T @ (one[:, None] * iso))
    return float(np.abs(lhs - rhs).max())


def cross_species_check(A_n: int, A_p: int, n: int, D: int, pair_values: np.ndarray) -> float:
    """Same identity for two species, antisymmetrised separately: factor ``A_n A_p``."""
    from .potential import cross_species_factor

    _, iso_n = slater_isometry(A_n, n, D)
    _, iso_p = slater_isometry(A_p, n, D)
    iso = np.kron(iso_n, iso_p)
    A = A_n + A_p
    full = sum(_first_quantized_pair(pair_values, A, i, A_n + j) for i in range(A_n) for j in range(A_p))
    one = _first_quantized_pair(pair_values, A, 0, A_n)
    lhs = iso.T @ (full[:, None] * iso)
    rhs = cross_species_factor(A_n, A_p) * (iso.T @ (one[:, None] * iso))
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------------------
# cost audit


@dataclass
class AuditRow:
    A: int
    n: int
    D: int
    terms: int
    max_weight: int
    ancillas: int
    qubits: int


@dataclass
class AuditReport:
    rows: list[AuditRow]

    def csv(self) -> str:
        lines = ["A,n,D,terms,max_weight,ancillas"]
        lines += [f"{r.A},{r.n},{r.D},{r.terms},{r.max_weight},{r.ancillas}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def select(self, **fixed) -> list[AuditRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in fixed.items())]


def linear_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = ((y - y.mean()) ** 2).sum()
    r2 = 1.0 - (resid**2).sum() / total if total > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def term_count_audit(points: Sequence[tuple[int, int, int]], plan: str = "published") -> AuditReport:
    """Emit the gadget-mode system at each ``(A, n, D)`` and count its terms.

    Only Pauli sums are built; no matrices.  The potential is left out since
    its cost depends on the chosen function, not on the construction.
    """
    from .config import ProblemSpec
    from .hamiltonian import build_parts

    rows = []
    for A, n, D in points:
        spec = ProblemSpec(A=A, n=n, D=D, mode="gadget", code="binary+gray", plan=plan, Q=1.0)
        parts = build_parts(spec)
        total = parts.total()
        rows.append(
            AuditRow(A, n, D, total.num_terms, total.max_weight(), parts.layout.num_qubits - parts.layout.num_base, parts.layout.num_qubits)
        )
    return AuditReport(rows)


# ---------------------------------------------------------------------------
# gadget versus inline


@dataclass
class EquivalenceReport:
    """Gadget-mode operators compressed onto their penalty kernel.

    For each base assignment the consistency penalties pick a unique
    ancilla assignment; the operators are compared between these kernel
    states and the plain base states of the inline construction.
    """

    kernel_unique: bool
    kinetic_error: float
    penalty_error: float
    kinetic_gadget: np.ndarray
    kinetic_inline: np.ndarray

    @property
    def max_error(self) -> float:
        return max(self.kinetic_error, self.penalty_error)


def gadget_equivalence(A: int = 2, n: int = 2, D: int = 1, cap_qubits: int = 22) -> EquivalenceReport:
    """Compare the gadget-mode system on its kernel with the inline operators."""
    from .config import ProblemSpec
    from .hamiltonian import build_parts
    from .pauli import diagonal_values

    gadget = build_parts(ProblemSpec(A=A, n=n, D=D, mode="gadget", Q=1.0, plan="published"))
    inline = build_parts(ProblemSpec(A=A, n=n, D=D, mode="inline", code="binary+gray", Q=1.0, plan="published"))
    lay = gadget.layout
    if lay.num_qubits > cap_qubits:
        raise ResourceCapError(f"{lay.num_qubits} qubits exceeds cap {cap_qubits}")
    consistency = PauliSum.sum(g.consistency for g in gadget.gadgets)
    signal = PauliSum.sum(g.signal for g in gadget.gadgets if g.signal is not None)
    values = diagonal_values(consistency, range(lay.num_qubits))
    zero = np.flatnonzero(np.abs(values) < 1e-9)
    base_mask = (1 << lay.num_base) - 1
    by_base: dict[int, list[int]] = {}
    for idx in zero.tolist():
        by_base.setdefault(idx & base_mask, []).append(idx)
    unique = len(by_base) == 1 << lay.num_base and all(len(v) == 1 for v in by_base.values())
    kernel = [by_base[b][0] for b in range(1 << lay.num_base)] if unique else []
    if not unique:
        return EquivalenceReport(False, np.inf, np.inf, np.zeros((0, 0)), np.zeros((0, 0)))
    kin_g = restrict(gadget.kinetic, kernel)
    pen_g = restrict(signal, kernel)
    kin_i = to_matrix(inline.kinetic, lay.num_base).toarray()
    pen_i = to_matrix(inline.penalty, lay.num_base).toarray()
    return EquivalenceReport(
        True,
        float(np.abs(kin_g - kin_i).max()),
        float(np.abs(pen_g - pen_i).max()),
        kin_g.real,
        kin_i.real,
    )
