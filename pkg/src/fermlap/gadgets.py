"""Penalty gadgets that bound Pauli weight with ancilla qubits.

Every gadget returns a diagonal, positive semidefinite penalty whose kernel is
the set of basis states where each ancilla holds a fixed boolean function of
its inputs.  Adding ``Q`` times these penalties to a Hamiltonian confines the
low-energy physics to that kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Sequence

import numpy as np

from .encoding import QubitLayout, register_point_table
from .pauli import PauliSum, Projector, ResourceCapError, projector, swap_sum

__all__ = [
    "GadgetEmission",
    "boolean_gadget",
    "reduce_projector_pair",
    "reduce_projector_tree",
    "swap_gadget",
    "swap_gadget_literal_form",
    "binary_to_brgc_gadget",
    "less_than_comparator",
    "ordering_penalty_U",
    "COMPARATOR_MODES",
]

COMPARATOR_MODES = ("serial", "tree")


@dataclass
class GadgetEmission:
    """Penalty terms plus bookkeeping for one gadget.

    Attributes
    ----------
    name : str
    penalty : PauliSum
        Diagonal, non-negative, zero exactly on the documented kernel.
    ancillas : list of int
        Qubits introduced or constrained by this gadget.
    output_qubit : int or None
    parts : list of GadgetEmission
        Sub-gadgets, for reporting.
    signal : PauliSum or None
        The part of ``penalty`` that is the intended operator rather than a
        consistency constraint (the violation projector of the ordering
        penalty).
    """

    name: str
    penalty: PauliSum
    ancillas: list[int] = field(default_factory=list)
    output_qubit: int | None = None
    parts: list["GadgetEmission"] = field(default_factory=list)
    signal: PauliSum | None = None

    @property
    def consistency(self) -> PauliSum:
        return self.penalty if self.signal is None else self.penalty - self.signal

    @property
    def num_terms(self) -> int:
        return self.penalty.num_terms

    def report_line(self) -> str:
        return (
            f"{self.name} ancillas={len(self.ancillas)} terms={self.penalty.num_terms} "
            f"max_weight={self.penalty.max_weight()}"
        )


def _truth_table_penalty(inputs: Sequence[int], output: int, fn: Callable[..., int]) -> PauliSum:
    # sum of projectors onto every row where output != fn(inputs)
    rows = []
    for bits in iproduct((0, 1), repeat=len(inputs)):
        wrong = 1 - int(bool(fn(*bits)))
        rows.append(Projector.from_bits(list(inputs) + [output], list(bits) + [wrong]).expand())
    return PauliSum.sum(rows)


def boolean_gadget(
    layout: QubitLayout,
    inputs: Sequence[int],
    fn: Callable[..., int],
    register: str = "gadget_anc",
    name: str = "boolean",
) -> GadgetEmission:
    """Fresh ancilla forced to ``fn(*inputs)`` by a truth-table penalty."""
    out = layout.allocate(register)
    return GadgetEmission(name, _truth_table_penalty(inputs, out, fn), [out], out)


def reduce_projector_pair(
    layout: QubitLayout, i: int, j: int, target: str = "00", register: str = "gadget_anc"
) -> GadgetEmission:
    """Ancilla whose 0-state marks ``(i, j) == target``.

    With ``target="00"`` this is the four-row table that lets ``P^0_a`` stand
    in for ``P^{00}_{ij}``.
    """
    ti, tj = int(target[0]), int(target[1])
    return boolean_gadget(
        layout, [i, j], lambda bi, bj: int((bi, bj) != (ti, tj)), register, name="reduce_pair"
    )


def reduce_projector_tree(
    layout: QubitLayout,
    qubits: Sequence[int],
    target: Sequence[int] | str | None = None,
    register: str = "gadget_anc",
) -> GadgetEmission:
    """Balanced tree of pair reductions for a long projector.

    The output ancilla is 0 exactly when every ``qubits[k]`` equals
    ``target[k]`` (default all zeros).  Uses ``len(qubits) - 1`` ancillas in
    ``ceil(log2(len(qubits)))`` layers.
    """
    qubits = list(qubits)
    if len(qubits) < 2:
        raise ValueError("a projector tree needs at least two qubits")
    target = [0] * len(qubits) if target is None else [int(b) for b in target]
    layer = list(zip(qubits, target))
    parts: list[GadgetEmission] = []
    while len(layer) > 1:
        nxt = []
        for k in range(0, len(layer) - 1, 2):
            (qa, ta), (qb, tb) = layer[k], layer[k + 1]
            g = reduce_projector_pair(layout, qa, qb, f"{ta}{tb}", register)
            parts.append(g)
            nxt.append((g.output_qubit, 0))
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    root, root_target = layer[0]
    assert root_target == 0
    return GadgetEmission(
        "reduce_tree",
        PauliSum.sum(p.penalty for p in parts),
        [a for p in parts for a in p.ancillas],
        root,
        parts,
    )


def swap_gadget(a: int, b: int, c: int, d: int) -> GadgetEmission:
    """Copy a swapped pair: kernel has ``c == b`` and ``d == a``.

    Returns the diagonal penalty ``P^{01}_{cb} + P^{10}_{cb} + P^{01}_{da} +
    P^{10}_{da} = 1 - (Z_c Z_b + Z_d Z_a) / 2``.  This is the mismatch
    projector of :func:`swap_gadget_literal_form` conjugated by ``chi_{ab}``;
    unlike that product it is hermitian and non-negative, with the same
    kernel.
    """
    if len({a, b, c, d}) != 4:
        raise ValueError("swap gadget needs four distinct qubits")
    penalty = projector([c, b], "01") + projector([c, b], "10")
    penalty = penalty + projector([d, a], "01") + projector([d, a], "10")
    return GadgetEmission("swap", penalty, [c, d], None)


def swap_gadget_literal_form(a: int, b: int, c: int, d: int) -> PauliSum:
    """Mismatch projector on ``(c,a), (d,b)`` multiplied by ``chi_{ab}``.

    Kept for comparison only.  It annihilates the intended copies, but the
    projector does not commute with ``chi_{ab}``, so the product is not
    hermitian.
    """
    mismatch = (
        projector([c, a], "01") + projector([c, a], "10")
        + projector([d, b], "01") + projector([d, b], "10")
    )
    return mismatch @ swap_sum(a, b)


def binary_to_brgc_gadget(binary: Sequence[int], gray: Sequence[int]) -> GadgetEmission:
    """Tie a Gray-code copy to a binary register (both listed LSB first).

    Zero exactly when ``gray[i] == binary[i] ^ binary[i+1]`` for ``i < n-1``
    and ``gray[n-1] == binary[n-1]``.
    """
    binary, gray = list(binary), list(gray)
    n = len(binary)
    if len(gray) != n:
        raise ValueError("registers must have equal length")
    rows = []
    for i in range(n - 1):
        for bits in ("100", "111", "010", "001"):
            rows.append(projector([gray[i], binary[i], binary[i + 1]], bits))
    rows += [projector([gray[-1], binary[-1]], "01"), projector([gray[-1], binary[-1]], "10")]
    return GadgetEmission("binary_to_gray", PauliSum.sum(rows), list(gray), None)


def _and(layout, p, q, register, negate_p=False, negate_q=False, name="and"):
    return boolean_gadget(
        layout, [p, q], lambda u, v: int((u ^ negate_p) and (v ^ negate_q)), register, name
    )


def less_than_comparator(
    layout: QubitLayout,
    a_reg: Sequence[int],
    b_reg: Sequence[int],
    mode: str = "serial",
    register: str = "comparator_anc",
) -> GadgetEmission:
    """Ancilla network whose output qubit is 1 exactly when ``a < b``.

    Registers are binary and listed least significant bit first.  ``serial``
    ripples from the low bit upward with one XOR, two AND and one OR ancilla
    per stage; ``tree`` splits the register recursively into halves and
    combines (less-than, equal) flags.
    """
    a_reg, b_reg = list(a_reg), list(b_reg)
    m = len(a_reg)
    if m != len(b_reg) or m == 0:
        raise ValueError("registers must be non-empty and of equal length")
    if mode not in COMPARATOR_MODES:
        raise ValueError(f"unknown comparator mode {mode!r}")
    parts: list[GadgetEmission] = []

    def add(g):
        parts.append(g)
        return g.output_qubit

    if mode == "serial":
        less = add(_and(layout, a_reg[0], b_reg[0], register, negate_p=True, name="lt_bit"))
        for k in range(1, m):
            differ = add(boolean_gadget(layout, [a_reg[k], b_reg[k]], lambda u, v: u ^ v, register, "xor"))
            decided = add(_and(layout, differ, b_reg[k], register, name="and"))
            carried = add(_and(layout, differ, less, register, negate_p=True, name="and"))
            less = add(boolean_gadget(layout, [decided, carried], lambda u, v: u | v, register, "or"))
        out = less
    else:
        def split(lo: int, hi: int, need_eq: bool):
            if hi - lo == 1:
                lt = add(_and(layout, a_reg[lo], b_reg[lo], register, negate_p=True, name="lt_bit"))
                eq = None
                if need_eq:
                    eq = add(boolean_gadget(layout, [a_reg[lo], b_reg[lo]], lambda u, v: 1 - (u ^ v), register, "eq_bit"))
                return lt, eq
            mid = (lo + hi) // 2
            lt_low, eq_low = split(lo, mid, need_eq)
            lt_high, eq_high = split(mid, hi, True)
            via_low = add(_and(layout, eq_high, lt_low, register, name="and"))
            via_high = add(_and(layout, eq_high, lt_high, register, negate_p=True, name="and"))
            lt = add(boolean_gadget(layout, [via_low, via_high], lambda u, v: u | v, register, "or"))
            eq = add(_and(layout, eq_high, eq_low, register, name="and")) if need_eq else None
            return lt, eq

        out, _ = split(0, m, False)
    return GadgetEmission(
        f"less_than_{mode}",
        PauliSum.sum(p.penalty for p in parts),
        [q for p in parts for q in p.ancillas],
        out,
        parts,
    )


def _violation_table(layout: QubitLayout) -> np.ndarray:
    """1 on every base assignment whose particle keys are not strictly increasing."""
    block = layout.block_size
    total = layout.num_base
    idx = np.arange(1 << total, dtype=np.int64)
    to_key = register_point_table(layout.n, layout.D, layout.code)
    keys = [to_key[(idx >> (a * block)) & ((1 << block) - 1)] for a in range(layout.A)]
    ordered = np.ones(len(idx), dtype=bool)
    for lo, hi in zip(keys[:-1], keys[1:]):
        ordered &= lo < hi
    return (~ordered).astype(float)


def ordering_penalty_U(
    layout: QubitLayout,
    mode: str = "inline",
    comparator_mode: str = "serial",
    cap_qubits: int = 22,
) -> GadgetEmission:
    """Penalty on base states whose particle keys are not strictly ascending.

    ``inline`` expands the exact projector over all base qubits (no
    ancillas).  ``gadget`` chains ``A - 1`` comparators on adjacent binary
    base blocks, joins their outputs with a projector tree, and penalises the
    tree output; its penalty also carries every consistency term.
    """
    if layout.A < 2:
        raise ValueError("the ordering penalty needs at least two particles")
    if mode == "inline":
        if layout.num_base > cap_qubits:
            raise ResourceCapError(
                f"inline ordering penalty over {layout.num_base} qubits exceeds cap {cap_qubits}"
            )
        from .potential import diagonal_to_zsum

        table = _violation_table(layout)
        exact = diagonal_to_zsum(table, range(layout.num_base))
        return GadgetEmission("ordering_inline", exact, signal=exact)
    if mode != "gadget":
        raise ValueError(f"unknown mode {mode!r}")
    if layout.code != "binary":
        raise ValueError("gadget-mode comparators need binary base registers")
    parts = [
        less_than_comparator(
            layout, layout.particle_block(a), layout.particle_block(a + 1), comparator_mode
        )
        for a in range(layout.A - 1)
    ]
    outs = [g.output_qubit for g in parts]
    if len(outs) == 1:
        violation = projector([outs[0]], "0")
    else:
        tree = reduce_projector_tree(layout, outs, [1] * len(outs))
        parts.append(tree)
        violation = projector([tree.output_qubit], "1")
    penalty = PauliSum.sum([p.penalty for p in parts] + [violation])
    return GadgetEmission(
        "ordering_gadget",
        penalty,
        [q for p in parts for q in p.ancillas],
        parts[-1].output_qubit,
        parts,
        signal=violation,
    )
