import numpy as np
import pytest

from fermlap.encoding import QubitLayout, brgc_encode
from fermlap.gadgets import (
    binary_to_brgc_gadget,
    boolean_gadget,
    less_than_comparator,
    ordering_penalty_U,
    reduce_projector_pair,
    reduce_projector_tree,
    swap_gadget,
    swap_gadget_literal_form,
)
from fermlap.pauli import PauliSum, diagonal_values, swap_sum, to_matrix

from kernels import bit, kernel_table, unique_kernel


def test_swap_gadget_kernel():
    g = swap_gadget(0, 1, 2, 3)
    assert g.penalty.is_hermitian() and g.penalty.is_diagonal()
    values = diagonal_values(g.penalty, range(4))
    for s, v in enumerate(values):
        a, b, c, d = (bit(s, j) for j in range(4))
        assert (v == 0) == (c == b and d == a)
        assert v >= 0


def test_literal_swap_form_expansion():
    a, b, c, d = 0, 1, 2, 3
    literal = swap_gadget_literal_form(a, b, c, d)
    zz = sum(
        (PauliSum.from_label(f"Z{p} Z{q}") for p, q in [(b, c), (b, d), (a, c), (a, d)]), PauliSum.zero()
    )
    xyz = (
        PauliSum.from_label(f"X{a} Y{b} Z{d}", 1j) - PauliSum.from_label(f"X{a} Y{b} Z{c}", 1j)
        - PauliSum.from_label(f"Y{a} X{b} Z{d}", 1j) + PauliSum.from_label(f"Y{a} X{b} Z{c}", 1j)
    )
    assert literal.equals(swap_sum(a, b) - 0.25 * (zz + xyz))


def test_literal_swap_form_is_not_hermitian():
    # kept only to document why the emitted form differs
    literal = swap_gadget_literal_form(0, 1, 2, 3)
    assert not literal.is_hermitian()
    m = to_matrix(literal, 4).toarray()
    for s in range(16):
        a, b, c, d = (bit(s, j) for j in range(4))
        if c == b and d == a:
            assert np.allclose(m[:, s], 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_binary_to_gray_kernel(n):
    binary, gray = list(range(n)), list(range(n, 2 * n))
    g = binary_to_brgc_gadget(binary, gray)
    assert g.penalty.max_weight() <= 3
    completion = unique_kernel(g.penalty, binary, gray)
    assert completion is not None
    np.testing.assert_array_equal(completion, [brgc_encode(x) for x in range(1 << n)])


@pytest.mark.parametrize(
    "fn",
    [lambda u, v: u & v, lambda u, v: u | v, lambda u, v: u ^ v, lambda u, v: 1 - (u & v)],
    ids=["and", "or", "xor", "nand"],
)
def test_boolean_gadget_kernel(fn):
    lay = QubitLayout(1, 2, 1, "binary")
    g = boolean_gadget(lay, [0, 1], fn)
    completion = unique_kernel(g.penalty, [0, 1], g.ancillas)
    assert completion.tolist() == [fn(bit(s, 0), bit(s, 1)) for s in range(4)]


@pytest.mark.parametrize("target", ["00", "01", "10", "11"])
def test_projector_pair(target):
    lay = QubitLayout(1, 2, 1, "binary")
    g = reduce_projector_pair(lay, 0, 1, target)
    completion = unique_kernel(g.penalty, [0, 1], g.ancillas)
    for s in range(4):
        matches = f"{bit(s, 0)}{bit(s, 1)}" == target
        assert completion[s] == (0 if matches else 1)


@pytest.mark.parametrize("size", [2, 3, 5, 8])
def test_projector_tree(size):
    lay = QubitLayout(1, size, 1, "binary")
    target = [k % 2 for k in range(size)]
    g = reduce_projector_tree(lay, range(size), target)
    assert len(g.ancillas) == size - 1
    completion = unique_kernel(g.penalty, range(size), g.ancillas)
    assert completion is not None
    root = g.ancillas.index(g.output_qubit)
    want = sum(t << j for j, t in enumerate(target))
    for s in range(1 << size):
        assert bit(completion[s], root) == (0 if s == want else 1)


@pytest.mark.parametrize("mode, m", [("serial", 1), ("serial", 2), ("serial", 3), ("tree", 2), ("tree", 3)])
def test_comparator_kernel(mode, m):
    lay = QubitLayout(2, m, 1, "binary")
    a_reg, b_reg = lay.particle_block(0), lay.particle_block(1)
    g = less_than_comparator(lay, a_reg, b_reg, mode)
    completion = unique_kernel(g.penalty, a_reg + b_reg, g.ancillas)
    assert completion is not None
    out = g.ancillas.index(g.output_qubit)
    for s in range(1 << (2 * m)):
        a, b = s & ((1 << m) - 1), s >> m
        assert bit(completion[s], out) == int(a < b)


def test_comparator_rejects_bad_registers():
    lay = QubitLayout(2, 2, 1, "binary")
    with pytest.raises(ValueError):
        less_than_comparator(lay, [0, 1], [2])
    with pytest.raises(ValueError):
        less_than_comparator(lay, [0, 1], [2, 3], mode="ripple")


@pytest.mark.parametrize("A, n, comparator", [(2, 2, "serial"), (3, 1, "serial"), (2, 2, "tree")])
def test_ordering_penalty_gadget_mode(A, n, comparator):
    lay = QubitLayout(A, n, 1, "binary")
    g = ordering_penalty_U(lay, "gadget", comparator)
    base = list(range(lay.num_base))
    table = kernel_table(g.penalty, base, g.ancillas)
    lowest = table.min(axis=0)
    block = (1 << n) - 1
    for s in range(1 << lay.num_base):
        keys = [(s >> (a * n)) & block for a in range(A)]
        ordered = all(x < y for x, y in zip(keys, keys[1:]))
        assert lowest[s] == pytest.approx(0.0 if ordered else 1.0)
    # consistency terms alone vanish on exactly one ancilla assignment per base state
    assert unique_kernel(g.consistency, base, g.ancillas) is not None


@pytest.mark.parametrize("code", ["brgc", "binary"])
def test_ordering_penalty_inline_is_exact_projector(code):
    lay = QubitLayout(3, 2, 1, code)
    g = ordering_penalty_U(lay, "inline")
    values = diagonal_values(g.penalty, range(lay.num_base))
    assert set(np.round(values, 12)) == {0.0, 1.0}
    assert int(round((1 - values).sum())) == 4  # C(4, 3) ordered triples
