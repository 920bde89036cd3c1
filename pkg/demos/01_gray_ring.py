"""
Hopping on a ring in Gray code
==============================

A particle on a ring of ``2**n`` sites stores its position in ``n`` qubits.
With the binary-reflected Gray code neighbouring sites differ in one bit,
so every hop is a single X flip with a projector deciding which bit flips.
"""

# %%
import numpy as np

from fermlap import brgc_encode, brgc_laplacian_1p
from fermlap.pauli import to_matrix

n = 3
ring = brgc_laplacian_1p(n)
for term in ring.terms():
    print(f"{term.coefficient.real:+.2f}  {term.label()}")

# %%
# In the Gray-ordered basis the matrix is the cycle adjacency.
m = to_matrix(ring, n).toarray().real
order = [brgc_encode(x) for x in range(1 << n)]
print(m[np.ix_(order, order)].astype(int))

# %%
# Its eigenvalues are 2 cos(2 pi k / 2**n).
print(np.round(np.linalg.eigvalsh(m), 6))
print(np.round(np.sort(2 * np.cos(2 * np.pi * np.arange(1 << n) / (1 << n))), 6))
