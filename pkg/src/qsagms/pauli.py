"""Single-qubit Pauli arithmetic in the binary symplectic representation.

A Pauli is encoded as an integer in {0, 1, 2, 3}:

    I = 0 = (x=0, z=0)
    X = 1 = (x=1, z=0)
    Z = 2 = (x=0, z=1)
    Y = 3 = (x=1, z=1)

i.e. ``code = x_bit | (z_bit << 1)``.  Composition modulo global phase is
XOR of codes, and two Paulis anticommute exactly when their symplectic
(trace) inner product is 1.  All functions accept plain ints or numpy
integer arrays and operate element-wise.

An error pattern on n qubits ("Pauli vector") is a length-n uint8 array of
these codes.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .code import SparseCheckMatrix

PAULI_I = 0
PAULI_X = 1
PAULI_Z = 2
PAULI_Y = 3

#: Symbol letters indexed by code.
PAULI_NAMES = "IXZY"

#: Letter -> code, for parsers.
PAULI_CODES = {"I": PAULI_I, "X": PAULI_X, "Z": PAULI_Z, "Y": PAULI_Y}


def x_bit(p):
    """X component of the symplectic pair."""
    return p & 1


def z_bit(p):
    """Z component of the symplectic pair."""
    return p >> 1


def from_bits(x, z):
    """Pauli code from a symplectic pair (inverse of x_bit/z_bit)."""
    return (x & 1) | ((z & 1) << 1)


def trace_inner(a, b):
    """Symplectic form of two Paulis over GF(2).

    Returns 1 iff ``a`` and ``b`` anticommute, 0 otherwise.  Symmetric and
    bilinear; ``trace_inner(p, p) == 0`` for every Pauli.
    """
    return (x_bit(a) & z_bit(b)) ^ (z_bit(a) & x_bit(b))


def pauli_compose(a, b):
    """Group composition modulo global phase: XOR of symplectic pairs."""
    return a ^ b


def pauli_vector(symbols, n=None) -> np.ndarray:
    """Normalize an error pattern to a uint8 code array, validating range.

    ``symbols`` may be a sequence of codes or a string of letters (IXZY).
    If ``n`` is given the length is checked against it.
    """
    if isinstance(symbols, str):
        try:
            arr = np.array([PAULI_CODES[c] for c in symbols], dtype=np.uint8)
        except KeyError as exc:
            raise ValueError(f"unknown Pauli letter {exc.args[0]!r}") from None
    else:
        arr = np.asarray(symbols)
        if arr.ndim != 1:
            raise ValueError("Pauli vector must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() > 3):
            raise ValueError("Pauli codes must lie in {0,1,2,3}")
        arr = arr.astype(np.uint8)
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected {n} qubits, got {arr.shape[0]}")
    return arr


def syndrome(H: "SparseCheckMatrix", e) -> np.ndarray:
    """Syndrome bits of error pattern ``e`` under check matrix ``H``.

    Bit i is the GF(2) sum over the nonzero entries of row i of the trace
    inner product between the row symbol and the error symbol, i.e. 1 iff
    stabilizer i anticommutes with ``e``.
    """
    e = pauli_vector(e, n=H.n)
    s = np.zeros(H.m, dtype=np.uint8)
    for i, row in enumerate(H.rows):
        acc = 0
        for j, sym in row:
            acc ^= trace_inner(sym, int(e[j]))
        s[i] = acc
    return s


def residual_syndrome(s, H: "SparseCheckMatrix", e_hat) -> np.ndarray:
    """Observed syndrome XOR the syndrome of the estimate ``e_hat``.

    All-zero output means ``e_hat`` reproduces the observed syndrome.
    """
    s = np.asarray(s, dtype=np.uint8)
    if s.shape != (H.m,):
        raise ValueError(f"syndrome length {s.shape} does not match m={H.m}")
    return s ^ syndrome(H, e_hat)


def check_orthogonality(H: "SparseCheckMatrix") -> bool:
    """True iff every pair of rows of ``H`` commutes.

    Row pairs (i, i') are checked by sparse column intersection; the pair
    commutes when the XOR over shared columns of the symbol trace inner
    products is 0.  Exact and exhaustive (including i = i', which is
    trivially 0); intended to run once per code load.
    """
    maps = [dict(row) for row in H.rows]
    for i in range(H.m):
        row_i = maps[i]
        for i2 in range(i + 1, H.m):
            row_k = maps[i2]
            if len(row_k) < len(row_i):
                small, large = row_k, row_i
            else:
                small, large = row_i, row_k
            acc = 0
            for j, sym in small.items():
                other = large.get(j)
                if other is not None:
                    acc ^= trace_inner(sym, other)
            if acc:
                return False
    return True
