"""Pure-numpy kernels for bit-packed GF(2) row operations.

Rows are packed little-endian into uint64 words: column c lives in word
c // 64, bit c % 64.  All kernels here have a compiled twin in
``_speedups.pyx``; this module is the fallback selected at import time
when the extension is unavailable (or COHOMTC_FORCE_PY is set).
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def words_for(ncols: int) -> int:
    return max(1, (ncols + 63) >> 6)


def pack_rows(bits: np.ndarray, ncols: int) -> np.ndarray:
    """Pack a (n, ncols) 0/1 array into (n, words) uint64."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8) & 1
    n = bits.shape[0]
    w = words_for(ncols)
    padded = np.zeros((n, w * 64), dtype=np.uint8)
    padded[:, :ncols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(n, w)

def unpack_rows(packed: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of pack_rows; returns a (n, ncols) uint8 array."""
    n = packed.shape[0]
    if n == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(packed).view(np.uint8).reshape(n, -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :ncols].copy()


def get_col(packed: np.ndarray, c: int) -> np.ndarray:
    return ((packed[:, c >> 6] >> np.uint64(c & 63)) & np.uint64(1)).astype(np.uint8)


def rref_inplace(m: np.ndarray, ncols: int, limit: int | None = None) -> list[int]:
    """Reduce m (packed, modified in place) to reduced row echelon form.

    Pivots are searched only in the first `limit` columns (default: all);
    returns the pivot column list.  Deterministic: first nonzero row wins.
    """
    if limit is None:
        limit = ncols
    nrows = m.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        if r >= nrows:
            break
        w = c >> 6
        b = np.uint64(c & 63)
        col = (m[r:, w] >> b) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        rows = np.nonzero((m[:, w] >> b) & np.uint64(1))[0]
        rows = rows[rows != r]
        if rows.size:
            m[rows] ^= m[r]
        pivots.append(c)
        r += 1
    return pivots


def reduce_rows(x: np.ndarray, r: np.ndarray, pivots: list[int]) -> None:
    """Eliminate the pivot bits of every row of x against the rref r, in place."""
    for i, c in enumerate(pivots):
        w = c >> 6
        b = np.uint64(c & 63)
        rows = np.nonzero((x[:, w] >> b) & np.uint64(1))[0]
        if rows.size:
            x[rows] ^= r[i]


def mul(a: np.ndarray, a_cols: int, b: np.ndarray) -> np.ndarray:
    """Packed product: c[i] = xor of b[j] over set bits j of a's row i.

    a has a_cols logical columns; b has a_cols rows.  Uses a float32 BLAS
    matmul on the unpacked arrays (exact for a_cols < 2**24) since that
    beats a python bit loop by orders of magnitude.
    """
    if a_cols != b.shape[0]:
        raise ValueError("inner dimension mismatch")
    ad = unpack_rows(a, a_cols).astype(np.float32)
    bw = b.shape[1]
    bd = unpack_rows(b, bw * 64).astype(np.float32)
    prod = (ad @ bd).astype(np.int64) & 1
    return pack_rows(prod.astype(np.uint8), bw * 64)[:, :bw]


def gram(a: np.ndarray, b: np.ndarray, ncols: int) -> np.ndarray:
    """Parity Gram matrix: g[i, j] = popcount(a[i] & b[j]) mod 2, as uint8."""
    ad = unpack_rows(a, ncols).astype(np.float32)
    bd = unpack_rows(b, ncols).astype(np.float32)
    return ((ad @ bd.T).astype(np.int64) & 1).astype(np.uint8)


def xor_select(b: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Xor of the selected rows of b (one packed row; zeros when idx empty)."""
    if idx.size == 0:
        return np.zeros(b.shape[1], dtype=np.uint64)
    return np.bitwise_xor.reduce(b[idx], axis=0)
