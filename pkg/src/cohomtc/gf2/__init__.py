"""Exact dense linear algebra over prime fields.

The default prime is 2, where rows are bit-packed into uint64 words and
the heavy loops (elimination, products, parity Gram matrices) run in the
compiled extension when available.  Other primes use a plain uint8
representation; they share the same public API but none of the fast
paths.

Vectors are rows throughout: a matrix M with shape (n, m) is the linear
map v -> v @ M from F_p^n to F_p^m, kernel(M) is the space of rows v
with v @ M = 0, and image(M) is the row space.
"""

from __future__ import annotations

import os

import numpy as np

from . import _numpy_backend as _np_backend

if os.environ.get("COHOMTC_FORCE_PY"):
    kernel_backend = _np_backend
else:
    try:
        from . import _speedups as kernel_backend  # type: ignore
    except ImportError:
        kernel_backend = _np_backend

BACKEND = kernel_backend.BACKEND

pack_rows = _np_backend.pack_rows
unpack_rows = _np_backend.unpack_rows
words_for = _np_backend.words_for


class DimensionMismatch(ValueError):
    pass


def _as_dense(rows, ncols, p):
    arr = np.asarray(rows, dtype=np.int64) % p
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[1] != ncols:
        raise DimensionMismatch(f"expected {ncols} columns, got {arr.shape[1]}")
    return arr.astype(np.uint8)


class FpMatrix:
    """Dense matrix over F_p; bit-packed for p = 2."""

    __slots__ = ("p", "nrows", "ncols", "data")

    def __init__(self, p, nrows, ncols, data):
        self.p = p
        self.nrows = nrows
        self.ncols = ncols
        self.data = data

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, nrows, ncols, p=2):
        if p == 2:
            return cls(2, nrows, ncols, np.zeros((nrows, words_for(ncols)), dtype=np.uint64))
        return cls(p, nrows, ncols, np.zeros((nrows, ncols), dtype=np.uint8))

    @classmethod
    def identity(cls, n, p=2):
        return cls.from_dense(np.eye(n, dtype=np.uint8), p)

    @classmethod
    def from_dense(cls, arr, p=2):
        arr = np.atleast_2d(np.asarray(arr))
        dense = (arr.astype(np.int64) % p).astype(np.uint8)
        if p == 2:
            return cls(2, dense.shape[0], dense.shape[1], pack_rows(dense, dense.shape[1]))
        return cls(p, dense.shape[0], dense.shape[1], dense)

    @classmethod
    def from_packed(cls, packed, ncols):
        packed = np.ascontiguousarray(packed, dtype=np.uint64)
        if packed.ndim == 1:
            packed = packed.reshape(1, -1)
        return cls(2, packed.shape[0], ncols, packed)

    @classmethod
    def row_vector(cls, entries, p=2):
        entries = np.asarray(entries)
        return cls.from_dense(entries.reshape(1, -1), p)

    # -- basic accessors ------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def to_dense(self):
        if self.p == 2:
            return unpack_rows(self.data, self.ncols)
        return self.data.copy()

    def get(self, i, j):
        if self.p == 2:
            return int((self.data[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))
        return int(self.data[i, j])

    def row(self, i):
        if self.p == 2:
            return FpMatrix(2, 1, self.ncols, self.data[i : i + 1].copy())
        return FpMatrix(self.p, 1, self.ncols, self.data[i : i + 1].copy())

    def take_rows(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return FpMatrix(self.p, len(idx), self.ncols, self.data[idx].copy())

    def take_cols(self, idx):
        d = self.to_dense()[:, np.asarray(idx, dtype=np.int64)]
        return FpMatrix.from_dense(d, self.p)

    def copy(self):
        return FpMatrix(self.p, self.nrows, self.ncols, self.data.copy())

    def is_zero(self):
        return not self.data.any()

    def __eq__(self, other):
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.nrows}x{self.ncols})"

    def to_bytes(self):
        header = f"{self.p}:{self.nrows}:{self.ncols}:".encode()
        return header + np.ascontiguousarray(self.data).tobytes()

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        self._check_same_shape(other)
        if self.p == 2:
            return FpMatrix(2, self.nrows, self.ncols, self.data ^ other.data)
        return FpMatrix(self.p, self.nrows, self.ncols, (self.data + other.data) % self.p)

    def __sub__(self, other):
        self._check_same_shape(other)
        if self.p == 2:
            return FpMatrix(2, self.nrows, self.ncols, self.data ^ other.data)
        return FpMatrix(self.p, self.nrows, self.ncols, (self.data - other.data) % self.p)

    def _check_same_shape(self, other):
        if self.shape != other.shape or self.p != other.p:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        if self.p != other.p:
            raise DimensionMismatch("prime mismatch")
        if self.p == 2:
            out = kernel_backend.mul(
                np.ascontiguousarray(self.data), self.ncols, np.ascontiguousarray(other.data)
            )
            return FpMatrix(2, self.nrows, other.ncols, np.asarray(out))
        prod = (self.data.astype(np.int64) @ other.data.astype(np.int64)) % self.p
        return FpMatrix(self.p, self.nrows, other.ncols, prod.astype(np.uint8))

    def transpose(self):
        return FpMatrix.from_dense(self.to_dense().T, self.p)

    def kron(self, other):
        if self.p != other.p:
            raise DimensionMismatch("prime mismatch")
        d = np.kron(self.to_dense().astype(np.int64), other.to_dense().astype(np.int64)) % self.p
        return FpMatrix.from_dense(d, self.p)

    @classmethod
    def vstack(cls, mats):
        mats = list(mats)
        p = mats[0].p
        ncols = mats[0].ncols
        for m in mats:
            if m.ncols != ncols or m.p != p:
                raise DimensionMismatch("vstack shape mismatch")
        return cls(p, sum(m.nrows for m in mats), ncols, np.vstack([m.data for m in mats]))

    @classmethod
    def hstack(cls, mats):
        d = np.hstack([m.to_dense() for m in mats])
        return cls.from_dense(d, mats[0].p)

    # -- elimination ----------------------------------------------------

    def rref(self, limit=None):
        """Reduced row echelon form; returns (rref matrix, pivot columns)."""
        if self.p == 2:
            work = np.ascontiguousarray(self.data.copy())
            if work.shape[0] == 0:
                return self.copy(), []
            pivots = list(kernel_backend.rref_inplace(work, self.ncols, limit))
            return FpMatrix(2, self.nrows, self.ncols, work), pivots
        return self._rref_generic(limit)

    def _rref_generic(self, limit=None):
        m = self.data.astype(np.int64).copy()
        p = self.p
        lim = self.ncols if limit is None else limit
        pivots = []
        r = 0
        for c in range(lim):
            if r >= m.shape[0]:
                break
            nz = np.nonzero(m[r:, c])[0]
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                m[[r, piv]] = m[[piv, r]]
            m[r] = (m[r] * pow(int(m[r, c]), p - 2, p)) % p
            rows = np.nonzero(m[:, c])[0]
            rows = rows[rows != r]
            if rows.size:
                m[rows] = (m[rows] - np.outer(m[rows, c], m[r])) % p
            pivots.append(c)
            r += 1
        return FpMatrix.from_dense(m, p), pivots

    def rank(self):
        return len(self.rref()[1])

    def kernel(self):
        """Subspace of row vectors v with v @ self = 0."""
        aug = FpMatrix.hstack([self, FpMatrix.identity(self.nrows, self.p)]) \
            if self.p != 2 else self._aug_identity()
        red, pivots = aug.rref(limit=self.ncols)
        null_rows = red.take_rows(range(len(pivots), self.nrows))
        basis = null_rows.take_cols(range(self.ncols, self.ncols + self.nrows)) \
            if self.p != 2 else _packed_col_slice(null_rows, self.ncols, self.ncols + self.nrows)
        return Subspace.from_rows(self.nrows, basis)

    def _aug_identity(self):
        n = self.nrows
        w = words_for(self.ncols + n)
        aug = np.zeros((n, w), dtype=np.uint64)
        aug[:, : self.data.shape[1]] = self.data
        for i in range(n):
            c = self.ncols + i
            aug[i, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        return FpMatrix(2, n, self.ncols + n, aug)

    def row_space(self):
        return Subspace.from_rows(self.ncols, self)


def _packed_col_slice(m, start, stop):
    d = m.to_dense()[:, start:stop]
    return FpMatrix.from_dense(d, 2)


class Subspace:
    """Row space in canonical reduced echelon form."""

    __slots__ = ("ambient", "basis", "pivots")

    def __init__(self, ambient, basis, pivots):
        self.ambient = ambient
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_rows(cls, ambient, rows: FpMatrix):
        if rows.ncols != ambient:
            raise DimensionMismatch("ambient dimension mismatch")
        red, pivots = rows.rref()
        return cls(ambient, red.take_rows(range(len(pivots))), pivots)

    @property
    def dim(self):
        return self.basis.nrows

    def contains(self, vec: FpMatrix) -> bool:
        return bool(np.all(self.residual(vec).data == 0))

    def residual(self, vecs: FpMatrix) -> FpMatrix:
        """Rows of vecs reduced against the basis (zero iff contained)."""
        if vecs.ncols != self.ambient:
            raise DimensionMismatch("ambient dimension mismatch")
        if self.dim == 0 or vecs.nrows == 0:
            return vecs.copy()
        if vecs.p == 2:
            work = np.ascontiguousarray(vecs.data.copy())
            kernel_backend.reduce_rows(work, np.ascontiguousarray(self.basis.data), self.pivots)
            return FpMatrix(2, vecs.nrows, self.ambient, work)
        work = vecs.data.astype(np.int64)
        bd = self.basis.data.astype(np.int64)
        for i, c in enumerate(self.pivots):
            work = (work - np.outer(work[:, c], bd[i])) % vecs.p
        return FpMatrix.from_dense(work, vecs.p)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient, self.basis))


class RowSolver:
    """Reusable solver for x @ M = b with deterministic free variables (zero).

    Elimination happens once at construction; each solve is a cheap
    reduction.  The transform rows are tracked so that solutions come out
    as explicit combinations of the rows of M.
    """

    __slots__ = ("matrix", "rref", "pivots", "_pivot_pos")

    def __init__(self, matrix: FpMatrix):
        self.matrix = matrix
        aug = matrix._aug_identity() if matrix.p == 2 else FpMatrix.hstack(
            [matrix, FpMatrix.identity(matrix.nrows, matrix.p)]
        )
        red, pivots = aug.rref(limit=matrix.ncols)
        self.rref = red
        self.pivots = pivots
        self._pivot_pos = {c: i for i, c in enumerate(pivots)}

    @property
    def rank(self):
        return len(self.pivots)

    def solve(self, b: FpMatrix):
        """Solve x @ M = b for every row of b; None if any row is inconsistent."""
        x, ok = self.try_solve(b)
        return x if bool(np.all(ok)) else None

    def try_solve(self, b: FpMatrix):
        """Returns (x, consistency mask); inconsistent rows of x are garbage."""
        m = self.matrix
        if b.ncols != m.ncols:
            raise DimensionMismatch("rhs width mismatch")
        if b.p == 2:
            w = words_for(m.ncols + m.nrows)
            work = np.zeros((b.nrows, w), dtype=np.uint64)
            work[:, : b.data.shape[1]] = b.data
            kernel_backend.reduce_rows(work, np.ascontiguousarray(self.rref.data), self.pivots)
            residue = FpMatrix(2, b.nrows, m.ncols + m.nrows, work)
            res_left = _packed_col_slice(residue, 0, m.ncols) if m.ncols else None
            ok = (
                np.ones(b.nrows, dtype=bool)
                if m.ncols == 0
                else ~res_left.to_dense().any(axis=1)
            )
            x = _packed_col_slice(residue, m.ncols, m.ncols + m.nrows)
            return x, ok
        # generic prime: reduce with tracked combinations
        work = np.hstack(
            [b.data.astype(np.int64), np.zeros((b.nrows, m.nrows), dtype=np.int64)]
        )
        bd = self.rref.data.astype(np.int64)
        for i, c in enumerate(self.pivots):
            work = (work - np.outer(work[:, c], bd[i])) % m.p
        ok = ~work[:, : m.ncols].any(axis=1)
        x = FpMatrix.from_dense(work[:, m.ncols :], m.p)
        return x, ok

    def in_row_space(self, b: FpMatrix):
        _, ok = self.try_solve(b)
        return ok


def rank(m: FpMatrix) -> int:
    return m.rank()


def kernel(m: FpMatrix) -> Subspace:
    return m.kernel()


def image(m: FpMatrix) -> Subspace:
    return m.row_space()


def solve(m: FpMatrix, b: FpMatrix):
    return RowSolver(m).solve(b)


def membership(s: Subspace, v: FpMatrix) -> bool:
    return s.contains(v)


def tensor(m: FpMatrix, n: FpMatrix) -> FpMatrix:
    return m.kron(n)
