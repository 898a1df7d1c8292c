"""Cut vectors, cut matrices and elliptope membership.

A cut vector is a +/-1 vector ``c`` of length ``n``; its cut matrix ``c c^t``
is a vertex of the elliptope (the set of ``n x n`` correlation matrices).
Entries are stored as small signed integers so all cut algebra stays exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

DEFAULT_PSD_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class CutVector:
    """Immutable +/-1 vector."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[int] | np.ndarray):
        arr = np.asarray(list(entries) if not isinstance(entries, np.ndarray) else entries)
        if arr.ndim != 1 or arr.size == 0:
            raise InputError("a cut vector must be a non-empty 1-D sequence")
        if not np.all((arr == 1) | (arr == -1)):
            raise InputError("cut vector entries must be +1 or -1")
        self._entries = _readonly(arr.astype(np.int8))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return int(self._entries.size)

    def __neg__(self) -> "CutVector":
        return CutVector(-self._entries)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return (int(x) for x in self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CutVector):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self) -> int:
        return hash(self._entries.tobytes())

    def __repr__(self) -> str:
        return "CutVector(%s)" % "".join("+" if x > 0 else "-" for x in self._entries)


class CutMatrix:
    """The rank-one matrix ``c c^t`` of a cut vector.

    Equality compares entries, so ``CutMatrix(c) == CutMatrix(-c)``.
    """

    __slots__ = ("source", "_entries")

    def __init__(self, source: CutVector):
        self.source = source
        e = source.entries.astype(np.int64)
        self._entries = _readonly(np.outer(e, e))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self.source.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CutMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self) -> int:
        return hash(self._entries.tobytes())

    def __repr__(self) -> str:
        return "CutMatrix(%r)" % (self.source,)


def cut_vector_from_subset(S: Iterable[int], n: int) -> CutVector:
    """Cut vector of the subset ``S`` of ``{1..n}``: +1 on ``S``, -1 elsewhere."""
    if n < 1:
        raise InputError("n must be a positive integer")
    entries = np.full(n, -1, dtype=np.int8)
    for i in S:
        if not 1 <= i <= n:
            raise InputError("index %r outside {1..%d}" % (i, n))
        entries[i - 1] = 1
    return CutVector(entries)


def cut_matrix(c: CutVector) -> CutMatrix:
    return CutMatrix(c)


def as_symmetric(X, *, exact: bool = True) -> np.ndarray:
    """Validate ``X`` as a square symmetric matrix and return it as an array."""
    if isinstance(X, CutMatrix):
        return X.entries
    A = np.asarray(X)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("expected a square matrix, got shape %r" % (A.shape,))
    if A.dtype.kind in "fc" and not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    if exact and not np.array_equal(A, A.T):
        raise InputError("matrix is not symmetric")
    return A


def _is_psd_exact(A: np.ndarray) -> bool:
    # Symmetric elimination over the rationals; a zero pivot needs a zero row.
    n = A.shape[0]
    M = [[Fraction(int(A[i, j])) for j in range(n)] for i in range(n)]
    for k in range(n):
        d = M[k][k]
        if d < 0:
            return False
        if d == 0:
            if any(M[k][j] != 0 for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = M[i][k] / d
            if f:
                for j in range(k + 1, n):
                    M[i][j] -= f * M[k][j]
    return True


def is_correlation_matrix(X, tol: float = DEFAULT_PSD_TOL) -> bool:
    """True iff ``X`` has unit diagonal (within ``tol``) and ``lambda_min >= -tol``.

    Cut matrices and integer arrays are decided exactly; ``tol`` then only
    matters for the diagonal, which is integral anyway.
    """
    if tol < 0:
        raise InputError("tol must be nonnegative")
    if isinstance(X, CutMatrix):
        # c c^t has eigenvalues n and 0: psd with unit diagonal by construction
        return bool(np.all(np.diag(X.entries) == 1))
    A = as_symmetric(X)
    if A.shape[0] == 0:
        return True
    if A.dtype.kind in "iub":
        return bool(np.all(np.abs(np.diag(A) - 1) <= tol)) and _is_psd_exact(A)
    A = A.astype(float)
    if np.any(np.abs(np.diag(A) - 1.0) > tol):
        return False
    return bool(np.linalg.eigvalsh(A)[0] >= -tol)


def simplicial_dim_feasible(k: int, n: int) -> bool:
    """Whether the elliptope of order ``n`` can have a ``k``-dimensional simplicial face."""
    return k * (k + 1) <= 2 * (n - 1)


def lower_triangle_embed(X) -> tuple[float, float, float]:
    """Map a 3x3 symmetric matrix to ``(X21, X31, X32)``."""
    A = as_symmetric(X, exact=False)
    if A.shape != (3, 3):
        raise InputError("lower_triangle_embed needs a 3x3 matrix")
    return (A[1, 0].item(), A[2, 0].item(), A[2, 1].item())


def all_cut_vectors(n: int, *, up_to_sign: bool = False) -> list[CutVector]:
    """Every cut vector of length ``n`` (one per +/- pair when ``up_to_sign``)."""
    if n < 1:
        raise InputError("n must be a positive integer")
    vecs = []
    for mask in range(2 ** (n - 1) if up_to_sign else 2**n):
        vecs.append(CutVector([-1 if (mask >> (n - 1 - i)) & 1 else 1 for i in range(n)]))
    return vecs


def cut_vectors_to_array(cuts: Sequence[CutVector]) -> np.ndarray:
    """Stack cut vectors as the columns of an ``n x r`` integer array."""
    if not cuts:
        raise InputError("need at least one cut vector")
    n = cuts[0].n
    if any(c.n != n for c in cuts):
        raise InputError("cut vectors have mixed lengths")
    return np.stack([c.entries for c in cuts], axis=1).astype(np.int64)
