"""Laurent-Poljak certificates for simplicial faces generated by cut vectors.

For cut vectors ``c_1..c_r`` (``r >= 2``) let ``W = [c_1 ... c_r]`` and
``Z = [1 | c_i * c_j for i < j]``. If both have full column rank, the convex
hull of the cut matrices ``c_i c_i^t`` is a simplicial face of the elliptope
of dimension ``r - 1``. The condition is sufficient only, hence the verdict
vocabulary ``CERTIFIED_SIMPLICIAL`` / ``INCONCLUSIVE``.

Ranks are decided exactly: first modulo a random prime above ``2**30``
(full rank mod p implies full rank over Q), then, if that is inconclusive,
by fraction-free (Bareiss) elimination over the integers.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cutgeom import CutVector, cut_vectors_to_array
from .errors import ConsistencyError, InputError

_PRIME_LO = 2**30
_PRIME_HI = 2**31  # keeps p**2 below 2**62 so int64 row updates cannot overflow
_MR_BASES = (2, 3, 5, 7, 11, 13, 17)  # deterministic below 3.4e14
_prime_rng = random.Random()


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    for q in _MR_BASES:
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random | None = None) -> int:
    """A uniformly chosen odd candidate in ``[2**30, 2**31)`` that passes Miller-Rabin."""
    rng = rng or _prime_rng
    while True:
        m = rng.randrange(_PRIME_LO + 1, _PRIME_HI, 2)
        if _is_prime(m):
            return m


def _as_int_matrix(M) -> np.ndarray:
    A = np.asarray(M)
    if A.ndim != 2:
        raise InputError("expected a 2-D matrix")
    if A.dtype == object:
        if not all(int(x) == x for x in A.flat):
            raise InputError("matrix entries must be integers")
    elif A.dtype.kind == "f":
        if not np.all(np.isfinite(A)) or not np.all(A == np.round(A)):
            raise InputError("matrix entries must be integers")
    elif A.dtype.kind not in "iub":
        raise InputError("matrix entries must be integers")
    return A


def rank_mod_p(M, p: int) -> int:
    """Rank of the integer matrix ``M`` over GF(p), for a prime ``p < 2**31``."""
    A0 = _as_int_matrix(M)
    if A0.dtype == object:
        A = np.array([[int(x) % p for x in row] for row in A0], dtype=np.int64).reshape(A0.shape)
    else:
        A = A0.astype(np.int64) % p
    m, k = A.shape
    rank = 0
    for col in range(k):
        if rank == m:
            break
        nz = np.flatnonzero(A[rank:, col])
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, col]), -1, p)
        A[rank] = A[rank] * inv % p
        below = A[rank + 1 :]
        f = below[:, col].copy()
        below -= f[:, None] * A[rank]
        below %= p
        rank += 1
    return rank


def _hadamard_fits_int64(A: np.ndarray) -> bool:
    # Every minor is bounded by the product of column norms; Bareiss forms
    # a*b - c*d from such minors before the exact division.
    norms = np.sqrt((A.astype(float) ** 2).sum(axis=0))
    log2_bound = float(np.sum(np.log2(np.maximum(norms, 1.0))))
    return 2 * log2_bound + 1 < 62


def rank_exact(M) -> int:
    """Rank over Q by fraction-free Bareiss elimination.

    Runs in int64 when the Hadamard bound guarantees no overflow and in
    arbitrary-precision Python integers otherwise.
    """
    A0 = _as_int_matrix(M)
    m, k = A0.shape
    if m == 0 or k == 0:
        return 0
    if A0.dtype != object and _hadamard_fits_int64(A0):
        A = A0.astype(np.int64)
    else:
        A = np.array([[int(x) for x in row] for row in A0], dtype=object)
    rank = 0
    prev = 1
    for col in range(k):
        if rank == m:
            break
        nz = np.flatnonzero(A[rank:, col] != 0)
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        pv = A[rank, col]
        rest = A[rank + 1 :, col + 1 :]
        rest[...] = (rest * pv - np.outer(A[rank + 1 :, col], A[rank, col + 1 :])) // prev
        A[rank + 1 :, col] = 0
        prev = pv
        rank += 1
    return rank


def is_full_column_rank(M, *, prime: int | None = None) -> bool:
    """Whether the integer matrix ``M`` has rank equal to its column count over Q."""
    A = _as_int_matrix(M)
    m, k = A.shape
    if k == 0:
        return True
    if m < k:
        return False
    p = prime if prime is not None else random_prime()
    if rank_mod_p(A, p) == k:
        return True
    return rank_exact(A) == k


def pair_order(r: int) -> list[tuple[int, int]]:
    """Lexicographic 1-based pairs ``(i, j)`` with ``1 <= i < j <= r``."""
    return list(itertools.combinations(range(1, r + 1), 2))


@dataclass(frozen=True)
class CertificateMatrices:
    """``W = [c_i]``, ``Z = [1 | c_i * c_j]`` and ``Y = [1 - c_i * c_j]`` for ``i < j``.

    ``Y`` is formed after flipping each ``c_i`` so that its first entry is +1;
    with that normalization ``Y`` has full column rank iff ``Z`` does.
    """

    W: np.ndarray
    Z: np.ndarray
    Y: np.ndarray
    r: int
    n: int
    column_order: tuple[tuple[int, int], ...]

    @property
    def R(self) -> int:
        return 1 + self.r * (self.r - 1) // 2

    @property
    def R_prime(self) -> int:
        return self.r * (self.r - 1) // 2


def _pair_products(W: np.ndarray) -> tuple[np.ndarray, list[tuple[int, int]]]:
    r = W.shape[1]
    order = pair_order(r)
    if not order:
        return np.empty((W.shape[0], 0), dtype=np.int64), order
    ii = np.array([i - 1 for i, _ in order])
    jj = np.array([j - 1 for _, j in order])
    return W[:, ii] * W[:, jj], order


def build_certificate_matrices(cuts: Sequence[CutVector]) -> CertificateMatrices:
    if len(cuts) < 2:
        raise InputError("the certificate needs r >= 2 cut vectors")
    W = cut_vectors_to_array(cuts)
    P, order = _pair_products(W)
    ones = np.ones((W.shape[0], 1), dtype=np.int64)
    Z = np.hstack([ones, P])
    # Y uses the representatives with first coordinate +1 (c and -c give the
    # same cut matrix). Without a coordinate where all c_i agree, Y can have
    # full column rank while Z does not.
    P_hat, _ = _pair_products(W * W[0])
    Y = 1 - P_hat
    for a in (W, Z, Y):
        a.setflags(write=False)
    return CertificateMatrices(W=W, Z=Z, Y=Y, r=W.shape[1], n=W.shape[0], column_order=tuple(order))


class Verdict(str, enum.Enum):
    CERTIFIED_SIMPLICIAL = "CERTIFIED_SIMPLICIAL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Certificate:
    w_full_rank: bool
    z_full_rank: bool
    y_full_rank: bool
    verdict: Verdict
    face_dimension: int | None
    r: int
    n: int

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_SIMPLICIAL


def certify_matrices(mats: CertificateMatrices) -> Certificate:
    """Decide the rank conditions on prebuilt certificate matrices.

    The Y route is always computed and must agree with the Z route.
    """
    p = random_prime()
    w_ok = is_full_column_rank(mats.W, prime=p)
    z_ok = is_full_column_rank(mats.Z, prime=p)
    y_ok = is_full_column_rank(mats.Y, prime=p)
    if y_ok != z_ok:
        raise ConsistencyError(
            "Z full rank (%s) and Y full rank (%s) disagree for r=%d, n=%d"
            % (z_ok, y_ok, mats.r, mats.n)
        )
    certified = w_ok and z_ok
    return Certificate(
        w_full_rank=w_ok,
        z_full_rank=z_ok,
        y_full_rank=y_ok,
        verdict=Verdict.CERTIFIED_SIMPLICIAL if certified else Verdict.INCONCLUSIVE,
        face_dimension=mats.r - 1 if certified else None,
        r=mats.r,
        n=mats.n,
    )


def certify_simplicial(cuts: Sequence[CutVector]) -> Certificate:
    return certify_matrices(build_certificate_matrices(cuts))


def check_general_position(cuts: Sequence[CutVector]) -> bool:
    """Whether every sign pattern in ``{+1,-1}^r`` occurs in some coordinate.

    Equivalently, the Hadamard products ``prod_{i in I}(1 + c_i) *
    prod_{i not in I}(1 - c_i)`` are all nonzero.
    """
    r = len(cuts)
    if r < 1:
        raise InputError("need at least one cut vector")
    if r > 30:
        raise InputError("general position check limited to r <= 30")
    W = cut_vectors_to_array(cuts)
    if W.shape[0] < 2**r:
        return False
    bits = (W > 0).astype(np.int64)
    codes = bits @ (1 << np.arange(r, dtype=np.int64))
    return np.unique(codes).size == 2**r


__all__ = [
    "Certificate",
    "CertificateMatrices",
    "Verdict",
    "build_certificate_matrices",
    "certify_matrices",
    "certify_simplicial",
    "check_general_position",
    "is_full_column_rank",
    "pair_order",
    "random_prime",
    "rank_exact",
    "rank_mod_p",
]
