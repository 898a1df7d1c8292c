"""Probability bounds for random simplicial faces, and exact moment oracles.

The bound evaluators are closed forms. The oracles compute second-moment
matrices of the row vectors ``w``, ``z`` and ``y`` of the certificate
matrices by exact enumeration over all ``2**r`` sign vectors, using rational
arithmetic, and compare them to the closed forms.

Matrices returned by the oracles are numpy object arrays of ``Fraction``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import ConsistencyError, InputError
from .lpcert import pair_order

#: constant in the unbalanced Oliveira bound, 4/13122 (about 3.048e-4)
C_THM3 = 4.0 / 13122.0
ENUMERATION_MAX_R = 12
EIG_TOL = 1e-9


def _open_p(p) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InputError("p must lie strictly inside (0, 1), got %r" % p)
    return p


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


# --------------------------------------------------------------------------
# theorem bounds


def thm1_failure_bound(r: int, n: int) -> float:
    """``r^2 exp(-n / r^2)``, the failure probability bounded in the balanced case."""
    if r < 2 or n < 1:
        raise InputError("need r >= 2 and n >= 1")
    return r * r * math.exp(-n / (r * r))


def thm2_failure_bound(p, r: int, n: int) -> float:
    """``r^2 exp(-4 p^2 (1-p)^2 n / r^2)``."""
    p = _open_p(p)
    if r < 2 or n < 0:
        raise InputError("need r >= 2 and n >= 0")
    q = p * (1.0 - p)
    return r * r * math.exp(-4.0 * q * q * n / (r * r))


def thm3_failure_bound(p, r: int, n: int, c: float = C_THM3) -> float:
    """``4 exp((r^2 - c p^2 (1-p)^2 n) / 4)``."""
    p = _open_p(p)
    if r < 2 or n < 0:
        raise InputError("need r >= 2 and n >= 0")
    q = p * (1.0 - p)
    return 4.0 * math.exp((r * r - c * q * q * n) / 4.0)


def bound_thm1(r: int, n: int, *, clamp: bool = True) -> float:
    """Balanced case (p = 1/2): ``1 - r^2 exp(-n / r^2)``."""
    raw = 1.0 - thm1_failure_bound(r, n)
    return _clamp01(raw) if clamp else raw


def bound_thm2(p, r: int, n: int, *, clamp: bool = True) -> float:
    """Unbalanced Chernoff case: ``1 - r^2 exp(-4 p^2 (1-p)^2 n / r^2)``."""
    raw = 1.0 - thm2_failure_bound(p, r, n)
    return _clamp01(raw) if clamp else raw


def bound_thm3(p, r: int, n: int, *, clamp: bool = True, c: float = C_THM3) -> float:
    """Unbalanced Oliveira case: ``1 - 4 exp((r^2 - c p^2 (1-p)^2 n) / 4)``."""
    raw = 1.0 - thm3_failure_bound(p, r, n, c)
    return _clamp01(raw) if clamp else raw


# --------------------------------------------------------------------------
# concentration formulas


@dataclass(frozen=True)
class ChernoffParams:
    d: int
    lam: float
    B: float
    s: int

    def __post_init__(self):
        if self.d < 1:
            raise InputError("dimension d must be >= 1")
        if self.lam < 0:
            raise InputError("lambda must be >= 0")
        if self.B <= 0:
            raise InputError("B must be positive")
        if self.B < self.lam:
            raise InputError("B must be >= lambda")
        if self.s < 0:
            raise InputError("s must be >= 0")


@dataclass(frozen=True)
class OliveiraParams:
    d: int
    h: float
    s: int

    def __post_init__(self):
        if self.d < 1:
            raise InputError("dimension d must be >= 1")
        if self.h < 1:
            raise InputError("hypercontractive parameter h must be >= 1")
        if self.s < 0:
            raise InputError("s must be >= 0")


def chernoff_span_bound(params: ChernoffParams, *, clamp: bool = True) -> float:
    """``P{s iid copies fail to span R^d} <= d exp(-lambda s / (2B))``."""
    raw = params.d * math.exp(-params.lam * params.s / (2.0 * params.B))
    return min(1.0, raw) if clamp else raw


def oliveira_span_bound(params: OliveiraParams, *, clamp: bool = True) -> float:
    """``P{s iid copies fail to span R^d} <= 2 exp(d/2 - s / (162 h))``."""
    expo = params.d / 2.0 - params.s / (162.0 * params.h)
    if clamp and expo > 0:
        return 1.0
    raw = 2.0 * math.exp(expo)
    return min(1.0, raw) if clamp else raw


def hyper_h_bound(p, k: int) -> float:
    """Hypercontractive ratio bound ``(9 / (p(1-p)))^k`` for degree-``k`` polynomials."""
    p = _open_p(p)
    if k < 0:
        raise InputError("degree k must be >= 0")
    return (9.0 / (p * (1.0 - p))) ** k


def _pair_counts(r: int) -> tuple[int, int]:
    Rp = r * (r - 1) // 2
    return Rp + 1, Rp


def thm1_failure_sum(r: int, n: int) -> float:
    """Unclamped sum of the two Chernoff span-failure bounds at p = 1/2 (w and z)."""
    R, _ = _pair_counts(r)
    return chernoff_span_bound(ChernoffParams(r, 1.0, r, n), clamp=False) + chernoff_span_bound(
        ChernoffParams(R, 1.0, R, n), clamp=False
    )


def thm2_failure_sum(p, r: int, n: int) -> float:
    """Unclamped sum of the Chernoff span-failure bounds for w and y."""
    alpha = (2 * _open_p(p) - 1) ** 2
    _, Rp = _pair_counts(r)
    w = chernoff_span_bound(ChernoffParams(r, 1.0 - alpha, r, n), clamp=False)
    y = chernoff_span_bound(ChernoffParams(Rp, (1.0 - alpha) ** 2, 4.0 * Rp, n), clamp=False)
    return w + y


def thm3_failure_sum(p, r: int, n: int) -> float:
    """Unclamped sum of the Oliveira span-failure bounds for w and z."""
    R, _ = _pair_counts(r)
    w = oliveira_span_bound(OliveiraParams(r, hyper_h_bound(p, 1), n), clamp=False)
    z = oliveira_span_bound(OliveiraParams(R, hyper_h_bound(p, 2), n), clamp=False)
    return w + z


# --------------------------------------------------------------------------
# exact moment oracles


def as_fraction(p) -> Fraction:
    """Exact rational for ``p``; floats convert via their decimal repr."""
    if isinstance(p, Fraction):
        f = p
    elif isinstance(p, (int, np.integer)):
        f = Fraction(int(p))
    elif isinstance(p, str):
        f = Fraction(p)
    else:
        f = Fraction(repr(float(p)))
    if not 0 <= f <= 1:
        raise InputError("p must lie in [0, 1]")
    return f


def alpha_of(p) -> Fraction:
    f = as_fraction(p)
    return (2 * f - 1) ** 2


def _sign_table(r: int) -> tuple[np.ndarray, np.ndarray]:
    masks = np.arange(2**r, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(r, dtype=np.int64)) & 1
    W = 1 - 2 * bits  # bit set means -1
    plus = r - bits.sum(axis=1)
    return W, plus


def _enumerated_moment(p, r: int, features: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``E[x x^t]`` for ``x = features(w)``, ``w ~ SBern(p, r)``, as exact fractions."""
    f = as_fraction(p)
    a, b = f.numerator, f.denominator
    W, plus = _sign_table(r)
    X = features(W).astype(np.int64)
    d = X.shape[1]
    total = np.zeros((d, d), dtype=object)
    total[...] = 0
    for k in range(r + 1):
        rows = X[plus == k]
        if rows.size == 0:
            continue
        S = rows.T @ rows
        weight = a**k * (b - a) ** (r - k)
        if weight:
            total = total + weight * S.astype(object)
    denom = b**r
    return np.vectorize(lambda v: Fraction(int(v), denom), otypes=[object])(total)


def _w_features(W: np.ndarray) -> np.ndarray:
    return W


def _pairs_idx(r: int) -> tuple[np.ndarray, np.ndarray]:
    order = pair_order(r)
    return np.array([i - 1 for i, _ in order], dtype=int), np.array([j - 1 for _, j in order], dtype=int)


def _z_features(W: np.ndarray) -> np.ndarray:
    ii, jj = _pairs_idx(W.shape[1])
    return np.hstack([np.ones((W.shape[0], 1), dtype=np.int64), W[:, ii] * W[:, jj]])


def _y_features(W: np.ndarray) -> np.ndarray:
    ii, jj = _pairs_idx(W.shape[1])
    return 1 - W[:, ii] * W[:, jj]


def _frac_matrix(shape: tuple[int, int], fill=Fraction(0)) -> np.ndarray:
    M = np.empty(shape, dtype=object)
    M[...] = fill
    return M


def closed_form_Mr(p, r: int) -> np.ndarray:
    """``(1 - alpha) I + alpha J``."""
    al = alpha_of(p)
    M = _frac_matrix((r, r), al)
    for i in range(r):
        M[i, i] = Fraction(1)
    return M


def closed_form_sigma(p, r: int) -> np.ndarray:
    """Entry table of ``E[y y^t]`` indexed by pairs ``i < j``."""
    al = alpha_of(p)
    base = (1 - al) ** 2
    order = pair_order(r)
    S = _frac_matrix((len(order), len(order)))
    for a, (i, j) in enumerate(order):
        for b, (k, l) in enumerate(order):
            shared = len({i, j} & {k, l})
            if shared == 2:
                S[a, b] = base + (1 - al**2)
            elif shared == 1:
                S[a, b] = base + al * (1 - al)
            else:
                S[a, b] = base
    return S


def to_float(M: np.ndarray) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in M], dtype=float).reshape(M.shape)


def lambda_min(M: np.ndarray) -> float:
    if M.shape[0] == 0:
        return float("inf")
    A = to_float(M) if M.dtype == object else np.asarray(M, dtype=float)
    return float(np.linalg.eigvalsh(A)[0])


@dataclass(frozen=True)
class ExactMoment:
    matrix: np.ndarray
    lambda_min: float
    enumerated: bool


def exact_second_moment_w(p, r: int) -> ExactMoment:
    """``E[w w^t]`` for ``w ~ SBern(p, r)``.

    Returns the closed form; for ``r <= 12`` it is also checked entry by
    entry against enumeration of all sign vectors.
    """
    if not 1 <= r <= 20:
        raise InputError("need 1 <= r <= 20")
    M = closed_form_Mr(p, r)
    enumerated = r <= ENUMERATION_MAX_R
    if enumerated:
        E = _enumerated_moment(p, r, _w_features)
        if not np.array_equal(E, M):
            raise ConsistencyError("E[ww^t] enumeration disagrees with (1-a)I + aJ at r=%d" % r)
    return ExactMoment(matrix=M, lambda_min=float(1 - alpha_of(p)), enumerated=enumerated)


def exact_second_moment_z(p, r: int) -> np.ndarray:
    """``E[z z^t]`` with ``z = (1, w_i w_j for i < j)``, by exact enumeration."""
    if not 2 <= r <= ENUMERATION_MAX_R:
        raise InputError("need 2 <= r <= %d" % ENUMERATION_MAX_R)
    return _enumerated_moment(p, r, _z_features)


@dataclass(frozen=True)
class SigmaCheck:
    """Matrix of the lifted operator on the symmetric tensors ``e_i v e_j``, ``i <= j``.

    Entries mixing a diagonal basis vector ``e_i v e_i`` with an off-diagonal
    one carry a factor ``sqrt(2)``, so the matrix is stored exactly as
    ``rational + sqrt(2) * sqrt2_part``.
    """

    basis: tuple[tuple[int, int], ...]
    rational: np.ndarray
    sqrt2_part: np.ndarray

    def to_float(self) -> np.ndarray:
        return to_float(self.rational) + math.sqrt(2.0) * to_float(self.sqrt2_part)

    def off_diagonal_indices(self) -> list[int]:
        return [a for a, (i, j) in enumerate(self.basis) if i < j]

    def restriction(self) -> np.ndarray:
        """Exact block on the strictly increasing pairs."""
        idx = self.off_diagonal_indices()
        if any(self.sqrt2_part[a, b] != 0 for a in idx for b in idx):
            raise ConsistencyError("irrational entry inside the off-diagonal block")
        return self.rational[np.ix_(idx, idx)]


def _sym_basis_vectors(r: int) -> tuple[list[tuple[int, int]], list[np.ndarray], list[bool]]:
    # unnormalised integer vectors in R^r (x) R^r; off-diagonal ones have norm sqrt(2)
    basis, vecs, scaled = [], [], []
    for i, j in itertools.combinations_with_replacement(range(1, r + 1), 2):
        u = np.zeros(r * r, dtype=np.int64)
        u[(i - 1) * r + (j - 1)] += 1
        if i != j:
            u[(j - 1) * r + (i - 1)] += 1
        basis.append((i, j))
        vecs.append(u)
        scaled.append(i != j)
    return basis, vecs, scaled


def build_sigma_check(p, r: int, *, verify: bool = True) -> SigmaCheck:
    """Operator ``(1-a)^2 I v I + a(1-a)(I v J + J v I) + (1-a)^2/2 J v J``.

    Built from Kronecker products on ``R^r (x) R^r`` restricted to the
    symmetric subspace, where ``I v J + J v I`` is the restriction of
    ``I (x) J + J (x) I``. With ``verify`` it checks that the off-diagonal
    block equals the enumerated ``E[y y^t]`` and that the smallest eigenvalue
    is at least ``(1 - a)^2``.
    """
    if not 2 <= r <= ENUMERATION_MAX_R:
        raise InputError("need 2 <= r <= %d" % ENUMERATION_MAX_R)
    al = alpha_of(p)
    I = np.eye(r, dtype=np.int64)
    J = np.ones((r, r), dtype=np.int64)
    II, IJ, JJ = np.kron(I, I), np.kron(I, J) + np.kron(J, I), np.kron(J, J)
    basis, vecs, scaled = _sym_basis_vectors(r)
    U = np.stack(vecs, axis=1)
    # integer Gram blocks u_a^t K u_b for each Kronecker term
    blocks = [U.T @ K @ U for K in (II, IJ, JJ)]
    coeffs = [(1 - al) ** 2, al * (1 - al), (1 - al) ** 2 / 2]
    m = len(basis)
    rational = _frac_matrix((m, m))
    sqrt2_part = _frac_matrix((m, m))
    for a in range(m):
        for b in range(m):
            val = sum((c * int(B[a, b]) for c, B in zip(coeffs, blocks)), Fraction(0))
            na = int(scaled[a]) + int(scaled[b])  # number of 1/sqrt(2) normalisations
            if na == 0:
                rational[a, b] = val
            elif na == 2:
                rational[a, b] = val / 2
            else:
                sqrt2_part[a, b] = val / 2  # 1/sqrt(2) = sqrt(2)/2
    check = SigmaCheck(basis=tuple(basis), rational=rational, sqrt2_part=sqrt2_part)
    if verify:
        sigma = _enumerated_moment(p, r, _y_features)
        if not np.array_equal(check.restriction(), sigma):
            raise ConsistencyError("lifted operator does not restrict to E[yy^t] at r=%d" % r)
        lam = lambda_min(check.to_float())
        if lam < float((1 - al) ** 2) - EIG_TOL:
            raise ConsistencyError("lambda_min of lifted operator %.3g < (1-a)^2" % lam)
    return check


@dataclass(frozen=True)
class MomentReport:
    p: Fraction
    r: int
    alpha: Fraction
    M_r: np.ndarray
    Sigma: np.ndarray
    Sigma_closed_form: np.ndarray
    SigmaCheck: SigmaCheck
    lambda_min_Mr: float
    lambda_min_Sigma: float
    lambda_min_SigmaCheck: float

    @property
    def claim_bound(self) -> float:
        return float((1 - self.alpha) ** 2)

    @property
    def claim_holds(self) -> bool:
        return self.lambda_min_Sigma >= self.claim_bound - EIG_TOL

    @property
    def closed_form_matches(self) -> bool:
        return bool(np.array_equal(self.Sigma, self.Sigma_closed_form))

    @property
    def restriction_matches(self) -> bool:
        return bool(np.array_equal(self.SigmaCheck.restriction(), self.Sigma))


def exact_second_moment_y(p, r: int) -> MomentReport:
    """Exact ``E[y y^t]`` with ``y_ij = 1 - w_i w_j`` plus the related matrices."""
    if not 2 <= r <= ENUMERATION_MAX_R:
        raise InputError("need 2 <= r <= %d" % ENUMERATION_MAX_R)
    f = as_fraction(p)
    sigma = _enumerated_moment(f, r, _y_features)
    check = build_sigma_check(f, r, verify=False)
    mr = exact_second_moment_w(f, r)
    return MomentReport(
        p=f,
        r=r,
        alpha=alpha_of(f),
        M_r=mr.matrix,
        Sigma=sigma,
        Sigma_closed_form=closed_form_sigma(f, r),
        SigmaCheck=check,
        lambda_min_Mr=mr.lambda_min,
        lambda_min_Sigma=lambda_min(sigma),
        lambda_min_SigmaCheck=lambda_min(check.to_float()),
    )
