"""Signed Bernoulli sampling, the random face model, and Monte Carlo estimates.

Every trial draws from its own counter-based Philox stream keyed by
``(seed, trial_index)``, so an estimate is a pure function of its inputs no
matter how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .cutgeom import CutVector
from .errors import ConsistencyError, InputError
from .lpcert import build_certificate_matrices, certify_matrices, is_full_column_rank, random_prime

DEFAULT_SEED = 20150701


@dataclass(frozen=True)
class BalanceParam:
    p: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise InputError("balance parameter p must lie in [0, 1], got %r" % (self.p,))

    @property
    def alpha(self) -> float:
        return (2 * self.p - 1) ** 2

    def require_open(self) -> None:
        if self.p in (0, 1):
            raise InputError("this operation needs p strictly inside (0, 1)")


def _balance(p) -> BalanceParam:
    return p if isinstance(p, BalanceParam) else BalanceParam(float(p))


def make_stream(seed: int, trial_index: int) -> np.random.Generator:
    """Independent Philox generator for one ``(seed, trial_index)`` key."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.Philox(ss))


def sample_sbern_vector(p, n: int, stream: np.random.Generator) -> CutVector:
    """Draw ``n`` iid signs, +1 with probability ``p``. Consumes exactly ``n`` uniforms."""
    if n < 1:
        raise InputError("n must be >= 1")
    bp = _balance(p)
    u = stream.random(n)
    return CutVector(np.where(u < bp.p, 1, -1).astype(np.int8))


@dataclass(frozen=True)
class FaceCandidate:
    cuts: tuple[CutVector, ...]
    p: float
    r: int
    n: int
    seed: int
    trial_index: int


def sample_face_candidate(p, r: int, n: int, seed: int, trial_index: int) -> FaceCandidate:
    if r < 1 or n < 1:
        raise InputError("need r >= 1 and n >= 1")
    bp = _balance(p)
    stream = make_stream(seed, trial_index)
    cuts = tuple(sample_sbern_vector(bp, n, stream) for _ in range(r))
    return FaceCandidate(cuts=cuts, p=bp.p, r=r, n=n, seed=seed, trial_index=trial_index)


def clopper_pearson(k: int, N: int, confidence: float) -> tuple[float, float]:
    """Exact two-sided binomial interval for ``k`` successes in ``N`` trials."""
    if not 0 <= k <= N or N < 1:
        raise InputError("need 0 <= k <= N and N >= 1")
    if not 0.0 < confidence < 1.0:
        raise InputError("confidence must lie in (0, 1)")
    a = 1.0 - confidence
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a / 2, k, N - k + 1))
    hi = 1.0 if k == N else float(stats.beta.ppf(1 - a / 2, k + 1, N - k))
    return lo, hi


@dataclass(frozen=True)
class MonteCarloEstimate:
    trials: int
    certified: int
    point_estimate: float
    ci_low: float
    ci_high: float
    confidence: float
    p: float = field(default=float("nan"))
    r: int = 0
    n: int = 0
    seed: int = 0


def _count_certified(args: tuple[float, int, int, int, int, int]) -> int:
    p, r, n, seed, start, stop = args
    count = 0
    for t in range(start, stop):
        cand = sample_face_candidate(p, r, n, seed, t)
        mats = build_certificate_matrices(cand.cuts)
        if certify_matrices(mats).certified:
            # re-check with a fresh prime: mod-p full rank certifies rank over Q
            q = random_prime()
            if not (is_full_column_rank(mats.W, prime=q) and is_full_column_rank(mats.Z, prime=q)):
                raise ConsistencyError("certified trial %d failed the rank re-check" % t)
            count += 1
    return count


def _chunks(trials: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, trials))
    bounds = [trials * i // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(parts)]


def estimate_face_probability(
    p,
    r: int,
    n: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    confidence: float = 0.95,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Fraction of random candidates that carry a simplicial-face certificate.

    This is a lower-bound estimator for the probability that the random
    face is simplicial of dimension ``r - 1``, since the certificate is only
    sufficient.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    if r < 2:
        raise InputError("r must be >= 2")
    if not 0.0 < confidence < 1.0:
        raise InputError("confidence must lie in (0, 1)")
    bp = _balance(p)
    jobs = [(bp.p, r, n, seed, a, b) for a, b in _chunks(trials, workers)]
    if workers <= 1 or len(jobs) == 1:
        certified = sum(map(_count_certified, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            certified = sum(pool.map(_count_certified, jobs))
    lo, hi = clopper_pearson(certified, trials, confidence)
    return MonteCarloEstimate(
        trials=trials,
        certified=certified,
        point_estimate=certified / trials,
        ci_low=lo,
        ci_high=hi,
        confidence=confidence,
        p=bp.p,
        r=r,
        n=n,
        seed=seed,
    )


def log_face_count_estimate(r: int, n: int) -> float:
    """Natural log of ``(e 2**(n-1) / r)**r``, the rough number of random faces."""
    if r < 1 or n < 1 or r > 2 ** (n - 1):
        raise InputError("need 1 <= r <= 2**(n-1)")
    return r * (1.0 + (n - 1) * math.log(2.0) - math.log(r))
