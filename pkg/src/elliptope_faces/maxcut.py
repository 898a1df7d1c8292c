"""MaxCut on small graphs: Laplacians, exact cuts, a low-rank elliptope heuristic
for the semidefinite relaxation, and hyperplane rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .cutgeom import CutVector, as_symmetric
from .errors import InputError

BRUTE_FORCE_MAX_N = 24
TWO_OVER_PI = 2.0 / math.pi


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..n``; edges stored as ``(i, j)`` with ``i < j``."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise InputError("a graph needs at least one vertex")
        for i, j in self.edges:
            if not (1 <= i < j <= self.n):
                raise InputError("bad edge (%r, %r) for n=%d" % (i, j, self.n))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        seen: set[tuple[int, int]] = set()
        for i, j in edges:
            if i == j:
                raise InputError("self-loop at vertex %d" % i)
            e = (min(i, j), max(i, j))
            if e in seen:
                raise InputError("duplicate edge %r" % (e,))
            seen.add(e)
        return cls(n, frozenset(seen))

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])


def random_graph(n: int, edge_prob: float, rng: np.random.Generator) -> Graph:
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < edge_prob]
    return Graph.from_edges(n, edges)


def parse_edge_list(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``i j`` (1-based). ``#`` starts a comment."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InputError("empty edge list")
    try:
        header = [int(t) for t in lines[0].split()]
        if len(header) != 2:
            raise ValueError
        n, m = header
        pairs = []
        for ln in lines[1:]:
            toks = [int(t) for t in ln.split()]
            if len(toks) != 2:
                raise ValueError
            pairs.append((toks[0], toks[1]))
    except ValueError:
        raise InputError("malformed edge list: expected 'n m' then 'i j' lines") from None
    if len(pairs) != m:
        raise InputError("header announces %d edges, found %d" % (m, len(pairs)))
    return Graph.from_edges(n, pairs)


def format_edge_list(G: Graph) -> str:
    lines = ["%d %d" % (G.n, G.m)] + ["%d %d" % e for e in G.sorted_edges()]
    return "\n".join(lines) + "\n"


def _laplacian_times4(G: Graph) -> np.ndarray:
    L4 = np.zeros((G.n, G.n), dtype=np.int64)
    for i, j in G.edges:
        a, b = i - 1, j - 1
        L4[a, a] += 1
        L4[b, b] += 1
        L4[a, b] -= 1
        L4[b, a] -= 1
    return L4


def laplacian(G: Graph) -> np.ndarray:
    """``1/4 sum_{ij in E} (e_i - e_j)(e_i - e_j)^t``; entries are exact in binary."""
    return _laplacian_times4(G) / 4.0


def cut_weight(G: Graph, c: CutVector) -> int:
    """``c^t L c``, the number of edges whose endpoints get opposite signs."""
    if c.n != G.n:
        raise InputError("cut vector length %d does not match n=%d" % (c.n, G.n))
    e = c.entries.astype(np.int64)
    q = int(e @ _laplacian_times4(G) @ e)
    assert q % 4 == 0
    return q // 4


def brute_force_maxcut(G: Graph) -> tuple[int, CutVector]:
    """Exact MaxCut by enumerating the ``2**(n-1)`` cuts with ``c_1 = +1``.

    Ties go to the lexicographically smallest vector under ``-1 < +1``.
    """
    n = G.n
    if n > BRUTE_FORCE_MAX_N:
        raise InputError("brute force limited to n <= %d" % BRUTE_FORCE_MAX_N)
    if n == 1:
        return 0, CutVector([1])
    # mask bit (n-1-v) set <=> vertex v (0-based, v >= 1) gets -1, so vertex 2 is the MSB
    edges = np.array(G.sorted_edges(), dtype=np.int64).reshape(-1, 2) - 1
    shift = np.where(edges == 0, -1, n - 1 - edges)
    total = 2 ** (n - 1)
    best_val, best_mask = -1, 0
    chunk = 1 << 18
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        vals = np.zeros(masks.size, dtype=np.int64)
        for sa, sb in shift:
            ba = (masks >> sa) & 1 if sa >= 0 else 0
            bb = (masks >> sb) & 1 if sb >= 0 else 0
            vals += ba ^ bb
        v = int(vals.max()) if vals.size else 0
        if v >= best_val:
            cand = int(masks[np.flatnonzero(vals == v)[-1]])
            if v > best_val or cand > best_mask:
                best_val, best_mask = v, cand
    entries = [1] + [-1 if (best_mask >> (n - 1 - v)) & 1 else 1 for v in range(1, n)]
    return max(best_val, 0), CutVector(entries)


@dataclass(frozen=True)
class ElliptopeFactor:
    """``n x k`` matrix with unit rows; ``V V^t`` is a correlation matrix."""

    V: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        if V.ndim != 2:
            raise InputError("factor must be 2-D")
        if not np.all(np.abs(np.linalg.norm(V, axis=1) - 1.0) <= 1e-9):
            raise InputError("factor rows must be unit vectors")
        V = V.copy()
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    @property
    def k(self) -> int:
        return self.V.shape[1]

    def gram(self) -> np.ndarray:
        return self.V @ self.V.T

    @classmethod
    def from_cut(cls, c: CutVector, k: int) -> "ElliptopeFactor":
        V = np.zeros((c.n, k))
        V[:, 0] = c.entries
        return cls(V)


def default_rank(n: int) -> int:
    return math.ceil(math.sqrt(2 * n)) + 1


def _normalize_rows(V: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    out = V / np.where(norms == 0, 1.0, norms)
    dead = norms[:, 0] == 0
    if np.any(dead):
        out[dead] = 0.0
        out[dead, 0] = 1.0
    return out


def bm_elliptope_solve(
    A,
    k: int | None = None,
    iters: int = 5000,
    tol: float = 1e-8,
    stream: np.random.Generator | None = None,
    init: ElliptopeFactor | None = None,
) -> tuple[ElliptopeFactor, float]:
    """Feasible lower bound for ``max trace(A X)`` over correlation matrices ``X``.

    Riemannian gradient ascent on ``trace(A V V^t)`` over unit-row factors
    with Armijo backtracking. The returned value is attained by the returned
    factor, so it never exceeds the relaxation optimum.
    """
    A = as_symmetric(np.asarray(A, dtype=float) if not isinstance(A, np.ndarray) else A)
    A = A.astype(float)
    n = A.shape[0]
    if init is not None:
        V = np.array(init.V, dtype=float)
        if V.shape[0] != n:
            raise InputError("init factor has %d rows, expected %d" % (V.shape[0], n))
    else:
        k = default_rank(n) if k is None else k
        if k < 2:
            raise InputError("factor rank k must be >= 2")
        rng = stream if stream is not None else np.random.default_rng(0)
        V = _normalize_rows(rng.standard_normal((n, k)))

    def f(X):
        return float(np.sum((A @ X) * X))

    val = f(V)
    step = 1.0
    for _ in range(iters):
        G = 2.0 * (A @ V)
        G -= np.sum(G * V, axis=1, keepdims=True) * V
        gnorm2 = float(np.sum(G * G))
        if gnorm2 <= 1e-24:
            break
        t = step
        while True:
            Vn = _normalize_rows(V + t * G)
            vn = f(Vn)
            if vn >= val + 1e-4 * t * gnorm2 or t < 1e-12:
                break
            t *= 0.5
        if vn < val:
            break
        rel = (vn - val) / max(1.0, abs(val))
        V, val = Vn, vn
        step = min(2.0 * t, 1e3)
        if rel < tol:
            break
    return ElliptopeFactor(V), val


def hyperplane_round(factor: ElliptopeFactor, stream: np.random.Generator) -> CutVector:
    """One random-hyperplane cut: ``sign(V g)`` with ``sign(0) = +1``."""
    g = stream.standard_normal(factor.k)
    return CutVector(np.where(factor.V @ g >= 0, 1, -1))


def best_cut_value(
    G: Graph, factor: ElliptopeFactor, samples: int, stream: np.random.Generator
) -> tuple[int, CutVector]:
    """Best cut over ``samples`` hyperplane roundings; the first best one wins ties."""
    if samples < 1:
        raise InputError("samples must be >= 1")
    best_val, best_cut = -1, None
    for _ in range(samples):
        c = hyperplane_round(factor, stream)
        v = cut_weight(G, c)
        if v > best_val:
            best_val, best_cut = v, c
    return best_val, best_cut


@dataclass(frozen=True)
class SandwichReport:
    maxcut_value: int
    bm_value: float
    lower: float
    passed: bool
    ratio: float | None
    rounded_value: int | None = None
    rounded_passed: bool | None = None
    witness: str = ""


def check_approx_sandwich(
    G: Graph, bm_value: float, maxcut_value: int, rounded_value: int | None = None
) -> SandwichReport:
    """Check ``maxcut >= (2/pi) * bm_value`` (and, if given, the rounded cut within slack 1).

    ``maxcut <= val(SDP)`` always holds because cut matrices are feasible,
    so it is not checked against the heuristic value.
    """
    lower = TWO_OVER_PI * bm_value
    passed = maxcut_value >= lower - 1e-9
    rounded_ok = None if rounded_value is None else rounded_value >= lower - 1.0
    witness = ""
    if not passed:
        witness = "maxcut %d < (2/pi) * %.12g = %.12g on n=%d, m=%d" % (
            maxcut_value, bm_value, lower, G.n, G.m)
    elif rounded_ok is False:
        witness = "rounded cut %d < (2/pi) * %.12g - 1" % (rounded_value, bm_value)
    return SandwichReport(
        maxcut_value=maxcut_value,
        bm_value=bm_value,
        lower=lower,
        passed=passed,
        ratio=maxcut_value / bm_value if bm_value > 0 else None,
        rounded_value=rounded_value,
        rounded_passed=rounded_ok,
        witness=witness,
    )
