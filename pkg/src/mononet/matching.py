"""Perfect-matching probability of inhomogeneous random bipartite graphs.

``G(p)`` is the random bipartite graph on [n] x [n] where edge (i, j)
appears independently with probability ``p[i, j]``; ``m(p)`` is the
probability that ``G(p)`` contains a perfect matching.  The module provides

* an exact oracle (full enumeration of all 2**(n*n) edge subsets, feasible
  for small n and used as the reference in every estimator test),
* a sampling estimator: truncate each entry to ``bits`` binary digits, draw
  ``samples`` independent graphs, return the fraction containing a perfect
  matching, with the standard exponential concentration guarantee
  ``P(|m(p) - estimate| > delta + n^2 / 2**(bits/2)) <= 2*exp(-samples*delta^2/3)``,
* probes for the structural facts the estimator analysis rests on:
  ``m`` is entrywise monotone and n-Lipschitz (and 1-Lipschitz in any
  single entry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .audit import AuditReport
from .errors import TooLarge

DEFAULT_EXACT_LIMIT = 5
_CHUNK_BITS = 20  # enumerate edge subsets in chunks of 2**20


@dataclass(frozen=True, eq=False)
class EdgeProbabilityMatrix:
    """An (n, n) matrix of independent edge probabilities in [0, 1]."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise ValueError(f"entries must be a square matrix, got shape {e.shape}")
        if not np.isfinite(e).all() or e.min() < 0 or e.max() > 1:
            raise ValueError("edge probabilities must lie in [0, 1]")
        e = np.ascontiguousarray(e)
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def uniform(cls, n: int, p: float) -> "EdgeProbabilityMatrix":
        return cls(np.full((n, n), float(p)))

    def __eq__(self, other):
        if not isinstance(other, EdgeProbabilityMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"EdgeProbabilityMatrix(n={self.n})"


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph on [n] x [n]; ``rows[i]`` is the bitmask of right
    neighbors of left vertex i."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1 or len(self.rows) != self.n:
            raise ValueError("need one adjacency mask per left vertex")
        full = (1 << self.n) - 1
        if any(r < 0 or r > full for r in self.rows):
            raise ValueError("adjacency mask outside the vertex range")

    @classmethod
    def from_edges(cls, n: int, edges) -> "BipartiteGraph":
        rows = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) outside [0, {n})")
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, adj) -> "BipartiteGraph":
        A = np.asarray(adj, dtype=bool)
        n = A.shape[0]
        rows = tuple(int(sum(1 << j for j in np.flatnonzero(A[i]))) for i in range(n))
        return cls(n, rows)

    @classmethod
    def complete(cls, n: int) -> "BipartiteGraph":
        return cls(n, ((1 << n) - 1,) * n)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)


@dataclass(frozen=True)
class EstimatorConfig:
    """Sampling parameters: precision bits, replica count, seed, accuracy."""

    bits: int
    samples: int
    seed: int = 0
    delta: float = 0.1

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    def with_seed(self, seed: int) -> "EstimatorConfig":
        return replace(self, seed=seed)


def has_perfect_matching(g: BipartiteGraph) -> bool:
    """Hopcroft-Karp on bitmask adjacency: True iff a perfect matching exists."""
    n = g.n
    rows = g.rows
    match_left = [-1] * n
    match_right = [-1] * n
    matched = 0
    INF = n + 1
    dist = [0] * n

    def bfs() -> bool:
        queue = []
        for u in range(n):
            if match_left[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = INF
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if dist[u] >= found:
                continue
            adj = rows[u]
            while adj:
                j = (adj & -adj).bit_length() - 1
                adj &= adj - 1
                w = match_right[j]
                if w == -1:
                    found = dist[u] + 1
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found != INF

    def dfs(u: int) -> bool:
        adj = rows[u]
        while adj:
            j = (adj & -adj).bit_length() - 1
            adj &= adj - 1
            w = match_right[j]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_left[u] = j
                match_right[j] = u
                return True
        dist[u] = INF
        return False

    while matched < n and bfs():
        for u in range(n):
            if match_left[u] == -1 and dfs(u):
                matched += 1
    return matched == n


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.uint8)
    for v in range(1, 1 << n):
        counts[v] = counts[v >> 1] + (v & 1)
    return counts


def _perfect_matching_flags(masks: np.ndarray, n: int) -> np.ndarray:
    """Vectorized perfect-matching test for graphs encoded as edge bitmasks.

    Bit ``n*i + j`` of a mask is edge (i, j).  Uses the marriage condition:
    a perfect matching exists iff every set of left vertices has at least as
    many distinct neighbors.  Independent of the augmenting-path matcher, so
    the exact oracle and the sampler cross-check each other.
    """
    full = (1 << n) - 1
    rows = [((masks >> np.uint64(n * i)) & np.uint64(full)).astype(np.uint8) for i in range(n)]
    pop = _popcounts(n)
    unions: list = [None] * (1 << n)
    unions[0] = np.zeros(len(masks), dtype=np.uint8)
    ok = np.ones(len(masks), dtype=bool)
    for s in range(1, 1 << n):
        low = s & -s
        i = low.bit_length() - 1
        unions[s] = unions[s ^ low] | rows[i]
        ok &= pop[unions[s]] >= int(pop[s])
    return ok


def _subset_probabilities(masks: np.ndarray, flat_p: np.ndarray) -> np.ndarray:
    """P(the present-edge set is exactly the given mask) for each mask."""
    probs = np.ones(len(masks), dtype=float)
    for e, pe in enumerate(flat_p):
        bit = (masks >> np.uint64(e)) & np.uint64(1)
        probs *= np.where(bit == 1, pe, 1.0 - pe)
    return probs


def exact_matching_probability(
    p: EdgeProbabilityMatrix, limit: int = DEFAULT_EXACT_LIMIT
) -> float:
    """Exact m(p) by enumerating all 2**(n*n) edge subsets.

    Sums the subset probability of every edge set containing a perfect
    matching.  Raises :class:`TooLarge` above ``limit`` (the default 5 means
    2**25 subsets, a few seconds).
    """
    n = p.n
    if n > limit:
        raise TooLarge(f"exact enumeration limited to n <= {limit}, got {n}")
    m = n * n
    flat = p.entries.reshape(-1)
    total_masks = 1 << m
    chunk = min(total_masks, 1 << _CHUNK_BITS)
    total = 0.0
    for start in range(0, total_masks, chunk):
        masks = np.arange(start, min(start + chunk, total_masks), dtype=np.uint64)
        probs = _subset_probabilities(masks, flat)
        flags = _perfect_matching_flags(masks, n)
        total += float(probs[flags].sum())
    return min(1.0, total)


def truncate_probabilities(p: EdgeProbabilityMatrix, bits: int) -> EdgeProbabilityMatrix:
    """Keep the ``bits`` most significant binary digits: floor(p * 2**bits) / 2**bits.

    The result is exactly dyadic (scaling by a power of two is exact in
    float64), idempotent, and entrywise within 2**-bits below the input.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    scale = 2.0**bits
    out = np.floor(p.entries * scale) / scale
    return EdgeProbabilityMatrix(np.clip(out, 0.0, 1.0))


def truncation_error_bounds(n: int, bits: int) -> tuple[float, float]:
    """Euclidean distance bounds ||p - truncated p|| -> (coarse, sharp).

    The coarse bound ``sqrt(n**2 / 2**bits)`` is the one used in the
    estimator guarantee; entrywise truncation error below ``2**-bits``
    actually gives the sharper ``n * 2**-bits``.
    """
    coarse = math.sqrt(n * n / 2.0**bits)
    sharp = n * 2.0**-bits
    return coarse, sharp


def estimator_error_bound(cfg: EstimatorConfig, n: int) -> tuple[float, float]:
    """(error radius, failure probability) of the concentration guarantee."""
    radius = cfg.delta + n * n / 2.0 ** (cfg.bits / 2.0)
    failure = 2.0 * math.exp(-cfg.samples * cfg.delta**2 / 3.0)
    return radius, failure


def estimate_matching_probability(p: EdgeProbabilityMatrix, cfg: EstimatorConfig) -> float:
    """Monte Carlo estimate of m(p), deterministic given ``cfg.seed``.

    Entries are truncated to ``cfg.bits`` binary digits, ``cfg.samples``
    graphs are drawn (edge present iff its uniform draw is < the truncated
    probability), and the perfect-matching fraction is returned.  Samples
    are drawn replica-major, so distinct replicas use independent stream
    sections; repeated graphs are deduplicated before the matching test.
    """
    trunc = truncate_probabilities(p, cfg.bits).entries
    n = p.n
    rng = np.random.default_rng(cfg.seed)
    cache: dict[bytes, bool] = {}
    hits = 0
    remaining = cfg.samples
    max_rows = max(1, (1 << _CHUNK_BITS) // (n * n))
    while remaining > 0:
        block = min(remaining, max_rows)
        draws = rng.random((block, n, n))
        edges = (draws < trunc).reshape(block, n * n)
        packed = np.packbits(edges, axis=1)
        uniq, counts = np.unique(packed, axis=0, return_counts=True)
        for row, count in zip(uniq, counts):
            key = row.tobytes()
            found = cache.get(key)
            if found is None:
                bits = np.unpackbits(row, count=n * n).reshape(n, n)
                found = has_perfect_matching(BipartiteGraph.from_matrix(bits))
                cache[key] = found
            if found:
                hits += int(count)
        remaining -= block
    return hits / cfg.samples


def default_parameters(
    n: int, eps: float, fail_prob: float, seed: int = 0
) -> EstimatorConfig:
    """Instantiate the estimator so that |m(p) - estimate| <= eps except with
    probability ``fail_prob``.

    Precision covers half the budget (``n**2 / 2**(bits/2) <= eps/2``) and
    the sampling deviation ``delta = eps/2`` covers the rest, with the
    replica count inverted from the concentration bound
    ``2*exp(-samples*delta^2/3) <= fail_prob``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < fail_prob < 1:
        raise ValueError("fail_prob must lie in (0, 1)")
    bits = max(1, math.ceil(math.log2(4.0 * n**4 / eps**2)) + 1)
    delta = eps / 2.0
    # the 1e-9 backoff keeps the ceil stable when fail_prob was itself
    # produced by the bound for an integer sample count
    samples = math.ceil(3.0 * math.log(2.0 / fail_prob) / delta**2 - 1e-9)
    return EstimatorConfig(bits=bits, samples=max(1, samples), seed=seed, delta=delta)


# -- structural probes of m ---------------------------------------------------

_PROBE_TOL = 1e-10


def lipschitz_probe(
    pairs: int, n: int, seed: int, limit: int = DEFAULT_EXACT_LIMIT
) -> AuditReport:
    """Check |m(p) - m(p')| <= n * ||p - p'|| on random matrix pairs.

    Each round also perturbs a single entry and checks the sharper bound
    that m moves by at most the size of that perturbation.
    """
    if n > limit:
        raise TooLarge(f"probe needs the exact oracle, limited to n <= {limit}")
    rng = np.random.default_rng(seed)
    for k in range(pairs):
        a = EdgeProbabilityMatrix(rng.random((n, n)))
        b = EdgeProbabilityMatrix(rng.random((n, n)))
        ma, mb = exact_matching_probability(a), exact_matching_probability(b)
        dist = float(np.linalg.norm(a.entries - b.entries))
        if abs(ma - mb) > n * dist + _PROBE_TOL:
            return AuditReport(
                "lipschitz-m",
                passed=False,
                witness={"p": a.entries.tolist(), "p2": b.entries.tolist(),
                         "m": ma, "m2": mb, "distance": dist},
                samples=pairs,
                seed=seed,
            )
        i, j = rng.integers(n), rng.integers(n)
        entries = np.array(a.entries)
        entries[i, j] = rng.random()
        rho = abs(float(entries[i, j] - a.entries[i, j]))
        mc = exact_matching_probability(EdgeProbabilityMatrix(entries))
        if abs(ma - mc) > rho + _PROBE_TOL:
            return AuditReport(
                "lipschitz-m",
                passed=False,
                witness={"p": a.entries.tolist(), "entry": [int(i), int(j)],
                         "rho": rho, "m": ma, "m2": mc},
                samples=pairs,
                seed=seed,
            )
    return AuditReport("lipschitz-m", passed=True, samples=pairs, seed=seed)


def monotone_probe_m(
    pairs: int, n: int, seed: int, limit: int = DEFAULT_EXACT_LIMIT
) -> AuditReport:
    """Check m(p) <= m(p') for random entrywise-ordered pairs p <= p'."""
    if n > limit:
        raise TooLarge(f"probe needs the exact oracle, limited to n <= {limit}")
    rng = np.random.default_rng(seed)
    for k in range(pairs):
        lo = rng.random((n, n))
        hi = lo + (1.0 - lo) * rng.random((n, n))
        m_lo = exact_matching_probability(EdgeProbabilityMatrix(lo))
        m_hi = exact_matching_probability(EdgeProbabilityMatrix(hi))
        if m_lo > m_hi + _PROBE_TOL:
            return AuditReport(
                "monotone-m",
                passed=False,
                witness={"p": lo.tolist(), "p2": hi.tolist(), "m": m_lo, "m2": m_hi},
                samples=pairs,
                seed=seed,
            )
    return AuditReport("monotone-m", passed=True, samples=pairs, seed=seed)
