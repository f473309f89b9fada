"""Generative simulator, graph ingestion, and empirical paradox reports.

Growth uses token-list sampling: a node of degree k and quality theta
holds k + theta entries in a flat token array, so drawing a uniform
token is a draw proportional to k + theta at O(1) expected cost per
link.  This relies on qualities being integers.  Collisions within one
arrival's batch of beta targets are resampled, which is unbiased enough
at scale and keeps the cost amortized O(1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import ModelParams
from .errors import DomainError, GraphParseError
from .quality import sample_quality

__all__ = [
    "Network",
    "EmpiricalReport",
    "grow_qpa",
    "grow_uniform",
    "load_graph",
    "empirical_report",
    "joint_histogram",
    "write_edge_list",
]


@dataclass
class Network:
    """An undirected attributed graph.

    ``edges`` lists each edge once in creation/file order; adjacency is
    CSR-style (``adj_indptr``, ``adj_indices``) over node ids
    ``0 .. n - 1``.  Grown networks number nodes by birth order with the
    seed clique first.
    """

    n: int
    beta: int
    qualities: np.ndarray
    edges: np.ndarray  # [m, 2]
    adj_indptr: np.ndarray
    adj_indices: np.ndarray
    provenance: str  # "qpa" | "uniform" | "ingested"
    seed: int | None = None

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adj_indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.adj_indices[self.adj_indptr[u] : self.adj_indptr[u + 1]]

    def validate(self) -> None:
        """Structural invariants: symmetry, simplicity, degree-sum law."""
        deg = self.degrees
        if int(deg.sum()) != 2 * len(self.edges):
            raise AssertionError("degree sum != 2 |E|")
        if np.any(self.edges[:, 0] == self.edges[:, 1]):
            raise AssertionError("self-loop present")
        key = np.min(self.edges, axis=1).astype(np.int64) * self.n + np.max(
            self.edges, axis=1
        )
        if np.unique(key).size != len(self.edges):
            raise AssertionError("duplicate edge present")


@dataclass
class EmpiricalReport:
    """Per-network paradox fractions and the empirical joint histogram.

    Fractions count nodes whose attribute is strictly below the mean
    (median) of their neighbors' attributes, over nodes with at least
    one neighbor.  ``histogram`` maps (degree, quality) to its node
    fraction.
    """

    n: int
    isolated: int
    frac_degree_mean: float
    frac_degree_median: float
    frac_quality_mean: float
    frac_quality_median: float
    histogram: dict
    flags: dict | None = None


def _csr_from_edges(n: int, edges: np.ndarray):
    if len(edges):
        u = edges[:, 0]
        v = edges[:, 1]
        deg = np.bincount(u, minlength=n) + np.bincount(v, minlength=n)
    else:
        deg = np.zeros(n, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int64)
    cursor = indptr[:-1].copy()
    for a, b in edges:
        indices[cursor[a]] = b
        cursor[a] += 1
        indices[cursor[b]] = a
        cursor[b] += 1
    return indptr, indices


class _UniformBuffer:
    """Buffered uniforms: one vectorized draw feeding many scalar reads."""

    def __init__(self, rng: np.random.Generator, size: int = 8192):
        self._rng = rng
        self._size = size
        self._buf = rng.random(size)
        self._pos = 0

    def next(self) -> float:
        if self._pos >= self._size:
            self._buf = self._rng.random(self._size)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


def _grow(n: int, params: ModelParams, seed: int, uniform_attachment: bool) -> Network:
    beta = params.beta
    if n <= beta + 1:
        raise DomainError(f"n must exceed beta + 1 = {beta + 1}, got {n}")
    rng = np.random.default_rng(np.uint64(seed))
    qualities = sample_quality(params.quality, rng, size=n)
    theta_total = int(qualities.sum())
    seed_size = beta + 1
    m_total = seed_size * (seed_size - 1) // 2 + beta * (n - seed_size)
    edges = np.empty((m_total, 2), dtype=np.int64)

    # seed clique
    e = 0
    for i in range(seed_size):
        for j in range(i + 1, seed_size):
            edges[e, 0] = i
            edges[e, 1] = j
            e += 1

    buf = _UniformBuffer(rng)
    if uniform_attachment:
        chosen: list[int] = []
        for x in range(seed_size, n):
            chosen.clear()
            while len(chosen) < beta:
                t = int(buf.next() * x)
                if t not in chosen:
                    chosen.append(t)
            for t in chosen:
                edges[e, 0] = x
                edges[e, 1] = t
                e += 1
    else:
        tokens = np.empty(2 * m_total + theta_total, dtype=np.int64)
        top = 0
        deg_seed = seed_size - 1
        for i in range(seed_size):
            c = deg_seed + int(qualities[i])
            tokens[top : top + c] = i
            top += c
        chosen = []
        for x in range(seed_size, n):
            chosen.clear()
            while len(chosen) < beta:
                t = int(tokens[int(buf.next() * top)])
                if t not in chosen:
                    chosen.append(t)
            for t in chosen:
                edges[e, 0] = x
                edges[e, 1] = t
                tokens[top] = t
                top += 1
                e += 1
            c = beta + int(qualities[x])
            tokens[top : top + c] = x
            top += c
        # token-count consistency: every unit of degree and quality is a token
        assert top == 2 * m_total + theta_total, "token bookkeeping out of sync"
    assert e == m_total
    indptr, indices = _csr_from_edges(n, edges)
    return Network(
        n=n,
        beta=beta,
        qualities=qualities,
        edges=edges,
        adj_indptr=indptr,
        adj_indices=indices,
        provenance="uniform" if uniform_attachment else "qpa",
        seed=int(seed),
    )


def grow_qpa(n: int, params: ModelParams, seed: int) -> Network:
    """Grow a network attaching proportionally to degree + quality.

    Starts from a complete graph on ``beta + 1`` nodes (the smallest
    seed allowing ``beta`` distinct targets); every arrival draws its
    quality, then links to ``beta`` distinct existing nodes sampled by
    token list at the instant of arrival.  Deterministic given ``seed``.
    """
    return _grow(n, params, seed, uniform_attachment=False)


def grow_uniform(n: int, params: ModelParams, seed: int) -> Network:
    """Grow a network whose arrivals attach uniformly at random.

    Qualities are assigned exactly as in ``grow_qpa`` but attachment
    ignores both degree and quality, so neighbor attributes are
    uncorrelated with the node's own.
    """
    return _grow(n, params, seed, uniform_attachment=True)


def load_graph(edge_path, quality_path) -> Network:
    """Build a Network from an edge list and a node-quality file.

    Edge file: one ``u v`` pair of non-negative integers per line;
    quality file: one ``node_id quality`` pair per line.  ``#`` comments
    and blank lines are allowed in both.  Self-loops, duplicate edges,
    and nodes missing a quality are rejected with line numbers / ids.
    """
    edges_list: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    with open(edge_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphParseError(
                    f"expected 'u v', got {raw.strip()!r}", line=lineno
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(
                    f"non-integer endpoint in {raw.strip()!r}", line=lineno
                ) from None
            if u < 0 or v < 0:
                raise GraphParseError("negative node id", line=lineno)
            if u == v:
                raise GraphParseError(f"self-loop at node {u}", line=lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphParseError(f"duplicate edge {u} {v}", line=lineno)
            seen.add(key)
            edges_list.append((u, v))

    quality_map: dict[int, int] = {}
    with open(quality_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphParseError(
                    f"expected 'node_id quality', got {raw.strip()!r}", line=lineno
                )
            try:
                node, q = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(
                    f"non-integer entry in {raw.strip()!r}", line=lineno
                ) from None
            if node < 0:
                raise GraphParseError("negative node id", line=lineno)
            if q < 0:
                raise GraphParseError(f"negative quality {q}", line=lineno)
            if node in quality_map:
                raise GraphParseError(f"duplicate quality for node {node}", line=lineno)
            quality_map[node] = q

    if not quality_map:
        raise GraphParseError("quality file lists no nodes")
    edge_nodes = {u for u, _ in edges_list} | {v for _, v in edges_list}
    missing = sorted(edge_nodes - quality_map.keys())
    if missing:
        raise GraphParseError(f"missing quality for node {missing[0]}")
    n = max(max(quality_map), max(edge_nodes, default=0)) + 1
    qualities = np.zeros(n, dtype=np.int64)
    listed = np.zeros(n, dtype=bool)
    for node, q in quality_map.items():
        qualities[node] = q
        listed[node] = True
    unlisted = np.flatnonzero(~listed)
    if unlisted.size:
        raise GraphParseError(f"missing quality for node {int(unlisted[0])}")
    edges = np.array(edges_list, dtype=np.int64).reshape(-1, 2)
    indptr, indices = _csr_from_edges(n, edges)
    return Network(
        n=n,
        beta=0,
        qualities=qualities,
        edges=edges,
        adj_indptr=indptr,
        adj_indices=indices,
        provenance="ingested",
        seed=None,
    )


def _neighbor_stats(values: np.ndarray, indptr: np.ndarray, indices: np.ndarray):
    """Per-node mean and median of neighbor values (CDF median convention).

    Nodes with no neighbors get NaN mean and -1 median.
    """
    n = indptr.size - 1
    deg = np.diff(indptr)
    nbr_vals = values[indices].astype(float)
    owner = np.repeat(np.arange(n), deg)
    sums = np.bincount(owner, weights=nbr_vals, minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(deg > 0, sums / np.maximum(deg, 1), np.nan)
    # median: sort neighbor values within each node's segment, then take
    # the smallest value with at least half the neighbors at or below it
    order = np.lexsort((nbr_vals, owner))
    snbr = nbr_vals[order]
    med_idx = indptr[:-1] + (np.maximum(deg, 1) - 1) // 2
    medians = np.full(n, -1.0)
    nonzero = deg > 0
    medians[nonzero] = snbr[med_idx[nonzero]]
    return means, medians


def empirical_report(net: Network, include_flags: bool = False) -> EmpiricalReport:
    """Count nodes experiencing each paradox and build the joint histogram.

    A node experiences the mean (median) paradox in an attribute when
    its value is strictly below the mean (median) of its neighbors'
    values; the median of an even-sized neighbor multiset is its lower
    CDF median, matching the analytic convention.  Isolated nodes are
    excluded from the fractions and counted separately.
    """
    deg = net.degrees
    isolated = int(np.sum(deg == 0))
    active = deg > 0
    n_active = int(active.sum())
    qual = net.qualities.astype(float)

    deg_mean_nbr, deg_med_nbr = _neighbor_stats(
        deg.astype(np.int64), net.adj_indptr, net.adj_indices
    )
    q_mean_nbr, q_med_nbr = _neighbor_stats(
        net.qualities, net.adj_indptr, net.adj_indices
    )

    flags = {
        "degree_mean": active & (deg < deg_mean_nbr),
        "degree_median": active & (deg < deg_med_nbr),
        "quality_mean": active & (qual < q_mean_nbr),
        "quality_median": active & (qual < q_med_nbr),
    }
    denom = max(n_active, 1)
    report = EmpiricalReport(
        n=net.n,
        isolated=isolated,
        frac_degree_mean=float(flags["degree_mean"].sum()) / denom,
        frac_degree_median=float(flags["degree_median"].sum()) / denom,
        frac_quality_mean=float(flags["quality_mean"].sum()) / denom,
        frac_quality_median=float(flags["quality_median"].sum()) / denom,
        histogram=joint_histogram(net),
        flags={k: v.copy() for k, v in flags.items()} if include_flags else None,
    )
    return report


def joint_histogram(net: Network) -> dict:
    """Normalized histogram of (degree, quality) over all nodes."""
    deg = net.degrees
    qual = net.qualities
    kmax = int(deg.max()) if net.n else 0
    tmax = int(qual.max()) if net.n else 0
    key = deg.astype(np.int64) * (tmax + 1) + qual
    counts = np.bincount(key, minlength=(kmax + 1) * (tmax + 1))
    total = float(net.n)
    out = {}
    for flat in np.flatnonzero(counts):
        out[(int(flat // (tmax + 1)), int(flat % (tmax + 1)))] = counts[flat] / total
    return out


def write_edge_list(net: Network, fh) -> None:
    """One ``u v`` line per edge, in creation order."""
    for u, v in net.edges:
        fh.write(f"{int(u)} {int(v)}\n")
