"""Closed-form stationary distributions of the growth model.

The model grows a network by attaching each new node to ``beta``
existing nodes with probability proportional to degree + quality.  In
the large-network limit the joint fraction of nodes at (degree k,
quality theta) and the conditional distribution of a neighbor's
(degree, quality) given the focal node's have closed forms built from
gamma-function ratios; this module evaluates them, their marginals and
conditionals, with explicit truncation-tail bookkeeping for the
unbounded degree sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._engine import (
    NeighborMarch,
    power_tail_fit,
    tail_power_sum,
    tail_weighted_sum,
)
from .errors import DomainError, NonConvergenceError, UndefinedConditionalError
from .numerics import _ln_gamma_raw, adaptive_series, sum_log_terms
from .quality import QualityPmf

__all__ = [
    "ModelParams",
    "JointTable",
    "NeighborDist",
    "joint_probability",
    "build_joint_table",
    "nn_probability",
    "neighbor_quality_dist",
    "neighbor_degree_dist",
    "write_nn_table",
]

DEFAULT_REL_TOL = 1e-10
JOINT_TAIL_TARGET = 1e-8
DEFAULT_K_CAP = 10**5
DEFAULT_ELL_CAP = 10**4


@dataclass(frozen=True)
class ModelParams:
    """Growth-model parameters: links per new node and the quality PMF."""

    beta: int
    quality: QualityPmf

    def __post_init__(self):
        if int(self.beta) != self.beta or self.beta < 1:
            raise DomainError(f"beta must be an integer >= 1, got {self.beta}")
        object.__setattr__(self, "beta", int(self.beta))

    @property
    def mu_over_beta(self) -> float:
        """Mean quality divided by beta; shifts every power-law exponent."""
        return self.quality.mean / self.beta

    def key(self) -> tuple:
        return (self.beta, self.quality.key())


@dataclass
class JointTable:
    """Truncated table of the stationary joint distribution P(k, theta).

    Rows cover degrees ``beta .. k_max``; columns qualities
    ``0 .. theta_max``.  ``tail_mass`` estimates the probability beyond
    ``k_max`` (per quality in ``tail_by_theta``).  The degree mean
    carries a power-law tail correction; the median follows the
    CDF >= 1/2 convention.
    """

    params: ModelParams
    k_values: np.ndarray
    probs: np.ndarray
    degree_marginal: np.ndarray
    mean_degree: float
    median_degree: int
    tail_mass: float
    tail_by_theta: np.ndarray

    @property
    def k_max(self) -> int:
        return int(self.k_values[-1])

    def degree_cdf(self) -> np.ndarray:
        return np.cumsum(self.degree_marginal)

    def p_k_given_theta(self, theta: int) -> np.ndarray:
        rho = self.params.quality.probs[theta]
        if rho <= 0.0:
            raise UndefinedConditionalError(
                f"quality {theta} has zero probability"
            )
        return self.probs[:, theta] / rho

    def p_theta_given_k(self, k: int) -> np.ndarray:
        i = k - self.params.beta
        if i < 0 or i >= self.k_values.size:
            raise DomainError(f"degree {k} outside table range")
        row = self.probs[i]
        total = row.sum()
        if total <= 0.0:
            raise UndefinedConditionalError(f"degree {k} has zero probability")
        return row / total


@dataclass
class NeighborDist:
    """A (possibly truncated) distribution over a neighbor attribute.

    ``kind`` is one of ``"joint-given-focal"``, ``"quality-given-theta"``
    or ``"degree-given-k"``.  ``values`` lists the resolved support,
    ``probs`` the matching probabilities, and ``tail_mass`` the
    estimated mass beyond the resolved support.  For degree
    distributions the mean is taken over the capped support
    ``[beta, ell_cap]`` (the raw mean barely converges — or does not —
    for low mean quality, so the cap is part of the definition) while
    the median only needs the resolved CDF.
    """

    kind: str
    values: np.ndarray
    probs: np.ndarray
    tail_mass: float
    mean: float
    median: int
    meta: dict = field(default_factory=dict)

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)


def _check_quality_index(params: ModelParams, value: int, name: str) -> int:
    if int(value) != value or not (0 <= value <= params.quality.theta_max):
        raise DomainError(
            f"{name} must be an integer in [0, {params.quality.theta_max}], got {value}"
        )
    return int(value)


def joint_probability(params: ModelParams, k: int, theta: int) -> float:
    """Stationary fraction of nodes with degree ``k`` and quality ``theta``.

    Zero for ``k < beta`` (new nodes are born with ``beta`` links).
    Evaluated as a difference of log-gammas and exponentiated, so it is
    safe for arbitrarily large degrees.
    """
    theta = _check_quality_index(params, theta, "theta")
    if k < 0 or int(k) != k:
        raise DomainError(f"k must be a non-negative integer, got {k}")
    beta = params.beta
    if k < beta:
        return 0.0
    rho = params.quality.probs[theta]
    if rho == 0.0:
        return 0.0
    g = params.mu_over_beta
    ln = (
        math.log(rho)
        + math.log(2.0 + g)
        + float(_ln_gamma_raw(k + theta))
        - float(_ln_gamma_raw(beta + theta))
        + float(_ln_gamma_raw(beta + theta + 2.0 + g))
        - float(_ln_gamma_raw(k + theta + 3.0 + g))
    )
    return math.exp(ln)


def _joint_rows(params: ModelParams, k_lo: int, k_hi: int) -> np.ndarray:
    """Vectorized joint probabilities for degrees k_lo..k_hi inclusive."""
    beta = params.beta
    g = params.mu_over_beta
    probs_q = params.quality.probs
    tmax = params.quality.theta_max
    ks = np.arange(k_lo, k_hi + 1, dtype=float)[:, None]
    ths = np.arange(tmax + 1, dtype=float)[None, :]
    with np.errstate(divide="ignore"):
        ln_rho = np.log(probs_q)[None, :]
    ln = (
        ln_rho
        + math.log(2.0 + g)
        + _ln_gamma_raw(ks + ths)
        - _ln_gamma_raw(beta + ths)
        + _ln_gamma_raw(beta + ths + 2.0 + g)
        - _ln_gamma_raw(ks + ths + 3.0 + g)
    )
    out = np.exp(ln)
    out[:, probs_q == 0.0] = 0.0
    return out


def build_joint_table(
    params: ModelParams,
    rel_tol: float = DEFAULT_REL_TOL,
    k_cap: int = DEFAULT_K_CAP,
) -> JointTable:
    """Tabulate P(k, theta) out to a degree where the tail is negligible.

    The truncation point is found by adaptive summation of the degree
    marginal at ``rel_tol`` and then extended until the estimated tail
    mass (exact power-law exponent ``3 + mu/beta``, Richardson
    amplitude) drops below 1e-8.

    Raises
    ------
    NonConvergenceError
        If the ``k_cap`` degree cap is hit first.
    """
    beta = params.beta
    g = params.mu_over_beta
    chunks = [_joint_rows(params, beta, beta + 1023)]
    sizes = [1024]

    def marginal_term(i: int) -> float:
        while i >= sizes[-1]:
            lo = beta + sizes[-1]
            grown = min(sizes[-1] * 2, k_cap - beta + 1)
            if grown <= sizes[-1]:
                raise NonConvergenceError(
                    f"joint table exceeded the {k_cap}-degree cap"
                )
            chunks.append(_joint_rows(params, lo, beta + grown - 1))
            sizes.append(grown)
        j = i
        for c in chunks:
            if j < c.shape[0]:
                return float(c[j].sum())
            j -= c.shape[0]
        raise AssertionError

    adaptive_series(marginal_term, start=0, rel_tol=rel_tol, max_terms=k_cap)

    # extend until the estimated tail is below the fixed target
    s = 3.0 + g
    while True:
        probs = np.concatenate(chunks, axis=0) if len(chunks) > 1 else chunks[0]
        chunks = [probs]
        sizes = [probs.shape[0]]
        k_max = beta + probs.shape[0] - 1
        ks = beta + np.arange(probs.shape[0])
        coef_by_theta = power_tail_fit(probs.T, ks, s)
        tail_by_theta = tail_power_sum(coef_by_theta, s, k_max)
        tail = float(tail_by_theta.sum())
        if tail < JOINT_TAIL_TARGET:
            break
        if k_max >= k_cap:
            raise NonConvergenceError(
                f"joint table tail {tail:.2e} still above {JOINT_TAIL_TARGET}"
                f" at the {k_cap}-degree cap"
            )
        lo = k_max + 1
        grown = min(probs.shape[0] * 2, k_cap - beta + 1)
        chunks.append(_joint_rows(params, lo, beta + grown - 1))
        sizes.append(grown)

    marginal = probs.sum(axis=1)
    mean_resolved = float(np.dot(ks, marginal))
    coef_m = power_tail_fit(marginal[None, :], ks, s)
    mean_tail = float(tail_weighted_sum(coef_m, s, k_max, None)[0])
    cdf = np.cumsum(marginal)
    median = int(ks[np.searchsorted(cdf, 0.5 - 1e-12)])
    return JointTable(
        params=params,
        k_values=ks,
        probs=probs,
        degree_marginal=marginal,
        mean_degree=mean_resolved + mean_tail,
        median_degree=median,
        tail_mass=tail,
        tail_by_theta=tail_by_theta,
    )


def nn_probability(
    params: ModelParams, k: int, theta: int, ell: int, phi: int
) -> float:
    """Fraction of neighbors of a (k, theta) node having (ell, phi).

    Reference evaluation, term for term as the closed form is written:
    prefactor times the sum of the two j-sums (one to k, one to ell),
    every term assembled in log space and combined by log-sum-exp.  The
    vectorized march in this package is regression-tested against this
    function.
    """
    theta = _check_quality_index(params, theta, "theta")
    phi = _check_quality_index(params, phi, "phi")
    beta = params.beta
    if k < beta:
        raise DomainError(f"focal degree k must be >= beta = {beta}, got {k}")
    if ell < beta:
        raise DomainError(f"neighbor degree ell must be >= beta = {beta}, got {ell}")
    rho_phi = params.quality.probs[phi]
    if rho_phi == 0.0:
        return 0.0
    g = params.mu_over_beta

    def lg(x):
        return _ln_gamma_raw(np.asarray(x, dtype=float))

    def lnb(n, m):
        return lg(n + 1.0) - lg(m + 1.0) - lg(n - m + 1.0)

    ln_pref = float(
        math.log(rho_phi)
        - math.log(k)
        + lg(k + theta + 3 + g)
        - lg(k + theta + 3 + g + ell + phi)
        + lg(ell + phi)
        - lg(beta + phi)
        + lg(beta + 2 + phi + g)
    )
    pieces = []
    j1 = np.arange(beta + 1, k + 1, dtype=float)
    if j1.size:
        pieces.append(
            lg(j1 + theta + 2 + g + beta + phi)
            + lnb(k - j1 + ell - beta, float(ell - beta))
            - lg(j1 + theta + 2 + g)
            - lg(beta + 2 + phi + g)
        )
    j2 = np.arange(beta + 1, ell + 1, dtype=float)
    if j2.size:
        pieces.append(
            lg(j2 + theta + 2 + g + beta + phi)
            + lnb(ell - j2 + k - beta, float(k - beta))
            - lg(j2 + phi + 2 + g)
            - lg(beta + 2 + theta + g)
        )
    if not pieces:
        return 0.0
    return math.exp(ln_pref + sum_log_terms(np.concatenate(pieces)))


# --------------------------------------------------------------------------
# march-based aggregation
# --------------------------------------------------------------------------


def _l_resolve_for(rel_tol: float, floor: int = 1024) -> int:
    """Resolved neighbor-degree window; tighter tolerances resolve further."""
    n = floor
    if rel_tol < 1e-11:
        n *= 2
    if rel_tol < 1e-13:
        n *= 2
    return n


_JOINT_CACHE: dict = {}


def _cached_joint(params: ModelParams, rel_tol: float) -> JointTable:
    key = (params.key(), float(rel_tol))
    table = _JOINT_CACHE.get(key)
    if table is None:
        table = build_joint_table(params, rel_tol=rel_tol)
        if len(_JOINT_CACHE) >= 4:
            _JOINT_CACHE.pop(next(iter(_JOINT_CACHE)))
        _JOINT_CACHE[key] = table
    return table


class QualityAggregate:
    """P(phi | theta) for every supported theta, from one march.

    The degree of the focal node is summed out in two parts: exactly up
    to the march depth ``k_deep``, then with the smooth-in-k model
    Q(k) = Q_inf + A/k fitted over the last half of the march (the
    per-k conditional quality mass varies as 1/k, with
    Q_inf = rho(phi) its infinite-degree limit).
    """

    def __init__(self, params, joint, march, q_levels, level_ks, k_deep):
        self.params = params
        support = params.quality.support
        self.support = support
        n_s = len(support)

        ks = np.asarray(level_ks, dtype=float)
        q_levels = np.asarray(q_levels)  # [n_pairs, n_levels]
        half = int(np.searchsorted(ks, max(ks[-1] // 2, ks[0] + 1)))
        inv_k = 1.0 / ks[half:]
        qw = q_levels[:, half:]
        # least-squares line in 1/k
        x = inv_k - inv_k.mean()
        denom = float(np.dot(x, x))
        slope = (qw - qw.mean(axis=1, keepdims=True)) @ x / denom
        q_inf = qw.mean(axis=1) - slope * inv_k.mean()

        kv = joint.k_values
        deep_mask = kv > k_deep
        self.dists = {}
        self.tail_defect = {}
        for ti, theta in enumerate(int(t) for t in support):
            pk = joint.p_k_given_theta(theta)
            w_exact = pk[~deep_mask]
            t0 = float(pk[deep_mask].sum()) + float(
                joint.tail_by_theta[theta] / params.quality.probs[theta]
            )
            t1 = float((pk[deep_mask] / kv[deep_mask]).sum())
            probs_phi = np.zeros(n_s)
            for fi in range(n_s):
                p = ti * n_s + fi  # march pairs are theta-major over the support
                probs_phi[fi] = (
                    float(np.dot(w_exact, q_levels[p]))
                    + q_inf[p] * t0
                    + slope[p] * t1
                )
            self.dists[theta] = probs_phi
            self.tail_defect[theta] = 1.0 - float(probs_phi.sum())

    def dist(self, theta: int) -> NeighborDist:
        support = np.array([int(t) for t in self.support])
        probs = self.dists[int(theta)]
        defect = self.tail_defect[int(theta)]
        cdf = np.cumsum(probs)
        median = int(support[np.searchsorted(cdf, 0.5 - 1e-12)])
        mean = float(np.dot(support, probs))
        return NeighborDist(
            kind="quality-given-theta",
            values=support,
            probs=probs,
            tail_mass=defect,
            mean=mean,
            median=median,
            meta={"theta": int(theta)},
        )


def quality_q_level(march: NeighborMarch, lvl) -> np.ndarray:
    """Per-pair conditional mass sum_ell P(ell, phi | k, theta), tails included."""
    return lvl.probs.sum(axis=1) + march.tail_mass(lvl)


class DegreeProfile:
    """Mean/median neighbor degree per focal degree, from march levels."""

    def __init__(self, params, joint, ell_cap=DEFAULT_ELL_CAP):
        self.params = params
        self.joint = joint
        self.ell_cap = ell_cap
        self.ks: list[int] = []
        self.means: list[float] = []
        self.medians: list[int] = []
        self.mass: list[float] = []
        self._g = params.mu_over_beta
        self._n_support = len(params.quality.support)

    def add_level(self, march: NeighborMarch, lvl) -> None:
        pl, coef = self._degree_row(march, lvl)
        ells = march.ells
        g = self._g
        s = 2.0 + g
        l_end = int(ells[-1])
        resolved_mean = float(np.dot(ells, pl))
        ext = float(tail_weighted_sum(coef, s, l_end, self.ell_cap)[0])
        tail_all = float(tail_power_sum(coef, s, l_end)[0])
        cdf = np.cumsum(pl)
        total = cdf[-1] + tail_all
        median = int(ells[np.searchsorted(cdf, 0.5 * total - 1e-12)])
        self.ks.append(lvl.k)
        self.means.append(resolved_mean + ext)
        self.medians.append(median)
        self.mass.append(float(total))

    def _degree_row(self, march: NeighborMarch, lvl):
        """(P(ell | k) resolved row, its tail-model coefficients)."""
        params = self.params
        n_s = self._n_support
        by_theta = lvl.probs.reshape(n_s, n_s, -1).sum(axis=1)
        w = self.joint.p_theta_given_k(lvl.k)[[int(t) for t in params.quality.support]]
        pl = w @ by_theta
        coef_by_theta = lvl.tail_coef.reshape(n_s, n_s, 3).sum(axis=1)
        coef = (w @ coef_by_theta)[None, :]
        return pl, coef


def neighbor_quality_dist(
    params: ModelParams,
    theta: int,
    rel_tol: float = DEFAULT_REL_TOL,
    k_deep: int | None = None,
) -> NeighborDist:
    """Distribution of a random neighbor's quality given the node's quality.

    Aggregates the neighbor distribution over the focal node's degree
    class:  P(phi | theta) = sum_k P(k | theta) sum_ell P(ell, phi | k, theta),
    with both unbounded degree sums truncated adaptively and the
    remainders carried by power-law tail models.

    Raises
    ------
    UndefinedConditionalError
        If ``rho(theta) = 0``.
    """
    theta = _check_quality_index(params, theta, "theta")
    if params.quality.probs[theta] <= 0.0:
        raise UndefinedConditionalError(
            f"quality {theta} has zero probability; conditional undefined"
        )
    joint = _cached_joint(params, rel_tol)
    if k_deep is None:
        k_deep = max(128, 8 * params.beta)
    march = NeighborMarch(params, l_resolve=_l_resolve_for(rel_tol))
    q_levels = [quality_q_level(march, march.level())]
    level_ks = [march.k]
    while march.k < k_deep:
        march.advance()
        q_levels.append(quality_q_level(march, march.level()))
        level_ks.append(march.k)
    agg = QualityAggregate(
        params, joint, march, np.stack(q_levels, axis=1), level_ks, k_deep
    )
    return agg.dist(theta)


def neighbor_degree_dist(
    params: ModelParams,
    k: int,
    rel_tol: float = DEFAULT_REL_TOL,
    ell_cap: int = DEFAULT_ELL_CAP,
) -> NeighborDist:
    """Distribution of a random neighbor's degree given the node's degree.

    P(ell | k) = sum_theta P(theta | k) sum_phi P(ell, phi | k, theta).
    The resolved support covers ``beta .. l_resolve``; the remaining
    mass decays as ``ell**-(2 + mu/beta)`` and is reported in
    ``tail_mass``.  The mean is defined over the capped support
    ``[beta, ell_cap]``.

    Raises
    ------
    DomainError
        If ``k < beta``.
    """
    beta = params.beta
    if int(k) != k or k < beta:
        raise DomainError(f"k must be an integer >= beta = {beta}, got {k}")
    k = int(k)
    joint = _cached_joint(params, rel_tol)
    if k > joint.k_max:
        raise DomainError(f"k = {k} beyond the tabulated degree range {joint.k_max}")
    march = NeighborMarch(params, l_resolve=_l_resolve_for(rel_tol), k_hint=k)
    while march.k < k:
        march.advance()
    lvl = march.level()
    profile = DegreeProfile(params, joint, ell_cap=ell_cap)
    pl, coef = profile._degree_row(march, lvl)
    ells = march.ells
    g = params.mu_over_beta
    s = 2.0 + g
    l_end = int(ells[-1])
    tail = float(tail_power_sum(coef, s, l_end)[0])
    mean = float(np.dot(ells, pl)) + float(
        tail_weighted_sum(coef, s, l_end, ell_cap)[0]
    )
    cdf = np.cumsum(pl)
    total = cdf[-1] + tail
    median = int(ells[np.searchsorted(cdf, 0.5 * total - 1e-12)])
    return NeighborDist(
        kind="degree-given-k",
        values=ells.copy(),
        probs=pl,
        tail_mass=tail,
        mean=mean,
        median=median,
        meta={"k": k, "ell_cap": ell_cap},
    )


def write_nn_table(
    params: ModelParams,
    k: int,
    theta: int,
    fh,
    l_max: int | None = None,
) -> None:
    """Dump P(ell, phi | k, theta) as CSV rows in ascending (ell, phi).

    Format: comment lines ``# beta=…``, ``# k=…``, ``# theta=…``,
    ``# tail_mass=…`` followed by the header ``ell,phi,prob``.
    """
    theta = _check_quality_index(params, theta, "theta")
    beta = params.beta
    if int(k) != k or k < beta:
        raise DomainError(f"k must be an integer >= beta = {beta}, got {k}")
    k = int(k)
    if l_max is None:
        l_max = 2048
    support = [int(t) for t in params.quality.support]
    if theta not in support:
        raise UndefinedConditionalError(
            f"quality {theta} has zero probability; conditional undefined"
        )
    ti = support.index(theta)
    march = NeighborMarch(
        params, l_resolve=max(l_max - beta + 1, 64), k_hint=k
    )
    while march.k < k:
        march.advance()
    lvl = march.level()
    g = params.mu_over_beta
    n_s = len(support)
    block = lvl.probs.reshape(n_s, n_s, -1)[ti]  # [phi, ell]
    ells = march.ells
    keep = ells <= l_max
    # mass beyond the dumped rows: resolved-but-not-dumped plus the model tail
    coef_theta = lvl.tail_coef.reshape(n_s, n_s, 3)[ti].sum(axis=0)
    tail_dump = float(block[:, ~keep].sum()) + float(
        tail_power_sum(coef_theta, 2.0 + g, int(ells[-1]))[0]
    )
    fh.write(f"# beta={beta}\n")
    fh.write(f"# k={k}\n")
    fh.write(f"# theta={theta}\n")
    fh.write(f"# tail_mass={tail_dump:.9e}\n")
    fh.write("ell,phi,prob\n")
    for i in np.flatnonzero(keep):
        for fi, phi in enumerate(support):
            fh.write(f"{int(ells[i])},{phi},{block[fi, i]:.12e}\n")
