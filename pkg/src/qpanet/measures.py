"""Paradox measures: critical values, baselines, fractions, sweeps.

A node experiences the mean (median) friendship paradox when its degree
is below the mean (median) of its neighbors' degrees; the quality
paradox is the same statement for the quality attribute.  For each
paradox the critical value is the largest attribute value that still
experiences it, and the affected fraction is the CDF of the attribute
at that critical value.  The uncorrelated baseline replaces the
neighbor distributions with the unconditional ones, which collapses the
critical values to "largest support value strictly below the
mean/median" of the attribute itself.
"""

from __future__ import annotations

import concurrent.futures
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from ._engine import NeighborMarch
from .analytic import DegreeProfile, JointTable, ModelParams, QualityAggregate
from .errors import DomainError, QpanetError
from .quality import make_bernoulli, make_exponential

__all__ = [
    "Criticals",
    "Fractions",
    "SweepRow",
    "critical_values",
    "uncorrelated_criticals",
    "paradox_fractions",
    "sweep",
    "write_sweep_csv",
    "SWEEP_CSV_HEADER",
]

_TIE_EPS = 1e-9
SCAN_FAIL_RUN = 25
SCAN_CAP_DEFAULT = 512


class ScanEdgeWarning(UserWarning):
    """The paradox inequality still held at the end of the degree scan."""


@dataclass(frozen=True)
class Criticals:
    """The four critical values for one model (absent values are None).

    ``quality_mean``/``quality_median`` are the largest qualities whose
    mean/median neighbor quality still exceeds them; ``degree_mean`` /
    ``degree_median`` the same for degrees.  ``baseline`` is ``"qpa"``
    for the growth model or ``"uncorrelated"``.
    """

    quality_mean: int | None
    quality_median: int | None
    degree_mean: int | None
    degree_median: int | None
    baseline: str
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Fractions:
    """Fraction of nodes experiencing each paradox (CDF at the critical)."""

    quality_mean: float
    quality_median: float
    degree_mean: float
    degree_median: float


@dataclass
class SweepRow:
    """One grid point of a parameter sweep."""

    family: str
    x: float
    beta: int
    theta_max: int
    qpa: Criticals | None = None
    uncorrelated: Criticals | None = None
    fractions: Fractions | None = None
    error: str | None = None


def _largest_below(values, bound, eps=_TIE_EPS):
    """Largest element of ``values`` strictly below ``bound`` (ties fail)."""
    qualifying = [int(v) for v in values if v < bound - eps]
    return max(qualifying) if qualifying else None


@dataclass
class _ParadoxProfile:
    """Raw per-attribute neighbor statistics behind the criticals."""

    quality_means: dict
    quality_medians: dict
    scan_ks: list
    scan_means: list
    scan_medians: list
    notes: tuple = ()
    quality_margin: float = math.inf
    degree_margin: float = math.inf


def _run_paradox_march(
    params: ModelParams,
    joint: JointTable,
    l_resolve: int,
    k_deep: int,
    scan_cap: int,
) -> _ParadoxProfile:
    """One march over focal degree serving both paradox sides.

    Degree side: scan k while testing k < mean / k < median of the
    neighbor degree distribution, stopping once both inequalities have
    failed for SCAN_FAIL_RUN consecutive degrees and the scan has
    covered at least four times the mean degree.  Quality side: collect
    the per-pair conditional masses Q(k) for the degree-summed
    aggregation up to ``k_deep``.
    """
    beta = params.beta
    min_scan = int(math.ceil(4.0 * joint.mean_degree))
    march = NeighborMarch(
        params, l_resolve=l_resolve, k_hint=max(k_deep, scan_cap) + 4
    )
    profile = DegreeProfile(params, joint)
    q_levels = []
    level_ks = []
    fail_mean = 0
    fail_median = 0
    scan_done = False
    notes = []
    while True:
        k = march.k
        lvl = march.level()
        if k <= k_deep:
            q_levels.append(analytic.quality_q_level(march, lvl))
            level_ks.append(k)
        if not scan_done:
            profile.add_level(march, lvl)
            if profile.means[-1] > k + _TIE_EPS:
                fail_mean = 0
            else:
                fail_mean += 1
            if profile.medians[-1] > k:
                fail_median = 0
            else:
                fail_median += 1
            if (
                k >= min_scan
                and fail_mean >= SCAN_FAIL_RUN
                and fail_median >= SCAN_FAIL_RUN
            ):
                scan_done = True
            elif k - beta >= scan_cap:
                scan_done = True
                if fail_mean == 0 or fail_median == 0:
                    notes.append(
                        f"paradox inequality still holds at the scan cap k={k}"
                    )
                    warnings.warn(notes[-1], ScanEdgeWarning, stacklevel=3)
        if scan_done and k >= k_deep:
            break
        march.advance()

    agg = QualityAggregate(
        params, joint, march, np.stack(q_levels, axis=1), level_ks, k_deep
    )
    support = [int(t) for t in params.quality.support]
    q_means = {}
    q_medians = {}
    q_margin = math.inf
    for theta in support:
        d = agg.dist(theta)
        q_means[theta] = d.mean
        q_medians[theta] = d.median
        q_margin = min(q_margin, abs(d.mean - theta))
    d_margin = min(
        (abs(m - k) for k, m in zip(profile.ks, profile.means)), default=math.inf
    )
    return _ParadoxProfile(
        quality_means=q_means,
        quality_medians=q_medians,
        scan_ks=profile.ks,
        scan_means=profile.means,
        scan_medians=profile.medians,
        notes=tuple(notes),
        quality_margin=q_margin,
        degree_margin=d_margin,
    )


def critical_values(
    params: ModelParams,
    rel_tol: float = analytic.DEFAULT_REL_TOL,
    scan_cap: int = SCAN_CAP_DEFAULT,
    joint: JointTable | None = None,
) -> Criticals:
    """Critical quality and degree values for the growth model.

    Each critical value is the maximum attribute value for which the
    strict paradox inequality holds; ties never qualify.  A value is
    None when no attribute value qualifies (e.g. all qualities equal).
    The degree scan is a heuristic with a documented cap: a warning is
    emitted (and recorded in ``notes``) if the inequality still holds at
    the scan edge.
    """
    if joint is None:
        joint = analytic._cached_joint(params, rel_tol)
    k_deep = max(128, 8 * params.beta)
    l_resolve = analytic._l_resolve_for(rel_tol)
    prof = _run_paradox_march(params, joint, l_resolve, k_deep, scan_cap)
    if prof.quality_margin < 1e-4 or prof.degree_margin < 2e-2:
        # near-tie: re-run once at doubled resolution before deciding
        prof = _run_paradox_march(params, joint, 2 * l_resolve, 2 * k_deep, scan_cap)
    support = [int(t) for t in params.quality.support]
    qualifying_mean = [t for t in support if t < prof.quality_means[t] - _TIE_EPS]
    q_mean = max(qualifying_mean) if qualifying_mean else None
    qualifying_median = [t for t in support if t < prof.quality_medians[t]]
    q_median = max(qualifying_median) if qualifying_median else None
    k_mean = None
    k_median = None
    for k, m, md in zip(prof.scan_ks, prof.scan_means, prof.scan_medians):
        if m > k + _TIE_EPS:
            k_mean = k
        if md > k:
            k_median = k
    return Criticals(
        quality_mean=q_mean,
        quality_median=q_median,
        degree_mean=k_mean,
        degree_median=k_median,
        baseline="qpa",
        notes=prof.notes,
    )


def uncorrelated_criticals(params: ModelParams, joint: JointTable) -> Criticals:
    """Critical values when neighbor attributes are independent of the node.

    With independent neighbors the mean/median neighbor attribute is the
    unconditional mean/median, so each critical value reduces to the
    largest support value strictly below that statistic (on a contiguous
    integer support, "statistic minus one").
    """
    pmf = params.quality
    support = [int(t) for t in pmf.support]
    q_mean = _largest_below(support, pmf.mean)
    q_median = _largest_below(support, pmf.median)
    beta = params.beta
    return Criticals(
        quality_mean=q_mean,
        quality_median=q_median,
        degree_mean=_int_below(joint.mean_degree, beta),
        degree_median=_int_below(joint.median_degree, beta),
        baseline="uncorrelated",
    )


def _int_below(value: float, floor: int):
    """Largest integer >= floor strictly below ``value`` (ties fail)."""
    c = int(math.ceil(value - _TIE_EPS)) - 1
    return c if c >= floor else None


def paradox_fractions(
    params: ModelParams, criticals: Criticals, joint: JointTable
) -> Fractions:
    """Fraction of nodes at or below each critical value.

    Quality fractions sum the quality PMF up to the critical quality;
    degree fractions sum the degree marginal up to the critical degree.
    An absent critical value contributes a fraction of zero.
    """
    pmf = params.quality

    def q_frac(c):
        if c is None:
            return 0.0
        return float(pmf.probs[: c + 1].sum())

    def k_frac(c):
        if c is None:
            return 0.0
        i = c - params.beta
        if i < 0:
            return 0.0
        return float(joint.degree_marginal[: i + 1].sum())

    return Fractions(
        quality_mean=q_frac(criticals.quality_mean),
        quality_median=q_frac(criticals.quality_median),
        degree_mean=k_frac(criticals.degree_mean),
        degree_median=k_frac(criticals.degree_median),
    )


def _sweep_point(family, x, beta, theta_max, rel_tol) -> SweepRow:
    row = SweepRow(family=family, x=float(x), beta=int(beta), theta_max=int(theta_max))
    try:
        if family == "bernoulli":
            pmf = make_bernoulli(x, theta_max)
        elif family == "exponential":
            pmf = make_exponential(x, theta_max)
        else:
            raise DomainError(f"unknown quality family {family!r}")
        params = ModelParams(beta=beta, quality=pmf)
        joint = analytic.build_joint_table(params, rel_tol=rel_tol)
        qpa = critical_values(params, rel_tol=rel_tol, joint=joint)
        row.qpa = qpa
        row.uncorrelated = uncorrelated_criticals(params, joint)
        row.fractions = paradox_fractions(params, qpa, joint)
    except QpanetError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def sweep(
    family: str,
    x_grid,
    beta_list,
    theta_max_list,
    rel_tol: float = analytic.DEFAULT_REL_TOL,
    threads: int = 1,
) -> list[SweepRow]:
    """Evaluate all measures over a (x, beta, theta_max) grid.

    Rows are ordered lexicographically by (x, beta, theta_max) in the
    order given.  A failure at one grid point is recorded in that row's
    ``error`` field and does not abort the sweep.
    """
    x_grid = list(x_grid)
    beta_list = list(beta_list)
    theta_max_list = list(theta_max_list)
    if not x_grid or not beta_list or not theta_max_list:
        raise DomainError("sweep grids must be non-empty")
    grid = [
        (x, b, t) for x in x_grid for b in beta_list for t in theta_max_list
    ]
    if threads <= 1:
        return [_sweep_point(family, x, b, t, rel_tol) for (x, b, t) in grid]
    rows: list[SweepRow | None] = [None] * len(grid)
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        futs = {
            pool.submit(_sweep_point, family, x, b, t, rel_tol): i
            for i, (x, b, t) in enumerate(grid)
        }
        for fut in concurrent.futures.as_completed(futs):
            rows[futs[fut]] = fut.result()
    return rows  # type: ignore[return-value]


SWEEP_CSV_HEADER = (
    "family,x,beta,theta_max,"
    "crit_q_mean,crit_q_median,crit_k_mean,crit_k_median,"
    "crit_q_mean_u,crit_q_median_u,crit_k_mean_u,crit_k_median_u,"
    "frac_q_mean,frac_q_median,frac_k_mean,frac_k_median"
)


def _cell(v) -> str:
    return "" if v is None else str(v)


def write_sweep_csv(rows, fh) -> None:
    """Serialize sweep rows; absent criticals become empty fields."""
    fh.write(SWEEP_CSV_HEADER + "\n")
    for r in rows:
        qpa = r.qpa or Criticals(None, None, None, None, "qpa")
        unc = r.uncorrelated or Criticals(None, None, None, None, "uncorrelated")
        fr = r.fractions or Fractions(0.0, 0.0, 0.0, 0.0)
        cells = [
            r.family,
            f"{r.x:g}",
            str(r.beta),
            str(r.theta_max),
            _cell(qpa.quality_mean),
            _cell(qpa.quality_median),
            _cell(qpa.degree_mean),
            _cell(qpa.degree_median),
            _cell(unc.quality_mean),
            _cell(unc.quality_median),
            _cell(unc.degree_mean),
            _cell(unc.degree_median),
            f"{fr.quality_mean:.6f}",
            f"{fr.quality_median:.6f}",
            f"{fr.degree_mean:.6f}",
            f"{fr.degree_median:.6f}",
        ]
        fh.write(",".join(cells) + "\n")
