"""Linear separability of cube dichotomies, the separability census, and
inverse synthesis of classifier models from separating hyperplanes.

Separability is decided by a margin-1 feasibility program: a dichotomy
is separable iff some affine function is >= +1 on the positive vertices
and <= -1 on the rest (threshold functions always admit finite-margin
witnesses, so the unit margin loses nothing).  Every returned witness is
re-verified vertex by vertex, independently of the solver; the census
additionally cross-checks against an exhaustive integer-weight oracle in
the test suite.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.special import expit
from scipy.stats import binomtest

from . import kernels
from .dichotomy import Dichotomy, cube_vertices
from .errors import ExactCensusTooLargeError, PriorOverflowWarning
from .model import ClassifierModel, ObservationSpec
from .surfaces import LinearSurface

# dense simplex kernel below this dimension, scipy above
KERNEL_MAX_N = 6

EXACT_MAX_N = 4
SAMPLED_MIN_N = 5
SAMPLED_MAX_N = 10

MARGIN_SLACK = 1e-6  # witnesses must reach margin 1 - MARGIN_SLACK

# synthesis clamps log-odds parameters here; the complementary
# probability exp(-700) still sits comfortably inside double range
LOG_ODDS_CLAMP = 700.0

CONFIDENCE_LEVEL = 0.95


@dataclass(frozen=True)
class CensusReport:
    """Separability census for one dimension.

    ``separable_count`` counts the enumerated masks in exact mode and
    the sampled masks in sampled mode; ``bound`` is the threshold-count
    upper bound and ``comparator`` the coarser binomial comparator
    reported alongside it (the comparator is not a bound at small n).
    """

    n: int
    total: int
    separable_count: int
    bound: int
    comparator: int
    mode: str
    sample_size: int | None = None
    confidence: tuple[float, float] | None = None
    confidence_level: float | None = None

    @property
    def separable_fraction(self) -> float:
        base = self.total if self.mode == "exact" else self.sample_size
        return self.separable_count / base

    def csv_row(self) -> str:
        return f"{self.n},{self.total},{self.separable_count},{self.bound},{self.mode}"


def _signed_vertex_matrix(d: Dichotomy) -> np.ndarray:
    v1 = np.hstack([cube_vertices(d.n), np.ones((d.vertex_count, 1))])
    return v1 * d.signs()[:, np.newaxis]


def _scipy_margin_lp(signed: np.ndarray) -> tuple[bool, np.ndarray]:
    m, d = signed.shape
    res = linprog(
        np.zeros(d),
        A_ub=-signed,
        b_ub=-np.ones(m),
        bounds=[(None, None)] * d,
        method="highs",
    )
    if res.status == 0:
        return True, np.asarray(res.x)
    if res.status == 2:
        return False, np.zeros(d)
    raise RuntimeError(f"LP solver failed with status {res.status}: {res.message}")


def is_linearly_separable(d: Dichotomy) -> LinearSurface | None:
    """Witness hyperplane for a separable dichotomy, ``None`` otherwise.

    The witness satisfies ``weights @ v + bias >= +1`` on the positive
    side and ``<= -1`` on the rest; degenerate (empty/full) dichotomies
    are separable by a bias-only witness.
    """
    if not 1 <= d.n <= 20:
        raise ValueError(f"dimension {d.n} outside [1, 20]")
    signed = _signed_vertex_matrix(d)
    if d.n <= KERNEL_MAX_N:
        feasible, w = kernels.margin_lp(signed)
    else:
        feasible, w = _scipy_margin_lp(signed)
    if not feasible:
        return None
    margins = signed @ w
    if margins.min() < 1.0 - MARGIN_SLACK:
        raise RuntimeError(
            f"solver claimed feasibility but witness margin is {margins.min()!r}"
        )
    return LinearSurface(bias=float(w[-1]), weights=w[:-1])


def _verify_witnesses(
    vertices1: np.ndarray, masks: np.ndarray, flags: np.ndarray, witnesses: np.ndarray
) -> None:
    """Vectorized margin re-check of every witness a census chunk found."""
    feasible = flags == 1
    if not feasible.any():
        return
    m = vertices1.shape[0]
    bits = (masks[feasible, np.newaxis] >> np.arange(m)) & 1
    signs = np.where(bits == 1, 1.0, -1.0)
    scores = witnesses[feasible] @ vertices1.T
    worst = (signs * scores).min()
    if worst < 1.0 - MARGIN_SLACK:
        raise RuntimeError(f"census witness failed verification (margin {worst!r})")


def exact_census_flags(n: int, jobs: int = 1) -> np.ndarray:
    """Separability verdict for every mask of the n-cube, 0/1 per mask.

    Enumerates all 2^(2^n) masks; the range is split into contiguous
    chunks so worker count never changes the result.
    """
    if not 1 <= n <= EXACT_MAX_N:
        raise ExactCensusTooLargeError(
            f"exact census is capped at n={EXACT_MAX_N}, got n={n}"
        )
    m = 1 << n
    vertices1 = np.hstack([cube_vertices(n), np.ones((m, 1))])
    masks = np.arange(1 << m, dtype=np.int64)
    flags = np.zeros(masks.shape[0], dtype=np.uint8)
    witnesses = np.zeros((masks.shape[0], n + 1))
    jobs = max(int(jobs), 1)
    if jobs == 1:
        kernels.census_chunk(vertices1, masks, flags, witnesses)
    else:
        bounds = np.linspace(0, masks.shape[0], jobs + 1, dtype=np.int64)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    kernels.census_chunk,
                    vertices1,
                    masks[lo:hi],
                    flags[lo:hi],
                    witnesses[lo:hi],
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for fut in futures:
                fut.result()
    _verify_witnesses(vertices1, masks, flags, witnesses)
    return flags


def _sample_masks(n: int, sample_size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform dichotomy masks as int64 bit patterns (n <= 6)."""
    m = 1 << n
    if m < 64:
        return rng.integers(0, 1 << m, size=sample_size, dtype=np.int64)
    lo = rng.integers(0, 1 << 32, size=sample_size, dtype=np.uint64)
    hi = rng.integers(0, 1 << 32, size=sample_size, dtype=np.uint64)
    return ((hi << np.uint64(32)) | lo).view(np.int64)


def count_separable(
    n: int,
    mode: str = "exact",
    sample_size: int = 10_000,
    seed: int | None = None,
    jobs: int = 1,
) -> CensusReport:
    """Census of linearly separable dichotomies in dimension ``n``.

    Exact mode (n <= 4) enumerates every mask; sampled mode (n >= 5)
    draws masks uniformly and reports the in-sample separable count with
    a Wilson confidence interval for the separable fraction.
    """
    total = 1 << (1 << n)
    bound = theorem3_bound(n)
    comparator = theorem3_comparator(n)
    if mode == "exact":
        flags = exact_census_flags(n, jobs=jobs)
        return CensusReport(
            n=n,
            total=total,
            separable_count=int(flags.sum()),
            bound=bound,
            comparator=comparator,
            mode="exact",
        )
    if mode != "sampled":
        raise ValueError(f"unknown census mode {mode!r}")
    if not SAMPLED_MIN_N <= n <= SAMPLED_MAX_N:
        raise ValueError(
            f"sampled census supports {SAMPLED_MIN_N} <= n <= {SAMPLED_MAX_N}, got {n}"
        )
    if sample_size < 1:
        raise ValueError("sample_size must be positive")
    rng = np.random.default_rng(seed)
    m = 1 << n
    vertices1 = np.hstack([cube_vertices(n), np.ones((m, 1))])
    if n <= KERNEL_MAX_N:
        masks = _sample_masks(n, sample_size, rng)
        flags = np.zeros(sample_size, dtype=np.uint8)
        witnesses = np.zeros((sample_size, n + 1))
        kernels.census_chunk(vertices1, masks, flags, witnesses)
        _verify_witnesses(vertices1, masks, flags, witnesses)
        hits = int(flags.sum())
    else:
        hits = 0
        for _ in range(sample_size):
            signs = np.where(rng.integers(0, 2, size=m) == 1, 1.0, -1.0)
            feasible, w = _scipy_margin_lp(vertices1 * signs[:, np.newaxis])
            if feasible:
                margins = (vertices1 * signs[:, np.newaxis]) @ w
                if margins.min() < 1.0 - MARGIN_SLACK:
                    raise RuntimeError("sampled census witness failed verification")
                hits += 1
    interval = binomtest(hits, sample_size).proportion_ci(
        confidence_level=CONFIDENCE_LEVEL, method="wilson"
    )
    return CensusReport(
        n=n,
        total=total,
        separable_count=hits,
        bound=bound,
        comparator=comparator,
        mode="sampled",
        sample_size=sample_size,
        confidence=(float(interval.low), float(interval.high)),
        confidence_level=CONFIDENCE_LEVEL,
    )


def theorem3_bound(n: int) -> int:
    """Threshold-function count bound 2 * sum_{i<=n} C(2^n - 1, i).

    Tight at n = 1 and 2 (4 and 14); at n = 3 and 4 it gives 128 and
    3882 against true counts 104 and 1882.
    """
    if not 1 <= n <= 16:
        raise ValueError(f"dimension {n} outside [1, 16]")
    points = (1 << n) - 1
    return 2 * sum(math.comb(points, i) for i in range(n + 1))


def theorem3_comparator(n: int) -> int:
    """Coarser binomial comparator 2 * C(2^n, n), reported for context.

    Only asymptotically dominant: at n = 2 it is 12, below the true
    count 14, so it is never asserted as a bound.
    """
    if not 1 <= n <= 16:
        raise ValueError(f"dimension {n} outside [1, 16]")
    return 2 * math.comb(1 << n, n)


def integer_witness_masks(n: int, bound: int = 4) -> np.ndarray:
    """Exhaustive integer-weight separability oracle (n <= 3).

    Enumerates every weight/bias vector in {-bound..bound}^(n+1); each
    combination that avoids landing exactly on a vertex strictly
    separates the mask of its positive vertices.  Returns a boolean
    array over all 2^(2^n) masks.  Completely independent of the LP
    route: integer arithmetic, no solver.
    """
    if not 1 <= n <= 3:
        raise ValueError(f"integer oracle supports n <= 3, got {n}")
    m = 1 << n
    vertices = cube_vertices(n).astype(np.int64)
    axes = [np.arange(-bound, bound + 1, dtype=np.int64)] * (n + 1)
    combos = np.stack(np.meshgrid(*axes, indexing="ij")).reshape(n + 1, -1).T
    scores = combos[:, :n] @ vertices.T + combos[:, n:]
    strict = (scores != 0).all(axis=1)
    masks = (scores > 0).astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
    flags = np.zeros(1 << m, dtype=bool)
    flags[masks[strict]] = True
    return flags


def synthesize_nb(surface: LinearSurface) -> ClassifierModel:
    """Invert a cube hyperplane into a 2-class parent-free binary model.

    Observation j gets P(1 | class 0) = sigmoid(w_j / 2) and the mirror
    for class 1, which makes the weight difference exactly w_j; the
    prior ratio then absorbs whatever constant makes the extracted bias
    match.  Log-odds parameters beyond ±700 are clamped with a
    :class:`PriorOverflowWarning` (the reproduction guarantee degrades
    but probabilities stay positive).
    """
    if surface.space != "cube":
        raise ValueError("synthesis needs a cube-coordinate surface")
    w = np.asarray(surface.weights, dtype=np.float64)
    if not (np.all(np.isfinite(w)) and math.isfinite(surface.bias)):
        raise ValueError("surface coefficients must be finite")
    half = w / 2.0
    if np.any(np.abs(half) > LOG_ODDS_CLAMP):
        warnings.warn(
            "weight log-odds clamped to ±700; reproduction will be inexact",
            PriorOverflowWarning,
        )
        half = np.clip(half, -LOG_ODDS_CLAMP, LOG_ODDS_CLAMP)
    prior_log_ratio = surface.bias + float(half.sum())
    if abs(prior_log_ratio) > LOG_ODDS_CLAMP:
        warnings.warn(
            "prior log-odds clamped to ±700; reproduction will be inexact",
            PriorOverflowWarning,
        )
        prior_log_ratio = float(np.clip(prior_log_ratio, -LOG_ODDS_CLAMP, LOG_ODDS_CLAMP))
    priors = np.array([expit(prior_log_ratio), expit(-prior_log_ratio)])
    priors /= priors.sum()
    observations = []
    for h in half:
        # evaluate both tails directly so neither underflows to zero
        rows = np.array([[[expit(-h), expit(h)]], [[expit(h), expit(-h)]]])
        rows /= rows.sum(axis=2, keepdims=True)
        observations.append(ObservationSpec(arity=2, parents=(), cpt=rows))
    return ClassifierModel(priors=priors, observations=tuple(observations))


def seed_from_env() -> int | None:
    """RNG seed from ``NBGEOM_SEED`` (None when unset)."""
    raw = os.environ.get("NBGEOM_SEED")
    return int(raw) if raw else None
