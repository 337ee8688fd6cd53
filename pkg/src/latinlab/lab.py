"""Experiment drivers that combine censuses, samplers, and subsquare counts.

Asymptotic reference windows (containment probabilities, expected
subsquare counts, switching ratios) are always attached as reports and
never asserted: the formulas hold for large n, and this laboratory runs
at desk scale.  Exact rational ground truth is attached whenever the
census guard allows computing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.stats

from . import census, sampler as _sampler, subsquares
from .core import LatinRectangle, MatchingTuple, PartialLatinRectangle, restrict_rows
from .errors import (
    DegenerateB,
    DimensionMismatch,
    EdgeMeetsMatching,
    InvalidConfig,
    OrderOutOfRange,
    SizeGuardExceeded,
)

Z95 = float(scipy.stats.norm.ppf(0.975))

ASYMPTOTIC_NOTE = "asymptotic reference, report only"


def wilson_interval(hits: int, samples: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; stable near 0 and 1, unlike the Wald interval."""
    if not 0 <= hits <= samples or samples < 1:
        raise InvalidConfig(f"need 0 <= hits <= samples, got {hits}/{samples}")
    p = hits / samples
    z2 = z * z
    denom = 1 + z2 / samples
    center = (p + z2 / (2 * samples)) / denom
    half = z * math.sqrt(p * (1 - p) / samples + z2 / (4 * samples * samples)) / denom
    # at the boundary the score bound meets the endpoint exactly
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == samples else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo containment estimate with Wilson CI and reference window.

    reference_low/high are ((1 +- eps)/n)^fill, the asymptotic window
    for the containment probability of a sparse pattern; they are
    reported, not asserted.  exact_probability is attached when the
    census guard allows computing it.
    """

    hits: int
    samples: int
    n: int
    pattern_fill: int
    epsilon: float
    method: str
    seed: str
    ci_low: float
    ci_high: float
    reference_low: float
    reference_high: float
    exact_probability: Fraction | None = None

    def __post_init__(self):
        if not 0 <= self.hits <= self.samples:
            raise InvalidConfig(f"need 0 <= hits <= samples, got {self.hits}/{self.samples}")
        if not self.ci_low <= self.estimate <= self.ci_high:
            raise InvalidConfig("Wilson interval must contain the point estimate")

    @property
    def estimate(self) -> float:
        return self.hits / self.samples

    @property
    def ci_covers_exact(self) -> bool | None:
        if self.exact_probability is None:
            return None
        return self.ci_low <= self.exact_probability <= self.ci_high

    @property
    def ci_intersects_reference(self) -> bool:
        return self.ci_low <= self.reference_high and self.reference_low <= self.ci_high

    def merge(self, other: "EstimateReport") -> "EstimateReport":
        """Pool two independent runs; exact on hits/samples, CI recomputed."""
        if (self.n, self.pattern_fill, self.epsilon, self.method) != (
            other.n,
            other.pattern_fill,
            other.epsilon,
            other.method,
        ):
            raise DimensionMismatch("reports describe different experiments")
        hits = self.hits + other.hits
        samples = self.samples + other.samples
        lo, hi = wilson_interval(hits, samples)
        exact = self.exact_probability if self.exact_probability == other.exact_probability else None
        return EstimateReport(
            hits, samples, self.n, self.pattern_fill, self.epsilon, self.method,
            f"{self.seed}+{other.seed}", lo, hi, self.reference_low, self.reference_high, exact,
        )


def _build_report(
    hits: int,
    samples: int,
    pattern: PartialLatinRectangle,
    epsilon: float,
    method: str,
    seed: str,
    exact: Fraction | None,
) -> EstimateReport:
    fill = pattern.fill_count
    lo, hi = wilson_interval(hits, samples)
    ref_lo = ((1 - epsilon) / pattern.n) ** fill
    ref_hi = ((1 + epsilon) / pattern.n) ** fill
    return EstimateReport(hits, samples, pattern.n, fill, epsilon, method, seed, lo, hi, ref_lo, ref_hi, exact)


def containment_mask(batch: np.ndarray, pattern: PartialLatinRectangle) -> np.ndarray:
    """Boolean mask of which grids in a (m, k, n) batch contain the pattern."""
    mask = np.ones(len(batch), dtype=bool)
    for i, j, s in pattern.entries():
        mask &= batch[:, i - 1, j - 1] == s
    return mask


def estimate_containment(
    pattern: PartialLatinRectangle,
    config: _sampler.SamplerConfig,
    samples: int,
    epsilon: float = 0.1,
    rng: np.random.Generator | None = None,
    *,
    guard_override: bool = False,
    attach_exact: bool = True,
) -> EstimateReport:
    """Estimate P(L contains pattern) under the configured sampler."""
    if samples < 1:
        raise InvalidConfig("need at least one sample")
    k, n = pattern.k, pattern.n
    seed_tag = str(config.seed) if rng is None else "external"
    rng = _sampler.as_generator(config.seed if rng is None else rng)
    if config.method == "exact-enumeration":
        batch = _sampler.ExactSampler(k, n, guard_override=guard_override)(samples, rng)
    elif config.method == "switch-mcmc":
        seed = int(rng.integers(2**63)) if seed_tag == "external" else config.seed
        cfg = _sampler.SamplerConfig("switch-mcmc", config.burn_in, seed, config.max_cycle_half_length)
        batch = _sampler.sample_mcmc_batch(k, n, samples, cfg)
    elif config.method == "exact-counted-extension":
        batch = _sampler.ExactSampler(k, n, method=config.method, guard_override=guard_override)(samples, rng)
    else:
        raise InvalidConfig(f"unknown method {config.method!r}")
    hits = int(containment_mask(batch, pattern).sum())
    exact = None
    if attach_exact:
        try:
            exact = census.exact_containment_probability(pattern, guard_override=guard_override)
        except SizeGuardExceeded:
            exact = None
    return _build_report(hits, samples, pattern, epsilon, config.method, seed_tag, exact)


@dataclass(frozen=True)
class RestrictionIdentityReport:
    """Both sides of the expected-subsquare restriction identity, exactly."""

    n: int
    m: int
    k: int
    mean_full: Fraction
    mean_restricted: Fraction
    lhs: Fraction
    rhs: Fraction
    equal: bool


def verify_restriction_identity(n: int, m: int, k: int, *, guard_override: bool = False) -> RestrictionIdentityReport:
    """Check E[SS_m(Q)] C(n-m, k-m) = E[SS_m(Q|first k rows)] C(n, k).

    Q ranges uniformly over all order-n squares; both expectations run
    over the same full enumeration, so the verdict is exact.
    """
    if not 1 <= m <= k <= n:
        raise OrderOutOfRange(f"need 1 <= m <= k <= n, got m={m}, k={k}, n={n}")
    total = 0
    sum_full = 0
    sum_restricted = 0
    for square in census.enumerate_rectangles(n, n, guard_override=guard_override):
        total += 1
        sum_full += subsquares.count_subsquares(square, m)
        sum_restricted += subsquares.count_subsquares(restrict_rows(square, range(1, k + 1)), m)
    mean_full = Fraction(sum_full, total)
    mean_restricted = Fraction(sum_restricted, total)
    lhs = mean_full * math.comb(n - m, k - m)
    rhs = mean_restricted * math.comb(n, k)
    return RestrictionIdentityReport(n, m, k, mean_full, mean_restricted, lhs, rhs, lhs == rhs)


@dataclass(frozen=True)
class SweepRow:
    """One probe of the switch-class partition: tuple index, probe edge,
    row, the class sizes, and the ratio (n-k)|A_row|/|B| when defined."""

    tuple_index: int
    edge: tuple[int, int]
    row: int
    a_size: int
    b: int
    total: int
    ratio: Fraction | None
    note: str = ""


@dataclass(frozen=True)
class SweepTable:
    k: int
    n: int
    sparsity: int
    rows: tuple[SweepRow, ...]
    ratio_min: Fraction | None
    ratio_max: Fraction | None
    ratio_mean: Fraction | None
    note: str = ASYMPTOTIC_NOTE


def _random_sparse_tuple(k: int, n: int, sparsity: int, rng: np.random.Generator) -> MatchingTuple:
    """A random partial tuple whose grid stays at most `sparsity`-sparse."""
    grid = [[0] * n for _ in range(k)]
    row_load = [0] * k
    col_load = [0] * n
    sym_load = [0] * n
    row_used = [0] * k
    col_used = [0] * n
    cells = [(i, j) for i in range(k) for j in range(n)]
    rng.shuffle(cells)
    for i, j in cells:
        if row_load[i] >= sparsity or col_load[j] >= sparsity or rng.random() < 0.5:
            continue
        options = [
            s for s in range(1, n + 1)
            if sym_load[s - 1] < sparsity and not row_used[i] >> s & 1 and not col_used[j] >> s & 1
        ]
        if not options:
            continue
        s = options[int(rng.integers(len(options)))]
        grid[i][j] = s
        row_load[i] += 1
        col_load[j] += 1
        sym_load[s - 1] += 1
        row_used[i] |= 1 << s
        col_used[j] |= 1 << s
    partial = PartialLatinRectangle.from_grid(grid)
    maps = [{j + 1: row[j] for j in range(n) if row[j]} for row in partial.cells]
    return MatchingTuple.from_maps(n, maps)


def switching_ratio_sweep(
    k: int,
    n: int,
    sparsity: int = 1,
    *,
    tuples: int = 5,
    seed: int = 0,
    guard_override: bool = False,
) -> SweepTable:
    """Tabulate (n-k)|A_j|/|B| over sampled sparse tuples and probe edges.

    The family always starts with the empty tuple.  Edges already in a
    tuple are skipped; rows whose matching touches the probe edge, and
    probes with |B| = 0, get a note instead of a ratio.
    """
    rng = np.random.default_rng(seed)
    family = [MatchingTuple(k, n, tuple(() for _ in range(k)))]
    for _ in range(max(0, tuples - 1)):
        family.append(_random_sparse_tuple(k, n, sparsity, rng))
    rows: list[SweepRow] = []
    for t_index, tup in enumerate(family):
        taken = tup.edges()
        for c in range(1, n + 1):
            for s in range(1, n + 1):
                if (c, s) in taken:
                    continue
                classes = census.switch_classes(tup, (c, s), guard_override=guard_override)
                for j in range(1, k + 1):
                    a_j = classes.a_sizes[j - 1]
                    try:
                        ratio = census.switching_ratio(tup, (c, s), j, classes=classes)
                        note = ""
                    except EdgeMeetsMatching:
                        ratio, note = None, "edge meets matching"
                    except DegenerateB:
                        ratio, note = None, "class B empty"
                    rows.append(SweepRow(t_index, (c, s), j, a_j, classes.b, classes.total, ratio, note))
    ratios = [r.ratio for r in rows if r.ratio is not None]
    if ratios:
        mean = sum(ratios, Fraction(0)) / len(ratios)
        table = SweepTable(k, n, sparsity, tuple(rows), min(ratios), max(ratios), mean)
    else:
        table = SweepTable(k, n, sparsity, tuple(rows), None, None, None)
    return table


@dataclass(frozen=True)
class ExpectationReport:
    """Mean subsquare count against the asymptotic expectation window."""

    n: int
    k: int
    m: int
    method: str
    samples: int
    mean: float
    ci_low: float | None
    ci_high: float | None
    exact_mean: Fraction | None
    window_low: float
    window_high: float
    epsilon: float
    smallest_covering_epsilon: float | None
    note: str = ASYMPTOTIC_NOTE


def smallest_covering_epsilon(n: int, k: int, m: int, mean: Fraction | float) -> float | None:
    """Smallest eps >= 0 whose expectation window contains the given mean."""
    if m not in subsquares.LATIN_SQUARE_COUNTS:
        return None
    base = Fraction(math.comb(n, m) ** 2 * math.comb(k, m) * subsquares.LATIN_SQUARE_COUNTS[m], n ** (m * m))
    if base == 0 or mean < 0:
        return None
    x = float(mean) / float(base)
    if x == 0:
        return None  # a zero mean needs eps = 1, where the window floor is 0
    root = x ** (1 / (m * m))
    return abs(root - 1)


def subsquare_expectation_experiment(
    n: int,
    k: int,
    m: int,
    samples: int = 0,
    method: str = "exact",
    *,
    epsilon: float = 0.1,
    seed: int = 0,
    burn_in: int | None = None,
    guard_override: bool = False,
) -> ExpectationReport:
    """Mean SS_m over k x n rectangles, exactly or by sampling.

    method "exact" averages over the full enumeration; the sampling
    methods draw `samples` rectangles and report a normal-approximation
    95% CI alongside the exact mean when the guard allows it.
    """
    if not 1 <= m <= min(k, n):
        raise OrderOutOfRange(f"order {m} outside 1..{min(k, n)}")
    window = subsquares.expectation_window(n, k, m, epsilon)
    if method == "exact":
        total = 0
        count = 0
        for rect in census.enumerate_rectangles(k, n, guard_override=guard_override):
            total += subsquares.count_subsquares(rect, m)
            count += 1
        exact_mean = Fraction(total, count)
        return ExpectationReport(
            n, k, m, method, count, float(exact_mean), None, None, exact_mean,
            window[0], window[1], epsilon, smallest_covering_epsilon(n, k, m, exact_mean),
        )
    if samples < 2:
        raise InvalidConfig("sampling methods need at least 2 samples")
    rng = np.random.default_rng(seed)
    if method == "exact-enumeration":
        batch = _sampler.ExactSampler(k, n, guard_override=guard_override)(samples, rng)
    elif method == "switch-mcmc":
        cfg = _sampler.SamplerConfig("switch-mcmc", burn_in, seed)
        batch = _sampler.sample_mcmc_batch(k, n, samples, cfg)
    else:
        raise InvalidConfig(f"unknown method {method!r}")
    values = np.array(
        [subsquares.count_subsquares(LatinRectangle.from_grid([[int(v) for v in row] for row in g]), m) for g in batch],
        dtype=float,
    )
    mean = float(values.mean())
    half = Z95 * float(values.std(ddof=1)) / math.sqrt(samples)
    exact_mean = None
    try:
        exact_total = 0
        exact_count = 0
        for rect in census.enumerate_rectangles(k, n, guard_override=guard_override):
            exact_total += subsquares.count_subsquares(rect, m)
            exact_count += 1
        exact_mean = Fraction(exact_total, exact_count)
    except SizeGuardExceeded:
        exact_mean = None
    return ExpectationReport(
        n, k, m, method, samples, mean, mean - half, mean + half, exact_mean,
        window[0], window[1], epsilon, smallest_covering_epsilon(n, k, m, mean),
    )
