"""Uniform random rectangles: exact methods and the lazy switch chain.

Exact sampling either indexes the full enumeration or fills cells one
at a time with probabilities proportional to completion counts; both
are exactly uniform and need the census guard.

The switch chain walks on complete matching tuples.  A proposal picks a
uniform row j and a uniform edge unused by every row, then alternates
forced row-j edges with uniformly drawn unused edges until the trace
closes into a cycle; self-intersecting or overlong traces are rejected
(lazy chain).  Tracing a cycle has the same probability from either
orientation of the flip, so the proposal is symmetric and the chain is
uniform on each connected component of its move graph.  Uniformity over
the whole space is validated empirically, not proved.

Batch sampling runs one independent chain per retained sample through
the compiled kernel; single-sample calls run an interpreted chain
driven by a numpy Generator.  The two engines draw from different
streams, so for a fixed seed they give different (equally valid)
samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
import scipy.stats

from . import census
from .core import LatinRectangle, MatchingTuple, PartialLatinRectangle, from_matchings
from .errors import DimensionMismatch, EmptyMoveSet, IncompleteTuple, InvalidConfig

SAMPLER_METHODS = ("exact-enumeration", "exact-counted-extension", "switch-mcmc")


def default_burn_in(k: int, n: int) -> int:
    """Heuristic chain length 100*k*n*log(n); no mixing guarantee intended."""
    return math.ceil(100 * k * n * math.log(n)) if n > 1 else 0


@dataclass(frozen=True)
class SamplerConfig:
    """How to draw rectangles.  burn_in and max_cycle_half_length of None
    mean the size-dependent defaults (heuristic burn-in, half-length n)."""

    method: str = "switch-mcmc"
    burn_in: int | None = None
    seed: int = 0
    max_cycle_half_length: int | None = None

    def __post_init__(self):
        if self.method not in SAMPLER_METHODS:
            raise InvalidConfig(f"unknown method {self.method!r}; choose from {SAMPLER_METHODS}")
        if self.burn_in is not None and self.burn_in < 0:
            raise InvalidConfig(f"burn_in must be nonnegative, got {self.burn_in}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must fit in 64 bits")
        if self.max_cycle_half_length is not None and self.max_cycle_half_length < 2:
            raise InvalidConfig("a switch cycle has half-length at least 2")

    def resolved_burn_in(self, k: int, n: int) -> int:
        return self.burn_in if self.burn_in is not None else default_burn_in(k, n)

    def resolved_half_length(self, n: int) -> int:
        return self.max_cycle_half_length if self.max_cycle_half_length is not None else max(2, n)


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def spawn_generators(seed: int, count: int) -> list[np.random.Generator]:
    """Independent streams for concurrent samplers (one per worker)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _sample_counted_extension(k: int, n: int, rng: np.random.Generator, guard_override: bool) -> LatinRectangle:
    grid, rowm, colm, empties = census._prepare(PartialLatinRectangle.empty(k, n))
    remaining = census.count_rectangles(k, n, guard_override=guard_override)
    full = (1 << (n + 1)) - 2
    for t, (i, j) in enumerate(empties):
        r = int(rng.integers(remaining))
        acc = 0
        cand = full & ~rowm[i] & ~colm[j]
        while cand:
            b = cand & -cand
            cand ^= b
            rowm[i] |= b
            colm[j] |= b
            c = census._count_completions(n, rowm, colm, empties[t + 1:])
            if r < acc + c:
                grid[i][j] = b.bit_length() - 1
                remaining = c
                break
            acc += c
            rowm[i] ^= b
            colm[j] ^= b
        else:
            raise AssertionError("candidate counts failed to cover the draw")
    return LatinRectangle.from_grid(grid)


def sample_exact(
    k: int,
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    method: str = "exact-enumeration",
    guard_override: bool = False,
) -> LatinRectangle:
    """One exactly uniform rectangle.  Needs the census guard envelope."""
    rng = as_generator(rng)
    if method == "exact-enumeration":
        arr = census.enumeration_array(k, n, guard_override=guard_override)
        idx = int(rng.integers(len(arr)))
        return LatinRectangle.from_grid([[int(v) for v in row] for row in arr[idx]])
    if method == "exact-counted-extension":
        return _sample_counted_extension(k, n, rng, guard_override)
    raise InvalidConfig(f"sample_exact knows exact methods only, not {method!r}")


@dataclass(frozen=True)
class ExactSampler:
    """Batch adapter over sample_exact; callable as sampler(count, rng)."""

    k: int
    n: int
    method: str = "exact-enumeration"
    guard_override: bool = False

    def __call__(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.method == "exact-enumeration":
            arr = census.enumeration_array(self.k, self.n, guard_override=self.guard_override)
            idx = rng.integers(len(arr), size=count)
            return arr[idx]
        rows = [
            sample_exact(self.k, self.n, rng, method=self.method, guard_override=self.guard_override).cells
            for _ in range(count)
        ]
        return np.array(rows, dtype=np.uint8)


def _state_arrays(rect: LatinRectangle) -> tuple[list[list[int]], list[int]]:
    """0-based symbol grid plus per-symbol used-column bitmasks."""
    sym_at = [[s - 1 for s in row] for row in rect.cells]
    used = [0] * rect.n
    for row in sym_at:
        for c, s in enumerate(row):
            used[s] |= 1 << c
    return sym_at, used


def _propose_and_flip(
    sym_at: list[list[int]],
    used: list[int],
    k: int,
    n: int,
    lmax: int,
    rng: np.random.Generator,
) -> bool:
    """One lazy switch proposal, applied in place.  True if the state moved."""
    if k == n:
        return False
    j = int(rng.integers(k))
    while True:
        s0 = int(rng.integers(n))
        c0 = int(rng.integers(n))
        if not used[s0] >> c0 & 1:
            break
    visited = 1 << s0
    path_s = [s0]
    path_c = [c0]
    c = c0
    while True:
        s2 = sym_at[j][c]
        if s2 == s0:
            break
        if visited >> s2 & 1 or len(path_c) >= lmax:
            return False
        visited |= 1 << s2
        path_s.append(s2)
        while True:
            c = int(rng.integers(n))
            if not used[s2] >> c & 1:
                break
        path_c.append(c)
    for t, ct in enumerate(path_c):
        st = path_s[t]
        snext = path_s[t + 1] if t + 1 < len(path_s) else s0
        sym_at[j][ct] = st
        used[st] |= 1 << ct
        used[snext] &= ~(1 << ct)
    return True


def random_switch_step(
    tup: MatchingTuple,
    rng: np.random.Generator | int | None,
    max_cycle_half_length: int | None = None,
) -> MatchingTuple:
    """One lazy switch step on a complete tuple.

    Returns the flipped tuple, or tup itself when the proposal was
    rejected (or k = n, where no unused edges exist).  The result is
    revalidated on construction, so every step is structure-checked.
    """
    if not tup.is_complete():
        raise IncompleteTuple("the switch chain walks on complete tuples")
    if tup.k == tup.n:
        return tup
    rng = as_generator(rng)
    lmax = max_cycle_half_length if max_cycle_half_length is not None else max(2, tup.n)
    if lmax < 2:
        raise InvalidConfig("a switch cycle has half-length at least 2")
    sym_at, used = _state_arrays(from_matchings(tup))
    if not _propose_and_flip(sym_at, used, tup.k, tup.n, lmax, rng):
        return tup
    ms = tuple(tuple((c + 1, s + 1) for c, s in enumerate(row)) for row in sym_at)
    return MatchingTuple(tup.k, tup.n, ms)


def chain_start(k: int, n: int) -> LatinRectangle:
    """Deterministic start state: the first completion of the empty grid."""
    rect = census.complete_partial(PartialLatinRectangle.empty(k, n))
    if rect is None:
        raise DimensionMismatch(f"no {k} x {n} rectangle exists")
    return rect


def sample_mcmc(
    k: int,
    n: int,
    config: SamplerConfig | None = None,
    rng: np.random.Generator | int | None = None,
    *,
    allow_square: bool = False,
) -> LatinRectangle:
    """One draw from the lazy switch chain after config-resolved burn-in.

    The default rng is seeded from config.seed.  k = n is rejected
    because the move set is empty; with allow_square=True the start
    state is returned unchanged instead.
    """
    config = config or SamplerConfig()
    if config.method != "switch-mcmc":
        raise InvalidConfig(f"sample_mcmc requires the switch-mcmc method, not {config.method!r}")
    if k == n and not allow_square:
        raise EmptyMoveSet(f"k = n = {n}: no unused edges, the chain cannot move")
    rng = as_generator(config.seed if rng is None else rng)
    start = chain_start(k, n)
    sym_at, used = _state_arrays(start)
    lmax = config.resolved_half_length(n)
    for _ in range(config.resolved_burn_in(k, n)):
        _propose_and_flip(sym_at, used, k, n, lmax, rng)
    return LatinRectangle.from_grid([[s + 1 for s in row] for row in sym_at])


def sample_mcmc_batch(
    k: int,
    n: int,
    count: int,
    config: SamplerConfig | None = None,
    *,
    allow_square: bool = False,
    engine: str = "auto",
) -> np.ndarray:
    """count independent chain draws as a (count, k, n) uint8 array (1-based).

    Each sample replays its own burn_in-step chain from the common start
    on a stream derived from (config.seed, sample index).  engine
    selects the compiled kernel or its pure-Python twin; auto prefers
    the kernel whenever n <= 64.
    """
    config = config or SamplerConfig()
    if config.method != "switch-mcmc":
        raise InvalidConfig(f"sample_mcmc_batch requires the switch-mcmc method, not {config.method!r}")
    if k == n and not allow_square:
        raise EmptyMoveSet(f"k = n = {n}: no unused edges, the chain cannot move")
    start = np.array(chain_start(k, n).cells, dtype=np.uint8) - 1
    if k == n:
        return np.broadcast_to(start + 1, (count, k, n)).copy()
    burn_in = config.resolved_burn_in(k, n)
    lmax = config.resolved_half_length(n)
    from . import _mcmc_kernel

    if engine == "auto":
        engine = "compiled" if n <= 64 else "python"
    if engine == "compiled":
        if n > 64:
            raise InvalidConfig("the compiled kernel packs columns into 64-bit words; use engine='python'")
        out = _mcmc_kernel.mcmc_batch(k, n, start, burn_in, count, lmax, config.seed & (2**64 - 1))
    elif engine == "python":
        out = _mcmc_kernel.mcmc_batch_py(k, n, start, burn_in, count, lmax, config.seed & (2**64 - 1))
    else:
        raise InvalidConfig(f"unknown engine {engine!r}")
    return out + 1


@dataclass(frozen=True)
class SwitchChainSampler:
    """Batch adapter for the switch chain; callable as sampler(count, rng).

    Each call derives a fresh 64-bit kernel seed from the supplied
    generator, so repeated calls give independent batches while staying
    reproducible for a seeded generator.
    """

    k: int
    n: int
    config: SamplerConfig = SamplerConfig()
    engine: str = "auto"

    def __call__(self, count: int, rng: np.random.Generator) -> np.ndarray:
        seed = int(rng.integers(2**63))
        cfg = SamplerConfig(
            method="switch-mcmc",
            burn_in=self.config.resolved_burn_in(self.k, self.n),
            seed=seed,
            max_cycle_half_length=self.config.max_cycle_half_length,
        )
        return sample_mcmc_batch(self.k, self.n, count, cfg, engine=self.engine)


@dataclass(frozen=True, eq=False)
class UniformityReport:
    """Chi-square goodness of fit of sampled grids against the uniform
    distribution on the enumerated support."""

    statistic: float
    p_value: float
    df: int
    support: int
    samples: int
    counts: np.ndarray


Sampler = Callable[[int, np.random.Generator], "np.ndarray | Iterable[LatinRectangle]"]


def uniformity_test(
    sampler: Sampler,
    k: int,
    n: int,
    samples: int,
    rng: np.random.Generator | int | None = None,
    *,
    guard_override: bool = False,
) -> UniformityReport:
    """Bin sampler output over the exact support and chi-square it.

    sampler(count, rng) must return a (count, k, n) array with symbols
    1..n, or an iterable of rectangles.  Any sample outside the
    enumerated support raises ValueError.
    """
    if samples < 1:
        raise InvalidConfig("need at least one sample")
    rng = as_generator(rng)
    codes = census.enumeration_codes(k, n, guard_override=guard_override)
    drawn = sampler(samples, rng)
    if not isinstance(drawn, np.ndarray):
        drawn = np.array([r.cells for r in drawn], dtype=np.uint8)
    if drawn.shape != (samples, k, n):
        raise DimensionMismatch(f"sampler returned shape {drawn.shape}, expected {(samples, k, n)}")
    sample_codes = census.encode_grids(drawn)
    idx = np.searchsorted(codes, sample_codes)
    idx_clipped = np.minimum(idx, len(codes) - 1)
    if not (codes[idx_clipped] == sample_codes).all():
        raise ValueError("a sample falls outside the enumerated support")
    counts = np.bincount(idx_clipped, minlength=len(codes))
    statistic, p_value = scipy.stats.chisquare(counts)
    return UniformityReport(float(statistic), float(p_value), len(codes) - 1, len(codes), samples, counts)
