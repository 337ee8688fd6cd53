"""Auxiliary digraphs, robust-expansion diagnostics, and exact walk checks.

The auxiliary digraph of a matching tuple puts symbols on the vertices:
u -> v when some column x carries an edge (u, x) unused by every row and
the designated row matches x to v.  Rebuilding a row of the tuple is a
walk in this digraph, so its degree spread and expansion are what make
the switch analysis work; this module measures those quantities exactly
at desk scale.

Walk distributions are exact rational vectors.  The mixing envelope
compares the t-step law against stationary with the contraction rate
derived from a sub-sampled power of the chain; see walk_distribution.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import MatchingTuple
from .errors import (
    DimensionMismatch,
    IncompleteTuple,
    IndexOutOfRange,
    NonPositiveTransitions,
    NotASubMatching,
    RowOutOfRange,
    SinkVertex,
    SizeGuardExceeded,
    TooLargeForExact,
)


@dataclass(frozen=True, eq=False)
class Digraph:
    """Dense irreflexive digraph with 1-based integer vertex labels."""

    labels: tuple[int, ...]
    adj: np.ndarray  # bool, adj[i, j] means labels[i] -> labels[j]

    def __post_init__(self):
        adj = np.asarray(self.adj, dtype=bool)
        object.__setattr__(self, "adj", adj)
        m = len(self.labels)
        if m < 1:
            raise DimensionMismatch("a digraph needs at least one vertex")
        if len(set(self.labels)) != m:
            raise DimensionMismatch("vertex labels must be distinct")
        if adj.shape != (m, m):
            raise DimensionMismatch(f"adjacency shape {adj.shape} for {m} labels")
        if adj.diagonal().any():
            raise DimensionMismatch("self-loops are not allowed")

    @classmethod
    def from_arcs(cls, labels: Iterable[int], arcs: Iterable[tuple[int, int]]) -> "Digraph":
        labels = tuple(labels)
        index = {u: i for i, u in enumerate(labels)}
        adj = np.zeros((len(labels), len(labels)), dtype=bool)
        for u, v in arcs:
            if u not in index or v not in index:
                raise IndexOutOfRange(f"arc ({u}, {v}) uses an unknown label")
            adj[index[u], index[v]] = True
        return cls(labels, adj)

    @property
    def order(self) -> int:
        return len(self.labels)

    def index_of(self, label: int) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise IndexOutOfRange(f"no vertex labeled {label}") from None

    def out_degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        return self.adj.sum(axis=0)

    def is_regular(self) -> bool:
        outs = self.out_degrees()
        return bool(outs.min() == outs.max() == self.in_degrees().min() == self.in_degrees().max())


def complete_digraph(n: int) -> Digraph:
    adj = ~np.eye(n, dtype=bool)
    return Digraph(tuple(range(1, n + 1)), adj)


def directed_cycle(n: int) -> Digraph:
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        adj[i, (i + 1) % n] = True
    return Digraph(tuple(range(1, n + 1)), adj)


@dataclass(frozen=True)
class ExpanderParams:
    """Parameter bundle for expansion and regularity checks."""

    nu: float
    tau: float
    delta: float
    f: float

    def __post_init__(self):
        for name in ("nu", "tau", "delta", "f"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise DimensionMismatch(f"{name} must lie in (0, 1], got {v}")
        if self.nu > self.tau:
            raise DimensionMismatch(f"need nu <= tau, got nu={self.nu}, tau={self.tau}")


def build_auxiliary_digraph(
    tup: MatchingTuple,
    row: int,
    excluded: Iterable[tuple[int, int]] = (),
) -> Digraph:
    """Digraph on the symbols a rebuild of one row may still visit.

    Vertices are the symbols not saturated by the excluded sub-matching.
    There is an arc u -> v when some column x outside the excluded
    columns has (u, x) unused by every matching and row `row` matches
    x to v.
    """
    if not (1 <= row <= tup.k):
        raise RowOutOfRange(f"row {row} outside 1..{tup.k}")
    if not tup.is_complete():
        raise IncompleteTuple("the tuple must be complete")
    excl = set((int(c), int(s)) for c, s in excluded)
    row_edges = set(tup.matchings[row - 1])
    if not excl <= row_edges:
        raise NotASubMatching(f"excluded edges {sorted(excl - row_edges)} are not in matching {row}")
    n = tup.n
    excl_cols = {c for c, _ in excl}
    excl_syms = {s for _, s in excl}
    labels = tuple(s for s in range(1, n + 1) if s not in excl_syms)
    used = [0] * (n + 1)  # used[s] has bit c set when (s, column c) lies in some matching
    for m in tup.matchings:
        for c, s in m:
            used[s] |= 1 << c
    sym_of_col = {c: s for c, s in tup.matchings[row - 1]}
    arcs = []
    for u in labels:
        for x in range(1, n + 1):
            if x in excl_cols or used[u] >> x & 1:
                continue
            v = sym_of_col[x]
            if v not in excl_syms:
                arcs.append((u, v))
    return Digraph.from_arcs(labels, arcs)


def robust_outneighborhood(d: Digraph, subset: Iterable[int], nu: float) -> frozenset[int]:
    """Vertices with at least nu*|V| in-neighbors inside the subset."""
    idx = [d.index_of(u) for u in set(subset)]
    if not idx:
        return frozenset()
    counts = d.adj[idx, :].sum(axis=0)
    return frozenset(d.labels[i] for i in np.flatnonzero(counts >= nu * d.order))


@dataclass(frozen=True)
class ExpanderVerdict:
    """Outcome of a robust-outexpansion check.

    A sampled-mode verdict with holds=True is not a proof; it only says
    no violating subset turned up within the sample budget.
    """

    holds: bool
    witness: tuple[int, ...] | None
    exhaustive: bool
    subsets_checked: int


def _expansion_violated(d: Digraph, members: Sequence[int], nu: float) -> bool:
    counts = d.adj[list(members), :].sum(axis=0)
    rn_size = int(np.count_nonzero(counts >= nu * d.order))
    return rn_size < len(members) + nu * d.order


def is_robust_outexpander(
    d: Digraph,
    nu: float,
    tau: float,
    *,
    mode: str = "exact",
    budget: int = 1000,
    rng: np.random.Generator | None = None,
) -> ExpanderVerdict:
    """Check RN(S) >= |S| + nu*n for every S with tau*n <= |S| <= (1-tau)*n.

    Exact mode enumerates the window (|V| <= 20); sampled mode draws
    `budget` subsets uniformly over the window sizes.
    """
    n = d.order
    sizes = [s for s in range(1, n + 1) if tau * n <= s <= (1 - tau) * n]
    if mode == "exact":
        if n > 20:
            raise TooLargeForExact(f"exhaustive subset check refused at |V| = {n} > 20")
        checked = 0
        for size in sizes:
            for members in itertools.combinations(range(n), size):
                checked += 1
                if _expansion_violated(d, members, nu):
                    witness = tuple(sorted(d.labels[i] for i in members))
                    return ExpanderVerdict(False, witness, True, checked)
        return ExpanderVerdict(True, None, True, checked)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if not sizes:
        return ExpanderVerdict(True, None, True, 0)
    rng = np.random.default_rng(0) if rng is None else rng
    for checked in range(1, budget + 1):
        size = sizes[int(rng.integers(len(sizes)))]
        members = rng.choice(n, size=size, replace=False)
        if _expansion_violated(d, members, nu):
            witness = tuple(sorted(d.labels[i] for i in members))
            return ExpanderVerdict(False, witness, False, checked)
    return ExpanderVerdict(True, None, False, budget)


def almost_regular_check(d: Digraph, delta: float, f: float) -> bool:
    """True iff all in/out degrees lie within (1 +- f) * delta * |V|."""
    lo = (1 - f) * delta * d.order
    hi = (1 + f) * delta * d.order
    degs = np.concatenate([d.out_degrees(), d.in_degrees()])
    return bool((degs >= lo).all() and (degs <= hi).all())


_PATH_GUARD_V = 16
_PATH_GUARD_L = 7


def _check_path_guard(order: int, length: int) -> None:
    if order > _PATH_GUARD_V and length > _PATH_GUARD_L:
        raise SizeGuardExceeded(
            f"simple-path search refused at |V| = {order}, length {length} "
            f"(need |V| <= {_PATH_GUARD_V} or length <= {_PATH_GUARD_L})"
        )


def count_paths(d: Digraph, u: int, v: int, length: int) -> int:
    """Exact number of simple directed u->v paths with `length` arcs."""
    if u == v:
        raise ValueError("endpoints must be distinct; use count_cycles_through")
    if length < 1:
        raise ValueError("length must be at least 1")
    _check_path_guard(d.order, length)
    ui, vi = d.index_of(u), d.index_of(v)
    out = [tuple(np.flatnonzero(row)) for row in d.adj]
    memo: dict[tuple[int, int, int], int] = {}

    def rec(cur: int, mask: int, r: int) -> int:
        key = (cur, mask, r)
        got = memo.get(key)
        if got is not None:
            return got
        total = 0
        for w in out[cur]:
            if w == vi:
                if r == 1:
                    total += 1
            elif r > 1 and not mask >> w & 1:
                total += rec(w, mask | 1 << w, r - 1)
        memo[key] = total
        return total

    return rec(ui, 1 << ui, length)


def count_cycles_through(d: Digraph, u: int, length: int) -> int:
    """Exact number of simple directed cycles of `length` arcs through u."""
    if length < 2:
        raise ValueError("a cycle needs at least 2 arcs")
    _check_path_guard(d.order, length)
    ui = d.index_of(u)
    out = [tuple(np.flatnonzero(row)) for row in d.adj]
    memo: dict[tuple[int, int, int], int] = {}

    def rec(cur: int, mask: int, r: int) -> int:
        if r == 0:
            return 1 if d.adj[cur, ui] else 0
        key = (cur, mask, r)
        got = memo.get(key)
        if got is not None:
            return got
        total = 0
        for w in out[cur]:
            if w != ui and not mask >> w & 1:
                total += rec(w, mask | 1 << w, r - 1)
        memo[key] = total
        return total

    return rec(ui, 1 << ui, length - 1)


def _transition_matrix(d: Digraph) -> list[list[Fraction]]:
    outs = d.out_degrees()
    if (outs == 0).any():
        bad = d.labels[int(np.flatnonzero(outs == 0)[0])]
        raise SinkVertex(f"vertex {bad} has no out-arcs")
    n = d.order
    return [
        [Fraction(int(d.adj[i, j]), int(outs[i])) for j in range(n)]
        for i in range(n)
    ]


def _mat_mul(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)] for i in range(n)]


def _mat_pow(p: list[list[Fraction]], e: int) -> list[list[Fraction]]:
    n = len(p)
    result = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    base = p
    while e:
        if e & 1:
            result = _mat_mul(result, base)
        base = _mat_mul(base, base)
        e >>= 1
    return result


def _exact_stationary(p: list[list[Fraction]]) -> tuple[Fraction, ...] | None:
    """Unique solution of sigma P = sigma, sum sigma = 1, or None."""
    n = len(p)
    # rows: (P^T - I) sigma = 0 plus the normalization row
    rows = [[p[j][i] - Fraction(int(i == j)) for j in range(n)] + [Fraction(0)] for i in range(n)]
    rows.append([Fraction(1)] * n + [Fraction(1)])
    pivots = []
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            return None  # free variable: stationary not unique
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    # leftover rows have zero coefficients; a nonzero RHS means inconsistent
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    sigma = tuple(rows[i][-1] for i in range(n))
    if any(x < 0 for x in sigma):
        return None
    return sigma


def subsample_power(nu: float) -> int:
    """Sub-sampling exponent for the mixing envelope.

    Start from ceil(2/nu) + 1 and clamp into [1/nu + 1, 2/nu]; when no
    integer lies in that window, fall back to the smallest exponent
    exceeding 1/nu.
    """
    if not 0 < nu <= 1:
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    lo = math.ceil(1 / nu + 1 - 1e-12)
    hi = math.floor(2 / nu + 1e-12)
    k = math.ceil(2 / nu) + 1
    if lo > hi:
        return max(2, math.ceil(1 / nu + 1e-12) + 1)
    return min(max(k, lo), hi)


@dataclass(frozen=True, eq=False)
class WalkReport:
    """Exact t-step law of the simple random walk plus mixing envelope data.

    alpha and beta are the extreme ratios Q(i, j) / sigma_j of the
    sub-sampled chain Q = P^subsample_power against stationary.  The
    envelope claim |p_t - sigma| <= (1 - alpha/2)^t * sigma kicks in
    once t >= threshold_t = 2 + (2/alpha) log beta; outside that regime,
    or when Q has zeros, envelope_ok is None and envelope_status says
    why.
    """

    t: int
    labels: tuple[int, ...]
    distribution: tuple
    stationary: tuple | None
    exact: bool
    alpha: object | None = None
    beta: object | None = None
    subsample_power: int | None = None
    threshold_t: float | None = None
    envelope_bound: object | None = None
    envelope_ok: bool | None = None
    envelope_status: str = "not requested"
    condition_estimate: float | None = None

    def __post_init__(self):
        if self.exact:
            if sum(self.distribution, Fraction(0)) != 1:
                raise DimensionMismatch("walk distribution must sum to 1")
            if any(x < 0 for x in self.distribution):
                raise DimensionMismatch("walk distribution must be nonnegative")

    def require_envelope(self) -> bool:
        """envelope_ok, raising instead of returning None."""
        if self.envelope_ok is None:
            if self.envelope_status == "skipped: sub-sampled chain has zero transitions":
                raise NonPositiveTransitions(self.envelope_status)
            raise ValueError(f"envelope not evaluated ({self.envelope_status})")
        return self.envelope_ok


_EXACT_WALK_LIMIT = 32


def walk_distribution(d: Digraph, start: int, t: int, nu: float | None = None) -> WalkReport:
    """Distribution of the simple random walk after t steps from start.

    Exact rationals up to 32 vertices, double precision beyond (with a
    condition estimate of the transition matrix).  Pass nu to evaluate
    the mixing envelope against the stationary distribution.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    si = d.index_of(start)
    n = d.order
    if n > _EXACT_WALK_LIMIT:
        outs = d.out_degrees().astype(float)
        if (outs == 0).any():
            raise SinkVertex("a vertex has no out-arcs")
        pf = d.adj.astype(float) / outs[:, None]
        dist = np.linalg.matrix_power(pf, t)[si]
        return WalkReport(
            t, d.labels, tuple(float(x) for x in dist), None, False,
            envelope_status="skipped: float mode has no exact envelope",
            condition_estimate=float(np.linalg.cond(pf)),
        )
    p = _transition_matrix(d)
    dist = list(_mat_pow(p, t)[si]) if t else [Fraction(int(i == si)) for i in range(n)]
    if nu is None:
        return WalkReport(t, d.labels, tuple(dist), _stationary_or_none(d, p), True)
    sigma = _stationary_or_none(d, p)
    if sigma is None:
        return WalkReport(
            t, d.labels, tuple(dist), None, True,
            envelope_status="skipped: stationary distribution not unique",
        )
    k = subsample_power(nu)
    q = _mat_pow(p, k)
    if any(q[i][j] == 0 for i in range(n) for j in range(n)):
        return WalkReport(
            t, d.labels, tuple(dist), sigma, True, subsample_power=k,
            envelope_status="skipped: sub-sampled chain has zero transitions",
        )
    ratios = [q[i][j] / sigma[j] for i in range(n) for j in range(n)]
    alpha, beta = min(ratios), max(ratios)
    threshold = 2 + 2 * math.log(float(beta)) / float(alpha)
    bound = (1 - alpha / 2) ** t
    if t < threshold:
        return WalkReport(
            t, d.labels, tuple(dist), sigma, True, alpha, beta, k, threshold, bound,
            envelope_status=f"skipped: t < threshold {threshold:.3f}",
        )
    ok = all(abs(dist[i] - sigma[i]) <= bound * sigma[i] for i in range(n))
    return WalkReport(
        t, d.labels, tuple(dist), sigma, True, alpha, beta, k, threshold, bound,
        envelope_ok=ok, envelope_status="evaluated",
    )


def _stationary_or_none(d: Digraph, p: list[list[Fraction]]) -> tuple[Fraction, ...] | None:
    if d.is_regular():
        return tuple(Fraction(1, d.order) for _ in range(d.order))
    return _exact_stationary(p)
