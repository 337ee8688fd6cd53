"""Compiled inner loop of the switch chain.

mcmc_batch runs one independent chain per retained sample: chain i seeds
a splitmix64 stream from the avalanche of (seed, i), replays burn_in
proposals from the common start state, and stores the final grid.
Symbols and columns are 0-based here; wrappers translate.

mcmc_batch_py is a bit-for-bit twin in pure Python.  It exists so tests
can pin the compiled kernel against an interpreter-only reference, and
it doubles as the fallback engine when n > 64 (the kernel keeps per
symbol column sets in single machine words).

Randomness comes from a bit pool refilled by splitmix64.  Draws in
[0, m) take ceil(log2 m) bits and reject values >= m, so every draw is
exactly uniform and the consumed bit count is reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

_MASK64 = (1 << 64) - 1
_GOLDEN_INT = 0x9E3779B97F4A7C15
GOLDEN = uint64(_GOLDEN_INT)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True)
def mcmc_batch(k, n, start, burn_in, n_samples, lmax, seed):
    out = np.empty((n_samples, k, n), dtype=np.uint8)
    sym_at = np.empty((k, n), dtype=np.int64)
    used = np.empty(n, dtype=np.uint64)
    path_c = np.empty(lmax, dtype=np.int64)
    path_s = np.empty(lmax + 1, dtype=np.int64)
    kb = 0
    while (1 << kb) < k:
        kb += 1
    nb = 0
    while (1 << nb) < n:
        nb += 1
    kmask = uint64((1 << kb) - 1)
    nmask = uint64((1 << nb) - 1)
    for smp in range(n_samples):
        # avalanche the chain id: without _mix64 here, chain i+1's word
        # stream is chain i's shifted by one word, and the coupled
        # chains produce correlated samples
        state = _mix64(uint64(seed) + (uint64(smp) + uint64(1)) * GOLDEN)
        pool = uint64(0)
        nbits = 0
        for j in range(k):
            for c in range(n):
                sym_at[j, c] = start[j, c]
        for s in range(n):
            used[s] = uint64(0)
        for j in range(k):
            for c in range(n):
                used[sym_at[j, c]] |= uint64(1) << uint64(c)
        for _ in range(burn_in):
            # row of the proposal
            while True:
                if nbits < kb:
                    state += GOLDEN
                    pool = _mix64(state)
                    nbits = 64
                j = int64(pool & kmask)
                pool >>= uint64(kb)
                nbits -= kb
                if j < k:
                    break
            # start edge, uniform over pairs unused by every row
            while True:
                if nbits < nb:
                    state += GOLDEN
                    pool = _mix64(state)
                    nbits = 64
                s0 = int64(pool & nmask)
                pool >>= uint64(nb)
                nbits -= nb
                if s0 >= n:
                    continue
                if nbits < nb:
                    state += GOLDEN
                    pool = _mix64(state)
                    nbits = 64
                c0 = int64(pool & nmask)
                pool >>= uint64(nb)
                nbits -= nb
                if c0 >= n:
                    continue
                if (used[s0] >> uint64(c0)) & uint64(1) == uint64(0):
                    break
            visited = uint64(1) << uint64(s0)
            path_s[0] = s0
            path_c[0] = c0
            c = c0
            ell = 1
            ok = False
            # alternate matched edge (in row j) / fresh unused edge until
            # the trace returns to s0; reject self-intersections and
            # traces longer than lmax half-steps (lazy chain)
            while True:
                s2 = sym_at[j, c]
                if s2 == s0:
                    ok = True
                    break
                if (visited >> uint64(s2)) & uint64(1):
                    break
                if ell >= lmax:
                    break
                visited |= uint64(1) << uint64(s2)
                path_s[ell] = s2
                while True:
                    if nbits < nb:
                        state += GOLDEN
                        pool = _mix64(state)
                        nbits = 64
                    c = int64(pool & nmask)
                    pool >>= uint64(nb)
                    nbits -= nb
                    if c < n and (used[s2] >> uint64(c)) & uint64(1) == uint64(0):
                        break
                path_c[ell] = c
                ell += 1
            if ok:
                for t in range(ell):
                    ct = path_c[t]
                    st = path_s[t]
                    snext = path_s[t + 1] if t + 1 < ell else s0
                    sym_at[j, ct] = st
                    used[st] |= uint64(1) << uint64(ct)
                    used[snext] &= ~(uint64(1) << uint64(ct))
        for j in range(k):
            for c in range(n):
                out[smp, j, c] = sym_at[j, c]
    return out


def _mix64_py(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mcmc_batch_py(k, n, start, burn_in, n_samples, lmax, seed):
    """Pure-Python twin of mcmc_batch; consumes the identical bit stream."""
    out = np.empty((n_samples, k, n), dtype=np.uint8)
    kb = 0
    while (1 << kb) < k:
        kb += 1
    nb = 0
    while (1 << nb) < n:
        nb += 1
    kmask = (1 << kb) - 1
    nmask = (1 << nb) - 1
    path_c = [0] * lmax
    path_s = [0] * (lmax + 1)
    for smp in range(n_samples):
        state = _mix64_py((seed + (smp + 1) * _GOLDEN_INT) & _MASK64)
        pool = 0
        nbits = 0

        def draw(bits: int, mask: int) -> int:
            nonlocal state, pool, nbits
            if nbits < bits:
                state = (state + _GOLDEN_INT) & _MASK64
                pool = _mix64_py(state)
                nbits = 64
            v = pool & mask
            pool >>= bits
            nbits -= bits
            return v

        sym_at = [[int(start[j][c]) for c in range(n)] for j in range(k)]
        used = [0] * n
        for j in range(k):
            for c in range(n):
                used[sym_at[j][c]] |= 1 << c
        for _ in range(burn_in):
            while True:
                j = draw(kb, kmask)
                if j < k:
                    break
            while True:
                s0 = draw(nb, nmask)
                if s0 >= n:
                    continue
                c0 = draw(nb, nmask)
                if c0 >= n:
                    continue
                if not used[s0] >> c0 & 1:
                    break
            visited = 1 << s0
            path_s[0] = s0
            path_c[0] = c0
            c = c0
            ell = 1
            ok = False
            while True:
                s2 = sym_at[j][c]
                if s2 == s0:
                    ok = True
                    break
                if visited >> s2 & 1:
                    break
                if ell >= lmax:
                    break
                visited |= 1 << s2
                path_s[ell] = s2
                while True:
                    c = draw(nb, nmask)
                    if c < n and not used[s2] >> c & 1:
                        break
                path_c[ell] = c
                ell += 1
            if ok:
                for t in range(ell):
                    ct = path_c[t]
                    st = path_s[t]
                    snext = path_s[t + 1] if t + 1 < ell else s0
                    sym_at[j][ct] = st
                    used[st] |= 1 << ct
                    used[snext] &= ~(1 << ct)
        for j in range(k):
            for c in range(n):
                out[smp, j, c] = sym_at[j][c]
    return out
