import math

import numpy as np
import pytest

from latinlab import MatchingTuple, census, from_matchings, to_matchings
from latinlab import sampler as smp
from latinlab.errors import EmptyMoveSet, IncompleteTuple, InvalidConfig
from latinlab._mcmc_kernel import mcmc_batch, mcmc_batch_py


def grids_valid(batch, k, n):
    for g in batch:
        rows = [[int(v) for v in row] for row in g]
        from latinlab import LatinRectangle

        LatinRectangle.from_grid(rows)  # raises on any violation


def start_grid(k, n):
    rect = smp.chain_start(k, n)
    g = np.array(rect.to_grid(), dtype=np.uint8) - 1
    return g


@pytest.mark.parametrize(
    "k,n,burn,count,seed",
    [(2, 4, 0, 3, 1), (2, 4, 57, 6, 9), (3, 5, 200, 4, 123), (2, 6, 101, 5, 2**40 + 7)],
)
def test_kernel_matches_python_twin(k, n, burn, count, seed):
    lmax = max(2, n)
    a = mcmc_batch(k, n, start_grid(k, n), burn, count, lmax, seed)
    b = mcmc_batch_py(k, n, start_grid(k, n), burn, count, lmax, seed)
    assert np.array_equal(a, b)


def test_batch_engines_agree():
    cfg = smp.SamplerConfig("switch-mcmc", burn_in=80, seed=5)
    a = smp.sample_mcmc_batch(2, 5, 7, cfg, engine="compiled")
    b = smp.sample_mcmc_batch(2, 5, 7, cfg, engine="python")
    assert np.array_equal(a, b)
    grids_valid(a, 2, 5)


def test_zero_burn_in_returns_start():
    cfg = smp.SamplerConfig("switch-mcmc", burn_in=0, seed=3)
    batch = smp.sample_mcmc_batch(2, 4, 4, cfg)
    start = smp.chain_start(2, 4).to_grid()
    for g in batch:
        assert [[int(v) for v in row] for row in g] == start


def test_samples_are_valid_rectangles():
    cfg = smp.SamplerConfig("switch-mcmc", burn_in=150, seed=11)
    batch = smp.sample_mcmc_batch(3, 6, 20, cfg)
    grids_valid(batch, 3, 6)
    rect = smp.sample_mcmc(3, 6, cfg)
    assert rect.k == 3 and rect.n == 6


def test_square_case():
    cfg = smp.SamplerConfig("switch-mcmc", burn_in=10, seed=0)
    with pytest.raises(EmptyMoveSet):
        smp.sample_mcmc(4, 4, cfg)
    batch = smp.sample_mcmc_batch(4, 4, 3, cfg, allow_square=True)
    start = smp.chain_start(4, 4).to_grid()
    for g in batch:
        assert [[int(v) for v in row] for row in g] == start


def test_random_switch_step_preserves_validity(rng):
    tup = to_matchings(smp.chain_start(2, 5))
    seen_change = False
    for _ in range(60):
        tup = smp.random_switch_step(tup, rng)
        rect = from_matchings(tup)  # validates
        seen_change = seen_change or rect != smp.chain_start(2, 5)
    assert seen_change


def test_random_switch_step_rejects_partial():
    with pytest.raises(IncompleteTuple):
        smp.random_switch_step(MatchingTuple(2, 4, (((1, 1),), ())), 0)


def test_chain_reaches_all_states():
    # (1,3) has 6 states; a modest run must visit every one of them
    cfg = smp.SamplerConfig("switch-mcmc", burn_in=0, seed=21)
    tup = to_matchings(smp.chain_start(1, 3))
    rng = np.random.default_rng(21)
    seen = set()
    for _ in range(400):
        tup = smp.random_switch_step(tup, rng)
        seen.add(from_matchings(tup))
    assert len(seen) == 6


def test_default_burn_in():
    assert smp.default_burn_in(2, 4) == math.ceil(100 * 2 * 4 * math.log(4))
    assert smp.default_burn_in(1, 1) == 0
    cfg = smp.SamplerConfig("switch-mcmc")
    assert cfg.resolved_burn_in(2, 4) == smp.default_burn_in(2, 4)
    assert smp.SamplerConfig(burn_in=7).resolved_burn_in(2, 4) == 7


def test_config_validation():
    with pytest.raises(InvalidConfig):
        smp.SamplerConfig("bogus-method")
    with pytest.raises(InvalidConfig):
        smp.SamplerConfig(burn_in=-1)
    with pytest.raises(InvalidConfig):
        smp.SamplerConfig(max_cycle_half_length=1)
    with pytest.raises(InvalidConfig):
        smp.SamplerConfig(seed=-1)
    assert smp.SamplerConfig().resolved_half_length(5) == 5
    assert smp.SamplerConfig().resolved_half_length(1) == 2


def test_exact_sampler_support():
    rng = np.random.default_rng(4)
    codes = set(int(c) for c in census.enumeration_codes(2, 4))
    batch = smp.ExactSampler(2, 4)(500, rng)
    got = census.encode_grids(np.asarray(batch, dtype=np.uint8))
    assert set(int(c) for c in got) <= codes
    grids_valid(batch, 2, 4)


def test_counted_extension_matches_enumeration_support():
    rng = np.random.default_rng(8)
    for _ in range(40):
        rect = smp.sample_exact(2, 4, rng, method="exact-counted-extension")
        assert census.count_extensions(rect.as_partial()) == 1


def test_exact_sampler_uniformity():
    report = smp.uniformity_test(smp.ExactSampler(2, 4), 2, 4, 40000, rng=17)
    assert report.support == 216
    assert report.samples == 40000
    assert report.p_value > 0.01


def test_counted_extension_uniformity():
    report = smp.uniformity_test(
        smp.ExactSampler(2, 3, method="exact-counted-extension"), 2, 3, 6000, rng=29
    )
    assert report.support == 12
    assert report.p_value > 0.01


def test_biased_sampler_fails_uniformity():
    start = smp.chain_start(2, 4)

    def constant_sampler(count, rng):
        return np.repeat(np.array([start.to_grid()], dtype=np.uint8), count, axis=0)

    report = smp.uniformity_test(constant_sampler, 2, 4, 5000, rng=3)
    assert report.p_value < 1e-6


def test_uniformity_rejects_foreign_sample():
    def bad_sampler(count, rng):
        g = np.array([[1, 2, 3, 4], [2, 1, 4, 3]], dtype=np.uint8)
        g = np.repeat(g[None], count, axis=0)
        g[0, 0, 0] = 2
        g[0, 0, 1] = 1
        return g

    with pytest.raises(ValueError):
        smp.uniformity_test(bad_sampler, 2, 4, 50, rng=0)


def test_spawn_generators_differ():
    gens = smp.spawn_generators(9, 3)
    draws = [g.integers(1 << 30) for g in gens]
    assert len(set(draws)) == 3


def test_mcmc_seed_determinism():
    cfg = smp.SamplerConfig("switch-mcmc", burn_in=300, seed=77)
    a = smp.sample_mcmc_batch(2, 5, 5, cfg)
    b = smp.sample_mcmc_batch(2, 5, 5, cfg)
    assert np.array_equal(a, b)
    cfg2 = smp.SamplerConfig("switch-mcmc", burn_in=300, seed=78)
    c = smp.sample_mcmc_batch(2, 5, 5, cfg2)
    assert not np.array_equal(a, c)
