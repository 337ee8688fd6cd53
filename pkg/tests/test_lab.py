import math
from fractions import Fraction

import pytest

from latinlab import PartialLatinRectangle, lab, sampler


def test_wilson_interval_shape():
    lo, hi = lab.wilson_interval(50, 100)
    assert 0 < lo < 0.5 < hi < 1
    lo0, hi0 = lab.wilson_interval(0, 100)
    assert lo0 == 0 and hi0 > 0
    lo1, hi1 = lab.wilson_interval(100, 100)
    assert hi1 == 1 and lo1 < 1
    from latinlab.errors import InvalidConfig

    with pytest.raises(InvalidConfig):
        lab.wilson_interval(5, 0)
    with pytest.raises(InvalidConfig):
        lab.wilson_interval(7, 5)


def test_wilson_interval_known_value():
    # hand-computed Wilson bounds for 8/10 at z = 1.96
    lo, hi = lab.wilson_interval(8, 10, z=1.96)
    assert math.isclose(lo, 0.4901625, abs_tol=5e-5)
    assert math.isclose(hi, 0.9433476, abs_tol=5e-5)


def test_estimate_exact_enumeration(pattern24):
    cfg = sampler.SamplerConfig("exact-enumeration", seed=12)
    rep = lab.estimate_containment(pattern24, cfg, 4000)
    assert rep.samples == 4000
    assert rep.exact_probability == Fraction(1, 4)
    assert rep.ci_low < float(rep.exact_probability) < rep.ci_high
    assert rep.ci_covers_exact
    assert 0.2 < rep.estimate < 0.3
    # reference window for a single filled cell is ((1 +- eps)/n)
    assert math.isclose(rep.reference_low, 0.9 / 4)
    assert math.isclose(rep.reference_high, 1.1 / 4)


def test_estimate_empty_pattern():
    cfg = sampler.SamplerConfig("exact-enumeration", seed=1)
    rep = lab.estimate_containment(PartialLatinRectangle.empty(2, 4), cfg, 100)
    assert rep.hits == 100
    assert rep.estimate == 1.0
    assert rep.exact_probability == 1
    assert rep.reference_low == rep.reference_high == 1.0


def test_estimate_mcmc_path(pattern24):
    cfg = sampler.SamplerConfig("switch-mcmc", burn_in=400, seed=5)
    rep = lab.estimate_containment(pattern24, cfg, 3000)
    assert rep.method == "switch-mcmc"
    assert rep.exact_probability == Fraction(1, 4)
    assert abs(rep.estimate - 0.25) < 0.05


def test_estimate_skips_exact_when_guarded():
    pat = PartialLatinRectangle.from_entries(2, 7, [(1, 1, 1)])
    cfg = sampler.SamplerConfig("switch-mcmc", burn_in=100, seed=2)
    rep = lab.estimate_containment(pat, cfg, 200)
    assert rep.exact_probability is None
    assert rep.ci_covers_exact is None


def test_estimate_merge(pattern24):
    cfg = sampler.SamplerConfig("exact-enumeration", seed=3)
    a = lab.estimate_containment(pattern24, cfg, 2000)
    cfg2 = sampler.SamplerConfig("exact-enumeration", seed=4)
    b = lab.estimate_containment(pattern24, cfg2, 3000)
    m = a.merge(b)
    assert m.samples == 5000
    assert m.hits == a.hits + b.hits
    assert m.exact_probability == Fraction(1, 4)
    assert m.ci_high - m.ci_low < a.ci_high - a.ci_low
    assert m.seed == f"{a.seed}+{b.seed}"


def test_restriction_identity_small_cases():
    for n, m, k in [(3, 2, 2), (4, 2, 2), (4, 2, 3), (3, 3, 3)]:
        rep = lab.verify_restriction_identity(n, m, k)
        assert rep.equal, (n, m, k)
        assert rep.lhs == rep.rhs
        assert isinstance(rep.lhs, Fraction)


def test_restriction_identity_known_values():
    rep = lab.verify_restriction_identity(4, 2, 3)
    assert rep.mean_full == 6
    assert rep.mean_restricted == 3
    assert rep.lhs == 12
    zero = lab.verify_restriction_identity(3, 2, 2)
    assert zero.mean_full == 0 and zero.rhs == 0


def test_switching_ratio_sweep():
    table = lab.switching_ratio_sweep(2, 4, sparsity=1, tuples=3, seed=9)
    assert table.k == 2 and table.n == 4
    assert table.rows
    noted = [r for r in table.rows if r.note]
    clean = [r for r in table.rows if not r.note]
    assert clean, "some probes must be admissible"
    for r in clean:
        assert r.a_size + r.b <= r.total
        assert r.ratio == Fraction(2 * r.a_size, r.b)
    for r in noted:
        assert r.ratio is None
    assert table.ratio_min <= table.ratio_mean <= table.ratio_max
    # the empty tuple is part of the family and pins the extremes at 1
    assert table.ratio_min <= 1 <= table.ratio_max


def test_sweep_respects_sparsity():
    table = lab.switching_ratio_sweep(2, 5, sparsity=1, tuples=4, seed=11)
    # row loads in any sampled tuple never exceed the requested sparsity
    assert all(r.total > 0 for r in table.rows)


def test_expectation_experiment_exact():
    rep = lab.subsquare_expectation_experiment(4, 2, 2)
    assert rep.method == "exact"
    assert rep.mean == pytest.approx(float(Fraction(2, 3)))
    assert rep.exact_mean == Fraction(2, 3)
    assert rep.window_low == pytest.approx(0.184528125)
    assert rep.window_high == pytest.approx(0.411778125)
    from latinlab import subsquares

    eps = rep.smallest_covering_epsilon
    lo, hi = subsquares.expectation_window(4, 2, 2, eps)
    assert lo <= float(rep.exact_mean) <= hi


def test_expectation_experiment_m1():
    rep = lab.subsquare_expectation_experiment(4, 2, 1)
    assert rep.exact_mean == 8  # every cell is an order-1 subsquare


def test_expectation_experiment_sampled():
    rep = lab.subsquare_expectation_experiment(
        4, 2, 2, samples=2000, method="switch-mcmc", seed=6, burn_in=300
    )
    assert rep.method == "switch-mcmc"
    assert rep.samples == 2000
    assert rep.ci_low <= rep.mean <= rep.ci_high
    assert rep.exact_mean == Fraction(2, 3)
    assert abs(rep.mean - 2 / 3) < 0.15


def test_smallest_covering_epsilon_consistency():
    mean = Fraction(2, 3)
    eps = lab.smallest_covering_epsilon(4, 2, 2, mean)
    from latinlab import subsquares

    lo, hi = subsquares.expectation_window(4, 2, 2, eps)
    assert lo <= float(mean) <= hi
    lo2, hi2 = subsquares.expectation_window(4, 2, 2, eps * 0.98)
    assert not (lo2 <= float(mean) <= hi2)
    assert lab.smallest_covering_epsilon(9, 8, 7, mean) is None
