import math
from fractions import Fraction

import numpy as np
import pytest

from ossp import (
    MisspecConfig,
    PypParams,
    continue_ocrp,
    dist_Kn,
    log_prior_first_r,
    misspec_simulate,
    ordered_step_probs,
    ordering_distribution,
    simulate,
    unordered_step_probs,
)
from ossp.ocrp import MisspecProcess
from ossp import _kernels

from oracles import step_probs_frac


def test_empty_partition_first_customer():
    new, old = ordered_step_probs(None, PypParams(0.5, 2.0))
    assert new.tolist() == [1.0]
    assert old.size == 0
    new2, old2 = ordered_step_probs((), PypParams(0.0, 1.0))
    assert new2.tolist() == [1.0]


def test_single_table_dp_worked_example():
    new, old = ordered_step_probs((1,), PypParams(0.0, 1.0))
    assert new == pytest.approx([0.25, 0.25], abs=1e-15)
    assert old == pytest.approx([0.5], abs=1e-15)


def test_step_probs_match_exact_rationals():
    freqs = (3, 1, 2)
    a, t = Fraction(2, 5), Fraction(3, 2)
    news, olds = step_probs_frac(freqs, a, t)
    new, old = ordered_step_probs(freqs, PypParams(float(a), float(t)))
    for got, want in zip(new, news):
        assert got == pytest.approx(float(want), rel=1e-12)
    for got, want in zip(old, olds):
        assert got == pytest.approx(float(want), rel=1e-12)


def test_step_probs_sum_to_one(params_grid):
    for params in params_grid:
        for freqs in [(1,), (2, 1), (3, 1, 2), (1, 1, 1, 1), (5, 2, 2, 1)]:
            new, old = ordered_step_probs(freqs, params)
            assert new.sum() + old.sum() == pytest.approx(1.0, abs=1e-10)
            assert (new >= 0).all() and (old >= 0).all()


def test_kernel_step_probs_agree_with_log_space_api():
    # linear-space sampler kernel vs the log-space API: dual routes
    params = PypParams(0.6, 0.8)
    freqs_t = (4, 2, 1, 3)
    new, _ = ordered_step_probs(freqs_t, params)
    freqs = np.zeros(8, dtype=np.int64)
    freqs[:4] = freqs_t
    qbuf = np.empty(6)
    _kernels.ocrp_qnew(freqs, 4, params.alpha, params.theta, qbuf)
    assert qbuf[:5] == pytest.approx(new, rel=1e-12)


def test_unordered_step_probs():
    p_new, p_old = unordered_step_probs((), PypParams(0.5, 1.0))
    assert p_new == 1.0
    p_new, p_old = unordered_step_probs((2, 1), PypParams(0.5, 1.0))
    assert p_new == pytest.approx(0.5, abs=1e-15)
    assert p_new + p_old.sum() == pytest.approx(1.0, abs=1e-14)


def test_simulate_n1():
    s = simulate(1, PypParams(0.5, 1.0), 0)
    assert s.partition.freqs == (1,)


def test_simulate_seed_reproducible():
    a = simulate(500, PypParams(0.5, 1.0), 42)
    b = simulate(500, PypParams(0.5, 1.0), 42)
    assert a.records == b.records
    c = simulate(500, PypParams(0.5, 1.0), 43)
    assert c.records != a.records


def test_single_step_changes_state_minimally():
    # old draw: one position bumped; new draw: one insertion
    params = PypParams(0.4, 1.0)
    rng = np.random.default_rng(7)
    for _ in range(200):
        start = tuple(int(v) for v in rng.integers(1, 4, size=rng.integers(1, 5)))
        k0 = len(start)
        freqs = np.zeros(k0 + 1, dtype=np.int64)
        freqs[:k0] = start
        ids = np.zeros(k0 + 1, dtype=np.int64)
        ids[:k0] = np.arange(k0)
        assign = np.zeros(1, dtype=np.int64)
        u = rng.random(1)
        k, _ = _kernels.ocrp_steps(u, params.alpha, params.theta, freqs, ids, k0, k0, assign, 0)
        after = tuple(int(v) for v in freqs[:k])
        if k == k0:  # old table: exactly one +1
            diffs = [a - b for a, b in zip(after, start)]
            assert sorted(diffs) == [0] * (k0 - 1) + [1]
        else:  # new table: one insertion of a singleton
            assert k == k0 + 1
            j = int(np.where(ids[:k] == k0)[0][0])
            assert after[j] == 1
            assert after[:j] + after[j + 1:] == start


def _kn_counts(n, params, reps, seed):
    from ossp._rng import rng_from

    counts = np.zeros(n + 1, dtype=np.int64)
    freqs = np.zeros(n, dtype=np.int64)
    ids = np.zeros(n, dtype=np.int64)
    assign = np.zeros(n, dtype=np.int64)
    U = rng_from(seed).random((reps, n))
    for row in U:
        k, _ = _kernels.ocrp_steps(row, params.alpha, params.theta, freqs, ids, 0, 0, assign, 0)
        counts[k] += 1
    return counts


def test_simulated_kn_matches_exact_law():
    n, reps = 6, 100_000
    params = PypParams(0.5, 1.0)
    counts = _kn_counts(n, params, reps, 2024)
    exact = dist_Kn(n, params)
    for k in range(1, n + 1):
        p = exact[k]
        se = math.sqrt(p * (1 - p) / reps)
        assert abs(counts[k] / reps - p) <= 3 * se + 1e-12


def test_simulated_m1_matches_prior_law():
    n, reps = 6, 100_000
    params = PypParams(0.0, 2.0)
    counts = np.zeros(n + 1, dtype=np.int64)
    freqs = np.zeros(n, dtype=np.int64)
    ids = np.zeros(n, dtype=np.int64)
    assign = np.zeros(n, dtype=np.int64)
    from ossp._rng import rng_from

    U = rng_from(77).random((reps, n))
    for row in U:
        _kernels.ocrp_steps(row, params.alpha, params.theta, freqs, ids, 0, 0, assign, 0)
        counts[freqs[0]] += 1
    for m1 in range(1, n + 1):
        p = math.exp(log_prior_first_r(n, 1, (m1,), params))
        se = math.sqrt(p * (1 - p) / reps)
        assert abs(counts[m1] / reps - p) <= 3 * se + 1e-12


def test_continue_ocrp_zero_steps():
    st = continue_ocrp((3, 1), 0, PypParams(0.5, 1.0), 0)
    assert st.k_new == 0
    assert st.w1 == 3
    assert not st.a1
    assert st.freqs == (3, 1)


def test_continue_ocrp_counts():
    st = continue_ocrp((2, 2), 50, PypParams(0.5, 1.0), 3)
    assert st.k_total == st.k_initial + st.k_new
    assert sum(st.freqs) == 54
    assert st.w1 == st.freqs[0]


def test_ordering_distribution_n1():
    params = PypParams(0.3, 2.0)
    dist = ordering_distribution(1, params, 500, 0)
    new, _ = ordered_step_probs((1,), params)
    want = new / new.sum()
    assert dist.prob[1, 1:3] == pytest.approx(want, abs=1e-12)
    assert dist.zero_visit_ks == ()


def test_ordering_distribution_flat_when_theta_equals_alpha():
    # per-configuration uniformity is exact, so MC means are exactly uniform
    dist = ordering_distribution(8, PypParams(0.5, 0.5), 4000, 11)
    for k in range(1, 9):
        if dist.counts[k] == 0:
            continue
        row = dist.prob[k, 1:k + 2]
        assert row == pytest.approx([1.0 / (k + 1)] * (k + 1), abs=1e-12)


def test_ordering_distribution_reports_unvisited():
    dist = ordering_distribution(10, PypParams(0.0, 0.1), 50, 1)
    assert all(dist.counts[k] == 0 for k in dist.zero_visit_ks)
    assert dist.marginal[1:].sum() == pytest.approx(1.0, abs=1e-12)


def test_misspec_single_record():
    cfg = MisspecConfig("dp", "arrival_weighted", theta=1.0)
    s = misspec_simulate(1, cfg, 0)
    assert s.partition.freqs == (1,)


def test_misspec_reproducible():
    cfg = MisspecConfig("zipf", "alpha_stable", zipf_s=2.0)
    a = misspec_simulate(300, cfg, 9)
    b = misspec_simulate(300, cfg, 9)
    assert a.records == b.records


def test_misspec_zipf_heavy_tail():
    # Hill estimator of the cluster-size tail index, loose sanity band
    cfg = MisspecConfig("zipf", "arrival_weighted", zipf_s=2.0)
    s = misspec_simulate(10_000, cfg, 17)
    sizes = np.sort(np.array(s.partition.freqs))[::-1].astype(float)
    kk = max(10, len(sizes) // 10)
    top = sizes[:kk]
    hill = 1.0 / np.mean(np.log(top[:-1] / top[-1]))
    assert 0.5 <= hill <= 1.5


def test_misspec_ordering_does_not_change_k_law():
    # with pyp clustering, K_n keeps the exact PYP law whatever the ordering
    n, reps = 6, 40_000
    params = PypParams(0.5, 1.0)
    cfg = MisspecConfig("pyp", "alpha_stable", alpha=0.5, theta=1.0)
    counts = np.zeros(n + 1, dtype=np.int64)
    for r in range(reps):
        proc = MisspecProcess(cfg)
        proc.extend(n, (5150, r))
        counts[proc.k] += 1
    exact = dist_Kn(n, params)
    for k in range(1, n + 1):
        p = exact[k]
        se = math.sqrt(p * (1 - p) / reps)
        assert abs(counts[k] / reps - p) <= 3 * se + 1e-12


def test_misspec_continuation_stats():
    cfg = MisspecConfig("dp", "arrival_weighted", theta=2.0)
    base = MisspecProcess(cfg)
    base.extend(50, (1, 0))
    k_before = base.k
    base.extend(100, (1, 1))
    st = base.stats_since(50, k_before)
    assert st.k_total == base.k
    assert st.k_new == base.k - k_before
    assert sum(st.freqs) == 150
    assert st.w1 == st.freqs[0]


def test_misspec_config_validation():
    with pytest.raises(ValueError):
        MisspecConfig("foo", "alpha_stable")
    with pytest.raises(ValueError):
        MisspecConfig("zipf", "alpha_stable", zipf_s=1.0)
    with pytest.raises(ValueError):
        MisspecConfig("pyp", "bar")
