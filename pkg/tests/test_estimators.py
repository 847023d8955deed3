import math

import numpy as np
import pytest

from mutegossip.bounds import optimal_delta, param_c, source_disclosure_prob
from mutegossip.core import GossipConfig, spawn_stream
from mutegossip.estimators import (
    EstimateResult,
    EventSpec,
    MapAttackSpec,
    MultiRumorAttackSpec,
    SilenceAttackSpec,
    estimate_attack_precision,
    estimate_dp_gap,
    estimate_event,
    estimate_events,
    estimate_source_disclosure,
    estimate_spreading,
)


def test_estimate_result_fields():
    r = EstimateResult.from_counts(250, 1000)
    assert r.estimate == 0.25
    assert abs(r.ci_half_width - 2.576 * math.sqrt(0.25 * 0.75 / 1000)) < 1e-15
    assert r.raw_successes == 250
    assert not r.low_count
    assert EstimateResult.from_counts(5, 1000).low_count


def test_ci_coverage_on_synthetic_bernoulli():
    # The 99% CI must cover the true p in at least 97% of repeated
    # estimations (normal approximation honesty check).
    rng = spawn_stream(101, 0)
    for p in (0.1, 0.5):
        trials = 2000
        successes = rng.binomial(trials, p, size=1000)
        covered = 0
        for s in successes:
            r = EstimateResult.from_counts(int(s), trials)
            covered += abs(r.estimate - p) <= r.ci_half_width
        assert covered >= 970, f"coverage {covered}/1000 at p={p}"


def test_event_spec_horizons_and_eval():
    e1 = EventSpec.first_sender_is(3)
    e2 = EventSpec.sender_rank_le(3, 2)
    assert e1.horizon == 1 and e2.horizon == 3
    assert e1.evaluate_senders([3, 1]) and not e1.evaluate_senders([1, 3])
    assert e2.evaluate_senders([1, 2, 3]) and not e2.evaluate_senders([1, 2, 4, 3])
    assert not e1.evaluate_senders([])


def test_estimate_event_reproducible_both_paths():
    cfg0 = GossipConfig(n=200, f=20, s=0.0)
    a = estimate_event(cfg0, EventSpec.first_sender_is(0), 5000, spawn_stream(7, 1))
    b = estimate_event(cfg0, EventSpec.first_sender_is(0), 5000, spawn_stream(7, 1))
    assert a == b  # vectorized walk path
    cfg1 = GossipConfig(n=200, f=20, s=1.0)
    a = estimate_event(cfg1, EventSpec.sender_rank_le(0, 3), 500, spawn_stream(7, 2))
    b = estimate_event(cfg1, EventSpec.sender_rank_le(0, 3), 500, spawn_stream(7, 2))
    assert a == b  # per-trial loop path


def test_vectorized_and_loop_paths_agree():
    # Same event estimated through the s=0 fast path and through the
    # generic loop (forced by a longer-horizon companion event).
    cfg = GossipConfig(n=100, f=10, s=0.0)
    fast = estimate_event(cfg, EventSpec.first_sender_is(0), 20000, spawn_stream(8, 1))
    slow = estimate_events(
        cfg, [EventSpec.first_sender_is(0), EventSpec.sender_rank_le(0, 4)], 20000, spawn_stream(8, 2)
    )[0]
    diff = abs(fast.estimate - slow.estimate)
    assert diff < 4 * math.sqrt(fast.ci_half_width**2 + slow.ci_half_width**2)


def test_callback_view_matches_full_trace_observation():
    # The early-stop engine sees exactly what observe() extracts from the
    # full trace when run on the same stream without stopping.
    from mutegossip.adversary import observe
    from mutegossip.protocols import _sequential_run, run_async

    for variant, s in (("parameterized", 0.3), ("parameterized", 0.0), ("delayed_start", 1.0)):
        cfg = GossipConfig(n=100, f=10, s=s, variant=variant)
        seen: list[int] = []
        _sequential_run(cfg, spawn_stream(77, 1), observed_stop=lambda snd: seen.append(snd) or False,
                        collect_events=False)
        if variant == "parameterized":
            trace = run_async(cfg, spawn_stream(77, 1))
        else:
            from mutegossip.protocols import run_delayed_start

            trace = run_delayed_start(cfg, spawn_stream(77, 1))
        assert seen == observe(trace).senders.tolist()


def test_first_sender_distribution_sums_to_one():
    # Every complete s=0 run has exactly one first observed sender.
    n = 40
    cfg = GossipConfig(n=n, f=4, s=0.0)
    events = [EventSpec.first_sender_is(k) for k in range(n)]
    res = estimate_events(cfg, events, 20000, spawn_stream(9, 0))
    assert sum(r.raw_successes for r in res) == 20000


def test_estimate_event_first_sender_source_rate():
    cfg = GossipConfig(n=1000, f=100, s=0.0)
    r = estimate_event(cfg, EventSpec.first_sender_is(0), 200_000, spawn_stream(10, 0))
    assert abs(r.estimate - 0.101) <= 3 * r.ci_half_width


def test_timed_first_disclosure_rate():
    cfg = GossipConfig(n=1000, f=100, s=0.0)
    r = estimate_event(cfg, EventSpec.timed_first_disclosure(), 100_000, spawn_stream(11, 0))
    assert abs(r.estimate - 0.1) <= 3 * r.ci_half_width


def test_estimate_source_disclosure_matches_closed_form():
    r = estimate_source_disclosure(0.5, 100, 1000, 100_000, spawn_stream(12, 0))
    assert abs(r.estimate - source_disclosure_prob(0.5, 100, 1000)) <= 3 * r.ci_half_width


def test_mixing_timed_and_untimed_rejected():
    cfg = GossipConfig(n=100, f=10, s=0.0)
    with pytest.raises(ValueError):
        estimate_events(
            cfg,
            [EventSpec.first_sender_is(0), EventSpec.timed_first_disclosure()],
            10,
            spawn_stream(0, 0),
        )


# ---------------------------------------------------------------------------
# Privacy gap


def test_dp_gap_requires_matching_configs():
    a = GossipConfig(n=100, f=10, s=0.0, source=0)
    b = GossipConfig(n=100, f=20, s=0.0, source=1)
    with pytest.raises(ValueError):
        estimate_dp_gap(a, b, [EventSpec.first_sender_is(0)], 10, spawn_stream(0, 0))
    with pytest.raises(ValueError):
        estimate_dp_gap(a, a, [EventSpec.first_sender_is(0)], 10, spawn_stream(0, 0))


def test_dp_gap_first_sender_family_matches_optimal_delta():
    n, f = 500, 50
    ci = GossipConfig(n=n, f=f, s=0.0, source=0)
    cj = GossipConfig(n=n, f=f, s=0.0, source=1)
    events = [EventSpec.first_sender_is(k) for k in range(n - f)]
    gap = estimate_dp_gap(ci, cj, events, 100_000, spawn_stream(13, 0))
    noise = 4 * 2.576 * math.sqrt(0.1 * 0.9 / 100_000)
    assert abs(gap - f / n) < noise
    assert gap <= optimal_delta(0.0, f, n) + noise  # one-sided consistency


# ---------------------------------------------------------------------------
# Attacks


def test_map_attack_singleton_prior_is_always_right():
    # prior = {source}: the decided branch and the fallback both name the
    # source, so precision is exactly 1.
    cfg = GossipConfig(n=128, f=12, s=0.5)
    res = estimate_attack_precision(cfg, MapAttackSpec(prior_size=1), 300, spawn_stream(14, 0))
    assert res.precision.estimate == 1.0
    assert res.n_abstained == 0


def test_map_attack_s0_baseline():
    n, f = 256, 26
    cfg = GossipConfig(n=n, f=f, s=0.0)
    res = estimate_attack_precision(cfg, MapAttackSpec(), 20000, spawn_stream(14, 1))
    assert abs(res.precision.estimate - (f + 1) / n) <= 3 * res.precision.ci_half_width


def test_map_attack_success_capped_by_prediction_uncertainty():
    # 1/(1 + c) caps any attack's success under a uniform (full) prior.
    n, f = 256, 26
    for s in (0.0, 0.5):
        cfg = GossipConfig(n=n, f=f, s=s)
        res = estimate_attack_precision(cfg, MapAttackSpec(), 8000, spawn_stream(14, int(10 * s) + 2))
        cap = 1.0 / (1.0 + param_c(s, f, n))
        assert res.precision.estimate <= cap + 3 * res.precision.ci_half_width


def test_map_attack_monotonicity():
    n, f = 256, 26
    trials = 6000
    by_s = []
    for i, s in enumerate((0.0, 0.33, 1.0)):
        cfg = GossipConfig(n=n, f=f, s=s)
        by_s.append(
            estimate_attack_precision(cfg, MapAttackSpec(), trials, spawn_stream(15, i)).precision.estimate
        )
    assert by_s[0] < by_s[1] < by_s[2]
    small_prior = estimate_attack_precision(
        GossipConfig(n=n, f=f, s=1.0), MapAttackSpec(prior_size=8), trials, spawn_stream(15, 9)
    ).precision.estimate
    assert small_prior > by_s[2]


def test_multi_rumor_precision_grows_with_instances():
    cfg = GossipConfig(n=512, f=51, s=1.0)
    one = estimate_attack_precision(cfg, MultiRumorAttackSpec(rumors=1), 800, spawn_stream(16, 0))
    many = estimate_attack_precision(cfg, MultiRumorAttackSpec(rumors=8), 800, spawn_stream(16, 1))
    assert many.precision.estimate > one.precision.estimate


def test_silence_attack_counts_abstentions_as_failures():
    cfg = GossipConfig(n=256, f=26, s=1.0, variant="delayed_start")
    res = estimate_attack_precision(cfg, SilenceAttackSpec(), 2000, spawn_stream(17, 0))
    assert res.n_abstained > 0
    total_rate = res.precision.estimate
    given = res.precision_given_prediction.estimate
    assert total_rate <= given  # headline precision pays for abstentions
    assert abs(res.abstain_rate - res.n_abstained / 2000) < 1e-12


# ---------------------------------------------------------------------------
# Spreading


def test_estimate_spreading_reproducible():
    cfg = GossipConfig(n=256, f=26, s=0.5)
    a = estimate_spreading(cfg, 10, spawn_stream(18, 0))
    b = estimate_spreading(cfg, 10, spawn_stream(18, 0))
    assert np.array_equal(a.informed_med, b.informed_med)
    assert np.array_equal(a.completion_rounds, b.completion_rounds)
    assert a.plateau_median == b.plateau_median


def test_estimate_spreading_shapes_and_monotonicity():
    cfg = GossipConfig(n=512, f=51, s=0.5)
    sp = estimate_spreading(cfg, 12, spawn_stream(18, 1))
    assert sp.n_runs == 12 and sp.n_capped == 0
    assert np.all(np.diff(sp.informed_med) >= 0)
    assert sp.informed_med[-1] == 1.0
    assert np.all(sp.informed_p10 <= sp.informed_med) and np.all(sp.informed_med <= sp.informed_p90)
    assert sp.total_messages.size == 12
    assert 0 < sp.plateau_median <= 1


def test_estimate_spreading_all_capped_raises():
    cfg = GossipConfig(n=256, f=26, s=1.0, step_cap=10)
    with pytest.raises(RuntimeError):
        estimate_spreading(cfg, 5, spawn_stream(18, 2))
