"""Monte Carlo estimation layer: event probabilities, empirical privacy
gaps over declared event families, attack precision, and spreading
statistics, each with 99% normal-approximation confidence intervals.

Estimation honesty rules baked in:

* The privacy gap is never estimated over the full sequence space (that is
  intractable); estimate_dp_gap is explicitly a lower estimate restricted
  to a declared event family and is only compared against closed forms as
  a one-sided consistency check.
* Attack abstentions count as failures in headline precision; the
  abstention rate and the precision among actual predictions are reported
  separately.
* Simulations stop early only once the evaluated event or attack is
  decided regardless of any future observation; step-capped runs are
  evaluated on the partial view and counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .adversary import _score_multi_rumor, silence_window
from .core import GossipConfig, ObservedSequence, TimedObservedSequence, split_stream
from .protocols import _sequential_run, run_sync

Z99 = 2.576  # 99% two-sided normal quantile, as reported alongside estimates


@dataclass(frozen=True)
class EstimateResult:
    """A Bernoulli point estimate with its trial count and CI half-width."""

    estimate: float
    trials: int
    ci_half_width: float
    raw_successes: int
    incomplete: int = 0  # step-capped runs evaluated on a partial view

    @classmethod
    def from_counts(cls, successes: int, trials: int, incomplete: int = 0) -> "EstimateResult":
        if trials < 1:
            raise ValueError("trials must be >= 1")
        p = successes / trials
        half = Z99 * math.sqrt(p * (1.0 - p) / trials)
        return cls(p, trials, half, successes, incomplete)

    @property
    def low_count(self) -> bool:
        """Normal approximation floor: flagged when raw_successes < 20."""
        return self.raw_successes < 20

    def covers(self, value: float, widths: float = 1.0) -> bool:
        return abs(self.estimate - value) <= widths * self.ci_half_width


@dataclass(frozen=True)
class EventSpec:
    """A boolean event evaluable on an adversary view.

    Kinds:
      first_sender_is(node)    the first observed sender is `node`
      sender_rank_le(node, r)  `node` appears among the first r+1 observed
                               senders (its sender rank is <= r)
      timed_first_disclosure() the strong adversary sees an entry at global
                               index 0 (the very first call hit a curious
                               node)
    """

    kind: str
    node: Optional[int] = None
    r: Optional[int] = None

    @classmethod
    def first_sender_is(cls, node: int) -> "EventSpec":
        return cls(kind="first_sender_is", node=node)

    @classmethod
    def sender_rank_le(cls, node: int, r: int) -> "EventSpec":
        if r < 0:
            raise ValueError("r must be >= 0")
        return cls(kind="sender_rank_le", node=node, r=r)

    @classmethod
    def timed_first_disclosure(cls) -> "EventSpec":
        return cls(kind="timed_first_disclosure")

    @property
    def timed(self) -> bool:
        return self.kind == "timed_first_disclosure"

    @property
    def horizon(self) -> int:
        """Observed entries after which the event is decided."""
        if self.kind == "first_sender_is":
            return 1
        if self.kind == "sender_rank_le":
            return self.r + 1
        raise ValueError(f"{self.kind} is not decided by an untimed prefix")

    def evaluate_senders(self, senders: Sequence[int]) -> bool:
        """Evaluate on the observed sender prefix (>= horizon entries, or
        the complete view if shorter)."""
        if self.kind == "first_sender_is":
            return len(senders) > 0 and senders[0] == self.node
        if self.kind == "sender_rank_le":
            return self.node in senders[: self.r + 1]
        raise ValueError(f"{self.kind} cannot be evaluated on an untimed view")

    def evaluate(self, view: Union[ObservedSequence, TimedObservedSequence]) -> bool:
        if self.kind == "timed_first_disclosure":
            if not isinstance(view, TimedObservedSequence):
                raise TypeError("timed_first_disclosure needs a timed view")
            return len(view) > 0 and int(view.times[0]) == 0
        if isinstance(view, TimedObservedSequence):
            view = view.untimed()
        return self.evaluate_senders(view.senders.tolist())


def _first_observed_senders_s0(
    config: GossipConfig, trials: int, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    """Vectorized s=0 fast path: the first observed sender of each trial.

    At s=0 exactly one node is active, so the run is a walk whose state is
    a single node id; all trials advance in lockstep and drop out at their
    first curious receiver.  Returns (first senders, -1 where the step cap
    hit; count of capped trials).
    """
    n = config.n
    lo = config.curious_lo
    cap = config.max_steps
    out = np.full(trials, -1, dtype=np.int64)
    if config.f == 0:
        return out, 0  # complete runs with an empty observation, not capped
    cur = np.full(trials, config.source, dtype=np.int64)
    idx = np.arange(trials)
    steps = 0
    while idx.size and steps < cap:
        r = rng.integers(0, n, size=idx.size)
        hit = r >= lo
        if hit.any():
            out[idx[hit]] = cur[hit]
            keep = ~hit
            idx = idx[keep]
            cur = r[keep]
        else:
            cur = r
        steps += 1
    return out, int(idx.size)


def estimate_events(
    config: GossipConfig,
    events: Sequence[EventSpec],
    trials: int,
    rng: np.random.Generator,
) -> list[EstimateResult]:
    """Estimate a family of events on shared simulated runs.

    Every event in the family must be of the same timing kind.  Runs stop
    as soon as every event in the family is decided.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not events:
        raise ValueError("events must be nonempty")
    timed_flags = {e.timed for e in events}
    if len(timed_flags) > 1:
        raise ValueError("cannot mix timed and untimed events in one family")

    if timed_flags == {True}:
        # Only the first call matters: its receiver is curious or not.
        first_receivers = rng.integers(0, config.n, size=trials)
        hits = int(np.count_nonzero(first_receivers >= config.curious_lo))
        return [EstimateResult.from_counts(hits, trials) for _ in events]

    horizon = max(e.horizon for e in events)

    if config.s == 0.0 and config.variant == "parameterized" and horizon == 1:
        # Horizon-1 events all reduce to "the first observed sender is node".
        first, capped = _first_observed_senders_s0(config, trials, rng)
        counts = np.bincount(first[first >= 0], minlength=config.n)
        return [
            EstimateResult.from_counts(int(counts[e.node]), trials, incomplete=capped)
            for e in events
        ]

    results = [0] * len(events)
    incomplete = 0
    for _ in range(trials):
        collected: list[int] = []

        def stop(snd: int, collected=collected) -> bool:
            collected.append(snd)
            return len(collected) >= horizon

        run = _sequential_run(config, rng, observed_stop=stop, collect_events=False)
        if run.capped(config):
            incomplete += 1
        for k, e in enumerate(events):
            if e.evaluate_senders(collected):
                results[k] += 1
    return [EstimateResult.from_counts(c, trials, incomplete) for c in results]


def estimate_event(
    config: GossipConfig,
    event: EventSpec,
    trials: int,
    rng: np.random.Generator,
) -> EstimateResult:
    """Estimate one event's probability over `trials` independent runs."""
    return estimate_events(config, [event], trials, rng)[0]


def estimate_source_disclosure(
    s: float, f: int, n: int, trials: int, rng: np.random.Generator
) -> EstimateResult:
    """Prefix-process estimate of the probability that the source contacts a
    curious node before its first deactivation.

    Simulates only the source's opening send streak: a geometric number of
    messages (stop probability 1-s after each), each aimed uniformly at the
    n nodes.  This is the Monte Carlo twin of
    bounds.source_disclosure_prob, kept independent of the closed form.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("the prefix process needs 0 < s < 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sends = rng.geometric(1.0 - s, size=trials)  # sends until first mute, >= 1
    total = int(sends.sum())
    curious_hit = rng.integers(0, n, size=total) >= n - f
    starts = np.concatenate(([0], np.cumsum(sends)[:-1]))
    any_hit = np.logical_or.reduceat(curious_hit, starts)
    return EstimateResult.from_counts(int(np.count_nonzero(any_hit)), trials)


def estimate_dp_gap(
    config_i: GossipConfig,
    config_j: GossipConfig,
    events: Sequence[EventSpec],
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Empirical lower estimate of delta at epsilon=0, restricted to the
    given event family: max over events of p_hat_i(E) - p_hat_j(E).

    The two configurations must be identical except for their source.
    """
    if (config_i.n, config_i.f, config_i.s, config_i.variant, config_i.step_cap) != (
        config_j.n,
        config_j.f,
        config_j.s,
        config_j.variant,
        config_j.step_cap,
    ):
        raise ValueError("configs must differ only in their source")
    if config_i.source == config_j.source:
        raise ValueError("sources must differ")
    rng_i, rng_j = split_stream(rng, 2)
    res_i = estimate_events(config_i, events, trials, rng_i)
    res_j = estimate_events(config_j, events, trials, rng_j)
    return max(a.estimate - b.estimate for a, b in zip(res_i, res_j))


# ---------------------------------------------------------------------------
# Attack precision


@dataclass(frozen=True)
class MapAttackSpec:
    """First-in-prior attack; prior_size=None means all non-curious nodes,
    otherwise the prior is the source plus prior_size-1 random others."""

    prior_size: Optional[int] = None


@dataclass(frozen=True)
class MultiRumorAttackSpec:
    """Cross-instance attack over `rumors` runs from the same source,
    intersecting the first k distinct senders of each."""

    rumors: int
    k: int = 10


@dataclass(frozen=True)
class SilenceAttackSpec:
    """First-sender silence detection with window r (default ceil(ln(n)^2))."""

    r: Optional[int] = None


AttackSpec = Union[MapAttackSpec, MultiRumorAttackSpec, SilenceAttackSpec]


@dataclass(frozen=True)
class AttackPrecisionResult:
    """Attack precision over trials.  `precision` counts abstentions as
    failures; `precision_given_prediction` conditions on having predicted."""

    precision: EstimateResult
    n_abstained: int
    n_correct: int

    @property
    def abstain_rate(self) -> float:
        return self.n_abstained / self.precision.trials

    @property
    def precision_given_prediction(self) -> Optional[EstimateResult]:
        predicted = self.precision.trials - self.n_abstained
        if predicted == 0:
            return None
        return EstimateResult.from_counts(self.n_correct, predicted)


def estimate_attack_precision(
    config: GossipConfig,
    attack: AttackSpec,
    trials: int,
    rng: np.random.Generator,
) -> AttackPrecisionResult:
    """Fraction of runs whose attack prediction equals the true source."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(attack, MapAttackSpec):
        counts = _map_precision(config, attack, trials, rng)
    elif isinstance(attack, MultiRumorAttackSpec):
        counts = _multi_rumor_precision(config, attack, trials, rng)
    elif isinstance(attack, SilenceAttackSpec):
        counts = _silence_precision(config, attack, trials, rng)
    else:
        raise TypeError(f"unknown attack spec: {attack!r}")
    correct, abstained, incomplete = counts
    return AttackPrecisionResult(
        precision=EstimateResult.from_counts(correct, trials, incomplete),
        n_abstained=abstained,
        n_correct=correct,
    )


def _sample_prior(config: GossipConfig, size: int, rng: np.random.Generator) -> frozenset[int]:
    """The source plus size-1 distinct non-curious others."""
    lo = config.curious_lo
    if not 1 <= size <= lo:
        raise ValueError(f"prior size must be in [1, {lo}]")
    others = rng.choice(lo - 1, size=size - 1, replace=False)
    others = others + (others >= config.source)  # skip the source's slot
    return frozenset(int(x) for x in others) | {config.source}


def _map_precision(config, attack, trials, rng):
    lo = config.curious_lo
    source = config.source
    full_prior = attack.prior_size is None
    correct = 0
    incomplete = 0
    for _ in range(trials):
        if full_prior:
            in_prior = lambda snd: snd < lo
        else:
            prior = _sample_prior(config, attack.prior_size, rng)
            in_prior = prior.__contains__
        found: list[int] = []

        def stop(snd: int, found=found, in_prior=in_prior) -> bool:
            if in_prior(snd):
                found.append(snd)
                return True
            return False

        run = _sequential_run(config, rng, observed_stop=stop, collect_events=False)
        if run.capped(config):
            incomplete += 1
        if found:
            predicted = found[0]
        elif full_prior:
            predicted = int(rng.integers(0, lo))
        else:
            members = sorted(prior)
            predicted = members[int(rng.integers(0, len(members)))]
        correct += predicted == source
    return correct, 0, incomplete


def _multi_rumor_precision(config, attack, trials, rng):
    if attack.rumors < 1 or attack.k < 1:
        raise ValueError("rumors and k must be >= 1")
    source = config.source
    correct = 0
    abstained = 0
    incomplete = 0
    for _ in range(trials):
        lead_lists: list[list[int]] = []
        for _ in range(attack.rumors):
            leads: list[int] = []
            seen: set[int] = set()

            def stop(snd: int, leads=leads, seen=seen) -> bool:
                if snd not in seen:
                    seen.add(snd)
                    leads.append(snd)
                    return len(leads) >= attack.k
                return False

            run = _sequential_run(config, rng, observed_stop=stop, collect_events=False)
            if run.capped(config):
                incomplete += 1
            lead_lists.append(leads)
        predicted = _score_multi_rumor(lead_lists, rng)
        if predicted is None:
            abstained += 1
        else:
            correct += predicted == source
    return correct, abstained, incomplete


def _silence_precision(config, attack, trials, rng):
    r = attack.r if attack.r is not None else silence_window(config.n)
    if r < 1:
        raise ValueError("r must be >= 1")
    source = config.source
    correct = 0
    abstained = 0
    incomplete = 0
    horizon = r + 1
    for _ in range(trials):
        collected: list[int] = []

        def stop(snd: int, collected=collected) -> bool:
            collected.append(snd)
            return len(collected) >= horizon

        run = _sequential_run(config, rng, observed_stop=stop, collect_events=False)
        if run.capped(config):
            incomplete += 1
        if not collected:
            abstained += 1
            continue
        x = collected[0]
        if x in collected[1 : r + 1]:
            abstained += 1
        else:
            correct += x == source
    return correct, abstained, incomplete


# ---------------------------------------------------------------------------
# Spreading statistics


@dataclass(frozen=True)
class SpreadingSummary:
    """Round-indexed spreading statistics over repeated synchronous runs.

    Trajectories are fractions of n; runs shorter than the longest are
    padded by holding their final value (informed saturates at 1).  The
    plateau is the per-run mean active fraction over the late rounds where
    the informed fraction exceeds 0.99, summarized by its median.
    """

    config: GossipConfig
    informed_med: np.ndarray
    informed_p10: np.ndarray
    informed_p90: np.ndarray
    active_med: np.ndarray
    active_p10: np.ndarray
    active_p90: np.ndarray
    completion_rounds: np.ndarray  # rounds executed per complete run
    total_messages: np.ndarray  # messages per complete run
    plateau_median: float
    n_runs: int
    n_capped: int

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(self.informed_med.size, dtype=np.int64)


def estimate_spreading(
    config: GossipConfig, trials: int, rng: np.random.Generator
) -> SpreadingSummary:
    """Run the synchronous engine `trials` times and aggregate trajectories,
    completion rounds, message totals, and the late-round active plateau.
    Step-capped runs are excluded from the aggregates and counted."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = config.n
    informed_curves: list[np.ndarray] = []
    active_curves: list[np.ndarray] = []
    completion: list[int] = []
    totals: list[int] = []
    plateaus: list[float] = []
    n_capped = 0
    for _ in range(trials):
        trace, rounds = run_sync(config, rng)
        if not trace.complete:
            n_capped += 1
            continue
        informed_curves.append(rounds.informed / n)
        active_curves.append(rounds.active / n)
        completion.append(len(rounds))
        totals.append(int(rounds.messages.sum()))
        late = rounds.informed > 0.99 * n
        if late.any():
            plateaus.append(float(np.mean(rounds.active[late]) / n))
    if not informed_curves:
        raise RuntimeError("every run hit the step cap; raise step_cap")

    width = max(c.size for c in informed_curves)
    informed_mat = np.vstack([_pad_hold(c, width) for c in informed_curves])
    active_mat = np.vstack([_pad_hold(c, width) for c in active_curves])
    inf_p10, inf_med, inf_p90 = np.percentile(informed_mat, [10, 50, 90], axis=0)
    act_p10, act_med, act_p90 = np.percentile(active_mat, [10, 50, 90], axis=0)
    return SpreadingSummary(
        config=config,
        informed_med=inf_med,
        informed_p10=inf_p10,
        informed_p90=inf_p90,
        active_med=act_med,
        active_p10=act_p10,
        active_p90=act_p90,
        completion_rounds=np.array(completion, dtype=np.int64),
        total_messages=np.array(totals, dtype=np.int64),
        plateau_median=float(np.median(plateaus)),
        n_runs=len(informed_curves),
        n_capped=n_capped,
    )


def _pad_hold(curve: np.ndarray, width: int) -> np.ndarray:
    if curve.size == width:
        return curve
    return np.concatenate([curve, np.full(width - curve.size, curve[-1])])
