"""Adversary view extraction and source-location attacks.

The adversary monitors the curious nodes: its entire view of a run is the
relative-order subsequence of events whose receiver is curious.  Attacks
are pure functions of that view (plus an explicit random stream for
tie-breaking), so they are safe to run concurrently on disjoint streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import ExecutionTrace, ObservedSequence, TimedObservedSequence


def observe(trace: ExecutionTrace, curious: Optional[Iterable[int]] = None) -> ObservedSequence:
    """Extract the adversary's view: events whose receiver is curious, in
    trace order, with global indices discarded."""
    mask = _curious_mask(trace, curious)
    return ObservedSequence(trace.senders[mask], trace.receivers[mask])


def observe_timed(
    trace: ExecutionTrace, curious: Optional[Iterable[int]] = None
) -> TimedObservedSequence:
    """Strong-adversary view: same subsequence, each entry carrying its
    global event index."""
    mask = _curious_mask(trace, curious)
    times = np.flatnonzero(mask)
    return TimedObservedSequence(times, trace.senders[mask], trace.receivers[mask])


def _curious_mask(trace: ExecutionTrace, curious: Optional[Iterable[int]]) -> np.ndarray:
    if curious is None:
        return trace.receivers >= trace.config.curious_lo
    curious = frozenset(curious)
    if curious != trace.config.curious:
        raise ValueError("curious set does not match the trace's configuration")
    return trace.receivers >= trace.config.curious_lo


@dataclass(frozen=True)
class AttackOutcome:
    """Result of one attack on one run."""

    predicted: Optional[int]  # None = abstained
    correct: Optional[bool] = None  # vs the true source, when known
    rank_of_source: Optional[int] = None  # source's sender rank in the view

    @property
    def abstained(self) -> bool:
        return self.predicted is None


def _outcome(
    predicted: Optional[int],
    true_source: Optional[int],
    observed: Optional[ObservedSequence],
) -> AttackOutcome:
    correct = None if (true_source is None or predicted is None) else predicted == true_source
    rank = None
    if true_source is not None and observed is not None:
        rank = observed.sender_rank(true_source)
    return AttackOutcome(predicted=predicted, correct=correct, rank_of_source=rank)


def map_attack(
    observed: ObservedSequence,
    prior: Iterable[int],
    rng: np.random.Generator,
    true_source: Optional[int] = None,
) -> AttackOutcome:
    """Predict the first observed sender that belongs to the prior set.

    Under a uniform prior over a suspect set P disjoint from the curious
    nodes, the first member of P to contact a curious node is the maximum
    a posteriori estimate of the source.  If no member of P ever appears,
    the posterior is symmetric over P and the attack falls back to a
    uniform prediction.
    """
    prior = sorted(set(prior))
    if not prior:
        raise ValueError("prior must be nonempty")
    prior_set = frozenset(prior)
    predicted = None
    for snd in observed.senders.tolist():
        if snd in prior_set:
            predicted = snd
            break
    if predicted is None:
        predicted = prior[int(rng.integers(0, len(prior)))]
    return _outcome(predicted, true_source, observed)


def first_k_distinct_senders(observed: ObservedSequence, k: int) -> list[int]:
    """The first k distinct nodes to appear as senders, in order of first
    appearance (fewer if the view runs out)."""
    seen: list[int] = []
    seen_set: set[int] = set()
    for snd in observed.senders.tolist():
        if snd not in seen_set:
            seen_set.add(snd)
            seen.append(snd)
            if len(seen) == k:
                break
    return seen


def multi_rumor_attack(
    observations: Sequence[ObservedSequence],
    k: int,
    rng: np.random.Generator,
    true_source: Optional[int] = None,
) -> AttackOutcome:
    """Cross-instance attack on several rumors spread by the same source.

    Per instance, record the first k distinct senders; predict the node
    appearing in the most instances.  Ties go to the node with the smallest
    earliest rank (position within an instance's distinct-sender list,
    minimized across instances); remaining ties are broken uniformly.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lead_lists = [first_k_distinct_senders(obs, k) for obs in observations]
    return _outcome(
        _score_multi_rumor(lead_lists, rng), true_source, observations[0] if observations else None
    )


def _score_multi_rumor(lead_lists: Sequence[Sequence[int]], rng: np.random.Generator) -> Optional[int]:
    counts: dict[int, int] = {}
    best_rank: dict[int, int] = {}
    for leads in lead_lists:
        for rank, node in enumerate(leads):
            counts[node] = counts.get(node, 0) + 1
            if rank < best_rank.get(node, 1 << 30):
                best_rank[node] = rank
    if not counts:
        return None
    top = max(counts.values())
    tied = [node for node, c in counts.items() if c == top]
    low = min(best_rank[node] for node in tied)
    tied = sorted(node for node in tied if best_rank[node] == low)
    return tied[int(rng.integers(0, len(tied)))]


def silence_window(n: int) -> int:
    """Default monitoring window for the silence attack: ceil(ln(n)^2)."""
    return int(math.ceil(math.log(n) ** 2))


def silence_attack(
    observed: ObservedSequence,
    r: int,
    true_source: Optional[int] = None,
) -> AttackOutcome:
    """Flag the first observed sender if it then goes quiet.

    Let x be the sender of entry 0.  If x does not reappear as a sender in
    entries 1..r, predict x; otherwise abstain.  An empty view abstains.
    A source that mutes after its only send (delayed-start gossip) is
    caught by exactly this pattern.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if len(observed) == 0:
        return _outcome(None, true_source, observed)
    senders = observed.senders
    x = int(senders[0])
    if np.any(senders[1 : r + 1] == x):
        return _outcome(None, true_source, observed)
    return _outcome(x, true_source, observed)
