"""Domain types shared by every module: experiment configuration, execution
traces, adversary views, and the deterministic randomness contract.

Conventions baked in here:

* Nodes are labeled 0..n-1.  The f curious nodes are always the top-f ids
  {n-f, ..., n-1}; on the complete graph only the number of curious nodes
  matters, so a fixed convention keeps traces comparable across seeds.
* Message targets are drawn uniformly over all n nodes, self included.
  Self-sends are recorded as ordinary events.
* All randomness flows through counter-based Philox streams keyed by
  (master_seed, stream_index), so any trial can be reproduced in isolation
  and trials never share draw order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

VARIANTS = ("parameterized", "delayed_start")

_MASK64 = (1 << 64) - 1


def spawn_stream(master_seed: int, stream_index: int) -> np.random.Generator:
    """Return an independent, reproducible random stream.

    Same (master_seed, stream_index) always yields the identical draw
    sequence, including across process restarts; distinct stream indices
    yield statistically independent streams (Philox keyed counter mode).
    """
    key = np.array([master_seed & _MASK64, stream_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def split_stream(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Derive `count` independent child streams from `rng`.

    Children are Philox streams keyed by draws from the parent, so the
    split is deterministic given the parent's state.
    """
    keys = rng.integers(0, 1 << 63, size=(count, 2), dtype=np.int64).astype(np.uint64)
    return [np.random.Generator(np.random.Philox(key=keys[i])) for i in range(count)]


def default_step_cap(n: int) -> int:
    """Safety bound on tell_gossip calls: 50 * n * ln(n).

    Dissemination terminates almost surely, but a simulator needs a hard
    stop; runs that hit the cap are flagged, never silently truncated.
    """
    return int(math.ceil(50.0 * n * math.log(n)))


@dataclass(frozen=True)
class GossipConfig:
    """Full parameterization of one gossip experiment.

    n         : node count (>= 2)
    f         : number of curious nodes (0 <= f <= n-2); curious ids are
                {n-f, ..., n-1}
    s         : muting parameter in [0, 1]; after each send a node stays
                active with probability s
    source    : initially informed node; must not be curious
    variant   : "parameterized" (generic muting protocol) or
                "delayed_start" (source sends once, then permanently mutes
                until re-informed; spreading continues as standard push)
    step_cap  : optional max number of tell_gossip calls
    """

    n: int
    f: int
    s: float
    source: int = 0
    variant: str = "parameterized"
    step_cap: Optional[int] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0 <= self.f <= self.n - 2:
            raise ValueError(f"f must be in [0, n-2], got f={self.f}, n={self.n}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must be in [0, 1], got {self.s}")
        if not 0 <= self.source < self.n:
            raise ValueError(f"source must be in [0, n), got {self.source}")
        if self.source >= self.n - self.f:
            raise ValueError(
                f"source {self.source} is curious (curious ids are "
                f"{self.n - self.f}..{self.n - 1})"
            )
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "delayed_start" and self.s != 1.0:
            raise ValueError("delayed_start runs standard push after the first send; set s=1")
        if self.step_cap is not None and self.step_cap < 1:
            raise ValueError("step_cap must be positive")

    @property
    def curious_lo(self) -> int:
        """Smallest curious node id; node j is curious iff j >= curious_lo."""
        return self.n - self.f

    @property
    def curious(self) -> frozenset[int]:
        return frozenset(range(self.n - self.f, self.n))

    def is_curious(self, node: int) -> bool:
        return node >= self.n - self.f

    @property
    def max_steps(self) -> int:
        return self.step_cap if self.step_cap is not None else default_step_cap(self.n)


@dataclass(frozen=True)
class ExecutionTrace:
    """The omniscient ordered event list of one run.

    events[t] = (senders[t], receivers[t]) is the t-th tell_gossip call.
    `complete` is False only when the run hit the step cap before every
    node was informed.
    """

    config: GossipConfig
    senders: np.ndarray
    receivers: np.ndarray
    complete: bool = True

    def __post_init__(self):
        object.__setattr__(self, "senders", np.asarray(self.senders, dtype=np.int64))
        object.__setattr__(self, "receivers", np.asarray(self.receivers, dtype=np.int64))
        if self.senders.shape != self.receivers.shape:
            raise ValueError("senders and receivers must have equal length")

    def __len__(self) -> int:
        return int(self.senders.size)

    def events(self) -> Iterator[tuple[int, int]]:
        return zip(self.senders.tolist(), self.receivers.tolist())

    def informed_nodes(self) -> set[int]:
        return {self.config.source} | set(self.receivers.tolist())

    def validate(self) -> None:
        """Replay the informed set and assert trace well-formedness.

        O(len) check: the source sends first, every sender was informed
        strictly before its sending event, and a complete run informs all
        n nodes.
        """
        cfg = self.config
        if len(self) == 0:
            raise AssertionError("a run makes at least one tell_gossip call")
        if int(self.senders[0]) != cfg.source:
            raise AssertionError("first event must be sent by the source")
        informed = bytearray(cfg.n)
        informed[cfg.source] = 1
        for snd, rcv in zip(self.senders.tolist(), self.receivers.tolist()):
            if not informed[snd]:
                raise AssertionError(f"sender {snd} was not informed at send time")
            informed[rcv] = 1
        if self.complete and sum(informed) != cfg.n:
            raise AssertionError("complete trace does not inform all nodes")


@dataclass(frozen=True)
class ObservedSequence:
    """The adversary's view: the order-preserving subsequence of events whose
    receiver is curious.  Global event indices are discarded."""

    senders: np.ndarray
    receivers: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "senders", np.asarray(self.senders, dtype=np.int64))
        object.__setattr__(self, "receivers", np.asarray(self.receivers, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.senders.size)

    def sender_rank(self, node: int) -> Optional[int]:
        """Rank (index in this sequence) of `node`'s first appearance as a
        sender, or None if it never sends to a curious node."""
        hits = np.flatnonzero(self.senders == node)
        return int(hits[0]) if hits.size else None

    @property
    def first_sender(self) -> Optional[int]:
        return int(self.senders[0]) if len(self) else None


@dataclass(frozen=True)
class TimedObservedSequence:
    """Strong-adversary view: the same subsequence, with each entry carrying
    its global index in the full event sequence."""

    times: np.ndarray
    senders: np.ndarray
    receivers: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=np.int64))
        object.__setattr__(self, "senders", np.asarray(self.senders, dtype=np.int64))
        object.__setattr__(self, "receivers", np.asarray(self.receivers, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.times.size)

    def untimed(self) -> ObservedSequence:
        return ObservedSequence(self.senders, self.receivers)


@dataclass(frozen=True)
class RoundTrace:
    """Per-round counts from the synchronous engine.

    For round t: messages[t] senders (the active set at round start) each
    sent one message; informed[t] and active[t] are the counts after the
    round's receivers were absorbed.
    """

    informed: np.ndarray
    active: np.ndarray
    messages: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "informed", np.asarray(self.informed, dtype=np.int64))
        object.__setattr__(self, "active", np.asarray(self.active, dtype=np.int64))
        object.__setattr__(self, "messages", np.asarray(self.messages, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.informed.size)

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(len(self), dtype=np.int64)

    @property
    def cumulative_messages(self) -> np.ndarray:
        return np.cumsum(self.messages)

    def validate(self) -> None:
        if len(self) == 0:
            raise AssertionError("round trace is empty")
        if np.any(np.diff(self.informed) < 0):
            raise AssertionError("informed count decreased")
        if np.any(self.active < 1):
            raise AssertionError("active set became empty")
        if np.any(self.messages < 1):
            raise AssertionError("a round sent no message")
