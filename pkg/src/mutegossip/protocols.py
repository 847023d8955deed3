"""Executable gossip engines on the complete graph.

Three engines share the tell_gossip primitive (uniform target over all n
nodes, self included):

* run_async          one tell_gossip call per step; the sender is drawn
                     uniformly from the active set, deactivates with
                     probability 1-s, and the receiver always activates.
* run_sync           round-based version: every node active at round start
                     sends once, then flips its stay-active coin; receivers
                     activate for the next round.
* run_delayed_start  the source sends exactly once and mutes permanently
                     (until re-informed); the receiver runs standard push.

Engines are single-threaded and deterministic given their stream; run many
of them concurrently on disjoint streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ExecutionTrace, GossipConfig, RoundTrace

_BLOCK = 4096


class ProtocolState:
    """Mutable run state: informed set I, active set A, and the trace so far.

    A is multiplicity-free and kept alongside an O(1) membership flag and a
    position index so activation/deactivation are constant time.
    """

    def __init__(self, config: GossipConfig):
        self.config = config
        n = config.n
        self.informed = bytearray(n)
        self.informed[config.source] = 1
        self.n_informed = 1
        self.active = [config.source]
        self._active_flag = bytearray(n)
        self._active_flag[config.source] = 1
        self._active_pos = [0] * n
        self.senders: list[int] = []
        self.receivers: list[int] = []

    def is_active(self, node: int) -> bool:
        return bool(self._active_flag[node])

    def activate(self, node: int) -> None:
        if not self._active_flag[node]:
            self._active_flag[node] = 1
            self._active_pos[node] = len(self.active)
            self.active.append(node)

    def deactivate(self, node: int) -> None:
        if self._active_flag[node]:
            p = self._active_pos[node]
            last = self.active[-1]
            self.active[p] = last
            self._active_pos[last] = p
            self.active.pop()
            self._active_flag[node] = 0

    def tell_gossip(self, sender: int, rng: np.random.Generator) -> int:
        """One gossip call: `sender` tells a uniformly random node.

        The receiver is informed, activated, and the event appended to the
        trace.  Raises if the sender is not informed (protocol violation).
        """
        if not self.informed[sender]:
            raise RuntimeError(f"protocol violation: sender {sender} is not informed")
        receiver = int(rng.integers(0, self.config.n))
        if not self.informed[receiver]:
            self.informed[receiver] = 1
            self.n_informed += 1
        self.activate(receiver)
        self.senders.append(sender)
        self.receivers.append(receiver)
        return receiver

    def trace(self) -> ExecutionTrace:
        return ExecutionTrace(
            config=self.config,
            senders=np.array(self.senders, dtype=np.int64),
            receivers=np.array(self.receivers, dtype=np.int64),
            complete=self.n_informed == self.config.n,
        )


@dataclass
class SequentialRun:
    """Raw output of the sequential engine loop."""

    senders: list[int]
    receivers: list[int]
    n_informed: int
    steps: int
    stopped_early: bool  # an observation callback ended the run

    def complete(self, config: GossipConfig) -> bool:
        return self.n_informed == config.n

    def capped(self, config: GossipConfig) -> bool:
        return not self.complete(config) and not self.stopped_early


def _sequential_run(
    config: GossipConfig,
    rng: np.random.Generator,
    observed_stop: Optional[Callable[[int], bool]] = None,
    collect_events: bool = True,
) -> SequentialRun:
    """Inner loop shared by run_async and run_delayed_start.

    observed_stop, when given, is called with the sender of each event whose
    receiver is curious; the loop exits once it returns True.  Estimators
    that only need the observation prefix run with collect_events=False.
    """
    n = config.n
    s = config.s
    cap = config.max_steps
    curious_lo = config.curious_lo
    delayed = config.variant == "delayed_start"

    informed = bytearray(n)
    informed[config.source] = 1
    n_informed = 1
    active = [config.source]
    active_flag = bytearray(n)
    active_flag[config.source] = 1
    active_pos = [0] * n
    senders: list[int] = []
    receivers: list[int] = []

    # Block-drawn randomness, unboxed to plain Python scalars: receivers come
    # from an integer block; sender picks (only needed while |A| > 1) and
    # stay/mute coins (only needed for 0 < s < 1) from a float block.
    # Blocks start small (early-stopped runs often need a few dozen draws)
    # and grow to _BLOCK.
    block = 256
    targets = rng.integers(0, n, size=block).tolist()
    tptr = 0
    uniforms = rng.random(block).tolist()
    uptr = 0
    use_coin = 0.0 < s < 1.0
    always_mute = s == 0.0
    stay_p = s
    stopped = False
    step = 0

    while n_informed < n and step < cap and not stopped:
        if tptr == len(targets):
            block = min(block * 4, _BLOCK)
            targets = rng.integers(0, n, size=block).tolist()
            tptr = 0
        if uptr + 2 > len(uniforms):
            uniforms = rng.random(block).tolist()
            uptr = 0

        la = len(active)
        if la == 1:
            i = active[0]
        else:
            k = int(uniforms[uptr] * la)
            uptr += 1
            if k == la:  # guard against float round-up at the interval edge
                k = la - 1
            i = active[k]

        if always_mute:
            mute = True
        elif use_coin:
            mute = uniforms[uptr] >= stay_p
            uptr += 1
        else:
            mute = False
        if delayed and step == 0:
            mute = True  # the source's single send, then permanent silence
        if mute:
            p = active_pos[i]
            last = active[-1]
            active[p] = last
            active_pos[last] = p
            active.pop()
            active_flag[i] = 0

        j = targets[tptr]
        tptr += 1
        if not informed[j]:
            informed[j] = 1
            n_informed += 1
        if not active_flag[j]:
            active_flag[j] = 1
            active_pos[j] = len(active)
            active.append(j)

        if collect_events:
            senders.append(i)
            receivers.append(j)
        step += 1
        if observed_stop is not None and j >= curious_lo:
            stopped = observed_stop(i)

    return SequentialRun(senders, receivers, n_informed, step, stopped)


def run_async(config: GossipConfig, rng: np.random.Generator) -> ExecutionTrace:
    """Run the asynchronous muting protocol to completion (or the step cap).

    Per step: draw a sender uniformly from A, remove it from A with
    probability 1-s, call tell_gossip, add the receiver to A.  The loop
    exits once every node is informed.
    """
    if config.variant != "parameterized":
        raise ValueError("run_async requires variant='parameterized'")
    run = _sequential_run(config, rng)
    return ExecutionTrace(
        config=config,
        senders=np.array(run.senders, dtype=np.int64),
        receivers=np.array(run.receivers, dtype=np.int64),
        complete=run.complete(config),
    )


def run_delayed_start(config: GossipConfig, rng: np.random.Generator) -> ExecutionTrace:
    """Run delayed-start gossip: one send from the source, then standard push
    from the receiver.  The source re-activates only by receiving the rumor
    (after which it behaves like any other pushing node)."""
    if config.variant != "delayed_start":
        raise ValueError("run_delayed_start requires variant='delayed_start'")
    run = _sequential_run(config, rng)
    return ExecutionTrace(
        config=config,
        senders=np.array(run.senders, dtype=np.int64),
        receivers=np.array(run.receivers, dtype=np.int64),
        complete=run.complete(config),
    )


def run_trace(config: GossipConfig, rng: np.random.Generator) -> ExecutionTrace:
    """Dispatch to the sequential engine matching config.variant."""
    if config.variant == "delayed_start":
        return run_delayed_start(config, rng)
    return run_async(config, rng)


def run_sync(config: GossipConfig, rng: np.random.Generator) -> tuple[ExecutionTrace, RoundTrace]:
    """Run the round-based engine until all nodes are informed.

    Per round, the snapshot of A at round start each sends one message
    (event order within a round follows ascending node id; ties are broken
    arbitrarily anyway); each sender then independently stays active with
    probability s, and all of the round's receivers are active next round.
    A node that stays and also receives remains a single entry of A.
    """
    if config.variant != "parameterized":
        raise ValueError("run_sync requires variant='parameterized'")
    n = config.n
    s = config.s
    cap = config.max_steps

    informed = np.zeros(n, dtype=bool)
    informed[config.source] = True
    active = np.zeros(n, dtype=bool)
    active[config.source] = True

    sender_chunks: list[np.ndarray] = []
    receiver_chunks: list[np.ndarray] = []
    informed_per_round: list[int] = []
    active_per_round: list[int] = []
    messages_per_round: list[int] = []
    total_messages = 0
    n_informed = 1

    while n_informed < n and total_messages < cap:
        snd = np.flatnonzero(active)
        rcv = rng.integers(0, n, size=snd.size)
        stay = rng.random(snd.size) < s

        informed[rcv] = True
        nxt = np.zeros(n, dtype=bool)
        nxt[rcv] = True
        nxt[snd[stay]] = True
        active = nxt

        sender_chunks.append(snd)
        receiver_chunks.append(rcv)
        total_messages += snd.size
        n_informed = int(np.count_nonzero(informed))
        informed_per_round.append(n_informed)
        active_per_round.append(int(np.count_nonzero(active)))
        messages_per_round.append(snd.size)

    trace = ExecutionTrace(
        config=config,
        senders=np.concatenate(sender_chunks) if sender_chunks else np.empty(0, np.int64),
        receivers=np.concatenate(receiver_chunks) if receiver_chunks else np.empty(0, np.int64),
        complete=n_informed == n,
    )
    rounds = RoundTrace(
        informed=np.array(informed_per_round, dtype=np.int64),
        active=np.array(active_per_round, dtype=np.int64),
        messages=np.array(messages_per_round, dtype=np.int64),
    )
    return trace, rounds
