"""Onboard FIFO queue evolution.

Two engines compute the same numbers. The per-unit engine walks the actual
FIFO of (unit, remaining bytes) pairs and yields event-level detail; the
aggregate engine tracks only the queue length, each target's sub-queue length
(bytes up to and including the target), and the target's own remaining bytes.
Both apply, per slot: arrivals, then transmission from the head, then the
capacity drop from the head with the round-up rule (a positive drop smaller
than one slot volume is raised to a full slot volume, bounded by what is
aboard). A unit counts as downlinked at the slot its last byte is transmitted
and as lost at the slot its first byte is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .scenario import ConstellationScenario

INF = math.inf


def per_slot_capacity(scenario: ConstellationScenario, satellite_id: str | None = None) -> int:
    """Transmissible bytes per slot: floor(rate * slot_seconds / 8)."""
    sat_id = satellite_id or scenario.target.satellite_id
    sat = scenario.satellite(sat_id)
    return sat.downlink_rate_bps * scenario.time.slot_seconds // 8


@dataclass(frozen=True)
class QueueWorld:
    """Everything the queue evolution depends on besides the attack strategy."""

    initial_units: tuple[tuple[str, int], ...]
    arrivals: tuple[tuple[int, tuple[tuple[str, int], ...]], ...]
    transmissible: frozenset[int]
    capacity_bytes: int
    volume_bytes: int
    t0: int
    horizon: int

    def __post_init__(self) -> None:
        if self.capacity_bytes <= 0:
            raise ValidationError("capacity_bytes must be positive")
        if self.volume_bytes <= 0:
            raise ValidationError("volume_bytes must be positive")
        if not 0 <= self.t0 <= self.horizon:
            raise ValidationError("t0 must lie within [0, horizon]")

    def arrivals_map(self) -> dict[int, tuple[tuple[str, int], ...]]:
        return dict(self.arrivals)

    def unit_order(self) -> tuple[str, ...]:
        ids = [uid for uid, _ in self.initial_units]
        for _, units in sorted(self.arrivals):
            ids.extend(uid for uid, _ in units)
        return tuple(ids)


@dataclass(frozen=True)
class QueueState:
    """FIFO of (unit_id, remaining_bytes) at the end of a slot."""

    units: tuple[tuple[str, int], ...]
    slot: int

    @property
    def total_bytes(self) -> int:
        return sum(rem for _, rem in self.units)

    def subqueue_bytes(self, unit_id: str) -> int:
        total = 0
        for uid, rem in self.units:
            total += rem
            if uid == unit_id:
                return total
        return 0


@dataclass(frozen=True)
class SlotOutcome:
    slot: int
    transmitted_bytes: int
    dropped_bytes: int
    transmitted_unit_ids: tuple[str, ...]
    dropped_unit_ids: tuple[str, ...]

    @property
    def delta_bytes(self) -> int:
        return self.transmitted_bytes + self.dropped_bytes


def _rounded_drop(length: int, capacity: int, volume: int) -> int:
    """Capacity drop with the round-up rule, bounded by the queue length."""
    raw = length - capacity
    if raw <= 0:
        return 0
    drop = volume if raw < volume else raw
    return min(drop, length)


def step(state: QueueState, arrivals: list[tuple[str, int]], transmissible: bool,
         attacked: bool, capacity_bytes: int, volume_bytes: int,
         ) -> tuple[QueueState, SlotOutcome]:
    """One slot of the per-unit engine: arrivals, transmission, capacity drop."""
    slot = state.slot + 1
    queue = [[uid, rem] for uid, rem in state.units]
    queue.extend([uid, size] for uid, size in arrivals)

    transmitted = 0
    done: list[str] = []
    if transmissible and not attacked:
        budget = volume_bytes
        while budget > 0 and queue:
            uid, rem = queue[0]
            take = min(budget, rem)
            queue[0][1] -= take
            budget -= take
            transmitted += take
            if queue[0][1] == 0:
                done.append(uid)
                queue.pop(0)

    length = sum(rem for _, rem in queue)
    drop = _rounded_drop(length, capacity_bytes, volume_bytes)
    dropped = 0
    lost: list[str] = []
    while dropped < drop:
        uid, rem = queue[0]
        take = min(drop - dropped, rem)
        queue[0][1] -= take
        dropped += take
        lost.append(uid)
        if queue[0][1] == 0:
            queue.pop(0)

    new_state = QueueState(tuple((uid, rem) for uid, rem in queue), slot)
    outcome = SlotOutcome(slot, transmitted, dropped, tuple(done), tuple(lost))
    return new_state, outcome


@dataclass(frozen=True)
class QueueTrace:
    """Evolution over [t0, horizon] plus per-target landmarks.

    evacuation maps a tracked unit to the slot its last byte was transmitted,
    or infinity if any of its bytes were dropped. last_full is the latest slot
    in [t0, t_e) at which the queue sat exactly at capacity, defaulting to t0.
    """

    t0: int
    horizon: int
    queue_bytes: tuple[int, ...]
    outcomes: tuple[SlotOutcome, ...]
    subqueue: dict[str, tuple[int, ...]]
    evacuation: dict[str, float]
    last_full: dict[str, int]
    dropped: dict[str, bool]
    drop_slot: dict[str, int | None]
    initial_total: int
    arrived_total: int
    transmitted_total: int
    dropped_total: int
    remaining_total: int

    def queue_at(self, slot: int) -> int:
        return self.queue_bytes[slot - self.t0]

    def subqueue_at(self, unit_id: str, slot: int) -> int:
        return self.subqueue[unit_id][slot - self.t0]

    def t_e(self, unit_id: str) -> float:
        return self.evacuation[unit_id]

    def t_lb(self, unit_id: str) -> int:
        return self.last_full[unit_id]


def _landmarks(t0: int, capacity: int, queue_bytes: list[int],
               evacuation: dict[str, float]) -> dict[str, int]:
    full_slots = [t0 + i for i, q in enumerate(queue_bytes) if q == capacity]
    last_full = {}
    for uid, te in evacuation.items():
        candidates = [t for t in full_slots if t < te]
        last_full[uid] = max(candidates) if candidates else t0
    return last_full


def evolve(world: QueueWorld, attacked: frozenset[int] | set[int],
           tracked: tuple[str, ...]) -> QueueTrace:
    """Per-unit engine over [t0, horizon] with attacked slots transmitting nothing."""
    arrivals = world.arrivals_map()
    state = QueueState(world.initial_units, world.t0 - 1)
    initial_total = state.total_bytes
    arrived_total = 0
    transmitted_total = 0
    dropped_total = 0

    queue_bytes: list[int] = []
    outcomes: list[SlotOutcome] = []
    subqueue: dict[str, list[int]] = {uid: [] for uid in tracked}
    evacuation: dict[str, float] = {}
    dropped: dict[str, bool] = {uid: False for uid in tracked}
    drop_slot: dict[str, int | None] = {uid: None for uid in tracked}

    for t in range(world.t0, world.horizon + 1):
        units_in = list(arrivals.get(t, ()))
        arrived_total += sum(size for _, size in units_in)
        state, outcome = step(state, units_in, t in world.transmissible,
                              t in attacked, world.capacity_bytes, world.volume_bytes)
        transmitted_total += outcome.transmitted_bytes
        dropped_total += outcome.dropped_bytes
        queue_bytes.append(state.total_bytes)
        outcomes.append(outcome)
        for uid in tracked:
            if not dropped[uid] and uid in outcome.dropped_unit_ids:
                dropped[uid] = True
                drop_slot[uid] = t
                evacuation[uid] = INF
            if uid not in evacuation and uid in outcome.transmitted_unit_ids:
                evacuation[uid] = t
            # a partially dropped unit may leave bytes aboard; its sub-queue is void
            subqueue[uid].append(0 if dropped[uid] else state.subqueue_bytes(uid))

    for uid in tracked:
        evacuation.setdefault(uid, INF)

    return QueueTrace(
        t0=world.t0,
        horizon=world.horizon,
        queue_bytes=tuple(queue_bytes),
        outcomes=tuple(outcomes),
        subqueue={uid: tuple(vals) for uid, vals in subqueue.items()},
        evacuation=evacuation,
        last_full=_landmarks(world.t0, world.capacity_bytes, queue_bytes, evacuation),
        dropped=dropped,
        drop_slot=drop_slot,
        initial_total=initial_total,
        arrived_total=arrived_total,
        transmitted_total=transmitted_total,
        dropped_total=dropped_total,
        remaining_total=state.total_bytes,
    )


def evolve_aggregate(world: QueueWorld, attacked: frozenset[int] | set[int],
                     tracked: tuple[str, ...]) -> QueueTrace:
    """Length-arithmetic engine; byte-identical to evolve() on shared fields.

    Event lists are empty here: only lengths, sub-queue lengths, and the
    per-target landmarks are computed.
    """
    inputs: dict[int, int] = {}
    for t, units in world.arrivals:
        inputs[t] = sum(size for _, size in units)
    arrived_total = sum(amount for t, amount in inputs.items()
                        if world.t0 <= t <= world.horizon)

    # sub-queue length and own size per tracked unit, at t0
    tracked_set = set(tracked)
    sub: dict[str, int] = {}
    own: dict[str, int] = {}
    running = 0
    for uid, size in world.initial_units:
        running += size
        if uid in tracked_set:
            sub[uid] = running
            own[uid] = size
    arrivals = world.arrivals_map()

    initial_total = running
    q = running
    transmitted_total = 0
    dropped_total = 0
    queue_bytes: list[int] = []
    outcomes: list[SlotOutcome] = []
    subqueue: dict[str, list[int]] = {uid: [] for uid in tracked}
    evacuation: dict[str, float] = {}
    dropped: dict[str, bool] = {uid: False for uid in tracked}
    drop_slot: dict[str, int | None] = {uid: None for uid in tracked}
    active: list[str] = [uid for uid in tracked if uid in sub]

    for t in range(world.t0, world.horizon + 1):
        # arrivals join in trace order, each behind the bytes already aboard
        for uid, size in arrivals.get(t, ()):
            q += size
            if uid in tracked_set:
                sub[uid] = q
                own[uid] = size
                active.append(uid)
        o = min(world.volume_bytes, q) if (t in world.transmissible and t not in attacked) else 0
        q -= o
        d = _rounded_drop(q, world.capacity_bytes, world.volume_bytes)
        q -= d
        transmitted_total += o
        dropped_total += d

        for uid in list(active):
            s = sub[uid]
            r = own[uid]
            take = min(s, o)
            into_own = max(0, take - (s - r))
            s -= take
            r -= into_own
            if r == 0:
                evacuation[uid] = t
                sub[uid] = 0
                active.remove(uid)
                continue
            lost = min(s, d)
            if lost > s - r:
                dropped[uid] = True
                drop_slot[uid] = t
                evacuation[uid] = INF
                sub[uid] = 0
                active.remove(uid)
                continue
            sub[uid] = s - lost
            own[uid] = r

        queue_bytes.append(q)
        outcomes.append(SlotOutcome(t, o, d, (), ()))
        for uid in tracked:
            subqueue[uid].append(sub.get(uid, 0))

    for uid in tracked:
        evacuation.setdefault(uid, INF)

    return QueueTrace(
        t0=world.t0,
        horizon=world.horizon,
        queue_bytes=tuple(queue_bytes),
        outcomes=tuple(outcomes),
        subqueue={uid: tuple(vals) for uid, vals in subqueue.items()},
        evacuation=evacuation,
        last_full=_landmarks(world.t0, world.capacity_bytes, queue_bytes, evacuation),
        dropped=dropped,
        drop_slot=drop_slot,
        initial_total=initial_total,
        arrived_total=arrived_total,
        transmitted_total=transmitted_total,
        dropped_total=dropped_total,
        remaining_total=q,
    )


def attack_strength(world: QueueWorld, strategy: frozenset[int], extra_slot: int,
                    unit_id: str) -> float:
    """Added evacuation delay from attacking one more slot; inf if it drops the unit."""
    base = evolve_aggregate(world, strategy, (unit_id,))
    more = evolve_aggregate(world, frozenset(strategy) | {extra_slot}, (unit_id,))
    te0, te1 = base.t_e(unit_id), more.t_e(unit_id)
    if te1 == INF:
        return INF if te0 != INF else 0
    return te1 - te0


TRACE_EVENT_HEADER = ["slot", "event", "unit_id"]


def trace_header(tracked: tuple[str, ...]) -> list[str]:
    return (["slot", "queue_bytes", "tx_bytes", "drop_bytes"]
            + [f"subq_{uid}_bytes" for uid in tracked])


def save_trace(path: str, trace: QueueTrace, tracked: tuple[str, ...],
               fmt: str = "csv") -> None:
    from .output import emit

    rows = []
    for i, outcome in enumerate(trace.outcomes):
        row = [outcome.slot, trace.queue_bytes[i],
               outcome.transmitted_bytes, outcome.dropped_bytes]
        row.extend(trace.subqueue[uid][i] for uid in tracked)
        rows.append(row)
    emit(path, trace_header(tracked), rows, fmt)


def save_trace_events(path: str, trace: QueueTrace, fmt: str = "csv") -> None:
    from .output import emit

    rows = []
    for outcome in trace.outcomes:
        for uid in outcome.transmitted_unit_ids:
            rows.append([outcome.slot, "transmitted", uid])
        for uid in outcome.dropped_unit_ids:
            rows.append([outcome.slot, "dropped", uid])
    emit(path, TRACE_EVENT_HEADER, rows, fmt)
