"""Simulated two-way noiseless channel with per-direction bit accounting.

Each party of a protocol is a generator. It yields a :class:`Message` to send
one, or the :data:`RECEIVE` sentinel to block until the next message addressed
to it arrives (the generator is resumed with that message). The receiver's
generator returns the restored sequence.

Two costs are tracked for every message: ``wire_bits``, the length of the
framed payload, and ``ideal_bits``, the real-valued log2 cost used when
comparing against closed-form bounds.
"""

from __future__ import annotations

import enum
import queue
import threading
from collections import deque
from collections.abc import Callable, Generator
from dataclasses import dataclass, field

from .codec import BitString


class Direction(enum.Enum):
    TtoR = "TtoR"
    RtoT = "RtoT"


class ChannelError(RuntimeError):
    """The two parties disagreed about who speaks next."""


@dataclass(frozen=True)
class Message:
    direction: Direction
    kind: str
    payload: BitString
    ideal_bits: float
    deviation: bool = False

    def __post_init__(self) -> None:
        if self.ideal_bits > self.wire_bits + 1 + 1e-9:
            raise ValueError(f"{self.kind}: ideal cost {self.ideal_bits} exceeds wire cost {self.wire_bits} + 1")

    @property
    def wire_bits(self) -> int:
        return self.payload.length


class _Receive:
    def __repr__(self) -> str:
        return "RECEIVE"


RECEIVE = _Receive()

Party = Generator  # yields Message | RECEIVE, receives Message | None


@dataclass(frozen=True)
class DirectionTotals:
    wire: int = 0
    ideal: float = 0.0
    wire_excl_dev: int = 0
    ideal_excl_dev: float = 0.0

    @property
    def deviation_wire(self) -> int:
        return self.wire - self.wire_excl_dev

    @property
    def deviation_ideal(self) -> float:
        return self.ideal - self.ideal_excl_dev


@dataclass(frozen=True)
class Totals:
    TtoR: DirectionTotals
    RtoT: DirectionTotals
    rounds: int

    def __getitem__(self, direction: Direction) -> DirectionTotals:
        return self.TtoR if direction is Direction.TtoR else self.RtoT


@dataclass
class Transcript:
    """Ordered message log of one synchronization session."""

    messages: list[Message] = field(default_factory=list)
    budget_tr: float | None = None
    budget_rt: float | None = None

    def __post_init__(self) -> None:
        self._wire = {Direction.TtoR: 0, Direction.RtoT: 0}
        self._wire_excl_dev = {Direction.TtoR: 0, Direction.RtoT: 0}
        self._ideal = {Direction.TtoR: 0.0, Direction.RtoT: 0.0}
        self._ideal_excl_dev = {Direction.TtoR: 0.0, Direction.RtoT: 0.0}
        self._rounds = 0
        msgs, self.messages = self.messages, []
        for m in msgs:
            self.send(m)

    def send(self, m: Message) -> "Transcript":
        if m.direction is Direction.RtoT and (not self.messages or self.messages[-1].direction is Direction.TtoR):
            self._rounds += 1
        self.messages.append(m)
        self._wire[m.direction] += m.wire_bits
        self._ideal[m.direction] += m.ideal_bits
        if not m.deviation:
            self._wire_excl_dev[m.direction] += m.wire_bits
            self._ideal_excl_dev[m.direction] += m.ideal_bits
        return self

    def direction_totals(self, direction: Direction) -> DirectionTotals:
        return DirectionTotals(
            self._wire[direction], self._ideal[direction], self._wire_excl_dev[direction], self._ideal_excl_dev[direction]
        )

    def totals(self) -> Totals:
        return Totals(self.direction_totals(Direction.TtoR), self.direction_totals(Direction.RtoT), self._rounds)

    @property
    def rounds(self) -> int:
        """Number of times the receiver took the floor."""
        return self._rounds

    def exceeded(self) -> dict[str, bool]:
        """Post-hoc budget check on wire bits; a missing budget never trips."""
        return {
            "TtoR": self.budget_tr is not None and self._wire[Direction.TtoR] > self.budget_tr,
            "RtoT": self.budget_rt is not None and self._wire[Direction.RtoT] > self.budget_rt,
        }

    def dump(self) -> str:
        return "".join(format_dump_line(k, m) + "\n" for k, m in enumerate(self.messages))


def format_dump_line(index: int, m: Message) -> str:
    return ";".join(
        [
            str(index),
            m.direction.value,
            m.kind,
            str(m.wire_bits),
            f"{m.ideal_bits:.6f}",
            "1" if m.deviation else "0",
            m.payload.hex(),
        ]
    )


def parse_dump_line(line: str) -> tuple[int, Message]:
    index, direction, kind, wire, ideal, dev, payload = line.rstrip("\n").split(";")
    bits = BitString(int(payload, 16) if payload else 0, int(wire))
    return int(index), Message(Direction(direction), kind, bits, float(ideal), dev == "1")


# -- drivers ----------------------------------------------------------------


def run_session(transmitter: Party, receiver: Party, transcript: Transcript | None = None):
    """Run both parties cooperatively in one thread.

    Returns ``(receiver_result, transcript)``. Raises :class:`ChannelError` on
    deadlock, on a message sent in the wrong direction, or if a party finishes
    with unread messages addressed to it.
    """
    transcript = transcript if transcript is not None else Transcript()
    parties = {Direction.TtoR: transmitter, Direction.RtoT: receiver}
    inbox = {Direction.TtoR: deque(), Direction.RtoT: deque()}  # keyed by sender's outgoing direction
    results = {}
    waiting = {Direction.TtoR: False, Direction.RtoT: False}
    resume = {Direction.TtoR: None, Direction.RtoT: None}
    active = Direction.TtoR

    def other(d: Direction) -> Direction:
        return Direction.RtoT if d is Direction.TtoR else Direction.TtoR

    while len(results) < 2:
        if active in results:
            active = other(active)
            if active in results:
                break
        gen = parties[active]
        if waiting[active]:
            if not inbox[active]:
                if other(active) in results or (waiting[other(active)] and not inbox[other(active)]):
                    raise ChannelError(f"{active.value} side is waiting for a message that never comes")
                active = other(active)
                continue
            resume[active] = inbox[active].popleft()
            waiting[active] = False
        try:
            out = gen.send(resume[active])
        except StopIteration as stop:
            results[active] = stop.value
            if inbox[active]:
                raise ChannelError(f"{active.value} side finished with unread messages")
            active = other(active)
            continue
        resume[active] = None
        if out is RECEIVE:
            waiting[active] = True
        elif isinstance(out, Message):
            if out.direction is not active:
                raise ChannelError(f"{active.value} side tried to send {out.kind} as {out.direction.value}")
            transcript.send(out)
            inbox[other(active)].append(out)
        else:
            raise ChannelError(f"party yielded {out!r}")
    for d in inbox:
        if inbox[d]:
            raise ChannelError(f"messages left undelivered to the {d.value} side")
    return results[Direction.RtoT], transcript


def drive_party(party: Party, direction: Direction, send: Callable[[Message], None], recv: Callable[[], Message]):
    """Drive one party against blocking ``send``/``recv`` callables; returns its result."""
    value = None
    while True:
        try:
            out = party.send(value)
        except StopIteration as stop:
            return stop.value
        value = None
        if out is RECEIVE:
            value = recv()
        elif isinstance(out, Message) and out.direction is direction:
            send(out)
        else:
            raise ChannelError(f"{direction.value} side yielded {out!r}")


def run_threaded(transmitter: Party, receiver: Party, timeout: float = 30.0):
    """Run the parties on two threads joined only by message queues."""
    to_r: queue.Queue = queue.Queue()
    to_t: queue.Queue = queue.Queue()
    transcript = Transcript()
    lock = threading.Lock()
    errors: list[BaseException] = []

    def sender(q: queue.Queue):
        def _send(m: Message) -> None:
            with lock:
                transcript.send(m)
            q.put(m)

        return _send

    def t_main() -> None:
        try:
            drive_party(transmitter, Direction.TtoR, sender(to_r), lambda: to_t.get(timeout=timeout))
        except BaseException as exc:  # surfaced in the caller
            errors.append(exc)

    th = threading.Thread(target=t_main, daemon=True)
    th.start()
    result = drive_party(receiver, Direction.RtoT, sender(to_t), lambda: to_r.get(timeout=timeout))
    th.join(timeout)
    if errors:
        raise errors[0]
    return result, transcript
