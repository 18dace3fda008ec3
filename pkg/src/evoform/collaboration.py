"""Rooms, peer visibility, and user-triggered case injection.

Each session owns one IGA population and a search space that can only
grow.  Sessions paired in a room can see the top of each other's current
generation and copy individuals across; an injected copy replaces the
host's worst individual, arrives with a biased fitness so it survives a
few generations, and unions its header masks into the host's space.

Every mutation appends one event to the room log (line-delimited JSON
wire form), which is sufficient to replay a room bit-exactly.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from typing import Optional

from .codec import CodecConfig, SearchSpace, genome_to_hex
from .errors import (
    InvalidSpaceError,
    NotAMemberError,
    NotPermittedError,
    StaleDonorError,
    UnknownIdError,
)
from .evolution import GAParams, Individual, Population, Provenance, seed_population, step

#: Multiplier mixing the generation counter into per-step seeds.
_STEP_SEED_MIX = 2654435761
_SEED_MASK = (1 << 63) - 1


@dataclass
class Event:
    seq: int
    session: str
    kind: str  # generation | injection | selection | space-expanded
    payload: dict

    def to_json(self) -> str:
        return json.dumps({"seq": self.seq, "session": self.session,
                           "kind": self.kind, "payload": self.payload},
                          separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "Event":
        record = json.loads(line)
        return cls(record["seq"], record["session"], record["kind"], record["payload"])


@dataclass
class Session:
    id: str
    owner: str
    space: SearchSpace
    population: Population
    mesh_id: str
    params: GAParams
    seed: int
    config: CodecConfig
    room_id: Optional[str] = None
    pending_picks: frozenset = frozenset()
    history: list = field(default_factory=list)

    def step_seed(self) -> int:
        return (self.seed + self.population.generation * _STEP_SEED_MIX) & _SEED_MASK


@dataclass
class Room:
    id: str
    member_ids: list[str]
    visibility_k: int = 3
    next_seq: int = 1
    events: list[Event] = field(default_factory=list)


def _top_k(population: Population, k: int) -> list[Individual]:
    ranked = sorted(population.individuals, key=lambda ind: (-ind.fitness, ind.id))
    return ranked[:k]


class Hub:
    """Registry owning sessions and rooms; all mutations are serialized per hub."""

    def __init__(self, config: CodecConfig = CodecConfig(),
                 params: GAParams = GAParams(), seed: int = 0):
        self.config = config
        self.default_params = params
        self.seed = seed
        self.sessions: dict[str, Session] = {}
        self.rooms: dict[str, Room] = {}
        self._counter = 0
        self._lock = threading.RLock()
        self._event_cv = threading.Condition(self._lock)
        self.event_sink = None  # optional callable(json_line) for log persistence

    # -- lookups ----------------------------------------------------------

    def session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownIdError(f"unknown session {session_id!r}") from None

    def room(self, room_id: str) -> Room:
        try:
            return self.rooms[room_id]
        except KeyError:
            raise UnknownIdError(f"unknown room {room_id!r}") from None

    def _next_id(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}{self._counter}"

    # -- construction ------------------------------------------------------

    def create_session(self, owner: str, space: SearchSpace,
                       mesh_id: str = "sphere",
                       params: Optional[GAParams] = None,
                       seed: Optional[int] = None) -> Session:
        with self._lock:
            params = params or self.default_params
            session_id = self._next_id("s")
            session_seed = self.seed + self._counter if seed is None else seed
            population = seed_population(self.config, params, space, session_seed)
            session = Session(session_id, owner, space, population,
                              mesh_id, params, session_seed, self.config)
            self.sessions[session_id] = session
            return session

    def create_room(self, members: list[tuple[str, SearchSpace]],
                    params: Optional[GAParams] = None,
                    visibility_k: int = 3,
                    mesh_id: str = "sphere") -> Room:
        """Create a room and one freshly seeded session per member."""
        if len(members) < 2:
            raise InvalidSpaceError("a room needs at least 2 members")
        with self._lock:
            import random as _random
            room_id = self._next_id("r")
            seed_rng = _random.Random(self.seed ^ hash_stable(room_id))
            session_ids = []
            for owner, space in members:
                session = self.create_session(owner, space, mesh_id, params,
                                              seed=seed_rng.getrandbits(32))
                session.room_id = room_id
                session_ids.append(session.id)
            room = Room(room_id, session_ids, visibility_k=visibility_k)
            self.rooms[room_id] = room
            return room

    # -- events ------------------------------------------------------------

    def _emit(self, session: Session, kind: str, payload: dict) -> Event:
        if session.room_id is not None:
            room = self.rooms[session.room_id]
            event = Event(room.next_seq, session.id, kind, payload)
            room.next_seq += 1
            room.events.append(event)
        else:
            event = Event(len(session.history) + 1, session.id, kind, payload)
        session.history.append(event)
        if self.event_sink is not None:
            self.event_sink(event.to_json())
        self._event_cv.notify_all()
        return event

    def events_since(self, room_id: str, since: int = 0,
                     wait_seconds: float = 0.0) -> list[Event]:
        """Events with seq > since; optionally long-poll until one arrives."""
        with self._lock:
            room = self.room(room_id)
            fresh = [e for e in room.events if e.seq > since]
            if fresh or wait_seconds <= 0.0:
                return list(fresh)
            self._event_cv.wait(timeout=wait_seconds)
            return [e for e in room.events if e.seq > since]

    def event_log(self, room_id: str) -> str:
        with self._lock:
            return "".join(e.to_json() + "\n" for e in self.room(room_id).events)

    # -- session operations --------------------------------------------------

    def set_picks(self, session_id: str, indices) -> None:
        with self._lock:
            session = self.session(session_id)
            from .evolution import _validate_picks
            picks = _validate_picks(session.population, indices)
            session.pending_picks = picks
            self._emit(session, "selection", {"indices": sorted(picks)})

    def step_session(self, session_id: str) -> Session:
        with self._lock:
            session = self.session(session_id)
            picks = session.pending_picks
            session.population = step(session.population, picks,
                                      session.params, session.step_seed())
            session.pending_picks = frozenset()
            self._emit(session, "generation",
                       {"generation": session.population.generation})
            return session

    def peer_sample(self, session_id: str) -> dict[str, list[Individual]]:
        """Top visibility_k individuals of each other room member, by fitness."""
        with self._lock:
            viewer = self.session(session_id)
            if viewer.room_id is None:
                raise NotAMemberError(f"session {session_id!r} is not in a room")
            room = self.rooms[viewer.room_id]
            if session_id not in room.member_ids:
                raise NotAMemberError(f"session {session_id!r} is not a room member")
            return {
                peer_id: _top_k(self.sessions[peer_id].population, room.visibility_k)
                for peer_id in room.member_ids if peer_id != session_id
            }

    def inject(self, host_id: str, donor_session_id: str,
               individual_id: int) -> Session:
        """Copy a visible peer individual over the host's worst slot."""
        with self._lock:
            host = self.session(host_id)
            donor_session = self.session(donor_session_id)
            if (host.room_id is None or donor_session.room_id != host.room_id):
                raise NotPermittedError(
                    f"sessions {host_id!r} and {donor_session_id!r} share no room")
            visible = self.peer_sample(host_id).get(donor_session_id, [])
            donor = next((ind for ind in visible if ind.id == individual_id), None)
            if donor is None:
                raise StaleDonorError(
                    f"individual {individual_id} is not currently visible "
                    f"from session {donor_session_id!r}")

            pop = host.population
            # worst slot: lowest fitness, ties broken toward the higher id
            worst_pos = min(range(pop.size),
                            key=lambda i: (pop.individuals[i].fitness,
                                           -pop.individuals[i].id))
            peak = max(ind.fitness for ind in pop.individuals)
            incoming = Individual(
                pop.next_id, donor.genome, fitness=peak,
                provenance=Provenance.injected(donor_session_id,
                                               host.params.bias_generations))
            individuals = list(pop.individuals)
            individuals[worst_pos] = incoming
            host.population = replace(pop, individuals=tuple(individuals),
                                      next_id=pop.next_id + 1)

            before = host.space
            host.space = host.space.union(donor.genome.effective_space())
            self._emit(host, "injection", {
                "donor_session": donor_session_id,
                "individual_id": individual_id,
                "genome": genome_to_hex(donor.genome),
                "replaced_slot": worst_pos,
            })
            if host.space != before:
                self._emit(host, "space-expanded", {
                    "channels": "".join(host.space.channels),
                    "variables": "".join(host.space.variables),
                })
            return host

    # -- replay --------------------------------------------------------------

    def replay_events(self, events: list[Event]) -> None:
        """Re-apply a recorded event log; state-derived kinds are skipped."""
        for event in events:
            if event.kind == "selection":
                self.set_picks(event.session, event.payload["indices"])
            elif event.kind == "generation":
                self.step_session(event.session)
            elif event.kind == "injection":
                self.inject(event.session,
                            event.payload["donor_session"],
                            event.payload["individual_id"])
            # space-expanded is derived from injection; nothing to apply


def hash_stable(text: str) -> int:
    """Deterministic string hash (builtin hash of str is salted per process)."""
    value = 0
    for ch in text:
        value = (value * 131 + ord(ch)) & _SEED_MASK
    return value
