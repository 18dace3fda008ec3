"""HTTP front door: rooms and sessions over JSON, OBJ/shader previews,
and a per-room event feed (long-poll JSON plus an SSE stream).

All state of record lives in the Hub; handlers only translate between
wire formats and hub operations, so a client can be rebuilt from the
event log plus the original room request.
"""

from __future__ import annotations

import time
from typing import Optional

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from . import mesh as meshmod
from .codec import CodecConfig, SearchSpace, genome_to_hex
from .collaboration import Event, Hub, Session
from .config import ServiceConfig
from .errors import (
    EvoformError,
    InvalidMaskError,
    InvalidPickError,
    InvalidSpaceError,
    MeshFormatError,
    NotAMemberError,
    NotPermittedError,
    StaleDonorError,
    UnknownIdError,
)
from .evolution import GAParams, Individual
from .expression import TimeParam, emit_source, genome_tree

_STATUS = {
    UnknownIdError: 404,
    NotAMemberError: 404,
    StaleDonorError: 409,
    NotPermittedError: 409,
    InvalidPickError: 422,
    InvalidMaskError: 422,
    InvalidSpaceError: 422,
    MeshFormatError: 422,
}

MAX_LONG_POLL_SECONDS = 30.0


def _space_json(space: SearchSpace) -> dict:
    return {"channels": "".join(space.channels), "variables": "".join(space.variables)}


def _parse_space(payload: dict) -> SearchSpace:
    try:
        return SearchSpace.from_names(payload["channels"], payload["variables"])
    except (KeyError, ValueError) as exc:
        raise InvalidSpaceError(f"bad space spec {payload!r}") from exc


def _individual_json(ind: Individual) -> dict:
    tree = genome_tree(ind.genome)
    return {
        "id": ind.id,
        "genome": genome_to_hex(ind.genome),
        "depth": ind.genome.config.depth,
        "fitness": ind.fitness,
        "provenance": {
            "kind": ind.provenance.kind,
            "origin": ind.provenance.origin,
            "bias_remaining": ind.provenance.bias_remaining,
        },
        "source": emit_source(tree, ind.genome.effective_channel_mask()),
    }


def _session_json(session: Session) -> dict:
    return {
        "id": session.id,
        "owner": session.owner,
        "room": session.room_id,
        "mesh": session.mesh_id,
        "generation": session.population.generation,
        "space": _space_json(session.space),
        "params": {
            "N": session.params.N,
            "crossover_rate": session.params.crossover_rate,
            "mutation_rate": session.params.resolved_mutation_rate(session.config),
            "scaling_C": session.params.scaling_C,
            "pick_fitness": session.params.pick_fitness,
            "floor_fitness": session.params.floor_fitness,
            "bias_generations": session.params.bias_generations,
        },
    }


def _event_json(event: Event, room_id: str) -> dict:
    return {"seq": event.seq, "room": room_id, "session": event.session,
            "kind": event.kind, "payload": event.payload}


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    hub = Hub(CodecConfig(config.depth), config.ga, seed=config.seed)
    if config.event_log:
        log_path = config.event_log

        def sink(line: str) -> None:
            with open(log_path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

        hub.event_sink = sink

    meshes: dict[str, meshmod.Mesh] = {
        name: meshmod.load_fixture(name) for name in meshmod.FIXTURE_NAMES
    }
    app = FastAPI(title="evoform")
    app.state.hub = hub
    app.state.meshes = meshes
    app.state.config = config

    @app.exception_handler(EvoformError)
    async def domain_error(_: Request, exc: EvoformError):
        status = next((code for cls, code in _STATUS.items() if isinstance(exc, cls)), 422)
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": str(exc)})

    def find_individual(session: Session, individual_id: int) -> Individual:
        for ind in session.population.individuals:
            if ind.id == individual_id:
                return ind
        raise UnknownIdError(f"individual {individual_id} not in the current generation")

    @app.post("/rooms")
    def create_room(body: dict = Body(...)):
        members = body.get("members") or []
        if len(members) < 2:
            raise InvalidSpaceError("a room needs at least 2 members")
        params = GAParams(**body["params"]) if body.get("params") else None
        room = hub.create_room(
            [(m.get("name", f"user{i}"), _parse_space(m.get("space", {})))
             for i, m in enumerate(members)],
            params=params,
            visibility_k=body.get("visibility_k", config.visibility_k),
            mesh_id=body.get("mesh", "sphere"),
        )
        return {
            "room": room.id,
            "sessions": [
                {"id": sid, "name": hub.session(sid).owner}
                for sid in room.member_ids
            ],
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_json(hub.session(session_id))

    @app.get("/sessions/{session_id}/population")
    def get_population(session_id: str):
        session = hub.session(session_id)
        return {
            "generation": session.population.generation,
            "individuals": [_individual_json(i) for i in session.population.individuals],
        }

    @app.post("/sessions/{session_id}/picks", status_code=204)
    def post_picks(session_id: str, body: dict = Body(...)):
        hub.set_picks(session_id, body.get("indices", []))
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/step")
    def post_step(session_id: str):
        session = hub.step_session(session_id)
        return {
            "generation": session.population.generation,
            "individuals": [_individual_json(i) for i in session.population.individuals],
        }

    @app.get("/sessions/{session_id}/peers")
    def get_peers(session_id: str):
        sample = hub.peer_sample(session_id)
        return {
            "peers": {
                peer: [_individual_json(i) for i in individuals]
                for peer, individuals in sample.items()
            }
        }

    @app.post("/sessions/{session_id}/inject")
    def post_inject(session_id: str, body: dict = Body(...)):
        try:
            donor_session = body["donor_session"]
            individual_id = int(body["individual_id"])
        except (KeyError, TypeError, ValueError):
            raise InvalidPickError("inject needs donor_session and individual_id")
        session = hub.inject(session_id, donor_session, individual_id)
        return {"space": _space_json(session.space)}

    @app.get("/sessions/{session_id}/individuals/{individual_id}/shader",
             response_class=PlainTextResponse)
    def get_shader(session_id: str, individual_id: int):
        session = hub.session(session_id)
        ind = find_individual(session, individual_id)
        tree = genome_tree(ind.genome)
        return emit_source(tree, ind.genome.effective_channel_mask()) + "\n"

    @app.get("/sessions/{session_id}/individuals/{individual_id}/mesh",
             response_class=PlainTextResponse)
    def get_displaced_mesh(session_id: str, individual_id: int, t: float = 0.0):
        session = hub.session(session_id)
        ind = find_individual(session, individual_id)
        try:
            base = meshes[session.mesh_id]
        except KeyError:
            raise UnknownIdError(f"unknown mesh {session.mesh_id!r}") from None
        tree = genome_tree(ind.genome)
        displaced = meshmod.displace_mesh(base, tree,
                                          ind.genome.effective_channel_mask(),
                                          TimeParam(t))
        return meshmod.export_obj(displaced)

    @app.post("/meshes")
    async def post_mesh(request: Request):
        text = (await request.body()).decode("utf-8")
        parsed = meshmod.load_obj(text)
        mesh_id = f"m{len(meshes) + 1}"
        meshes[mesh_id] = parsed
        return {"id": mesh_id, "vertices": len(parsed.vertices), "faces": len(parsed.faces)}

    @app.get("/meshes/{mesh_id}", response_class=PlainTextResponse)
    def get_mesh(mesh_id: str):
        try:
            return meshmod.export_obj(meshes[mesh_id])
        except KeyError:
            raise UnknownIdError(f"unknown mesh {mesh_id!r}") from None

    @app.get("/rooms/{room_id}/events")
    def get_events(room_id: str, since: int = 0, wait: float = 0.0):
        wait = min(max(wait, 0.0), MAX_LONG_POLL_SECONDS)
        events = hub.events_since(room_id, since, wait_seconds=wait)
        return {"events": [_event_json(e, room_id) for e in events]}

    @app.get("/rooms/{room_id}/events/stream")
    def stream_events(room_id: str, since: int = 0, lifetime: float = 30.0):
        hub.room(room_id)  # 404 early for unknown rooms

        def generate():
            cursor = since
            deadline = time.monotonic() + min(lifetime, 300.0)
            while time.monotonic() < deadline:
                fresh = hub.events_since(room_id, cursor, wait_seconds=1.0)
                for event in fresh:
                    cursor = max(cursor, event.seq)
                    yield f"id: {event.seq}\ndata: {event.to_json()}\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    return app


def run(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")
