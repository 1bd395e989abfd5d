"""HTTP JSON service exposing the six lottery transactions.

This is the system's single write path: every state change flows
through the replicated ledger's sequencer, every draw seed comes from
the configured block beacon, and secrets (participant and organizer
tokens) appear only in the response that creates them.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field, replace as dc_replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import core
from .beacon import BeaconConfig, compute_block_hash, fetch_header, fetch_latest_height
from .errors import (
    AlreadyDrawn,
    BadToken,
    BeaconUnavailable,
    BlockLotError,
    BlockNotYetPublished,
    DuplicateMember,
    EmptyEvent,
    InvalidParameter,
    KeyNotFound,
    MalformedEvent,
    MalformedResponse,
    NoMajority,
    NotDrawn,
    PastDeadline,
    ReplicationFailure,
    TooEarly,
    TooManyWinners,
)
from .ledger import ReplicatedLedger
from .verification import verify_event

logger = logging.getLogger("blocklot.service")


def utc_now() -> datetime:
    return datetime.now(timezone.utc)

_STATUS_BY_ERROR = {
    InvalidParameter: 400,
    BadToken: 403,
    KeyNotFound: 404,
    DuplicateMember: 409,
    AlreadyDrawn: 409,
    NotDrawn: 409,
    EmptyEvent: 409,
    TooManyWinners: 409,
    PastDeadline: 410,
    TooEarly: 425,
    BeaconUnavailable: 502,
    MalformedResponse: 502,
    BlockNotYetPublished: 502,
    ReplicationFailure: 503,
    NoMajority: 503,
    MalformedEvent: 500,
}


@dataclass
class ApiConfig:
    listen_address: str = "127.0.0.1:8712"
    peer_count: int = 3
    beacon: BeaconConfig = field(default_factory=BeaconConfig)
    confirmation_depth: int = 6
    z_max: float = 4.0
    channel_id: str = "blocklot"
    data_dir: str | None = None
    strict_identity: bool = False
    draw_repolls: int = 2
    draw_repoll_wait: float = 0.5
    ui_dist: str | None = None
    enable_fault_hooks: bool = False
    # injectable so tests and drills can move time without sleeping
    clock: Callable[[], datetime] = utc_now

    def __post_init__(self) -> None:
        if self.peer_count < 1 or self.peer_count % 2 == 0:
            raise InvalidParameter("peer_count must be odd and at least 1")

    @classmethod
    def from_env(cls, environ=os.environ) -> "ApiConfig":
        return cls(
            listen_address=environ.get("BLOCKLOT_LISTEN", "127.0.0.1:8712"),
            peer_count=int(environ.get("BLOCKLOT_PEER_COUNT", "3")),
            beacon=BeaconConfig.from_env(environ),
            confirmation_depth=int(environ.get("BLOCKLOT_CONFIRMATION_DEPTH", "6")),
            z_max=float(environ.get("BLOCKLOT_Z_MAX", "4.0")),
            channel_id=environ.get("BLOCKLOT_CHANNEL", "blocklot"),
            data_dir=environ.get("BLOCKLOT_DATA_DIR"),
            strict_identity=environ.get("BLOCKLOT_STRICT_IDENTITY", "") == "1",
            ui_dist=environ.get("BLOCKLOT_UI_DIST"),
            enable_fault_hooks=environ.get("BLOCKLOT_ENABLE_FAULT_HOOKS", "") == "1",
        )


class OpenEventRequest(BaseModel):
    name: str
    announcement_date: str
    num_winners: int
    block_offset: int
    note: str = ""


class SubscribeRequest(BaseModel):
    identity: str


class DrawRequest(BaseModel):
    organizer_token: str


class PeerRequest(BaseModel):
    peer_id: str


class _TipCache:
    """Short-lived cache so list polling does not hammer the beacon."""

    def __init__(self, beacon: BeaconConfig, ttl: float = 2.0):
        self._beacon = beacon
        self._ttl = ttl
        self._value: int | None = None
        self._at = 0.0

    def get(self) -> int | None:
        now = time.monotonic()
        if now - self._at > self._ttl:
            try:
                self._value = fetch_latest_height(self._beacon)
            except BlockLotError:
                self._value = None
            self._at = now
        return self._value


def event_view(event: core.LotteryEvent, tip: int | None, now: datetime) -> dict:
    """Public JSON projection: digests and counts, never secrets."""
    drawn = event.status is core.EventStatus.DRAWN
    date_reached = now >= event.announcement_date
    block_reached = tip is not None and tip >= event.target_height
    key = event.verifiable_random_key
    return {
        "event_id": event.event_id,
        "name": event.name,
        "announcement_date": core.format_timestamp(event.announcement_date),
        "num_winners": event.num_winners,
        "block_offset": event.block_offset,
        "target_height": event.target_height,
        "note": event.note,
        "channel_id": event.channel_id,
        "status": event.status.value,
        "open_tx_id": event.open_tx_id,
        "subscribe_tx_ids": list(event.subscribe_tx_ids),
        "draw_tx_id": event.draw_tx_id,
        "member_list": [d.hex() for d in event.member_list],
        "participant_count": len(event.member_list),
        "winner_list": [d.hex() for d in event.winner_list],
        "random_seed": None if event.random_seed is None else event.random_seed.hex(),
        "verifiable_random_key": None if key is None else key.hex,
        "can_subscribe": not drawn and not date_reached,
        "can_draw": not drawn and date_reached and block_reached,
        "can_check": drawn,
        "can_verify": drawn,
    }


def create_app(config: ApiConfig, ledger: ReplicatedLedger | None = None) -> FastAPI:
    app = FastAPI(title="blocklot", version="0.1.0")
    if ledger is None:
        ledger = ReplicatedLedger(config.peer_count, config.data_dir)
    app.state.ledger = ledger
    app.state.config = config
    app.state.tip_cache = _TipCache(config.beacon)
    # strict-identity registry lives off the ledger by design
    app.state.identities: dict[str, set[str]] = {}

    @app.exception_handler(BlockLotError)
    async def blocklot_error(_request: Request, exc: BlockLotError) -> JSONResponse:
        status = _STATUS_BY_ERROR.get(type(exc), 500)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": "InvalidParameter", "message": str(exc.errors())},
        )

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        started = time.monotonic()
        response = await call_next(request)
        logger.info(
            json.dumps(
                {
                    "ts": datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                    "duration_ms": round((time.monotonic() - started) * 1000, 2),
                }
            )
        )
        return response

    def load_event(event_id: str) -> core.LotteryEvent:
        try:
            raw = ledger.get_state(event_id)
        except KeyNotFound:
            raise KeyNotFound(f"no event {event_id!r}")
        return core.parse_ledger_value(raw)

    @app.post("/events", status_code=201)
    def open_event(body: OpenEventRequest) -> dict:
        latest = fetch_latest_height(config.beacon)
        # the event id must exist before the write (it is the ledger
        # key), so build the event first and patch the open tx id in
        # while the write is sequenced
        event, organizer_token = core.open_event(
            body.name,
            body.announcement_date,
            body.num_winners,
            body.block_offset,
            body.note,
            latest,
            tx_id="pending",
            channel_id=config.channel_id,
        )
        tx_id = ledger.put_state(
            event.event_id,
            lambda tx: core.serialize_for_ledger(dc_replace(event, open_tx_id=tx)),
        )
        return {
            "event_id": event.event_id,
            "organizer_token": organizer_token.hex,
            "target_height": event.target_height,
            "open_tx_id": tx_id,
        }

    @app.get("/events")
    def list_events() -> list[dict]:
        tip = app.state.tip_cache.get()
        now = config.clock()
        views = []
        for _key, raw in ledger.get_state_by_range():
            views.append(event_view(core.parse_ledger_value(raw), tip, now))
        return views

    @app.get("/events/{event_id}")
    def get_event(event_id: str) -> dict:
        tip = app.state.tip_cache.get()
        return event_view(load_event(event_id), tip, config.clock())

    @app.post("/events/{event_id}/subscribe")
    def subscribe(event_id: str, body: SubscribeRequest) -> dict:
        known = (
            app.state.identities.setdefault(event_id, set())
            if config.strict_identity
            else None
        )
        result: dict = {}

        def write(old: bytes | None, tx_id: str) -> bytes:
            if old is None:
                raise KeyNotFound(f"no event {event_id!r}")
            event = core.parse_ledger_value(old)
            updated, token = core.subscribe(
                event,
                body.identity,
                config.clock(),
                tx_id=tx_id,
                known_identities=known,
            )
            result["token"] = token
            return core.serialize_for_ledger(updated)

        ledger.update_state(event_id, write)
        if known is not None:
            known.add(body.identity)
        return {"event_id": event_id, "token": result["token"].hex}

    def _draw_response(event: core.LotteryEvent) -> dict:
        assert event.verifiable_random_key is not None
        assert event.random_seed is not None
        return {
            "event_id": event.event_id,
            "status": event.status.value,
            "winner_list": [d.hex() for d in event.winner_list],
            "verifiable_random_key": event.verifiable_random_key.hex,
            "random_seed": event.random_seed.hex(),
            "draw_tx_id": event.draw_tx_id,
        }

    def _await_confirmations(event: core.LotteryEvent) -> None:
        """Re-poll the beacon so pure block lag does not surface as 425."""
        needed = event.target_height + config.confirmation_depth
        last_tip = -1
        for attempt in range(config.draw_repolls + 1):
            if attempt:
                time.sleep(config.draw_repoll_wait * 2 ** (attempt - 1))
            last_tip = fetch_latest_height(config.beacon)
            if last_tip >= needed:
                return
        raise TooEarly(
            f"target block {event.target_height} needs "
            f"{config.confirmation_depth} confirmations (tip {last_tip})"
        )

    @app.post("/events/{event_id}/draw")
    def draw(event_id: str, body: DrawRequest) -> dict:
        organizer_token = core.AuthToken.from_hex(body.organizer_token)
        event = load_event(event_id)
        if not core.organizer_token_matches(event, organizer_token):
            raise BadToken("organizer token does not match the registered digest")
        if event.status is core.EventStatus.DRAWN:
            return _draw_response(event)  # idempotent replay
        now = config.clock()
        if now < event.announcement_date:
            raise TooEarly(
                f"announcement date {core.format_timestamp(event.announcement_date)}"
                " not reached"
            )
        _await_confirmations(event)
        try:
            header = fetch_header(config.beacon, event.target_height)
        except BlockNotYetPublished as exc:
            raise TooEarly(str(exc)) from exc
        seed = compute_block_hash(header)

        def write(old: bytes | None, tx_id: str) -> bytes:
            if old is None:
                raise KeyNotFound(f"no event {event_id!r}")
            current = core.parse_ledger_value(old)
            drawn = core.apply_draw(current, seed, organizer_token, tx_id=tx_id)
            return core.serialize_for_ledger(drawn)

        try:
            ledger.update_state(event_id, write)
        except AlreadyDrawn:
            pass  # lost a race: fall through to return the stored result
        return _draw_response(load_event(event_id))

    @app.get("/events/{event_id}/check")
    def check(event_id: str, identity: str, token: str) -> dict:
        event = load_event(event_id)
        winner = core.check_winner(event, identity, core.AuthToken.from_hex(token))
        return {"event_id": event_id, "winner": winner}

    @app.get("/events/{event_id}/verify")
    def verify(event_id: str) -> dict:
        event = load_event(event_id)
        if event.status is not core.EventStatus.DRAWN:
            raise NotDrawn(f"event {event_id} has not been drawn")
        header = fetch_header(config.beacon, event.target_height)
        report = verify_event(
            event, header, event.initial_random_key, ledger=ledger
        )
        payload = report.to_dict()
        payload["event_id"] = event_id
        payload["all_ok"] = report.all_ok
        return payload

    if config.enable_fault_hooks:
        # drill hooks, never enabled by default; see docs/formats.md
        def tamper(value: bytes) -> bytes:
            """Hacked-peer model: serve a quietly-edited but well-formed
            event so verification (not parsing) has to catch it."""
            try:
                event = core.parse_ledger_value(value)
            except BlockLotError:
                return value[:-1] + bytes([value[-1] ^ 0xFF])
            forged = dc_replace(event, note=event.note + " [tampered]")
            return core.serialize_for_ledger(forged)

        @app.post("/_faults/corrupt")
        def corrupt(body: PeerRequest) -> dict:
            ledger.corrupt_peer(body.peer_id, tamper)
            return {"peer_id": body.peer_id, "corrupted": True}

        @app.post("/_faults/restore")
        def restore(body: PeerRequest) -> dict:
            ledger.restore_peer(body.peer_id)
            return {"peer_id": body.peer_id, "corrupted": False}

    if config.ui_dist and Path(config.ui_dist).is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dist, html=True), name="ui")

    return app


def run_service(config: ApiConfig) -> None:
    """Blocking uvicorn runner used by the CLI ``serve`` command."""
    import uvicorn

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    host, _, port_text = config.listen_address.partition(":")
    uvicorn.run(
        create_app(config),
        host=host or "127.0.0.1",
        port=int(port_text or "8712"),
        log_level="warning",
    )
