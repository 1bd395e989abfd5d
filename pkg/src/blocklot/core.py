"""Lottery event model and its pure state transitions.

Every operation here is a pure function: entropy (tokens, salts) and
transaction identifiers are injected by the caller, so two calls with
identical inputs produce identical events. The ledger-facing byte format
produced by :func:`canonical_serialize` is normative; see
``docs/formats.md`` for the bit-exact description.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Collection

from .draw import fisher_yates_draw
from .errors import (
    AlreadyDrawn,
    BadToken,
    DuplicateMember,
    InvalidParameter,
    MalformedEvent,
    NotDrawn,
    PastDeadline,
)

UNDEFINED = "UNDEFINED"

TOKEN_LEN = 16
KEY_LEN = 32
EVENT_ID_LEN = 16

# Module-wide entropy hook; tests may pass a deterministic substitute.
Entropy = Callable[[int], bytes]


class EventStatus(str, Enum):
    REGISTERED = "REGISTERED"
    DRAWN = "DRAWN"


@dataclass(frozen=True)
class AuthToken:
    """16-byte secret handed to one subscriber (or the organizer) once."""

    token: bytes

    def __post_init__(self) -> None:
        if len(self.token) != TOKEN_LEN:
            raise InvalidParameter(f"token must be {TOKEN_LEN} bytes")

    @classmethod
    def generate(cls, entropy: Entropy = secrets.token_bytes) -> "AuthToken":
        return cls(entropy(TOKEN_LEN))

    @classmethod
    def from_hex(cls, text: str) -> "AuthToken":
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise InvalidParameter(f"token is not valid hex: {text!r}") from exc
        return cls(raw)

    @property
    def hex(self) -> str:
        return self.token.hex()


@dataclass(frozen=True)
class VerifiableRandomKey:
    """Post-draw commitment: HMAC over the seed plus a hash of the event."""

    hmac_part: bytes
    info_part: bytes

    def __post_init__(self) -> None:
        if len(self.hmac_part) != 32 or len(self.info_part) != 32:
            raise InvalidParameter("verifiable key parts must be 32 bytes each")

    @property
    def key(self) -> bytes:
        return self.hmac_part + self.info_part

    @property
    def hex(self) -> str:
        return self.key.hex()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "VerifiableRandomKey":
        if len(raw) != 64:
            raise InvalidParameter(f"verifiable key must be 64 bytes, got {len(raw)}")
        return cls(raw[:32], raw[32:])


@dataclass(frozen=True)
class LotteryEvent:
    """Full on-ledger record of one lottery.

    ``member_list`` and ``winner_list`` hold participant digests: the
    32-byte SHA-256 of the identity string concatenated with the
    participant's secret token. ``None`` stands for the UNDEFINED
    sentinel of the byte format.
    """

    event_id: str
    name: str
    announcement_date: datetime
    num_winners: int
    block_offset: int
    target_height: int
    note: str
    channel_id: str
    open_tx_id: str
    subscribe_tx_ids: tuple[str, ...]
    draw_tx_id: str | None
    member_list: tuple[bytes, ...]
    winner_list: tuple[bytes, ...]
    verifiable_random_key: VerifiableRandomKey | None
    random_seed: bytes | None
    initial_random_key: bytes
    organizer_token_digest: bytes
    status: EventStatus


def participant_digest(identity: str, token: AuthToken) -> bytes:
    """SHA-256 of the raw UTF-8 identity followed by the raw token bytes."""
    return hashlib.sha256(identity.encode("utf-8") + token.token).digest()


def parse_timestamp(value: datetime | str) -> datetime:
    """Normalize to an aware UTC datetime with seconds precision."""
    if isinstance(value, str):
        try:
            parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError as exc:
            raise InvalidParameter(f"not an ISO-8601 timestamp: {value!r}") from exc
    elif isinstance(value, datetime):
        parsed = value
    else:
        raise InvalidParameter(f"not a timestamp: {value!r}")
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(value: datetime) -> str:
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def _check_line_safe(field: str, value: str) -> str:
    if "\n" in value or "\r" in value:
        raise InvalidParameter(f"{field} must not contain line breaks")
    return value


def open_event(
    name: str,
    announcement_date: datetime | str,
    num_winners: int,
    block_offset: int,
    note: str,
    latest_height: int,
    *,
    tx_id: str,
    channel_id: str = "blocklot",
    now: datetime | None = None,
    entropy: Entropy = secrets.token_bytes,
) -> tuple[LotteryEvent, AuthToken]:
    """Register a new lottery event.

    Returns the REGISTERED event together with the organizer token whose
    digest gates the draw. The token itself is never part of the event.
    """
    if num_winners < 1:
        raise InvalidParameter("num_winners must be at least 1")
    if block_offset < 0:
        raise InvalidParameter("block_offset must be non-negative")
    if latest_height < 0:
        raise InvalidParameter("latest_height must be non-negative")
    announcement = parse_timestamp(announcement_date)
    _check_line_safe("name", name)
    _check_line_safe("note", note)
    _check_line_safe("channel_id", channel_id)
    opened_at = parse_timestamp(now) if now is not None else datetime.now(timezone.utc)

    event_id = hashlib.sha256(
        name.encode("utf-8")
        + format_timestamp(announcement).encode("ascii")
        + format_timestamp(opened_at).encode("ascii")
        + entropy(8)
    ).digest()[:EVENT_ID_LEN].hex()
    organizer_token = AuthToken.generate(entropy)

    event = LotteryEvent(
        event_id=event_id,
        name=name,
        announcement_date=announcement,
        num_winners=num_winners,
        block_offset=block_offset,
        target_height=latest_height + block_offset,
        note=note,
        channel_id=channel_id,
        open_tx_id=tx_id,
        subscribe_tx_ids=(),
        draw_tx_id=None,
        member_list=(),
        winner_list=(),
        verifiable_random_key=None,
        random_seed=None,
        initial_random_key=entropy(KEY_LEN),
        organizer_token_digest=hashlib.sha256(organizer_token.token).digest(),
        status=EventStatus.REGISTERED,
    )
    return event, organizer_token


def subscribe(
    event: LotteryEvent,
    identity: str,
    now: datetime | str,
    *,
    tx_id: str,
    token: AuthToken | None = None,
    entropy: Entropy = secrets.token_bytes,
    known_identities: Collection[str] | None = None,
) -> tuple[LotteryEvent, AuthToken]:
    """Add one participant digest to the member list.

    Duplicate detection compares digests, so the same identity with a
    fresh token subscribes again successfully; pass the off-ledger
    ``known_identities`` collection to reject repeated identity strings
    instead (strict mode).
    """
    if event.status is not EventStatus.REGISTERED:
        raise AlreadyDrawn(f"event {event.event_id} is {event.status.value}")
    if parse_timestamp(now) >= event.announcement_date:
        raise PastDeadline(
            f"announcement date {format_timestamp(event.announcement_date)} has passed"
        )
    if known_identities is not None and identity in known_identities:
        raise DuplicateMember(f"identity already subscribed: {identity!r}")
    if token is None:
        token = AuthToken.generate(entropy)
    digest = participant_digest(identity, token)
    if digest in event.member_list:
        raise DuplicateMember(f"digest already subscribed: {digest.hex()}")
    updated = replace(
        event,
        member_list=event.member_list + (digest,),
        subscribe_tx_ids=event.subscribe_tx_ids + (tx_id,),
    )
    return updated, token


def organizer_token_matches(event: LotteryEvent, token: AuthToken) -> bool:
    """Compare the supplied organizer token against the registered digest."""
    return hmac.compare_digest(
        hashlib.sha256(token.token).digest(), event.organizer_token_digest
    )


def apply_draw(
    event: LotteryEvent,
    seed: bytes,
    organizer_token: AuthToken,
    *,
    tx_id: str,
) -> LotteryEvent:
    """Fix the winners of a REGISTERED event using the given 32-byte seed.

    Verifies the organizer token against the digest registered at open,
    runs the seeded shuffle, and seals the event with its verifiable
    random key. The result is final: no operation leads back to
    REGISTERED.
    """
    if event.status is not EventStatus.REGISTERED:
        raise AlreadyDrawn(f"event {event.event_id} is already drawn")
    if not organizer_token_matches(event, organizer_token):
        raise BadToken("organizer token does not match the registered digest")
    if len(seed) != 32:
        raise InvalidParameter(f"seed must be 32 bytes, got {len(seed)}")

    winners = fisher_yates_draw(event.member_list, event.num_winners, seed)
    drawn = replace(
        event,
        random_seed=seed,
        winner_list=winners,
        draw_tx_id=tx_id,
        status=EventStatus.DRAWN,
    )
    return replace(drawn, verifiable_random_key=derive_verifiable_key(drawn))


def derive_verifiable_key(event: LotteryEvent) -> VerifiableRandomKey:
    """Recompute the integrity commitment of a drawn event.

    hmac_part authenticates the random seed under the organizer's
    initial random key; info_part hashes the canonical serialization
    (which never includes the verifiable key itself, so recomputation on
    an unmodified event reproduces the stored key byte for byte).
    """
    if event.random_seed is None:
        raise NotDrawn(f"event {event.event_id} has no random seed yet")
    hmac_part = hmac.new(
        event.initial_random_key, event.random_seed, hashlib.sha256
    ).digest()
    info_part = hashlib.sha256(canonical_serialize(event)).digest()
    return VerifiableRandomKey(hmac_part, info_part)


def check_winner(event: LotteryEvent, identity: str, token: AuthToken) -> bool:
    """True iff the (identity, token) digest appears in the winner list."""
    if event.status is not EventStatus.DRAWN:
        raise NotDrawn(f"event {event.event_id} has not been drawn")
    return participant_digest(identity, token) in event.winner_list


# --- canonical byte format ------------------------------------------------

# Serialized field order. verifiable_random_key is deliberately absent:
# the info hash must cover everything except the commitment itself.
_FIELD_ORDER = (
    "event_id",
    "name",
    "announcement_date",
    "num_winners",
    "block_offset",
    "target_height",
    "note",
    "channel_id",
    "open_tx_id",
    "subscribe_tx_ids",
    "draw_tx_id",
    "member_list",
    "winner_list",
    "random_seed",
    "initial_random_key",
    "organizer_token_digest",
    "status",
)

VERIFIABLE_KEY_FIELD = "verifiable_random_key"


def _field_text(event: LotteryEvent, field: str) -> str:
    value = getattr(event, field)
    if field == "announcement_date":
        return format_timestamp(value)
    if field in ("num_winners", "block_offset", "target_height"):
        return str(value)
    if field == "subscribe_tx_ids":
        return ",".join(value)
    if field in ("member_list", "winner_list"):
        return ",".join(d.hex() for d in value)
    if field in ("random_seed",):
        return UNDEFINED if value is None else value.hex()
    if field in ("initial_random_key", "organizer_token_digest"):
        return value.hex()
    if field == "draw_tx_id":
        return UNDEFINED if value is None else value
    if field == "status":
        return value.value
    return value  # plain strings: event_id, name, note, channel_id, open_tx_id


def canonical_serialize(event: LotteryEvent) -> bytes:
    """Normative byte encoding: ``field=value\\n`` lines in fixed order.

    Lists are comma-joined in order, binary values lowercase hex,
    timestamps ISO-8601 UTC, UNDEFINED spelled literally. The
    verifiable_random_key field is always excluded.
    """
    lines = [f"{field}={_field_text(event, field)}" for field in _FIELD_ORDER]
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_for_ledger(event: LotteryEvent) -> bytes:
    """Ledger value and export format: canonical bytes plus the key line."""
    key = event.verifiable_random_key
    key_text = UNDEFINED if key is None else key.hex
    return canonical_serialize(event) + f"{VERIFIABLE_KEY_FIELD}={key_text}\n".encode(
        "utf-8"
    )


def _split_fields(data: bytes, expected: tuple[str, ...]) -> dict[str, str]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedEvent("event bytes are not valid UTF-8") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != len(expected):
        raise MalformedEvent(
            f"expected {len(expected)} fields, found {len(lines)} lines"
        )
    parsed: dict[str, str] = {}
    for field, line in zip(expected, lines):
        name, sep, value = line.partition("=")
        if not sep or name != field:
            raise MalformedEvent(f"expected field {field!r}, got line {line!r}")
        parsed[field] = value
    return parsed


def _hex_bytes(field: str, text: str, length: int) -> bytes:
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise MalformedEvent(f"{field} is not valid hex") from exc
    if len(raw) != length:
        raise MalformedEvent(f"{field} must be {length} bytes, got {len(raw)}")
    return raw


def _digest_list(field: str, text: str) -> tuple[bytes, ...]:
    if text == "":
        return ()
    return tuple(_hex_bytes(field, part, 32) for part in text.split(","))


def _int_field(field: str, text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise MalformedEvent(f"{field} is not an integer: {text!r}") from exc


def _event_from_fields(fields: dict[str, str]) -> LotteryEvent:
    try:
        status = EventStatus(fields["status"])
    except ValueError as exc:
        raise MalformedEvent(f"unknown status {fields['status']!r}") from exc
    try:
        announcement = parse_timestamp(fields["announcement_date"])
    except InvalidParameter as exc:
        raise MalformedEvent(str(exc)) from exc
    subscribe_ids = fields["subscribe_tx_ids"]
    return LotteryEvent(
        event_id=fields["event_id"],
        name=fields["name"],
        announcement_date=announcement,
        num_winners=_int_field("num_winners", fields["num_winners"]),
        block_offset=_int_field("block_offset", fields["block_offset"]),
        target_height=_int_field("target_height", fields["target_height"]),
        note=fields["note"],
        channel_id=fields["channel_id"],
        open_tx_id=fields["open_tx_id"],
        subscribe_tx_ids=tuple(subscribe_ids.split(",")) if subscribe_ids else (),
        draw_tx_id=None if fields["draw_tx_id"] == UNDEFINED else fields["draw_tx_id"],
        member_list=_digest_list("member_list", fields["member_list"]),
        winner_list=_digest_list("winner_list", fields["winner_list"]),
        verifiable_random_key=None,
        random_seed=(
            None
            if fields["random_seed"] == UNDEFINED
            else _hex_bytes("random_seed", fields["random_seed"], 32)
        ),
        initial_random_key=_hex_bytes(
            "initial_random_key", fields["initial_random_key"], 32
        ),
        organizer_token_digest=_hex_bytes(
            "organizer_token_digest", fields["organizer_token_digest"], 32
        ),
        status=status,
    )


def parse_canonical(data: bytes) -> LotteryEvent:
    """Inverse of :func:`canonical_serialize` (verifiable key left unset)."""
    return _event_from_fields(_split_fields(data, _FIELD_ORDER))


def parse_ledger_value(data: bytes) -> LotteryEvent:
    """Inverse of :func:`serialize_for_ledger`."""
    fields = _split_fields(data, _FIELD_ORDER + (VERIFIABLE_KEY_FIELD,))
    event = _event_from_fields(fields)
    key_text = fields[VERIFIABLE_KEY_FIELD]
    if key_text == UNDEFINED:
        return event
    return replace(
        event,
        verifiable_random_key=VerifiableRandomKey.from_bytes(
            _hex_bytes(VERIFIABLE_KEY_FIELD, key_text, 64)
        ),
    )
