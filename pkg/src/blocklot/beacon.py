"""Bitcoin randomness-beacon client.

Resolves chain heights and block headers either from a public explorer
API (LIVE) or from a local CSV corpus (FIXTURE), and recomputes block
hashes from the six header fields so a recorded seed can be checked
without trusting the source. Hashes cross this module's boundary in
display order (the human-readable big-endian form); the byte-reversed
wire order exists only inside :func:`compute_block_hash`.
"""

from __future__ import annotations

import hashlib
import os
import struct
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import requests

from .errors import (
    BeaconUnavailable,
    BlockNotYetPublished,
    InvalidParameter,
    MalformedResponse,
)

ENV_MODE = "BLOCKLOT_BEACON_MODE"
ENV_URL = "BLOCKLOT_BEACON_URL"
ENV_FIXTURE = "BLOCKLOT_BEACON_FIXTURE"

DEFAULT_BASE_URL = "https://blockchain.info"


class BeaconMode(str, Enum):
    LIVE = "LIVE"
    FIXTURE = "FIXTURE"


@dataclass(frozen=True)
class BlockHeader:
    """The six fields that determine a Bitcoin block hash, plus height."""

    version: int
    previous_hash: bytes  # display order
    merkle_root: bytes  # display order
    timestamp: int
    bits: int
    nonce: int
    height: int

    def __post_init__(self) -> None:
        if len(self.previous_hash) != 32 or len(self.merkle_root) != 32:
            raise InvalidParameter("header hash fields must be 32 bytes")


@dataclass(frozen=True)
class BeaconConfig:
    mode: BeaconMode = BeaconMode.FIXTURE
    base_url: str = DEFAULT_BASE_URL
    fixture_path: str | Path | None = None
    request_timeout: float = 10.0
    attempts: int = 3
    backoff: float = 1.0  # seconds before retry k is backoff * 2**k

    @classmethod
    def from_env(cls, environ=os.environ) -> "BeaconConfig":
        mode_text = environ.get(ENV_MODE, BeaconMode.FIXTURE.value).upper()
        try:
            mode = BeaconMode(mode_text)
        except ValueError as exc:
            raise InvalidParameter(f"unknown beacon mode {mode_text!r}") from exc
        return cls(
            mode=mode,
            base_url=environ.get(ENV_URL, DEFAULT_BASE_URL),
            fixture_path=environ.get(ENV_FIXTURE),
        )


def compute_block_hash(header: BlockHeader) -> bytes:
    """Double SHA-256 of the 80-byte wire header, returned in display order.

    Wire format: every integer little-endian; previous_hash and
    merkle_root byte-reversed from their display order.
    """
    raw = struct.pack("<i", header.version)
    raw += header.previous_hash[::-1]
    raw += header.merkle_root[::-1]
    raw += struct.pack("<III", header.timestamp, header.bits, header.nonce)
    return hashlib.sha256(hashlib.sha256(raw).digest()).digest()[::-1]


def verify_seed(header: BlockHeader, claimed_seed: bytes) -> bool:
    """True iff the recomputed block hash equals the claimed seed."""
    return compute_block_hash(header) == claimed_seed


# --- FIXTURE mode ----------------------------------------------------------

FIXTURE_COLUMNS = 8  # height,version,prev_hex,merkle_hex,timestamp,bits,nonce,hash_hex


def load_fixture(path: str | Path) -> dict[int, BlockHeader]:
    """Parse the CSV corpus and integrity-check every row.

    A row whose recorded hash does not match the recomputed one, or a
    height that appears twice with conflicting data, poisons the whole
    file: the beacon must never serve doubtful randomness.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BeaconUnavailable(f"cannot read fixture {path}: {exc}") from exc

    headers: dict[int, BlockHeader] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != FIXTURE_COLUMNS:
            raise MalformedResponse(
                f"{path}:{lineno}: expected {FIXTURE_COLUMNS} columns, got {len(parts)}"
            )
        try:
            header = BlockHeader(
                version=int(parts[1]),
                previous_hash=bytes.fromhex(parts[2]),
                merkle_root=bytes.fromhex(parts[3]),
                timestamp=int(parts[4]),
                bits=int(parts[5]),
                nonce=int(parts[6]),
                height=int(parts[0]),
            )
            expected = bytes.fromhex(parts[7])
        except (ValueError, InvalidParameter) as exc:
            raise MalformedResponse(f"{path}:{lineno}: {exc}") from exc
        if compute_block_hash(header) != expected:
            raise MalformedResponse(
                f"{path}:{lineno}: recorded hash does not match recomputed hash"
            )
        if header.height in headers and headers[header.height] != header:
            raise MalformedResponse(
                f"{path}:{lineno}: conflicting data for height {header.height}"
            )
        headers[header.height] = header
    return headers


def _fixture_headers(config: BeaconConfig) -> dict[int, BlockHeader]:
    if config.fixture_path is None:
        raise BeaconUnavailable("fixture mode requires a fixture path")
    return load_fixture(config.fixture_path)


# --- LIVE mode -------------------------------------------------------------


def _live_get(config: BeaconConfig, path: str) -> dict:
    url = config.base_url.rstrip("/") + path
    last_error: Exception | None = None
    for attempt in range(config.attempts):
        if attempt:
            time.sleep(config.backoff * 2 ** (attempt - 1))
        try:
            response = requests.get(url, timeout=config.request_timeout)
        except requests.RequestException as exc:
            last_error = exc
            continue
        if response.status_code == 404:
            raise BlockNotYetPublished(f"{url} returned 404")
        if response.status_code >= 500:
            last_error = BeaconUnavailable(f"{url} returned {response.status_code}")
            continue
        if response.status_code != 200:
            raise MalformedResponse(f"{url} returned {response.status_code}")
        try:
            payload = response.json()
        except ValueError as exc:
            raise MalformedResponse(f"{url} returned non-JSON data") from exc
        if not isinstance(payload, dict):
            raise MalformedResponse(f"{url} returned a non-object payload")
        return payload
    raise BeaconUnavailable(f"giving up on {url}: {last_error}")


def _header_from_payload(payload: dict, height: int) -> BlockHeader:
    try:
        return BlockHeader(
            version=int(payload["ver"]),
            previous_hash=bytes.fromhex(payload["prev_block"]),
            merkle_root=bytes.fromhex(payload["mrkl_root"]),
            timestamp=int(payload["time"]),
            bits=int(payload["bits"]),
            nonce=int(payload["nonce"]),
            height=int(payload.get("height", height)),
        )
    except (KeyError, ValueError, TypeError, InvalidParameter) as exc:
        raise MalformedResponse(f"unusable block payload: {exc}") from exc


# --- public operations -----------------------------------------------------


def fetch_latest_height(config: BeaconConfig) -> int:
    """Chain tip height as reported by the configured source."""
    if config.mode is BeaconMode.FIXTURE:
        headers = _fixture_headers(config)
        if not headers:
            raise MalformedResponse(f"fixture {config.fixture_path} has no tip record")
        return max(headers)
    payload = _live_get(config, "/latestblock")
    try:
        return int(payload["height"])
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedResponse(f"latest block payload has no height: {exc}") from exc


def fetch_header(config: BeaconConfig, height: int) -> BlockHeader:
    """Header of the block at ``height``.

    Raises BlockNotYetPublished when the source's tip is still below the
    requested height: a draw must wait for its target block.
    """
    if height < 0:
        raise InvalidParameter("height must be non-negative")
    if config.mode is BeaconMode.FIXTURE:
        headers = _fixture_headers(config)
        if not headers:
            raise MalformedResponse(f"fixture {config.fixture_path} has no tip record")
        if height > max(headers):
            raise BlockNotYetPublished(
                f"height {height} is beyond the fixture tip {max(headers)}"
            )
        if height not in headers:
            raise MalformedResponse(
                f"fixture {config.fixture_path} has a gap at height {height}"
            )
        return headers[height]
    return _header_from_payload(_live_get(config, f"/rawblock/{height}"), height)
