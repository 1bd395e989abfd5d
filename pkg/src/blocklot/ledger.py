"""Simulated append-only key/value ledger replicated across N peers.

The simulation preserves the observable behavior of a permissioned
blockchain store: writes are linearized through a single sequencer and
fanned out to every live replica with a fresh transaction id, reads
return the latest value per key, range reads iterate keys in order, and
a majority read accepts a value only when more than half of all
configured peers report it identically. Crash (non-response) and
corruption (value substitution on read) are injectable per peer so
verification procedures can be tested against misbehaving replicas.
"""

from __future__ import annotations

import hashlib
import secrets
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from .errors import InvalidParameter, KeyNotFound, NoMajority, ReplicationFailure

ENV_DATA_DIR = "BLOCKLOT_DATA_DIR"

# fn(tx_id) -> value, evaluated under the sequencer lock
ValueFactory = Callable[[str], bytes]
# fn(current latest value or None, tx_id) -> new value
UpdateFn = Callable[[bytes | None, str], bytes]
Corruptor = Callable[[bytes], bytes]


@dataclass(frozen=True)
class LedgerEntry:
    key: str
    value: bytes
    tx_id: str
    sequence: int


def default_corruptor(value: bytes) -> bytes:
    """Stand-in for a hacked peer: deterministically flip the last byte."""
    if not value:
        return b"\x00"
    return value[:-1] + bytes([value[-1] ^ 0xFF])


@dataclass
class Peer:
    """One replica: an append-only entry log plus its latest-value map."""

    peer_id: str
    log_path: Path | None = None
    entries: list[LedgerEntry] = field(default_factory=list)
    crashed: bool = False
    corrupted: bool = False
    corruptor: Corruptor = default_corruptor

    def __post_init__(self) -> None:
        self._latest: dict[str, bytes] = {}
        if self.log_path is not None and self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        assert self.log_path is not None
        for lineno, line in enumerate(
            self.log_path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line:
                continue
            try:
                key, value_hex, tx_id, seq_text = line.split("\t")
                entry = LedgerEntry(key, bytes.fromhex(value_hex), tx_id, int(seq_text))
            except ValueError as exc:
                raise InvalidParameter(
                    f"{self.log_path}:{lineno}: bad log record: {exc}"
                ) from exc
            self.entries.append(entry)
            self._latest[entry.key] = entry.value

    def append(self, entry: LedgerEntry) -> None:
        self.entries.append(entry)
        self._latest[entry.key] = entry.value
        if self.log_path is not None:
            record = f"{entry.key}\t{entry.value.hex()}\t{entry.tx_id}\t{entry.sequence}\n"
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(record)

    def read(self, key: str) -> bytes | None:
        """Latest value as this peer reports it (corruption applied)."""
        value = self._latest.get(key)
        if value is None:
            return None
        if self.corrupted:
            return self.corruptor(value)
        return value

    def committed(self, key: str) -> bytes | None:
        """Latest value ignoring read-side corruption (sequencer use)."""
        return self._latest.get(key)

    def keys(self) -> list[str]:
        return sorted(self._latest)

    def max_sequence(self) -> int:
        return self.entries[-1].sequence if self.entries else 0


class ReplicatedLedger:
    """N-peer replicated store with a single write sequencer.

    ``data_dir`` enables persistence: each peer appends its records to
    its own log file and replays it on construction, so a restarted
    ledger resumes with the same state and sequence counter.
    """

    def __init__(self, peer_count: int = 3, data_dir: str | Path | None = None):
        if peer_count < 1:
            raise InvalidParameter("need at least one peer")
        base = Path(data_dir) if data_dir is not None else None
        if base is not None:
            base.mkdir(parents=True, exist_ok=True)
        self.peers = [
            Peer(f"peer{i}", base / f"peer{i}.log" if base else None)
            for i in range(peer_count)
        ]
        self._lock = threading.Lock()
        self._sequence = max(p.max_sequence() for p in self.peers)

    @property
    def peer_count(self) -> int:
        return len(self.peers)

    def _majority(self) -> int:
        return len(self.peers) // 2 + 1

    def _make_tx_id(self, sequence: int, key: str) -> str:
        material = struct.pack(">Q", sequence) + key.encode("utf-8") + secrets.token_bytes(8)
        return hashlib.sha256(material).hexdigest()

    # --- writes ------------------------------------------------------------

    def put_state(self, key: str, value: bytes | ValueFactory) -> str:
        """Replicate ``value`` under ``key``; returns the write's tx id.

        ``value`` may be a factory taking the allocated tx id, for
        records that must embed their own transaction identifier.
        """
        if callable(value):
            factory: ValueFactory = value
            return self.update_state(key, lambda _old, tx_id: factory(tx_id))
        return self.update_state(key, lambda _old, _tx_id: value)

    def update_state(self, key: str, fn: UpdateFn) -> str:
        """Atomic read-modify-write under the sequencer lock.

        ``fn`` receives the current latest value (None if absent) and
        the allocated tx id, and returns the new value. Exceptions from
        ``fn`` abort the write without consuming the sequence number.
        """
        if not key:
            raise InvalidParameter("ledger keys must be non-empty")
        with self._lock:
            alive = [p for p in self.peers if not p.crashed]
            if len(alive) < self._majority():
                raise ReplicationFailure(
                    f"only {len(alive)}/{len(self.peers)} peers can acknowledge"
                )
            sequence = self._sequence + 1
            tx_id = self._make_tx_id(sequence, key)
            # the sequencer reads committed state directly, bypassing
            # read-side corruption hooks
            current = alive[0].committed(key)
            new_value = fn(current, tx_id)
            if not isinstance(new_value, bytes):
                raise InvalidParameter("ledger values must be bytes")
            self._sequence = sequence
            for peer in alive:
                peer.append(LedgerEntry(key, new_value, tx_id, sequence))
            return tx_id

    # --- reads -------------------------------------------------------------

    def _reader(self, peer_id: str | None) -> Peer:
        if peer_id is None:
            for peer in self.peers:
                if not peer.crashed:
                    return peer
            raise ReplicationFailure("all peers are crashed")
        for peer in self.peers:
            if peer.peer_id == peer_id:
                return peer
        raise InvalidParameter(f"unknown peer {peer_id!r}")

    def get_state(self, key: str, peer_id: str | None = None) -> bytes:
        """Latest value for ``key`` from one peer (the first live one by
        default)."""
        value = self._reader(peer_id).read(key)
        if value is None:
            raise KeyNotFound(key)
        return value

    def get_state_by_range(
        self, start_key: str = "", end_key: str = "", peer_id: str | None = None
    ) -> list[tuple[str, bytes]]:
        """Latest (key, value) pairs with start_key <= key < end_key,
        ascending; empty bounds are unbounded."""
        peer = self._reader(peer_id)
        result = []
        for key in peer.keys():
            if start_key and key < start_key:
                continue
            if end_key and key >= end_key:
                continue
            value = peer.read(key)
            if value is not None:
                result.append((key, value))
        return result

    def majority_read(self, key: str) -> bytes:
        """Value reported identically by a strict majority of all peers.

        Crashed peers are non-votes but still count in the denominator;
        a tie or a fragmented response set raises NoMajority.
        """
        tallies: dict[bytes | None, int] = {}
        responsive = 0
        for peer in self.peers:
            if peer.crashed:
                continue
            responsive += 1
            value = peer.read(key)
            tallies[value] = tallies.get(value, 0) + 1
        if responsive == 0:
            raise ReplicationFailure("all peers are crashed")
        winner, votes = max(tallies.items(), key=lambda item: item[1])
        if votes < self._majority():
            raise NoMajority(
                f"no value for {key!r} reached {self._majority()}/{len(self.peers)} votes"
            )
        if winner is None:
            raise KeyNotFound(key)
        return winner

    # --- fault-injection hooks (tests and drills only) ----------------------

    def crash_peer(self, peer_id: str) -> None:
        self._reader(peer_id).crashed = True

    def corrupt_peer(self, peer_id: str, corruptor: Corruptor | None = None) -> None:
        peer = self._reader(peer_id)
        peer.corrupted = True
        if corruptor is not None:
            peer.corruptor = corruptor

    def restore_peer(self, peer_id: str) -> None:
        peer = self._reader(peer_id)
        peer.crashed = False
        peer.corrupted = False
        peer.corruptor = default_corruptor

    def iter_entries(self, peer_id: str) -> Iterator[LedgerEntry]:
        return iter(self._reader(peer_id).entries)
