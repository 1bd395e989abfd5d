"""Verifiable lottery on a simulated replicated ledger.

Winners are drawn deterministically from a Bitcoin block-hash seed, and
every outcome can be re-derived by anyone: the seed from the block
header, the winner list from the seeded shuffle, the event record from
its commitment key, and the ledger value from a majority of peers.
"""

from .beacon import (
    BeaconConfig,
    BeaconMode,
    BlockHeader,
    compute_block_hash,
    fetch_header,
    fetch_latest_height,
    load_fixture,
    verify_seed,
)
from .core import (
    AuthToken,
    EventStatus,
    LotteryEvent,
    VerifiableRandomKey,
    apply_draw,
    canonical_serialize,
    check_winner,
    derive_verifiable_key,
    open_event,
    parse_canonical,
    parse_ledger_value,
    participant_digest,
    serialize_for_ledger,
    subscribe,
)
from .draw import fisher_yates_draw, random_oracle
from .ledger import LedgerEntry, Peer, ReplicatedLedger
from .verification import (
    FairnessReport,
    VerificationReport,
    audit_seed_schedule,
    run_fairness_trial,
    verify_event,
)

__version__ = "0.1.0"

__all__ = [
    "AuthToken",
    "BeaconConfig",
    "BeaconMode",
    "BlockHeader",
    "EventStatus",
    "FairnessReport",
    "LedgerEntry",
    "LotteryEvent",
    "Peer",
    "ReplicatedLedger",
    "VerifiableRandomKey",
    "VerificationReport",
    "apply_draw",
    "audit_seed_schedule",
    "canonical_serialize",
    "check_winner",
    "compute_block_hash",
    "derive_verifiable_key",
    "fetch_header",
    "fetch_latest_height",
    "fisher_yates_draw",
    "load_fixture",
    "open_event",
    "parse_canonical",
    "parse_ledger_value",
    "participant_digest",
    "random_oracle",
    "run_fairness_trial",
    "serialize_for_ledger",
    "subscribe",
    "verify_event",
    "verify_seed",
]
