import random
from datetime import datetime, timezone
from pathlib import Path

import pytest

from blocklot import apply_draw, load_fixture, open_event, subscribe
from blocklot.beacon import BeaconConfig, BeaconMode, compute_block_hash

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "fixtures" / "bitcoin_headers.csv"

SUBSCRIBE_TIME = datetime(2025, 6, 1, tzinfo=timezone.utc)
ANNOUNCEMENT = "2025-12-01T00:00:00Z"


def deterministic_entropy(seed: int):
    """Injectable entropy source so events are reproducible in tests."""
    rng = random.Random(seed)
    return lambda n: rng.randbytes(n)


@pytest.fixture(scope="session")
def fixture_path() -> Path:
    return FIXTURE_PATH


@pytest.fixture(scope="session")
def beacon_config(fixture_path) -> BeaconConfig:
    return BeaconConfig(mode=BeaconMode.FIXTURE, fixture_path=fixture_path)


@pytest.fixture(scope="session")
def fixture_headers(fixture_path):
    return load_fixture(fixture_path)


@pytest.fixture(scope="session")
def genesis_header(fixture_headers):
    return fixture_headers[0]


def build_registered_event(participants=3, *, seed=7, num_winners=1, note="spring promo"):
    """Deterministic REGISTERED event with the given number of members."""
    entropy = deterministic_entropy(seed)
    # latest 839894 + offset 6 targets fixture block 839900
    event, organizer = open_event(
        "spring-lottery",
        ANNOUNCEMENT,
        num_winners,
        6,
        note,
        839_894,
        tx_id="tx-open-0",
        now="2025-01-01T00:00:00Z",
        entropy=entropy,
    )
    tokens = {}
    for i in range(participants):
        identity = f"member{i}@example.com"
        event, token = subscribe(
            event, identity, SUBSCRIBE_TIME, tx_id=f"tx-sub-{i}", entropy=entropy
        )
        tokens[identity] = token
    return event, organizer, tokens


def build_drawn_event(participants=3, *, seed=7, num_winners=1, draw_seed=b"\x11" * 32):
    event, organizer, tokens = build_registered_event(
        participants, seed=seed, num_winners=num_winners
    )
    drawn = apply_draw(event, draw_seed, organizer, tx_id="tx-draw-0")
    return drawn, organizer, tokens


@pytest.fixture
def drawn_event_bundle(fixture_headers):
    """A drawn event whose seed is the real hash of fixture block 839900."""
    seed = compute_block_hash(fixture_headers[839900])
    return build_drawn_event(participants=5, num_winners=2, draw_seed=seed)
