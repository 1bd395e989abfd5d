"""Independent reference implementations used as test oracles.

Everything here is written from the definitions, in a deliberately
different style from the package (int.from_bytes instead of struct, hex
string assembly instead of packed bytes, manual HMAC construction), so
an implementation bug cannot hide on both sides of a comparison.
"""

import hashlib

import mpmath

_U32 = (1 << 32) - 1


def oracle_reference(source: bytes) -> tuple[int, bytes]:
    digest = hashlib.sha256(source).digest()
    total = 0
    for k in range(4):
        total = (total + int.from_bytes(digest[4 * k : 4 * k + 4], "little")) & _U32
    return total, digest


def draw_reference(members, num_winners: int, seed: bytes) -> tuple:
    """Step-by-step simulation of the swap schedule."""
    array = list(members)
    population = len(array)
    source = seed
    for i in range(population):
        value, source = oracle_reference(source)
        swap_with = i + value % (population - i)
        array[i], array[swap_with] = array[swap_with], array[i]
    return tuple(array[:num_winners])


def hmac_sha256_reference(key: bytes, message: bytes) -> bytes:
    """HMAC built directly from the padded-key construction."""
    block = 64
    if len(key) > block:
        key = hashlib.sha256(key).digest()
    key = key + b"\x00" * (block - len(key))
    inner = hashlib.sha256(bytes(b ^ 0x36 for b in key) + message).digest()
    return hashlib.sha256(bytes(b ^ 0x5C for b in key) + inner).digest()


def block_hash_reference(
    version: int, prev_hex: str, merkle_hex: str, timestamp: int, bits: int, nonce: int
) -> str:
    """Double SHA-256 over a hex-assembled wire header, as display hex."""

    def le32(value: int) -> str:
        return value.to_bytes(4, "little", signed=value < 0).hex()

    def reverse_hex(display: str) -> str:
        return bytes.fromhex(display)[::-1].hex()

    wire = (
        le32(version)
        + reverse_hex(prev_hex)
        + reverse_hex(merkle_hex)
        + le32(timestamp)
        + le32(bits)
        + le32(nonce)
    )
    first = hashlib.sha256(bytes.fromhex(wire)).digest()
    return hashlib.sha256(first).digest()[::-1].hex()


def parse_event_reference(data: bytes) -> dict[str, str]:
    """Minimal line parser for the canonical event format."""
    fields = {}
    for line in data.decode("utf-8").splitlines():
        name, _, value = line.partition("=")
        assert name not in fields, f"duplicate field {name}"
        fields[name] = value
    return fields


def z_score_reference(wins: int, runs: int, probability: float) -> float:
    """High-precision z computation via the sample-proportion form."""
    with mpmath.workdps(50):
        n = mpmath.mpf(runs)
        p = mpmath.mpf(probability)
        phat = mpmath.mpf(wins) / n
        return float((phat - p) / mpmath.sqrt(p * (1 - p) / n))
