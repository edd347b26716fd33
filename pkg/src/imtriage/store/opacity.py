"""Cleartext/opaque classification for stored field values."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..model import ValueState

# Tunable; the only criterion available is that encrypted fields look
# unintelligible, so high byte entropy over a non-trivial length or invalid
# UTF-8 is taken as opaque.
ENTROPY_THRESHOLD = 7.0
MIN_ENTROPY_LENGTH = 64


@dataclass(frozen=True)
class OpacityVerdict:
    state: ValueState
    entropy_bits_per_byte: float
    utf8_valid: bool


def shannon_entropy(blob: bytes) -> float:
    if not blob:
        return 0.0
    total = len(blob)
    return -sum((n / total) * math.log2(n / total) for n in Counter(blob).values()) + 0.0


def opacity_probe(blob: bytes | str) -> OpacityVerdict:
    if isinstance(blob, str):
        blob = blob.encode("utf-8", errors="surrogateescape")
    entropy = shannon_entropy(blob)
    try:
        blob.decode("utf-8")
        utf8_valid = True
    except UnicodeDecodeError:
        utf8_valid = False
    opaque = (not utf8_valid) or (entropy >= ENTROPY_THRESHOLD and len(blob) >= MIN_ENTROPY_LENGTH)
    return OpacityVerdict(ValueState.OPAQUE if opaque else ValueState.CLEARTEXT, entropy, utf8_valid)
