"""Bit-packed wire format for rank sets, with optional per-rank flag bits.

Layout: a 16-bit big-endian count, then each rank as a consecutive
B-bit big-endian field (B = TreeShape.bits), then one flag bit per rank
when flags are carried, zero-padded to the next byte boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

from .topology import TreeShape

MAX_COUNT = 0xFFFF


class WireError(ValueError):
    """Malformed payload, on either the encode or the decode side."""


@dataclass(frozen=True)
class RankSetPayload:
    ranks: tuple[int, ...]
    flags: tuple[int, ...] | None = None


def _validate(payload: RankSetPayload, shape: TreeShape) -> None:
    ranks = payload.ranks
    if len(ranks) > MAX_COUNT:
        raise WireError(f"rank count {len(ranks)} exceeds {MAX_COUNT}")
    for i, r in enumerate(ranks):
        if not 0 <= r < shape.size:
            raise WireError(f"rank {r} out of range for size {shape.size}")
        if i and ranks[i - 1] >= r:
            raise WireError("ranks must be strictly ascending")
    if payload.flags is not None:
        if len(payload.flags) != len(ranks):
            raise WireError("flag count must match rank count")
        if any(f not in (0, 1) for f in payload.flags):
            raise WireError("flags must be bits")


def encode_rank_set(payload: RankSetPayload, shape: TreeShape) -> bytes:
    _validate(payload, shape)
    b = shape.bits
    acc = 0
    nbits = 0
    for r in payload.ranks:
        acc = (acc << b) | r
        nbits += b
    if payload.flags is not None:
        for f in payload.flags:
            acc = (acc << 1) | f
            nbits += 1
    pad = -nbits % 8
    acc <<= pad
    nbits += pad
    return len(payload.ranks).to_bytes(2, "big") + acc.to_bytes(nbits // 8, "big")


def decode_rank_set(data: bytes, shape: TreeShape, with_flags: bool = False) -> RankSetPayload:
    if len(data) < 2:
        raise WireError("truncated header")
    count = int.from_bytes(data[:2], "big")
    b = shape.bits
    nbits = count * (b + (1 if with_flags else 0))
    nbody = (nbits + 7) // 8
    body = data[2:]
    if len(body) < nbody:
        raise WireError(f"truncated body: need {nbody} bytes, have {len(body)}")
    if len(body) > nbody:
        raise WireError(f"trailing bytes: need {nbody} bytes, have {len(body)}")
    acc = int.from_bytes(body, "big") if body else 0
    total = len(body) * 8
    pos = 0

    def take(width: int) -> int:
        nonlocal pos
        val = (acc >> (total - pos - width)) & ((1 << width) - 1) if width else 0
        pos += width
        return val

    ranks = tuple(take(b) for _ in range(count))
    flags = tuple(take(1) for _ in range(count)) if with_flags else None
    if pos < total and acc & ((1 << (total - pos)) - 1):
        raise WireError("nonzero padding bits")
    for i, r in enumerate(ranks):
        if r >= shape.size:
            raise WireError(f"rank {r} out of range for size {shape.size}")
        if i and ranks[i - 1] >= r:
            raise WireError("ranks must be strictly ascending")
    return RankSetPayload(ranks, flags)
