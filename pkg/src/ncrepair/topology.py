"""Binomial-tree rank arithmetic and duty-inheritance rules.

Ranks are indices into an ordered group of size s. Rank 0 is the sole
root; a node at rank r owns children at offsets 2^0 .. 2^(level(r)-1),
clipped at s. All functions here are pure.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TreeShape:
    """Group size plus the bit width used to encode its ranks on the wire."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"tree size must be >= 1, got {self.size}")

    @property
    def bits(self) -> int:
        # minimum B with 2^B >= size, and at least 1
        return (max(self.size, 2) - 1).bit_length()


def _check_rank(r: int, shape: TreeShape) -> None:
    if not 0 <= r < shape.size:
        raise ValueError(f"rank {r} out of range for size {shape.size}")


def level(r: int, shape: TreeShape) -> int:
    """Tree level of rank r: its trailing zero bits, or the full width for rank 0."""
    _check_rank(r, shape)
    if r == 0:
        return shape.bits
    return (r & -r).bit_length() - 1


def parent(r: int, shape: TreeShape) -> int | None:
    """The rank one step closer to the root, or None for the root itself."""
    _check_rank(r, shape)
    if r == 0:
        return None
    return r - (1 << level(r, shape))


def children(r: int, shape: TreeShape) -> list[tuple[int, int]]:
    """(offset exponent, child rank) pairs in ascending offset order.

    Ascending order is the receive order of the collect phase; the
    distribute phase walks the same list in reverse.
    """
    _check_rank(r, shape)
    out = []
    for k in range(level(r, shape)):
        c = r + (1 << k)
        if c < shape.size:
            out.append((k, c))
    return out


def subtree_range(c: int, shape: TreeShape) -> tuple[int, int]:
    """Half-open interval of ranks whose collected data routes through c."""
    _check_rank(c, shape)
    return c, min(c + (1 << level(c, shape)), shape.size)


def inherit(p: int, failed: set[int], shape: TreeShape) -> int | None:
    """The unique live holder of tree position p: the closest live successor.

    Returns None when p and every rank above it have failed.
    """
    _check_rank(p, shape)
    for r in range(p, shape.size):
        if r not in failed:
            return r
    return None


def inherited_positions(r: int, failed: set[int], shape: TreeShape) -> list[int]:
    """Positions whose duties fall to r: the run of failed ranks just below it."""
    _check_rank(r, shape)
    if r in failed:
        raise ValueError(f"rank {r} is itself failed")
    run = []
    p = r - 1
    while p >= 0 and p in failed:
        run.append(p)
        p -= 1
    run.reverse()
    return run
