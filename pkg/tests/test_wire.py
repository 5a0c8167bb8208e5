"""Rank-set codec: golden byte vectors, round trips, malformed input."""
import pytest
from hypothesis import given, strategies as st

from ncrepair.topology import TreeShape
from ncrepair.wire import RankSetPayload, WireError, decode_rank_set, encode_rank_set


def test_golden_s6_no_flags():
    # s=6 -> B=3; ranks 000 001 011 100 packed = 0000 0101 1100 0000
    data = encode_rank_set(RankSetPayload((0, 1, 3, 4)), TreeShape(6))
    assert data == b"\x00\x04\x05\xc0"


def test_golden_empty_set():
    assert encode_rank_set(RankSetPayload(()), TreeShape(6)) == b"\x00\x00"


def test_golden_s8_full():
    # 8 ranks x 3 bits = 24 bits, exactly 3 body bytes
    data = encode_rank_set(RankSetPayload(tuple(range(8))), TreeShape(8))
    assert data == b"\x00\x08\x05\x39\x77"


def test_golden_with_flags():
    # s=4 -> B=2; ranks 00 01 11, flags 101, padded: 00011110 10000000
    data = encode_rank_set(RankSetPayload((0, 1, 3), (1, 0, 1)), TreeShape(4))
    assert data == b"\x00\x03\x1e\x80"


def test_decode_golden():
    p = decode_rank_set(b"\x00\x04\x05\xc0", TreeShape(6))
    assert p == RankSetPayload((0, 1, 3, 4))
    p = decode_rank_set(b"\x00\x03\x1e\x80", TreeShape(4), with_flags=True)
    assert p == RankSetPayload((0, 1, 3), (1, 0, 1))


def test_encode_rejects_bad_payloads():
    shape = TreeShape(6)
    with pytest.raises(WireError):
        encode_rank_set(RankSetPayload((1, 1)), shape)  # not ascending
    with pytest.raises(WireError):
        encode_rank_set(RankSetPayload((6,)), shape)  # out of range
    with pytest.raises(WireError):
        encode_rank_set(RankSetPayload((0, 1), (1,)), shape)  # flag count mismatch
    with pytest.raises(WireError):
        encode_rank_set(RankSetPayload((0,), (2,)), shape)  # non-bit flag


def test_decode_rejects_malformed():
    shape = TreeShape(6)
    with pytest.raises(WireError):
        decode_rank_set(b"\x00", shape)  # truncated header
    with pytest.raises(WireError):
        decode_rank_set(b"\x00\x04\x05", shape)  # truncated body
    with pytest.raises(WireError):
        decode_rank_set(b"\x00\x04\x05\xc0\x00", shape)  # trailing byte
    with pytest.raises(WireError):
        decode_rank_set(b"\x00\x04\x05\xc1", shape)  # nonzero padding
    with pytest.raises(WireError):
        decode_rank_set(b"\x00\x02\x20", shape)  # 001 000 -> descending pair
    with pytest.raises(WireError):
        decode_rank_set(b"\x00\x01\xc0", shape)  # rank 6 out of range


@given(st.integers(min_value=1, max_value=200), st.data(), st.booleans())
def test_round_trip(s, data, with_flags):
    shape = TreeShape(s)
    ranks = tuple(sorted(data.draw(st.sets(st.integers(min_value=0, max_value=s - 1)))))
    flags = None
    if with_flags:
        flags = tuple(data.draw(st.integers(min_value=0, max_value=1)) for _ in ranks)
    payload = RankSetPayload(ranks, flags)
    encoded = encode_rank_set(payload, shape)
    assert decode_rank_set(encoded, shape, with_flags=with_flags) == payload


def test_flags_presence_is_explicit():
    # for s=8 the same byte length holds 4 ranks with flags or without, so
    # the decoder is told which layout to expect rather than guessing
    shape = TreeShape(8)
    with_f = encode_rank_set(RankSetPayload((0, 2, 4, 6), (1, 1, 0, 1)), shape)
    no_f = encode_rank_set(RankSetPayload((0, 2, 4, 6)), shape)
    assert len(with_f) == len(no_f)
    with pytest.raises(WireError):  # flag bits land in the padding area
        decode_rank_set(with_f, shape, with_flags=False)
    # all-zero flags are indistinguishable from padding without the hint
    zeros = encode_rank_set(RankSetPayload((0, 2, 4, 6), (0, 0, 0, 0)), shape)
    assert decode_rank_set(zeros, shape, with_flags=False).flags is None
