"""Deterministic discrete-event simulator of an onion-routed overlay
carrying BitTorrent traffic, with an adversarial exit node and an
analysis pipeline. The heavy lifting lives in the C++ core; this package
exposes the main operations."""

from ._core import (
    MalformedBencoding,
    ConfigInvalid,
    bencode_roundtrip,
    classify_stream,
    compare_defenses,
    decode_compact_peers,
    default_scenario,
    encode_compact_peers,
    over_representation,
    rank_stability,
    run_scenario,
    __version__,
)

__all__ = [
    "MalformedBencoding",
    "ConfigInvalid",
    "bencode_roundtrip",
    "classify_stream",
    "compare_defenses",
    "decode_compact_peers",
    "default_scenario",
    "encode_compact_peers",
    "over_representation",
    "rank_stability",
    "run_scenario",
    "__version__",
]
