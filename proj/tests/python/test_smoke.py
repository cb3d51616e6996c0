import json

import pytest

import torbtsim


def test_bencode_roundtrip():
    assert torbtsim.bencode_roundtrip(b"d1:ai1e1:b4:spame") == b"d1:ai1e1:b4:spame"
    with pytest.raises(ValueError):
        torbtsim.bencode_roundtrip(b"i03e")


def test_compact_peers():
    packed = torbtsim.encode_compact_peers([("10.0.0.1", 6881), ("1.2.3.4", 80)])
    assert packed[:6] == bytes([0x0A, 0x00, 0x00, 0x01, 0x1A, 0xE1])
    assert torbtsim.decode_compact_peers(packed) == [("10.0.0.1", 6881), ("1.2.3.4", 80)]


def test_classify_stream():
    assert torbtsim.classify_stream(b"GET /index.html HTTP/1.1\r\n\r\n", 80) == "http"
    assert (
        torbtsim.classify_stream(b"GET /announce?info_hash=x&port=1 HTTP/1.1\r\n\r\n", 80)
        == "tracker_announce"
    )
    assert torbtsim.classify_stream(b"\x00\x01\x02", 443) == "other"


def test_default_scenario_is_valid_json():
    config = json.loads(torbtsim.default_scenario())
    assert config["tor"]["n_hops"] == 3
    assert config["bittorrent"]["behavior"]["tracker_only"] == pytest.approx(0.72)


def test_run_scenario_small():
    config = json.loads(torbtsim.default_scenario())
    config["virtual_duration_s"] = 600
    config["bittorrent"]["n_peers"] = 40
    config["bittorrent"]["catalog"]["n_items"] = 15
    config["web"]["n_users"] = 4
    result = torbtsim.run_scenario(json.dumps(config))
    assert result["total_streams"] > 0
    assert 0.0 <= result["traced_fraction_all"] <= 1.0
    assert result["seed"] == 1

    again = torbtsim.run_scenario(json.dumps(config))
    assert again == result  # deterministic

    overridden = torbtsim.run_scenario(json.dumps(config), overrides=["seed=9"])
    assert overridden["seed"] == 9


def test_config_validation_error():
    with pytest.raises(ValueError):
        torbtsim.run_scenario("", overrides=["bittorrent.tor_user_fraction=2.0"])


def test_over_representation():
    rows = torbtsim.over_representation(
        {"JP": 130, "US": 870}, {"JP": 0.13 / 5.6, "US": 1 - 0.13 / 5.6}, 10
    )
    jp = next(r for r in rows if r["key"] == "JP")
    assert jp["over"] == pytest.approx(5.6, abs=0.05)


def test_rank_stability():
    series = torbtsim.rank_stability([{"US": 1, "DE": 2}, {"US": 5, "DE": 3}])
    assert series["US"] == [1, 0]
    assert series["DE"] == [-1, 0]
