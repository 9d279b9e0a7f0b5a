import random

import pytest

from unsafefuzz.callgraph import parse_edgelist
from unsafefuzz.harness import (
    InputTooLong,
    check_shipped,
    execute,
    get_target,
    list_targets,
    shipped_files,
)
from unsafefuzz.harness import gatekeeper, honeypot, multi_oracle
from unsafefuzz.pathfinder import compute_blocklist, reaching_set
from unsafefuzz.unsafescan import load_manifest

NAMES = ["gatekeeper", "honeypot", "multi_oracle"]


def checksum_input(payload: bytes) -> bytes:
    return b"RUST" + payload + bytes([sum(payload) & 0xFF])


def test_gatekeeper_empty_input():
    t = execute(get_target("gatekeeper"), b"")
    assert t.events and not t.oracle_hits and not t.crashed


@pytest.mark.parametrize("payload", [b"", b"a", b"\x10\x20\x30", bytes(range(40))])
def test_gatekeeper_checksum_reaches_oracle(payload):
    t = execute(get_target("gatekeeper"), checksum_input(payload))
    assert t.oracle_hits == {"deep_unsafe"}


@pytest.mark.parametrize("data", [b"RUST", b"RUSTab", b"RUSt\x00", b"xRUST\x00"])
def test_gatekeeper_near_misses(data):
    assert not execute(get_target("gatekeeper"), data).oracle_hits


def test_gatekeeper_crash():
    t = execute(get_target("gatekeeper"), checksum_input(b"\xff" + b"\x01" * 8))
    assert t.crashed and t.oracle_hits == {"deep_unsafe"}


def test_honeypot_gates():
    t = get_target("honeypot")
    g1, g2, g3 = honeypot.GATES
    assert execute(t, bytes([g1])).oracle_hits == {"header_write"}
    assert execute(t, bytes([g1, g2])).oracle_hits == {"header_write", "body_write"}
    assert execute(t, bytes([g1, g2, g3, 1])).oracle_hits == set(honeypot.ORACLES)
    assert execute(t, bytes([g1, g2, g3, 0])).crashed
    assert not execute(t, bytes([g2, g1, g3])).oracle_hits


def test_honeypot_is_mostly_safe():
    d = {x.name: x for x in list_targets()}["honeypot"]
    assert d.blocked_fraction >= 0.8
    assert len(d.oracles) == 3


def test_multi_oracle_depths():
    t = get_target("multi_oracle")
    assert len(t.oracles) == 7
    for cmd, depth in enumerate(multi_oracle.DEPTHS):
        data = bytes([cmd] + [multi_oracle.gate_byte(cmd, lvl) for lvl in range(depth)] + [9, 9, 9])
        assert execute(t, data).oracle_hits == {f"loc_{cmd}"}
        if depth:
            assert not execute(t, bytes([cmd])).oracle_hits


def test_over_length_input_is_rejected():
    t = get_target("gatekeeper")
    with pytest.raises(InputTooLong):
        t.execute(b"x" * (t.max_input_len + 1))


def test_unknown_target():
    with pytest.raises(KeyError):
        get_target("nope")


def test_list_targets_contents():
    names = [d.name for d in list_targets()]
    assert {"gatekeeper", "honeypot"} <= set(names)
    for d in list_targets():
        t = d.target
        b = compute_blocklist(t.callgraph, t.unsafe_manifest)
        assert d.blocked_fraction == pytest.approx(len(b.blocked) / len(t.functions))
        assert d.blocked_fraction == pytest.approx(d.design_blocked_fraction)


@pytest.mark.parametrize("name", NAMES)
def test_shipped_files_match_definitions(name):
    edges, manifest = shipped_files(name)
    t = get_target(name)
    assert parse_edgelist(edges) == t.callgraph
    assert load_manifest(manifest) == t.unsafe_manifest
    assert check_shipped(name)


@pytest.mark.parametrize("name", NAMES)
def test_traces_are_consistent_with_declarations(name):
    t = get_target(name)
    rng = random.Random(name)
    from_entry = _forward(t.callgraph, t.entry)
    for i in range(2000):
        data = _random_input(rng, t)
        trace = t.execute(data)
        assert trace == t.execute(data)
        for fn, edge in trace.events:
            assert 0 <= edge < t.functions[fn]
        assert trace.functions() <= from_entry
        assert {t.oracles[o] for o in trace.oracle_hits} <= trace.functions()


def _forward(g, start):
    from unsafefuzz.callgraph import reverse
    return reaching_set(reverse(g), {start})


def _random_input(rng, t):
    """Random bytes, sometimes prefixed with the bytes a target's gates want."""
    tail = bytes(rng.randrange(256) for _ in range(rng.randint(0, 24)))
    if t.name == "gatekeeper" and rng.random() < 0.3:
        return checksum_input(tail) if rng.random() < 0.5 else b"RUST" + tail
    if t.name == "honeypot" and rng.random() < 0.3:
        return bytes(honeypot.GATES[: rng.randint(1, 3)]) + tail
    if t.name == "multi_oracle" and rng.random() < 0.3:
        cmd = rng.randrange(7)
        return bytes([cmd] + [multi_oracle.gate_byte(cmd, k) for k in range(multi_oracle.DEPTHS[cmd])]) + tail
    return tail


def test_gatekeeper_magic_constant():
    assert gatekeeper.MAGIC == b"RUST"
