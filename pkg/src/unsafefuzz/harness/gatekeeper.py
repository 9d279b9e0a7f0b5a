"""``gatekeeper``: a magic prefix and a checksum in front of one unsafe store.

Reaching the oracle needs ``RUST`` followed by a payload whose last byte
equals the sum (mod 256) of the payload bytes before it.  Rejected inputs
go through a small logging region that never touches unsafe code.
"""

from __future__ import annotations

from ..coverage import ExecutionTrace
from ..unsafescan import UnsafeManifest
from .base import TargetProgram, graph

MAGIC = b"RUST"

FUNCTIONS = {
    # 0 entry, 1-4 magic prefix matched up to k bytes, 5 magic ok, 6 rejected
    "gk_main": 7,
    # 0 entry, 1 checksum loop, 2 checksum ok, 3 checksum bad, 4 empty payload
    "gk_verify": 5,
    # 0 entry, 1 oversized payload
    "gk_deep_store": 2,
    # 0 entry, 1 long input, 2 short input
    "gk_log_reject": 3,
    # 0 entry, 1 per-byte histogram update
    "gk_stats": 2,
}

CALLS = [
    ("gk_main", "gk_verify"),
    ("gk_main", "gk_log_reject"),
    ("gk_verify", "gk_deep_store"),
    ("gk_log_reject", "gk_stats"),
]

_E = {(fn, i): (fn, i) for fn, n in FUNCTIONS.items() for i in range(n)}


def _run(data: bytes) -> ExecutionTrace:
    ev = []
    add = ev.append
    hits = set()
    crashed = False
    add(_E["gk_main", 0])
    matched = 0
    while matched < 4 and matched < len(data) and data[matched] == MAGIC[matched]:
        matched += 1
        add(_E["gk_main", matched])
    if matched == 4:
        add(_E["gk_main", 5])
        add(_E["gk_verify", 0])
        payload = data[4:]
        if not payload:
            add(_E["gk_verify", 4])
        else:
            total = 0
            for b in payload[:-1]:
                total = (total + b) & 0xFF
                add(_E["gk_verify", 1])
            if total == payload[-1]:
                add(_E["gk_verify", 2])
                add(_E["gk_deep_store", 0])
                hits.add("deep_unsafe")
                if len(payload) > 8 and payload[0] == 0xFF:
                    add(_E["gk_deep_store", 1])
                    crashed = True
            else:
                add(_E["gk_verify", 3])
    else:
        add(_E["gk_main", 6])
        add(_E["gk_log_reject", 0])
        add(_E["gk_log_reject", 1 if len(data) > 16 else 2])
        add(_E["gk_stats", 0])
        for _ in data[:16]:
            add(_E["gk_stats", 1])
    return ExecutionTrace(tuple(ev), frozenset(hits), crashed)


def build() -> TargetProgram:
    return TargetProgram(
        name="gatekeeper",
        description="magic prefix + checksum gate guarding one unsafe store",
        functions=FUNCTIONS,
        callgraph=graph(CALLS),
        unsafe_manifest=UnsafeManifest(frozenset({"gk_deep_store"})),
        oracles={"deep_unsafe": "gk_deep_store"},
        run=_run,
        entry="gk_main",
        default_corpus=(b"hello", b"RUSH\x00\x01", b"\x00" * 8, b"data1234"),
        design_blocked_fraction=2 / 5,
    )
