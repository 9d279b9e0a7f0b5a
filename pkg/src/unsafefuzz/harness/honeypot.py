"""``honeypot``: a large safe tokenizer that showers the fuzzer with novelty.

Inputs whose first byte is not ``0xA5`` are fed to ``hp_tokenize``, which
dispatches each of the first 32 bytes through 8 class functions and 32 leaf
functions.  Byte values, repeats and runs all move edge counts between
buckets, so a fully instrumented fuzzer keeps admitting new corpus entries
from this region even though none of it can reach unsafe code.

The real work sits behind three chained byte-equality gates (``data[0]``,
``data[1]``, ``data[2]``), each entering an unsafe function with an oracle.
"""

from __future__ import annotations

from ..coverage import ExecutionTrace
from ..unsafescan import UnsafeManifest
from .base import TargetProgram, graph

GATES = (0xA5, 0x3C, 0x7E)
TOKENIZE_LIMIT = 32
N_CLASSES = 8
N_LEAVES = 4

UNSAFE_PATH = {
    # 0 entry, 1 first gate open, 2 honeypot branch
    "fuzz_target": 3,
    # 0 entry, 1 next gate open, 2 next gate closed
    "frame_header": 3,
    "frame_body": 3,
    # 0 entry, 1 zero length marker
    "frame_trailer": 2,
}


def _leaf(k: int, j: int) -> str:
    return f"hp_leaf_{k}_{j}"


def _class(k: int) -> str:
    return f"hp_class_{k}"


HONEYPOT = {"hp_tokenize": 4}  # 0 entry, 1 per byte, 2 long input, 3 short input
for _k in range(N_CLASSES):
    HONEYPOT[_class(_k)] = 2  # 0 entry, 1 same class as previous byte
    for _j in range(N_LEAVES):
        HONEYPOT[_leaf(_k, _j)] = 4  # low two bits of the byte

FUNCTIONS = {**UNSAFE_PATH, **HONEYPOT}

CALLS = [
    ("fuzz_target", "frame_header"),
    ("fuzz_target", "hp_tokenize"),
    ("frame_header", "frame_body"),
    ("frame_body", "frame_trailer"),
]
for _k in range(N_CLASSES):
    CALLS.append(("hp_tokenize", _class(_k)))
    for _j in range(N_LEAVES):
        CALLS.append((_class(_k), _leaf(_k, _j)))

ORACLES = {
    "header_write": "frame_header",
    "body_write": "frame_body",
    "trailer_write": "frame_trailer",
}

_BYTE_EVENTS = tuple(
    (("hp_tokenize", 1), (_class(b >> 5), 0), (_leaf(b >> 5, (b >> 3) & 3), b & 3))
    for b in range(256)
)
_REPEAT = tuple((_class(k), 1) for k in range(N_CLASSES))


def _run(data: bytes) -> ExecutionTrace:
    ev = [("fuzz_target", 0)]
    if data and data[0] == GATES[0]:
        ev.append(("fuzz_target", 1))
        ev.append(("frame_header", 0))
        hits = {"header_write"}
        crashed = False
        if len(data) > 1 and data[1] == GATES[1]:
            ev.append(("frame_header", 1))
            ev.append(("frame_body", 0))
            hits.add("body_write")
            if len(data) > 2 and data[2] == GATES[2]:
                ev.append(("frame_body", 1))
                ev.append(("frame_trailer", 0))
                hits.add("trailer_write")
                if len(data) > 3 and data[3] == 0:
                    ev.append(("frame_trailer", 1))
                    crashed = True
            else:
                ev.append(("frame_body", 2))
        else:
            ev.append(("frame_header", 2))
        return ExecutionTrace(tuple(ev), frozenset(hits), crashed)

    ev.append(("fuzz_target", 2))
    ev.append(("hp_tokenize", 0))
    ev.append(("hp_tokenize", 2 if len(data) > TOKENIZE_LIMIT else 3))
    prev = -1
    extend = ev.extend
    for b in data[:TOKENIZE_LIMIT]:
        extend(_BYTE_EVENTS[b])
        k = b >> 5
        if k == prev:
            ev.append(_REPEAT[k])
        prev = k
    return ExecutionTrace(tuple(ev), frozenset(), False)


def build() -> TargetProgram:
    return TargetProgram(
        name="honeypot",
        description="large novelty-rich safe region beside a narrow gated unsafe path",
        functions=FUNCTIONS,
        callgraph=graph(CALLS),
        unsafe_manifest=UnsafeManifest(frozenset({"frame_header", "frame_body", "frame_trailer"})),
        oracles=ORACLES,
        run=_run,
        entry="fuzz_target",
        default_corpus=(b"GET /index", b"\x00\x01\x02\x03\x04\x05\x06\x07", b"zzzzzzzz", b"Hello, world"),
        design_blocked_fraction=len(HONEYPOT) / len(FUNCTIONS),
    )
