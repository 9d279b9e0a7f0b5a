"""``multi_oracle``: seven unsafe locations behind gates of different depth.

``data[0] % 8`` picks a command.  Commands 0-6 each guard one unsafe
function behind ``depth`` byte-equality checks on ``data[1:]``; command 7
prints help text through a safe region.
"""

from __future__ import annotations

from ..coverage import ExecutionTrace
from ..unsafescan import UnsafeManifest
from .base import TargetProgram, graph

N_COMMANDS = 7
DEPTHS = (0, 0, 1, 1, 2, 2, 3)


def gate_byte(cmd: int, level: int) -> int:
    return (0x11 * (cmd + 1) + 0x35 * level) & 0xFF


FUNCTIONS = {"mo_main": 10}  # 0 entry, 1 empty input, 2 + command
for _c in range(N_COMMANDS):
    # 0 entry, 1..depth gate levels passed, depth+1 gate failed
    FUNCTIONS[f"mo_cmd_{_c}"] = DEPTHS[_c] + 2
    FUNCTIONS[f"mo_raw_{_c}"] = 2  # 0 entry, 1 crash path
FUNCTIONS.update({"mo_help": 3, "mo_usage": 2, "mo_version": 1})

CALLS = [("mo_main", f"mo_cmd_{c}") for c in range(N_COMMANDS)]
CALLS += [(f"mo_cmd_{c}", f"mo_raw_{c}") for c in range(N_COMMANDS)]
CALLS += [("mo_main", "mo_help"), ("mo_help", "mo_usage"), ("mo_help", "mo_version")]

ORACLES = {f"loc_{c}": f"mo_raw_{c}" for c in range(N_COMMANDS)}


def _run(data: bytes) -> ExecutionTrace:
    ev = [("mo_main", 0)]
    if not data:
        ev.append(("mo_main", 1))
        return ExecutionTrace(tuple(ev))
    cmd = data[0] % 8
    ev.append(("mo_main", 2 + cmd))
    if cmd == 7:
        ev.append(("mo_help", 0))
        if len(data) > 1:
            ev.append(("mo_help", 1))
            ev.append(("mo_usage", 0))
            ev.extend(("mo_usage", 1) for _ in data[1:9])
        else:
            ev.append(("mo_help", 2))
            ev.append(("mo_version", 0))
        return ExecutionTrace(tuple(ev))

    fn = f"mo_cmd_{cmd}"
    ev.append((fn, 0))
    depth = DEPTHS[cmd]
    for level in range(depth):
        pos = 1 + level
        if pos < len(data) and data[pos] == gate_byte(cmd, level):
            ev.append((fn, 1 + level))
        else:
            ev.append((fn, depth + 1))
            return ExecutionTrace(tuple(ev))
    raw = f"mo_raw_{cmd}"
    ev.append((raw, 0))
    crashed = cmd == 6 and len(data) > 4 and data[4] == 0
    if crashed:
        ev.append((raw, 1))
    return ExecutionTrace(tuple(ev), frozenset({f"loc_{cmd}"}), crashed)


def build() -> TargetProgram:
    return TargetProgram(
        name="multi_oracle",
        description="seven unsafe locations at depths 0-3 plus a safe help region",
        functions=FUNCTIONS,
        callgraph=graph(CALLS),
        unsafe_manifest=UnsafeManifest(frozenset(ORACLES.values())),
        oracles=ORACLES,
        run=_run,
        entry="mo_main",
        default_corpus=(b"\x07help", b"\x00", b"\x05abc", b"\x0b\x00\x00\x00"),
        design_blocked_fraction=3 / len(FUNCTIONS),
    )
