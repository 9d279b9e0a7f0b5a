"""Block-list construction: functions that can never reach unsafe code.

The block list is the complement of the set of functions from which some
unsafe function is reachable.  It is computed with one breadth-first search
over the reversed call graph, seeded with every unsafe function present in
the graph, so the cost is linear in nodes plus edges.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Literal

from .callgraph import CallGraph
from .unsafescan import UnsafeManifest

logger = logging.getLogger(__name__)

Mode = Literal["standard", "conservative_indirect"]
MODES = ("standard", "conservative_indirect")


@dataclass(frozen=True)
class BlockList:
    blocked: frozenset[str] = field(default_factory=frozenset)
    mode: Mode = "standard"
    # manifest symbols that did not occur in the graph
    missing_unsafe: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.blocked

    def __len__(self) -> int:
        return len(self.blocked)


def reaching_set(g: CallGraph, seeds) -> set[str]:
    """All nodes with a directed path to some seed (seeds included)."""
    preds: dict[str, list[str]] = {n: [] for n in g.nodes}
    for u, v in g.edges:
        preds[v].append(u)
    seen = set(seeds)
    queue = deque(seen)
    while queue:
        n = queue.popleft()
        for p in preds[n]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def compute_blocklist(g: CallGraph, m: UnsafeManifest, mode: Mode = "standard") -> BlockList:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    present = m.functions & g.nodes
    missing = m.functions - g.nodes
    if missing:
        logger.warning(
            "%d unsafe symbol(s) absent from the call graph, ignored: %s",
            len(missing), ", ".join(sorted(missing)[:5]) + (" ..." if len(missing) > 5 else ""),
        )
    seeds = set(present)
    if mode == "conservative_indirect":
        seeds |= g.indirect_sites
    reached = reaching_set(g, seeds)
    return BlockList(frozenset(g.nodes - reached), mode, frozenset(missing))


def coverage_fraction(g: CallGraph, b: BlockList) -> float:
    """Share of the graph's functions that are excluded from instrumentation."""
    if not g.nodes:
        return 0.0
    return len(b.blocked) / len(g.nodes)


def write_blocklist(b: BlockList, format: str = "plain") -> str:
    """Render as one symbol per line (``plain``) or AFL deny-list lines (``afl_denylist``)."""
    fmt = format.replace("-", "_")
    if fmt == "plain":
        return "".join(f"{s}\n" for s in sorted(b.blocked))
    if fmt == "afl_denylist":
        return "".join(f"fun: {s}\n" for s in sorted(b.blocked))
    raise ValueError(f"unknown block-list format {format!r}")


def load_blocklist(text: str) -> BlockList:
    """Read either block-list format back; ``#`` comments and blank lines skipped."""
    blocked = set()
    for line in text.split("\n"):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("fun:"):
            line = line[4:].strip()
        blocked.add(line)
    return BlockList(frozenset(blocked))


def summary(g: CallGraph, m: UnsafeManifest, b: BlockList) -> dict:
    """Counts in the style of a per-project exclusion table."""
    return {
        "functions": len(g.nodes),
        "unsafe": len(m.functions & g.nodes),
        "unsafe_missing": len(b.missing_unsafe),
        "blocked": len(b.blocked),
        "blocked_fraction": coverage_fraction(g, b),
        "mode": b.mode,
    }


def format_summary(s: dict) -> str:
    return (
        f"functions: {s['functions']}  unsafe: {s['unsafe']}  "
        f"excluded: {s['blocked']} ({100 * s['blocked_fraction']:.2f}%)"
    )
