"""Edge-coverage map semantics under partial instrumentation.

Every CFG edge of an instrumented function owns a guard; executing the edge
bumps a saturating 8-bit counter at the guard's index in a fixed-size map.
Functions on the block list receive no guards at all, so their execution
leaves no trace in the map and cannot make an input look novel.

Counts are compared across runs through the classic eight-bucket classing
(1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+).  Bucket membership is kept as a
bitmask per guard; a run is novel when it sets a bit not seen before.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

logger = logging.getLogger(__name__)

MAP_SIZE = 1 << 16

BUCKET_LABELS = ("0", "1", "2", "3", "4-7", "8-15", "16-31", "32-127", "128-255")
_BUCKET_UPPER = (0, 1, 2, 3, 7, 15, 31, 127, 255)


def bucketize(count: int) -> int:
    """Bucket index (0-8) of a hit count; see ``BUCKET_LABELS``."""
    if not 0 <= count <= 255:
        raise ValueError(f"count out of range: {count}")
    for idx, upper in enumerate(_BUCKET_UPPER):
        if count <= upper:
            return idx
    raise AssertionError("unreachable")


# count -> bucket bit (bucket 0 has no bit: a zero count carries no signal)
BUCKET_BITS = np.array([0 if c == 0 else 1 << (bucketize(c) - 1) for c in range(256)], dtype=np.uint8)
_BUCKET_BITS_PY = tuple(int(b) for b in BUCKET_BITS)


class TraceMismatch(RuntimeError):
    """A trace names an edge the guard table does not know about."""


def check_map_size(map_size: int) -> int:
    if map_size < 256 or map_size & (map_size - 1):
        raise ValueError(f"map size must be a power of two >= 256, got {map_size}")
    return map_size


@dataclass(frozen=True)
class ExecutionTrace:
    events: tuple[tuple[str, int], ...] = ()
    oracle_hits: frozenset[str] = frozenset()
    crashed: bool = False

    def functions(self) -> set[str]:
        return {fn for fn, _ in self.events}


@dataclass(frozen=True)
class GuardTable:
    assignment: Mapping[tuple[str, int], int]
    map_size: int = MAP_SIZE
    blocked: frozenset[str] = frozenset()
    edge_counts: Mapping[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.assignment)


def allocate_guards(edge_counts: Mapping[str, int], blocklist=None, map_size: int = MAP_SIZE) -> GuardTable:
    """Hand out guard ids to every edge of every non-blocked function.

    Functions are visited in symbol order and edges in index order; ids are
    dense from zero and wrap modulo ``map_size``.  ``blocklist`` may be a
    ``BlockList``, any set of symbols, or ``None`` for a build that never
    filters.
    """
    check_map_size(map_size)
    assignment: dict[tuple[str, int], int] = {}
    if blocklist is None:
        blocked: frozenset[str] = frozenset()
        functions = sorted(edge_counts)
    else:
        blocked = frozenset(getattr(blocklist, "blocked", blocklist))
        functions = [f for f in sorted(edge_counts) if f not in blocked]
    next_id = 0
    for fn in functions:
        for edge in range(edge_counts[fn]):
            assignment[(fn, edge)] = next_id % map_size
            next_id += 1
    if next_id > map_size:
        logger.warning("%d edges exceed map size %d; guard ids will collide", next_id, map_size)
    return GuardTable(assignment, map_size, blocked, dict(edge_counts))


class CoverageMap:
    """Saturating 8-bit hit counters, one per guard id."""

    def __init__(self, map_size: int = MAP_SIZE):
        self.hits = np.zeros(check_map_size(map_size), dtype=np.uint8)

    @property
    def map_size(self) -> int:
        return self.hits.size

    def reset(self) -> None:
        self.hits.fill(0)

    def copy(self) -> "CoverageMap":
        out = CoverageMap(self.map_size)
        out.hits[:] = self.hits
        return out

    def hexdump(self, width: int = 32) -> str:
        """Rows of non-zero spans as ``offset: hex bytes``; all-zero rows omitted."""
        rows = []
        for start in range(0, self.map_size, width):
            row = self.hits[start:start + width]
            if row.any():
                rows.append(f"{start:08x}: {row.tobytes().hex(' ')}")
        return "\n".join(rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoverageMap) and np.array_equal(self.hits, other.hits)


def trace_counts(gt: GuardTable, trace: ExecutionTrace) -> dict[int, int]:
    """Per-guard hit counts of one trace, saturated at 255."""
    counts: Counter[int] = Counter()
    assignment = gt.assignment
    blocked = gt.blocked
    for key in trace.events:
        gid = assignment.get(key)
        if gid is None:
            if key[0] in blocked:
                continue
            raise TraceMismatch(f"edge {key[1]} of {key[0]!r} has no guard")
        counts[gid] += 1
    return {gid: min(c, 255) for gid, c in counts.items()}


def apply_trace(cmap: CoverageMap, gt: GuardTable, trace: ExecutionTrace) -> CoverageMap:
    """Add a trace's edge hits into ``cmap`` in place (saturating) and return it."""
    if cmap.map_size != gt.map_size:
        raise ValueError("coverage map and guard table disagree on map size")
    counts = trace_counts(gt, trace)
    if counts:
        idx = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
        add = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))
        cmap.hits[idx] = np.minimum(cmap.hits[idx].astype(np.int64) + add, 255)
    return cmap


def new_summary(map_size: int = MAP_SIZE) -> np.ndarray:
    """Per-guard bitmask of buckets seen so far (all empty)."""
    return np.zeros(check_map_size(map_size), dtype=np.uint8)


def novelty_check(summary: np.ndarray, run_map: CoverageMap) -> tuple[bool, np.ndarray]:
    """Merge ``run_map``'s buckets into ``summary`` (in place); report whether any were new."""
    bits = BUCKET_BITS[run_map.hits]
    fresh = bits & ~summary
    if not fresh.any():
        return False, summary
    summary |= bits
    return True, summary


def merge_counts(summary: np.ndarray, counts: Mapping[int, int]) -> int:
    """Sparse form of :func:`novelty_check` for a run whose map holds ``counts``.

    Returns the number of guards whose bucket set grew; zero means not novel.
    """
    grown = 0
    for gid, c in counts.items():
        bit = _BUCKET_BITS_PY[c]
        seen = int(summary[gid])
        if bit & ~seen:
            summary[gid] = seen | bit
            grown += 1
    return grown


def counts_to_map(counts: Mapping[int, int], map_size: int) -> CoverageMap:
    cmap = CoverageMap(map_size)
    for gid, c in counts.items():
        cmap.hits[gid] = c
    return cmap


def summary_buckets(summary: np.ndarray, gid: int) -> list[str]:
    """Labels of the buckets recorded for one guard."""
    return [BUCKET_LABELS[i + 1] for i in range(8) if int(summary[gid]) >> i & 1]


def guards_of(gt: GuardTable, functions: Iterable[str]) -> set[int]:
    wanted = set(functions)
    return {gid for (fn, _), gid in gt.assignment.items() if fn in wanted}
