"""Mutation-based greybox fuzzing loop with (optionally filtered) edge feedback.

The loop is the plain AFL recipe: walk the queue round-robin in admission
order, spend a constant number of havoc mutations on each entry, and admit
a mutant when its coverage lands some guard in a bucket not seen before.
The guard table comes from the trial's block list, so functions on it
neither count as coverage nor make inputs interesting.

Time is virtual by default: every execution advances the clock by
``ms_per_exec`` milliseconds, which makes a trial a pure function of its
configuration.  ``wall_clock=True`` measures real elapsed time instead.
"""

from __future__ import annotations

import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from .coverage import MAP_SIZE, allocate_guards, merge_counts, new_summary, trace_counts
from .harness import MAX_INPUT_LEN, get_target
from .pathfinder import BlockList, compute_blocklist

logger = logging.getLogger(__name__)

CENSORED = None

INTERESTING = (0, 1, 127, 128, 255, 65535)
ARITH_MAX = 35
BLOCK_MAX = 32


class ConfigError(ValueError):
    pass


# --- havoc ---------------------------------------------------------------------

def flip_bit(buf: bytearray, bit: int) -> None:
    """Flip ``bit`` counting most-significant-bit first within each byte."""
    buf[bit >> 3] ^= 0x80 >> (bit & 7)


def _op_flip(buf, rng, pool, max_len):
    flip_bit(buf, rng.randrange(len(buf) * 8))
    return buf


def _op_set(buf, rng, pool, max_len):
    buf[rng.randrange(len(buf))] = rng.randrange(256)
    return buf


def _op_arith(buf, rng, pool, max_len):
    delta = rng.randint(1, ARITH_MAX)
    if rng.random() < 0.5:
        delta = -delta
    pos = rng.randrange(len(buf))
    buf[pos] = (buf[pos] + delta) & 0xFF
    return buf


def _op_interesting(buf, rng, pool, max_len):
    value = INTERESTING[rng.randrange(len(INTERESTING))]
    if value > 255:
        if len(buf) < 2:
            buf[0] = 0xFF
        else:
            pos = rng.randrange(len(buf) - 1)
            buf[pos:pos + 2] = value.to_bytes(2, "little")
    else:
        buf[rng.randrange(len(buf))] = value
    return buf


def _op_duplicate(buf, rng, pool, max_len):
    size = rng.randint(1, min(len(buf), BLOCK_MAX))
    if len(buf) + size > max_len:
        return buf
    src = rng.randrange(len(buf) - size + 1)
    dst = rng.randrange(len(buf) + 1)
    buf[dst:dst] = buf[src:src + size]
    return buf


def _op_delete(buf, rng, pool, max_len):
    if len(buf) <= 1:
        return buf
    size = rng.randint(1, min(len(buf) - 1, BLOCK_MAX))
    start = rng.randrange(len(buf) - size + 1)
    del buf[start:start + size]
    return buf


def _op_splice(buf, rng, pool, max_len):
    if not pool:
        return buf
    other = pool[rng.randrange(len(pool))]
    cut = rng.randrange(min(len(buf), len(other)) + 1)
    out = buf[:cut] + other[cut:]
    return out[:max_len] if out else buf


HAVOC_OPS = (_op_flip, _op_set, _op_arith, _op_interesting, _op_duplicate, _op_delete, _op_splice)


def mutate(
    data: bytes,
    rng: random.Random,
    stack_max: int = 8,
    splice_pool: Sequence[bytes] = (),
    max_len: int = MAX_INPUT_LEN,
) -> bytes:
    """Apply a stack of 1..``stack_max`` uniformly chosen havoc operators."""
    buf = bytearray(data[:max_len])
    for _ in range(rng.randint(1, stack_max)):
        if not buf:
            buf.append(rng.randrange(256))
            continue
        buf = HAVOC_OPS[rng.randrange(len(HAVOC_OPS))](buf, rng, splice_pool, max_len)
    return bytes(buf)


# --- trials ----------------------------------------------------------------------

@dataclass(frozen=True)
class Seed:
    data: bytes
    discovered_at: float
    novelty_guards: int


@dataclass(frozen=True)
class TrialConfig:
    target: str
    rng_seed: int
    duration_ms: float
    # None: build the guard table without any block-list handling at all
    blocklist: BlockList | None = None
    initial_corpus: tuple[bytes, ...] | None = None
    havoc_stack_max: int = 8
    energy_base: int = 64
    map_size: int = MAP_SIZE
    wall_clock: bool = False
    ms_per_exec: float = 1.0
    max_input_len: int = MAX_INPUT_LEN
    arm: str = "full"
    trial_index: int = 0

    def __post_init__(self):
        if not self.duration_ms > 0:
            raise ConfigError("duration must be positive")
        if self.initial_corpus is not None and not self.initial_corpus:
            raise ConfigError("initial corpus must not be empty")
        if self.havoc_stack_max < 1 or self.energy_base < 1 or self.ms_per_exec <= 0:
            raise ConfigError("havoc stack, energy and ms_per_exec must be positive")


@dataclass
class TrialResult:
    target: str
    arm: str
    trial_index: int
    rng_seed: int
    executions: int
    first_hit: dict[str, float | None]
    corpus_size: int
    crashes: int
    queue: list[Seed] = field(default_factory=list, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "arm": self.arm,
            "trial_index": self.trial_index,
            "rng_seed": self.rng_seed,
            "executions": self.executions,
            "first_hit": {k: self.first_hit[k] for k in sorted(self.first_hit)},
            "corpus_size": self.corpus_size,
            "crashes": self.crashes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialResult":
        try:
            return cls(
                target=str(d["target"]),
                arm=str(d["arm"]),
                trial_index=int(d["trial_index"]),
                rng_seed=int(d["rng_seed"]),
                executions=int(d["executions"]),
                first_hit={str(k): (None if v is None else float(v)) for k, v in dict(d["first_hit"]).items()},
                corpus_size=int(d["corpus_size"]),
                crashes=int(d["crashes"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed trial result: {exc}") from None


class _OutOfTime(Exception):
    pass


def run_trial(cfg: TrialConfig) -> TrialResult:
    target = get_target(cfg.target)
    if cfg.blocklist is not None:
        unknown = cfg.blocklist.blocked - set(target.functions)
        if unknown:
            raise ConfigError(f"block list names functions unknown to {target.name}: {sorted(unknown)[:5]}")
    corpus = cfg.initial_corpus if cfg.initial_corpus is not None else target.default_corpus
    max_len = min(cfg.max_input_len, target.max_input_len)

    gt = allocate_guards(target.functions, cfg.blocklist, cfg.map_size)
    summary = new_summary(cfg.map_size)
    rng = random.Random(cfg.rng_seed)
    first_hit: dict[str, float | None] = {o: CENSORED for o in target.oracle_ids}
    crash_sigs: set = set()
    queue: list[Seed] = []
    pool: list[bytes] = []
    execs = 0
    execute = target.run
    start = time.perf_counter()

    def clock() -> float:
        if cfg.wall_clock:
            return (time.perf_counter() - start) * 1000.0
        return execs * cfg.ms_per_exec

    def run_one(data: bytes) -> int:
        nonlocal execs
        if cfg.wall_clock:
            if clock() >= cfg.duration_ms:
                raise _OutOfTime
        elif (execs + 1) * cfg.ms_per_exec > cfg.duration_ms:
            raise _OutOfTime
        trace = execute(data)
        execs += 1
        now = clock()
        if trace.oracle_hits:
            for oracle in trace.oracle_hits:
                if first_hit[oracle] is None:
                    first_hit[oracle] = min(now, cfg.duration_ms)
        if trace.crashed:
            crash_sigs.add(trace.events)
        grown = merge_counts(summary, trace_counts(gt, trace))
        if grown:
            queue.append(Seed(data, now, grown))
            pool.append(data)
        return grown

    try:
        for data in corpus:
            run_one(bytes(data[:max_len]))
        fallback = [Seed(bytes(d[:max_len]), 0.0, 0) for d in corpus]
        cursor = 0
        while True:
            sched = queue if queue else fallback
            if cursor >= len(sched):
                cursor = 0
            parent = sched[cursor].data
            for _ in range(cfg.energy_base):
                run_one(mutate(parent, rng, cfg.havoc_stack_max, pool, max_len))
            cursor += 1
    except _OutOfTime:
        pass

    return TrialResult(
        target=target.name,
        arm=cfg.arm,
        trial_index=cfg.trial_index,
        rng_seed=cfg.rng_seed,
        executions=execs,
        first_hit=first_hit,
        corpus_size=len(queue),
        crashes=len(crash_sigs),
        queue=queue,
    )


# --- campaigns ---------------------------------------------------------------------

def trial_seeds(master: int, trials: int) -> list[int]:
    rng = random.Random(master)
    return [rng.getrandbits(63) for _ in range(trials)]


def _run_config(cfg: TrialConfig) -> TrialResult:
    result = run_trial(cfg)
    result.queue = []
    return result


def run_campaign(
    target: str,
    trials: int,
    duration_ms: float,
    rng_seed: int = 0,
    jobs: int = 1,
    ab_identical: bool = False,
    blocklist: BlockList | None = None,
    **config,
) -> tuple[list[TrialResult], list[TrialResult]]:
    """Paired A/B runs: ``full`` has no block list, ``partial`` uses the computed one.

    Trial ``i`` of both arms shares one RNG seed.  With ``ab_identical`` both
    arms run unfiltered, which is a sanity check for the statistics.
    """
    if trials < 2:
        raise ConfigError("a campaign needs at least 2 trials per arm")
    t = get_target(target)
    if blocklist is None:
        blocklist = compute_blocklist(t.callgraph, t.unsafe_manifest)
    partial_bl = BlockList(mode=blocklist.mode) if ab_identical else blocklist
    seeds = trial_seeds(rng_seed, trials)
    base = TrialConfig(target=target, rng_seed=0, duration_ms=duration_ms, **config)
    configs = []
    for arm, bl in (("full", None), ("partial", partial_bl)):
        for i, s in enumerate(seeds):
            configs.append(replace(base, rng_seed=s, blocklist=bl, arm=arm, trial_index=i))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_config, configs))
    else:
        results = [_run_config(c) for c in configs]
    return results[:trials], results[trials:]
