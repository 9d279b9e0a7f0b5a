"""Greybox fuzzing focused on unsafe code through partial coverage instrumentation.

Functions that cannot reach any unsafe function are put on a block list;
their edges get no coverage guards, so the fuzzer's novelty signal only
reflects code on the way to unsafe locations.
"""

from .callgraph import CallGraph, merge, parse_dot, parse_edgelist, reverse, serialize_edgelist
from .coverage import (
    CoverageMap,
    ExecutionTrace,
    GuardTable,
    allocate_guards,
    apply_trace,
    bucketize,
    novelty_check,
)
from .evalstats import a12, aggregate_report, classify_effect, mann_whitney_u
from .fuzzer import TrialConfig, TrialResult, mutate, run_campaign, run_trial
from .harness import get_target, list_targets
from .pathfinder import BlockList, compute_blocklist, coverage_fraction, write_blocklist
from .unsafescan import UnsafeManifest, load_manifest, scan_source, write_manifest

__version__ = "0.1.0"
