from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from ..callgraph import CallGraph
from ..coverage import ExecutionTrace
from ..unsafescan import UnsafeManifest

MAX_INPUT_LEN = 4096


class InputTooLong(ValueError):
    """Input exceeds the target's maximum length; this is a rejection, not a crash."""


@dataclass(frozen=True)
class TargetProgram:
    """An in-process fuzz target that reports its own edge events.

    ``run`` maps input bytes to an :class:`ExecutionTrace`; it must be a
    pure function.  ``oracles`` maps oracle id to the unsafe function that
    holds the marked location.
    """

    name: str
    description: str
    functions: Mapping[str, int]
    callgraph: CallGraph
    unsafe_manifest: UnsafeManifest
    oracles: Mapping[str, str]
    run: Callable[[bytes], ExecutionTrace] = field(repr=False)
    entry: str = "main"
    default_corpus: tuple[bytes, ...] = (b"",)
    design_blocked_fraction: float = 0.0
    max_input_len: int = MAX_INPUT_LEN

    def __post_init__(self):
        if set(self.functions) != set(self.callgraph.nodes):
            raise ValueError(f"{self.name}: function table and call graph disagree")
        for oracle, fn in self.oracles.items():
            if fn not in self.unsafe_manifest:
                raise ValueError(f"{self.name}: oracle {oracle} sits in non-unsafe {fn}")
        if not self.unsafe_manifest.functions <= set(self.functions):
            raise ValueError(f"{self.name}: manifest names unknown functions")

    def execute(self, data: bytes) -> ExecutionTrace:
        if len(data) > self.max_input_len:
            raise InputTooLong(f"{len(data)} bytes > {self.max_input_len}")
        return self.run(bytes(data))

    @property
    def oracle_ids(self) -> list[str]:
        return sorted(self.oracles)


def graph(edges: list[tuple[str, str]], extra_nodes=()) -> CallGraph:
    return CallGraph.from_edges(edges, extra_nodes)
