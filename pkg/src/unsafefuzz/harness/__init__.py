"""Bundled in-process fuzz targets with unsafe-location oracles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..callgraph import parse_edgelist, serialize_edgelist
from ..coverage import ExecutionTrace
from ..pathfinder import compute_blocklist, coverage_fraction
from ..unsafescan import load_manifest, write_manifest
from . import gatekeeper, honeypot, multi_oracle
from .base import MAX_INPUT_LEN, InputTooLong, TargetProgram

__all__ = [
    "MAX_INPUT_LEN",
    "InputTooLong",
    "TargetDescriptor",
    "TargetProgram",
    "execute",
    "get_target",
    "list_targets",
    "shipped_files",
]

_BUILDERS = {
    "gatekeeper": gatekeeper.build,
    "honeypot": honeypot.build,
    "multi_oracle": multi_oracle.build,
}


@lru_cache(maxsize=None)
def get_target(name: str) -> TargetProgram:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown target {name!r}; bundled: {', '.join(sorted(_BUILDERS))}") from None


def execute(target: TargetProgram, data: bytes) -> ExecutionTrace:
    return target.execute(data)


@dataclass(frozen=True)
class TargetDescriptor:
    name: str
    description: str
    functions: int
    edges: int
    oracles: tuple[str, ...]
    unsafe_functions: int
    blocked_fraction: float
    design_blocked_fraction: float
    target: TargetProgram


def list_targets() -> list[TargetDescriptor]:
    out = []
    for name in sorted(_BUILDERS):
        t = get_target(name)
        b = compute_blocklist(t.callgraph, t.unsafe_manifest)
        out.append(TargetDescriptor(
            name=t.name,
            description=t.description,
            functions=len(t.functions),
            edges=sum(t.functions.values()),
            oracles=tuple(t.oracle_ids),
            unsafe_functions=len(t.unsafe_manifest),
            blocked_fraction=coverage_fraction(t.callgraph, b),
            design_blocked_fraction=t.design_blocked_fraction,
            target=t,
        ))
    return out


def shipped_files(name: str) -> tuple[str, str]:
    """Text of the call-graph edge list and unsafe manifest shipped for a target."""
    get_target(name)
    data = resources.files(__package__) / "data"
    return (
        (data / f"{name}.edges").read_text(encoding="utf-8"),
        (data / f"{name}.unsafe").read_text(encoding="utf-8"),
    )


def export_files(directory) -> None:
    """Regenerate the shipped edge-list and manifest files into ``directory``."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in sorted(_BUILDERS):
        t = get_target(name)
        header = f"# call graph of bundled target {name}\n"
        (directory / f"{name}.edges").write_text(header + serialize_edgelist(t.callgraph), encoding="utf-8")
        (directory / f"{name}.unsafe").write_text(write_manifest(t.unsafe_manifest), encoding="utf-8")


def check_shipped(name: str) -> bool:
    edges, manifest = shipped_files(name)
    t = get_target(name)
    return parse_edgelist(edges) == t.callgraph and load_manifest(manifest) == t.unsafe_manifest
