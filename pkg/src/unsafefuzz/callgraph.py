"""Whole-program call graphs: parsing, merging and reversal.

Graphs are immutable values keyed by function symbol.  The canonical
interchange format is a tab-separated edge list::

    # comment
    main\tparse
    parse\t<indirect>

where the callee token ``<indirect>`` marks a call site whose target could
not be resolved.  A small DOT subset (as emitted by LLVM's ``dot-callgraph``
pass) is accepted as well.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

INDIRECT = "<indirect>"
NODE_PRAGMA = "#node "


class CallGraphError(ValueError):
    """Raised for malformed or inconsistent call-graph input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def check_symbol(symbol: str) -> str:
    if not symbol:
        raise CallGraphError("empty function symbol")
    if "\t" in symbol or "\n" in symbol or "\r" in symbol:
        raise CallGraphError(f"symbol contains tab or newline: {symbol!r}")
    return symbol


@dataclass(frozen=True)
class CallGraph:
    nodes: frozenset[str] = field(default_factory=frozenset)
    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    indirect_sites: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "indirect_sites", frozenset(self.indirect_sites))
        for u, v in self.edges:
            if u not in self.nodes or v not in self.nodes:
                raise CallGraphError(f"edge ({u}, {v}) has an endpoint outside the node set")
        if not self.indirect_sites <= self.nodes:
            raise CallGraphError("indirect call sites must be graph nodes")

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str]],
        nodes: Iterable[str] = (),
        indirect_sites: Iterable[str] = (),
    ) -> "CallGraph":
        """Build a graph, adding every edge endpoint and indirect site as a node."""
        edges = frozenset(edges)
        indirect_sites = frozenset(indirect_sites)
        all_nodes = set(nodes) | indirect_sites
        for u, v in edges:
            all_nodes.add(u)
            all_nodes.add(v)
        for n in all_nodes:
            check_symbol(n)
        return cls(frozenset(all_nodes), edges, indirect_sites)

    def successors(self) -> dict[str, list[str]]:
        """Adjacency lists, sorted for deterministic traversal."""
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
        for succ in adj.values():
            succ.sort()
        return adj

    def __len__(self) -> int:
        return len(self.nodes)


def parse_edgelist(text: str) -> CallGraph:
    """Parse the tab-separated edge-list format.

    Raises :class:`CallGraphError` carrying the 1-based line number for a
    line that does not have exactly two non-empty fields.
    """
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    indirect: set[str] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.startswith(NODE_PRAGMA):
            nodes.add(check_symbol(line[len(NODE_PRAGMA):]))
            continue
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise CallGraphError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        caller, callee = fields
        if not caller or not callee:
            raise CallGraphError("empty symbol", lineno)
        nodes.add(caller)
        if callee == INDIRECT:
            indirect.add(caller)
        else:
            nodes.add(callee)
            edges.add((caller, callee))
    return CallGraph(frozenset(nodes), frozenset(edges), frozenset(indirect))


def serialize_edgelist(g: CallGraph) -> str:
    """Canonical edge-list text: sorted edges, then indirect sites.

    Nodes that appear in neither an edge nor an indirect site are kept as
    ``#node <symbol>`` lines, which other readers see as plain comments.
    """
    lines = [f"{u}\t{v}" for u, v in sorted(g.edges)]
    lines += [f"{n}\t{INDIRECT}" for n in sorted(g.indirect_sites)]
    touched = {u for u, _ in g.edges} | {v for _, v in g.edges} | set(g.indirect_sites)
    lines += [f"{NODE_PRAGMA}{n}" for n in sorted(g.nodes - touched)]
    return "".join(line + "\n" for line in lines)


_DOT_HEADER = re.compile(r"^\s*(?:strict\s+)?digraph\b[^{]*\{", re.S)
_DOT_NODE = re.compile(r'^\s*("?)([A-Za-z0-9_.:]+)\1\s*\[(.*)\]\s*;?\s*$')
_DOT_EDGE = re.compile(r'^\s*("?)([A-Za-z0-9_.:]+)\1\s*->\s*("?)([A-Za-z0-9_.:]+)\3\s*(?:\[.*\])?\s*;?\s*$')
_DOT_LABEL = re.compile(r'\blabel\s*=\s*"((?:[^"\\]|\\.)*)"')
_EXTERNAL_LABELS = {"", "external node", "null function", "<<null function>>"}


def parse_dot(text: str) -> CallGraph:
    """Parse an LLVM-style ``dot-callgraph`` dump.

    Node labels carry the symbol, optionally wrapped in braces
    (``label="{main}"``).  Nodes labelled ``external node`` or with an empty
    label stand for unresolved targets: an edge into such a node marks the
    caller as an indirect call site, edges out of it are dropped.
    """
    m = _DOT_HEADER.match(text)
    if m is None:
        raise CallGraphError("not a DOT digraph")
    body = text[m.end():]
    close = body.rfind("}")
    if close < 0 or body[close + 1:].strip():
        raise CallGraphError("unterminated digraph body")
    body = body[:close]

    labels: dict[str, str] = {}
    raw_edges: list[tuple[str, str]] = []
    # Offset so error line numbers refer to the whole document.
    first_line = text[: m.end()].count("\n") + 1
    for offset, stmt in enumerate(body.split("\n")):
        lineno = first_line + offset
        stmt = stmt.strip()
        if not stmt or stmt.startswith(("//", "#")):
            continue
        if stmt.endswith(";"):
            stmt = stmt[:-1].rstrip()
        if re.match(r"^(graph|node|edge)\s*\[", stmt) or re.match(r"^\w+\s*=", stmt):
            continue
        em = _DOT_EDGE.match(stmt)
        if em:
            raw_edges.append((em.group(2), em.group(4)))
            continue
        nm = _DOT_NODE.match(stmt)
        if nm:
            lm = _DOT_LABEL.search(nm.group(3))
            label = lm.group(1) if lm else nm.group(2)
            label = label.replace('\\"', '"').strip()
            if label.startswith("{") and label.endswith("}"):
                label = label[1:-1].strip()
            labels[nm.group(2)] = label
            continue
        raise CallGraphError(f"unparseable DOT statement: {stmt!r}", lineno)

    by_label: dict[str, str] = {}
    for node_id, label in labels.items():
        if label in _EXTERNAL_LABELS:
            continue
        if label in by_label:
            raise CallGraphError(
                f"label {label!r} is used by both {by_label[label]} and {node_id}"
            )
        by_label[label] = node_id

    def symbol(node_id: str) -> str | None:
        label = labels.get(node_id, node_id)
        return None if label in _EXTERNAL_LABELS else label

    nodes = set(by_label)
    edges: set[tuple[str, str]] = set()
    indirect: set[str] = set()
    for a, b in raw_edges:
        sa, sb = symbol(a), symbol(b)
        if sa is None:
            if sb is not None:
                nodes.add(sb)
            continue
        nodes.add(sa)
        if sb is None:
            indirect.add(sa)
        else:
            nodes.add(sb)
            edges.add((sa, sb))
    for n in nodes:
        check_symbol(n)
    return CallGraph(frozenset(nodes), frozenset(edges), frozenset(indirect))


def looks_like_dot(text: str) -> bool:
    return _DOT_HEADER.match(text) is not None


def parse_any(text: str) -> CallGraph:
    """Dispatch on content: DOT if it opens with a digraph header, else edge list."""
    if looks_like_dot(text):
        return parse_dot(text)
    return parse_edgelist(text)


def merge(graphs: Iterable[CallGraph]) -> CallGraph:
    """Union of several module graphs, joined on symbol names."""
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    indirect: set[str] = set()
    for g in graphs:
        nodes |= g.nodes
        edges |= g.edges
        indirect |= g.indirect_sites
    return CallGraph(frozenset(nodes), frozenset(edges), frozenset(indirect))


def reverse(g: CallGraph) -> CallGraph:
    return CallGraph(g.nodes, frozenset((v, u) for u, v in g.edges), g.indirect_sites)
