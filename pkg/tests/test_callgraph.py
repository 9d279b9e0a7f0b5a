import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unsafefuzz.callgraph import (
    CallGraph,
    CallGraphError,
    merge,
    parse_any,
    parse_dot,
    parse_edgelist,
    reverse,
    serialize_edgelist,
)

symbols = st.sampled_from(["main", "a", "b", "c", "d", "_ZN4core3ptr5write17h0123E", "fun_1"])


@st.composite
def graphs(draw):
    edges = draw(st.frozensets(st.tuples(symbols, symbols), max_size=12))
    extra = draw(st.frozensets(symbols, max_size=3))
    indirect = draw(st.frozensets(symbols, max_size=2))
    return CallGraph.from_edges(edges, extra, indirect)


def test_parse_single_edge():
    g = parse_edgelist("a\tb\n")
    assert g.nodes == {"a", "b"}
    assert g.edges == {("a", "b")}
    assert g.indirect_sites == frozenset()


def test_parse_empty():
    assert parse_edgelist("") == CallGraph()


def test_parse_indirect_marker():
    g = parse_edgelist("a\t<indirect>\n")
    assert g.nodes == {"a"}
    assert g.edges == frozenset()
    assert g.indirect_sites == {"a"}


def test_comments_blank_lines_and_duplicates():
    g = parse_edgelist("# header\n\na\tb\na\tb\r\nb\tb\n")
    assert g.edges == {("a", "b"), ("b", "b")}


@pytest.mark.parametrize("text, line", [
    ("a\tb\nab\n", 2),
    ("a\tb\tc\n", 1),
    ("\tb\n", 1),
    ("x\ty\na\t\n", 2),
])
def test_malformed_lines_report_line_number(text, line):
    with pytest.raises(CallGraphError) as info:
        parse_edgelist(text)
    assert info.value.line == line


def test_graph_invariants_enforced():
    with pytest.raises(CallGraphError):
        CallGraph(frozenset({"a"}), frozenset({("a", "b")}))
    with pytest.raises(CallGraphError):
        CallGraph(frozenset({"a"}), frozenset(), frozenset({"z"}))


LLVM_DOT = """digraph "Call graph: demo.ll" {
	label="Call graph: demo.ll";

	Node0x1 [shape=record,label="{external node}"];
	Node0x1 -> Node0x2;
	Node0x2 [shape=record,label="{main}"];
	Node0x2 -> Node0x3;
	Node0x2 -> Node0x4;
	Node0x3 [shape=record,label="{fun_1}"];
	Node0x4 [shape=record,label="{fun_2}"];
	Node0x4 -> Node0x5;
	Node0x5 [shape=record,label=""];
}
"""


def test_parse_llvm_dot():
    g = parse_dot(LLVM_DOT)
    assert g.nodes == {"main", "fun_1", "fun_2"}
    assert g.edges == {("main", "fun_1"), ("main", "fun_2")}
    assert g.indirect_sites == {"fun_2"}


def test_dot_two_nodes_one_edge():
    g = parse_dot('digraph G {\n n1 [label="f"];\n n2 [label="g"];\n n1 -> n2;\n}\n')
    assert (len(g.nodes), len(g.edges)) == (2, 1)


def test_dot_empty_label_callee_is_indirect():
    g = parse_dot('digraph G {\n m [label="{main}"];\n x [label=""];\n m -> x;\n}')
    assert g.nodes == {"main"}
    assert g.indirect_sites == {"main"}


def test_dot_without_edges():
    g = parse_dot('digraph G {\n a [label="{a}"];\n b [label="{b}"];\n}')
    assert g.nodes == {"a", "b"} and not g.edges


def test_dot_errors():
    with pytest.raises(CallGraphError):
        parse_dot("graph G { a -- b }")
    with pytest.raises(CallGraphError):
        parse_dot('digraph G {\n a [label="f"];\n this is not dot\n}')
    with pytest.raises(CallGraphError):
        parse_dot('digraph G {\n a [label="f"];\n b [label="f"];\n}')


def test_parse_any_dispatch():
    assert parse_any(LLVM_DOT) == parse_dot(LLVM_DOT)
    assert parse_any("a\tb\n") == parse_edgelist("a\tb\n")


def test_merge_examples():
    g = parse_edgelist("a\tb\nc\t<indirect>\n")
    assert merge([g, CallGraph()]) == g
    m = merge([parse_edgelist("a\tb\n"), parse_edgelist("b\tc\n")])
    assert m.edges == {("a", "b"), ("b", "c")}


def test_reverse_examples():
    assert reverse(CallGraph()) == CallGraph()
    assert reverse(parse_edgelist("a\tb\n")).edges == {("b", "a")}


@given(graphs(), graphs(), graphs())
def test_merge_is_associative_commutative_idempotent(g1, g2, g3):
    assert merge([g1, g2]) == merge([g2, g1])
    assert merge([merge([g1, g2]), g3]) == merge([g1, merge([g2, g3])])
    assert merge([g1, g1]) == g1


@given(graphs())
def test_reverse_involution_and_counts(g):
    r = reverse(g)
    assert reverse(r) == g
    assert len(r.nodes) == len(g.nodes) and len(r.edges) == len(g.edges)
    assert r.indirect_sites == g.indirect_sites


@settings(max_examples=200)
@given(graphs())
def test_edgelist_round_trip(g):
    text = serialize_edgelist(g)
    assert parse_edgelist(text) == g
    assert serialize_edgelist(parse_edgelist(text)) == text
