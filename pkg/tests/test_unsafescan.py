import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unsafefuzz.unsafescan import (
    ManifestError,
    ScanError,
    UnsafeManifest,
    apply_symbol_map,
    load_manifest,
    load_symbol_map,
    scan_source,
    tokenize,
    write_manifest,
)

SAFE_SRC = """use std::io;
use byteops::Bytes;

fn input() -> u64 {
    let mut input = String::new();
    io::stdin().read_line(&mut input).expect("...");
    input.trim().parse().expect("...")
}

fn main() {
    let v: Vec<u8> = vec![1, 2, 3];
    let mut b = Bytes::new(&v);
    let index = input() as usize;
    let value = input() as u8;
    b.store_at(index, value);
}
"""

STORE_AT_SRC = """pub struct Bytes { start: *const u8,
  end: *const u8, cursor: *const u8,
}

impl Bytes {
    pub fn new(slice: &[u8]) -> Bytes { todo!() }
    fn store_at(&self, n: usize, v: u8) {
        unsafe {
            let ptr = self.cursor.add(n);
            std::ptr::write(ptr, v);
        }
    }
}
"""


def names(src, path="t.rs"):
    return set(scan_source([(path, src)]).manifest.functions)


def test_store_at_is_marked():
    assert names(STORE_AT_SRC) == {"store_at"}


def test_safe_source_is_clean():
    assert names(SAFE_SRC) == set()


def test_comment_and_identifier_are_not_keywords():
    assert names("fn f(){ /* unsafe */ let unsafety = 1; }") == set()


@pytest.mark.parametrize("body", [
    '"unsafe { x }"',
    'r#"unsafe"#',
    'r##"a "# unsafe"##',
    'b"unsafe"',
    "// unsafe\n",
    "/* outer /* unsafe */ still comment unsafe */",
    "let r#unsafe_thing = 1;",
    "let not_unsafe = 2;",
    "let c = '\"'; let d = b'\\''; let e = '\\u{1F600}';",
    "let x: &'static str = \"unsafe\";",
])
def test_lexical_decoys(body):
    assert names(f"fn decoy() {{ {body} }}") == set()


def test_unsafe_fn_and_signature():
    src = """
    pub unsafe fn raw(p: *mut u8) {}
    unsafe extern "C" fn callback() {}
    fn takes(f: unsafe fn()) {}
    trait T { unsafe fn bodiless(&self); }
    """
    assert names(src) == {"raw", "callback", "takes", "bodiless"}


def test_nested_functions_and_closures():
    src = """
    fn outer() {
        fn inner() { unsafe { core::hint::unreachable_unchecked() } }
        let c = || unsafe { 1 };
    }
    fn after() {}
    """
    assert names(src) == {"inner", "outer"}


def test_generic_header_with_lifetimes_and_where():
    src = "fn g<'a, T: Copy>(x: &'a [T]) -> T where T: Default { unsafe { *x.as_ptr() } }"
    assert names(src) == {"g"}


def test_unsafe_impl_is_a_warning_only():
    result = scan_source([("lib.rs", "struct S; unsafe impl Send for S {}\nunsafe trait Q {}\n")])
    assert result.manifest == UnsafeManifest()
    assert len(result.warnings) == 2
    assert all(w.symbol == "<toplevel:lib.rs>" for w in result.warnings)


def test_unbalanced_braces_name_the_file():
    with pytest.raises(ScanError, match="broken.rs"):
        scan_source([("broken.rs", "fn f() { {")])
    with pytest.raises(ScanError, match="broken.rs"):
        scan_source([("broken.rs", "fn f() { } }")])


def test_tokenizer_line_numbers():
    toks = list(tokenize('/* a\nb */ "x\ny"\nfoo'))
    assert toks[-1].text == "foo" and toks[-1].line == 4


def test_manifest_examples():
    assert load_manifest("f\ng\n") == UnsafeManifest(frozenset({"f", "g"}))
    assert load_manifest("f\nf\n") == UnsafeManifest(frozenset({"f"}))
    assert load_manifest("# comment\n") == UnsafeManifest()
    assert write_manifest(UnsafeManifest(frozenset({"b", "a"}))) == "a\nb\n"
    assert write_manifest(UnsafeManifest()) == ""
    assert write_manifest(UnsafeManifest(frozenset({"f"}))) == "f\n"


def test_manifest_rejects_tabs():
    with pytest.raises(ManifestError):
        load_manifest("f\tg\n")


def test_symbol_map():
    mapping = load_symbol_map("store_at\t_ZN7byteops5Bytes8store_at17h1E\n")
    m = apply_symbol_map(UnsafeManifest(frozenset({"store_at", "other"})), mapping)
    assert m.functions == {"_ZN7byteops5Bytes8store_at17h1E", "other"}


sym = st.text(st.characters(blacklist_categories=("Cs", "Cc", "Zs", "Zl", "Zp")), min_size=1, max_size=12).filter(
    lambda s: not s.startswith("#") and s.strip() == s
)


@given(st.frozensets(sym, max_size=10))
def test_manifest_round_trip(functions):
    m = UnsafeManifest(functions)
    assert load_manifest(write_manifest(m)) == m


DECOYS = [
    "// unsafe { }\n",
    "/* unsafe { */",
    '"unsafe }"',
    'r#"unsafe {"#',
    "let unsafe_count = 0;",
]


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 4), st.sampled_from(DECOYS)), max_size=8))
def test_injections_into_comments_and_strings_change_nothing(injections):
    parts = ["fn a() { let x = 1; }", "fn b() { unsafe { g() } }", "fn c() { h(); }"]
    base = names("\n".join(parts))
    for where, decoy in injections:
        if where < 3:
            parts[where] = parts[where][:-1] + decoy + " }"
        else:
            parts.append(decoy)
    assert names("\n".join(parts)) == base


@given(st.integers(0, 5))
def test_adding_an_unsafe_function_adds_exactly_its_name(k):
    src = "\n".join(f"fn safe_{i}() {{ let v = {i}; }}" for i in range(k))
    before = names(src)
    after = names(src + "\nfn newly() { unsafe { ptr() } }")
    assert after - before == {"newly"} and before <= after
