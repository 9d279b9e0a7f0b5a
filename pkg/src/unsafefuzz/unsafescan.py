"""Unsafe-function manifests and a lexical Rust scanner that produces them.

A manifest is a plain set of function symbols, one per line.  The scanner
tokenizes Rust source just far enough to tell a real ``unsafe`` keyword
apart from the same letters in comments, strings, character literals and
longer identifiers, and attributes each occurrence to the innermost
enclosing ``fn`` by tracking brace depth.

The scanner sees source, not monomorphized MIR: unsafe use inside a generic
function is attributed to the generic function's name.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

logger = logging.getLogger(__name__)


class ManifestError(ValueError):
    pass


class ScanError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class UnsafeManifest:
    functions: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "functions", frozenset(self.functions))

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.functions

    def __len__(self) -> int:
        return len(self.functions)

    def __or__(self, other: "UnsafeManifest") -> "UnsafeManifest":
        return UnsafeManifest(self.functions | other.functions)


def load_manifest(text: str) -> UnsafeManifest:
    symbols = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" in line:
            raise ManifestError(f"line {lineno}: symbol contains a tab")
        symbols.add(line.strip())
    return UnsafeManifest(frozenset(symbols))


def write_manifest(m: UnsafeManifest) -> str:
    return "".join(f"{s}\n" for s in sorted(m.functions))


def apply_symbol_map(m: UnsafeManifest, mapping: Mapping[str, str]) -> UnsafeManifest:
    """Rename symbols by exact-string lookup; unmapped names pass through."""
    return UnsafeManifest(frozenset(mapping.get(s, s) for s in m.functions))


def load_symbol_map(text: str) -> dict[str, str]:
    """``plain<TAB>mangled`` per line, ``#`` comments allowed."""
    mapping = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not all(fields):
            raise ManifestError(f"line {lineno}: expected plain<TAB>mangled")
        mapping[fields[0]] = fields[1]
    return mapping


# --- tokenizer ---------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "punct", "literal"
    text: str
    line: int


def _is_ident_start(c: str) -> bool:
    return c == "_" or c.isalpha()


def _is_ident_char(c: str) -> bool:
    return c == "_" or c.isalnum()


def tokenize(src: str, path: str = "<string>") -> Iterator[Token]:
    """Yield identifier, punctuation and literal tokens; comments are dropped.

    Only the distinctions the scanner needs are made: literals are opaque,
    multi-character operators come out one character at a time.
    """
    i, n, line = 0, len(src), 1

    def skip_string(j: int) -> int:
        # j points just past the opening quote
        nonlocal line
        while j < n:
            c = src[j]
            if c == "\\":
                if src[j + 1:j + 2] == "\n":
                    line += 1
                j += 2
                continue
            if c == "\n":
                line += 1
            elif c == '"':
                return j + 1
            j += 1
        raise ScanError(path, "unterminated string literal")

    def skip_raw_string(j: int) -> int:
        # j points at the first '#' or '"' after the r prefix
        nonlocal line
        hashes = 0
        while j < n and src[j] == "#":
            hashes += 1
            j += 1
        if j >= n or src[j] != '"':
            raise ScanError(path, "malformed raw string")
        close = '"' + "#" * hashes
        end = src.find(close, j + 1)
        if end < 0:
            raise ScanError(path, "unterminated raw string")
        line += src.count("\n", j, end)
        return end + len(close)

    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            i += 1
        elif c.isspace():
            i += 1
        elif src.startswith("//", i):
            end = src.find("\n", i)
            i = n if end < 0 else end
        elif src.startswith("/*", i):
            depth, j = 1, i + 2
            while j < n and depth:
                if src.startswith("/*", j):
                    depth += 1
                    j += 2
                elif src.startswith("*/", j):
                    depth -= 1
                    j += 2
                else:
                    if src[j] == "\n":
                        line += 1
                    j += 1
            if depth:
                raise ScanError(path, "unterminated block comment")
            i = j
        elif c == '"':
            start = line
            i = skip_string(i + 1)
            yield Token("literal", '"', start)
        elif c == "'":
            # char literal, byte escape, or lifetime/label
            if i + 1 < n and src[i + 1] == "\\":
                end = src.find("'", i + 3)
                if end < 0:
                    raise ScanError(path, "unterminated character literal")
                yield Token("literal", "'", line)
                i = end + 1
            elif i + 2 < n and src[i + 2] == "'":
                yield Token("literal", "'", line)
                i += 3
            else:
                j = i + 1
                while j < n and _is_ident_char(src[j]):
                    j += 1
                yield Token("lifetime", src[i:j], line)
                i = j
        elif _is_ident_start(c):
            # prefixed literals: b"..", br"..", r"..", r#".."#, c"..", b'x'
            j = i
            while j < n and _is_ident_char(src[j]):
                j += 1
            word = src[i:j]
            nxt = src[j] if j < n else ""
            if word in ("r", "br", "cr") and (nxt == '"' or (nxt == "#" and j + 1 < n and src[j + 1] in '"#')):
                start = line
                i = skip_raw_string(j)
                yield Token("literal", "r", start)
            elif word == "r" and nxt == "#" and j + 1 < n and _is_ident_start(src[j + 1]):
                # raw identifier r#name is never a keyword
                k = j + 1
                while k < n and _is_ident_char(src[k]):
                    k += 1
                yield Token("ident", "r#" + src[j + 1:k], line)
                i = k
            elif word in ("b", "c") and nxt == '"':
                start = line
                i = skip_string(j + 1)
                yield Token("literal", '"', start)
            elif word == "b" and nxt == "'":
                k = j + 3 if src[j + 1:j + 2] == "\\" else j + 2
                end = src.find("'", k)
                if end < 0:
                    raise ScanError(path, "unterminated byte literal")
                yield Token("literal", "'", line)
                i = end + 1
            else:
                yield Token("ident", word, line)
                i = j
        elif c.isdigit():
            j = i
            while j < n and (_is_ident_char(src[j]) or (src[j] == "." and j + 1 < n and src[j + 1].isdigit())):
                j += 1
            yield Token("literal", src[i:j], line)
            i = j
        else:
            yield Token("punct", c, line)
            i += 1


# --- scanner -----------------------------------------------------------------

@dataclass(frozen=True)
class ScanWarning:
    symbol: str
    path: str
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line}: {self.message} [{self.symbol}]"


@dataclass
class ScanResult:
    manifest: UnsafeManifest
    warnings: list[ScanWarning]


def toplevel_symbol(path: str) -> str:
    return f"<toplevel:{path}>"


def scan_file(path: str, src: str) -> tuple[set[str], list[ScanWarning]]:
    toks = list(tokenize(src, path))
    unsafe_fns: set[str] = set()
    warnings: list[ScanWarning] = []

    depth = 0
    # Innermost-last stack of (fn name, brace depth outside its body).
    frames: list[tuple[str, int]] = []
    # fn whose header has been seen but whose body has not opened yet
    pending: str | None = None
    pending_unsafe = False
    header_nesting = 0  # () and [] nesting inside a pending header
    unsafe_next_fn = False

    for k, tok in enumerate(toks):
        if tok.kind == "ident" and tok.text == "fn":
            nxt = toks[k + 1] if k + 1 < len(toks) else None
            if nxt is not None and nxt.kind == "ident" and pending is None:
                pending = nxt.text
                pending_unsafe = unsafe_next_fn
                header_nesting = 0
            unsafe_next_fn = False
            continue
        if tok.kind == "ident" and tok.text == "unsafe":
            j = k + 1
            # unsafe extern "abi" fn ...
            if j < len(toks) and toks[j].text == "extern":
                j += 1
                if j < len(toks) and toks[j].kind == "literal":
                    j += 1
            follow = toks[j].text if j < len(toks) else ""
            if follow in ("impl", "trait"):
                warnings.append(ScanWarning(
                    toplevel_symbol(path), path, tok.line,
                    f"`unsafe {follow}` does not mark any function"))
            elif pending is not None:
                pending_unsafe = True
            elif follow == "fn" and j + 1 < len(toks) and toks[j + 1].kind == "ident":
                unsafe_next_fn = True
            elif frames:
                unsafe_fns.add(frames[-1][0])
            else:
                warnings.append(ScanWarning(
                    toplevel_symbol(path), path, tok.line,
                    "`unsafe` outside any function"))
            continue
        if tok.kind != "punct":
            continue
        c = tok.text
        if pending is not None and c in "([":
            header_nesting += 1
        elif pending is not None and c in ")]":
            header_nesting -= 1
        elif c == "{":
            if pending is not None and header_nesting == 0:
                frames.append((pending, depth))
                if pending_unsafe:
                    unsafe_fns.add(pending)
                pending, pending_unsafe = None, False
            depth += 1
        elif c == "}":
            depth -= 1
            if depth < 0:
                raise ScanError(path, f"line {tok.line}: unbalanced '}}'")
            if frames and frames[-1][1] == depth:
                frames.pop()
        elif c == ";" and pending is not None and header_nesting == 0:
            # bodiless declaration (trait method, extern item)
            if pending_unsafe:
                unsafe_fns.add(pending)
            pending, pending_unsafe = None, False
    if depth != 0:
        raise ScanError(path, f"unbalanced braces at end of file ({depth} unclosed)")
    return unsafe_fns, warnings


def scan_source(files: Iterable[tuple[str, str]]) -> ScanResult:
    """Scan ``(path, source)`` pairs and collect functions containing ``unsafe``."""
    found: set[str] = set()
    warnings: list[ScanWarning] = []
    for path, src in files:
        fns, warns = scan_file(path, src)
        found |= fns
        warnings += warns
    for w in warnings:
        logger.warning("%s", w)
    return ScanResult(UnsafeManifest(frozenset(found)), warnings)


def iter_rust_files(paths: Iterable[str]) -> Iterator[tuple[str, str]]:
    """Read ``.rs`` files from files and directory trees, in sorted order."""
    for p in paths:
        if os.path.isdir(p):
            for root, dirs, names in os.walk(p):
                dirs.sort()
                for name in sorted(names):
                    if name.endswith(".rs"):
                        full = os.path.join(root, name)
                        with open(full, encoding="utf-8") as fh:
                            yield full, fh.read()
        else:
            with open(p, encoding="utf-8") as fh:
                yield p, fh.read()
