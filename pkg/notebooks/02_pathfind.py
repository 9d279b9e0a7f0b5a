# %% [markdown]
# # From call graph to block list
#
# A function stays instrumented only if it can reach some unsafe function
# through the call graph. Everything else is blocked.

# %%
from unsafefuzz.callgraph import parse_edgelist
from unsafefuzz.pathfinder import compute_blocklist, format_summary, summary, write_blocklist
from unsafefuzz.unsafescan import UnsafeManifest

g = parse_edgelist("main\tfun_1\nmain\tfun_2\n")
m = UnsafeManifest(frozenset({"fun_1"}))
bl = compute_blocklist(g, m)
print(sorted(bl.blocked))

# %% [markdown]
# The same list in the deny-list syntax the instrumenting compiler reads:

# %%
print(write_blocklist(bl, "afl_denylist"))

# %% [markdown]
# Calls through function pointers are unknown statically. In the
# conservative mode any function with an indirect call site counts as
# possibly reaching unsafe code.

# %%
g2 = parse_edgelist("main\tdispatch\nmain\tlog\ndispatch\t<indirect>\nlog\tfmt\nmain\tsink\n")
m2 = UnsafeManifest(frozenset({"sink"}))
for mode in ("standard", "conservative_indirect"):
    b = compute_blocklist(g2, m2, mode)
    print(mode, sorted(b.blocked), format_summary(summary(g2, m2, b)))
