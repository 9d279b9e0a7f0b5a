# %% [markdown]
# # Coverage feedback with a partial map
#
# Each instrumented edge owns one byte of the map. Hit counts are folded
# into nine buckets and an input is kept only if it lights up a bucket no
# earlier input reached.

# %%
import numpy as np

from unsafefuzz.coverage import (
    BUCKET_LABELS, CoverageMap, allocate_guards, apply_trace, bucketize, new_summary, novelty_check,
)
from unsafefuzz.harness import get_target
from unsafefuzz.pathfinder import compute_blocklist

print([BUCKET_LABELS[bucketize(c)] for c in (0, 1, 2, 3, 5, 9, 20, 64, 200)])

# %%
t = get_target("honeypot")
bl = compute_blocklist(t.callgraph, t.unsafe_manifest)
full = allocate_guards(t.functions, None, 256)
part = allocate_guards(t.functions, bl, 256)
print("guards, full build:", len(full.assignment), " partial build:", len(part.assignment))

# %% [markdown]
# An input that only exercises the tokenizer lights up many guards in the
# full build. The partial build sees just the entry function, so further
# tokenizer-only inputs are never kept.

# %%
trace = t.execute(b"hello, honeypot")
for name, gt in (("full", full), ("partial", part)):
    cmap = apply_trace(CoverageMap(256), gt, trace)
    novel, _ = novelty_check(new_summary(256), cmap)
    print(name, "nonzero bytes:", int(np.count_nonzero(cmap.hits)), "novel:", novel)
