# %% [markdown]
# # Paired campaign and statistics
#
# Both arms share per-trial seeds. Times to first hit are compared per
# oracle with a two-sided Mann-Whitney U test and the Vargha-Delaney A12
# effect size; runs that never hit count as the full duration.

# %%
from unsafefuzz.campaign import build_report
from unsafefuzz.evalstats import a12, mann_whitney_u, render_oracles, render_table
from unsafefuzz.fuzzer import run_campaign

print(mann_whitney_u([1, 2, 3], [4, 5, 6]), a12([1, 2], [2, 3]))

# %%
DURATION = 40_000
full, partial = run_campaign("honeypot", trials=5, duration_ms=DURATION, rng_seed=3)
for f, p in zip(full, partial):
    print(f.trial_index, "full", f.first_hit["trailer_write"], "partial", p.first_hit["trailer_write"])

# %%
report = build_report(full, partial, DURATION)
print(render_table({"honeypot": report}))
print()
print(render_oracles(report))
