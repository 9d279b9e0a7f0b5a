# %% [markdown]
# # A single fuzzing trial
#
# Trials run on a virtual clock (one execution = 1 ms by default), so a
# seed and a configuration fully determine the result.

# %%
from unsafefuzz.fuzzer import TrialConfig, run_trial
from unsafefuzz.harness import get_target
from unsafefuzz.pathfinder import compute_blocklist

t = get_target("gatekeeper")
print(t.description)

# %%
cfg = TrialConfig("gatekeeper", rng_seed=11, duration_ms=60_000)
r = run_trial(cfg)
print(r.to_json())
print("rerun identical:", run_trial(cfg).to_json() == r.to_json())

# %% [markdown]
# The same seed with the computed block list. Only edges that can lead to
# the unsafe store count as coverage.

# %%
bl = compute_blocklist(t.callgraph, t.unsafe_manifest)
print(sorted(bl.blocked))
print(run_trial(TrialConfig("gatekeeper", 11, 60_000, blocklist=bl, arm="partial")).to_json())
