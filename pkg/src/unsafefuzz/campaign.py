"""Campaign documents: paired trial results plus their statistical report."""

from __future__ import annotations

from typing import Sequence

from .evalstats import StatReport, aggregate_report
from .fuzzer import TrialResult

SCHEMA = "unsafefuzz.campaign/1"


def samples_by_oracle(results: Sequence[TrialResult]) -> dict[str, list[float | None]]:
    ordered = sorted(results, key=lambda r: r.trial_index)
    oracles = sorted({o for r in ordered for o in r.first_hit})
    return {o: [r.first_hit.get(o) for r in ordered] for o in oracles}


def build_report(
    full: Sequence[TrialResult],
    partial: Sequence[TrialResult],
    duration_ms: float,
    censoring: str = "duration",
) -> StatReport:
    return aggregate_report(samples_by_oracle(full), samples_by_oracle(partial), duration_ms, censoring)


def campaign_document(
    target: str,
    full: Sequence[TrialResult],
    partial: Sequence[TrialResult],
    duration_ms: float,
    rng_seed: int,
    ab_identical: bool = False,
    censoring: str = "duration",
) -> dict:
    report = build_report(full, partial, duration_ms, censoring)
    return {
        "schema": SCHEMA,
        "target": target,
        "trials": len(full),
        "duration_ms": duration_ms,
        "rng_seed": rng_seed,
        "ab_identical": ab_identical,
        "censoring": censoring,
        "results": [r.to_dict() for r in list(full) + list(partial)],
        "report": report.to_dict(),
    }


def load_campaign(doc: dict) -> tuple[str, list[TrialResult], list[TrialResult], float, str]:
    """Validate a campaign document; return target, both arms, duration and censoring rule."""
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ValueError(f"not a campaign document (expected schema {SCHEMA})")
    try:
        results = [TrialResult.from_dict(r) for r in doc["results"]]
        duration = float(doc["duration_ms"])
        target = str(doc["target"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed campaign document: {exc}") from None
    if not results:
        raise ValueError("campaign has no results")
    full = [r for r in results if r.arm == "full"]
    partial = [r for r in results if r.arm == "partial"]
    if not full or not partial or len(full) + len(partial) != len(results):
        raise ValueError("campaign must hold 'full' and 'partial' arms only")
    return target, full, partial, duration, str(doc.get("censoring", "duration"))
