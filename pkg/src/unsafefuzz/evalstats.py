"""Two-arm comparison of time-to-hit samples.

Each oracle gets a two-sided Mann-Whitney U test and the Vargha-Delaney
A12 effect size.  A12 is taken as ``a12(baseline, tool)``: with
lower-is-better times, values near 1 mean the tool reaches the location
sooner.  Effect classes use the conventional 0.56 / 0.64 / 0.71 cut points
and are only assigned to significant results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

ALPHA = 0.05
EXACT_MAX_CELLS = 64
SMALL, MEDIUM, LARGE = 0.06, 0.14, 0.21
EFFECT_CLASSES = ("none", "small", "medium", "large")


def _check(sample: Sequence[float], name: str) -> list[float]:
    values = [float(v) for v in sample]
    if not values:
        raise ValueError(f"{name} is empty")
    if any(v < 0 or math.isnan(v) for v in values):
        raise ValueError(f"{name} has negative or NaN values")
    return values


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing their average rank."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2))


def mann_whitney_u(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Return ``(U_x, p)`` for a two-sided test.

    ``U_x`` counts pairs with ``x_i > y_j`` plus half the ties.  When
    ``len(x) * len(y) <= 64`` the p-value is exact: every split of the
    pooled midranks into groups of the original sizes is enumerated (this
    stays exact with ties).  Larger samples use the normal approximation
    with tie and continuity corrections.
    """
    x = _check(x, "x")
    y = _check(y, "y")
    nx, ny = len(x), len(y)
    ranks = midranks(x + y)
    # doubled ranks are integers, so comparisons below are exact
    r2 = [round(2 * r) for r in ranks]
    rx2 = sum(r2[:nx])
    u2 = rx2 - nx * (nx + 1)  # 2 * U_x
    u = u2 / 2
    mean2 = nx * ny  # 2 * E[U]

    if nx * ny <= EXACT_MAX_CELLS:
        observed = abs(u2 - mean2)
        base = nx * (nx + 1)
        extreme = total = 0
        for idx in combinations(range(nx + ny), nx):
            total += 1
            if abs(sum(r2[i] for i in idx) - base - mean2) >= observed:
                extreme += 1
        return u, extreme / total

    n = nx + ny
    tie_term = 0
    for v in set(x + y):
        t = sum(1 for w in x + y if w == v)
        tie_term += t ** 3 - t
    var = nx * ny / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return u, 1.0
    z = max(abs(u - nx * ny / 2) - 0.5, 0.0) / math.sqrt(var)
    return u, min(1.0, 2 * _norm_sf(z))


def a12(x: Sequence[float], y: Sequence[float]) -> float:
    """Probability that a draw from ``x`` exceeds one from ``y`` (ties count half)."""
    x = _check(x, "x")
    y = _check(y, "y")
    greater = ties = 0
    for xi in x:
        for yj in y:
            if xi > yj:
                greater += 1
            elif xi == yj:
                ties += 1
    return (greater + 0.5 * ties) / (len(x) * len(y))


def classify_effect(a12_value: float, p_value: float) -> str:
    if p_value >= ALPHA:
        return "none"
    # rounding keeps the nominal cut points (0.71 etc.) inside their class
    d = round(abs(a12_value - 0.5), 12)
    if d >= LARGE:
        return "large"
    if d >= MEDIUM:
        return "medium"
    if d >= SMALL:
        return "small"
    return "none"


@dataclass(frozen=True)
class OracleStats:
    p_value: float
    a12: float
    effect_class: str
    winner: str  # "baseline", "tool" or "none"
    u: float
    baseline_hits: int
    tool_hits: int
    baseline_median: float
    tool_median: float


@dataclass
class StatReport:
    per_oracle: dict[str, OracleStats]
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_oracle": {
                k: vars(self.per_oracle[k]).copy() for k in sorted(self.per_oracle)
            },
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def censor(values: Sequence[float | None], duration: float | None, rule: str = "duration") -> list[float]:
    """Replace censored (``None``) entries.

    ``duration``: censored runs count as the trial duration.
    ``tied-max``: censored runs tie with each other above every observed time.
    """
    if rule == "duration":
        if any(v is None for v in values) and duration is None:
            raise ValueError("censored values need a duration")
        return [float(duration) if v is None else float(v) for v in values]
    if rule == "tied-max":
        return [math.inf if v is None else float(v) for v in values]
    raise ValueError(f"unknown censoring rule {rule!r}")


def _median(values: list[float]) -> float:
    s = sorted(values)
    mid = len(s) // 2
    return s[mid] if len(s) % 2 else (s[mid - 1] + s[mid]) / 2


def aggregate_report(
    full: Mapping[str, Sequence[float | None]],
    partial: Mapping[str, Sequence[float | None]],
    duration: float | None = None,
    censoring: str = "duration",
) -> StatReport:
    """Compare baseline (``full``) and tool (``partial``) time-to-hit samples per oracle."""
    if set(full) != set(partial):
        raise ValueError(f"oracle keys differ: {sorted(set(full) ^ set(partial))}")
    per_oracle = {}
    for oracle in sorted(full):
        base_raw, tool_raw = list(full[oracle]), list(partial[oracle])
        base = censor(base_raw, duration, censoring)
        tool = censor(tool_raw, duration, censoring)
        if censoring == "tied-max":
            # rank statistics only care about order; inf would break arithmetic
            top = max([v for v in base + tool if v != math.inf], default=0.0) + 1.0
            base = [top if v == math.inf else v for v in base]
            tool = [top if v == math.inf else v for v in tool]
        u, p = mann_whitney_u(base, tool)
        effect = a12(base, tool)
        cls = classify_effect(effect, p)
        if p < ALPHA and effect != 0.5:
            winner = "tool" if effect > 0.5 else "baseline"
        else:
            winner = "none"
        per_oracle[oracle] = OracleStats(
            p_value=p,
            a12=effect,
            effect_class=cls,
            winner=winner,
            u=u,
            baseline_hits=sum(v is not None for v in base_raw),
            tool_hits=sum(v is not None for v in tool_raw),
            baseline_median=_median(base),
            tool_median=_median(tool),
        )
    significant = [s for s in per_oracle.values() if s.winner != "none"]
    histogram = {c: sum(s.effect_class == c for s in per_oracle.values()) for c in EFFECT_CLASSES[1:]}
    summary = {
        "oracles": len(per_oracle),
        "significant_baseline": sum(s.winner == "baseline" for s in significant),
        "significant_tool": sum(s.winner == "tool" for s in significant),
        "effect_classes": histogram,
        "avg_a12": (sum(s.a12 for s in significant) / len(significant)) if significant else 0.0,
        "hits_baseline": sum(s.baseline_hits for s in per_oracle.values()),
        "hits_tool": sum(s.tool_hits for s in per_oracle.values()),
    }
    return StatReport(per_oracle, summary)


TABLE_HEADER = (
    "Project", "#unsafe locations", "#stat. sig. results (baseline)",
    "#stat. sig. results (tool)", "small", "medium", "large", "Avg. A12",
)


def render_table(rows: Mapping[str, StatReport]) -> str:
    """Aligned text table, one row per project/target."""
    body = []
    for name, report in rows.items():
        s = report.summary
        body.append((
            name, str(s["oracles"]), str(s["significant_baseline"]), str(s["significant_tool"]),
            str(s["effect_classes"]["small"]), str(s["effect_classes"]["medium"]),
            str(s["effect_classes"]["large"]), f"{s['avg_a12']:.2f}",
        ))
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(TABLE_HEADER)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(TABLE_HEADER, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join([r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]))
    return "\n".join(lines)


def render_oracles(report: StatReport) -> str:
    lines = [f"{'oracle':<16} {'p':>8} {'A12':>6} {'effect':>7} {'winner':>9} {'hits b/t':>9}"]
    for oracle, s in sorted(report.per_oracle.items()):
        lines.append(
            f"{oracle:<16} {s.p_value:>8.4f} {s.a12:>6.2f} {s.effect_class:>7} "
            f"{s.winner:>9} {f'{s.baseline_hits}/{s.tool_hits}':>9}"
        )
    return "\n".join(lines)
