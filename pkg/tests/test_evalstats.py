import math
import random

import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from oracles import comb_count_p, permutation_p
from unsafefuzz.evalstats import (
    a12,
    aggregate_report,
    censor,
    classify_effect,
    mann_whitney_u,
    midranks,
    render_oracles,
    render_table,
)

samples = st.lists(st.integers(0, 20), min_size=1, max_size=9)


def test_worked_exact_example():
    u, p = mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert u == 0
    assert p == pytest.approx(0.1, abs=1e-12)
    assert permutation_p([1, 2, 3], [4, 5, 6]) == pytest.approx(0.1, abs=1e-12)


def test_identical_samples():
    u, p = mann_whitney_u([3, 1, 2], [1, 2, 3])
    assert p == 1.0
    assert a12([3, 1, 2], [1, 2, 3]) == 0.5


def test_midranks():
    assert midranks([10, 20, 20, 30]) == [1, 2.5, 2.5, 4]


@pytest.mark.parametrize("x, y", [
    ([1, 2, 3, 4], [1, 1, 2]),
    ([5], [1, 2, 3, 4]),
    ([2, 2], [2, 2, 2]),
    ([1, 3, 3, 7], [2, 3, 5, 9]),
])
def test_exact_matches_permutations(x, y):
    assert mann_whitney_u(x, y)[1] == pytest.approx(permutation_p(x, y), abs=1e-12)


def test_exact_tie_free_matches_rank_subsets_and_scipy():
    rng = random.Random(11)
    for _ in range(40):
        nx, ny = rng.randint(1, 8), rng.randint(1, 8)
        pool = rng.sample(range(100), nx + ny)
        x, y = pool[:nx], pool[nx:]
        p = mann_whitney_u(x, y)[1]
        assert p == pytest.approx(comb_count_p(x, y), abs=1e-12)
        ref = scipy.stats.mannwhitneyu(x, y, alternative="two-sided", method="exact").pvalue
        assert p == pytest.approx(ref, abs=1e-12)


def test_normal_approximation_matches_scipy():
    rng = random.Random(5)
    for _ in range(30):
        x = [rng.randint(0, 15) for _ in range(rng.randint(9, 30))]
        y = [rng.randint(0, 15) for _ in range(rng.randint(9, 30))]
        u, p = mann_whitney_u(x, y)
        ref = scipy.stats.mannwhitneyu(x, y, alternative="two-sided", method="asymptotic", use_continuity=True)
        assert u == ref.statistic
        assert p == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-12)


def test_all_tied_large_sample():
    assert mann_whitney_u([4] * 10, [4] * 10) == (50.0, 1.0)


@given(samples, samples)
def test_p_symmetric(x, y):
    assert mann_whitney_u(x, y)[1] == pytest.approx(mann_whitney_u(y, x)[1], abs=1e-12)


def test_a12_examples():
    assert a12([1, 2], [2, 3]) == pytest.approx(0.125, abs=1e-12)
    assert a12([5, 6], [1, 2]) == 1.0
    assert a12([1, 1], [1, 1]) == 0.5


@given(samples, samples)
def test_a12_complement(x, y):
    assert a12(x, y) + a12(y, x) == pytest.approx(1.0, abs=1e-12)


@given(samples, samples)
def test_a12_rank_invariant(x, y):
    f = lambda v: math.exp(v / 7) * 3 + 1  # noqa: E731
    assert a12(x, y) == a12([f(v) for v in x], [f(v) for v in y])


def test_rejects_bad_samples():
    with pytest.raises(ValueError):
        a12([], [1])
    with pytest.raises(ValueError):
        mann_whitney_u([1], [-1])


@pytest.mark.parametrize("a, p, expected", [
    (0.99, 0.001, "large"),
    (0.66, 0.01, "medium"),
    (0.99, 0.5, "none"),
    (0.5, 0.001, "none"),
    (0.58, 0.01, "small"),
    (0.71, 0.01, "large"),
    (0.29, 0.01, "large"),
    (0.64, 0.01, "medium"),
    (0.56, 0.01, "small"),
    (0.99, 0.05, "none"),
])
def test_classify_effect(a, p, expected):
    assert classify_effect(a, p) == expected


@given(st.floats(0, 1), st.floats(0.05, 1))
def test_gate_never_classifies_insignificant(a, p):
    assert classify_effect(a, p) == "none"


def test_censoring_rules():
    assert censor([1, None], 10) == [1.0, 10.0]
    assert censor([1, None], None, "tied-max") == [1.0, math.inf]
    with pytest.raises(ValueError):
        censor([None], None)


def test_aggregate_identical_arms():
    arm = {"o1": [1, 2, 3, None], "o2": [5, 5, 5, 5]}
    r = aggregate_report(arm, arm, duration=10)
    assert r.summary["significant_tool"] == r.summary["significant_baseline"] == 0
    assert r.summary["avg_a12"] == 0.0


def test_aggregate_pointwise_and_summary():
    full = {"a": [100] * 10, "b": [float(i) for i in range(10)], "c": [None] * 10}
    partial = {"a": [float(i) for i in range(10)], "b": [float(i) for i in range(10)], "c": [1.0] * 10}
    r = aggregate_report(full, partial, duration=100)
    for k, s in r.per_oracle.items():
        assert s.effect_class == classify_effect(s.a12, s.p_value)
    assert r.per_oracle["a"].winner == "tool" and r.per_oracle["a"].effect_class == "large"
    assert r.per_oracle["b"].winner == "none"
    assert r.summary["significant_tool"] == 2
    assert r.summary["avg_a12"] == pytest.approx(1.0)
    assert r.summary["hits_baseline"] == 20 and r.summary["hits_tool"] == 30
    table = render_table({"demo": r})
    assert "#stat. sig. results" in table and "1.00" in table
    assert "winner" in render_oracles(r)


def test_aggregate_tied_max_censoring():
    full = {"o": [None, None, 50, None, None, None, None, None, None, None]}
    partial = {"o": [float(i) for i in range(10)]}
    r = aggregate_report(full, partial, censoring="tied-max")
    assert r.per_oracle["o"].winner == "tool"


def test_aggregate_key_mismatch():
    with pytest.raises(ValueError):
        aggregate_report({"a": [1]}, {"b": [1]})
