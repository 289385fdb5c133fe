"""Unit and property tests for the ranked-list similarity metrics."""
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from serpaudit.errors import InvalidDepthError, InvalidInputError, InvalidParamsError
from serpaudit.metrics import (
    RboParams,
    agreement_at_depth,
    jaccard_overall,
    jaccard_topk,
    rbo,
    rbo_oracle,
)
from serpaudit.rankings import RankedList


def urls(*tags: str) -> list[str]:
    return [f"https://{t}.example/page" for t in tags]


class TestJaccardOverall:
    def test_identical_sets(self):
        a = urls("x", "y", "z")
        assert jaccard_overall(a, a).value == 1.0

    def test_disjoint_sets(self):
        assert jaccard_overall(urls("x", "y"), urls("u", "v")).value == 0.0

    def test_half_overlap(self):
        # |∩|=2, |∪|=4
        a, b = urls("x", "y", "z"), urls("y", "z", "w")
        assert jaccard_overall(a, b).value == 0.5

    def test_empty_list_rejected(self):
        with pytest.raises(InvalidInputError):
            jaccard_overall([], urls("x"))
        with pytest.raises(InvalidInputError):
            jaccard_overall(urls("x"), [])

    def test_accepts_rankedlist(self):
        a = RankedList(tuple(urls("x", "y")))
        assert jaccard_overall(a, a).value == 1.0


class TestJaccardTopK:
    def test_identical_top2(self):
        a, b = urls("x", "y", "z", "w"), urls("x", "y", "u", "v")
        assert jaccard_topk(a, b, 2).value == 1.0

    def test_k_clamps_to_length(self):
        a, b = urls("x", "y", "z", "w"), urls("w", "z", "y", "x")
        assert jaccard_topk(a, b, 10).value == 1.0

    def test_one_of_three(self):
        # top-2 sets {x,y} vs {x,u}: |∩|=1, |∪|=3
        a, b = urls("x", "y", "z", "w"), urls("x", "u", "v", "t")
        assert jaccard_topk(a, b, 2).value == pytest.approx(1 / 3, abs=0)

    def test_invalid_k(self):
        with pytest.raises(InvalidParamsError):
            jaccard_topk(urls("x"), urls("x"), 0)


class TestAgreementAtDepth:
    def test_swapped_pair(self):
        a, b = urls("x", "y"), urls("y", "x")
        assert agreement_at_depth(a, b, 1) == 0.0
        assert agreement_at_depth(a, b, 2) == 1.0

    def test_identity(self):
        a = urls("x", "y", "z")
        for d in (1, 2, 3):
            assert agreement_at_depth(a, a, d) == 1.0

    def test_depth_beyond_length_rejected(self):
        with pytest.raises(InvalidDepthError):
            agreement_at_depth(urls("x", "y"), urls("x", "y", "z"), 3)


class TestRbo:
    def test_identity_extrapolated_exact_one(self):
        a = urls("x", "y", "z")
        for p in (0.5, 0.8, 0.95, 0.99):
            score = rbo(a, a, RboParams(p=p))
            assert score.value == 1.0

    def test_disjoint_zero(self):
        a, b = urls("x", "y", "z"), urls("u", "v", "w")
        for mode in ("base", "extrapolated"):
            assert rbo(a, b, RboParams(p=0.8, mode=mode)).value == 0.0

    def test_adjacent_swap_derived_value(self):
        # A_1=0, A_2=1: (1-p)(0 + p) + p^2 = p
        a, b = urls("x", "y"), urls("y", "x")
        score = rbo(a, b, RboParams(p=0.8, eval_depth=2))
        assert score.value == pytest.approx(0.8, abs=1e-15)

    def test_truncation_to_shorter_list(self):
        a, b = urls("x", "y", "z", "w", "v"), urls("x", "y")
        score = rbo(a, b, RboParams(p=0.8, eval_depth=50))
        assert score.depth == 2
        assert score.value == rbo(urls("x", "y"), urls("x", "y"), RboParams(p=0.8, eval_depth=2)).value

    def test_invalid_params(self):
        with pytest.raises(InvalidParamsError):
            RboParams(p=0.0)
        with pytest.raises(InvalidParamsError):
            RboParams(p=1.0)
        with pytest.raises(InvalidParamsError):
            RboParams(p=0.8, eval_depth=0)
        with pytest.raises(InvalidParamsError):
            RboParams(p=0.8, mode="projected")

    def test_base_below_extrapolated(self):
        rng = random.Random(5)
        pool = [f"u{i}" for i in range(60)]
        for _ in range(50):
            a = rng.sample(pool, rng.randint(1, 40))
            b = rng.sample(pool, rng.randint(1, 40))
            for p in (0.5, 0.95):
                lo = rbo(a, b, RboParams(p=p, mode="base")).value
                hi = rbo(a, b, RboParams(p=p, mode="extrapolated")).value
                assert lo <= hi + 1e-15

    def test_top_weightedness(self):
        # Swapping adjacent items at (i, i+1) perturbs rbo by an amount
        # non-increasing in i, for swaps inside the evaluated depth.
        rng = random.Random(11)
        base = [f"u{i}" for i in range(30)]
        for p in (0.5, 0.8, 0.95):
            params = RboParams(p=p, eval_depth=len(base))
            deltas = []
            for i in range(len(base) - 1):
                swapped = list(base)
                swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
                deltas.append(1.0 - rbo(base, swapped, params).value)
            for earlier, later in zip(deltas, deltas[1:]):
                assert later <= earlier + 1e-12
        # also on shuffled instances
        for _ in range(5):
            items = list(base)
            rng.shuffle(items)
            params = RboParams(p=0.9, eval_depth=len(items))
            deltas = []
            for i in range(len(items) - 1):
                swapped = list(items)
                swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
                deltas.append(1.0 - rbo(items, swapped, params).value)
            for earlier, later in zip(deltas, deltas[1:]):
                assert later <= earlier + 1e-12


class TestRboOracle:
    def test_mirrors_examples(self):
        a, b = urls("x", "y"), urls("y", "x")
        params = RboParams(p=0.8, eval_depth=2)
        assert rbo_oracle(a, b, params).value == pytest.approx(0.8, abs=0)
        assert rbo_oracle(a, a, params).value == 1.0
        assert rbo_oracle(urls("x"), urls("u"), RboParams(p=0.8)).value == 0.0

    def test_oracle_is_exact_at_identity(self):
        a = [f"u{i}" for i in range(73)]
        assert rbo_oracle(a, a, RboParams(p=0.97, eval_depth=73)).value == 1.0

    def test_sample_agreement(self):
        rng = random.Random(42)
        pool = [f"u{i}" for i in range(220)]
        for _ in range(200):
            a = rng.sample(pool, rng.randint(1, 100))
            b = rng.sample(pool, rng.randint(1, 100))
            p = rng.choice((0.5, 0.8, 0.95, 0.99))
            mode = rng.choice(("base", "extrapolated"))
            params = RboParams(p=p, eval_depth=100, mode=mode)
            assert abs(rbo(a, b, params).value - rbo_oracle(a, b, params).value) <= 1e-12


# hypothesis strategies: unique small-alphabet URL ids keep shrinking readable
ids = st.integers(min_value=0, max_value=40).map(lambda i: f"https://s{i}.example/")
rankings = st.lists(ids, min_size=1, max_size=25, unique=True)


@given(rankings, rankings)
def test_symmetry_all_metrics(a, b):
    assert jaccard_overall(a, b).value == jaccard_overall(b, a).value
    assert jaccard_topk(a, b, 5).value == jaccard_topk(b, a, 5).value
    params = RboParams(p=0.9, eval_depth=10)
    assert rbo(a, b, params).value == rbo(b, a, params).value


@given(rankings, rankings, st.integers(min_value=1, max_value=30))
def test_range_and_equivalence(a, b, k):
    assert 0.0 <= jaccard_overall(a, b).value <= 1.0
    assert 0.0 <= jaccard_topk(a, b, k).value <= 1.0
    d = min(len(a), len(b), k)
    # agreement_at_depth must equal jaccard_topk bit-exact
    assert agreement_at_depth(a, b, d) == jaccard_topk(a, b, d).value


@given(rankings)
def test_identity_scores_one(a):
    assert jaccard_overall(a, a).value == 1.0
    assert jaccard_topk(a, a, 10).value == 1.0
    assert rbo(a, a, RboParams(p=0.8)).value == 1.0


@settings(max_examples=60, deadline=None)
@given(rankings, rankings, st.sampled_from([0.5, 0.8, 0.95, 0.99]), st.sampled_from(["base", "extrapolated"]))
def test_oracle_equivalence_property(a, b, p, mode):
    params = RboParams(p=p, eval_depth=50, mode=mode)
    fast = rbo(a, b, params).value
    exact = rbo_oracle(a, b, params).value
    assert math.isfinite(fast)
    assert abs(fast - exact) <= 1e-12
