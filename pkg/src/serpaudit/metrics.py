"""Similarity metrics for ranked result lists.

Two families:

* Jaccard index — set overlap, order-insensitive:
      JI(a, b) = |set(a) ∩ set(b)| / |set(a) ∪ set(b)|
  computed over the whole lists or over the top-k prefixes.

* Rank Biased Overlap — top-weighted similarity of rankings. With
  agreement A_d defined as the Jaccard index of the top-d prefixes and
  persistence p in (0, 1):

      base(D)         = (1 - p) * sum_{d=1..D} p^(d-1) * A_d
      extrapolated(D) = base(D) + A_D * p^D

  The extrapolated form projects the deepest observed agreement into the
  unseen tail, so two identical finite lists score exactly 1.0. Lower p
  concentrates weight on the first few ranks.

All metrics are pure, symmetric in their list arguments, and return values
in [0, 1]. Unequal-length lists are truncated to the shorter length before
RBO; the effective depth is recorded on the returned score.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidDepthError, InvalidInputError, InvalidParamsError
from .rankings import RankedList, ranking_items

RBO_MODES = ("base", "extrapolated")


@dataclass(frozen=True)
class RboParams:
    """Persistence p in (0,1), evaluation depth >= 1, and tail mode."""

    p: float
    eval_depth: int = 50
    mode: str = "extrapolated"

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise InvalidParamsError(f"persistence p must be in (0, 1), got {self.p}")
        if self.eval_depth < 1:
            raise InvalidParamsError(f"eval_depth must be >= 1, got {self.eval_depth}")
        if self.mode not in RBO_MODES:
            raise InvalidParamsError(f"mode must be one of {RBO_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class SimilarityScore:
    """A metric value in [0, 1] plus what produced it.

    ``params`` holds the RboParams for rbo scores or k for top-k Jaccard.
    ``depth`` is the effective evaluation depth after truncation (rbo only).
    """

    value: float
    metric_kind: str
    params: RboParams | int | None = None
    depth: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise InvalidInputError(f"similarity value out of range: {self.value}")


def _nonempty(ranking: RankedList | Sequence[str]) -> tuple[str, ...]:
    items = ranking_items(ranking)
    if not items:
        raise InvalidInputError("metrics require nonempty ranked lists")
    return items


def _jaccard(xs: Sequence[str], ys: Sequence[str]) -> float:
    sa, sb = set(xs), set(ys)
    return len(sa & sb) / len(sa | sb)


def jaccard_overall(a: RankedList | Sequence[str], b: RankedList | Sequence[str]) -> SimilarityScore:
    """Jaccard index over the full result sets."""
    ia, ib = _nonempty(a), _nonempty(b)
    return SimilarityScore(_jaccard(ia, ib), "jaccard_overall")


def jaccard_topk(a: RankedList | Sequence[str], b: RankedList | Sequence[str], k: int) -> SimilarityScore:
    """Jaccard index over the top-k prefixes.

    k is clamped to each list's length; short lists are a collection
    reality, not an error.
    """
    if k < 1:
        raise InvalidParamsError(f"k must be >= 1, got {k}")
    ia, ib = _nonempty(a), _nonempty(b)
    return SimilarityScore(_jaccard(ia[:k], ib[:k]), "jaccard_topk", params=k)


def agreement_at_depth(a: RankedList | Sequence[str], b: RankedList | Sequence[str], d: int) -> float:
    """Agreement A_d: the Jaccard index of the top-d prefixes.

    Unlike jaccard_topk this refuses depths beyond either list, because a
    clamped agreement would silently change the RBO weighting.
    """
    ia, ib = _nonempty(a), _nonempty(b)
    if d < 1 or d > min(len(ia), len(ib)):
        raise InvalidDepthError(f"depth {d} out of range for lists of length {len(ia)} and {len(ib)}")
    return jaccard_topk(ia, ib, d).value


def _prefix_agreements(xs: Sequence[str], ys: Sequence[str], depth: int) -> list[float]:
    """A_1..A_depth via incremental intersection/union counting, O(depth)."""
    seen_x: set[str] = set()
    seen_y: set[str] = set()
    inter = union = 0
    out: list[float] = []
    for d in range(depth):
        x, y = xs[d], ys[d]
        if x not in seen_x:
            seen_x.add(x)
            if x in seen_y:
                inter += 1
            else:
                union += 1
        if y not in seen_y:
            seen_y.add(y)
            if y in seen_x:
                inter += 1
            else:
                union += 1
        out.append(inter / union)
    return out


def rbo(a: RankedList | Sequence[str], b: RankedList | Sequence[str], params: RboParams) -> SimilarityScore:
    """Rank Biased Overlap of two rankings.

    Both lists are truncated to the shorter length, then to
    params.eval_depth. The sum is accumulated from the deepest (smallest)
    term upward to bound rounding error. When every prefix agrees
    (identical lists) or none does (disjoint at every depth) the exact
    endpoint 1.0 / 0.0 is returned directly rather than recomputed through
    the series.
    """
    ia, ib = _nonempty(a), _nonempty(b)
    depth = min(params.eval_depth, len(ia), len(ib))
    agreements = _prefix_agreements(ia, ib, depth)

    p = params.p
    if all(x == 0.0 for x in agreements):
        return SimilarityScore(0.0, "rbo", params=params, depth=depth)
    if params.mode == "extrapolated" and all(x == 1.0 for x in agreements):
        return SimilarityScore(1.0, "rbo", params=params, depth=depth)

    total = 0.0
    for d in range(depth, 0, -1):
        total += pow(p, d - 1) * agreements[d - 1]
    value = (1.0 - p) * total
    if params.mode == "extrapolated":
        value += agreements[-1] * pow(p, depth)
    value = min(max(value, 0.0), 1.0)
    return SimilarityScore(value, "rbo", params=params, depth=depth)


def rbo_oracle(a: RankedList | Sequence[str], b: RankedList | Sequence[str], params: RboParams) -> SimilarityScore:
    """Reference RBO: naive per-depth set reconstruction, exact arithmetic.

    Rebuilds both prefix sets from scratch at every depth (O(depth^2)) and
    sums the series in rational arithmetic, so the result is the correctly
    rounded float for the given inputs. Intended for verification; the
    fast path above must agree with it to within 1e-12.
    """
    ia, ib = _nonempty(a), _nonempty(b)
    depth = min(params.eval_depth, len(ia), len(ib))

    p = Fraction(params.p)
    one = Fraction(1)
    total = Fraction(0)
    power = one  # p^(d-1)
    agreement = Fraction(0)
    for d in range(1, depth + 1):
        sa, sb = set(ia[:d]), set(ib[:d])
        agreement = Fraction(len(sa & sb), len(sa | sb))
        total += power * agreement
        power *= p
    value = (one - p) * total
    if params.mode == "extrapolated":
        value += agreement * power  # power is now p^depth
    return SimilarityScore(float(value), "rbo", params=params, depth=depth)
