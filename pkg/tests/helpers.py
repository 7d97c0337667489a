"""Shared strategies and builders for the property tests.

Distributions are built from small integer weights so expected values stay
exact rationals: any tolerance in an assertion then absorbs only float
division noise, never modeling slack.
"""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from maxprob import FiniteDistribution, OutcomeRange, make_distribution

MAX_WEIGHT = 20


def labels_of(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(n))


def dist_from_weights(weights) -> FiniteDistribution:
    w = np.asarray(weights, dtype=float)
    return make_distribution(OutcomeRange(labels_of(len(w))), w / w.sum())


def weight_lists(n: int, allow_zeros: bool) -> st.SearchStrategy[list[int]]:
    low = 0 if allow_zeros else 1
    return st.lists(
        st.integers(low, MAX_WEIGHT), min_size=n, max_size=n,
    ).filter(lambda w: sum(w) > 0)


@st.composite
def distributions(draw, min_n: int = 2, max_n: int = 6, allow_zeros: bool = False,
                  ) -> FiniteDistribution:
    n = draw(st.integers(min_n, max_n))
    return dist_from_weights(draw(weight_lists(n, allow_zeros)))


@st.composite
def distribution_pairs(draw, min_n: int = 2, max_n: int = 6,
                       allow_zeros: tuple[bool, bool] = (False, False),
                       ) -> tuple[FiniteDistribution, FiniteDistribution]:
    """Two distributions over the same range."""
    n = draw(st.integers(min_n, max_n))
    first = dist_from_weights(draw(weight_lists(n, allow_zeros[0])))
    second = dist_from_weights(draw(weight_lists(n, allow_zeros[1])))
    return first, second


@st.composite
def distribution_triples(draw, min_n: int = 2, max_n: int = 6,
                         allow_zeros: tuple[bool, bool, bool] = (False, True, False),
                         ) -> tuple[FiniteDistribution, ...]:
    """Three distributions over the same range: (prior, conditional, extra)."""
    n = draw(st.integers(min_n, max_n))
    return tuple(
        dist_from_weights(draw(weight_lists(n, zeros)))
        for zeros in allow_zeros
    )


alphas = st.sampled_from([0.5, 1.0, 1.5, 2.0, 4.0, 8.0, 16.0])
