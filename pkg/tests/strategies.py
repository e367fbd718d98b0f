"""Hypothesis strategies shared by the tests."""

import random

from hypothesis import strategies as st

from excouple.fixtures import random_filtered_complex


def filtered_complexes(max_degree=4, max_width=4, max_rank=3):
    return st.integers(0, 2**32 - 1).map(
        lambda seed: random_filtered_complex(random.Random(seed), max_degree=max_degree,
                                             max_width=max_width, max_rank=max_rank)
    )
