"""Shared fixtures: the verification corpus and a seeded random-polynomial source."""

from __future__ import annotations

import random
from typing import Optional

import pytest

from padicsums.poly import Polynomial, parse_polynomial

CORPUS_TEXTS = [
    "x*y",
    "x^2+y^3",
    "x*y+z*u",
    "x*y+z*u+x*z+2*y*u",
    "x^3+y^3+z^3",
]


@pytest.fixture(scope="session")
def corpus():
    return [parse_polynomial(text) for text in CORPUS_TEXTS]


def random_polynomial(
    rng: random.Random,
    n: Optional[int] = None,
    max_terms: int = 6,
    max_exp: int = 5,
) -> Polynomial:
    """Random sparse polynomial with f(0) = 0, biased small for exact work."""
    n = n if n is not None else rng.randint(2, 4)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(rng.randint(0, max_exp) for _ in range(n))
        if not any(exp):
            continue
        coef = rng.choice([c for c in range(-9, 10) if c])
        terms[exp] = coef
    if not terms:
        terms[(1,) + (0,) * (n - 1)] = 1
    return Polynomial(n, terms)
