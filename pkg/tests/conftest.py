import functools
import random

import numpy as np
import pytest

from absorder.coxeter import build_coxeter
from absorder.gmpn import make_group
from absorder.poset import from_covers


@functools.lru_cache(maxsize=None)
def group(m, p, n):
    return make_group(m, p, n)


@functools.lru_cache(maxsize=None)
def coxeter(kind):
    return build_coxeter(kind)


def random_ranked_poset(rng: random.Random, sizes, density=0.5):
    """Random ranked poset with a unique minimum: every element of rank i+1
    covers at least one element of rank i, plus random extra covers."""
    labels, levels = [], []
    for r, s in enumerate(sizes):
        levels.append(list(range(len(labels), len(labels) + s)))
        labels += [f"r{r}_{k}" for k in range(s)]
    covers = set()
    for lo, hi in zip(levels, levels[1:]):
        for y in hi:
            covers.add((rng.choice(lo), y))
            for x in lo:
                if rng.random() < density:
                    covers.add((x, y))
        for x in lo:
            if not any((x, y) in covers for y in hi) and rng.random() < 0.5:
                covers.add((x, rng.choice(hi)))
    ranks = [r for r, lvl in enumerate(levels) for _ in lvl]
    return from_covers(labels, sorted(covers), ranks)


def random_sizes(rng: random.Random, max_total=14):
    sizes = [1]
    while sum(sizes) < max_total and rng.random() < 0.8:
        sizes.append(rng.randint(1, min(5, max_total - sum(sizes))))
    return sizes


@pytest.fixture
def rng():
    return random.Random(20241016)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20241016)
