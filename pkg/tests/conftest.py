import itertools
import random

import numpy as np
import pytest

from ggsbranch.vectors import DefiningVector

# results recorded by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def all_vectors(p, n):
    """Every non-zero defining vector over p^n."""
    m = p ** n
    for e in itertools.product(range(m), repeat=m - 1):
        if any(e):
            yield DefiningVector(p, n, e)


def sample_vectors(p, n, count, seed=0, non_f=0):
    """``count`` pseudo-random vectors; the last ``non_f`` of them have all entries divisible by p.

    For n = 1 no nonzero vector of that kind exists, so ``non_f`` is ignored.
    """
    if n == 1:
        non_f = 0
    rng = random.Random(seed * 1000 + p ** n)
    m = p ** n
    out = []
    while len(out) < count - non_f:
        e = tuple(rng.randrange(m) for _ in range(m - 1))
        if any(e):
            out.append(DefiningVector(p, n, e))
    while len(out) < count:
        e = tuple(p * rng.randrange(m // p) for _ in range(m - 1))
        if any(e):
            out.append(DefiningVector(p, n, e))
    return out


# -- an evaluator of a and b on words written straight from the recursive definition


def act_word(e_entries, m, gens, word):
    """Apply a sequence of generators ('a', 'A', 'b', 'B'; capitals are inverses) to ``word``."""
    word = tuple(word)
    for g in gens:
        word = _act(e_entries, m, g, word)
    return word


def _act(e, m, g, word):
    if not word:
        return word
    x, rest = word[0], word[1:]
    if g == 'a':
        return ((x % m) + 1,) + rest
    if g == 'A':
        return ((x - 2) % m + 1,) + rest
    # b and its inverse fix the first letter
    if x == m:
        return (x,) + _act(e, m, g, rest)
    k = e[x - 1] if g == 'b' else -e[x - 1]
    sub = 'a' if k >= 0 else 'A'
    for _ in range(abs(k) % m):
        rest = _act(e, m, sub, rest)
    return (x,) + rest


def brute_level_perm(e_entries, m, gens, depth):
    """Level permutation of a generator word computed by the direct evaluator."""
    words = list(itertools.product(range(1, m + 1), repeat=depth))
    index = {w: i for i, w in enumerate(words)}
    return np.array([index[act_word(e_entries, m, gens, w)] for w in words])


def word_to_element(G, gens):
    from ggsbranch.tree import invert, product
    table = {'a': G.a, 'A': invert(G.a), 'b': G.b, 'B': invert(G.b)}
    return product(*[table[g] for g in gens]) if gens else G.identity


@pytest.fixture
def rng():
    return random.Random(12345)
