import numpy as np
import pytest

from credset.core import make_posterior
from credset.oracle import greedy_membership, minimal_size_oracle, vertex_solutions


def test_binomial(binom):
    assert minimal_size_oracle(binom, 0.05) == pytest.approx(4.4, abs=1e-12)


def test_single_label():
    assert minimal_size_oracle(make_posterior(["x"], [1]), 0.3) == pytest.approx(0.7, abs=1e-15)


def test_exact_fill():
    post = make_posterior(list("abc"), [5, 3, 2])
    assert minimal_size_oracle(post, 0.2) == pytest.approx(2.0, abs=1e-12)


def test_greedy_is_feasible(binom):
    phi = np.array(greedy_membership(binom, 0.05))
    assert phi @ binom.probs == pytest.approx(0.95, abs=1e-12)
    assert np.all((phi >= 0) & (phi <= 1))


def test_vertices_contain_greedy(binom):
    best = minimal_size_oracle(binom, 0.05)
    sizes = [sum(v) for v in vertex_solutions(binom, 0.05)]
    assert min(sizes) == pytest.approx(best, abs=1e-12)


def test_vertices_feasible():
    post = make_posterior(list("abcd"), [4, 3, 2, 1])
    for v in vertex_solutions(post, 0.35):
        assert np.dot(v, post.probs) == pytest.approx(0.65, abs=1e-12)
        assert sum(0 < x < 1 for x in v) <= 1
