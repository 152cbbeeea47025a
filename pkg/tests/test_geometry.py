import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darg import compute_density, density_factor, knn_graph, mutual_graph

LINE = np.array([[0.0], [1.0], [2.0], [10.0]])


def brute_force_knn(X, k):
    """Independent reference: full distance sort with (distance, index) keys."""
    n = len(X)
    out = []
    for i in range(n):
        cand = []
        for j in range(n):
            if j == i:
                continue
            cand.append((float(((X[i] - X[j]) ** 2).sum()), j))
        cand.sort()
        out.append(tuple(j for _, j in cand[: min(k, n - 1)]))
    return tuple(out)


def test_knn_line_example():
    g = knn_graph(LINE, 2)
    assert g.adjacency == ((1, 2), (0, 2), (1, 0), (2, 1))
    assert g.adjacency == brute_force_knn(LINE, 2)


def test_knn_matches_brute_force_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(3, 40))
        d = int(rng.integers(1, 6))
        k = int(rng.integers(1, n))
        X = rng.normal(size=(n, d))
        assert knn_graph(X, k).adjacency == brute_force_knn(X, k)


def test_knn_clamps_k():
    g = knn_graph(LINE, 99)
    assert all(len(a) == 3 for a in g.adjacency)


def test_knn_duplicate_points_tie_by_index():
    X = np.array([[0.0], [0.0], [0.0]])
    g = knn_graph(X, 2)
    assert g.adjacency == ((1, 2), (0, 2), (0, 1))


def test_knn_requires_two_samples():
    with pytest.raises(ValueError):
        knn_graph(np.array([[1.0]]), 1)


def test_mutual_line_example():
    m = mutual_graph(knn_graph(LINE, 2))
    assert m.adjacency == ((1, 2), (0, 2), (0, 1), ())
    assert m.mutual


def test_mutual_two_isolated_pairs():
    X = np.array([[0.0], [0.1], [10.0], [10.1]])
    m = mutual_graph(knn_graph(X, 1))
    assert m.adjacency == ((1,), (0,), (3,), (2,))


def test_mutual_rejects_mutual_input():
    m = mutual_graph(knn_graph(LINE, 2))
    with pytest.raises(ValueError):
        mutual_graph(m)


def test_mutual_edges_subset_and_symmetric():
    rng = np.random.default_rng(5)
    for _ in range(10):
        X = rng.normal(size=(30, 3))
        g = knn_graph(X, 4)
        m = mutual_graph(g)
        assert m.edge_count() <= g.edge_count()
        for i, neigh in enumerate(m.adjacency):
            for j in neigh:
                assert j in g.adjacency[i]
                assert i in m.adjacency[j]


def test_density_line_example():
    m = mutual_graph(knn_graph(LINE, 2))
    profile = density_factor(m)
    np.testing.assert_array_equal(profile.counts, [2, 2, 2, 0])
    np.testing.assert_allclose(profile.rho, [1.0, 1.0, 1.0, 0.0])


def test_density_degenerate_all_equal():
    X = np.array([[0.0], [1.0]])
    profile = density_factor(mutual_graph(knn_graph(X, 1)))
    np.testing.assert_allclose(profile.rho, [1.0, 1.0])


def test_density_three_levels():
    # counts [0, 3, 6] -> rho [0, 0.5, 1]
    from darg.geometry import DensityProfile, _normalize_counts

    rho = _normalize_counts(np.array([0, 3, 6]))
    np.testing.assert_allclose(rho, [0.0, 0.5, 1.0])


def test_density_requires_mutual_graph():
    with pytest.raises(ValueError):
        density_factor(knn_graph(LINE, 2))


def test_far_isolated_point_gets_zero_density():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(0, 0.5, size=(30, 2)), [[50.0, 50.0]]])
    profile = density_factor(mutual_graph(knn_graph(X, 5)))
    assert profile.rho[-1] == 0.0
    assert profile.rho.min() >= 0.0 and profile.rho.max() <= 1.0


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    n=st.integers(4, 25),
    d=st.integers(1, 4),
    k=st.integers(1, 6),
    scale=st.sampled_from([0.25, 0.5, 2.0, 4.0, 37.5]),
)
def test_positive_scaling_leaves_graphs_and_rho_unchanged(seed, n, d, k, scale):
    X = np.random.default_rng(seed).normal(size=(n, d))
    g1, g2 = knn_graph(X, k), knn_graph(X * scale, k)
    assert g1.adjacency == g2.adjacency
    m1, m2 = mutual_graph(g1), mutual_graph(g2)
    assert m1.adjacency == m2.adjacency
    np.testing.assert_array_equal(density_factor(m1).rho, density_factor(m2).rho)


def test_compute_density_within_class_vs_global():
    rng = np.random.default_rng(9)
    # one minority point sits inside the majority cloud: class-scoped search
    # must read it as isolated even though it has many global neighbors
    X = np.vstack([rng.normal(0, 0.3, size=(20, 2)), rng.normal(5, 0.3, size=(6, 2)), [[0.0, 0.0]]])
    y = np.array([0] * 20 + [1] * 6 + [1])
    within = compute_density(X, y, 4, scope="within_class")
    global_ = compute_density(X, y, 4, scope="global")
    assert within.rho[-1] == 0.0
    assert global_.rho[-1] > 0.0


def test_compute_density_singleton_class():
    X = np.array([[0.0], [0.1], [0.2], [9.0]])
    y = np.array([0, 0, 0, 1])
    profile = compute_density(X, y, 2, scope="within_class")
    assert profile.counts[-1] == 0
    assert profile.rho[-1] == 0.0


def test_compute_density_unknown_scope():
    with pytest.raises(ValueError):
        compute_density(np.zeros((3, 1)), np.array([0, 0, 1]), 1, scope="nearby")
