import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sociosynth.graph import GraphView
from sociosynth.metrics import (
    DegreeHistogram,
    DisconnectedGraphError,
    FitUnavailable,
    average_histograms,
    clustering_coefficients,
    degree_histogram,
    fit_power_tail,
    measure,
    radius_diameter,
)


def view(n, edges):
    return GraphView.from_edge_list(n, edges)


def complete(n):
    return list(itertools.combinations(range(n), 2))


def path(n):
    return [(i, i + 1) for i in range(n - 1)]


def cycle(n):
    return path(n) + [(n - 1, 0)]


def random_connected(rng, n, extra):
    """Random spanning tree plus ``extra`` random edges."""
    edges = [(int(rng.integers(i)), i) for i in range(1, n)]
    for _ in range(extra):
        u, v = rng.integers(n, size=2)
        if u != v:
            edges.append((int(u), int(v)))
    perm = rng.permutation(n)
    return [(int(perm[u]), int(perm[v])) for u, v in edges]


# degree histograms --------------------------------------------------------

@pytest.mark.parametrize("n, edges, expected", [
    (4, complete(4), {3: 4}),
    (6, [(0, i) for i in range(1, 6)], {5: 1, 1: 5}),
    (4, [(0, 1), (2, 3)], {1: 4}),
    (3, [], {0: 3}),
])
def test_degree_histogram(n, edges, expected):
    assert dict(degree_histogram(view(n, edges)).counts) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.lists(st.tuples(st.integers(0, 29), st.integers(0, 29)), max_size=80))
def test_histogram_mass_conservation(n, pairs):
    edges = [(u % n, v % n) for u, v in pairs]
    hist = degree_histogram(view(n, edges))
    assert sum(hist.counts.values()) == n
    assert dict(hist.counts) == oracles.degree_counts(n, edges)


def test_average_histograms_is_binwise_mean():
    a = DegreeHistogram({1: 4, 2: 6}, 10)
    b = DegreeHistogram({2: 8, 3: 2}, 10)
    avg = average_histograms([a, b])
    assert dict(avg.counts) == {1: 2.0, 2: 7.0, 3: 1.0}
    assert avg.n == 10


# tail fit -----------------------------------------------------------------

def test_fit_cube_law():
    counts = {k: round(1e6 * k ** -3.0) for k in range(2, 51)}
    fit = fit_power_tail(DegreeHistogram(counts, sum(counts.values())))
    assert fit.exponent == pytest.approx(3.0, abs=0.05)
    assert fit.fit_range == (3, 50)
    assert fit.r_squared > 0.99


def test_fit_flat_histogram():
    counts = {k: 100 for k in range(1, 11)}
    fit = fit_power_tail(DegreeHistogram(counts, 1000))
    assert fit.exponent == pytest.approx(0.0, abs=0.01)
    assert fit.fit_range == (2, 10)


@pytest.mark.parametrize("gamma", [2, 3, 5, 8])
def test_fit_recovers_exact_power_laws(gamma):
    counts = {k: 1e12 * k ** -float(gamma) for k in range(1, 40)}
    fit = fit_power_tail(DegreeHistogram(counts, sum(counts.values())))
    assert fit.exponent == pytest.approx(gamma, abs=0.05)


def test_fit_matches_longhand_least_squares():
    counts = {1: 5, 2: 90, 3: 40, 4: 20, 5: 0, 6: 7, 7: 3, 9: 1}
    fit = fit_power_tail(DegreeHistogram(counts, 166))
    ks = [3, 4, 6, 7, 9]
    slope = oracles.least_squares_slope([math.log(k) for k in ks],
                                        [math.log(counts[k]) for k in ks])
    assert fit.exponent == pytest.approx(-slope, rel=1e-12)
    assert fit.fit_range == (3, 9)


def test_fit_needs_three_bins_above_the_mode():
    with pytest.raises(FitUnavailable):
        fit_power_tail(DegreeHistogram({3: 4}, 4))
    with pytest.raises(FitUnavailable):
        fit_power_tail(DegreeHistogram({1: 2, 2: 10, 3: 4, 4: 0, 5: 1}, 17))


def test_mode_ties_go_to_the_smallest_degree():
    assert DegreeHistogram({2: 5, 3: 5, 4: 1}, 11).mode() == 2


# clustering ---------------------------------------------------------------

@pytest.mark.parametrize("n, edges, expected", [
    (3, complete(3), (1.0, 1.0)),
    (3, path(3), (0.0, 0.0)),
    # K4 minus one edge: locals 2/3, 2/3, 1, 1; 2 triangles over 8 wedges
    (4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)], (5 / 6, 0.75)),
    (1, [], (0.0, 0.0)),
])
def test_clustering_examples(n, edges, expected):
    got = clustering_coefficients(view(n, edges))
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(oracles.clustering(n, edges), abs=1e-12)


def test_clustering_exhaustive_small_graphs():
    rng = np.random.default_rng(0)
    for _ in range(600):
        n = int(rng.integers(1, 9))
        all_pairs = complete(n)
        keep = rng.random(len(all_pairs)) < rng.random()
        edges = [e for e, k in zip(all_pairs, keep) if k]
        assert clustering_coefficients(view(n, edges)) == pytest.approx(
            oracles.clustering(n, edges), abs=1e-12)


def test_clustering_agrees_with_networkx():
    g = nx.connected_watts_strogatz_graph(300, 6, 0.1, seed=1)
    local, glob = clustering_coefficients(view(300, list(g.edges())))
    assert local == pytest.approx(nx.average_clustering(g), abs=1e-12)
    assert glob == pytest.approx(nx.transitivity(g), abs=1e-12)


# radius and diameter ------------------------------------------------------

@pytest.mark.parametrize("n, edges, expected", [
    (5, path(5), (2, 4)),
    (6, cycle(6), (3, 3)),
    (7, complete(7), (1, 1)),
    (1, [], (0, 0)),
    (2, [(0, 1)], (1, 1)),
])
def test_radius_diameter_examples(n, edges, expected):
    assert radius_diameter(view(n, edges)) == expected


def test_radius_diameter_rejects_disconnected():
    with pytest.raises(DisconnectedGraphError):
        radius_diameter(view(4, [(0, 1), (2, 3)]))


def test_radius_diameter_against_all_pairs_bfs():
    rng = np.random.default_rng(1)
    for _ in range(300):
        n = int(rng.integers(2, 201))
        edges = random_connected(rng, n, int(rng.integers(0, n)))
        r, d = radius_diameter(view(n, edges))
        assert (r, d) == oracles.radius_diameter(n, edges)
        assert r <= d <= 2 * r


def test_radius_diameter_on_structured_graphs():
    cases = [nx.balanced_tree(3, 4), nx.grid_2d_graph(9, 13), nx.barbell_graph(6, 7),
             nx.lollipop_graph(8, 12), nx.connected_watts_strogatz_graph(500, 4, 0.05, seed=3)]
    for g in cases:
        g = nx.convert_node_labels_to_integers(g)
        got = radius_diameter(view(g.number_of_nodes(), list(g.edges())))
        assert got == (nx.radius(g), nx.diameter(g))


# measure ------------------------------------------------------------------

def test_measure_cutoff_skips_eccentricities():
    v = view(6, cycle(6))
    full = measure(v, seed=3)
    assert (full.radius, full.diameter) == (3, 3)
    assert full.mean_degree == 2.0 and full.max_degree == 2
    skipped = measure(v, eccentricity_cutoff=5)
    assert skipped.radius is None and skipped.diameter is None
    assert skipped.exponent is None


def test_measure_record_invariant_on_generated_graph(example):
    from sociosynth.graph import level_view
    from sociosynth.pipeline import generate

    gen = generate(example, 3000, 5)
    rec = measure(level_view(gen.graph, {1, 2}), 5, gen.components.repair_edges)
    assert rec.radius <= rec.diameter <= 2 * rec.radius
    assert sum(rec.histogram.counts.values()) == 3000
    assert rec.fit_range[0] > rec.histogram.mode()
