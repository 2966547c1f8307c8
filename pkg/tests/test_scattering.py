from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from graph_scattering import (
    ScatteringConfig,
    build_graph,
    feature_layout,
    moment_summary,
    scatter_graph,
    scatter_signal,
)
from graph_scattering.errors import ConfigError, DimensionMismatch, EmptyVector, MissingSignal
from graph_scattering.graph import permute_graph

from _oracles import (
    dense_adjacency,
    dense_scattering,
    dense_wavelets,
    oracle_fixture_graphs,
    random_connected_graph,
    star_edges,
)

UNNORM = "unnormalized"
NORM = "normalized"


def test_power_sums():
    np.testing.assert_array_equal(moment_summary([1, 2, 3], 2, UNNORM), [6, 14])


def test_standardized_moments():
    np.testing.assert_allclose(moment_summary([1, 2, 3], 4, NORM), [2, 2 / 3, 0, 1.5], atol=1e-15)


def test_zero_variance_convention():
    np.testing.assert_array_equal(moment_summary(np.zeros(5), 4, NORM), [0, 0, 0, 0])
    np.testing.assert_array_equal(moment_summary(np.full(4, 3.0), 4, NORM), [3, 0, 0, 0])


def test_normalized_against_scipy(rng):
    for _ in range(20):
        v = rng.gamma(2.0, size=int(rng.integers(2, 40)))
        want = [v.mean(), v.var(), stats.skew(v), stats.kurtosis(v, fisher=False)]
        np.testing.assert_allclose(moment_summary(v, 4, NORM), want, rtol=1e-10)


def test_moment_errors():
    with pytest.raises(EmptyVector):
        moment_summary([], 2)
    with pytest.raises(ConfigError):
        moment_summary([1.0, 2.0], 5, NORM)
    with pytest.raises(ConfigError):
        moment_summary([1.0], 2, "bogus")


def test_config_validation():
    with pytest.raises(ConfigError):
        ScatteringConfig(J=0)
    with pytest.raises(ConfigError):
        ScatteringConfig(Q=0)
    with pytest.raises(ConfigError):
        ScatteringConfig(Q=5, moment_mode=NORM)
    assert ScatteringConfig(Q=6, moment_mode="unnorm").moment_mode == UNNORM


def test_degree_signal_has_no_wavelet_energy(rng):
    for mode in (UNNORM, NORM):
        cfg = ScatteringConfig(J=5, Q=4, moment_mode=mode)
        g = random_connected_graph(15, rng, weighted=True)
        block = scatter_signal(g, g.degree, cfg)
        assert np.abs(block[cfg.Q:]).max() < 1e-10 * g.degree.sum()


def test_k2_example():
    g = build_graph(2, [(0, 1, 1.0)])
    block = scatter_signal(g, np.array([1.0, 0.0]), ScatteringConfig(J=2, Q=1, moment_mode=UNNORM))
    np.testing.assert_allclose(block, [1, 0, 0, 0], atol=1e-15)


def test_star_against_dense_oracle():
    A = dense_adjacency(4, star_edges(4))
    g = build_graph(4, star_edges(4))
    x = np.array([1.0, 0, 0, 0])
    got = scatter_signal(g, x, ScatteringConfig(J=2, Q=2, moment_mode=UNNORM))
    np.testing.assert_allclose(got, dense_scattering(A, x, 2, 2), atol=1e-10)


def test_dense_oracle_family(rng):
    for name, n, edges in oracle_fixture_graphs(max_n=15):
        A = dense_adjacency(n, edges)
        g = build_graph(n, edges)
        x = rng.normal(size=n)
        for J, Q in ((1, 3), (3, 2), (4, 4)):
            got = scatter_signal(g, x, ScatteringConfig(J=J, Q=Q, moment_mode=UNNORM))
            np.testing.assert_allclose(got, dense_scattering(A, x, J, Q), atol=1e-10, err_msg=name)


def test_normalized_against_dense_oracle(rng):
    g = random_connected_graph(11, rng, weighted=True)
    A = dense_adjacency(11, g.edges)
    psi = dense_wavelets(A, 3)
    x = rng.normal(size=11)

    def norm_moments(v):
        return [v.mean(), v.var(), stats.skew(v), stats.kurtosis(v, fisher=False)]

    want = norm_moments(x)
    for j in range(3):
        want += norm_moments(np.abs(psi[j] @ x))
    for j, j2 in combinations(range(3), 2):
        want += norm_moments(np.abs(psi[j2] @ np.abs(psi[j] @ x)))
    got = scatter_signal(g, x, ScatteringConfig(J=3, Q=4, moment_mode=NORM))
    np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("n_signals, expected", [(1, 64), (2, 128)])
def test_feature_counts(rng, n_signals, expected):
    g = random_connected_graph(9, rng)
    sigs = {f"s{k}": rng.normal(size=9) for k in range(n_signals)}
    f = scatter_graph(g, sigs, ScatteringConfig(J=5, Q=4))
    assert len(f.values) == expected == len(f.layout)


def test_block_size_formula():
    for J in range(1, 7):
        for Q in range(1, 5):
            cfg = ScatteringConfig(J=J, Q=Q)
            assert cfg.block_size == len(feature_layout(cfg, ["x"])) == Q * (1 + J + J * (J - 1) // 2)


def test_layout_order():
    lay = feature_layout(ScatteringConfig(J=3, Q=2), ["a", "b"])
    assert lay[:2] == [("a", 0, None, None, 1), ("a", 0, None, None, 2)]
    assert [(r.j, r.q) for r in lay[2:8]] == [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]
    assert [(r.j, r.j2) for r in lay[8:14:2]] == [(1, 2), (1, 3), (2, 3)]
    assert lay[14].signal == "b" and len(lay) == 28
    second = [r for r in lay if r.order == 2]
    assert all(r.j < r.j2 for r in second)


def test_signal_order_follows_config(rng):
    g = random_connected_graph(8, rng)
    a, b = rng.normal(size=8), rng.normal(size=8)
    cfg_ab = ScatteringConfig(J=2, Q=2, signal_names=("a", "b"))
    cfg_ba = ScatteringConfig(J=2, Q=2, signal_names=("b", "a"))
    fab = scatter_graph(g, {"a": a, "b": b}, cfg_ab).values
    fba = scatter_graph(g, {"a": a, "b": b}, cfg_ba).values
    k = cfg_ab.block_size
    np.testing.assert_array_equal(fab[:k], fba[k:])
    np.testing.assert_allclose(fab[:k], scatter_signal(g, a, cfg_ab), atol=0)


def test_scatter_graph_errors(rng):
    g = random_connected_graph(5, rng)
    with pytest.raises(MissingSignal):
        scatter_graph(g, {"a": np.ones(5)}, ScatteringConfig(signal_names=("a", "b")))
    with pytest.raises(DimensionMismatch):
        scatter_graph(g, {"a": np.ones(4)}, ScatteringConfig())


def test_zeroth_moment_is_mass(rng):
    g = random_connected_graph(10, rng)
    x = rng.normal(size=10)
    assert scatter_signal(g, x, ScatteringConfig(Q=3, moment_mode=UNNORM))[0] == np.sum(x)


def _perm_case(rng, n):
    g = random_connected_graph(n, rng, weighted=True)
    perm = rng.permutation(n)
    x = rng.normal(size=n)
    px = np.empty(n)
    px[perm] = x
    return g, permute_graph(g, perm), x, px


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2 ** 32 - 1), st.sampled_from([UNNORM, NORM]))
def test_permutation_invariance(n, seed, mode):
    r = np.random.default_rng(seed)
    g, h, x, px = _perm_case(r, n)
    cfg = ScatteringConfig(J=4, Q=4, moment_mode=mode)
    s, sp = scatter_signal(g, x, cfg), scatter_signal(h, px, cfg)
    assert np.abs(s - sp).max() <= 1e-9 * (1 + np.abs(s).max())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2 ** 32 - 1))
def test_first_order_q1_nonnegative(n, seed):
    r = np.random.default_rng(seed)
    g = random_connected_graph(n, r)
    cfg = ScatteringConfig(J=4, Q=2, moment_mode=UNNORM)
    lay = feature_layout(cfg, ["x"])
    vals = scatter_signal(g, r.normal(size=n), cfg)
    assert all(v >= 0 for v, rec in zip(vals, lay) if rec.order >= 1 and rec.q == 1)


def _dense_stay_scattering(A, x, J, Q):
    """Power sums with P extended by P e_v = e_v on zero-degree vertices."""
    d = A.sum(axis=1)
    inv = np.where(d > 0, 1.0 / np.where(d > 0, d, 1.0), 0.0)
    P = 0.5 * (np.eye(len(A)) + A @ np.diag(inv)) + 0.5 * np.diag(d == 0)
    mp = np.linalg.matrix_power
    psi = [mp(P, 2 ** (j - 1)) - mp(P, 2 ** j) for j in range(1, J + 1)]
    out = [np.sum(x ** q) for q in range(1, Q + 1)]
    for j in range(J):
        out += [np.sum(np.abs(psi[j] @ x) ** q) for q in range(1, Q + 1)]
    for j, j2 in combinations(range(J), 2):
        out += [np.sum(np.abs(psi[j2] @ np.abs(psi[j] @ x)) ** q) for q in range(1, Q + 1)]
    return np.array(out)


def test_isolated_vertex_policy(rng):
    from graph_scattering.errors import IsolatedVertex

    edges = [(0, 1, 1.0), (1, 3, 2.0), (3, 4, 1.0), (0, 4, 1.0)]
    g = build_graph(6, edges)            # vertices 2 and 5 have no edges
    x = rng.normal(size=6)
    cfg = ScatteringConfig(J=3, Q=3, moment_mode=UNNORM)
    with pytest.raises(IsolatedVertex):
        scatter_graph(g, {"x": x}, cfg)
    got = scatter_graph(g, {"x": x}, cfg, isolated="stay").values
    np.testing.assert_allclose(got, _dense_stay_scattering(dense_adjacency(6, edges), x, 3, 3),
                               atol=1e-12)
    with pytest.raises(ConfigError):
        scatter_graph(g, {"x": x}, cfg, isolated="drop")


def test_all_isolated(rng):
    g = build_graph(3, [])
    x = rng.normal(size=3)
    got = scatter_graph(g, {"x": x}, ScatteringConfig(J=2, Q=2, moment_mode=UNNORM), "stay").values
    np.testing.assert_allclose(got, [x.sum(), (x ** 2).sum()] + [0] * 6)
