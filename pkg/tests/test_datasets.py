import logging

import numpy as np
import pytest

from graph_scattering import build_graph
from graph_scattering.datasets import (
    load_features,
    load_tu_dataset,
    save_features,
    sidecar_path,
    write_tu_dataset,
)
from graph_scattering.errors import (
    EdgeAcrossGraphs,
    MalformedLine,
    MissingFile,
    OrphanVertexIndex,
    SchemaMismatch,
)

from _oracles import complete_edges, path_edges, random_connected_graph, star_edges


def _write(root, name, **files):
    root.mkdir(parents=True, exist_ok=True)
    for suffix, text in files.items():
        (root / f"{name}_{suffix}.txt").write_text(text)


def _two_triangles(tmp_path, **extra):
    files = dict(
        A="1,2\n2,1\n2,3\n3,2\n1,3\n3,1\n4,5\n5,4\n5,6\n6,5\n",
        graph_indicator="1\n1\n1\n2\n2\n2\n",
        graph_labels="-1\n1\n",
    )
    files.update(extra)
    _write(tmp_path / "T", "T", **files)
    return tmp_path


def test_basic_load(tmp_path):
    ds = load_tu_dataset(_two_triangles(tmp_path), "T")
    assert len(ds) == 2
    assert [g.n for g in ds.graphs] == [3, 3]
    assert [g.num_edges for g in ds.graphs] == [3, 2]
    np.testing.assert_array_equal(ds.labels, [0, 1])
    assert ds.label_mapping == {-1: 0, 1: 1}
    assert ds.num_classes == 2
    assert ds.graphs[1].edges == ((0, 1, 1.0), (1, 2, 1.0))


def test_nested_or_flat_directory(tmp_path):
    _two_triangles(tmp_path)
    a = load_tu_dataset(tmp_path, "T")
    b = load_tu_dataset(tmp_path / "T", "T")
    assert [g.edges for g in a.graphs] == [g.edges for g in b.graphs]


def test_env_default(tmp_path, monkeypatch):
    _two_triangles(tmp_path)
    monkeypatch.setenv("GS_DATA_DIR", str(tmp_path))
    assert len(load_tu_dataset(None, "T")) == 2


def test_round_trip(tmp_path, rng):
    graphs = [random_connected_graph(int(rng.integers(2, 12)), rng) for _ in range(7)]
    labels = rng.integers(0, 3, size=7)
    labels[:3] = [0, 1, 2]
    node_labels = [rng.integers(0, 4, size=g.n) for g in graphs]
    attrs = [rng.normal(size=(g.n, 2)) for g in graphs]
    write_tu_dataset(tmp_path / "R", "R", graphs, labels, node_labels, attrs)
    ds = load_tu_dataset(tmp_path, "R")
    np.testing.assert_array_equal(ds.labels, labels)
    for g, h, nl, at, nl2, at2 in zip(graphs, ds.graphs, node_labels, attrs,
                                       ds.node_labels, ds.node_attributes):
        assert h.n == g.n
        assert {(u, v) for u, v, _ in h.edges} == {(u, v) for u, v, _ in g.edges}
        np.testing.assert_array_equal(nl2, nl)
        np.testing.assert_array_equal(at2, at)


def test_interleaved_indicator(tmp_path):
    # vertices of graph 2 listed between those of graph 1
    _write(tmp_path, "I", A="1,3\n3,1\n2,4\n4,2\n", graph_indicator="1\n2\n1\n2\n",
           graph_labels="0\n1\n", node_labels="10\n20\n11\n21\n")
    ds = load_tu_dataset(tmp_path, "I")
    assert [g.edges for g in ds.graphs] == [((0, 1, 1.0),), ((0, 1, 1.0),)]
    np.testing.assert_array_equal(ds.node_labels[0], [10, 11])
    np.testing.assert_array_equal(ds.node_labels[1], [20, 21])


def test_edge_across_graphs(tmp_path):
    _two_triangles(tmp_path, A="1,2\n2,1\n3,4\n4,3\n")
    with pytest.raises(EdgeAcrossGraphs):
        load_tu_dataset(tmp_path, "T")


def test_orphan_vertex(tmp_path):
    _two_triangles(tmp_path, A="1,2\n2,1\n6,7\n")
    with pytest.raises(OrphanVertexIndex):
        load_tu_dataset(tmp_path, "T")
    _two_triangles(tmp_path, graph_indicator="1\n1\n1\n2\n2\n3\n")
    with pytest.raises(OrphanVertexIndex):
        load_tu_dataset(tmp_path, "T")


def test_malformed_line_reports_position(tmp_path):
    _two_triangles(tmp_path, A="1,2\n2,1\n2,x\n")
    with pytest.raises(MalformedLine) as err:
        load_tu_dataset(tmp_path, "T")
    assert err.value.lineno == 3
    assert "T_A.txt" in str(err.value)


def test_missing_file(tmp_path):
    _write(tmp_path, "M", A="1,2\n2,1\n", graph_indicator="1\n1\n")
    with pytest.raises(MissingFile):
        load_tu_dataset(tmp_path, "M")
    with pytest.raises(FileNotFoundError):
        load_tu_dataset(tmp_path, "M")


def test_unpaired_edges_symmetrized(tmp_path, caplog):
    _two_triangles(tmp_path, A="1,2\n2,3\n1,3\n4,5\n5,6\n")
    with caplog.at_level(logging.WARNING):
        ds = load_tu_dataset(tmp_path, "T")
    assert ds.stats["edges_without_reverse"] == 5
    assert [g.num_edges for g in ds.graphs] == [3, 2]
    assert "without their reverse" in caplog.text


def test_self_loops_dropped(tmp_path):
    _two_triangles(tmp_path, A="1,1\n1,2\n2,1\n2,3\n3,2\n1,3\n3,1\n4,5\n5,4\n5,6\n6,5\n")
    ds = load_tu_dataset(tmp_path, "T")
    assert ds.stats["self_loops_dropped"] == 1
    assert ds.graphs[0].num_edges == 3


def test_deterministic(tmp_path):
    _two_triangles(tmp_path)
    a, b = load_tu_dataset(tmp_path, "T"), load_tu_dataset(tmp_path, "T")
    assert [g.edges for g in a.graphs] == [g.edges for g in b.graphs]
    np.testing.assert_array_equal(a.labels, b.labels)


def test_signals_for_uses_dataset_label_values(tmp_path):
    graphs = [build_graph(3, path_edges(3)), build_graph(4, star_edges(4))]
    write_tu_dataset(tmp_path, "ENZYMES", graphs, [1, 2], node_labels=[[1, 1, 2], [3, 3, 3, 3]])
    ds = load_tu_dataset(tmp_path, "ENZYMES")
    assert ds.signals_for(0).names == ds.signals_for(1).names == ("label=1", "label=2", "label=3")


def test_feature_cache_round_trip(tmp_path, rng):
    X = rng.normal(size=(2, 64)) * 10.0 ** rng.integers(-30, 30, size=(2, 64))
    meta = {"J": 5, "Q": 4, "moment_mode": "normalized", "signal_names": ["x"]}
    path = save_features(tmp_path / "f.csv", X, [3, 1], meta)
    header = path.read_text().splitlines()[0].split(",")
    assert len(header) == 66 and header[:3] == ["graph_id", "label", "f0"]
    ids, labels, X2, meta2 = load_features(path, expect={**meta, "signal_names": ("x",)})
    assert X2.tobytes() == X.tobytes()
    np.testing.assert_array_equal(labels, [3, 1])
    assert ids == ["0", "1"]
    assert meta2["num_features"] == 64 and meta2["num_graphs"] == 2
    assert sidecar_path(path).exists()


def test_feature_cache_schema_mismatch(tmp_path):
    meta = {"J": 5, "Q": 4, "moment_mode": "normalized", "signal_names": ["x"]}
    path = save_features(tmp_path / "f.csv", np.zeros((1, 64)), [0], meta)
    with pytest.raises(SchemaMismatch):
        load_features(path, expect={**meta, "J": 4})
    with pytest.raises(MissingFile):
        load_features(tmp_path / "nope.csv")


# published sizes: graphs, classes, max vertices, mean vertices, mean directed edge count
PUBLISHED = {
    "MUTAG": (188, 2, 28, 17.93, 39.50),
    "ENZYMES": (600, 6, 126, 32.6, 124.2),
}


@pytest.mark.dataset
@pytest.mark.parametrize("name", sorted(PUBLISHED))
def test_benchmark_statistics(name):
    try:
        ds = load_tu_dataset(None, name)
    except MissingFile:
        pytest.skip(f"{name} not under $GS_DATA_DIR")
    graphs, classes, max_n, mean_n, mean_e = PUBLISHED[name]
    sizes = np.array([g.n for g in ds.graphs])
    assert len(ds) == graphs and ds.num_classes == classes
    assert sizes.max() == max_n
    assert sizes.mean() == pytest.approx(mean_n, abs=0.05)
    assert 2 * np.mean([g.num_edges for g in ds.graphs]) == pytest.approx(mean_e, abs=0.05)
