from __future__ import annotations

import numpy as np
import pytest

from covertime import graphs


def test_generators():
    assert graphs.cycle(5).m == 5 and graphs.cycle(5).transitive
    assert graphs.complete(5).m == 10
    assert graphs.path(5).m == 4 and not graphs.path(5).transitive
    g = graphs.random_regular(20, 3, seed=1)
    assert np.all(g.degrees() == 3)
    assert graphs.random_regular(20, 3, seed=1).edges.tolist() == g.edges.tolist()


def test_edgelist_round_trip(tmp_path):
    g = graphs.random_regular(12, 4, seed=0)
    graphs.write_edgelist(g, tmp_path / "g.txt")
    h = graphs.read_edgelist(tmp_path / "g.txt")
    assert h.n == g.n and sorted(map(tuple, h.edges.tolist())) == sorted(map(tuple, g.edges.tolist()))


def test_edgelist_rejects_garbage(tmp_path):
    (tmp_path / "bad.txt").write_text("0 1\n1 x\n")
    with pytest.raises(graphs.GraphError):
        graphs.read_edgelist(tmp_path / "bad.txt")


def test_connectivity_and_laplacian():
    g = graphs.Graph(4, np.array([[0, 1], [2, 3]]))
    assert not g.is_connected()
    L = graphs.cycle(4).laplacian()
    assert np.allclose(L.sum(axis=1), 0)


def test_from_config():
    g = graphs.from_config({"generator": "cycle", "n": 6})
    assert g.m == 6
    g = graphs.from_config({"n": 3, "edges": [[0, 1], [1, 2]]})
    assert g.m == 2
    with pytest.raises(graphs.GraphError):
        graphs.from_config({"generator": "nope", "n": 3})
    assert graphs.from_config(g.to_config()).m == 2
