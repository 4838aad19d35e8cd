from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randbuild.geometry import (Graph, IncidenceGraph, build_projective_plane, build_torus,
                                cone, face_distance, from_text, incidence_graph, pg_graph,
                                remove_edges, thick_torus, thicken)

PLANE_ORDERS = [2, 3, 4, 5, 7, 8, 9]


def _nx(graph: Graph) -> nx.MultiGraph:
    g = nx.MultiGraph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edges)
    return g


@pytest.mark.parametrize("q,n,flags", [(2, 7, 21), (3, 13, 52), (4, 21, 105)])
def test_plane_counts(q, n, flags):
    plane = build_projective_plane(q)
    assert len(plane.points) == len(plane.lines) == n
    assert int(plane.incidence.sum()) == flags


@pytest.mark.parametrize("q", PLANE_ORDERS)
def test_plane_axioms(q):
    inc = build_projective_plane(q).incidence.astype(int)
    assert (inc.sum(axis=0) == q + 1).all() and (inc.sum(axis=1) == q + 1).all()
    common_lines = inc @ inc.T
    common_points = inc.T @ inc
    off = ~np.eye(len(inc), dtype=bool)
    assert (common_lines[off] == 1).all()
    assert (common_points[off] == 1).all()


@pytest.mark.parametrize("q", [3, 4])
def test_points_normalized_and_ordered(q):
    plane = build_projective_plane(q)
    for pt in plane.points:
        first = next(c for c in pt if c != 0)
        assert first == 1
    assert plane.points[0] == (1, 0, 0)
    assert plane.points[-1] == (0, 0, 1)
    assert plane.points == build_projective_plane(q).points


def test_heawood():
    g = pg_graph(2)
    assert g.n == 14 and len(g.edges) == 21
    assert (g.degrees == 3).all()
    assert nx.is_isomorphic(nx.Graph(_nx(g)), nx.heawood_graph())


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_incidence_graph_structure(q):
    g = pg_graph(q)
    assert g.n == 2 * (q * q + q + 1)
    assert len(g.edges) == (q * q + q + 1) * (q + 1)
    assert (g.degrees == q + 1).all()
    assert g.is_bipartite() and g.is_connected()
    assert g.girth() == 6 == nx.girth(nx.Graph(_nx(g)))
    # points first, then lines
    assert all(u < g.n_points <= v for u, v in g.edges)


def test_remove_edges():
    g = pg_graph(2)
    assert remove_edges(g, []).edges == g.edges
    h = remove_edges(g, [0])
    assert sorted(np.bincount(h.degrees)[2:].tolist()) == [2, 12]
    assert len(g.edges) == 21  # original untouched
    assert isinstance(h, IncidenceGraph)
    empty = remove_edges(g, range(21))
    assert len(empty.edges) == 0 and not empty.is_connected()
    with pytest.raises(ValueError):
        remove_edges(g, [0, 0])
    with pytest.raises(ValueError):
        remove_edges(g, [(0, 1)])  # points are never adjacent
    u, v = g.edges[3]
    assert remove_edges(g, [(v, u)]).edges == remove_edges(g, [3]).edges


@pytest.mark.parametrize("n,counts", [(3, (9, 27, 18)), (4, (16, 48, 32)), (7, (49, 147, 98))])
def test_torus_counts(n, counts):
    t = build_torus(n)
    assert (t.n_vertices, len(t.edges), t.n_faces) == counts
    assert (t.q_edges == 1).all()
    assert t.n_vertices - len(t.edges) + t.n_faces == 0
    assert t.faces_connected()


def test_torus_rejects_small():
    with pytest.raises(ValueError):
        build_torus(2)


@pytest.mark.parametrize("t,faces,qe", [(1, 36, 3), (2, 54, 5)])
def test_thicken(t, faces, qe):
    base = build_torus(3)
    c = thicken(base, t)
    assert c.n_faces == faces == base.n_faces * (t + 1)
    assert c.edges == base.edges and c.n_vertices == base.n_vertices
    assert (c.q_edges == qe).all() and c.q_min == c.q_max == qe
    with pytest.raises(ValueError):
        thicken(base, 0)


def _face_graph_oracle(c):
    g = nx.Graph()
    g.add_nodes_from(range(c.n_faces))
    for f, h in combinations(range(c.n_faces), 2):
        if set(c.faces[f]) & set(c.faces[h]):
            g.add_edge(f, h)
    return dict(nx.all_pairs_shortest_path_length(g))


@pytest.mark.parametrize("complex_", [build_torus(6), build_torus(5), thick_torus(4, 1)],
                         ids=["torus6", "torus5", "thick4"])
def test_face_distance_matches_bfs(complex_):
    oracle = _face_graph_oracle(complex_)
    D = complex_.face_distances
    for f in range(complex_.n_faces):
        assert all(D[f, h] == d for h, d in oracle[f].items())
        assert (complex_.face_bfs(f) == D[f]).all()


def test_face_distance_examples():
    t = build_torus(6)
    assert face_distance(t, 5, 5) == 0
    assert face_distance(t, 0, 1) == 1  # the two halves of a square share an edge
    with pytest.raises(ValueError):
        face_distance(t, 0, t.n_faces)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 8), st.data())
def test_face_distance_is_metric(n, data):
    t = build_torus(n)
    D = t.face_distances
    f, g, h = (data.draw(st.integers(0, t.n_faces - 1)) for _ in range(3))
    assert D[f, g] == D[g, f]
    assert D[f, h] <= D[f, g] + D[g, h]
    assert (D[f, g] == 0) == (f == g)


def test_cone_links():
    g = pg_graph(2)
    c = cone(g)
    apex = c.link(0)
    assert apex.n == g.n and sorted(apex.edges) == sorted(g.edges)
    # a base vertex links to the apex plus its graph neighbours: a star
    lk = c.link(1)
    assert lk.n == 4 and len(lk.edges) == 3
    assert len(c.link(0, removed=[0]).edges) == 20


def test_torus_vertex_link_is_hexagon():
    t = build_torus(5)
    for v in range(t.n_vertices):
        lk = t.link(v)
        assert lk.n == 6 and len(lk.edges) == 6 and (lk.degrees == 2).all()


@pytest.mark.parametrize("obj", [pg_graph(2), remove_edges(pg_graph(3), [1, 2]),
                                 Graph(3, ((0, 1), (1, 2))), thick_torus(3, 2)],
                         ids=["incidence", "perforated", "graph", "complex"])
def test_text_roundtrip(obj):
    text = obj.to_text()
    assert text.startswith("# randbuild adjacency v1")
    back = from_text(text)
    assert type(back) is type(obj)
    assert back.to_text() == text
