"""
Projective planes PG(2,q), their incidence graphs, and finite 2-complexes.

A chamber is a flag (point, line) of PG(2,q), i.e. an edge of the bipartite
incidence graph, when we look at a vertex link; in a ``Complex2`` a chamber
is a face.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .gf import GF, prime_power

HEADER = "# randbuild adjacency v1"


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph on vertices 0..n-1.

    ``edges`` is a tuple of (u, v) pairs; a repeated pair is a parallel edge
    and contributes its multiplicity to the adjacency matrix.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise ValueError(f"bad edge {(u, v)} for n={self.n}")

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] += 1
            a[v, u] += 1
        return a

    def neighbours(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return nb

    def components(self) -> int:
        nb = self.neighbours()
        seen = [False] * self.n
        count = 0
        for s in range(self.n):
            if seen[s]:
                continue
            count += 1
            seen[s] = True
            stack = [s]
            while stack:
                u = stack.pop()
                for w in nb[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
        return count

    def is_connected(self) -> bool:
        return self.n > 0 and self.components() == 1

    def is_bipartite(self) -> bool:
        nb = self.neighbours()
        colour = [-1] * self.n
        for s in range(self.n):
            if colour[s] >= 0:
                continue
            colour[s] = 0
            dq = deque([s])
            while dq:
                u = dq.popleft()
                for w in nb[u]:
                    if colour[w] < 0:
                        colour[w] = 1 - colour[u]
                        dq.append(w)
                    elif colour[w] == colour[u]:
                        return False
        return True

    def girth(self) -> float:
        """Length of a shortest cycle (inf for forests). BFS from every vertex."""
        seen_pairs = set()
        for u, v in self.edges:
            key = (min(u, v), max(u, v))
            if key in seen_pairs:
                return 2
            seen_pairs.add(key)
        nb = self.neighbours()
        best = float("inf")
        for s in range(self.n):
            dist = [-1] * self.n
            parent = [-1] * self.n
            dist[s] = 0
            dq = deque([s])
            while dq:
                u = dq.popleft()
                for w in nb[u]:
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        dq.append(w)
                    elif parent[u] != w:
                        best = min(best, dist[u] + dist[w] + 1)
        return best

    def to_text(self) -> str:
        lines = [HEADER, "kind graph", f"vertices {self.n}", f"edges {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class IncidenceGraph(Graph):
    """Point-line incidence graph: vertices are points then lines."""

    n_points: int = 0
    n_lines: int = 0

    @property
    def flags(self) -> tuple[tuple[int, int], ...]:
        return self.edges

    def to_text(self) -> str:
        lines = [HEADER, "kind incidence", f"points {self.n_points}",
                 f"lines {self.n_lines}", f"vertices {self.n}",
                 f"edges {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ProjectivePlane:
    q: int
    points: tuple[tuple[int, int, int], ...]
    lines: tuple[tuple[int, int, int], ...]
    incidence: np.ndarray = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.points)

    def flags(self) -> list[tuple[int, int]]:
        pts, lns = np.nonzero(self.incidence)
        return list(zip(pts.tolist(), lns.tolist()))


def _normalized_triples(q: int) -> list[tuple[int, int, int]]:
    # first nonzero coordinate is 1 (index 1 in GF tables)
    out = [(1, a, b) for a, b in product(range(q), repeat=2)]
    out += [(0, 1, b) for b in range(q)]
    out.append((0, 0, 1))
    return out


def build_projective_plane(q: int) -> ProjectivePlane:
    if prime_power(q) is None:
        raise ValueError(f"q={q} is not a prime power")
    F = GF(q)
    pts = _normalized_triples(q)
    P = np.array(pts, dtype=np.int64)
    # incidence: sum_i p_i * l_i == 0 over GF(q)
    mul, add = F.mul_table, F.add_table
    acc = mul[P[:, None, 0], P[None, :, 0]]
    for i in (1, 2):
        acc = add[acc, mul[P[:, None, i], P[None, :, i]]]
    inc = acc == 0
    return ProjectivePlane(q, tuple(pts), tuple(pts), inc)


def incidence_graph(plane: ProjectivePlane) -> IncidenceGraph:
    m = plane.size
    edges = tuple((p, m + l) for p, l in plane.flags())
    return IncidenceGraph(2 * m, edges, n_points=m, n_lines=m)


def pg_graph(q: int) -> IncidenceGraph:
    return incidence_graph(build_projective_plane(q))


def remove_edges(graph: Graph, edges) -> Graph:
    """Return a copy of ``graph`` without the listed edges.

    Edges may be given as (u, v) pairs (either orientation) or as integer
    positions in ``graph.edges``.
    """
    index: dict[tuple[int, int], list[int]] = {}
    for i, (u, v) in enumerate(graph.edges):
        index.setdefault((min(u, v), max(u, v)), []).append(i)
    drop: set[int] = set()
    for e in edges:
        if isinstance(e, (int, np.integer)):
            i = int(e)
            if not 0 <= i < len(graph.edges):
                raise ValueError(f"unknown edge id {i}")
        else:
            u, v = e
            slots = index.get((min(u, v), max(u, v)), [])
            free = [i for i in slots if i not in drop]
            if not slots:
                raise ValueError(f"unknown edge {(u, v)}")
            if not free:
                raise ValueError(f"duplicate edge {(u, v)}")
            i = free[0]
        if i in drop:
            raise ValueError(f"duplicate edge id {i}")
        drop.add(i)
    kept = tuple(e for i, e in enumerate(graph.edges) if i not in drop)
    if isinstance(graph, IncidenceGraph):
        return IncidenceGraph(graph.n, kept, n_points=graph.n_points, n_lines=graph.n_lines)
    return Graph(graph.n, kept)


@dataclass(frozen=True)
class Complex2:
    """Finite 2-complex with triangular cells.

    ``faces`` holds vertex triples; several faces may share the same triple
    (parallel cells produced by ``thicken``).  ``face_edges[f]`` are the
    indices into ``edges`` of the three boundary edges of face f.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[int, int, int], ...]
    name: str = "complex"

    def __post_init__(self):
        idx = self.edge_index
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[0], f[2])):
                if (min(a, b), max(a, b)) not in idx:
                    raise ValueError(f"face {f} uses missing edge {(a, b)}")

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(min(u, v), max(u, v)): i for i, (u, v) in enumerate(self.edges)}

    @cached_property
    def face_edges(self) -> tuple[tuple[int, int, int], ...]:
        idx = self.edge_index
        out = []
        for a, b, c in self.faces:
            out.append(tuple(idx[(min(x, y), max(x, y))] for x, y in ((a, b), (b, c), (a, c))))
        return tuple(out)

    @cached_property
    def edge_faces(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.edges]
        for f, es in enumerate(self.face_edges):
            for e in es:
                inc[e].append(f)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def q_edges(self) -> np.ndarray:
        """q_e = (number of faces on e) - 1."""
        return np.array([len(fs) - 1 for fs in self.edge_faces], dtype=np.int64)

    @property
    def q_min(self) -> int:
        return int(self.q_edges.min())

    @property
    def q_max(self) -> int:
        return int(self.q_edges.max())

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def vertex_faces(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for f, tri in enumerate(self.faces):
            for v in tri:
                inc[v].append(f)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def face_neighbours(self) -> tuple[tuple[int, ...], ...]:
        """Faces sharing at least one vertex (excluding the face itself)."""
        out = []
        for f, tri in enumerate(self.faces):
            nb = set()
            for v in tri:
                nb.update(self.vertex_faces[v])
            nb.discard(f)
            out.append(tuple(sorted(nb)))
        return tuple(out)

    def face_bfs(self, source: int) -> np.ndarray:
        dist = np.full(self.n_faces, -1, dtype=np.int64)
        dist[source] = 0
        dq = deque([source])
        nb = self.face_neighbours
        while dq:
            f = dq.popleft()
            for g in nb[f]:
                if dist[g] < 0:
                    dist[g] = dist[f] + 1
                    dq.append(g)
        return dist

    @cached_property
    def face_distances(self) -> np.ndarray:
        """All-pairs face distance matrix (-1 marks unreachable).

        For distinct faces f, g the distance is 1 + min vertex distance
        between their corners; ``face_bfs`` computes the same thing directly.
        """
        dv = self.vertex_distances.astype(np.int64)
        dv = np.where(dv < 0, 1 << 40, dv)
        F = np.array(self.faces, dtype=np.int64)
        best = np.full((self.n_faces, self.n_faces), 1 << 40, dtype=np.int64)
        for i in range(3):
            for j in range(3):
                np.minimum(best, dv[F[:, i][:, None], F[:, j][None, :]], out=best)
        out = best + 1
        np.fill_diagonal(out, 0)
        out[best >= 1 << 40] = -1
        return out.astype(np.int32)

    @cached_property
    def vertex_distances(self) -> np.ndarray:
        nb: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        out = np.full((self.n_vertices, self.n_vertices), -1, dtype=np.int32)
        for s in range(self.n_vertices):
            out[s, s] = 0
            dq = deque([s])
            while dq:
                u = dq.popleft()
                for w in nb[u]:
                    if out[s, w] < 0:
                        out[s, w] = out[s, u] + 1
                        dq.append(w)
        return out

    def edge_distance(self, e1: int, e2: int) -> int:
        """0 for equal edges, else 1 + min vertex distance between endpoints.

        Two distinct edges sharing a vertex are at distance 1, mirroring the
        face metric.
        """
        if e1 == e2:
            return 0
        d = self.vertex_distances
        (a, b), (c, e) = self.edges[e1], self.edges[e2]
        return 1 + int(min(d[a, c], d[a, e], d[b, c], d[b, e]))

    def faces_connected(self) -> bool:
        return self.n_faces > 0 and bool((self.face_bfs(0) >= 0).all())

    def link(self, v: int, removed=()) -> Graph:
        """Link graph of vertex v, built from the faces not in ``removed``.

        Link vertices are the other corners of surviving faces at v (in
        increasing vertex order); each surviving face contributes one link
        edge, so parallel faces give parallel edges.
        """
        removed = set(removed)
        fs = [f for f in self.vertex_faces[v] if f not in removed]
        corners = sorted({w for f in fs for w in self.faces[f] if w != v})
        relabel = {w: i for i, w in enumerate(corners)}
        edges = []
        for f in fs:
            a, b = [relabel[w] for w in self.faces[f] if w != v]
            edges.append((a, b))
        return Graph(len(corners), tuple(edges))

    def to_text(self) -> str:
        lines = [HEADER, f"kind complex {self.name}", f"vertices {self.n_vertices}",
                 f"edges {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        lines.append(f"faces {self.n_faces}")
        lines += [" ".join(map(str, f)) for f in self.faces]
        return "\n".join(lines) + "\n"


def from_text(text: str) -> Graph | Complex2:
    """Parse the output of ``Graph.to_text`` / ``Complex2.to_text``."""
    rows = [r.strip() for r in text.splitlines() if r.strip() and not r.startswith("#")]
    it = iter(rows)
    kind = next(it).split()
    meta: dict[str, int] = {}

    def read_block(count: int, width: int):
        out = []
        for _ in range(count):
            vals = tuple(int(x) for x in next(it).split())
            if len(vals) != width:
                raise ValueError(f"expected {width} integers per row")
            out.append(vals)
        return tuple(out)

    if kind[1] == "complex":
        name = kind[2] if len(kind) > 2 else "complex"
        nv = int(next(it).split()[1])
        edges = read_block(int(next(it).split()[1]), 2)
        faces = read_block(int(next(it).split()[1]), 3)
        return Complex2(nv, edges, faces, name)
    for _ in range(4 if kind[1] == "incidence" else 2):
        key, val = next(it).split()
        meta[key] = int(val)
        if key == "edges":
            break
    edges = read_block(meta["edges"], 2)
    if kind[1] == "incidence":
        return IncidenceGraph(meta["vertices"], edges, n_points=meta["points"], n_lines=meta["lines"])
    return Graph(meta["vertices"], edges)


def build_torus(n: int) -> Complex2:
    """n x n flat torus, each unit square cut by its (i,j)-(i+1,j+1) diagonal."""
    if n < 3:
        raise ValueError("torus side must be >= 3")

    def vid(i, j):
        return (i % n) * n + (j % n)

    edges, faces = [], []
    for i in range(n):
        for j in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            edges += [(min(a, b), max(a, b)), (min(a, c), max(a, c)), (min(a, d), max(a, d))]
            faces += [(a, b, d), (a, c, d)]
    return Complex2(n * n, tuple(edges), tuple(faces), f"torus:{n}")


def thicken(base: Complex2, t: int) -> Complex2:
    """Replace each face by t+1 parallel cells on the same boundary."""
    if t < 1:
        raise ValueError("multiplicity t must be >= 1")
    faces = tuple(f for f in base.faces for _ in range(t + 1))
    return Complex2(base.n_vertices, base.edges, faces, f"thick({base.name},{t})")


def thick_torus(n: int, t: int) -> Complex2:
    c = thicken(build_torus(n), t)
    return Complex2(c.n_vertices, c.edges, c.faces, f"thick:{n},{t}")


def cone(graph: Graph, name: str = "cone") -> Complex2:
    """Cone over a graph: apex 0, graph vertex u becomes u+1.

    The link of the apex is ``graph`` itself, with face i sitting over
    ``graph.edges[i]``; other links are stars.
    """
    edges = [(0, u + 1) for u in range(graph.n)]
    edges += [(min(u, v) + 1, max(u, v) + 1) for u, v in graph.edges]
    faces = tuple((0, u + 1, v + 1) for u, v in graph.edges)
    return Complex2(graph.n + 1, tuple(dict.fromkeys(edges)), faces, name)


def face_distance(complex_: Complex2, f1: int, f2: int) -> int:
    """Graph distance between faces, adjacency = sharing a vertex."""
    for f in (f1, f2):
        if not 0 <= f < complex_.n_faces:
            raise ValueError(f"unknown face {f}")
    if "face_distances" in complex_.__dict__:
        return int(complex_.face_distances[f1, f2])
    return int(complex_.face_bfs(f1)[f2])
