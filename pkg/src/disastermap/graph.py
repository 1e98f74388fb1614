"""Spatial road-network graphs.

Nodes are planar points, edges carry polyline geometry; coordinates are
``(x, y)`` in the frame named by ``RoadGraph.frame`` ("pixel" or "meter").
Provides edge slicing into bounded-length sub-segments, correspondence
matching between two sliced graphs, removal of matched sub-segments from a
reference graph, and shortest-path queries.
"""

import heapq
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

_EPS = 1e-9


def arc_length(points):
    """Total polyline length of an (N, 2) coordinate array."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 2:
        return 0.0
    return float(np.hypot(*(np.diff(pts, axis=0).T)).sum())


@dataclass(eq=False)
class Edge:
    node_a: int
    node_b: int
    geometry: np.ndarray  # (N, 2) float64; ends coincide with node coordinates
    length: float

    def __eq__(self, other):
        if not isinstance(other, Edge):
            return NotImplemented
        return (
            self.node_a == other.node_a
            and self.node_b == other.node_b
            and self.length == other.length
            and np.array_equal(self.geometry, other.geometry)
        )


@dataclass(eq=False)
class RoadGraph:
    frame: str = "pixel"
    nodes: dict = field(default_factory=dict)  # id -> (x, y)
    edges: dict = field(default_factory=dict)  # id -> Edge

    def __eq__(self, other):
        if not isinstance(other, RoadGraph):
            return NotImplemented
        return (
            self.frame == other.frame
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def add_node(self, x, y, node_id=None):
        if node_id is None:
            node_id = max(self.nodes, default=-1) + 1
        elif node_id in self.nodes:
            raise ValueError(f"node id {node_id} already present")
        self.nodes[node_id] = (float(x), float(y))
        return node_id

    def add_edge(self, node_a, node_b, geometry=None, edge_id=None):
        if node_a not in self.nodes or node_b not in self.nodes:
            raise ValueError("edge endpoints must be existing nodes")
        if geometry is None:
            geometry = [self.nodes[node_a], self.nodes[node_b]]
        geom = np.asarray(geometry, dtype=np.float64)
        if geom.ndim != 2 or geom.shape[0] < 2 or geom.shape[1] != 2:
            raise ValueError("edge geometry must be an (N>=2, 2) polyline")
        length = arc_length(geom)
        if length <= 0.0:
            raise ValueError("edge length must be > 0")
        if edge_id is None:
            edge_id = max(self.edges, default=-1) + 1
        elif edge_id in self.edges:
            raise ValueError(f"edge id {edge_id} already present")
        self.edges[edge_id] = Edge(node_a, node_b, geom, length)
        return edge_id

    def copy(self):
        g = RoadGraph(frame=self.frame)
        g.nodes = dict(self.nodes)
        g.edges = {
            k: Edge(e.node_a, e.node_b, e.geometry.copy(), e.length)
            for k, e in self.edges.items()
        }
        return g

    def total_length(self):
        return sum(e.length for e in self.edges.values())

    def adjacency(self):
        """node id -> list of (neighbour id, edge length)."""
        adj = {nid: [] for nid in self.nodes}
        for e in self.edges.values():
            adj[e.node_a].append((e.node_b, e.length))
            adj[e.node_b].append((e.node_a, e.length))
        return adj

    def validate(self):
        """Check structural invariants; raises ValueError on violation."""
        for eid, e in self.edges.items():
            if e.node_a not in self.nodes or e.node_b not in self.nodes:
                raise ValueError(f"edge {eid} references missing node")
            if e.length <= 0:
                raise ValueError(f"edge {eid} has non-positive length")
            if abs(e.length - arc_length(e.geometry)) > 1e-6 * max(1.0, e.length):
                raise ValueError(f"edge {eid} length does not match geometry")
            for nid, end in ((e.node_a, e.geometry[0]), (e.node_b, e.geometry[-1])):
                nx, ny = self.nodes[nid]
                if math.hypot(end[0] - nx, end[1] - ny) > 1e-6:
                    raise ValueError(f"edge {eid} geometry does not end at node {nid}")


@dataclass
class SubSegment:
    parent_edge: int
    v1: tuple
    v2: tuple
    length: float
    geometry: np.ndarray


@dataclass
class SlicedGraph:
    slice_length: float
    frame: str
    sub_segments: list


@dataclass
class Correspondence:
    pairs: list  # (index into a, index into b), sorted
    unmatched_a: list
    unmatched_b: list

    def matched_a(self):
        return {ia for ia, _ in self.pairs}

    def matched_b(self):
        return {ib for _, ib in self.pairs}


def _slice_cut_positions(length, l, closed):
    n = max(1, math.ceil(length / l - 1e-12))
    if closed and n == 1:
        n = 2
    cuts = [i * l for i in range(n)]
    cuts.append(length)
    return cuts


def _slice_polyline(pts, cuts):
    """Cut a polyline at ascending arc positions; returns piece arrays."""
    seg = np.diff(pts, axis=0)
    cum = np.concatenate(([0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))))
    cut_x = np.interp(cuts, cum, pts[:, 0])
    cut_y = np.interp(cuts, cum, pts[:, 1])
    pieces = []
    for i in range(len(cuts) - 1):
        a, b = cuts[i], cuts[i + 1]
        inner = np.flatnonzero((cum > a + _EPS) & (cum < b - _EPS))
        piece = np.empty((len(inner) + 2, 2), dtype=np.float64)
        piece[0] = (cut_x[i], cut_y[i])
        piece[1:-1] = pts[inner]
        piece[-1] = (cut_x[i + 1], cut_y[i + 1])
        pieces.append(piece)
    return pieces


def slice_edges(g, l):
    """Slice every edge into sub-segments of length <= l along the polyline.

    An edge of arc length L yields ceil(L / l) pieces; all but the last have
    length exactly l. Piece lengths telescope so that their sum equals the
    edge length exactly. Sub-segments are emitted per edge, in order, with
    edges visited by ascending id.
    """
    if l <= 0:
        raise ValueError("slice length must be > 0")
    subs = []
    for eid in sorted(g.edges):
        e = g.edges[eid]
        closed = bool(np.array_equal(e.geometry[0], e.geometry[-1]))
        cuts = _slice_cut_positions(e.length, l, closed)
        pieces = _slice_polyline(e.geometry, cuts)
        for i, piece in enumerate(pieces):
            subs.append(
                SubSegment(
                    parent_edge=eid,
                    v1=(float(piece[0, 0]), float(piece[0, 1])),
                    v2=(float(piece[-1, 0]), float(piece[-1, 1])),
                    length=cuts[i + 1] - cuts[i],
                    geometry=piece,
                )
            )
    return SlicedGraph(slice_length=float(l), frame=g.frame, sub_segments=subs)


def _grid_key(pt, cell):
    return (math.floor(pt[0] / cell), math.floor(pt[1] / cell))


def match_subsegments(a, b, radius=None):
    """One-to-one correspondence between the sub-segments of two sliced graphs.

    A pair is admissible when, for the better of the two vertex pairings,
    both vertex distances are below ``radius`` (default: half the slice
    length). Admissible pairs are assigned greedily by ascending maximum
    vertex distance, ties broken by lower indices, so each sub-segment is
    matched at most once and the result is deterministic.
    """
    if a.slice_length != b.slice_length:
        raise ValueError(
            f"slice lengths differ: {a.slice_length} vs {b.slice_length}"
        )
    if a.frame != b.frame:
        raise ValueError(f"coordinate frames differ: {a.frame} vs {b.frame}")
    if radius is None:
        radius = a.slice_length / 2.0
    if radius <= 0:
        raise ValueError("match radius must be > 0")

    grid = {}
    for ib, sb in enumerate(b.sub_segments):
        for pt in (sb.v1, sb.v2):
            grid.setdefault(_grid_key(pt, radius), set()).add(ib)

    candidates = []
    for ia, sa in enumerate(a.sub_segments):
        kx, ky = _grid_key(sa.v1, radius)
        seen = set()
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                seen |= grid.get((kx + dx, ky + dy), set())
        a1, a2 = sa.v1, sa.v2
        for ib in sorted(seen):
            sb = b.sub_segments[ib]
            b1, b2 = sb.v1, sb.v2
            direct = max(math.dist(a1, b1), math.dist(a2, b2))
            swapped = max(math.dist(a1, b2), math.dist(a2, b1))
            score = min(direct, swapped)
            if score < radius:
                candidates.append((score, ia, ib))

    candidates.sort()
    used_a, used_b = set(), set()
    pairs = []
    for score, ia, ib in candidates:
        if ia in used_a or ib in used_b:
            continue
        used_a.add(ia)
        used_b.add(ib)
        pairs.append((ia, ib))
    pairs.sort()
    unmatched_a = [i for i in range(len(a.sub_segments)) if i not in used_a]
    unmatched_b = [i for i in range(len(b.sub_segments)) if i not in used_b]
    return Correspondence(pairs=pairs, unmatched_a=unmatched_a, unmatched_b=unmatched_b)


def remove_subsegments(g, l, indices):
    """Rebuild ``g`` with the given sub-segments of ``slice_edges(g, l)`` removed.

    Removal splits parent edges at sub-segment boundaries; new boundary nodes
    receive fresh ids, whole surviving edges keep their id, and nodes left
    without any edge are dropped.
    """
    sliced = slice_edges(g, l)
    removed = set(indices)
    if removed and (min(removed) < 0 or max(removed) >= len(sliced.sub_segments)):
        raise ValueError("sub-segment index out of range")

    per_edge = {}
    for idx, sub in enumerate(sliced.sub_segments):
        per_edge.setdefault(sub.parent_edge, []).append(idx)

    out = RoadGraph(frame=g.frame)
    next_node = max(g.nodes, default=-1) + 1
    next_edge = max(g.edges, default=-1) + 1

    def ensure_node(node_id):
        if node_id not in out.nodes:
            out.nodes[node_id] = g.nodes[node_id]

    for eid in sorted(g.edges):
        e = g.edges[eid]
        idxs = per_edge[eid]
        if not any(i in removed for i in idxs):
            ensure_node(e.node_a)
            ensure_node(e.node_b)
            out.edges[eid] = Edge(e.node_a, e.node_b, e.geometry.copy(), e.length)
            continue
        # maximal runs of kept pieces
        run = []
        runs = []
        for i in idxs:
            if i in removed:
                if run:
                    runs.append(run)
                run = []
            else:
                run.append(i)
        if run:
            runs.append(run)
        for run in runs:
            pieces = [sliced.sub_segments[i] for i in run]
            geom_parts = [pieces[0].geometry]
            for piece in pieces[1:]:
                geom_parts.append(piece.geometry[1:])
            geom = np.vstack(geom_parts)
            length = sum(p.length for p in pieces)
            if run[0] == idxs[0]:
                start_node = e.node_a
                ensure_node(start_node)
            else:
                start_node = next_node
                out.nodes[start_node] = pieces[0].v1
                next_node += 1
            if run[-1] == idxs[-1]:
                end_node = e.node_b
                ensure_node(end_node)
            else:
                end_node = next_node
                out.nodes[end_node] = pieces[-1].v2
                next_node += 1
            out.edges[next_edge] = Edge(start_node, end_node, geom, length)
            next_edge += 1
    return out


def register_diff(osm, change, l, radius=None):
    """Remove from ``osm`` every sub-segment matched by the change graph.

    Slices both graphs at ``l``, finds the correspondence, and removes the
    matched reference sub-segments; an empty change graph returns the input
    unchanged (as a copy).
    """
    if osm.frame != change.frame:
        raise ValueError(f"coordinate frames differ: {osm.frame} vs {change.frame}")
    corr = match_subsegments(slice_edges(osm, l), slice_edges(change, l), radius)
    matched = corr.matched_a()
    if not matched:
        return osm.copy()
    return remove_subsegments(osm, l, matched)


def single_source_distances(g, src):
    """Dijkstra distances from ``src`` to every reachable node."""
    if src not in g.nodes:
        raise ValueError(f"unknown node id {src}")
    adj = g.adjacency()
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_path_length(g, src, dst):
    """Minimal path length between two nodes; ``math.inf`` when unreachable."""
    if src not in g.nodes or dst not in g.nodes:
        raise ValueError("unknown node id")
    if src == dst:
        return 0.0
    adj = g.adjacency()
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == dst:
            return d
        if d > dist.get(u, math.inf):
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return math.inf


def graph_to_geojson(g):
    """Serialize as a FeatureCollection of LineStrings (one per edge)."""
    features = []
    for eid in sorted(g.edges):
        e = g.edges[eid]
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[float(x), float(y)] for x, y in e.geometry],
                },
                "properties": {
                    "edge_id": eid,
                    "node_a": e.node_a,
                    "node_b": e.node_b,
                    "length": e.length,
                },
            }
        )
    doc = {"type": "FeatureCollection", "frame": g.frame, "features": features}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def graph_from_geojson(text):
    """Parse a graph serialized by :func:`graph_to_geojson`."""
    doc = json.loads(text)
    if doc.get("type") != "FeatureCollection":
        raise ValueError("graph GeoJSON must be a FeatureCollection")
    g = RoadGraph(frame=doc.get("frame", "pixel"))
    for feat in doc.get("features", []):
        geom = feat.get("geometry") or {}
        if geom.get("type") != "LineString":
            raise ValueError("graph features must be LineStrings")
        props = feat.get("properties") or {}
        pts = np.asarray(geom["coordinates"], dtype=np.float64)
        for nid, coord in ((props["node_a"], pts[0]), (props["node_b"], pts[-1])):
            existing = g.nodes.get(nid)
            pt = (float(coord[0]), float(coord[1]))
            if existing is None:
                g.nodes[nid] = pt
            elif math.dist(existing, pt) > 1e-9:
                raise ValueError(f"node {nid} has conflicting coordinates")
        g.add_edge(props["node_a"], props["node_b"], pts, edge_id=props["edge_id"])
    return g


def graph_from_polylines(polylines, frame="pixel", precision=6):
    """Build a graph from bare polylines, merging коincident endpoints.

    Endpoints are considered the same node when equal after rounding to
    ``precision`` decimals. Zero-length polylines are skipped with a warning.
    """
    g = RoadGraph(frame=frame)
    key_to_id = {}

    def node_for(pt):
        key = (round(float(pt[0]), precision), round(float(pt[1]), precision))
        nid = key_to_id.get(key)
        if nid is None:
            nid = g.add_node(pt[0], pt[1])
            key_to_id[key] = nid
        return nid

    skipped = 0
    for line in polylines:
        pts = np.asarray(line, dtype=np.float64)
        if len(pts) < 2 or arc_length(pts) <= 0.0:
            skipped += 1
            continue
        g.add_edge(node_for(pts[0]), node_for(pts[-1]), pts)
    if skipped:
        logger.warning("skipped %d degenerate polylines", skipped)
    return g
