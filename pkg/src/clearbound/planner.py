"""Graph search over sampled roadmaps using the clearance-cost heuristics.

Three search modes share one A*-style loop:

* ``uninformed``: Dijkstra with exact edge costs (the optimal reference).
* ``informed``: A* with exact edge costs and the two-endpoint bound as
  cost-to-go.
* ``informed_lazy``: A* whose queue is ordered by a cheap path-cost bound on
  each edge; the exact edge integral is only computed when that edge is
  popped.

The cost-to-go bound is admissible but not known to be consistent, so
vertices are re-expanded whenever a cheaper cost-to-come is found.
"""

from __future__ import annotations

import enum
import heapq
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .cost_oracle import PolylinePath, QuadratureConfig, reciprocal_cost, segment_costs
from .errors import InputError
from .geometry import ArrayLike, World, as_state
from .heuristics import BoundKind, CostBound, bound_endpoint_chain, bound_two_endpoint

START, GOAL = 0, 1


class SearchMode(str, enum.Enum):
    UNINFORMED = "uninformed"
    INFORMED = "informed"
    INFORMED_LAZY = "informed_lazy"


@dataclass(frozen=True)
class GraphParams:
    n_vertices: int
    radius: float
    seed: int = 0

    def __post_init__(self):
        if int(self.n_vertices) != self.n_vertices or self.n_vertices < 0:
            raise InputError(f"n_vertices must be a non-negative integer, got {self.n_vertices}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InputError(f"radius must be positive, got {self.radius}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InputError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(eq=False)
class GeometricGraph:
    """An undirected r-disc graph whose vertex 0 is the start and 1 the goal."""

    vertices: np.ndarray
    clearances: np.ndarray
    adjacency: list[list[tuple[int, float]]]
    params: GraphParams

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        """Yield ``(i, j, length)`` once per edge with ``i < j``."""
        for i, nbrs in enumerate(self.adjacency):
            for j, length in nbrs:
                if i < j:
                    yield i, j, length

    def to_dict(self) -> dict:
        return {
            "params": asdict(self.params),
            "vertices": self.vertices.tolist(),
            "clearances": self.clearances.tolist(),
            "edges": [[i, j, length] for i, j, length in self.edges()],
        }


def halton_points(n: int, bounds_lo: np.ndarray, bounds_hi: np.ndarray, offset: int) -> np.ndarray:
    """``n`` unscrambled Halton points in the box, skipping the first ``offset``."""
    dim = bounds_lo.size
    if n == 0:
        return np.empty((0, dim))
    sampler = qmc.Halton(d=dim, scramble=False)
    if offset:
        sampler.fast_forward(offset)
    return qmc.scale(sampler.random(n), bounds_lo, bounds_hi)


def build_graph(world: World, start: ArrayLike, goal: ArrayLike,
                params: GraphParams) -> GeometricGraph:
    """Sample a Halton roadmap in the world bounds and connect it with radius ``params.radius``.

    Invalid samples are dropped. Coincident vertices are never connected, so
    every edge has positive length.
    """
    start = as_state(start, world.dimension)
    goal = as_state(goal, world.dimension)
    d_start, d_goal = world.clearance_many(np.stack([start, goal]))
    if d_start <= 0.0:
        raise InputError(f"start {start.tolist()} is not a valid state")
    if d_goal <= 0.0:
        raise InputError(f"goal {goal.tolist()} is not a valid state")
    if params.n_vertices and world.bounds is None:
        raise InputError("sampling vertices requires world bounds")

    samples = np.empty((0, world.dimension))
    if params.n_vertices:
        samples = halton_points(params.n_vertices, world.bounds.min_corner,
                                world.bounds.max_corner, params.seed)
        samples = samples[world.clearance_many(samples) > 0.0]
    vertices = np.vstack([start, goal, samples])
    clearances = world.clearance_many(vertices)

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(len(vertices))]
    pairs = cKDTree(vertices).query_pairs(params.radius, output_type="ndarray")
    if len(pairs):
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        lengths = np.linalg.norm(vertices[pairs[:, 1]] - vertices[pairs[:, 0]], axis=1)
        for (i, j), length in zip(pairs.tolist(), lengths.tolist()):
            if length > 0.0:
                adjacency[i].append((j, length))
                adjacency[j].append((i, length))
    for nbrs in adjacency:
        nbrs.sort()
    vertices.setflags(write=False)
    clearances.setflags(write=False)
    return GeometricGraph(vertices, clearances, adjacency, params)


def edge_cost_exact(world: World, a: ArrayLike, b: ArrayLike,
                    cfg: QuadratureConfig | None = None) -> float:
    """Exact reciprocal-clearance cost of the straight edge ``a -> b``."""
    return reciprocal_cost(PolylinePath([a, b]), world, cfg)


def edge_cost_heuristic(world: World, a: ArrayLike, b: ArrayLike, d_a: float, d_b: float,
                        k_interior: int = 0) -> CostBound:
    """Lower bound on the edge cost from its endpoint clearances plus ``k_interior`` probes.

    Probes are evenly spaced along the edge. A probe with zero clearance means
    the edge is blocked and the bound is ``inf``.
    """
    if int(k_interior) != k_interior or k_interior < 0:
        raise InputError(f"k_interior must be a non-negative integer, got {k_interior}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    length = float(np.linalg.norm(b - a))
    if k_interior == 0:
        return bound_two_endpoint(d_a, d_b, length)
    frac = np.arange(1, k_interior + 1) / (k_interior + 1)
    probes = world.clearance_many(a + frac[:, None] * (b - a))
    if np.any(probes <= 0.0):
        return CostBound(math.inf, BoundKind.ENDPOINT_CHAIN)
    ts = np.concatenate(([0.0], frac * length, [length]))
    ds = np.concatenate(([d_a], probes, [d_b]))
    return bound_endpoint_chain(list(zip(ts.tolist(), ds.tolist())), length)


def cost_to_go(graph: GeometricGraph, v: int, goal: int = GOAL) -> CostBound:
    """Two-endpoint bound from vertex ``v`` to ``goal`` with Euclidean ``lhat``."""
    lhat = float(np.linalg.norm(graph.vertices[goal] - graph.vertices[v]))
    return bound_two_endpoint(graph.clearances[v], graph.clearances[goal], lhat)


@dataclass
class SearchStats:
    expansions: int = 0
    exact_edge_evals: int = 0
    heuristic_evals: int = 0
    wall_time: float = 0.0


@dataclass
class SearchResult:
    """Outcome of one search.

    ``vertex_path`` lists graph vertex indices from start to goal; ``path`` is
    the matching polyline, or ``None`` when no path exists or start and goal
    coincide.
    """

    mode: SearchMode
    cost: float
    vertex_path: list[int] = field(default_factory=list)
    path: PolylinePath | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    edge_log: list[tuple[int, int, float]] | None = None

    @property
    def found(self) -> bool:
        return math.isfinite(self.cost)


class _EdgeCosts:
    """Per-search caches for exact and heuristic edge costs, keyed by ``(min, max)``."""

    def __init__(self, graph, world, cfg, k_interior, stats):
        self.graph, self.world, self.cfg, self.k = graph, world, cfg, k_interior
        self.stats = stats
        self._exact: dict[tuple[int, int], float] = {}
        self._lower: dict[tuple[int, int], float] = {}

    def exact(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        c = self._exact.get(key)
        if c is None:
            self.stats.exact_edge_evals += 1
            c = edge_cost_exact(self.world, self.graph.vertices[key[0]],
                                self.graph.vertices[key[1]], self.cfg)
            self._exact[key] = c
        return c

    def exact_many(self, u: int, vs: list[int]) -> list[float]:
        """Exact costs of the edges ``u -> v``, evaluating uncached ones in one batch."""
        keys = [(u, v) if u < v else (v, u) for v in vs]
        todo = sorted({k for k in keys if k not in self._exact})
        if todo:
            self.stats.exact_edge_evals += len(todo)
            verts = self.graph.vertices
            idx = np.array(todo)
            costs = segment_costs(self.world, verts[idx[:, 0]], verts[idx[:, 1]], self.cfg)
            self._exact.update(zip(todo, costs.tolist()))
        return [self._exact[k] for k in keys]

    def log(self) -> list[tuple[int, int, float]]:
        return [(i, j, c) for (i, j), c in sorted(self._exact.items())]

    def lower(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        if key in self._exact:
            return self._exact[key]
        c = self._lower.get(key)
        if c is None:
            self.stats.heuristic_evals += 1
            i, j = key
            g = self.graph
            c = edge_cost_heuristic(self.world, g.vertices[i], g.vertices[j],
                                    g.clearances[i], g.clearances[j], self.k).value
            self._lower[key] = c
        return c


def search(graph: GeometricGraph, world: World, mode: SearchMode | str = SearchMode.INFORMED,
           cfg: QuadratureConfig | None = None, k_interior: int = 2,
           start: int = START, goal: int = GOAL, log_edges: bool = False) -> SearchResult:
    """Find the minimum reciprocal-clearance path from ``start`` to ``goal``.

    Queue entries are ordered by ``(f, g, vertex)`` so ties prefer lower
    cost-to-come and then lower vertex index. ``k_interior`` only affects
    ``informed_lazy``. With ``log_edges`` the result lists every exactly
    evaluated edge as ``(i, j, cost)`` with ``i < j``.
    """
    mode = SearchMode(mode)
    cfg = cfg or QuadratureConfig()
    stats = SearchStats()
    t0 = time.perf_counter()
    n = len(graph.vertices)
    for name, idx in (("start", start), ("goal", goal)):
        if not 0 <= idx < n:
            raise InputError(f"{name} index {idx} out of range for {n} vertices")

    if start == goal or np.array_equal(graph.vertices[start], graph.vertices[goal]):
        stats.wall_time = time.perf_counter() - t0
        verts = [start] if start == goal else [start, goal]
        return SearchResult(mode, 0.0, verts, None, stats, [] if log_edges else None)

    edges = _EdgeCosts(graph, world, cfg, k_interior, stats)
    h_cache: dict[int, float] = {}

    def h(v: int) -> float:
        if mode is SearchMode.UNINFORMED:
            return 0.0
        if v not in h_cache:
            stats.heuristic_evals += 1
            h_cache[v] = cost_to_go(graph, v, goal).value
        return h_cache[v]

    g = {start: 0.0}
    parent = {start: -1}
    lazy = mode is SearchMode.INFORMED_LAZY
    # (f, g, vertex, tail, exact, g_tail). Lazy entries carry a lower bound
    # on g and remember the tail's cost-to-come at push time.
    queue = [(h(start), 0.0, start, -1, True, 0.0)]
    found = False
    while queue:
        _, gv, v, tail, exact, g_tail = heapq.heappop(queue)
        if not exact:
            if g[tail] < g_tail:
                continue
            g_new = g_tail + edges.exact(tail, v)
            if g_new < g.get(v, math.inf):
                g[v] = g_new
                parent[v] = tail
                heapq.heappush(queue, (g_new + h(v), g_new, v, tail, True, g_tail))
            continue
        if gv > g[v]:
            continue
        if v == goal:
            found = True
            break
        stats.expansions += 1
        nbrs = [w for w, _ in graph.adjacency[v] if w != parent[v]]
        if lazy:
            for w in nbrs:
                lb = gv + edges.lower(v, w)
                if lb < g.get(w, math.inf):
                    heapq.heappush(queue, (lb + h(w), lb, w, v, False, gv))
            continue
        for w, c in zip(nbrs, edges.exact_many(v, nbrs)):
            g_new = gv + c
            if g_new < g.get(w, math.inf):
                g[w] = g_new
                parent[w] = v
                heapq.heappush(queue, (g_new + h(w), g_new, w, v, True, gv))

    stats.wall_time = time.perf_counter() - t0
    log = edges.log() if log_edges else None
    if not found:
        return SearchResult(mode, math.inf, [], None, stats, log)
    verts = [goal]
    while verts[-1] != start:
        verts.append(parent[verts[-1]])
    verts.reverse()
    return SearchResult(mode, g[goal], verts, PolylinePath(graph.vertices[verts]), stats, log)
