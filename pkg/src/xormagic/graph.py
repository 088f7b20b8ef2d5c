"""Simple undirected graphs stored as per-vertex adjacency bitsets."""

from __future__ import annotations

import json
from collections import deque
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs, vertex maps or out-of-range vertices."""


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Immutable simple graph on vertices ``0..order-1``.

    ``adj[v]`` is an int whose bit ``u`` is set iff ``u`` and ``v`` are
    adjacent. Equality is exact adjacency equality, not isomorphism.
    """

    __slots__ = ("_order", "_adj")

    def __init__(self, order: int, adj: Sequence[int]):
        if order < 1:
            raise GraphError(f"order must be >= 1, got {order}")
        if len(adj) != order:
            raise GraphError("adjacency length does not match order")
        full = (1 << order) - 1
        adj = tuple(int(a) for a in adj)
        for v, row in enumerate(adj):
            if row & ~full:
                raise GraphError(f"vertex {v} has a neighbour outside 0..{order - 1}")
            if (row >> v) & 1:
                raise GraphError(f"self-loop at vertex {v}")
            for u in _bits(row):
                if not (adj[u] >> v) & 1:
                    raise GraphError(f"adjacency not symmetric at ({v}, {u})")
        self._order = order
        self._adj = adj

    @classmethod
    def from_edges(cls, order: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * order
        for u, v in edges:
            if not (0 <= u < order and 0 <= v < order):
                raise GraphError(f"edge ({u}, {v}) out of range for order {order}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(order, adj)

    @classmethod
    def empty(cls, order: int) -> "Graph":
        return cls(order, [0] * order)

    @classmethod
    def complete(cls, order: int) -> "Graph":
        full = (1 << order) - 1
        return cls(order, [full ^ (1 << v) for v in range(order)])

    @property
    def order(self) -> int:
        return self._order

    @property
    def adj(self) -> tuple[int, ...]:
        return self._adj

    def _check(self, v: int) -> None:
        if not 0 <= v < self._order:
            raise GraphError(f"vertex {v} out of range for order {self._order}")

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return bool((self._adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        self._check(v)
        return self._adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self._adj]

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u in range(self._order) for v in _bits(self._adj[u] >> (u + 1) << (u + 1))]

    @property
    def num_edges(self) -> int:
        return sum(self.degrees()) // 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._order == other._order and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._order, self._adj))

    def __repr__(self) -> str:
        return f"Graph(order={self._order}, edges={self.num_edges})"

    def to_dict(self) -> dict:
        return {"order": self._order, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        """Read the JSON graph format, rejecting loops, duplicates and bad indices."""
        try:
            order = int(data["order"])
            raw = data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph object: {exc}") from None
        seen = set()
        for item in raw:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise GraphError(f"malformed edge {item!r}")
            u, v = int(item[0]), int(item[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls.from_edges(order, sorted(seen))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        return cls.from_dict(json.loads(text))


def neighbors(g: Graph, v: int) -> set[int]:
    g._check(v)
    return set(_bits(g.adj[v]))


def closed_neighbors(g: Graph, v: int) -> set[int]:
    return neighbors(g, v) | {v}


def regularity(g: Graph) -> int | None:
    """Common degree if ``g`` is regular, else ``None``."""
    degs = set(g.degrees())
    return degs.pop() if len(degs) == 1 else None


def components(g: Graph) -> list[set[int]]:
    seen = 0
    out = []
    for start in range(g.order):
        if (seen >> start) & 1:
            continue
        comp = 1 << start
        frontier = deque([start])
        while frontier:
            v = frontier.popleft()
            new = g.adj[v] & ~comp
            comp |= new
            frontier.extend(_bits(new))
        seen |= comp
        out.append(set(_bits(comp)))
    return out


def is_connected(g: Graph) -> bool:
    full = (1 << g.order) - 1
    reach = 1
    frontier = 1
    while frontier:
        new = 0
        for v in _bits(frontier):
            new |= g.adj[v]
        frontier = new & ~reach
        reach |= new
    return reach == full


def complement(g: Graph) -> Graph:
    full = (1 << g.order) - 1
    return Graph(g.order, [full ^ a ^ (1 << v) for v, a in enumerate(g.adj)])


class VertexMap:
    """A permutation of ``0..order-1``; ``image[v]`` is where ``v`` goes."""

    __slots__ = ("image",)

    def __init__(self, image: Sequence[int]):
        image = tuple(int(i) for i in image)
        if sorted(image) != list(range(len(image))):
            raise GraphError("vertex map image is not a permutation")
        self.image = image

    @property
    def order(self) -> int:
        return len(self.image)

    def __call__(self, v: int) -> int:
        return self.image[v]

    def __repr__(self) -> str:
        return f"VertexMap({list(self.image)})"


def apply_vertex_map(g: Graph, f: VertexMap | Sequence[int]) -> Graph:
    if not isinstance(f, VertexMap):
        f = VertexMap(f)
    if f.order != g.order:
        raise GraphError(f"map order {f.order} != graph order {g.order}")
    return Graph.from_edges(g.order, ((f(u), f(v)) for u, v in g.edges()))


def is_isomorphism_witness(g: Graph, h: Graph, f: VertexMap | Sequence[int]) -> bool:
    if g.order != h.order:
        return False
    return apply_vertex_map(g, f) == h
