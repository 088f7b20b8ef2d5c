"""Named graph families: circulants, hypercubes, and the two graph products."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from functools import reduce

from .graph import Graph, GraphError


def normalize_connection_set(m: int, raw) -> frozenset[int]:
    """Map raw Cayley generators to distances in ``[1, m // 2]``."""
    out = set()
    for s in raw:
        r = int(s) % m
        r = min(r, m - r)
        if r:
            out.add(r)
    return frozenset(out)


@dataclass(frozen=True)
class CirculantSpec:
    m: int
    S: frozenset[int]

    def __init__(self, m: int, S):
        if m < 3:
            raise GraphError(f"circulant order must be >= 3, got {m}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "S", normalize_connection_set(m, S))

    @property
    def valency(self) -> int:
        return 2 * len(self.S) - (1 if self.m % 2 == 0 and self.m // 2 in self.S else 0)

    def is_connected(self) -> bool:
        return reduce(gcd, self.S, self.m) == 1


def circulant(m, S=None) -> Graph:
    """``C_m(S)``; accepts a :class:`CirculantSpec` or ``(m, S)``."""
    spec = m if isinstance(m, CirculantSpec) else CirculantSpec(m, S)
    if not spec.S:
        raise GraphError("circulant connection set is empty after normalization")
    m = spec.m
    dists = set(spec.S) | {m - s for s in spec.S}
    row0 = sum(1 << d for d in dists)
    full = (1 << m) - 1
    # row v is row 0 rotated left by v
    adj = [((row0 << v) | (row0 >> (m - v))) & full for v in range(m)]
    return Graph(m, adj)


def hypercube(n: int) -> Graph:
    """``Q_n``; vertex ``i`` corresponds to the n-bit binary vector of ``i``."""
    if n < 1:
        raise GraphError(f"hypercube dimension must be >= 1, got {n}")
    order = 1 << n
    adj = [sum(1 << (v ^ (1 << b)) for b in range(n)) for v in range(order)]
    return Graph(order, adj)


def power_of_cycle(m: int, r: int) -> Graph:
    if not 1 <= r <= m // 2:
        raise GraphError(f"power r={r} out of range [1, {m // 2}]")
    return circulant(m, range(1, r + 1))


def complement_power_of_cycle(m: int, r: int) -> Graph:
    if not 1 <= r <= m // 2 - 1:
        raise GraphError(f"power r={r} out of range [1, {m // 2 - 1}]")
    return circulant(m, range(r + 1, m // 2 + 1))


def doob_spec(r: int, t: int) -> CirculantSpec:
    if r < 2 or t < 1:
        raise GraphError(f"Doob graph needs r >= 2 and t >= 1, got r={r}, t={t}")
    n = (r - 1) * t + 2
    # k*t ranges over [0, (r-1)t/2]: distances 1 mod t up to n/2
    bound = ((r - 1) * t) // 2
    return CirculantSpec(n, [k * t + 1 for k in range(bound // t + 1)])


def doob(r: int, t: int) -> Graph:
    return circulant(doob_spec(r, t))


def andrasfai(r: int) -> Graph:
    if r < 2:
        raise GraphError(f"Andrasfai graph needs r >= 2, got {r}")
    return doob(r, 3)


def mobius_ladder(n: int) -> Graph:
    if n < 4 or n % 2:
        raise GraphError(f"Mobius ladder needs an even order >= 4, got {n}")
    return circulant(n, {1, n // 2})


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """``g □ h`` with vertex ``(a, b)`` encoded as ``a * h.order + b``."""
    ho = h.order
    adj = []
    for a in range(g.order):
        ga = g.adj[a]
        for b in range(ho):
            # same b in every g-neighbour block, plus h-neighbours in own block
            col = 0
            for a2 in range(g.order):
                if (ga >> a2) & 1:
                    col |= 1 << (a2 * ho + b)
            adj.append(col | (h.adj[b] << (a * ho)))
    return Graph(g.order * ho, adj)


def strong_product(g: Graph, h: Graph) -> Graph:
    """``g ⊠ h`` with the same row-major encoding as :func:`cartesian_product`."""
    ho = h.order
    adj = []
    for a in range(g.order):
        ga = g.adj[a]
        for b in range(ho):
            closed_b = h.adj[b] | (1 << b)
            row = h.adj[b] << (a * ho)
            for a2 in range(g.order):
                if (ga >> a2) & 1:
                    row |= closed_b << (a2 * ho)
            adj.append(row)
    return Graph(g.order * ho, adj)
