"""Exact search for d-regular graphs whose XOR weights vanish under a fixed labeling.

The decision variables are the unordered vertex pairs, the same edge
variables as the first MILP model. A depth-first search assigns them one at
a time and :meth:`SearchState.propagate` applies sound inference after every
decision, so an exhausted tree is a proof that no solution exists.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .graph import Graph, _bits, complement, is_connected
from .labeling import Labeling, canonical_bijection, verify_xor_magic, weights

log = logging.getLogger(__name__)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
BUDGET_EXHAUSTED = "budget_exhausted"


class SearchError(ValueError):
    pass


class SoundnessError(AssertionError):
    """A feasible outcome failed independent verification."""


@dataclass
class SearchProblem:
    n: int
    d: int
    mode: str = "open"
    require_connected: bool = True
    labeling: Labeling | None = None
    budget_secs: float | None = None
    node_limit: int | None = None
    seed: int = 0
    symmetry_breaking: bool = True
    connectivity_pruning: bool = True
    restart_nodes: int | None = 1000
    restart_growth: float = 1.5
    complement_dense: bool = True
    linear_propagation: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise SearchError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.d <= (1 << self.n) - 1:
            raise SearchError(f"d={self.d} out of range for order {1 << self.n}")
        if self.mode not in ("open", "closed"):
            raise SearchError(f"mode must be 'open' or 'closed', got {self.mode!r}")
        if self.labeling is None:
            self.labeling = canonical_bijection(self.n)
        if self.labeling.n != self.n or not self.labeling.is_bijective():
            raise SearchError("labeling must be a bijection onto (Z_2)^n")

    @property
    def order(self) -> int:
        return 1 << self.n


@dataclass
class SearchStats:
    nodes: int = 0
    time: float = 0.0
    restarts: int = 0
    disconnected_rejected: int = 0


@dataclass
class SearchOutcome:
    status: str
    graph: Graph | None = None
    connected: bool | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


class _Stop(Exception):
    pass


class _Gf2System:
    """Weight and degree-parity equations over GF(2) in reduced echelon form.

    Each row is an int mask over the edge-variable indices plus a right-hand
    side bit. The pivot of a row is its highest bit and appears in no other
    row; fixing a variable keeps that invariant by re-pivoting only the row
    that lost its pivot.
    """

    __slots__ = ("masks", "rhs", "ok")

    def __init__(self, masks: list[int], rhs: list[int]):
        self.masks = []
        self.rhs = []
        self.ok = True
        for m, b in zip(masks, rhs):
            self.ok &= self._insert(m, b)

    def _insert(self, m: int, b: int) -> bool:
        for i, row in enumerate(self.masks):
            if (m >> (row.bit_length() - 1)) & 1:
                m ^= row
                b ^= self.rhs[i]
        if not m:
            return not b
        top = 1 << (m.bit_length() - 1)
        for i, row in enumerate(self.masks):
            if row & top:
                self.masks[i] = row ^ m
                self.rhs[i] ^= b
        self.masks.append(m)
        self.rhs.append(b)
        return True

    def copy(self) -> tuple[list[int], list[int]]:
        return self.masks[:], self.rhs[:]

    def restore(self, snap: tuple[list[int], list[int]]) -> None:
        self.masks = snap[0][:]
        self.rhs = snap[1][:]

    def fix(self, x: int, val: int) -> bool:
        """Substitute variable ``x``; ``False`` on a contradiction."""
        bit = 1 << x
        masks, rhs = self.masks, self.rhs
        lost = None
        for i, row in enumerate(masks):
            if row & bit:
                masks[i] = row ^ bit
                rhs[i] ^= val
                if row.bit_length() - 1 == x:
                    lost = i
        if lost is None:
            return True
        m, b = masks[lost], rhs[lost]
        if not m:
            if b:
                return False
            masks.pop(lost)
            rhs.pop(lost)
            return True
        top = 1 << (m.bit_length() - 1)
        for i, row in enumerate(masks):
            if i != lost and row & top:
                masks[i] = row ^ m
                rhs[i] ^= b
        return True

    def forced(self) -> list[tuple[int, int]]:
        return [(row.bit_length() - 1, b) for row, b in zip(self.masks, self.rhs) if not row & (row - 1)]


class SearchState:
    """Partial assignment of the edge variables with incremental bookkeeping.

    Per vertex ``v``: ``yes[v]`` and ``undec[v]`` are bitsets of decided
    neighbours and undecided partners, ``acc[v]`` is the XOR of the labels in
    ``yes[v]``. Every change is logged on a trail so it can be undone.
    """

    def __init__(self, problem: SearchProblem):
        p = problem
        self.problem = p
        self.N = p.order
        self.d = p.d
        self.lab = list(p.labeling.values)
        self.vertex_of = p.labeling.vertex_of()
        # weight of v must end up equal to target[v]
        self.target = list(self.lab) if p.mode == "closed" else [0] * self.N
        full = (1 << self.N) - 1
        self.yes = [0] * self.N
        self.undec = [full ^ (1 << v) for v in range(self.N)]
        self.acc = [0] * self.N
        self.trail: list[tuple[int, int, int]] = []
        self.queue: list[int] = []
        self.check_components = p.require_connected and p.connectivity_pruning
        self.linear = self._build_linear() if p.linear_propagation else None
        self.pending: list[tuple[int, int]] = []
        self.snapshots: dict[int, tuple[list[int], list[int]]] = {}

    def pair_index(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return u * (2 * self.N - u - 1) // 2 + (v - u - 1)

    def _build_linear(self) -> _Gf2System:
        N, n = self.N, self.problem.n
        self.pairs = [(u, v) for u in range(N) for v in range(u + 1, N)]
        masks, rhs = [], []
        for v in range(N):
            for i in range(n):
                bit = 1 << (n - 1 - i)
                masks.append(sum(1 << self.pair_index(u, v) for u in range(N) if u != v and self.lab[u] & bit))
                rhs.append(int(bool(self.target[v] & bit)))
            masks.append(sum(1 << self.pair_index(u, v) for u in range(N) if u != v))
            rhs.append(self.d & 1)
        return _Gf2System(masks, rhs)

    def save(self, mark: int) -> None:
        if self.linear is not None:
            self.snapshots[mark] = self.linear.copy()

    # -- assignment -----------------------------------------------------------

    def is_undecided(self, u: int, v: int) -> bool:
        return bool((self.undec[u] >> v) & 1)

    def value(self, u: int, v: int) -> int | None:
        if (self.yes[u] >> v) & 1:
            return 1
        if (self.undec[u] >> v) & 1:
            return None
        return 0

    def assign(self, u: int, v: int, val: int) -> None:
        bu, bv = 1 << u, 1 << v
        if not self.undec[u] & bv:
            raise SearchError(f"pair ({u}, {v}) already decided")
        self.undec[u] ^= bv
        self.undec[v] ^= bu
        if val:
            self.yes[u] |= bv
            self.yes[v] |= bu
            self.acc[u] ^= self.lab[v]
            self.acc[v] ^= self.lab[u]
        self.trail.append((u, v, val))
        self.queue.append(u)
        self.queue.append(v)
        if self.linear is not None:
            self.pending.append((self.pair_index(u, v), val))

    def undo_to(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            u, v, val = trail.pop()
            bu, bv = 1 << u, 1 << v
            self.undec[u] |= bv
            self.undec[v] |= bu
            if val:
                self.yes[u] ^= bv
                self.yes[v] ^= bu
                self.acc[u] ^= self.lab[v]
                self.acc[v] ^= self.lab[u]
        self.queue.clear()
        self.pending.clear()
        if self.linear is not None and mark in self.snapshots:
            self.linear.restore(self.snapshots[mark])

    def is_complete(self) -> bool:
        return not any(self.undec)

    def graph(self) -> Graph:
        return Graph(self.N, self.yes)

    # -- inference --------------------------------------------------------------

    def propagate(self) -> bool:
        """Run sound inference to a fixpoint; ``False`` signals a conflict."""
        while True:
            if not self._propagate_local():
                return False
            if not self.pending:
                return True
            if not self._propagate_linear():
                return self._fail()

    def _propagate_linear(self) -> bool:
        lin = self.linear
        for x, val in self.pending:
            if not lin.fix(x, val):
                return False
        self.pending.clear()
        for x, val in lin.forced():
            u, v = self.pairs[x]
            have = self.value(u, v)
            if have is None:
                self.assign(u, v, val)
            elif have != val:
                return False
        return True

    def _propagate_local(self) -> bool:
        d = self.d
        lab = self.lab
        vertex_of = self.vertex_of
        queue = self.queue
        while queue:
            v = queue.pop()
            U = self.undec[v]
            r = d - self.yes[v].bit_count()
            cu = U.bit_count()
            if r < 0 or cu < r:
                return self._fail()
            need = self.acc[v] ^ self.target[v]
            if r == 0:
                if need:
                    return self._fail()
                for u in _bits(U):
                    self.assign(v, u, 0)
                if self.check_components and not self._component_open(v):
                    return self._fail()
                continue
            if cu == r:
                for u in _bits(U):
                    self.assign(v, u, 1)
                continue
            if r == 1:
                w = vertex_of[need]
                if not (U >> w) & 1:
                    return self._fail()
                for u in _bits(U):
                    self.assign(v, u, int(u == w))
                continue
            if r == 2:
                if not need:
                    return self._fail()
                # a candidate survives only if its partner is also a candidate
                dead = 0
                for u in _bits(U):
                    if not (U >> vertex_of[need ^ lab[u]]) & 1:
                        dead |= 1 << u
                if dead == U:
                    return self._fail()
                for u in _bits(dead):
                    self.assign(v, u, 0)
                continue
            if not _in_span(need, (lab[u] for u in _bits(U))):
                return self._fail()
        return True

    def _fail(self) -> bool:
        self.queue.clear()
        self.pending.clear()
        return False

    def _component_open(self, v: int) -> bool:
        """False when ``v`` sits in a finished component smaller than the graph."""
        comp = 1 << v
        frontier = comp
        while frontier:
            new = 0
            for u in _bits(frontier):
                if self.undec[u]:
                    return True
                new |= self.yes[u]
            frontier = new & ~comp
            comp |= new
        return comp.bit_count() == self.N

    # -- branching ----------------------------------------------------------------

    def choose(self, rng: random.Random | None) -> tuple[int, int] | None:
        """Undecided pair at the vertex of least slack, partner of least label."""
        d = self.d
        best = None
        tied: list[int] = []
        for u in range(self.N):
            U = self.undec[u]
            if not U:
                continue
            slack = U.bit_count() - (d - self.yes[u].bit_count())
            if best is None or slack < best:
                best = slack
                tied = [u]
            elif slack == best:
                tied.append(u)
        if best is None:
            return None
        lab = self.lab
        pairs = []
        low = None
        for u in tied:
            v = min(_bits(self.undec[u]), key=lab.__getitem__)
            key = lab[v]
            if low is None or key < low:
                low = key
                pairs = [(u, v)]
            elif key == low:
                pairs.append((u, v))
        if rng is not None and len(pairs) > 1:
            return pairs[rng.randrange(len(pairs))]
        return pairs[0]


def _in_span(x: int, vectors) -> bool:
    basis: list[int] = []
    for vec in vectors:
        for b in basis:
            vec = min(vec, vec ^ b)
        if vec:
            basis.append(vec)
            basis.sort(reverse=True)
    for b in basis:
        x = min(x, x ^ b)
    return x == 0


def propagate(state: SearchState) -> bool:
    """Module-level alias of :meth:`SearchState.propagate`; queues every vertex first."""
    state.queue.extend(range(state.N))
    if state.linear is not None:
        if not state.linear.ok or not state._propagate_linear():
            return state._fail()
    return state.propagate()


def _apply_symmetry_breaking(state: SearchState) -> bool:
    # Invertible linear maps of (Z_2)^n permute solutions and fix label 0. Any
    # two neighbours of the zero-labelled vertex carry distinct nonzero, hence
    # independent, labels, so some solution has labels 1 and 2 among them.
    p = state.problem
    z = state.vertex_of[0]
    for want in (1, 2)[: min(p.d, p.n)]:
        u = state.vertex_of[want]
        if state.value(z, u) == 0:
            return False
        if state.value(z, u) is None:
            state.assign(z, u, 1)
    return state.propagate()


class _Solver:
    def __init__(self, problem: SearchProblem, deadline: float | None, node_limit: int | None,
                 stats: SearchStats):
        self.p = problem
        self.deadline = deadline
        self.node_limit = node_limit
        self.stats = stats
        self.rng = random.Random(problem.seed)

    def run(self, state: SearchState) -> Graph | None:
        """DFS from ``state``; returns a solution graph or ``None`` when exhausted."""
        stats = self.stats
        stack: list[tuple[int, int, int, int]] = []  # (mark, u, v, next value to try)
        while True:
            pair = state.choose(self.rng)
            if pair is None:
                g = state.graph()
                if not self.p.require_connected or is_connected(g):
                    return g
                stats.disconnected_rejected += 1
            else:
                stats.nodes += 1
                if self.node_limit is not None and stats.nodes > self.node_limit:
                    raise _Stop
                if self.deadline is not None and stats.nodes % 256 == 0 and time.monotonic() > self.deadline:
                    raise _Stop
                u, v = pair
                mark = len(state.trail)
                state.save(mark)
                stack.append((mark, u, v, 0))
                state.assign(u, v, 1)
                if state.propagate():
                    continue
            # backtrack to the most recent open alternative
            while stack:
                mark, u, v, nxt = stack.pop()
                state.undo_to(mark)
                if nxt == 0:
                    stack.append((mark, u, v, -1))
                    state.assign(u, v, 0)
                    if state.propagate():
                        break
            else:
                return None


def _initial_state(problem: SearchProblem) -> SearchState | None:
    state = SearchState(problem)
    if not propagate(state):
        return None
    if problem.symmetry_breaking and problem.d and not _apply_symmetry_breaking(state):
        return None
    return state


def solve(problem: SearchProblem, workers: int = 1) -> SearchOutcome:
    """Decide whether a solution exists; ``infeasible`` only after exhaustive search.

    With ``restart_nodes`` set, each attempt runs under a node cap that grows
    geometrically and reseeds the tie-breaking. An attempt that finishes
    under its cap has still explored its whole tree.
    """
    if problem.complement_dense and problem.n >= 2 and 2 * problem.d > problem.order - 1:
        return _solve_via_complement(problem, workers)
    if workers > 1:
        return _solve_parallel(problem, workers)
    start = time.monotonic()
    stats = SearchStats()
    deadline = start + problem.budget_secs if problem.budget_secs else None
    state = _initial_state(problem)
    if state is None:
        stats.time = time.monotonic() - start
        return SearchOutcome(INFEASIBLE, stats=stats)
    base = len(state.trail)
    state.save(base)
    cap = problem.restart_nodes
    attempt = 0
    while True:
        solver = _Solver(problem, deadline, None, stats)
        if attempt:
            solver.rng = random.Random(problem.seed * 1_000_003 + attempt)
        if cap is not None:
            solver.node_limit = stats.nodes + int(cap)
        if problem.node_limit is not None:
            solver.node_limit = min(solver.node_limit or problem.node_limit, problem.node_limit)
        try:
            g = solver.run(state)
            break
        except _Stop:
            hard = (problem.node_limit is not None and stats.nodes > problem.node_limit) or (
                deadline is not None and time.monotonic() > deadline
            )
            if hard or cap is None:
                stats.time = time.monotonic() - start
                return SearchOutcome(BUDGET_EXHAUSTED, stats=stats)
            state.undo_to(base)
            attempt += 1
            stats.restarts = attempt
            cap *= problem.restart_growth
            log.debug("restart %d with node cap %d", attempt, cap)
    stats.time = time.monotonic() - start
    if g is None:
        return SearchOutcome(INFEASIBLE, stats=stats)
    outcome = SearchOutcome(FEASIBLE, g, is_connected(g), stats)
    if not certify(outcome, problem):
        raise SoundnessError("search returned a graph that fails verification")
    return outcome


def _solve_via_complement(problem: SearchProblem, workers: int) -> SearchOutcome:
    # For n >= 2 the labels sum to zero, so open weights of g are closed
    # weights of its complement and vice versa. Minimum degree at least
    # (N-1)/2 makes g connected, so the complement may be disconnected.
    twin = replace(
        problem,
        d=problem.order - 1 - problem.d,
        mode="closed" if problem.mode == "open" else "open",
        require_connected=False,
        complement_dense=False,
    )
    inner = solve(twin, workers)
    if inner.status != FEASIBLE:
        return SearchOutcome(inner.status, stats=inner.stats)
    g = complement(inner.graph)
    outcome = SearchOutcome(FEASIBLE, g, is_connected(g), inner.stats)
    if not certify(outcome, problem):
        raise SoundnessError("complemented solution fails verification")
    return outcome


def certify(outcome: SearchOutcome, problem: SearchProblem) -> bool:
    """Re-check a feasible outcome through the labeling verifier."""
    if outcome.status != FEASIBLE or outcome.graph is None:
        raise SearchError("only feasible outcomes can be certified")
    g = outcome.graph
    if g.order != problem.order or set(g.degrees()) != {problem.d}:
        return False
    if problem.require_connected or outcome.connected:
        return verify_xor_magic(g, problem.labeling, problem.mode).is_magic
    return not any(weights(g, problem.labeling, problem.mode))


# -- parallel mode ---------------------------------------------------------------


def _split(state: SearchState, depth: int) -> list[list[tuple[int, int, int]]]:
    """Decision prefixes of the first ``depth`` branchings that survive propagation."""
    out = []

    def rec(prefix):
        if len(prefix) == depth:
            out.append(list(prefix))
            return
        pair = state.choose(None)
        if pair is None:
            out.append(list(prefix))
            return
        for val in (1, 0):
            mark = len(state.trail)
            state.save(mark)
            state.assign(*pair, val)
            if state.propagate():
                rec(prefix + [(*pair, val)])
            state.undo_to(mark)

    rec([])
    return out


def _run_subtree(args):
    problem, prefix, deadline = args
    stats = SearchStats()
    state = _initial_state(problem)
    for u, v, val in prefix:
        state.assign(u, v, val)
    if not state.propagate():
        return INFEASIBLE, None, stats
    try:
        g = _Solver(problem, deadline, problem.node_limit, stats).run(state)
    except _Stop:
        return BUDGET_EXHAUSTED, None, stats
    return (INFEASIBLE, None, stats) if g is None else (FEASIBLE, g.adj, stats)


def _solve_parallel(problem: SearchProblem, workers: int) -> SearchOutcome:
    start = time.monotonic()
    deadline = start + problem.budget_secs if problem.budget_secs else None
    stats = SearchStats()
    state = _initial_state(problem)
    if state is None:
        return SearchOutcome(INFEASIBLE, stats=stats)
    depth = max(1, (workers * 4 - 1).bit_length())
    prefixes = _split(state, depth)
    statuses = []
    found = None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_subtree, (problem, pre, deadline)) for pre in prefixes]
        for fut in futures:
            status, adj, sub = fut.result()
            stats.nodes += sub.nodes
            stats.disconnected_rejected += sub.disconnected_rejected
            statuses.append(status)
            if status == FEASIBLE and found is None:
                found = Graph(problem.order, adj)
                for other in futures:
                    other.cancel()
                break
    stats.time = time.monotonic() - start
    if found is not None:
        outcome = SearchOutcome(FEASIBLE, found, is_connected(found), stats)
        if not certify(outcome, problem):
            raise SoundnessError("search returned a graph that fails verification")
        return outcome
    if all(s == INFEASIBLE for s in statuses) and len(statuses) == len(prefixes):
        return SearchOutcome(INFEASIBLE, stats=stats)
    return SearchOutcome(BUDGET_EXHAUSTED, stats=stats)
