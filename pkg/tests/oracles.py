"""Brute-force helpers shared by several test modules."""


def regular_graphs(order, d):
    """Every labeled d-regular graph on ``order`` vertices, by plain backtracking."""
    pairs = [(u, v) for u in range(order) for v in range(u + 1, order)]
    # last pair index touching each vertex, to close its degree early
    last = {}
    for i, (u, v) in enumerate(pairs):
        last[u] = i
        last[v] = i
    deg = [0] * order
    chosen = []

    def rec(i):
        if i == len(pairs):
            yield list(chosen)
            return
        u, v = pairs[i]
        for take in (1, 0):
            if take and (deg[u] == d or deg[v] == d):
                continue
            if take:
                deg[u] += 1
                deg[v] += 1
                chosen.append((u, v))
            ok = all(deg[w] == d for w in (u, v) if last[w] == i)
            if ok:
                yield from rec(i + 1)
            if take:
                deg[u] -= 1
                deg[v] -= 1
                chosen.pop()

    yield from rec(0)


def zero_weights(edges, order, values, closed):
    w = list(values) if closed else [0] * order
    for u, v in edges:
        w[u] ^= values[v]
        w[v] ^= values[u]
    return not any(w)
