"""Self-checking fixture catalog of the small XOR-magic graphs.

The order-16 graphs are stored as (labels, edges): labels are listed by
vertex, edges as ``u-v`` tokens. Every entry is verified when loaded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .graph import Graph, regularity
from .labeling import (
    Labeling,
    Verdict,
    certificate_dict,
    certificate_from_dict,
    complement_transport,
    verify_xor_magic,
)


class CatalogError(KeyError):
    pass


_ORDER16 = {
    "fig4-d5": (
        "0001 0010 1010 0100 0101 0110 1000 1101 0111 1001 1011 1100 0000 0011 1111 1110",
        "0-1 0-3 0-7 0-8 0-11 1-4 1-7 1-9 1-12 2-3 2-4 2-5 2-9 2-15 3-7 3-9 "
        "3-14 4-8 4-12 4-14 5-6 5-8 5-10 5-15 6-10 6-11 6-14 6-15 7-10 7-11 "
        "8-11 8-15 9-13 9-14 10-12 10-13 11-13 12-13 12-14 13-15 ",
    ),
    "fig4-d7": (
        "0110 1100 1001 0000 1101 1000 0101 0010 0011 0111 1011 0100 1110 1010 0001 1111",
        "0-1 0-4 0-7 0-8 0-10 0-11 0-15 1-2 1-4 1-7 1-10 1-11 1-15 2-4 2-5 2-8 "
        "2-10 2-12 2-15 3-5 3-6 3-9 3-10 3-11 3-13 3-15 4-5 4-6 4-11 4-13 5-11 "
        "5-12 5-14 5-15 6-7 6-8 6-9 6-13 6-14 7-8 7-9 7-13 7-14 8-9 8-12 8-14 "
        "9-10 9-12 9-14 10-12 10-13 11-12 11-14 12-13 13-15 14-15 ",
    ),
    "fig4-d9": (
        "0100 0011 1101 1010 0101 1100 1111 0000 1011 1001 0010 0110 0111 0001 1000 1110",
        "0-1 0-2 0-3 0-6 0-7 0-8 0-11 0-12 0-13 1-4 1-8 1-9 1-10 1-11 1-13 1-14 "
        "1-15 2-3 2-4 2-5 2-6 2-11 2-12 2-13 2-14 3-4 3-8 3-9 3-11 3-12 3-13 "
        "3-15 4-5 4-8 4-9 4-10 4-11 4-15 5-6 5-7 5-9 5-11 5-12 5-13 5-15 6-7 "
        "6-10 6-11 6-12 6-14 6-15 7-8 7-9 7-10 7-13 7-14 7-15 8-9 8-12 8-14 "
        "8-15 9-10 9-13 9-14 10-12 10-13 10-14 10-15 11-14 11-15 12-13 12-14 ",
    ),
    "fig4-d11": (
        "1101 0111 0001 1100 1010 0000 0110 1111 0101 0010 0011 1001 1110 1011 0100 1000",
        "0-2 0-4 0-7 0-8 0-9 0-10 0-11 0-12 0-13 0-14 0-15 1-3 1-4 1-5 1-6 1-7 "
        "1-9 1-10 1-11 1-13 1-14 1-15 2-3 2-5 2-6 2-7 2-8 2-9 2-10 2-11 2-12 "
        "2-13 3-4 3-5 3-8 3-9 3-10 3-11 3-12 3-13 3-14 4-6 4-8 4-9 4-10 4-11 "
        "4-12 4-13 4-15 5-6 5-7 5-10 5-11 5-12 5-13 5-14 5-15 6-7 6-8 6-9 6-11 "
        "6-12 6-13 6-15 7-8 7-10 7-11 7-12 7-14 7-15 8-9 8-10 8-12 8-14 8-15 "
        "9-11 9-13 9-14 9-15 10-13 10-14 10-15 11-12 11-15 12-13 12-14 13-14 "
        "14-15 ",
    ),
    "fig5-d4": (
        "1101 0111 0001 1100 1010 0000 0110 1111 0101 0010 0011 1001 1110 1011 0100 1000",
        "0-1 0-3 0-5 0-6 1-2 1-8 1-12 2-4 2-14 2-15 3-6 3-7 3-15 4-5 4-7 4-14 "
        "5-8 5-9 6-10 6-14 7-9 7-13 8-11 8-13 9-10 9-12 10-11 10-12 11-13 11-14 "
        "12-15 13-15 ",
    ),
}

# K_{2,2}: vertices (0,0), (1,0), (1,1), (0,1) as drawn; the 4-cycle 0-2-1-3-0.
_K22 = ("00 10 11 01", "0-2 0-3 1-2 1-3 ")
# K_{4,4}: bottom row 100 101 110 111, top row 000 001 010 011.
_K44 = (
    "100 101 110 111 000 001 010 011",
    "0-4 0-5 0-6 0-7 1-4 1-5 1-6 1-7 2-4 2-5 2-6 2-7 3-4 3-5 3-6 3-7 ",
)

_PROVENANCE = {
    "fig1-k22": "K_{2,2} with constant weight (1,0), not XOR-magic",
    "fig1-k44": "K_{4,4} with an open XOR-magic labeling",
    "fig4-d5": "transcribed fixture: 5-regular open XOR-magic graph of order 16",
    "fig4-d7": "transcribed fixture: 7-regular open XOR-magic graph of order 16",
    "fig4-d9": "transcribed fixture: 9-regular open XOR-magic graph of order 16",
    "fig4-d11": "transcribed fixture: 11-regular open XOR-magic graph of order 16",
    "fig5-d4": "transcribed fixture: 4-regular closed XOR-magic graph of order 16",
}


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    graph: Graph
    labeling: Labeling
    mode: str
    degree: int | None
    provenance: str
    expected: str = Verdict.MAGIC

    def verdict(self) -> Verdict:
        return verify_xor_magic(self.graph, self.labeling, self.mode)

    def certificate(self) -> dict:
        return certificate_dict(self.graph, self.labeling, self.mode)


def _decode(raw: tuple[str, str]) -> tuple[Graph, Labeling]:
    labels, edges = raw
    lab = Labeling.from_strings(labels.split())
    pairs = [tuple(int(x) for x in tok.split("-")) for tok in edges.split()]
    return Graph.from_edges(len(lab), pairs), lab


def _raw_entries():
    yield "fig1-k22", _K22, "open", Verdict.NONZERO_WEIGHT
    yield "fig1-k44", _K44, "open", Verdict.MAGIC
    for key, raw in _ORDER16.items():
        yield key, raw, "closed" if key.startswith("fig5") else "open", Verdict.MAGIC


@lru_cache(maxsize=None)
def _entries() -> dict[str, CatalogEntry]:
    out = {}
    for key, raw, mode, expected in _raw_entries():
        g, lab = _decode(raw)
        entry = CatalogEntry(key, g, lab, mode, regularity(g), _PROVENANCE[key], expected)
        got = entry.verdict()
        if got.status != expected:
            raise AssertionError(f"catalog entry {key}: expected {expected}, got {got}")
        out[key] = entry
    return out


def catalog_list() -> list[CatalogEntry]:
    return list(_entries().values())


def catalog_ids() -> list[str]:
    return list(_entries())


def catalog_load(id: str) -> CatalogEntry:
    try:
        return _entries()[id]
    except KeyError:
        raise CatalogError(f"unknown catalog id {id!r}; known: {', '.join(_entries())}") from None


def catalog_export(id: str, outdir) -> Path:
    """Write ``<id>.json`` in the combined certificate format."""
    entry = catalog_load(id)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{id}.json"
    path.write_text(json.dumps(entry.certificate(), indent=1) + "\n")
    return path


def _load_extra_bases() -> dict:
    out = {}
    folder = resources.files(__package__) / "data"
    if not folder.is_dir():
        return out
    for item in sorted(folder.iterdir(), key=lambda p: p.name):
        if not item.name.startswith("base-") or not item.name.endswith(".json"):
            continue
        g, lab, mode = certificate_from_dict(json.loads(item.read_text()))
        verdict = verify_xor_magic(g, lab, mode)
        if not verdict:
            raise AssertionError(f"base graph {item.name} failed verification: {verdict}")
        parity = "open-odd" if mode == "open" else "closed-even"
        out[(lab.n, parity)] = (g, lab)
    return out


@lru_cache(maxsize=None)
def base_graphs() -> dict[tuple[int, str], tuple[Graph, Labeling]]:
    """Verified base graphs keyed by ``(power, parity)``.

    Power 4 comes from the catalog fixtures. Higher powers come from packaged
    certificates; a closed-even base missing there is derived by complementing
    the open-odd one of the same power.
    """
    d5 = catalog_load("fig4-d5")
    d4 = catalog_load("fig5-d4")
    bases = {(4, "open-odd"): (d5.graph, d5.labeling), (4, "closed-even"): (d4.graph, d4.labeling)}
    bases.update(_load_extra_bases())
    for n in range(5, 8):
        if (n, "open-odd") in bases and (n, "closed-even") not in bases:
            g, lab = complement_transport(*bases[(n, "open-odd")])
            if verify_xor_magic(g, lab, "closed"):
                bases[(n, "closed-even")] = (g, lab)
    return bases
