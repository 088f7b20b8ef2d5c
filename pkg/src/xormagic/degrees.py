"""Degrees reachable by product and complement constructions.

Parities are ``"open-odd"`` (odd-regular open XOR-magic) and
``"closed-even"`` (even-regular closed XOR-magic). Starting from the known
base degrees, the closure combines graphs of powers ``a + b = p``:

* Cartesian: open+closed -> open, closed+closed -> closed, open+open -> closed
  (degrees add);
* strong: closed x closed -> closed with degree ``kl + k + l``;
* complement at power ``p``: ``d -> 2^p - 1 - d`` with the parity flipped,
  kept only when the new degree is at least ``(2^p - 1) / 2`` so the
  complement is connected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

OPEN = "open-odd"
CLOSED = "closed-even"
RULES = frozenset({"cartesian", "strong", "complement"})

_FLIP = {OPEN: CLOSED, CLOSED: OPEN}
_CARTESIAN = {(OPEN, CLOSED): OPEN, (CLOSED, OPEN): OPEN, (CLOSED, CLOSED): CLOSED, (OPEN, OPEN): CLOSED}


@dataclass
class DegreeFactBase:
    """Known realizable ``(power, parity) -> degrees`` with a provenance note per fact."""

    facts: dict[tuple[int, str], dict[int, str]] = field(default_factory=dict)

    def add(self, power: int, parity: str, degree: int, provenance: str) -> None:
        self.facts.setdefault((power, parity), {})[degree] = provenance

    def degrees(self, power: int, parity: str) -> set[int]:
        return set(self.facts.get((power, parity), {}))

    @property
    def powers(self) -> list[int]:
        return sorted({p for p, _ in self.facts})

    @classmethod
    def default(cls) -> "DegreeFactBase":
        base = cls()
        opened = {4: [5, 7, 9, 11], 5: [5, 7, 9, 11, 13, 15, 27], 6: [9], 7: [13]}
        closed = {4: [4, 6, 8, 10], 5: [26, 24, 22, 20, 18, 16, 4], 6: [54], 7: [114]}
        for p, ds in opened.items():
            for d in ds:
                base.add(p, OPEN, d, f"base list of odd-regular open graphs, power {p}")
        for p, ds in closed.items():
            for d in ds:
                base.add(p, CLOSED, d, f"base list of even-regular closed graphs, power {p}")
        return base


@dataclass(frozen=True)
class Derivation:
    """How a degree was reached; ``parts`` are the sub-derivations."""

    power: int
    parity: str
    degree: int
    rule: str  # "fact", "cartesian", "strong" or "complement"
    parts: tuple["Derivation", ...] = ()
    note: str = ""

    def render(self, indent: int = 0) -> str:
        head = f"{'  ' * indent}{self.degree} ({self.parity}, power {self.power}) by {self.rule}"
        if self.note:
            head += f": {self.note}"
        return "\n".join([head] + [p.render(indent + 1) for p in self.parts])

    def to_dict(self) -> dict:
        out = {"power": self.power, "parity": self.parity, "degree": self.degree, "rule": self.rule}
        if self.note:
            out["note"] = self.note
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        return out


Table = dict[tuple[int, str], dict[int, Derivation]]


def _closure(n_target: int, rules: frozenset[str], facts: DegreeFactBase) -> Table:
    table: Table = {}
    for p in range(1, n_target + 1):
        for parity in (OPEN, CLOSED):
            table[(p, parity)] = {
                d: Derivation(p, parity, d, "fact", note=note)
                for d, note in sorted(facts.facts.get((p, parity), {}).items())
            }
        for a in range(1, p):
            b = p - a
            if "cartesian" in rules:
                for (pa, pb), out in _CARTESIAN.items():
                    for k, left in table[(a, pa)].items():
                        for l, right in table[(b, pb)].items():
                            table[(p, out)].setdefault(k + l, Derivation(p, out, k + l, "cartesian", (left, right)))
            if "strong" in rules:
                for k, left in table[(a, CLOSED)].items():
                    for l, right in table[(b, CLOSED)].items():
                        d = k * l + k + l
                        table[(p, CLOSED)].setdefault(d, Derivation(p, CLOSED, d, "strong", (left, right)))
        if "complement" in rules:
            top = (1 << p) - 1
            changed = True
            while changed:
                changed = False
                for parity in (OPEN, CLOSED):
                    for d, src in list(table[(p, parity)].items()):
                        e = top - d
                        # 2e >= top keeps the complement connected
                        if 2 * e >= top and e not in table[(p, _FLIP[parity])]:
                            table[(p, _FLIP[parity])][e] = Derivation(p, _FLIP[parity], e, "complement", (src,))
                            changed = True
    return table


def reachable_degrees(n_target: int, parity: str, rules=RULES,
                      facts: DegreeFactBase | None = None) -> dict[int, Derivation]:
    """Degrees realizable at power ``n_target`` with one derivation each."""
    if n_target < 4:
        raise ValueError(f"n_target must be >= 4, got {n_target}")
    if parity not in (OPEN, CLOSED):
        raise ValueError(f"parity must be {OPEN!r} or {CLOSED!r}, got {parity!r}")
    rules = frozenset(rules)
    if not rules or rules - RULES:
        raise ValueError(f"rules must be a non-empty subset of {sorted(RULES)}")
    table = _closure(n_target, rules, facts or DegreeFactBase.default())
    return dict(sorted(table[(n_target, parity)].items()))


def known_graphs() -> dict[tuple[int, str, int], tuple]:
    """Certified ``(power, parity, degree) -> (graph, labeling)`` from the catalog."""
    from .catalog import base_graphs, catalog_list
    from .graph import regularity
    from .labeling import complement_transport

    out = {}
    for entry in catalog_list():
        if entry.expected != "magic" or entry.labeling.n < 4:
            continue
        parity = OPEN if entry.mode == "open" else CLOSED
        out[(entry.labeling.n, parity, entry.degree)] = (entry.graph, entry.labeling)
    for (n, parity), (g, lab) in base_graphs().items():
        out.setdefault((n, parity, regularity(g)), (g, lab))
    # complements of known graphs, when connected by the degree bound
    for (n, parity, d), (g, lab) in list(out.items()):
        e = (1 << n) - 1 - d
        if 2 * e >= (1 << n) - 1:
            out.setdefault((n, _FLIP[parity], e), complement_transport(g, lab))
    return out


def realize(trace: Derivation, known=None):
    """Build the graph and labeling described by a derivation.

    Raises ``KeyError`` when a leaf fact has no stored certificate.
    """
    from .labeling import complement_transport, labeled_cartesian, labeled_strong

    known = known_graphs() if known is None else known
    if trace.rule == "fact":
        return known[(trace.power, trace.parity, trace.degree)]
    if trace.rule == "complement":
        return complement_transport(*realize(trace.parts[0], known))
    left = realize(trace.parts[0], known)
    right = realize(trace.parts[1], known)
    op = labeled_cartesian if trace.rule == "cartesian" else labeled_strong
    return op(*left, *right)
