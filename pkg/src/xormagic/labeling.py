"""(Z_2)^n labels, vertex labelings, XOR weights and magic verification.

Labels are stored as ints. The bit string ``b_1 b_2 ... b_n`` (big-endian,
``b_1`` first) corresponds to the int whose binary expansion it is, so
coordinate ``i`` (1-based) of a label ``x`` is ``(x >> (n - i)) & 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from operator import xor
from typing import Sequence

from .families import CirculantSpec, cartesian_product, strong_product
from .graph import Graph, GraphError, _bits, complement, is_connected


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class BitLabel:
    n: int
    value: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.value < (1 << self.n):
            raise LabelingError(f"label {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitLabel":
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise LabelingError(f"bit {b!r} not in {{0, 1}}")
            value = (value << 1) | b
        return cls(len(bits), value)

    @classmethod
    def from_str(cls, s: str) -> "BitLabel":
        return cls.from_bits([int(c) for c in s])

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def __xor__(self, other: "BitLabel") -> "BitLabel":
        if self.n != other.n:
            raise LabelingError("cannot add labels of different dimension")
        return BitLabel(self.n, self.value ^ other.value)

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")

    def is_zero(self) -> bool:
        return self.value == 0


class Labeling:
    """Assignment of a label in ``(Z_2)^n`` to each of ``2^n`` vertices.

    Bijectivity is not enforced here so that broken labelings can be fed to
    the verifiers; see :meth:`is_bijective`.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: Sequence[int]):
        if n < 1:
            raise LabelingError(f"dimension must be >= 1, got {n}")
        values = tuple(int(v) for v in values)
        if len(values) != 1 << n:
            raise LabelingError(f"expected {1 << n} labels, got {len(values)}")
        if any(not 0 <= v < (1 << n) for v in values):
            raise LabelingError(f"label out of range for n={n}")
        self.n = n
        self.values = values

    @classmethod
    def from_strings(cls, labels: Sequence[str]) -> "Labeling":
        if not labels:
            raise LabelingError("empty labeling")
        n = len(labels[0])
        if any(len(s) != n or set(s) - {"0", "1"} for s in labels):
            raise LabelingError("labels must be equal-length bit strings")
        return cls(n, [int(s, 2) for s in labels])

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, v: int) -> BitLabel:
        return BitLabel(self.n, self.values[v])

    def __eq__(self, other):
        if not isinstance(other, Labeling):
            return NotImplemented
        return self.n == other.n and self.values == other.values

    def __hash__(self):
        return hash((self.n, self.values))

    def __repr__(self):
        return f"Labeling(n={self.n}, labels={self.strings()})"

    def is_bijective(self) -> bool:
        return sorted(self.values) == list(range(1 << self.n))

    def vertex_of(self) -> dict[int, int]:
        """Inverse map label -> vertex (meaningful only when bijective)."""
        return {x: v for v, x in enumerate(self.values)}

    def strings(self) -> list[str]:
        return [format(x, f"0{self.n}b") for x in self.values]

    def to_dict(self) -> dict:
        return {"n": self.n, "labels": self.strings()}

    @classmethod
    def from_dict(cls, data: dict) -> "Labeling":
        try:
            n = int(data["n"])
            labels = list(data["labels"])
        except (KeyError, TypeError, ValueError) as exc:
            raise LabelingError(f"malformed labeling object: {exc}") from None
        lab = cls.from_strings(labels)
        if lab.n != n:
            raise LabelingError(f"declared n={n} but labels have {lab.n} bits")
        return lab

    def permuted(self, image: Sequence[int]) -> "Labeling":
        """Labeling that gives vertex ``image[v]`` the label of ``v``."""
        out = [0] * len(self.values)
        for v, x in enumerate(self.values):
            out[image[v]] = x
        return Labeling(self.n, out)


def canonical_bijection(n: int) -> Labeling:
    """Vertex ``i`` gets the n-bit binary representation of ``i``."""
    if n < 1:
        raise LabelingError(f"dimension must be >= 1, got {n}")
    return Labeling(n, range(1 << n))


def _check_order(g: Graph, lab: Labeling) -> None:
    if g.order != 1 << lab.n:
        raise LabelingError(f"graph order {g.order} != 2^{lab.n}")


def _open_weight(g: Graph, values: Sequence[int], v: int) -> int:
    w = 0
    for u in _bits(g.adj[v]):
        w ^= values[u]
    return w


def open_weight(g: Graph, lab: Labeling, v: int) -> BitLabel:
    _check_order(g, lab)
    g._check(v)
    return BitLabel(lab.n, _open_weight(g, lab.values, v))


def closed_weight(g: Graph, lab: Labeling, v: int) -> BitLabel:
    _check_order(g, lab)
    g._check(v)
    return BitLabel(lab.n, _open_weight(g, lab.values, v) ^ lab.values[v])


def weights(g: Graph, lab: Labeling, mode: str = "open") -> list[int]:
    """All vertex weights as ints."""
    _check_order(g, lab)
    closed = _mode(mode) == "closed"
    return [_open_weight(g, lab.values, v) ^ (lab.values[v] if closed else 0) for v in range(g.order)]


def _mode(mode: str) -> str:
    if mode not in ("open", "closed"):
        raise LabelingError(f"mode must be 'open' or 'closed', got {mode!r}")
    return mode


@dataclass(frozen=True)
class Verdict:
    status: str
    vertex: int | None = None

    MAGIC = "magic"
    NOT_CONNECTED = "not_connected"
    NONZERO_WEIGHT = "nonzero_weight"
    WRONG_ORDER = "wrong_order"
    NOT_BIJECTION = "not_bijection"

    @property
    def is_magic(self) -> bool:
        return self.status == self.MAGIC

    def __bool__(self) -> bool:
        return self.is_magic

    def __str__(self) -> str:
        return self.status if self.vertex is None else f"{self.status}(vertex {self.vertex})"


def verify_xor_magic(g: Graph, lab: Labeling, mode: str = "open") -> Verdict:
    """Check order, bijectivity, connectivity, then weights, in that order."""
    closed = _mode(mode) == "closed"
    if g.order != 1 << lab.n:
        return Verdict(Verdict.WRONG_ORDER)
    if not lab.is_bijective():
        seen = {}
        for v, x in enumerate(lab.values):
            if x in seen:
                return Verdict(Verdict.NOT_BIJECTION, v)
            seen[x] = v
    if not is_connected(g):
        return Verdict(Verdict.NOT_CONNECTED)
    values = lab.values
    for v in range(g.order):
        w = _open_weight(g, values, v)
        if closed:
            w ^= values[v]
        if w:
            return Verdict(Verdict.NONZERO_WEIGHT, v)
    return Verdict(Verdict.MAGIC)


def verify_open_xor_magic(g: Graph, lab: Labeling) -> Verdict:
    return verify_xor_magic(g, lab, "open")


def verify_closed_xor_magic(g: Graph, lab: Labeling) -> Verdict:
    return verify_xor_magic(g, lab, "closed")


def admits_labeling(g: Graph, lab: Labeling, mode: str = "open") -> bool:
    """True when every weight is zero, ignoring connectivity."""
    return not any(weights(g, lab, mode))


def complement_transport(g: Graph, lab: Labeling) -> tuple[Graph, Labeling]:
    """Complement the graph and keep the labels.

    For ``n >= 2`` the XOR of all of ``(Z_2)^n`` is zero, so the open weight
    in ``g`` equals the closed weight in the complement at every vertex.
    """
    _check_order(g, lab)
    if lab.n < 2:
        raise LabelingError("complement transport needs n >= 2")
    return complement(g), lab


def circulant_open_closed_translate(m: int, S) -> CirculantSpec:
    """Connection set ``{m/2 - s}`` of the closed twin of an open circulant."""
    if m < 4 or m & (m - 1):
        raise LabelingError(f"m must be a power of two >= 4, got {m}")
    spec = CirculantSpec(m, S)
    half = m // 2
    if half not in spec.S:
        raise LabelingError(f"{half} is not in the connection set")
    return CirculantSpec(m, {half - s for s in spec.S if s != half})


def product_labeling(g: Graph, lab_g: Labeling, h: Graph, lab_h: Labeling) -> Labeling:
    """Concatenated labels ``lab_g(a) || lab_h(b)`` on the row-major product."""
    _check_order(g, lab_g)
    _check_order(h, lab_h)
    shift = lab_h.n
    return Labeling(lab_g.n + lab_h.n, [(x << shift) | y for x in lab_g.values for y in lab_h.values])


def labeled_cartesian(g: Graph, lab_g: Labeling, h: Graph, lab_h: Labeling) -> tuple[Graph, Labeling]:
    return cartesian_product(g, h), product_labeling(g, lab_g, h, lab_h)


def labeled_strong(g: Graph, lab_g: Labeling, h: Graph, lab_h: Labeling) -> tuple[Graph, Labeling]:
    return strong_product(g, h), product_labeling(g, lab_g, h, lab_h)


def total_xor(n: int) -> int:
    return reduce(xor, range(1 << n), 0)


def build_power_n_graph(n: int, parity: str, bases=None) -> tuple[Graph, Labeling]:
    """Odd-regular open or even-regular closed XOR-magic graph of order ``2^n``.

    Powers 4..7 come from the base table; larger powers are ``closed(n-b) □ H``
    where ``H`` is a power-``b`` base of the requested parity, trying ``b = 4``
    first and falling back to other base powers when a part is missing.
    """
    if parity not in ("open-odd", "closed-even"):
        raise LabelingError(f"parity must be 'open-odd' or 'closed-even', got {parity!r}")
    if n < 4:
        raise LabelingError(f"no such graph below power 4 (got n={n})")
    if bases is None:
        from .catalog import base_graphs

        bases = base_graphs()
    if n <= 7:
        try:
            return bases[(n, parity)]
        except KeyError:
            raise LabelingError(f"no base graph for power {n}, {parity}") from None
    for b in (4, 5, 6, 7):
        if (b, parity) not in bases or n - b < 4:
            continue
        try:
            g, lab_g = build_power_n_graph(n - b, "closed-even", bases)
        except LabelingError:
            continue
        h, lab_h = bases[(b, parity)]
        return labeled_cartesian(g, lab_g, h, lab_h)
    raise LabelingError(f"no product split reaches power {n}, {parity}")


def certificate_dict(g: Graph, lab: Labeling, mode: str) -> dict:
    return {"graph": g.to_dict(), "labeling": lab.to_dict(), "mode": _mode(mode)}


def certificate_from_dict(data: dict) -> tuple[Graph, Labeling, str]:
    try:
        g = Graph.from_dict(data["graph"])
        lab = Labeling.from_dict(data["labeling"])
        mode = _mode(data["mode"])
    except (KeyError, TypeError) as exc:
        raise LabelingError(f"malformed certificate: {exc}") from None
    except GraphError as exc:
        raise LabelingError(str(exc)) from None
    return g, lab, mode


def write_certificate(path, g: Graph, lab: Labeling, mode: str) -> None:
    with open(path, "w") as fh:
        json.dump(certificate_dict(g, lab, mode), fh, indent=1)
        fh.write("\n")


def read_certificate(path) -> tuple[Graph, Labeling, str]:
    with open(path) as fh:
        return certificate_from_dict(json.load(fh))
