"""Symbolic MILP models for XOR-magic graph existence and CPLEX-LP export.

Two formulations share the binary edge variables ``e_u_v`` (``u < v``) and
the degree rows. The first writes one parity row per vertex and label
coordinate. The second packs a chunk of ``t`` coordinates into one row by
encoding each label chunk as base-``M`` digits; with ``M`` odd and at least
the number of summands per column, the packed row holds exactly when every
column sum in the chunk is even.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph import Graph
from .labeling import BitLabel, Labeling, canonical_bijection


class MilpError(ValueError):
    pass


# -- s-codes -------------------------------------------------------------------


@dataclass(frozen=True)
class EncodingSpec:
    """Weights ``(M^(r-1+y), ..., M^y)``."""

    base: int
    length: int
    offset: int = 0

    def __post_init__(self):
        if self.base < 2 or self.length < 1 or self.offset < 0:
            raise MilpError(f"invalid encoding spec {self}")

    @property
    def weights(self) -> tuple[int, ...]:
        M, r, y = self.base, self.length, self.offset
        return tuple(M ** (r - 1 + y - i) for i in range(r))


def encode(s: EncodingSpec | Sequence[int], x: Sequence[int]) -> int:
    """``sum(s_i * x_i)`` for a binary sequence ``x``."""
    weights = s.weights if isinstance(s, EncodingSpec) else tuple(s)
    if len(weights) != len(x):
        raise MilpError(f"sequence length {len(x)} != code length {len(weights)}")
    if any(b not in (0, 1) for b in x):
        raise MilpError("encode expects a binary sequence")
    return sum(w * b for w, b in zip(weights, x))


def split_label(label: BitLabel | Sequence[int], t: int) -> list[tuple[int, ...]]:
    """Cut a label into chunks of ``t`` coordinates; the last may be shorter."""
    bits = label.bits if isinstance(label, BitLabel) else tuple(label)
    n = len(bits)
    if not 1 <= t <= n:
        raise MilpError(f"chunk size t={t} out of range [1, {n}]")
    return [bits[i:i + t] for i in range(0, n, t)]


def chunk_count(n: int, t: int) -> int:
    return -(-n // t)


HOLDS = "hypotheses_hold_and_conclusion_verified"
VIOLATED = "hypotheses_violated"
CONCLUSION_FAILS = "conclusion_fails"


@dataclass(frozen=True)
class LemmaVerdict:
    status: str
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.status == HOLDS


def check_encoding_lemma(M: int, y: int, sequences: Sequence[Sequence[int]],
                         targets: Sequence[int]) -> LemmaVerdict:
    """Test the packing lemma on one instance.

    ``targets`` are the even values ``2k_1..2k_r``. Hypotheses: every target
    is even with ``0 <= 2k_i < M``, column counts are below ``M`` (or at most
    ``M`` when ``M`` is odd), and the packed sum matches. The conclusion (the
    sequences XOR to zero and column ``i`` holds exactly ``2k_i`` ones) is then
    checked directly.
    """
    if not sequences:
        raise MilpError("need at least one sequence")
    r = len(sequences[0])
    if any(len(a) != r for a in sequences) or len(targets) != r:
        raise MilpError("sequences and targets must share one length")
    spec = EncodingSpec(M, r, y)
    counts = [sum(a[i] for a in sequences) for i in range(r)]
    reasons = []
    if any(t % 2 or not 0 <= t < M for t in targets):
        reasons.append("targets must be even and in [0, M)")
    limit_ok = max(counts) <= M if M % 2 else max(counts) < M
    if not limit_ok:
        reasons.append("column count exceeds the base")
    packed = sum(encode(spec, a) for a in sequences)
    if packed != sum(t * w for t, w in zip(targets, spec.weights)):
        reasons.append("packed sums differ")
    if reasons:
        return LemmaVerdict(VIOLATED, tuple(reasons))
    xor_zero = all(c % 2 == 0 for c in counts)
    if xor_zero and counts == list(targets):
        return LemmaVerdict(HOLDS)
    return LemmaVerdict(CONCLUSION_FAILS)


def column_counts_from_packed(M: int, y: int, r: int, packed: int) -> list[int]:
    """Read per-column counts back as base-``M`` digits of a packed sum."""
    value, rem = divmod(packed, M ** y)
    if rem:
        raise MilpError("packed value is not a multiple of M^y")
    digits = []
    for _ in range(r):
        value, dgt = divmod(value, M)
        digits.append(dgt)
    if value:
        raise MilpError("packed value overflows r digits")
    return digits[::-1]


def random_lemma_instance(rng: random.Random, max_r: int = 6, max_k: int = 12):
    """Random instance satisfying the hypotheses: returns ``(M, y, seqs, targets)``."""
    r = rng.randint(1, max_r)
    k = rng.randint(1, max_k)
    seqs = [[rng.randint(0, 1) for _ in range(r)] for _ in range(k)]
    # flip one bit in each odd column so every column sum is even
    for i in range(r):
        if sum(a[i] for a in seqs) % 2:
            seqs[rng.randrange(k)][i] ^= 1
    counts = [sum(a[i] for a in seqs) for i in range(r)]
    base = max(2, max(counts) + 1 + rng.randint(0, 6))
    return base, rng.randint(0, 3), seqs, counts


def boundary_lemma_instance(rng: random.Random, max_r: int = 6, max_k: int = 12):
    """Random instance with an odd base equal to the largest column count.

    Targets are the base-``M`` digits of the packed sum, so the packed-sum
    hypothesis holds whenever those digits are even. Returns
    ``(M, y, seqs, targets)``; the verdict may be violated when some digit is
    odd.
    """
    while True:
        r = rng.randint(1, max_r)
        k = rng.randint(3, max_k)
        seqs = [[rng.randint(0, 1) for _ in range(r)] for _ in range(k)]
        counts = [sum(a[i] for a in seqs) for i in range(r)]
        M = max(counts)
        if M % 2 and M >= 3:
            break
    y = rng.randint(0, 3)
    packed = sum(encode(EncodingSpec(M, r, y), a) for a in seqs)
    try:
        targets = column_counts_from_packed(M, y, r, packed)
    except MilpError:
        # carry out of the top digit; any even targets will do
        targets = [0] * r
    return M, y, seqs, targets


# -- models --------------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" or "integer"
    lower: int | None = 0
    upper: int | None = None


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[int, str], ...]
    sense: str  # "=", "<=", ">="
    rhs: int

    def evaluate(self, values: Mapping[str, int]) -> bool:
        lhs = sum(c * values[v] for c, v in self.terms)
        if self.sense == "=":
            return lhs == self.rhs
        if self.sense == "<=":
            return lhs <= self.rhs
        return lhs >= self.rhs


@dataclass
class MilpModel:
    n: int
    d: int
    mode: str
    variant: str
    t: int | None
    labeling: Labeling
    literal: bool = False
    variables: dict[str, Variable] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)

    def add_var(self, var: Variable) -> None:
        self.variables[var.name] = var

    def rows(self, prefix: str) -> list[Constraint]:
        return [c for c in self.constraints if c.name.startswith(prefix + "_")]

    @property
    def census(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            key = c.name.split("_", 1)[0]
            out[key] = out.get(key, 0) + 1
        out["edge_vars"] = sum(1 for v in self.variables.values() if v.kind == "binary")
        out["k_vars"] = sum(1 for v in self.variables.values() if v.kind == "integer")
        out["bounded_k"] = sum(
            1 for v in self.variables.values() if v.kind == "integer" and v.upper is not None
        )
        return out

    def violations(self, values: Mapping[str, int]) -> list[str]:
        """Names of rows and variable bounds broken by a full assignment."""
        bad = [c.name for c in self.constraints if not c.evaluate(values)]
        for var in self.variables.values():
            x = values[var.name]
            if var.kind == "binary" and x not in (0, 1):
                bad.append(f"domain:{var.name}")
            if var.lower is not None and x < var.lower:
                bad.append(f"lower:{var.name}")
            if var.upper is not None and x > var.upper:
                bad.append(f"upper:{var.name}")
        return bad


def edge_var(u: int, v: int, literal: bool = False) -> str:
    if not literal and u > v:
        u, v = v, u
    return f"e_{u}_{v}"


def k_var(v: int, i: int) -> str:
    return f"k_{v}_{i}"


def model2_base(d: int, mode: str) -> int:
    """Digit base of the packed rows: the most summands a column can have."""
    return d if mode == "open" else d + 1


def build_model(n: int, d: int, mode: str = "open", variant: str = "model1", t: int | None = None,
                labeling: Labeling | None = None, literal: bool = False) -> MilpModel:
    if n < 1:
        raise MilpError(f"n must be >= 1, got {n}")
    N = 1 << n
    if not 0 <= d <= N - 1:
        raise MilpError(f"d={d} out of range for order {N}")
    if mode not in ("open", "closed"):
        raise MilpError(f"mode must be 'open' or 'closed', got {mode!r}")
    if variant not in ("model1", "model2"):
        raise MilpError(f"unknown variant {variant!r}")
    labeling = labeling or canonical_bijection(n)
    if labeling.n != n or not labeling.is_bijective():
        raise MilpError("labeling must be a bijection onto (Z_2)^n")
    if variant == "model2":
        if t is None or not 1 <= t <= n:
            raise MilpError(f"model2 needs 1 <= t <= n, got t={t}")
        M = model2_base(d, mode)
        if M % 2 == 0 or M < 3:
            raise MilpError(
                f"model2 needs an odd digit base; d={d} gives base {M} in {mode} mode"
            )
    else:
        t = None

    model = MilpModel(n, d, mode, variant, t, labeling, literal)
    lab = labeling.values
    closed = mode == "closed"

    if literal:
        for u in range(N):
            for v in range(N):
                if u != v:
                    model.add_var(Variable(edge_var(u, v, True), "binary", 0, 1))
    else:
        for u in range(N):
            for v in range(u + 1, N):
                model.add_var(Variable(edge_var(u, v), "binary", 0, 1))

    if literal:
        for u in range(N):
            for v in range(u + 1, N):
                model.constraints.append(Constraint(
                    f"sym_{u}_{v}", ((1, edge_var(u, v, True)), (-1, edge_var(v, u, True))), "=", 0))

    for u in range(N):
        terms = tuple((1, edge_var(u, v, literal)) for v in range(N) if v != u)
        model.constraints.append(Constraint(f"deg_{u}", terms, "=", d))

    def incoming(v: int) -> list[int]:
        return [u for u in range(N) if u != v]

    if variant == "model1":
        for v in range(N):
            for i in range(1, n + 1):
                shift = n - i
                kname = k_var(v, i)
                model.add_var(Variable(kname, "integer", 0, None))
                terms = [(1, edge_var(u, v, literal)) for u in incoming(v) if (lab[u] >> shift) & 1]
                terms.append((-2, kname))
                rhs = -((lab[v] >> shift) & 1) if closed else 0
                model.constraints.append(Constraint(f"par_{v}_{i}", tuple(terms), "=", rhs))
        return model

    M = model2_base(d, mode)
    for v in range(N):
        for i in range(1, n + 1):
            model.add_var(Variable(k_var(v, i), "integer", 0, (M - 1) // 2))
    chunks = [split_label(labeling[u], t) for u in range(N)]
    for v in range(N):
        for q, chunk in enumerate(chunks[v], start=1):
            L = len(chunk)
            spec = EncodingSpec(M, L, 1)
            terms = []
            for u in incoming(v):
                coef = encode(spec, chunks[u][q - 1])
                if coef:
                    terms.append((coef, edge_var(u, v, literal)))
            first = (q - 1) * t
            for j in range(1, L + 1):
                terms.append((-2 * M ** (L - j + 1), k_var(v, first + j)))
            rhs = -encode(spec, chunk) if closed else 0
            model.constraints.append(Constraint(f"enc_{v}_{q}", tuple(terms), "=", rhs))
    return model


def edge_values(model: MilpModel, g: Graph) -> dict[str, int]:
    """Edge-variable assignment of a graph (both orientations in literal mode)."""
    N = 1 << model.n
    if g.order != N:
        raise MilpError(f"graph order {g.order} != {N}")
    out = {}
    for name, var in model.variables.items():
        if var.kind == "binary":
            _, u, v = name.split("_")
            out[name] = int(g.has_edge(int(u), int(v)))
    return out


def complete_integers(model: MilpModel, values: Mapping[str, int]) -> dict[str, int] | None:
    """Extend an edge assignment with the integer variables, or ``None``.

    In every row the integer terms have coefficients ``-2 w`` with weights
    ``w`` that are successive powers of the base (or a single term), so the
    values are the base digits of the edge part, read greedily from the top.
    """
    out = dict(values)
    for c in model.constraints:
        kterms = [(coef, v) for coef, v in c.terms if model.variables[v].kind == "integer"]
        if not kterms:
            continue
        total = sum(coef * values[v] for coef, v in c.terms if model.variables[v].kind == "binary") - c.rhs
        for coef, name in sorted(kterms, key=lambda cv: cv[0]):
            w2 = -coef
            if total < 0:
                return None
            k = total // w2
            var = model.variables[name]
            if var.upper is not None:
                k = min(k, var.upper)
            out[name] = k
            total -= k * w2
        if total:
            return None
    return out


def is_satisfied_by(model: MilpModel, g: Graph) -> bool:
    full = complete_integers(model, edge_values(model, g))
    return full is not None and not model.violations(full)


# -- LP text -------------------------------------------------------------------


def _format_terms(terms: Iterable[tuple[int, str]]) -> list[str]:
    out = []
    for idx, (coef, name) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1 else f"{mag} {name}"
        if idx == 0:
            out.append(f"- {body}" if coef < 0 else body)
        else:
            out.append(f"{sign} {body}")
    return out


def _wrap(head: str, tokens: list[str], tail: str, per_line: int = 8) -> list[str]:
    lines = []
    for i in range(0, len(tokens), per_line):
        chunk = " ".join(tokens[i:i + per_line])
        lines.append((f" {head} " if i == 0 else "   ") + chunk)
    lines[-1] += f" {tail}"
    return lines


def render_lp(model: MilpModel) -> str:
    """CPLEX-LP text; deterministic, ASCII, newline-terminated."""
    sense = {"=": "=", "<=": "<=", ">=": ">="}
    t_part = f" t={model.t}" if model.t is not None else ""
    lines = [
        f"\\ XOR-magic existence {model.variant}{t_part} n={model.n} d={model.d} mode={model.mode}"
        + (" literal" if model.literal else ""),
        f"\\ labels: {' '.join(model.labeling.strings())}",
        "Minimize",
        " obj: 0",
        "Subject To",
    ]
    for c in model.constraints:
        lines.extend(_wrap(f"{c.name}:", _format_terms(c.terms), f"{sense[c.sense]} {c.rhs}"))
    ints = [v for v in model.variables.values() if v.kind == "integer"]
    bounded = [v for v in ints if v.upper is not None]
    if bounded:
        lines.append("Bounds")
        lines.extend(f" {v.lower} <= {v.name} <= {v.upper}" for v in bounded)
    if ints:
        lines.append("General")
        names = [v.name for v in ints]
        lines.extend(" " + " ".join(names[i:i + 10]) for i in range(0, len(names), 10))
    bins = [v.name for v in model.variables.values() if v.kind == "binary"]
    if bins:
        lines.append("Binary")
        lines.extend(" " + " ".join(bins[i:i + 10]) for i in range(0, len(bins), 10))
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp(model: MilpModel, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(render_lp(model))
