import itertools
import json
import random
from functools import reduce
from operator import xor

import pytest

from xormagic.catalog import catalog_list, catalog_load
from xormagic.families import CirculantSpec, circulant
from xormagic.graph import Graph, apply_vertex_map, complement, is_connected, regularity
from xormagic.labeling import (
    BitLabel,
    Labeling,
    LabelingError,
    Verdict,
    build_power_n_graph,
    canonical_bijection,
    certificate_dict,
    certificate_from_dict,
    circulant_open_closed_translate,
    closed_weight,
    complement_transport,
    labeled_cartesian,
    labeled_strong,
    open_weight,
    read_certificate,
    total_xor,
    verify_closed_xor_magic,
    verify_open_xor_magic,
    verify_xor_magic,
    weights,
    write_certificate,
)


def naive_weight(g, lab, v, closed):
    # independent path: walk the edge list instead of bitsets
    w = [0] * lab.n
    members = [u for a, b in g.edges() for u in ((b,) if a == v else (a,) if b == v else ())]
    if closed:
        members.append(v)
    for u in members:
        w = [x ^ y for x, y in zip(w, lab[u].bits)]
    return tuple(w)


def test_canonical_bijection():
    assert canonical_bijection(2).strings() == ["00", "01", "10", "11"]
    assert canonical_bijection(1).strings() == ["0", "1"]
    assert canonical_bijection(3)[5].bits == (1, 0, 1)
    with pytest.raises(LabelingError):
        canonical_bijection(0)


def test_bitlabel_group():
    a = BitLabel.from_str("1011")
    assert str(a) == "1011"
    assert (a ^ a).is_zero()
    assert a ^ BitLabel.from_str("0110") == BitLabel.from_str("1101")
    with pytest.raises(LabelingError):
        BitLabel.from_bits([1, 2])
    with pytest.raises(LabelingError):
        a ^ BitLabel.from_str("1")


def test_labeling_rejects_wrong_size():
    with pytest.raises(LabelingError):
        Labeling(2, [0, 1, 2])
    with pytest.raises(LabelingError):
        Labeling(2, [0, 1, 2, 4])


def test_complete_bipartite_weights():
    k44 = catalog_load("fig1-k44")
    v = k44.labeling.vertex_of()[0b100]
    assert open_weight(k44.graph, k44.labeling, v).is_zero()
    k22 = catalog_load("fig1-k22")
    v = k22.labeling.vertex_of()[0b00]
    assert str(open_weight(k22.graph, k22.labeling, v)) == "10"
    # every vertex of K_{2,2} sees the same constant (1, 0)
    assert set(weights(k22.graph, k22.labeling, "open")) == {0b10}
    assert str(closed_weight(k22.graph, k22.labeling, v)) == "10"


def test_isolated_vertex_weight_is_zero():
    g = Graph.empty(4)
    assert open_weight(g, canonical_bijection(2), 3).is_zero()


def test_weight_order_mismatch():
    with pytest.raises(LabelingError):
        open_weight(Graph.complete(5), canonical_bijection(2), 0)


def test_verify_examples():
    assert verify_open_xor_magic(catalog_load("fig1-k44").graph, catalog_load("fig1-k44").labeling).is_magic
    k22 = catalog_load("fig1-k22")
    assert verify_open_xor_magic(k22.graph, k22.labeling).status == Verdict.NONZERO_WEIGHT
    assert verify_closed_xor_magic(k22.graph, k22.labeling).status == Verdict.NONZERO_WEIGHT
    assert verify_closed_xor_magic(Graph.complete(4), canonical_bijection(2)).is_magic
    d5 = catalog_load("fig4-d5")
    assert verify_open_xor_magic(d5.graph, d5.labeling).is_magic
    d4 = catalog_load("fig5-d4")
    assert verify_closed_xor_magic(d4.graph, d4.labeling).is_magic


def test_verify_failure_order():
    lab = canonical_bijection(2)
    assert verify_xor_magic(Graph.complete(5), lab).status == Verdict.WRONG_ORDER
    dup = Labeling(2, [0, 1, 1, 3])
    v = verify_xor_magic(Graph.complete(4), dup, "closed")
    assert v.status == Verdict.NOT_BIJECTION and v.vertex == 2
    assert verify_xor_magic(Graph.empty(4), lab).status == Verdict.NOT_CONNECTED
    assert verify_xor_magic(circulant(4, {1}), lab).status == Verdict.NONZERO_WEIGHT
    with pytest.raises(LabelingError):
        verify_xor_magic(Graph.complete(4), lab, "half")


def test_weights_match_naive_path():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 5)
        N = 1 << n
        g = Graph.from_edges(N, [(u, v) for u in range(N) for v in range(u + 1, N) if rng.random() < 0.4])
        values = list(range(N))
        rng.shuffle(values)
        lab = Labeling(n, values)
        for v in range(N):
            ow = open_weight(g, lab, v)
            cw = closed_weight(g, lab, v)
            assert ow.bits == naive_weight(g, lab, v, False)
            assert cw.bits == naive_weight(g, lab, v, True)
            assert cw == ow ^ lab[v]


def test_verdict_invariant_under_relabeling():
    rng = random.Random(2)
    for e in catalog_list():
        for _ in range(5):
            image = list(range(e.graph.order))
            rng.shuffle(image)
            g2 = apply_vertex_map(e.graph, image)
            lab2 = e.labeling.permuted(image)
            assert verify_xor_magic(g2, lab2, e.mode).status == e.verdict().status


def test_total_xor_zero():
    assert total_xor(1) == 1
    for n in range(2, 9):
        assert total_xor(n) == 0


def test_complement_transport_examples():
    g, lab = complement_transport(catalog_load("fig4-d5").graph, catalog_load("fig4-d5").labeling)
    assert regularity(g) == 10 and verify_closed_xor_magic(g, lab).is_magic
    g, lab = complement_transport(catalog_load("fig5-d4").graph, catalog_load("fig5-d4").labeling)
    assert regularity(g) == 11 and verify_open_xor_magic(g, lab).is_magic
    with pytest.raises(LabelingError):
        complement_transport(Graph.complete(2), canonical_bijection(1))


def test_complement_duality_both_directions():
    for e in catalog_list():
        if e.expected != "magic" or e.labeling.n < 2:
            continue
        g, lab = complement_transport(e.graph, e.labeling)
        if not is_connected(g):
            continue
        other = "closed" if e.mode == "open" else "open"
        assert verify_xor_magic(g, lab, other).is_magic
        back, lab2 = complement_transport(g, lab)
        assert verify_xor_magic(back, lab2, e.mode).is_magic


def test_duality_weight_identity_random():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(2, 5)
        N = 1 << n
        g = Graph.from_edges(N, [(u, v) for u in range(N) for v in range(u + 1, N) if rng.random() < 0.5])
        lab = canonical_bijection(n)
        assert weights(g, lab, "open") == weights(complement(g), lab, "closed")


def test_circulant_translation():
    assert circulant_open_closed_translate(16, {1, 6, 8}) == CirculantSpec(16, {7, 2})
    assert circulant_open_closed_translate(8, {1, 4}) == CirculantSpec(8, {3})
    with pytest.raises(LabelingError):
        circulant_open_closed_translate(8, {1, 2})


@pytest.mark.parametrize("m,S", [(8, {1, 4}), (16, {1, 6, 8}), (16, {3, 5, 8}), (32, {1, 7, 16})])
def test_circulant_translation_weight_identity(m, S):
    g1 = circulant(m, S)
    g2 = circulant(circulant_open_closed_translate(m, S))
    n = m.bit_length() - 1
    rng = random.Random(m)
    values = list(range(m))
    for _ in range(3):
        lab = Labeling(n, values)
        for i in range(m):
            assert open_weight(g1, lab, i) == closed_weight(g2, lab, (i + m // 2) % m)
        rng.shuffle(values)


def test_product_contracts_over_catalog():
    bases = [e for e in catalog_list() if e.expected == "magic" and e.graph.order == 16]
    for a, b in itertools.product(bases, repeat=2):
        g, lab = labeled_cartesian(a.graph, a.labeling, b.graph, b.labeling)
        assert lab.is_bijective()
        mode = "open" if (a.mode, b.mode) in {("open", "closed"), ("closed", "open")} else "closed"
        assert verify_xor_magic(g, lab, mode).is_magic, (a.id, b.id)
        assert regularity(g) == a.degree + b.degree
        if a.mode == b.mode == "closed":
            g, lab = labeled_strong(a.graph, a.labeling, b.graph, b.labeling)
            assert verify_closed_xor_magic(g, lab).is_magic


def test_product_examples():
    d5, d4 = catalog_load("fig4-d5"), catalog_load("fig5-d4")
    g, lab = labeled_cartesian(d5.graph, d5.labeling, d4.graph, d4.labeling)
    assert (g.order, regularity(g)) == (256, 9) and verify_open_xor_magic(g, lab).is_magic
    g, lab = labeled_cartesian(d4.graph, d4.labeling, d4.graph, d4.labeling)
    assert regularity(g) == 8 and verify_closed_xor_magic(g, lab).is_magic
    g, lab = labeled_strong(d4.graph, d4.labeling, d4.graph, d4.labeling)
    assert regularity(g) == 24 and verify_closed_xor_magic(g, lab).is_magic


def test_product_labeling_is_concatenation():
    d5, d4 = catalog_load("fig4-d5"), catalog_load("fig5-d4")
    _, lab = labeled_cartesian(d5.graph, d5.labeling, d4.graph, d4.labeling)
    for a in range(16):
        for b in range(16):
            assert str(lab[a * 16 + b]) == str(d5.labeling[a]) + str(d4.labeling[b])


def test_build_power_n_graph():
    g, lab = build_power_n_graph(4, "open-odd")
    assert g == catalog_load("fig4-d5").graph
    g, lab = build_power_n_graph(8, "open-odd")
    assert (g.order, regularity(g)) == (256, 9) and verify_open_xor_magic(g, lab).is_magic
    g, lab = build_power_n_graph(8, "closed-even")
    assert verify_closed_xor_magic(g, lab).is_magic
    with pytest.raises(LabelingError):
        build_power_n_graph(3, "open-odd")
    with pytest.raises(LabelingError):
        build_power_n_graph(5, "even")


@pytest.mark.parametrize("parity", ["open-odd", "closed-even"])
def test_build_power_nine(parity):
    g, lab = build_power_n_graph(9, parity)
    k = regularity(g)
    assert g.order == 512 and k % 2 == (1 if parity == "open-odd" else 0)
    assert verify_xor_magic(g, lab, "open" if parity == "open-odd" else "closed").is_magic


def test_certificate_roundtrip(tmp_path):
    e = catalog_load("fig4-d7")
    path = tmp_path / "c.json"
    write_certificate(path, e.graph, e.labeling, e.mode)
    assert read_certificate(path) == (e.graph, e.labeling, "open")
    data = json.loads(path.read_text())
    assert set(data) == {"graph", "labeling", "mode"}
    assert data["labeling"]["labels"][0] == str(e.labeling[0])
    assert certificate_from_dict(certificate_dict(e.graph, e.labeling, "open"))[0] == e.graph


@pytest.mark.parametrize("bad", [
    {"graph": {"order": 4, "edges": []}, "labeling": {"n": 2, "labels": ["00"]}, "mode": "open"},
    {"graph": {"order": 4, "edges": [[0, 0]]}, "labeling": {"n": 2, "labels": ["00", "01", "10", "11"]}, "mode": "open"},
    {"graph": {"order": 4, "edges": []}, "labeling": {"n": 3, "labels": ["00", "01", "10", "11"]}, "mode": "open"},
    {"graph": {"order": 4, "edges": []}, "labeling": {"n": 2, "labels": ["00", "01", "10", "11"]}, "mode": "x"},
    {"labeling": {"n": 2, "labels": ["00", "01", "10", "11"]}, "mode": "open"},
])
def test_certificate_reader_rejects(bad):
    with pytest.raises(LabelingError):
        certificate_from_dict(bad)


def test_xor_of_all_labels_brute():
    for n in range(2, 9):
        assert reduce(xor, canonical_bijection(n).values) == 0


def test_build_power_without_power_seven_base():
    from xormagic.catalog import base_graphs
    if (7, "open-odd") not in base_graphs():
        with pytest.raises(LabelingError):
            build_power_n_graph(7, "open-odd")
    g, lab = build_power_n_graph(11, "open-odd")
    assert g.order == 2048 and regularity(g) % 2 == 1
    assert verify_open_xor_magic(g, lab).is_magic
