import itertools
import random

import networkx as nx
import pytest

from absorder.errors import ResourceError
from absorder.flow import FlowCertificate, normalized_flow
from absorder.orders import build_codim_order, build_order, build_prefix_order
from absorder.poset import chain, claw, from_covers, rank_polynomial
from absorder.reproduce import power_witness
from absorder.sperner import (
    SpernerStatus, is_antichain, k_family_size, k_family_table, max_antichain, rank_conflict_to_dict,
    sperner_report, verify_witness,
)
from absorder.poset import is_ranked

from conftest import group, random_ranked_poset, random_sizes

# Ranked poset, sizes (1, 5, 2, 2), whose largest antichain fits in a rank
# but whose largest 2-family (8) exceeds the two largest ranks (7).
KFAMILY_COVERS = [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 6), (2, 7), (3, 6), (4, 7), (5, 6), (6, 8), (6, 9)]


def kfamily_example():
    return from_covers([str(i) for i in range(10)], KFAMILY_COVERS)


def closure(P):
    """Strict order relation from networkx, independent of the package's reachability sets."""
    g = nx.DiGraph()
    g.add_nodes_from(range(P.size))
    g.add_edges_from(map(tuple, P.covers.tolist()))
    return nx.transitive_closure_dag(g)


def brute_k_families(P, kmax):
    """Largest subsets whose longest chain has at most k elements, by enumerating all subsets."""
    tc = closure(P)
    best = [0] * (kmax + 1)
    for mask in range(1 << P.size):
        members = [x for x in range(P.size) if mask >> x & 1]
        sub = tc.subgraph(members)
        height = nx.dag_longest_path_length(sub) + 1 if members else 0
        for k in range(height, kmax + 1):
            best[k] = max(best[k], len(members))
    return best


def random_poset(rng, n, p):
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return from_covers([str(i) for i in range(n)], edges)


# -- antichains ----------------------------------------------------------------------

def test_max_antichain_examples():
    assert len(max_antichain(chain(5)).elements) == 1
    assert len(max_antichain(claw(6)).elements) == 5
    P = build_codim_order(group(4, 2, 2))
    anti = max_antichain(P)
    assert len(anti.elements) == 9 and max(P.rank_sizes) == 8
    assert is_antichain(P, anti.elements)


@pytest.mark.parametrize("seed", range(100))
def test_max_antichain_matches_dilworth(seed):
    rng = random.Random(seed)
    P = random_poset(rng, rng.randint(1, 30), rng.choice([0.05, 0.15, 0.4]))
    anti = max_antichain(P)
    assert is_antichain(P, anti.elements)
    # Dilworth: width = n - maximum matching in the bipartite split of the comparability graph.
    tc = closure(P)
    B = nx.Graph()
    left = [("l", x) for x in range(P.size)]
    B.add_nodes_from(left)
    B.add_nodes_from(("r", x) for x in range(P.size))
    B.add_edges_from((("l", x), ("r", y)) for x, y in tc.edges())
    matching = nx.bipartite.hopcroft_karp_matching(B, top_nodes=left)
    assert len(anti.elements) == P.size - len(matching) // 2


# -- k-families ----------------------------------------------------------------------

def test_k_family_examples():
    assert k_family_size(chain(5), 2) == 2
    assert k_family_size(claw(4), 1) == 3
    assert k_family_size(claw(4), 2) == 4
    assert k_family_size(kfamily_example(), 2) == 8
    with pytest.raises(ResourceError):
        k_family_size(chain(21), 1)


@pytest.mark.parametrize("seed", range(200))
def test_k_family_matches_enumeration(seed):
    rng = random.Random(seed)
    P = random_poset(rng, 10, rng.choice([0.1, 0.25, 0.5]))
    table = k_family_table(P)
    expect = brute_k_families(P, len(table) - 1)
    assert [size for size, _ in table] == expect
    tc = closure(P)
    for k, (size, mask) in enumerate(table):
        members = [x for x in range(P.size) if mask >> x & 1]
        assert len(members) == size
        assert (nx.dag_longest_path_length(tc.subgraph(members)) + 1 if members else 0) <= k


def test_flow_implies_strongly_sperner():
    """A unit-weight flow forces every k-family below the k largest ranks."""
    rng = random.Random(99)
    with_flow = 0
    for _ in range(300):
        P = random_ranked_poset(rng, random_sizes(rng, 14), density=rng.choice([0.3, 0.6, 0.9]))
        if not isinstance(normalized_flow(P), FlowCertificate):
            continue
        with_flow += 1
        ordered = sorted(P.rank_sizes, reverse=True)
        for k, (size, _) in enumerate(k_family_table(P)):
            assert size <= sum(ordered[:k])
    assert with_flow >= 50


# -- reports -------------------------------------------------------------------------

def test_report_positive():
    r = sperner_report(build_order(group(2, 1, 2), "abs"))
    assert r.status is SpernerStatus.POSITIVE and r.certificate is not None


def test_report_negative_by_antichain():
    P = build_codim_order(group(4, 2, 2))
    r = sperner_report(P)
    assert r.status is SpernerStatus.NEGATIVE
    assert verify_witness(P, r.antichain.to_dict(P))
    assert verify_witness(P, r.cut.to_dict())


def test_report_negative_by_k_family():
    P = kfamily_example()
    r = sperner_report(P)
    assert len(r.antichain.elements) <= max(P.rank_sizes)
    assert r.status is SpernerStatus.NEGATIVE
    bad = [f for f in r.k_families if f["max_family"] > f["rank_bound"]]
    assert bad and bad[0]["k"] == 2
    assert verify_witness(P, {"kind": "k-family", "k": 2, "family": bad[0]["family"]})


def test_report_inconclusive_pendant():
    # a < c with b isolated at rank 0: no flow, yet every k-family fits.
    P = from_covers(["a", "b", "c"], [(0, 2)], ranks=[0, 0, 1])
    r = sperner_report(P)
    assert r.status is SpernerStatus.INCONCLUSIVE
    assert r.cut.subset == (1,)
    assert [f["max_family"] <= f["rank_bound"] for f in r.k_families] == [True, True]


@pytest.mark.parametrize("seed", range(150))
def test_report_consistent_with_direct_check(seed):
    rng = random.Random(seed)
    P = random_ranked_poset(rng, random_sizes(rng, 12), density=0.3)
    r = sperner_report(P)
    ordered = sorted(P.rank_sizes, reverse=True)
    violated = any(size > sum(ordered[:k]) for k, (size, _) in enumerate(k_family_table(P)))
    if r.status is SpernerStatus.POSITIVE:
        assert not violated
    else:
        assert (r.status is SpernerStatus.NEGATIVE) == violated


# -- witnesses -----------------------------------------------------------------------

def test_antichain_witness_rejections():
    P = build_codim_order(group(4, 2, 2))
    elems = list(max_antichain(P).elements)
    assert verify_witness(P, {"kind": "antichain", "elements": elems})
    assert not verify_witness(P, {"kind": "antichain", "elements": elems[:-1]})
    x, y = map(int, P.covers[0])
    assert not verify_witness(P, {"kind": "antichain", "elements": [x, y] + elems[2:]})
    assert not verify_witness(P, {"kind": "antichain", "elements": elems[:-1] + [10**6]})
    assert not verify_witness(P, {"kind": "unknown"})


def test_rank_conflict_witness():
    P = build_codim_order(group(4, 2, 4))
    conflict = is_ranked(P)
    doc = rank_conflict_to_dict(conflict)
    assert verify_witness(P, doc)
    bad = dict(doc, path_b=doc["path_a"])
    assert not verify_witness(P, bad)


def test_cut_witness_rejections():
    P = build_prefix_order(group(10, 5, 3))
    cut = normalized_flow(P)
    doc = cut.to_dict()
    assert verify_witness(P, doc)
    assert not verify_witness(P, dict(doc, subset=[]))
    assert not verify_witness(P, dict(doc, rank=doc["rank"] + 1))


def test_power_witness():
    P = build_prefix_order(group(10, 5, 3))
    low = [x for x in P.maximal_elements() if P.ranks[x] == 3]
    doc = power_witness(P, int(low[0]), 12)
    assert verify_witness(P, doc)
    assert (rank_polynomial(P) ** 12).argmax() == 37
    top = [x for x in P.maximal_elements() if P.ranks[x] == P.rank][0]
    assert not verify_witness(P, dict(doc, element=int(top)))
    non_max = next(int(x) for x in P.levels[3] if len(P.upper_covers[int(x)]))
    assert not verify_witness(P, dict(doc, element=non_max))


def test_k_family_witness_rejections():
    P = kfamily_example()
    fam = [1, 2, 3, 4, 5, 7, 8, 9]
    assert verify_witness(P, {"kind": "k-family", "k": 2, "family": fam})
    # Contains the 3-chain 1 < 6 < 8.
    assert not verify_witness(P, {"kind": "k-family", "k": 2, "family": [1, 2, 3, 4, 6, 7, 8, 9]})
    assert not verify_witness(P, {"kind": "k-family", "k": 2, "family": fam[:-1]})
    assert not verify_witness(P, {"kind": "k-family", "k": 2, "family": fam[:-1] + [1]})


def test_every_subset_of_antichain_is_antichain():
    P = claw(5)
    for r in range(5):
        for sub in itertools.combinations(range(1, 5), r):
            assert is_antichain(P, sub)
    assert not is_antichain(P, [0, 1])
