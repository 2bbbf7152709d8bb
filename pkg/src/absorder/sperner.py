"""Antichains, k-families and the three-way Sperner report."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import ConsistencyError, ResourceError
from .flow import CutWitness, FlowCertificate, normalized_flow, verify_flow
from .poset import RankConflict, RankedPoset, Weights

KFAMILY_BUDGET = 20


@dataclass(frozen=True)
class AntichainWitness:
    elements: tuple[int, ...]

    def to_dict(self, P: RankedPoset | None = None) -> dict:
        doc = {"kind": "antichain", "elements": list(self.elements)}
        if P is not None and P.is_ranked:
            doc["comparison"] = {"lhs": [len(self.elements), 1], "rhs": [max(P.rank_sizes), 1],
                                 "relation": "lhs > rhs"}
        return doc


def is_antichain(P: RankedPoset, elements) -> bool:
    elements = [int(x) for x in elements]
    mask = 0
    for x in elements:
        mask |= 1 << x
    return len(set(elements)) == len(elements) and all(not (P.up_sets[x] & mask) for x in elements)


def max_antichain(P: RankedPoset) -> AntichainWitness:
    """Maximum antichain via a maximum matching on the strict comparability graph.

    By Dilworth/König the unmatched structure yields a vertex cover of size
    ``|M|``; elements with neither copy in the cover form an antichain of size
    ``|P| - |M|``.
    """
    n = P.size
    if n == 0:
        return AntichainWitness(())
    comp = csr_matrix(P.comparability_matrix())
    match_left = maximum_bipartite_matching(comp, perm_type="column")
    match_right = np.full(n, -1, dtype=np.int64)
    for x, y in enumerate(match_left.tolist()):
        if y >= 0:
            match_right[y] = x
    # Alternating reachability from unmatched left vertices.
    in_z_left = np.zeros(n, dtype=bool)
    in_z_right = np.zeros(n, dtype=bool)
    stack = [x for x in range(n) if match_left[x] < 0]
    in_z_left[stack] = True
    indptr, indices = comp.indptr, comp.indices
    while stack:
        x = stack.pop()
        for y in indices[indptr[x]:indptr[x + 1]].tolist():
            if not in_z_right[y]:
                in_z_right[y] = True
                x2 = match_right[y]
                if x2 >= 0 and not in_z_left[x2]:
                    in_z_left[x2] = True
                    stack.append(int(x2))
    chosen = np.flatnonzero(in_z_left & ~in_z_right)
    matched = int(np.sum(match_left >= 0))
    if len(chosen) != n - matched or not is_antichain(P, chosen):
        raise ConsistencyError("König construction did not produce a maximum antichain")
    return AntichainWitness(tuple(int(x) for x in chosen))


def _linear_extension(P: RankedPoset) -> list[int]:
    from .poset import _topological_order
    return _topological_order(P.size, P.covers)


def k_family_table(P: RankedPoset, budget: int = KFAMILY_BUDGET) -> list[tuple[int, int]]:
    """For ``k = 0..height``, the largest union of ``k`` antichains and a witness bitmask.

    A set is a union of ``k`` antichains iff its longest chain has at most
    ``k`` elements.  The longest chain in every subset is computed by a DP
    over bitmasks, with elements renumbered along a linear extension so the
    last element of a subset is maximal in it.
    """
    n = P.size
    if n > budget:
        raise ResourceError(f"brute-force k-family needs |P| <= {budget}, got {n}")
    topo = _linear_extension(P)
    pos = {x: i for i, x in enumerate(topo)}
    below = np.zeros(n, dtype=np.int64)
    for x in range(n):
        bits = 0
        for y in range(n):
            if y != x and P.leq(y, x):
                bits |= 1 << pos[y]
        below[pos[x]] = bits
    height = np.zeros(1 << n, dtype=np.int8)
    for i in range(n):
        low = np.arange(1 << i, dtype=np.int64)
        height[(1 << i) + low] = np.maximum(height[low], 1 + height[low & below[i]])
    sizes = np.zeros(1 << n, dtype=np.int8)
    for i in range(n):
        sizes[1 << i:1 << (i + 1)] = sizes[: 1 << i] + 1
    table = []
    for k in range(int(height.max()) + 1):
        candidates = np.flatnonzero(height <= k)
        best = candidates[np.argmax(sizes[candidates])]
        mask = 0
        for i in range(n):
            if best >> i & 1:
                mask |= 1 << topo[i]
        table.append((int(sizes[best]), mask))
    return table


def k_family_size(P: RankedPoset, k: int, budget: int = KFAMILY_BUDGET) -> int:
    """Maximum size of a union of ``k`` antichains (brute force, ``|P| <= budget``)."""
    table = k_family_table(P, budget)
    return table[min(k, len(table) - 1)][0]


def _mask_elements(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


class SpernerStatus(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SpernerReport:
    status: SpernerStatus
    rank_sizes: tuple[int, ...]
    certificate: FlowCertificate | None = None
    antichain: AntichainWitness | None = None
    cut: CutWitness | None = None
    k_families: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        doc = {"status": self.status.value, "rank_sizes": list(self.rank_sizes)}
        if self.antichain is not None:
            doc["antichain"] = list(self.antichain.elements)
        if self.cut is not None:
            doc["cut"] = self.cut.to_dict()
        if self.k_families:
            doc["k_families"] = self.k_families
        return doc


def sperner_report(P: RankedPoset, nu: Weights | None = None, budget: int = KFAMILY_BUDGET) -> SpernerReport:
    """POSITIVE with a flow certificate, NEGATIVE with a witness, or INCONCLUSIVE.

    A normalized flow with unit weights implies strongly Sperner; its absence
    refutes nothing, so without a flow the report only turns NEGATIVE when an
    antichain (or, for small posets, a k-family) beats the k largest ranks.
    """
    sizes = P.rank_sizes
    result = normalized_flow(P, nu)
    if isinstance(result, FlowCertificate):
        return SpernerReport(SpernerStatus.POSITIVE, sizes, certificate=result)
    anti = max_antichain(P)
    if len(anti.elements) > max(sizes):
        return SpernerReport(SpernerStatus.NEGATIVE, sizes, antichain=anti, cut=result)
    report = SpernerReport(SpernerStatus.INCONCLUSIVE, sizes, antichain=anti, cut=result)
    if P.size <= budget:
        ordered = sorted(sizes, reverse=True)
        for k, (size, mask) in enumerate(k_family_table(P, budget)):
            if k == 0:
                continue
            bound = sum(ordered[:k])
            report.k_families.append({"k": k, "max_family": size, "rank_bound": bound,
                                      "family": list(_mask_elements(mask))})
            if size > bound:
                report.status = SpernerStatus.NEGATIVE
    return report


# -- witness documents ------------------------------------------------------------

def rank_conflict_to_dict(conflict: RankConflict) -> dict:
    return {
        "kind": "rank-conflict",
        "element": conflict.element,
        "path_a": list(conflict.path_a),
        "path_b": list(conflict.path_b),
        "comparison": {"lhs": [len(conflict.path_a) - 1, 1], "rhs": [len(conflict.path_b) - 1, 1],
                       "relation": "lhs != rhs"},
    }


def _longest_chain(P: RankedPoset, subset) -> int:
    """Number of elements in a longest chain inside ``subset`` (ranks give a linear extension)."""
    members = sorted(subset, key=lambda x: (int(P.ranks[x]), x))
    best = {}
    for i, y in enumerate(members):
        best[y] = 1 + max((best[x] for x in members[:i] if P.leq(x, y)), default=0)
    return max(best.values(), default=0)


def verify_witness(P: RankedPoset, doc: dict, nu: Weights | None = None) -> bool:
    """Independently re-check a witness document against ``P``."""
    kind = doc.get("kind")
    if kind == "antichain":
        elems = doc["elements"]
        if not all(isinstance(x, int) and 0 <= x < P.size for x in elems):
            return False
        if not is_antichain(P, elems):
            return False
        return not P.is_ranked or len(elems) > max(P.rank_sizes)
    if kind == "rank-conflict":
        a, b = doc["path_a"], doc["path_b"]
        covers = {(int(x), int(y)) for x, y in P.covers.tolist()}
        ok_paths = all((x, y) in covers for path in (a, b) for x, y in zip(path, path[1:]))
        return (ok_paths and a[0] == b[0] and a[-1] == b[-1] == doc["element"]
                and len(a) != len(b) and a[0] in P.minimal_elements())
    if kind == "k-family":
        k, family = doc.get("k"), doc.get("family")
        if not (isinstance(k, int) and isinstance(family, list) and P.is_ranked):
            return False
        if not all(isinstance(x, int) and 0 <= x < P.size for x in family) or len(set(family)) != len(family):
            return False
        return _longest_chain(P, family) <= k and len(family) > sum(sorted(P.rank_sizes, reverse=True)[:k])
    if kind == "power-maximal":
        # (m,...,m) is maximal in P^k of rank k*rank(m); if the largest rank of
        # P^k lies above it, that element plus the largest rank is an antichain.
        from .poset import rank_polynomial
        x, k = doc.get("element"), doc.get("power")
        if not (isinstance(x, int) and isinstance(k, int) and 0 <= x < P.size and k >= 1) or not P.is_ranked:
            return False
        if len(P.upper_covers[x]):
            return False
        return (rank_polynomial(P) ** k).argmax() > k * int(P.ranks[x])
    if kind == "cut":
        if not P.is_ranked:
            return False
        i = doc["rank"]
        nu = nu if nu is not None else (Fraction(1),) * P.size
        lower, upper = set(P.levels[i].tolist()), P.levels[i + 1].tolist()
        subset = set(doc["subset"])
        if not subset <= lower:
            return False
        nbhd = {int(y) for x, y in P.layer_covers(i).tolist() if x in subset}
        nu_lo = sum((Fraction(nu[x]) for x in lower), Fraction(0))
        nu_up = sum((Fraction(nu[y]) for y in upper), Fraction(0))
        lhs = sum((Fraction(nu[x]) for x in subset), Fraction(0)) / nu_lo
        rhs = sum((Fraction(nu[y]) for y in nbhd), Fraction(0)) / nu_up
        return lhs > rhs
    return False


def verify_certificate_doc(P: RankedPoset, doc: dict, nu: Weights | None = None) -> bool:
    return verify_flow(P, nu, FlowCertificate.from_dict(doc))
