"""Exact normalized flows on ranked posets.

Feasibility of each consecutive-rank layer is a transportation problem with
rational supplies ``nu(a) nu(B)`` and demands ``nu(b) nu(A)``.  Clearing
denominators turns it into an integral max-flow; saturating every supply
gives a certificate, anything less yields a Hall-violating set from the
residual min cut.  No tolerance appears anywhere: all comparisons are exact.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .errors import AutomorphismError, ConsistencyError, DomainError, ParameterError
from .maxflow import FlowNetwork
from .poset import RankedPoset, Weights, orbit_owner, unit_weights


@dataclass
class FlowLayer:
    """Flow values on the Hasse edges between rank ``rank`` and ``rank + 1``."""

    rank: int
    pairs: np.ndarray                  # (E, 2) element indices, lower then upper
    values: list[Fraction]

    def as_dict(self) -> dict[tuple[int, int], Fraction]:
        return {(int(x), int(y)): v for (x, y), v in zip(self.pairs.tolist(), self.values)}


@dataclass
class FlowCertificate:
    layers: list[FlowLayer] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "layers": [
                {
                    "rank": layer.rank,
                    "edges": [[x, y, v.numerator, v.denominator]
                              for (x, y), v in zip(layer.pairs.tolist(), layer.values)],
                }
                for layer in self.layers
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FlowCertificate":
        layers = []
        for layer in doc["layers"]:
            edges = layer["edges"]
            pairs = np.array([[e[0], e[1]] for e in edges], dtype=np.int64).reshape(-1, 2)
            values = [Fraction(e[2], e[3]) for e in edges]
            layers.append(FlowLayer(int(layer["rank"]), pairs, values))
        return cls(layers)


@dataclass
class CutWitness:
    """``S`` in rank ``rank`` with ``nu(S)/nu(P_i) > nu(N(S))/nu(P_{i+1})``."""

    rank: int
    subset: tuple[int, ...]
    neighborhood: tuple[int, ...]
    lhs: Fraction
    rhs: Fraction

    def to_dict(self) -> dict:
        return {
            "kind": "cut",
            "rank": self.rank,
            "subset": list(self.subset),
            "neighborhood": list(self.neighborhood),
            "comparison": {"lhs": [self.lhs.numerator, self.lhs.denominator],
                           "rhs": [self.rhs.numerator, self.rhs.denominator],
                           "relation": "lhs > rhs"},
        }


def layer_flow(A: Sequence[int], B: Sequence[int], edges, nu, rank: int = 0) -> FlowLayer | CutWitness:
    """Decide exactly whether the bipartite layer ``(A, B, edges)`` carries a normalized flow."""
    A = [int(a) for a in A]
    B = [int(b) for b in B]
    if not A or not B:
        raise ParameterError("layer_flow needs both sides non-empty")
    nu_A = sum((Fraction(nu[a]) for a in A), Fraction(0))
    nu_B = sum((Fraction(nu[b]) for b in B), Fraction(0))
    if nu_A <= 0 or nu_B <= 0:
        raise ParameterError("each side of a layer needs positive total weight")
    supply = [Fraction(nu[a]) * nu_B for a in A]
    demand = [Fraction(nu[b]) * nu_A for b in B]
    scale = 1
    for v in supply + demand:
        scale = lcm(scale, v.denominator)
    isup = [int(v * scale) for v in supply]
    idem = [int(v * scale) for v in demand]
    total = sum(isup)

    pos_a = {a: k for k, a in enumerate(A)}
    pos_b = {b: k for k, b in enumerate(B)}
    edge_list = sorted({(int(x), int(y)) for x, y in edges})
    for x, y in edge_list:
        if x not in pos_a or y not in pos_b:
            raise ParameterError(f"edge ({x}, {y}) does not join the two sides")

    na = len(A)
    source, sink = 0, na + len(B) + 1
    net = FlowNetwork(sink + 1)
    for k in range(na):
        net.add_edge(source, 1 + k, isup[k])
    mid = [net.add_edge(1 + pos_a[x], 1 + na + pos_b[y], total) for x, y in edge_list]
    for k in range(len(B)):
        net.add_edge(1 + na + k, sink, idem[k])
    value = net.max_flow(source, sink)

    if value == total:
        denom = scale * nu_A * nu_B
        pairs = np.array(edge_list, dtype=np.int64).reshape(-1, 2)
        return FlowLayer(rank, pairs, [Fraction(net.flow_on(e)) / denom for e in mid])

    seen = net.reachable(source)
    subset = [a for k, a in enumerate(A) if seen[1 + k]]
    chosen = set(subset)
    nbhd = sorted({y for x, y in edge_list if x in chosen})
    lhs = sum((Fraction(nu[a]) for a in subset), Fraction(0)) / nu_A
    rhs = sum((Fraction(nu[b]) for b in nbhd), Fraction(0)) / nu_B
    if not lhs > rhs:
        raise ConsistencyError("min cut did not produce a Hall violation")
    return CutWitness(rank, tuple(subset), tuple(nbhd), lhs, rhs)


def normalized_flow(P: RankedPoset, nu: Weights | None = None) -> FlowCertificate | CutWitness:
    """Certificate on every consecutive rank pair, or the first failing layer's witness."""
    nu = nu if nu is not None else unit_weights(P)
    cert = FlowCertificate()
    for i in range(P.rank):
        result = layer_flow(P.levels[i], P.levels[i + 1], P.layer_covers(i).tolist(), nu, rank=i)
        if isinstance(result, CutWitness):
            return result
        cert.layers.append(result)
    return cert


def verify_flow(P: RankedPoset, nu: Weights | None, cert: FlowCertificate) -> bool:
    """Re-check both vertex-sum families exactly, independently of how ``cert`` was made."""
    if not P.is_ranked:
        return False
    nu = nu if nu is not None else unit_weights(P)
    if len(cert.layers) != P.rank or [layer.rank for layer in cert.layers] != list(range(P.rank)):
        return False
    cover_set = {(int(x), int(y)) for x, y in P.covers.tolist()}
    for i, layer in enumerate(cert.layers):
        lower, upper = P.levels[i].tolist(), P.levels[i + 1].tolist()
        nu_lo = sum((Fraction(nu[x]) for x in lower), Fraction(0))
        nu_up = sum((Fraction(nu[y]) for y in upper), Fraction(0))
        if nu_lo <= 0 or nu_up <= 0:
            return False
        out_sum: dict[int, Fraction] = defaultdict(Fraction)
        in_sum: dict[int, Fraction] = defaultdict(Fraction)
        seen = set()
        for (x, y), v in zip(layer.pairs.tolist(), layer.values):
            if (x, y) in seen or (x, y) not in cover_set or P.ranks[x] != i:
                return False
            if v < 0:
                return False
            seen.add((x, y))
            out_sum[x] += v
            in_sum[y] += v
        if any(out_sum[x] != Fraction(nu[x]) / nu_lo for x in lower):
            return False
        if any(in_sum[y] != Fraction(nu[y]) / nu_up for y in upper):
            return False
    return True


def _check_regular(ends: np.ndarray, other: np.ndarray, owner: np.ndarray, k: int,
                   orbit_size: np.ndarray) -> None:
    """Every vertex of an orbit meets each adjacent fibre with one common degree."""
    vk, deg = np.unique(ends.astype(np.int64) * k + other, return_counts=True)
    blk = owner[vk // k] * k + vk % k
    order = np.argsort(blk, kind="stable")
    blk, deg = blk[order], deg[order]
    keys, start, count = np.unique(blk, return_index=True, return_counts=True)
    lo = np.minimum.reduceat(deg, start)
    hi = np.maximum.reduceat(deg, start)
    bad = np.flatnonzero((count != orbit_size[keys // k]) | (lo != hi))
    if len(bad):
        key = int(keys[bad[0]])
        raise AutomorphismError(f"fibre graph between orbits {key // k} and {key % k} is not biregular")


def lift_flow_from_quotient(P: RankedPoset, orbits, cert_q: FlowCertificate,
                            Q: RankedPoset | None = None, nu_q: Weights | None = None) -> FlowCertificate:
    """Spread each quotient edge value uniformly over the Hasse edges between its fibres.

    The fibre graphs are biregular when the orbits come from poset
    automorphisms, which makes the vertex sums close; the lifted certificate
    is re-verified on ``P`` with unit weights before it is returned.
    """
    from .poset import quotient

    if Q is None or nu_q is None:
        Q, nu_q = quotient(P, orbits)
    if not verify_flow(Q, nu_q, cert_q):
        raise DomainError("quotient certificate does not verify on the quotient poset")
    owner = orbit_owner(P.size, orbits)
    k = int(owner.max()) + 1
    orbit_size = np.bincount(owner, minlength=k)
    fq = {}
    for layer in cert_q.layers:
        fq.update(layer.as_dict())

    lifted = FlowCertificate()
    for i in range(P.rank):
        pairs = P.layer_covers(i)
        ox, oy = owner[pairs[:, 0]], owner[pairs[:, 1]]
        block_key = ox * k + oy
        keys, counts = np.unique(block_key, return_counts=True)
        edge_count = dict(zip(keys.tolist(), counts.tolist()))
        _check_regular(pairs[:, 0], oy, owner, k, orbit_size)
        _check_regular(pairs[:, 1], ox, owner, k, orbit_size)
        values = []
        for key in block_key.tolist():
            value = fq.get((key // k, key % k), Fraction(0))
            values.append(value / edge_count[key])
        lifted.layers.append(FlowLayer(i, pairs.copy(), values))
    if not verify_flow(P, None, lifted):
        raise ConsistencyError("lifted certificate failed verification")
    return lifted
