"""Prefix, codimension and absolute orders on an enumerated reflection group.

Also hosts the claw-product machinery for ``G(m,1,n)`` and the search for a
claw partition of the reflections of ``G(2,2,n)``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ParameterError, StateError
from .gmpn import GmpnElement, GmpnGroup, act, identity_element, inverse, multiply
from .permgroup import EnumeratedGroup
from .poset import RankedPoset, claw, from_covers, product


class OrderKind(enum.Enum):
    PREFIX = "prefix"
    CODIM = "codim"
    ABSOLUTE = "abs"


# -- order builders ---------------------------------------------------------------

def build_prefix_order(G: EnumeratedGroup) -> RankedPoset:
    """Covers ``u < ut`` for reflections ``t`` with ``l_R(ut) = l_R(u) + 1``."""
    G.budget.check_elements(G.order * len(G.reflections), f"cover candidates of {G.name}")
    lengths = G.reflection_lengths
    refl = np.asarray(G.reflections)
    us = np.repeat(np.arange(G.order), len(refl))
    uts = G.mul(us, np.tile(refl, G.order))
    keep = lengths[uts] == lengths[us] + 1
    covers = np.stack([us[keep], uts[keep]], axis=1)
    return RankedPoset(G.labels, np.unique(covers, axis=0), lengths.copy())


def relation_matrix(G: EnumeratedGroup, values: np.ndarray, chunk_elems: int = 1 << 21) -> np.ndarray:
    """``R[u, v]`` iff ``values[u] + values[u^-1 v] == values[v]`` (pairwise build)."""
    G.budget.check_pairwise(G.order)
    n = G.order
    out = np.empty((n, n), dtype=bool)
    step = max(1, chunk_elems // n)
    everything = np.arange(n)
    for start in range(0, n, step):
        G.budget.check_time()
        rows = np.arange(start, min(n, start + step))
        prods = G.mul(G.inverses[rows][:, None], everything[None, :])
        out[rows] = values[rows][:, None] + values[prods] == values[None, :]
    return out


def reduce_relation(rel: np.ndarray) -> np.ndarray:
    """Cover pairs of a partial order given as a reflexive boolean matrix."""
    strict = rel.copy()
    np.fill_diagonal(strict, False)
    sf = strict.astype(np.float32)
    # Entries count intermediate elements; exact in float32 for N < 2**24.
    between = (sf @ sf) > 0
    return np.argwhere(strict & ~between)


def build_codim_order(G: EnumeratedGroup) -> RankedPoset:
    """Codimension order from the pairwise relation, transitively reduced."""
    rel = relation_matrix(G, G.codims)
    covers = reduce_relation(rel)
    return from_covers(G.labels, covers, reduced=True)


def build_pairwise_prefix_order(G: EnumeratedGroup) -> RankedPoset:
    """Prefix order straight from its defining relation (cross-check path)."""
    rel = relation_matrix(G, G.reflection_lengths)
    return from_covers(G.labels, reduce_relation(rel), reduced=True)


def first_disagreement(G: EnumeratedGroup, chunk_elems: int = 1 << 21) -> tuple[int, int] | None:
    """First pair ``(u, v)`` (row-major) related in exactly one of the two orders."""
    lengths, codims = G.reflection_lengths, G.codims
    n = G.order
    step = max(1, chunk_elems // n)
    everything = np.arange(n)
    for start in range(0, n, step):
        G.budget.check_time()
        rows = np.arange(start, min(n, start + step))
        prods = G.mul(G.inverses[rows][:, None], everything[None, :])
        pre = lengths[rows][:, None] + lengths[prods] == lengths[None, :]
        co = codims[rows][:, None] + codims[prods] == codims[None, :]
        bad = np.argwhere(pre != co)
        if len(bad):
            return int(rows[bad[0, 0]]), int(bad[0, 1])
    return None


def orders_agree(G: EnumeratedGroup, pairwise: bool = False) -> bool:
    """Whether the prefix and codimension relations coincide.

    Identical length and codimension functions give identical relations, so
    the pairwise comparison only runs when they differ (or when forced).
    """
    if not pairwise and np.array_equal(G.reflection_lengths, G.codims):
        return True
    return first_disagreement(G) is None


def build_order(G: EnumeratedGroup, kind: OrderKind | str) -> RankedPoset:
    kind = OrderKind(kind)
    if kind is OrderKind.PREFIX:
        return build_prefix_order(G)
    if kind is OrderKind.CODIM:
        return build_codim_order(G)
    # Fail on the cover budget before paying for lengths and the agreement test.
    G.budget.check_elements(G.order * len(G.reflections), f"cover candidates of {G.name}")
    if not orders_agree(G):
        u, v = first_disagreement(G)
        raise StateError(
            f"prefix and codimension orders of {G.name} differ, e.g. on the pair "
            f"{G.label(u)} <= {G.label(v)}; the absolute order is undefined"
        )
    return build_prefix_order(G)


def is_complete_bipartite_layers(P: RankedPoset) -> bool:
    """Every element of rank i is covered by every element of rank i+1."""
    sizes = P.rank_sizes
    return all(len(P.layer_covers(i)) == sizes[i] * sizes[i + 1] for i in range(len(sizes) - 1))


# -- claw products for G(m,1,n) ------------------------------------------------------

def _require_gm1n(G) -> None:
    if not isinstance(G, GmpnGroup) or G.p != 1:
        raise ParameterError("claw decomposition needs a group in the family G(m,1,n)")


def claw_blocks(G: GmpnGroup) -> list[np.ndarray]:
    """Reflection blocks ``T_1..T_n``: ``T_j`` moves coordinate j and nothing larger."""
    _require_gm1n(G)
    blocks = [[] for _ in range(G.n)]
    for t in G.reflections:
        moved = [k for k in range(G.n) if G.sigma[t, k] != k or G.a[t, k] != 0]
        blocks[max(moved)].append(int(t))
    return [np.array(sorted(b), dtype=np.int64) for b in blocks]


def claw_decompose(G: GmpnGroup, w: GmpnElement) -> tuple[GmpnElement, ...]:
    """Unique factors ``(x_1, ..., x_n)``, ``x_j`` in ``T_j`` or identity, with ``w = x_1 ... x_n``."""
    _require_gm1n(G)
    m, n = G.m, G.n
    ident = identity_element(m, 1, n)
    factors = [ident] * n
    cur = w
    for j in reversed(range(n)):
        c, k = act(inverse(cur), 0, j)
        if k == j and c == 0:
            continue
        a = [0] * n
        sigma = list(range(n))
        if k != j:
            # Transposition-like reflection sending (c, k) to (0, j).
            a[k], a[j] = (-c) % m, c
            sigma[k], sigma[j] = j, k
        else:
            a[j] = (-c) % m
        x = GmpnElement(m, 1, tuple(a), tuple(sigma))
        factors[j] = x
        cur = multiply(cur, inverse(x))
    if cur != ident:
        raise ConsistencyError(f"peel-off of {w} left {cur}")
    return tuple(factors)


@dataclass
class ClawLabeling:
    """Reflection blocks, the claw product they label, and the bijection to the group."""

    blocks: list[np.ndarray]
    product: RankedPoset
    element_of: np.ndarray      # product index -> group element index
    factors: np.ndarray         # group element index -> factor indices (identity where absent)
    block_order: tuple[int, ...]


def _tuple_products(G: EnumeratedGroup, choices: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """All products ``x_1 ... x_k`` with ``x_j`` from ``choices[j]``, in lexicographic tuple order."""
    grids = np.meshgrid(*[np.arange(len(c)) for c in choices], indexing="ij")
    picks = np.stack([g.ravel() for g in grids], axis=1)
    factors = np.stack([choices[j][picks[:, j]] for j in range(len(choices))], axis=1)
    prod_ = np.full(len(factors), G.identity, dtype=np.int64)
    for j in range(len(choices)):
        prod_ = G.mul(prod_, factors[:, j])
    return prod_, factors


def verify_claw_embedding(G: EnumeratedGroup, blocks: list[np.ndarray]) -> tuple[bool, str]:
    """Check that ``x -> x_1 ... x_k`` embeds the claw product into the prefix order.

    Checks bijectivity, rank preservation (rank = number of non-identity
    factors) and that every cover of the claw product (dropping one factor)
    is a relation of the prefix order.
    """
    choices = [np.concatenate([[G.identity], b]).astype(np.int64) for b in blocks]
    elems, factors = _tuple_products(G, choices)
    if len(elems) != G.order or len(np.unique(elems)) != G.order:
        return False, "not a bijection onto the group"
    lengths = G.reflection_lengths
    nonid = (factors != G.identity).sum(axis=1)
    if np.any(lengths[elems] != nonid):
        return False, "rank in the claw product differs from reflection length"
    for j in range(len(blocks)):
        rows = np.flatnonzero(factors[:, j] != G.identity)
        dropped = factors[rows].copy()
        dropped[:, j] = G.identity
        lower = np.full(len(rows), G.identity, dtype=np.int64)
        for k in range(len(blocks)):
            lower = G.mul(lower, dropped[:, k])
        upper = elems[rows]
        gap = G.mul(G.inverses[lower], upper)
        if np.any(lengths[lower] + lengths[gap] != lengths[upper]):
            return False, "a claw-product cover is not a prefix-order relation"
    return True, "ok"


def claw_product_poset(sizes: list[int]) -> RankedPoset:
    """``C_{s_1 + 1} x C_{s_2 + 1} x ...`` for block sizes ``s_j >= 1``."""
    poset = None
    for s in sizes:
        factor = claw(s + 1)
        poset = factor if poset is None else product(poset, factor)[0]
    return poset


def claw_embedding(G: GmpnGroup) -> ClawLabeling:
    """Label ``G(m,1,n)`` by ``C_m x C_2m x ... x C_nm`` and verify the coarsening."""
    _require_gm1n(G)
    blocks = claw_blocks(G)
    for j, block in enumerate(blocks, start=1):
        if len(block) != j * G.m - 1:
            raise ConsistencyError(f"|T_{j}| = {len(block)}, expected {j * G.m - 1}")
    used = [b for b in blocks if len(b)]
    ok, why = verify_claw_embedding(G, used)
    if not ok:
        raise ConsistencyError(f"claw embedding of {G.name} failed: {why}")
    choices = [np.concatenate([[G.identity], b]).astype(np.int64) for b in used]
    elems, used_factors = _tuple_products(G, choices)
    full = np.full((G.order, G.n), G.identity, dtype=np.int64)
    cols = [j for j, b in enumerate(blocks) if len(b)]
    full[np.ix_(elems, cols)] = used_factors
    for w in range(G.order):
        peeled = claw_decompose(G, G.element(w))
        if [G.index(x) for x in peeled] != full[w].tolist():
            raise ConsistencyError(f"peel-off disagrees with the claw labeling at {G.label(w)}")
    poset = claw_product_poset([len(b) for b in used])
    return ClawLabeling(blocks, poset, elems, full, tuple(cols))


# -- claw partitions for G(2,2,n) -------------------------------------------------------

def _max_intersecting_pairs(n: int) -> int:
    """Largest family of pairwise-intersecting 2-subsets of an n-set."""
    if n < 2:
        return 0
    if n == 2:
        return 1
    return max(n - 1, 3)


def _pairwise_intersecting(pairs: list[frozenset]) -> bool:
    return all(a & b for a, b in itertools.combinations(pairs, 2))


@dataclass
class ClawPartition:
    blocks: list[list[int]]           # group element indices, in product order
    sizes: tuple[int, ...]


def claw_partition_search(G: GmpnGroup) -> ClawPartition | None:
    """Partition the reflections of ``G(2,2,n)`` into blocks of sizes
    ``1, 3, ..., 2n-3, n-1`` whose claw product embeds into the absolute order.

    Blocks must have injective, pairwise-intersecting pair images; surviving
    partitions are checked by :func:`verify_claw_embedding` under every
    ordering of the blocks in the product.
    """
    if not isinstance(G, GmpnGroup) or (G.m, G.p) != (2, 2) or G.n < 2:
        raise ParameterError("claw partition search is defined for G(2,2,n), n >= 2")
    n = G.n
    sizes = [2 * k - 1 for k in range(1, n)] + [n - 1]
    if max(sizes) > _max_intersecting_pairs(n):
        return None
    refl = [int(t) for t in G.reflections]

    def phi(t):
        return frozenset(k for k in range(n) if G.sigma[t, k] != k)

    refl.sort(key=lambda t: (sorted(phi(t)), t))
    images = {t: phi(t) for t in refl}
    blocks: list[list[int]] = [[] for _ in sizes]

    def fits(t, block):
        return all(images[t] != images[u] and images[t] & images[u] for u in block)

    def backtrack(i):
        if i == len(refl):
            for order in itertools.permutations(range(len(blocks))):
                arranged = [np.array(blocks[k]) for k in order if blocks[k]]
                if verify_claw_embedding(G, arranged)[0]:
                    yield ClawPartition([list(blocks[k]) for k in order], tuple(sizes[k] for k in order))
                    return
            return
        t = refl[i]
        tried_empty = set()
        for k, block in enumerate(blocks):
            if len(block) >= sizes[k] or not fits(t, block):
                continue
            if not block:
                # Empty blocks of equal capacity are interchangeable.
                if sizes[k] in tried_empty:
                    continue
                tried_empty.add(sizes[k])
            block.append(t)
            yield from backtrack(i + 1)
            block.pop()

    return next(backtrack(0), None)
