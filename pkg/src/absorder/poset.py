"""Finite posets stored by their cover relations, with rank machinery.

Elements are the integers ``0..N-1``; labels live in a separate table so
group-element labels never enter hot loops.  Covers are kept as a sorted
``(E, 2)`` integer array of pairs ``(x, y)`` with ``x`` covered by ``y``, and
are always a transitive reduction.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .budget import DEFAULT_ELEMENT_BUDGET
from .errors import (AutomorphismError, ParameterError, ResourceError, SchemaError,
                     ShapeError, StateError, StructuralError)

Weights = tuple  # tuple[Fraction, ...], one nonnegative rational per element


class RankedPoset:
    """Immutable finite poset; ``ranks`` is ``None`` when no rank function exists."""

    def __init__(self, labels: Sequence[str], covers: np.ndarray, ranks: np.ndarray | None):
        self.labels = tuple(labels)
        self.covers = covers
        self.ranks = ranks
        self.covers.setflags(write=False)
        if ranks is not None:
            self.ranks.setflags(write=False)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankedPoset):
            return NotImplemented
        if self.labels != other.labels or not np.array_equal(self.covers, other.covers):
            return False
        if (self.ranks is None) != (other.ranks is None):
            return False
        return self.ranks is None or np.array_equal(self.ranks, other.ranks)

    __hash__ = None

    def __repr__(self) -> str:
        kind = f"rank {self.rank}" if self.is_ranked else "unranked"
        return f"RankedPoset({self.size} elements, {len(self.covers)} covers, {kind})"

    @property
    def is_ranked(self) -> bool:
        return self.ranks is not None

    @property
    def rank(self) -> int:
        self._require_ranked()
        return int(self.ranks.max()) if self.size else 0

    def _require_ranked(self) -> None:
        if self.ranks is None:
            raise StateError("poset is not ranked")

    @cached_property
    def levels(self) -> list[np.ndarray]:
        """Rank decomposition ``P_0, ..., P_r`` as sorted index arrays."""
        self._require_ranked()
        return [np.flatnonzero(self.ranks == i) for i in range(self.rank + 1)]

    @cached_property
    def rank_sizes(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)

    @cached_property
    def upper_covers(self) -> list[np.ndarray]:
        return _adjacency(self.size, self.covers[:, 0], self.covers[:, 1])

    @cached_property
    def lower_covers(self) -> list[np.ndarray]:
        return _adjacency(self.size, self.covers[:, 1], self.covers[:, 0])

    def minimal_elements(self) -> list[int]:
        has_lower = np.zeros(self.size, dtype=bool)
        has_lower[self.covers[:, 1]] = True
        return np.flatnonzero(~has_lower).tolist()

    def maximal_elements(self) -> list[int]:
        has_upper = np.zeros(self.size, dtype=bool)
        has_upper[self.covers[:, 0]] = True
        return np.flatnonzero(~has_upper).tolist()

    def layer_covers(self, i: int) -> np.ndarray:
        """Covers from rank ``i`` to rank ``i + 1``."""
        self._require_ranked()
        return self.covers[self.ranks[self.covers[:, 0]] == i]

    @cached_property
    def up_sets(self) -> list[int]:
        """Strict up-set of every element as a Python-int bitset."""
        return _descendant_bitsets(self.size, self.upper_covers, _topological_order(self.size, self.covers))

    def leq(self, x: int, y: int) -> bool:
        return x == y or bool(self.up_sets[x] >> y & 1)

    def comparability_matrix(self) -> np.ndarray:
        """Boolean ``N x N`` matrix of the strict order ``x < y``."""
        nbytes = (self.size + 7) // 8
        raw = b"".join(bits.to_bytes(nbytes, "little") for bits in self.up_sets)
        flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return flat.reshape(self.size, nbytes * 8)[:, : self.size].astype(bool)


def _adjacency(n: int, src: np.ndarray, dst: np.ndarray) -> list[np.ndarray]:
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    bounds = np.searchsorted(src, np.arange(n + 1))
    return [dst[bounds[i]:bounds[i + 1]] for i in range(n)]


def _topological_order(n: int, covers: np.ndarray) -> list[int]:
    indeg = np.bincount(covers[:, 1], minlength=n) if len(covers) else np.zeros(n, dtype=np.int64)
    ups = _adjacency(n, covers[:, 0], covers[:, 1])
    indeg = indeg.tolist()
    queue = deque(i for i in range(n) if indeg[i] == 0)
    order = []
    while queue:
        x = queue.popleft()
        order.append(x)
        for y in ups[x].tolist():
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    if len(order) != n:
        stuck = next(i for i in range(n) if indeg[i] > 0)
        raise StructuralError(f"cover relation has a directed cycle through element {stuck}")
    return order


def _descendant_bitsets(n: int, ups: list[np.ndarray], topo: list[int]) -> list[int]:
    desc = [0] * n
    for x in reversed(topo):
        bits = 0
        for y in ups[x].tolist():
            bits |= (1 << y) | desc[y]
        desc[x] = bits
    return desc


def _transitive_reduction(n: int, covers: np.ndarray) -> np.ndarray:
    topo = _topological_order(n, covers)
    pos = [0] * n
    for i, x in enumerate(topo):
        pos[x] = i
    ups = _adjacency(n, covers[:, 0], covers[:, 1])
    desc = [0] * n
    kept = []
    for x in reversed(topo):
        reach = 0
        # A child is redundant iff an earlier child (in topological order) reaches it.
        for y in sorted(ups[x].tolist(), key=pos.__getitem__):
            if not reach >> y & 1:
                kept.append((x, y))
            reach |= (1 << y) | desc[y]
        desc[x] = reach
    return _sorted_pairs(kept)


def _sorted_pairs(pairs) -> np.ndarray:
    arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
    if len(arr) == 0:
        return arr
    arr = np.unique(arr, axis=0)
    return arr


@dataclass(frozen=True)
class RankConflict:
    """Two cover-paths from the minimum reaching ``element`` with different lengths."""

    element: int
    path_a: tuple[int, ...]
    path_b: tuple[int, ...]


def _propagate_ranks(n: int, covers: np.ndarray):
    """Breadth-first rank propagation from the unique minimum."""
    has_lower = np.zeros(n, dtype=bool)
    if len(covers):
        has_lower[covers[:, 1]] = True
    minima = np.flatnonzero(~has_lower).tolist()
    if len(minima) != 1:
        raise ShapeError(f"rank propagation needs a unique minimal element, found {len(minima)}")
    ups = _adjacency(n, covers[:, 0], covers[:, 1])
    ranks = [-1] * n
    parent = [-1] * n
    root = minima[0]
    ranks[root] = 0
    queue = deque([root])

    def path_to(x):
        out = []
        while x != -1:
            out.append(x)
            x = parent[x]
        return tuple(reversed(out))

    while queue:
        x = queue.popleft()
        for y in ups[x].tolist():
            if ranks[y] < 0:
                ranks[y] = ranks[x] + 1
                parent[y] = x
                queue.append(y)
            elif ranks[y] != ranks[x] + 1:
                return RankConflict(y, path_to(y), path_to(x) + (y,))
    return np.array(ranks, dtype=np.int64)


def is_ranked(P: RankedPoset):
    """Rank function as an array, or a :class:`RankConflict` witness."""
    return _propagate_ranks(P.size, P.covers)


def _validate_ranks(n: int, covers: np.ndarray, ranks) -> np.ndarray:
    ranks = np.asarray(ranks, dtype=np.int64)
    if ranks.shape != (n,):
        raise StructuralError("ranks must give one integer per element")
    if n and ranks.min() != 0:
        raise StructuralError("some element must have rank 0")
    if len(covers) and np.any(ranks[covers[:, 1]] != ranks[covers[:, 0]] + 1):
        bad = covers[np.flatnonzero(ranks[covers[:, 1]] != ranks[covers[:, 0]] + 1)[0]]
        raise StructuralError(f"ranks violate cover {int(bad[0])} < {int(bad[1])}")
    return ranks


def from_covers(labels: Sequence[str], covers: Iterable, ranks=None, *, reduced: bool = False) -> RankedPoset:
    """Build a poset from (possibly redundant) covers; infers ranks when possible.

    ``reduced=True`` skips the reduction for callers that already hold the
    transitive reduction.
    """
    n = len(labels)
    arr = _sorted_pairs(covers)
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        raise StructuralError("cover refers to an element index out of range")
    if len(arr) and np.any(arr[:, 0] == arr[:, 1]):
        raise StructuralError("an element cannot cover itself")
    _topological_order(n, arr)
    inferred = None if ranks is not None else _propagate_ranks_or_none(n, arr)
    if not reduced:
        # Covers stepping some rank function by exactly one are already irredundant.
        steps = np.asarray(ranks) if ranks is not None else inferred
        if steps is None or not _steps_by_one(steps, arr):
            arr = _transitive_reduction(n, arr)
            if ranks is None:
                inferred = _propagate_ranks_or_none(n, arr)
    final = _validate_ranks(n, arr, ranks) if ranks is not None else inferred
    return RankedPoset(labels, arr, final)


def _steps_by_one(ranks: np.ndarray, arr: np.ndarray) -> bool:
    if ranks.shape != (len(ranks),) or len(arr) == 0:
        return True
    if arr.max() >= len(ranks):
        return False
    return bool(np.all(ranks[arr[:, 1]] == ranks[arr[:, 0]] + 1))


def _propagate_ranks_or_none(n, arr):
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    try:
        result = _propagate_ranks(n, arr)
    except ShapeError:
        return None
    return None if isinstance(result, RankConflict) else result


# -- weights and rank polynomials ---------------------------------------------

def unit_weights(P: RankedPoset) -> Weights:
    return (Fraction(1),) * P.size


def level_weights(P: RankedPoset, nu: Weights) -> list[Fraction]:
    return [sum((nu[int(x)] for x in level), Fraction(0)) for level in P.levels]


@dataclass(frozen=True)
class RankPolynomial:
    """Exact integer coefficients; ``coeffs[i]`` multiplies ``q**i``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(int(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "RankPolynomial") -> "RankPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RankPolynomial(tuple(out))

    def __pow__(self, k: int) -> "RankPolynomial":
        result = RankPolynomial((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, q):
        return sum(c * q**i for i, c in enumerate(self.coeffs))

    def argmax(self) -> int:
        """Smallest index of a largest coefficient."""
        best = max(self.coeffs)
        return self.coeffs.index(best)

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                coef = "" if c == 1 else str(c)
                terms.append(f"{coef}q" + (f"^{i}" if i > 1 else ""))
        return "+".join(terms) or "0"

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "RankPolynomial":
        out = cls((1,))
        for e in exps:
            out = out * cls((1, e))
        return out


def rank_polynomial(P: RankedPoset) -> RankPolynomial:
    P._require_ranked()
    return RankPolynomial(P.rank_sizes)


def factor_exponents(poly: RankPolynomial) -> list[int] | None:
    """Positive integers ``e_i`` with ``poly = prod(1 + e_i q)``, or ``None``."""
    coeffs = list(poly.coeffs)
    if coeffs[0] != 1:
        return None
    exps = []
    while len(coeffs) > 1:
        lead = coeffs[-1]
        if lead <= 0:
            return None
        for e in _divisors(lead):
            quotient = _divide_linear(coeffs, e)
            if quotient is not None:
                exps.append(e)
                coeffs = quotient
                break
        else:
            return None
    return sorted(exps)


def _divisors(k: int) -> list[int]:
    small = [d for d in range(1, int(k**0.5) + 1) if k % d == 0]
    return sorted(set(small + [k // d for d in small]))


def _divide_linear(coeffs: list[int], e: int) -> list[int] | None:
    """Exact quotient of ``coeffs`` by ``1 + e q`` over the integers, if any."""
    out = []
    rem = 0
    for c in coeffs[:-1]:
        q = c - e * rem
        out.append(q)
        rem = q
    if coeffs[-1] != e * rem:
        return None
    return out


def is_log_concave(P: RankedPoset, nu: Weights | None = None) -> bool:
    sizes = level_weights(P, nu if nu is not None else unit_weights(P))
    return sequence_is_log_concave(sizes)


def sequence_is_log_concave(values: Sequence) -> bool:
    return all(values[i] ** 2 >= values[i - 1] * values[i + 1] for i in range(1, len(values) - 1))


# -- constructions ----------------------------------------------------------------

def claw(n: int) -> RankedPoset:
    """One bottom element below an antichain of ``n - 1`` elements."""
    if n < 2:
        raise ParameterError("claw(n) needs n >= 2")
    labels = [f"x{i}" for i in range(n)]
    return from_covers(labels, [(0, i) for i in range(1, n)])


def chain(n: int) -> RankedPoset:
    return from_covers([f"c{i}" for i in range(n)], [(i, i + 1) for i in range(n - 1)])


def product(P: RankedPoset, Q: RankedPoset, nu_P: Weights | None = None, nu_Q: Weights | None = None,
            budget: int = DEFAULT_ELEMENT_BUDGET) -> tuple[RankedPoset, Weights]:
    """Componentwise order on ``P x Q``; element ``(p, q)`` gets index ``p*|Q| + q``."""
    P._require_ranked()
    Q._require_ranked()
    size = P.size * Q.size
    if size > budget:
        raise ResourceError(f"product of {P.size} x {Q.size} elements exceeds budget {budget}")
    nu_P = nu_P if nu_P is not None else unit_weights(P)
    nu_Q = nu_Q if nu_Q is not None else unit_weights(Q)
    nq = Q.size
    labels = [f"({a},{b})" for a in P.labels for b in Q.labels]
    ps = np.arange(P.size)
    qs = np.arange(nq)
    parts = []
    if len(P.covers):
        x, y = P.covers[:, 0], P.covers[:, 1]
        parts.append(np.stack([(x[:, None] * nq + qs).ravel(), (y[:, None] * nq + qs).ravel()], axis=1))
    if len(Q.covers):
        x, y = Q.covers[:, 0], Q.covers[:, 1]
        parts.append(np.stack([(ps[:, None] * nq + x).ravel(), (ps[:, None] * nq + y).ravel()], axis=1))
    covers = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    ranks = (P.ranks[:, None] + Q.ranks[None, :]).ravel()
    weights = tuple(a * b for a in nu_P for b in nu_Q)
    return RankedPoset(labels, _sorted_pairs(covers), ranks), weights


def _normalize_partition(n: int, orbits) -> tuple[list[list[int]], np.ndarray]:
    blocks = sorted((sorted(int(x) for x in block) for block in orbits), key=lambda b: b[0] if b else -1)
    owner = np.full(n, -1, dtype=np.int64)
    for k, block in enumerate(blocks):
        if not block:
            raise AutomorphismError("empty orbit in partition")
        if np.any(owner[block] >= 0):
            raise AutomorphismError("orbits overlap")
        owner[block] = k
    if np.any(owner < 0):
        raise AutomorphismError("orbits do not cover every element")
    return blocks, owner


def quotient(P: RankedPoset, orbits) -> tuple[RankedPoset, Weights]:
    """Quotient by an orbit partition; orbit weights are orbit sizes."""
    blocks, owner = _normalize_partition(P.size, orbits)
    ranks = None
    if P.is_ranked:
        for block in blocks:
            if len(set(P.ranks[block].tolist())) != 1:
                raise AutomorphismError(f"orbit of {P.labels[block[0]]} spans several ranks")
        ranks = np.array([int(P.ranks[block[0]]) for block in blocks], dtype=np.int64)
    pairs = np.stack([owner[P.covers[:, 0]], owner[P.covers[:, 1]]], axis=1) if len(P.covers) \
        else np.zeros((0, 2), dtype=np.int64)
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise AutomorphismError("an orbit contains two comparable elements")
    labels = [P.labels[block[0]] for block in blocks]
    weights = tuple(Fraction(len(block)) for block in blocks)
    if ranks is not None:
        # Images of covers step the rank by one, hence are already quotient covers.
        return RankedPoset(labels, _sorted_pairs(pairs), ranks), weights
    return from_covers(labels, pairs), weights


def orbit_owner(n: int, orbits) -> np.ndarray:
    return _normalize_partition(n, orbits)[1]


# -- file format ------------------------------------------------------------------

def poset_to_dict(P: RankedPoset, weights: Weights | None = None) -> dict:
    doc = {
        "elements": list(P.labels),
        "covers": P.covers.tolist(),
    }
    if P.ranks is not None:
        doc["ranks"] = P.ranks.tolist()
    if weights is not None:
        doc["weights"] = [[w.numerator, w.denominator] for w in weights]
    return doc


def dumps_poset(P: RankedPoset, weights: Weights | None = None) -> str:
    return json.dumps(poset_to_dict(P, weights), separators=(",", ":")) + "\n"


def save_poset(path, P: RankedPoset, weights: Weights | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_poset(P, weights))


def _schema_fail(field: str, msg: str):
    raise SchemaError(f"field '{field}': {msg}")


def poset_from_dict(doc) -> tuple[RankedPoset, Weights | None]:
    if not isinstance(doc, dict):
        _schema_fail("<root>", "expected an object")
    labels = doc.get("elements")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        _schema_fail("elements", "expected an array of strings")
    covers = doc.get("covers", [])
    if not isinstance(covers, list) or not all(
            isinstance(c, list) and len(c) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in c)
            for c in covers):
        _schema_fail("covers", "expected an array of [i, j] integer pairs")
    ranks = doc.get("ranks")
    if ranks is not None and (not isinstance(ranks, list) or len(ranks) != len(labels)
                              or not all(isinstance(r, int) for r in ranks)):
        _schema_fail("ranks", "expected one integer per element")
    weights = doc.get("weights")
    if weights is not None:
        weights = parse_weights(weights, len(labels))
    try:
        P = from_covers(labels, covers, ranks)
    except StructuralError as exc:
        raise SchemaError(f"field 'covers': {exc}") from exc
    return P, weights


def parse_weights(raw, n: int) -> Weights:
    if not isinstance(raw, list) or len(raw) != n:
        _schema_fail("weights", f"expected {n} [numerator, denominator] pairs")
    out = []
    for k, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(v, int) for v in pair)
                or pair[1] <= 0 or pair[0] < 0):
            _schema_fail("weights", f"entry {k} is not a nonnegative [numerator, denominator] pair")
        out.append(Fraction(pair[0], pair[1]))
    return tuple(out)


def loads_poset(text: str) -> tuple[RankedPoset, Weights | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return poset_from_dict(doc)


def load_poset(path) -> tuple[RankedPoset, Weights | None]:
    with open(path, encoding="utf-8") as fh:
        return loads_poset(fh.read())


def common_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out
