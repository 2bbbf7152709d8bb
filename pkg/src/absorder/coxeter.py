"""Exceptional finite Coxeter groups H3, F4, H4, E6 as permutations of roots.

Roots are kept in simple-root coordinates over Q(sqrt 5) (H types) or Q (F4,
E6), generated by closing the simple roots under the simple reflections
``s_i(v) = v - 2 B(v, a_i) / B(a_i, a_i) a_i``.  A group element is stored as
the permutation it induces on the root list; its matrix in the simple-root
basis is read off from the images of the simple roots.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property

import numpy as np

from .budget import Budget, default_budget
from .errors import NotSupportedError
from .permgroup import EnumeratedGroup
from .quadratic import QuadraticNumber, golden_ratio, matrix_rank

SUPPORTED = ("h3", "f4", "h4", "e6")
EXPECTED_ORDER = {"h3": 120, "f4": 1152, "h4": 14400, "e6": 51840}


def _gram(kind: str) -> list[list[QuadraticNumber]]:
    """Gram matrix of the simple roots."""
    if kind in ("h3", "h4"):
        d = 5
        n = 3 if kind == "h3" else 4
        gram = [[QuadraticNumber(0, 0, d) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            gram[i][i] = QuadraticNumber(2, 0, d)
        # Unit-normalised form scaled by 2: -2cos(pi/5) on the 5-edge, -1 on 3-edges.
        gram[0][1] = gram[1][0] = -golden_ratio()
        for i in range(1, n - 1):
            gram[i][i + 1] = gram[i + 1][i] = QuadraticNumber(-1, 0, d)
        return gram
    if kind == "f4":
        half = Fraction(1, 2)
        rows = [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 1, -half], [0, 0, -half, 1]]
        return [[QuadraticNumber(x, 0, 1) for x in row] for row in rows]
    if kind == "e6":
        # Bourbaki labelling: chain 1-3-4-5-6 with 2 attached to 4.
        edges = [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)]
        gram = [[QuadraticNumber(2 if i == j else 0, 0, 1) for j in range(6)] for i in range(6)]
        for i, j in edges:
            gram[i][j] = gram[j][i] = QuadraticNumber(-1, 0, 1)
        return gram
    raise NotSupportedError(_unsupported_message(kind))


def _unsupported_message(kind: str) -> str:
    if kind in ("e7", "e8"):
        return (f"{kind.upper()} is out of scope: full enumeration of the group and its "
                "Hasse diagram is infeasible at desk scale")
    return f"unsupported Coxeter type {kind!r}; supported: {', '.join(SUPPORTED)}"


def _sign(q: QuadraticNumber) -> int:
    """Exact sign of ``x + y sqrt d``."""
    sx = (q.x > 0) - (q.x < 0)
    sy = (q.y > 0) - (q.y < 0)
    if sy == 0 or sx == sy:
        return sx or sy
    if sx == 0:
        return sy
    return sx if q.x * q.x > q.d * q.y * q.y else sy


def _reflect(v, alpha, gram):
    """Reflect coordinate vector ``v`` in root ``alpha`` (both in simple-root coordinates)."""
    n = len(v)
    b_va = sum((v[i] * gram[i][j] * alpha[j] for i in range(n) for j in range(n)), QuadraticNumber(0, 0, gram[0][0].d))
    b_aa = sum((alpha[i] * gram[i][j] * alpha[j] for i in range(n) for j in range(n)), QuadraticNumber(0, 0, gram[0][0].d))
    c = (b_va * 2) / b_aa
    return tuple(v[i] - c * alpha[i] for i in range(n))


class CoxeterGroup(EnumeratedGroup):
    """Root-permutation realisation of an exceptional Coxeter group."""

    def __init__(self, kind: str, budget: Budget | None = None):
        kind = kind.lower()
        if kind not in SUPPORTED:
            raise NotSupportedError(_unsupported_message(kind))
        budget = budget or default_budget()
        budget.check_elements(EXPECTED_ORDER[kind], kind.upper())
        self.kind = kind
        self.name = kind
        self.gram = _gram(kind)
        n = len(self.gram)
        self.rank = n
        d = self.gram[0][0].d
        zero, one = QuadraticNumber(0, 0, d), QuadraticNumber(1, 0, d)
        simple = [tuple(one if i == j else zero for j in range(n)) for i in range(n)]

        roots = list(simple)
        index = {r: k for k, r in enumerate(roots)}
        k = 0
        while k < len(roots):
            for alpha in simple:
                image = _reflect(roots[k], alpha, self.gram)
                if image not in index:
                    index[image] = len(roots)
                    roots.append(image)
            k += 1
        self.roots = roots
        self._root_index = index
        self.positive_roots = [k for k, r in enumerate(roots) if _sign(sum(r, zero)) > 0]

        gens = np.array([[index[_reflect(r, alpha, self.gram)] for r in roots] for alpha in simple],
                        dtype=np.int16)
        perms, words = self._close(gens, budget)
        super().__init__(perms, np.arange(n), budget)
        # Canonical order: sorted by packed simple-root images.
        order = self._key_order
        self.perms = self.perms[order]
        self._words = [words[i] for i in order]
        self._key_order = np.arange(len(order))
        self.simple_reflections = self.index_of_images(gens[:, :n])

    @staticmethod
    def _close(gens: np.ndarray, budget: Budget):
        degree = gens.shape[1]
        n = gens.shape[0]
        radix = degree ** np.arange(n, dtype=np.int64)
        ident = np.arange(degree, dtype=np.int16)[None, :]
        perms = [ident]
        words = [()]
        seen = {int(ident[0, :n].astype(np.int64) @ radix)}
        frontier, frontier_words = ident, [()]
        while len(frontier):
            budget.check_time()
            new_perms, new_words = [], []
            for g_i, g in enumerate(gens):
                cand = frontier[:, g]  # frontier element composed with s_i on the right
                keys = cand[:, :n].astype(np.int64) @ radix
                for row, key in enumerate(keys.tolist()):
                    if key not in seen:
                        seen.add(key)
                        new_perms.append(cand[row])
                        new_words.append(frontier_words[row] + (g_i,))
            if not new_perms:
                break
            frontier = np.array(new_perms, dtype=np.int16)
            frontier_words = new_words
            perms.append(frontier)
            words.extend(new_words)
            budget.check_elements(len(words), "Coxeter closure")
        return np.concatenate(perms), words

    @property
    def family(self) -> tuple:
        return ("coxeter", self.kind)

    def label(self, w: int) -> str:
        word = self._words[w]
        return "".join(f"s{i + 1}" for i in word) if word else "e"

    def reduced_word(self, w: int) -> tuple[int, ...]:
        """Shortest word in the simple reflections (0-based generator indices)."""
        return self._words[w]

    @cached_property
    def reflections(self) -> np.ndarray:
        refl = []
        for k in self.positive_roots:
            beta = self.roots[k]
            images = [self._root_index[_reflect(self.roots[i], beta, self.gram)] for i in range(self.rank)]
            refl.append(int(self.index_of_images(np.array(images)[None, :])[0]))
        return np.array(sorted(refl), dtype=np.int64)

    def matrix(self, w: int) -> list[list[QuadraticNumber]]:
        """Matrix of ``w`` in the simple-root basis (columns are images of simple roots)."""
        cols = [self.roots[int(r)] for r in self.perms[w, : self.rank]]
        return [[cols[j][i] for j in range(self.rank)] for i in range(self.rank)]

    @cached_property
    def codims(self) -> np.ndarray:
        # Codimension is a class function, so one exact elimination per class suffices.
        ids = self.conjugacy_class_ids
        reps = {}
        for w in range(self.order):
            reps.setdefault(int(ids[w]), w)
        values = np.array([coxeter_codim(self, reps[c]) for c in range(len(reps))], dtype=np.int64)
        return values[ids]

    @cached_property
    def longest_element(self) -> int:
        """The element of maximal Coxeter length (last element reached by the closure)."""
        lengths = [len(word) for word in self._words]
        return int(np.argmax(lengths))

    def negation_root_perm(self) -> np.ndarray:
        neg = [self._root_index[tuple(-c for c in r)] for r in self.roots]
        return np.array(neg)


def build_coxeter(kind: str, budget: Budget | None = None) -> CoxeterGroup:
    return CoxeterGroup(kind, budget)


def coxeter_codim(G: CoxeterGroup, w: int) -> int:
    """Rank of ``M_w - I``, by exact Gaussian elimination."""
    mat = G.matrix(w)
    for i in range(G.rank):
        mat[i][i] = mat[i][i] - 1
    return matrix_rank(mat)
