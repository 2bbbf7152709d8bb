"""Enumerated finite groups realised as permutations of a finite point set.

Both group backends (``G(m,p,n)`` acting on ``Z/m x [n]`` and the exceptional
Coxeter groups acting on their roots) store their element table here.  An
element is identified by the images of a small *base* of points, which is
enough to recover the whole permutation; these images are packed into one
integer key so products of whole arrays of elements can be looked up with a
single ``searchsorted``.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .budget import Budget, default_budget
from .errors import DomainError, ParameterError


class EnumeratedGroup:
    """Element table of a finite permutation group with a reflection set.

    Subclasses provide ``perms`` (``N x D`` array of point images, rows in
    canonical element order), ``base``, ``reflections`` (sorted element
    indices) and ``codims`` (codimension of the fixed space per element).
    """

    name: str = "group"
    rank: int = 0

    def __init__(self, perms: np.ndarray, base: np.ndarray, budget: Budget | None = None):
        self.budget = budget or default_budget()
        self.perms = np.ascontiguousarray(perms)
        self.base = np.asarray(base, dtype=np.int64)
        self.degree = self.perms.shape[1]
        if float(self.degree) ** len(self.base) >= 2.0**62:
            raise ParameterError("base images do not fit into 64-bit keys")
        self._radix = self.degree ** np.arange(len(self.base), dtype=np.int64)
        keys = self._encode(self.perms[:, self.base])
        self._key_order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._key_order]
        if len(self._sorted_keys) > 1 and np.any(np.diff(self._sorted_keys) == 0):
            raise ParameterError("base does not separate group elements")

    # -- element lookup ---------------------------------------------------
    def _encode(self, images: np.ndarray) -> np.ndarray:
        return images.astype(np.int64) @ self._radix

    def index_of_images(self, images: np.ndarray) -> np.ndarray:
        """Indices of the elements whose base images are the rows of ``images``."""
        keys = self._encode(np.atleast_2d(images))
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        if np.any(self._sorted_keys[pos] != keys):
            raise DomainError("product left the enumerated element table")
        return self._key_order[pos]

    @property
    def order(self) -> int:
        return self.perms.shape[0]

    def __len__(self) -> int:
        return self.order

    @cached_property
    def identity(self) -> int:
        ident = np.arange(self.degree)[self.base][None, :]
        return int(self.index_of_images(ident)[0])

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.empty_like(self.perms)
        rows = np.arange(self.order)[:, None]
        inv[rows, self.perms] = np.arange(self.degree, dtype=self.perms.dtype)[None, :]
        return self.index_of_images(inv[:, self.base])

    def mul(self, left, right) -> np.ndarray:
        """Indices of ``left[k] * right[k]`` (composition, ``right`` acts first)."""
        left = np.asarray(left, dtype=np.int64)
        right = np.asarray(right, dtype=np.int64)
        left, right = np.broadcast_arrays(left, right)
        shape = left.shape
        left = left.ravel()
        right = right.ravel()
        images = self.perms[left[:, None], self.perms[right][:, self.base]]
        return self.index_of_images(images).reshape(shape)

    # -- reflections and lengths --------------------------------------------
    reflections: np.ndarray
    codims: np.ndarray

    @cached_property
    def reflection_lengths(self) -> np.ndarray:
        return self.bfs_reflection_lengths

    @cached_property
    def bfs_reflection_lengths(self) -> np.ndarray:
        """Breadth-first distance from the identity in the Cayley graph on T."""
        lengths = np.full(self.order, -1, dtype=np.int64)
        lengths[self.identity] = 0
        frontier = np.array([self.identity], dtype=np.int64)
        refl = np.asarray(self.reflections, dtype=np.int64)
        level = 0
        while frontier.size:
            self.budget.check_time()
            prods = self.mul(np.repeat(frontier, len(refl)), np.tile(refl, len(frontier)))
            fresh = np.unique(prods[lengths[prods] < 0])
            level += 1
            lengths[fresh] = level
            frontier = fresh
        if np.any(lengths < 0):
            raise DomainError("reflections do not generate the group")
        return lengths

    # -- conjugation -------------------------------------------------------
    def conjugates(self, w: int) -> np.ndarray:
        everything = np.arange(self.order)
        return np.unique(self.mul(self.mul(everything, w), self.inverses))

    @cached_property
    def conjugacy_class_ids(self) -> np.ndarray:
        """Class id per element; classes numbered by their least element index."""
        ids = np.full(self.order, -1, dtype=np.int64)
        nxt = 0
        for w in range(self.order):
            if ids[w] < 0:
                self.budget.check_time()
                ids[self.conjugates(w)] = nxt
                nxt += 1
        return ids

    def conjugacy_orbits(self, subset=None) -> list[list[int]]:
        """Partition ``subset`` (default: the whole group) into conjugacy orbits."""
        ids = self.conjugacy_class_ids
        if subset is None:
            subset = range(self.order)
        members = sorted({int(x) for x in subset})
        chosen = set(members)
        groups: dict[int, list[int]] = {}
        for x in members:
            groups.setdefault(int(ids[x]), []).append(x)
        counts = np.bincount(ids, minlength=ids.max() + 1)
        for cls, xs in groups.items():
            if len(xs) != counts[cls]:
                missing = next(int(y) for y in np.flatnonzero(ids == cls) if int(y) not in chosen)
                raise DomainError(
                    f"subset is not closed under conjugation: {self.label(xs[0])} "
                    f"is conjugate to {self.label(missing)}"
                )
        return [groups[c] for c in sorted(groups, key=lambda c: groups[c][0])]

    def label(self, w: int) -> str:
        return str(int(w))

    @cached_property
    def labels(self) -> list[str]:
        return [self.label(w) for w in range(self.order)]
