"""The groups G(m,p,n) of monomial matrices as signed (coloured) permutations.

An element ``[a_1,...,a_n | sigma]`` sends the k-th coordinate vector to
``zeta^{a_k} e_{sigma(k)}`` with ``zeta = exp(2 pi i / m)``; equivalently it is
the permutation ``(b, k) -> (b + a_k, sigma(k))`` of ``Z/m x [n]``.  Products
compose right to left: ``multiply(u, w)`` acts by ``w`` first.

Permutations are stored 0-based internally and printed 1-based.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from math import factorial

import numpy as np

from .budget import Budget, default_budget
from .errors import ParameterError
from .permgroup import EnumeratedGroup


@dataclass(frozen=True)
class GmpnElement:
    m: int
    p: int
    a: tuple[int, ...]
    sigma: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.sigma):
            raise ParameterError("a and sigma must have the same length")
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ParameterError(f"sigma {self.sigma} is not a permutation")
        if any(not 0 <= x < self.m for x in self.a):
            raise ParameterError("residues must be least nonnegative representatives")
        if sum(self.a) % self.p:
            raise ParameterError(f"{self} is not in G({self.m},{self.p},{self.n})")

    @property
    def n(self) -> int:
        return len(self.a)

    def __str__(self) -> str:
        return format_element(self.a, self.sigma)


def format_element(a, sigma) -> str:
    return "[" + ",".join(str(int(x)) for x in a) + "|" + ",".join(str(int(s) + 1) for s in sigma) + "]"


_ELEMENT_RE = re.compile(r"^\s*\[([^|\]]*)\|([^\]]*)\]\s*$")


def parse_element(text: str, m: int, p: int = 1) -> GmpnElement:
    """Parse ``[a1,...,an|s1,...,sn]`` (sigma 1-based, one-line notation)."""
    match = _ELEMENT_RE.match(text)
    if not match:
        raise ParameterError(f"cannot parse element {text!r}; expected [a1,...,an|s1,...,sn]")
    a = tuple(int(x) % m for x in match.group(1).split(","))
    sigma = tuple(int(x) - 1 for x in match.group(2).split(","))
    return GmpnElement(m, p, a, sigma)


def identity_element(m: int, p: int, n: int) -> GmpnElement:
    return GmpnElement(m, p, (0,) * n, tuple(range(n)))


def _check_compatible(u: GmpnElement, w: GmpnElement) -> None:
    if (u.m, u.p, u.n) != (w.m, w.p, w.n):
        raise ParameterError(
            f"elements of G({u.m},{u.p},{u.n}) and G({w.m},{w.p},{w.n}) cannot be multiplied"
        )


def multiply(u: GmpnElement, w: GmpnElement) -> GmpnElement:
    _check_compatible(u, w)
    m = u.m
    a = tuple((w.a[k] + u.a[w.sigma[k]]) % m for k in range(u.n))
    sigma = tuple(u.sigma[w.sigma[k]] for k in range(u.n))
    return GmpnElement(m, u.p, a, sigma)


def inverse(w: GmpnElement) -> GmpnElement:
    n, m = w.n, w.m
    sigma = [0] * n
    a = [0] * n
    for k in range(n):
        sigma[w.sigma[k]] = k
        # w sends (b, k) to (b + a_k, sigma(k)); undo it from sigma(k).
        a[w.sigma[k]] = (-w.a[k]) % m
    return GmpnElement(m, w.p, tuple(a), tuple(sigma))


def act(w: GmpnElement, b: int, k: int) -> tuple[int, int]:
    """Image of the point ``(b, k)`` (k 0-based)."""
    return (b + w.a[k]) % w.m, w.sigma[k]


def cycle_sign_count(w: GmpnElement) -> int:
    """Number of cycles of sigma whose a-labels sum to 0 mod m (``t_0``)."""
    seen = [False] * w.n
    count = 0
    for start in range(w.n):
        if seen[start]:
            continue
        total = 0
        k = start
        while not seen[k]:
            seen[k] = True
            total += w.a[k]
            k = w.sigma[k]
        count += total % w.m == 0
    return count


def fixed_space_codim(w: GmpnElement) -> int:
    # A cycle fixes a line exactly when the product of its roots of unity is 1.
    return w.n - cycle_sign_count(w)


def monomial_matrix(w: GmpnElement) -> np.ndarray:
    """Complex matrix of ``w``: column k holds ``zeta^{a_k}`` in row ``sigma(k)``."""
    zeta = np.exp(2j * np.pi / w.m)
    mat = np.zeros((w.n, w.n), dtype=complex)
    for k in range(w.n):
        mat[w.sigma[k], k] = zeta ** w.a[k]
    return mat


def _cycle_sign_counts(a: np.ndarray, sigma: np.ndarray, m: int) -> np.ndarray:
    """Vectorised ``t_0`` over rows of ``a`` / ``sigma``."""
    count, n = a.shape
    rows = np.arange(count)
    t0 = np.zeros(count, dtype=np.int64)
    for start in range(n):
        pos = np.full(count, start)
        total = a[:, start].astype(np.int64)
        is_min = np.ones(count, dtype=bool)
        open_ = np.ones(count, dtype=bool)
        for _ in range(n - 1):
            pos = sigma[rows, pos]
            open_ &= pos != start
            total += np.where(open_, a[rows, pos], 0)
            is_min &= ~open_ | (pos > start)
        t0 += (is_min & (total % m == 0)).astype(np.int64)
    return t0


def group_order(m: int, p: int, n: int) -> int:
    return m**n * factorial(n) // p


class GmpnGroup(EnumeratedGroup):
    """Enumerated ``G(m,p,n)``; rows are in lexicographic order on ``(a, sigma)``."""

    def __init__(self, m: int, p: int, n: int, budget: Budget | None = None):
        if min(m, p, n) < 1:
            raise ParameterError("m, p and n must be positive")
        if m % p:
            raise ParameterError(f"p={p} does not divide m={m}")
        budget = budget or default_budget()
        budget.check_elements(group_order(m, p, n), f"G({m},{p},{n})")
        self.m, self.p, self.n = m, p, n
        self.name = f"g({m},{p},{n})"
        self.rank = n

        avecs = np.array(list(itertools.product(range(m), repeat=n)), dtype=np.int64).reshape(-1, n)
        avecs = avecs[avecs.sum(axis=1) % p == 0]
        sigmas = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
        self.a = np.repeat(avecs, len(sigmas), axis=0)
        self.sigma = np.tile(sigmas, (len(avecs), 1))

        # Point (b, k) has index k*m + b.
        count = len(self.a)
        b = np.arange(m)
        images = (self.sigma[:, :, None] * m + (b[None, None, :] + self.a[:, :, None]) % m)
        perms = images.reshape(count, n * m)
        dtype = np.int16 if n * m < 2**15 else np.int32
        super().__init__(perms.astype(dtype), np.arange(n) * m, budget)

    @property
    def family(self) -> tuple:
        return ("gmpn", self.m, self.p, self.n)

    def element(self, w: int) -> GmpnElement:
        return GmpnElement(self.m, self.p, tuple(int(x) for x in self.a[w]),
                           tuple(int(s) for s in self.sigma[w]))

    def index(self, w: GmpnElement) -> int:
        if (w.m, w.p, w.n) != (self.m, self.p, self.n):
            raise ParameterError(f"{w} does not belong to {self.name}")
        images = np.array([w.sigma[k] * self.m + w.a[k] for k in range(self.n)])
        return int(self.index_of_images(images[None, :])[0])

    def label(self, w: int) -> str:
        return format_element(self.a[w], self.sigma[w])

    @cached_property
    def reflections(self) -> np.ndarray:
        return np.array(sorted(self.index(t) for t in reflection_elements(self.m, self.p, self.n)),
                        dtype=np.int64)

    @cached_property
    def cycle_sign_counts(self) -> np.ndarray:
        return _cycle_sign_counts(self.a, self.sigma, self.m)

    @cached_property
    def codims(self) -> np.ndarray:
        return self.n - self.cycle_sign_counts

    @cached_property
    def reflection_lengths(self) -> np.ndarray:
        if self.p == 1:
            return self.n - self.cycle_sign_counts
        return self.bfs_reflection_lengths

    def reflection_length(self, w: GmpnElement) -> int:
        if self.p == 1:
            return self.n - cycle_sign_count(w)
        return int(self.reflection_lengths[self.index(w)])


def make_group(m: int, p: int, n: int, budget: Budget | None = None) -> GmpnGroup:
    return GmpnGroup(m, p, n, budget)


def reflection_elements(m: int, p: int, n: int) -> list[GmpnElement]:
    """Type (1) transposition-like and type (2) diagonal reflections of G(m,p,n)."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        sigma = list(range(n))
        sigma[i], sigma[j] = j, i
        for c in range(m):
            a = [0] * n
            a[i], a[j] = c, (-c) % m
            out.append(GmpnElement(m, p, tuple(a), tuple(sigma)))
    for i in range(n):
        for c in range(p, m, p):
            a = [0] * n
            a[i] = c
            out.append(GmpnElement(m, p, tuple(a), tuple(range(n))))
    return out


def reflections(G: GmpnGroup) -> list[GmpnElement]:
    return [G.element(t) for t in G.reflections]


def reflection_count(m: int, p: int, n: int) -> int:
    return m * n * (n - 1) // 2 + n * (m // p - 1)
