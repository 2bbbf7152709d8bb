"""Group spec strings: ``g(m,p,n)``, ``h3``, ``f4``, ``h4``, ``e6`` and Coxeter aliases."""
from __future__ import annotations

import re

from .budget import Budget
from .coxeter import SUPPORTED, build_coxeter
from .errors import ParameterError
from .gmpn import make_group
from .permgroup import EnumeratedGroup

GRAMMAR = "g(m,p,n) with p dividing m | h3 | f4 | h4 | e6 | a<n> | b<n> | d<n> | i2(<m>)"

_GMPN = re.compile(r"^g\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")
_TYPE = re.compile(r"^([abd])(\d+)$")
_DIHEDRAL = re.compile(r"^i2\(\s*(\d+)\s*\)$")


def parse_group_spec(spec: str) -> tuple:
    """Return ``("gmpn", m, p, n)`` or ``("coxeter", kind)``; raises ParameterError."""
    text = spec.strip().lower()
    match = _GMPN.match(text)
    if match:
        m, p, n = (int(x) for x in match.groups())
        if min(m, p, n) < 1:
            raise ParameterError(f"{spec!r}: m, p, n must be positive; grammar: {GRAMMAR}")
        if m % p:
            raise ParameterError(f"{spec!r}: {p} does not divide {m}; grammar: {GRAMMAR}")
        return ("gmpn", m, p, n)
    match = _TYPE.match(text)
    if match:
        letter, k = match.group(1), int(match.group(2))
        if letter == "a" and k >= 1:
            return ("gmpn", 1, 1, k + 1)
        if letter == "b" and k >= 2:
            return ("gmpn", 2, 1, k)
        if letter == "d" and k >= 2:
            return ("gmpn", 2, 2, k)
    match = _DIHEDRAL.match(text)
    if match and int(match.group(1)) >= 2:
        m = int(match.group(1))
        return ("gmpn", m, m, 2)
    if text in SUPPORTED or text in ("e7", "e8"):
        return ("coxeter", text)
    raise ParameterError(f"cannot parse group spec {spec!r}; grammar: {GRAMMAR}")


def make_from_spec(spec: str, budget: Budget | None = None) -> EnumeratedGroup:
    parsed = parse_group_spec(spec)
    if parsed[0] == "gmpn":
        return make_group(*parsed[1:], budget=budget)
    return build_coxeter(parsed[1], budget=budget)


def is_coxeter_family(G: EnumeratedGroup) -> bool:
    """Real reflection groups among the enumerable families."""
    fam = G.family
    if fam[0] == "coxeter":
        return True
    _, m, p, n = fam
    return m <= 2 and (p == 1 or n >= 2) or (p == m and n == 2)
