"""Rational DT invariants from attractor data.

The assembly sums over multisets of classes: each decomposition of gamma
contributes its universal flow-tree coefficient times the product of the
rational attractor values of its parts, divided by the order of the
multiset's symmetry group.  Multicover conversion between integer-level
and rational invariants runs in both directions; the inverse direction
asserts integrality.

Universal coefficients depend only on (r, pulled-back form, sign pattern
of the pulled-back stability point), so they are cached under exactly
that key, in memory and optionally on disk.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .algebra import BiLaurent, LaurentPoly, RatFunc, parse_laurent
from .errors import InvalidInput, NotGenericTheta, NotOnWall
from .flow import flow_tree_scalar
from .lattice import (
    AuxLattice,
    Quiver,
    _iter_box,
    build_aux,
    dot,
    is_gamma_generic,
    is_positive_dimvec,
    mask_sum,
    nonempty_masks,
)


def qbracket(k: int) -> LaurentPoly:
    """[k]_y = y^{k-1} + y^{k-3} + ... + y^{1-k}."""
    if k < 1:
        raise InvalidInput("qbracket needs k >= 1")
    return LaurentPoly({k - 1 - 2 * j: 1 for j in range(k)})


def _multicover_factor(k: int) -> RatFunc:
    """1 / (k [k]_y), the weight of the k-fold cover."""
    return RatFunc(1, qbracket(k).to_bilaurent() * k)


def _divisors_of_vector(gamma):
    """k >= 1 with gamma/k still integral, with the quotient vector."""
    g = math.gcd(*[abs(c) for c in gamma])
    for k in range(1, g + 1):
        if g % k == 0:
            yield k, tuple(c // k for c in gamma)


class AttractorTable:
    """Attractor inputs: explicit entries plus the acyclic default rule."""

    def __init__(self, entries=None, acyclic_default: bool = False):
        self.entries = {}
        if entries:
            for gamma, value in entries.items():
                if not isinstance(value, RatFunc):
                    value = RatFunc(value)
                self.entries[tuple(gamma)] = value
        self.acyclic_default = acyclic_default
        self._rational_cache = {}

    def omega_star(self, gamma) -> RatFunc:
        gamma = tuple(gamma)
        if gamma in self.entries:
            return self.entries[gamma]
        if self.acyclic_default:
            if sum(gamma) == 1 and all(c in (0, 1) for c in gamma):
                return RatFunc.one()
        return RatFunc.zero()

    def rational_value(self, gamma) -> RatFunc:
        """Multicover-corrected rational attractor value of the class."""
        gamma = tuple(gamma)
        cached = self._rational_cache.get(gamma)
        if cached is not None:
            return cached
        total = RatFunc.zero()
        for k, base in _divisors_of_vector(gamma):
            contrib = self.omega_star(base)
            if contrib.is_zero():
                continue
            total = total + _multicover_factor(k) * contrib.substitute_power(k)
        self._rational_cache[gamma] = total
        return total

    @staticmethod
    def parse(text: str) -> "AttractorTable":
        """One entry per line: 'gamma = 1,2 ; omega_star = <poly>'.

        A line 'default acyclic' switches on the unit-vector default.
        """
        from .algebra import parse_bilaurent
        from .lattice import parse_dimvec

        entries = {}
        acyclic = False
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line == "default acyclic":
                acyclic = True
                continue
            parts = line.split(";")
            if len(parts) != 2:
                raise InvalidInput(f"line {lineno}: expected 'gamma = ... ; omega_star = ...'")
            left, right = parts[0].split("="), parts[1].split("=")
            if len(left) != 2 or left[0].strip() != "gamma":
                raise InvalidInput(f"line {lineno}: bad gamma clause")
            if len(right) != 2 or right[0].strip() != "omega_star":
                raise InvalidInput(f"line {lineno}: bad omega_star clause")
            gamma = parse_dimvec(left[1].strip())
            entries[gamma] = RatFunc(parse_bilaurent(right[1].strip()))
        return AttractorTable(entries, acyclic_default=acyclic)


def rational_from_integer(table: dict) -> dict:
    """Integer-level invariants to rational ones over the divisor closure.

    The output keeps explicit zeros on the whole closure, so it is always
    a valid (divisor-closed) input for integer_from_rational.
    """
    table = {tuple(g): v for g, v in table.items()}
    closure = set()
    for gamma in table:
        for _, base in _divisors_of_vector(gamma):
            closure.add(base)
    closure.update(table)
    out = {}
    for gamma in sorted(closure, key=lambda g: (sum(g), g)):
        total = RatFunc.zero()
        for k, base in _divisors_of_vector(gamma):
            omega = table.get(base)
            if omega is None or omega.is_zero():
                continue
            total = total + _multicover_factor(k) * RatFunc(omega.substitute_power(k))
        out[gamma] = total
    return out


def integer_from_rational(table: dict) -> dict:
    """Exact inverse of rational_from_integer; asserts the result is polynomial.

    Raises NotPolynomial when the input is inconsistent: either a divisor
    class of a listed class is missing (the table is not closed, so the
    multicover sum it claims to be cannot be reproduced) or the inversion
    leaves a nontrivial denominator.
    """
    from .errors import NotPolynomial

    table = {tuple(g): v for g, v in table.items()}
    for gamma in table:
        for k, base in _divisors_of_vector(gamma):
            if k > 1 and base not in table:
                raise NotPolynomial(
                    f"table lists {gamma} but not its divisor class {base}"
                )
    integer_values: dict = {}
    for gamma in sorted(table, key=lambda g: (sum(g), g)):
        value = table[gamma]
        for k, base in _divisors_of_vector(gamma):
            if k == 1:
                continue
            lower = integer_values.get(base)
            if lower is None or lower.is_zero():
                continue
            value = value - _multicover_factor(k) * RatFunc(lower.substitute_power(k))
        poly = value.to_bilaurent()
        if not poly.is_zero():
            integer_values[gamma] = poly
    return integer_values


@dataclass(frozen=True)
class Decomposition:
    """Multiset of positive classes summing to the target, canonically sorted."""

    parts: tuple

    @property
    def aut_order(self) -> int:
        order = 1
        for count in Counter(self.parts).values():
            order *= math.factorial(count)
        return order


def enumerate_decompositions(gamma, parts=None):
    """Every multiset of positive vectors summing to gamma, exactly once.

    ``parts`` restricts the allowed summands (used to skip classes with a
    vanishing attractor factor before any tree is enumerated).
    """
    gamma = tuple(gamma)
    if not is_positive_dimvec(gamma):
        raise InvalidInput(f"not a positive dimension vector: {gamma}")
    if parts is None:
        candidates = sorted(_iter_box(gamma), reverse=True)
    else:
        candidates = sorted(
            (tuple(p) for p in parts if all(c <= g for c, g in zip(p, gamma))),
            reverse=True,
        )
    zero = (0,) * len(gamma)

    def recurse(remaining, start):
        if remaining == zero:
            yield ()
            return
        for idx in range(start, len(candidates)):
            part = candidates[idx]
            if all(p <= rem for p, rem in zip(part, remaining)):
                rest = tuple(rem - p for rem, p in zip(remaining, part))
                for tail in recurse(rest, idx):
                    yield (part,) + tail

    for parts_tuple in recurse(gamma, 0):
        yield Decomposition(parts=parts_tuple)


class FCache:
    """Cache of universal coefficients keyed by (r, eta, alpha sign pattern).

    The key omits the sampled perturbation and the seed: the flow tree
    formula's value is a theorem-level invariant of the key.  Disk entries
    hold the canonical polynomial text; unparseable files are recomputed.
    """

    def __init__(self, directory=None):
        self.memory: dict = {}
        self.directory = Path(directory) if directory else None
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key_for(aux: AuxLattice) -> str:
        signs = "".join(
            "+" if mask_sum(aux.alpha, m) > 0 else ("-" if mask_sum(aux.alpha, m) < 0 else "0")
            for m in nonempty_masks(aux.r)
        )
        eta_text = ";".join(",".join(str(x) for x in row) for row in aux.eta)
        return f"r={aux.r}|eta={eta_text}|signs={signs}"

    def _path(self, key: str) -> Path:
        digest = hashlib.sha256(key.encode()).hexdigest()[:32]
        return self.directory / f"F-{digest}.txt"

    def get(self, key: str):
        if key in self.memory:
            return self.memory[key]
        if self.directory:
            path = self._path(key)
            if path.exists():
                try:
                    poly = parse_laurent(path.read_text().strip())
                except Exception:
                    return None
                self.memory[key] = poly
                return poly
        return None

    def put(self, key: str, poly: LaurentPoly):
        self.memory[key] = poly
        if self.directory:
            self._path(key).write_text(poly.render() + "\n")


def universal_coefficient(
    aux: AuxLattice,
    mode: str = "omega",
    seed: int = 0,
    budget: int = 1000,
    cache: FCache | None = None,
    workers: int = 1,
) -> LaurentPoly:
    """flow_tree_scalar with the theorem-backed cache in front."""
    if cache is None:
        return flow_tree_scalar(aux, mode=mode, seed=seed, budget=budget, workers=workers)
    key = FCache.key_for(aux)
    value = cache.get(key)
    if value is None:
        value = flow_tree_scalar(aux, mode=mode, seed=seed, budget=budget, workers=workers)
        cache.put(key, value)
    return value


def assemble_dt(
    q: Quiver,
    gamma,
    theta,
    table: AttractorTable,
    mode: str = "omega",
    seed: int = 0,
    budget: int = 1000,
    cache: FCache | None = None,
    workers: int = 1,
) -> RatFunc:
    """Rational DT invariant of gamma at theta from the attractor table."""
    gamma = tuple(gamma)
    theta = tuple(Fraction(x) for x in theta)
    if not is_positive_dimvec(gamma):
        raise InvalidInput(f"not a positive dimension vector: {gamma}")
    if len(theta) != q.vertex_count or len(gamma) != q.vertex_count:
        raise InvalidInput("gamma/theta length does not match the quiver")
    if dot(theta, gamma) != 0:
        raise NotOnWall(f"theta(gamma) = {dot(theta, gamma)} != 0")
    if not is_gamma_generic(theta, gamma):
        raise NotGenericTheta(f"theta = {theta} is not generic for gamma = {gamma}")

    allowed_parts = [p for p in _iter_box(gamma) if not table.rational_value(p).is_zero()]
    total = RatFunc.zero()
    for decomp in enumerate_decompositions(gamma, parts=allowed_parts):
        aux = build_aux(q, decomp.parts, theta)
        coeff = universal_coefficient(
            aux, mode=mode, seed=seed, budget=budget, cache=cache, workers=workers
        )
        if coeff.is_zero():
            continue
        term = RatFunc(coeff) * Fraction(1, decomp.aut_order)
        for part in decomp.parts:
            term = term * table.rational_value(part)
        total = total + term
    return total


def dt_integer_value(
    q: Quiver,
    gamma,
    theta,
    table: AttractorTable,
    mode: str = "omega",
    seed: int = 0,
    budget: int = 1000,
    cache: FCache | None = None,
    workers: int = 1,
) -> BiLaurent:
    """Integer-level DT invariant via multicover inversion over divisors of gamma.

    Raises NotPolynomial when the rational values do not invert to a
    Laurent polynomial.
    """
    gamma = tuple(gamma)
    rational = {}
    for _, base in _divisors_of_vector(gamma):
        rational[base] = assemble_dt(
            q, base, theta, table, mode=mode, seed=seed, budget=budget, cache=cache, workers=workers
        )
    integer_values = integer_from_rational(rational)
    return integer_values.get(gamma, BiLaurent.zero())
