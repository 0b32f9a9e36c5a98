"""Quivers, dimension vectors, skew forms and exact genericity sampling.

The auxiliary rank-r lattice attached to a decomposition gamma_1..gamma_r
is handled through bitmasks: the subset J of {1..r} is the integer whose
bit i-1 is set iff i is in J, and e_J is the corresponding {0,1}-vector.
All genericity conditions are exact sign tests on rationals; the samplers
perturb by dyadic rationals and verify membership by running the discrete
flow, resampling on failure.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, NotGenericAlpha, NotOnWall, SamplingTimeout

PERTURBATION_DENOM = 2 ** 16


# ---------------------------------------------------------------------------
# quivers and forms


@dataclass(frozen=True)
class Quiver:
    """Finite directed graph; arrow_counts[i][j] arrows from vertex i to j."""

    arrow_counts: tuple

    def __post_init__(self):
        n = len(self.arrow_counts)
        for row in self.arrow_counts:
            if len(row) != n:
                raise InvalidInput("arrow count matrix must be square")
            if any(a < 0 for a in row):
                raise InvalidInput("arrow counts must be nonnegative")

    @property
    def vertex_count(self) -> int:
        return len(self.arrow_counts)

    @staticmethod
    def from_arrows(vertex_count: int, arrows) -> "Quiver":
        counts = [[0] * vertex_count for _ in range(vertex_count)]
        for i, j, k in arrows:
            counts[i][j] += k
        return Quiver(tuple(tuple(row) for row in counts))

    @staticmethod
    def kronecker(m: int) -> "Quiver":
        """Two vertices, m arrows from the first to the second."""
        return Quiver(((0, m), (0, 0)))


@dataclass(frozen=True)
class SkewForm:
    """Integer skew-symmetric bilinear form on Z^n."""

    matrix: tuple

    def __post_init__(self):
        n = len(self.matrix)
        for i in range(n):
            for j in range(n):
                if self.matrix[i][j] != -self.matrix[j][i]:
                    raise InvalidInput("matrix is not skew-symmetric")

    def pair(self, g1, g2) -> int:
        return sum(
            self.matrix[i][j] * g1[i] * g2[j]
            for i in range(len(g1))
            for j in range(len(g2))
            if self.matrix[i][j]
        )


def euler_skew(q: Quiver) -> SkewForm:
    """Antisymmetrized arrow-count form <g, g'> = sum (a_ij - a_ji) g_i g'_j."""
    a = q.arrow_counts
    n = q.vertex_count
    return SkewForm(tuple(tuple(a[i][j] - a[j][i] for j in range(n)) for i in range(n)))


# ---------------------------------------------------------------------------
# dimension vectors and covectors


def is_positive_dimvec(gamma) -> bool:
    return all(c >= 0 for c in gamma) and any(c > 0 for c in gamma)


def dot(theta, gamma):
    return sum(t * g for t, g in zip(theta, gamma))


def _collinear(a, b) -> bool:
    n = len(a)
    return all(a[i] * b[j] == a[j] * b[i] for i in range(n) for j in range(i + 1, n))


def _iter_box(gamma):
    """All integer vectors 0 <= v <= gamma componentwise, excluding zero."""
    n = len(gamma)
    v = [0] * n
    while True:
        i = 0
        while i < n and v[i] == gamma[i]:
            v[i] = 0
            i += 1
        if i == n:
            return
        v[i] += 1
        yield tuple(v)


def is_gamma_generic(theta, gamma) -> bool:
    """True iff theta kills no class 0 < gamma' <= gamma not collinear with gamma.

    Only componentwise-dominated classes can occur in decompositions of
    gamma, so this finite box check suffices for everything computed here.
    """
    if dot(theta, gamma) != 0:
        return False
    for gp in _iter_box(gamma):
        if _collinear(gp, gamma):
            continue
        if dot(theta, gp) == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# bitmask helpers for the auxiliary lattice


def mask_sum(vec, mask: int):
    total = 0
    i = 0
    while mask:
        if mask & 1:
            total += vec[i]
        mask >>= 1
        i += 1
    return total


def mask_indices(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def pair_masks(matrix, ma: int, mb: int):
    """Bilinear pairing of the {0,1}-vectors with supports ma and mb."""
    total = 0
    for i in mask_indices(ma):
        row = matrix[i]
        for j in mask_indices(mb):
            total += row[j]
    return total


def nonempty_masks(r: int):
    return range(1, 1 << r)


# ---------------------------------------------------------------------------
# the auxiliary lattice


@dataclass(frozen=True)
class AuxLattice:
    """Rank-r lattice with basis mapped to the classes gamma_1..gamma_r.

    eta is the pulled-back integer skew form, alpha the pulled-back
    stability point; alpha(e_I) = 0 always holds.
    """

    gammas: tuple
    eta: tuple
    alpha: tuple

    def __post_init__(self):
        r = len(self.gammas)
        if len(self.eta) != r or len(self.alpha) != r:
            raise InvalidInput("inconsistent auxiliary lattice data")
        for i in range(r):
            for j in range(r):
                if self.eta[i][j] != -self.eta[j][i]:
                    raise InvalidInput("eta is not skew-symmetric")
        if sum(self.alpha) != 0:
            raise NotOnWall("alpha does not annihilate e_I")

    @property
    def r(self) -> int:
        return len(self.gammas)


def build_aux(q: Quiver, gammas, theta) -> AuxLattice:
    """Pull back the Euler form and the stability point along e_i -> gamma_i."""
    gammas = tuple(tuple(g) for g in gammas)
    for g in gammas:
        if len(g) != q.vertex_count or not is_positive_dimvec(g):
            raise InvalidInput(f"not a positive dimension vector: {g}")
    theta = tuple(Fraction(x) for x in theta)
    if len(theta) != q.vertex_count:
        raise InvalidInput("stability parameter has wrong length")
    total = tuple(sum(g[i] for g in gammas) for i in range(q.vertex_count))
    if dot(theta, total) != 0:
        raise NotOnWall(f"theta({total}) = {dot(theta, total)} != 0")
    form = euler_skew(q)
    r = len(gammas)
    eta = tuple(tuple(form.pair(gammas[i], gammas[j]) for j in range(r)) for i in range(r))
    alpha = tuple(dot(theta, g) for g in gammas)
    return AuxLattice(gammas=gammas, eta=eta, alpha=alpha)


def alpha_is_generic(eta, alpha) -> bool:
    """Finite (I, eta)-genericity test on a point of the wall e_I^perp.

    alpha must not vanish on e_J' for any proper nonempty J' whose pairing
    eta(e_I, e_J') is nonzero.
    """
    r = len(alpha)
    full = (1 << r) - 1
    for m in range(1, full):
        if pair_masks(eta, full, m) != 0 and mask_sum(alpha, m) == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# seeded exact perturbation sampling


def _rng(seed: int, *labels) -> np.random.Generator:
    """Counter-based splittable generator keyed by (seed, labels)."""
    tag = b"|".join([str(seed).encode()] + [str(x).encode() for x in labels])
    key = int.from_bytes(hashlib.blake2b(tag, digest_size=16).digest(), "big")
    return np.random.Generator(np.random.Philox(key=key))


def _random_fraction(rng) -> Fraction:
    return Fraction(int(rng.integers(-PERTURBATION_DENOM, PERTURBATION_DENOM + 1)), PERTURBATION_DENOM)


def _random_skew(rng, r: int):
    m = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            x = _random_fraction(rng)
            m[i][j] = x
            m[j][i] = -x
    return tuple(tuple(row) for row in m)


def _min_shrink_exponent(base_pairs, perturb_pairs, start: int = 8) -> int:
    """Smallest k >= start with |perturb| / 2^k < |base| on every listed pair."""
    k = start
    for base, pert in zip(base_pairs, perturb_pairs):
        if base == 0:
            continue
        while abs(pert) >= abs(base) * (1 << k):
            k += 1
    return k


@dataclass(frozen=True)
class OmegaForm:
    """Exact-rational skew perturbation of eta, certified generic."""

    entries: tuple

    def __post_init__(self):
        r = len(self.entries)
        for i in range(r):
            for j in range(r):
                if self.entries[i][j] != -self.entries[j][i]:
                    raise InvalidInput("omega is not skew-symmetric")


def sample_omega(aux: AuxLattice, seed: int, budget: int = 1000) -> OmegaForm:
    """Draw omega = eta + 2^-k R certified to lie in U^eta and U_{I,alpha}.

    The sign condition of U^eta is enforced by shrinking 2^-k; membership
    in U_{I,alpha} is verified by running the discrete flow over every
    eta-relevant tree, resampling R on failure.  Deterministic per seed.
    """
    from . import flow, trees

    if not alpha_is_generic(aux.eta, aux.alpha):
        raise NotGenericAlpha(f"alpha = {aux.alpha} fails the finite genericity test")
    r = aux.r
    eta = aux.eta
    tree_list = list(trees.filter_eta(trees.enumerate_trees(range(1, r + 1)), eta))
    sign_pairs = []
    for ma in nonempty_masks(r):
        for mb in nonempty_masks(r):
            if mb <= ma:
                continue
            e = pair_masks(eta, ma, mb)
            if e != 0:
                sign_pairs.append((ma, mb, e))
    zero_disjoint = [
        (ma, mb)
        for ma in nonempty_masks(r)
        for mb in nonempty_masks(r)
        if mb > ma and (ma & mb) == 0 and pair_masks(eta, ma, mb) == 0
    ]

    for attempt in range(budget):
        rng = _rng(seed, "omega", attempt)
        rmat = _random_skew(rng, r)
        if any(pair_masks(rmat, ma, mb) == 0 for ma, mb in zero_disjoint):
            continue
        k0 = _min_shrink_exponent(
            [e for _, _, e in sign_pairs],
            [pair_masks(rmat, ma, mb) for ma, mb, _ in sign_pairs],
        )
        for k in range(k0, k0 + 8):
            eps = Fraction(1, 1 << k)
            omega = tuple(
                tuple(eta[i][j] + eps * rmat[i][j] for j in range(r)) for i in range(r)
            )
            if flow.flow_conditions_hold(tree_list, aux.alpha, omega):
                return OmegaForm(entries=omega)
    raise SamplingTimeout(f"no admissible omega after {budget} resamples")


def sample_beta(aux: AuxLattice, seed: int, budget: int = 1000):
    """Perturb alpha within e_I^perp until the eta-flow is sign-definite.

    alpha itself is tried first; when it already passes every predicate it
    is returned unchanged.  Random dyadic perturbations follow, shrunk
    until beta keeps the signs of alpha on every subset where alpha is
    nonzero (the sign-based smallness condition), then checked by running
    the discrete flow with the unperturbed form eta.
    """
    from . import flow, trees

    if not alpha_is_generic(aux.eta, aux.alpha):
        raise NotGenericAlpha(f"alpha = {aux.alpha} fails the finite genericity test")
    r = aux.r
    eta = aux.eta
    supported = flow.kappa_supported_trees(eta, r)
    eta_frac = tuple(tuple(Fraction(x) for x in row) for row in eta)

    if flow.flow_conditions_hold(supported, aux.alpha, eta_frac):
        return tuple(aux.alpha)

    alpha_values = [(m, mask_sum(aux.alpha, m)) for m in nonempty_masks(r)]
    for attempt in range(budget):
        rng = _rng(seed, "beta", attempt)
        delta = [_random_fraction(rng) for _ in range(r - 1)]
        delta.append(-sum(delta))
        k0 = _min_shrink_exponent(
            [a for _, a in alpha_values],
            [mask_sum(delta, m) for m, _ in alpha_values],
        )
        for k in range(k0, k0 + 8):
            eps = Fraction(1, 1 << k)
            beta = tuple(a + eps * d for a, d in zip(aux.alpha, delta))
            if flow.flow_conditions_hold(supported, beta, eta_frac):
                return beta
    raise SamplingTimeout(f"no admissible beta after {budget} resamples")


# ---------------------------------------------------------------------------
# text formats


def parse_quiver(text: str) -> Quiver:
    """Quiver file format: 'vertices <k>' then 'arrow <i> <j> <count>' lines."""
    vertex_count = None
    arrows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertices" and len(parts) == 2:
            vertex_count = int(parts[1])
            if vertex_count <= 0:
                raise InvalidInput(f"line {lineno}: vertex count must be positive")
        elif parts[0] == "arrow" and len(parts) == 4:
            if vertex_count is None:
                raise InvalidInput(f"line {lineno}: 'arrow' before 'vertices'")
            i, j, k = int(parts[1]), int(parts[2]), int(parts[3])
            if not (1 <= i <= vertex_count and 1 <= j <= vertex_count) or k < 0:
                raise InvalidInput(f"line {lineno}: arrow out of range")
            arrows.append((i - 1, j - 1, k))
        else:
            raise InvalidInput(f"line {lineno}: unrecognized statement {line!r}")
    if vertex_count is None:
        raise InvalidInput("missing 'vertices' statement")
    return Quiver.from_arrows(vertex_count, arrows)


def parse_dimvec(text: str) -> tuple:
    try:
        vec = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InvalidInput(f"bad dimension vector {text!r}") from exc
    if not vec:
        raise InvalidInput("empty dimension vector")
    return vec


def parse_covector(text: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad covector {text!r}") from exc
