"""Graded nilpotent Lie algebras, BCH products and the rank-2 oracle.

Lie elements are sparse dictionaries mapping lattice classes to rational-
function coefficients, with bracket [z^a, z^b] = kappa(<a, b>) z^{a+b}.
Two gradings occur: the quiver lattice truncated by total dimension, and
the auxiliary {0,1}-vector mode where any product leaving the square-free
region vanishes.

bch_log_product follows the Dynkin expansion, which the finite grading
truncates.  The rank-2 reconstruction needs many long path-ordered
products, so it folds them in a faithful associative model of the group
(z^n -> (y - y^-1)^{delta(n)-1} x^n with x^a x^b = (-y)^{<a,b>} x^{a+b});
the Dynkin route is kept as the exported operation and the two are tested
against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import BiLaurent, LaurentPoly, RatFunc, kappa
from .errors import (
    ConsistencyFailure,
    DegreeExceeded,
    InvalidInput,
    NotOnWall,
    ZeroSignArgument,
)
from .flow import flow_tree_sum, scalar_context
from .lattice import (
    AuxLattice,
    SkewForm,
    dot,
    is_positive_dimvec,
    mask_indices,
    mask_sum,
    pair_masks,
    sample_omega,
)


@lru_cache(maxsize=None)
def _kappa_rf(x: int) -> RatFunc:
    return RatFunc(kappa(x))


@lru_cache(maxsize=None)
def _ym_power(j: int) -> BiLaurent:
    """(y - y^-1)^j as a polynomial."""
    out = BiLaurent.const(1)
    step = BiLaurent({(1, 0): 1, (-1, 0): -1})
    for _ in range(j):
        out = out * step
    return out


def _as_coeff(value) -> RatFunc:
    if isinstance(value, RatFunc):
        return value
    return RatFunc(value)


@dataclass(frozen=True)
class GradedLie:
    """kappa-bracket Lie algebra graded by a positive cone of lattice points.

    ``form`` is the integer skew matrix of the pairing.  With
    ``restrict_01`` the support is the {0,1}-vectors and any bracket
    leaving that set is zero; otherwise ``degree_bound`` truncates by
    total dimension, keeping the algebra finitely graded.
    """

    form: tuple
    degree_bound: int | None = None
    restrict_01: bool = False

    def __post_init__(self):
        if self.degree_bound is None and not self.restrict_01:
            raise InvalidInput("an untruncated lattice algebra is not finitely graded")

    @property
    def rank(self) -> int:
        return len(self.form)

    @property
    def effective_bound(self) -> int:
        if self.degree_bound is not None:
            return self.degree_bound
        return self.rank

    def pairing(self, n1, n2) -> int:
        return sum(
            self.form[i][j] * a * b
            for i, a in enumerate(n1)
            if a
            for j, b in enumerate(n2)
            if self.form[i][j] and b
        )

    def in_support(self, n) -> bool:
        if len(n) != self.rank or any(c < 0 for c in n) or not any(n):
            return False
        if self.restrict_01 and any(c > 1 for c in n):
            return False
        return sum(n) <= self.effective_bound

    def element(self, coeffs: dict) -> dict:
        out = {}
        for n, c in coeffs.items():
            n = tuple(n)
            if not self.in_support(n):
                continue
            c = _as_coeff(c)
            if not c.is_zero():
                out[n] = c
        return out

    def bracket(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for n1, c1 in a.items():
            for n2, c2 in b.items():
                n = tuple(x + y for x, y in zip(n1, n2))
                if not self.in_support(n):
                    continue
                k = self.pairing(n1, n2)
                if k == 0:
                    continue
                term = _kappa_rf(k) * c1 * c2
                prev = out.get(n)
                value = term if prev is None else prev + term
                if value.is_zero():
                    out.pop(n, None)
                else:
                    out[n] = value
        return out


def lie_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for n, c in b.items():
        prev = out.get(n)
        value = c if prev is None else prev + c
        if value.is_zero():
            out.pop(n, None)
        else:
            out[n] = value
    return out


def lie_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {n: _as_coeff(c) * v for n, v in a.items()}


def _block_sequences(max_total: int):
    """Sequences of (r_i, s_i) blocks, each nonzero, with at most max_total letters."""

    def rec(remaining):
        for r in range(remaining + 1):
            for s in range(remaining - r + 1):
                if r + s == 0:
                    continue
                head = ((r, s),)
                yield head
                for tail in rec(remaining - r - s):
                    yield head + tail

    yield from rec(max_total)


def bch_log_product(alg: GradedLie, a: dict, b: dict) -> dict:
    """log(exp(a) exp(b)) by the Dynkin expansion; finite by the grading bound."""
    a = alg.element(a)
    b = alg.element(b)
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    letters = (a, b)
    word_values: dict = {(0,): a, (1,): b}

    def word_value(word: tuple) -> dict:
        value = word_values.get(word)
        if value is None:
            inner = word_value(word[1:])
            value = alg.bracket(letters[word[0]], inner) if inner else {}
            word_values[word] = value
        return value

    result: dict = {}
    for blocks in _block_sequences(alg.effective_bound):
        word = tuple(
            letter for r, s in blocks for letter in (0,) * r + (1,) * s
        )
        value = word_value(word)
        if not value:
            continue
        n = len(blocks)
        weight = Fraction((-1) ** (n - 1), n * len(word))
        for r, s in blocks:
            weight /= math.factorial(r) * math.factorial(s)
        result = lie_add(result, lie_scale(value, weight))
    return result


def path_ordered_product(alg: GradedLie, crossings) -> dict:
    """log of the ordered product of exp(sign * element) over the crossings.

    Crossings are given in the order they are met; later crossings
    multiply on the left.
    """
    log = {}
    for element, sign in crossings:
        log = bch_log_product(alg, lie_scale(alg.element(element), sign), log)
    return log


# ---------------------------------------------------------------------------
# associative model of the unipotent group (internal fast path)


class _TorusGroup:
    """Group elements as g - 1 in the twisted monoid algebra of the lattice."""

    def __init__(self, alg: GradedLie):
        self.alg = alg

    def _twist(self, d: int) -> LaurentPoly:
        return LaurentPoly.monomial(d, -1 if d % 2 else 1)

    def mul_raw(self, u: dict, v: dict) -> dict:
        out: dict = {}
        alg = self.alg
        for n1, c1 in u.items():
            for n2, c2 in v.items():
                n = tuple(x + y for x, y in zip(n1, n2))
                if not alg.in_support(n):
                    continue
                term = c1 * c2 * RatFunc(self._twist(alg.pairing(n1, n2)))
                prev = out.get(n)
                value = term if prev is None else prev + term
                if value.is_zero():
                    out.pop(n, None)
                else:
                    out[n] = value
        return out

    def group_mul(self, g: dict, h: dict) -> dict:
        return lie_add(lie_add(g, h), self.mul_raw(g, h))

    def exp(self, lie_elt: dict) -> dict:
        u = {
            n: c * RatFunc(_ym_power(sum(n) - 1))
            for n, c in self.alg.element(lie_elt).items()
        }
        total: dict = {}
        power = {n: RatFunc.one() * c for n, c in u.items()}
        k = 1
        while power:
            total = lie_add(total, lie_scale(power, Fraction(1, math.factorial(k))))
            power = self.mul_raw(power, u)
            k += 1
        return total

    def log(self, g: dict) -> dict:
        total: dict = {}
        power = dict(g)
        k = 1
        while power:
            total = lie_add(total, lie_scale(power, Fraction((-1) ** (k + 1), k)))
            power = self.mul_raw(power, g)
            k += 1
        return {
            n: c * RatFunc(1, _ym_power(sum(n) - 1))
            for n, c in total.items()
            if not c.is_zero()
        }


def assoc_log_product(alg: GradedLie, crossings) -> dict:
    """Same contract as path_ordered_product, computed in the group model."""
    group = _TorusGroup(alg)
    g: dict = {}
    for element, sign in crossings:
        g = group.group_mul(group.exp(lie_scale(alg.element(element), sign)), g)
    return group.log(g)


# ---------------------------------------------------------------------------
# rank-2 diagrams


def _form_matrix(form) -> tuple:
    if isinstance(form, SkewForm):
        form = form.matrix
    form = tuple(tuple(row) for row in form)
    if len(form) != 2 or any(len(row) != 2 for row in form):
        raise InvalidInput("rank-2 reconstruction needs a 2x2 skew matrix")
    if form[0][0] or form[1][1] or form[0][1] != -form[1][0]:
        raise InvalidInput("not a skew matrix")
    return form


def _primitive(n):
    g = math.gcd(n[0], n[1])
    return (n[0] // g, n[1] // g), g


def _attractor_direction(form, n):
    """The covector <n, -> as an integer vector in the stability plane."""
    return (
        n[0] * form[0][0] + n[1] * form[1][0],
        n[0] * form[0][1] + n[1] * form[1][1],
    )


def _half(d) -> int:
    return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1


def _sort_ccw(rays):
    """Sort (direction, payload) pairs counterclockwise from the positive x-axis."""
    import functools

    def cmp(a, b):
        d1, d2 = a[0], b[0]
        h1, h2 = _half(d1), _half(d2)
        if h1 != h2:
            return -1 if h1 < h2 else 1
        cross = d1[0] * d2[1] - d1[1] * d2[0]
        if cross == 0:
            raise ConsistencyFailure(f"coincident ray directions {d1} and {d2}")
        return -1 if cross > 0 else 1

    return sorted(rays, key=functools.cmp_to_key(cmp))


def _crossing_sign(normal, direction) -> int:
    """+1 when a counterclockwise loop crosses from the positive side of the normal."""
    s = normal[0] * direction[1] - normal[1] * direction[0]
    return 1 if s > 0 else -1


@dataclass
class Rank2Diagram:
    """Consistent rank-2 diagram: initial (attractor-side) and scattered rays.

    The two rays of the line orthogonal to a class carry the initial datum
    (on the side of the attractor point) and the corrected element (on the
    opposite side).  Values are stored per full class n = k * primitive.
    """

    form: tuple
    degree_bound: int
    initial: dict
    scattered: dict

    def ray_entries(self):
        """(direction, (class, coefficient)) sorted counterclockwise.

        Multiples of one class share a geometric ray; they sort together,
        ordered by total dimension.
        """
        import functools

        out = []
        for n, c in self.initial.items():
            d = _attractor_direction(self.form, _primitive(n)[0])
            if d != (0, 0) and not c.is_zero():
                out.append((d, (n, c)))
        for n, c in self.scattered.items():
            d = _attractor_direction(self.form, _primitive(n)[0])
            d = (-d[0], -d[1])
            if d != (0, 0) and not c.is_zero():
                out.append((d, (n, c)))

        def cmp(a, b):
            d1, d2 = a[0], b[0]
            h1, h2 = _half(d1), _half(d2)
            if h1 != h2:
                return -1 if h1 < h2 else 1
            cross = d1[0] * d2[1] - d1[1] * d2[0]
            if cross:
                return -1 if cross > 0 else 1
            n1, n2 = a[1][0], b[1][0]
            return -1 if (sum(n1), n1) < (sum(n2), n2) else 1

        return sorted(out, key=functools.cmp_to_key(cmp))


def _loop_rays(form, degree_bound, initial, scattered):
    """Crossing-ordered (element, sign) list for a counterclockwise loop."""
    primitives = set()
    for n in list(initial) + list(scattered):
        primitives.add(_primitive(n)[0])
    rays = []
    for p in sorted(primitives):
        d_att = _attractor_direction(form, p)
        if d_att == (0, 0):
            raise ConsistencyFailure(f"degenerate attractor direction for {p}")
        d_sct = (-d_att[0], -d_att[1])
        att_elt = {
            n: c for n, c in initial.items() if _primitive(n)[0] == p and not c.is_zero()
        }
        sct_elt = {
            n: c for n, c in scattered.items() if _primitive(n)[0] == p and not c.is_zero()
        }
        rays.append((d_att, (att_elt, _crossing_sign(p, d_att))))
        rays.append((d_sct, (sct_elt, _crossing_sign(p, d_sct))))
    return [payload for _, payload in _sort_ccw(rays)]


def reconstruct_rank2(initial: dict, form, degree_bound: int, _shuffle_seed=None) -> Rank2Diagram:
    """Unique consistent rank-2 diagram with the given initial data.

    Wall elements start as the initial data on both sides and are corrected
    degree by degree: at each total dimension the log of the loop product
    around the origin is computed and its defect cancelled on the scattered
    side of the corresponding class.  A final full-loop check asserts
    consistency up to the degree bound.
    """
    form = _form_matrix(form)
    if degree_bound < 1:
        raise InvalidInput("degree bound must be >= 1")
    init: dict = {}
    for n, c in initial.items():
        n = (int(n[0]), int(n[1]))
        if not is_positive_dimvec(n):
            raise InvalidInput(f"initial class {n} is not positive")
        if sum(n) > degree_bound:
            raise InvalidInput(f"initial class {n} exceeds the degree bound")
        c = _as_coeff(c)
        if not c.is_zero():
            init[n] = c
    scattered = dict(init)

    if form[0][1] == 0:
        # Everything commutes; the diagram equals its initial data.
        return Rank2Diagram(form=form, degree_bound=degree_bound, initial=init, scattered=scattered)

    if _shuffle_seed is not None:
        import random as _random

        shuffler = _random.Random(_shuffle_seed)
    else:
        shuffler = None

    for level in range(1, degree_bound + 1):
        alg = GradedLie(form=form, degree_bound=level)
        group = _TorusGroup(alg)
        crossings = _loop_rays(form, level, init, scattered)
        if shuffler:
            cut = shuffler.randrange(len(crossings))
            crossings = crossings[cut:] + crossings[:cut]
        g: dict = {}
        for element, sign in crossings:
            g = group.group_mul(group.exp(lie_scale(element, sign)), g)
        defect = group.log(g)
        for n, c in defect.items():
            if sum(n) < level:
                raise ConsistencyFailure(
                    f"stale defect {n} at level {level}; lower degrees were not closed"
                )
        items = [(n, c) for n, c in defect.items() if sum(n) == level]
        if shuffler:
            shuffler.shuffle(items)
        else:
            items.sort()
        for n, c in items:
            p, _ = _primitive(n)
            d_sct = _attractor_direction(form, p)
            d_sct = (-d_sct[0], -d_sct[1])
            eps = _crossing_sign(p, d_sct)
            correction = lie_scale({n: c}, -eps)
            prev = scattered.get(n, RatFunc.zero())
            value = prev + correction[n]
            if value.is_zero():
                scattered.pop(n, None)
            else:
                scattered[n] = value

    alg = GradedLie(form=form, degree_bound=degree_bound)
    final = assoc_log_product(alg, _loop_rays(form, degree_bound, init, scattered))
    if final:
        raise ConsistencyFailure(f"reconstruction left a nonzero loop product: {final}")
    return Rank2Diagram(form=form, degree_bound=degree_bound, initial=init, scattered=dict(scattered))


def dt_from_rank2(diag: Rank2Diagram, gamma, theta) -> RatFunc:
    """Read the z^gamma coefficient on the ray selected by theta's side.

    theta must lie on the wall of gamma; the ray containing theta is the
    attractor side or the scattered side, and the value is the stored
    coefficient there (zero when no ray carries the class).
    """
    gamma = (int(gamma[0]), int(gamma[1]))
    if not is_positive_dimvec(gamma):
        raise InvalidInput(f"not a positive class: {gamma}")
    if sum(gamma) > diag.degree_bound:
        raise DegreeExceeded(f"delta({gamma}) exceeds the degree bound {diag.degree_bound}")
    theta = tuple(Fraction(x) for x in theta)
    if len(theta) != 2:
        raise InvalidInput("theta must have length 2")
    if dot(theta, gamma) != 0:
        raise NotOnWall(f"theta({gamma}) = {dot(theta, gamma)} != 0")
    if not any(theta):
        raise InvalidInput("theta must be nonzero")
    d_att = _attractor_direction(diag.form, gamma)
    if d_att == (0, 0):
        return diag.initial.get(gamma, RatFunc.zero())
    side = theta[0] * d_att[0] + theta[1] * d_att[1]
    if side > 0:
        return diag.initial.get(gamma, RatFunc.zero())
    return diag.scattered.get(gamma, RatFunc.zero())


# ---------------------------------------------------------------------------
# joint consistency of the flow tree machinery


@dataclass(frozen=True)
class JointRecord:
    t: Fraction
    part: int
    complement: int
    jump: LaurentPoly


@dataclass(frozen=True)
class ConsistencyReport:
    passed: bool
    wall_value: LaurentPoly
    joints: tuple


_SEGMENT_FRACTIONS = (
    Fraction(1, 2),
    Fraction(1, 3),
    Fraction(2, 3),
    Fraction(2, 5),
    Fraction(3, 5),
    Fraction(1, 7),
    Fraction(6, 7),
)
_TAIL_OFFSETS = (1, 2, Fraction(1, 2), 3, Fraction(5, 2), 5, Fraction(7, 3))


def _has_triple_split(point, r: int) -> bool:
    """Is there a partition of {1..r} into >= 3 parts, all annihilated by point?"""
    full = (1 << r) - 1
    null_masks = [
        m for m in range(1, full) if mask_sum(point, m) == 0
    ]

    def cover(remaining: int, parts: int) -> bool:
        if remaining == 0:
            return parts >= 3
        low = remaining & -remaining
        for m in null_masks:
            if m & low and (m & ~remaining) == 0:
                if cover(remaining & ~m, parts + 1):
                    return True
        return False

    return cover(full, 0)


def check_joint_consistency(
    aux: AuxLattice, seed: int, budget: int = 1000, corrupt: bool = False
) -> ConsistencyReport:
    """Verify the wall structure along the attractor half-line from alpha.

    Samples a generic perturbation, locates every relevant joint on the
    half-line alpha + t * iota_{e_I} omega, and checks: no triple splits at
    the joints; each jump of the wall value across a joint equals the
    commutator predicted by the two incoming walls; the value beyond the
    last joint vanishes; and the telescoped jumps reassemble the wall
    value at alpha.  Raises ConsistencyFailure with the offending joint.

    ``corrupt`` is a negative-control hook that perturbs the measured wall
    value and must make the check fail.
    """
    r = aux.r
    if r < 2:
        raise InvalidInput("joint consistency needs r >= 2")
    eta = aux.eta
    omega = sample_omega(aux, seed, budget).entries
    alpha = aux.alpha
    full = (1 << r) - 1

    located = []
    for m1 in range(1, full):
        if not (m1 & 1):
            continue  # each unordered split once, via the part containing index 1
        m2 = full ^ m1
        eta_p = pair_masks(eta, m1, m2)
        if eta_p == 0:
            continue
        omega_p = pair_masks(omega, m1, m2)
        a = mask_sum(alpha, m1)
        t = Fraction(a, 1) / omega_p
        if t > 0:
            located.append((t, m1, m2, omega_p, eta_p))
    located.sort(key=lambda rec: rec[0])
    for i in range(1, len(located)):
        if located[i][0] == located[i - 1][0]:
            raise ConsistencyFailure(
                "tied joints on the flow half-line", joint=located[i][0]
            )

    iota = tuple(
        sum(omega[i][j] for i in mask_indices(full)) for j in range(r)
    )

    def point_at(t: Fraction):
        return tuple(a + t * v for a, v in zip(alpha, iota))

    ctx = scalar_context(eta, r)

    def wall_value(point) -> LaurentPoly:
        return flow_tree_sum(range(1, r + 1), eta, ctx, point, omega)

    def segment_value(lo: Fraction, hi) -> LaurentPoly:
        if hi is None:
            candidates = [lo + off for off in _TAIL_OFFSETS]
        else:
            candidates = [lo + (hi - lo) * f for f in _SEGMENT_FRACTIONS]
        for t in candidates:
            try:
                return wall_value(point_at(t))
            except ZeroSignArgument:
                continue
        raise ConsistencyFailure("no generic sample point on a segment", joint=lo)

    value_at_alpha = wall_value(alpha)
    ts = [rec[0] for rec in located]
    bounds = [Fraction(0)] + ts
    segment_values = []
    for i in range(len(bounds)):
        hi = bounds[i + 1] if i + 1 < len(bounds) else None
        segment_values.append(segment_value(bounds[i], hi))
    if corrupt:
        segment_values[0] = segment_values[0] + LaurentPoly.const(1)

    if segment_values[0] != value_at_alpha:
        raise ConsistencyFailure(
            "wall value is not constant on the first segment", joint=Fraction(0)
        )

    joints = []
    jump_total = LaurentPoly.zero()
    for i, (t, m1, m2, omega_p, eta_p) in enumerate(located, start=1):
        x = point_at(t)
        if _has_triple_split(x, r):
            raise ConsistencyFailure("triple split at a joint", joint=t)
        left_sum = flow_tree_sum([j + 1 for j in mask_indices(m1)], eta, ctx, x, omega)
        right_sum = flow_tree_sum([j + 1 for j in mask_indices(m2)], eta, ctx, x, omega)
        predicted = kappa(eta_p) * left_sum * right_sum
        if omega_p > 0:
            predicted = -predicted
        measured = segment_values[i - 1] - segment_values[i]
        if measured != predicted:
            raise ConsistencyFailure("jump does not match the commutator", joint=t)
        jump_total = jump_total + predicted
        joints.append(JointRecord(t=t, part=m1, complement=m2, jump=predicted))

    if segment_values[-1] != LaurentPoly.zero():
        raise ConsistencyFailure(
            "wall value beyond the last joint is nonzero",
            joint=ts[-1] if ts else Fraction(0),
        )
    if jump_total != value_at_alpha:
        raise ConsistencyFailure("telescoped jumps do not reassemble the wall value")

    return ConsistencyReport(passed=True, wall_value=value_at_alpha, joints=tuple(joints))
