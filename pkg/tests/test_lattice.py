"""Quivers, the auxiliary lattice, genericity predicates and samplers."""

from fractions import Fraction

import pytest

from quiverdt.errors import InvalidInput, NotGenericAlpha, NotOnWall
from quiverdt.flow import flow_conditions_hold, kappa_supported_trees
from quiverdt.lattice import (
    AuxLattice,
    Quiver,
    SkewForm,
    _rng,
    alpha_is_generic,
    build_aux,
    euler_skew,
    is_gamma_generic,
    mask_sum,
    nonempty_masks,
    pair_masks,
    parse_covector,
    parse_dimvec,
    parse_quiver,
    sample_beta,
    sample_omega,
)
from quiverdt.trees import enumerate_trees, filter_eta


def test_euler_skew_kronecker():
    form = euler_skew(Quiver.kronecker(3))
    assert form.pair((1, 0), (0, 1)) == 3
    assert form.pair((0, 1), (1, 0)) == -3


def test_euler_skew_loop_vanishes():
    form = euler_skew(Quiver(((1,),)))
    assert form.matrix == ((0,),)
    assert form.pair((5,), (7,)) == 0


def test_euler_skew_three_cycle():
    q = Quiver.from_arrows(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    form = euler_skew(q)
    assert form.pair((1, 0, 0), (0, 1, 0)) == 1
    assert form.pair((1, 0, 0), (0, 0, 1)) == -1


def test_euler_skew_antisymmetry_random():
    rng = _rng(5, "skew")
    for _ in range(20):
        n = int(rng.integers(2, 5))
        counts = tuple(
            tuple(int(rng.integers(0, 4)) for _ in range(n)) for _ in range(n)
        )
        form = euler_skew(Quiver(counts))
        g1 = tuple(int(rng.integers(-3, 4)) for _ in range(n))
        g2 = tuple(int(rng.integers(-3, 4)) for _ in range(n))
        assert form.pair(g1, g2) == -form.pair(g2, g1)


def test_build_aux_kronecker2_example():
    aux = build_aux(Quiver.kronecker(2), [(1, 0), (1, 0), (0, 1)], (1, -2))
    assert aux.eta == ((0, 0, 2), (0, 0, 2), (-2, -2, 0))
    assert aux.alpha == (1, 1, -2)


def test_build_aux_zero_theta():
    aux = build_aux(Quiver.kronecker(2), [(1, 0), (0, 1)], (0, 0))
    assert aux.alpha == (0, 0)


def test_build_aux_kronecker1():
    aux = build_aux(Quiver.kronecker(1), [(1, 0), (0, 1)], (1, -1))
    assert aux.eta == ((0, 1), (-1, 0))
    assert aux.alpha == (1, -1)


def test_build_aux_not_on_wall():
    with pytest.raises(NotOnWall):
        build_aux(Quiver.kronecker(1), [(1, 0), (0, 1)], (1, 1))


def test_gamma_genericity_examples():
    assert is_gamma_generic((1, -2), (2, 1))
    assert not is_gamma_generic((1, -1, 0), (1, 1, 1))
    assert not is_gamma_generic((0, 0), (1, 1))


def test_pullback_compatibility_random():
    rng = _rng(6, "pullback")
    for _ in range(10):
        n = int(rng.integers(2, 4))
        counts = tuple(
            tuple(int(rng.integers(0, 3)) for _ in range(n)) for _ in range(n)
        )
        q = Quiver(counts)
        form = euler_skew(q)
        r = int(rng.integers(2, 4))
        gammas = []
        for _ in range(r):
            g = [int(rng.integers(0, 3)) for _ in range(n)]
            if not any(g):
                g[0] = 1
            gammas.append(tuple(g))
        total = tuple(sum(g[i] for g in gammas) for i in range(n))
        theta = [Fraction(int(rng.integers(-5, 6))) for _ in range(n - 1)]
        denom = total[-1]
        if denom == 0:
            continue
        last = -sum(t * c for t, c in zip(theta, total[:-1])) / denom
        theta.append(last)
        aux = build_aux(q, gammas, theta)
        for i in range(r):
            for j in range(r):
                assert aux.eta[i][j] == form.pair(gammas[i], gammas[j])
        for mask in nonempty_masks(r):
            summed = tuple(
                sum(gammas[i][k] for i in range(r) if mask >> i & 1) for k in range(n)
            )
            assert mask_sum(aux.alpha, mask) == sum(
                t * c for t, c in zip(theta, summed)
            )


def test_gamma_generic_implies_alpha_generic():
    # Restatement of the pullback-genericity lemma on random instances.
    rng = _rng(7, "lem-generic")
    found = 0
    while found < 10:
        n = int(rng.integers(2, 4))
        counts = tuple(
            tuple(int(rng.integers(0, 3)) for _ in range(n)) for _ in range(n)
        )
        q = Quiver(counts)
        r = int(rng.integers(2, 4))
        gammas = []
        for _ in range(r):
            g = [int(rng.integers(0, 2)) for _ in range(n)]
            if not any(g):
                g[0] = 1
            gammas.append(tuple(g))
        total = tuple(sum(g[i] for g in gammas) for i in range(n))
        theta = [Fraction(int(rng.integers(-7, 8))) for _ in range(n - 1)]
        if total[-1] == 0:
            continue
        theta.append(-sum(t * c for t, c in zip(theta, total[:-1])) / total[-1])
        if not is_gamma_generic(tuple(theta), total):
            continue
        aux = build_aux(q, gammas, theta)
        assert alpha_is_generic(aux.eta, aux.alpha)
        found += 1


def _postcondition_omega(aux, omega):
    r = aux.r
    # sign agreement with eta on every pair of {0,1}-vectors
    for ma in nonempty_masks(r):
        for mb in nonempty_masks(r):
            e = pair_masks(aux.eta, ma, mb)
            if e != 0:
                w = pair_masks(omega, ma, mb)
                assert w != 0 and (w > 0) == (e > 0)
    # nonvanishing on disjoint pairs (the U_J conditions)
    for ma in nonempty_masks(r):
        for mb in nonempty_masks(r):
            if ma < mb and not ma & mb:
                assert pair_masks(omega, ma, mb) != 0
    # flow sign-definiteness over the eta-relevant trees
    tree_list = list(filter_eta(enumerate_trees(range(1, r + 1)), aux.eta))
    assert flow_conditions_hold(tree_list, aux.alpha, omega)


def test_sample_omega_rank2():
    aux = AuxLattice(gammas=((1, 0), (0, 1)), eta=((0, 1), (-1, 0)), alpha=(Fraction(1), Fraction(-1)))
    omega = sample_omega(aux, 0).entries
    assert omega[0][1] > 0
    _postcondition_omega(aux, omega)


def test_sample_omega_rank3_degenerate_pair():
    aux = build_aux(Quiver.kronecker(2), [(1, 0), (1, 0), (0, 1)], (1, -2))
    omega = sample_omega(aux, 0).entries
    assert omega[0][1] != 0  # eta(e1, e2) = 0 but U_J needs a nonzero pairing
    _postcondition_omega(aux, omega)


def test_sample_omega_deterministic():
    aux = build_aux(Quiver.kronecker(2), [(1, 0), (1, 0), (0, 1)], (1, -2))
    assert sample_omega(aux, 3) == sample_omega(aux, 3)
    assert sample_omega(aux, 3) != sample_omega(aux, 4)


def test_sample_omega_rejects_degenerate_alpha():
    aux = build_aux(Quiver.kronecker(2), [(1, 0), (1, 0), (0, 1)], (1, -2))
    bad = AuxLattice(gammas=aux.gammas, eta=aux.eta, alpha=(Fraction(0),) * 3)
    with pytest.raises(NotGenericAlpha):
        sample_omega(bad, 0)
    with pytest.raises(NotGenericAlpha):
        sample_beta(bad, 0)


def test_sample_beta_rank2_returns_alpha():
    aux = AuxLattice(gammas=((1, 0), (0, 1)), eta=((0, 1), (-1, 0)), alpha=(Fraction(1), Fraction(-1)))
    assert sample_beta(aux, 0) == (1, -1)


def test_sample_beta_rank3_postconditions():
    aux = build_aux(Quiver.kronecker(2), [(1, 0), (1, 0), (0, 1)], (1, -2))
    beta = sample_beta(aux, 0)
    assert sum(beta) == 0
    # keeps alpha's signs on every subset where alpha is nonzero
    for mask in nonempty_masks(aux.r):
        a = mask_sum(aux.alpha, mask)
        if a != 0:
            b = mask_sum(beta, mask)
            assert b != 0 and (b > 0) == (a > 0)
    # eta-flow is sign-definite from beta on the kappa-supported trees
    eta_frac = tuple(tuple(Fraction(x) for x in row) for row in aux.eta)
    assert flow_conditions_hold(kappa_supported_trees(aux.eta, aux.r), beta, eta_frac)
    # beta is not alpha here: the exact flow from alpha collapses to zero
    assert beta != aux.alpha


def test_parse_quiver_and_vectors():
    q = parse_quiver("# sample\nvertices 2\narrow 1 2 2\n\narrow 1 2 1\n")
    assert q.arrow_counts == ((0, 3), (0, 0))
    assert parse_dimvec("2,1") == (2, 1)
    assert parse_covector("1,-1/2") == (1, Fraction(-1, 2))
    with pytest.raises(InvalidInput):
        parse_quiver("arrow 1 2 1\n")
    with pytest.raises(InvalidInput):
        parse_quiver("vertices 2\narrow 0 1 1\n")
    with pytest.raises(InvalidInput):
        parse_dimvec("2,x")


def test_skewform_validation():
    with pytest.raises(InvalidInput):
        SkewForm(((0, 1), (1, 0)))
