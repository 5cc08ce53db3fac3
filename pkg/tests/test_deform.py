import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import FLAVORS, _combination, moduli_reference, random_structure
from dihedra import catalog
from dihedra.ainfty import AInftyStructure, omega
from dihedra.deform import (
    CYCLIC,
    CYCLIC_INVOLUTIVE,
    INVOLUTIVE,
    PLAIN,
    NilpotentRing,
    RAlgebraMap,
    RElement,
    bch,
    bch_series,
    exp_automorphism,
    flavored_basis,
    gauge_action,
    gauge_by_conjugation,
    in_flavor,
    infinitesimal_moduli,
    log_automorphism,
    mc_check,
    reduction,
)
from dihedra.exactnum import GF, Q, Fp, Matrix, kernel_basis
from dihedra.graded import GradedSpace, StructureError
from dihedra.tensoralg import AlgebraMap, Derivation


def relement(rng, S, ring, degree, flavor=PLAIN, weights=None, density=0.5):
    """Random flavored element with coefficients in the augmentation ideal."""
    basis = flavored_basis(S, degree, flavor, weights)
    terms = {}
    for e in ring.monomials(positive=True):
        if rng.random() < density and basis:
            terms[e] = _combination(rng, basis, S.alg, degree)
    return RElement(ring, S.alg, degree, terms)


def cocycles(S, flavor=PLAIN):
    ones = flavored_basis(S, 1, flavor)
    out = []
    for x in ones:
        if S.m.bracket(x).is_zero():
            out.append(x)
    return out


def mc_seed(rng, S, ring, flavor):
    """A nontrivial MC element: a first-order cocycle pushed around by a gauge."""
    eps = tuple(1 if t == 0 else 0 for t in range(len(ring.orders)))
    zs = cocycles(S, flavor)
    eta = RElement.zero(ring, S.alg, 1)
    if zs and ring.orders[0] == 2:
        eta = RElement.monomial(ring, eps, rng.choice(zs))
    y = relement(rng, S, ring, 0, flavor)
    return gauge_action(S, y, eta, flavor)


# -- MC


def test_zero_is_mc():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    assert mc_check(S, RElement.zero(ring, S.alg, 1))


def test_first_order_mc_is_cocycle_condition():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    for x in flavored_basis(S, 1, PLAIN):
        rep = mc_check(S, RElement.monomial(ring, (1,), x))
        assert rep.ok == S.m.bracket(x).is_zero()
        if not rep.ok:
            assert rep.failures and "eps" in rep.failures[0].witness


def test_mc_rejects_wrong_degree_and_constant_terms():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    y = flavored_basis(S, 0, PLAIN)[0]
    with pytest.raises(ValueError):
        mc_check(S, RElement.monomial(ring, (1,), y))
    with pytest.raises(ValueError):
        mc_check(S, RElement.monomial(ring, (0,), flavored_basis(S, 1, PLAIN)[0]))


# -- BCH


def test_bch_commuting():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing((2, 2))
    x = RElement.zero(ring, S.alg, 0)
    y = relement(random.Random(1), S, ring, 0)
    assert bch(x, y) == y
    # same derivation on both sides commutes with itself
    z = flavored_basis(S, 0, PLAIN)[0]
    a = RElement.monomial(ring, (1, 0), z)
    b = RElement.monomial(ring, (0, 1), z)
    assert bch(a, b) == a + b


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_bch_low_order_closed_forms(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 3, PLAIN)
    ring = NilpotentRing.truncated(3)
    x, y = relement(rng, S, ring, 0), relement(rng, S, ring, 0)
    assert bch(x, y) == x + y + x.bracket(y).scale(Q(1) / 2)
    ring = NilpotentRing.truncated(4)
    x, y = relement(rng, S, ring, 0), relement(rng, S, ring, 0)
    assert bch(x, y) == bch_series(x, y)


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_bch_associative(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 3, PLAIN)
    ring = NilpotentRing.truncated(4)
    x, y, z = (relement(rng, S, ring, 0) for _ in range(3))
    assert bch(bch(x, y), z) == bch(x, bch(y, z))


def test_bch_rejects_constant_terms():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    x = RElement.monomial(ring, (0,), flavored_basis(S, 0, PLAIN)[0])
    with pytest.raises(ValueError):
        bch(x, x)


# -- exp and log


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(FLAVORS))
def test_exp_log_round_trip(seed, flavor):
    rng = random.Random(seed)
    S = random_structure(rng, 3, flavor)
    ring = rng.choice([NilpotentRing.truncated(3), NilpotentRing((2, 3))])
    y = relement(rng, S, ring, 0, flavor)
    e = exp_automorphism(y)
    assert e.reduction() == AlgebraMap.identity(S.alg)
    assert log_automorphism(e) == y
    assert exp_automorphism(log_automorphism(e)) == e


def test_exp_of_zero_is_identity():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(3)
    zero = RElement.zero(ring, S.alg, 0)
    assert exp_automorphism(zero).is_identity()
    assert log_automorphism(RAlgebraMap.identity(ring, S.alg)).is_zero()


def test_log_needs_unipotent_map():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    ident = RAlgebraMap.identity(ring, S.alg)
    doubled = RAlgebraMap(ring, S.alg, [{k: 2 * c for k, c in img.items()} for img in ident.images])
    with pytest.raises(ValueError):
        log_automorphism(doubled)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_exp_commutes_with_star_iff_invariant(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 3, INVOLUTIVE)
    ring = NilpotentRing.truncated(3)
    y = relement(rng, S, ring, 0, rng.choice([PLAIN, INVOLUTIVE]))
    assert exp_automorphism(y).commutes_with_star() == (y.star() == y)


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_exp_preserves_form_element_iff_cyclic(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 4, CYCLIC)
    ring = NilpotentRing.truncated(2)
    # weights below N so that a failure would be visible inside the truncation
    y = relement(rng, S, ring, 0, rng.choice([PLAIN, CYCLIC]), weights=range(1, S.N - 1))
    om = {(ring.one, w): c for w, c in omega(S.V).items()}
    moved = exp_automorphism(y).apply(om)
    preserved = {k: c for k, c in moved.items() if c} == om
    cyclic = all(in_flavor(S, x, CYCLIC) for x in y.terms.values())
    assert preserved == cyclic


# -- gauge


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(FLAVORS))
def test_gauge_matches_conjugation(seed, flavor):
    rng = random.Random(seed)
    S = random_structure(rng, 3, flavor)
    ring = rng.choice([NilpotentRing.truncated(3), NilpotentRing((2, 2))])
    y = relement(rng, S, ring, 0, flavor)
    xi = relement(rng, S, ring, 1, flavor)
    assert gauge_action(S, y, xi, flavor) == gauge_by_conjugation(S, y, xi)


@settings(max_examples=12)
@given(st.integers(0, 10**6), st.sampled_from(FLAVORS))
def test_gauge_group_action(seed, flavor):
    rng = random.Random(seed)
    S = random_structure(rng, 3, flavor)
    ring = NilpotentRing((2, 3))
    xi = mc_seed(rng, S, ring, flavor)
    assert mc_check(S, xi, flavor)
    y1, y2 = relement(rng, S, ring, 0, flavor), relement(rng, S, ring, 0, flavor)
    once = gauge_action(S, y2, xi, flavor)
    twice = gauge_action(S, y1, once, flavor)
    assert mc_check(S, once, flavor) and mc_check(S, twice, flavor)
    assert twice == gauge_action(S, bch(y1, y2), xi, flavor)
    assert gauge_action(S, -y2, once, flavor) == xi
    # flavor closure
    for x in twice.terms.values():
        assert in_flavor(S, x, flavor)
    assert reduction(S, twice).m == S.m


def test_gauge_examples():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    z = flavored_basis(S, 0, PLAIN)
    phi = [x for x in flavored_basis(S, 1, PLAIN) if S.m.bracket(x).is_zero()][0]
    xi = RElement.monomial(ring, (1,), phi)
    for zz in z:
        y = RElement.monomial(ring, (1,), zz)
        expect = RElement(ring, S.alg, 1, {(1,): phi - S.m.bracket(zz)})
        assert gauge_action(S, y, xi) == expect
    # y with dy = 0 and [y, xi] = 0 leaves xi alone
    S0 = catalog.ground_field(3, unital=False)
    y = RElement.zero(ring, S0.alg, 0)
    xi0 = RElement.monomial(ring, (1,), flavored_basis(S0, 1, PLAIN)[0])
    assert gauge_action(S0, y, xi0) == xi0


def test_gauge_flavor_violation():
    S = catalog.product_field(3)
    ring = NilpotentRing.truncated(2)
    bad = [x for x in flavored_basis(S, 0, PLAIN) if not x.star() == x][0]
    y = RElement.monomial(ring, (1,), bad)
    xi = RElement.zero(ring, S.alg, 1)
    with pytest.raises(StructureError):
        gauge_action(S, y, xi, INVOLUTIVE)
    assert gauge_action(S, y, xi, PLAIN) is not None


def test_flavor_needs_involution_and_form():
    S = catalog.dual_numbers(3, form="none")
    with pytest.raises(StructureError):
        infinitesimal_moduli(S, CYCLIC)
    V = GradedSpace(S.V.names, S.V.degrees, None, None)
    with pytest.raises(StructureError):
        infinitesimal_moduli(AInftyStructure(V, S.m), INVOLUTIVE)
    with pytest.raises(ValueError):
        infinitesimal_moduli(S, "twisted")


def test_reduction_of_trivial_ring_element():
    S = catalog.dual_numbers(3)
    ring = NilpotentRing.truncated(2)
    xi = RElement.monomial(ring, (1,), flavored_basis(S, 1, PLAIN)[0])
    assert reduction(S, xi).m == S.m
    assert reduction(S, RElement.zero(ring, S.alg, 1)).m == S.m


# -- infinitesimal moduli


def test_moduli_small_cases():
    assert infinitesimal_moduli(catalog.ground_field(3, unital=False), INVOLUTIVE) == 1
    empty = GradedSpace((), (), Matrix.identity(0))
    assert infinitesimal_moduli(AInftyStructure.zero(empty, 3), PLAIN) == 0


@settings(max_examples=10)
@given(st.integers(0, 10**6), st.sampled_from(FLAVORS))
def test_moduli_equals_second_cohomology(seed, flavor):
    S = random_structure(random.Random(seed), 3, flavor)
    assert infinitesimal_moduli(S, flavor) == moduli_reference(S, flavor)


# -- exhaustive orbit count over a prime field


def _key(x: Derivation, p):
    return tuple(sorted((i, w, Fp(c, p).v) for i, w, c in x.entries() if Fp(c, p)))


def _orbit_count(S, flavor, p):
    F = GF(p)
    S = AInftyStructure(S.V, S.m.scale(F(1)))
    ring = NilpotentRing.truncated(2)
    ones = flavored_basis(S, 1, flavor)
    imgs = [S.m.bracket(x) for x in ones]
    keys = sorted({(i, w) for x in imgs for i, w, _ in x.entries()})
    pos = {k: r for r, k in enumerate(keys)}
    cols = [{pos[(i, w)]: c for i, w, c in x.entries()} for x in imgs]
    if keys:
        Z = kernel_basis(Matrix.from_sparse_columns(cols, len(keys)))
    else:
        Z = [[int(i == j) for i in range(len(ones))] for j in range(len(ones))]
    zbasis = []
    for v in Z:
        acc = Derivation.zero(S.alg, 1)
        for x, c in zip(ones, v):
            if c:
                acc = acc + x.scale(c)
        zbasis.append(acc)
    points = {}
    for coeffs in itertools.product(range(p), repeat=len(zbasis)):
        acc = Derivation.zero(S.alg, 1)
        for x, c in zip(zbasis, coeffs):
            if c:
                acc = acc + x.scale(F(c))
        xi = RElement.monomial(ring, (1,), acc) if not acc.is_zero() else RElement.zero(ring, S.alg, 1)
        assert mc_check(S, xi, flavor)
        points[_key(acc, p)] = xi
    parent = {k: k for k in points}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    gens = [RElement.monomial(ring, (1,), y) for y in flavored_basis(S, 0, flavor)]
    for k, xi in points.items():
        for y in gens:
            moved = gauge_action(S, y, xi, flavor).terms.get((1,), Derivation.zero(S.alg, 1))
            parent[find(k)] = find(_key(moved, p))
    return len({find(k) for k in points}), infinitesimal_moduli(S, flavor)


@pytest.mark.parametrize(
    "name,N,flavor",
    [
        ("ground_field", 3, PLAIN),
        ("dual_numbers", 2, PLAIN),
        ("dual_numbers", 3, INVOLUTIVE),
        ("product_field", 3, INVOLUTIVE),
        ("ground_field", 3, CYCLIC),
        ("dual_numbers", 3, CYCLIC_INVOLUTIVE),
    ],
)
def test_first_order_orbits_over_prime_field(name, N, flavor):
    p = 3
    orbits, dim = _orbit_count(catalog.CATALOG[name](N), flavor, p)
    assert orbits == p**dim
    assert dim == infinitesimal_moduli(catalog.CATALOG[name](N), flavor)
