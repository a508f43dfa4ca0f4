import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relcat.catcore import (
    Budget,
    FiniteCategory,
    Functor,
    NaturalTransformation,
    RelativeCategory,
    ZigzagStep,
    ZigzagWitness,
    category_from_monoid,
    category_from_preorder,
    chaotic_category,
    check_homotopy_equivalence_witness,
    check_natural_transformation,
    check_zigzag,
    compose_functors,
    constant_functor,
    discrete_category,
    enumerate_functors,
    equivalence_search,
    find_natural_iso,
    identity_functor,
    invertible_morphisms,
    is_relative_functor,
    opposite,
    ordinal,
    ordinal_max,
    ordinal_min,
    product,
    two_of_three_check,
    validate_category,
    validate_functor,
    validate_relative_category,
)


def count_monotone_maps(p: int, q: int) -> int:
    """Brute-force count of order-preserving maps [p] -> [q]."""
    total = 0
    for f in itertools.product(range(q + 1), repeat=p + 1):
        if all(f[i] <= f[i + 1] for i in range(p)):
            total += 1
    return total


def retraction_pair() -> RelativeCategory:
    """Two objects A, B with a retraction r . s = id_A; the marks break
    two-of-three: s and e = s . r are marked but r is not."""
    # morphisms: 0 = id_A, 1 = id_B, 2 = s: A -> B, 3 = r: B -> A, 4 = e: B -> B
    dom = (0, 1, 0, 1, 1)
    cod = (0, 1, 1, 0, 1)
    identity = (0, 1)
    table = {
        (0, 0): 0,
        (1, 1): 1,
        (2, 0): 2,
        (1, 2): 2,
        (3, 1): 3,
        (0, 3): 3,
        (4, 1): 4,
        (1, 4): 4,
        (3, 2): 0,  # r . s = id_A
        (2, 3): 4,  # s . r = e
        (4, 2): 2,  # e . s = s
        (3, 4): 3,  # r . e = r
        (4, 4): 4,  # e . e = e
    }
    cat = FiniteCategory(2, dom, cod, identity, table)
    return RelativeCategory(cat, frozenset({0, 1, 2, 4}))


# ---------------------------------------------------------------------------
# basic constructions


class TestOrdinal:
    def test_sizes(self):
        for p in range(5):
            cat = ordinal(p)
            assert cat.n_objects == p + 1
            assert cat.n_morphisms == (p + 1) * (p + 2) // 2

    def test_valid(self):
        for p in range(4):
            assert validate_category(ordinal(p)).ok

    def test_hom_is_thin(self):
        cat = ordinal(3)
        for a in cat.objects():
            for b in cat.objects():
                assert len(cat.hom(a, b)) == (1 if a <= b else 0)

    def test_marked_subsets(self):
        assert len(ordinal_min(2).weq) == 3
        assert len(ordinal_max(2).weq) == 6
        assert validate_relative_category(ordinal_min(2)).ok
        assert validate_relative_category(ordinal_max(2)).ok


class TestStockCategories:
    def test_discrete(self):
        cat = discrete_category(3)
        assert cat.n_morphisms == 3
        assert validate_category(cat).ok

    def test_chaotic(self):
        cat = chaotic_category(3)
        assert cat.n_morphisms == 9
        assert validate_category(cat).ok
        # every morphism of a chaotic category is invertible
        assert len(invertible_morphisms(cat)) == 9

    def test_preorder_requires_transitivity(self):
        with pytest.raises(ValueError):
            category_from_preorder(3, {(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)})

    def test_preorder(self):
        leq = {(a, a) for a in range(3)} | {(0, 1), (1, 2), (0, 2)}
        cat = category_from_preorder(3, leq)
        assert cat.n_morphisms == 6
        assert validate_category(cat).ok

    def test_monoid(self):
        # cyclic group of order 3
        mult = [[(a + b) % 3 for b in range(3)] for a in range(3)]
        cat = category_from_monoid(mult, 0)
        assert cat.n_objects == 1
        assert validate_category(cat).ok
        assert len(invertible_morphisms(cat)) == 3

    def test_validate_catches_broken_table(self):
        cat = ordinal(2)
        bad = dict(cat.table)
        # redirect the long arrow 0 -> 2 to factor wrongly
        pairs = [(i, j) for i in range(3) for j in range(i, 3)]
        index = {pr: k for k, pr in enumerate(pairs)}
        bad[(index[(1, 2)], index[(0, 1)])] = index[(2, 2)]
        broken = FiniteCategory(cat.n_objects, cat.dom, cat.cod, cat.identity, bad)
        rep = validate_category(broken)
        assert not rep.ok
        assert "dom-cod" in rep.kinds() or "associativity" in rep.kinds()

    def test_validate_catches_missing_entry(self):
        cat = ordinal(1)
        bad = dict(cat.table)
        del bad[(2, 1)]
        broken = FiniteCategory(cat.n_objects, cat.dom, cat.cod, cat.identity, bad)
        rep = validate_category(broken)
        assert "table" in rep.kinds()


class TestOppositeAndProduct:
    def test_opposite_involution(self):
        cat = ordinal(2)
        assert opposite(opposite(cat)) == cat

    def test_opposite_swaps_hom(self):
        cat = ordinal(2)
        op = opposite(cat)
        assert validate_category(op).ok
        for a in cat.objects():
            for b in cat.objects():
                assert cat.hom(a, b) == op.hom(b, a)

    def test_product_sizes(self):
        prod = product(ordinal(2), ordinal(1))
        assert prod.n_objects == 6
        assert prod.n_morphisms == 18
        assert validate_category(prod).ok

    def test_product_with_point_is_identity_shaped(self):
        cat = ordinal(2)
        prod = product(cat, ordinal(0))
        assert prod.n_objects == cat.n_objects
        assert prod.n_morphisms == cat.n_morphisms
        assert validate_category(prod).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.data())
def test_random_preorders_validate(n, data):
    base = data.draw(
        st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n * n
        )
    )
    leq = {(a, a) for a in range(n)} | set(base)
    # transitive closure
    changed = True
    while changed:
        changed = False
        for a, b in list(leq):
            for b2, c in list(leq):
                if b == b2 and (a, c) not in leq:
                    leq.add((a, c))
                    changed = True
    cat = category_from_preorder(n, leq)
    assert validate_category(cat).ok
    assert validate_category(opposite(cat)).ok


# ---------------------------------------------------------------------------
# relative structure


class TestRelative:
    def test_missing_identity_detected(self):
        cat = ordinal(1)
        rel = RelativeCategory(cat, frozenset({cat.identity[0]}))
        rep = validate_relative_category(rel)
        assert "identity-missing" in rep.kinds()

    def test_closure_violation_detected(self):
        cat = ordinal(2)
        pairs = [(i, j) for i in range(3) for j in range(i, 3)]
        index = {pr: k for k, pr in enumerate(pairs)}
        # mark the two short arrows but not their composite
        weq = frozenset(set(cat.identity) | {index[(0, 1)], index[(1, 2)]})
        rep = validate_relative_category(RelativeCategory(cat, weq))
        assert "closure" in rep.kinds()

    def test_two_of_three_holds_for_extremes(self):
        assert two_of_three_check(ordinal_min(3))
        assert two_of_three_check(ordinal_max(3))

    def test_two_of_three_fails_for_retraction_marks(self):
        rel = retraction_pair()
        assert validate_category(rel.underlying).ok
        assert validate_relative_category(rel).ok
        assert not two_of_three_check(rel)


# ---------------------------------------------------------------------------
# functors and natural transformations


class TestFunctors:
    def test_identity_and_constant_validate(self):
        cat = ordinal(2)
        assert validate_functor(identity_functor(cat)).ok
        assert validate_functor(constant_functor(cat, ordinal(1), 1)).ok

    def test_compose(self):
        c1, c2 = ordinal(1), ordinal(2)
        into = next(iter(enumerate_functors(c1, c2, Budget(10_000))))
        collapse = constant_functor(c2, c1, 0)
        comp = compose_functors(collapse, into)
        assert validate_functor(comp).ok
        assert comp.source == c1 and comp.target == c1

    def test_validate_catches_bad_images(self):
        cat = ordinal(1)
        # swap the two identities: breaks endpoint coherence
        bad = Functor(cat, cat, (0, 1), (2, 1, 0))
        assert not validate_functor(bad).ok

    def test_enumeration_counts_match_monotone_maps(self):
        for p, q in [(1, 1), (2, 1), (1, 2), (2, 2)]:
            fns = list(enumerate_functors(ordinal(p), ordinal(q), Budget(100_000)))
            assert len(fns) == count_monotone_maps(p, q)
            for fn in fns:
                assert validate_functor(fn).ok

    def test_enumeration_into_chaotic(self):
        fns = list(enumerate_functors(ordinal(1), chaotic_category(2), Budget(10_000)))
        assert len(fns) == 4
        for fn in fns:
            assert validate_functor(fn).ok

    def test_relative_functor_check(self):
        x = ordinal_max(1)
        y = ordinal_min(1)
        ident = identity_functor(x.underlying)
        assert is_relative_functor(ident, x, x)
        assert not is_relative_functor(ident, x, y)
        assert is_relative_functor(ident, y, x)


class TestNaturalTransformations:
    def test_pointwise_leq_gives_transformation(self):
        c1, c2 = ordinal(1), ordinal(2)
        fns = sorted(
            enumerate_functors(c1, c2, Budget(100_000)), key=lambda f: f.obj_map
        )
        lower = next(f for f in fns if f.obj_map == (0, 1))
        upper = next(f for f in fns if f.obj_map == (1, 2))
        comps = tuple(
            c2.hom(lower.obj_map[x], upper.obj_map[x])[0] for x in c1.objects()
        )
        eta = NaturalTransformation(lower, upper, comps)
        assert check_natural_transformation(eta).ok

    def test_wrong_endpoints_detected(self):
        cat = ordinal(1)
        ident = identity_functor(cat)
        eta = NaturalTransformation(ident, ident, (2, 0))
        rep = check_natural_transformation(eta)
        assert "dom-cod" in rep.kinds()

    def test_naturality_failure_detected(self):
        # on the chaotic category with 2 objects, the swap components are
        # not natural for the pair (identity, identity) unless the square
        # with the two cross arrows commutes -- here it does, so perturb by
        # pairing identity with the constant endofunctor instead.
        cat = chaotic_category(2)
        ident = identity_functor(cat)
        const = constant_functor(cat, cat, 0)
        bad = NaturalTransformation(ident, const, (cat.identity[0], cat.identity[0]))
        rep = check_natural_transformation(bad)
        assert not rep.ok

    def test_find_natural_iso_between_constants_in_chaotic(self):
        cat = chaotic_category(3)
        c0 = constant_functor(cat, cat, 0)
        c1 = constant_functor(cat, cat, 1)
        eta = find_natural_iso(c0, c1, Budget(10_000))
        assert eta is not None
        assert check_natural_transformation(eta).ok

    def test_no_iso_between_distinct_discrete_constants(self):
        cat = discrete_category(2)
        c0 = constant_functor(cat, cat, 0)
        c1 = constant_functor(cat, cat, 1)
        assert find_natural_iso(c0, c1, Budget(10_000)) is None


# ---------------------------------------------------------------------------
# zigzags


class TestZigzag:
    def make_collapse_witnesses(self, rel_x):
        """Zigzags exhibiting ordinal(1) ~ point via the retraction onto 0."""
        x = rel_x.underlying
        y = ordinal_max(0)
        f = constant_functor(x, y.underlying, 0)
        g = Functor(y.underlying, x, (0,), (x.identity[0],))
        gf = compose_functors(g, f)
        # unique arrow component (0 -> 0 at object 0, 0 -> 1 at object 1)
        comps = tuple(x.hom(gf.obj_map[o], o)[0] for o in x.objects())
        eta = NaturalTransformation(gf, identity_functor(x), comps)
        wx = ZigzagWitness((ZigzagStep(True, eta),))
        wy = ZigzagWitness(())  # f . g is already the identity
        return f, g, wx, wy, y

    def test_collapse_is_homotopy_equivalence_when_marked(self):
        rel_x = ordinal_max(1)
        f, g, wx, wy, y = self.make_collapse_witnesses(rel_x)
        rep = check_homotopy_equivalence_witness(f, g, wx, wy, rel_x, y)
        assert rep.ok

    def test_unmarked_component_rejected(self):
        rel_x = ordinal_min(1)
        f, g, wx, wy, y = self.make_collapse_witnesses(rel_x)
        rep = check_homotopy_equivalence_witness(f, g, wx, wy, rel_x, y)
        assert "weq-component" in rep.kinds()

    def test_broken_chain_rejected(self):
        rel_x = ordinal_max(1)
        f, g, wx, _, y = self.make_collapse_witnesses(rel_x)
        # hand the X-side zigzag in on the Y side where it cannot attach
        rep = check_homotopy_equivalence_witness(f, g, wx, wx, rel_x, y)
        assert "chain" in rep.kinds()

    def test_empty_zigzag_needs_equal_endpoints(self):
        rel = ordinal_max(1)
        ident = identity_functor(rel.underlying)
        const = constant_functor(rel.underlying, rel.underlying, 0)
        rep = check_zigzag(ZigzagWitness(()), const, ident, rel, rel)
        assert "chain" in rep.kinds()
        assert check_zigzag(ZigzagWitness(()), ident, ident, rel, rel).ok

    def test_backward_step(self):
        rel_x = ordinal_max(1)
        x = rel_x.underlying
        f, g, _, _, _ = self.make_collapse_witnesses(rel_x)
        gf = compose_functors(g, f)
        comps = tuple(x.hom(gf.obj_map[o], o)[0] for o in x.objects())
        eta = NaturalTransformation(gf, identity_functor(x), comps)
        # same transformation, traversed from the identity end
        wx = ZigzagWitness((ZigzagStep(False, eta),))
        rep = check_zigzag(wx, identity_functor(x), gf, rel_x, rel_x)
        assert rep.ok


# ---------------------------------------------------------------------------
# equivalence search


class TestEquivalenceSearch:
    def test_chaotic_categories_are_equivalent(self):
        out = equivalence_search(chaotic_category(1), chaotic_category(2))
        assert out.status == "found"
        w = out.witness
        assert validate_functor(w.forward).ok
        assert validate_functor(w.backward).ok
        assert check_natural_transformation(w.unit).ok
        assert check_natural_transformation(w.counit).ok

    def test_chaotic_2_vs_3(self):
        out = equivalence_search(chaotic_category(2), chaotic_category(3))
        assert out.status == "found"

    def test_point_vs_discrete_pair_has_none(self):
        out = equivalence_search(ordinal(0), discrete_category(2))
        assert out.status == "none"

    def test_distinct_ordinals_have_none(self):
        out = equivalence_search(ordinal(1), ordinal(2))
        assert out.status == "none"

    def test_budget_exhaustion_reported(self):
        out = equivalence_search(ordinal(2), ordinal(2), limit=5)
        assert out.status == "budget"
        assert out.witness is None

    def test_self_equivalence(self):
        out = equivalence_search(ordinal(2), ordinal(2))
        assert out.status == "found"
