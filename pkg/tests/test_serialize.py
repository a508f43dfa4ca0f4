"""Round-trip and error behaviour of the text serialization grammar."""

import pytest

from relcat.catcore import chaotic_category, ordinal
from relcat.generators import (
    GenParams,
    gen_relative_category,
    gen_simplicial_category,
    gen_simplicial_set,
)
from relcat.nerve import relative_nerve
from relcat.scat import enriched_nerve, trivial_simplicial_category
from relcat.serialize import (
    parse_bisimplicial_set,
    parse_category,
    parse_facets,
    parse_object,
    parse_relative_category,
    parse_simplicial_category,
    parse_simplicial_set,
    serialize_bisimplicial_set,
    serialize_category,
    serialize_facets,
    serialize_relative_category,
    serialize_simplicial_category,
    serialize_simplicial_set,
)
from relcat.simplicial import standard_simplex


def same_simplicial_category(one, two):
    return (
        one.n_objects == two.n_objects
        and one.homs == two.homs
        and one.units == two.units
        and all(
            one.comp[a][b][c].levels == two.comp[a][b][c].levels
            for a in range(one.n_objects)
            for b in range(one.n_objects)
            for c in range(one.n_objects)
        )
    )


class TestCategoryRoundTrip:
    @pytest.mark.parametrize("cat", [ordinal(0), ordinal(2), chaotic_category(3)])
    def test_category(self, cat):
        assert parse_category(serialize_category(cat)) == cat

    @pytest.mark.parametrize("seed", range(8))
    def test_relative_category(self, seed):
        rel = gen_relative_category(GenParams(seed=seed))
        assert parse_relative_category(serialize_relative_category(rel)) == rel

    def test_serialization_is_deterministic(self):
        cat = chaotic_category(2)
        assert serialize_category(cat) == serialize_category(cat)


class TestSimplicialRoundTrip:
    @pytest.mark.parametrize("seed", range(8))
    def test_generated_sets(self, seed):
        X = gen_simplicial_set(GenParams(seed=seed))
        assert parse_simplicial_set(serialize_simplicial_set(X)) == X

    def test_standard_simplex(self):
        X = standard_simplex(2, 3)
        assert parse_simplicial_set(serialize_simplicial_set(X)) == X

    def test_relative_nerve(self):
        rel = gen_relative_category(GenParams(seed=3))
        B = relative_nerve(rel, 2, 2)
        assert parse_bisimplicial_set(serialize_bisimplicial_set(B)) == B

    def test_enriched_nerve(self):
        A = gen_simplicial_category(GenParams(seed=5))
        Z = enriched_nerve(A, 2)
        assert parse_bisimplicial_set(serialize_bisimplicial_set(Z)) == Z


class TestSimplicialCategoryRoundTrip:
    @pytest.mark.parametrize("seed", range(8))
    def test_generated(self, seed):
        A = gen_simplicial_category(GenParams(seed=seed))
        back = parse_simplicial_category(serialize_simplicial_category(A))
        assert same_simplicial_category(A, back)

    def test_point_category(self):
        T = trivial_simplicial_category(1)
        back = parse_simplicial_category(serialize_simplicial_category(T))
        assert same_simplicial_category(T, back)


class TestFacets:
    def test_round_trip(self):
        facets = [(0, 1, 2), (2, 3)]
        assert parse_facets(serialize_facets(facets)) == facets

    def test_comments_and_blanks_skipped(self):
        assert parse_facets("# two facets\n0 1 2\n\n2 3  # tail\n") == [
            (0, 1, 2),
            (2, 3),
        ]

    def test_non_integer_rejected_with_line(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_facets("0 1\n0 x\n")


class TestDispatchAndErrors:
    def test_dispatch_by_header(self):
        assert parse_object(serialize_category(ordinal(2))) == ordinal(2)
        X = standard_simplex(1, 1)
        assert parse_object(serialize_simplicial_set(X)) == X

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown document kind"):
            parse_object("mystery 1 2\nend\n")

    def test_empty_document(self):
        with pytest.raises(ValueError, match="empty"):
            parse_object("# nothing here\n")

    def test_non_integer_field(self):
        with pytest.raises(ValueError, match="line 2: non-integer"):
            parse_category("category\nobjects x\nend\n")

    def test_wrong_field_count(self):
        with pytest.raises(ValueError, match="needs"):
            parse_simplicial_set("simplicial-set\ntruncation 1\nsizes 1\nend\n")

    def test_trailing_content(self):
        text = serialize_category(ordinal(0)) + "extra\n"
        with pytest.raises(ValueError, match="trailing"):
            parse_category(text)

    def test_sequential_morphism_ids_enforced(self):
        text = (
            "category\nobjects 1\nmorphisms 1\nmorphism 3 0 0\n"
            "identities 0\nend\n"
        )
        with pytest.raises(ValueError, match="sequential"):
            parse_category(text)
