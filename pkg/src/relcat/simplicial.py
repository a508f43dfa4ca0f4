"""Truncated simplicial sets, simplicial operators, and simplex categories.

A truncated simplicial set stores only its face/degeneracy generators as
index tables up to a truncation level; every other structure map is derived
by factoring its monotone carrier into faces followed by degeneracies.
"""

from __future__ import annotations

import functools
import itertools
import weakref
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .catcore import FiniteCategory, opposite
from .reports import ValidationReport


def memo_by_identity(fn):
    """Memoize on the identity of the first argument plus the remaining args.

    Derived views (simplex categories, nerves) are expensive to tabulate and
    are requested repeatedly for the same object inside one verification
    pipeline.  Keying on ``id`` avoids hashing large structures; a weakref
    callback drops the entry as soon as the keyed object is collected, so a
    recycled id can never serve a stale value.
    """
    cache: dict = {}

    @functools.wraps(fn)
    def wrapped(obj, *rest):
        key = (id(obj), *rest)
        hit = cache.get(key)
        if hit is not None:
            return hit[0]
        value = fn(obj, *rest)
        ref = weakref.ref(obj, lambda _gone, _key=key: cache.pop(_key, None))
        cache[key] = (value, ref)
        return value

    return wrapped


@dataclass(frozen=True)
class SimplicialOperator:
    """An abstract structure map X_{from_dim} -> X_{to_dim}.

    Encoded contravariantly: ``carrier`` is the underlying monotone map
    [to_dim] -> [from_dim], so faces drop a value and degeneracies repeat
    one.  Composition of operators composes carriers the other way round.
    """

    from_dim: int
    to_dim: int
    carrier: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.from_dim < 0 or self.to_dim < 0:
            raise ValueError("dimensions must be non-negative")
        c = self.carrier
        if len(c) != self.to_dim + 1:
            raise ValueError("carrier length must be to_dim + 1")
        if any(v < 0 or v > self.from_dim for v in c):
            raise ValueError("carrier value out of range")
        if any(c[i] > c[i + 1] for i in range(len(c) - 1)):
            raise ValueError("carrier must be weakly increasing")

    @property
    def is_identity(self) -> bool:
        return self.from_dim == self.to_dim and self.carrier == tuple(
            range(self.to_dim + 1)
        )


def identity_operator(p: int) -> SimplicialOperator:
    return SimplicialOperator(p, p, tuple(range(p + 1)))


def face_operator(n: int, i: int) -> SimplicialOperator:
    """The i-th face X_n -> X_{n-1}; its carrier skips the value i."""
    if not 0 <= i <= n:
        raise ValueError("face index out of range")
    return SimplicialOperator(n, n - 1, tuple(v for v in range(n + 1) if v != i))


def degeneracy_operator(n: int, i: int) -> SimplicialOperator:
    """The i-th degeneracy X_n -> X_{n+1}; its carrier repeats the value i."""
    if not 0 <= i <= n:
        raise ValueError("degeneracy index out of range")
    return SimplicialOperator(
        n, n + 1, tuple(sorted(tuple(range(n + 1)) + (i,)))
    )


def operator_compose(t2: SimplicialOperator, t1: SimplicialOperator) -> SimplicialOperator:
    """Composite operator "t1 then t2"; carriers compose the opposite way."""
    if t1.to_dim != t2.from_dim:
        raise ValueError("operators are not composable")
    return SimplicialOperator(
        t1.from_dim, t2.to_dim, tuple(t1.carrier[v] for v in t2.carrier)
    )


def all_operators(p1: int, p2: int) -> list[SimplicialOperator]:
    """Every operator from dimension p1 to dimension p2, carrier-lexicographic."""
    return [
        SimplicialOperator(p1, p2, c)
        for c in itertools.combinations_with_replacement(range(p1 + 1), p2 + 1)
    ]


# ---------------------------------------------------------------------------
# truncated simplicial sets


@dataclass(frozen=True)
class TruncatedSimplicialSet:
    """Simplex tables up to level ``trunc``, with generator structure maps.

    ``faces[n][i]`` (1 <= n <= trunc, 0 <= i <= n) tabulates d_i on level n;
    ``degeneracies[n][i]`` (0 <= n < trunc) tabulates s_i.  ``faces[0]`` and
    ``degeneracies[trunc]`` are empty placeholders so levels index directly.
    """

    trunc: int
    sizes: tuple[int, ...]
    faces: tuple[tuple[tuple[int, ...], ...], ...]
    degeneracies: tuple[tuple[tuple[int, ...], ...], ...]

    def size(self, n: int) -> int:
        return self.sizes[n]

    def face(self, n: int, i: int, x: int) -> int:
        return self.faces[n][i][x]

    def degeneracy(self, n: int, i: int, x: int) -> int:
        return self.degeneracies[n][i][x]


def tabulate_simplicial_set(
    labels: Sequence[Sequence],
    face_of: Callable[[int, int, object], object],
    degen_of: Callable[[int, int, object], object],
) -> TruncatedSimplicialSet:
    """Build index tables from labelled simplices and label-level maps."""
    trunc = len(labels) - 1
    index = [{lab: k for k, lab in enumerate(level)} for level in labels]
    faces: list[tuple] = [()]
    for n in range(1, trunc + 1):
        faces.append(
            tuple(
                tuple(index[n - 1][face_of(n, i, lab)] for lab in labels[n])
                for i in range(n + 1)
            )
        )
    degens: list[tuple] = []
    for n in range(trunc):
        degens.append(
            tuple(
                tuple(index[n + 1][degen_of(n, i, lab)] for lab in labels[n])
                for i in range(n + 1)
            )
        )
    degens.append(())
    return TruncatedSimplicialSet(
        trunc, tuple(len(level) for level in labels), tuple(faces), tuple(degens)
    )


def act(X: TruncatedSimplicialSet, t: SimplicialOperator, x: int) -> int:
    """Apply an abstract operator to a simplex.

    The carrier factors uniquely as a composite of face maps (at the values
    it misses, largest first) followed by degeneracies (at the positions it
    repeats, smallest first); both phases apply the stored generator tables.
    """
    if t.from_dim > X.trunc or t.to_dim > X.trunc:
        raise ValueError("operator leaves the truncation")
    c = t.carrier
    hit = set(c)
    cur = x
    dim = t.from_dim
    for i in range(t.from_dim, -1, -1):
        if i not in hit:
            cur = X.faces[dim][i][cur]
            dim -= 1
    for j in range(t.to_dim):
        if c[j] == c[j + 1]:
            cur = X.degeneracies[dim][j][cur]
            dim += 1
    return cur


def validate_simplicial_set(X: TruncatedSimplicialSet) -> ValidationReport:
    """List every broken simplicial identity within the truncation."""
    rep = ValidationReport()
    P = X.trunc
    if len(X.sizes) != P + 1 or len(X.faces) != P + 1 or len(X.degeneracies) != P + 1:
        rep.add("shape", "level count disagrees with truncation")
        return rep
    for n in range(1, P + 1):
        if len(X.faces[n]) != n + 1:
            rep.add("shape", f"level {n}: expected {n + 1} face tables")
            return rep
        for i in range(n + 1):
            tab = X.faces[n][i]
            if len(tab) != X.sizes[n] or any(
                not 0 <= v < X.sizes[n - 1] for v in tab
            ):
                rep.add("shape", f"face table ({n}, {i}) malformed")
                return rep
    for n in range(P):
        if len(X.degeneracies[n]) != n + 1:
            rep.add("shape", f"level {n}: expected {n + 1} degeneracy tables")
            return rep
        for i in range(n + 1):
            tab = X.degeneracies[n][i]
            if len(tab) != X.sizes[n] or any(
                not 0 <= v < X.sizes[n + 1] for v in tab
            ):
                rep.add("shape", f"degeneracy table ({n}, {i}) malformed")
                return rep

    for n in range(2, P + 1):
        for x in range(X.sizes[n]):
            for j in range(n + 1):
                for i in range(j):
                    if X.face(n - 1, i, X.face(n, j, x)) != X.face(
                        n - 1, j - 1, X.face(n, i, x)
                    ):
                        rep.add("face-face", f"d_{i} d_{j} at level {n}, simplex {x}")
    for n in range(P - 1):
        for x in range(X.sizes[n]):
            for j in range(n + 1):
                for i in range(j + 1):
                    if X.degeneracy(n + 1, i, X.degeneracy(n, j, x)) != X.degeneracy(
                        n + 1, j + 1, X.degeneracy(n, i, x)
                    ):
                        rep.add(
                            "degen-degen", f"s_{i} s_{j} at level {n}, simplex {x}"
                        )
    for n in range(P):
        for x in range(X.sizes[n]):
            for j in range(n + 1):
                sx = X.degeneracy(n, j, x)
                for i in range(n + 2):
                    got = X.face(n + 1, i, sx)
                    if i == j or i == j + 1:
                        want = x
                    elif i < j:
                        want = X.degeneracy(n - 1, j - 1, X.face(n, i, x))
                    else:
                        want = X.degeneracy(n - 1, j, X.face(n, i - 1, x))
                    if got != want:
                        rep.add(
                            "face-degen", f"d_{i} s_{j} at level {n}, simplex {x}"
                        )
    return rep


# ---------------------------------------------------------------------------
# constructions


def facet_complex_labels(
    facets: Iterable[Iterable[int]], trunc: int
) -> list[list[tuple[int, ...]]]:
    """Simplices of an ordered facet complex, as weakly increasing vertex
    chains supported inside some facet; level k lists are lexicographic."""
    supports = [frozenset(f) for f in facets]
    vertices = sorted(set().union(*supports)) if supports else []
    labels: list[list[tuple[int, ...]]] = []
    for k in range(trunc + 1):
        level = [
            chain
            for chain in itertools.combinations_with_replacement(vertices, k + 1)
            if any(set(chain) <= s for s in supports)
        ]
        labels.append(level)
    return labels


def from_facets(facets: Iterable[Iterable[int]], trunc: int) -> TruncatedSimplicialSet:
    """The simplicial set of weakly increasing vertex chains inside facets."""
    labels = facet_complex_labels(facets, trunc)
    return tabulate_simplicial_set(
        labels,
        lambda n, i, lab: lab[:i] + lab[i + 1 :],
        lambda n, i, lab: lab[: i + 1] + lab[i:],
    )


def standard_simplex(n: int, trunc: int) -> TruncatedSimplicialSet:
    """The n-simplex truncated at ``trunc``; level k holds the monotone
    (k+1)-tuples in 0..n, lexicographically indexed."""
    return from_facets([range(n + 1)], trunc)


def standard_simplex_labels(n: int, trunc: int) -> list[list[tuple[int, ...]]]:
    return facet_complex_labels([range(n + 1)], trunc)


def empty_simplicial_set(trunc: int) -> TruncatedSimplicialSet:
    faces = ((),) + tuple(
        tuple(() for _ in range(n + 1)) for n in range(1, trunc + 1)
    )
    degens = tuple(tuple(() for _ in range(n + 1)) for n in range(trunc)) + ((),)
    return TruncatedSimplicialSet(trunc, (0,) * (trunc + 1), faces, degens)


def discrete_simplicial_set(n_points: int, trunc: int) -> TruncatedSimplicialSet:
    """n_points path components and nothing else; every level is the same
    index set, with all faces and degeneracies the identity."""
    ident = tuple(range(n_points))
    faces = ((),) + tuple(
        tuple(ident for _ in range(n + 1)) for n in range(1, trunc + 1)
    )
    degens = tuple(
        tuple(ident for _ in range(n + 1)) for n in range(trunc)
    ) + ((),)
    return TruncatedSimplicialSet(trunc, (n_points,) * (trunc + 1), faces, degens)


def reverse(X: TruncatedSimplicialSet) -> TruncatedSimplicialSet:
    """Reverse vertex order: d_i becomes d_{n-i} and s_i becomes s_{n-i}."""
    faces = [()] + [
        tuple(X.faces[n][n - i] for i in range(n + 1)) for n in range(1, X.trunc + 1)
    ]
    degens = [
        tuple(X.degeneracies[n][n - i] for i in range(n + 1)) for n in range(X.trunc)
    ] + [()]
    return TruncatedSimplicialSet(X.trunc, X.sizes, tuple(faces), tuple(degens))


def truncate(X: TruncatedSimplicialSet, trunc: int) -> TruncatedSimplicialSet:
    if trunc > X.trunc:
        raise ValueError("cannot extend a truncation")
    return TruncatedSimplicialSet(
        trunc,
        X.sizes[: trunc + 1],
        X.faces[: trunc + 1],
        X.degeneracies[:trunc] + ((),),
    )


def disjoint_union(parts: Sequence[TruncatedSimplicialSet]) -> TruncatedSimplicialSet:
    """Levelwise disjoint union; ids of later parts are shifted up."""
    if not parts:
        raise ValueError("need at least one part")
    trunc = parts[0].trunc
    if any(p.trunc != trunc for p in parts):
        raise ValueError("truncation mismatch")
    sizes = tuple(sum(p.sizes[n] for p in parts) for n in range(trunc + 1))
    faces: list[tuple] = [()]
    for n in range(1, trunc + 1):
        level = []
        for i in range(n + 1):
            tab: list[int] = []
            offset = 0
            for p in parts:
                tab.extend(v + offset for v in p.faces[n][i])
                offset += p.sizes[n - 1]
            level.append(tuple(tab))
        faces.append(tuple(level))
    degens: list[tuple] = []
    for n in range(trunc):
        level = []
        for i in range(n + 1):
            tab = []
            offset = 0
            for p in parts:
                tab.extend(v + offset for v in p.degeneracies[n][i])
                offset += p.sizes[n + 1]
            level.append(tuple(tab))
        degens.append(tuple(level))
    degens.append(())
    return TruncatedSimplicialSet(trunc, sizes, tuple(faces), tuple(degens))


def product2(
    X: TruncatedSimplicialSet, Y: TruncatedSimplicialSet
) -> TruncatedSimplicialSet:
    """Levelwise product; pair (x, y) at level n gets id x * |Y_n| + y."""
    if X.trunc != Y.trunc:
        raise ValueError("truncation mismatch")
    trunc = X.trunc
    sizes = tuple(X.sizes[n] * Y.sizes[n] for n in range(trunc + 1))
    faces: list[tuple] = [()]
    for n in range(1, trunc + 1):
        b, b1 = Y.sizes[n], Y.sizes[n - 1]
        faces.append(
            tuple(
                tuple(
                    X.faces[n][i][z // b] * b1 + Y.faces[n][i][z % b]
                    for z in range(sizes[n])
                )
                for i in range(n + 1)
            )
        )
    degens: list[tuple] = []
    for n in range(trunc):
        b, b1 = Y.sizes[n], Y.sizes[n + 1]
        degens.append(
            tuple(
                tuple(
                    X.degeneracies[n][i][z // b] * b1 + Y.degeneracies[n][i][z % b]
                    for z in range(sizes[n])
                )
                for i in range(n + 1)
            )
        )
    degens.append(())
    return TruncatedSimplicialSet(trunc, sizes, tuple(faces), tuple(degens))


def nondegenerate(X: TruncatedSimplicialSet) -> tuple[tuple[int, ...], ...]:
    """Per level, the ids of simplices not hit by any degeneracy."""
    out = [tuple(range(X.sizes[0]))]
    for n in range(1, X.trunc + 1):
        hit: set[int] = set()
        for tab in X.degeneracies[n - 1]:
            hit.update(tab)
        out.append(tuple(x for x in range(X.sizes[n]) if x not in hit))
    return tuple(out)


# ---------------------------------------------------------------------------
# simplicial maps


@dataclass(frozen=True)
class SimplicialMap:
    source: TruncatedSimplicialSet
    target: TruncatedSimplicialSet
    levels: tuple[tuple[int, ...], ...]

    def apply(self, n: int, x: int) -> int:
        return self.levels[n][x]


def validate_simplicial_map(f: SimplicialMap) -> ValidationReport:
    """Check the map commutes with every face and degeneracy in truncation."""
    rep = ValidationReport()
    X, Y = f.source, f.target
    if X.trunc != Y.trunc:
        rep.add("shape", "source/target truncation mismatch")
        return rep
    if len(f.levels) != X.trunc + 1 or any(
        len(f.levels[n]) != X.sizes[n] for n in range(X.trunc + 1)
    ):
        rep.add("shape", "level map lengths disagree with source sizes")
        return rep
    for n in range(X.trunc + 1):
        if any(not 0 <= v < Y.sizes[n] for v in f.levels[n]):
            rep.add("shape", f"level {n} has out-of-range values")
            return rep
    for n in range(1, X.trunc + 1):
        for i in range(n + 1):
            for x in range(X.sizes[n]):
                if Y.face(n, i, f.levels[n][x]) != f.levels[n - 1][X.face(n, i, x)]:
                    rep.add("face", f"d_{i} at level {n}, simplex {x}")
    for n in range(X.trunc):
        for i in range(n + 1):
            for x in range(X.sizes[n]):
                if Y.degeneracy(n, i, f.levels[n][x]) != f.levels[n + 1][
                    X.degeneracy(n, i, x)
                ]:
                    rep.add("degeneracy", f"s_{i} at level {n}, simplex {x}")
    return rep


def truncate_map(f: SimplicialMap, trunc: int) -> SimplicialMap:
    return SimplicialMap(
        truncate(f.source, trunc), truncate(f.target, trunc), f.levels[: trunc + 1]
    )


def identity_map(X: TruncatedSimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, X, tuple(tuple(range(s)) for s in X.sizes))


def compose_maps(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    if f.target != g.source:
        raise ValueError("maps are not composable")
    return SimplicialMap(
        f.source,
        g.target,
        tuple(
            tuple(g.levels[n][v] for v in f.levels[n]) for n in range(f.source.trunc + 1)
        ),
    )


# ---------------------------------------------------------------------------
# simplex categories


@dataclass(frozen=True, eq=False)
class SimplexCategory:
    """A tabulated simplex category with its labelling data.

    ``objects[k]`` is the pair (level, simplex id); ``carriers[m]`` is the
    monotone map labelling morphism m.  For the operator variant a morphism
    (p1, x1) -> (p2, x2) is an operator acting X_{p1} -> X_{p2}, carrier
    [p2] -> [p1]; the plain variant is its opposite with the same labels,
    so there the carrier of (p1, x1) -> (p2, x2) is monotone [p1] -> [p2].
    """

    category: FiniteCategory
    objects: tuple[tuple[int, int], ...]
    carriers: tuple[tuple[int, ...], ...]

    def object_index(self, p: int, x: int) -> int:
        return self._obj_index[(p, x)]

    def morphism_index(self, dom: int, cod: int, carrier: tuple[int, ...]) -> int:
        return self._mor_index[(dom, cod, carrier)]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_obj_index", {o: k for k, o in enumerate(self.objects)}
        )
        cat = self.category
        object.__setattr__(
            self,
            "_mor_index",
            {
                (cat.dom[m], cat.cod[m], self.carriers[m]): m
                for m in cat.morphisms()
            },
        )


@memo_by_identity
def simplex_operator_category(X: TruncatedSimplicialSet) -> SimplexCategory:
    """The category of simplices of X in operator form.

    Objects are all pairs (p, x) with p within truncation, degenerate
    simplices included; a morphism (p1, x1) -> (p2, x2) is an operator t
    from dimension p1 to dimension p2 with act(X, t, x1) = x2.
    """
    objects = [(p, x) for p in range(X.trunc + 1) for x in range(X.size(p))]
    obj_index = {o: k for k, o in enumerate(objects)}
    ops_by_pair = {
        (p1, p2): all_operators(p1, p2)
        for p1 in range(X.trunc + 1)
        for p2 in range(X.trunc + 1)
    }

    dom: list[int] = []
    cod: list[int] = []
    carriers: list[tuple[int, ...]] = []
    mor_index: dict[tuple[int, tuple[int, ...]], int] = {}
    by_dom: list[list[int]] = [[] for _ in objects]
    for src, (p1, x1) in enumerate(objects):
        for p2 in range(X.trunc + 1):
            for t in ops_by_pair[(p1, p2)]:
                mid = len(dom)
                dom.append(src)
                cod.append(obj_index[(p2, act(X, t, x1))])
                carriers.append(t.carrier)
                mor_index[(src, t.carrier)] = mid
                by_dom[src].append(mid)

    identity = tuple(
        mor_index[(k, tuple(range(p + 1)))] for k, (p, x) in enumerate(objects)
    )
    table: dict[tuple[int, int], int] = {}
    for f in range(len(dom)):
        cf = carriers[f]
        src = dom[f]
        for g in by_dom[cod[f]]:
            composed = tuple(cf[v] for v in carriers[g])
            table[(g, f)] = mor_index[(src, composed)]
    cat = FiniteCategory(
        len(objects), tuple(dom), tuple(cod), identity, table
    )
    return SimplexCategory(cat, tuple(objects), tuple(carriers))


@memo_by_identity
def simplex_category(X: TruncatedSimplicialSet) -> SimplexCategory:
    """The plain category of simplices: the opposite of the operator form.

    Morphism ids and carrier labels are shared with
    ``simplex_operator_category``; only dom/cod and the table are flipped.
    A morphism (p1, x1) -> (p2, x2) here is a monotone map a: [p1] -> [p2]
    pulling x2 back to x1.
    """
    gop = simplex_operator_category(X)
    return SimplexCategory(opposite(gop.category), gop.objects, gop.carriers)


def simplex_category_functor(h: SimplicialMap) -> "Functor":
    """The functor between plain simplex categories induced by a simplicial
    map: (p, x) goes to (p, h(x)) and carrier labels are preserved."""
    from .catcore import Functor

    gx = simplex_category(h.source)
    gy = simplex_category(h.target)
    obj_map = tuple(
        gy.object_index(p, h.levels[p][x]) for (p, x) in gx.objects
    )
    cat = gx.category
    try:
        mor_map = tuple(
            gy.morphism_index(
                obj_map[cat.dom[m]], obj_map[cat.cod[m]], gx.carriers[m]
            )
            for m in cat.morphisms()
        )
    except KeyError as exc:
        raise ValueError("the map does not commute with the operators") from exc
    return Functor(cat, gy.category, obj_map, mor_map)


def last_vertex_of_chain(
    X: TruncatedSimplicialSet,
    dims: Sequence[int],
    carriers: Sequence[tuple[int, ...]],
    x_top: int,
) -> int:
    """Evaluate the last-vertex assignment on one chain of simplices.

    The chain lives in the plain simplex category: ``dims`` lists the q+1
    object levels, ``carriers[i]`` is the monotone map [dims[i]] ->
    [dims[i+1]] of the i-th arrow, and ``x_top`` is the simplex at the far
    end.  The value is the image of x_top under the operator whose carrier
    sends i to the position of the top vertex of stage i inside the final
    level.
    """
    q = len(carriers)
    phi = []
    for i in range(q + 1):
        v = dims[i]
        for j in range(i, q):
            v = carriers[j][v]
        phi.append(v)
    return act(X, SimplicialOperator(dims[-1], q, tuple(phi)), x_top)
