"""Nerves: classical, levelwise over diagrams of categories, and the
bisimplicial nerve of a relative category.

Chains are labelled by (object tuple, morphism tuple); bisimplicial data is
stored cellwise with two generator-table families, outer first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .catcore import (
    FiniteCategory,
    Functor,
    RelativeCategory,
    compose_functors,
    validate_functor,
)
from .reports import ValidationReport
from .simplicial import (
    SimplicialMap,
    SimplicialOperator,
    TruncatedSimplicialSet,
    act,
    compose_maps,
    memo_by_identity,
    simplex_category,
    simplex_category_functor,
    truncate,
    truncate_map,
)

Chain = tuple[tuple[int, ...], tuple[int, ...]]


# ---------------------------------------------------------------------------
# classical nerve


def chain_face(cat: FiniteCategory, i: int, chain: Chain) -> Chain:
    """Drop object i of a composable chain, composing through it if interior."""
    objs, mors = chain
    q = len(mors)
    if i == 0:
        return objs[1:], mors[1:]
    if i == q:
        return objs[:-1], mors[:-1]
    merged = cat.compose(mors[i], mors[i - 1])
    return objs[:i] + objs[i + 1 :], mors[: i - 1] + (merged,) + mors[i + 1 :]


def chain_degeneracy(cat: FiniteCategory, i: int, chain: Chain) -> Chain:
    """Repeat object i, inserting its identity arrow."""
    objs, mors = chain
    ident = cat.identity[objs[i]]
    return objs[: i + 1] + objs[i:], mors[:i] + (ident,) + mors[i:]


def chain_levels(cat: FiniteCategory, depth: int) -> list[list[Chain]]:
    """Composable chains per length, ordered by extension of shorter chains."""
    levels: list[list[Chain]] = [[((x,), ()) for x in cat.objects()]]
    for _ in range(depth):
        nxt = []
        for objs, mors in levels[-1]:
            for m in cat.out_of(objs[-1]):
                nxt.append((objs + (cat.cod[m],), mors + (m,)))
        levels.append(nxt)
    return levels


@dataclass(frozen=True, eq=False)
class NerveChains:
    """A classical nerve together with its chain labels and index maps."""

    space: TruncatedSimplicialSet
    chains: tuple[tuple[Chain, ...], ...]

    def index(self, q: int, chain: Chain) -> int:
        table = getattr(self, "_index", None)
        if table is None:
            table = tuple(
                {c: k for k, c in enumerate(level)} for level in self.chains
            )
            object.__setattr__(self, "_index", table)
        return table[q][chain]

    def flat_index(self, q: int) -> dict:
        """Level index keyed by the morphism tuple alone (level 0 by the
        object); a chain of length >= 1 is determined by its morphisms."""
        tables = getattr(self, "_flat", None)
        if tables is None:
            tables = [None] * len(self.chains)
            object.__setattr__(self, "_flat", tables)
        if tables[q] is None:
            if q == 0:
                tables[q] = {objs[0]: k for k, (objs, _) in enumerate(self.chains[0])}
            else:
                tables[q] = {mors: k for k, (_, mors) in enumerate(self.chains[q])}
        return tables[q]


def _nerve_space(cat: FiniteCategory, levels: list[list[Chain]]) -> TruncatedSimplicialSet:
    """Tabulate the nerve with hot dictionaries keyed by flat morphism
    tuples; produces exactly what tabulating over chain labels would."""
    trunc = len(levels) - 1
    index: list = [None] + [
        {mors: k for k, (_, mors) in enumerate(level)} for level in levels[1:]
    ]
    table = cat.table
    identity = cat.identity
    faces: list[tuple] = [()]
    for n in range(1, trunc + 1):
        ix = index[n - 1]
        rows = []
        for i in range(n + 1):
            if n == 1:
                pos = 1 if i == 0 else 0
                rows.append(tuple(objs[pos] for objs, _ in levels[1]))
            elif i == 0:
                rows.append(tuple(ix[mors[1:]] for _, mors in levels[n]))
            elif i == n:
                rows.append(tuple(ix[mors[:-1]] for _, mors in levels[n]))
            else:
                rows.append(
                    tuple(
                        ix[
                            mors[: i - 1]
                            + (table[(mors[i], mors[i - 1])],)
                            + mors[i + 1 :]
                        ]
                        for _, mors in levels[n]
                    )
                )
        faces.append(tuple(rows))
    degens: list[tuple] = []
    for n in range(trunc):
        ix = index[n + 1]
        degens.append(
            tuple(
                tuple(
                    ix[mors[:i] + (identity[objs[i]],) + mors[i:]]
                    for objs, mors in levels[n]
                )
                for i in range(n + 1)
            )
        )
    degens.append(())
    return TruncatedSimplicialSet(
        trunc, tuple(len(level) for level in levels), tuple(faces), tuple(degens)
    )


@memo_by_identity
def classical_nerve_chains(cat: FiniteCategory, depth: int) -> NerveChains:
    levels = chain_levels(cat, depth)
    return NerveChains(
        _nerve_space(cat, levels), tuple(tuple(level) for level in levels)
    )


def classical_nerve(cat: FiniteCategory, depth: int) -> TruncatedSimplicialSet:
    """The nerve truncated at ``depth``: level k holds composable k-chains."""
    return classical_nerve_chains(cat, depth).space


def nerve_map(fun: Functor, depth: int) -> SimplicialMap:
    """The simplicial map between nerves induced by applying a functor
    componentwise to chains."""
    src = classical_nerve_chains(fun.source, depth)
    tgt = classical_nerve_chains(fun.target, depth)
    obj_map, mor_map = fun.obj_map, fun.mor_map
    levels = [
        tuple(tgt.flat_index(0)[obj_map[objs[0]]] for objs, _ in src.chains[0])
    ]
    for q in range(1, depth + 1):
        ix = tgt.flat_index(q)
        levels.append(
            tuple(
                ix[tuple(mor_map[m] for m in mors)] for _, mors in src.chains[q]
            )
        )
    return SimplicialMap(src.space, tgt.space, tuple(levels))


# ---------------------------------------------------------------------------
# bisimplicial sets


@dataclass(frozen=True)
class TruncatedBisimplicialSet:
    """Cells B[k][p] with outer (k) and inner (p) generator tables.

    Table layout mirrors TruncatedSimplicialSet in each direction:
    ``outer_faces[k][p][i]`` maps B[k][p] -> B[k-1][p] (1 <= k, i <= k),
    ``inner_faces[k][p][i]`` maps B[k][p] -> B[k][p-1] (1 <= p, i <= p);
    degeneracies go up one level; unused slots hold empty tuples.
    """

    outer_trunc: int
    inner_trunc: int
    sizes: tuple[tuple[int, ...], ...]
    outer_faces: tuple
    outer_degeneracies: tuple
    inner_faces: tuple
    inner_degeneracies: tuple

    def size(self, k: int, p: int) -> int:
        return self.sizes[k][p]


def bisimplicial_row(B: TruncatedBisimplicialSet, k: int) -> TruncatedSimplicialSet:
    """Fix the outer index; the inner structure is a simplicial set."""
    faces = (
        ((),)
        + tuple(B.inner_faces[k][p] for p in range(1, B.inner_trunc + 1))
    )
    degens = tuple(
        B.inner_degeneracies[k][p] for p in range(B.inner_trunc)
    ) + ((),)
    return TruncatedSimplicialSet(B.inner_trunc, tuple(B.sizes[k]), faces, degens)


def bisimplicial_column(B: TruncatedBisimplicialSet, p: int) -> TruncatedSimplicialSet:
    """Fix the inner index; the outer structure is a simplicial set."""
    sizes = tuple(B.sizes[k][p] for k in range(B.outer_trunc + 1))
    faces = ((),) + tuple(
        B.outer_faces[k][p] for k in range(1, B.outer_trunc + 1)
    )
    degens = tuple(
        B.outer_degeneracies[k][p] for k in range(B.outer_trunc)
    ) + ((),)
    return TruncatedSimplicialSet(B.outer_trunc, sizes, faces, degens)


def transpose_bisimplicial(B: TruncatedBisimplicialSet) -> TruncatedBisimplicialSet:
    """Swap the outer and inner directions."""
    K, P = B.outer_trunc, B.inner_trunc
    sizes = tuple(tuple(B.sizes[k][p] for k in range(K + 1)) for p in range(P + 1))

    def flip(tables):
        out = []
        for p in range(P + 1):
            row = tuple(
                tables[k][p] if tables[k] != () else () for k in range(K + 1)
            )
            # collapse pure-placeholder rows to the bare placeholder
            out.append(() if all(e == () for e in row) else row)
        return tuple(out)

    return TruncatedBisimplicialSet(
        P,
        K,
        sizes,
        flip(B.inner_faces),
        flip(B.inner_degeneracies),
        flip(B.outer_faces),
        flip(B.outer_degeneracies),
    )


def tabulate_bisimplicial_set(
    labels: Sequence[Sequence[Sequence]],
    outer_face_of: Callable[[int, int, int, object], object],
    outer_degen_of: Callable[[int, int, int, object], object],
    inner_face_of: Callable[[int, int, int, object], object],
    inner_degen_of: Callable[[int, int, int, object], object],
) -> TruncatedBisimplicialSet:
    K = len(labels) - 1
    P = len(labels[0]) - 1
    index = [
        [{lab: x for x, lab in enumerate(cell)} for cell in row] for row in labels
    ]
    sizes = tuple(tuple(len(cell) for cell in row) for row in labels)

    outer_faces: list = [()]
    for k in range(1, K + 1):
        outer_faces.append(
            tuple(
                tuple(
                    tuple(
                        index[k - 1][p][outer_face_of(k, p, i, lab)]
                        for lab in labels[k][p]
                    )
                    for i in range(k + 1)
                )
                for p in range(P + 1)
            )
        )
    outer_degens: list = []
    for k in range(K):
        outer_degens.append(
            tuple(
                tuple(
                    tuple(
                        index[k + 1][p][outer_degen_of(k, p, i, lab)]
                        for lab in labels[k][p]
                    )
                    for i in range(k + 1)
                )
                for p in range(P + 1)
            )
        )
    outer_degens.append(())

    inner_faces = []
    inner_degens = []
    for k in range(K + 1):
        row_faces: list = [()]
        for p in range(1, P + 1):
            row_faces.append(
                tuple(
                    tuple(
                        index[k][p - 1][inner_face_of(k, p, i, lab)]
                        for lab in labels[k][p]
                    )
                    for i in range(p + 1)
                )
            )
        row_degens: list = []
        for p in range(P):
            row_degens.append(
                tuple(
                    tuple(
                        index[k][p + 1][inner_degen_of(k, p, i, lab)]
                        for lab in labels[k][p]
                    )
                    for i in range(p + 1)
                )
            )
        row_degens.append(())
        inner_faces.append(tuple(row_faces))
        inner_degens.append(tuple(row_degens))

    return TruncatedBisimplicialSet(
        K,
        P,
        sizes,
        tuple(outer_faces),
        tuple(outer_degens),
        tuple(inner_faces),
        tuple(inner_degens),
    )


def validate_bisimplicial_set(B: TruncatedBisimplicialSet) -> ValidationReport:
    """Row/column simplicial identities plus all four cross-commutations."""
    from .simplicial import validate_simplicial_set

    rep = ValidationReport()
    for k in range(B.outer_trunc + 1):
        sub = validate_simplicial_set(bisimplicial_row(B, k))
        for v in sub.violations:
            rep.add(f"inner-{v.kind}", f"row {k}: {v.detail}")
    for p in range(B.inner_trunc + 1):
        sub = validate_simplicial_set(bisimplicial_column(B, p))
        for v in sub.violations:
            rep.add(f"outer-{v.kind}", f"column {p}: {v.detail}")
    if not rep.ok:
        return rep

    K, P = B.outer_trunc, B.inner_trunc
    for k in range(K + 1):
        for p in range(P + 1):
            for x in range(B.size(k, p)):
                if k >= 1 and p >= 1:
                    for i in range(k + 1):
                        for j in range(p + 1):
                            a = B.inner_faces[k - 1][p][j][B.outer_faces[k][p][i][x]]
                            b = B.outer_faces[k][p - 1][i][B.inner_faces[k][p][j][x]]
                            if a != b:
                                rep.add("cross", f"do_{i} di_{j} at ({k},{p},{x})")
                if k >= 1 and p < P:
                    for i in range(k + 1):
                        for j in range(p + 1):
                            a = B.inner_degeneracies[k - 1][p][j][
                                B.outer_faces[k][p][i][x]
                            ]
                            b = B.outer_faces[k][p + 1][i][
                                B.inner_degeneracies[k][p][j][x]
                            ]
                            if a != b:
                                rep.add("cross", f"do_{i} si_{j} at ({k},{p},{x})")
                if k < K and p >= 1:
                    for i in range(k + 1):
                        for j in range(p + 1):
                            a = B.inner_faces[k + 1][p][j][
                                B.outer_degeneracies[k][p][i][x]
                            ]
                            b = B.outer_degeneracies[k][p - 1][i][
                                B.inner_faces[k][p][j][x]
                            ]
                            if a != b:
                                rep.add("cross", f"so_{i} di_{j} at ({k},{p},{x})")
                if k < K and p < P:
                    for i in range(k + 1):
                        for j in range(p + 1):
                            a = B.inner_degeneracies[k + 1][p][j][
                                B.outer_degeneracies[k][p][i][x]
                            ]
                            b = B.outer_degeneracies[k][p + 1][i][
                                B.inner_degeneracies[k][p][j][x]
                            ]
                            if a != b:
                                rep.add("cross", f"so_{i} si_{j} at ({k},{p},{x})")
    return rep


@dataclass(frozen=True)
class BisimplicialMap:
    source: TruncatedBisimplicialSet
    target: TruncatedBisimplicialSet
    cells: tuple[tuple[tuple[int, ...], ...], ...]

    def apply(self, k: int, p: int, x: int) -> int:
        return self.cells[k][p][x]


def validate_bisimplicial_map(f: BisimplicialMap) -> ValidationReport:
    rep = ValidationReport()
    S, T = f.source, f.target
    if (S.outer_trunc, S.inner_trunc) != (T.outer_trunc, T.inner_trunc):
        rep.add("shape", "truncation mismatch")
        return rep
    K, P = S.outer_trunc, S.inner_trunc
    if len(f.cells) != K + 1 or any(len(f.cells[k]) != P + 1 for k in range(K + 1)):
        rep.add("shape", "cell grid shape mismatch")
        return rep
    for k in range(K + 1):
        for p in range(P + 1):
            if len(f.cells[k][p]) != S.size(k, p) or any(
                not 0 <= v < T.size(k, p) for v in f.cells[k][p]
            ):
                rep.add("shape", f"cell ({k},{p}) malformed")
                return rep
    for k in range(K + 1):
        for p in range(P + 1):
            for x in range(S.size(k, p)):
                fx = f.cells[k][p][x]
                if k >= 1:
                    for i in range(k + 1):
                        if (
                            T.outer_faces[k][p][i][fx]
                            != f.cells[k - 1][p][S.outer_faces[k][p][i][x]]
                        ):
                            rep.add("outer-face", f"do_{i} at ({k},{p},{x})")
                if k < K:
                    for i in range(k + 1):
                        if (
                            T.outer_degeneracies[k][p][i][fx]
                            != f.cells[k + 1][p][S.outer_degeneracies[k][p][i][x]]
                        ):
                            rep.add("outer-degeneracy", f"so_{i} at ({k},{p},{x})")
                if p >= 1:
                    for i in range(p + 1):
                        if (
                            T.inner_faces[k][p][i][fx]
                            != f.cells[k][p - 1][S.inner_faces[k][p][i][x]]
                        ):
                            rep.add("inner-face", f"di_{i} at ({k},{p},{x})")
                if p < P:
                    for i in range(p + 1):
                        if (
                            T.inner_degeneracies[k][p][i][fx]
                            != f.cells[k][p + 1][S.inner_degeneracies[k][p][i][x]]
                        ):
                            rep.add("inner-degeneracy", f"si_{i} at ({k},{p},{x})")
    return rep


def identity_bisimplicial_map(B: TruncatedBisimplicialSet) -> BisimplicialMap:
    return BisimplicialMap(
        B,
        B,
        tuple(
            tuple(tuple(range(B.size(k, p))) for p in range(B.inner_trunc + 1))
            for k in range(B.outer_trunc + 1)
        ),
    )


# ---------------------------------------------------------------------------
# diagrams of categories and their levelwise nerves


@dataclass(frozen=True)
class CategoryDiagram:
    """A truncated simplicial object in categories, by generator functors.

    ``face_functors[k][i]`` reindexes level k to level k-1 (1 <= k, i <= k);
    ``degeneracy_functors[k][i]`` goes up one level (k < trunc).  Leading /
    trailing placeholder slots keep direct level indexing, as in the
    simplicial tables.
    """

    trunc: int
    categories: tuple[FiniteCategory, ...]
    face_functors: tuple
    degeneracy_functors: tuple

    def level(self, k: int) -> FiniteCategory:
        return self.categories[k]


def validate_category_diagram(dia: CategoryDiagram) -> ValidationReport:
    rep = ValidationReport()
    K = dia.trunc
    if len(dia.categories) != K + 1:
        rep.add("shape", "level count mismatch")
        return rep
    for k in range(1, K + 1):
        if len(dia.face_functors[k]) != k + 1:
            rep.add("shape", f"level {k}: expected {k + 1} face functors")
            return rep
        for i, fun in enumerate(dia.face_functors[k]):
            if fun.source != dia.categories[k] or fun.target != dia.categories[k - 1]:
                rep.add("shape", f"face functor ({k},{i}) endpoints wrong")
            elif not validate_functor(fun).ok:
                rep.add("functor", f"face functor ({k},{i}) invalid")
    for k in range(K):
        if len(dia.degeneracy_functors[k]) != k + 1:
            rep.add("shape", f"level {k}: expected {k + 1} degeneracy functors")
            return rep
        for i, fun in enumerate(dia.degeneracy_functors[k]):
            if fun.source != dia.categories[k] or fun.target != dia.categories[k + 1]:
                rep.add("shape", f"degeneracy functor ({k},{i}) endpoints wrong")
            elif not validate_functor(fun).ok:
                rep.add("functor", f"degeneracy functor ({k},{i}) invalid")
    if not rep.ok:
        return rep

    d, s = dia.face_functors, dia.degeneracy_functors
    for k in range(2, K + 1):
        for j in range(k + 1):
            for i in range(j):
                if compose_functors(d[k - 1][i], d[k][j]) != compose_functors(
                    d[k - 1][j - 1], d[k][i]
                ):
                    rep.add("face-face", f"d_{i} d_{j} at level {k}")
    for k in range(K - 1):
        for j in range(k + 1):
            for i in range(j + 1):
                if compose_functors(s[k + 1][i], s[k][j]) != compose_functors(
                    s[k + 1][j + 1], s[k][i]
                ):
                    rep.add("degen-degen", f"s_{i} s_{j} at level {k}")
    for k in range(K):
        for j in range(k + 1):
            for i in range(k + 2):
                got = compose_functors(d[k + 1][i], s[k][j])
                if i == j or i == j + 1:
                    ok = got == Functor(
                        dia.categories[k],
                        dia.categories[k],
                        tuple(dia.categories[k].objects()),
                        tuple(dia.categories[k].morphisms()),
                    )
                elif i < j:
                    ok = k >= 1 and got == compose_functors(s[k - 1][j - 1], d[k][i])
                else:
                    ok = k >= 1 and got == compose_functors(s[k - 1][j], d[k][i - 1])
                if not ok:
                    rep.add("face-degen", f"d_{i} s_{j} at level {k}")
    return rep


def nerve_levelwise(dia: CategoryDiagram, depth: int) -> TruncatedBisimplicialSet:
    """Nerve each level; outer maps apply the reindexing functors to chains.

    Each outer generator is the nerve of the corresponding reindexing
    functor, so the rows come straight out of ``classical_nerve_chains``
    and the outer tables out of ``nerve_map`` — no relabelling pass.
    """
    K = dia.trunc
    nerves = [classical_nerve_chains(dia.categories[k], depth) for k in range(K + 1)]
    sizes = tuple(
        tuple(len(n.chains[p]) for p in range(depth + 1)) for n in nerves
    )

    def functor_tables(funs) -> tuple:
        maps = [nerve_map(f, depth).levels for f in funs]
        return tuple(tuple(m[p] for m in maps) for p in range(depth + 1))

    outer_faces: list = [()]
    for k in range(1, K + 1):
        outer_faces.append(functor_tables(dia.face_functors[k]))
    outer_degens: list = []
    for k in range(K):
        outer_degens.append(functor_tables(dia.degeneracy_functors[k]))
    outer_degens.append(())

    return TruncatedBisimplicialSet(
        K,
        depth,
        sizes,
        tuple(outer_faces),
        tuple(outer_degens),
        tuple(n.space.faces for n in nerves),
        tuple(n.space.degeneracies for n in nerves),
    )


# ---------------------------------------------------------------------------
# the bisimplicial nerve of a relative category


WeqChain = Chain
Ladder = tuple[WeqChain, WeqChain, tuple[int, ...]]


@memo_by_identity
def weq_chain_category(rel: RelativeCategory, q: int):
    """The category of q-chains of weak equivalences and commuting ladders.

    Objects are composable q-chains with every arrow marked; a morphism is a
    rung vector (h_0..h_q) making every square with the chain arrows
    commute.  Returns (category, chain labels, rung-vector labels).
    """
    cat = rel.underlying
    cols: list[WeqChain] = [((x,), ()) for x in cat.objects()]
    for _ in range(q):
        nxt = []
        for objs, mors in cols:
            for m in cat.out_of(objs[-1]):
                if m in rel.weq:
                    nxt.append((objs + (cat.cod[m],), mors + (m,)))
        cols = nxt
    col_index = {c: k for k, c in enumerate(cols)}

    dom: list[int] = []
    cod: list[int] = []
    rungs: list[tuple[int, ...]] = []

    def ladder_vectors(src: WeqChain, tgt: WeqChain):
        out: list[tuple[int, ...]] = []

        def extend(prefix: tuple[int, ...]):
            j = len(prefix)
            if j == q + 1:
                out.append(prefix)
                return
            for h in cat.hom(src[0][j], tgt[0][j]):
                if j > 0:
                    if cat.compose(tgt[1][j - 1], prefix[j - 1]) != cat.compose(
                        h, src[1][j - 1]
                    ):
                        continue
                extend(prefix + (h,))

        extend(())
        return out

    for a, src in enumerate(cols):
        for b, tgt in enumerate(cols):
            for vec in ladder_vectors(src, tgt):
                dom.append(a)
                cod.append(b)
                rungs.append(vec)

    mor_index = {(dom[m], cod[m], rungs[m]): m for m in range(len(dom))}
    identity = tuple(
        mor_index[(a, a, tuple(cat.identity[o] for o in col[0]))]
        for a, col in enumerate(cols)
    )
    table: dict[tuple[int, int], int] = {}
    by_dom: list[list[int]] = [[] for _ in cols]
    for m in range(len(dom)):
        by_dom[dom[m]].append(m)
    for f in range(len(dom)):
        for g in by_dom[cod[f]]:
            vec = tuple(
                cat.compose(rungs[g][j], rungs[f][j]) for j in range(q + 1)
            )
            table[(g, f)] = mor_index[(dom[f], cod[g], vec)]
    category = FiniteCategory(
        len(cols), tuple(dom), tuple(cod), identity, table
    )
    return category, cols, rungs


def weq_chain_diagram(rel: RelativeCategory, Q: int) -> CategoryDiagram:
    """Chains-of-weqs categories for q <= Q with drop/duplicate reindexing."""
    cat = rel.underlying
    data = [weq_chain_category(rel, q) for q in range(Q + 1)]
    cat_index = [
        {c: k for k, c in enumerate(cols)} for _, cols, _ in data
    ]
    mor_index = []
    for category, cols, rungs in data:
        mor_index.append(
            {
                (category.dom[m], category.cod[m], rungs[m]): m
                for m in range(category.n_morphisms)
            }
        )

    def face_functor(qq: int, i: int) -> Functor:
        src_cat, src_cols, src_rungs = data[qq]
        tgt_cat, _, _ = data[qq - 1]
        obj_map = tuple(
            cat_index[qq - 1][chain_face(cat, i, col)] for col in src_cols
        )
        mor_map = []
        for m in range(src_cat.n_morphisms):
            vec = src_rungs[m]
            new_vec = vec[:i] + vec[i + 1 :]
            mor_map.append(
                mor_index[qq - 1][
                    (obj_map[src_cat.dom[m]], obj_map[src_cat.cod[m]], new_vec)
                ]
            )
        return Functor(src_cat, tgt_cat, obj_map, tuple(mor_map))

    def degen_functor(qq: int, i: int) -> Functor:
        src_cat, src_cols, src_rungs = data[qq]
        tgt_cat, _, _ = data[qq + 1]
        obj_map = tuple(
            cat_index[qq + 1][chain_degeneracy(cat, i, col)] for col in src_cols
        )
        mor_map = []
        for m in range(src_cat.n_morphisms):
            vec = src_rungs[m]
            new_vec = vec[: i + 1] + vec[i:]
            mor_map.append(
                mor_index[qq + 1][
                    (obj_map[src_cat.dom[m]], obj_map[src_cat.cod[m]], new_vec)
                ]
            )
        return Functor(src_cat, tgt_cat, obj_map, tuple(mor_map))

    face_functors: list = [()]
    for qq in range(1, Q + 1):
        face_functors.append(tuple(face_functor(qq, i) for i in range(qq + 1)))
    degen_functors: list = []
    for qq in range(Q):
        degen_functors.append(tuple(degen_functor(qq, i) for i in range(qq + 1)))
    degen_functors.append(())
    return CategoryDiagram(
        Q,
        tuple(d[0] for d in data),
        tuple(face_functors),
        tuple(degen_functors),
    )


def relative_nerve(rel: RelativeCategory, K: int, Q: int) -> TruncatedBisimplicialSet:
    """The bisimplicial nerve of a relative category.

    Cell (p, q) is the set of p-chains of commuting ladders over q-chains of
    weak equivalences — equivalently, grid diagrams with marked verticals.
    Outer index = chain direction (p <= K), inner = weq-chain direction
    (q <= Q).
    """
    levelwise = nerve_levelwise(weq_chain_diagram(rel, Q), K)
    return transpose_bisimplicial(levelwise)


def relative_nerve_map(
    fun: Functor, rel_x: RelativeCategory, rel_y: RelativeCategory, K: int, Q: int
) -> BisimplicialMap:
    """The bisimplicial map induced by a relative functor on nerves."""
    from .catcore import is_relative_functor

    if not is_relative_functor(fun, rel_x, rel_y):
        raise ValueError("functor does not preserve weak equivalences")
    src = relative_nerve(rel_x, K, Q)
    tgt = relative_nerve(rel_y, K, Q)

    cells = []
    for p in range(K + 1):
        row = []
        for q in range(Q + 1):
            xs_data = _nerve_cell_labels(rel_x, p, q)
            ys_index = {
                lab: i for i, lab in enumerate(_nerve_cell_labels(rel_y, p, q))
            }
            mapped = []
            for cols, rung_vectors in xs_data:
                new_cols = tuple(
                    (
                        tuple(fun.obj_map[o] for o in objs),
                        tuple(fun.mor_map[m] for m in mors),
                    )
                    for objs, mors in cols
                )
                new_rungs = tuple(
                    tuple(fun.mor_map[h] for h in vec) for vec in rung_vectors
                )
                mapped.append(ys_index[(new_cols, new_rungs)])
            row.append(tuple(mapped))
        cells.append(tuple(row))
    return BisimplicialMap(src, tgt, tuple(cells))


def _nerve_cell_labels(rel: RelativeCategory, p: int, q: int):
    """Canonical labels of relative-nerve cell (p, q): a tuple of p+1 weq
    chains (the columns) plus p rung vectors, ordered exactly as the nerve
    construction orders them."""
    category, cols, rungs = weq_chain_category(rel, q)
    chains = chain_levels(category, p)[p]
    out = []
    for objs, mors in chains:
        out.append(
            (
                tuple(cols[o] for o in objs),
                tuple(rungs[m] for m in mors),
            )
        )
    return out


# ---------------------------------------------------------------------------
# the last-vertex comparison map


@memo_by_identity
def last_vertex_map(X: TruncatedSimplicialSet, depth: int) -> SimplicialMap:
    """From the nerve of the plain simplex category of X back to X.

    A chain of simplices maps to the image of its top simplex under the
    operator collecting the last vertex of every stage.  Many chains share
    one (top simplex, collected-vertices) pair, so the operator action is
    cached on that pair.
    """
    if depth > X.trunc:
        raise ValueError("truncation too shallow for the requested depth")
    g = simplex_category(X)
    nerve = classical_nerve_chains(g.category, depth)
    g_objects, g_carriers = g.objects, g.carriers
    levels = []
    for q in range(depth + 1):
        level = []
        seen: dict = {}
        for objs, mors in nerve.chains[q]:
            phi = [g_objects[o][0] for o in objs]
            for j in range(q):
                c = g_carriers[mors[j]]
                for i in range(j + 1):
                    phi[i] = c[phi[i]]
            key = (objs[-1], tuple(phi))
            value = seen.get(key)
            if value is None:
                p_top, x_top = g_objects[objs[-1]]
                value = act(X, SimplicialOperator(p_top, q, key[1]), x_top)
                seen[key] = value
            level.append(value)
        levels.append(tuple(level))
    return SimplicialMap(nerve.space, truncate(X, depth), tuple(levels))


def check_last_vertex_natural(h: SimplicialMap, depth: int) -> ValidationReport:
    """Check the naturality square of the last-vertex maps against ``h``:
    applying h after collapsing equals collapsing after the induced map of
    simplex-category nerves."""
    rep = ValidationReport()
    left = compose_maps(truncate_map(h, depth), last_vertex_map(h.source, depth))
    right = compose_maps(
        last_vertex_map(h.target, depth),
        nerve_map(simplex_category_functor(h), depth),
    )
    for q in range(depth + 1):
        for x, (a, b) in enumerate(zip(left.levels[q], right.levels[q])):
            if a != b:
                rep.add("naturality", f"level {q}, chain {x}: {a} != {b}")
    return rep
