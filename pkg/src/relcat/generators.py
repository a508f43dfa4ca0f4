"""Seed-deterministic random instances for the verification suites.

Every draw goes through a ``random.Random`` seeded by a keyed hash of the
master seed, so each generated object is a pure function of its parameters
and reruns are bit-stable.  The distribution is a pragmatic choice, not a
claim of representativeness: simplicial sets are small facet complexes
with per-dimension nondegenerate counts capped by ``max_nondegenerate``;
simplicial categories are either acyclic (totally ordered objects, unit
diagonal homs, constant mixed compositions) or discrete enrichments of
small ordinary categories.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass

from .catcore import (
    RelativeCategory,
    category_from_monoid,
    category_from_preorder,
    chaotic_category,
    invertible_morphisms,
)
from .scat import (
    FiniteSimplicialCategory,
    SimplicialFunctor,
    discrete_enrichment,
    trivial_simplicial_category,
    validate_simplicial_category,
)
from .simplicial import (
    SimplicialMap,
    TruncatedSimplicialSet,
    empty_simplicial_set,
    facet_complex_labels,
    from_facets,
    product2,
    standard_simplex,
)

_RETRIES = 8


@dataclass(frozen=True)
class GenParams:
    """Bounds and truncations shared by all generators and suites."""

    seed: int
    max_objects: int = 3
    max_nondegenerate: int = 2
    trunc_p: int = 2
    trunc_k: int = 2
    trunc_q: int = 2
    degree: int = 1
    acyclic: bool = True


def params_problems(params: GenParams) -> list[str]:
    """Configuration errors, empty when the parameters are usable."""
    problems = []
    if params.max_objects < 1:
        problems.append("max_objects must be at least 1")
    for name in ("max_nondegenerate", "trunc_p", "trunc_k", "trunc_q", "degree"):
        if getattr(params, name) < 0:
            problems.append(f"{name} must be nonnegative")
    if not 0 <= params.seed < 1 << 64:
        problems.append("seed must fit in 64 bits")
    return problems


def derive_seed(seed: int, tag: str) -> int:
    """A stable 64-bit sub-seed for one role of one instance."""
    digest = hashlib.blake2b(f"{seed}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _rng(params: GenParams, tag: str) -> random.Random:
    return random.Random(derive_seed(params.seed, tag))


def _draw_facets(
    rng: random.Random, bound: int, trunc: int, min_vertices: int
) -> list[tuple[int, ...]]:
    """Facets of a complex whose nondegenerate counts stay within bound.

    Dimension zero is special: a nonempty complex needs a vertex, so up to
    max(1, bound) vertices are allowed even at bound zero.  Higher facets
    are drawn and then admitted only if the downward closure keeps every
    dimension at or below the bound.
    """
    n_vert = rng.randint(min_vertices, max(1, bound))
    if n_vert == 0:
        return []
    present = {(v,) for v in range(n_vert)}
    counts = [n_vert] + [0] * trunc
    for dim in range(1, trunc + 1):
        if n_vert <= dim:
            break
        for _ in range(rng.randint(0, bound)):
            cand = tuple(sorted(rng.sample(range(n_vert), dim + 1)))
            new = [
                sub
                for size in range(2, dim + 2)
                for sub in itertools.combinations(cand, size)
                if sub not in present
            ]
            grown = counts[:]
            for sub in new:
                grown[len(sub) - 1] += 1
            if all(c <= bound for c in grown[1:]):
                counts = grown
                present.update(new)
    return sorted(present)


def gen_simplicial_set(params: GenParams) -> TruncatedSimplicialSet:
    rng = _rng(params, "set")
    facets = _draw_facets(rng, params.max_nondegenerate, params.trunc_p, 1)
    return from_facets(facets, params.trunc_p)


def gen_simplicial_maps(params: GenParams, count: int) -> list[SimplicialMap]:
    """``count`` simplicial maps out of gen_simplicial_set(params).

    Three shapes are drawn: collapse onto a vertex, a monotone vertex
    relabelling into the complex enlarged by the relabelled facets, and the
    inclusion into the complex enlarged by one extra facet.
    """
    P = params.trunc_p
    facets = _draw_facets(_rng(params, "set"), params.max_nondegenerate, P, 1)
    labels = facet_complex_labels(facets, P)
    X = from_facets(facets, P)
    n_vert = max(v for f in facets for v in f) + 1

    maps = []
    for index in range(count):
        rng = _rng(params, f"map{index}")
        variant = rng.randrange(3)
        if variant == 0:
            vertex = rng.randrange(n_vert)
            levels = tuple(
                tuple(
                    labels[n].index((vertex,) * (n + 1)) for _ in range(X.sizes[n])
                )
                for n in range(P + 1)
            )
            maps.append(SimplicialMap(X, X, levels))
            continue
        if variant == 1:
            phi = sorted(rng.choices(range(n_vert), k=n_vert))
            extra = [tuple(sorted({phi[v] for v in f})) for f in facets]
        else:
            phi = list(range(n_vert))
            extra = [tuple(sorted(rng.sample(range(n_vert), min(n_vert, P + 1))))]
        target_facets = sorted(set(facets) | set(extra))
        target_labels = facet_complex_labels(target_facets, P)
        pos = [{lab: x for x, lab in enumerate(level)} for level in target_labels]
        target = from_facets(target_facets, P)
        levels = tuple(
            tuple(pos[n][tuple(phi[v] for v in lab)] for lab in labels[n])
            for n in range(P + 1)
        )
        maps.append(SimplicialMap(X, target, levels))
    return maps


def _constant_map(
    source: TruncatedSimplicialSet, target: TruncatedSimplicialSet, vertex: int
) -> SimplicialMap:
    """Send every simplex to the degeneracy tower over ``vertex``."""
    tower = [vertex]
    for n in range(target.trunc):
        tower.append(target.degeneracies[n][0][tower[-1]])
    return SimplicialMap(
        source,
        target,
        tuple((tower[n],) * source.sizes[n] for n in range(source.trunc + 1)),
    )


def _draw_acyclic_category(rng: random.Random, params: GenParams) -> FiniteSimplicialCategory:
    n = rng.randint(1, params.max_objects)
    P = params.trunc_p
    point = standard_simplex(0, P)
    homs = [[empty_simplicial_set(P) for _ in range(n)] for _ in range(n)]
    for a in range(n):
        homs[a][a] = point
    for a in range(n):
        for b in range(a + 1, n):
            facets = _draw_facets(rng, params.max_nondegenerate, P, 0)
            homs[a][b] = from_facets(facets, P) if facets else empty_simplicial_set(P)
    # plug composability gaps: a nonempty composite needs somewhere to land
    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(b + 1, n):
                    if (
                        homs[a][b].sizes[0]
                        and homs[b][c].sizes[0]
                        and not homs[a][c].sizes[0]
                    ):
                        homs[a][c] = standard_simplex(0, P)
                        changed = True

    # one landing vertex per ordered pair, so mixed composition is
    # associative: every doubly-composite lands on the same tower
    landing = {
        (a, c): rng.randrange(homs[a][c].sizes[0])
        for a in range(n)
        for c in range(a + 1, n)
        if homs[a][c].sizes[0]
    }

    comp = []
    for a in range(n):
        row = []
        for b in range(n):
            cell = []
            for c in range(n):
                source = product2(homs[a][b], homs[b][c])
                if a == b:
                    levels = tuple(
                        tuple(range(homs[b][c].sizes[p])) for p in range(P + 1)
                    )
                    cell.append(SimplicialMap(source, homs[a][c], levels))
                elif b == c:
                    levels = tuple(
                        tuple(range(homs[a][b].sizes[p])) for p in range(P + 1)
                    )
                    cell.append(SimplicialMap(source, homs[a][c], levels))
                elif any(source.sizes):
                    cell.append(_constant_map(source, homs[a][c], landing[a, c]))
                else:
                    cell.append(
                        SimplicialMap(source, homs[a][c], ((),) * (P + 1))
                    )
            row.append(tuple(cell))
        comp.append(tuple(row))
    return FiniteSimplicialCategory(
        n,
        tuple(tuple(r) for r in homs),
        tuple(comp),
        (0,) * n,
    )


_MONOIDS = [
    ([[0, 1], [1, 0]], 0),  # cyclic of order two
    ([[0, 1], [1, 1]], 0),  # one idempotent absorber
    ([[0, 1, 2], [1, 2, 0], [2, 0, 1]], 0),  # cyclic of order three
]


def _draw_plain_category(rng: random.Random, max_objects: int):
    n = rng.randint(1, max_objects)
    kind = rng.randrange(3)
    if kind == 0:
        leq = {(a, a) for a in range(n)}
        for _ in range(rng.randint(0, 2 * n)):
            a, b = rng.randrange(n), rng.randrange(n)
            leq.add((a, b))
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(tuple(leq), repeat=2):
                if b == c and (a, d) not in leq:
                    leq.add((a, d))
                    changed = True
        return category_from_preorder(n, leq)
    if kind == 1:
        return chaotic_category(n)
    mult, unit = _MONOIDS[rng.randrange(len(_MONOIDS))]
    return category_from_monoid(mult, unit)


def gen_simplicial_category(params: GenParams) -> FiniteSimplicialCategory:
    last = None
    for attempt in range(_RETRIES):
        tag = "cat" if attempt == 0 else f"cat-retry{attempt}"
        rng = _rng(params, tag)
        if params.acyclic:
            A = _draw_acyclic_category(rng, params)
        else:
            A = discrete_enrichment(_draw_plain_category(rng, params.max_objects), params.trunc_p)
        report = validate_simplicial_category(A)
        if report.ok:
            return A
        last = report
    raise RuntimeError(
        f"category generation failed after {_RETRIES} attempts: {last.violations[0]}"
    )


def gen_relative_category(params: GenParams) -> RelativeCategory:
    """A small category with its invertible morphisms marked."""
    rng = _rng(params, "rel")
    cat = _draw_plain_category(rng, params.max_objects)
    return RelativeCategory(cat, frozenset(invertible_morphisms(cat)))


def collapse_functor(A: FiniteSimplicialCategory) -> SimplicialFunctor:
    """The unique functor from A to the one-object point-hom category."""
    target = trivial_simplicial_category(A.trunc)
    hom_maps = tuple(
        tuple(
            SimplicialMap(
                A.homs[a][b],
                target.homs[0][0],
                tuple((0,) * A.homs[a][b].sizes[n] for n in range(A.trunc + 1)),
            )
            for b in range(A.n_objects)
        )
        for a in range(A.n_objects)
    )
    return SimplicialFunctor(A, target, (0,) * A.n_objects, hom_maps)
