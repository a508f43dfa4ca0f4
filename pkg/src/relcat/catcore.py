"""Finite categories, functors, natural transformations, and relative structures.

Everything here is tabulated: objects and morphisms carry dense integer ids,
composition is a total dict over composable pairs, and all laws are checked by
exhaustive enumeration.  Categories are immutable after construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .reports import ValidationReport


@dataclass(frozen=True)
class FiniteCategory:
    """A category given by its full composition table.

    ``table[(g, f)]`` is the composite "f then g"; it is defined exactly on
    the composable pairs (cod(f) == dom(g)).
    """

    n_objects: int
    dom: tuple[int, ...]
    cod: tuple[int, ...]
    identity: tuple[int, ...]
    table: dict[tuple[int, int], int]

    _hom: dict[tuple[int, int], tuple[int, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _out: tuple[tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False, default=()
    )

    def __post_init__(self) -> None:
        hom: dict[tuple[int, int], list[int]] = {}
        out: list[list[int]] = [[] for _ in range(self.n_objects)]
        for m in range(len(self.dom)):
            a, b = self.dom[m], self.cod[m]
            hom.setdefault((a, b), []).append(m)
            if 0 <= a < self.n_objects:
                out[a].append(m)
        object.__setattr__(self, "_hom", {k: tuple(v) for k, v in hom.items()})
        object.__setattr__(self, "_out", tuple(tuple(v) for v in out))

    @property
    def n_morphisms(self) -> int:
        return len(self.dom)

    def objects(self) -> range:
        return range(self.n_objects)

    def morphisms(self) -> range:
        return range(len(self.dom))

    def hom(self, a: int, b: int) -> tuple[int, ...]:
        return self._hom.get((a, b), ())

    def out_of(self, a: int) -> tuple[int, ...]:
        return self._out[a]

    def compose(self, g: int, f: int) -> int:
        """Composite of f followed by g."""
        return self.table[(g, f)]

    def is_identity(self, m: int) -> bool:
        return self.identity[self.dom[m]] == m

    def composable_pairs(self):
        for f in self.morphisms():
            for g in self._out[self.cod[f]]:
                yield g, f


@dataclass(frozen=True)
class RelativeCategory:
    """A category with a marked wide subcategory of weak equivalences."""

    underlying: FiniteCategory
    weq: frozenset[int]


@dataclass(frozen=True)
class Functor:
    source: FiniteCategory
    target: FiniteCategory
    obj_map: tuple[int, ...]
    mor_map: tuple[int, ...]

    def on_obj(self, x: int) -> int:
        return self.obj_map[x]

    def on_mor(self, m: int) -> int:
        return self.mor_map[m]


@dataclass(frozen=True)
class NaturalTransformation:
    """Components indexed by the objects of the common source category."""

    source: Functor
    target: Functor
    components: tuple[int, ...]


@dataclass(frozen=True)
class ZigzagStep:
    """One leg of a zigzag; ``forward`` means the transformation points
    away from the preceding functor in the chain."""

    forward: bool
    transformation: NaturalTransformation


@dataclass(frozen=True)
class ZigzagWitness:
    steps: tuple[ZigzagStep, ...]


# ---------------------------------------------------------------------------
# validation


def validate_category(cat: FiniteCategory) -> ValidationReport:
    """Exhaustively check unit, associativity, and dom/cod coherence."""
    rep = ValidationReport()
    n, m = cat.n_objects, cat.n_morphisms
    for x in range(n):
        i = cat.identity[x]
        if not (0 <= i < m):
            rep.add("identity", f"object {x}: identity id {i} out of range")
        elif cat.dom[i] != x or cat.cod[i] != x:
            rep.add("identity", f"object {x}: identity {i} is not an endomorphism")
    for f in range(m):
        if not (0 <= cat.dom[f] < n and 0 <= cat.cod[f] < n):
            rep.add("dom-cod", f"morphism {f}: endpoint out of range")

    for key, gf in cat.table.items():
        g, f = key
        if not (0 <= f < m and 0 <= g < m and 0 <= gf < m):
            rep.add("table", f"entry {key} -> {gf}: id out of range")
            continue
        if cat.cod[f] != cat.dom[g]:
            rep.add("table", f"entry {key}: pair is not composable")
        else:
            if cat.dom[gf] != cat.dom[f] or cat.cod[gf] != cat.cod[g]:
                rep.add("dom-cod", f"compose{key} = {gf} has wrong endpoints")
    for g, f in cat.composable_pairs():
        if (g, f) not in cat.table:
            rep.add("table", f"missing composite for pair ({g}, {f})")
    if not rep.ok:
        return rep

    for f in range(m):
        if cat.compose(f, cat.identity[cat.dom[f]]) != f:
            rep.add("unit-law", f"compose({f}, id_dom) != {f}")
        if cat.compose(cat.identity[cat.cod[f]], f) != f:
            rep.add("unit-law", f"compose(id_cod, {f}) != {f}")
    for g, f in cat.composable_pairs():
        gf = cat.compose(g, f)
        for h in cat.out_of(cat.cod[g]):
            if cat.compose(h, gf) != cat.compose(cat.compose(h, g), f):
                rep.add(
                    "associativity",
                    f"({h}, {g}, {f}): h(gf) = {cat.compose(h, gf)} != (hg)f",
                )
    return rep


def validate_relative_category(rel: RelativeCategory) -> ValidationReport:
    """Check that the marked morphisms form a wide subcategory."""
    cat = rel.underlying
    rep = ValidationReport()
    for x in cat.objects():
        if cat.identity[x] not in rel.weq:
            rep.add("identity-missing", f"identity of object {x} not marked")
    for w in rel.weq:
        if not (0 <= w < cat.n_morphisms):
            rep.add("weq-range", f"marked id {w} out of range")
    for g, f in cat.composable_pairs():
        if f in rel.weq and g in rel.weq and cat.compose(g, f) not in rel.weq:
            rep.add("closure", f"compose({g}, {f}) escapes the marked subcategory")
    return rep


def validate_functor(fun: Functor) -> ValidationReport:
    rep = ValidationReport()
    src, tgt = fun.source, fun.target
    if len(fun.obj_map) != src.n_objects or len(fun.mor_map) != src.n_morphisms:
        rep.add("shape", "object/morphism map length mismatch")
        return rep
    for x in src.objects():
        if not (0 <= fun.obj_map[x] < tgt.n_objects):
            rep.add("shape", f"object image {fun.obj_map[x]} out of range")
            return rep
    for m in src.morphisms():
        fm = fun.mor_map[m]
        if not (0 <= fm < tgt.n_morphisms):
            rep.add("shape", f"morphism image {fm} out of range")
            return rep
        if tgt.dom[fm] != fun.obj_map[src.dom[m]] or tgt.cod[fm] != fun.obj_map[src.cod[m]]:
            rep.add("dom-cod", f"image of morphism {m} has wrong endpoints")
    for x in src.objects():
        if fun.mor_map[src.identity[x]] != tgt.identity[fun.obj_map[x]]:
            rep.add("identity", f"identity of object {x} not preserved")
    for g, f in src.composable_pairs():
        img = (fun.mor_map[g], fun.mor_map[f])
        if img not in tgt.table or tgt.table[img] != fun.mor_map[src.compose(g, f)]:
            rep.add("composition", f"pair ({g}, {f}) not preserved")
    return rep


def check_natural_transformation(eta: NaturalTransformation) -> ValidationReport:
    """List every failed naturality square of ``eta``; empty iff natural."""
    rep = ValidationReport()
    fun, gun = eta.source, eta.target
    if fun.source is not gun.source and fun.source != gun.source:
        rep.add("parallel", "source functors disagree on domain")
        return rep
    if fun.target is not gun.target and fun.target != gun.target:
        rep.add("parallel", "source functors disagree on codomain")
        return rep
    src, tgt = fun.source, fun.target
    if len(eta.components) != src.n_objects:
        rep.add("shape", "one component required per object")
        return rep
    for x in src.objects():
        c = eta.components[x]
        if not (0 <= c < tgt.n_morphisms):
            rep.add("shape", f"component at {x} out of range")
            return rep
        if tgt.dom[c] != fun.obj_map[x] or tgt.cod[c] != gun.obj_map[x]:
            rep.add("dom-cod", f"component at {x} has wrong endpoints")
    if not rep.ok:
        return rep
    for m in src.morphisms():
        a, b = src.dom[m], src.cod[m]
        left = tgt.compose(eta.components[b], fun.mor_map[m])
        right = tgt.compose(gun.mor_map[m], eta.components[a])
        if left != right:
            rep.add("naturality", f"square at morphism {m} does not commute")
    return rep


# ---------------------------------------------------------------------------
# constructions


def ordinal(p: int) -> FiniteCategory:
    """The linear poset 0 -> 1 -> ... -> p as a category.

    Morphism ids enumerate the pairs i <= j in lexicographic order.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    pairs = [(i, j) for i in range(p + 1) for j in range(i, p + 1)]
    index = {pr: k for k, pr in enumerate(pairs)}
    dom = tuple(i for i, _ in pairs)
    cod = tuple(j for _, j in pairs)
    identity = tuple(index[(i, i)] for i in range(p + 1))
    table = {}
    for gk, (j2, k) in enumerate(pairs):
        for fk, (i, j1) in enumerate(pairs):
            if j1 == j2:
                table[(gk, fk)] = index[(i, k)]
    return FiniteCategory(p + 1, dom, cod, identity, table)


def ordinal_min(p: int) -> RelativeCategory:
    """The linear poset with only identities marked."""
    cat = ordinal(p)
    return RelativeCategory(cat, frozenset(cat.identity))


def ordinal_max(q: int) -> RelativeCategory:
    """The linear poset with every morphism marked."""
    cat = ordinal(q)
    return RelativeCategory(cat, frozenset(cat.morphisms()))


def opposite(cat: FiniteCategory) -> FiniteCategory:
    """Swap dom and cod and transpose the composition table."""
    table = {(f, g): v for (g, f), v in cat.table.items()}
    return FiniteCategory(cat.n_objects, cat.cod, cat.dom, cat.identity, table)


def chain_count(cat: FiniteCategory, length: int) -> int:
    """Number of composable chains of ``length`` arrows, without enumerating
    them.  Counts grow fast; Python integers keep the answer exact."""
    ending = [1] * cat.n_objects
    for _ in range(length):
        nxt = [0] * cat.n_objects
        for m in range(len(cat.dom)):
            nxt[cat.cod[m]] += ending[cat.dom[m]]
        ending = nxt
    return sum(ending)


def product(cat_a: FiniteCategory, cat_b: FiniteCategory) -> FiniteCategory:
    """Product category; pair (x, y) gets id x * n_b + y, likewise morphisms."""
    nb, mb = cat_b.n_objects, cat_b.n_morphisms
    dom = []
    cod = []
    for f in cat_a.morphisms():
        for g in cat_b.morphisms():
            dom.append(cat_a.dom[f] * nb + cat_b.dom[g])
            cod.append(cat_a.cod[f] * nb + cat_b.cod[g])
    identity = tuple(
        cat_a.identity[x] * mb + cat_b.identity[y]
        for x in cat_a.objects()
        for y in cat_b.objects()
    )
    table = {}
    for (ga, fa), va in cat_a.table.items():
        for (gb, fb), vb in cat_b.table.items():
            table[(ga * mb + gb, fa * mb + fb)] = va * mb + vb
    return FiniteCategory(
        cat_a.n_objects * nb, tuple(dom), tuple(cod), identity, table
    )


def discrete_category(n: int) -> FiniteCategory:
    """n objects and nothing but their identities."""
    ids = tuple(range(n))
    table = {(i, i): i for i in range(n)}
    return FiniteCategory(n, ids, ids, ids, table)


def chaotic_category(n: int) -> FiniteCategory:
    """Exactly one morphism between every ordered pair of n objects."""
    dom = tuple(a for a in range(n) for _ in range(n))
    cod = tuple(b for _ in range(n) for b in range(n))
    identity = tuple(a * n + a for a in range(n))
    table = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                table[(b * n + c, a * n + b)] = a * n + c
    return FiniteCategory(n, dom, cod, identity, table)


def category_from_preorder(n: int, leq: set[tuple[int, int]]) -> FiniteCategory:
    """Thin category on a reflexive, transitive relation (one arrow per pair)."""
    for a in range(n):
        if (a, a) not in leq:
            raise ValueError("relation must be reflexive")
    for a, b in leq:
        for c in range(n):
            if (b, c) in leq and (a, c) not in leq:
                raise ValueError("relation must be transitive")
    pairs = sorted(leq)
    index = {pr: k for k, pr in enumerate(pairs)}
    dom = tuple(a for a, _ in pairs)
    cod = tuple(b for _, b in pairs)
    identity = tuple(index[(a, a)] for a in range(n))
    table = {}
    for g, (b2, c) in enumerate(pairs):
        for f, (a, b1) in enumerate(pairs):
            if b1 == b2:
                table[(g, f)] = index[(a, c)]
    return FiniteCategory(n, dom, cod, identity, table)


def category_from_monoid(mult: list[list[int]], unit: int) -> FiniteCategory:
    """One-object category whose endomorphisms carry the given monoid table."""
    m = len(mult)
    table = {(g, f): mult[g][f] for g in range(m) for f in range(m)}
    return FiniteCategory(1, (0,) * m, (0,) * m, (unit,), table)


def identity_functor(cat: FiniteCategory) -> Functor:
    return Functor(cat, cat, tuple(cat.objects()), tuple(cat.morphisms()))


def constant_functor(src: FiniteCategory, tgt: FiniteCategory, obj: int) -> Functor:
    return Functor(
        src,
        tgt,
        tuple(obj for _ in src.objects()),
        tuple(tgt.identity[obj] for _ in src.morphisms()),
    )


def compose_functors(outer: Functor, inner: Functor) -> Functor:
    if outer.source != inner.target:
        raise ValueError("functors are not composable")
    return Functor(
        inner.source,
        outer.target,
        tuple(outer.obj_map[x] for x in inner.obj_map),
        tuple(outer.mor_map[m] for m in inner.mor_map),
    )


def is_relative_functor(fun: Functor, rel_x: RelativeCategory, rel_y: RelativeCategory) -> bool:
    """True iff every marked morphism lands in the marked subcategory."""
    if fun.source != rel_x.underlying or fun.target != rel_y.underlying:
        raise ValueError("functor does not connect the given relative categories")
    return all(fun.mor_map[w] in rel_y.weq for w in rel_x.weq)


def two_of_three_check(rel: RelativeCategory) -> bool:
    """Whenever two of f, g, gf are marked, so is the third."""
    cat = rel.underlying
    weq = rel.weq
    for g, f in cat.composable_pairs():
        marked = (f in weq) + (g in weq) + (cat.compose(g, f) in weq)
        if marked == 2:
            return False
    return True


# ---------------------------------------------------------------------------
# zigzags and homotopy-equivalence witnesses


def check_zigzag(
    witness: ZigzagWitness,
    start: Functor,
    end: Functor,
    domain: RelativeCategory,
    ambient: RelativeCategory,
) -> ValidationReport:
    """Verify a zigzag of natural transformations connecting two functors.

    Each intermediate functor must be a relative functor domain -> ambient;
    every component must be marked in ``ambient``.  Endpoint mismatches are
    tagged "chain", bad squares "naturality", unmarked components
    "weq-component".
    """
    rep = ValidationReport()
    current = start
    for k, step in enumerate(witness.steps):
        eta = step.transformation
        near, far = (eta.source, eta.target) if step.forward else (eta.target, eta.source)
        if near != current:
            rep.add("chain", f"step {k}: transformation does not attach to the chain")
            return rep
        sub = check_natural_transformation(eta)
        for v in sub.violations:
            rep.add("naturality" if v.kind == "naturality" else v.kind, f"step {k}: {v.detail}")
        if sub.ok:
            for x in domain.underlying.objects():
                if eta.components[x] not in ambient.weq:
                    rep.add("weq-component", f"step {k}: component at {x} not marked")
        for fun in (near, far):
            if not is_relative_functor(fun, domain, ambient):
                rep.add("relative-functor", f"step {k}: endpoint functor not relative")
        current = far
    if current != end:
        rep.add("chain", "zigzag does not reach the expected functor")
    return rep


def check_homotopy_equivalence_witness(
    fun_f: Functor,
    fun_g: Functor,
    witness_x: ZigzagWitness,
    witness_y: ZigzagWitness,
    rel_x: RelativeCategory,
    rel_y: RelativeCategory,
) -> ValidationReport:
    """Check that g is a homotopy inverse of f via the two provided zigzags.

    witness_x must connect g.f to the identity of X, witness_y connects f.g
    to the identity of Y.
    """
    rep = ValidationReport()
    if not is_relative_functor(fun_f, rel_x, rel_y):
        rep.add("relative-functor", "forward functor does not preserve marks")
    if not is_relative_functor(fun_g, rel_y, rel_x):
        rep.add("relative-functor", "backward functor does not preserve marks")
    gf = compose_functors(fun_g, fun_f)
    fg = compose_functors(fun_f, fun_g)
    for v in check_zigzag(witness_x, gf, identity_functor(rel_x.underlying), rel_x, rel_x).violations:
        rep.add(v.kind, f"on X: {v.detail}")
    for v in check_zigzag(witness_y, fg, identity_functor(rel_y.underlying), rel_y, rel_y).violations:
        rep.add(v.kind, f"on Y: {v.detail}")
    return rep


# ---------------------------------------------------------------------------
# equivalence-of-categories search


class BudgetExceeded(Exception):
    pass


class Budget:
    """A mutable step counter shared across nested enumerations."""

    def __init__(self, limit: int):
        self.limit = limit
        self.steps = 0

    def spend(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.limit:
            raise BudgetExceeded


@dataclass(frozen=True)
class EquivalenceWitness:
    forward: Functor
    backward: Functor
    unit: NaturalTransformation      # backward . forward => identity
    counit: NaturalTransformation    # forward . backward => identity


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # "found" | "none" | "budget"
    witness: EquivalenceWitness | None
    steps: int


def invertible_morphisms(cat: FiniteCategory) -> dict[int, int]:
    """Map each invertible morphism to its (unique) two-sided inverse."""
    inv = {}
    for m in cat.morphisms():
        a, b = cat.dom[m], cat.cod[m]
        for w in cat.hom(b, a):
            if (
                cat.compose(w, m) == cat.identity[a]
                and cat.compose(m, w) == cat.identity[b]
            ):
                inv[m] = w
                break
    return inv


def enumerate_functors(src: FiniteCategory, tgt: FiniteCategory, budget: Budget):
    """Yield all functors src -> tgt, lexicographic in object then morphism maps.

    Backtracks over non-identity morphisms with early pruning on identity
    preservation and on composites among already-assigned morphisms.
    """
    free = [m for m in src.morphisms() if not src.is_identity(m)]

    for obj_map in itertools.product(range(tgt.n_objects), repeat=src.n_objects):
        budget.spend()
        mor_map = [-1] * src.n_morphisms
        for x in src.objects():
            mor_map[src.identity[x]] = tgt.identity[obj_map[x]]

        def consistent(upto: int) -> bool:
            m = free[upto]
            for f in src.morphisms():
                if mor_map[f] < 0:
                    continue
                for key in ((m, f), (f, m)):
                    if key not in src.table:
                        continue
                    comp = src.table[key]
                    if mor_map[comp] < 0:
                        continue
                    img = (mor_map[key[0]], mor_map[key[1]])
                    if img not in tgt.table or tgt.table[img] != mor_map[comp]:
                        return False
            return True

        def backtrack(k: int):
            if k == len(free):
                yield Functor(src, tgt, tuple(obj_map), tuple(mor_map))
                return
            m = free[k]
            a = obj_map[src.dom[m]]
            b = obj_map[src.cod[m]]
            for cand in tgt.hom(a, b):
                budget.spend()
                mor_map[m] = cand
                if consistent(k):
                    yield from backtrack(k + 1)
            mor_map[m] = -1

        yield from backtrack(0)


def find_natural_iso(fun: Functor, gun: Functor, budget: Budget) -> NaturalTransformation | None:
    """First natural isomorphism fun => gun in component-lexicographic order."""
    src, tgt = fun.source, fun.target
    inv = invertible_morphisms(tgt)
    options = []
    for x in src.objects():
        cands = [m for m in tgt.hom(fun.obj_map[x], gun.obj_map[x]) if m in inv]
        if not cands:
            return None
        options.append(cands)

    comp = [-1] * src.n_objects

    def squares_ok(x: int) -> bool:
        for m in src.morphisms():
            a, b = src.dom[m], src.cod[m]
            if comp[a] < 0 or comp[b] < 0:
                continue
            if x not in (a, b):
                continue
            if tgt.compose(comp[b], fun.mor_map[m]) != tgt.compose(gun.mor_map[m], comp[a]):
                return False
        return True

    def backtrack(x: int):
        if x == src.n_objects:
            yield NaturalTransformation(fun, gun, tuple(comp))
            return
        for cand in options[x]:
            budget.spend()
            comp[x] = cand
            if squares_ok(x):
                yield from backtrack(x + 1)
        comp[x] = -1

    for eta in backtrack(0):
        return eta
    return None


def equivalence_search(
    cat_c: FiniteCategory, cat_d: FiniteCategory, limit: int = 200_000
) -> SearchOutcome:
    """Search for an equivalence between two finite categories.

    Functor pairs are enumerated in lexicographic order; the outcome
    distinguishes a completed fruitless search ("none") from running out of
    budget ("budget").
    """
    budget = Budget(limit)
    try:
        backwards = list(enumerate_functors(cat_d, cat_c, budget))
        for fwd in enumerate_functors(cat_c, cat_d, budget):
            for bwd in backwards:
                unit = find_natural_iso(
                    compose_functors(bwd, fwd), identity_functor(cat_c), budget
                )
                if unit is None:
                    continue
                counit = find_natural_iso(
                    compose_functors(fwd, bwd), identity_functor(cat_d), budget
                )
                if counit is None:
                    continue
                witness = EquivalenceWitness(fwd, bwd, unit, counit)
                return SearchOutcome("found", witness, budget.steps)
    except BudgetExceeded:
        return SearchOutcome("budget", None, budget.steps)
    return SearchOutcome("none", None, budget.steps)
