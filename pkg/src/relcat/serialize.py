"""Line-oriented text serialization for every core structure.

One object per document: the first meaningful line names the kind, ``end``
closes it.  Blank lines and ``#`` comments are ignored.  Parsers rebuild
the exact dataclass (including placeholder table layout) and raise
``ValueError`` with a line number on malformed input; they check shape
only — semantic laws stay with the ``validate_*`` functions.
"""

from __future__ import annotations

from .catcore import FiniteCategory, RelativeCategory
from .nerve import TruncatedBisimplicialSet
from .scat import FiniteSimplicialCategory
from .simplicial import SimplicialMap, TruncatedSimplicialSet, product2


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


class _Reader:
    def __init__(self, text: str):
        self.stream = list(_lines(text))
        self.at = 0

    def peek(self):
        if self.at >= len(self.stream):
            raise ValueError("unexpected end of input")
        return self.stream[self.at]

    def take(self, keyword: str, count: int | None = None) -> list[int]:
        number, words = self.peek()
        if words[0] != keyword:
            raise ValueError(f"line {number}: expected {keyword!r}, got {words[0]!r}")
        self.at += 1
        try:
            values = [int(w) for w in words[1:]]
        except ValueError:
            raise ValueError(f"line {number}: non-integer field in {keyword!r}") from None
        if count is not None and len(values) != count:
            raise ValueError(
                f"line {number}: {keyword!r} needs {count} fields, got {len(values)}"
            )
        return values

    def next_is(self, keyword: str) -> bool:
        return self.at < len(self.stream) and self.peek()[1][0] == keyword

    def done(self) -> None:
        if self.at < len(self.stream):
            number, words = self.stream[self.at]
            raise ValueError(f"line {number}: trailing content {words[0]!r}")


# ---------------------------------------------------------------------------
# categories


def serialize_category(cat: FiniteCategory) -> str:
    out = ["category"]
    _category_body(out, cat)
    out.append("end")
    return "\n".join(out) + "\n"


def _category_body(out: list[str], cat: FiniteCategory) -> None:
    out.append(f"objects {cat.n_objects}")
    out.append(f"morphisms {cat.n_morphisms}")
    for m in cat.morphisms():
        out.append(f"morphism {m} {cat.dom[m]} {cat.cod[m]}")
    out.append("identities " + " ".join(str(i) for i in cat.identity))
    for (g, f), gf in sorted(cat.table.items()):
        out.append(f"compose {g} {f} {gf}")


def _parse_category_body(reader: _Reader) -> FiniteCategory:
    (n_objects,) = reader.take("objects", 1)
    (n_morphisms,) = reader.take("morphisms", 1)
    dom, cod = [], []
    for m in range(n_morphisms):
        mid, a, b = reader.take("morphism", 3)
        if mid != m:
            raise ValueError(f"morphism ids must be sequential, got {mid} for {m}")
        dom.append(a)
        cod.append(b)
    identity = reader.take("identities", n_objects)
    table = {}
    while reader.next_is("compose"):
        g, f, gf = reader.take("compose", 3)
        table[(g, f)] = gf
    return FiniteCategory(
        n_objects, tuple(dom), tuple(cod), tuple(identity), table
    )


def parse_category(text: str) -> FiniteCategory:
    reader = _Reader(text)
    reader.take("category", 0)
    cat = _parse_category_body(reader)
    reader.take("end", 0)
    reader.done()
    return cat


def serialize_relative_category(rel: RelativeCategory) -> str:
    out = ["relative-category"]
    _category_body(out, rel.underlying)
    out.append("weq " + " ".join(str(w) for w in sorted(rel.weq)))
    out.append("end")
    return "\n".join(out) + "\n"


def parse_relative_category(text: str) -> RelativeCategory:
    reader = _Reader(text)
    reader.take("relative-category", 0)
    cat = _parse_category_body(reader)
    weq = reader.take("weq")
    reader.take("end", 0)
    reader.done()
    return RelativeCategory(cat, frozenset(weq))


# ---------------------------------------------------------------------------
# simplicial sets


def serialize_simplicial_set(X: TruncatedSimplicialSet) -> str:
    out = ["simplicial-set"]
    _simplicial_body(out, X)
    out.append("end")
    return "\n".join(out) + "\n"


def _simplicial_body(out: list[str], X: TruncatedSimplicialSet) -> None:
    out.append(f"truncation {X.trunc}")
    out.append("sizes " + " ".join(str(s) for s in X.sizes))
    for n in range(1, X.trunc + 1):
        for i in range(n + 1):
            row = " ".join(str(v) for v in X.faces[n][i])
            out.append(f"face {n} {i} {row}".rstrip())
    for n in range(X.trunc):
        for i in range(n + 1):
            row = " ".join(str(v) for v in X.degeneracies[n][i])
            out.append(f"degeneracy {n} {i} {row}".rstrip())


def _parse_simplicial_body(reader: _Reader) -> TruncatedSimplicialSet:
    (trunc,) = reader.take("truncation", 1)
    if trunc < 0:
        raise ValueError("truncation must be nonnegative")
    sizes = reader.take("sizes", trunc + 1)
    faces: list[tuple] = [()]
    for n in range(1, trunc + 1):
        rows = []
        for i in range(n + 1):
            values = reader.take("face", None)
            if values[:2] != [n, i] or len(values) != 2 + sizes[n]:
                raise ValueError(f"face table for ({n}, {i}) malformed")
            rows.append(tuple(values[2:]))
        faces.append(tuple(rows))
    degens: list[tuple] = []
    for n in range(trunc):
        rows = []
        for i in range(n + 1):
            values = reader.take("degeneracy", None)
            if values[:2] != [n, i] or len(values) != 2 + sizes[n]:
                raise ValueError(f"degeneracy table for ({n}, {i}) malformed")
            rows.append(tuple(values[2:]))
        degens.append(tuple(rows))
    degens.append(())
    return TruncatedSimplicialSet(
        trunc, tuple(sizes), tuple(faces), tuple(degens)
    )


def parse_simplicial_set(text: str) -> TruncatedSimplicialSet:
    reader = _Reader(text)
    reader.take("simplicial-set", 0)
    X = _parse_simplicial_body(reader)
    reader.take("end", 0)
    reader.done()
    return X


# ---------------------------------------------------------------------------
# bisimplicial sets


def serialize_bisimplicial_set(B: TruncatedBisimplicialSet) -> str:
    out = ["bisimplicial-set"]
    out.append(f"outer-truncation {B.outer_trunc}")
    out.append(f"inner-truncation {B.inner_trunc}")
    for k in range(B.outer_trunc + 1):
        row = " ".join(str(s) for s in B.sizes[k])
        out.append(f"sizes {k} {row}")
    for k in range(1, B.outer_trunc + 1):
        for p in range(B.inner_trunc + 1):
            for i in range(k + 1):
                row = " ".join(str(v) for v in B.outer_faces[k][p][i])
                out.append(f"outer-face {k} {p} {i} {row}".rstrip())
    for k in range(B.outer_trunc):
        for p in range(B.inner_trunc + 1):
            for i in range(k + 1):
                row = " ".join(str(v) for v in B.outer_degeneracies[k][p][i])
                out.append(f"outer-degeneracy {k} {p} {i} {row}".rstrip())
    for k in range(B.outer_trunc + 1):
        for p in range(1, B.inner_trunc + 1):
            for i in range(p + 1):
                row = " ".join(str(v) for v in B.inner_faces[k][p][i])
                out.append(f"inner-face {k} {p} {i} {row}".rstrip())
    for k in range(B.outer_trunc + 1):
        for p in range(B.inner_trunc):
            for i in range(p + 1):
                row = " ".join(str(v) for v in B.inner_degeneracies[k][p][i])
                out.append(f"inner-degeneracy {k} {p} {i} {row}".rstrip())
    out.append("end")
    return "\n".join(out) + "\n"


def parse_bisimplicial_set(text: str) -> TruncatedBisimplicialSet:
    reader = _Reader(text)
    reader.take("bisimplicial-set", 0)
    (K,) = reader.take("outer-truncation", 1)
    (P,) = reader.take("inner-truncation", 1)
    if K < 0 or P < 0:
        raise ValueError("truncations must be nonnegative")
    sizes = []
    for k in range(K + 1):
        values = reader.take("sizes", P + 2)
        if values[0] != k:
            raise ValueError(f"sizes row for outer level {k} malformed")
        sizes.append(tuple(values[1:]))

    def tables(keyword, k_range, p_range, i_of, expected):
        per_k = []
        for k in k_range:
            per_p = []
            for p in p_range(k):
                rows = []
                for i in range(i_of(k, p) + 1):
                    values = reader.take(keyword, None)
                    if values[:3] != [k, p, i] or len(values) != 3 + expected(k, p):
                        raise ValueError(
                            f"{keyword} table for ({k}, {p}, {i}) malformed"
                        )
                    rows.append(tuple(values[3:]))
                per_p.append(tuple(rows))
            per_k.append(tuple(per_p))
        return per_k

    outer_faces = [()] + tables(
        "outer-face",
        range(1, K + 1),
        lambda k: range(P + 1),
        lambda k, p: k,
        lambda k, p: sizes[k][p],
    )
    outer_degens = tables(
        "outer-degeneracy",
        range(K),
        lambda k: range(P + 1),
        lambda k, p: k,
        lambda k, p: sizes[k][p],
    ) + [()]
    inner_faces = []
    inner_degens = []
    for k in range(K + 1):
        inner_faces.append(
            ((),)
            + tables(
                "inner-face",
                [k],
                lambda _k: range(1, P + 1),
                lambda _k, p: p,
                lambda _k, p: sizes[_k][p],
            )[0]
        )
    for k in range(K + 1):
        inner_degens.append(
            tuple(
                tables(
                    "inner-degeneracy",
                    [k],
                    lambda _k: range(P),
                    lambda _k, p: p,
                    lambda _k, p: sizes[_k][p],
                )[0]
            )
            + ((),)
        )
    reader.take("end", 0)
    reader.done()
    return TruncatedBisimplicialSet(
        K,
        P,
        tuple(sizes),
        tuple(outer_faces),
        tuple(outer_degens),
        tuple(inner_faces),
        tuple(inner_degens),
    )


# ---------------------------------------------------------------------------
# simplicial categories


def serialize_simplicial_category(A: FiniteSimplicialCategory) -> str:
    out = ["simplicial-category"]
    out.append(f"objects {A.n_objects}")
    out.append(f"truncation {A.trunc}")
    for a in range(A.n_objects):
        for b in range(A.n_objects):
            out.append(f"hom {a} {b}")
            _simplicial_body(out, A.homs[a][b])
    for a in range(A.n_objects):
        for b in range(A.n_objects):
            for c in range(A.n_objects):
                cell = A.comp[a][b][c]
                size_bc = A.homs[b][c].sizes
                for dim, level in enumerate(cell.levels):
                    for idx, z in enumerate(level):
                        x, y = divmod(idx, size_bc[dim])
                        out.append(f"compose {a} {b} {c} {dim} {x} {y} {z}")
    for a, v in enumerate(A.units):
        out.append(f"unit {a} {v}")
    out.append("end")
    return "\n".join(out) + "\n"


def parse_simplicial_category(text: str) -> FiniteSimplicialCategory:
    reader = _Reader(text)
    reader.take("simplicial-category", 0)
    (n,) = reader.take("objects", 1)
    (trunc,) = reader.take("truncation", 1)
    homs = []
    for a in range(n):
        row = []
        for b in range(n):
            pair = reader.take("hom", 2)
            if pair != [a, b]:
                raise ValueError(f"hom block for ({a}, {b}) out of order")
            hom = _parse_simplicial_body(reader)
            if hom.trunc != trunc:
                raise ValueError(f"hom ({a}, {b}) truncation differs from header")
            row.append(hom)
        homs.append(tuple(row))
    levels = {
        (a, b, c): [
            [None] * (homs[a][b].sizes[dim] * homs[b][c].sizes[dim])
            for dim in range(trunc + 1)
        ]
        for a in range(n)
        for b in range(n)
        for c in range(n)
    }
    while reader.next_is("compose"):
        a, b, c, dim, x, y, z = reader.take("compose", 7)
        try:
            cell = levels[(a, b, c)]
            cell[dim][x * homs[b][c].sizes[dim] + y] = z
        except (KeyError, IndexError):
            raise ValueError(
                f"compose entry ({a}, {b}, {c}, {dim}, {x}, {y}) out of range"
            ) from None
    comp = []
    for a in range(n):
        row = []
        for b in range(n):
            cell_row = []
            for c in range(n):
                cell = levels[(a, b, c)]
                for dim, level in enumerate(cell):
                    if any(z is None for z in level):
                        raise ValueError(
                            f"compose table ({a}, {b}, {c}) incomplete at dimension {dim}"
                        )
                cell_row.append(
                    SimplicialMap(
                        product2(homs[a][b], homs[b][c]),
                        homs[a][c],
                        tuple(tuple(level) for level in cell),
                    )
                )
            row.append(tuple(cell_row))
        comp.append(tuple(row))
    units: list = [None] * n
    for _ in range(n):
        a, v = reader.take("unit", 2)
        if not 0 <= a < n:
            raise ValueError(f"unit for unknown object {a}")
        units[a] = v
    if any(u is None for u in units):
        raise ValueError("missing unit line for some object")
    reader.take("end", 0)
    reader.done()
    return FiniteSimplicialCategory(
        n, tuple(homs), tuple(comp), tuple(units)
    )


# ---------------------------------------------------------------------------
# facet lists


def serialize_facets(facets) -> str:
    return "\n".join(" ".join(str(v) for v in f) for f in facets) + "\n"


def parse_facets(text: str) -> list[tuple[int, ...]]:
    """Facet lines: vertex ids separated by spaces, ``#`` comments allowed."""
    facets = []
    for number, words in _lines(text):
        try:
            facets.append(tuple(int(w) for w in words))
        except ValueError:
            raise ValueError(f"line {number}: non-integer vertex id") from None
    return facets


_PARSERS = {
    "category": parse_category,
    "relative-category": parse_relative_category,
    "simplicial-set": parse_simplicial_set,
    "bisimplicial-set": parse_bisimplicial_set,
    "simplicial-category": parse_simplicial_category,
}


def parse_object(text: str):
    """Dispatch on the header line to the matching parser."""
    for _number, words in _lines(text):
        kind = words[0]
        break
    else:
        raise ValueError("empty document")
    if kind not in _PARSERS:
        raise ValueError(f"unknown document kind {kind!r}")
    return _PARSERS[kind](text)
