"""Verification suites over generated instances.

Each suite draws deterministic instances from a seed, runs a fixed battery
of checks, and reports PASS / FAIL / INCONCLUSIVE per check.  FAIL details
embed a serialized counterexample; INCONCLUSIVE marks work abandoned on a
size budget rather than a verdict.  Reports are a pure function of
(suite id, params, count) and are emitted sorted by derived sub-seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .catcore import (
    RelativeCategory,
    ZigzagStep,
    ZigzagWitness,
    chain_count,
    check_homotopy_equivalence_witness,
    equivalence_search,
    two_of_three_check,
    validate_functor,
)
from .generators import (
    GenParams,
    derive_seed,
    gen_relative_category,
    gen_simplicial_category,
    gen_simplicial_maps,
    gen_simplicial_set,
    params_problems,
)
from .homology import cone_probe, homology, pi0_comparison, probe_level_map
from .nerve import (
    bisimplicial_row,
    check_last_vertex_natural,
    classical_nerve,
    last_vertex_map,
    validate_bisimplicial_map,
    weq_chain_category,
)
from .reports import FAIL, INCONCLUSIVE, PASS
from .scat import (
    aligned_ladder_direct,
    aligned_nerve_inclusion,
    aligned_operator_isomorphism,
    check_retraction_identities,
    enriched_nerve_row,
    enriched_simplex_category,
    functor_is_bijective,
    iter_ladder_morphisms,
    marked_vertical_ladder,
    relative_nerve_alignment,
    relativize,
    retraction_sweep_available,
)
from .serialize import (
    serialize_relative_category,
    serialize_simplicial_category,
    serialize_simplicial_set,
)
from .simplicial import (
    SimplicialMap,
    disjoint_union,
    identity_map,
    simplex_category,
    simplex_operator_category,
    standard_simplex,
    validate_simplicial_map,
)

SUITE_IDS = tuple(f"S{i}" for i in range(1, 9))

# Size budgets.  Exceeding one turns the affected check INCONCLUSIVE with
# the tripped bound named in the detail; nothing is ever silently skipped.
_CHAIN_CAP = 200_000  # composable chains enumerated per category level
_STREAM_CAP = 250_000  # ladder morphisms scanned by the pure-Python stream
_SWEEP_CAP = 1_000_000_000  # ladder morphisms scanned by the compiled sweep
_TABLE_CAP = 30_000  # ladder morphisms allowed into a composition table
_PAIR_CAP = 100_000  # chain pairs scanned when solving rung vectors
_CELL_CAP = 2_000_000  # cells per bisimplicial level
_NERVE_CAP = 1_000_000  # cells per simplex-category nerve level
_CONE_CAP = 20_000_000  # entries of one cone boundary matrix
_SEARCH_CAP = 50_000  # equivalence-search steps


@dataclass(frozen=True)
class Verdict:
    check: str
    verdict: str
    detail: str


@dataclass(frozen=True)
class SuiteInstance:
    sub_seed: int
    verdicts: tuple[Verdict, ...]
    millis: int


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    params: GenParams
    instances: tuple[SuiteInstance, ...]

    def worst(self) -> str:
        kinds = {v.verdict for inst in self.instances for v in inst.verdicts}
        if FAIL in kinds:
            return FAIL
        if INCONCLUSIVE in kinds:
            return INCONCLUSIVE
        return PASS

    def to_dict(self) -> dict:
        p = self.params
        return {
            "suite": self.suite,
            "seed": self.seed,
            "params": {
                "seed": p.seed,
                "max_objects": p.max_objects,
                "max_nondegenerate": p.max_nondegenerate,
                "trunc_p": p.trunc_p,
                "trunc_k": p.trunc_k,
                "trunc_q": p.trunc_q,
                "degree": p.degree,
                "acyclic": p.acyclic,
            },
            "instances": [
                {
                    "sub_seed": inst.sub_seed,
                    "verdicts": [
                        {"check": v.check, "verdict": v.verdict, "detail": v.detail}
                        for v in inst.verdicts
                    ],
                    "millis": inst.millis,
                }
                for inst in self.instances
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"{self.suite} seed={self.seed} instances={len(self.instances)} "
            f"worst={self.worst()}"
        ]
        for inst in self.instances:
            lines.append(f"  instance {inst.sub_seed} ({inst.millis} ms)")
            for v in inst.verdicts:
                lines.append(f"    {v.check}: {v.verdict} -- {v.detail}")
        return "\n".join(lines)


def _counterexample(payload: str, head: str) -> str:
    return f"{head}\ncounterexample:\n{payload}"


def _report_verdict(rep, payload: str, head: str) -> Verdict | None:
    """Map a ValidationReport to a FAIL/INCONCLUSIVE verdict, or None if ok."""
    if rep.ok:
        return None
    budget = [v for v in rep.violations if v.kind == "budget"]
    if budget and len(budget) == len(rep.violations):
        return Verdict(head, INCONCLUSIVE, budget[0].detail)
    worst = next(v for v in rep.violations if v.kind != "budget")
    return Verdict(head, FAIL, _counterexample(payload, str(worst)))


# ---------------------------------------------------------------------------
# per-suite instance checks


def _marked_chain_count(rel: RelativeCategory, q: int) -> int:
    cat = rel.underlying
    ending = [1] * cat.n_objects
    for _ in range(q):
        nxt = [0] * cat.n_objects
        for m in rel.weq:
            nxt[cat.cod[m]] += ending[cat.dom[m]]
        ending = nxt
    return sum(ending)


def _ladder_count_capped(rel: RelativeCategory, k: int, cap: int) -> int | None:
    """Streamed ladder morphism count, or None once it exceeds ``cap``."""
    n = 0
    for _ in iter_ladder_morphisms(rel, k):
        n += 1
        if n > cap:
            return None
    return n


def _ladder_precheck(rel: RelativeCategory, k: int, cap: int) -> str | None:
    """Reason the k-th ladder level cannot be tabulated, or None if it can."""
    chains = chain_count(rel.underlying, k)
    if chains > _CHAIN_CAP:
        return f"k={k}: {chains} chains exceed the {_CHAIN_CAP} chain budget"
    if _ladder_count_capped(rel, k, cap) is None:
        return f"k={k}: ladder morphisms exceed the {cap} morphism budget"
    return None


def check_s1(bsc, params: GenParams, payload: str) -> list[Verdict]:
    out = []
    for k in range(params.trunc_k + 1):
        chains = chain_count(bsc.category, k)
        if chains > _CHAIN_CAP:
            out.append(
                Verdict(
                    f"retraction k={k}",
                    INCONCLUSIVE,
                    f"{chains} chains exceed the {_CHAIN_CAP} chain budget",
                )
            )
            continue
        cap = _SWEEP_CAP if retraction_sweep_available(bsc, k) else _STREAM_CAP
        rep = check_retraction_identities(bsc, k, budget=cap)
        bad = _report_verdict(rep, payload, f"retraction k={k}")
        out.append(
            bad
            if bad is not None
            else Verdict(
                f"retraction k={k}", PASS, f"identities hold on {chains} chains"
            )
        )
    return out


def check_s2(bsc, params: GenParams, payload: str) -> list[Verdict]:
    out = []
    for k in range(params.trunc_k + 1):
        head = f"operator-iso k={k}"
        chains = chain_count(bsc.category, k)
        if chains > _CHAIN_CAP:
            out.append(
                Verdict(
                    head,
                    INCONCLUSIVE,
                    f"{chains} chains exceed the {_CHAIN_CAP} chain budget",
                )
            )
            continue
        aligned = aligned_ladder_direct(bsc, k, budget=_STREAM_CAP)
        if aligned is None:
            out.append(
                Verdict(
                    head,
                    INCONCLUSIVE,
                    f"k={k}: aligned scan exceeds the {_STREAM_CAP} vector budget",
                )
            )
            continue
        iso = aligned_operator_isomorphism(bsc, k, aligned)
        rep = validate_functor(iso)
        if not rep.ok:
            out.append(
                Verdict(head, FAIL, _counterexample(payload, str(rep.violations[0])))
            )
            continue
        if not functor_is_bijective(iso):
            out.append(Verdict(head, FAIL, _counterexample(payload, "not bijective")))
            continue
        n, m = iso.source.n_objects, iso.source.n_morphisms
        out.append(Verdict(head, PASS, f"objects={n}, morphisms={m}"))
    return out


def _grid_precheck(bsc, K: int, Q: int) -> str | None:
    """Reason the ladder/weq-chain grids cannot be built, or None."""
    rel = relativize(bsc)
    for k in range(K + 1):
        reason = _ladder_precheck(rel, k, _TABLE_CAP)
        if reason is not None:
            return reason
    for q in range(Q + 1):
        cols = _marked_chain_count(rel, q)
        if cols * cols > _PAIR_CAP:
            return f"q={q}: {cols} marked chains exceed the rung-solver budget"
        wcat, _, _ = weq_chain_category(rel, q)
        for k in range(K + 1):
            cells = chain_count(wcat, k)
            if cells > _CELL_CAP:
                return f"cell ({k},{q}): {cells} cells exceed the {_CELL_CAP} budget"
    for k in range(K + 1):
        ladder = marked_vertical_ladder(rel, k)
        for q in range(Q + 1):
            cells = chain_count(ladder.category, q)
            if cells > _CELL_CAP:
                return f"cell ({k},{q}): {cells} cells exceed the {_CELL_CAP} budget"
    return None


def check_s3(bsc, params: GenParams, payload: str) -> list[Verdict]:
    K, Q = params.trunc_k, params.trunc_q
    reason = _grid_precheck(bsc, K, Q)
    if reason is not None:
        return [Verdict("grid-cells", INCONCLUSIVE, reason)]
    F = relative_nerve_alignment(bsc, K, Q)
    rep = validate_bisimplicial_map(F)
    if not rep.ok:
        return [
            Verdict("grid-cells", FAIL, _counterexample(payload, str(rep.violations[0])))
        ]
    for k in range(K + 1):
        for q in range(Q + 1):
            cells = F.cells[k][q]
            if len(set(cells)) != len(cells) or len(cells) != F.target.size(k, q):
                return [
                    Verdict(
                        "grid-cells",
                        FAIL,
                        _counterexample(payload, f"cell ({k},{q}) is not bijective"),
                    )
                ]
    return [Verdict("grid-cells", PASS, f"cells {F.source.sizes}")]


def _cone_too_large(src, tgt, top: int) -> bool:
    rows = (src.sizes[top - 1] if top >= 1 else 0) + tgt.sizes[top]
    cols = src.sizes[top] + tgt.sizes[top + 1]
    return rows * cols > _CONE_CAP


def check_s4(bsc, params: GenParams, payload: str) -> list[Verdict]:
    K, Q, d = params.trunc_k, params.trunc_q, params.degree
    reason = _grid_precheck(bsc, K, Q)
    if reason is not None:
        return [Verdict("core-inclusion", INCONCLUSIVE, reason)]
    F = aligned_nerve_inclusion(bsc, K, Q)
    rep = validate_bisimplicial_map(F)
    if not rep.ok:
        return [
            Verdict(
                "core-inclusion",
                FAIL,
                _counterexample(payload, str(rep.violations[0])),
            )
        ]
    out = [Verdict("core-inclusion", PASS, f"rows {F.source.sizes}")]
    for k in range(K + 1):
        head = f"level k={k}"
        f = SimplicialMap(
            bisimplicial_row(F.source, k), bisimplicial_row(F.target, k), F.cells[k]
        )
        if d <= f.source.trunc - 1 and _cone_too_large(f.source, f.target, d):
            out.append(Verdict(head, INCONCLUSIVE, "cone matrix exceeds budget"))
            continue
        verdict, detail = probe_level_map(f, d)
        if verdict == FAIL:
            detail = _counterexample(payload, detail)
        out.append(Verdict(head, verdict, detail))
    return out


def check_s5(X, params: GenParams, payload: str) -> list[Verdict]:
    d = params.degree
    head = "operator-homology"
    gop = simplex_operator_category(X)
    g = simplex_category(X)
    for cat in (gop.category, g.category):
        if chain_count(cat, d + 1) > _CHAIN_CAP:
            return [Verdict(head, INCONCLUSIVE, "nerve chains exceed budget")]
    h_op = homology(classical_nerve(gop.category, d + 1), d)
    h = homology(classical_nerve(g.category, d + 1), d)
    if h_op != h:
        return [
            Verdict(head, FAIL, _counterexample(payload, f"{h_op} != {h}"))
        ]
    return [Verdict(head, PASS, str(h))]


def _stability_probe(f: SimplicialMap, top: int, ambient: int) -> tuple[str, str]:
    """PASS/FAIL/INCONCLUSIVE for a comparison map, truncation-aware.

    ``ambient`` is the truncation the instance was generated at.  A
    nontrivial cone on a minimally truncated instance (ambient == top + 1)
    may be an artifact of cutting the model off, so it reports
    INCONCLUSIVE; on deeper instances it is a genuine failure.
    """
    trunc = f.source.trunc
    if top > trunc - 1:
        return INCONCLUSIVE, f"truncation {trunc} too shallow for degree {top}"
    ok, detail = pi0_comparison(f)
    if not ok:
        return FAIL, detail
    if _cone_too_large(f.source, f.target, top):
        return INCONCLUSIVE, "cone matrix exceeds budget"
    probe = cone_probe(f, top)
    if probe.trivial:
        return PASS, f"{detail}; {probe}"
    if ambient <= top + 1:
        return (
            INCONCLUSIVE,
            f"nontrivial cone at the shallowest truncation: {probe}",
        )
    return FAIL, str(probe)


def _lv_depth(X, top: int) -> int:
    """Working depth for the last-vertex probes: deep enough for degree
    ``top`` homology, never deeper (nerve levels of the simplex category
    grow by a factor of its morphism count per level)."""
    return min(X.trunc, top + 1)


def _last_vertex_verdict(X, top: int, payload: str, head: str) -> list[Verdict]:
    depth = _lv_depth(X, top)
    gcat = simplex_category(X).category
    if chain_count(gcat, depth) > _NERVE_CAP:
        return [Verdict(f"{head}-simplicial", INCONCLUSIVE, "nerve exceeds budget")]
    f = last_vertex_map(X, depth)
    out = []
    rep = validate_simplicial_map(f)
    if not rep.ok:
        out.append(
            Verdict(
                f"{head}-simplicial",
                FAIL,
                _counterexample(payload, str(rep.violations[0])),
            )
        )
        return out
    out.append(Verdict(f"{head}-simplicial", PASS, "structure maps commute"))
    verdict, detail = _stability_probe(f, top, X.trunc)
    if verdict == FAIL:
        detail = _counterexample(payload, detail)
    out.append(Verdict(f"{head}-cone", verdict, detail))
    return out


def check_s6(X, maps, A, params: GenParams, payload_x: str, payload_a: str):
    d = params.degree
    out = _last_vertex_verdict(X, d, payload_x, "collapse")
    for j, h in enumerate(maps):
        head = f"natural map={j}"
        depth = _lv_depth(h.source, d)
        over = any(
            chain_count(simplex_category(side).category, depth) > _NERVE_CAP
            for side in (h.source, h.target)
        )
        if over:
            out.append(Verdict(head, INCONCLUSIVE, "nerve exceeds budget"))
            continue
        rep = validate_simplicial_map(h)
        bad = _report_verdict(rep, payload_x, head)
        if bad is not None:
            out.append(bad)
            continue
        rep = check_last_vertex_natural(h, depth)
        bad = _report_verdict(rep, payload_x, head)
        out.append(
            bad if bad is not None else Verdict(head, PASS, "squares commute")
        )
    for k in range(params.trunc_k + 1):
        row, _ = enriched_nerve_row(A, k)
        out.extend(_last_vertex_verdict(row, d, payload_a, f"row k={k}"))
    return out


def check_s7(bsc, A, params: GenParams, payload: str) -> list[Verdict]:
    """The comparison chain leg by leg; no direct map is ever constructed."""
    out = []
    cells = check_s3(bsc, params, payload)
    out.append(replace(cells[0], check="leg-cells"))
    probe = check_s4(bsc, params, payload)
    agg = _worst_of(probe)
    out.append(
        Verdict("leg-core", agg, "; ".join(f"{v.check}: {v.verdict}" for v in probe))
    )
    iso = check_s2(bsc, params, payload)
    agg = _worst_of(iso)
    out.append(
        Verdict("leg-iso", agg, "; ".join(f"{v.check}: {v.verdict}" for v in iso))
    )
    d = params.degree
    for k in range(params.trunc_k + 1):
        row, _ = enriched_nerve_row(A, k)
        head = f"leg-row-homology k={k}"
        verdicts = check_s5(row, params, payload)
        out.append(replace(verdicts[0], check=head))
        out.extend(
            replace(v, check=f"leg-{v.check}")
            for v in _last_vertex_verdict(row, d, payload, f"row k={k}")
        )
    return out


def check_s8(rel, X, params: GenParams, payload: str) -> list[Verdict]:
    d = params.degree
    out = []

    verdict, detail = _stability_probe(identity_map(X), min(d, X.trunc - 1), X.trunc)
    if verdict == FAIL:
        detail = _counterexample(payload, detail)
    out.append(Verdict("probe-identity", verdict, detail))

    point = standard_simplex(0, X.trunc)
    split = disjoint_union([X, point])
    collapse = SimplicialMap(
        split, point, tuple((0,) * split.sizes[n] for n in range(X.trunc + 1))
    )
    verdict, _ = _stability_probe(collapse, min(d, X.trunc - 1), X.trunc)
    if verdict == FAIL:
        out.append(Verdict("probe-collapse", PASS, "collapse to a point refuted"))
    else:
        out.append(
            Verdict(
                "probe-collapse",
                FAIL,
                _counterexample(payload, f"collapse probe returned {verdict}"),
            )
        )

    if two_of_three_check(rel):
        out.append(Verdict("two-of-three", PASS, "marked class is closed"))
    else:
        out.append(
            Verdict(
                "two-of-three",
                FAIL,
                _counterexample(payload, "invertible class violates two-of-three"),
            )
        )

    outcome = equivalence_search(rel.underlying, rel.underlying, _SEARCH_CAP)
    if outcome.status == "budget":
        out.append(
            Verdict(
                "equivalence-witness",
                INCONCLUSIVE,
                f"search budget exhausted after {outcome.steps} steps",
            )
        )
    elif outcome.status == "none":
        out.append(
            Verdict(
                "equivalence-witness",
                FAIL,
                _counterexample(payload, "no self-equivalence found"),
            )
        )
    else:
        w = outcome.witness
        rep = check_homotopy_equivalence_witness(
            w.forward,
            w.backward,
            ZigzagWitness((ZigzagStep(True, w.unit),)),
            ZigzagWitness((ZigzagStep(True, w.counit),)),
            rel,
            rel,
        )
        bad = _report_verdict(rep, payload, "equivalence-witness")
        out.append(
            bad
            if bad is not None
            else Verdict(
                "equivalence-witness", PASS, f"verified after {outcome.steps} steps"
            )
        )
    return out


def _worst_of(verdicts) -> str:
    kinds = {v.verdict for v in verdicts}
    if FAIL in kinds:
        return FAIL
    if INCONCLUSIVE in kinds:
        return INCONCLUSIVE
    return PASS


# ---------------------------------------------------------------------------
# the suite runner


def _run_instance(suite: str, inst_params: GenParams) -> list[Verdict]:
    if suite in ("S1", "S2", "S3", "S4"):
        A = gen_simplicial_category(inst_params)
        bsc = enriched_simplex_category(A)
        payload = serialize_simplicial_category(A)
        check = {"S1": check_s1, "S2": check_s2, "S3": check_s3, "S4": check_s4}[suite]
        return check(bsc, inst_params, payload)
    if suite == "S5":
        X = gen_simplicial_set(inst_params)
        return check_s5(X, inst_params, serialize_simplicial_set(X))
    if suite == "S6":
        X = gen_simplicial_set(inst_params)
        maps = gen_simplicial_maps(inst_params, 2)
        A = gen_simplicial_category(inst_params)
        return check_s6(
            X,
            maps,
            A,
            inst_params,
            serialize_simplicial_set(X),
            serialize_simplicial_category(A),
        )
    if suite == "S7":
        A = gen_simplicial_category(inst_params)
        bsc = enriched_simplex_category(A)
        return check_s7(bsc, A, inst_params, serialize_simplicial_category(A))
    if suite == "S8":
        rel = gen_relative_category(inst_params)
        X = gen_simplicial_set(inst_params)
        return check_s8(rel, X, inst_params, serialize_relative_category(rel))
    raise ValueError(f"unknown suite id: {suite!r}")


def run_suite(suite: str, params: GenParams, count: int) -> SuiteReport:
    """Run ``count`` generated instances of one suite, sorted by sub-seed."""
    if suite not in SUITE_IDS:
        raise ValueError(f"unknown suite id: {suite!r}")
    problems = params_problems(params)
    if problems:
        raise ValueError("; ".join(problems))
    drawn = sorted(
        derive_seed(params.seed, f"instance{i}") for i in range(count)
    )
    instances = []
    for sub_seed in drawn:
        inst_params = replace(params, seed=sub_seed)
        t0 = time.perf_counter()
        verdicts = _run_instance(suite, inst_params)
        millis = int(round((time.perf_counter() - t0) * 1000))
        instances.append(SuiteInstance(sub_seed, tuple(verdicts), millis))
    return SuiteReport(suite, params.seed, params, tuple(instances))
