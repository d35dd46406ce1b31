"""Homomorphisms, fiberwise surjections, spans and the structure
identity decision.

A homomorphism is a natural family of carrier maps; fiberwise
surjectivity is checked over every boundary instance of the domain and
witnessed by stored sections.  Two structures are equivalent when a span
of fiberwise surjections joins them; for totally saturated structures of
a height-3 signature this coincides with the existence of a structure
isomorphism, which is what the decision procedure computes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (HeightOutOfScope, NotSaturated, PreconditionViolation,
                     SortMismatch)
from .finsem import (FinStructure, boundary_instances, card_iso_elems,
                     fiber, ind_truth_elems, saturation_profile)


@dataclass(frozen=True)
class Hom:
    """A homomorphism of structures: per-sort total maps."""

    src: FinStructure
    dst: FinStructure
    maps: dict  # sort -> {element: element}

    def apply(self, sort, elem):
        return self.maps[sort][elem]

    def push_boundary(self, K, delta):
        return {q: self.maps[q.cod][e] for q, e in delta.items()}


def identity_hom(M: FinStructure) -> Hom:
    return Hom(M, M, {K: {e: e for e in M.carrier(K)} for K in M.sig.sorts})


def compose_homs(h1: Hom, h2: Hom) -> Hom:
    """h2 after h1."""
    if h1.dst is not h2.src:
        raise SortMismatch("homomorphisms are not composable")
    return Hom(h1.src, h2.dst,
               {K: {e: h2.maps[K][h1.maps[K][e]]
                    for e in h1.src.carrier(K)}
                for K in h1.src.sig.sorts})


def is_hom(M: FinStructure, N: FinStructure, maps) -> bool:
    """Totality plus naturality with every generating arrow."""
    sig = M.sig
    if set(maps) != set(sig.sorts):
        return False
    for K in sig.sorts:
        tgt = set(N.carrier(K))
        for e in M.carrier(K):
            if e not in maps[K] or maps[K][e] not in tgt:
                return False
    for g in sig.gens:
        for e in M.carrier(g.dom):
            if maps[g.cod][M.apply_gen(g.name, e)] \
                    != N.apply_gen(g.name, maps[g.dom][e]):
                return False
    return True


def is_fibsurj(h: Hom):
    """Fiberwise surjectivity over every boundary instance of the
    domain, with deterministic least-preimage sections."""
    M, N = h.src, h.dst
    sections = {}
    for K in M.sig.sorts:
        for delta in boundary_instances(M, K):
            src_fiber = fiber(M, K, delta)
            dst_delta = h.push_boundary(K, delta)
            dst_fiber = fiber(N, K, dst_delta)
            images = {}
            for e in src_fiber:
                images.setdefault(h.apply(K, e), e)
            if any(b not in images for b in dst_fiber):
                return False, None
            key = (K, tuple(sorted((q.name, e)
                                   for q, e in delta.items())))
            sections[key] = {b: images[b] for b in dst_fiber}
    return True, sections


def verify_sections(h: Hom, sections) -> bool:
    """map after section is the identity on every target fiber."""
    for (K, _), table in sections.items():
        for b, a in table.items():
            if h.apply(K, a) != b:
                return False
    return True


def _hom_search(M: FinStructure, N: FinStructure, bijective=False):
    """All natural map families M -> N, deterministically; bijective
    restricts to per-sort bijections."""
    sig = M.sig
    sorts = sorted(sig.sorts, key=lambda K: (-sig.level(K),
                                             sig.sorts.index(K)))
    elems = [(K, e) for K in sorts for e in M.carrier(K)]

    def consistent(maps, K, e, v):
        for g in sig.out_gens(K):
            w = maps[g.cod].get(M.apply_gen(g.name, e))
            if w is not None and N.apply_gen(g.name, v) != w:
                return False
        return True

    def assign(i, maps):
        if i == len(elems):
            yield {K: dict(maps[K]) for K in sig.sorts}
            return
        K, e = elems[i]
        for v in N.carrier(K):
            if bijective and v in maps[K].values():
                continue
            if not consistent(maps, K, e, v):
                continue
            maps[K][e] = v
            yield from assign(i + 1, maps)
            del maps[K][e]

    if bijective and any(len(M.carrier(K)) != len(N.carrier(K))
                         for K in sig.sorts):
        return
    yield from assign(0, {K: {} for K in sig.sorts})


def structure_iso(M: FinStructure, N: FinStructure):
    """A natural family of per-sort bijections, or None after
    exhaustive search."""
    for maps in _hom_search(M, N, bijective=True):
        return maps
    return None


@dataclass(frozen=True)
class Span:
    """A FOLDS-equivalence witness: both legs fiberwise surjective."""

    apex: FinStructure
    left: Hom
    right: Hom
    left_sections: dict
    right_sections: dict


@dataclass(frozen=True)
class SpanResult:
    status: str  # "found" | "absent" | "bound_exceeded"
    span: Span = None


def default_apex_bound(M: FinStructure, N: FinStructure) -> dict:
    return {K: len(M.carrier(K)) * len(N.carrier(K)) for K in M.sig.sorts}


def _span_through(P: FinStructure, M, N, lmaps, rmaps):
    left, right = Hom(P, M, lmaps), Hom(P, N, rmaps)
    okl, sl = is_fibsurj(left)
    if not okl:
        return None
    okr, sr = is_fibsurj(right)
    if not okr:
        return None
    return Span(P, left, right, sl, sr)


def _product_structure(M: FinStructure, N: FinStructure) -> FinStructure:
    sig = M.sig
    carriers = {K: [(a, b) for a in M.carrier(K) for b in N.carrier(K)]
                for K in sig.sorts}
    maps = {g.name: {(a, b): (M.apply_gen(g.name, a),
                              N.apply_gen(g.name, b))
                     for (a, b) in carriers[g.dom]}
            for g in sig.gens}
    return FinStructure(sig, carriers, maps)


def find_span(M: FinStructure, N: FinStructure, apex_bound=None):
    """A span of fiberwise surjections joining M and N, searched over a
    deterministic family of candidate apexes.

    Absence is definitive only on the totally saturated fast path; when
    the bounded search is exhausted elsewhere, the result is reported as
    bound_exceeded rather than absent.
    """
    if M.sig is not N.sig:
        raise SortMismatch("structures are over different signatures")
    bound = dict(apex_bound or default_apex_bound(M, N))
    if (saturation_profile(M)["total"]
            and saturation_profile(N)["total"]):
        iso = structure_iso(M, N)
        if iso is None:
            return SpanResult("absent")
        span = _span_through(M, M, N, identity_hom(M).maps, iso)
        return SpanResult("found", span)
    # apex M: identity left leg, searched fiberwise-surjective right leg
    for maps in _hom_search(M, N):
        span = _span_through(M, M, N, identity_hom(M).maps, maps)
        if span is not None:
            return SpanResult("found", span)
    # apex N, symmetric
    for maps in _hom_search(N, M):
        span = _span_through(N, M, N, maps, identity_hom(N).maps)
        if span is not None:
            return SpanResult("found", span)
    # apex M x N with the projections
    P = _product_structure(M, N)
    if all(len(P.carrier(K)) <= bound.get(K, 0) for K in P.sig.sorts):
        lmaps = {K: {p: p[0] for p in P.carrier(K)} for K in P.sig.sorts}
        rmaps = {K: {p: p[1] for p in P.carrier(K)} for K in P.sig.sorts}
        span = _span_through(P, M, N, lmaps, rmaps)
        if span is not None:
            return SpanResult("found", span)
    return SpanResult("bound_exceeded")


def check_ind_preservation(h: Hom, level: int) -> dict:
    """Indistinguishability along a fiberwise surjection.

    level 2: truth of Ind is preserved and reflected on all pairs of
    level-2 elements.  level 3: witness counts of the isomorphism
    formula match on all pairs of level-3 elements; requires totally
    saturated endpoints.
    """
    ok, _ = is_fibsurj(h)
    if not ok:
        raise PreconditionViolation("homomorphism is not fiberwise "
                                    "surjective")
    if level == 3 and not (saturation_profile(h.src)["total"]
                           and saturation_profile(h.dst)["total"]):
        raise PreconditionViolation(
            "both endpoints must be totally saturated")
    violations = []
    for K in h.src.sig.sorts:
        if h.src.sig.level(K) != level:
            continue
        elems = h.src.carrier(K)
        for a in elems:
            for b in elems:
                if level == 2:
                    got = ind_truth_elems(h.src, K, a, b)
                    want = ind_truth_elems(h.dst, K, h.apply(K, a),
                                           h.apply(K, b))
                    equal = got == want
                else:
                    equal = (card_iso_elems(h.src, K, a, b)
                             == card_iso_elems(h.dst, K, h.apply(K, a),
                                               h.apply(K, b)))
                if not equal:
                    violations.append({"sort": K, "pair": (a, b)})
    return {"ok": not violations, "violations": violations}


def hsip_decide(M: FinStructure, N: FinStructure) -> bool:
    """For height-3 signatures and totally saturated structures:
    equivalence coincides with structure isomorphism."""
    if M.sig.height != 3:
        raise HeightOutOfScope(
            f"signature height {M.sig.height} is out of scope")
    if not saturation_profile(M)["total"]:
        raise NotSaturated("left structure is not totally saturated")
    if not saturation_profile(N)["total"]:
        raise NotSaturated("right structure is not totally saturated")
    return structure_iso(M, N) is not None
