"""The two contravariant functors between LH-SD skew lattices and bundles.

``star_of_bundle`` builds the algebra of sections over downsets under
override and restriction.  ``dual_bundle`` goes back: its base is the poset
of proper homs S -> 2 and its stalk over h is the nonzero D-class of S/∼_h.
``phi`` and ``psi`` are the two reconstruction isomorphisms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import (
    TWO,
    Congruence,
    FiniteSkewLattice,
    SkewHom,
    d_relation,
    enumerate_proper_homs_to_2,
    is_homomorphism,
    is_left_handed,
    is_proper,
    is_strongly_distributive,
    lattice_reflection,
    quotient,
)
from .bundles import (
    UNDEFINED,
    Bundle,
    Section,
    SheafMorphism,
    all_sections,
    sections_over,
)
from .constructions import primitive_left
from .errors import (
    InternalCheckFailed,
    InternalCompatibilityViolation,
    NoRealization,
    NotProper,
    PreconditionUnmet,
    SizeOverflow,
    max_size,
)
from .order import (
    FinitePoset,
    MonotoneMap,
    bits,
    downset_lattice,
    dual_of_proper_hom,
    mask_of,
    spectrum,
    unit_poset,
)


# -- bundle -> algebra ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SectionAlgebra:
    bundle: Bundle
    algebra: FiniteSkewLattice
    sections: tuple[Section, ...]
    index: dict = field(repr=False)

    def section_of(self, a: int) -> Section:
        return self.sections[a]

    def element_of(self, s: Section) -> int:
        return self.index[s]

    def dom(self, a: int) -> int:
        return self.sections[a].domain


def _encode(vals: np.ndarray, base: int) -> np.ndarray:
    weights = base ** np.arange(vals.shape[-1], dtype=np.int64)
    return (vals + 1) @ weights


def star_of_bundle(B: Bundle, *, cap: int | None = None) -> SectionAlgebra:
    """Sections over all downsets; a∨b overrides a with b, a∧b restricts a to dom b."""
    return _star_of_bundle(B, max_size(cap))


@lru_cache(maxsize=4096)
def _star_of_bundle(B: Bundle, cap: int) -> SectionAlgebra:
    secs = all_sections(B, cap=cap)
    n = len(secs)
    m = B.m
    if m == 0:
        S = FiniteSkewLattice([[0]], [[0]], 0)
        return SectionAlgebra(B, S, tuple(secs), {secs[0]: 0})
    vals = np.array([s.values for s in secs], dtype=np.int64).reshape(n, m)
    defined = vals != UNDEFINED
    meet_vals = np.where(defined[None, :, :], vals[:, None, :], UNDEFINED)
    join_vals = np.where(defined[None, :, :], vals[None, :, :], vals[:, None, :])
    base = max(B.stalks) + 1
    codes = _encode(vals, base)
    order = np.argsort(codes)
    sorted_codes = codes[order]

    def lookup(table_vals):
        c = _encode(table_vals, base)
        pos = np.searchsorted(sorted_codes, c)
        return order[pos]

    meet = lookup(meet_vals)
    join = lookup(join_vals)
    index = {s: i for i, s in enumerate(secs)}
    S = FiniteSkewLattice(meet, join, index[Section.empty(m)])
    return SectionAlgebra(B, S, tuple(secs), index)


def star_of_morphism(
    mor: SheafMorphism,
    source_alg: SectionAlgebra | None = None,
    target_alg: SectionAlgebra | None = None,
) -> SkewHom:
    """(f, λ)⋆ : F⋆ -> E⋆, a ∈ F(U) ↦ λ_U(a) ∈ E(f⁻¹ U)."""
    E_alg = source_alg or star_of_bundle(mor.source)
    F_alg = target_alg or star_of_bundle(mor.target)
    images = tuple(E_alg.index[mor.apply(s)] for s in F_alg.sections)
    return SkewHom(F_alg.algebra, E_alg.algebra, images)


def ev(SA: SectionAlgebra, x: int) -> SkewHom:
    """Evaluation at x onto the primitive algebra on the stalk E_x (t_e = e + 1)."""
    P = primitive_left(SA.bundle.stalks[x])
    images = tuple(0 if s.values[x] == UNDEFINED else s.values[x] + 1 for s in SA.sections)
    return SkewHom(SA.algebra, P, images)


def point_hom(SA: SectionAlgebra, x: int) -> SkewHom:
    """h_x: a ↦ 1 iff x ∈ dom(a)."""
    return SkewHom(SA.algebra, TWO, tuple(int(s.values[x] != UNDEFINED) for s in SA.sections))


# -- the congruence ∼_h -----------------------------------------------------

def _require_lhsd(S: FiniteSkewLattice):
    if not is_left_handed(S):
        raise PreconditionUnmet("algebra is not left-handed")
    if not is_strongly_distributive(S):
        raise PreconditionUnmet("algebra is not strongly distributive")


def _require_proper(S: FiniteSkewLattice, h) -> np.ndarray:
    hm = np.asarray(h.map if isinstance(h, SkewHom) else h, dtype=np.int64)
    if hm.shape != (S.n,) or not is_homomorphism(tuple(hm), S, TWO):
        raise PreconditionUnmet("h is not a homomorphism S -> 2")
    if not (hm == 1).any():
        raise PreconditionUnmet("h is not proper")
    return hm


def sim_h(S: FiniteSkewLattice, h, *, check: bool = True) -> Congruence:
    """a ∼_h b iff (a∧d)∨c = (b∧d)∨c for some c, d with h(c) = 0, h(d) = 1.

    All pairs (c, d) are scanned.  With ``check`` the result is verified to be
    an equivalence, a congruence, to refine ker h, and to have a primitive
    quotient whose zero class is h⁻¹(0).
    """
    if check:
        _require_lhsd(S)
    hm = _require_proper(S, h)
    zeros = np.flatnonzero(hm == 0)
    ones = np.flatnonzero(hm == 1)
    keys = S.join[S.meet[:, ones][:, :, None], zeros[None, None, :]].reshape(S.n, -1)
    rel = np.zeros((S.n, S.n), dtype=bool)
    for a in range(S.n):
        rel[a] = (keys == keys[a]).any(axis=1)
    try:
        C = Congruence.from_matrix(rel)
    except InternalCheckFailed as exc:
        raise InternalCompatibilityViolation(f"∼_h: {exc}") from None
    if not check:
        return C
    w = C.compatibility_witness(S)
    if w is not None:
        raise InternalCompatibilityViolation(f"∼_h is not compatible: {w}")
    if any(hm[x] != hm[C.labels[x]] for x in range(S.n)):
        raise InternalCheckFailed("∼_h does not refine ker h")
    zero_block = tuple(int(v) for v in zeros)
    if zero_block not in C.blocks:
        raise InternalCheckFailed("h⁻¹(0) is not a single ∼_h class")
    Q, _ = quotient(S, C)
    if len(d_relation(Q)) != 2:
        raise InternalCheckFailed("S/∼_h is not primitive")
    return C


def nonzero_blocks(C: Congruence, h) -> list[tuple[int, ...]]:
    hm = h.map if isinstance(h, SkewHom) else h
    return [b for b in C.blocks if hm[b[0]] == 1]


# -- prime filters over h ---------------------------------------------------

def _filter_closure(S: FiniteSkewLattice, seed: set, zeros: list[int], ones: set):
    """Least superset of ``seed`` that is upward closed, meet closed and closed
    under a ↦ a∨b for h(b) = 0.  None if it leaves h⁻¹(1)."""
    leq = S.leq
    F = set(seed)
    todo = list(F)
    while todo:
        a = todo.pop()
        cand = [int(b) for b in np.flatnonzero(leq[a])]
        cand += [S.j(a, b) for b in zeros]
        for b in list(F):
            cand.append(S.m(a, b))
            cand.append(S.m(b, a))
        for c in cand:
            if c not in F:
                if c not in ones:
                    return None
                F.add(c)
                todo.append(c)
    return frozenset(F)


def is_preprime_filter(S: FiniteSkewLattice, h, F) -> bool:
    """The five preprime conditions, checked literally."""
    hm = h.map if isinstance(h, SkewHom) else h
    F = set(F)
    leq = S.leq
    for a in F:
        if hm[a] != 1:
            return False
        if any(leq[a, b] and b not in F for b in range(S.n)):
            return False
        if any(S.m(a, b) not in F for b in F):
            return False
        if any(hm[b] == 0 and S.j(a, b) not in F for b in range(S.n)):
            return False
    D = d_relation(S)
    classes = {D.labels[a] for a in F}
    return all(D.labels[b] in classes for b in range(S.n) if hm[b] == 1)


def prime_filters_over(S: FiniteSkewLattice, h, *, cap: int | None = None) -> list[frozenset]:
    """Minimal preprime filters over h.

    A minimal one is the closure of a transversal of the D-classes inside
    h⁻¹(1), so candidates are generated class by class (skipping classes the
    running closure already meets) and the inclusion-minimal ones kept.
    """
    _require_lhsd(S)
    hm = _require_proper(S, h)
    limit = max_size(cap)
    zeros = [int(b) for b in np.flatnonzero(hm == 0)]
    ones = {int(b) for b in np.flatnonzero(hm == 1)}
    D = d_relation(S)
    classes = [b for b in D.blocks if hm[b[0]] == 1]
    candidates: set[frozenset] = set()
    visited = 0

    def search(i: int, F: frozenset):
        nonlocal visited
        visited += 1
        if visited > limit:
            raise SizeOverflow(f"more than {limit} candidate filters")
        while i < len(classes) and F.intersection(classes[i]):
            i += 1
        if i == len(classes):
            candidates.add(F)
            return
        for a in classes[i]:
            G = _filter_closure(S, F | {a}, zeros, ones)
            if G is not None:
                search(i + 1, G)

    search(0, frozenset())
    minimal = [F for F in candidates if not any(G < F for G in candidates)]
    for F in minimal:
        if not is_preprime_filter(S, hm, F):
            raise InternalCheckFailed(f"candidate {sorted(F)} is not a preprime filter")
    return sorted(minimal, key=min)


# -- algebra -> bundle ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DualBundle:
    """S⋆: base = proper homs S -> 2 (reverse pointwise), stalk over h = S/∼_h minus zero.

    Stalk element e over point i is the class whose least member is
    ``stalk_reps[i][e]``.
    """

    algebra: FiniteSkewLattice
    homs: tuple[tuple[int, ...], ...]
    bundle: Bundle
    congruences: tuple[Congruence, ...]
    stalk_reps: tuple[tuple[int, ...], ...]

    def class_of(self, i: int, a: int) -> int:
        if self.homs[i][a] != 1:
            raise ValueError(f"h_{i}({a}) = 0: {a} has no class in the stalk")
        return self.stalk_reps[i].index(self.congruences[i].labels[a])

    def hat(self, a: int) -> int:
        """{h : h(a) = 1} as a mask over the base."""
        return mask_of(i for i, h in enumerate(self.homs) if h[a] == 1)

    def section_of(self, a: int) -> Section:
        """s_a, defined on hat(a)."""
        return Section(tuple(self.class_of(i, a) if h[a] == 1 else UNDEFINED for i, h in enumerate(self.homs)))

    def sidecar(self) -> dict:
        return {"hom_labels": [list(h) for h in self.homs], "class_reps": [list(r) for r in self.stalk_reps]}

    def to_json(self) -> dict:
        out = self.bundle.to_json()
        out.update(self.sidecar())
        return out


def _reverse_pointwise(homs) -> FinitePoset:
    return FinitePoset(tuple(tuple(all(a >= b for a, b in zip(g, h)) for h in homs) for g in homs))


def dual_bundle(S: FiniteSkewLattice, *, check: bool = True) -> DualBundle:
    _require_lhsd(S)
    homs = [h.map for h in enumerate_proper_homs_to_2(S)]
    base = _reverse_pointwise(homs)
    if check:
        # same base through prime filters of S/D under reverse inclusion
        L, alpha = lattice_reflection(S)
        X, filters = spectrum(L)
        as_filters = [frozenset(alpha(a) for a in range(S.n) if h[a] == 1) for h in homs]
        where = {p.members: i for i, p in enumerate(filters)}
        if sorted(where.get(f, -1) for f in as_filters) != list(range(len(filters))):
            raise InternalCheckFailed("proper homs do not match the prime filters of S/D")
        f = MonotoneMap(base, X, tuple(where[p] for p in as_filters))
        if not f.is_order_isomorphism():
            raise InternalCheckFailed("reverse pointwise order differs from reverse inclusion")
    congs, reps = [], []
    for h in homs:
        C = sim_h(S, h, check=check)
        congs.append(C)
        reps.append(tuple(b[0] for b in nonzero_blocks(C, h)))
    bundle = Bundle(base, tuple(len(r) for r in reps))
    return DualBundle(S, tuple(homs), bundle, tuple(congs), tuple(reps))


@dataclass(frozen=True, eq=False)
class Representation:
    dual: DualBundle
    sections: SectionAlgebra
    phi: SkewHom


def represent(S: FiniteSkewLattice, *, check: bool = True) -> Representation:
    """S, its dual bundle, the section algebra of that bundle and phi between them."""
    dual = dual_bundle(S, check=check)
    SA = star_of_bundle(dual.bundle)
    images = []
    for a in range(S.n):
        s = dual.section_of(a)
        if s not in SA.index:
            raise InternalCheckFailed(f"s_{a} is not a section over a downset")
        images.append(SA.index[s])
    h = SkewHom(S, SA.algebra, tuple(images))
    if not is_homomorphism(h, S, SA.algebra):
        raise InternalCheckFailed("phi is not a homomorphism")
    if not h.is_injective():
        raise InternalCheckFailed("phi is not injective")
    if not h.is_surjective():
        raise InternalCheckFailed("phi is not surjective")
    return Representation(dual, SA, h)


def phi(S: FiniteSkewLattice) -> SkewHom:
    """a ↦ s_a, verified to be an isomorphism S -> (S⋆)⋆."""
    return represent(S).phi


def transport_tables(h: SkewHom) -> tuple[np.ndarray, np.ndarray]:
    """Tables of the source rewritten through a bijection h, for comparison with the target."""
    inv = np.empty(h.source.n, dtype=np.int64)
    inv[list(h.map)] = np.arange(h.source.n)
    mp = np.asarray(h.map)
    S = h.source
    return mp[S.meet[np.ix_(inv, inv)]], mp[S.join[np.ix_(inv, inv)]]


@dataclass(frozen=True)
class BundleIsomorphism:
    source: Bundle
    target: Bundle
    base_map: MonotoneMap
    stalk_maps: tuple[tuple[int, ...], ...]


def psi(B: Bundle) -> BundleIsomorphism:
    """e ∈ E_x ↦ (h_x, [a]) for a section a with a(x) = e; verified bijective."""
    SA = star_of_bundle(B)
    dual = dual_bundle(SA.algebra)
    where = {h: i for i, h in enumerate(dual.homs)}
    base_images = []
    for x in range(B.m):
        hx = point_hom(SA, x).map
        if hx not in where:
            raise InternalCheckFailed(f"h_{x} is not a proper hom")
        base_images.append(where[hx])
    fmap = MonotoneMap(B.base, dual.bundle.base, tuple(base_images))
    if not fmap.is_order_isomorphism():
        raise InternalCheckFailed("x ↦ h_x is not an order isomorphism")
    stalk_maps = []
    for x in range(B.m):
        i = fmap(x)
        row = []
        for e in range(B.stalks[x]):
            witnesses = [a for a, s in enumerate(SA.sections) if s.values[x] == e]
            classes = {dual.class_of(i, a) for a in witnesses}
            if len(classes) != 1:
                raise InternalCheckFailed(f"class of {e} over {x} depends on the chosen section")
            row.append(dual.class_of(i, witnesses[0]))
        if sorted(row) != list(range(dual.bundle.stalks[i])):
            raise InternalCheckFailed(f"stalk map over {x} is not a bijection")
        stalk_maps.append(tuple(row))
    return BundleIsomorphism(B, dual.bundle, fmap, tuple(stalk_maps))


# -- constructive surjectivity ----------------------------------------------

def phi_preimages(S: FiniteSkewLattice, s: Section, dual: DualBundle) -> list[int]:
    """Oracle: every a with s_a = s, by scanning S."""
    return [a for a in range(S.n) if dual.section_of(a) == s]


def _glue(S: FiniteSkewLattice, hats: list[int], triples: list[tuple[int, int, int]]) -> int:
    """Element a with s_a = s from triples (a_i, c_i, d_i) covering dom s.

    For each j recurse on ĉ_j with (a_i, c_i∧c_j, d_i∧c_j), i ≠ j, to get
    f_j; then a = ⋁_j ((a_j ∧ d_j) ∨ f_j).
    """
    if not triples:
        return S.zero
    result = S.zero
    for j, (aj, cj, dj) in enumerate(triples):
        sub = []
        for i, (ai, ci, di) in enumerate(triples):
            if i == j:
                continue
            cij, dij = S.m(ci, cj), S.m(di, cj)
            if hats[dij] & ~hats[cij]:
                sub.append((ai, cij, dij))
        fj = _glue(S, hats, sub)
        term = S.j(S.m(aj, dj), fj)
        result = term if j == 0 else S.j(result, term)
    return result


def realize_section(S: FiniteSkewLattice, s: Section, dual: DualBundle | None = None, *, check: bool = True) -> int:
    """The element a with phi(a) = s, built by the cover-and-glue procedure.

    For each h in dom s: pick a_h (least member of the class s(h)), the set T_h
    where s agrees with s_{a_h}, and the lexicographically least (d, c) with
    ĉ ⊆ d̂ and h ∈ d̂ \\ ĉ ⊆ T_h.  Normalise to d∧u, c∧d∧u (û = dom s), keep a
    greedy subcover and glue.
    """
    dual = dual or dual_bundle(S)
    U = s.domain
    if U & ~((1 << dual.bundle.m) - 1) or not dual.bundle.base.is_downset(U):
        raise NoRealization(f"domain {bits(U)} is not a downset of the dual base")
    hats = [dual.hat(a) for a in range(S.n)]
    if U == 0:
        a = S.zero
    else:
        try:
            u = hats.index(U)
        except ValueError:
            raise NoRealization(f"no element has domain {bits(U)}") from None
        least_with = {}
        for c, mc in enumerate(hats):
            least_with.setdefault(mc, c)
        triples = []
        for i in bits(U):
            a_i = dual.stalk_reps[i][s.values[i]]
            T = mask_of(k for k in bits(U) if hats[a_i] >> k & 1 and dual.class_of(k, a_i) == s.values[k])
            pick = None
            for d in range(S.n):
                md = hats[d]
                if not md >> i & 1:
                    continue
                cs = [
                    c for mc, c in least_with.items()
                    if mc & ~md == 0 and not mc >> i & 1 and md & ~mc & ~T == 0
                ]
                if cs:
                    pick = (d, min(cs))
                    break
            if pick is None:
                raise NoRealization(f"no (c, d) pair isolates point {i}")
            d, c = pick
            d = S.m(d, u)
            c = S.m(S.m(c, d), u)
            triples.append((a_i, c, d))
        chosen, covered = [], 0
        for a_i, c, d in triples:
            region = hats[d] & ~hats[c]
            if region & ~covered:
                chosen.append((a_i, c, d))
                covered |= region
        if covered != U:
            raise NoRealization("pieces do not cover the domain")
        a = _glue(S, hats, chosen)
    if dual.section_of(a) != s:
        raise NoRealization(f"glued element {a} does not realise the section")
    if check:
        oracle = phi_preimages(S, s, dual)
        if oracle != [a]:
            raise NoRealization(f"oracle preimages {oracle} disagree with {a}")
    return a


# -- homs back to morphisms -------------------------------------------------

def unstar_hom(h: SkewHom, E_alg: SectionAlgebra, F_alg: SectionAlgebra) -> SheafMorphism:
    """The sheaf morphism (X, E) -> (Y, F) with (f, λ)⋆ = h, for proper h: F⋆ -> E⋆."""
    if h.source != F_alg.algebra or h.target != E_alg.algebra:
        raise ValueError("h must go from F⋆ to E⋆")
    if not is_homomorphism(h, h.source, h.target):
        raise ValueError("h is not a homomorphism")
    if not is_proper(h):
        raise NotProper("h is not proper")
    E, F = E_alg.bundle, F_alg.bundle
    LY, my = downset_lattice(F.base)
    LX, mx = downset_lattice(E.base)
    pos_x = {m: i for i, m in enumerate(mx)}
    hbar = []
    for V in my:
        s = sections_over(F, V)[0]
        hbar.append(pos_x[E_alg.dom(h(F_alg.index[s]))])
    k = SkewHom(LY, LX, tuple(hbar))
    # S(L(X)) -> S(L(Y)), conjugated by the units x ↦ N_x
    spec_map = dual_of_proper_hom(k)
    bx, by = unit_poset(E.base), unit_poset(F.base)
    back = {v: y for y, v in enumerate(by.map)}
    fmap = tuple(back[spec_map(bx(x))] for x in range(E.m))
    fibers = []
    for x, y in enumerate(fmap):
        row = []
        for e in range(F.stalks[y]):
            s = next(t for t in sections_over(F, F.base.down[y]) if t.values[y] == e)
            row.append(E_alg.section_of(h(F_alg.index[s])).values[x])
        fibers.append(tuple(row))
    mor = SheafMorphism(E, F, fmap, tuple(fibers))
    if star_of_morphism(mor, E_alg, F_alg) != h:
        raise InternalCheckFailed("recovered morphism does not reproduce h")
    return mor
