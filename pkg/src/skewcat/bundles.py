"""Finite étalé bundles over finite posets and their sections.

Over a finite discrete base every surjection is a local homeomorphism, so a
bundle is just a poset plus a stalk size per point, and the germ of a
section at x is its value at x.  Sections live over downsets.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .errors import IncompatibleFamily, NotSubdownset, SizeOverflow, TableError, max_size
from .order import FinitePoset, MonotoneMap, bits, iter_monotone_maps, mask_of

UNDEFINED = -1


@dataclass(frozen=True)
class Bundle:
    base: FinitePoset
    stalks: tuple[int, ...]

    def __post_init__(self):
        stalks = tuple(int(k) for k in self.stalks)
        if len(stalks) != self.base.n:
            raise TableError(f"{len(stalks)} stalk sizes for {self.base.n} base points")
        for x, k in enumerate(stalks):
            if k < 1:
                raise TableError(f"stalk over point {x} is empty")
        object.__setattr__(self, "stalks", stalks)

    @property
    def m(self) -> int:
        return self.base.n

    def section_count(self, U: int | None = None) -> int:
        """Σ over downsets of ∏ stalk sizes (or ∏ over U alone)."""
        if U is not None:
            out = 1
            for x in bits(U):
                out *= self.stalks[x]
            return out
        return sum(self.section_count(V) for V in self.base.downsets())

    def to_json(self) -> dict:
        return {"poset": self.base.to_json(), "stalks": list(self.stalks)}


@dataclass(frozen=True)
class Section:
    """A choice of stalk element over each point of a downset.

    ``values[x]`` is the chosen element, or -1 where x is outside the domain.
    """

    values: tuple[int, ...]

    @property
    def domain(self) -> int:
        return mask_of(x for x, v in enumerate(self.values) if v != UNDEFINED)

    def __call__(self, x: int) -> int:
        v = self.values[x]
        if v == UNDEFINED:
            raise KeyError(f"point {x} is not in the domain")
        return v

    def defined_at(self, x: int) -> bool:
        return self.values[x] != UNDEFINED

    def to_json(self) -> dict:
        dom = bits(self.domain)
        return {"domain": dom, "values": {str(x): self.values[x] for x in dom}}

    @classmethod
    def empty(cls, m: int) -> "Section":
        return cls((UNDEFINED,) * m)


def is_section_of(B: Bundle, s: Section) -> bool:
    return (
        len(s.values) == B.m
        and B.base.is_downset(s.domain)
        and all(v == UNDEFINED or 0 <= v < B.stalks[x] for x, v in enumerate(s.values))
    )


def sections_over(B: Bundle, U: int, *, cap: int | None = None) -> list[Section]:
    """Every section over the downset U, in lexicographic order of values."""
    if not B.base.is_downset(U):
        raise NotSubdownset(f"{bits(U)} is not a downset")
    limit = max_size(cap)
    if B.section_count(U) > limit:
        raise SizeOverflow(f"{B.section_count(U)} sections over {bits(U)} exceeds {limit}")
    pts = bits(U)
    out = []
    for choice in product(*(range(B.stalks[x]) for x in pts)):
        vals = [UNDEFINED] * B.m
        for x, v in zip(pts, choice):
            vals[x] = v
        out.append(Section(tuple(vals)))
    return out


def all_sections(B: Bundle, *, cap: int | None = None) -> list[Section]:
    """Sections over every downset, grouped by increasing domain mask."""
    limit = max_size(cap)
    total = B.section_count()
    if total > limit:
        raise SizeOverflow(f"{total} sections exceeds {limit}")
    out: list[Section] = []
    for U in B.base.downsets(cap):
        out.extend(sections_over(B, U, cap=cap))
    return out


def restrict(s: Section, U: int, base: FinitePoset | None = None) -> Section:
    if U & ~s.domain:
        raise NotSubdownset(f"{bits(U)} is not inside the domain {bits(s.domain)}")
    if base is not None and not base.is_downset(U):
        raise NotSubdownset(f"{bits(U)} is not a downset")
    return Section(tuple(v if U >> x & 1 else UNDEFINED for x, v in enumerate(s.values)))


def patch(family: Sequence[Section], m: int | None = None) -> Section:
    """Glue a pairwise compatible family into the unique section on the union."""
    if not family:
        if m is None:
            raise ValueError("patching the empty family needs the base size m")
        return Section.empty(m)
    size = len(family[0].values)
    vals = [UNDEFINED] * size
    owner = [-1] * size
    for i, s in enumerate(family):
        for x, v in enumerate(s.values):
            if v == UNDEFINED:
                continue
            if vals[x] == UNDEFINED:
                vals[x], owner[x] = v, i
            elif vals[x] != v:
                raise IncompatibleFamily(owner[x], i, x)
    return Section(tuple(vals))


def override(a: Section, b: Section) -> Section:
    """b where b is defined, a elsewhere."""
    return Section(tuple(vb if vb != UNDEFINED else va for va, vb in zip(a.values, b.values)))


def restriction(a: Section, b: Section) -> Section:
    """a on dom(a) ∩ dom(b)."""
    return Section(tuple(va if vb != UNDEFINED else UNDEFINED for va, vb in zip(a.values, b.values)))


class DirectImage:
    """The presheaf V ↦ E(f⁻¹(V)) on downsets of the codomain of f."""

    def __init__(self, bundle: Bundle, f: MonotoneMap):
        if f.source != bundle.base:
            raise ValueError("f must start at the base of the bundle")
        self.bundle = bundle
        self.f = f

    def __call__(self, V: int) -> list[Section]:
        if not self.f.target.is_downset(V):
            raise NotSubdownset(f"{bits(V)} is not a downset")
        return sections_over(self.bundle, self.f.preimage(V))

    def restrict(self, s: Section, V: int) -> Section:
        return restrict(s, self.f.preimage(V))

    def check_sheaf_condition(self) -> bool:
        """Gluing is a bijection for the empty cover and every two-piece cover."""
        if len(self(0)) != 1:
            return False
        downs = self.f.target.downsets()
        for V1 in downs:
            for V2 in downs:
                V = V1 | V2
                glued = {}
                for s in self(V):
                    glued[(self.restrict(s, V1), self.restrict(s, V2))] = s
                pairs = [
                    (a, b)
                    for a in self(V1)
                    for b in self(V2)
                    if self.restrict(a, V1 & V2) == self.restrict(b, V1 & V2)
                ]
                if sorted(glued, key=repr) != sorted(pairs, key=repr):
                    return False
                for a, b in pairs:
                    if patch([a, b]) != glued[(a, b)]:
                        return False
        return True


def direct_image(B: Bundle, f: MonotoneMap) -> DirectImage:
    return DirectImage(B, f)


# -- morphisms --------------------------------------------------------------

@dataclass(frozen=True)
class SheafMorphism:
    """(f, λ) from E over X to F over Y, stored fiberwise.

    ``fiber_maps[x]`` maps the stalk F_{f(x)} into the stalk E_x; the component
    λ_V is recovered by :func:`to_natural_transformation`.
    """

    source: Bundle
    target: Bundle
    base_map: tuple[int, ...]
    fiber_maps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        f = MonotoneMap(self.source.base, self.target.base, tuple(self.base_map))
        fibers = tuple(tuple(int(v) for v in fm) for fm in self.fiber_maps)
        if len(fibers) != self.source.m:
            raise TableError(f"{len(fibers)} fiber maps for {self.source.m} points")
        for x, fm in enumerate(fibers):
            if len(fm) != self.target.stalks[f(x)]:
                raise TableError(f"fiber map at {x} has {len(fm)} entries, expected {self.target.stalks[f(x)]}")
            if any(not 0 <= v < self.source.stalks[x] for v in fm):
                raise TableError(f"fiber map at {x} leaves the stalk over {x}")
        object.__setattr__(self, "base_map", f.map)
        object.__setattr__(self, "fiber_maps", fibers)

    @property
    def f(self) -> MonotoneMap:
        return MonotoneMap(self.source.base, self.target.base, self.base_map)

    def apply(self, s: Section) -> Section:
        """λ_V(s) for a section s of the target over V."""
        vals = []
        for x, y in enumerate(self.base_map):
            v = s.values[y]
            vals.append(UNDEFINED if v == UNDEFINED else self.fiber_maps[x][v])
        return Section(tuple(vals))

    def to_json(self) -> dict:
        return {"base_map": list(self.base_map), "fiber_maps": [list(fm) for fm in self.fiber_maps]}


def identity_morphism(B: Bundle) -> SheafMorphism:
    return SheafMorphism(B, B, tuple(range(B.m)), tuple(tuple(range(k)) for k in B.stalks))


def compose_morphisms(first: SheafMorphism, second: SheafMorphism) -> SheafMorphism:
    """(g, μ) ∘ (f, λ) = (g f, σ) with σ_U = λ_{g⁻¹ U} ∘ μ_U."""
    if first.target != second.source:
        raise ValueError("morphisms are not composable")
    base = tuple(second.base_map[y] for y in first.base_map)
    fibers = tuple(
        tuple(first.fiber_maps[x][second.fiber_maps[y][e]] for e in range(second.target.stalks[second.base_map[y]]))
        for x, y in enumerate(first.base_map)
    )
    return SheafMorphism(first.source, second.target, base, fibers)


def to_natural_transformation(m: SheafMorphism) -> dict[int, dict[Section, Section]]:
    """Components λ_V : F(V) -> E(f⁻¹(V)) for every downset V of the target base."""
    return {V: {s: m.apply(s) for s in sections_over(m.target, V)} for V in m.target.base.downsets()}


def is_natural(E: Bundle, F: Bundle, f: MonotoneMap, components: dict[int, dict[Section, Section]]) -> bool:
    """Every component lands in E(f⁻¹V) and commutes with restriction along V' ⊆ V."""
    for V, comp in components.items():
        pre = f.preimage(V)
        if any(t.domain != pre for t in comp.values()):
            return False
    for V, comp in components.items():
        for V2, comp2 in components.items():
            if V2 & ~V:
                continue
            pre2 = f.preimage(V2)
            for s, t in comp.items():
                if restrict(t, pre2) != comp2[restrict(s, V2)]:
                    return False
    return True


def from_natural_transformation(
    E: Bundle, F: Bundle, f: MonotoneMap, components: dict[int, dict[Section, Section]]
) -> SheafMorphism:
    """Read the fiber maps off λ at the principal downsets ↓f(x)."""
    fibers = []
    for x, y in enumerate(f.map):
        V = F.base.down[y]
        row = []
        for e in range(F.stalks[y]):
            s = next(s for s in sections_over(F, V) if s.values[y] == e)
            row.append(components[V][s].values[x])
        fibers.append(tuple(row))
    return SheafMorphism(E, F, f.map, tuple(fibers))


def enumerate_sheaf_morphisms(E: Bundle, F: Bundle, *, cap: int | None = None) -> list[SheafMorphism]:
    """All (monotone f, fiber maps F_{f(x)} -> E_x) from E to F."""
    limit = max_size(cap)
    out = []
    for f in iter_monotone_maps(E.base, F.base):
        choices = [list(product(range(E.stalks[x]), repeat=F.stalks[y])) for x, y in enumerate(f.map)]
        count = 1
        for c in choices:
            count *= len(c)
        if len(out) + count > limit:
            raise SizeOverflow(f"more than {limit} sheaf morphisms")
        for fibers in product(*choices):
            out.append(SheafMorphism(E, F, f.map, fibers))
    return out


def iter_bundles(max_points: int, max_stalk: int, *, labeled: bool = True) -> Iterator[Bundle]:
    """Every bundle with at most ``max_points`` base points and stalks ≤ ``max_stalk``."""
    from .order import iter_posets

    for m in range(max_points + 1):
        for X in iter_posets(m, labeled=labeled):
            for stalks in product(range(1, max_stalk + 1), repeat=m):
                yield Bundle(X, stalks)

