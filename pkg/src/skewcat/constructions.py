"""Named algebras, products and seeded random instances."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .algebra import (
    FiniteSkewLattice,
    SkewHom,
    Verdict,
    compose,
    d_relation,
    is_homomorphism,
    is_left_handed,
    is_right_handed,
    l_relation,
    quotient,
    r_relation,
    validate,
)
from .bundles import Bundle
from .errors import InternalCheckFailed, SizeOverflow, max_size
from .order import FinitePoset


def primitive_left(k: int) -> FiniteSkewLattice:
    """P_T for |T| = k: elements 0 and t_1..t_k with t∧t' = t, t∨t' = t'."""
    n = k + 1
    meet = np.zeros((n, n), dtype=np.int64)
    join = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            if x == 0 or y == 0:
                meet[x, y] = 0
                join[x, y] = x or y
            else:
                meet[x, y] = x
                join[x, y] = y
    return FiniteSkewLattice(meet, join, 0)


def primitive_right(k: int) -> FiniteSkewLattice:
    """Q_T, the mirror image: t∧t' = t', t∨t' = t."""
    P = primitive_left(k)
    return FiniteSkewLattice(P.meet.T, P.join.T, 0)


def _partial_maps(x_size: int, y_size: int) -> list[tuple[int, ...]]:
    maps = list(product(range(-1, y_size), repeat=x_size))
    return sorted(maps, key=lambda f: (sum(1 << i for i, v in enumerate(f) if v >= 0), f))


def partial_function_algebra(x_size: int, y_size: int, *, cap: int | None = None) -> FiniteSkewLattice:
    """All partial maps {0..x_size-1} -> {0..y_size-1} under restriction and override.

    f∧g is f restricted to dom f ∩ dom g; f∨g takes g's value where g is
    defined and f's elsewhere.  The empty map is the zero (element 0).
    """
    count = (y_size + 1) ** x_size
    if count > max_size(cap):
        raise SizeOverflow(f"{count} partial functions exceeds the cap")
    maps = _partial_maps(x_size, y_size)
    pos = {f: i for i, f in enumerate(maps)}
    meet = [[pos[tuple(a if b >= 0 else -1 for a, b in zip(f, g))] for g in maps] for f in maps]
    join = [[pos[tuple(b if b >= 0 else a for a, b in zip(f, g))] for g in maps] for f in maps]
    return FiniteSkewLattice(meet, join, pos[(-1,) * x_size])


def partial_function_of(x_size: int, y_size: int, index: int) -> tuple[int, ...]:
    """The partial map (with -1 for undefined) sitting at ``index``."""
    return _partial_maps(x_size, y_size)[index]


def partial_function_index(x_size: int, y_size: int, f) -> int:
    return _partial_maps(x_size, y_size).index(tuple(f))


def generated_subalgebra(
    A: FiniteSkewLattice, gens, *, cap: int | None = None
) -> tuple[FiniteSkewLattice, SkewHom]:
    """Closure of gens ∪ {0} under ∧ and ∨, with its inclusion into A.

    Subalgebra elements keep the relative order of their indices in A.
    """
    limit = max_size(cap)
    elems = {A.zero} | {int(g) for g in gens}
    frontier = list(elems)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(elems):
                for c in (A.m(a, b), A.m(b, a), A.j(a, b), A.j(b, a)):
                    if c not in elems and c not in new:
                        new.add(c)
        elems |= new
        if len(elems) > limit:
            raise SizeOverflow(f"closure exceeds {limit} elements")
        frontier = list(new)
    members = sorted(elems)
    pos = {a: i for i, a in enumerate(members)}
    r = np.array(members)
    to_sub = np.vectorize(pos.__getitem__, otypes=[np.int64])
    sub = FiniteSkewLattice(to_sub(A.meet[np.ix_(r, r)]), to_sub(A.join[np.ix_(r, r)]), pos[A.zero])
    inc = SkewHom(sub, A, tuple(members))
    if not is_homomorphism(inc, sub, A):
        raise InternalCheckFailed("inclusion of the closure is not a homomorphism")
    return sub, inc


def direct_product(A: FiniteSkewLattice, B: FiniteSkewLattice) -> FiniteSkewLattice:
    """A × B with (a, b) stored at index a * |B| + b."""
    nb = B.n
    idx = np.arange(A.n * nb)
    a, b = idx // nb, idx % nb
    meet = A.meet[a[:, None], a[None, :]] * nb + B.meet[b[:, None], b[None, :]]
    join = A.join[a[:, None], a[None, :]] * nb + B.join[b[:, None], b[None, :]]
    return FiniteSkewLattice(meet, join, A.zero * nb + B.zero)


def fiber_product(f: SkewHom, g: SkewHom) -> tuple[FiniteSkewLattice, list[tuple[int, int]]]:
    """{(a, b) : f(a) = g(b)} over a common target; also returns the pairs."""
    if f.target != g.target:
        raise ValueError("maps must share a target")
    pairs = [(a, b) for a in range(f.source.n) for b in range(g.source.n) if f(a) == g(b)]
    pos = {p: i for i, p in enumerate(pairs)}
    A, B = f.source, g.source
    meet = [[pos[(A.m(a, c), B.m(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    join = [[pos[(A.j(a, c), B.j(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    return FiniteSkewLattice(meet, join, pos[(A.zero, B.zero)]), pairs


def fiber_product_over_2(A: FiniteSkewLattice, B: FiniteSkewLattice) -> FiniteSkewLattice:
    """Fiber product of two primitive algebras over their common reflection 2.

    Pairs are matched D-class by D-class: (0, 0) plus every pair of nonzero
    elements.
    """
    from .algebra import TWO

    def to_two(S):
        return SkewHom(S, TWO, tuple(0 if x == S.zero else 1 for x in range(S.n)))

    for S in (A, B):
        if len(d_relation(S)) > 2:
            raise ValueError("expected a primitive algebra")
    return fiber_product(to_two(A), to_two(B))[0]


def check_second_decomposition(S: FiniteSkewLattice) -> Verdict:
    """S -> S/R ×_{S/D} S/L is a bijective homomorphism.

    Also checks S/R is left-handed and S/L right-handed.  The witness names
    the failing part.
    """
    D, L, R = d_relation(S), l_relation(S), r_relation(S)
    SR, pr = quotient(S, R)
    SL, pl = quotient(S, L)
    SD, pd = quotient(S, D)
    if not is_left_handed(SR):
        return Verdict(False, ("S/R not left-handed",))
    if not is_right_handed(SL):
        return Verdict(False, ("S/L not right-handed",))
    # both legs down to S/D: S/R -> S/D and S/L -> S/D are induced by D ⊇ R, L
    r_to_d = [None] * SR.n
    l_to_d = [None] * SL.n
    for x in range(S.n):
        r_to_d[pr(x)] = pd(x)
        l_to_d[pl(x)] = pd(x)
    leg_r = SkewHom(SR, SD, tuple(r_to_d))
    leg_l = SkewHom(SL, SD, tuple(l_to_d))
    if not (is_homomorphism(leg_r, SR, SD) and is_homomorphism(leg_l, SL, SD)):
        return Verdict(False, ("legs are not homomorphisms",))
    P, pairs = fiber_product(leg_r, leg_l)
    pos = {p: i for i, p in enumerate(pairs)}
    canon = []
    for x in range(S.n):
        key = (pr(x), pl(x))
        if key not in pos:
            return Verdict(False, ("image outside the pullback", x))
        canon.append(pos[key])
    h = SkewHom(S, P, tuple(canon))
    if not h.is_injective():
        return Verdict(False, ("not injective",))
    if not h.is_surjective():
        return Verdict(False, ("not surjective",))
    if not is_homomorphism(h, S, P):
        return Verdict(False, ("not a homomorphism",))
    return Verdict(True)


# -- random instances -------------------------------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_base_points: int = 3
    max_stalk: int = 2
    max_generators: int = 4
    max_closure_size: int = 40

    def __post_init__(self):
        for name in ("max_base_points", "max_stalk", "max_generators", "max_closure_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_json(cls, obj: dict) -> "GeneratorConfig":
        return cls(seed=int(obj.get("seed", 0)), **{k: int(v) for k, v in obj.get("caps", {}).items()})

    def to_json(self) -> dict:
        caps = {k: getattr(self, k) for k in ("max_base_points", "max_stalk", "max_generators", "max_closure_size")}
        return {"seed": self.seed, "caps": caps}

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed))

    def spawn(self, count: int) -> list["GeneratorConfig"]:
        """Independent child configs, one per batch item."""
        children = np.random.SeedSequence(self.seed).spawn(count)
        return [
            GeneratorConfig(int(c.generate_state(2, np.uint64)[0] >> np.uint64(1)), self.max_base_points,
                            self.max_stalk, self.max_generators, self.max_closure_size)
            for c in children
        ]


def random_poset(cfg: GeneratorConfig, rng: np.random.Generator | None = None) -> FinitePoset:
    rng = rng if rng is not None else cfg.rng()
    m = int(rng.integers(1, cfg.max_base_points + 1))
    covers = [(i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < 0.5]
    X = FinitePoset.from_covers(m, covers)
    perm = rng.permutation(m)
    inv = np.argsort(perm)
    return FinitePoset(tuple(tuple(X.leq[inv[i]][inv[j]] for j in range(m)) for i in range(m)))


def random_bundle(cfg: GeneratorConfig, rng: np.random.Generator | None = None) -> Bundle:
    rng = rng if rng is not None else cfg.rng()
    X = random_poset(cfg, rng)
    stalks = tuple(int(k) for k in rng.integers(1, cfg.max_stalk + 1, size=X.n))
    return Bundle(X, stalks)


def random_lhsd_algebra(cfg: GeneratorConfig, rng: np.random.Generator | None = None, *, attempts: int = 50) -> FiniteSkewLattice:
    """A random subalgebra of the section algebra of a random bundle.

    Output is re-validated and re-checked to be left-handed strongly
    distributive.
    """
    from .algebra import is_strongly_distributive
    from .duality import star_of_bundle

    rng = rng if rng is not None else cfg.rng()
    for _ in range(attempts):
        B = random_bundle(cfg, rng)
        A = star_of_bundle(B).algebra
        nonzero = [a for a in range(A.n) if a != A.zero]
        k = int(rng.integers(min(2, cfg.max_generators), cfg.max_generators + 1))
        gens = rng.choice(nonzero, size=min(k, len(nonzero)), replace=False) if nonzero else []
        try:
            S, _ = generated_subalgebra(A, gens, cap=cfg.max_closure_size)
        except SizeOverflow:
            continue
        validate(S)
        if not (is_left_handed(S) and is_strongly_distributive(S)):
            raise InternalCheckFailed("subalgebra of a section algebra is not LH-SD")
        return S
    raise SizeOverflow(f"no closure within {cfg.max_closure_size} elements after {attempts} draws")


def random_lhsd_algebras(cfg: GeneratorConfig, count: int) -> list[FiniteSkewLattice]:
    return [random_lhsd_algebra(c) for c in cfg.spawn(count)]


def _mixed_factor(rng: np.random.Generator) -> FiniteSkewLattice:
    kind = int(rng.integers(0, 3))
    j, k = (int(v) for v in rng.integers(1, 4, size=2))
    if kind == 0:
        return primitive_left(j)
    if kind == 1:
        return primitive_right(k)
    return fiber_product_over_2(primitive_left(j), primitive_right(k))


def random_mixed_algebra(cfg: GeneratorConfig, rng: np.random.Generator | None = None, *, limit: int = 60) -> FiniteSkewLattice:
    """A product of primitive factors (left, right or mixed), at most ``limit`` elements,
    optionally cut down to a random generated subalgebra."""
    rng = rng if rng is not None else cfg.rng()
    S = _mixed_factor(rng)
    while rng.random() < 0.6:
        F = _mixed_factor(rng)
        if S.n * F.n > limit:
            break
        S = direct_product(S, F)
    if rng.random() < 0.5 and S.n > 2:
        gens = rng.choice(S.n, size=int(rng.integers(1, 4)), replace=True)
        S, _ = generated_subalgebra(S, gens)
    return S


def embed_into_partial_functions(S: FiniteSkewLattice) -> SkewHom:
    """phi followed by the inclusion of sections into partial maps from the dual
    base to the disjoint union of the stalks."""
    from .duality import represent

    rep = represent(S)
    stalks = rep.dual.bundle.stalks
    offsets = np.concatenate([[0], np.cumsum(stalks)]).astype(int)
    x_size, y_size = len(stalks), int(offsets[-1])
    P = partial_function_algebra(x_size, y_size)
    index = {f: i for i, f in enumerate(_partial_maps(x_size, y_size))}
    images = []
    for e in rep.sections.sections:
        f = tuple(v + int(offsets[x]) if v >= 0 else -1 for x, v in enumerate(e.values))
        images.append(index[f])
    inc = SkewHom(rep.sections.algebra, P, tuple(images))
    emb = compose(inc, rep.phi)
    if not (is_homomorphism(emb, S, P) and emb.is_injective()):
        raise InternalCheckFailed("embedding into partial functions failed")
    return emb
