"""Finite posets, finite distributive lattices and their duality.

A finite poset carries the discrete topology, so every downset is a clopen
(and compact open) downset and every monotone map is a morphism of local
Priestley spaces.  Downsets are bitmasks over the points (bit x = point x),
and downset lattices list their elements by increasing mask.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import permutations, product
from typing import Iterator, Sequence

import numpy as np

from .algebra import (
    FiniteSkewLattice,
    SkewHom,
    find_violation,
    is_homomorphism,
    is_proper,
    lattice_top,
)
from .errors import (
    InternalCheckFailed,
    NotALattice,
    NotAPoset,
    NotDistributive,
    NotMonotone,
    NotProper,
    SizeOverflow,
    TableError,
    max_size,
)


def bits(mask: int) -> list[int]:
    """Points contained in a bitmask, ascending."""
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return out


def mask_of(points) -> int:
    m = 0
    for x in points:
        m |= 1 << x
    return m


# -- lattices ---------------------------------------------------------------

def distributivity_witness(L: FiniteSkewLattice):
    """(x, y, z) with x∧(y∨z) != (x∧y)∨(x∧z), or None."""
    M, J = L.meet, L.join
    X = np.arange(L.n)[:, None, None]
    bad = np.argwhere(M[X, J[None, :, :]] != J[M[:, :, None], M[:, None, :]])
    return tuple(int(v) for v in bad[0]) if len(bad) else None


class FiniteDistLattice(FiniteSkewLattice):
    """A finite distributive lattice with zero; construction checks the laws."""

    def __post_init__(self):
        super().__post_init__()
        err = find_violation(self)
        if err is not None:
            raise err
        bad = np.argwhere((self.meet != self.meet.T) | (self.join != self.join.T))
        if len(bad):
            raise NotALattice(*bad[0])
        w = distributivity_witness(self)
        if w is not None:
            raise NotDistributive(*w)

    @cached_property
    def top(self) -> int:
        return lattice_top(self)


def join_irreducibles(D: FiniteSkewLattice) -> list[int]:
    """Nonzero j such that j = a ∨ b forces j ∈ {a, b}."""
    J = D.join
    ar = np.arange(D.n)
    out = []
    for j in range(D.n):
        if j == D.zero:
            continue
        others = ar != j
        if not ((J == j) & others[:, None] & others[None, :]).any():
            out.append(j)
    return out


@dataclass(frozen=True)
class PrimeFilter:
    members: frozenset
    generator: int

    def __contains__(self, a: int) -> bool:
        return a in self.members


def prime_filters(D: FiniteSkewLattice) -> list[PrimeFilter]:
    """Principal upsets of the join-irreducibles, ordered by generator."""
    return [
        PrimeFilter(frozenset(int(a) for a in np.flatnonzero(D.leq[j, :])), j)
        for j in join_irreducibles(D)
    ]


def prime_filters_brute_force(D: FiniteSkewLattice) -> list[frozenset]:
    """Scan every subset of D for the prime filter conditions."""
    n = D.n
    if n > 20:
        raise SizeOverflow(f"refusing to scan 2^{n} subsets")
    codes = np.arange(2 ** n, dtype=np.int64)
    F = ((codes[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    ok = F.any(axis=1) & ~F.all(axis=1)
    leq = D.leq
    for x in range(n):
        for y in range(n):
            if leq[x, y]:
                ok &= ~F[:, x] | F[:, y]
            ok &= ~(F[:, x] & F[:, y]) | F[:, D.meet[x, y]]
            ok &= ~F[:, D.join[x, y]] | F[:, x] | F[:, y]
    return sorted(
        (frozenset(int(a) for a in np.flatnonzero(row)) for row in F[ok]),
        key=sorted,
    )


# -- posets -----------------------------------------------------------------

def _poset_violation(leq: np.ndarray):
    n = leq.shape[0]
    for x in range(n):
        if not leq[x, x]:
            return ("reflexivity", (x,))
    bad = np.argwhere(leq & leq.T & ~np.eye(n, dtype=bool))
    if len(bad):
        return ("antisymmetry", tuple(int(v) for v in bad[0]))
    li = leq.astype(np.int64)
    bad = np.argwhere(((li @ li) > 0) & ~leq)
    if len(bad):
        x, z = (int(v) for v in bad[0])
        y = int(np.flatnonzero(leq[x] & leq[:, z])[0])
        return ("transitivity", (x, y, z))
    return None


@dataclass(frozen=True)
class FinitePoset:
    """Points ``0..n-1`` with ``leq[x][y]`` meaning x ≤ y."""

    leq: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        arr = np.array(self.leq, dtype=bool).reshape(len(self.leq), -1) if len(self.leq) else np.zeros((0, 0), bool)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise TableError(f"leq must be square, got shape {arr.shape}")
        bad = _poset_violation(arr)
        if bad is not None:
            law, w = bad
            err = NotAPoset(*w, op=law)
            raise err
        object.__setattr__(self, "leq", tuple(tuple(bool(v) for v in row) for row in arr))

    @classmethod
    def from_covers(cls, n: int, covers: Sequence[tuple[int, int]]) -> "FinitePoset":
        """Reflexive-transitive closure of the pairs (lower, upper)."""
        rel = np.eye(n, dtype=bool)
        for a, b in covers:
            rel[a, b] = True
        for k in range(n):
            rel |= rel[:, k : k + 1] & rel[k : k + 1, :]
        return cls(tuple(map(tuple, rel)))

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls.from_covers(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def antichain(cls, n: int) -> "FinitePoset":
        return cls.from_covers(n, [])

    @property
    def n(self) -> int:
        return len(self.leq)

    def __len__(self) -> int:
        return self.n

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]

    @cached_property
    def matrix(self) -> np.ndarray:
        arr = np.array(self.leq, dtype=bool).reshape(self.n, self.n)
        arr.flags.writeable = False
        return arr

    @cached_property
    def down(self) -> tuple[int, ...]:
        """Principal downset of each point, as a mask."""
        return tuple(mask_of(y for y in range(self.n) if self.leq[y][x]) for x in range(self.n))

    @cached_property
    def up(self) -> tuple[int, ...]:
        return tuple(mask_of(y for y in range(self.n) if self.leq[x][y]) for x in range(self.n))

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def is_downset(self, mask: int) -> bool:
        return all(self.down[x] & ~mask == 0 for x in bits(mask))

    def down_closure(self, mask: int) -> int:
        out = 0
        for x in bits(mask):
            out |= self.down[x]
        return out

    def linear_extension(self) -> list[int]:
        return sorted(range(self.n), key=lambda x: bin(self.down[x]).count("1"))

    def downsets(self, cap: int | None = None) -> list[int]:
        """All downsets as masks, ascending.  Raises SizeOverflow beyond ``cap``."""
        limit = max_size(cap)
        if self.n < 63 and 2 ** self.n <= limit:
            limit = 2 ** self.n
        order = self.linear_extension()
        found: list[int] = []

        def grow(i: int, mask: int):
            if i == len(order):
                found.append(mask)
                if len(found) > limit:
                    raise SizeOverflow(f"more than {limit} downsets")
                return
            x = order[i]
            grow(i + 1, mask)
            if self.down[x] & ~mask == (1 << x):
                grow(i + 1, mask | (1 << x))

        grow(0, 0)
        return sorted(found)

    def covers(self) -> list[tuple[int, int]]:
        """Hasse edges (x, y): x < y with nothing strictly between."""
        out = []
        for x in range(self.n):
            for y in range(self.n):
                if x != y and self.leq[x][y]:
                    if not any(z not in (x, y) and self.leq[x][z] and self.leq[z][y] for z in range(self.n)):
                        out.append((x, y))
        return out

    def canonical_form(self) -> tuple:
        """Lexicographically least relabelled leq matrix (isomorphism invariant)."""
        best = None
        for perm in permutations(range(self.n)):
            cand = tuple(tuple(self.leq[perm[i]][perm[j]] for j in range(self.n)) for i in range(self.n))
            if best is None or cand < best:
                best = cand
        return best

    def to_json(self) -> dict:
        return {"points": self.n, "leq": [list(row) for row in self.leq]}


def iter_posets(n: int, *, labeled: bool = False) -> Iterator[FinitePoset]:
    """Posets on n points: all labelled ones, or one per isomorphism class."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    for choice in product((False, True), repeat=len(pairs)):
        rel = np.eye(n, dtype=bool)
        for (i, j), on in zip(pairs, choice):
            rel[i, j] = on
        li = rel.astype(int)
        if (((li @ li) > 0) & ~rel).any():
            continue
        base = FinitePoset(tuple(map(tuple, rel)))
        if labeled:
            variants = {
                tuple(tuple(base.leq[p.index(i)][p.index(j)] for j in range(n)) for i in range(n))
                for p in permutations(range(n))
            }
            for v in sorted(variants):
                if v not in seen:
                    seen.add(v)
                    yield FinitePoset(v)
        else:
            key = base.canonical_form()
            if key not in seen:
                seen.add(key)
                yield FinitePoset(key)


# -- monotone maps ----------------------------------------------------------

@dataclass(frozen=True)
class MonotoneMap:
    source: FinitePoset
    target: FinitePoset
    map: tuple[int, ...]

    def __post_init__(self):
        mp = tuple(int(v) for v in self.map)
        if len(mp) != self.source.n or any(not 0 <= v < self.target.n for v in mp):
            raise TableError(f"map {list(mp)} does not send {self.source.n} points into {self.target.n}")
        for x in range(self.source.n):
            for y in range(self.source.n):
                if self.source.leq[x][y] and not self.target.leq[mp[x]][mp[y]]:
                    raise NotMonotone(f"{x} ≤ {y} but f({x}) = {mp[x]} is not ≤ f({y}) = {mp[y]}")
        object.__setattr__(self, "map", mp)

    def __call__(self, x: int) -> int:
        return self.map[x]

    def preimage(self, mask: int) -> int:
        return mask_of(x for x, y in enumerate(self.map) if mask >> y & 1)

    def is_order_isomorphism(self) -> bool:
        if sorted(self.map) != list(range(self.target.n)):
            return False
        return all(
            self.source.leq[x][y] == self.target.leq[self.map[x]][self.map[y]]
            for x in range(self.source.n)
            for y in range(self.source.n)
        )


def compose_monotone(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    """g ∘ f."""
    return MonotoneMap(f.source, g.target, tuple(g.map[v] for v in f.map))


def identity_map(X: FinitePoset) -> MonotoneMap:
    return MonotoneMap(X, X, tuple(range(X.n)))


def iter_monotone_maps(X: FinitePoset, Y: FinitePoset) -> Iterator[MonotoneMap]:
    for mp in product(range(Y.n), repeat=X.n):
        if all(
            Y.leq[mp[x]][mp[y]] for x in range(X.n) for y in range(X.n) if X.leq[x][y]
        ):
            yield MonotoneMap(X, Y, mp)


# -- the two functors -------------------------------------------------------

def spectrum(D: FiniteSkewLattice, *, cross_check: bool | None = None) -> tuple[FinitePoset, list[PrimeFilter]]:
    """Prime filters of D under reverse inclusion.

    Filters come from join-irreducibles; for |D| ≤ 16 they are compared with
    a brute-force scan of all subsets.
    """
    if cross_check is None:
        cross_check = D.n <= 16
    X, filters = _spectrum(D, bool(cross_check))
    return X, list(filters)


@lru_cache(maxsize=4096)
def _spectrum(D: FiniteSkewLattice, cross_check: bool):
    filters = prime_filters(D)
    if cross_check:
        brute = prime_filters_brute_force(D)
        if sorted(map(sorted, brute)) != sorted(sorted(p.members) for p in filters):
            raise InternalCheckFailed("join-irreducible filters disagree with the subset scan")
    leq = tuple(tuple(p.members >= q.members for q in filters) for p in filters)
    return FinitePoset(leq), tuple(filters)


def downset_lattice(X: FinitePoset, *, cap: int | None = None) -> tuple[FiniteDistLattice, list[int]]:
    """Downsets of X under ∩ and ∪; element i is the i-th smallest mask."""
    D, masks = _downset_lattice(X, max_size(cap))
    return D, list(masks)


@lru_cache(maxsize=4096)
def _downset_lattice(X: FinitePoset, cap: int):
    masks = X.downsets(cap)
    pos = {m: i for i, m in enumerate(masks)}
    meet = [[pos[a & b] for b in masks] for a in masks]
    join = [[pos[a | b] for b in masks] for a in masks]
    return FiniteDistLattice(meet, join, pos[0]), tuple(masks)


def unit_lattice(D: FiniteSkewLattice) -> SkewHom:
    """a ↦ {p : a ∈ p}, verified to be an isomorphism D -> L(S(D))."""
    X, filters = spectrum(D)
    L, masks = downset_lattice(X)
    pos = {m: i for i, m in enumerate(masks)}
    images = []
    for a in range(D.n):
        hat = mask_of(i for i, p in enumerate(filters) if a in p)
        if hat not in pos:
            raise InternalCheckFailed(f"the set of filters containing {a} is not a downset")
        images.append(pos[hat])
    h = SkewHom(D, L, tuple(images))
    if not (is_homomorphism(h, D, L) and h.is_injective() and h.is_surjective()):
        raise InternalCheckFailed("a ↦ â is not a lattice isomorphism")
    return h


def unit_poset(X: FinitePoset) -> MonotoneMap:
    """x ↦ {U : x ∈ U}, verified to be an order isomorphism X -> S(L(X))."""
    L, masks = downset_lattice(X)
    Y, filters = spectrum(L)
    where = {p.members: i for i, p in enumerate(filters)}
    images = []
    for x in range(X.n):
        nbhd = frozenset(i for i, m in enumerate(masks) if m >> x & 1)
        if nbhd not in where:
            raise InternalCheckFailed(f"downsets containing {x} do not form a prime filter")
        images.append(where[nbhd])
    f = MonotoneMap(X, Y, tuple(images))
    if not f.is_order_isomorphism():
        raise InternalCheckFailed("x ↦ N_x is not an order isomorphism")
    return f


def dual_of_monotone(f: MonotoneMap) -> SkewHom:
    """U ↦ f⁻¹(U), a proper hom L(Y) -> L(X)."""
    LY, my = downset_lattice(f.target)
    LX, mx = downset_lattice(f.source)
    pos = {m: i for i, m in enumerate(mx)}
    return SkewHom(LY, LX, tuple(pos[f.preimage(U)] for U in my))


def dual_of_proper_hom(k: SkewHom) -> MonotoneMap:
    """p ↦ k⁻¹(p), a monotone map S(E) -> S(D) for a proper k: D -> E."""
    if not is_homomorphism(k, k.source, k.target):
        raise TableError("not a lattice homomorphism")
    if not is_proper(k):
        raise NotProper("hom does not reach the top of its target")
    XD, fd = spectrum(k.source)
    XE, fe = spectrum(k.target)
    where = {p.members: i for i, p in enumerate(fd)}
    images = []
    for q in fe:
        pre = frozenset(a for a in range(k.source.n) if k(a) in q)
        if pre not in where:
            raise InternalCheckFailed("inverse image of a prime filter is not prime")
        images.append(where[pre])
    return MonotoneMap(XE, XD, tuple(images))


def add_top(X: FinitePoset) -> FinitePoset:
    """X with a new maximum point (index n), the ordered compactification of a finite poset."""
    n = X.n
    rel = np.zeros((n + 1, n + 1), dtype=bool)
    rel[:n, :n] = X.matrix
    rel[:, n] = True
    return FinitePoset(tuple(map(tuple, rel)))


def extend_to_top(f: MonotoneMap) -> MonotoneMap:
    """Extend f by ∗ ↦ ∗ between the compactifications."""
    return MonotoneMap(add_top(f.source), add_top(f.target), f.map + (f.target.n,))


def is_lps_morphism(fhat: MonotoneMap) -> bool:
    """Monotone on the compactifications with f⁻¹(∗) = {∗} (∗ the last point)."""
    star_s, star_t = fhat.source.n - 1, fhat.target.n - 1
    return [x for x, y in enumerate(fhat.map) if y == star_t] == [star_s]


# -- DOT export -------------------------------------------------------------

def hasse_dot(X: FinitePoset, labels: Sequence[str] | None = None, name: str = "poset") -> str:
    labels = labels or [str(x) for x in range(X.n)]
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for x in range(X.n):
        lines.append(f'  n{x} [label="{labels[x]}"];')
    for a, b in X.covers():
        lines.append(f"  n{a} -> n{b} [arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def natural_order_poset(S: FiniteSkewLattice) -> FinitePoset:
    return FinitePoset(tuple(map(tuple, S.leq)))
