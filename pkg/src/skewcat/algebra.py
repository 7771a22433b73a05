"""Finite skew lattices with zero, stored as dense operation tables.

Elements are the integers ``0..n-1``.  Every derived object (congruence,
quotient, homomorphism) uses the same integer indexing so results compare
exactly and hash cheaply.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    AbsorptionFails,
    InternalCheckFailed,
    InternalCompatibilityViolation,
    LawViolation,
    NotACongruence,
    NotAssociative,
    NotDistributiveReflection,
    NotIdempotent,
    PreconditionUnmet,
    SizeOverflow,
    TableError,
    ZeroLawFails,
    max_size,
)


def _table(data, name: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise TableError(f"{name}: not an integer table ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise TableError(f"{name}: expected a square table, got shape {arr.shape}")
    n = arr.shape[0]
    bad = np.argwhere((arr < 0) | (arr >= n))
    if len(bad):
        i, j = bad[0]
        raise TableError(f"{name}[{i}][{j}] = {arr[i, j]} is out of range 0..{n - 1}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FiniteSkewLattice:
    """Operation tables of an algebra (S, meet, join, zero).

    Construction only checks shapes and ranges; use :func:`validate` to
    check the skew lattice axioms.
    """

    meet: np.ndarray
    join: np.ndarray
    zero: int = 0

    def __post_init__(self):
        meet = _table(self.meet, "meet")
        join = _table(self.join, "join")
        if meet.shape != join.shape:
            raise TableError(f"meet is {meet.shape} but join is {join.shape}")
        if meet.shape[0] == 0:
            raise TableError("an algebra needs at least the zero element")
        if not 0 <= int(self.zero) < meet.shape[0]:
            raise TableError(f"zero = {self.zero} is out of range")
        object.__setattr__(self, "meet", meet)
        object.__setattr__(self, "join", join)
        object.__setattr__(self, "zero", int(self.zero))

    @property
    def n(self) -> int:
        return self.meet.shape[0]

    def __len__(self) -> int:
        return self.n

    def m(self, x: int, y: int) -> int:
        return int(self.meet[x, y])

    def j(self, x: int, y: int) -> int:
        return int(self.join[x, y])

    def meet_all(self, xs: Sequence[int]) -> int:
        return reduce(self.m, xs)

    def join_all(self, xs: Sequence[int]) -> int:
        return reduce(self.j, xs, self.zero)

    def _key(self):
        return (self.n, self.zero, self.meet.tobytes(), self.join.tobytes())

    def __eq__(self, other):
        if not isinstance(other, FiniteSkewLattice):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, zero={self.zero})"

    @cached_property
    def leq(self) -> np.ndarray:
        """Natural partial order: ``leq[x, y]`` iff x∧y = x = y∧x."""
        ar = np.arange(self.n)
        out = (self.meet == ar[:, None]) & (self.meet.T == ar[:, None])
        out.flags.writeable = False
        return out

    @cached_property
    def is_commutative(self) -> bool:
        return bool((self.meet == self.meet.T).all() and (self.join == self.join.T).all())

    def to_json(self) -> dict:
        return {
            "size": self.n,
            "zero": self.zero,
            "meet": self.meet.tolist(),
            "join": self.join.tolist(),
        }


# -- axioms -----------------------------------------------------------------

def _assoc_witness(T: np.ndarray):
    n = T.shape[0]
    ar = np.arange(n)
    left = T[T[:, :, None], ar[None, None, :]]
    right = T[ar[:, None, None], T[None, :, :]]
    bad = np.argwhere(left != right)
    return tuple(int(v) for v in bad[0]) if len(bad) else None


def find_violation(S: FiniteSkewLattice) -> LawViolation | None:
    """First failing axiom, in the order idempotency, associativity, absorption, zero."""
    n = S.n
    M, J = S.meet, S.join
    ar = np.arange(n)
    for name, T in (("meet", M), ("join", J)):
        bad = np.flatnonzero(T[ar, ar] != ar)
        if len(bad):
            return NotIdempotent(bad[0], op=name)
    for name, T in (("meet", M), ("join", J)):
        w = _assoc_witness(T)
        if w is not None:
            return NotAssociative(*w, op=name)
    X = ar[:, None]
    identities = (
        ("x∧(x∨y)=x", M[X, J]),
        ("x∨(x∧y)=x", J[X, M]),
        ("(y∨x)∧x=x", M[J.T, X]),
        ("(y∧x)∨x=x", J[M.T, X]),
    )
    for label, lhs in identities:
        bad = np.argwhere(lhs != X)
        if len(bad):
            x, y = bad[0]
            return AbsorptionFails(x, y, op=label)
    z = S.zero
    bad = np.flatnonzero((M[:, z] != z) | (M[z, :] != z))
    if len(bad):
        return ZeroLawFails(bad[0])
    return None


def validate(meet, join=None, zero: int = 0, *, max_size_override: int | None = None) -> FiniteSkewLattice:
    """Build an algebra from tables and check every skew lattice axiom.

    Raises the first :class:`LawViolation` found, carrying a witness.
    """
    S = meet if isinstance(meet, FiniteSkewLattice) else FiniteSkewLattice(meet, join, zero)
    cap = max_size(max_size_override)
    if S.n > cap:
        raise SizeOverflow(f"{S.n} elements exceeds the validation cap {cap}")
    err = find_violation(S)
    if err is not None:
        raise err
    return S


def natural_order(S: FiniteSkewLattice, x: int, y: int) -> bool:
    return S.m(x, y) == x == S.m(y, x)


# -- congruences ------------------------------------------------------------

@dataclass(frozen=True)
class Congruence:
    """A partition of ``0..n-1``; ``labels[x]`` is the least element of x's block."""

    labels: tuple[int, ...]

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Congruence":
        first: dict = {}
        out = []
        for x, lab in enumerate(labels):
            out.append(first.setdefault(lab, x))
        return cls(tuple(out))

    @classmethod
    def from_blocks(cls, blocks, n: int) -> "Congruence":
        labels = [-1] * n
        for b in blocks:
            rep = min(b)
            for x in b:
                if labels[x] != -1:
                    raise ValueError(f"element {x} lies in two blocks")
                labels[x] = rep
        if -1 in labels:
            raise ValueError(f"element {labels.index(-1)} is in no block")
        return cls(tuple(labels))

    @classmethod
    def from_matrix(cls, rel: np.ndarray) -> "Congruence":
        """Partition from a relation matrix; raises if it is not an equivalence."""
        rel = np.asarray(rel, dtype=bool)
        if not rel.diagonal().all():
            raise InternalCheckFailed(f"not reflexive at {int(np.flatnonzero(~rel.diagonal())[0])}")
        if not (rel == rel.T).all():
            x, y = np.argwhere(rel != rel.T)[0]
            raise InternalCheckFailed(f"not symmetric at ({x}, {y})")
        two_step = (rel.astype(np.int64) @ rel.astype(np.int64)) > 0
        bad = np.argwhere(two_step & ~rel)
        if len(bad):
            x, z = bad[0]
            y = int(np.flatnonzero(rel[x] & rel[:, z])[0])
            raise InternalCheckFailed(f"not transitive: {x}~{y}~{z} but not {x}~{z}")
        labels = rel.argmax(axis=1)
        return cls(tuple(int(v) for v in labels))

    @classmethod
    def equality(cls, n: int) -> "Congruence":
        return cls(tuple(range(n)))

    @classmethod
    def kernel(cls, mapping: Sequence[int]) -> "Congruence":
        return cls.from_labels(list(mapping))

    @property
    def n(self) -> int:
        return len(self.labels)

    def class_of(self, x: int) -> int:
        return self.labels[x]

    def related(self, x: int, y: int) -> bool:
        return self.labels[x] == self.labels[y]

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(self.labels):
            groups.setdefault(lab, []).append(x)
        return tuple(tuple(groups[k]) for k in sorted(groups))

    def __len__(self) -> int:
        return len(self.blocks)

    def is_equality(self) -> bool:
        return all(lab == x for x, lab in enumerate(self.labels))

    def compatibility_witness(self, S: FiniteSkewLattice):
        """``(op, x, x', y)`` with x ~ x' but x·y !~ x'·y (or y·x vs y·x'), else None."""
        lab = np.asarray(self.labels)
        for name, T in (("meet", S.meet), ("join", S.join)):
            LT = lab[T]
            bad = np.argwhere(LT != LT[lab, :])
            if len(bad):
                x, y = bad[0]
                return (name, int(x), int(lab[x]), int(y))
            bad = np.argwhere(LT != LT[:, lab])
            if len(bad):
                y, x = bad[0]
                return (name, int(x), int(lab[x]), int(y))
        return None

    def is_compatible(self, S: FiniteSkewLattice) -> bool:
        return self.compatibility_witness(S) is None


def _checked_congruence(S: FiniteSkewLattice, rel: np.ndarray, name: str) -> Congruence:
    try:
        C = Congruence.from_matrix(rel)
    except InternalCheckFailed as exc:
        raise InternalCompatibilityViolation(f"{name}: {exc}") from None
    w = C.compatibility_witness(S)
    if w is not None:
        raise InternalCompatibilityViolation(f"{name} is not compatible: {w}")
    return C


def d_relation(S: FiniteSkewLattice) -> Congruence:
    """x D y iff x∧y∧x = x and y∧x∧y = y."""
    ar = np.arange(S.n)
    xyx = S.meet[S.meet, ar[:, None]]
    half = xyx == ar[:, None]
    return _checked_congruence(S, half & half.T, "D")


def l_relation(S: FiniteSkewLattice) -> Congruence:
    """x L y iff x∧y = x and y∧x = y."""
    half = S.meet == np.arange(S.n)[:, None]
    return _checked_congruence(S, half & half.T, "L")


def r_relation(S: FiniteSkewLattice) -> Congruence:
    """x R y iff x∧y = y and y∧x = x."""
    half = S.meet == np.arange(S.n)[None, :]
    return _checked_congruence(S, half & half.T, "R")


# -- homomorphisms ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SkewHom:
    source: FiniteSkewLattice
    target: FiniteSkewLattice
    map: tuple[int, ...]

    def __post_init__(self):
        mp = tuple(int(v) for v in self.map)
        if len(mp) != self.source.n:
            raise TableError(f"map has {len(mp)} entries, source has {self.source.n} elements")
        for x, v in enumerate(mp):
            if not 0 <= v < self.target.n:
                raise TableError(f"map[{x}] = {v} is out of range 0..{self.target.n - 1}")
        object.__setattr__(self, "map", mp)

    def __call__(self, x: int) -> int:
        return self.map[x]

    def _key(self):
        return (self.source, self.target, self.map)

    def __eq__(self, other):
        if not isinstance(other, SkewHom):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"SkewHom({self.source!r} -> {self.target!r}, {list(self.map)})"

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.n

    def to_json(self) -> dict:
        return {"map": list(self.map)}


def compose(g: SkewHom, f: SkewHom) -> SkewHom:
    """g ∘ f."""
    if f.target != g.source:
        raise ValueError("maps are not composable")
    return SkewHom(f.source, g.target, tuple(g.map[v] for v in f.map))


def identity_hom(S: FiniteSkewLattice) -> SkewHom:
    return SkewHom(S, S, tuple(range(S.n)))


def hom_witness(mapping: Sequence[int], S: FiniteSkewLattice, T: FiniteSkewLattice):
    """First failure of ``mapping`` to be a homomorphism, as (what, x, y), or None."""
    h = np.asarray(mapping, dtype=np.int64)
    if h.shape != (S.n,) or (h < 0).any() or (h >= T.n).any():
        return ("shape", -1, -1)
    if h[S.zero] != T.zero:
        return ("zero", S.zero, S.zero)
    for name, A, B in (("meet", S.meet, T.meet), ("join", S.join, T.join)):
        bad = np.argwhere(h[A] != B[h[:, None], h[None, :]])
        if len(bad):
            x, y = bad[0]
            return (name, int(x), int(y))
    return None


def is_homomorphism(mapping, S: FiniteSkewLattice, T: FiniteSkewLattice) -> bool:
    if isinstance(mapping, SkewHom):
        mapping = mapping.map
    return hom_witness(mapping, S, T) is None


# -- quotients and the lattice reflection -------------------------------------

def quotient(S: FiniteSkewLattice, C: Congruence) -> tuple[FiniteSkewLattice, SkewHom]:
    """S/C with blocks ordered by least representative, plus the projection."""
    if C.n != S.n:
        raise NotACongruence(f"partition of {C.n} elements applied to an algebra of {S.n}")
    w = C.compatibility_witness(S)
    if w is not None:
        raise NotACongruence(f"not compatible with {w[0]}: {w[1]} ~ {w[2]} but products with {w[3]} differ")
    reps = sorted(set(C.labels))
    pos = {r: i for i, r in enumerate(reps)}
    idx = np.array([pos[lab] for lab in C.labels])
    r = np.array(reps)
    Q = FiniteSkewLattice(idx[S.meet[np.ix_(r, r)]], idx[S.join[np.ix_(r, r)]], int(idx[S.zero]))
    return Q, SkewHom(S, Q, tuple(int(v) for v in idx))


def lattice_top(L: FiniteSkewLattice) -> int:
    """Largest element of a finite lattice (join of everything)."""
    return L.join_all(range(L.n))


@lru_cache(maxsize=4096)
def lattice_reflection(S: FiniteSkewLattice, *, require_distributive: bool = True):
    """S/D and the projection. The quotient is a FiniteDistLattice when distributive.

    Memoized: algebras are immutable and hash by their tables.
    """
    from .order import FiniteDistLattice, distributivity_witness

    L, alpha = quotient(S, d_relation(S))
    if not L.is_commutative:
        raise InternalCheckFailed("S/D is not commutative")
    if distributivity_witness(L) is None:
        L = FiniteDistLattice(L.meet, L.join, L.zero)
        alpha = SkewHom(S, L, alpha.map)
    elif require_distributive:
        raise NotDistributiveReflection("S/D is not distributive, so S is not strongly distributive")
    return L, alpha


def lift_through_reflection(h: SkewHom, alpha: SkewHom | None = None) -> SkewHom:
    """The unique hbar: S/D -> L with hbar ∘ alpha = h, for h into a lattice L."""
    if not h.target.is_commutative:
        raise ValueError("target of h is not a lattice")
    if alpha is None:
        _, alpha = lattice_reflection(h.source, require_distributive=False)
    values: dict[int, int] = {}
    for x, q in enumerate(alpha.map):
        v = values.setdefault(q, h.map[x])
        if v != h.map[x]:
            raise InternalCheckFailed(f"h is not constant on the D-class of {x}")
    hbar = SkewHom(alpha.target, h.target, tuple(values[q] for q in range(alpha.target.n)))
    if not is_homomorphism(hbar, hbar.source, hbar.target):
        raise InternalCheckFailed("lift through the reflection is not a homomorphism")
    return hbar


def reflect_hom(h: SkewHom) -> SkewHom:
    """hbar: S/D -> T/D induced by h: S -> T."""
    _, alpha_s = lattice_reflection(h.source, require_distributive=False)
    _, alpha_t = lattice_reflection(h.target, require_distributive=False)
    return lift_through_reflection(compose(alpha_t, h), alpha_s)


def is_proper(h: SkewHom) -> bool:
    """Every element of T/D lies below some element of the image of hbar.

    The finite shortcut hbar(top) = top is checked against the definition.
    """
    k = reflect_hom(h)
    L2 = k.target
    image = sorted(set(k.map))
    by_definition = bool(L2.leq[:, image].any(axis=1).all())
    shortcut = k(lattice_top(k.source)) == lattice_top(L2)
    if by_definition != shortcut:
        raise InternalCheckFailed("properness disagrees with the top-preservation shortcut")
    return by_definition


# -- predicates -------------------------------------------------------------

class Verdict(NamedTuple):
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


def _first(mask: np.ndarray) -> Verdict:
    bad = np.argwhere(mask)
    if len(bad):
        return Verdict(False, tuple(int(v) for v in bad[0]))
    return Verdict(True)


def is_left_handed(S: FiniteSkewLattice) -> Verdict:
    """x∧y∧x = x∧y."""
    ar = np.arange(S.n)
    return _first(S.meet[S.meet, ar[:, None]] != S.meet)


def is_right_handed(S: FiniteSkewLattice) -> Verdict:
    """x∧y∧x = y∧x."""
    ar = np.arange(S.n)
    return _first(S.meet[S.meet, ar[:, None]] != S.meet.T)


def is_strongly_distributive(S: FiniteSkewLattice) -> Verdict:
    """x∧(y∨z) = (x∧y)∨(x∧z) and (y∨z)∧x = (y∧x)∨(z∧x)."""
    M, J = S.meet, S.join
    ar = np.arange(S.n)
    X = ar[:, None, None]
    lhs = M[X, J[None, :, :]]
    rhs = J[M[:, :, None], M[:, None, :]]
    v = _first(lhs != rhs)
    if not v:
        return v
    # (y∨z)∧x indexed as [x, y, z]
    lhs = M[J[None, :, :], X]
    rhs = J[M.T[:, :, None], M.T[:, None, :]]
    return _first(lhs != rhs)


def is_normal(S: FiniteSkewLattice) -> Verdict:
    """Each x∧S∧x is a commutative sublattice; witness is (x, a, b)."""
    M, J = S.meet, S.join
    for x in range(S.n):
        sub = np.unique(M[M[x, :], x])
        Ms, Js = M[np.ix_(sub, sub)], J[np.ix_(sub, sub)]
        for T in (Ms, Js):
            bad = np.argwhere(T != T.T)
            if len(bad):
                a, b = bad[0]
                return Verdict(False, (x, int(sub[a]), int(sub[b])))
            for a, b in np.argwhere(~np.isin(T, sub)):
                return Verdict(False, (x, int(sub[a]), int(sub[b])))
    return Verdict(True)


def is_symmetric(S: FiniteSkewLattice) -> Verdict:
    """x∨y = y∨x iff x∧y = y∧x."""
    return _first((S.join == S.join.T) != (S.meet == S.meet.T))


def is_lhsd(S: FiniteSkewLattice) -> bool:
    return bool(is_left_handed(S)) and bool(is_strongly_distributive(S))


def check_useful_lemma(S: FiniteSkewLattice) -> Verdict:
    """Left normality b∧a∧a' = b∧a'∧a, and a, a' ≤ b with a D a' forcing a = a'."""
    if not is_left_handed(S) or not is_strongly_distributive(S):
        raise PreconditionUnmet("algebra is not left-handed strongly distributive")
    M = S.meet
    lhs = M[M[:, :, None], np.arange(S.n)[None, None, :]]  # [b, a, a'] -> b∧a∧a'
    v = _first(lhs != lhs.transpose(0, 2, 1))
    if not v:
        return v
    D = np.array(d_relation(S).labels)
    leq = S.leq
    same = (D[:, None] == D[None, :]) & ~np.eye(S.n, dtype=bool)
    for b in range(S.n):
        below = leq[:, b]
        bad = np.argwhere(same & below[:, None] & below[None, :])
        if len(bad):
            a, a2 = bad[0]
            return Verdict(False, (int(a), int(a2), b))
    return Verdict(True)


# -- homomorphism search ----------------------------------------------------

def iter_homomorphisms(
    S: FiniteSkewLattice,
    T: FiniteSkewLattice,
    *,
    injective: bool = False,
    allowed: Sequence[set] | None = None,
) -> Iterator[tuple[int, ...]]:
    """All homomorphisms S -> T by backtracking with forward propagation.

    Assigning x -> v forces the images of every product of x with an already
    assigned element; contradictions prune the branch.
    """
    n = S.n
    SM, SJ = S.meet.tolist(), S.join.tolist()
    TM, TJ = T.meet.tolist(), T.join.tolist()

    def extend(assign, used, x, v):
        assign = list(assign)
        used = set(used)
        queue = [(x, v)]
        while queue:
            a, val = queue.pop()
            cur = assign[a]
            if cur != -1:
                if cur != val:
                    return None
                continue
            if allowed is not None and val not in allowed[a]:
                return None
            if injective and val in used:
                return None
            assign[a] = val
            used.add(val)
            for b in range(n):
                vb = assign[b]
                if vb == -1:
                    continue
                queue.append((SM[a][b], TM[val][vb]))
                queue.append((SM[b][a], TM[vb][val]))
                queue.append((SJ[a][b], TJ[val][vb]))
                queue.append((SJ[b][a], TJ[vb][val]))
        return assign, used

    start = extend([-1] * n, set(), S.zero, T.zero)
    if start is None:
        return

    def search(assign, used):
        try:
            x = assign.index(-1)
        except ValueError:
            yield tuple(assign)
            return
        for v in range(T.n):
            nxt = extend(assign, used, x, v)
            if nxt is not None:
                yield from search(*nxt)

    yield from search(*start)


def d_class_sizes(S: FiniteSkewLattice) -> list[int]:
    D = d_relation(S)
    size = {b[0]: len(b) for b in D.blocks}
    return [size[lab] for lab in D.labels]


def find_isomorphism(S: FiniteSkewLattice, T: FiniteSkewLattice) -> SkewHom | None:
    """An isomorphism S -> T, or None. Zero is fixed; D-class sizes must match."""
    if S.n != T.n:
        return None
    ss, ts = d_class_sizes(S), d_class_sizes(T)
    down_s, down_t = S.leq.sum(axis=0), T.leq.sum(axis=0)
    allowed = [
        {v for v in range(T.n) if ts[v] == ss[x] and down_t[v] == down_s[x]}
        for x in range(S.n)
    ]
    for mp in iter_homomorphisms(S, T, injective=True, allowed=allowed):
        return SkewHom(S, T, mp)
    return None


# -- homomorphisms into 2 ----------------------------------------------------

def two() -> FiniteSkewLattice:
    """The two-element lattice {0 < 1}."""
    return FiniteSkewLattice([[0, 0], [0, 1]], [[0, 1], [1, 1]], 0)


TWO = two()

BRUTE_FORCE_HOMS_TO_2 = 12


def brute_force_homs_to_2(S: FiniteSkewLattice, *, proper_only: bool = True) -> list[tuple[int, ...]]:
    """Scan all 0/1 maps fixing zero; keep the homomorphisms (and proper ones)."""
    n = S.n
    if n > 20:
        raise SizeOverflow(f"brute-force scan of 2^{n - 1} maps refused")
    others = [x for x in range(n) if x != S.zero]
    codes = np.arange(2 ** len(others), dtype=np.int64)
    H = np.zeros((len(codes), n), dtype=np.int64)
    for bit, x in enumerate(others):
        H[:, x] = (codes >> bit) & 1
    ok = np.ones(len(codes), dtype=bool)
    for x in range(n):
        for y in range(n):
            hx, hy = H[:, x], H[:, y]
            ok &= H[:, S.meet[x, y]] == (hx & hy)
            ok &= H[:, S.join[x, y]] == (hx | hy)
    if proper_only:
        ok &= H.any(axis=1)
    return sorted(tuple(int(v) for v in row) for row in H[ok])


def enumerate_proper_homs_to_2(S: FiniteSkewLattice, *, cross_check: bool | None = None) -> list[SkewHom]:
    """Proper homomorphisms S -> 2, one per join-irreducible of S/D.

    Each join-irreducible j gives the prime filter ↑j of the reflection and the
    hom sending a to 1 iff j ≤ [a]. Results follow the order of j in S/D.
    """
    from .order import join_irreducibles

    L, alpha = lattice_reflection(S)
    homs = []
    for jj in join_irreducibles(L):
        k = L.leq[jj, :].astype(int)
        homs.append(SkewHom(S, TWO, tuple(int(k[q]) for q in alpha.map)))
    if cross_check is None:
        cross_check = S.n <= BRUTE_FORCE_HOMS_TO_2
    if cross_check:
        if sorted(h.map for h in homs) != brute_force_homs_to_2(S):
            raise InternalCheckFailed("prime-filter homs disagree with brute-force enumeration")
    return homs
