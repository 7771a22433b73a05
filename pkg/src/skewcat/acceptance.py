"""The exact verification battery behind ``skewcat selftest``.

Each ``criterion_N`` returns a :class:`Outcome`; a criterion passes only if
every instance checks out and it finishes inside its time budget.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import (
    Congruence,
    SkewHom,
    check_useful_lemma,
    compose,
    enumerate_proper_homs_to_2,
    identity_hom,
    is_left_handed,
    is_normal,
    is_proper,
    is_strongly_distributive,
    is_symmetric,
    iter_homomorphisms,
    validate,
)
from .bundles import enumerate_sheaf_morphisms, iter_bundles
from .constructions import (
    GeneratorConfig,
    check_second_decomposition,
    fiber_product_over_2,
    partial_function_algebra,
    primitive_left,
    primitive_right,
    random_lhsd_algebras,
    random_mixed_algebra,
)
from .duality import (
    ev,
    nonzero_blocks,
    point_hom,
    prime_filters_over,
    psi,
    realize_section,
    represent,
    sim_h,
    star_of_bundle,
    star_of_morphism,
    transport_tables,
    unstar_hom,
)
from .order import (
    dual_of_monotone,
    downset_lattice,
    iter_posets,
    spectrum,
    unit_lattice,
    unit_poset,
)

BUDGETS = {1: 10.0, 2: 30.0, 3: 60.0, 4: 30.0, 5: None, 6: None, 7: 60.0, 8: None, 9: None}
TITLES = {
    1: "axiom battery",
    2: "finite order duality",
    3: "round trip, algebra side",
    4: "round trip, bundle side",
    5: "kernel characterization",
    6: "prime filters over h",
    7: "full faithfulness count",
    8: "constructive realization",
    9: "second decomposition",
}
RANDOM_ALGEBRAS = 200
MIXED_PRODUCTS = 50


@dataclass
class Outcome:
    number: int
    checked: int
    failures: list
    seconds: float

    @property
    def within_budget(self) -> bool:
        budget = BUDGETS[self.number]
        return budget is None or self.seconds <= budget

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0 and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = BUDGETS[self.number]
        limit = f" (limit {budget:.0f}s)" if budget else ""
        text = f"criterion {self.number} [{TITLES[self.number]}]: {status} {self.checked} checks, {self.seconds:.2f}s{limit}"
        if self.failures:
            text += f"; first failure: {self.failures[0]}"
        elif not self.within_budget:
            text += "; over time budget"
        return text

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": TITLES[self.number],
            "passed": self.passed,
            "checked": self.checked,
            "seconds": round(self.seconds, 3),
            "failures": [str(f) for f in self.failures[:5]],
        }


def _timed(number):
    def wrap(fn):
        def run(*args, **kwargs):
            start = time.perf_counter()
            checked, failures = fn(*args, **kwargs)
            return Outcome(number, checked, failures, time.perf_counter() - start)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


# -- instance sets ----------------------------------------------------------

@lru_cache(maxsize=None)
def small_bundles():
    """All labelled bundles with at most 3 base points and stalks of size 1 or 2."""
    return tuple(iter_bundles(3, 2))


@lru_cache(maxsize=None)
def tiny_bundles():
    return tuple(iter_bundles(2, 2))


@lru_cache(maxsize=None)
def random_algebras(seed: int, count: int = RANDOM_ALGEBRAS):
    return tuple(random_lhsd_algebras(GeneratorConfig(seed=seed), count))


# -- criteria ---------------------------------------------------------------

@_timed(1)
def criterion_1(seed: int = 0):
    algebras = [("P_%d" % k, primitive_left(k)) for k in range(1, 5)]
    algebras += [(f"P({x},{y})", partial_function_algebra(x, y)) for x in range(0, 4) for y in range(1, 3)]
    algebras += [(f"star{B.stalks}", star_of_bundle(B).algebra) for B in small_bundles()]
    failures = []
    for name, S in algebras:
        try:
            validate(S)
        except Exception as exc:
            failures.append((name, repr(exc)))
            continue
        for pred in (is_left_handed, is_strongly_distributive, is_normal, is_symmetric, check_useful_lemma):
            v = pred(S)
            if not v:
                failures.append((name, pred.__name__, v.witness))
    return len(algebras), failures


@_timed(2)
def criterion_2(seed: int = 0):
    failures, checked = [], 0
    for m in range(6):
        for X in iter_posets(m):
            checked += 1
            beta = unit_poset(X)
            if not beta.is_order_isomorphism():
                failures.append(("unit_poset", X.covers()))
                continue
            D, _ = downset_lattice(X)
            if D.n > 32:
                continue
            alpha = unit_lattice(D)
            if not (alpha.is_injective() and alpha.is_surjective()):
                failures.append(("unit_lattice", X.covers()))
                continue
            Y, _ = spectrum(D)
            if Y.canonical_form() != X.canonical_form():
                failures.append(("spectrum of L(X) differs from X", X.covers()))
            # triangle identity: L(beta_X) after alpha_{L(X)} is the identity of L(X)
            if compose(dual_of_monotone(beta), alpha) != identity_hom(D):
                failures.append(("triangle identity", X.covers()))
    return checked, failures


@_timed(3)
def criterion_3(seed: int = 0):
    failures = []
    algebras = random_algebras(seed)
    for i, S in enumerate(algebras):
        try:
            rep = represent(S)
            meet, join = transport_tables(rep.phi)
            T = rep.sections.algebra
            if not (np.array_equal(meet, T.meet) and np.array_equal(join, T.join)):
                failures.append((i, "tables differ after transport"))
        except Exception as exc:
            failures.append((i, repr(exc)))
    return len(algebras), failures


@_timed(4)
def criterion_4(seed: int = 0):
    failures = []
    bundles = small_bundles()
    for B in bundles:
        try:
            iso = psi(B)
            if any(sorted(row) != list(range(k)) for row, k in zip(iso.stalk_maps, B.stalks)):
                failures.append((B, "stalk map is not a bijection"))
        except Exception as exc:
            failures.append((B, repr(exc)))
    return len(bundles), failures


@_timed(5)
def criterion_5(seed: int = 0):
    failures, checked = [], 0
    for B in small_bundles():
        SA = star_of_bundle(B)
        for x in range(B.m):
            checked += 1
            C = sim_h(SA.algebra, point_hom(SA, x))
            if C != Congruence.kernel(ev(SA, x).map):
                failures.append((B, x))
    return checked, failures


@_timed(6)
def criterion_6(seed: int = 0):
    failures, checked = [], 0
    pool = [star_of_bundle(B).algebra for B in small_bundles()] + list(random_algebras(seed))
    for S in pool:
        if S.n > 20:
            continue
        for h in enumerate_proper_homs_to_2(S):
            checked += 1
            filters = set(prime_filters_over(S, h))
            blocks = {frozenset(b) for b in nonzero_blocks(sim_h(S, h), h)}
            if filters != blocks:
                failures.append((S, h.map))
    return checked, failures


@_timed(7)
def criterion_7(seed: int = 0):
    failures, checked = [], 0
    bundles = tiny_bundles()
    for E in bundles:
        Ea = star_of_bundle(E)
        for F in bundles:
            checked += 1
            Fa = star_of_bundle(F)
            mors = enumerate_sheaf_morphisms(E, F)
            proper = [
                h for h in (SkewHom(Fa.algebra, Ea.algebra, m) for m in iter_homomorphisms(Fa.algebra, Ea.algebra))
                if is_proper(h)
            ]
            if len(mors) != len(proper):
                failures.append((E, F, len(mors), len(proper)))
                continue
            images = {star_of_morphism(m, Ea, Fa) for m in mors}
            if images != set(proper):
                failures.append((E, F, "star is not a bijection onto proper homs"))
                continue
            for m in mors:
                if unstar_hom(star_of_morphism(m, Ea, Fa), Ea, Fa) != m:
                    failures.append((E, F, "unstar after star", m))
                    break
            for h in proper:
                if star_of_morphism(unstar_hom(h, Ea, Fa), Ea, Fa) != h:
                    failures.append((E, F, "star after unstar", h.map))
                    break
    return checked, failures


@_timed(8)
def criterion_8(seed: int = 0):
    failures, checked = [], 0
    for i, S in enumerate(random_algebras(seed)):
        rep = represent(S)
        for s in rep.sections.sections:
            checked += 1
            try:
                a = realize_section(S, s, rep.dual)
                if rep.phi(a) != rep.sections.index[s]:
                    failures.append((i, s))
            except Exception as exc:
                failures.append((i, s, repr(exc)))
    return checked, failures


@_timed(9)
def criterion_9(seed: int = 0):
    failures, checked = [], 0
    for j in range(1, 4):
        for k in range(1, 4):
            checked += 1
            v = check_second_decomposition(fiber_product_over_2(primitive_left(j), primitive_right(k)))
            if not v:
                failures.append((f"P_{j} x Q_{k}", v.witness))
    for i, cfg in enumerate(GeneratorConfig(seed=seed).spawn(MIXED_PRODUCTS)):
        checked += 1
        S = random_mixed_algebra(cfg)
        v = check_second_decomposition(S)
        if not v:
            failures.append((f"mixed #{i}", v.witness))
    return checked, failures


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def run_all(seed: int = 42, only=None) -> list[Outcome]:
    return [CRITERIA[k](seed) for k in sorted(only or CRITERIA)]
