"""Invariant suites over the built-in corpus, used by ``sylowtower selftest``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd

import numpy as np

from .burnside import finite_gset_fixed_points, homotopy_fixed_point_section
from .cohomology import cohomology_group
from .corpus import (fibration_corpus, p_groups, inverted_z3_tower, random_gset, random_p_map, sign_module,
                     index2_subgroups, tower_corpus)
from .errors import PreconditionError, SylowTowerError
from .groups import cyclic, enumerate_subgroups
from .modules import GModule
from .nilpotent import trichotomy
from .numtheory import prime_divisors
from .postnikov import compose, validate_map
from .sylow import enumerate_sylow_maps, factor_through_sylow, normality_obstruction


@dataclass
class SuiteResult:
    name: str
    ok: bool
    checked: int
    detail: str = ""

    def line(self) -> str:
        tail = f" ({self.detail})" if self.detail else ""
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.checked} checked{tail}"

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checked": self.checked, "detail": self.detail}


def _example(full: bool, seed: int) -> SuiteResult:
    T = inverted_z3_tower()
    s = enumerate_sylow_maps(T, 2)
    rep = normality_obstruction(s.maps[0], 2)
    ok = s.count == 1 and rep.obstructed and rep.obstruction_levels() == [2]
    return SuiteResult("example", ok, 2, f"count {s.count}, obstruction levels {rep.obstruction_levels()}")


def _sylow_count(full: bool, seed: int) -> SuiteResult:
    towers = tower_corpus()
    towers = towers if full else towers[::3]
    n, bad = 0, []
    for T in towers:
        for p in prime_divisors(T.base.order):
            c = enumerate_sylow_maps(T, p).count
            pk = max(d for d in (p ** i for i in range(8)) if T.base.order % d == 0)
            brute = sum(1 for H in enumerate_subgroups(T.base) if H.order == pk)
            n += 1
            if c % p != 1 or c != brute:
                bad.append(f"{T.name} p={p}: {c} vs {brute}")
    return SuiteResult("sylow-congruence", not bad, n, "; ".join(bad[:3]))


def _factorization(full: bool, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    count = 100 if full else 20
    bad = []
    for _ in range(count):
        f, p = random_p_map(rng)
        if not validate_map(f):
            bad.append(f"{f.name}: generated map invalid")
            continue
        try:
            fa = factor_through_sylow(f, p)
        except SylowTowerError as e:
            bad.append(f"{f.name}: {e.message}")
            continue
        sg = compose(fa.s, fa.g)
        if not np.array_equal(sg.phi1, f.phi1):
            bad.append(f"{f.name}: pi_1 differs")
    return SuiteResult("factorization", not bad, count, "; ".join(bad[:3]))


def cyclic_cohomology_order(m: int, k: int, u: int, n: int) -> int:
    """|H^n(Z/m; Z/k)| with the generator acting by u, from the periodic resolution."""
    norm = sum(pow(u, i, k) for i in range(m)) % k
    ker_d, ker_n = gcd(u - 1, k), gcd(norm, k)
    if n == 0:
        return ker_d
    # odd: ker N / im(u - 1); even: ker(u - 1) / im N; both have this order
    return ker_n * ker_d // k


def _cyclic(full: bool, seed: int) -> SuiteResult:
    n, bad = 0, []
    top = 8 if full else 5
    for m in range(1, top + 1):
        G = cyclic(m)
        for k in range(2, top + 1):
            for u in range(k):
                if gcd(u, k) != 1 or pow(u, m, k) != 1:
                    continue
                M = GModule.from_generators(G, [k], {G.generators[0]: [[u]]}) if m > 1 else GModule.trivial(G, [k])
                for deg in range(0, 5 if full else 4):
                    H = cohomology_group(G, M, deg)
                    want = cyclic_cohomology_order(m, k, u, deg)
                    n += 1
                    if H.order != want or len(H.invariant_factors) > 1:
                        bad.append(f"Z/{m} on Z/{k} by {u}, n={deg}: {list(H.invariant_factors)} vs {want}")
    return SuiteResult("cyclic-oracle", not bad, n, "; ".join(bad[:3]))


def _serre(full: bool, seed: int) -> SuiteResult:
    n, bad = 0, []
    for p, q in ((2, 3), (3, 2), (2, 5)):
        for P in p_groups(p, 16 if full else 8):
            mods = [GModule.trivial(P, [q]), GModule.trivial(P, [q * q])]
            subs = index2_subgroups(P)
            if subs and q > 2:
                mods.append(sign_module(P, subs[0], [q]))
            for M in mods:
                for deg in range(1, 5 if full else 4):
                    n += 1
                    if cohomology_group(P, M, deg).order != 1:
                        bad.append(f"H^{deg}({P.name}; {M.abelian}) != 0")
    return SuiteResult("coprime-vanishing", not bad, n, "; ".join(bad[:3]))


def _trichotomy(full: bool, seed: int) -> SuiteResult:
    towers = tower_corpus()
    towers = towers if full else towers[::4]
    bad = [T.name for T in towers if not trichotomy(T).consistent]
    return SuiteResult("trichotomy", not bad, len(towers), ", ".join(bad[:3]))


def _burnside(full: bool, seed: int) -> SuiteResult:
    cases = fibration_corpus(seed)
    cases = cases if full else cases[::3]
    bad, n = [], 0
    for c in cases:
        n += 1
        try:
            homotopy_fixed_point_section(c.gamma, c.prime)
            got = True
        except PreconditionError:
            got = False
        if got != c.valid:
            bad.append(c.name)
    rng = np.random.default_rng(seed)
    groups = [(p, G, enumerate_subgroups(G)) for p in (2, 3) for G in p_groups(p, 8)]
    for _ in range(1000 if full else 100):
        p, G, subs = groups[int(rng.integers(len(groups)))]
        X = random_gset(G, rng, subgroups=subs)
        n += 1
        if not finite_gset_fixed_points(G, X, p, require_coprime=False).congruent:
            bad.append(f"G-set over {G.name}")
    return SuiteResult("burnside", not bad, n, ", ".join(bad[:3]))


SUITES = [_example, _sylow_count, _factorization, _cyclic, _serre, _trichotomy, _burnside]


def run_suites(full: bool = False, seed: int = 0, threads: int = 1) -> list[SuiteResult]:
    def one(fn):
        try:
            return fn(full, seed)
        except SylowTowerError as e:
            return SuiteResult(fn.__name__.strip("_"), False, 0, e.describe())

    if threads == 1:
        return [one(fn) for fn in SUITES]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, SUITES))
