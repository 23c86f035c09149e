"""Exact engine for left-normed commutator statistics.

Probabilities are exact ``fractions.Fraction`` values.  Counting is done
along independent routes — literal tuple enumeration, a conjugacy-class
formula, and a histogram dynamic program — so each route can audit the
others.  The histogram route is the production path: its cost is
O((n + m) * |G| * |pool|) regardless of how many tuples it accounts for.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import groups
from .errors import BruteCapExceeded, EmptyTuple, ForeignSubgroup
from .groups import GroupTable, SubgroupRef

BRUTE_CAP_DEFAULT = 10**8

_INT64_SAFE = 2**62
_CHUNK = 1 << 22

__all__ = [
    "BRUTE_CAP_DEFAULT",
    "CommParams",
    "ExactProb",
    "CommDistribution",
    "commutator",
    "left_normed_commutator",
    "comm_distribution",
    "extend_by_conjugators",
    "final_counts",
    "brute_counts",
    "prob_brute",
    "prob_fast",
    "prob_class_formula",
    "prob_profile",
    "zeta_count",
    "zeta_count_nm",
    "commutator_value_set",
    "nested_commutator_subgroup",
    "nilpotency_degree",
    "commutativity_degree",
    "y_set_size",
    "conjugacy_info",
    "prob_to_json",
    "prob_from_json",
    "distribution_csv",
    "clear_caches",
]


def commutator(G: GroupTable, x: int, y: int) -> int:
    """x^-1 * y^-1 * x * y."""
    mul, inv = G.mul, G.inv
    return int(mul[mul[mul[inv[x], inv[y]], x], y])


def left_normed_commutator(G: GroupTable, xs: Sequence[int]) -> int:
    """Fold [[x1,x2],x3]... ; a single element is its own weight-1 value."""
    if len(xs) == 0:
        raise EmptyTuple("left-normed commutator needs at least one entry")
    acc = int(xs[0])
    for x in xs[1:]:
        acc = commutator(G, acc, x)
    return acc


@dataclass(frozen=True)
class CommParams:
    """Inputs (H, K, n, m, g) for a weight-(n + m) commutator probability."""

    H: SubgroupRef
    K: SubgroupRef
    n: int
    m: int
    g: int

    def __post_init__(self) -> None:
        if self.H.parent is not self.K.parent:
            raise ForeignSubgroup("H and K must live in the same parent group")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        if not 0 <= self.g < self.H.parent.order:
            raise ValueError(f"element id {self.g} out of range")

    @property
    def parent(self) -> GroupTable:
        return self.H.parent

    @property
    def space_size(self) -> int:
        return self.H.order**self.n * self.K.order**self.m


@dataclass(frozen=True)
class ExactProb:
    """An exact probability together with the method that produced it."""

    value: Fraction
    method: str
    params: Optional[CommParams] = None

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class CommDistribution:
    """Dense histogram of left-normed commutator values over a tuple space."""

    group: GroupTable
    counts: tuple[int, ...]
    weight: int
    source: str

    @property
    def total(self) -> int:
        return sum(self.counts)

    def support(self) -> tuple[int, ...]:
        return tuple(v for v, c in enumerate(self.counts) if c)


def _comm_block(G: GroupTable, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """commutator(r, c) for every row element r and column element c."""
    mul, inv = G.mul, G.inv
    r = rows[:, None]
    c = cols[None, :]
    return mul[mul[mul[inv[r], inv[c]], r], c]


def _extend_counts(
    G: GroupTable, counts: Sequence[int], pool: Sequence[int], steps: int
) -> list[int]:
    """Apply `steps` rounds of new[v] = sum(old[w] for [w, x] = v, x in pool).

    Runs on int64 when the total mass provably fits, otherwise falls back
    to Python integers; both paths produce identical exact counts.
    """
    if steps == 0:
        return [int(c) for c in counts]
    n = G.order
    pool_arr = np.asarray(pool, dtype=np.int32)
    block = _comm_block(G, np.arange(n, dtype=np.int32), pool_arr)
    total = sum(counts) * len(pool) ** steps
    if total < _INT64_SAFE:
        cur = np.asarray([int(c) for c in counts], dtype=np.int64)
        for _ in range(steps):
            new = np.zeros(n, dtype=np.int64)
            for j in range(len(pool)):
                np.add.at(new, block[:, j], cur)
            cur = new
        return [int(v) for v in cur]
    rows = block.tolist()
    cur_list = [int(c) for c in counts]
    for _ in range(steps):
        new_list = [0] * n
        for w, c in enumerate(cur_list):
            if c:
                for v in rows[w]:
                    new_list[v] += c
        cur_list = new_list
    return cur_list


@lru_cache(maxsize=4096)
def comm_distribution(H: SubgroupRef, n: int) -> CommDistribution:
    """Histogram of [x1,...,xn] over H^n, computed without touching H^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    G = H.parent
    counts = [0] * G.order
    for h in H.members:
        counts[h] = 1
    counts = _extend_counts(G, counts, H.members, n - 1)
    return CommDistribution(
        G, tuple(counts), n, source=f"x-block n={n}, |H|={H.order}, G={G.name}"
    )


def extend_by_conjugators(
    dist: CommDistribution, K: SubgroupRef, m: int
) -> CommDistribution:
    """Extend a value histogram by m further slots drawn from K."""
    if K.parent is not dist.group:
        raise ForeignSubgroup("conjugator subgroup must live in the same group")
    if m < 0:
        raise ValueError("m must be >= 0")
    counts = _extend_counts(dist.group, dist.counts, K.members, m)
    return CommDistribution(
        dist.group,
        tuple(counts),
        dist.weight + m,
        source=f"{dist.source} + y-block m={m}, |K|={K.order}",
    )


@lru_cache(maxsize=4096)
def final_counts(H: SubgroupRef, K: SubgroupRef, n: int, m: int) -> tuple[int, ...]:
    """Cached counts of [x1..xn,y1..ym] = g over H^n x K^m, indexed by g."""
    return extend_by_conjugators(comm_distribution(H, n), K, m).counts


@lru_cache(maxsize=1024)
def conjugacy_info(K: SubgroupRef) -> groups.ConjugacyInfo:
    """Cached K-conjugacy orbits of K's parent group."""
    return groups.conjugacy(K.parent, K)


def clear_caches() -> None:
    comm_distribution.cache_clear()
    final_counts.cache_clear()
    conjugacy_info.cache_clear()


def brute_counts(
    G: GroupTable,
    pools: Sequence[Sequence[int]],
    cap: int = BRUTE_CAP_DEFAULT,
    threads: int = 1,
) -> list[int]:
    """Value histogram by literal enumeration of every tuple.

    This is the oracle path: it materializes the folded commutator value
    of each individual tuple (in chunks) and bin-counts them, so it shares
    nothing with the histogram recurrence beyond the group table itself.
    """
    if not pools:
        raise EmptyTuple("need at least one tuple slot")
    total = 1
    for p in pools:
        total *= len(p)
    if total > cap:
        raise BruteCapExceeded(f"{total} tuples exceed the cap {cap}")
    arrs = [np.asarray(p, dtype=np.int32) for p in pools]

    def expand(vals: np.ndarray, rest: list[np.ndarray], acc: np.ndarray) -> None:
        if not rest:
            np.add(acc, np.bincount(vals, minlength=G.order), out=acc)
            return
        nxt = rest[0]
        if vals.size * nxt.size <= _CHUNK:
            expand(_comm_block(G, vals, nxt).ravel(), rest[1:], acc)
        else:
            step = max(1, _CHUNK // max(nxt.size, 1))
            for s in range(0, vals.size, step):
                expand(
                    _comm_block(G, vals[s : s + step], nxt).ravel(), rest[1:], acc
                )

    if threads > 1 and arrs[0].size > 1:
        slices = np.array_split(arrs[0], min(threads, arrs[0].size))
        accs = [np.zeros(G.order, dtype=np.int64) for _ in slices]

        def work(i: int) -> None:
            expand(slices[i], arrs[1:], accs[i])

        with ThreadPoolExecutor(max_workers=len(slices)) as ex:
            list(ex.map(work, range(len(slices))))
        out = np.sum(accs, axis=0)
    else:
        out = np.zeros(G.order, dtype=np.int64)
        expand(arrs[0], arrs[1:], out)
    return [int(v) for v in out]


def prob_brute(
    params: CommParams, cap: int = BRUTE_CAP_DEFAULT, threads: int = 1
) -> ExactProb:
    """Exact probability by enumerating all |H|^n * |K|^m tuples."""
    pools = [params.H.members] * params.n + [params.K.members] * params.m
    counts = brute_counts(params.parent, pools, cap=cap, threads=threads)
    return ExactProb(
        Fraction(counts[params.g], params.space_size), "brute", params
    )


def prob_fast(params: CommParams) -> ExactProb:
    """Exact probability via the histogram recurrence (production path)."""
    counts = final_counts(params.H, params.K, params.n, params.m)
    return ExactProb(
        Fraction(counts[params.g], params.space_size), "distribution", params
    )


def prob_class_formula(params: CommParams, predicate: str = "derived") -> ExactProb:
    """Conjugacy-class evaluation: sum |C_K(w)|^m over solvable x-block values.

    ``predicate`` picks the solvability test for the x-block value w:
    "derived" keeps w*g in the K-class of w, which is exact for m = 1
    under the commutator convention used here; "paper" keeps g^-1*w in
    the K-class of w instead.  Both are exposed so the audit layer can
    compare them; neither is a sound count for m > 1.
    """
    if predicate not in ("derived", "paper"):
        raise ValueError(f"unknown predicate {predicate!r}")
    G = params.parent
    info = conjugacy_info(params.K)
    dist = comm_distribution(params.H, params.n)
    mul, inv = G.mul, G.inv
    g = params.g
    acc = 0
    for w in dist.support():
        t = int(mul[w, g]) if predicate == "derived" else int(mul[inv[g], w])
        if info.class_of[t] == info.class_of[w]:
            acc += dist.counts[w] * int(info.centralizer_order[w]) ** params.m
    return ExactProb(Fraction(acc, params.space_size), "class_formula", params)


def prob_profile(
    H: SubgroupRef, K: SubgroupRef, n: int, m: int
) -> dict[int, ExactProb]:
    """The whole map g -> probability in one histogram pass."""
    counts = final_counts(H, K, n, m)
    size = H.order**n * K.order**m
    return {
        g: ExactProb(Fraction(c, size), "distribution", CommParams(H, K, n, m, g))
        for g, c in enumerate(counts)
    }


def zeta_count(H: SubgroupRef, g: int) -> int:
    """Number of pairs (x, y) in H x G with [x, y] = g.

    Evaluated by the weight-2 class formula; the enumeration and
    histogram paths cross-check it in the test battery.
    """
    G = H.parent
    info = conjugacy_info(groups.full_subgroup(G))
    mul = G.mul
    acc = 0
    for x in H.members:
        if info.class_of[int(mul[x, g])] == info.class_of[x]:
            acc += int(info.centralizer_order[x])
    return acc


def zeta_count_nm(H: SubgroupRef, n: int, m: int, g: int) -> int:
    """Solutions of [x1..xn,y1..ym] = g with x's from H, y's from all of G."""
    counts = final_counts(H, groups.full_subgroup(H.parent), n, m)
    return counts[g]


def commutator_value_set(
    H: SubgroupRef, K: SubgroupRef, n: int, m: int
) -> tuple[int, ...]:
    """All values attained by weight-(n + m) commutators over H^n x K^m."""
    counts = final_counts(H, K, n, m)
    return tuple(v for v, c in enumerate(counts) if c)


def nested_commutator_subgroup(
    H: SubgroupRef, K: SubgroupRef, n: int, m: int
) -> SubgroupRef:
    """The subgroup generated by the commutator value set."""
    return groups.subgroup_closure(
        H.parent, commutator_value_set(H, K, n, m)
    )


def nilpotency_degree(G: GroupTable, H: SubgroupRef, n: int) -> ExactProb:
    """Probability that a weight-(n + 1) commutator with x-block in H is trivial."""
    if H.parent is not G:
        raise ForeignSubgroup("H must be a subgroup of G")
    return prob_fast(CommParams(H, groups.full_subgroup(G), n, 1, 0))


def commutativity_degree(G: GroupTable) -> ExactProb:
    """Probability that two uniform elements of G commute."""
    return nilpotency_degree(G, groups.full_subgroup(G), 1)


def y_set_size(H: SubgroupRef, K: SubgroupRef, n: int) -> int:
    """Tuples in H^n whose folded value has trivial centralizer in K."""
    dist = comm_distribution(H, n)
    info = conjugacy_info(K)
    return sum(
        dist.counts[w]
        for w in dist.support()
        if int(info.centralizer_order[w]) == 1
    )


def prob_to_json(p: ExactProb) -> dict:
    """JSON-ready form of a probability with its full parameter context."""
    if p.params is None:
        raise ValueError("probability carries no parameters to serialize")
    q = p.params
    return {
        "group": q.parent.name,
        "H": list(q.H.members),
        "K": list(q.K.members),
        "n": q.n,
        "m": q.m,
        "g": q.g,
        "method": p.method,
        "value": {"num": str(p.numerator), "den": str(p.denominator)},
    }


def prob_from_json(G: GroupTable, payload: dict) -> ExactProb:
    """Rebuild a probability against an already-constructed group."""
    params = CommParams(
        SubgroupRef(G, payload["H"]),
        SubgroupRef(G, payload["K"]),
        int(payload["n"]),
        int(payload["m"]),
        int(payload["g"]),
    )
    value = Fraction(int(payload["value"]["num"]), int(payload["value"]["den"]))
    return ExactProb(value, str(payload["method"]), params)


def distribution_csv(dist: CommDistribution) -> str:
    lines = ["element_id,count"]
    lines.extend(f"{v},{c}" for v, c in enumerate(dist.counts))
    return "\n".join(lines) + "\n"
