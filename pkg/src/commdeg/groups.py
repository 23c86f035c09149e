"""Finite groups as dense multiplication tables.

Elements are integers ``0..N-1`` with the identity fixed at id 0.  Groups
are closed from permutation generators in breadth-first discovery order,
so ids are reproducible across runs; named families, direct products and
quotients all reduce to the same table representation, which keeps every
higher-level computation a matter of integer array lookups.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    ClosureTooLarge,
    ForeignSubgroup,
    InvalidPermutation,
    NotNormal,
    TrivialGroup,
    UnknownFamily,
)

DEFAULT_MAX_ORDER = 10080

__all__ = [
    "DEFAULT_MAX_ORDER",
    "PermList",
    "GroupTable",
    "SubgroupRef",
    "ConjugacyInfo",
    "cycle_label",
    "close_group",
    "named_group",
    "direct_product",
    "product_projections",
    "subgroup_closure",
    "trivial_subgroup",
    "full_subgroup",
    "is_normal",
    "centralizer_of_element",
    "centralizer_of_subgroup",
    "conjugacy",
    "center",
    "quotient_group",
    "smallest_prime_divisor",
]


def _as_perm(images: Sequence[int], degree: int) -> tuple[int, ...]:
    perm = tuple(int(i) for i in images)
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise InvalidPermutation(
            f"not a permutation of 0..{degree - 1}: {images!r}"
        )
    return perm


@dataclass(frozen=True)
class PermList:
    """Permutation generators on ``{0..degree-1}``, each as its image tuple."""

    degree: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise InvalidPermutation("degree must be >= 1")
        object.__setattr__(
            self, "perms", tuple(_as_perm(p, self.degree) for p in self.perms)
        )


def cycle_label(perm: Sequence[int]) -> str:
    """1-based cycle notation; the identity renders as ``()``."""
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = perm[nxt]
        parts.append("(" + " ".join(str(i + 1) for i in cyc) + ")")
    return "".join(parts) or "()"


class GroupTable:
    """A finite group materialized as an N x N multiplication table.

    ``mul[a, b]`` is the id of the product a*b and ``inv[a]`` the id of
    the inverse; both arrays are read-only after construction.  Identity
    placement and the permutation property of rows and columns are
    validated here; associativity is the closure algorithm's guarantee
    (and is spot-checked exhaustively in the test suite).
    """

    identity = 0

    def __init__(
        self,
        mul: np.ndarray,
        inv: Optional[np.ndarray] = None,
        name: str = "G",
        labels: Optional[Sequence[str]] = None,
    ) -> None:
        mul = np.ascontiguousarray(mul, dtype=np.int32)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1]:
            raise ValueError("multiplication table must be square")
        n = mul.shape[0]
        ids = np.arange(n, dtype=np.int32)
        if not np.array_equal(np.sort(mul, axis=1), np.tile(ids, (n, 1))):
            raise ValueError("each row must permute 0..N-1")
        if not np.array_equal(np.sort(mul, axis=0), np.tile(ids[:, None], (1, n))):
            raise ValueError("each column must permute 0..N-1")
        if not (np.array_equal(mul[0], ids) and np.array_equal(mul[:, 0], ids)):
            raise ValueError("identity must sit at id 0")
        if inv is None:
            inv = np.argmax(mul == 0, axis=1).astype(np.int32)
        else:
            inv = np.ascontiguousarray(inv, dtype=np.int32)
        zeros = np.zeros(n, dtype=np.int32)
        if not (
            np.array_equal(mul[ids, inv], zeros)
            and np.array_equal(mul[inv, ids], zeros)
        ):
            raise ValueError("inverse table inconsistent with multiplication")
        mul.setflags(write=False)
        inv.setflags(write=False)
        self.mul = mul
        self.inv = inv
        self.order = n
        self.name = name
        self.labels = list(labels) if labels is not None else None

    def product(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conjugate(self, a: int, b: int) -> int:
        """b^-1 * a * b."""
        return int(self.mul[self.mul[self.inv[b], a], b])

    def label(self, a: int) -> str:
        if self.labels is None:
            return str(a)
        return self.labels[a]

    def element_order(self, a: int) -> int:
        k, acc = 1, a
        while acc != 0:
            acc = int(self.mul[acc, a])
            k += 1
        return k

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def __repr__(self) -> str:
        return f"<GroupTable {self.name} order {self.order}>"


def close_group(
    gens: PermList,
    max_order: int = DEFAULT_MAX_ORDER,
    name: Optional[str] = None,
) -> GroupTable:
    """Close permutation generators into a full multiplication table.

    Elements are discovered breadth-first from the identity by right
    multiplication with the generators in the order given, which pins the
    id assignment and makes runs reproducible.  The multiplication table
    is then filled column by column along the discovery tree, so the cost
    is O(N^2) array work rather than O(N^2) permutation compositions.
    """
    d = gens.degree
    ident = tuple(range(d))
    elems: list[tuple[int, ...]] = [ident]
    index: dict[tuple[int, ...], int] = {ident: 0}
    edges: list[tuple[int, int]] = [(-1, -1)]
    gen_to: list[list[int]] = [[] for _ in gens.perms]
    cur = 0
    while cur < len(elems):
        w = elems[cur]
        for k, p in enumerate(gens.perms):
            nxt = tuple(w[p[i]] for i in range(d))
            j = index.get(nxt)
            if j is None:
                if len(elems) >= max_order:
                    raise ClosureTooLarge(
                        f"closure exceeds the order cap {max_order}"
                    )
                j = len(elems)
                index[nxt] = j
                elems.append(nxt)
                edges.append((cur, k))
            gen_to[k].append(j)
        cur += 1
    n = len(elems)
    mul = np.empty((n, n), dtype=np.int32)
    mul[:, 0] = np.arange(n, dtype=np.int32)
    gen_cols = [np.asarray(col, dtype=np.int32) for col in gen_to]
    for j in range(1, n):
        i, k = edges[j]
        mul[:, j] = gen_cols[k][mul[:, i]]
    labels = [cycle_label(e) for e in elems]
    return GroupTable(mul, name=name or f"perm{d}", labels=labels)


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def named_group(
    family: str, param: int, max_order: int = DEFAULT_MAX_ORDER
) -> GroupTable:
    """Build a member of a named family: C n, D n (order 2n), S n, A n, Q8."""
    fam = family.upper()
    if fam == "Q":
        if param != 8:
            raise UnknownFamily("only Q8 is available in the Q family")
        expected = 8
        if expected > max_order:
            raise ClosureTooLarge(f"order {expected} exceeds the cap {max_order}")
        gens = PermList(8, ((2, 3, 1, 0, 6, 7, 5, 4), (4, 5, 7, 6, 1, 0, 2, 3)))
        g = close_group(gens, max_order=max_order, name="Q8")
    elif fam == "C":
        if param < 1:
            raise UnknownFamily("C n needs n >= 1")
        expected = param
        if expected > max_order:
            raise ClosureTooLarge(f"order {expected} exceeds the cap {max_order}")
        if param == 1:
            gens = PermList(1, ())
        else:
            gens = PermList(param, (tuple((i + 1) % param for i in range(param)),))
        g = close_group(gens, max_order=max_order, name=f"C{param}")
    elif fam == "D":
        if param < 1:
            raise UnknownFamily("D n needs n >= 1")
        expected = 2 * param
        if expected > max_order:
            raise ClosureTooLarge(f"order {expected} exceeds the cap {max_order}")
        if param == 1:
            gens = PermList(2, ((1, 0),))
        elif param == 2:
            gens = PermList(4, ((1, 0, 2, 3), (0, 1, 3, 2)))
        else:
            rot = tuple((i + 1) % param for i in range(param))
            ref = tuple((param - i) % param for i in range(param))
            gens = PermList(param, (rot, ref))
        g = close_group(gens, max_order=max_order, name=f"D{param}")
    elif fam == "S":
        if param < 1:
            raise UnknownFamily("S n needs n >= 1")
        expected = _factorial(param)
        if expected > max_order:
            raise ClosureTooLarge(f"order {expected} exceeds the cap {max_order}")
        if param == 1:
            gens = PermList(1, ())
        elif param == 2:
            gens = PermList(2, ((1, 0),))
        else:
            cyc = tuple((i + 1) % param for i in range(param))
            gens = PermList(param, (cyc, (1, 0) + tuple(range(2, param))))
        g = close_group(gens, max_order=max_order, name=f"S{param}")
    elif fam == "A":
        if param < 1:
            raise UnknownFamily("A n needs n >= 1")
        expected = max(1, _factorial(param) // 2)
        if expected > max_order:
            raise ClosureTooLarge(f"order {expected} exceeds the cap {max_order}")
        if param <= 2:
            gens = PermList(max(param, 1), ())
        elif param == 3:
            gens = PermList(3, ((1, 2, 0),))
        else:
            three = (1, 2, 0) + tuple(range(3, param))
            if param % 2 == 1:
                big = tuple((i + 1) % param for i in range(param))
            else:
                big = (0,) + tuple(2 + i for i in range(param - 2)) + (1,)
            gens = PermList(param, (three, big))
        g = close_group(gens, max_order=max_order, name=f"A{param}")
    else:
        raise UnknownFamily(f"unknown family {family!r}")
    if g.order != expected:
        raise AssertionError(
            f"{g.name}: closed to order {g.order}, expected {expected}"
        )
    return g


def direct_product(
    g1: GroupTable, g2: GroupTable, max_order: int = DEFAULT_MAX_ORDER
) -> GroupTable:
    """Componentwise product; the pair (a, b) gets id a*|G2| + b."""
    n1, n2 = g1.order, g2.order
    if n1 * n2 > max_order:
        raise ClosureTooLarge(f"order {n1 * n2} exceeds the cap {max_order}")
    m1 = g1.mul.astype(np.int64)
    mul = (m1[:, None, :, None] * n2 + g2.mul[None, :, None, :]).reshape(
        n1 * n2, n1 * n2
    )
    inv = np.add.outer(g1.inv.astype(np.int64) * n2, g2.inv).reshape(-1)
    labels = [
        f"({g1.label(a)},{g2.label(b)})" for a in range(n1) for b in range(n2)
    ]
    return GroupTable(
        mul.astype(np.int32),
        inv.astype(np.int32),
        name=f"{g1.name}x{g2.name}",
        labels=labels,
    )


def product_projections(
    g1: GroupTable, g2: GroupTable
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate projections for ids of ``direct_product(g1, g2)``."""
    n1, n2 = g1.order, g2.order
    left = np.repeat(np.arange(n1, dtype=np.int32), n2)
    right = np.tile(np.arange(n2, dtype=np.int32), n1)
    return left, right


class SubgroupRef:
    """A subgroup of ``parent`` stored as its sorted member ids.

    Closure under multiplication and inversion is validated unless the
    construction guarantees it; normality is computed lazily and cached.
    """

    __slots__ = ("parent", "members", "_member_set", "_normal")

    def __init__(
        self, parent: GroupTable, members: Iterable[int], _checked: bool = False
    ) -> None:
        mem = tuple(sorted({int(x) for x in members}))
        if not mem:
            mem = (0,)
        if mem[0] < 0 or mem[-1] >= parent.order:
            raise ValueError("member id out of range")
        if 0 not in mem:
            raise ValueError("a subgroup must contain the identity (id 0)")
        if not _checked:
            arr = np.asarray(mem, dtype=np.int32)
            block = parent.mul[np.ix_(arr, arr)]
            if not np.isin(block, arr).all():
                raise ValueError("member set is not closed under multiplication")
            if not np.isin(parent.inv[arr], arr).all():
                raise ValueError("member set is not closed under inversion")
        self.parent = parent
        self.members = mem
        self._member_set = frozenset(mem)
        self._normal: Optional[bool] = None

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def is_full(self) -> bool:
        return len(self.members) == self.parent.order

    @property
    def is_trivial(self) -> bool:
        return len(self.members) == 1

    def __contains__(self, x: int) -> bool:
        return x in self._member_set

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SubgroupRef)
            and other.parent is self.parent
            and other.members == self.members
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        return f"<SubgroupRef order {self.order} of {self.parent.name}>"


def subgroup_closure(G: GroupTable, seed: Iterable[int]) -> SubgroupRef:
    """Smallest subgroup of G containing all ids in ``seed``."""
    gens = sorted({int(x) for x in seed})
    for x in gens:
        if not 0 <= x < G.order:
            raise ValueError(f"element id {x} out of range for {G.name}")
    mul = G.mul
    members = {0}
    frontier = [0]
    while frontier:
        fresh = []
        for w in frontier:
            for s in gens:
                t = int(mul[w, s])
                if t not in members:
                    members.add(t)
                    fresh.append(t)
        frontier = fresh
    return SubgroupRef(G, members, _checked=True)


def trivial_subgroup(G: GroupTable) -> SubgroupRef:
    return SubgroupRef(G, (0,), _checked=True)


def full_subgroup(G: GroupTable) -> SubgroupRef:
    return SubgroupRef(G, range(G.order), _checked=True)


def _require_same_parent(G: GroupTable, H: SubgroupRef) -> None:
    if H.parent is not G:
        raise ForeignSubgroup(
            f"subgroup of {H.parent.name} used with group {G.name}"
        )


def is_normal(G: GroupTable, H: SubgroupRef) -> bool:
    """Whether g*h*g^-1 stays in H for every g in G; cached on H."""
    _require_same_parent(G, H)
    if H._normal is None:
        arr = np.asarray(H.members, dtype=np.int32)
        ok = True
        for h in H.members:
            conj = G.mul[G.mul[:, h], G.inv]
            if not np.isin(conj, arr, assume_unique=False).all():
                ok = False
                break
        H._normal = ok
    return H._normal


def centralizer_of_element(G: GroupTable, K: SubgroupRef, w: int) -> SubgroupRef:
    """C_K(w): the members of K commuting with w."""
    _require_same_parent(G, K)
    if not 0 <= w < G.order:
        raise ValueError(f"element id {w} out of range")
    karr = np.asarray(K.members, dtype=np.int32)
    mask = G.mul[karr, w] == G.mul[w, karr]
    return SubgroupRef(G, karr[mask], _checked=True)


def centralizer_of_subgroup(H: SubgroupRef, K: SubgroupRef) -> SubgroupRef:
    """C_H(K): the members of H commuting with every member of K."""
    if H.parent is not K.parent:
        raise ForeignSubgroup("H and K must share a parent group")
    G = H.parent
    harr = np.asarray(H.members, dtype=np.int32)
    karr = np.asarray(K.members, dtype=np.int32)
    block = G.mul[np.ix_(harr, karr)] == G.mul[np.ix_(karr, harr)].T
    return SubgroupRef(G, harr[block.all(axis=1)], _checked=True)


@dataclass(frozen=True)
class ConjugacyInfo:
    """Orbits of a group under conjugation by a subgroup K.

    ``classes`` are sorted member tuples in order of least member;
    ``class_of[x]`` indexes into ``classes``; ``centralizer_order[x]``
    is |C_K(x)|, counted directly rather than via orbit sizes so the
    orbit-stabilizer identity stays an independent test.
    """

    classes: tuple[tuple[int, ...], ...]
    class_of: np.ndarray
    centralizer_order: np.ndarray


def conjugacy(G: GroupTable, K: SubgroupRef) -> ConjugacyInfo:
    """Partition G into K-conjugacy orbits."""
    _require_same_parent(G, K)
    n = G.order
    karr = np.asarray(K.members, dtype=np.int32)
    kinv = G.inv[karr]
    class_of = np.full(n, -1, dtype=np.int32)
    classes: list[tuple[int, ...]] = []
    for x in range(n):
        if class_of[x] >= 0:
            continue
        orbit = np.unique(G.mul[G.mul[kinv, x], karr])
        idx = len(classes)
        class_of[orbit] = idx
        classes.append(tuple(int(v) for v in orbit))
    cent = np.empty(n, dtype=np.int64)
    for x in range(n):
        cent[x] = int((G.mul[karr, x] == G.mul[x, karr]).sum())
    class_of.setflags(write=False)
    cent.setflags(write=False)
    return ConjugacyInfo(tuple(classes), class_of, cent)


def center(G: GroupTable) -> SubgroupRef:
    """Z(G) by direct commuting check against the whole table."""
    mask = (G.mul == G.mul.T).all(axis=1)
    return SubgroupRef(G, np.flatnonzero(mask), _checked=True)


def quotient_group(
    G: GroupTable, N: SubgroupRef
) -> tuple[GroupTable, np.ndarray]:
    """G/N for normal N, with the projection array element -> coset id.

    Cosets are ordered by their least member id, which puts N itself
    (the quotient identity) at id 0.
    """
    if not is_normal(G, N):
        raise NotNormal(f"subgroup of order {N.order} is not normal in {G.name}")
    narr = np.asarray(N.members, dtype=np.int32)
    cosmin = G.mul[:, narr].min(axis=1)
    reps = np.unique(cosmin)
    rank = {int(r): i for i, r in enumerate(reps)}
    proj = np.asarray([rank[int(v)] for v in cosmin], dtype=np.int32)
    mulq = proj[G.mul[np.ix_(reps, reps)]]
    labels = [f"{G.label(int(r))}N" for r in reps]
    table = GroupTable(mulq, name=f"{G.name}/N{N.order}", labels=labels)
    proj.setflags(write=False)
    return table, proj


def smallest_prime_divisor(G: GroupTable) -> int:
    if G.order == 1:
        raise TrivialGroup("the trivial group has no prime divisors")
    n = G.order
    if n % 2 == 0:
        return 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return n
