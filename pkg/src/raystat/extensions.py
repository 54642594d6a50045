"""Explicit enumeration of homomorphisms, extensions and automorphisms.

These routines work element by element on small concrete modules.  They
are deliberately naive: their job is to cross-check the closed formulas in
:mod:`raystat.algebra` and to produce orbit decompositions that have no
closed form.

An extension ``0 -> B -> E -> C -> 0`` of C2-modules is encoded by choosing
lifts ``e_i`` of the cyclic generators of C (order ``c_i``, eigen-sign
``s_i``) and recording the carries ``beta_i = c_i * e_i`` and the defects
``gamma_i = g(e_i) - s_i * e_i``, both in B.  Changing the lifts by
``b_i`` moves ``(beta_i, gamma_i)`` by ``(c_i b_i, g(b_i) - s_i b_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .algebra import C2FinAbGroup, FinAbGroup

DEFAULT_BOUND = 3**8

Element = tuple[int, ...]


class BruteForceBoundError(ValueError):
    """Raised when an enumeration would exceed its configured size."""


@dataclass(frozen=True)
class ConcreteModule:
    """Z/d_1 x ... x Z/d_k where the involution multiplies coordinate i by signs[i]."""

    orders: tuple[int, ...]
    signs: tuple[int, ...]

    @classmethod
    def from_group(cls, G: FinAbGroup) -> "ConcreteModule":
        return cls(G.invariants, (1,) * len(G.invariants))

    @classmethod
    def from_c2(cls, M: C2FinAbGroup) -> "ConcreteModule":
        return cls(
            M.plus.invariants + M.minus.invariants,
            (1,) * len(M.plus.invariants) + (-1,) * len(M.minus.invariants),
        )

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def zero(self) -> Element:
        return (0,) * len(self.orders)

    def elements(self) -> Iterable[Element]:
        return product(*(range(d) for d in self.orders))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def scale(self, n: int, x: Element) -> Element:
        return tuple((n * a) % d for a, d in zip(x, self.orders))

    def sigma(self, x: Element) -> Element:
        return tuple((s * a) % d for a, s, d in zip(x, self.signs, self.orders))

    def basis(self) -> list[Element]:
        k = len(self.orders)
        return [tuple(int(i == j) for j in range(k)) for i in range(k)]

    def apply(self, images: Sequence[Element], x: Element) -> Element:
        """Image of x under the endomorphism sending basis vector i to images[i]."""
        out = self.zero
        for a, img in zip(x, images):
            if a:
                out = self.add(out, self.scale(a, img))
        return out


def _tuple_add(M: ConcreteModule, xs: Sequence[Element], ys: Sequence[Element]) -> tuple[Element, ...]:
    return tuple(M.add(x, y) for x, y in zip(xs, ys))


# ---------------------------------------------------------------------------
# Homomorphisms and automorphisms


def hom_count(A: ConcreteModule, B: ConcreteModule, equivariant: bool = True) -> int:
    """Count homomorphisms A -> B by enumerating admissible generator images."""
    total = 1
    for c, s in zip(A.orders, A.signs):
        ok = 0
        for x in B.elements():
            if any(x) and B.scale(c, x) != B.zero:
                continue
            if equivariant and B.sigma(x) != B.scale(s, x):
                continue
            ok += 1
        total *= ok
    return total


def automorphisms(M: ConcreteModule, equivariant: bool = True, bound: int = 10**6) -> list[tuple[Element, ...]]:
    """All automorphisms of M as tuples of basis images, found by exhaustive search."""
    choices = []
    for c, s in zip(M.orders, M.signs):
        opts = [
            x
            for x in M.elements()
            if M.scale(c, x) == M.zero and (not equivariant or M.sigma(x) == M.scale(s, x))
        ]
        choices.append(opts)
    if math.prod(len(o) for o in choices) > bound:
        raise BruteForceBoundError("too many candidate endomorphisms")
    out = []
    size = M.size
    elems = list(M.elements())
    for imgs in product(*choices):
        if len({M.apply(imgs, x) for x in elems}) == size:
            out.append(imgs)
    return out


def _generated_size(M: ConcreteModule, gens: Sequence[Element]) -> int:
    seen = {M.zero}
    frontier = [M.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = M.add(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def aut_count(G: FinAbGroup, endo_bound: int = 2 * 10**5) -> int:
    """#Aut(G) without any closed formula.

    Small cases enumerate every endomorphism.  Larger ones use that the
    automorphism group acts simply transitively on images of the standard
    basis: the count is the product over i of the number of admissible
    images of basis vector i once vectors 1..i-1 are fixed, where
    admissible means the partial assignment extends to an automorphism
    (decided by a depth-first search).
    """
    M = ConcreteModule.from_group(G)
    k = len(M.orders)
    if k == 0:
        return 1
    cand = [[x for x in M.elements() if M.scale(c, x) == M.zero] for c in M.orders]
    if math.prod(len(o) for o in cand) <= endo_bound:
        return len(automorphisms(M, equivariant=False, bound=endo_bound))
    size = M.size
    target = [math.prod(M.orders[: i + 1]) for i in range(k)]

    def extendable(prefix: list[Element]) -> bool:
        i = len(prefix)
        if _generated_size(M, prefix) != target[i - 1]:
            return False
        if i == k:
            return True
        return any(extendable(prefix + [x]) for x in cand[i])

    basis = M.basis()
    total = 1
    for i in range(k):
        total *= sum(1 for x in cand[i] if extendable(basis[:i] + [x]))
    assert size == target[-1]
    return total


# ---------------------------------------------------------------------------
# Extensions


class ExtensionSpace:
    """Extension classes Ext^1(C, B), enumerated at the level of cocycle data.

    With ``equivariant=False`` the involutions are ignored and the
    classes are extensions of plain abelian groups.
    """

    def __init__(self, C: ConcreteModule, B: ConcreteModule, equivariant: bool = True, bound: int = DEFAULT_BOUND):
        if C.size * B.size > bound:
            raise BruteForceBoundError(f"#C*#B = {C.size * B.size} exceeds bound {bound}")
        self.C, self.B, self.equivariant = C, B, equivariant
        k = len(C.orders)
        B_elems = list(B.elements())
        cocycles = []
        if equivariant:
            per_gen = []
            for c, s in zip(C.orders, C.signs):
                ok = []
                for beta in B_elems:
                    for gamma in B_elems:
                        lhs = B.add(B.scale(s, beta), B.scale(c, gamma))
                        if lhs != B.sigma(beta):
                            continue
                        if B.add(B.sigma(gamma), B.scale(s, gamma)) != B.zero:
                            continue
                        ok.append((beta, gamma))
                per_gen.append(ok)
            for combo in product(*per_gen):
                cocycles.append(tuple(combo))
        else:
            for combo in product(B_elems, repeat=k):
                cocycles.append(tuple((beta, B.zero) for beta in combo))
        self.cocycles = cocycles
        index = {z: i for i, z in enumerate(cocycles)}
        self._index = index
        # coboundary moves for basis shifts b_i = t * (basis of B)
        moves = []
        for i, (c, s) in enumerate(zip(C.orders, C.signs)):
            for b in B.basis():
                db = (B.scale(c, b), B.add(B.sigma(b), B.scale(-s, b)) if equivariant else B.zero)
                moves.append((i, db))
        parent = list(range(len(cocycles)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for z, zi in index.items():
            for i, (db, dg) in moves:
                w = list(z)
                beta, gamma = w[i]
                w[i] = (B.add(beta, db), B.add(gamma, dg))
                wi = index[tuple(w)]
                a, b_ = find(zi), find(wi)
                if a != b_:
                    parent[a] = b_
        roots = {}
        self.class_of = []
        for zi in range(len(cocycles)):
            r = find(zi)
            self.class_of.append(roots.setdefault(r, len(roots)))
        self.size = len(roots)
        self.representatives = [None] * self.size
        for zi, cl in enumerate(self.class_of):
            if self.representatives[cl] is None:
                self.representatives[cl] = cocycles[zi]

    def classify(self, cocycle) -> int:
        return self.class_of[self._index[tuple(cocycle)]]

    def split_class(self) -> int:
        return self.classify(tuple((self.B.zero, self.B.zero) for _ in self.C.orders))

    def push(self, images: Sequence[Element], cocycle):
        """Push forward along the automorphism of B with the given basis images."""
        B = self.B
        return tuple((B.apply(images, beta), B.apply(images, gamma)) for beta, gamma in cocycle)

    def pull(self, images: Sequence[Element], cocycle):
        """Pull back along the automorphism of C with the given basis images."""
        C, B = self.C, self.B
        out = []
        for i, img in enumerate(images):
            beta = gamma = B.zero
            for j, m in enumerate(img):
                if not m:
                    continue
                ratio, rem = divmod(C.orders[i] * m, C.orders[j])
                assert rem == 0
                bj, gj = cocycle[j]
                beta = B.add(beta, B.scale(ratio, bj))
                gamma = B.add(gamma, B.scale(m, gj))
            out.append((beta, gamma))
        return tuple(out)

    def orbits(self, aut_B: Sequence[Sequence[Element]], aut_C: Sequence[Sequence[Element]]) -> list[list[int]]:
        """Orbits of the classes under the group generated by the given automorphisms."""
        parent = list(range(self.size))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for cl, rep in enumerate(self.representatives):
            for a in aut_B:
                other = self.classify(self.push(a, rep))
                parent[find(cl)] = find(other)
            for c in aut_C:
                other = self.classify(self.pull(c, rep))
                parent[find(cl)] = find(other)
        groups: dict[int, list[int]] = {}
        for cl in range(self.size):
            groups.setdefault(find(cl), []).append(cl)
        return sorted(groups.values(), key=lambda g: (len(g), g))


def ext_count(C: ConcreteModule, B: ConcreteModule, equivariant: bool = True, bound: int = DEFAULT_BOUND) -> int:
    return ExtensionSpace(C, B, equivariant, bound).size


def cocycle_ext_count(A: FinAbGroup, B: FinAbGroup) -> int:
    """#Ext^1(A, B) from symmetric 2-cocycles on A modulo coboundaries.

    Counts solutions of the cocycle and homomorphism equations as integer
    linear systems over each cyclic factor of B.  Only for tiny A.
    """
    from .algebra import smith_normal_form

    elems = list(ConcreteModule.from_group(A).elements())
    MA = ConcreteModule.from_group(A)
    n = len(elems)
    idx = {x: i for i, x in enumerate(elems)}

    def pair(x, y):
        return idx[x] * n + idx[y]

    rows = []
    for x in elems:
        for y in elems:
            if idx[x] < idx[y]:
                r = [0] * (n * n)
                r[pair(x, y)] += 1
                r[pair(y, x)] -= 1
                rows.append(r)
            for z in elems:
                r = [0] * (n * n)
                r[pair(x, y)] += 1
                r[pair(MA.add(x, y), z)] += 1
                r[pair(x, MA.add(y, z))] -= 1
                r[pair(y, z)] -= 1
                if any(r):
                    rows.append(r)
    hom_rows = []
    for x in elems:
        for y in elems:
            r = [0] * n
            r[idx[MA.add(x, y)]] += 1
            r[idx[x]] -= 1
            r[idx[y]] -= 1
            if any(r):
                hom_rows.append(r)

    def solutions(system, width, b):
        if not system:
            return b**width
        diag = smith_normal_form(system).diagonal
        out = b ** (width - len([d for d in diag if d]))
        for d in diag:
            if d:
                out *= math.gcd(d, b)
        return out

    total = 1
    for b in B.invariants:
        z = solutions(rows, n * n, b)
        hom = solutions(hom_rows, n, b)
        coboundaries = b**n // hom
        total *= z // coboundaries
    return total
