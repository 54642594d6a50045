"""Finite abelian groups, Smith normal form and Cohen-Lenstra weights.

Everything here works on exact Python integers.  Groups are stored in
invariant-factor form ``d1 | d2 | ... | dk`` so that two isomorphic groups
compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import mpmath
from sympy import factorint

# Private high-precision context so callers' global mpmath settings are untouched.
MP = mpmath.MPContext()
MP.dps = 50

ETA_MIN_TERMS = 40
ETA_CUTOFF = mpmath.mpf("1e-30")


def _prime_powers(n: int) -> dict[int, int]:
    return {int(p): int(e) for p, e in factorint(n).items()} if n > 1 else {}


def _partition_to_invariants(parts: dict[int, list[int]]) -> tuple[int, ...]:
    """Combine per-prime exponent lists into an invariant-factor chain."""
    width = max((len(v) for v in parts.values()), default=0)
    out = [1] * width
    for p, exps in parts.items():
        exps = sorted(exps, reverse=True)
        for i, e in enumerate(exps):
            out[width - 1 - i] *= p**e
    return tuple(d for d in out if d > 1)


@dataclass(frozen=True)
class FinAbGroup:
    """A finite abelian group, canonicalized to invariant factors.

    Any list of cyclic orders is accepted; ``FinAbGroup((2, 3))`` and
    ``FinAbGroup((6,))`` are the same group.
    """

    invariants: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        orders = tuple(int(d) for d in self.invariants)
        if any(d < 1 for d in orders):
            raise ValueError(f"cyclic orders must be positive, got {orders}")
        parts: dict[int, list[int]] = {}
        for d in orders:
            for p, e in _prime_powers(d).items():
                parts.setdefault(p, []).append(e)
        object.__setattr__(self, "invariants", _partition_to_invariants(parts))

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls(())

    @property
    def order(self) -> int:
        return math.prod(self.invariants)

    @property
    def exponent(self) -> int:
        return self.invariants[-1] if self.invariants else 1

    def is_trivial(self) -> bool:
        return not self.invariants

    def primes(self) -> list[int]:
        return sorted(_prime_powers(self.exponent))

    def ell_part(self, ell: int) -> "FinAbGroup":
        """The ell-primary component."""
        out = []
        for d in self.invariants:
            q = 1
            while d % ell == 0:
                d //= ell
                q *= ell
            out.append(q)
        return FinAbGroup(tuple(out))

    def torsion_size(self, n: int) -> int:
        """Order of the n-torsion subgroup G[n]."""
        return math.prod(math.gcd(n, d) for d in self.invariants)

    def rank(self, p: int) -> int:
        """Dimension of G/pG over the field with p elements."""
        return sum(1 for d in self.invariants if d % p == 0)

    def p_exponents(self, p: int) -> list[int]:
        """Exponents of the p-part as an ascending partition."""
        out = []
        for d in self.invariants:
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if e:
                out.append(e)
        return sorted(out)

    def __mul__(self, other: "FinAbGroup") -> "FinAbGroup":
        return FinAbGroup(self.invariants + other.invariants)

    def __str__(self) -> str:
        if not self.invariants:
            return "trivial"
        return " x ".join(f"Z/{d}" for d in self.invariants)

    def to_json(self) -> list[int]:
        return list(self.invariants)


@dataclass(frozen=True)
class C2FinAbGroup:
    """An odd-order module over the group ring of C2, split into eigenparts."""

    plus: FinAbGroup = field(default_factory=FinAbGroup)
    minus: FinAbGroup = field(default_factory=FinAbGroup)

    def __post_init__(self) -> None:
        if self.plus.order % 2 == 0 or self.minus.order % 2 == 0:
            raise ValueError("C2-modules must have odd order")

    @property
    def order(self) -> int:
        return self.plus.order * self.minus.order

    def ell_part(self, ell: int) -> "C2FinAbGroup":
        return C2FinAbGroup(self.plus.ell_part(ell), self.minus.ell_part(ell))

    def __str__(self) -> str:
        return f"(+: {self.plus}, -: {self.minus})"


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """Result of :func:`smith_normal_form`: ``U * M * V == diag``."""

    diagonal: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def cokernel(self) -> tuple[FinAbGroup, int]:
        """Torsion part and free rank of Z^cols / rowspace(M)."""
        nonzero = [d for d in self.diagonal if d != 0]
        return FinAbGroup(tuple(nonzero)), self.cols - len(nonzero)


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Smith normal form with unimodular transforms, over exact integers.

    ``cols`` is only needed for a matrix with no rows.
    """
    A = [[int(x) for x in row] for row in matrix]
    n = len(A)
    k = len(A[0]) if n else (cols or 0)
    if any(len(row) != k for row in A):
        raise ValueError("ragged matrix")
    U = _identity(n)
    V = _identity(k)

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        for M in (A, U):
            rd, rs = M[dst], M[src]
            for c in range(len(rd)):
                if rs[c]:
                    rd[c] += q * rs[c]

    def add_col(dst: int, src: int, q: int) -> None:
        for M in (A, V):
            for row in M:
                if row[src]:
                    row[dst] += q * row[src]

    for t in range(min(n, k)):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, k):
                    v = A[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, n):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, k):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, k) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            for M in (A, U):
                M[t] = [-x for x in M[t]]
    diag = tuple(A[i][i] for i in range(min(n, k)))
    return SmithForm(diag, tuple(map(tuple, U)), tuple(map(tuple, V)), n, k)


def snf(matrix: Sequence[Sequence[int]], cols: int | None = None) -> tuple[int, ...]:
    """Nonzero invariant factors d1 | d2 | ... | dr of an integer matrix."""
    return tuple(d for d in smith_normal_form(matrix, cols).diagonal if d != 0)


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    width = len(B[0]) if B else 0
    return [[sum(A[i][t] * B[t][j] for t in range(inner)) for j in range(width)] for i in range(len(A))]


class Presentation:
    """A finitely presented abelian group Z^n / rowspace(relations).

    Coordinates of an element x in Z^n are ``x * V`` reduced modulo the
    invariant factors, which gives a canonical normal form.
    """

    def __init__(self, relations: Sequence[Sequence[int]], ngens: int):
        self.ngens = ngens
        rows = [list(r) + [0] * (ngens - len(r)) for r in relations]
        self.smith = smith_normal_form(rows, ngens)
        diag = list(self.smith.diagonal) + [0] * (ngens - len(self.smith.diagonal))
        self.moduli = diag
        self.group, self.free_rank = self.smith.cokernel()

    def coords(self, x: Sequence[int]) -> tuple[int, ...]:
        """Normal form of x: one entry per nontrivial invariant factor (free parts unreduced)."""
        V = self.smith.V
        out = []
        for j, d in enumerate(self.moduli):
            if d == 1:
                continue
            s = sum(x[i] * V[i][j] for i in range(min(len(x), self.ngens)))
            out.append(s % d if d else s)
        return tuple(out)

    @property
    def cyclic_orders(self) -> list[int]:
        return [d for d in self.moduli if d != 1]

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.coords(x))

    def generator_vectors(self) -> list[list[int]]:
        """Vectors in Z^n for the SNF basis elements (columns of V^-1 rows)."""
        Vinv = _inverse_unimodular(self.smith.V)
        return [list(Vinv[j]) for j, d in enumerate(self.moduli) if d != 1]

    def kernel(self, images: Sequence[Sequence[int]]) -> list[list[int]]:
        """Basis of {c in Z^r : sum c_i * images_i == 0} as a list of vectors."""
        r = len(images)
        orders = self.cyclic_orders
        m = len(orders)
        if r == 0:
            return []
        Y = [list(self.coords(v)) for v in images]
        block = Y + [[orders[j] if i == j else 0 for j in range(m)] for i in range(m)]
        if m == 0:
            return [[int(i == j) for j in range(r)] for i in range(r)]
        sf = smith_normal_form(block)
        basis = [list(sf.U[i][:r]) for i in range(sf.rank, r + m)]
        return hermite_rows(basis, r)

    def subgroup_index(self, images: Sequence[Sequence[int]]) -> int:
        """Index of the subgroup generated by ``images`` (0 if infinite)."""
        if self.free_rank:
            raise ValueError("index only defined for finite groups")
        orders = self.cyclic_orders
        m = len(orders)
        rows = [list(self.coords(v)) for v in images]
        rows += [[orders[j] if i == j else 0 for j in range(m)] for i in range(m)]
        if m == 0:
            return 1
        return math.prod(snf(rows, m)) if len(snf(rows, m)) == m else 0


def _inverse_unimodular(M: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(M)
    A = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = [[int(x) for x in row[n:]] for row in A]
    return out


def hermite_rows(basis: Sequence[Sequence[int]], width: int) -> list[list[int]]:
    """Row-style Hermite normal form of a full-rank lattice basis (small entries)."""
    A = [list(r) for r in basis if any(r)]
    out: list[list[int]] = []
    row0 = 0
    for c in range(width):
        while True:
            nz = [i for i in range(row0, len(A)) if A[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            A[row0], A[piv] = A[piv], A[row0]
            done = True
            for i in range(row0 + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[row0][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[row0])]
                    done = done and A[i][c] == 0
            if done:
                break
        if row0 < len(A) and A[row0][c]:
            if A[row0][c] < 0:
                A[row0] = [-x for x in A[row0]]
            for i in range(row0):
                q = A[i][c] // A[row0][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[row0])]
            row0 += 1
    out = [r for r in A[:row0]]
    return out


# ---------------------------------------------------------------------------
# Polycyclic subgroup builder


class SubgroupBuilder:
    """Grow a subgroup of a black-box abelian group one generator at a time.

    ``canon`` maps an element to a canonical representative, ``members``
    lists the hashable keys to register for that representative's class
    (several when a class is a whole reduction cycle).  Every element of
    the subgroup built so far is stored with an exponent vector, so
    membership tests and discrete logs are dictionary lookups.
    """

    def __init__(
        self,
        identity: Hashable,
        op: Callable[[Hashable, Hashable], Hashable],
        canon: Callable[[Hashable], Hashable] = lambda x: x,
        members: Callable[[Hashable], Iterable[Hashable]] = lambda x: (x,),
        limit: int | None = None,
    ):
        self._op = op
        self._canon = canon
        self._members = members
        self.limit = limit
        self.table: dict[Hashable, tuple[int, ...]] = {}
        self.elements: list[tuple[Hashable, tuple[int, ...]]] = []
        self.generators: list[Hashable] = []
        self.relations: list[list[int]] = []
        self.identity = canon(identity)
        self._register(self.identity, ())

    def _register(self, x: Hashable, vec: tuple[int, ...]) -> None:
        for key in self._members(x):
            self.table[key] = vec
        self.elements.append((x, vec))

    @property
    def order(self) -> int:
        return len(self.elements)

    def dlog(self, x: Hashable) -> tuple[int, ...] | None:
        """Exponent vector of x, padded to the current generator count; None if outside."""
        vec = self.table.get(self._canon(x))
        if vec is None:
            return None
        return vec + (0,) * (len(self.generators) - len(vec))

    def add(self, g: Hashable) -> bool:
        """Adjoin g; returns True when it enlarged the subgroup."""
        g = self._canon(g)
        if g in self.table:
            return False
        k = len(self.generators)
        base = list(self.elements)
        x, j = g, 1
        while x not in self.table:
            for h, hv in base:
                y = x if h == self.identity else self._canon(self._op(x, h))
                self._register(y, hv + (0,) * (k - len(hv)) + (j,))
            if self.limit is not None and len(self.elements) > self.limit:
                raise OverflowError("subgroup exceeds configured size limit")
            x = self._canon(self._op(x, g))
            j += 1
        prev = self.table[x]
        self.generators.append(g)
        self.relations.append([-v for v in prev] + [0] * (k - len(prev)) + [j])
        return True

    def presentation(self) -> Presentation:
        n = len(self.generators)
        return Presentation([r + [0] * (n - len(r)) for r in self.relations], n)


# ---------------------------------------------------------------------------
# Counting homomorphisms, extensions and automorphisms


def _p_group_aut_order(p: int, exps: Sequence[int]) -> int:
    """Automorphisms of the p-group with ascending exponent partition ``exps``."""
    e = sorted(exps)
    n = len(e)
    if n == 0:
        return 1
    d = [max(l for l in range(1, n + 1) if e[l - 1] == e[k - 1]) for k in range(1, n + 1)]
    c = [min(l for l in range(1, n + 1) if e[l - 1] == e[k - 1]) for k in range(1, n + 1)]
    out = 1
    for k in range(1, n + 1):
        out *= p ** d[k - 1] - p ** (k - 1)
    for j in range(1, n + 1):
        out *= p ** (e[j - 1] * (n - d[j - 1]))
    for i in range(1, n + 1):
        out *= p ** ((e[i - 1] - 1) * (n - c[i - 1] + 1))
    return out


def aut_order(G: FinAbGroup) -> int:
    """Order of Aut(G), as a product of p-group counts."""
    return math.prod(_p_group_aut_order(p, G.p_exponents(p)) for p in G.primes())


def hom_size(A: FinAbGroup, B: FinAbGroup) -> int:
    return math.prod(math.gcd(a, b) for a in A.invariants for b in B.invariants)


def ext_size(A: FinAbGroup, B: FinAbGroup) -> int:
    """#Ext^1(A, B); for finite abelian groups this equals #Hom(A, B)."""
    return hom_size(A, B)


def _require_odd(*groups: C2FinAbGroup) -> None:
    for G in groups:
        if G.order % 2 == 0:
            raise ValueError("C2-module computations need odd-order modules")


def c2_hom_size(A: C2FinAbGroup, B: C2FinAbGroup) -> int:
    _require_odd(A, B)
    return hom_size(A.plus, B.plus) * hom_size(A.minus, B.minus)


def c2_ext_size(A: C2FinAbGroup, B: C2FinAbGroup) -> int:
    _require_odd(A, B)
    return ext_size(A.plus, B.plus) * ext_size(A.minus, B.minus)


# ---------------------------------------------------------------------------
# Cohen-Lenstra weights


def eta(N: int | float | None, ell: int):
    """prod_{i=1}^N (1 - ell^-i); exact for finite N, 50-digit real for N = inf/None."""
    if N is None or N == math.inf:
        return _eta_inf(ell)
    if N < 0:
        raise ValueError("N must be nonnegative")
    out = Fraction(1)
    for i in range(1, int(N) + 1):
        out *= 1 - Fraction(1, ell**i)
    return out


def _eta_inf(ell: int, start: int = 1):
    out = MP.mpf(1)
    k = start
    while True:
        term = MP.mpf(ell) ** (-k)
        out *= 1 - term
        if k >= ETA_MIN_TERMS and term < ETA_CUTOFF:
            return out
        k += 1


def _check_S(S: Iterable[int]) -> tuple[int, ...]:
    S = tuple(sorted(set(int(p) for p in S)))
    if not S:
        raise ValueError("S must be nonempty")
    for p in S:
        if p == 2 or p < 2 or _prime_powers(p) != {p: 1}:
            raise ValueError(f"S must consist of odd primes, got {p}")
    return S


def c_minus(S: Iterable[int]):
    return MP.fprod(1 / _eta_inf(p) for p in _check_S(S))


def c_plus(S: Iterable[int]):
    return MP.fprod(1 / _eta_inf(p, start=2) for p in _check_S(S)) / 2


def cl_measure(G: FinAbGroup, sign: str, S: Iterable[int]):
    """Cohen-Lenstra weight of G for imaginary (``-``) or real (``+``) fields."""
    S = _check_S(S)
    if any(p not in S for p in G.primes()):
        raise ValueError(f"{G} is not an S-group for S={S}")
    if sign == "-":
        return 1 / (c_minus(S) * aut_order(G))
    if sign == "+":
        return 1 / (2 * c_plus(S) * aut_order(G) * G.order)
    raise ValueError("sign must be '+' or '-'")


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as descending tuples."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def s_groups(S: Iterable[int], max_order: int) -> Iterator[FinAbGroup]:
    """All S-groups of order at most ``max_order`` (one per isomorphism class)."""
    S = _check_S(S)

    def rec(i: int, bound: int, parts: dict[int, list[int]]) -> Iterator[FinAbGroup]:
        if i == len(S):
            yield FinAbGroup(tuple(p**e for p, es in parts.items() for e in es))
            return
        p = S[i]
        n = 0
        while p**n <= bound:
            for lam in partitions(n):
                parts[p] = list(lam)
                yield from rec(i + 1, bound // p**n, parts)
            n += 1
        parts.pop(p, None)

    yield from rec(0, max_order, {})


def elementary_groups(p: int, max_exp: int) -> Iterator[FinAbGroup]:
    """p-groups of order p^n for n <= max_exp."""
    for n in range(max_exp + 1):
        for lam in partitions(n):
            yield FinAbGroup(tuple(p**e for e in lam))


def count_matrices_by_rank(q: int, rows: int, cols: int, rank: int) -> int:
    """Number of rows x cols matrices over F_q of the given rank."""
    if rank > min(rows, cols) or rank < 0:
        return 0
    num = 1
    for i in range(rank):
        num *= (q**rows - q**i) * (q**cols - q**i)
    den = 1
    for i in range(rank):
        den *= q**rank - q**i
    return num // den


def surj_count(q: int, dim_src: int, dim_dst: int) -> int:
    """Surjections F_q^dim_src -> F_q^dim_dst."""
    if dim_dst > dim_src:
        return 0
    return math.prod(q**dim_src - q**i for i in range(dim_dst))


def subspace_count(q: int, n: int, k: int) -> int:
    """Gaussian binomial: k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = math.prod(q ** (n - i) - 1 for i in range(k))
    den = math.prod(q ** (i + 1) - 1 for i in range(k))
    return num // den


def vector_space_elements(q: int, n: int) -> Iterator[tuple[int, ...]]:
    return product(range(q), repeat=n)
