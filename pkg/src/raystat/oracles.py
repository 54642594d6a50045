"""Independent brute-force reference computations.

Nothing in this module calls the production class-group, unit or
ray-class code.  Ideals are multiplied as lattices in the basis
(1, omega) with Hermite normal forms, classes are found by enumerating all
reduced ideals and their cycles, and group structure is read off from
element orders.
"""

from __future__ import annotations

import math
from collections import Counter
from math import isqrt

from sympy import factorint

from .algebra import FinAbGroup

PELL_SEARCH_CAP = 3000


# ---------------------------------------------------------------------------
# Class groups


def _omega_data(D: int) -> tuple[int, int]:
    delta = D % 2
    return delta, (D - delta) // 4


def _hnf2(vectors: list[tuple[int, int]]) -> tuple[int, int, int]:
    """Basis (e, 0), (f, g) of the Z-span of 2-vectors (coefficients of 1 and omega)."""
    px, py = 0, 0
    e = 0
    for x, y in vectors:
        while y:
            q = py // y
            px, py, x, y = x, y, px - q * x, py - q * y
        e = math.gcd(e, x)
    if py < 0:
        px, py = -px, -py
    if py == 0 or e == 0:
        raise ValueError("degenerate lattice")
    return e, px % e, py


def _ideal_lattice(D: int, a: int, b: int) -> list[tuple[int, int]]:
    delta, _ = _omega_data(D)
    return [(a, 0), ((b - delta) // 2, 1)]


def _mul_elements(D: int, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
    delta, n = _omega_data(D)
    return x[0] * y[0] + x[1] * y[1] * n, x[0] * y[1] + x[1] * y[0] + x[1] * y[1] * delta


def oracle_ideal_product(D: int, I: tuple[int, int], J: tuple[int, int]) -> tuple[int, int]:
    """Primitive part [a, (b+sqrt D)/2] of the lattice product of two ideals."""
    gens = [_mul_elements(D, x, y) for x in _ideal_lattice(D, *I) for y in _ideal_lattice(D, *J)]
    e, f, g = _hnf2(gens)
    # lattice = g * [e/g, f/g + omega]
    delta, _ = _omega_data(D)
    a = e // g
    b = 2 * (f // g) + delta
    return a, b % (2 * a)


def _reduced_ideals(D: int) -> list[tuple[int, int]]:
    out = []
    if D > 0:
        s = isqrt(D)
        for a in range(1, s + 1):
            for b in range(max(1, s - 2 * a + 1, 2 * a - s), s + 1):
                if (b - D) % 2 == 0 and (b * b - D) % (4 * a) == 0:
                    out.append((a, b))
    else:
        amax = isqrt(-D // 3) + 1
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b * b - D) % (4 * a):
                    continue
                c = (b * b - D) // (4 * a)
                if c < a or (c == a and b < 0):
                    continue
                out.append((a, b))
    return out


def _oracle_rho(D: int, a: int, b: int) -> tuple[int, int]:
    """Reduction step on ideals: [a, b] -> [|c|, b'] with b' = -b mod 2|c|."""
    c = abs((b * b - D) // (4 * a))
    s = isqrt(abs(D))
    if D > 0 and c < math.sqrt(D):
        # choose b' in (sqrt D - 2c, sqrt D)
        bp = -b
        bp += 2 * c * ((s - bp) // (2 * c))
        return c, bp
    bp = (-b) % (2 * c)
    if bp > c:
        bp -= 2 * c
    return c, bp


def _oracle_reduce(D: int, a: int, b: int, reduced: set) -> tuple[int, int]:
    if D < 0:
        while True:
            b = b % (2 * a)
            if b > a:
                b -= 2 * a
            c = (b * b - D) // (4 * a)
            if a < c or (a == c and b >= 0):
                return a, b
            a, b = _oracle_rho(D, a, b)
    for _ in range(10**6):
        if (a, b) in reduced:
            return a, b
        a, b = _oracle_rho(D, a, b)
    raise RuntimeError("reduction did not terminate")


class OracleClassGroup:
    """Wide class group of a fundamental discriminant by exhaustive enumeration."""

    def __init__(self, D: int):
        self.D = D
        ideals = _reduced_ideals(D)
        self.reduced = set(ideals)
        self.class_of: dict[tuple[int, int], int] = {}
        reps = []
        for I in ideals:
            if I in self.class_of:
                continue
            cid = len(reps)
            reps.append(I)
            if D > 0:
                J = I
                while True:
                    self.class_of[J] = cid
                    J = _oracle_rho(D, *J)
                    if J == I:
                        break
            else:
                self.class_of[I] = cid
        self.reps = reps
        self.order = len(reps)

    def identify(self, I: tuple[int, int]) -> int:
        return self.class_of[_oracle_reduce(self.D, *I, self.reduced)]

    def mul(self, x: int, y: int) -> int:
        return self.identify(oracle_ideal_product(self.D, self.reps[x], self.reps[y]))

    def identity(self) -> int:
        return self.identify((1, self.D % 2))

    def element_order(self, x: int) -> int:
        e = self.identity()
        k, y = 1, x
        while y != e:
            y = self.mul(y, x)
            k += 1
        return k

    def structure(self) -> FinAbGroup:
        orders = [self.element_order(x) for x in range(self.order)]
        return structure_from_orders(orders)


def structure_from_orders(orders: list[int]) -> FinAbGroup:
    """Reconstruct an abelian group from the multiset of its element orders."""
    n = len(orders)
    cyclic = []
    for p in factorint(n):
        p = int(p)
        counts = []
        j = 0
        while True:
            size = sum(1 for o in orders if (p**j) % o == 0)
            counts.append(size)
            if size == p ** factorint(n)[p]:
                break
            j += 1
        # number of cyclic factors of order >= p^j is log_p(counts[j]/counts[j-1])
        ranks = [round(math.log(counts[j] // counts[j - 1], p)) for j in range(1, len(counts))]
        for j, r in enumerate(ranks, start=1):
            nxt = ranks[j] if j < len(ranks) else 0
            cyclic += [p**j] * (r - nxt)
    return FinAbGroup(tuple(cyclic))


def oracle_class_number_forms(D: int) -> int:
    """Number of classes counted as cycles of reduced primitive forms."""
    return OracleClassGroup(D).order


def oracle_narrow_class_number(D: int) -> int:
    """Narrow class number: count rho-cycles of reduced forms with signed leading coefficient."""
    s = isqrt(D)
    forms = set()
    for a in range(-s, s + 1):
        if a == 0:
            continue
        for b in range(1, s + 1):
            if (b * b - D) % (4 * a) == 0 and 2 * abs(a) - b <= s and 2 * abs(a) + b > s:
                forms.add((a, b, (b * b - D) // (4 * a)))
    seen = set()
    cycles = 0
    for f in forms:
        if f in seen:
            continue
        cycles += 1
        g = f
        while True:
            seen.add(g)
            a, b, c = g
            ac = abs(c)
            bp = -b + 2 * ac * ((s + b) // (2 * ac))
            g = (c, bp, (bp * bp - D) // (4 * c))
            if g == f:
                break
    return cycles


# ---------------------------------------------------------------------------
# Units


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def pell_search(D: int, y_max: int) -> tuple[int, int] | None:
    """Smallest y in 1..y_max with x^2 - D*y^2 = +-4 solvable; returns (x, y)."""
    for y in range(1, y_max + 1):
        t = D * y * y
        for r in (t - 4, t + 4):
            if _is_square(r):
                return isqrt(r), y
    return None


def is_unit_power(x: int, y: int, D: int) -> bool:
    """Whether (x + y*sqrt D)/2 is a k-th power of a unit for some prime k >= 2."""
    import mpmath

    ctx = mpmath.MPContext()
    ctx.dps = max(60, 2 * len(str(x)) + 20)
    eps = (ctx.mpf(x) + ctx.mpf(y) * ctx.sqrt(D)) / 2
    lower = ctx.mpf(math.isqrt(D)) / 2  # every unit > 1 exceeds sqrt(D)/2
    kmax = int(ctx.log(eps) / ctx.log(max(lower, ctx.mpf(1.5)))) + 1
    for k in range(2, kmax + 1):
        if any(k % q == 0 for q in range(2, k)):
            continue
        eta = eps ** (ctx.mpf(1) / k)
        for nrm in (1, -1):
            trace = eta + nrm / eta
            xe = int(ctx.nint(trace))
            ye_f = (eta - nrm / eta) / ctx.sqrt(D)
            ye = int(ctx.nint(ye_f))
            if ye <= 0 or xe * xe - D * ye * ye != 4 * nrm:
                continue
            px, py = xe, ye
            for _ in range(k - 1):
                px, py = (px * xe + D * py * ye) // 2, (px * ye + py * xe) // 2
            if (px, py) == (x, y):
                return True
    return False


def oracle_unit_check(D: int, x: int, y: int, cap: int = PELL_SEARCH_CAP) -> bool:
    """Check (x + y sqrt D)/2 is the fundamental unit.

    Exhaustive search over y' <= min(y, cap); beyond the cap, minimality
    follows if the candidate is not a proper power of another unit.
    """
    if abs(x * x - D * y * y) != 4 or x <= 0 or y <= 0:
        return False
    found = pell_search(D, min(y, cap))
    if y <= cap:
        return found == (x, y)
    if found is not None:
        return False
    return not is_unit_power(x, y, D)


# ---------------------------------------------------------------------------
# Residue rings


def residue_unit_count(D: int, m: int) -> int:
    """#(O/m)^x by counting residues s + t*omega of norm prime to m."""
    delta, n = _omega_data(D)
    return sum(
        1
        for s in range(m)
        for t in range(m)
        if math.gcd((s * s + delta * s * t - n * t * t) % m, m) == 1
    )


def residue_subgroup_size(D: int, m: int, gens: list[tuple[int, int]]) -> int:
    """Size of the subgroup of (O/m)^x generated by residues (s, t) via closure."""
    delta, n = _omega_data(D)

    def mul(x, y):
        return ((x[0] * y[0] + x[1] * y[1] * n) % m, (x[0] * y[1] + x[1] * y[0] + x[1] * y[1] * delta) % m)

    seen = {(1 % m, 0)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def structure_from_counter(orders: Counter) -> FinAbGroup:
    return structure_from_orders(list(orders.elements()))


def oracle_unit_residues(D: int, m: int, unit: tuple[int, int] | None = None) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Generators of O^x as (residue mod m, real signs) pairs.

    ``unit`` is (x, y) for the fundamental unit (x + y sqrt D)/2 of a real
    field; residues are coordinates on (1, omega).
    """
    delta, _ = _omega_data(D)
    if D > 0:
        if unit is None:
            raise ValueError("real fields need the fundamental unit")
        x, y = unit
        # (x + y sqrt D)/2 = (x - y delta)/2 + y omega since sqrt D = 2 omega - delta
        s = ((x - y * delta) // 2) % m
        n = (x * x - D * y * y) // 4
        return [(((-1) % m, 0), (-1, -1)), ((s, y % m), (1, n))]
    if D in (-3, -4):
        return [((0, 1 % m), (1, 1))]
    return [(((-1) % m, 0), (1, 1))]


def residue_signed_subgroup_size(D: int, m: int, gens: list[tuple[tuple[int, int], tuple[int, int]]]) -> int:
    """Size of the subgroup of (O/m)^x x {+-1}^2 generated by (residue, signs) pairs."""
    delta, n = _omega_data(D)

    def mul(x, y):
        (a, b), (s1, s2) = x
        (c, d), (t1, t2) = y
        return ((a * c + b * d * n) % m, (a * d + b * c + b * d * delta) % m), (s1 * t1, s2 * t2)

    start = ((1 % m, 0), (1, 1))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)
