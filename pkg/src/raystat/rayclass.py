"""Residue rings O/m, their unit groups, unit images and ray class groups.

Residues are pairs (s, t) standing for s + t*omega modulo m, where
omega = (delta + sqrt(D))/2 and omega^2 = delta*omega + n.  Galois
conjugation is s + t*omega -> (s + t*delta) - t*omega.

The ray class group is assembled from the exact sequence

    units  ->  (O/m)^x x {+-1}^{infinite places}  ->  Cl(m)  ->  Cl  ->  0

as one integer presentation whose Smith form gives the group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from enum import Enum
from typing import Iterable, Sequence

from sympy import factorint

from .algebra import FinAbGroup, Presentation, SubgroupBuilder, smith_normal_form
from .quadfield import (
    ClassGroupComputation,
    QuadIdeal,
    QuadNumber,
    fundamental_unit,
    fundamental_unit_residue,
    ideal_mul,
    ideal_pow,
    is_principal_with_generator,
    kronecker,
    prime_form,
)

Residue = tuple[int, int]


class SplittingType(str, Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"

    @property
    def code(self) -> str:
        return self.value[0].upper()


def splitting_type(p: int, D: int) -> SplittingType:
    k = kronecker(D, p)
    if k == 1:
        return SplittingType.SPLIT
    if k == -1:
        return SplittingType.INERT
    return SplittingType.RAMIFIED


def local_variant(p: int, D: int) -> int:
    """Finer label for ramified odd p: +1 or -1 as (D/p)/p is a square or not mod p.

    For p = 3 the value -1 means the completion is Q_3(zeta_3).  Unramified
    primes and p = 2 get 0.
    """
    if p == 2 or D % p:
        return 0
    return kronecker(D // p, p)


@dataclass(frozen=True)
class Modulus:
    """A rational modulus m_f, optionally with both real places (narrow)."""

    m_f: int
    infinite: bool = False

    def __post_init__(self) -> None:
        if self.m_f < 1:
            raise ValueError("m_f must be a positive integer")

    def factors(self) -> list[tuple[int, int]]:
        return sorted((int(p), int(e)) for p, e in factorint(self.m_f).items())


# ---------------------------------------------------------------------------
# Residue rings


class ResidueRing:
    """O_F / q for the quadratic order of discriminant D, elements (s, t)."""

    def __init__(self, D: int, q: int):
        self.D = D
        self.q = q
        self.delta = D % 2
        self.n = (D - self.delta) // 4

    @property
    def key(self) -> tuple[int, int, int]:
        """Residues of the structure constants; equal keys give identical rings."""
        return self.q, self.delta, self.n % self.q

    def mul(self, x: Residue, y: Residue) -> Residue:
        q = self.q
        s1, t1 = x
        s2, t2 = y
        tt = t1 * t2
        return (s1 * s2 + tt * self.n) % q, (s1 * t2 + s2 * t1 + tt * self.delta) % q

    def conj(self, x: Residue) -> Residue:
        s, t = x
        return (s + t * self.delta) % self.q, (-t) % self.q

    def norm(self, x: Residue) -> int:
        s, t = x
        return (s * s + self.delta * s * t - self.n * t * t) % self.q

    def is_unit(self, x: Residue) -> bool:
        return math.gcd(self.norm(x), self.q) == 1

    def power(self, x: Residue, k: int) -> Residue:
        out = (1 % self.q, 0)
        while k:
            if k & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            k >>= 1
        return out

    def elements(self) -> Iterable[Residue]:
        q = self.q
        return ((s, t) for s in range(q) for t in range(q))

    def units(self) -> list[Residue]:
        return [x for x in self.elements() if self.is_unit(x)]

    def reduce(self, x: Residue) -> Residue:
        return x[0] % self.q, x[1] % self.q

    def from_number(self, alpha: QuadNumber) -> Residue:
        return alpha.omega_coords(self.q)

    def split_coordinates(self, x: Residue) -> tuple[int, int]:
        """Images under the two maps to Z/q at a split prime power (smaller root first)."""
        r1, r2 = self.split_roots()
        s, t = x
        return (s + t * r1) % self.q, (s + t * r2) % self.q

    def split_roots(self) -> tuple[int, int]:
        q = self.q
        roots = [r for r in range(q) if (r * r - self.delta * r - self.n) % q == 0 and ((2 * r - self.delta) % q) and math.gcd(2 * r - self.delta, q) == 1]
        if len(roots) != 2:
            raise ValueError("not a split prime power")
        return roots[0], roots[1]

    def automorphisms(self) -> list[tuple[int, int]]:
        """Ring automorphisms commuting with conjugation, as images (s0, t0) of omega."""
        q = self.q
        out = []
        for t0 in range(q):
            if math.gcd(t0, q) != 1:
                continue
            for s0 in range(q):
                if (2 * s0 + t0 * self.delta - self.delta) % q:
                    continue
                y = (s0, t0)
                y2 = self.mul(y, y)
                if y2 == ((self.delta * s0 + self.n) % q, (self.delta * t0) % q):
                    out.append(y)
        return out

    def apply_hom(self, image_of_omega: Residue, x: Residue, target: "ResidueRing | None" = None) -> Residue:
        target = target or self
        s, t = x
        s0, t0 = image_of_omega
        return (s + t * s0) % target.q, (t * t0) % target.q

    def isomorphisms_to(self, other: "ResidueRing") -> list[Residue]:
        """Conjugation-compatible ring isomorphisms self -> other (images of omega)."""
        if other.q != self.q:
            return []
        q = self.q
        out = []
        for t0 in range(q):
            if math.gcd(t0, q) != 1:
                continue
            for s0 in range(q):
                y = (s0, t0)
                # trace of y in the target ring must equal delta of the source
                tr = (2 * s0 + t0 * other.delta) % q
                if tr != self.delta % q:
                    continue
                y2 = other.mul(y, y)
                if y2 == ((self.delta * s0 + self.n) % q, (self.delta * t0) % q):
                    out.append(y)
        return out


class _Piece:
    """Unit group of O/p^k built from exhaustive unit enumeration."""

    def __init__(self, D: int, p: int, k: int):
        self.p, self.k = p, k
        self.ring = ResidueRing(D, p**k)
        ring = self.ring
        units = ring.units()
        self.count = len(units)
        self.builder = SubgroupBuilder((1 % ring.q, 0), ring.mul)
        for x in units:
            if self.builder.order == self.count:
                break
            self.builder.add(x)
        assert self.builder.order == self.count
        self.generators = list(self.builder.generators)
        self.relations = [r + [0] * (len(self.generators) - len(r)) for r in self.builder.relations]

    def dlog(self, x: Residue) -> tuple[int, ...]:
        v = self.builder.dlog(self.ring.reduce(x))
        if v is None:
            raise ValueError(f"{x} is not a unit modulo {self.ring.q}")
        return v


class ResidueUnitGroup:
    """(O/m)^x with explicit generators, discrete logs and conjugation action."""

    def __init__(self, D: int, m: int):
        self.D, self.m = D, m
        self.ring = ResidueRing(D, m)
        self.pieces = [_Piece(D, p, k) for p, k in Modulus(m).factors()]
        self.offsets = []
        off = 0
        for pc in self.pieces:
            self.offsets.append(off)
            off += len(pc.generators)
        self.ngens = off
        rows = []
        for pc, o in zip(self.pieces, self.offsets):
            for r in pc.relations:
                rows.append([0] * o + r + [0] * (self.ngens - o - len(r)))
        self.relations = rows
        self.presentation = Presentation(rows, self.ngens)

    @property
    def group(self) -> FinAbGroup:
        return self.presentation.group

    @property
    def order(self) -> int:
        return math.prod(pc.count for pc in self.pieces)

    def dlog(self, x: Residue) -> list[int]:
        out: list[int] = []
        for pc in self.pieces:
            out.extend(pc.dlog(x))
        return out

    def generator_residues(self) -> list[Residue]:
        """Global residues (via CRT) of the raw generators."""
        out = []
        for i, pc in enumerate(self.pieces):
            for g in pc.generators:
                out.append(self._crt_embed(i, g))
        return out

    def _crt_embed(self, i: int, g: Residue) -> Residue:
        s_parts, t_parts, mods = [], [], []
        for j, pc in enumerate(self.pieces):
            q = pc.ring.q
            mods.append(q)
            if j == i:
                s_parts.append(g[0])
                t_parts.append(g[1])
            else:
                s_parts.append(1 % q)
                t_parts.append(0)
        return _crt(s_parts, mods), _crt(t_parts, mods)

    def conj_matrix(self) -> list[list[int]]:
        """Rows: raw coordinates of the conjugates of the raw generators."""
        return [self.dlog(self.ring.conj(g)) for g in self.generator_residues()]

    def element_from_vector(self, v: Sequence[int]) -> Residue:
        n = self.order
        out = (1 % self.m, 0)
        for g, e in zip(self.generator_residues(), v):
            out = self.ring.mul(out, self.ring.power(g, e % n))
        return out


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, M = 0, 1
    for r, q in zip(residues, moduli):
        # solve x' = x mod M, x' = r mod q
        t = ((r - x) * pow(M, -1, q)) % q if q > 1 else 0
        x += M * t
        M *= q
    return x % M if M > 1 else 0


def residue_units(D: int, m_f: int) -> ResidueUnitGroup:
    if m_f < 1:
        raise ValueError("m_f must be positive")
    return ResidueUnitGroup(D, m_f)


# ---------------------------------------------------------------------------
# ell-elementary quotients and eigenparts


class EllQuotient:
    """U/U^ell as an F_ell-vector space with the conjugation action.

    Coordinates come from the Smith basis of U, so they are fixed once
    the residue ring is fixed.
    """

    def __init__(self, units: ResidueUnitGroup, ell: int):
        self.units, self.ell = units, ell
        P = units.presentation
        self.P = P
        self.slots = [i for i, d in enumerate(P.cyclic_orders) if d % ell == 0]
        self.dim = len(self.slots)
        gens = P.generator_vectors()
        conj_raw = units.conj_matrix()
        sigma = []
        for i in self.slots:
            v = gens[i]
            img = [0] * units.ngens
            for coef, row in zip(v, conj_raw):
                if coef:
                    img = [a + coef * b for a, b in zip(img, row)]
            sigma.append(self.project_raw(img))
        self.sigma = sigma  # row i = image of basis vector i
        l = ell
        half = pow(2, -1, l)
        # projector onto the minus part: (1 - sigma)/2, acting on row vectors
        self.minus_proj = [
            [((int(i == j) - sigma[i][j]) * half) % l for j in range(self.dim)] for i in range(self.dim)
        ]
        self.plus_proj = [
            [((int(i == j) + sigma[i][j]) * half) % l for j in range(self.dim)] for i in range(self.dim)
        ]
        self.minus_basis = _row_space(self.minus_proj, l)
        self.plus_basis = _row_space(self.plus_proj, l)

    @property
    def minus_dim(self) -> int:
        return len(self.minus_basis)

    @property
    def plus_dim(self) -> int:
        return len(self.plus_basis)

    def project_raw(self, raw: Sequence[int]) -> list[int]:
        c = self.P.coords(raw)
        return [c[i] % self.ell for i in self.slots]

    def of_residue(self, x: Residue) -> list[int]:
        return self.project_raw(self.units.dlog(x))

    def minus_part(self, v: Sequence[int]) -> list[int]:
        l = self.ell
        return [sum(v[i] * self.minus_proj[i][j] for i in range(self.dim)) % l for j in range(self.dim)]

    def plus_part(self, v: Sequence[int]) -> list[int]:
        l = self.ell
        return [sum(v[i] * self.plus_proj[i][j] for i in range(self.dim)) % l for j in range(self.dim)]

    def minus_coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of the minus part of v in the fixed minus basis."""
        w = self.minus_part(v)
        return _solve_in_basis(self.minus_basis, w, self.ell)


def _row_space(rows: Sequence[Sequence[int]], l: int) -> list[list[int]]:
    """Reduced row echelon basis over F_l."""
    A = [[x % l for x in r] for r in rows]
    out = []
    col = 0
    width = len(A[0]) if A else 0
    r0 = 0
    for col in range(width):
        piv = next((i for i in range(r0, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        inv = pow(A[r0][col], -1, l)
        A[r0] = [(x * inv) % l for x in A[r0]]
        for i in range(len(A)):
            if i != r0 and A[i][col]:
                f = A[i][col]
                A[i] = [(x - f * y) % l for x, y in zip(A[i], A[r0])]
        r0 += 1
    out = [r for r in A[:r0]]
    return out


def _solve_in_basis(basis: Sequence[Sequence[int]], w: Sequence[int], l: int) -> tuple[int, ...]:
    # basis is in reduced echelon form: coefficient i is w at the pivot column of row i
    coeffs = []
    for row in basis:
        col = next(j for j, x in enumerate(row) if x)
        coeffs.append(w[col] % l)
    check = [sum(c * row[j] for c, row in zip(coeffs, basis)) % l for j in range(len(w))]
    if check != [x % l for x in w]:
        raise ValueError("vector not in the span of the basis")
    return tuple(coeffs)


def span_dimension(vectors: Sequence[Sequence[int]], l: int) -> int:
    vs = [list(v) for v in vectors if any(x % l for x in v)]
    return len(_row_space(vs, l)) if vs else 0


@dataclass(frozen=True)
class UnitImage:
    """Class of the fundamental unit in the minus part of U/U^ell."""

    coordinates: tuple[int, ...]
    minus_dim: int
    ell: int

    @property
    def is_trivial(self) -> bool:
        return not any(self.coordinates)


def unit_image(D: int, m_f: int, ell: int, units: ResidueUnitGroup | None = None) -> UnitImage:
    if D <= 0:
        raise ValueError("unit images are defined for real fields")
    if m_f == 1:
        return UnitImage((), 0, ell)
    units = units or residue_units(D, m_f)
    Q = EllQuotient(units, ell)
    eps = units.ring.from_number(fundamental_unit(D).as_number())
    return UnitImage(Q.minus_coordinates(Q.of_residue(eps)), Q.minus_dim, ell)


# ---------------------------------------------------------------------------
# Ray class groups


def global_unit_generators(D: int) -> list[QuadNumber]:
    """Generators of the unit group: a root of unity generating mu_F, and eps for real fields."""
    if D > 0:
        return [QuadNumber(-1, 0, 1, D), fundamental_unit(D).as_number()]
    if D == -3:
        return [QuadNumber(1, 1, 2, D)]  # (1 + sqrt(-3))/2, a primitive 6th root of unity
    if D == -4:
        return [QuadNumber(0, 1, 2, D)]  # sqrt(-4)/2 = i
    return [QuadNumber(-1, 0, 1, D)]


def unit_generator_residues(D: int, m: int) -> list[tuple[Residue, tuple[int, int]]]:
    """Residues mod m and real signs of the unit generators, without forming eps exactly."""
    if D > 0:
        eps, norm = fundamental_unit_residue(D, m)
        return [(((-1) % m, 0), (-1, -1)), (eps, (1, norm))]
    if D in (-3, -4):
        return [((0, 1 % m), (1, 1))]  # omega is a generator of the roots of unity
    return [(((-1) % m, 0), (1, 1))]


@dataclass
class RayClassResult:
    D: int
    modulus: Modulus
    group: FinAbGroup
    class_group: FinAbGroup
    unit_count: int  # #(O/m)^x times 2^(number of infinite places)
    unit_image_size: int
    presentation: Presentation = field(repr=False)

    def ell_torsion(self, ell: int) -> int:
        return self.group.torsion_size(ell)

    @property
    def order_identity_holds(self) -> bool:
        return self.group.order * self.unit_image_size == self.class_group.order * self.unit_count


class _RayBuilder:
    """Shared assembly of unit columns, sign columns and unit relations."""

    def __init__(
        self,
        D: int,
        modulus: Modulus,
        units: ResidueUnitGroup | None,
        unit_data: list[tuple[Residue, tuple[int, int]]] | None = None,
    ):
        if modulus.infinite and D < 0:
            raise ValueError("imaginary fields have no real places")
        self.D, self.modulus = D, modulus
        m = modulus.m_f
        self.units = units if (units is not None or m == 1) else residue_units(D, m)
        self.nu = self.units.ngens if m > 1 else 0
        self.ns = 2 if modulus.infinite else 0
        self.base_rows: list[list[int]] = []
        if m > 1:
            self.base_rows += [list(r) for r in self.units.relations]
        for i in range(self.ns):
            r = [0] * (self.nu + self.ns)
            r[self.nu + i] = 2
            self.base_rows.append(r)
        if unit_data is None:
            self.unit_rows = [self.iota(u) for u in global_unit_generators(D)]
        else:
            self.unit_rows = [self.iota_residue(r, sg) for r, sg in unit_data]

    def iota(self, alpha: QuadNumber) -> list[int]:
        """Coordinates of the class of (alpha) coming from the unit/sign part."""
        res = alpha.omega_coords(self.modulus.m_f) if self.modulus.m_f > 1 else (0, 0)
        return self.iota_residue(res, alpha.signs() if self.ns else (1, 1))

    def iota_residue(self, res: Residue, signs: tuple[int, int]) -> list[int]:
        out: list[int] = []
        if self.modulus.m_f > 1:
            out += self.units.dlog(res)
        if self.ns:
            out += [int(signs[0] < 0), int(signs[1] < 0)]
        return out

    def unit_part(self) -> Presentation:
        return Presentation(self.base_rows + self.unit_rows, self.nu + self.ns)

    @property
    def unit_count(self) -> int:
        base = self.units.order if self.modulus.m_f > 1 else 1
        return base * 2**self.ns

    def image_size(self) -> int:
        return self.unit_count // self.unit_part().group.order

    def assemble(self, ideal_rows: list[tuple[list[int], QuadNumber]]) -> Presentation:
        """ideal_rows: (exponent vector on ideal generators, generator alpha of that product)."""
        width = self.nu + self.ns
        r = len(ideal_rows[0][0]) if ideal_rows else 0
        rows = [row + [0] * r for row in self.base_rows + self.unit_rows]
        for expo, alpha in ideal_rows:
            rows.append([-x for x in self.iota(alpha)] + list(expo))
        return Presentation(rows, width + r)


def _ideal_product(D: int, primes: Sequence[int], exps: Sequence[int]) -> QuadIdeal:
    out = QuadIdeal.unit(D)
    for p, e in zip(primes, exps):
        if e:
            f = prime_form(D, p)
            out = ideal_mul(out, ideal_pow(QuadIdeal(f.a, f.b, D), e))
    return out


def _relation_generator(D: int, primes: Sequence[int], exps: Sequence[int]) -> QuadNumber:
    alpha = is_principal_with_generator(_ideal_product(D, primes, exps))
    if alpha is None:
        raise RuntimeError(f"relation {list(exps)} on primes {list(primes)} is not principal for D={D}")
    return alpha


def ray_class_data(
    D: int,
    modulus: Modulus,
    cg: ClassGroupComputation | None = None,
    units: ResidueUnitGroup | None = None,
) -> RayClassResult:
    """Full ray class group via one presentation and its Smith form."""
    cg = cg or ClassGroupComputation(D)
    rb = _RayBuilder(D, modulus, units)
    primes, kernel = cg.ideal_generators(avoid=modulus.m_f)
    ideal_rows = [(list(r), _relation_generator(D, primes, r)) for r in kernel]
    pres = rb.assemble(ideal_rows)
    return RayClassResult(D, modulus, pres.group, cg.group, rb.unit_count, rb.image_size(), pres)


def ray_class_group(D: int, modulus: Modulus | int) -> FinAbGroup:
    if isinstance(modulus, int):
        modulus = Modulus(modulus)
    return ray_class_data(D, modulus).group


@dataclass
class EllPartResult:
    """ell-primary data of a ray class group and the classes used to build it."""

    group: FinAbGroup  # preimage of Cl[ell^inf] in Cl(m), an extension of Cl_ell by U/units
    class_ell: FinAbGroup
    unit_quotient: FinAbGroup
    alphas: list[QuadNumber]
    orders: list[int]

    def ell_torsion(self, ell: int) -> int:
        return self.group.torsion_size(ell)

    @property
    def order_identity_holds(self) -> bool:
        return self.group.order == self.class_ell.order * self.unit_quotient.order


def ray_ell_part(
    D: int,
    modulus: Modulus,
    ell: int,
    cg: ClassGroupComputation | None = None,
    units: ResidueUnitGroup | None = None,
    unit_data: list[tuple[Residue, tuple[int, int]]] | None = None,
) -> EllPartResult:
    """The part of Cl(m) above the ell-primary classes.

    Generators of Cl[ell^inf] are written as products of prime ideals
    coprime to m; the generator alpha of the ell-power that becomes
    principal supplies the only relations needed.
    """
    cg = cg or ClassGroupComputation(D)
    rb = _RayBuilder(D, modulus, units, unit_data)
    W = cg.wide
    orders = W.cyclic_orders
    targets = []
    for vec, d in zip(W.generator_vectors(), orders):
        a = 0
        while d % ell == 0:
            d //= ell
            a += 1
        if a:
            targets.append(([d * x for x in vec], ell**a))
    alphas: list[QuadNumber] = []
    rows = []
    if targets:
        primes, _ = cg.ideal_generators(avoid=modulus.m_f)
        vecs = [cg.prime_vector(p) for p in primes]
        for t, order in targets:
            c = _solve_combination(W, vecs, t)
            rel = [x * order for x in c]
            alpha = _relation_generator(D, primes, rel)
            alphas.append(alpha)
            rows.append(alpha)
    k = len(targets)
    ideal_rows = []
    for j, alpha in enumerate(rows):
        e = [0] * k
        e[j] = targets[j][1]
        ideal_rows.append((e, alpha))
    pres = rb.assemble(ideal_rows)
    class_ell = cg.group.ell_part(ell)
    return EllPartResult(pres.group, class_ell, rb.unit_part().group, alphas, [o for _, o in targets])


def _solve_combination(P: Presentation, vecs: Sequence[Sequence[int]], target: Sequence[int]) -> list[int]:
    """Integers c with sum c_i vecs_i = target in the group presented by P."""
    orders = P.cyclic_orders
    m = len(orders)
    r = len(vecs)
    Y = [list(P.coords(v)) for v in vecs]
    block = Y + [[orders[j] if i == j else 0 for j in range(m)] for i in range(m)]
    t = list(P.coords(target))
    if m == 0:
        return [0] * r
    sf = smith_normal_form(block)
    # x * block = t  <=>  (x U^-1) * S = t * V
    tv = [sum(t[i] * sf.V[i][j] for i in range(m)) for j in range(m)]
    z = [0] * (r + m)
    for i, d in enumerate(sf.diagonal):
        if d == 0:
            if tv[i]:
                raise ValueError("target outside the generated subgroup")
            continue
        if tv[i] % d:
            raise ValueError("target outside the generated subgroup")
        z[i] = tv[i] // d
    x = [sum(z[i] * sf.U[i][j] for i in range(r + m)) for j in range(r + m)]
    return x[:r]


def ray_ell_torsion(D: int, modulus: Modulus | int, ell: int) -> int:
    if isinstance(modulus, int):
        modulus = Modulus(modulus)
    return ray_ell_part(D, modulus, ell).ell_torsion(ell)


class MinusOrbits:
    """Orbits of Aut_ring(R) on the minus part of U/U^ell for R = O_F/m.

    Aut_ring(R) is taken to be the ring automorphisms of R commuting with
    conjugation; it contains conjugation itself, which acts by -1 on the
    minus part.
    """

    def __init__(self, D: int, m: int, ell: int):
        self.D, self.m, self.ell = D, m, ell
        self.units = residue_units(D, m)
        self.ring = self.units.ring
        self.Q = EllQuotient(self.units, ell)
        Q = self.Q
        slot_res = [self.units.element_from_vector(Q.P.generator_vectors()[i]) for i in Q.slots]
        self.automorphisms = self.ring.automorphisms()
        self.matrices = [[Q.of_residue(self.ring.apply_hom(y, r)) for r in slot_res] for y in self.automorphisms]
        u = Q.minus_dim
        points = list(product(range(ell), repeat=u))
        parent = {x: x for x in points}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in points:
            v = self._vector(x)
            for A in self.matrices:
                w = [sum(v[i] * A[i][j] for i in range(Q.dim)) % ell for j in range(Q.dim)]
                y = Q.minus_coordinates(w)
                a, b = find(x), find(y)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict = {}
        for x in points:
            groups.setdefault(find(x), []).append(x)
        self.orbits = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
        self._label = {x: i for i, g in enumerate(self.orbits) for x in g}

    def _vector(self, coords: Sequence[int]) -> list[int]:
        Q = self.Q
        return [sum(c * b[j] for c, b in zip(coords, Q.minus_basis)) % self.ell for j in range(Q.dim)]

    @property
    def minus_order(self) -> int:
        return self.ell**self.Q.minus_dim

    def label(self, coords: Sequence[int]) -> int:
        return self._label[tuple(coords)]

    def label_residue(self, x: Residue) -> int:
        return self.label(self.Q.minus_coordinates(self.Q.of_residue(x)))
