"""Predicted statistics for ray class groups of quadratic fields.

Closed forms are kept as exact fractions.  Each closed form has a second
route that rebuilds it from the residue rings themselves: the l-part of
(O/p^k)^x is computed from an actual ring with the right local behaviour,
weighted by how often that behaviour occurs among quadratic fields.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .algebra import (
    MP,
    C2FinAbGroup,
    FinAbGroup,
    cl_measure,
    count_matrices_by_rank,
    eta,
    s_groups,
    subspace_count,
    surj_count,
)
from .extensions import ConcreteModule, ExtensionSpace, automorphisms
from .quadfield import fundamental_discriminants
from .rayclass import (
    Modulus,
    ResidueUnitGroup,
    SplittingType,
    local_variant,
    residue_units,
    splitting_type,
)

REPRESENTATIVE_SEARCH_LIMIT = 10**6


# ---------------------------------------------------------------------------
# Splitting signatures


@dataclass(frozen=True, order=True)
class LocalType:
    """Behaviour of F at one prime power p^k dividing m.

    ``variant`` separates the two ramified quadratic extensions of Q_p for odd
    p (+1 when (D/p)/p is a square mod p); it is 0 otherwise.
    """

    p: int
    k: int
    kind: SplittingType
    variant: int = 0

    @property
    def code(self) -> str:
        tag = self.kind.code
        if self.variant:
            tag += "+" if self.variant > 0 else "-"
        return f"{self.p}^{self.k}:{tag}" if self.k > 1 else f"{self.p}:{tag}"

    def matches(self, D: int) -> bool:
        return splitting_type(self.p, D) == self.kind and local_variant(self.p, D) == self.variant


def density_pR(p: int, kind: SplittingType | str) -> Fraction:
    """Share of quadratic fields with the given behaviour at p."""
    kind = SplittingType(kind)
    if kind == SplittingType.RAMIFIED:
        return Fraction(1, p + 1)
    return Fraction(p, 2 * (p + 1))


def local_types(p: int, k: int) -> list[tuple[LocalType, Fraction]]:
    """All local types at p^k with their densities (summing to 1)."""
    out = [
        (LocalType(p, k, SplittingType.SPLIT), density_pR(p, SplittingType.SPLIT)),
        (LocalType(p, k, SplittingType.INERT), density_pR(p, SplittingType.INERT)),
    ]
    ram = density_pR(p, SplittingType.RAMIFIED)
    if p == 2:
        out.append((LocalType(p, k, SplittingType.RAMIFIED), ram))
    else:
        out += [(LocalType(p, k, SplittingType.RAMIFIED, v), ram / 2) for v in (1, -1)]
    return out


@dataclass(frozen=True)
class SplittingSignature:
    """One local type for every prime power exactly dividing m."""

    parts: tuple[LocalType, ...]

    @classmethod
    def of_field(cls, D: int, m: int) -> "SplittingSignature":
        parts = []
        for p, k in Modulus(m).factors():
            parts.append(LocalType(p, k, splitting_type(p, D), local_variant(p, D)))
        return cls(tuple(parts))

    @property
    def modulus(self) -> int:
        return math.prod(t.p**t.k for t in self.parts)

    @property
    def code(self) -> str:
        return ",".join(t.code for t in self.parts) or "trivial"

    @property
    def density(self) -> Fraction:
        out = Fraction(1)
        for t in self.parts:
            w = density_pR(t.p, t.kind)
            if t.kind == SplittingType.RAMIFIED and t.p != 2:
                w /= 2
            out *= w
        return out

    def matches(self, D: int) -> bool:
        return all(t.matches(D) for t in self.parts)

    def representative(self) -> int:
        return representative_discriminant(self)


def all_signatures(m: int) -> Iterator[tuple[SplittingSignature, Fraction]]:
    choices = [local_types(p, k) for p, k in Modulus(m).factors()]
    for combo in product(*choices):
        sig = SplittingSignature(tuple(t for t, _ in combo))
        yield sig, math.prod((w for _, w in combo), start=Fraction(1))


@lru_cache(maxsize=None)
def representative_discriminant(sig: SplittingSignature) -> int:
    """Smallest real fundamental discriminant with the given local behaviour."""
    for D in fundamental_discriminants(REPRESENTATIVE_SEARCH_LIMIT, "+"):
        if sig.matches(D):
            return D
    raise ValueError(f"no discriminant below {REPRESENTATIVE_SEARCH_LIMIT} realizes {sig.code}")


# ---------------------------------------------------------------------------
# U_R and its eigenparts


def _ell_primary_eigenparts(units: ResidueUnitGroup, ell: int) -> tuple[FinAbGroup, FinAbGroup]:
    """Plus and minus parts of the ell-primary subgroup under conjugation.

    Elements of the ell-part are enumerated in Smith coordinates; each
    eigenpart is then identified from the sizes of its ell^t-torsion.
    """
    P = units.presentation
    gens = P.generator_vectors()
    slots, exps, cof = [], [], []
    for i, d in enumerate(P.cyclic_orders):
        a = 0
        while d % ell == 0:
            d //= ell
            a += 1
        if a:
            slots.append(i)
            exps.append(a)
            cof.append(d)
    if not slots:
        return FinAbGroup(), FinAbGroup()
    conj_raw = units.conj_matrix()
    sigma = []
    for i, c in zip(slots, cof):
        h = [c * x for x in gens[i]]
        img = [0] * units.ngens
        for coef, row in zip(h, conj_raw):
            if coef:
                img = [a + coef * b for a, b in zip(img, row)]
        co = P.coords(img)
        row = []
        for j, cj, aj in zip(slots, cof, exps):
            assert co[j] % cj == 0
            row.append((co[j] // cj) % ell**aj)
        sigma.append(row)
    mods = [ell**a for a in exps]
    plus, minus = [], []
    for x in product(*(range(q) for q in mods)):
        sx = [sum(x[i] * sigma[i][j] for i in range(len(x))) % q for j, q in enumerate(mods)]
        if sx == list(x):
            plus.append(x)
        if all((a + b) % q == 0 for a, b, q in zip(sx, x, mods)):
            minus.append(x)
    return _structure(plus, mods, ell), _structure(minus, mods, ell)


def _structure(elems: Sequence[tuple[int, ...]], mods: Sequence[int], ell: int) -> FinAbGroup:
    sizes = [1]
    t = 1
    while sizes[-1] < len(elems):
        q = ell**t
        sizes.append(sum(1 for x in elems if all((q * a) % m == 0 for a, m in zip(x, mods))))
        t += 1
    # number of cyclic factors of order >= ell^t
    ge = [round(math.log(sizes[t] // sizes[t - 1], ell)) for t in range(1, len(sizes))]
    cyc = []
    for t, r in enumerate(ge, start=1):
        nxt = ge[t] if t < len(ge) else 0
        cyc += [ell**t] * (r - nxt)
    return FinAbGroup(tuple(cyc))


@dataclass(frozen=True)
class URGroup:
    """ell-part of U_R = R^x/{+-1} for R = O/m of a given signature."""

    signature: SplittingSignature
    ell: int
    module: C2FinAbGroup
    representative: int

    @property
    def plus(self) -> FinAbGroup:
        return self.module.plus

    @property
    def minus(self) -> FinAbGroup:
        return self.module.minus

    @property
    def plus_dim(self) -> int:
        return self.plus.rank(self.ell)

    @property
    def minus_dim(self) -> int:
        return self.minus.rank(self.ell)

    @property
    def plus_size(self) -> int:
        """#U_+ in U_R/U_R^ell."""
        return self.ell**self.plus_dim

    @property
    def minus_size(self) -> int:
        return self.ell**self.minus_dim

    @property
    def quotient_size(self) -> int:
        """#(U_R/U_R^ell)."""
        return self.ell ** (self.plus_dim + self.minus_dim)


def _local_ring_modulus(t: LocalType, ell: int) -> int:
    # For p != ell the kernel of (O/p^k)^x -> (O/p)^x is a p-group, so the
    # ell-part (and its conjugation action) is already visible modulo p.
    return t.p**t.k if t.p == ell else t.p


@lru_cache(maxsize=None)
def _local_eigenparts(t: LocalType, ell: int) -> tuple[FinAbGroup, FinAbGroup, int]:
    sig = SplittingSignature((t,))
    D = representative_discriminant(sig)
    units = residue_units(D, _local_ring_modulus(t, ell))
    plus, minus = _ell_primary_eigenparts(units, ell)
    return plus, minus, D


def build_UR(sig: SplittingSignature, m_f: int, ell: int) -> URGroup:
    """ell-part of U_R with its eigen-decomposition, assembled prime by prime."""
    if ell % 2 == 0:
        raise ValueError("ell must be odd")
    if sig.modulus != m_f:
        raise ValueError(f"signature {sig.code} does not cover m_f={m_f}")
    plus, minus = FinAbGroup(), FinAbGroup()
    for t in sig.parts:
        p_, m_, _ = _local_eigenparts(t, ell)
        plus, minus = plus * p_, minus * m_
    rep = representative_discriminant(sig) if sig.parts else 5
    return URGroup(sig, ell, C2FinAbGroup(plus, minus), rep)


# ---------------------------------------------------------------------------
# Averages


def s_local(p: int, k: int, ell: int) -> Fraction:
    """Weighted average of #(U_R/U_R^ell) over the rings O_A/p^k (closed form)."""
    if p == ell:
        if k == 1:
            return Fraction(2 * ell, ell + 1)
        return Fraction(45, 4) if ell == 3 else Fraction(ell * ell)
    if p % ell == 1:
        return Fraction(ell * (p * (ell + 1) + 2), 2 * (p + 1))
    if p % ell == ell - 1:
        return Fraction(p * (ell + 1) + 2, 2 * (p + 1))
    return Fraction(1)


def s_local_derived(p: int, k: int, ell: int) -> Fraction:
    """The same average summed over explicit local rings."""
    total = Fraction(0)
    for t, w in local_types(p, k):
        sig = SplittingSignature((t,))
        total += w * build_UR(sig, p**k, ell).quotient_size
    return total


def _prime_sets(ell: int, m_f: int) -> tuple[list[int], list[int]]:
    primes = [p for p, _ in Modulus(m_f).factors()]
    p1 = [p for p in primes if p % ell == 1]
    ppm = [p for p in primes if p % ell in (1, ell - 1)]
    return p1, ppm


def av_plus(ell: int, m_f: int) -> Fraction:
    """Average of #Cl_F(m)[ell] over real quadratic fields (closed form)."""
    if ell % 2 == 0:
        raise ValueError("ell must be odd")
    p1, ppm = _prime_sets(ell, m_f)
    if ell == 3 and m_f % 9 == 0:
        prod = math.prod((Fraction(2 * p + 1, p + 1) for p in ppm), start=Fraction(1))
        return 3 ** (len(p1) + 1) * (1 + Fraction(5, 4) * prod)
    prod = math.prod((Fraction(p * (ell + 1) + 2, 2 * (p + 1)) for p in ppm), start=Fraction(1))
    if m_f % (ell * ell) == 0:
        return ell ** (len(p1) + 1) * (1 + prod)
    if m_f % ell == 0:
        return ell ** len(p1) * (1 + Fraction(2, ell + 1) * prod)
    return ell ** len(p1) * (1 + prod / ell)


def av_plus_fixed_R(sig: SplittingSignature, m_f: int, ell: int) -> Fraction:
    """Average of #Cl_F(m)[ell] over pairs (F, r) with O_F/m isomorphic to R."""
    U = build_UR(sig, m_f, ell)
    return U.plus_size + Fraction(U.quotient_size, ell)


def expected_arakelov_torsion(sig: SplittingSignature, m_f: int, ell: int) -> Fraction:
    """Expected #Pic^0_F(m)[ell] for a fixed ring R."""
    U = build_UR(sig, m_f, ell)
    return Fraction(ell * U.plus_size + U.quotient_size)


def av_plus_derived(ell: int, m_f: int) -> Fraction:
    """Density-weighted sum of the fixed-ring averages over all signatures."""
    return sum((w * av_plus_fixed_R(sig, m_f, ell) for sig, w in all_signatures(m_f)), Fraction(0))


# ---------------------------------------------------------------------------
# Rank and subspace probabilities


def rank_prob(j: int, ell: int):
    """eta_inf/(ell^((j-1)j) eta_{j-1} eta_j): probability that dim Pic^0[ell] = j."""
    if j < 1:
        raise ValueError("j must be at least 1")
    den = MP.mpf(ell) ** ((j - 1) * j) * _mpq(eta(j - 1, ell)) * _mpq(eta(j, ell))
    return eta(None, ell) / den


def _mpq(q: Fraction):
    return MP.mpf(q.numerator) / q.denominator


def rank_subspace_prob(j: int, W_dim: int, U_minus_dim: int, ell: int):
    """Probability of dim Pic^0[ell] = j together with a given image W of dimension W_dim."""
    if W_dim > U_minus_dim:
        raise ValueError("W must lie in U_-")
    frac = Fraction(surj_count(ell, j, W_dim), ell ** (j * U_minus_dim))
    return rank_prob(j, ell) * _mpq(frac)


def torus_image_prob(U_minus_dim: int, ell: int, j: int | None = None):
    """Probability that the torus l-torsion maps onto a fixed line W; optionally with dim = j."""
    if U_minus_dim < 1:
        raise ValueError("U_- has no lines")
    base = _mpq(Fraction(ell - 1, ell**U_minus_dim))
    return base if j is None else rank_prob(j, ell) * base


def rank_subspace_total(U_minus_dim: int, ell: int, j_max: int = 12):
    """Sum of rank_subspace_prob over j <= j_max and all subspaces W."""
    total = MP.mpf(0)
    for j in range(1, j_max + 1):
        for w in range(U_minus_dim + 1):
            total += subspace_count(ell, U_minus_dim, w) * rank_subspace_prob(j, w, U_minus_dim, ell)
    return total


def joint_dimension_prob(j: int, w: int, U_minus_dim: int, ell: int):
    """Probability that dim Pic^0[ell] = j and the image has dimension w (any subspace)."""
    return subspace_count(ell, U_minus_dim, w) * rank_subspace_prob(j, w, U_minus_dim, ell)


# ---------------------------------------------------------------------------
# Series checks


def moment_series(ell: int, max_exp: int):
    """Truncated sum over ell-groups E of mu_CL^+(E) * #E[ell]."""
    total = MP.mpf(0)
    for E in s_groups([ell], ell**max_exp):
        total += cl_measure(E, "+", [ell]) * E.torsion_size(ell)
    return total


def elltorsexp_closed(U: URGroup) -> int:
    return U.ell * U.plus_size + U.quotient_size


def elltorsexp_series(plus_dim: int, minus_dim: int, ell: int, max_exp: int):
    """Direct truncated series for the expected #B[ell].

    Sums over finite ell-groups E = gamma^0(C) of order <= ell^max_exp.  For
    each, C[ell] has dimension j = rank(E) + 1, and the inner average runs
    over all delta in Hom(C[ell], U_-) grouped by the rank of delta.
    """
    u = minus_dim
    total = MP.mpf(0)
    for E in s_groups([ell], ell**max_exp):
        j = E.rank(ell) + 1
        inner = MP.mpf(0)
        for w in range(min(j, u) + 1):
            n = count_matrices_by_rank(ell, j, u, w)
            inner += MP.mpf(n) / ell**w
        inner /= MP.mpf(ell) ** (j * u)
        total += cl_measure(E, "+", [ell]) * ell ** (plus_dim + minus_dim) * ell**j * inner
    return total


# ---------------------------------------------------------------------------
# Orbit measures


def unit_orbit_measure(orbit_size: int, minus_order: int) -> Fraction:
    """Predicted share of fields whose unit image lies in a given Aut_ring-orbit."""
    return Fraction(orbit_size, minus_order)


def sigma_orbit_measure(orbit_size: int, minus_order: int, ext_size: int) -> Fraction:
    return Fraction(orbit_size, minus_order * ext_size)


@dataclass
class ExtOrbit:
    representative: tuple
    size: int
    measure: Fraction


def ext_orbit_measures(
    C: ConcreteModule,
    U: ConcreteModule,
    aut_U: Sequence | None = None,
    aut_C: Sequence | None = None,
) -> list[ExtOrbit]:
    """Orbits of (Aut U x Aut C) on Ext^1_{C2}(C, U) with measures #O/#Ext.

    ``aut_U`` defaults to the equivariant automorphisms of U; pass the
    images of Aut_ring generators to restrict to ring automorphisms.
    """
    space = ExtensionSpace(C, U)
    aut_U = automorphisms(U) if aut_U is None else aut_U
    aut_C = automorphisms(C) if aut_C is None else aut_C
    out = []
    for orb in space.orbits(aut_U, aut_C):
        out.append(ExtOrbit(space.representatives[orb[0]], len(orb), Fraction(len(orb), space.size)))
    return out


def orbit_measure(kind: str, **data) -> Fraction | list[ExtOrbit]:
    """Dispatch on kind: ``unit-orbit``, ``real-sigma`` or ``imaginary-ext``."""
    if kind == "unit-orbit":
        return unit_orbit_measure(data["orbit_size"], data["minus_order"])
    if kind == "real-sigma":
        return sigma_orbit_measure(data["orbit_size"], data["minus_order"], data["ext_size"])
    if kind == "imaginary-ext":
        return ext_orbit_measures(data["C"], data["U"], data.get("aut_U"), data.get("aut_C"))
    raise ValueError(f"unknown orbit kind {kind!r}")


# ---------------------------------------------------------------------------
# Reports


def frac_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


@dataclass
class PredictionReport:
    m_f: int
    ell: int
    av_plus: Fraction
    av_plus_derived: Fraction
    s_local: dict[str, Fraction]
    signatures: list[dict] = field(default_factory=list)
    moment: float = 0.0
    moment_truncation: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "modulus": self.m_f,
                "ell": self.ell,
                "av_plus": frac_json(self.av_plus),
                "av_plus_derived": frac_json(self.av_plus_derived),
                "s_local": {k: frac_json(v) for k, v in self.s_local.items()},
                "signatures": self.signatures,
                "moment": self.moment,
                "moment_truncation": self.moment_truncation,
            },
            indent=2,
        )


def prediction_report(ell: int, m_f: int, moment_exp: int = 6) -> PredictionReport:
    s = {f"{p}^{k}": s_local(p, k, ell) for p, k in Modulus(m_f).factors()}
    sigs = []
    for sig, w in all_signatures(m_f):
        U = build_UR(sig, m_f, ell)
        sigs.append(
            {
                "signature": sig.code,
                "density": frac_json(w),
                "representative_D": U.representative,
                "U_plus": U.plus.to_json(),
                "U_minus": U.minus.to_json(),
                "av_plus_fixed_R": frac_json(av_plus_fixed_R(sig, m_f, ell)),
                "expected_arakelov_torsion": frac_json(expected_arakelov_torsion(sig, m_f, ell)),
            }
        )
    mom = moment_series(ell, moment_exp)
    target = 1 + MP.mpf(1) / ell
    return PredictionReport(
        m_f, ell, av_plus(ell, m_f), av_plus_derived(ell, m_f), s, sigs, float(mom), float(target - mom)
    )
