"""Quadratic fields: discriminants, forms, class groups, units and ideals.

Conventions
-----------
* sqrt(D) always means the positive real root; the first real embedding is
  the identity on that choice, the second sends sqrt(D) to -sqrt(D).
* Forms (a, b, c) have discriminant b^2 - 4ac = D.  The ideal
  [a, (b + sqrt(D))/2] with a > 0 corresponds to the form (a, b, c) with
  c = (b^2 - D)/(4a); composition of forms matches multiplication of ideals.
* In the real case forms with a < 0 are allowed; they carry the narrow
  (orientation) information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterator, NamedTuple

from sympy import primerange

from .algebra import FinAbGroup, Presentation, SubgroupBuilder

MAX_ABS_DISCRIMINANT = 10**12
GENERATOR_RETRY_PRIMES = 400


class DiscriminantError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Discriminants and symbols


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree_sieve(lo: int, hi: int) -> bytearray:
    """flags[i] == 1 iff lo + i is squarefree, for lo >= 1."""
    flags = bytearray([1]) * (hi - lo)
    p = 2
    while p * p < hi:
        q = p * p
        start = ((lo + q - 1) // q) * q
        for j in range(start - lo, hi - lo, q):
            flags[j] = 0
        p += 1
    return flags


def fundamental_discriminants(X: int, sign: str = "+", start: int = 1, block: int = 1 << 16) -> Iterator[int]:
    """Fundamental discriminants with start <= |D| < X, ascending by |D|."""
    if sign not in "+-" or len(sign) != 1:
        raise ValueError("sign must be '+' or '-'")
    s = 1 if sign == "+" else -1
    lo = max(start, 2)
    while lo < X:
        hi = min(X, lo + block)
        sq = _squarefree_sieve(lo, hi)
        qlo, qhi = (lo + 3) // 4, (hi + 3) // 4
        sq4 = _squarefree_sieve(max(qlo, 1), max(qhi, 1)) if qhi > qlo else bytearray()
        for n in range(lo, hi):
            D = s * n
            r = D % 4
            if r == 1:
                if sq[n - lo]:
                    yield D
            elif r == 0:
                m = D // 4
                if m % 4 in (2, 3) and sq4[n // 4 - max(qlo, 1)]:
                    yield D
        lo = hi


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@lru_cache(maxsize=None)
def primes_below(n: int) -> tuple[int, ...]:
    return tuple(int(p) for p in primerange(2, n))


@lru_cache(maxsize=None)
def _sqrt_table(p: int) -> dict[int, int]:
    return {(x * x) % p: x for x in range(p // 2 + 1)}


def generation_bound(D: int) -> int:
    """Primes below this bound generate the class group (GRH-style bound)."""
    return max(int(6 * math.log(abs(D)) ** 2) + 1, 8)


# ---------------------------------------------------------------------------
# Forms


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def _check_disc(f, D=None) -> int:
    a, b, c = f
    d = b * b - 4 * a * c
    if D is not None and d != D:
        raise DiscriminantError(f"form {tuple(f)} has discriminant {d}, expected {D}")
    if d % 4 not in (0, 1) or isqrt(abs(d)) ** 2 == abs(d) and d > 0:
        raise DiscriminantError(f"unsupported discriminant {d}")
    return d


def principal_form(D: int) -> QuadForm:
    if D > 0:
        s = isqrt(D)
        b = s if (s - D) % 2 == 0 else s - 1
    else:
        b = D % 2
    return QuadForm(1, b, (b * b - D) // 4)


def is_reduced(f, D: int | None = None) -> bool:
    a, b, c = f
    D = b * b - 4 * a * c if D is None else D
    if D < 0:
        return abs(b) <= a <= c and not (b < 0 and (a == c or -b == a))
    s = isqrt(D)
    a2 = 2 * abs(a)
    return 0 < b <= s and a2 - b <= s and a2 + b > s


def _rho_indef(D: int, s: int, a: int, b: int, c: int) -> tuple[int, int, int]:
    ac = c if c > 0 else -c
    m = 2 * ac
    if ac <= s:
        b = s - (s + b) % m
    else:
        b = (-b) % m
        if b > ac:
            b -= m
    return c, b, (b * b - D) // (4 * c)


def _reduce_indef(D: int, s: int, a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        a2 = 2 * (a if a > 0 else -a)
        if 0 < b <= s and a2 - b <= s and a2 + b > s:
            return a, b, c
        a, b, c = _rho_indef(D, s, a, b, c)


def _reduce_def(D: int, a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b += 2 * a * r
            c = (b * b - D) // (4 * a)
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


def reduce_form(f) -> QuadForm:
    """Reduced form properly equivalent to f."""
    a, b, c = f
    D = _check_disc(f)
    if D < 0:
        if a < 0:
            raise DiscriminantError("negative definite forms are not supported")
        return QuadForm(*_reduce_def(D, a, b, c))
    return QuadForm(*_reduce_indef(D, isqrt(D), a, b, c))


def rho(f) -> QuadForm:
    """One step of the indefinite reduction operator."""
    D = _check_disc(f)
    if D < 0:
        raise DiscriminantError("rho is for indefinite forms")
    return QuadForm(*_rho_indef(D, isqrt(D), *f))


def _cycle_indef(D: int, s: int, f: tuple[int, int, int]) -> list[tuple[int, int, int]]:
    out = [f]
    a, b, c = f
    while True:
        ac = c if c > 0 else -c
        b = s - (s + b) % (2 * ac)
        a, c = c, (b * b - D) // (4 * c)
        g = (a, b, c)
        if g == f:
            return out
        out.append(g)


def form_cycle(f) -> list[QuadForm]:
    """The rho-cycle of a reduced indefinite form (its proper equivalence class)."""
    D = _check_disc(f)
    if not is_reduced(f, D):
        raise ValueError("form_cycle expects a reduced form")
    return [QuadForm(*g) for g in _cycle_indef(D, isqrt(D), tuple(f))]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _compose_raw(D: int, a1: int, b1: int, c1: int, a2: int, b2: int, c2: int) -> tuple[int, int, int, int]:
    """Dirichlet composition; returns (d, a3, b3, c3) with I1*I2 = d*I3 for ideals."""
    s = (b1 + b2) // 2
    d1, x1, y1 = _xgcd(a1, a2)
    d, x2, w = _xgcd(d1, s)
    v = x2 * y1
    a3 = a1 * a2 // (d * d)
    b3 = b2 + 2 * (a2 // d) * (v * (s - b2) - w * c2)
    m = 2 * a3 if a3 > 0 else -2 * a3
    b3 %= m
    return d, a3, b3, (b3 * b3 - D) // (4 * a3)


def compose(f, g) -> QuadForm:
    """Reduced representative of the Dirichlet composite of f and g."""
    D = _check_disc(f)
    _check_disc(g, D)
    _, a, b, c = _compose_raw(D, *f, *g)
    return reduce_form((a, b, c))


def prime_form(D: int, p: int) -> QuadForm | None:
    """The form (p, b, c) of a prime ideal above p, or None when p is inert."""
    if p == 2:
        r = D % 8
        if r == 1:
            b = 1
        elif r == 0:
            b = 0
        elif r == 4:
            b = 2
        else:
            return None
    else:
        root = _sqrt_table(p).get(D % p)
        if root is None:
            return None
        b = root if (root - D) % 2 == 0 else p - root
    return QuadForm(p, b, (b * b - D) // (4 * p))


# ---------------------------------------------------------------------------
# Class groups


class ClassGroupComputation:
    """Narrow (real) or ordinary (imaginary) form class group of a discriminant.

    The group is built by adjoining the orientation-reversing class J (real
    case) and then prime forms p < generation_bound(D).  Each class is stored
    with all forms of its reduction cycle, so identifying the class of a
    form costs one reduction and a dictionary lookup.
    """

    def __init__(self, D: int, bound: int | None = None):
        if not is_fundamental(D):
            raise DiscriminantError(f"{D} is not a fundamental discriminant")
        if abs(D) > MAX_ABS_DISCRIMINANT:
            raise DiscriminantError(f"|D| above supported limit {MAX_ABS_DISCRIMINANT}")
        self.D = D
        self.real = D > 0
        self.bound = bound or generation_bound(D)
        if self.real:
            s = self.s = isqrt(D)
            canon = lambda f: _reduce_indef(D, s, *f)  # noqa: E731
            members = lambda f: _cycle_indef(D, s, f)  # noqa: E731
        else:
            self.s = 0
            canon = lambda f: _reduce_def(D, *f)  # noqa: E731
            members = lambda f: (f,)  # noqa: E731
        op = lambda f, g: _compose_raw(D, *f, *g)[1:]  # noqa: E731
        self._canon = canon
        self.builder = SubgroupBuilder(tuple(principal_form(D)), op, canon, members)
        self.J = None
        if self.real:
            b0 = principal_form(D).b
            self.J = (-1, b0, (D - b0 * b0) // 4)
            self.builder.add(self.J)
        self.prime_keys: dict[int, tuple[int, int, int]] = {}
        add = self.builder.add
        for p in primes_below(self.bound):
            f = prime_form(D, p)
            if f is None:
                continue
            key = canon(f)
            self.prime_keys[p] = key
            add(key)
        self.narrow = self.builder.presentation()
        n = len(self.builder.generators)
        rows = [r + [0] * (n - len(r)) for r in self.builder.relations]
        if self.real:
            rows.append(list(self.dlog(self.J)))
        self.wide = Presentation(rows, n)

    def dlog(self, f) -> tuple[int, ...]:
        """Exponent vector of a form's class in the builder's generators."""
        v = self.builder.dlog(tuple(f))
        if v is None:
            raise RuntimeError(f"form {tuple(f)} not found; generation bound too small")
        return v

    @property
    def narrow_group(self) -> FinAbGroup:
        return self.narrow.group

    @property
    def group(self) -> FinAbGroup:
        return self.wide.group

    @property
    def narrow_order(self) -> int:
        return self.builder.order

    def prime_vector(self, p: int) -> tuple[int, ...] | None:
        key = self.prime_keys.get(p)
        if key is None:
            f = prime_form(self.D, p)
            if f is None:
                return None
            key = self._canon(tuple(f))
            self.prime_keys[p] = key
        return self.dlog(key)

    def ideal_generators(self, avoid: int = 1) -> tuple[list[int], list[list[int]]]:
        """Primes p coprime to ``avoid`` whose ideal classes generate the wide
        class group, and a basis of the relation lattice among them."""
        W = self.wide
        chosen: list[int] = []
        vecs: list[tuple[int, ...]] = []
        index = W.group.order
        if index > 1:
            limit = self.bound
            tried = 0
            p = 1
            while index > 1:
                p = _next_prime(p)
                if p >= limit:
                    tried += 1
                    if tried > GENERATOR_RETRY_PRIMES:
                        raise RuntimeError(f"no ideal generators coprime to {avoid} found for D={self.D}")
                if avoid % p == 0:
                    continue
                v = self.prime_vector(p)
                if v is None:
                    continue
                new = W.subgroup_index(vecs + [v])
                if new < index:
                    chosen.append(p)
                    vecs.append(v)
                    index = new
        return chosen, W.kernel(vecs)


def _next_prime(p: int) -> int:
    q = p + 1
    while True:
        if q > 1 and all(q % r for r in range(2, isqrt(q) + 1)):
            return q
        q += 1


def class_group(D: int) -> FinAbGroup:
    return ClassGroupComputation(D).group


def narrow_class_group(D: int) -> FinAbGroup:
    return ClassGroupComputation(D).narrow_group


# ---------------------------------------------------------------------------
# Elements and units


@dataclass(frozen=True)
class QuadNumber:
    """The element (x + y*sqrt(D))/z of Q(sqrt(D)), normalized with z > 0."""

    x: int
    y: int
    z: int
    D: int

    def __post_init__(self) -> None:
        x, y, z = self.x, self.y, self.z
        if z == 0:
            raise ZeroDivisionError("zero denominator")
        if z < 0:
            x, y, z = -x, -y, -z
        g = math.gcd(math.gcd(x, y), z)
        object.__setattr__(self, "x", x // g)
        object.__setattr__(self, "y", y // g)
        object.__setattr__(self, "z", z // g)

    @classmethod
    def rational(cls, q, D: int) -> "QuadNumber":
        q = Fraction(q)
        return cls(q.numerator, 0, q.denominator, D)

    def __mul__(self, other: "QuadNumber") -> "QuadNumber":
        if isinstance(other, (int, Fraction)):
            other = QuadNumber.rational(other, self.D)
        return QuadNumber(
            self.x * other.x + self.D * self.y * other.y,
            self.x * other.y + self.y * other.x,
            self.z * other.z,
            self.D,
        )

    __rmul__ = __mul__

    def __add__(self, other: "QuadNumber") -> "QuadNumber":
        if isinstance(other, (int, Fraction)):
            other = QuadNumber.rational(other, self.D)
        return QuadNumber(self.x * other.z + other.x * self.z, self.y * other.z + other.y * self.z, self.z * other.z, self.D)

    def __neg__(self) -> "QuadNumber":
        return QuadNumber(-self.x, -self.y, self.z, self.D)

    def __sub__(self, other: "QuadNumber") -> "QuadNumber":
        return self + (-other)

    def conj(self) -> "QuadNumber":
        return QuadNumber(self.x, -self.y, self.z, self.D)

    def norm(self) -> Fraction:
        return Fraction(self.x * self.x - self.D * self.y * self.y, self.z * self.z)

    def trace(self) -> Fraction:
        return Fraction(2 * self.x, self.z)

    def inverse(self) -> "QuadNumber":
        n = self.x * self.x - self.D * self.y * self.y
        if n == 0:
            raise ZeroDivisionError("zero element")
        return QuadNumber(self.x * self.z, -self.y * self.z, n, self.D)

    def __truediv__(self, other: "QuadNumber") -> "QuadNumber":
        if isinstance(other, (int, Fraction)):
            other = QuadNumber.rational(other, self.D)
        return self * other.inverse()

    def __pow__(self, k: int) -> "QuadNumber":
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadNumber(1, 0, 1, self.D)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def signs(self) -> tuple[int, int]:
        """Signs at the two real embeddings (real fields only)."""
        if self.D < 0:
            raise ValueError("no real embeddings")
        return _sign_of(self.x, self.y, self.D), _sign_of(self.x, -self.y, self.D)

    def is_integral(self) -> bool:
        delta = self.D % 2
        u, v = self.x - self.y * delta, 2 * self.y
        return u % self.z == 0 and v % self.z == 0

    def omega_coords(self, m: int) -> tuple[int, int]:
        """Residue (s, t) with self = s + t*omega mod m, omega = (delta + sqrt(D))/2."""
        delta = self.D % 2
        u, v, z = self.x - self.y * delta, 2 * self.y, self.z
        g = math.gcd(math.gcd(u, v), z)
        u, v, z = u // g, v // g, z // g
        if math.gcd(z, m) != 1:
            raise ValueError("element is not integral at the modulus")
        zi = pow(z, -1, m) if m > 1 else 0
        return (u * zi) % m if m > 1 else 0, (v * zi) % m if m > 1 else 0

    def to_mp(self, ctx=None):
        from .algebra import MP

        ctx = ctx or MP
        return (ctx.mpf(self.x) + ctx.mpf(self.y) * ctx.sqrt(self.D)) / self.z

    def __str__(self) -> str:
        return format_quadratic(self.x, self.y, self.z, self.D)


def _sign_of(x: int, y: int, D: int) -> int:
    """Sign of x + y*sqrt(D) for D > 0 not a square."""
    if y == 0:
        return (x > 0) - (x < 0)
    if x == 0:
        return 1 if y > 0 else -1
    if (x > 0) == (y > 0):
        return 1 if x > 0 else -1
    # opposite signs: compare x^2 with D*y^2
    bigger_x = x * x > D * y * y
    return (1 if x > 0 else -1) if bigger_x else (1 if y > 0 else -1)


def format_quadratic(x: int, y: int, z: int, D: int) -> str:
    """Human-readable form of (x + y*sqrt(D))/z, simplifying sqrt(D) when 4 | D."""
    root = f"sqrt({D})"
    if D % 4 == 0:
        # sqrt(D) = 2 sqrt(D/4)
        y, root = 2 * y, f"sqrt({D // 4})"
        g = math.gcd(math.gcd(x, y), z)
        x, y, z = x // g, y // g, z // g
    if y == 0:
        body = str(x)
    else:
        coef = "" if abs(y) == 1 else str(abs(y))
        term = f"{coef}{root}" if coef == "" else f"{coef}*{root}"
        if x == 0:
            body = ("-" if y < 0 else "") + term
        else:
            body = f"{x} {'-' if y < 0 else '+'} {term}"
    if z == 1:
        return body
    return f"({body})/{z}"


class QuadUnit(NamedTuple):
    """The unit (x + y*sqrt(D))/2."""

    x: int
    y: int
    D: int

    @property
    def norm(self) -> int:
        return (self.x * self.x - self.D * self.y * self.y) // 4

    def as_number(self) -> QuadNumber:
        return QuadNumber(self.x, self.y, 2, self.D)

    def __mul__(self, other: "QuadUnit") -> "QuadUnit":
        return QuadUnit((self.x * other.x + self.D * self.y * other.y) // 2, (self.x * other.y + self.y * other.x) // 2, self.D)

    def log(self, ctx=None):
        from .algebra import MP

        ctx = ctx or MP
        return ctx.log(self.as_number().to_mp(ctx))

    def __str__(self) -> str:
        return str(self.as_number())


def cf_period(D: int) -> list[int]:
    """Partial quotients of one period of the expansion of (b0 + sqrt(D))/2."""
    return [a for a, _, _ in _cf_states(D)]


def _cf_states(D: int) -> list[tuple[int, int, int]]:
    s = isqrt(D)
    P = s if (s - D) % 2 == 0 else s - 1
    Q = 2
    start = (P, Q)
    out = []
    while True:
        a = (P + s) // Q
        out.append((a, P, Q))
        P = a * Q - P
        Q = (D - P * P) // Q
        if (P, Q) == start:
            return out


def fundamental_unit(D: int) -> QuadUnit:
    """Fundamental unit eps > 1 of the real quadratic order of discriminant D."""
    if D <= 0 or not is_fundamental(D):
        raise DiscriminantError(f"{D} is not a positive fundamental discriminant")
    states = _cf_states(D)
    b0 = states[0][1]
    q_prev, q = 1, 0  # q_{-2}, q_{-1}
    for a, _, _ in states:
        q_prev, q = q, a * q + q_prev
    # q = q_{L-1}, q_prev = q_{L-2}
    return QuadUnit(q * b0 + 2 * q_prev, q, D)


def fundamental_unit_residue(D: int, m: int) -> tuple[tuple[int, int], int]:
    """eps modulo m in the basis (1, omega), and Norm(eps), without forming eps exactly."""
    if D <= 0 or not is_fundamental(D):
        raise DiscriminantError(f"{D} is not a positive fundamental discriminant")
    states = _cf_states(D)
    b0 = states[0][1]
    M = 2 * m
    q_prev, q = 1, 0
    for a, _, _ in states:
        q_prev, q = q, (a * q + q_prev) % M
    x = (q * b0 + 2 * q_prev) % M
    delta = D % 2
    s = ((x - q * delta) % M) // 2
    norm = -1 if len(states) % 2 else 1
    return (s % m, q % m), norm


def totally_positive_unit(D: int) -> QuadUnit:
    eps = fundamental_unit(D)
    return eps if eps.norm == 1 else eps * eps


# ---------------------------------------------------------------------------
# Ideals


@dataclass(frozen=True)
class QuadIdeal:
    """The fractional ideal scale * [a, (b + sqrt(D))/2] with a > 0."""

    a: int
    b: int
    D: int
    scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.a <= 0 or (self.b * self.b - self.D) % (4 * self.a):
            raise ValueError(f"[{self.a}, ({self.b}+sqrt({self.D}))/2] is not an ideal")
        object.__setattr__(self, "scale", Fraction(self.scale))

    @classmethod
    def unit(cls, D: int) -> "QuadIdeal":
        return cls(1, D % 2, D)

    @classmethod
    def principal_rational(cls, q, D: int) -> "QuadIdeal":
        return cls(1, D % 2, D, abs(Fraction(q)))

    @property
    def c(self) -> int:
        return (self.b * self.b - self.D) // (4 * self.a)

    @property
    def norm(self) -> Fraction:
        return self.scale**2 * self.a

    def basis(self) -> tuple[QuadNumber, QuadNumber]:
        s = self.scale
        return (
            QuadNumber(self.a * s.numerator, 0, s.denominator, self.D),
            QuadNumber(self.b * s.numerator, s.numerator, 2 * s.denominator, self.D),
        )

    def conj(self) -> "QuadIdeal":
        return QuadIdeal(self.a, -self.b, self.D, self.scale)

    def inverse(self) -> "QuadIdeal":
        return QuadIdeal(self.a, -self.b, self.D, 1 / (self.scale * self.a))

    def key(self) -> tuple[int, int, Fraction]:
        """Canonical data of the lattice (b is only defined modulo 2a)."""
        return self.a, self.b % (2 * self.a), self.scale

    def same_lattice(self, other: "QuadIdeal") -> bool:
        return self.key() == other.key()

    def __str__(self) -> str:
        core = f"[{self.a}, ({self.b} + sqrt({self.D}))/2]"
        return core if self.scale == 1 else f"{self.scale} * {core}"


def ideal_mul(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    if I.D != J.D:
        raise DiscriminantError("ideals from different fields")
    d, a3, b3, _ = _compose_raw(I.D, I.a, I.b, I.c, J.a, J.b, J.c)
    return QuadIdeal(a3, b3, I.D, I.scale * J.scale * d)


def ideal_pow(I: QuadIdeal, k: int) -> QuadIdeal:
    if k < 0:
        return ideal_pow(I.inverse(), -k)
    out = QuadIdeal.unit(I.D)
    base = I
    while k:
        if k & 1:
            out = ideal_mul(out, base)
        base = ideal_mul(base, base)
        k >>= 1
    return out


class _Tracker:
    """Multiplier lam = (x + y*sqrt(D))/(2*den) accumulated without gcds."""

    __slots__ = ("x", "y", "den")

    def __init__(self) -> None:
        self.x, self.y, self.den = 2, 0, 1

    def step(self, D: int, a: int, b: int) -> None:
        # multiply by (b - sqrt(D))/(2a)
        x, y = self.x, self.y
        self.x, self.y = (x * b - y * D) // 2, (y * b - x) // 2
        self.den *= a

    def number(self, D: int) -> QuadNumber:
        return QuadNumber(self.x, self.y, 2 * self.den, D)


def _ideal_rho(D: int, s: int, a: int, b: int) -> tuple[int, int]:
    c = (b * b - D) // (4 * a)
    ac = c if c > 0 else -c
    m = 2 * ac
    if D > 0 and ac <= s:
        b = s - (s + b) % m
    else:
        b = (-b) % m
        if b > ac:
            b -= m
    return ac, b


def _ideal_is_reduced(D: int, s: int, a: int, b: int) -> bool:
    if D < 0:
        c = (b * b - D) // (4 * a)
        return abs(b) <= a <= c and not (b < 0 and (a == c or -b == a))
    return 0 < b <= s and 2 * a - b <= s and 2 * a + b > s


def reduce_ideal(I: QuadIdeal) -> tuple[QuadIdeal, QuadNumber]:
    """A reduced ideal R and lam with lam * I = R."""
    D = I.D
    s = isqrt(abs(D))
    a, b = I.a, I.b
    t = _Tracker()
    if D < 0:
        b = b % (2 * a)
        if b > a:
            b -= 2 * a
    while not _ideal_is_reduced(D, s, a, b):
        t.step(D, a, b)
        a, b = _ideal_rho(D, s, a, b)
        if D < 0:
            b = b % (2 * a)
            if b > a:
                b -= 2 * a
    lam = t.number(D) * QuadNumber.rational(1 / I.scale, D)
    return QuadIdeal(a, b, D), lam


def is_principal_with_generator(I: QuadIdeal) -> QuadNumber | None:
    """alpha with I = (alpha), or None if I is not principal."""
    D = I.D
    R, lam = reduce_ideal(I)
    a, b = R.a, R.b
    s = isqrt(abs(D))
    t = _Tracker()
    if D > 0:
        start = (a, b)
        while a != 1:
            t.step(D, a, b)
            a, b = _ideal_rho(D, s, a, b)
            if (a, b) == start:
                return None
    elif a != 1:
        return None
    mu = t.number(D) * lam
    return mu.inverse()
