"""Closed modular geodesics attached to narrow ideal classes of real quadratic fields.

A narrow class with a positively ordered basis (alpha, beta) of a
representative ideal gives the form N(alpha x - beta y)/N(a) and the
half-circle from beta/alpha to its conjugate.  The Arakelov point with
scale u maps to M * (u^2 i / N(a)) with M = [[beta, beta'], [alpha, alpha']],
and it runs once around the closed geodesic as u grows by a factor eps_+.

The embedding sends sqrt(D) to the positive root throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .algebra import MP
from .quadfield import (
    ClassGroupComputation,
    QuadForm,
    QuadNumber,
    is_fundamental,
    totally_positive_unit,
)


class OrientationError(ValueError):
    """The basis is not positively ordered."""


def _mpc(z):
    return MP.mpc(z)


# ---------------------------------------------------------------------------
# Ideal bases and forms


def orientation(alpha: QuadNumber, beta: QuadNumber) -> Fraction:
    """alpha' * beta - alpha * beta' divided by sqrt(D); positive iff positively ordered."""
    w = alpha.conj() * beta - alpha * beta.conj()
    # w is a rational multiple of sqrt(D)
    if w.x != 0:
        raise ArithmeticError("orientation expression is not a multiple of sqrt(D)")
    return Fraction(w.y, w.z)


def class_to_form(alpha: QuadNumber, beta: QuadNumber, norm: Fraction | int) -> QuadForm:
    """The form N(alpha x - beta y)/norm for a positively ordered basis."""
    if alpha.D != beta.D or alpha.D <= 0:
        raise ValueError("basis must lie in one real quadratic field")
    if orientation(alpha, beta) <= 0:
        raise OrientationError("basis is not positively ordered; swap alpha and beta")
    norm = Fraction(norm)
    a = alpha.norm() / norm
    c = beta.norm() / norm
    b = -(alpha * beta.conj()).trace() / norm
    if any(q.denominator != 1 for q in (a, b, c)):
        raise ArithmeticError("form coefficients are not integral; wrong ideal norm")
    return QuadForm(int(a), int(b), int(c))


def form_basis(f: QuadForm, D: int | None = None) -> tuple[QuadNumber, QuadNumber, Fraction]:
    """A positively ordered basis (alpha, beta) and norm N(a) with class_to_form = f.

    The lattice is Z + Z*tau with tau = (-b + sqrt D)/(2a), multiplied by
    sqrt(D) when a < 0 to make the norm ratio negative.
    """
    a, b, c = f
    D = b * b - 4 * a * c if D is None else D
    if D <= 0:
        raise ValueError("form must be indefinite")
    one = QuadNumber(1, 0, 1, D)
    tau = QuadNumber(-b, 1, 2 * a, D)
    norm = Fraction(1, abs(a))
    if a < 0:
        r = QuadNumber(0, 1, 1, D)
        return one * r, tau * r, norm * D
    return one, tau, norm


def narrow_class_forms(D: int) -> list[QuadForm]:
    """One reduced form per narrow class."""
    cg = ClassGroupComputation(D)
    return [QuadForm(*f) for f, _ in cg.builder.elements]


# ---------------------------------------------------------------------------
# Geodesic arcs


@dataclass(frozen=True)
class Endpoint:
    """(x + y sqrt D)/z as an exact triple, with its decimal value."""

    x: int
    y: int
    z: int
    D: int

    @property
    def number(self) -> QuadNumber:
        return QuadNumber(self.x, self.y, self.z, self.D)

    def value(self):
        return self.number.to_mp()

    def to_json(self) -> list:
        return [[self.x, self.y, self.z], MP.nstr(self.value(), 20)]


@dataclass
class GeodesicArc:
    D: int
    form: QuadForm
    endpoints: tuple[Endpoint, Endpoint]
    length: object
    samples: list[tuple[float, float]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "D": self.D,
                "form": list(self.form),
                "endpoints": [e.to_json() for e in self.endpoints],
                "length": MP.nstr(self.length, 30),
                "length_schoof": MP.nstr(self.length / MP.sqrt(2), 30),
                "samples": [list(s) for s in self.samples],
            }
        )


def endpoints(f: QuadForm) -> tuple[Endpoint, Endpoint]:
    """Roots (-b -+ sqrt D)/(2a) of f(x, 1), smaller first."""
    a, b, c = f
    D = b * b - 4 * a * c
    if D <= 0:
        raise ValueError("definite forms have no geodesic")
    r1, r2 = Endpoint(-b, -1, 2 * a, D), Endpoint(-b, 1, 2 * a, D)
    n1, n2 = r1.number, r2.number
    if (n2 - n1).signs()[0] < 0:
        r1, r2 = r2, r1
    return r1, r2


def _normalize(e: Endpoint) -> Endpoint:
    n = e.number
    return Endpoint(n.x, n.y, n.z, n.D)


def automorph(f: QuadForm) -> tuple[tuple[int, int], tuple[int, int]]:
    """The SL2(Z) generator fixing f that translates along its geodesic by 2 log eps_+."""
    a, b, c = f
    D = b * b - 4 * a * c
    eps = totally_positive_unit(D)
    t, u = eps.x, eps.y
    return (((t - b * u) // 2, -c * u), (a * u, (t + b * u) // 2))


def mobius(g, z):
    (p, q), (r, s) = g
    return (p * z + q) / (r * z + s)


def reduce_to_fundamental_domain(z, max_steps: int = 10_000):
    """Move z into |Re z| <= 1/2, |z| >= 1 by translations and z -> -1/z."""
    z = _mpc(z)
    for _ in range(max_steps):
        n = MP.nint(z.real)
        if n:
            z -= n
        if abs(z) < 1 - MP.mpf(10) ** (-MP.dps + 10):
            z = -1 / z
            continue
        return z
    raise RuntimeError("fundamental domain reduction did not converge")


def geodesic_length(D: int, form: QuadForm | None = None):
    """Length 2 log eps_+ of the closed geodesic; the same for every class."""
    if D <= 0 or not is_fundamental(D):
        raise ValueError("D must be a positive fundamental discriminant")
    return 2 * totally_positive_unit(D).log(MP)


def form_to_geodesic(f: QuadForm, samples: int = 0) -> GeodesicArc:
    """Endpoints, length and n points of one period reduced to the fundamental domain."""
    a, b, c = f
    D = b * b - 4 * a * c
    if D <= 0:
        raise ValueError("definite forms have no geodesic")
    e = tuple(_normalize(x) for x in endpoints(f))
    length = geodesic_length(D)
    pts = []
    if samples > 0:
        alpha, beta, norm = form_basis(QuadForm(a, b, c), D)
        log_eps = length / 2
        for k in range(samples):
            u = MP.exp(log_eps * k / samples)
            z = reduce_to_fundamental_domain(arakelov_point(alpha, beta, norm, u))
            pts.append((float(z.real), float(z.imag)))
    return GeodesicArc(D, QuadForm(a, b, c), e, length, pts)


def _working_digits(f: QuadForm) -> int:
    # translating by the automorph moves points exponentially close to the
    # real axis, so precision grows with the size of eps_+
    a, b, c = f
    eps = totally_positive_unit(b * b - 4 * a * c)
    return MP.dps + 2 * len(str(eps.x)) + 10


def arc_length_integral(f: QuadForm):
    """Hyperbolic length from the top of the half-circle to its automorph image, by quadrature.

    The length element on the circle is dt/sin t.  The part beyond pi/2 is
    reflected to start near 0, and t = e^s spreads the tiny angles evenly,
    so each piece is one smooth integral.  Only the limits need the extra
    working digits.
    """
    with MP.workdps(_working_digits(f)):
        e1, e2 = (x.value() for x in endpoints(f))
        center, radius = (e1 + e2) / 2, (e2 - e1) / 2
        z0 = MP.mpc(center, radius)
        z1 = mobius(automorph(f), z0)
        lo, hi = sorted((MP.arg(z0 - center), MP.arg(z1 - center)))
        mid = MP.pi / 2
        pieces = []
        if lo < mid:
            pieces.append((MP.log(lo), MP.log(min(hi, mid))))
        if hi > mid:
            pieces.append((MP.log(MP.pi - hi), MP.log(MP.pi - max(lo, mid))))
    total = MP.mpf(0)
    for a, b in pieces:
        total += MP.quad(lambda s: MP.exp(s) / MP.sin(MP.exp(s)), [+a, +b])
    return total


class ClosedGeodesic:
    """Per-class data for repeated distance queries on one closed geodesic.

    Holds the automorph, the basis matrix and the working precision, all of
    which depend only on the form.  Points are kept as real pairs (x, y)
    since every matrix involved is real.
    """

    def __init__(self, f: QuadForm):
        a, b, c = f
        self.form = QuadForm(a, b, c)
        self.D = b * b - 4 * a * c
        g = automorph(self.form)
        self.moves = (g, ((g[1][1], -g[0][1]), (-g[1][0], g[0][0])))
        self.dps = _working_digits(self.form)
        alpha, beta, norm = form_basis(self.form, self.D)
        with MP.workdps(self.dps):
            b1, b2 = beta.to_mp(MP), beta.conj().to_mp(MP)
            a1, a2 = alpha.to_mp(MP), alpha.conj().to_mp(MP)
            self._coef = (b2 * a2, b1 * a1, a2 * a2, a1 * a1, b1 * a2 - b2 * a1)
            self._scale = MP.mpf(norm.denominator) / norm.numerator

    def _pair(self, u):
        # [[b1, b2], [a1, a2]] applied to i*y
        ba, bb, aa, a11, det = self._coef
        y = MP.mpf(u) ** 2 * self._scale
        y2 = y * y
        den = aa + a11 * y2
        return (ba + bb * y2) / den, det * y / den

    def point(self, u):
        with MP.workdps(self.dps):
            x, y = self._pair(u)
            return MP.mpc(x, y)

    def distance(self, u1, u2, reach: int = 1):
        """Distance in Y(1) between the points of scales u1, u2.

        The hyperbolic metric is taken between the first point and
        automorph translates of the second; acosh is monotone, so only the
        smallest argument is converted.
        """
        with MP.workdps(self.dps):
            z1, z2 = self._pair(u1), self._pair(u2)
            best = _cosh_distance(z1, z2)
            for h in self.moves:
                w = z2
                for _ in range(reach):
                    w = _mobius_pair(h, w)
                    best = min(best, _cosh_distance(z1, w))
            out = MP.acosh(max(MP.mpf(1), best))
        return +out


def _mobius_pair(g, z):
    # det g = 1, so Im(g z) = Im z / |r z + s|^2 exactly
    (p, q), (r, s) = g
    x, y = z
    cx = r * x + s
    ry = r * y
    den = cx * cx + ry * ry
    return ((p * x + q) * cx + p * ry * y) / den, y / den


def _cosh_distance(z1, z2):
    (x1, y1), (x2, y2) = z1, z2
    if y1 <= 0 or y2 <= 0:
        raise ValueError("points must lie in the upper half-plane")
    dx, dy = x1 - x2, y1 - y2
    return 1 + (dx * dx + dy * dy) / (2 * y1 * y2)


def distance_on_closed_geodesic(f: QuadForm, u1, u2, reach: int = 1):
    """Distance in Y(1) along the closed geodesic between the Arakelov points of scales u1, u2."""
    return ClosedGeodesic(f).distance(u1, u2, reach)


# ---------------------------------------------------------------------------
# Arakelov points


@dataclass(frozen=True)
class ArakelovPoint:
    """Point (a, (u^-1, N(a) u)) of the component of a narrow class."""

    alpha: QuadNumber
    beta: QuadNumber
    norm: Fraction
    u: object

    def __post_init__(self) -> None:
        if orientation(self.alpha, self.beta) <= 0:
            raise OrientationError("basis is not positively ordered")
        if not self.u > 0:
            raise ValueError("scale u must be positive")


def arakelov_point(alpha: QuadNumber, beta: QuadNumber, norm: Fraction, u):
    """[[beta, beta'], [alpha, alpha']] applied to u^2 i / N(a)."""
    z = MP.mpc(0, MP.mpf(u) ** 2 / MP.mpf(Fraction(norm).numerator) * Fraction(norm).denominator)
    b1, b2 = beta.to_mp(MP), beta.conj().to_mp(MP)
    a1, a2 = alpha.to_mp(MP), alpha.conj().to_mp(MP)
    return (b1 * z + b2) / (a1 * z + a2)


def arakelov_to_point(p: ArakelovPoint):
    return arakelov_point(p.alpha, p.beta, p.norm, p.u)


def component_distance(u1, u2, D: int, log_eps=None):
    """min over totally positive units eps of 2 |log(eps u1 / u2)|.

    ``log_eps`` may pass a precomputed log eps_+.
    """
    L = totally_positive_unit(D).log(MP) if log_eps is None else log_eps
    x = MP.log(MP.mpf(u1) / MP.mpf(u2))
    r = x - L * MP.floor(x / L)
    return 2 * min(r, L - r)


def hyperbolic_distance(z1, z2):
    z1, z2 = _mpc(z1), _mpc(z2)
    return MP.acosh(max(MP.mpf(1), _cosh_distance((z1.real, z1.imag), (z2.real, z2.imag))))


def export_geodesics(D_values: Iterable[int], path: str, samples: int = 64) -> int:
    """Write one JSON line per narrow class of each D; returns the number of lines."""
    n = 0
    with open(path, "w") as fh:
        for D in D_values:
            for f in narrow_class_forms(D):
                fh.write(form_to_geodesic(f, samples).to_json() + "\n")
                n += 1
    return n


def iter_real_discriminants(X: int) -> Iterator[int]:
    from .quadfield import fundamental_discriminants

    return fundamental_discriminants(X, "+")
