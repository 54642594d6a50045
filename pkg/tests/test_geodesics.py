import json
import random

import pytest

from raystat.algebra import MP
from raystat.geodesics import (
    ArakelovPoint,
    ClosedGeodesic,
    OrientationError,
    arakelov_to_point,
    arc_length_integral,
    automorph,
    class_to_form,
    component_distance,
    distance_on_closed_geodesic,
    endpoints,
    export_geodesics,
    form_basis,
    form_to_geodesic,
    geodesic_length,
    hyperbolic_distance,
    mobius,
    narrow_class_forms,
    reduce_to_fundamental_domain,
)
from raystat.quadfield import QuadForm, QuadNumber, form_cycle, reduce_form, totally_positive_unit


def qn(x, y, z, D):
    return QuadNumber(x, y, z, D)


def test_class_to_form_examples():
    # sqrt(2) = sqrt(8)/2
    assert tuple(class_to_form(qn(1, 0, 1, 8), qn(0, 1, 2, 8), 1)) == (1, 0, -2)
    f = class_to_form(qn(1, 0, 1, 5), qn(1, 1, 2, 5), 1)
    assert tuple(f) == (1, -1, -1)
    # (x, y) -> (x + y, y) carries it to x^2 + xy - y^2
    assert reduce_form(f) in form_cycle(reduce_form((1, 1, -1)))


def test_swapped_basis_rejected():
    with pytest.raises(OrientationError):
        class_to_form(qn(0, 1, 2, 8), qn(1, 0, 1, 8), 1)
    with pytest.raises(OrientationError):
        ArakelovPoint(qn(0, 1, 2, 8), qn(1, 0, 1, 8), 1, MP.mpf(1))


def test_form_basis_round_trip():
    for D in (5, 8, 12, 40, 229, 1345):
        for f in narrow_class_forms(D):
            alpha, beta, norm = form_basis(f, D)
            assert class_to_form(alpha, beta, norm) == f


def test_endpoints_examples():
    e1, e2 = endpoints(QuadForm(1, 0, -2))
    assert abs(e1.value() + MP.sqrt(2)) < 1e-40 and abs(e2.value() - MP.sqrt(2)) < 1e-40
    e1, e2 = endpoints(QuadForm(1, 1, -1))
    assert abs(e1.value() - (-1 - MP.sqrt(5)) / 2) < 1e-40
    assert abs(e2.value() - (-1 + MP.sqrt(5)) / 2) < 1e-40
    with pytest.raises(ValueError):
        endpoints(QuadForm(1, 1, 1))


def test_endpoint_conjugacy_exact():
    for D in (5, 8, 12, 40, 229, 316, 1345):
        for f in narrow_class_forms(D):
            a, b, c = f
            e1, e2 = (e.number for e in endpoints(f))
            assert e1 * e2 == qn(c, 0, a, D)
            assert e1 + e2 == qn(-b, 0, a, D)
            assert e1 == e2.conj()


def test_lengths():
    assert abs(geodesic_length(8) - 3.525494) < 1e-6
    assert abs(geodesic_length(5) - 1.9248473) < 1e-7
    assert abs(geodesic_length(12) - 2.633916) < 1e-6
    assert abs(geodesic_length(8) - 2 * MP.log(3 + 2 * MP.sqrt(2))) < 1e-40
    with pytest.raises(ValueError):
        geodesic_length(-8)


@pytest.mark.parametrize("D", [5, 8, 12, 13, 40, 229, 316, 409])
def test_arc_length_is_circumference(D):
    for f in narrow_class_forms(D):
        assert abs(arc_length_integral(f) - geodesic_length(D)) < 1e-9


def test_samples():
    arc = form_to_geodesic(QuadForm(1, 0, -2))
    assert arc.samples == []
    arc = form_to_geodesic(QuadForm(1, 0, -2), samples=16)
    assert len(arc.samples) == 16
    for x, y in arc.samples:
        assert y > 0 and abs(x) <= 0.5 + 1e-12 and x * x + y * y >= 1 - 1e-12
    with pytest.raises(ValueError):
        form_to_geodesic(QuadForm(1, 1, 1))


def _y1_distance(z, w):
    """Distance in Y(1) for z, w in the fundamental domain (neighbouring translates only)."""
    cands = [w, w + 1, w - 1, -1 / w, -1 / w + 1, -1 / w - 1, -1 / (w + 1), -1 / (w - 1)]
    return min(float(hyperbolic_distance(z, c)) for c in cands)


def test_equivalent_forms_give_same_closed_geodesic():
    n = 600
    for D in (40, 229, 316):
        L = float(geodesic_length(D))
        for f in narrow_class_forms(D):
            base = [complex(*p) for p in form_to_geodesic(f, samples=10).samples]
            for g in form_cycle(f)[1:3]:
                other = [complex(*p) for p in form_to_geodesic(g, samples=n).samples]
                # consecutive samples of g are L/n apart along the curve
                for z in base:
                    assert min(_y1_distance(z, w) for w in other) < L / n


def test_points_lie_on_the_arc_and_move_monotonically():
    f = QuadForm(1, 0, -2)
    alpha, beta, norm = form_basis(f, 8)
    e1, e2 = (e.value() for e in endpoints(f))
    center, radius = (e1 + e2) / 2, (e2 - e1) / 2
    xs = []
    for k in range(1, 40):
        z = arakelov_to_point(ArakelovPoint(alpha, beta, norm, MP.mpf(k) / 8))
        assert abs(abs(z - center) - radius) < 1e-30
        xs.append(z.real)
    assert all(a < b for a, b in zip(xs, xs[1:])) or all(a > b for a, b in zip(xs, xs[1:]))


def test_unit_invariance():
    for D in (8, 229, 1345):
        eps = totally_positive_unit(D).as_number().to_mp(MP)
        for f in narrow_class_forms(D):
            geo = ClosedGeodesic(f)
            for u in (MP.mpf("0.7"), MP.mpf(3)):
                z = reduce_to_fundamental_domain(geo.point(u))
                w = reduce_to_fundamental_domain(geo.point(eps * u))
                assert abs(z - w) < 1e-20


def test_automorph_translates_along_the_geodesic():
    f = QuadForm(1, 0, -2)
    geo = ClosedGeodesic(f)
    g = automorph(f)
    assert g[0][0] * g[1][1] - g[0][1] * g[1][0] == 1
    z = geo.point(MP.mpf(2))
    eps = totally_positive_unit(8).as_number().to_mp(MP)
    assert min(abs(mobius(h, z) - geo.point(2 * eps ** s)) for h in geo.moves for s in (1, -1)) < 1e-30


def test_component_distance_examples():
    L = totally_positive_unit(8).log(MP)
    u = MP.mpf("1.3")
    assert component_distance(u, u, 8) == 0
    assert abs(component_distance(u, MP.exp(L) * u, 8)) < 1e-40
    assert abs(component_distance(u, MP.exp(L / 2) * u, 8) - L) < 1e-40


def test_isometry_on_random_pairs():
    rng = random.Random(7)
    for D in (5, 8, 12, 229, 316):
        L = totally_positive_unit(D).log(MP)
        for f in narrow_class_forms(D):
            geo = ClosedGeodesic(f)
            for _ in range(10):
                u1, u2 = MP.exp(rng.random() * L), MP.exp(rng.random() * L)
                assert abs(geo.distance(u1, u2) - component_distance(u1, u2, D)) < 1e-9
    u1, u2 = MP.mpf(1), MP.mpf("1.5")
    f = QuadForm(1, 0, -2)
    assert distance_on_closed_geodesic(f, u1, u2) == ClosedGeodesic(f).distance(u1, u2)


def test_hyperbolic_distance():
    assert abs(hyperbolic_distance(1j, 2j) - MP.log(2)) < 1e-40
    with pytest.raises(ValueError):
        hyperbolic_distance(1j, -1j)


def test_export(tmp_path):
    n = export_geodesics([8, 40], tmp_path / "g.jsonl", samples=4)
    lines = [json.loads(x) for x in (tmp_path / "g.jsonl").read_text().splitlines()]
    assert n == len(lines) == 1 + len(narrow_class_forms(40))
    rec = lines[0]
    assert rec["D"] == 8 and rec["form"] == list(narrow_class_forms(8)[0])
    assert abs(float(rec["length"]) - 3.525494) < 1e-6
    assert abs(float(rec["length_schoof"]) - 3.525494 / 2**0.5) < 1e-6
    assert len(rec["samples"]) == 4
