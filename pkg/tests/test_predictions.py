import json
from fractions import Fraction

import pytest

from raystat.algebra import MP, C2FinAbGroup, FinAbGroup, eta
from raystat.extensions import ConcreteModule
from raystat.predictions import (
    LocalType,
    SplittingSignature,
    all_signatures,
    av_plus,
    av_plus_derived,
    av_plus_fixed_R,
    build_UR,
    density_pR,
    elltorsexp_closed,
    elltorsexp_series,
    expected_arakelov_torsion,
    local_types,
    moment_series,
    orbit_measure,
    prediction_report,
    rank_subspace_prob,
    rank_subspace_total,
    s_local,
    s_local_derived,
    torus_image_prob,
)
from raystat.rayclass import SplittingType

Z = FinAbGroup
S, I, R = SplittingType.SPLIT, SplittingType.INERT, SplittingType.RAMIFIED


def sig(p, k, kind, variant=0):
    return SplittingSignature((LocalType(p, k, kind, variant),))


def test_build_UR_examples():
    U = build_UR(sig(7, 1, S), 7, 3)
    assert U.plus == Z((3,)) and U.minus == Z((3,))
    U = build_UR(sig(5, 1, I), 5, 3)
    assert U.plus.is_trivial and U.minus == Z((3,))
    for v in (1, -1):
        U = build_UR(sig(3, 1, R, v), 3, 3)
        assert U.plus.is_trivial and U.minus == Z((3,))


def test_build_UR_rejects():
    with pytest.raises(ValueError):
        build_UR(sig(7, 1, S), 7, 2)
    with pytest.raises(ValueError):
        build_UR(sig(7, 1, S), 21, 3)


def test_signature_matches_representative():
    for m in (7, 9, 15):
        for s, _ in all_signatures(m):
            D = s.representative()
            assert s.matches(D)
            assert SplittingSignature.of_field(D, m) == s


def test_density_examples():
    assert density_pR(7, S) == Fraction(7, 16)
    assert density_pR(7, "ramified") == Fraction(1, 8)
    for p in (2, 3, 5, 7, 11):
        assert sum(density_pR(p, t) for t in (S, I, R)) == 1
        assert sum(w for _, w in local_types(p, 1)) == 1
    assert sum(w for _, w in all_signatures(63)) == 1


def test_s_local_examples():
    assert s_local(7, 1, 3) == Fraction(45, 8)
    assert s_local(3, 1, 3) == Fraction(3, 2)
    assert s_local(3, 2, 3) == Fraction(45, 4)
    assert s_local(11, 1, 3) == Fraction(23, 12)  # 11 = -1 mod 3
    assert s_local(11, 2, 7) == 1


@pytest.mark.parametrize("ell", [3, 5, 7])
def test_s_local_rederived_from_rings(ell):
    for p in (2, 3, 5, 7, 11, 13, 29, 31, 43):
        for k in (1, 2):
            assert s_local_derived(p, k, ell) == s_local(p, k, ell), (p, k)


def test_av_plus_examples():
    assert av_plus(3, 7) == Fraction(39, 8)
    assert av_plus(3, 3) == Fraction(3, 2)
    assert av_plus(3, 1) == Fraction(4, 3)
    with pytest.raises(ValueError):
        av_plus(2, 7)


@pytest.mark.parametrize("ell,m", [(3, 1), (3, 7), (3, 3), (3, 9), (3, 21), (3, 63), (3, 35), (5, 11), (5, 25), (7, 13)])
def test_av_plus_is_weighted_fixed_ring_average(ell, m):
    assert av_plus_derived(ell, m) == av_plus(ell, m)


def test_fixed_ring_examples():
    assert av_plus_fixed_R(sig(7, 1, S), 7, 3) == 6
    assert av_plus_fixed_R(sig(5, 1, I), 5, 3) == 2
    assert av_plus_fixed_R(sig(11, 1, S), 11, 3) == Fraction(4, 3)
    assert expected_arakelov_torsion(sig(7, 1, S), 7, 3) == 18
    assert expected_arakelov_torsion(sig(11, 1, I), 11, 3) == 6
    for s, _ in all_signatures(63):
        assert av_plus_fixed_R(s, 63, 3) == expected_arakelov_torsion(s, 63, 3) / 3


def test_multiplicativity_of_local_factors():
    for ell in (3, 5):
        for m1, m2 in [(7, 11), (9, 13), (2, 31)]:
            lhs = sum(w * build_UR(s, m1 * m2, ell).quotient_size for s, w in all_signatures(m1 * m2))
            rhs = 1
            for m in (m1, m2):
                rhs *= sum(w * build_UR(s, m, ell).quotient_size for s, w in all_signatures(m))
            assert lhs == rhs


def test_rank_subspace_examples():
    pre = eta(None, 3) / (MP.mpf(2) / 3)
    assert abs(rank_subspace_prob(1, 0, 1, 3) - pre / 3) < 1e-40
    assert abs(rank_subspace_prob(1, 0, 1, 3) - 0.28006) < 1e-5
    assert abs(rank_subspace_prob(1, 1, 1, 3) - pre * 2 / 3) < 1e-40
    with pytest.raises(ValueError):
        rank_subspace_prob(1, 2, 1, 3)


@pytest.mark.parametrize("u", [0, 1, 2, 3])
def test_rank_subspace_sums_to_one(u):
    assert abs(rank_subspace_total(u, 3) - 1) < 1e-6


def test_torus_image_prob():
    assert abs(torus_image_prob(1, 3) - MP.mpf(2) / 3) < 1e-40
    assert abs(torus_image_prob(2, 5) - MP.mpf(4) / 25) < 1e-40
    with pytest.raises(ValueError):
        torus_image_prob(0, 3)


def test_moment_identity():
    assert abs(moment_series(3, 8) - MP.mpf(4) / 3) < 1e-6
    assert moment_series(3, 4) < moment_series(3, 6) < MP.mpf(4) / 3
    assert abs(moment_series(5, 5) - MP.mpf(6) / 5) < 1e-5


@pytest.mark.parametrize("plus,minus", [(0, 0), (1, 1), (0, 1), (2, 1), (1, 2)])
def test_elltorsexp_series_matches_closed_form(plus, minus):
    closed = 3 * 3**plus + 3 ** (plus + minus)
    series = elltorsexp_series(plus, minus, 3, 6)
    assert abs(series - closed) / closed < 0.01


def test_elltorsexp_closed_for_split_ring():
    assert elltorsexp_closed(build_UR(sig(7, 1, S), 7, 3)) == 18


def test_orbit_measures():
    assert orbit_measure("unit-orbit", orbit_size=1, minus_order=3) == Fraction(1, 3)
    assert orbit_measure("unit-orbit", orbit_size=2, minus_order=3) == Fraction(2, 3)
    assert orbit_measure("real-sigma", orbit_size=2, minus_order=3, ext_size=3) == Fraction(2, 9)
    C = U = ConcreteModule.from_c2(C2FinAbGroup(Z(), Z((3,))))
    orbits = orbit_measure("imaginary-ext", C=C, U=U)
    assert sorted(o.measure for o in orbits) == [Fraction(1, 3), Fraction(2, 3)]
    with pytest.raises(ValueError):
        orbit_measure("other")


def test_report_json():
    rep = prediction_report(3, 7, moment_exp=5)
    d = json.loads(rep.to_json())
    assert d["av_plus"] == {"num": 39, "den": 8}
    assert d["av_plus_derived"] == d["av_plus"]
    assert d["s_local"]["7^1"] == {"num": 45, "den": 8}
    codes = {s["signature"]: s for s in d["signatures"]}
    assert codes["7:S"]["av_plus_fixed_R"] == {"num": 6, "den": 1}
    assert codes["7:S"]["density"] == {"num": 7, "den": 16}
    assert 0 < d["moment_truncation"] < 1e-2
