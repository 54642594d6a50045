import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raystat.algebra import FinAbGroup
from raystat.oracles import OracleClassGroup, oracle_narrow_class_number
from raystat.quadfield import (
    ClassGroupComputation,
    DiscriminantError,
    QuadForm,
    QuadIdeal,
    QuadNumber,
    class_group,
    compose,
    form_cycle,
    fundamental_discriminants,
    fundamental_unit,
    fundamental_unit_residue,
    ideal_mul,
    ideal_pow,
    is_fundamental,
    is_principal_with_generator,
    is_reduced,
    kronecker,
    narrow_class_group,
    prime_form,
    principal_form,
    reduce_form,
    totally_positive_unit,
)

Z = FinAbGroup


def test_discriminant_stream_examples():
    pos = list(fundamental_discriminants(100, "+"))
    assert len(pos) == 30 and pos[:3] == [5, 8, 12]
    assert list(fundamental_discriminants(6, "+")) == [5]
    assert list(fundamental_discriminants(5, "-")) == [-3, -4]


def test_discriminant_stream_matches_definition():
    for sign in "+-":
        got = list(fundamental_discriminants(3000, sign))
        want = [d for d in range(1, 3000) if is_fundamental(d if sign == "+" else -d)]
        assert [abs(d) for d in got] == want


def test_is_fundamental():
    assert is_fundamental(5) and is_fundamental(8) and is_fundamental(-4) and is_fundamental(-3)
    assert not is_fundamental(4) and not is_fundamental(16) and not is_fundamental(9) and not is_fundamental(1)


def test_kronecker_small():
    assert kronecker(8, 7) == 1 and kronecker(8, 5) == -1 and kronecker(8, 2) == 0
    assert kronecker(5, 2) == -1 and kronecker(-7, 2) == 1


def test_reduce_and_compose_examples():
    f = reduce_form((1, 0, -2))
    assert f in form_cycle(QuadForm(1, 2, -1))
    P = principal_form(40)
    assert compose(P, P) in form_cycle(P)
    g = reduce_form((2, 0, -5))
    h = compose(g, g)
    assert h in form_cycle(P)


def test_reduced_forms_satisfy_conditions():
    for D in (40, 5, 8, 229, -23, -47):
        f = reduce_form(principal_form(D))
        assert is_reduced(f, D)


def test_compose_rejects_mixed_discriminants():
    with pytest.raises(DiscriminantError):
        compose((1, 0, -2), (1, 1, -1))


def test_class_group_examples():
    assert class_group(40) == Z((2,))
    assert class_group(5).is_trivial
    assert narrow_class_group(12) == Z((2,)) and class_group(12).is_trivial
    assert class_group(-23) == Z((3,))
    assert class_group(-84) == Z((2, 2))
    assert class_group(-4027) == Z((3, 3))
    assert class_group(-3299) == Z((3, 9))


@pytest.mark.parametrize("D", [D for D in fundamental_discriminants(400, "+")] + [-D for D in range(3, 400) if is_fundamental(-D)])
def test_class_group_oracle(D):
    assert class_group(D) == OracleClassGroup(D).structure()
    if D > 0:
        assert ClassGroupComputation(D).narrow_order == oracle_narrow_class_number(D)


def test_narrow_degree_follows_unit_norm():
    for D in fundamental_discriminants(3000, "+"):
        cg = ClassGroupComputation(D)
        factor = 2 if fundamental_unit(D).norm == 1 else 1
        assert cg.narrow_order == cg.group.order * factor


def test_composition_group_laws():
    for D in (-84, -23, 229, 1345, 4369):
        cg = ClassGroupComputation(D)
        forms = [f for f, _ in cg.builder.elements]
        P = principal_form(D)
        canon = lambda f: cg.builder.dlog(tuple(reduce_form(f)))  # noqa: E731
        for f in forms:
            assert canon(compose(f, P)) == canon(f)
            for g in forms[:6]:
                assert canon(compose(f, g)) == canon(compose(g, f))
                for h in forms[:3]:
                    assert canon(compose(compose(f, g), h)) == canon(compose(f, compose(g, h)))


def test_unit_examples():
    e = fundamental_unit(8)
    assert (e.x, e.y) == (2, 1)
    assert str(e) == "1 + sqrt(2)" and e.norm == -1
    e12 = fundamental_unit(12)
    assert str(e12) == "2 + sqrt(3)" and e12.norm == 1
    assert str(totally_positive_unit(8)) == "3 + 2*sqrt(2)"
    assert str(totally_positive_unit(5)) == "(3 + sqrt(5))/2"


@settings(max_examples=80, deadline=None)
@given(st.integers(5, 20000))
def test_unit_residue_matches_exact_unit(D):
    if not is_fundamental(D):
        return
    u = fundamental_unit(D)
    for m in (1, 2, 7, 9, 21):
        res, norm = fundamental_unit_residue(D, m)
        assert res == u.as_number().omega_coords(m)
        assert norm == u.norm


def test_quadnumber_arithmetic():
    a = QuadNumber(1, 1, 2, 5)
    assert a * a - a == QuadNumber(1, 0, 1, 5)
    assert a.norm() == -1 and a.trace() == 1
    assert (a / a) == QuadNumber(1, 0, 1, 5)
    assert a.conj() == QuadNumber(1, -1, 2, 5)
    assert QuadNumber(0, 1, 2, 8).norm() == -2


def test_ideal_examples():
    D = 40
    I = QuadIdeal(2, 0, D)
    assert is_principal_with_generator(I) is None
    I2 = ideal_mul(I, I)
    g = is_principal_with_generator(I2)
    assert g is not None and abs(g.norm()) == 4
    assert I2.same_lattice(QuadIdeal.principal_rational(2, D))
    one = ideal_mul(I, I.inverse())
    gen = is_principal_with_generator(one)
    assert gen is not None and abs(gen.norm()) == 1


def test_generator_generates():
    for D in (-23, 229, 1345, 79 * 4):
        if not is_fundamental(D):
            continue
        cg = ClassGroupComputation(D)
        primes, kernel = cg.ideal_generators()
        for row in kernel:
            J = QuadIdeal.unit(D)
            for p, e in zip(primes, row):
                pf = prime_form(D, p)
                J = ideal_mul(J, ideal_pow(QuadIdeal(pf.a, pf.b, D), e))
            alpha = is_principal_with_generator(J)
            assert alpha is not None
            assert abs(alpha.norm()) == J.norm


def test_invalid_discriminant():
    with pytest.raises(DiscriminantError):
        ClassGroupComputation(16)
    with pytest.raises(DiscriminantError):
        fundamental_unit(-8)
