import pytest

from raystat.algebra import C2FinAbGroup, FinAbGroup, ext_size, hom_size, s_groups
from raystat.extensions import (
    BruteForceBoundError,
    ConcreteModule,
    ExtensionSpace,
    automorphisms,
    cocycle_ext_count,
    ext_count,
    hom_count,
)

Z = FinAbGroup
P = C2FinAbGroup


def mod(plus=(), minus=()):
    return ConcreteModule.from_c2(P(Z(plus), Z(minus)))


def test_ext_of_z3_by_z3():
    M = ConcreteModule.from_group(Z((3,)))
    assert ext_count(M, M, equivariant=False) == 3
    assert cocycle_ext_count(Z((3,)), Z((3,))) == 3


@pytest.mark.parametrize(
    "A,B",
    [(A, B) for A in s_groups([3], 27) for B in s_groups([3], 27)] + [(Z((5,)), Z((15,))), (Z((9,)), Z((3, 3)))],
    ids=str,
)
def test_ext_matches_hom_for_abelian_groups(A, B):
    CA, CB = ConcreteModule.from_group(A), ConcreteModule.from_group(B)
    assert ext_count(CA, CB, equivariant=False) == hom_size(A, B) == ext_size(A, B)
    assert hom_count(CA, CB, equivariant=False) == hom_size(A, B)


def test_cocycle_route_small_groups():
    for A in s_groups([3], 9):
        for B in s_groups([3], 27):
            assert cocycle_ext_count(A, B) == hom_size(A, B)


def test_equivariant_ext_vanishes_across_eigenparts():
    assert ext_count(mod(minus=(3,)), mod(plus=(3,))) == 1
    assert ext_count(mod(minus=(3,)), mod(minus=(3,))) == 3
    assert hom_count(mod(plus=(3,)), mod(minus=(3,))) == 1


def test_orbit_examples():
    C, A = mod(minus=(3,)), mod(minus=(3,))
    space = ExtensionSpace(C, A)
    orbits = space.orbits(automorphisms(A), [])
    assert sorted(len(o) for o in orbits) == [1, 2]
    assert [space.split_class()] in orbits
    trivial = ExtensionSpace(mod(), A)
    assert [len(o) for o in trivial.orbits(automorphisms(A), [])] == [1]
    cross = ExtensionSpace(C, mod(plus=(3,)))
    assert cross.size == 1


def test_orbit_sizes_sum_to_ext():
    C, A = mod(minus=(3,), plus=(3,)), mod(minus=(9,))
    space = ExtensionSpace(C, A)
    orbits = space.orbits(automorphisms(A), automorphisms(C))
    assert sum(len(o) for o in orbits) == space.size


def test_automorphisms_count():
    assert len(automorphisms(mod(minus=(3, 3)))) == 48
    assert len(automorphisms(mod(plus=(3,), minus=(3,)))) == 4
    assert len(automorphisms(mod(plus=(3,), minus=(3,)), equivariant=False)) == 48


def test_bound_enforced():
    with pytest.raises(BruteForceBoundError):
        ExtensionSpace(mod(minus=(9, 9)), mod(minus=(9, 27)), bound=3**8)
