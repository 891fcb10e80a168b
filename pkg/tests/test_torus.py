import numpy as np
import pytest

from toroidal.errors import TooLarge
from toroidal.field import build_ctx
from toroidal.torus import TorusMatrix, subgroup_exponents, subgroup_order, subgroup_points

from oracles import rank_naive, subgroup_naive


def test_parse_and_shape():
    A = TorusMatrix.parse("1,-1;2,3")
    assert A.entries == ((1, -1), (2, 3)) and A.k == 2 and A.r == 2
    with pytest.raises(ValueError):
        TorusMatrix.parse("1,2;3")


@pytest.mark.parametrize("mat", ["1,-1", "2,-2", "1,2,3;2,4,6", "1,0,0;0,1,0;0,0,1", "0,0", "3,5;1,2"])
def test_rank(mat):
    A = TorusMatrix.parse(mat)
    assert A.rank == rank_naive(A.entries)


def test_type_flags():
    assert TorusMatrix.row(1, 2).affine_type
    assert not TorusMatrix.row(1, -1).affine_type
    assert not TorusMatrix.parse("1,0;0,0").affine_type  # second column has no positive entry
    assert TorusMatrix.row(1, -1).connected_type
    assert not TorusMatrix.row(2, -2).connected_type
    assert TorusMatrix.row(2, 3).connected_type
    assert not TorusMatrix.parse("1,1;1,-1").connected_type  # determinant 2


def test_subgroup_examples():
    assert subgroup_points(build_ctx(5), TorusMatrix.row(1, -1)) == [(1, 1), (2, 2), (3, 3), (4, 4)]
    assert subgroup_points(build_ctx(7), TorusMatrix.row(2)) == [(1,), (6,)]
    pts = subgroup_points(build_ctx(5), TorusMatrix.row(1, 1))
    assert len(pts) == 4 and all(x * y % 5 == 1 for x, y in pts)


@pytest.mark.parametrize("q,mat", [(7, "1,-1"), (7, "2,-2"), (11, "2,3"), (13, "3,-6"), (7, "1,1,1"),
                                     (7, "2,0,-2;0,3,0"), (11, "0,5"), (5, "0,0")])
def test_subgroup_matches_brute(q, mat):
    A = TorusMatrix.parse(mat)
    assert subgroup_points(build_ctx(q), A) == subgroup_naive(q, A.entries)


def test_subgroup_order_formula():
    # |H_(a,b)| = (q-1) * gcd(a, b, q-1)
    from math import gcd
    for q in (13, 31, 61):
        ctx = build_ctx(q)
        for a, b in [(1, -1), (2, 4), (3, -6), (5, 7)]:
            assert subgroup_order(ctx, TorusMatrix.row(a, b)) == (q - 1) * gcd(gcd(a, b), q - 1)


def test_exponents_satisfy_system():
    ctx = build_ctx(31)
    A = TorusMatrix.parse("1,2,-3;2,-1,1")
    E = subgroup_exponents(ctx, A)
    assert np.all((E @ A.as_array().T) % 30 == 0)


def test_cap():
    with pytest.raises(TooLarge):
        subgroup_exponents(build_ctx(1009), TorusMatrix.row(1, 1, 1), cap=10**5)


def test_zero_last_column_solves_another_coordinate():
    ctx = build_ctx(401)
    A = TorusMatrix(((1, -1, 0),))
    H = subgroup_exponents(ctx, A, cap=400 * 400)
    assert len(H) == 400 * 400
    assert np.all((H[:, 0] - H[:, 1]) % 400 == 0)
    assert np.all(np.diff(H[:, 0] * 400 + H[:, 2]) > 0)
    small = build_ctx(7)
    got = sorted(tuple(int(v) for v in row) for row in small.gpow[subgroup_exponents(small, TorusMatrix(((0, 2, 1),)))])
    assert got == subgroup_naive(7, [(0, 2, 1)])
