import math

import mpmath as mp
import numpy as np
import pytest

from toroidal.chars import Character
from toroidal.errors import DomainError, PoleError, QuadratureFailure, TrivialPower
from toroidal.expsum import closed_form_balanced, gauss_all
from toroidal.field import build_ctx
from toroidal.lfun import (
    ZETA_HALF,
    AfeParams,
    afe_eval,
    afe_eval_all,
    gamma_factor,
    hurwitz_zeta_half,
    l_central,
    l_central_all,
    n_term,
    odd_beta,
    p_term,
    smoothed_coefficients,
    trivial_l_value,
    v_cutoff,
    v_weight,
)

from oracles import afe_terms_naive, hurwitz_half, l_central_naive, p_term_naive, v_weight_mp


# ---------------------------------------------------------------- Hurwitz zeta

def test_hurwitz_examples():
    assert abs(hurwitz_zeta_half(1.0) - (-1.4603545088)) < 1e-10
    assert abs(hurwitz_zeta_half(0.5) - (math.sqrt(2) - 1) * ZETA_HALF) < 1e-12
    assert abs(hurwitz_zeta_half(0.5) - (-0.6048986434)) < 1e-10
    quarter = sum(hurwitz_zeta_half(a / 4) for a in range(1, 5))
    assert abs(quarter - 2 * ZETA_HALF) < 1e-12


def test_hurwitz_against_mpmath():
    xs = np.concatenate([[1e-9, 1e-5, 1e-3], np.linspace(0.01, 1, 37)])
    got = hurwitz_zeta_half(xs)
    for x, v in zip(xs, got):
        assert abs(v - hurwitz_half(x)) < 1e-11


def test_hurwitz_domain():
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            hurwitz_zeta_half(bad)


# ---------------------------------------------------------------- central values

def test_l_central_examples():
    ctx5 = build_ctx(5)
    # zeta(1/2)(1 - 5^-1/2) = -0.8072641...
    assert abs(l_central(Character(ctx5, 0)) - trivial_l_value(5)) < 1e-13
    assert abs(l_central(Character(ctx5, 0)) - (-0.807264118)) < 1e-9
    assert abs(l_central(Character(ctx5, 2)).imag) < 1e-10
    ctx7 = build_ctx(7)
    assert abs(l_central(Character(ctx7, 1)) - l_central(Character(ctx7, 5)).conjugate()) < 1e-13


@pytest.mark.parametrize("q", [7, 11])
def test_l_central_against_mpmath(q):
    ctx = build_ctx(q)
    for j in range(q - 1):
        assert abs(l_central(Character(ctx, j)) - l_central_naive(q, ctx.g, j)) < 1e-11


def test_l_central_all_matches_direct():
    ctx = build_ctx(101)
    table = l_central_all(ctx)
    assert table.method == "hurwitz_batch" and len(table.values) == 100
    assert max(abs(table[j] - l_central(Character(ctx, j))) for j in range(100)) < 1e-7
    assert abs(l_central_all(build_ctx(7))[0] - trivial_l_value(7)) < 1e-13


def test_l_central_all_first_moment():
    # orthogonality keeps only a = 1 in q^-1/2 sum_a chi(a) zeta(1/2, a/q)
    q = 13
    table = l_central_all(build_ctx(q))
    assert abs(np.mean(table.values) - hurwitz_half(1 / q) / math.sqrt(q)) < 1e-12


def test_l_central_all_is_read_only():
    table = l_central_all(build_ctx(31))
    with pytest.raises(ValueError):
        table.values[0] = 0


# ---------------------------------------------------------------- gamma factor and V

def test_gamma_factor_examples():
    g14, g34 = float(mp.gamma(0.25)), float(mp.gamma(0.75))
    assert abs(g14 - 3.6256099082) < 1e-9
    assert abs(gamma_factor(0.5, 0, 0) - g14 ** 2 / math.sqrt(math.pi)) < 1e-12
    assert abs(gamma_factor(0.5, 1, 1) - g34 ** 2 / math.sqrt(math.pi)) < 1e-12
    s = 0.7 + 2.3j
    for ta, tb in [(0, 0), (1, 0), (1, 1)]:
        assert abs(gamma_factor(s.conjugate(), ta, tb) - gamma_factor(s, ta, tb).conjugate()) < 1e-14


def test_gamma_factor_poles():
    with pytest.raises(PoleError):
        gamma_factor(0, 0, 1)
    with pytest.raises(PoleError):
        gamma_factor(-2, 0, 0)
    with pytest.raises(PoleError):
        gamma_factor(-1, 1, 1)
    gamma_factor(-1, 0, 0)  # Gamma(-1/2) is finite


@pytest.mark.parametrize("ta,tb", [(0, 0), (1, 0), (1, 1)])
@pytest.mark.parametrize("y", [0.003, 0.4, 1.0, 2.5, 40.0])
def test_v_weight_against_mpmath(ta, tb, y):
    assert abs(v_weight(y, ta, tb) - v_weight_mp(y, ta, tb)) < 1e-10


def test_v_weight_contour_independence():
    ys = np.logspace(0, 3, 25)
    for ta, tb in [(0, 0), (1, 1)]:
        v2 = v_weight(ys, ta, tb, sigma=2.0)
        v3 = v_weight(ys, ta, tb, sigma=3.0)
        assert np.max(np.abs(v2 - v3)) < 1e-9


def test_v_weight_left_and_right_lines_agree():
    ys = np.array([0.05, 0.3, 0.9])
    assert np.max(np.abs(v_weight(ys, 0, 0, sigma=3.0) - v_weight(ys, 0, 0))) < 1e-9


def test_v_weight_small_y_with_pole_cancelling_G():
    # with G vanishing at the gamma poles, V(y) - 1 is O(y^(9/2)) near 0
    assert abs(v_weight(1e-6, 0, 0, G="poles") - 1) < 1e-6


def test_v_weight_small_y_default_G():
    # for G = exp(u^2) the double pole at u = -1/2 leaves 1 - V(y) ~ y^(1/2) log(1/y)
    ratios = [(1 - v_weight(y, 0, 0)) / (math.sqrt(y) * math.log(1 / y)) for y in (1e-6, 1e-8, 1e-10)]
    assert all(0.5 < r < 3 for r in ratios)
    assert abs(ratios[-1] - ratios[-2]) < abs(ratios[1] - ratios[0])


def test_v_weight_decay_and_reality():
    assert abs(v_weight(1e3, 0, 0)) < 1e-8
    assert isinstance(v_weight(2.0, 1, 0), float)
    ys = np.logspace(-3, 3, 50)
    assert np.all(np.isfinite(v_weight(ys, 1, 0)))


def test_v_weight_errors():
    with pytest.raises(DomainError):
        v_weight(0.0)
    with pytest.raises(QuadratureFailure):
        v_weight(0.5, 0, 0, t_max=2.0)


def test_v_cutoff_is_a_tail_bound():
    for ta, tb in [(0, 0), (1, 1)]:
        y0 = v_cutoff(ta, tb)
        ys = y0 * np.logspace(0, 1, 50)
        assert np.max(np.abs(v_weight(ys, ta, tb))) < 1e-11


# ---------------------------------------------------------------- AFE

def test_afe_examples():
    ctx = build_ctx(11)
    L = l_central_all(ctx)
    p = AfeParams.balanced(11, 1, 1)
    assert abs(afe_eval(Character(ctx, 1), p) - L[1] ** 2) < 1e-6
    p = AfeParams.balanced(11, 1, -1)
    assert abs(afe_eval(Character(ctx, 2), p) - abs(L[2]) ** 2) < 1e-6
    with pytest.raises(TrivialPower):
        afe_eval(Character(ctx, 5), AfeParams.balanced(11, 2, 1))


def test_afe_params_validation():
    with pytest.raises(ValueError):
        AfeParams(1, 1, 10.0, 10.0).check(11)
    with pytest.raises(ValueError):
        afe_eval(Character(build_ctx(11), 1), AfeParams(1, 1, 11.0, 11.0, ta=0, tb=0))


@pytest.mark.parametrize("a,b", [(1, 1), (1, -1), (2, 1), (1, -2), (3, -2)])
@pytest.mark.parametrize("X", [11.0, 121 / 8, 2.0])
def test_afe_identity_q11(a, b, X):
    ctx = build_ctx(11)
    L = l_central_all(ctx).values
    vals = afe_eval_all(ctx, AfeParams.balanced(11, a, b, X))
    for j in range(10):
        if (a * j) % 10 and (b * j) % 10:
            assert abs(vals[j] - L[(a * j) % 10] * L[(b * j) % 10]) < 1e-8


def test_afe_identity_is_independent_of_G():
    ctx = build_ctx(11)
    L = l_central_all(ctx).values
    for G in ("gauss2", "poles"):
        vals = afe_eval_all(ctx, AfeParams.balanced(11, 1, -1, G=G))
        for j in range(1, 10):
            assert abs(vals[j] - abs(L[j]) ** 2) < 1e-6


def test_root_number_on_even_characters():
    ctx = build_ctx(101)
    eps = gauss_all(ctx)
    for a in (1, 2, 3):
        for j in range(0, 100, 2):
            if (a * j) % 100:
                assert abs(eps[(a * j) % 100] * eps[(-a * j) % 100] - 1) < 1e-10


def _weights(X, ta, tb, G="gauss"):
    K = int(X * v_cutoff(ta, tb, G))
    k = np.arange(1, K + 1)
    return np.concatenate([[0.0], v_weight(k / X, ta, tb, G) / np.sqrt(k)])


@pytest.mark.parametrize("q,a,b", [(7, 1, 1), (11, 1, -1), (11, 2, 1), (7, 1, -2)])
def test_n_term_against_double_sum(q, a, b):
    ctx = build_ctx(q)
    X = float(q)
    for parity, (ta, tb) in (("even", (0, 0)), ("odd", (a % 2, b % 2))):
        w = _weights(X, ta, tb)
        assert abs(n_term(ctx, a, b, X, parity) - afe_terms_naive(q, ctx.g, a, b, w, parity)) < 1e-9


@pytest.mark.parametrize("q,a,b", [(11, 1, 1), (7, 1, -1), (7, 2, 1)])
def test_p_term_against_double_sum(q, a, b):
    ctx = build_ctx(q)
    Y = float(q)
    for parity, (ta, tb) in (("even", (0, 0)), ("odd", (a % 2, b % 2))):
        w = _weights(Y, ta, tb)
        assert abs(p_term(ctx, a, b, Y, parity) - p_term_naive(q, a, b, w, parity)) < 1e-9


def test_p_term_balanced_closed_form():
    # for (1,-1) the even P uses T~_{2,-2}, which has a closed form term by term
    q = 13
    ctx = build_ctx(q)
    Y = 13.0
    c = smoothed_coefficients(ctx, 1, -1, Y, 0, 0)
    closed = sum(c[l] * closed_form_balanced(ctx, 2, pow(int(ctx.gpow[l]), 2, q)) for l in range(q - 1))
    assert abs(p_term(ctx, 1, -1, Y, "even") - closed / (2 * math.sqrt(q))) < 1e-10


def test_terms_examples():
    ctx = build_ctx(10007)
    X = 10007.0
    assert abs(n_term(ctx, 1, 1, X) - 0.5 * v_weight(1 / X)) < 0.01
    assert abs(p_term(ctx, 1, 1, 1e-9)) < 1e-10


def test_diagonal_sum_constant():
    # sum_m V(m^2/X)/m = (1/2) log X + C + O(X^-1/2 log X): the main part is the
    # residue at u = 0 of X^u G(u) gamma(1/2+u)/gamma(1/2) zeta(1+2u)/u, the
    # error the double pole at u = -1/2
    from toroidal.moment import const_C

    errs = []
    for X in (1e4, 1e6, 1e8):
        M = int(math.sqrt(X * v_cutoff(0, 0)))
        m = np.arange(1, M + 1, dtype=float)
        D = float(np.sum(v_weight(m * m / X, 0, 0) / m))
        errs.append(abs(D - (0.5 * math.log(X) + const_C())))
        assert errs[-1] < 2 * math.log(X) / math.sqrt(X)
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("q,a,b", [(11, 1, 1), (101, 1, -1), (101, 2, -1), (103, 3, 2)])
def test_decomposition_identity(q, a, b):
    ctx = build_ctx(q)
    n = q - 1
    X = float(q)
    vals = afe_eval_all(ctx, AfeParams.balanced(q, a, b, X))
    j = np.arange(n)
    even = vals[j % 2 == 0].sum() / n
    odd = vals[j % 2 == 1].sum() / n
    assert abs(even - n_term(ctx, a, b, X, "even") - p_term(ctx, a, b, X, "even")) < 1e-10
    beta = odd_beta(a, b)
    assert abs(odd - n_term(ctx, a, b, X, "odd") - 1j ** (-beta) * p_term(ctx, a, b, X, "odd")) < 1e-10
