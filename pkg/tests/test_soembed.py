import random
from fractions import Fraction as F

import pytest

from planch.forms import (BilForm, NotInGroupError, b_of_g, bruhat_factor,
                          build_odd_so, det, identity, in_g_prime, inverse,
                          m_tilde_of, mat, mat_eq, mat_mul, transpose)


def random_nbar(emb, rng, lo=-4, hi=4):
    d = emb.d
    ell = [F(rng.randint(lo, hi)) for _ in range(d)]
    t = [[F(rng.randint(lo, hi)) for _ in range(d)] for _ in range(d)]
    s = [[t[i][j] - t[j][i] - F(ell[i] * ell[j], 2) for j in range(d)]
         for i in range(d)]
    return emb.n_bar_element(ell, mat(s)), ell, mat(s)


def mtilde_element(emb, e):
    """The twisted-Levi element with lower-left block E."""
    d, n = emb.d, emb.dim
    c = inverse(transpose(e))
    g = [[F(0)] * n for _ in range(n)]
    for i in range(d):
        for j in range(d):
            g[i][d + 1 + j] = c[i][j]
            g[d + 1 + i][j] = e[i][j]
    g[d][d] = F(1)
    gm = mat(g)
    if not emb.is_in_group(gm)[0]:
        g[d][d] = F(-1)
        gm = mat(g)
    emb.check_in_group(gm)
    return gm


def test_quadratic_space():
    for d in (1, 2, 3):
        emb = build_odd_so(d)
        j = emb.gram()
        assert len(j) == 2 * d + 1
        assert mat_eq(j, transpose(j))
        assert det(j) != 0


def test_levi_membership():
    emb = build_odd_so(2)
    a = mat([[1, 2], [0, 3]])
    g = emb.levi_element(a)
    emb.check_in_group(g)
    assert not in_g_prime(emb, g)  # Levi elements preserve V


def test_group_membership_errors():
    emb = build_odd_so(2)
    bad = [[F(1 if i == j else 0) for j in range(5)] for i in range(5)]
    bad[0][0] = F(2)
    with pytest.raises(NotInGroupError):
        emb.check_in_group(mat(bad))
    with pytest.raises(NotInGroupError):
        emb.n_bar_element([1, 0], mat([[0, 0], [0, 0]]))  # S+S^T != -ll^T


def test_mtilde_form_is_b_g():
    """On the twisted Levi component, g -> B_g is the identification with
    nondegenerate forms."""
    rng = random.Random(0)
    for d in (1, 2, 3):
        emb = build_odd_so(d)
        for _ in range(10):
            while True:
                e = mat([[F(rng.randint(-3, 3)) for _ in range(d)]
                         for _ in range(d)])
                if det(e) != 0:
                    break
            g = mtilde_element(emb, e)
            bg = b_of_g(emb, g)
            assert bg.is_nondegenerate()
            assert in_g_prime(emb, g)
            # Bruhat factorization of a twisted-Levi element is trivial
            u1, mt, u2 = bruhat_factor(emb, g)
            assert mat_eq(mt, g)


def test_identity_not_in_open_cell():
    for d in (1, 2, 3):
        emb = build_odd_so(d)
        assert not in_g_prime(emb, identity(2 * d + 1))


def test_rank_one_property_and_roundtrip():
    rng = random.Random(1)
    for d in (2, 3):
        emb = build_odd_so(d)
        for _ in range(100):
            g, ell, s = random_nbar(emb, rng)
            bg = b_of_g(emb, g)
            # symmetric part is exactly -(ell tensor ell)
            need = mat([[-ell[i] * ell[j] for j in range(d)]
                        for i in range(d)])
            assert mat_eq(bg.sym_part(), need)
            mt_form = m_tilde_of(emb, g)
            if mt_form is None:
                assert not in_g_prime(emb, g)
                continue
            assert mat_eq(mt_form.gram, bg.gram)
            u1, mt, u2 = bruhat_factor(emb, g)
            assert mat_eq(mat_mul(u1, mat_mul(mt, u2)), g)


def test_degenerate_ubar():
    emb = build_odd_so(2)
    g = emb.n_bar_element([0, 0], mat([[0, 1], [-1, 0]]))
    assert in_g_prime(emb, g)  # alternating S of full rank
    g0 = emb.n_bar_element([0, 0], mat([[0, 0], [0, 0]]))
    assert m_tilde_of(emb, g0) is None


def test_sym_part_class_is_minus_square():
    """The symmetric part of a form from the unipotent radical has rank at
    most one, and its nonzero value is -1 times a square."""
    from planch.field import square_class
    from planch.forms import rank, symmetric_diagonalize
    rng = random.Random(2)
    for d in (2, 3):
        emb = build_odd_so(d)
        for _ in range(50):
            g, ell, _ = random_nbar(emb, rng)
            bg = b_of_g(emb, g)
            assert rank(bg.sym_part()) <= 1
            diag = [x for x in symmetric_diagonalize(bg.sym_part()) if x != 0]
            if not diag:
                continue
            for p in (3, 5, 2):
                assert square_class(-diag[0], p).is_trivial()
