import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from planch.field import LocalFieldSpec
from planch.limitcheck import (ComponentModel, ConstantPhi, GaussianPhi,
                               NonGenericPoint, NotWeylInvariant, QuadConfig,
                               TestFunction, TrigPhi, check_weyl_invariance,
                               component_blocks, eq13_check, eq13_values,
                               lhs_covering_order, mirror_structure,
                               phi_from_dict, point_parameter,
                               rhs_covering_order, richardson,
                               singular_exponent, singular_exponent_engine,
                               subtorus_twists, verify)
from planch.tempered import OrthTriple
from planch.wdrep import WDAtom

SPEC3 = LocalFieldSpec(3, 3, 0)

T_D1 = OrthTriple(orthogonal=((WDAtom(F(0), 1), 1),))
T_IO2 = OrthTriple(orthogonal=((WDAtom(F(0), 1), 1), (WDAtom(F(1, 2), 1), 1)))
T_IN = OrthTriple(dual_pairs=((WDAtom(F(1, 3), 1), 1),))
T_D3 = OrthTriple(dual_pairs=((WDAtom(F(1, 5), 1), 1),),
                  orthogonal=((WDAtom(F(0), 1), 1),))
T_IS = OrthTriple(symplectic=((WDAtom(F(0), 2), 2),))
T_IO3 = OrthTriple(orthogonal=((WDAtom(F(0), 1), 3),))

FAST = QuadConfig(s0=0.1, s_count=4, n_base=64, rhs_n=128, resolution=30.0)


class LopsidedPhi(TestFunction):
    """Deliberately not Weyl-invariant: depends on the first block only."""

    def values(self, dims, angles):
        return np.cos(2 * np.pi * angles[0, :]).astype(complex)

    def describe(self):
        return {"kind": "lopsided"}


def test_test_functions_invariant():
    rng = np.random.default_rng(0)
    for phi in (ConstantPhi(2.0),
                TrigPhi([(1, 1, 0.3 + 0.1j), (2, 2, -0.2 + 0j)]),
                GaussianPhi(width=0.4, center=0.25)):
        check_weyl_invariance(phi, (1, 1, 2, 2), rng)
    with pytest.raises(NotWeylInvariant):
        check_weyl_invariance(LopsidedPhi(), (1, 1), rng)


def test_phi_from_dict_roundtrip():
    for phi in (ConstantPhi(1.5),
                TrigPhi([(1, 1, 0.3 + 0.2j)], const=0.7),
                GaussianPhi(0.3, 0.1, 6)):
        clone = phi_from_dict(phi.describe())
        x = np.random.default_rng(1).random((2, 13))
        assert np.allclose(phi.values((1, 1), x), clone.values((1, 1), x))


def test_covering_orders():
    assert lhs_covering_order(T_D1) == 1
    assert lhs_covering_order(T_IO2) == 2
    assert lhs_covering_order(T_IN) == 2
    assert lhs_covering_order(T_D3) == 6
    assert lhs_covering_order(T_IS) == 2
    assert lhs_covering_order(T_IO3) == 6
    assert rhs_covering_order(T_D1) == 1
    assert rhs_covering_order(T_IO2) == 1
    assert rhs_covering_order(T_IN) == 2
    assert rhs_covering_order(T_D3) == 2
    assert rhs_covering_order(T_IS) == 2
    assert rhs_covering_order(T_IO3) == 2


def test_d1_lhs_constant_in_s():
    """At d = 1 the two trivial gamma factors cancel exactly."""
    model = ComponentModel(T_D1, SPEC3)
    phi = ConstantPhi(3.25)
    vals = [model.lhs_value(phi, s, FAST)[0] for s in (0.5, 0.1, 0.01, 0.003)]
    for v in vals:
        assert abs(v - 3.25) < 1e-12
    rep = verify(T_D1, phi, SPEC3, FAST)
    assert rep.rel_discrepancy < 1e-10 and rep.passed


def test_verify_small_cases():
    for triple in (T_IO2, T_IN):
        rep = verify(triple, ConstantPhi(1.0), SPEC3, FAST)
        assert rep.rel_discrepancy < 1e-3, (triple, rep.rel_discrepancy)
        assert rep.passed


def test_verify_other_field():
    spec = LocalFieldSpec(2, 2, 1)
    rep = verify(T_IN, ConstantPhi(1.0), spec, FAST)
    assert rep.rel_discrepancy < 1e-3


def test_rhs_linearity_and_relabeling():
    model = ComponentModel(T_IO2, SPEC3)
    phi1, phi2 = ConstantPhi(1.0), ConstantPhi(2.5)
    r1 = model.rhs_value(phi1, FAST)
    r2 = model.rhs_value(phi2, FAST)
    assert abs(r2 - 2.5 * r1) < 1e-12
    swapped = OrthTriple(orthogonal=(T_IO2.orthogonal[1], T_IO2.orthogonal[0]))
    assert abs(ComponentModel(swapped, SPEC3).rhs_value(phi1, FAST) - r1) < 1e-12


def test_eq13_five_classes():
    rng = random.Random(3)
    for triple in (T_D1, T_IN, T_IS, T_IO3, T_D3,
                   OrthTriple(orthogonal=((WDAtom(F(1, 2), 1), 2),))):
        nfree, _ = mirror_structure(triple)
        checked = 0
        while checked < 20:
            free = [F(rng.randint(1, 100), 101) for _ in range(nfree)]
            try:
                assert eq13_check(triple, free, SPEC3, tol=1e-10)
            except NonGenericPoint:
                continue
            checked += 1


def test_eq13_nongeneric_reported():
    triple = OrthTriple(dual_pairs=((WDAtom(F(1, 3), 1), 2),))
    # equal free coordinates create extra vanishing pairs: order exceeds N
    with pytest.raises(NonGenericPoint):
        eq13_values(triple, [F(1, 7), F(1, 7)], SPEC3)


def test_singular_exponent():
    rng = random.Random(4)
    # generic points are regular
    blocks = component_blocks(T_D3)
    for _ in range(50):
        tw = [F(rng.randint(1, 30), 31) for _ in blocks]
        tw[-1] = -sum(tw[:-1])
        assert singular_exponent(T_D3, tw) == \
            singular_exponent_engine(T_D3, tw, SPEC3)
    # generic subtorus points have exponent N
    from planch.tempered import appendix_constants
    for triple in (T_D1, T_IN, T_IS, T_IO3, T_D3):
        n = appendix_constants(triple).N
        nfree, _ = mirror_structure(triple)
        free = [F(1 + 7 * i, 101) for i in range(nfree)]
        tw = subtorus_twists(triple, free)
        assert singular_exponent(triple, tw) == n
        assert singular_exponent_engine(triple, tw, SPEC3) == n
    # zero twist on a single odd orthogonal atom: the diagonal form vanishes
    assert singular_exponent(T_D1, [F(0)]) == 1


def test_measure_normalization():
    # component where same-size blocks share the base character: F = |W|
    cfg = QuadConfig(n_base=512)
    io2same = OrthTriple(orthogonal=((WDAtom(F(1, 2), 1), 2),))
    model = ComponentModel(io2same, SPEC3)
    assert abs(model.measure_mass(ConstantPhi(1.0), cfg) - 0.5) < 1e-9
    model3 = ComponentModel(T_IO3, SPEC3)
    assert abs(model3.measure_mass(ConstantPhi(1.0), cfg) - 1 / 6) < 1e-9
    model1 = ComponentModel(T_D1, SPEC3)
    assert abs(model1.measure_mass(ConstantPhi(1.0), cfg) - 1.0) < 1e-12


def test_quadrature_self_consistency():
    """Doubling the minimum grid moves the value by less than the reported
    error estimate, across 20 random configurations."""
    rng = random.Random(5)
    for _ in range(20):
        triple = rng.choice([T_IO2, T_IN, T_IS])
        model = ComponentModel(triple, SPEC3)
        phi = TrigPhi([(1, rng.choice([1, 2]), rng.uniform(-0.5, 0.5) + 0j)])
        s = rng.uniform(0.02, 0.2)
        n = rng.choice([96, 128, 192])
        cfg1 = QuadConfig(n_base=n, resolution=30.0)
        cfg2 = QuadConfig(n_base=2 * n, resolution=30.0)
        v1, e1, _, _ = model.lhs_value(phi, s, cfg1)
        v2, _, _, _ = model.lhs_value(phi, s, cfg2)
        assert abs(v1 - v2) <= max(e1, 1e-12) * 4


def test_lhs_integrand_exact():
    from planch.field import gamma_trivial
    from planch.limitcheck import lhs_integrand_exact

    # d = 1: the integrand is Phi(chi) / gamma(s, 1, psi)
    phi = ConstantPhi(2.0)
    for s in (0.5, 0.1, 0.01):
        got = lhs_integrand_exact(T_D1, phi, s, [F(0)], SPEC3)
        want = 2.0 / gamma_trivial(SPEC3).evaluate(s)
        assert abs(got - want) < 1e-12
    # a point on a singular hyperplane stays finite and grows like 1/s
    tw = [F(0), F(0)]  # the orthogonal base point of T_IO2
    v1 = lhs_integrand_exact(T_IO2, ConstantPhi(1.0), 0.1, tw, SPEC3)
    v2 = lhs_integrand_exact(T_IO2, ConstantPhi(1.0), 0.05, tw, SPEC3)
    assert abs(v2) > 1.5 * abs(v1)
    with pytest.raises(ValueError):
        lhs_integrand_exact(T_IO2, phi, 0.1, [F(1, 3), F(1, 5)], SPEC3)
    with pytest.raises(ValueError):
        lhs_integrand_exact(T_IO2, phi, -0.1, [F(0), F(0)], SPEC3)


def test_richardson():
    # exact polynomial data extrapolates exactly
    svals = [0.1 * 2.0 ** -k for k in range(5)]
    lvals = [2.0 + 3.0 * s - 1.5 * s ** 2 for s in svals]
    assert abs(richardson(svals, lvals, 3) - 2.0) < 1e-12


def test_point_parameter_and_twists():
    tw = subtorus_twists(T_D3, [F(1, 7)])
    assert tw == [F(1, 7), F(6, 7), F(0)]
    param = point_parameter(T_D3, tw)
    angles = sorted(a.angle for a in param.atoms)
    assert angles == sorted([F(1, 5) + F(1, 7), F(4, 5) + F(6, 7) - 1, F(0)])
    with pytest.raises(ValueError):
        subtorus_twists(T_D3, [F(1, 7), F(1, 7)])


def test_verify_budget_flag():
    cfg = QuadConfig(s0=0.02, s_count=2, n_base=64, max_nodes=512,
                     resolution=40.0)
    rep = verify(T_IO2, ConstantPhi(1.0), SPEC3, cfg)
    assert rep.budget_exceeded
    assert not rep.passed


def test_report_serialization():
    rep = verify(T_D1, ConstantPhi(1.0), SPEC3, FAST)
    d = rep.to_dict()
    assert d["passed"] is True
    assert len(d["lhs_values"]) == len(d["s_values"])
    assert isinstance(d["rhs"], list) and len(d["rhs"]) == 2
