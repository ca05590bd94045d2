import math
import random
from fractions import Fraction

import numpy as np
import pytest

from ellsym.conditions import (
    check_cc,
    check_weak_cancellation,
    image_intersection,
    is_elliptic,
    kernel_intersection,
    left_inverse_family,
    potential_field,
    random_rational_point,
    run_full_check,
    sampled_kernel_dimension,
)
from ellsym.dsl import parse_operator, parse_system
from ellsym.errors import (
    HypothesisFailedError,
    NotHomogeneousError,
    OrderTooLowError,
)
from ellsym.operators import SystemSpec, homogenize
from ellsym.ratlinalg import Subspace, identity, mat_vec, solve, transpose
from genops import (
    div_curl_operator,
    divergence_operator,
    gradient_operator,
    laplacian_operator,
    random_invertible_matrix,
    random_operator,
)

F = Fraction


# -- kernel / image intersections ------------------------------------------------


def test_kernel_intersection_divergence_is_cocanceling():
    for n in (2, 3, 4):
        assert kernel_intersection(divergence_operator(n)).is_zero()


def test_kernel_intersection_scalar_constraint_r4():
    c = parse_operator("from 4 to 1\nrows: d1 f1 + d2 f2 + d3 f3", 3)
    k = kernel_intersection(c)
    assert k.basis == ((F(0), F(0), F(0), F(1)),)


def test_kernel_intersection_two_term_constraint_r3_n4():
    c = parse_operator("from 3 to 1\nrows: d1 f1 + d2 f2", 4)
    k = kernel_intersection(c)
    assert k.basis == ((F(0), F(0), F(1)),)


def test_image_intersection_gradient_canceling():
    assert image_intersection(gradient_operator(2)).is_zero()
    assert image_intersection(gradient_operator(3)).is_zero()


def test_image_intersection_vector_laplacian_full():
    for n in (2, 3):
        i_a = image_intersection(laplacian_operator(n))
        assert i_a.is_full()


def test_image_intersection_divcurl():
    i_a = image_intersection(div_curl_operator())
    assert i_a.basis == ((F(1), F(0), F(0), F(0)),)


def test_divcurl_image_direction_has_explicit_preimage():
    # A(ξ) v = e1 is solved exactly by v = ξ/|ξ|²: ⟨ξ,v⟩ = 1 and ξ × v = 0
    rng = random.Random(8)
    a = div_curl_operator()
    sym = a.symbol()
    e1 = [F(1), F(0), F(0), F(0)]
    for _ in range(10):
        xi = random_rational_point(rng, 3)
        norm2 = sum(x * x for x in xi)
        mat = sym.eval(xi)
        v = solve(mat, e1)
        assert v == tuple(x / norm2 for x in xi)


def test_image_basis_vectors_lie_in_image_at_samples():
    # exact solve A(ξ) v = e for each basis vector e of I_A
    rng = random.Random(41)
    a = div_curl_operator()
    i_a = image_intersection(a)
    sym = a.symbol()
    for _ in range(20):
        xi = random_rational_point(rng, 3)
        mat = sym.eval(xi)
        for e in i_a.basis:
            assert solve(mat, list(e)) is not None


# -- condition (CC) ---------------------------------------------------------------


def test_cc_divcurl_holds():
    c = parse_operator("from 4 to 1\nrows: d1 f1 + d2 f2 + d3 f3", 3)
    system = SystemSpec(div_curl_operator(), c, 3)
    res = check_cc(system)
    assert res.holds and res.witness is None
    assert res.image_intersection.basis == ((F(1), F(0), F(0), F(0)),)
    assert res.kernel_intersection.basis == ((F(0), F(0), F(0), F(1)),)


def test_cc_laplacian_with_divergence_holds():
    for n in (2, 3):
        system = SystemSpec(laplacian_operator(n), divergence_operator(n), n)
        assert check_cc(system).holds


def test_cc_unconstrained_laplacian_fails_with_witness():
    system = SystemSpec(laplacian_operator(2), None, 2)
    res = check_cc(system)
    assert not res.holds
    assert res.witness == (F(1), F(0))


# -- ellipticity -------------------------------------------------------------------


def test_elliptic_gradient_yes():
    v = is_elliptic(gradient_operator(2))
    assert v.status == "yes"


def test_elliptic_divergence_no_with_witness():
    v = is_elliptic(divergence_operator(2))
    assert v.status == "no"
    assert v.witness_xi == (F(1), F(0))
    assert v.kernel_vector == (F(0), F(1))
    assert v.witness_exact


def test_elliptic_quartic_r4_no_with_pinned_witness():
    a = parse_operator("rows: (d1^4 + d2^4) u1; d3^4 u2; d4^4 u2", 4)
    v = is_elliptic(a)
    assert v.status == "no"
    witnesses = v.all_witnesses()
    target = ((F(0), F(0), F(1), F(0)), (F(1), F(0)))
    assert target in witnesses


def test_elliptic_numeric_positive_n3():
    v = is_elliptic(laplacian_operator(3))
    assert v.status == "numerically_positive"
    assert v.min_normalized > 1e-9


def test_elliptic_n1():
    a = parse_operator("rows: d1 u1; d1 u2", 1)  # V=2, E=2? rows use u1,u2
    v = is_elliptic(a)
    # symbol is [[ξ,0],[0,ξ]]... rows d1 u1 and d1 u2: matrix diag(ξ, ξ)
    assert v.status == "yes"


def test_elliptic_n1_degenerate():
    a = parse_operator("from 2 to 2\nrows: d1 u1; d1 u1", 1)
    v = is_elliptic(a)
    assert v.status == "no"
    assert v.kernel_vector == (F(0), F(1))


def test_elliptic_irrational_zero_decided_no():
    # det G = (ξ1² − 2ξ2²)²: zeros irrational, Sturm still decides "no"
    a = parse_operator("rows: d1^2 u1 - 2 d2^2 u1", 2)
    v = is_elliptic(a)
    assert v.status == "no"
    assert not v.witness_exact


def test_elliptic_requires_homogeneous():
    mixed = parse_operator("from 1 to 2\nrows: d1 u1; d1^2 u1", 2)
    with pytest.raises(NotHomogeneousError):
        is_elliptic(mixed)


def test_elliptic_inconclusive_when_no_rational_zero_exists():
    # ξ1² − 2ξ2² + 3ξ3² is indefinite over R but anisotropic over Q: det G
    # has real zeros on the sphere yet no rational ones to certify
    a = parse_operator("rows: d1^2 u1 - 2 d2^2 u1 + 3 d3^2 u1", 3)
    v = is_elliptic(a)
    assert v.status == "inconclusive"
    assert v.min_normalized is not None and v.min_normalized < 1e-9
    report = run_full_check(SystemSpec(a, None, 3))
    assert report.exit_status() == 2


# -- weak cancellation --------------------------------------------------------------


def test_weak_cancellation_laplacian_r2_fails_with_2pi_moments():
    a = laplacian_operator(2)
    i_a = image_intersection(a)
    res = check_weak_cancellation(a, i_a)
    assert not res.holds and not res.vacuous
    for _e, nrm in res.moments:
        assert abs(nrm - 2 * math.pi) < 1e-8


def test_weak_cancellation_vacuous_with_divergence():
    a = laplacian_operator(2)
    res = check_weak_cancellation(a, Subspace.zero(2))
    assert res.holds and res.vacuous


def test_weak_cancellation_order_too_low():
    with pytest.raises(OrderTooLowError):
        check_weak_cancellation(laplacian_operator(3), Subspace.full(3))


def test_weak_cancellation_odd_dimension_holds():
    # (-Δ)² on R³ vector fields: odd n forces the moment map to vanish
    a = laplacian_operator(3, power=2)
    i_a = image_intersection(a)
    assert i_a.is_full()
    res = check_weak_cancellation(a, i_a)
    assert res.holds
    for _e, nrm in res.moments:
        assert nrm == 0.0


# -- invariance properties ----------------------------------------------------------


def test_basis_change_invariance():
    rng = random.Random(53)
    a = div_curl_operator()
    c = parse_operator("from 4 to 1\nrows: d1 f1 + d2 f2 + d3 f3", 3)
    base = check_cc(SystemSpec(a, c, 3))
    for _ in range(3):
        g_e = random_invertible_matrix(rng, 4)
        from ellsym.ratlinalg import inverse

        a2 = a.compose_left(g_e)
        c2 = c.compose_right(inverse(g_e))
        res = check_cc(SystemSpec(a2, c2, 3))
        assert res.holds == base.holds
        assert res.image_intersection == base.image_intersection.transform(g_e)
        assert res.kernel_intersection == base.kernel_intersection.transform(g_e)
        assert (res.image_intersection.is_zero()) == (base.image_intersection.is_zero())
        assert (res.kernel_intersection.is_zero()) == (base.kernel_intersection.is_zero())


def test_scaling_invariance():
    a = div_curl_operator()
    c = parse_operator("from 4 to 1\nrows: d1 f1 + d2 f2 + d3 f3", 3)
    base = check_cc(SystemSpec(a, c, 3))
    for scalar in (F(3), F(-1, 2)):
        res = check_cc(SystemSpec(a.scale(scalar), c.scale(scalar), 3))
        assert res.holds == base.holds
        assert res.image_intersection == base.image_intersection
        assert res.kernel_intersection == base.kernel_intersection


def test_moment_linearity_in_e():
    from ellsym.quadrature import build_rule, moments_for_vectors

    a = laplacian_operator(2)
    rule = build_rule(2, 5)
    vals, _ = moments_for_vectors(a, [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)], rule)
    assert np.abs(vals[2] - vals[0] - vals[1]).max() < 2e-8


# -- sampled oracle agreement ---------------------------------------------------------


def test_kernel_intersection_matches_sampled_oracle():
    rng = random.Random(97)
    for _ in range(6):
        n = rng.randint(2, 3)
        e_dim = rng.randint(2, 4)
        f_dim = rng.randint(1, 3)
        c = random_operator(rng, n, e_dim, f_dim, max_degree=2)
        exact = kernel_intersection(c)
        pts = [random_rational_point(rng, n) for _ in range(100)]
        dim_num, basis_num = sampled_kernel_dimension(c, pts)
        assert dim_num == exact.dim
        # containment: exact basis vectors annihilated at all samples
        sym = c.symbol()
        for xi in pts[:25]:
            mat = sym.eval(xi)
            for v in exact.basis:
                assert all(x == 0 for x in mat_vec(mat, v))
        # numeric kernel vectors lie in the exact subspace (distance check)
        if exact.dim:
            b = np.array([[float(x) for x in row] for row in exact.basis])
            q, _ = np.linalg.qr(b.T)
            for w in basis_num:
                proj = q @ (q.T @ w)
                assert np.linalg.norm(w - proj) < 1e-8
        else:
            assert basis_num.shape[0] == 0


# -- left inverses and potentials -------------------------------------------------------


def test_left_inverse_divergence_identity():
    div2 = divergence_operator(2)
    fam = left_inverse_family(div2, identity(2))
    assert fam.maps[(1, 0)] == ((F(1),), (F(0),))
    assert fam.maps[(0, 1)] == ((F(0),), (F(1),))
    assert fam.composite() == identity(2)


def test_left_inverse_hypothesis_failure():
    c = parse_operator("from 3 to 1\nrows: d1 f1 + d2 f2", 2)
    with pytest.raises(HypothesisFailedError):
        left_inverse_family(c, identity(3))


def test_left_inverse_projection_case():
    c = parse_operator("from 3 to 1\nrows: d1 f1 + d2 f2", 2)
    m = [[F(1), F(0), F(0)], [F(0), F(1), F(0)], [F(0), F(0), F(0)]]
    fam = left_inverse_family(c, m)
    assert fam.target_subspace.dim == 2
    # identity on im M*: composite fixes every basis vector
    comp = fam.composite()
    for q in fam.target_subspace.basis:
        assert mat_vec(comp, q) == tuple(q)


def test_potential_field_divergence():
    div2 = divergence_operator(2)
    fam = left_inverse_family(div2, identity(2))
    pf = potential_field(fam)
    assert pf.identity_checked
    from ellsym.poly import Polynomial

    assert pf.matrix.entries[0][0] == Polynomial.variable(2, 0)
    assert pf.matrix.entries[0][1] == Polynomial.variable(2, 1)


def test_potential_field_stack_case():
    stack = parse_operator("from 3 to 2\nrows: d1 f1 + d2 f2; d4^4 f2 - d3^4 f3", 4)
    hom = homogenize(stack)
    m = [[F(1), F(0), F(0)], [F(0), F(1), F(0)], [F(0), F(0), F(0)]]
    fam = left_inverse_family(hom, m)
    assert fam.composite() == fam.projection
    pf = potential_field(fam)
    assert pf.identity_checked


def test_potential_field_zero_family():
    div2 = divergence_operator(2)
    zero_m = [[F(0), F(0)], [F(0), F(0)]]
    fam = left_inverse_family(div2, zero_m)
    assert fam.target_subspace.is_zero()
    pf = potential_field(fam)
    assert pf.matrix.is_zero()


# -- full report ---------------------------------------------------------------------


def test_run_full_check_divcurl():
    spec = parse_system(open("systems/divcurl_r3.sys").read())
    report = run_full_check(spec)
    assert report.cc.holds
    assert report.canceling is False
    assert report.cocanceling is False
    assert report.weak is None  # k=1 < n=3
    assert report.exit_status() == 0


def test_run_full_check_laplacian_div():
    spec = parse_system(open("systems/laplacian_div_r2.sys").read())
    report = run_full_check(spec)
    assert report.cocanceling is True
    assert report.cc.holds
    assert report.weak is not None and not report.weak.holds  # M = 2π Id on I_A
    assert report.cwc is not None and report.cwc.holds and report.cwc.vacuous


def test_run_full_check_quartic_diagnostic():
    spec = parse_system(open("systems/quartic_r4.sys").read())
    report = run_full_check(spec)
    assert report.elliptic.status == "no"
    from ellsym.conditions import NONELLIPTIC_CONSTRAINT_DIAGNOSTIC

    assert NONELLIPTIC_CONSTRAINT_DIAGNOSTIC in report.diagnostics
    assert report.image_basis is None


def test_run_full_check_inhomogeneous_operator():
    spec = parse_system(
        "dim 2\noperator A { from 1 to 2 rows: d1 u1; d1^2 u1 }"
    )
    report = run_full_check(spec)
    assert report.elliptic.status == "inconclusive"
    assert report.exit_status() == 2
