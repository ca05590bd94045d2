"""Deciders for ellipticity and the cancellation-type compatibility conditions.

The continuum intersections ⋂_{ξ≠0} ker C(ξ) and ⋂_{ξ≠0} im A(ξ) are reduced
to finite exact linear algebra: the first via homogenization and the common
kernel of the coefficient matrices, the second via the coefficient matrices
of an exact annihilator L (ker L(ξ) = im A(ξ) off the origin, and a
polynomial identity on R^n \\ {0} extends to all of R^n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import sturm
from .errors import (
    HypothesisFailedError,
    NotEllipticError,
    NotHomogeneousError,
    OrderTooLowError,
)
from .operators import annihilator, homogenize
from .poly import MatrixPolynomial, Polynomial, monomials_of_degree
from .quadrature import converged_moments, surface_area
from .ratlinalg import (
    Subspace,
    as_fraction_matrix,
    mat_mul,
    mat_vec,
    nullspace,
    projection_onto_rowspace,
    solve,
    transpose,
)

WEAK_ZERO_TOL = 1e-8  # |M e| <= tol * area * max-node integrand magnitude
ELLIPTIC_MIN_THRESHOLD = 1e-9  # normalized sphere minimum of det G
ELLIPTIC_GRID_POINTS = 10000

NONELLIPTIC_CONSTRAINT_DIAGNOSTIC = (
    "operator is not elliptic although a constrained system in the k >= n "
    "regime was supplied; the boundedness analysis assumes ellipticity, so "
    "annihilator-based verdicts were skipped. This matches the known "
    "discrepancy in the bundled fourth-order quartic system on R^4 (see "
    "README): the reported verdict and witnesses are the computed facts, "
    "no intended operator is guessed."
)


# -- ellipticity --------------------------------------------------------------


@dataclass
class EllipticityVerdict:
    """Yes / No(witness) / NumericallyPositive(min) / Inconclusive."""

    status: str  # "yes" | "no" | "numerically_positive" | "inconclusive"
    witness_xi: tuple | None = None
    kernel_vector: tuple | None = None
    witness_exact: bool = False
    min_normalized: float | None = None
    extra_witnesses: list = field(default_factory=list)
    note: str = ""

    @property
    def definitely_not(self):
        return self.status == "no"

    @property
    def acceptable(self):
        return self.status in ("yes", "numerically_positive")

    def all_witnesses(self):
        out = []
        if self.witness_xi is not None:
            out.append((self.witness_xi, self.kernel_vector))
        out.extend(self.extra_witnesses)
        return out

    def to_json(self):
        d = {"status": self.status}
        if self.witness_xi is not None:
            d["witness_xi"] = [str(x) for x in self.witness_xi]
            d["witness_exact"] = self.witness_exact
        if self.kernel_vector is not None:
            d["kernel_vector"] = [str(x) for x in self.kernel_vector]
        if self.extra_witnesses:
            d["extra_witnesses"] = [
                {
                    "xi": [str(x) for x in xi],
                    "kernel_vector": [str(x) for x in v] if v else None,
                }
                for xi, v in self.extra_witnesses
            ]
        if self.min_normalized is not None:
            d["min_normalized"] = self.min_normalized
        if self.note:
            d["note"] = self.note
        return d


def _integerize(vec):
    """Clear denominators and common factors for a tidy exact witness."""
    denom = 1
    for x in vec:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


def _gram_kernel_at(a, xi):
    """Exact kernel vector of A(ξ) at a rational point (None if injective)."""
    g = a.symbol()
    gxi = g.eval(xi)
    gram = mat_mul(transpose(gxi), gxi)
    kern = nullspace(gram, ncols=a.source_dim)
    if kern:
        return _integerize(kern[0])
    return None


def _axis_and_sign_candidates(n, limit=3**7):
    """Exact candidate points: basis vectors, then small {-1,0,1} patterns."""
    pts = []
    seen = set()
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        pts.append(tuple(e))
        seen.add(tuple(int(x) for x in pts[-1]))
    if 3**n - 1 <= limit:
        from itertools import product

        for pattern in product((0, 1, -1), repeat=n):
            if any(pattern) and pattern not in seen:
                seen.add(pattern)
                pts.append(tuple(Fraction(x) for x in pattern))
    return pts


def is_elliptic(a, grid_points=ELLIPTIC_GRID_POINTS, threshold=ELLIPTIC_MIN_THRESHOLD):
    """Decide injectivity of A(ξ) for all ξ ≠ 0.

    n=1 and n=2 are exact (coefficient kernel / Sturm count on det G); n>=3
    is a semi-decision: exact No when a rational zero of det G is found,
    NumericallyPositive when the sampled-and-refined sphere minimum clears
    the threshold, Inconclusive otherwise.
    """
    if not a.is_homogeneous():
        raise NotHomogeneousError("ellipticity requires a single-order operator")
    n = a.space_dim
    if a.source_dim > a.target_dim:
        # rank A(ξ) <= dim E < dim V everywhere
        xi = tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(n))
        return EllipticityVerdict(
            "no",
            witness_xi=xi,
            kernel_vector=_gram_kernel_at(a, xi),
            witness_exact=True,
            note="target dimension below source dimension",
        )
    sym = a.symbol()
    gram_sym = sym.transpose() * sym
    detg = gram_sym.det()
    if detg.is_zero():
        xi = tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(n))
        return EllipticityVerdict(
            "no",
            witness_xi=xi,
            kernel_vector=_gram_kernel_at(a, xi),
            witness_exact=True,
            note="det(A*A) vanishes identically",
        )

    if n == 1:
        kern = _gram_kernel_at(a, (Fraction(1),))
        if kern is None:
            return EllipticityVerdict("yes")
        return EllipticityVerdict(
            "no", witness_xi=(Fraction(1),), kernel_vector=kern, witness_exact=True
        )

    # exact witnesses at axis/sign points first (cheap, and they exist for
    # every non-elliptic example in the bundled systems)
    exact_hits = []
    for xi in _axis_and_sign_candidates(n):
        if detg.eval(xi) == 0:
            exact_hits.append((xi, _gram_kernel_at(a, xi)))
    if exact_hits:
        (xi0, v0), rest = exact_hits[0], exact_hits[1:]
        return EllipticityVerdict(
            "no",
            witness_xi=xi0,
            kernel_vector=v0,
            witness_exact=True,
            extra_witnesses=rest,
        )

    if n == 2:
        return _is_elliptic_2d(a, detg)
    return _is_elliptic_sampled(a, detg, grid_points, threshold)


def _is_elliptic_2d(a, detg):
    """Exact decision on the circle: Sturm count of det G(1, t) plus the point (0,1)."""
    d = detg.degree()
    p = [Fraction(0)] * (d + 1)
    for (a1, a2), c in detg.terms.items():
        p[a2] += c  # ξ1 = 1
    p = sturm.trim(p)
    at_e2 = detg.eval((Fraction(0), Fraction(1)))
    if at_e2 == 0:
        xi = (Fraction(0), Fraction(1))
        return EllipticityVerdict(
            "no", witness_xi=xi, kernel_vector=_gram_kernel_at(a, xi), witness_exact=True
        )
    nroots = sturm.count_real_roots(p)
    if nroots == 0:
        return EllipticityVerdict("yes")
    hit = sturm.isolate_a_root(p)
    if hit[0] == "exact":
        t = hit[1]
        xi = _integerize((Fraction(1), t))
        return EllipticityVerdict(
            "no", witness_xi=xi, kernel_vector=_gram_kernel_at(a, xi), witness_exact=True
        )
    lo, hi = hit[1], hit[2]
    mid = (lo + hi) / 2
    xi_f = (1.0, float(mid))
    kern = _numeric_kernel(a, xi_f)
    return EllipticityVerdict(
        "no",
        witness_xi=(Fraction(1), Fraction(mid)),
        kernel_vector=kern,
        witness_exact=False,
        note=f"real zero of det G isolated in ({float(lo)}, {float(hi)}); "
        "no small-denominator rational zero found",
    )


def _numeric_kernel(a, xi_float):
    sym = a.symbol()
    mat = np.array(
        [[float(p.eval([Fraction(x).limit_denominator(10**12) for x in xi_float]))
          for p in row] for row in sym.entries]
    )
    _, _, vt = np.linalg.svd(mat)
    v = vt[-1]
    return tuple(Fraction(float(x)).limit_denominator(10**6) for x in v)


def _is_elliptic_sampled(a, detg, grid_points, threshold):
    """n >= 3: quasi-uniform sphere sampling with local refinement."""
    from scipy.optimize import minimize

    from .quadrature import build_rule

    n = a.space_dim
    exps, coeffs = detg.float_arrays()

    def val(points):
        mono = np.prod(points[:, None, :] ** exps[None, :, :], axis=2)
        return mono @ coeffs

    def rule_count(level):
        return 2 ** (2 * level + 1) if n == 3 else 2 ** (level + 5)

    level = 1
    while rule_count(level) < grid_points and level < 9:
        level += 1
    rule = build_rule(n, level)
    nodes = rule.nodes
    vals = val(nodes)
    scale = float(np.abs(vals).max())
    if scale == 0.0:
        return EllipticityVerdict("inconclusive", note="det G underflows on all nodes")
    starts = np.argsort(vals)[:10]

    def objective(x):
        r = np.linalg.norm(x)
        if r < 1e-9:
            return scale
        y = (x / r)[None, :]
        return float(val(y)[0]) / scale

    best = float(vals.min()) / scale
    best_x = nodes[int(np.argmin(vals))]
    for idx in starts:
        res = minimize(objective, nodes[idx], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 400})
        if res.fun < best:
            best = float(res.fun)
            best_x = res.x / np.linalg.norm(res.x)
    # try to certify an exact zero near the minimizer
    if best <= threshold:
        for den in (1, 2, 3, 4, 6, 8, 12, 100, 10**4, 10**6):
            cand = tuple(Fraction(float(x)).limit_denominator(den) for x in best_x)
            if any(x != 0 for x in cand) and detg.eval(cand) == 0:
                cand = _integerize(cand)
                return EllipticityVerdict(
                    "no",
                    witness_xi=cand,
                    kernel_vector=_gram_kernel_at(a, cand),
                    witness_exact=True,
                )
        return EllipticityVerdict(
            "inconclusive",
            min_normalized=best,
            note="normalized sphere minimum of det G below threshold but no "
            "exact rational zero certified",
        )
    return EllipticityVerdict("numerically_positive", min_normalized=best)


# -- subspace computations -----------------------------------------------------


def kernel_intersection(c):
    """K_C = ⋂_{ξ≠0} ker C(ξ), exactly, via homogenization + stacked coefficients."""
    ch = homogenize(c)
    stacked = []
    for _, mat in sorted(ch.coeffs.items(), reverse=True):
        stacked.extend([list(row) for row in mat])
    if not stacked:
        return Subspace.full(c.source_dim)
    return Subspace.from_vectors(c.source_dim, nullspace(stacked, ncols=c.source_dim))


def image_intersection(a, ann=None):
    """I_A = ⋂_{ξ≠0} im A(ξ) via the common kernel of the annihilator coefficients."""
    if ann is None:
        ann = annihilator(a)
    stacked = []
    for _, mat in sorted(ann.coeffs.items(), reverse=True):
        stacked.extend([list(row) for row in mat])
    if not stacked:  # L ≡ 0: the symbol is surjective everywhere
        return Subspace.full(a.target_dim)
    return Subspace.from_vectors(a.target_dim, nullspace(stacked, ncols=a.target_dim))


@dataclass
class CCResult:
    holds: bool
    witness: tuple | None
    image_intersection: Subspace
    kernel_intersection: Subspace

    def to_json(self):
        d = {"holds": self.holds}
        if self.witness is not None:
            d["witness"] = [str(x) for x in self.witness]
        return d


def check_cc(system, ann=None):
    """Condition (CC): I_A ∩ K_C = {0}. Witness = first canonical basis vector."""
    i_a = image_intersection(system.a, ann=ann)
    if system.c is None:
        k_c = Subspace.full(system.a.target_dim)
    else:
        k_c = kernel_intersection(system.c)
    isect = i_a.intersect(k_c)
    witness = None if isect.is_zero() else isect.basis[0]
    return CCResult(isect.is_zero(), witness, i_a, k_c)


# -- weak cancellation ---------------------------------------------------------


@dataclass
class WeakCancellationResult:
    holds: bool
    vacuous: bool
    moments: list  # (basis vector, |M e|)
    scale: float
    error_estimate: float
    levels: tuple
    tolerance: float

    def to_json(self):
        return {
            "holds": self.holds,
            "vacuous": self.vacuous,
            "moments": [
                {"e": [str(x) for x in e], "norm": float(nrm)}
                for e, nrm in self.moments
            ],
            "integrand_scale": self.scale,
            "error_estimate": self.error_estimate,
            "levels": list(self.levels),
            "tolerance": self.tolerance,
        }


def check_weak_cancellation(a, subspace, tol=WEAK_ZERO_TOL, base_level=3):
    """Vanishing of M_A on the given subspace (I_A, or I_A ∩ K_C for CWC).

    The zero test is |M e| <= tol * (sphere area) * max-node integrand norm,
    required after two quadrature refinements agree.
    """
    k = a.order
    n = a.space_dim
    if k < n:
        raise OrderTooLowError(f"weak cancellation needs k >= n (k={k}, n={n})")
    if subspace.is_zero():
        return WeakCancellationResult(True, True, [], 0.0, 0.0, (0, 0), tol)
    vectors = [list(map(float, row)) for row in subspace.basis]
    vals, scales, err, levels = converged_moments(
        a, vectors, base_level=base_level, rel_tol=tol
    )
    area = surface_area(n)
    moments = []
    holds = True
    for row, vec, scl in zip(subspace.basis, vals, scales):
        nrm = float(np.linalg.norm(vec))
        moments.append((row, nrm))
        if nrm > tol * area * max(scl, 1e-300):
            holds = False
    return WeakCancellationResult(holds, False, moments, float(scales.max()), err, levels, tol)


# -- left inverses and potentials ----------------------------------------------


@dataclass
class LeftInverseFamily:
    """Maps K_β with Σ K_β L_β = orthogonal projection onto im M*.

    Making the sum the *orthogonal* projection (not just any left inverse of
    the stacked map) is what lets the adjoint identity Σ L_β* K_β* = Id on
    im M* hold exactly as well.
    """

    order: int
    betas: list
    maps: dict  # β -> K_β as Fraction matrix (dim E x dim F)
    blocks: dict  # β -> L_β as Fraction matrix (dim F x dim E)
    target_subspace: Subspace  # im M* inside E
    projection: list  # Fraction matrix, orthogonal projection onto im M*

    def composite(self):
        dim = len(self.projection)
        acc = [[Fraction(0)] * dim for _ in range(dim)]
        for beta in self.betas:
            if beta in self.maps:
                prod = mat_mul(self.maps[beta], self.blocks[beta])
                acc = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(acc, prod)]
        return acc


def left_inverse_family(op, m_matrix):
    """Exact K_β ∈ Lin(F, im M*) with Σ K_β L_β restricted to im M* = identity.

    Requires op homogeneous of a single order and M annihilating the common
    kernel ⋂_{ξ≠0} ker L(ξ) (HypothesisFailed otherwise).
    """
    order = op.order
    m_matrix = as_fraction_matrix(m_matrix)
    common = kernel_intersection(op)
    for v in common.basis:
        if any(x != 0 for x in mat_vec(m_matrix, v)):
            raise HypothesisFailedError(
                "M does not annihilate the common kernel of the operator symbol"
            )
    dim_e = op.source_dim
    dim_f = op.target_dim
    target = Subspace.from_vectors(dim_e, m_matrix)
    proj = projection_onto_rowspace(m_matrix)
    if target.is_zero():
        return LeftInverseFamily(order, [], {}, {}, target, proj)
    betas = sorted(monomials_of_degree(op.space_dim, order), reverse=True)
    blocks = {}
    t_rows = []
    row_index = []  # (β, row within block)
    for beta in betas:
        mat = op.coeffs.get(beta)
        if mat is None:
            blocks[beta] = tuple(tuple(Fraction(0) for _ in range(dim_e)) for _ in range(dim_f))
            continue
        blocks[beta] = mat
        for r in range(dim_f):
            if any(x != 0 for x in mat[r]):
                t_rows.append(list(mat[r]))
                row_index.append((beta, r))
    # solve Tᵀ Y = Π column by column (consistent because im M* ⊆ im Tᵀ)
    t_t = transpose(t_rows)
    y_cols = []
    for col in transpose(proj):
        sol = solve(t_t, col)
        if sol is None:
            raise HypothesisFailedError(
                "projection column not in the row space of the stacked symbol "
                "coefficients (hypothesis violated)"
            )
        y_cols.append(list(sol))
    y = transpose(y_cols)  # rows aligned with t_rows
    # K = Π Yᵀ split into β blocks; unreferenced rows of K_β stay zero
    k_full = mat_mul(proj, transpose(y))  # dim_e x len(t_rows)
    maps = {}
    for col_idx, (beta, r) in enumerate(row_index):
        k_beta = maps.setdefault(
            beta, [[Fraction(0)] * dim_f for _ in range(dim_e)]
        )
        for i in range(dim_e):
            k_beta[i][r] = k_full[i][col_idx]
    maps = {b: tuple(tuple(row) for row in m) for b, m in maps.items()}
    fam = LeftInverseFamily(order, betas, maps, blocks, target, proj)
    assert fam.composite() == proj, "left-inverse construction inconsistency"
    return fam


@dataclass
class PotentialField:
    """P(x) = Σ x^β/β!·K_β*, an integral right inverse of the adjoint symbol."""

    matrix: MatrixPolynomial  # dim F x dim E polynomial in x
    family: LeftInverseFamily
    identity_checked: bool

    def adjoint_applied(self):
        """Σ L_β* ∂^β P, computed by exact symbolic differentiation."""
        dim_e = len(self.family.projection)
        nvars = self.matrix.nvars
        acc = MatrixPolynomial.zero(dim_e, dim_e, nvars)
        for beta in self.family.betas:
            block = self.family.blocks[beta]
            dbeta = MatrixPolynomial(
                [[p.diff(beta) for p in row] for row in self.matrix.entries]
            )
            lt = MatrixPolynomial.from_rational(transpose(block), nvars)
            acc = acc + lt * dbeta
        return acc


def potential_field(family):
    """Build P and verify L* P = Id on im M* symbolically (exact)."""
    dim_e = len(family.projection)
    dim_f = max((len(b) for b in family.blocks.values()), default=0)
    nvars = len(family.betas[0]) if family.betas else 1
    entries = [[Polynomial.zero(nvars) for _ in range(dim_e)] for _ in range(dim_f)]
    for beta, k_beta in family.maps.items():
        fact = Fraction(1)
        for b in beta:
            fact *= math.factorial(b)
        coeff = Fraction(1) / fact
        for i in range(dim_e):
            for j in range(dim_f):
                if k_beta[i][j] != 0:
                    entries[j][i] = entries[j][i] + Polynomial.monomial(
                        nvars, beta, k_beta[i][j] * coeff
                    )
    if dim_f == 0:
        matrix = MatrixPolynomial.zero(1, dim_e, nvars)
        return PotentialField(matrix, family, True)
    matrix = MatrixPolynomial(entries)
    field_obj = PotentialField(matrix, family, False)
    applied = field_obj.adjoint_applied()
    expected = MatrixPolynomial.from_rational(family.projection, nvars)
    if applied != expected:
        raise AssertionError("adjoint identity L*P = Id_{im M*} failed")
    # restriction to im M*: applied · q == q for every basis vector q
    for q in family.target_subspace.basis:
        image = mat_vec(applied.eval([Fraction(0)] * nvars), q)
        assert tuple(image) == tuple(q)
    field_obj.identity_checked = True
    return field_obj


# -- full report ----------------------------------------------------------------


@dataclass
class ConditionReport:
    n: int
    order: int | None
    dims: dict
    elliptic: EllipticityVerdict
    image_basis: Subspace | None
    kernel_basis: Subspace | None
    canceling: bool | None
    cocanceling: bool | None
    cc: CCResult | None
    weak: WeakCancellationResult | None
    cwc: WeakCancellationResult | None
    diagnostics: list

    def exit_status(self):
        if self.elliptic.status == "inconclusive":
            return 2
        return 0

    def to_json(self):
        return {
            "space_dim": self.n,
            "order": self.order,
            "dims": self.dims,
            "elliptic": self.elliptic.to_json(),
            "I_A_basis": self.image_basis.to_json() if self.image_basis else None,
            "K_C_basis": self.kernel_basis.to_json() if self.kernel_basis else None,
            "canceling": self.canceling,
            "cocanceling": self.cocanceling,
            "CC": self.cc.to_json() if self.cc else None,
            "weak": self.weak.to_json() if self.weak else None,
            "CWC": self.cwc.to_json() if self.cwc else None,
            "diagnostics": list(self.diagnostics),
        }


def run_full_check(system, tol=WEAK_ZERO_TOL, quad_base_level=3):
    """Assemble the full certified report for a system A u = f, C f = 0."""
    a = system.a
    diagnostics = []
    try:
        order = a.order
    except NotHomogeneousError:
        order = None
        diagnostics.append(
            "operator rows have mixed degrees; ellipticity and annihilator "
            "analysis need a single order and were skipped"
        )

    if system.c is None:
        k_c = Subspace.full(a.target_dim)
        diagnostics.append(
            "no constraint supplied: K_C is all of E, so (CC) degenerates to "
            "cancellation and (CWC) to weak cancellation"
        )
    else:
        k_c = kernel_intersection(system.c)
    cocanceling = k_c.is_zero()

    if order is None:
        elliptic = EllipticityVerdict("inconclusive", note="operator not homogeneous")
        return ConditionReport(
            system.n,
            None,
            _dims(system),
            elliptic,
            None,
            k_c,
            None,
            cocanceling,
            None,
            None,
            None,
            diagnostics,
        )

    elliptic = is_elliptic(a)
    if elliptic.definitely_not:
        if system.c is not None and order >= system.n:
            diagnostics.append(NONELLIPTIC_CONSTRAINT_DIAGNOSTIC)
        else:
            diagnostics.append(
                "operator is not elliptic; annihilator-based verdicts skipped"
            )
        return ConditionReport(
            system.n,
            order,
            _dims(system),
            elliptic,
            None,
            k_c,
            None,
            cocanceling,
            None,
            None,
            None,
            diagnostics,
        )
    if elliptic.status == "inconclusive":
        diagnostics.append(
            "ellipticity is inconclusive; downstream verdicts assume the "
            "sampled nonvanishing of det G seen by the annihilator guard"
        )
    if elliptic.status == "numerically_positive":
        diagnostics.append(
            "ellipticity certified numerically (sampled sphere minimum of "
            "det G); n >= 3 has no exact decision procedure here"
        )

    try:
        ann = annihilator(a)
    except NotEllipticError as exc:
        diagnostics.append(f"annihilator construction failed: {exc}")
        return ConditionReport(
            system.n,
            order,
            _dims(system),
            elliptic,
            None,
            k_c,
            None,
            cocanceling,
            None,
            None,
            None,
            diagnostics,
        )
    i_a = image_intersection(a, ann=ann)
    canceling = i_a.is_zero()
    isect = i_a.intersect(k_c)
    cc = CCResult(
        isect.is_zero(),
        None if isect.is_zero() else isect.basis[0],
        i_a,
        k_c,
    )

    weak = cwc = None
    if system.n >= 2 and order >= system.n:
        from .errors import NearSingularSymbolError, QuadratureNotConvergedError

        try:
            weak = check_weak_cancellation(a, i_a, tol=tol, base_level=quad_base_level)
            cwc = check_weak_cancellation(a, isect, tol=tol, base_level=quad_base_level)
        except (NearSingularSymbolError, QuadratureNotConvergedError) as exc:
            weak = cwc = None
            diagnostics.append(f"moment quadrature failed: {exc}")
    elif order < system.n:
        diagnostics.append(
            f"order k={order} below dimension n={system.n}: the sup-norm "
            "regime does not apply, weak-cancellation verdicts omitted"
        )
    if system.n == 1:
        diagnostics.append(
            "n=1: the Lebesgue estimate range 1..min(k, n-1) is empty"
        )

    return ConditionReport(
        system.n,
        order,
        _dims(system),
        elliptic,
        i_a,
        k_c,
        canceling,
        cocanceling,
        cc,
        weak,
        cwc,
        diagnostics,
    )


def _dims(system):
    return {
        "source": system.a.source_dim,
        "target": system.a.target_dim,
        "constraint_target": system.c.target_dim if system.c else None,
    }


# -- sampled oracles (used by tests and the CLI's self-checks) -------------------


def random_rational_point(rng, n, max_num=9, max_den=9):
    while True:
        p = tuple(
            Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
            for _ in range(n)
        )
        if any(x != 0 for x in p):
            return p


def sampled_kernel_dimension(c, points):
    """Numeric dim of ⋂ ker C(ξ) over the sample (rank tolerance 1e-10)."""
    stacked = []
    sym = c.symbol()
    for xi in points:
        mat = sym.eval(xi)
        stacked.extend([[float(x) for x in row] for row in mat])
    arr = np.array(stacked)
    if arr.size == 0:
        return c.source_dim, np.eye(c.source_dim)
    _, s, vt = np.linalg.svd(arr)
    tol = 1e-10 * max(1.0, (s[0] if len(s) else 1.0))
    ker_dim = sum(1 for x in s if x <= tol) + max(0, arr.shape[1] - len(s))
    basis = vt[arr.shape[1] - ker_dim:] if ker_dim else np.zeros((0, arr.shape[1]))
    return ker_dim, basis
