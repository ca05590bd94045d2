"""Constant-coefficient differential operators and their symbol calculus.

An operator is stored as a map multi-index -> coefficient matrix (target x
source, exact rationals). The symbol uses the real convention ξ^α — no factor
of i^|α| — so kernels and images match the constant-coefficient theory while
staying inside rational arithmetic. Rows of mixed degree are admissible; many
operations require a single common order and say so.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotEllipticError, NotHomogeneousError
from .poly import MatrixPolynomial, Polynomial, monomials_of_degree
from .ratlinalg import as_fraction_matrix

MultiIndex = tuple


def _freeze_matrix(mat):
    return tuple(tuple(Fraction(x) for x in row) for row in mat)


@dataclass
class OperatorSpec:
    """A homogeneous-by-row differential operator from R^source to R^target."""

    space_dim: int
    source_dim: int
    target_dim: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha, mat in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            assert len(alpha) == self.space_dim
            frozen = _freeze_matrix(mat)
            assert len(frozen) == self.target_dim
            assert all(len(row) == self.source_dim for row in frozen)
            if any(x != 0 for row in frozen for x in row):
                clean[alpha] = frozen
        self.coeffs = clean

    # -- structure ---------------------------------------------------------

    def row_degrees(self):
        """Degree of each row; None for an identically zero row.

        Raises NonHomogeneousRow-style ValueError if some row mixes degrees;
        parsing enforces this, so reaching it means a construction bug.
        """
        degs = [None] * self.target_dim
        for alpha, mat in self.coeffs.items():
            d = sum(alpha)
            for j in range(self.target_dim):
                if any(x != 0 for x in mat[j]):
                    if degs[j] is None:
                        degs[j] = d
                    elif degs[j] != d:
                        raise ValueError(f"row {j + 1} mixes degrees {degs[j]} and {d}")
        return degs

    def is_homogeneous(self):
        degs = {d for d in self.row_degrees() if d is not None}
        return len(degs) <= 1

    @property
    def order(self):
        """The single common order; NotHomogeneous if rows differ."""
        degs = {d for d in self.row_degrees() if d is not None}
        if not degs:
            return 0
        if len(degs) > 1:
            raise NotHomogeneousError(
                f"operator has mixed row degrees {sorted(degs)}"
            )
        return degs.pop()

    def max_row_degree(self):
        degs = [d for d in self.row_degrees() if d is not None]
        return max(degs) if degs else 0

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        assert (self.space_dim, self.source_dim, self.target_dim) == (
            other.space_dim,
            other.source_dim,
            other.target_dim,
        )
        coeffs = {a: [list(r) for r in m] for a, m in self.coeffs.items()}
        for a, m in other.coeffs.items():
            if a in coeffs:
                coeffs[a] = [
                    [x + y for x, y in zip(r1, r2)] for r1, r2 in zip(coeffs[a], m)
                ]
            else:
                coeffs[a] = [list(r) for r in m]
        return OperatorSpec(self.space_dim, self.source_dim, self.target_dim, coeffs)

    def scale(self, c):
        c = Fraction(c)
        return OperatorSpec(
            self.space_dim,
            self.source_dim,
            self.target_dim,
            {a: [[c * x for x in row] for row in m] for a, m in self.coeffs.items()},
        )

    def compose_left(self, mat):
        """M ∘ A for a constant matrix M (target side change of coordinates)."""
        mat = as_fraction_matrix(mat)
        assert len(mat[0]) == self.target_dim
        out = {}
        for a, m in self.coeffs.items():
            prod = [
                [
                    sum((mat[i][k] * m[k][j] for k in range(self.target_dim)), Fraction(0))
                    for j in range(self.source_dim)
                ]
                for i in range(len(mat))
            ]
            out[a] = prod
        return OperatorSpec(self.space_dim, self.source_dim, len(mat), out)

    def compose_right(self, mat):
        """A ∘ M for a constant matrix M (source side change of coordinates)."""
        mat = as_fraction_matrix(mat)
        assert len(mat) == self.source_dim
        new_source = len(mat[0])
        out = {}
        for a, m in self.coeffs.items():
            prod = [
                [
                    sum((m[i][k] * mat[k][j] for k in range(self.source_dim)), Fraction(0))
                    for j in range(new_source)
                ]
                for i in range(self.target_dim)
            ]
            out[a] = prod
        return OperatorSpec(self.space_dim, new_source, self.target_dim, out)

    def symbol(self):
        """Matrix-valued polynomial Σ C_α ξ^α (real convention)."""
        n = self.space_dim
        entries = [
            [Polynomial.zero(n) for _ in range(self.source_dim)]
            for _ in range(self.target_dim)
        ]
        for alpha, mat in self.coeffs.items():
            for i in range(self.target_dim):
                for j in range(self.source_dim):
                    if mat[i][j] != 0:
                        entries[i][j] = entries[i][j] + Polynomial.monomial(
                            n, alpha, mat[i][j]
                        )
        return MatrixPolynomial(entries)

    @classmethod
    def from_symbol(cls, mp, space_dim=None):
        """Recover the coefficient map from a matrix polynomial."""
        n = space_dim if space_dim is not None else mp.nvars
        assert n == mp.nvars
        coeffs = {}
        for i in range(mp.rows):
            for j in range(mp.cols):
                for alpha, c in mp.entries[i][j].terms.items():
                    mat = coeffs.setdefault(
                        alpha,
                        [[Fraction(0)] * mp.cols for _ in range(mp.rows)],
                    )
                    mat[i][j] += c
        return cls(n, mp.cols, mp.rows, coeffs)


@dataclass
class SystemSpec:
    """A u = f subject to C f = 0; C may be absent (no constraint)."""

    a: OperatorSpec
    c: OperatorSpec | None
    n: int

    def __post_init__(self):
        from .errors import DimensionMismatchError

        if self.a.space_dim != self.n:
            raise DimensionMismatchError(
                f"operator space dimension {self.a.space_dim} != declared dim {self.n}"
            )
        if self.c is not None:
            if self.c.space_dim != self.n:
                raise DimensionMismatchError(
                    f"constraint space dimension {self.c.space_dim} != declared dim {self.n}"
                )
            if self.a.target_dim != self.c.source_dim:
                raise DimensionMismatchError(
                    f"operator target dimension {self.a.target_dim} != "
                    f"constraint source dimension {self.c.source_dim}"
                )


# -- symbol-level operations ------------------------------------------------


def symbol(op):
    return op.symbol()


def eval_symbol(mp, xi):
    return mp.eval(xi)


def gram(a):
    """G(ξ) = A*(ξ) A(ξ): square, symmetric, homogeneous of degree 2k."""
    s = a.symbol()
    return s.transpose() * s


def det_adj(g):
    """(det G, adj G) with G · adj G = det G · Id exactly."""
    return g.det(), g.adjugate()


_SAMPLE_SEED = 1729


def _sample_points(n, count=12):
    """Deterministic nonzero rational sample points: axes first, then random."""
    pts = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        pts.append(tuple(e))
    rng = random.Random(_SAMPLE_SEED + n)
    while len(pts) < count + n:
        p = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n))
        if any(x != 0 for x in p):
            pts.append(p)
    return pts


def annihilator(a):
    """Exact annihilator L with ker L(ξ) = im A(ξ) wherever det G(ξ) ≠ 0.

    Construction: L(ξ) = det G(ξ)·Id − A(ξ)·adj G(ξ)·A*(ξ). When G(ξ) is a
    scalar polynomial q(ξ) times the identity, the reduced form
    L(ξ) = q(ξ)·Id − A(ξ)A*(ξ) has the same kernel at every ξ with q(ξ) ≠ 0
    and the minimal degree 2k; it is used whenever applicable.
    """
    s = a.symbol()
    g = s.transpose() * s
    detg = g.det()
    if detg.is_zero():
        raise NotEllipticError("det(A*A) vanishes identically")
    for xi in _sample_points(a.space_dim):
        if detg.eval(xi) == 0:
            gxi = g.eval(xi)
            from .ratlinalg import nullspace

            kern = nullspace(gxi)
            raise NotEllipticError(
                f"det(A*A) vanishes at ξ = {tuple(str(x) for x in xi)}",
                witness_xi=xi,
                kernel_vector=kern[0] if kern else None,
            )
    q = g.entries[0][0]
    scalar = all(
        (g.entries[i][j] == q if i == j else g.entries[i][j].is_zero())
        for i in range(g.rows)
        for j in range(g.cols)
    )
    if scalar:
        l_sym = MatrixPolynomial.scalar_identity(q, a.target_dim) - s * s.transpose()
    else:
        l_sym = (
            MatrixPolynomial.scalar_identity(detg, a.target_dim)
            - s * g.adjugate() * s.transpose()
        )
    return OperatorSpec.from_symbol(l_sym, a.space_dim)


def homogenize(c, target_degree=None):
    """Pad each row to a common degree by all monomial multiples.

    Row j of degree d_j is replaced by the block of rows ξ^γ · C_j(ξ) over all
    |γ| = l − d_j; the pointwise kernel of the symbol is preserved for any
    l >= max_j d_j, and l defaults to that maximum. Rows are emitted grouped
    by original row, γ in descending lex order, so an already-homogeneous
    operator comes back structurally equal.
    """
    degs = c.row_degrees()
    l = max((d for d in degs if d is not None), default=0)
    if target_degree is not None:
        if target_degree < l:
            raise ValueError(
                f"target degree {target_degree} below the maximal row degree {l}"
            )
        l = target_degree
    n = c.space_dim
    row_gammas = []
    for d in degs:
        pad = 0 if d is None else l - d
        row_gammas.append(monomials_of_degree(n, pad))
    new_target = sum(len(g) for g in row_gammas)
    row_offset = []
    off = 0
    for g in row_gammas:
        row_offset.append(off)
        off += len(g)
    coeffs = {}
    for alpha, mat in c.coeffs.items():
        for j in range(c.target_dim):
            if all(x == 0 for x in mat[j]):
                continue
            for gi, gamma in enumerate(row_gammas[j]):
                beta = tuple(x + y for x, y in zip(alpha, gamma))
                out = coeffs.setdefault(
                    beta, [[Fraction(0)] * c.source_dim for _ in range(new_target)]
                )
                target_row = row_offset[j] + gi
                for i in range(c.source_dim):
                    out[target_row][i] += mat[j][i]
    return OperatorSpec(n, c.source_dim, new_target, coeffs)
