"""Finite-difference radial Laplacian / bilaplacian with clamped closures.

The radial Laplacian is Delta_N u = u'' + (N-1)/r u'.  Stencils are built by
local quadratic fitting on the nonuniform graded grid.  Two closures:

* origin: smooth radial functions are even in r, so the first node uses a
  quadratic fit in the variable x = r^2 through the first three nodes
  (equivalent to ghost-node reflection with u'(0) = u'''(0) = 0);
* boundary: a ghost node reflected across r = 1 carries the Neumann data
  u'(1) = beta, while u(1) = alpha enters as an affine offset.

The bilaplacian is the composition of two such Laplacians sharing these
closures, which keeps the quadratic form integral (Delta phi)^2 natural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .grid import BoundaryData, RadialGrid


def power_bilaplacian_coeff(p, N: int):
    """c(p, N) = p (p-2) (p+N-2) (p+N-4), so that Delta^2 r^p = c r^(p-4).

    Exact (Fraction) when p is an int or Fraction, float otherwise.
    """
    if isinstance(p, (int, Fraction)):
        p = Fraction(p)
    return p * (p - 2) * (p + N - 2) * (p + N - 4)


def power_laplacian_coeff(p, N: int):
    """Delta_N r^p = p (p + N - 2) r^(p-2)."""
    if isinstance(p, (int, Fraction)):
        p = Fraction(p)
    return p * (p + N - 2)


def lambda_bar(N: int) -> Fraction:
    """lambda_bar_N = (8/9)(N - 2/3)(N - 8/3); Delta^2 (1 - r^(4/3)) = lambda_bar r^(-8/3)."""
    return Fraction(8, 9) * (N - Fraction(2, 3)) * (N - Fraction(8, 3))


def hardy_rellich_constant(N: int) -> Fraction:
    """H_N = N^2 (N-4)^2 / 16, the best constant in the Hardy-Rellich weight H_N / r^4."""
    return Fraction(N * N * (N - 4) * (N - 4), 16)


#: stencil assembly and application run in extended precision: the composed
#: fourth-order stencil carries weights ~ 1/h^4 whose cancellation would
#: otherwise cap the achievable relative accuracy near 1e-5 on fine grids
_WIDE = np.longdouble


def _quad_fit_weights(xs, xe):
    """(value', value'') weights at xe of the quadratic through (xs[0..2], .)."""
    x0, x1, x2 = (_WIDE(x) for x in xs)
    xe = _WIDE(xe)
    d0 = (x0 - x1) * (x0 - x2)
    d1 = (x1 - x0) * (x1 - x2)
    d2 = (x2 - x0) * (x2 - x1)
    w1 = np.array([(2 * xe - x1 - x2) / d0, (2 * xe - x0 - x2) / d1, (2 * xe - x0 - x1) / d2])
    w2 = np.array([2.0 / d0, 2.0 / d1, 2.0 / d2])
    return w1, w2


def _laplacian_rows(grid: RadialGrid):
    """Stencil data for Delta_N at every node, as (cols, weights) lists.

    The last node's stencil involves the boundary ghost; it is returned
    separately as (cols, weights, ghost_weight) where the ghost value is
    u[M-2] + 2 beta (1 - r[M-2]).
    """
    r, N, M = grid.r, grid.N, grid.M
    r = r.astype(_WIDE)
    rows = []
    # origin closure: even quadratic in x = r^2 through nodes 0..2
    x = r[:3] ** 2
    w1, w2 = _quad_fit_weights(x, x[0])
    rows.append((np.array([0, 1, 2]), 4.0 * x[0] * w2 + 2.0 * N * w1))
    for i in range(1, M - 1):
        w1, w2 = _quad_fit_weights(r[i - 1:i + 2], r[i])
        rows.append((np.array([i - 1, i, i + 1]), w2 + (N - 1) / r[i] * w1))
    # boundary node stencil across the ghost at 2 - r[M-2]
    rg = 2.0 - r[M - 2]
    w1, w2 = _quad_fit_weights((r[M - 2], 1.0, rg), 1.0)
    w = w2 + (N - 1) * w1
    boundary = (np.array([M - 2, M - 1]), np.array([w[0], w[1]]), w[2])
    return rows, boundary


def _assemble(rows, M):
    # COO assembly: lil_matrix setitem would silently round the float128
    # stencil weights through float64
    ri, ci, data = [], [], []
    for i, (cols, weights) in enumerate(rows):
        for c, w in zip(cols, weights):
            ri.append(i)
            ci.append(int(c))
            data.append(w)
    mat = sp.coo_matrix(
        (np.array(data, dtype=_WIDE), (np.array(ri), np.array(ci))),
        shape=(len(rows), M),
    )
    return mat.tocsr()


def laplacian_op(grid: RadialGrid) -> "RadialOperator":
    """Delta_N as an M x M banded operator on full sample vectors.

    The last row uses a one-sided interior stencil (no boundary data needed),
    so only rows 0..M-2 should be trusted for clamped problems.
    """
    rows, _ = _laplacian_rows(grid)
    r, N, M = grid.r, grid.N, grid.M
    w1, w2 = _quad_fit_weights(r[M - 3:M], 1.0)
    rows.append((np.array([M - 3, M - 2, M - 1]), w2 + (N - 1) * w1))
    return RadialOperator(
        grid=grid,
        matrix=_assemble(rows, M),
        offset=np.zeros(M),
        closure="origin: even fit; r=1: one-sided",
    )


def laplacian_with_bc(grid: RadialGrid, bc: BoundaryData):
    """(L, o) with Delta_N u = L @ u_interior + o, evaluated at all M nodes.

    u_interior are the M-1 unknowns at nodes 0..M-2; the boundary value
    alpha and the ghost reflection carrying beta enter through o.
    """
    rows, (bcols, bweights, wg) = _laplacian_rows(grid)
    M = grid.M
    ri, ci, data = [], [], []
    o = np.zeros(M, dtype=_WIDE)
    for i, (cols, weights) in enumerate(rows):
        for c, w in zip(cols, weights):
            if c == M - 1:
                o[i] += w * _WIDE(bc.alpha)
            else:
                ri.append(i)
                ci.append(int(c))
                data.append(w)
    # last row: u[M-2], u[M-1] = alpha, ghost = u[M-2] + 2 beta (1 - r[M-2])
    ri.append(M - 1)
    ci.append(M - 2)
    data.append(bweights[0] + wg)
    o[M - 1] += bweights[1] * _WIDE(bc.alpha) + wg * 2.0 * _WIDE(bc.beta) * (1.0 - _WIDE(grid.r[M - 2]))
    L = sp.coo_matrix(
        (np.array(data, dtype=_WIDE), (np.array(ri), np.array(ci))), shape=(M, M - 1)
    ).tocsr()
    return L, o


@dataclass(frozen=True)
class RadialOperator:
    """A banded discrete radial operator plus the affine offset from boundary data."""

    grid: RadialGrid
    matrix: sp.csr_matrix
    offset: np.ndarray
    closure: str

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Apply to a full sample vector; uses as many leading entries as needed."""
        n = self.matrix.shape[1]
        out = self.matrix @ np.asarray(values, dtype=_WIDE)[:n] + self.offset
        return np.asarray(out, dtype=float)


def bilaplacian_clamped(grid: RadialGrid, bc: BoundaryData) -> RadialOperator:
    """Delta^2 with u(1) = alpha, u'(1) = beta folded into the closure.

    Acts on the M-1 interior unknowns and returns Delta^2 u at nodes 0..M-2.
    Assembled as Delta_N composed with itself: the first Laplacian carries the
    boundary data, the second needs none (it sees Delta u at every node).
    """
    L1, o1 = laplacian_with_bc(grid, bc)
    rows, _ = _laplacian_rows(grid)
    L2 = _assemble(rows[: grid.M - 1], grid.M)
    return RadialOperator(
        grid=grid,
        matrix=(L2 @ L1).tocsr(),
        offset=L2 @ o1,
        closure=f"clamped alpha={bc.alpha} beta={bc.beta}; Delta o Delta",
    )


def bilaplacian_form(grid: RadialGrid):
    """(A, m): quadratic form of integral (Delta phi)^2 r^(N-1) dr and L^2 mass.

    A = L^T diag(w r^(N-1)) L with L the homogeneous-clamped Laplacian, so A is
    symmetric by construction and positive definite; m is the diagonal mass
    (quadrature weight times r^(N-1)) at the interior unknowns.  Both omit the
    sphere-area factor, which cancels in every Rayleigh quotient.
    """
    L, _ = laplacian_with_bc(grid, BoundaryData(0.0, 0.0))
    q = grid.quad_weights() * grid.r ** (grid.N - 1)
    A = (L.T @ sp.diags(q) @ L).tocsr()
    return A, q[:-1]
