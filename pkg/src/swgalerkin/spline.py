"""Clamped B-spline bases of order r (degree r-1) and smoothness C^mu over a Mesh."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = ["SplineSpace", "build_space", "basis_derivatives", "MAX_DERIV"]

MAX_DERIV = 3


def basis_derivatives(knots, degree, span, x, nderiv):
    """Nonzero B-splines and their derivatives at many points.

    Vectorized Cox-de Boor recursion with derivatives (Piegl & Tiller,
    algorithm A2.3). ``span[i]`` is the knot index with
    ``knots[span] <= x < knots[span + 1]``.

    Returns an array of shape ``(nderiv + 1, len(x), degree + 1)``; entry
    ``[d, i, j]`` is the d-th derivative of basis function ``span[i] - degree + j``.
    """
    p = degree
    x = np.asarray(x, dtype=float)
    span = np.asarray(span)
    npts = x.size
    ndu = np.empty((p + 1, p + 1, npts))
    left = np.empty((p + 1, npts))
    right = np.empty((p + 1, npts))
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = np.zeros(npts)
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((nderiv + 1, npts, p + 1))
    ders[0] = ndu[:, p].T
    a = np.empty((2, p + 1, npts))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, nderiv + 1):
            if k > p:
                break
            d = np.zeros(npts)
            rk, pk = r - k, p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d += a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            ders[k, :, r] = d
            s1, s2 = s2, s1
    fac = p
    for k in range(1, nderiv + 1):
        ders[k] *= fac
        fac *= p - k
    return ders


class SplineSpace:
    """The spline space S_h^{r,mu}, optionally restricted to vanish at 0 and 1.

    Parameters
    ----------
    mesh : Mesh
    r : int
        Order; pieces are polynomials of degree ``r - 1``. Must be >= 3.
    mu : int
        Global smoothness C^mu, ``1 <= mu <= r - 2``. Interior knots are
        repeated ``r - 1 - mu`` times.
    zero_bc : bool
        Drop the first and last B-splines, which are the only ones that do
        not vanish at the endpoints.

    Basis indices returned by :meth:`eval_basis` always refer to the full
    (unrestricted) clamped basis; coefficient vectors and the matrices of
    :meth:`basis_matrix` use the restricted numbering when ``zero_bc`` is set.
    """

    def __init__(self, mesh, r: int = 4, mu: int | None = None, zero_bc: bool = False):
        if mu is None:
            mu = r - 2
        if int(r) != r or r < 3:
            raise ValueError(f"order r must be an integer >= 3, got {r!r}")
        if int(mu) != mu or not 1 <= mu <= r - 2:
            raise ValueError(f"smoothness mu must satisfy 1 <= mu <= r-2 = {r - 2}, got {mu!r}")
        self.mesh = mesh
        self.r = int(r)
        self.mu = int(mu)
        self.zero_bc = bool(zero_bc)
        self.degree = self.r - 1
        self.multiplicity = self.r - 1 - self.mu
        x = mesh.breakpoints
        self.knots = np.concatenate(
            (np.full(self.r, 0.0), np.repeat(x[1:-1], self.multiplicity), np.full(self.r, 1.0))
        )
        self.knots.setflags(write=False)
        self.full_dim = self.knots.size - self.r
        self.dim = self.full_dim - 2 if self.zero_bc else self.full_dim

    def __repr__(self):
        return (
            f"SplineSpace(r={self.r}, mu={self.mu}, N={self.mesh.N}, "
            f"zero_bc={self.zero_bc}, dim={self.dim})"
        )

    @property
    def bandwidth(self) -> int:
        """Number of sub-diagonals of the Gram matrix."""
        return self.degree

    def restricted(self) -> "SplineSpace":
        """The same space with the zero boundary restriction."""
        return SplineSpace(self.mesh, self.r, self.mu, zero_bc=True)

    def _spans(self, x):
        elem = self.mesh.locate(x)
        return elem, self.degree + elem * self.multiplicity

    def _check_points(self, x, deriv):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
            raise ValueError("evaluation points must lie in [0, 1]")
        if int(deriv) != deriv or not 0 <= deriv <= min(MAX_DERIV, self.degree):
            raise ValueError(f"deriv must be in 0..{min(MAX_DERIV, self.degree)}, got {deriv!r}")
        return x

    def eval_basis(self, x: float, deriv: int = 0):
        """First active (full-basis) index and the r basis values at ``x``.

        At interior breakpoints the right-hand piece is used; at ``x = 1`` the
        left limit is used.
        """
        x = self._check_points(x, deriv)
        if x.size != 1:
            raise ValueError("eval_basis takes a single point; use basis_matrix for arrays")
        _, span = self._spans(x)
        vals = basis_derivatives(self.knots, self.degree, span, x, deriv)[deriv, 0]
        return int(span[0] - self.degree), vals

    def basis_values(self, x, nderiv: int = 0):
        """Dense local values: ``(first_index, ders)`` with ders of shape (nderiv+1, npts, r)."""
        x = self._check_points(x, nderiv)
        _, span = self._spans(x)
        return span - self.degree, basis_derivatives(self.knots, self.degree, span, x, nderiv)

    def basis_matrix(self, x, deriv: int = 0) -> sp.csr_matrix:
        """Sparse collocation matrix ``A[i, j] = B_j^{(deriv)}(x_i)`` in this space's numbering."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        first, ders = self.basis_values(x, deriv)
        return self._assemble(first, ders[deriv])

    def _assemble(self, first, vals):
        npts, r = vals.shape
        rows = np.repeat(np.arange(npts), r)
        cols = (first[:, None] + np.arange(r)[None, :]).ravel()
        data = vals.ravel()
        if self.zero_bc:
            cols = cols - 1
            keep = (cols >= 0) & (cols < self.dim)
            rows, cols, data = rows[keep], cols[keep], data[keep]
        return sp.csr_matrix((data, (rows, cols)), shape=(npts, self.dim))

    def full_coefficients(self, coeffs) -> np.ndarray:
        """Coefficients padded back to the full clamped basis."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coefficients, got shape {coeffs.shape}")
        if self.zero_bc:
            return np.concatenate(([0.0], coeffs, [0.0]))
        return coeffs

    def eval_function(self, coeffs, x, deriv: int = 0):
        """Evaluate ``sum_i c_i B_i^{(deriv)}(x)``; scalar in, scalar out."""
        c = self.full_coefficients(coeffs)
        scalar = np.ndim(x) == 0
        first, ders = self.basis_values(x, deriv)
        idx = first[:, None] + np.arange(self.r)[None, :]
        out = np.einsum("ij,ij->i", ders[deriv], c[idx])
        return float(out[0]) if scalar else out

    def greville(self) -> np.ndarray:
        """Knot averages; as coefficients they reproduce ``f(x) = x`` (full basis)."""
        t = self.knots
        p = self.degree
        return np.array([t[i + 1 : i + p + 1].mean() for i in range(self.full_dim)])


def build_space(mesh, r: int = 4, mu: int | None = None, zero_bc: bool = False) -> SplineSpace:
    return SplineSpace(mesh, r, mu, zero_bc)
