"""Mass matrices, L2 projections onto spline spaces and Sobolev error norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .quadrature import gauss_rule, quadrature_grid

__all__ = [
    "SingularMatrixError",
    "BandedSpdMatrix",
    "ProjectedFunction",
    "Projector",
    "NonSmoothV",
    "assemble_mass",
    "project",
    "error_norms",
    "build_nonsmooth_v",
    "NORM_NAMES",
]

NORM_NAMES = ("L2", "Linf", "H1semi", "H2semi", "H3semi", "H3full")


class SingularMatrixError(np.linalg.LinAlgError):
    """Cholesky factorization of a Gram matrix failed."""


class BandedSpdMatrix:
    """Symmetric positive definite band matrix in LAPACK lower band storage.

    ``band[d, j]`` holds ``A[j + d, j]`` for ``d = 0..bandwidth``. The
    Cholesky factor is computed on the first call to :meth:`solve` (or
    eagerly via :meth:`factorize`).
    """

    def __init__(self, band: np.ndarray):
        self.band = np.ascontiguousarray(band, dtype=float)
        self.bandwidth = self.band.shape[0] - 1
        self.dim = self.band.shape[1]
        self._factor = None

    @classmethod
    def from_sparse(cls, A, bandwidth: int) -> "BandedSpdMatrix":
        A = sp.csr_matrix(A)
        n = A.shape[0]
        band = np.zeros((bandwidth + 1, n))
        for d in range(bandwidth + 1):
            band[d, : n - d] = A.diagonal(-d)
        return cls(band)

    def factorize(self) -> "BandedSpdMatrix":
        if self._factor is None:
            try:
                self._factor = sla.cholesky_banded(self.band, lower=True, check_finite=False)
            except np.linalg.LinAlgError as exc:
                raise SingularMatrixError(f"Gram matrix of size {self.dim} is not SPD: {exc}") from exc
        return self

    @property
    def is_factorized(self) -> bool:
        return self._factor is not None

    def solve(self, b) -> np.ndarray:
        self.factorize()
        return sla.cho_solve_banded((self._factor, True), b, check_finite=False)

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.dim, self.dim))
        for d in range(self.bandwidth + 1):
            idx = np.arange(self.dim - d)
            A[idx + d, idx] = self.band[d, : self.dim - d]
            A[idx, idx + d] = self.band[d, : self.dim - d]
        return A

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.band[0] * x
        for d in range(1, self.bandwidth + 1):
            y[d:] += self.band[d, : self.dim - d] * x[:-d]
            y[:-d] += self.band[d, : self.dim - d] * x[d:]
        return y


class Projector:
    """Quadrature data, collocation matrices and the Gram matrix of one space.

    Everything needed to turn integrands into load vectors and load vectors
    into coefficients. Built once per space and reused.
    """

    def __init__(self, space, n_quad: int | None = None, extra_breaks=None, nderiv: int = 1):
        self.space = space
        self.n_quad = n_quad or space.r + 2
        self.extra_breaks = None if extra_breaks is None else tuple(sorted(extra_breaks))
        self.rule = gauss_rule(self.n_quad)
        self.xq, self.wq, self.eq = quadrature_grid(space.mesh, self.rule, self.extra_breaks)
        nderiv = min(nderiv, space.degree, 3)
        first, ders = space.basis_values(self.xq, nderiv)
        self.B = [space._assemble(first, ders[d]) for d in range(nderiv + 1)]
        self._BT0 = self.B[0].T.tocsr()
        self._mass = None

    @property
    def mass(self) -> BandedSpdMatrix:
        if self._mass is None:
            B0 = self.B[0]
            M = (B0.T @ sp.diags(self.wq) @ B0).tocsr()
            self._mass = BandedSpdMatrix.from_sparse(M, self.space.bandwidth)
        return self._mass

    def load(self, values) -> np.ndarray:
        """``b_i = (g, B_i)`` given ``g`` sampled at the quadrature nodes."""
        return self._BT0 @ (self.wq * values)

    def solve(self, values) -> np.ndarray:
        """Coefficients of the projection of ``g`` sampled at the nodes."""
        return self.mass.solve(self.load(values))

    def project(self, f) -> "ProjectedFunction":
        vals = np.broadcast_to(np.asarray(f(self.xq), dtype=float), self.xq.shape)
        return ProjectedFunction(self.space, self.solve(vals))

    def values(self, coeffs, deriv: int = 0) -> np.ndarray:
        return self.B[deriv] @ coeffs


@dataclass(frozen=True, eq=False)
class ProjectedFunction:
    """A spline ``sum_i c_i B_i`` on a fixed space."""

    space: object
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x, deriv: int = 0):
        return self.space.eval_function(self.coeffs, x, deriv)


def assemble_mass(space, n_quad: int | None = None) -> BandedSpdMatrix:
    return Projector(space, n_quad, nderiv=0).mass


def project(space, f, f_breaks=None, n_quad: int | None = None) -> ProjectedFunction:
    """L2 projection of the callable ``f`` onto ``space`` (P, or P_0 when zero_bc)."""
    return Projector(space, n_quad, f_breaks, nderiv=0).project(f)


def error_norms(
    pf: ProjectedFunction,
    f,
    derivatives=(),
    f_breaks=None,
    n_quad: int | None = None,
    linf_samples: int = 20,
) -> dict:
    """Norms of ``pf - f``.

    ``derivatives`` holds callbacks for f', f'', f''' (any prefix). The
    seminorm of order d is reported for every derivative supplied, and
    ``H3full`` only when all three are. ``Linf`` samples ``linf_samples``
    equispaced points in every element plus the breakpoints.
    """
    space = pf.space
    derivatives = tuple(derivatives)
    if len(derivatives) > 3:
        raise ValueError("at most three derivative callbacks are supported")
    if len(derivatives) > space.degree:
        raise ValueError(
            f"H{len(derivatives)} norms need splines of degree >= {len(derivatives)}, "
            f"space has degree {space.degree}"
        )
    proj = Projector(space, n_quad or space.r + 4, f_breaks, nderiv=len(derivatives))
    out = {}
    diff = proj.values(pf.coeffs, 0) - f(proj.xq)
    out["L2"] = float(np.sqrt(np.dot(proj.wq, diff * diff)))
    for d, fd in enumerate(derivatives, start=1):
        diff = proj.values(pf.coeffs, d) - fd(proj.xq)
        out[f"H{d}semi"] = float(np.sqrt(np.dot(proj.wq, diff * diff)))
    if len(derivatives) == 3:
        out["H3full"] = float(np.sqrt(sum(out[k] ** 2 for k in ("L2", "H1semi", "H2semi", "H3semi"))))
    xs = linf_points(space.mesh, linf_samples)
    out["Linf"] = float(np.max(np.abs(pf(xs) - f(xs))))
    return out


def linf_points(mesh, samples: int = 20) -> np.ndarray:
    x = mesh.breakpoints
    s = (np.arange(1, samples + 1) / (samples + 1))[None, :]
    inner = x[:-1, None] + np.diff(x)[:, None] * s
    return np.sort(np.concatenate((x, inner.ravel())))


class NonSmoothV:
    """A C^2 function on [0, 1] whose third derivative jumps at 1/4, 1/2, 3/4.

    ``v''' = exp(x), sin(pi x), exp(-x), cos(pi x)`` on the four quarters.
    Lower derivatives are exact antiderivatives normalized by
    ``v(0) = v'(0) = v''(0) = 0`` and glued continuously at the breaks.
    """

    breaks = (0.25, 0.5, 0.75)

    def __init__(self):
        pi = np.pi
        # (G0, G1, G2, G3): v''' and its 1-, 2-, 3-fold antiderivatives, per piece
        self._pieces = [
            (np.exp, np.exp, np.exp, np.exp),
            (
                lambda x: np.sin(pi * x),
                lambda x: -np.cos(pi * x) / pi,
                lambda x: -np.sin(pi * x) / pi**2,
                lambda x: np.cos(pi * x) / pi**3,
            ),
            (
                lambda x: np.exp(-x),
                lambda x: -np.exp(-x),
                lambda x: np.exp(-x),
                lambda x: -np.exp(-x),
            ),
            (
                lambda x: np.cos(pi * x),
                lambda x: np.sin(pi * x) / pi,
                lambda x: -np.cos(pi * x) / pi**2,
                lambda x: -np.sin(pi * x) / pi**3,
            ),
        ]
        self._left = (0.0,) + self.breaks
        # Taylor data (v, v', v'') at the left end of each piece
        self._start = []
        state = (0.0, 0.0, 0.0)
        for i, a in enumerate(self._left):
            self._start.append(state)
            b = 1.0 if i == 3 else self._left[i + 1]
            state = tuple(float(self._piece(i, np.array([b]), d)[0]) for d in range(3))

    def _piece(self, i, x, deriv):
        G = self._pieces[i]
        a = self._left[i]
        v0, v1, v2 = self._start[i]
        s = x - a
        if deriv == 3:
            return G[0](x)
        if deriv == 2:
            return G[1](x) - G[1](a) + v2
        if deriv == 1:
            return G[2](x) - G[2](a) - G[1](a) * s + v2 * s + v1
        return (
            G[3](x) - G[3](a) - G[2](a) * s - 0.5 * G[1](a) * s**2
            + 0.5 * v2 * s**2 + v1 * s + v0
        )

    def __call__(self, x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breaks, x, side="right")
        out = np.empty_like(x)
        for i in range(4):
            m = idx == i
            if np.any(m):
                out[m] = self._piece(i, x[m], deriv)
        return out if out.ndim else float(out)

    def derivative(self, deriv: int):
        return lambda x: self(x, deriv)


def build_nonsmooth_v() -> NonSmoothV:
    return NonSmoothV()
