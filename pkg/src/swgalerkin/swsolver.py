"""Standard Galerkin / classical RK4 scheme for the 1D shallow water equations.

Elevation ``H`` lives in S_h, velocity ``U`` in S_{h,0}. One step of size
``k`` runs the four RK4 stages on the coefficient ODE system

    H' = -P[(U + H U)_x] + P[g_eta],     U' = -P_0[H_x + U U_x] + P_0[g_u].
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .projection import ProjectedFunction, Projector, error_norms
from .spline import SplineSpace

__all__ = [
    "BlowUpError",
    "RkTableau",
    "RK4",
    "rk4_step",
    "State",
    "ShallowWaterGalerkin",
    "flux_phi",
    "flux_f",
    "time_grid",
]

BLOWUP_THRESHOLD = 1e10


class BlowUpError(RuntimeError):
    """Coefficients became non-finite or exceeded the blow-up threshold."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


@dataclass(frozen=True)
class RkTableau:
    a: tuple  # stage j uses y_n + k * a[j-1] * K_{j-1}, j = 1..3
    b: tuple
    c: tuple


RK4 = RkTableau(a=(0.5, 0.5, 1.0), b=(1 / 6, 1 / 3, 1 / 3, 1 / 6), c=(0.0, 0.5, 0.5, 1.0))


def rk4_step(f, t, y, k, tableau: RkTableau = RK4):
    """One explicit RK step for ``y' = f(t, y)`` with a tableau of the classical RK4 shape."""
    K = f(t + tableau.c[0] * k, y)
    acc = tableau.b[0] * K
    for j, a in enumerate(tableau.a, start=1):
        K = f(t + tableau.c[j] * k, y + (k * a) * K)
        acc = acc + tableau.b[j] * K
    return y + k * acc


@dataclass(frozen=True, eq=False)
class State:
    eta: ProjectedFunction
    vel: ProjectedFunction
    time: float = 0.0

    def to_csv(self, path=None, samples_per_element: int = 4) -> str:
        """Snapshot ``x, eta_h(x), u_h(x)`` on a grid refining the mesh."""
        mesh = self.eta.space.mesh
        x = mesh.breakpoints
        s = np.arange(samples_per_element) / samples_per_element
        xs = np.append((x[:-1, None] + np.diff(x)[:, None] * s[None, :]).ravel(), 1.0)
        eta, vel = self.eta(xs), self.vel(xs)
        buf = io.StringIO()
        buf.write(f"# t={self.time:.17g}\n")
        buf.write("x,eta,u\n")
        for row in zip(xs, eta, vel):
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def flux_phi(H: ProjectedFunction, U: ProjectedFunction):
    """Pointwise ``Phi = U + H U`` (deriv=0) and ``Phi_x = U_x + H_x U + H U_x`` (deriv=1)."""

    def phi(x, deriv: int = 0):
        h, u = H(x), U(x)
        if deriv == 0:
            return u + h * u
        if deriv == 1:
            hx, ux = H(x, 1), U(x, 1)
            return ux + hx * u + h * ux
        raise ValueError("flux_phi supports deriv 0 or 1")

    return phi


def flux_f(H: ProjectedFunction, U: ProjectedFunction):
    """Pointwise ``F = H_x + U U_x``."""

    def F(x):
        return H(x, 1) + U(x) * U(x, 1)

    return F


class ShallowWaterGalerkin:
    """Fully discrete Galerkin-RK4 solver on one mesh and one spline space.

    Mass matrices of S_h and S_{h,0} are assembled and factorized once at
    construction.

    Parameters
    ----------
    mesh : Mesh
    r, mu : int
        Spline order and smoothness (cubic C^2 is ``r=4, mu=2``).
    n_quad : int, optional
        Gauss points per element, default ``r + 2``.
    """

    def __init__(self, mesh, r: int = 4, mu: int | None = None, n_quad: int | None = None):
        self.mesh = mesh
        self.eta_space = SplineSpace(mesh, r, mu)
        self.vel_space = self.eta_space.restricted()
        self.eta_proj = Projector(self.eta_space, n_quad, nderiv=1)
        self.vel_proj = Projector(self.vel_space, n_quad, nderiv=1)
        self.eta_proj.mass.factorize()
        self.vel_proj.mass.factorize()
        self.xq = self.eta_proj.xq
        self._n_eta = self.eta_space.dim

    # coefficient-level pieces

    def _split(self, y):
        return y[: self._n_eta], y[self._n_eta :]

    def _rhs(self, t, y, forcing):
        ce, cu = self._split(y)
        pe, pu = self.eta_proj, self.vel_proj
        H, Hx = pe.B[0] @ ce, pe.B[1] @ ce
        U, Ux = pu.B[0] @ cu, pu.B[1] @ cu
        phi_x = Ux + Hx * U + H * Ux
        F = Hx + U * Ux
        if forcing is not None and forcing.forced:
            phi_x = phi_x - forcing.g_eta(self.xq, t)
            F = F - forcing.g_u(self.xq, t)
        return np.concatenate((-pe.solve(phi_x), -pu.solve(F)))

    def galerkin_rhs(self, H: ProjectedFunction, U: ProjectedFunction, t: float = 0.0, forcing=None):
        """Time derivatives ``(deta, dvel)`` of the coefficient vectors."""
        y = np.concatenate((H.coeffs, U.coeffs))
        return self._split(self._rhs(t, y, forcing))

    # states

    def state(self, eta_coeffs, vel_coeffs, t: float = 0.0) -> State:
        return State(
            ProjectedFunction(self.eta_space, eta_coeffs),
            ProjectedFunction(self.vel_space, vel_coeffs),
            float(t),
        )

    def initial_state(self, eta0, u0, t: float = 0.0) -> State:
        """``H^0 = P eta0``, ``U^0 = P_0 u0``."""
        return State(self.eta_proj.project(eta0), self.vel_proj.project(u0), float(t))

    def mms_initial_state(self, mms, t: float = 0.0) -> State:
        return self.initial_state(lambda x: mms.eta(x, t), lambda x: mms.u(x, t), t)

    def step(self, state: State, k: float, forcing=None) -> State:
        if not k > 0:
            raise ValueError(f"time step must be positive, got {k!r}")
        y = np.concatenate((state.eta.coeffs, state.vel.coeffs))
        y = rk4_step(lambda t, z: self._rhs(t, z, forcing), state.time, y, k)
        return self.state(*self._split(y), state.time + k)

    def evolve(self, state: State, k: float, n_steps: int, forcing=None) -> State:
        """Apply ``n_steps`` RK4 steps, aborting with :class:`BlowUpError` on divergence."""
        if not k > 0:
            raise ValueError(f"time step must be positive, got {k!r}")
        if n_steps < 0:
            raise ValueError("n_steps must be nonnegative")
        f = lambda t, z: self._rhs(t, z, forcing)  # noqa: E731
        y = np.concatenate((state.eta.coeffs, state.vel.coeffs))
        t0 = state.time
        for n in range(1, n_steps + 1):
            y = rk4_step(f, t0 + (n - 1) * k, y, k)
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_THRESHOLD:
                raise BlowUpError(
                    f"solution blew up at step {n} (t={t0 + n * k:.6g}); "
                    f"the Courant number k/h={k / self.mesh.h:.4g} is likely too large",
                    step=n,
                    time=t0 + n * k,
                )
        return self.state(*self._split(y), t0 + n_steps * k)

    def errors(self, state: State, mms, n_quad: int | None = None, linf_samples: int = 20) -> dict:
        """L2, Linf and H1-seminorm errors of both components against ``mms`` at ``state.time``."""
        eta, eta_x, u, u_x = mms.at(state.time)
        e = error_norms(state.eta, eta, [eta_x], n_quad=n_quad, linf_samples=linf_samples)
        v = error_norms(state.vel, u, [u_x], n_quad=n_quad, linf_samples=linf_samples)
        return {
            "L2_eta": e["L2"], "Linf_eta": e["Linf"], "H1_eta": e["H1semi"],
            "L2_u": v["L2"], "Linf_u": v["Linf"], "H1_u": v["H1semi"],
        }


def time_grid(T: float, *, lam: float | None = None, h: float | None = None,
              k: float | None = None, M: int | None = None):
    """Resolve exactly one of Courant number, step or step count to ``(k, M)`` with ``M k = T``.

    A Courant number ``lam`` uses ``k <= lam * h`` rounded down to the next
    step that divides ``T``.
    """
    given = [v is not None for v in (lam, k, M)]
    if sum(given) != 1:
        raise ValueError("specify exactly one of lam, k, M")
    if T <= 0:
        raise ValueError("final time T must be positive")
    if lam is not None:
        if h is None or lam <= 0:
            raise ValueError("a positive Courant number and a mesh size are required")
        M = int(np.ceil(T / (lam * h) - 1e-9))
    elif k is not None:
        if k <= 0:
            raise ValueError("time step must be positive")
        M = int(round(T / k))
        if abs(M * k - T) > 1e-12 * max(1.0, T):
            raise ValueError(f"k={k} does not divide T={T}")
    if M < 1:
        raise ValueError("number of time steps must be positive")
    return T / M, int(M)
