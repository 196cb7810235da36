"""Convergence studies: spatial rates, temporal rates by the E* technique, projection errors."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mesh import make_mesh
from .mms import get_mms
from .projection import NonSmoothV, Projector, error_norms
from .spline import SplineSpace
from .swsolver import BlowUpError, ShallowWaterGalerkin, time_grid

__all__ = [
    "RateTable",
    "order",
    "gram_distance",
    "spatial_study",
    "temporal_study",
    "projection_study",
    "smooth_target",
    "SPATIAL_COLUMNS",
    "TEMPORAL_COLUMNS",
    "PROJECTION_COLUMNS",
]

SPATIAL_COLUMNS = ("L2_eta", "Linf_eta", "H1_eta", "L2_u", "Linf_u", "H1_u")
TEMPORAL_COLUMNS = ("Estar_eta", "Estar_u")
PROJECTION_COLUMNS = ("L2", "H1semi", "H2semi", "H3semi", "H3full", "Linf")

DIVERGED = "diverged"
NO_RATE = "-"


def order(e1: float, e2: float, m1: float, m2: float) -> float:
    """Observed order ``log(e1/e2) / log(m1/m2)``; NaN when undefined."""
    if m1 <= 0 or m2 <= 0 or m1 == m2:
        raise ValueError("resolution measures must be positive and distinct")
    if not (e1 > 0 and e2 > 0) or not (math.isfinite(e1) and math.isfinite(e2)):
        return float("nan")
    return math.log(e1 / e2) / math.log(m1 / m2)


@dataclass
class RateTable:
    """Errors per resolution with orders between consecutive rows.

    ``measure`` holds the quantity orders are taken against: ``h_max`` for
    spatial studies, ``k`` for temporal ones.
    """

    columns: tuple
    resolution: list = field(default_factory=list)
    measure: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    status: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    resolution_name: str = "N"

    def add_row(self, resolution, measure, errors=None):
        self.resolution.append(resolution)
        self.measure.append(measure)
        if errors is None:
            self.errors.append({c: float("nan") for c in self.columns})
            self.status.append(DIVERGED)
        else:
            self.errors.append({c: float(errors[c]) for c in self.columns})
            self.status.append("ok")

    @property
    def diverged(self) -> bool:
        return DIVERGED in self.status

    def rates(self, column) -> list:
        """Orders for ``column``; the first row (and rows next to diverged ones) get NaN."""
        out = [float("nan")]
        for i in range(1, len(self.resolution)):
            out.append(
                order(
                    self.errors[i - 1][column], self.errors[i][column],
                    self.measure[i - 1], self.measure[i],
                )
            )
        return out

    def column(self, name) -> np.ndarray:
        return np.array([row[name] for row in self.errors])

    def header(self) -> list:
        cols = ["resolution"]
        for c in self.columns:
            cols += [c, f"rate_{c}"]
        return cols

    def _cells(self):
        rates = {c: self.rates(c) for c in self.columns}
        for i, res in enumerate(self.resolution):
            cells = [str(res)]
            for c in self.columns:
                e, q = self.errors[i][c], rates[c][i]
                cells.append(DIVERGED if self.status[i] == DIVERGED else f"{e:.10e}")
                cells.append(NO_RATE if math.isnan(q) else f"{q:.6f}")
            yield cells

    def to_csv(self, path=None, preamble: dict | None = None) -> str:
        buf = io.StringIO()
        meta = dict(self.metadata)
        meta.update(preamble or {})
        for key, val in meta.items():
            buf.write(f"# {key}={val}\n")
        buf.write(",".join(self.header()) + "\n")
        for cells in self._cells():
            buf.write(",".join(cells) + "\n")
        return _emit(buf.getvalue(), path)

    def to_plot_data(self, path=None) -> str:
        """Whitespace-separated ``measure, log10(measure)`` and ``log10(error)`` per column."""
        buf = io.StringIO()
        names = ["resolution", "measure", "log10_measure"] + [f"log10_{c}" for c in self.columns]
        buf.write("# " + " ".join(names) + "\n")
        for i, res in enumerate(self.resolution):
            if self.status[i] == DIVERGED:
                continue
            m = self.measure[i]
            vals = [f"{res}", f"{m:.10e}", f"{math.log10(m):.10f}"]
            for c in self.columns:
                e = self.errors[i][c]
                vals.append(f"{math.log10(e):.10f}" if e > 0 else "nan")
            buf.write(" ".join(vals) + "\n")
        return _emit(buf.getvalue(), path)

    def format(self) -> str:
        """Human-readable table in the layout of the usual convergence tables."""
        rates = {c: self.rates(c) for c in self.columns}
        head = f"{self.resolution_name:>6}" + "".join(f" | {c:>12} {'rate':>6}" for c in self.columns)
        lines = [head, "-" * len(head)]
        for i, res in enumerate(self.resolution):
            line = f"{res:>6}"
            for c in self.columns:
                if self.status[i] == DIVERGED:
                    line += f" | {DIVERGED:>12} {NO_RATE:>6}"
                    continue
                q = rates[c][i]
                qs = NO_RATE if math.isnan(q) else f"{q:.3f}"
                line += f" | {self.errors[i][c]:12.4e} {qs:>6}"
            lines.append(line)
        return "\n".join(lines)


def _emit(text, path):
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _map(fn, jobs, n_jobs):
    if n_jobs is None or n_jobs <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, jobs))


# spatial study


def _spatial_row(job):
    r, mu, family, N, T, lam, k, M, mms_id, n_quad, linf_samples = job
    mesh = make_mesh(family, N)
    mms = get_mms(mms_id)
    solver = ShallowWaterGalerkin(mesh, r, mu, n_quad)
    step, nsteps = time_grid(T, lam=lam, h=mesh.h, k=k, M=M)
    try:
        state = solver.evolve(solver.mms_initial_state(mms), step, nsteps, mms)
    except BlowUpError:
        return mesh.h_max, None
    return mesh.h_max, solver.errors(state, mms, linf_samples=linf_samples)


def spatial_study(
    r=4, mu=None, family="quasi-a", N_list=(160, 200, 240, 280, 320), T=1.0,
    lam=None, k=None, M=None, mms_id=1, n_quad=None, linf_samples=20, n_jobs=1,
) -> RateTable:
    """Errors at ``T`` against the manufactured solution for each N.

    Exactly one of ``lam`` (Courant number k/h), ``k`` or ``M`` fixes the
    time step; a row whose run blows up is kept and marked diverged.
    """
    mu = r - 2 if mu is None else mu
    if lam is None and k is None and M is None:
        lam = 0.05
    jobs = [(r, mu, family, N, T, lam, k, M, mms_id, n_quad, linf_samples) for N in N_list]
    table = RateTable(
        SPATIAL_COLUMNS,
        metadata=dict(study="spatial", r=r, mu=mu, mesh=family, T=T, mms=mms_id,
                      **{"lambda": lam, "k": k, "M": M}),
    )
    for N, (hmax, errs) in zip(N_list, _map(_spatial_row, jobs, n_jobs)):
        table.add_row(N, hmax, errs)
    return table


# temporal study


def gram_distance(mass, a, b) -> float:
    """L2 distance of two splines on one space, exact through the Gram matrix."""
    d = np.asarray(a) - np.asarray(b)
    return math.sqrt(max(float(d @ mass.matvec(d)), 0.0))


def temporal_study(
    r=4, mu=None, family="uniform", N=60, M_list=(110, 115, 120), M_ref=600, T=1.0,
    mms_id=2, n_quad=None,
) -> RateTable:
    """Temporal orders from ``E* = ||V^M - V^{M_ref}||`` on one spatial grid.

    The reference run is computed once. Its true L2 errors are stored in
    ``table.metadata`` as ``E_ref_eta`` and ``E_ref_u``.
    """
    mu = r - 2 if mu is None else mu
    M_list = list(M_list)
    if not M_list:
        raise ValueError("M_list is empty")
    if M_ref <= max(M_list):
        raise ValueError(f"M_ref={M_ref} must exceed every M in the list (max {max(M_list)})")
    mesh = make_mesh(family, N)
    mms = get_mms(mms_id)
    solver = ShallowWaterGalerkin(mesh, r, mu, n_quad)
    init = solver.mms_initial_state(mms)
    table = RateTable(
        TEMPORAL_COLUMNS,
        metadata=dict(study="temporal", r=r, mu=mu, mesh=family, N=N, T=T, mms=mms_id, M_ref=M_ref),
        resolution_name="M",
    )
    ref = solver.evolve(init, T / M_ref, M_ref, mms)
    ref_err = solver.errors(ref, mms)
    table.metadata["E_ref_eta"] = ref_err["L2_eta"]
    table.metadata["E_ref_u"] = ref_err["L2_u"]
    Me, Mu = solver.eta_proj.mass, solver.vel_proj.mass
    for M in M_list:
        try:
            st = solver.evolve(init, T / M, M, mms)
        except BlowUpError:
            table.add_row(M, T / M, None)
            continue
        table.add_row(M, T / M, {
            "Estar_eta": gram_distance(Me, st.eta.coeffs, ref.eta.coeffs),
            "Estar_u": gram_distance(Mu, st.vel.coeffs, ref.vel.coeffs),
        })
    return table


# projection study


class _SmoothTarget:
    """v(x) = sin(pi x / 2 + 1) and its derivatives."""

    breaks = ()

    def __call__(self, x, deriv: int = 0):
        a = np.pi / 2
        phase = np.asarray(x, dtype=float) * a + 1.0
        return a**deriv * np.sin(phase + deriv * np.pi / 2)

    def derivative(self, deriv: int):
        return lambda x: self(x, deriv)


smooth_target = _SmoothTarget()


def _target(name):
    if name == "smooth":
        return smooth_target
    if name == "nonsmooth":
        return NonSmoothV()
    raise ValueError(f"unknown projection target {name!r}; expected 'smooth' or 'nonsmooth'")


def _projection_row(job):
    r, mu, family, N, target, n_quad, linf_samples = job
    v = _target(target)
    space = SplineSpace(make_mesh(family, N), r, mu)
    breaks = v.breaks or None
    pf = Projector(space, n_quad, breaks, nderiv=0).project(v)
    errs = error_norms(pf, v, [v.derivative(d) for d in (1, 2, 3)], breaks,
                       n_quad=n_quad, linf_samples=linf_samples)
    return space.mesh.h_max, errs


def projection_study(
    r=4, mu=None, family="uniform", N_list=(9, 17, 33, 65, 129, 257), target="nonsmooth",
    n_quad=None, linf_samples=20, n_jobs=1,
) -> RateTable:
    """Errors of the L2 projection of a fixed function in L2, H1-H3 seminorms, H3 and Linf."""
    mu = r - 2 if mu is None else mu
    if r - 1 < 3:
        raise ValueError("projection studies measure H3 errors and need splines of degree >= 3")
    _target(target)
    jobs = [(r, mu, family, N, target, n_quad, linf_samples) for N in N_list]
    table = RateTable(
        PROJECTION_COLUMNS,
        metadata=dict(study="projection", r=r, mu=mu, mesh=family, target=target),
    )
    for N, (hmax, errs) in zip(N_list, _map(_projection_row, jobs, n_jobs)):
        table.add_row(N, hmax, errs)
    return table
