"""Command-line front end.

    swgalerkin solve            single run, writes a solution snapshot
    swgalerkin spatial-study    spatial orders at fixed Courant number or step
    swgalerkin temporal-study   temporal orders by the E* technique
    swgalerkin projection-study L2 projection errors up to H3

Every output file is CSV with a ``#`` preamble echoing the configuration.
The default output directory is ``$SWGALERKIN_OUTPUT_DIR`` or the current
directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .mesh import MESH_FAMILIES, make_mesh
from .mms import get_mms
from .swsolver import BlowUpError, ShallowWaterGalerkin, time_grid
from .studies import projection_study, spatial_study, temporal_study

__all__ = ["RunConfig", "ConfigError", "parse_config", "run", "main", "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "SWGALERKIN_OUTPUT_DIR"
COMMANDS = ("solve", "spatial-study", "temporal-study", "projection-study")

DEFAULT_N = {
    "solve": [160],
    "spatial-study": [160, 200, 240, 280, 320],
    "temporal-study": [60],
    "projection-study": [16, 32, 64, 128, 256],
}
DEFAULT_M = [110, 115, 120, 125, 130, 135, 140, 145, 150]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    command: str
    r: int = 4
    mu: int | None = None
    mesh: str = "quasi-a"
    N: list = field(default_factory=list)
    T: float = 1.0
    lam: float | None = None
    k: float | None = None
    M: list | None = None
    M_ref: int | None = None
    mms: int = 1
    target: str = "nonsmooth"
    output: str | None = None
    n_quad: int | None = None
    linf_samples: int = 20
    n_jobs: int = 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**d)

    def to_argv(self) -> list:
        """Command line that parses back to this configuration."""
        argv = [self.command, "--r", str(self.r), "--mesh", self.mesh,
                "--N", ",".join(map(str, self.N)), "--T", repr(self.T),
                "--mms", str(self.mms), "--target", self.target,
                "--linf-samples", str(self.linf_samples), "--jobs", str(self.n_jobs)]
        if self.mu is not None:
            argv += ["--mu", str(self.mu)]
        if self.lam is not None:
            argv += ["--lambda", repr(self.lam)]
        if self.k is not None:
            argv += ["--k", repr(self.k)]
        if self.M is not None:
            argv += ["--M", ",".join(map(str, self.M))]
        if self.M_ref is not None:
            argv += ["--M-ref", str(self.M_ref)]
        if self.output is not None:
            argv += ["--output", self.output]
        if self.n_quad is not None:
            argv += ["--quad", str(self.n_quad)]
        return argv

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.r < 3:
            raise ConfigError(f"--r must be >= 3, got {self.r}")
        if self.mu is None:
            self.mu = self.r - 2
        if not 1 <= self.mu <= self.r - 2:
            raise ConfigError(f"--mu must satisfy 1 <= mu <= r-2 = {self.r - 2}, got {self.mu}")
        if self.mesh not in MESH_FAMILIES:
            raise ConfigError(f"--mesh must be one of {', '.join(MESH_FAMILIES)}")
        if not self.N:
            self.N = list(DEFAULT_N[self.command])
        for n in self.N:
            if n < 1:
                raise ConfigError(f"N must be positive, got {n}")
            if self.mesh == "quasi-a" and n % 2:
                raise ConfigError(f"quasi-a meshes need even N, got {n}")
            if self.mesh == "quasi-b" and n % 2 == 0:
                raise ConfigError(f"quasi-b meshes need odd N (use --mesh uniform for even N), got {n}")
        if self.command in ("solve", "temporal-study") and len(self.N) != 1:
            raise ConfigError(f"{self.command} takes a single N, got {self.N}")
        if self.T <= 0:
            raise ConfigError("--T must be positive")
        if self.mms not in (0, 1, 2):
            raise ConfigError("--mms must be 0, 1 or 2")
        if self.target not in ("smooth", "nonsmooth"):
            raise ConfigError("--target must be smooth or nonsmooth")
        if self.n_quad is not None and not 1 <= self.n_quad <= 32:
            raise ConfigError("--quad must be in 1..32")
        if self.linf_samples < 1:
            raise ConfigError("--linf-samples must be positive")
        self._validate_time()
        return self

    def _validate_time(self):
        given = [name for name, v in (("--lambda", self.lam), ("--k", self.k), ("--M", self.M))
                 if v is not None]
        if self.command == "projection-study":
            if given or self.M_ref is not None:
                raise ConfigError("projection-study takes no time-stepping options")
            return
        if self.command == "temporal-study":
            if self.lam is not None or self.k is not None:
                raise ConfigError("temporal-study steps are set by --M and --M-ref, not --lambda/--k")
            if self.M is None:
                self.M = list(DEFAULT_M)
            if self.M_ref is None:
                self.M_ref = 600
            if min(self.M) < 1:
                raise ConfigError("--M values must be positive")
            if self.M_ref <= max(self.M):
                raise ConfigError(f"--M-ref ({self.M_ref}) must exceed every --M value (max {max(self.M)})")
            return
        if self.M_ref is not None:
            raise ConfigError("--M-ref only applies to temporal-study")
        if len(given) > 1:
            raise ConfigError(f"conflicting time step options: {' and '.join(given)}; give exactly one")
        if not given:
            self.lam = 0.05
        if self.lam is not None and self.lam <= 0:
            raise ConfigError("--lambda must be positive")
        if self.k is not None and self.k <= 0:
            raise ConfigError("--k must be positive")
        if self.M is not None and len(self.M) != 1:
            raise ConfigError("--M takes a single step count outside temporal-study")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swgalerkin",
        description="Galerkin/RK4 shallow water solver and convergence studies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
        p.add_argument("--r", type=int, help="spline order (degree r-1), default 4")
        p.add_argument("--mu", type=int, help="smoothness C^mu, default r-2")
        p.add_argument("--mesh", choices=MESH_FAMILIES, help="mesh family, default quasi-a")
        p.add_argument("--N", type=_int_list, help="number of elements, comma-separated list")
        p.add_argument("--T", type=float, help="final time, default 1")
        p.add_argument("--lambda", dest="lam", type=float, help="Courant number k/h, default 0.05")
        p.add_argument("--k", type=float, help="time step")
        p.add_argument("--M", type=_int_list, help="number of time steps (list for temporal-study)")
        p.add_argument("--M-ref", dest="M_ref", type=int, help="reference step count, default 600")
        p.add_argument("--mms", type=int, help="manufactured solution 1 or 2; 0 is still water")
        p.add_argument("--target", help="projection target: smooth or nonsmooth")
        p.add_argument("--output", "-o", help="output CSV path")
        p.add_argument("--quad", dest="n_quad", type=int, help="Gauss points per element")
        p.add_argument("--linf-samples", dest="linf_samples", type=int,
                       help="points per element for max-norm sampling, default 20")
        p.add_argument("--jobs", dest="n_jobs", type=int, help="parallel worker processes")
    return parser


def parse_config(argv=None) -> RunConfig:
    """Parse flags (and an optional ``--config`` JSON file) into a validated RunConfig.

    Raises :class:`ConfigError` on inconsistent options.
    """
    ns = _parser().parse_args(argv)
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                values.update(json.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {ns.config} is not valid JSON: {exc}") from exc
    for key, val in vars(ns).items():
        if key != "config" and val is not None:
            values[key] = val
    values["command"] = ns.command
    return RunConfig.from_dict(values).validate()


def _output_path(cfg: RunConfig) -> Path:
    if cfg.output:
        return Path(cfg.output)
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / f"{cfg.command}.csv"


def _preamble(cfg: RunConfig) -> dict:
    return {"artifact": f"swgalerkin {__version__}", "config": json.dumps(cfg.to_dict(), sort_keys=True)}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute ``cfg``; returns 0 on success, 1 on divergence."""
    out = stdout or sys.stdout
    path = _output_path(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)

    if cfg.command == "solve":
        return _run_solve(cfg, path, out)

    if cfg.command == "spatial-study":
        table = spatial_study(cfg.r, cfg.mu, cfg.mesh, cfg.N, cfg.T, lam=cfg.lam, k=cfg.k,
                              M=cfg.M[0] if cfg.M else None, mms_id=cfg.mms, n_quad=cfg.n_quad,
                              linf_samples=cfg.linf_samples, n_jobs=cfg.n_jobs)
    elif cfg.command == "temporal-study":
        table = temporal_study(cfg.r, cfg.mu, cfg.mesh, cfg.N[0], cfg.M, cfg.M_ref, cfg.T,
                               mms_id=cfg.mms, n_quad=cfg.n_quad)
    else:
        table = projection_study(cfg.r, cfg.mu, cfg.mesh, cfg.N, cfg.target, n_quad=cfg.n_quad,
                                 linf_samples=cfg.linf_samples, n_jobs=cfg.n_jobs)

    table.to_csv(path, preamble=_preamble(cfg))
    table.to_plot_data(path.with_suffix(".plot.dat"))
    print(table.format(), file=out)
    if "E_ref_eta" in table.metadata:
        print(f"E_ref (M={cfg.M_ref}): eta {table.metadata['E_ref_eta']:.4e}  "
              f"u {table.metadata['E_ref_u']:.4e}", file=out)
    print(f"wrote {path}", file=out)
    return 1 if table.diverged else 0


def _run_solve(cfg, path, out) -> int:
    mesh = make_mesh(cfg.mesh, cfg.N[0])
    mms = get_mms(cfg.mms)
    solver = ShallowWaterGalerkin(mesh, cfg.r, cfg.mu, cfg.n_quad)
    k, M = time_grid(cfg.T, lam=cfg.lam, h=mesh.h, k=cfg.k, M=cfg.M[0] if cfg.M else None)
    try:
        state = solver.evolve(solver.mms_initial_state(mms), k, M, mms)
    except BlowUpError as exc:
        print(f"diverged: {exc}", file=out)
        return 1
    text = state.to_csv()
    with open(path, "w") as fh:
        for key, val in _preamble(cfg).items():
            fh.write(f"# {key}={val}\n")
        fh.write(text)
    print(f"N={mesh.N} k={k:.6g} M={M} T={state.time:.6g}", file=out)
    if mms.forced:
        for key, val in solver.errors(state, mms, linf_samples=cfg.linf_samples).items():
            print(f"{key:>9} {val:.4e}", file=out)
    print(f"wrote {path}", file=out)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"swgalerkin: error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except OSError as exc:
        where = getattr(exc, "filename", None) or "output"
        print(f"swgalerkin: cannot write {where}: {exc.strerror or exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
