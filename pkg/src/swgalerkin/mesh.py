"""Partitions of [0, 1]: uniform and the two alternating quasiuniform families."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Mesh",
    "uniform_mesh",
    "quasiuniform_mesh_a",
    "quasiuniform_mesh_b",
    "make_mesh",
    "MESH_FAMILIES",
]

MESH_FAMILIES = ("uniform", "quasi-a", "quasi-b")


@dataclass(frozen=True, eq=False)
class Mesh:
    """Ordered breakpoints ``0 = x_1 < ... < x_{N+1} = 1``.

    ``h`` is the nominal mesh parameter of the family the mesh was built
    from (``1/N`` for uniform and family A, ``2/(2N-1)`` for family B); it
    is what a Courant number ``k/h`` refers to. ``h_max`` is the actual
    largest element.
    """

    breakpoints: np.ndarray
    family: str = "custom"
    h: float = field(default=float("nan"))

    def __post_init__(self):
        x = np.array(self.breakpoints, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("a mesh needs at least two breakpoints")
        if x[0] != 0.0 or x[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        x.setflags(write=False)
        object.__setattr__(self, "breakpoints", x)
        if np.isnan(self.h):
            object.__setattr__(self, "h", self.h_max)

    @property
    def N(self) -> int:
        return self.breakpoints.size - 1

    @property
    def element_lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def h_max(self) -> float:
        return float(self.element_lengths.max())

    @property
    def h_min(self) -> float:
        return float(self.element_lengths.min())

    @property
    def quasiuniformity_ratio(self) -> float:
        return self.h_max / self.h_min

    def locate(self, x) -> np.ndarray:
        """Element index of each point; the right end belongs to the last element."""
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(idx, 0, self.N - 1)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write("x\n")
        for v in self.breakpoints:
            buf.write(f"{v:.17g}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def __repr__(self):
        return f"Mesh(family={self.family!r}, N={self.N}, h_max={self.h_max:.6g})"


def _alternating(N, first, period, denom, family, h):
    """Lengths alternating ``first/denom`` and ``(period - first)/denom``.

    Breakpoints come from integer multiples of ``period`` rather than a
    running sum, so they carry no accumulated rounding.
    """
    j = np.arange(N + 1)
    x = (period * (j // 2) + first * (j % 2)) / denom
    x[-1] = 1.0
    return Mesh(x, family=family, h=h)


def _check_N(N):
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    return int(N)


def uniform_mesh(N: int) -> Mesh:
    N = _check_N(N)
    x = np.arange(N + 1) / N
    return Mesh(x, family="uniform", h=1.0 / N)


def quasiuniform_mesh_a(N: int) -> Mesh:
    """Alternating lengths 1.2/N (odd elements) and 0.8/N (even elements)."""
    N = _check_N(N)
    if N % 2:
        raise ValueError(f"quasi-a mesh needs an even N, got {N}")
    # pairs (1.2h, 0.8h) span 2h: x_{2j} = 2j/N, x_{2j+1} = (2j + 1.2)/N
    return _alternating(N, 1.2, 2.0, N, "quasi-a", 1.0 / N)


def quasiuniform_mesh_b(N: int) -> Mesh:
    """Alternating lengths h/2 (odd elements) and 3h/2 (even elements), h = 2/(2N-1).

    Only defined for odd N; for even N use :func:`uniform_mesh`.
    """
    N = _check_N(N)
    if N % 2 == 0:
        raise ValueError(f"quasi-b mesh needs an odd N (use uniform_mesh for even N), got {N}")
    # pairs (h/2, 3h/2) span 2h: x_{2j} = 4j/(2N-1), x_{2j+1} = (4j + 1)/(2N-1)
    return _alternating(N, 1.0, 4.0, 2 * N - 1, "quasi-b", 2.0 / (2 * N - 1))


def make_mesh(family: str, N: int) -> Mesh:
    if family == "uniform":
        return uniform_mesh(N)
    if family == "quasi-a":
        return quasiuniform_mesh_a(N)
    if family == "quasi-b":
        return quasiuniform_mesh_b(N)
    raise ValueError(f"unknown mesh family {family!r}; expected one of {MESH_FAMILIES}")
