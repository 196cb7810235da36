"""Manufactured solutions of the forced shallow water system.

    eta_t + u_x + (eta u)_x = g_eta
    u_t + eta_x + u u_x     = g_u

with u(0, t) = u(1, t) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["ManufacturedSolution", "mms_library", "get_mms", "QUIESCENT"]

pi = np.pi


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form exact solution with its first derivatives; forcing follows."""

    name: str
    eta: Callable
    eta_x: Callable
    eta_t: Callable
    u: Callable
    u_x: Callable
    u_t: Callable
    forced: bool = True

    def g_eta(self, x, t):
        eta, u = self.eta(x, t), self.u(x, t)
        ux = self.u_x(x, t)
        return self.eta_t(x, t) + ux + self.eta_x(x, t) * u + eta * ux

    def g_u(self, x, t):
        u = self.u(x, t)
        return self.u_t(x, t) + self.eta_x(x, t) + u * self.u_x(x, t)

    def at(self, t):
        """(eta, eta_x, u, u_x) as callables of x at time t."""
        return (
            lambda x: self.eta(x, t),
            lambda x: self.eta_x(x, t),
            lambda x: self.u(x, t),
            lambda x: self.u_x(x, t),
        )


def _u(x, t):
    return np.exp(-x * t) * np.sin(pi * x)


def _u_x(x, t):
    return np.exp(-x * t) * (pi * np.cos(pi * x) - t * np.sin(pi * x))


def _u_t(x, t):
    return -x * np.exp(-x * t) * np.sin(pi * x)


MMS1 = ManufacturedSolution(
    name="mms1",
    eta=lambda x, t: np.exp(2 * t) * (x + np.cos(pi * x) + 2),
    eta_x=lambda x, t: np.exp(2 * t) * (1 - pi * np.sin(pi * x)),
    eta_t=lambda x, t: 2 * np.exp(2 * t) * (x + np.cos(pi * x) + 2),
    u=_u,
    u_x=_u_x,
    u_t=_u_t,
)

MMS2 = ManufacturedSolution(
    name="mms2",
    eta=lambda x, t: np.exp(-4 * t**2) * (x + np.cos(pi * x)),
    eta_x=lambda x, t: np.exp(-4 * t**2) * (1 - pi * np.sin(pi * x)),
    eta_t=lambda x, t: -8 * t * np.exp(-4 * t**2) * (x + np.cos(pi * x)),
    u=_u,
    u_x=_u_x,
    u_t=_u_t,
)


def _zero(x, t):
    return np.zeros_like(np.asarray(x, dtype=float))


# still water: eta = u = 0 solves the unforced system
QUIESCENT = ManufacturedSolution(
    name="quiescent",
    eta=_zero,
    eta_x=_zero,
    eta_t=_zero,
    u=_zero,
    u_x=_zero,
    u_t=_zero,
    forced=False,
)


def mms_library() -> dict:
    """The two manufactured solutions, keyed 1 and 2."""
    return {1: MMS1, 2: MMS2}


def get_mms(mms_id: int) -> ManufacturedSolution:
    if mms_id == 0:
        return QUIESCENT
    try:
        return mms_library()[mms_id]
    except KeyError:
        raise ValueError(f"unknown manufactured solution id {mms_id!r}; expected 0, 1 or 2") from None
