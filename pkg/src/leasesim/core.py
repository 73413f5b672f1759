"""Scalar building blocks of the leasing control loop.

Queue recurrences, the joint-lease departure rule, per-slot cost, and the
quadratic potential used by the drift-plus-penalty controller. Everything
here is a pure function of plain numbers so the same definitions serve the
simulator, the policies, and the tests without any array machinery.
"""
from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "ConfigError",
    "QueueState",
    "LeaseDecision",
    "ControlParams",
    "HOLD",
    "LEASE",
    "advance_data_queue",
    "advance_virtual_queue",
    "departure",
    "slot_cost",
    "lyapunov",
]


class ConfigError(ValueError):
    """Invalid configuration: bad field values, missing policy parameters,
    malformed files. Maps to exit code 1 at the CLI boundary."""


@dataclass(frozen=True)
class QueueState:
    """Backlog pair a policy observes: data packets q, delay urgency z."""

    q: float
    z: float

    def __post_init__(self) -> None:
        if self.q < 0 or self.z < 0:
            raise ValueError(f"queue state must be non-negative, got q={self.q}, z={self.z}")


@dataclass(frozen=True)
class LeaseDecision:
    """Joint lease pair (x, y): x leases the reflecting surface, y the
    spectrum. A packet departs only when both are leased in the same slot."""

    x: int
    y: int

    def __post_init__(self) -> None:
        if self.x not in (0, 1) or self.y not in (0, 1):
            raise ValueError(f"decision components must be binary, got ({self.x}, {self.y})")


HOLD = LeaseDecision(0, 0)
LEASE = LeaseDecision(1, 1)


@dataclass(frozen=True)
class ControlParams:
    """Controller knobs.

    v weights cost against queue drift (larger v tolerates more backlog to
    save money); eps_d is the per-slot urgency accrued while not serving
    (larger eps_d buys delay down at higher cost). The expected prices feed
    the threshold rule, which deliberately ignores realized prices.
    """

    v: float
    eps_d: float
    expected_price_ris: float
    expected_price_spectrum: float

    def __post_init__(self) -> None:
        if self.v <= 0:
            raise ConfigError(f"v must be positive, got {self.v}")
        if self.eps_d <= 0:
            raise ConfigError(f"eps_d must be positive, got {self.eps_d}")
        if self.expected_price_ris <= 0 or self.expected_price_spectrum <= 0:
            raise ConfigError("expected prices must be positive")


def advance_data_queue(q: float, r: int, a: int) -> float:
    """Next data backlog: serve up to r, clamp at empty, add a arrivals."""
    if q < 0 or r < 0 or a < 0:
        raise ValueError("advance_data_queue arguments must be non-negative")
    return max(q - r, 0.0) + a


def advance_virtual_queue(z: float, r: int, eps_d: float) -> float:
    """Next delay urgency: a served slot relieves one unit, an idle slot
    accrues eps_d, clamped at zero."""
    if z < 0 or r < 0 or eps_d < 0:
        raise ValueError("advance_virtual_queue arguments must be non-negative")
    return max(z - r + eps_d * (1 - r), 0.0)


def departure(x: int, y: int) -> int:
    """Packets served this slot: 1 only when both resources are leased."""
    return x * y


def slot_cost(x: int, y: int, price_ris: float, price_spectrum: float) -> float:
    """Leasing charge for the slot; each leased resource pays its own price,
    so a single-resource lease is charged even though it serves nothing."""
    if price_ris < 0 or price_spectrum < 0:
        raise ValueError("prices must be non-negative")
    return x * price_ris + y * price_spectrum


def lyapunov(q: float, z: float) -> float:
    """Quadratic congestion potential (q^2 + z^2) / 2."""
    return 0.5 * (q * q + z * z)
