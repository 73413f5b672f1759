"""Seeded market processes: packet arrivals, per-slot resource prices, and
availability flags.

Arrivals are Bernoulli, prices continuous uniform, availabilities two
independent Bernoullis, all i.i.d. across slots. One generator owns one run;
the draw order inside a slot (arrival, price_ris, price_spectrum, avail_ris,
avail_spectrum) is fixed so that identical seeds always reproduce identical
observation sequences.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .core import ConfigError

__all__ = [
    "DEFAULT_SEED",
    "ScenarioConfig",
    "MarketObservation",
    "Realization",
    "draw_slot",
    "draw_realization",
    "expected_price",
    "empirical_means",
    "derive_seed",
    "scenario_fingerprint",
    "scenario_from_dict",
]

DEFAULT_SEED = 42


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulated market plus the workload it serves.

    freeze_z_when_empty deviates from the verbatim urgency update by
    suspending accrual while the data queue is empty; it is off by default
    and exists for experimentation (bulk-upload scenarios switch it on).
    """

    horizon_slots: int = 5000
    arrival_prob: float = 0.3
    price_low: float = 1.0
    price_high: float = 10.0
    avail_prob_ris: float = 0.9
    avail_prob_spectrum: float = 0.9
    initial_backlog: int = 0
    seed: int = DEFAULT_SEED
    freeze_z_when_empty: bool = False

    def __post_init__(self) -> None:
        if self.horizon_slots < 1:
            raise ConfigError(f"horizon_slots must be >= 1, got {self.horizon_slots}")
        for name in ("arrival_prob", "avail_prob_ris", "avail_prob_spectrum"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if self.price_low <= 0 or self.price_high < self.price_low:
            raise ConfigError(
                f"prices must satisfy 0 < price_low <= price_high, "
                f"got [{self.price_low}, {self.price_high}]"
            )
        if self.initial_backlog < 0:
            raise ConfigError(f"initial_backlog must be >= 0, got {self.initial_backlog}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        joint = self.avail_prob_ris * self.avail_prob_spectrum
        if self.arrival_prob >= joint and self.arrival_prob > 0:
            warnings.warn(
                f"arrival_prob={self.arrival_prob} is not below the joint availability "
                f"{joint:.4f}; the data queue has no stability headroom",
                stacklevel=2,
            )


@dataclass(frozen=True)
class MarketObservation:
    """What one slot shows the controller: realized prices, availability
    flags, and whether a packet arrived."""

    price_ris: float
    price_spectrum: float
    avail_ris: int
    avail_spectrum: int
    arrival: int


@dataclass
class Realization:
    """A fully drawn observation sequence as columns, one entry per slot."""

    arrival: np.ndarray = field(repr=False)
    price_ris: np.ndarray = field(repr=False)
    price_spectrum: np.ndarray = field(repr=False)
    avail_ris: np.ndarray = field(repr=False)
    avail_spectrum: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.arrival)

    def observation(self, i: int) -> MarketObservation:
        return MarketObservation(
            price_ris=float(self.price_ris[i]),
            price_spectrum=float(self.price_spectrum[i]),
            avail_ris=int(self.avail_ris[i]),
            avail_spectrum=int(self.avail_spectrum[i]),
            arrival=int(self.arrival[i]),
        )


def draw_slot(config: ScenarioConfig, rng: np.random.Generator) -> MarketObservation:
    """Draw one slot's observation, advancing the generator deterministically."""
    arrival = 1 if rng.random() < config.arrival_prob else 0
    price_ris = rng.uniform(config.price_low, config.price_high)
    price_spectrum = rng.uniform(config.price_low, config.price_high)
    avail_ris = 1 if rng.random() < config.avail_prob_ris else 0
    avail_spectrum = 1 if rng.random() < config.avail_prob_spectrum else 0
    return MarketObservation(price_ris, price_spectrum, avail_ris, avail_spectrum, arrival)


def draw_realization(config: ScenarioConfig, n_slots: int | None = None) -> Realization:
    """Draw the whole observation sequence for a scenario up front.

    Draws go through draw_slot one slot at a time, so a sequence assembled
    here is bit-identical to what an incremental consumer of draw_slot sees.
    """
    n = config.horizon_slots if n_slots is None else n_slots
    rng = np.random.default_rng(config.seed)
    arrival = np.zeros(n, dtype=np.int64)
    price_ris = np.zeros(n, dtype=np.float64)
    price_spectrum = np.zeros(n, dtype=np.float64)
    avail_ris = np.zeros(n, dtype=np.int64)
    avail_spectrum = np.zeros(n, dtype=np.int64)
    for i in range(n):
        obs = draw_slot(config, rng)
        arrival[i] = obs.arrival
        price_ris[i] = obs.price_ris
        price_spectrum[i] = obs.price_spectrum
        avail_ris[i] = obs.avail_ris
        avail_spectrum[i] = obs.avail_spectrum
    return Realization(arrival, price_ris, price_spectrum, avail_ris, avail_spectrum)


def expected_price(price_low: float, price_high: float) -> float:
    """Mean of the uniform price law on [price_low, price_high]."""
    if price_low > price_high:
        raise ValueError(f"price_low {price_low} exceeds price_high {price_high}")
    return (price_low + price_high) / 2.0


def empirical_means(
    config: ScenarioConfig, n_slots: int
) -> tuple[float, float, float, float, float]:
    """Sample means over n_slots fresh draws, for sanity-checking the
    stochastic layer against its analytic moments.

    Returns (mean_price_ris, mean_price_spectrum, mean_avail_ris,
    mean_avail_spectrum, mean_arrival).
    """
    if n_slots < 1:
        raise ValueError(f"n_slots must be >= 1, got {n_slots}")
    r = draw_realization(config, n_slots)
    return (
        float(r.price_ris.mean()),
        float(r.price_spectrum.mean()),
        float(r.avail_ris.mean()),
        float(r.avail_spectrum.mean()),
        float(r.arrival.mean()),
    )


def derive_seed(base_seed: int, index: int) -> int:
    """Mix a base seed and a run index into an independent 64-bit seed.

    The fixed mixing rule for parallel or per-cell runs: feed both numbers
    as the entropy of a numpy SeedSequence and take one 64-bit word.
    """
    ss = np.random.SeedSequence([base_seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def scenario_fingerprint(config: ScenarioConfig) -> str:
    """Short stable digest of every scenario field, seed included; two runs
    share a fingerprint exactly when they see the same market and workload."""
    payload = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def scenario_from_dict(data: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from parsed JSON, rejecting unknown fields."""
    if not isinstance(data, dict):
        raise ConfigError("scenario document must be a JSON object")
    known = {f for f in ScenarioConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown scenario fields: {sorted(unknown)}; valid fields: {sorted(known)}")
    try:
        return ScenarioConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"bad scenario document: {exc}") from exc


def scenario_overridden(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    """Copy a scenario with some fields replaced (validation re-runs)."""
    return replace(config, **overrides)
